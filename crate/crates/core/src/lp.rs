//! Dense exact-rational simplex for `min c·v` subject to `A v = b`, `v ≥ 0`.
//!
//! Two phases with one artificial per row and Bland's rule throughout, so
//! the pivot sequence is fully determined by the input. The artificial
//! columns are kept to the end: they carry the basis inverse, from which the
//! dual solution is read.

use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StandardForm {
    pub rows: Vec<Vec<Rational>>,
    pub rhs: Vec<Rational>,
    pub cost: Vec<Rational>,
}

impl StandardForm {
    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_vars(&self) -> usize {
        self.cost.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub value: Rational,
    pub primal: Vec<Rational>,
    /// `c_B B⁻¹`: an optimal solution of `max b·π` subject to `Aᵀπ ≤ c`.
    pub dual: Vec<Rational>,
    pub pivots: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Optimal(Solution),
    Infeasible,
    Unbounded,
}

struct Tableau {
    /// `m` rows of `n + m + 1` entries; the last entry is the right-hand side.
    t: Vec<Vec<Rational>>,
    reduced: Vec<Rational>,
    value: Rational,
    basis: Vec<usize>,
    n: usize,
    m: usize,
    pivots: usize,
}

impl Tableau {
    fn width(&self) -> usize {
        self.n + self.m
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let width = self.width();
        let inv = Rational::one() / &self.t[row][col];
        if !inv.is_one() {
            for v in self.t[row].iter_mut() {
                if !v.is_zero() {
                    *v *= &inv;
                }
            }
        }
        let support: Vec<usize> = (0..=width).filter(|&j| !self.t[row][j].is_zero()).collect();
        let pivot_row = core::mem::take(&mut self.t[row]);
        for (r, other) in self.t.iter_mut().enumerate() {
            if r == row || other[col].is_zero() {
                continue;
            }
            let factor = other[col].clone();
            for &j in &support {
                let delta = &factor * &pivot_row[j];
                other[j] -= delta;
            }
        }
        if !self.reduced[col].is_zero() {
            let factor = self.reduced[col].clone();
            for &j in support.iter().filter(|&&j| j < width) {
                let delta = &factor * &pivot_row[j];
                self.reduced[j] -= delta;
            }
            self.value -= &factor * &pivot_row[width];
        }
        self.t[row] = pivot_row;
        self.basis[row] = col;
        self.pivots += 1;
    }

    /// Bland's rule: lowest-index improving column, ties in the ratio test
    /// broken by lowest basic index. `Err(())` means unbounded.
    fn optimize(&mut self, allowed: usize) -> Result<(), ()> {
        let width = self.width();
        loop {
            let Some(col) = (0..allowed).find(|&j| self.reduced[j].is_negative()) else { return Ok(()) };
            let mut best: Option<(usize, Rational)> = None;
            for r in 0..self.m {
                let a = &self.t[r][col];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.t[r][width] / a;
                let better = match &best {
                    None => true,
                    Some((br, bv)) => ratio < *bv || (ratio == *bv && self.basis[r] < self.basis[*br]),
                };
                if better {
                    best = Some((r, ratio));
                }
            }
            let Some((row, _)) = best else { return Err(()) };
            self.pivot(row, col);
        }
    }

    fn set_costs(&mut self, cost: &[Rational]) {
        let width = self.width();
        let c = |j: usize| if j < cost.len() { cost[j].clone() } else { Rational::zero() };
        self.reduced = (0..width).map(c).collect();
        self.value = Rational::zero();
        for r in 0..self.m {
            let cb = c(self.basis[r]);
            if cb.is_zero() {
                continue;
            }
            for j in 0..width {
                if !self.t[r][j].is_zero() {
                    self.reduced[j] -= &cb * &self.t[r][j];
                }
            }
            self.value -= &cb * &self.t[r][width];
        }
    }
}

pub fn minimize(lp: &StandardForm) -> Outcome {
    let m = lp.num_rows();
    let n = lp.num_vars();
    assert!(lp.rows.iter().all(|r| r.len() == n) && lp.rhs.len() == m);
    let width = n + m;
    let mut sign = alloc::vec![Rational::one(); m];
    let mut t = Vec::with_capacity(m);
    for (i, (row, b)) in lp.rows.iter().zip(&lp.rhs).enumerate() {
        let flip = b.is_negative();
        if flip {
            sign[i] = -Rational::one();
        }
        let mut full: Vec<Rational> = row.iter().map(|v| if flip { -v } else { v.clone() }).collect();
        full.extend((0..m).map(|k| if k == i { Rational::one() } else { Rational::zero() }));
        full.push(if flip { -b } else { b.clone() });
        t.push(full);
    }
    let mut tab = Tableau {
        t,
        reduced: Vec::new(),
        value: Rational::zero(),
        basis: (n..width).collect(),
        n,
        m,
        pivots: 0,
    };

    let phase_one: Vec<Rational> = (0..width).map(|j| if j >= n { Rational::one() } else { Rational::zero() }).collect();
    tab.set_costs(&phase_one);
    tab.optimize(n).expect("phase one is bounded below by zero");
    // `value` tracks -(objective) of the minimization.
    if !tab.value.is_zero() {
        return Outcome::Infeasible;
    }
    // Drive remaining zero-level artificials out of the basis where possible.
    for r in 0..m {
        if tab.basis[r] < n {
            continue;
        }
        if let Some(col) = (0..n).find(|&j| !tab.t[r][j].is_zero()) {
            tab.pivot(r, col);
        }
    }

    tab.set_costs(&lp.cost);
    if tab.optimize(n).is_err() {
        return Outcome::Unbounded;
    }

    let mut primal = alloc::vec![Rational::zero(); n];
    for r in 0..m {
        if tab.basis[r] < n {
            primal[tab.basis[r]] = tab.t[r][width].clone();
        }
    }
    let cost_of = |j: usize| if j < n { lp.cost[j].clone() } else { Rational::zero() };
    let dual = (0..m)
        .map(|i| {
            let mut acc = Rational::zero();
            for r in 0..m {
                let cb = cost_of(tab.basis[r]);
                if !cb.is_zero() && !tab.t[r][n + i].is_zero() {
                    acc += cb * &tab.t[r][n + i];
                }
            }
            acc * &sign[i]
        })
        .collect();
    Outcome::Optimal(Solution { value: -tab.value, primal, dual, pivots: tab.pivots })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn rows(data: &[&[i64]]) -> Vec<Vec<Rational>> {
        data.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect()
    }

    fn ints(data: &[i64]) -> Vec<Rational> {
        data.iter().map(|&v| int(v)).collect()
    }

    #[test]
    fn small_optimum_with_duals() {
        // max 3x + 2y s.t. x + y ≤ 4, x + 3y ≤ 6, x ≤ 3, as a minimization with slacks.
        let lp = StandardForm {
            rows: rows(&[&[1, 1, 1, 0, 0], &[1, 3, 0, 1, 0], &[1, 0, 0, 0, 1]]),
            rhs: ints(&[4, 6, 3]),
            cost: ints(&[-3, -2, 0, 0, 0]),
        };
        let Outcome::Optimal(sol) = minimize(&lp) else { panic!() };
        assert_eq!(sol.value, int(-11));
        assert_eq!(sol.primal[..2], [int(3), int(1)]);
        // Dual feasibility Aᵀπ ≤ c and equal objective.
        for j in 0..5 {
            let lhs: Rational = (0..3).map(|i| &lp.rows[i][j] * &sol.dual[i]).sum();
            assert!(lhs <= lp.cost[j]);
        }
        let dual_value: Rational = (0..3).map(|i| &lp.rhs[i] * &sol.dual[i]).sum();
        assert_eq!(dual_value, sol.value);
    }

    #[test]
    fn detects_infeasible() {
        // x + y = -1 with x, y ≥ 0.
        let lp = StandardForm { rows: rows(&[&[1, 1]]), rhs: ints(&[-1]), cost: ints(&[0, 0]) };
        assert_eq!(minimize(&lp), Outcome::Infeasible);
    }

    #[test]
    fn detects_unbounded() {
        // min -x s.t. x - y = 0.
        let lp = StandardForm { rows: rows(&[&[1, -1]]), rhs: ints(&[0]), cost: ints(&[-1, 0]) };
        assert_eq!(minimize(&lp), Outcome::Unbounded);
    }

    #[test]
    fn negative_rhs_and_fractional_optimum() {
        // min x + y s.t. -2x - y = -3 → x = 3/2.
        let lp = StandardForm { rows: rows(&[&[-2, -1]]), rhs: ints(&[-3]), cost: ints(&[1, 1]) };
        let Outcome::Optimal(sol) = minimize(&lp) else { panic!() };
        assert_eq!(sol.value, ratio(3, 2));
        assert_eq!(sol.dual, alloc::vec![ratio(-1, 2)]);
    }

    #[test]
    fn redundant_rows() {
        let lp = StandardForm {
            rows: rows(&[&[1, 1], &[2, 2]]),
            rhs: ints(&[1, 2]),
            cost: ints(&[1, 2]),
        };
        let Outcome::Optimal(sol) = minimize(&lp) else { panic!() };
        assert_eq!(sol.value, int(1));
    }
}
