//! Realizability of a structure by a Δ-generic metric, decided exactly.
//!
//! A structure is generic when some assignment of Gromov products satisfies
//! the distance-compatibility equalities, keeps every product strictly
//! positive, and makes every node's picked pair its strict unique minimum.
//! This is decided as `max t` subject to every product ≥ t, every
//! minimality gap ≥ t and the products summing to one; the structure is
//! generic iff the optimum is positive.
//!
//! Solving goes through three exact reformulations before the simplex runs:
//! products are shifted by `t` (the equalities are invariant under a uniform
//! shift, so positivity becomes a plain sign bound), the equalities are
//! eliminated through their reduced row echelon form, and the dual of the
//! remaining problem is handed to the simplex because it has far fewer rows.
//! The optimal products are recovered from the dual's basis inverse.

use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::enumerate::{check_allowable, ExclusionViolation};
use crate::lp::{minimize, Outcome, StandardForm};
use crate::metric::{gromov_products, DistanceMatrix, GromovTensor, TensorLayout};
use crate::rational::{common_denominator, numerator_gcd, Rational};
use crate::structure::GromovStructure;

/// The linear program for one structure, over one unknown per product slot
/// plus the margin `t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeasibilityProblem {
    structure: GromovStructure,
    layout: TensorLayout,
    /// Rows `Σ coeff · Δ[slot] = 0`.
    equalities: Vec<[(usize, i8); 4]>,
    /// Slots constrained by `Δ[slot] ≥ t`.
    positivity: Vec<usize>,
    /// `(other, picked)`: `Δ[other] − Δ[picked] ≥ t`.
    minimality: Vec<(usize, usize)>,
}

impl FeasibilityProblem {
    pub fn structure(&self) -> &GromovStructure {
        &self.structure
    }

    pub fn layout(&self) -> &TensorLayout {
        &self.layout
    }

    /// Product unknowns, not counting the margin.
    pub fn num_product_variables(&self) -> usize {
        self.layout.len()
    }

    pub fn num_equalities(&self) -> usize {
        self.equalities.len()
    }

    pub fn num_positivity_rows(&self) -> usize {
        self.positivity.len()
    }

    pub fn num_minimality_rows(&self) -> usize {
        self.minimality.len()
    }

    pub fn equalities(&self) -> &[[(usize, i8); 4]] {
        &self.equalities
    }

    pub fn minimality(&self) -> &[(usize, usize)] {
        &self.minimality
    }

    /// Whether `values` satisfies every equality and the normalization.
    pub fn satisfies_equalities(&self, values: &[Rational]) -> bool {
        let sum: Rational = values.iter().sum();
        sum.is_one()
            && self.equalities.iter().all(|row| {
                row.iter().fold(Rational::zero(), |acc, &(slot, c)| acc + &values[slot] * Rational::from_integer(BigInt::from(c))).is_zero()
            })
    }

    /// Smallest slack over the positivity and minimality rows.
    pub fn margin_of(&self, values: &[Rational]) -> Rational {
        let positive = self.positivity.iter().map(|&s| values[s].clone());
        let gaps = self.minimality.iter().map(|&(o, p)| &values[o] - &values[p]);
        positive.chain(gaps).min().expect("nonempty problem")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GenericityError {
    NotAllowable(ExclusionViolation),
    NotGeneric { margin: Rational },
}

impl fmt::Display for GenericityError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenericityError::NotAllowable(v) => write!(f, "not allowable: {v}"),
            GenericityError::NotGeneric { margin } => {
                write!(f, "not generic: optimal margin {}", crate::rational::format_rational(margin))
            }
        }
    }
}

impl core::error::Error for GenericityError {}

/// Builds the problem. For every pair `{i, j}` the sum `Δ(i,{j,k}) + Δ(j,{i,k})`
/// is tied to its value at `k0`, the smallest index outside the pair.
pub fn build_problem(s: &GromovStructure) -> Result<FeasibilityProblem, GenericityError> {
    check_allowable(s).map_err(GenericityError::NotAllowable)?;
    let n = s.n();
    let layout = TensorLayout::new(n);
    let mut equalities = Vec::with_capacity(n * (n - 1) * (n - 3) / 2);
    for i in 0..n {
        for j in i + 1..n {
            let mut others = (0..n).filter(|&k| k != i && k != j);
            let k0 = others.next().expect("n >= 3");
            for k in others {
                equalities.push([
                    (layout.slot(i, j, k), 1),
                    (layout.slot(j, i, k), 1),
                    (layout.slot(i, j, k0), -1),
                    (layout.slot(j, i, k0), -1),
                ]);
            }
        }
    }
    let positivity = (0..layout.len()).collect();
    let mut minimality = Vec::with_capacity(n * ((n - 1) * (n - 2) / 2 - 1));
    for a in 0..n {
        let (b, c) = s.pick_indices(a);
        let picked = layout.slot(a, b, c);
        for j in 0..n {
            for k in j + 1..n {
                if j == a || k == a || (j, k) == (b.min(c), b.max(c)) {
                    continue;
                }
                minimality.push((layout.slot(a, j, k), picked));
            }
        }
    }
    Ok(FeasibilityProblem { structure: s.clone(), layout, equalities, positivity, minimality })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenericityVerdict {
    pub generic: bool,
    /// Optimal `t`.
    pub margin: Rational,
    /// Optimal products; present iff generic.
    pub witness: Option<GromovTensor>,
}

/// Per-`n` data shared by every problem on `n` points: the products that
/// stay free after eliminating the equalities, and every product written in
/// terms of them.
#[derive(Clone, Debug)]
pub struct Reduction {
    layout: TensorLayout,
    free: Vec<usize>,
    /// `expr[slot][f]`: coefficient of free product `f` in product `slot`.
    expr: Vec<Vec<Rational>>,
    /// `Σ_slot expr[slot]`.
    total: Vec<Rational>,
}

impl Reduction {
    /// Eliminates the equalities of `problem` (they depend only on `n`).
    pub fn new(problem: &FeasibilityProblem) -> Self {
        let layout = problem.layout.clone();
        let vars = layout.len();
        let mut rows: Vec<Vec<Rational>> = problem
            .equalities
            .iter()
            .map(|row| {
                debug_assert_eq!(row.iter().map(|&(_, c)| c as i32).sum::<i32>(), 0, "shift invariance");
                let mut dense = alloc::vec![Rational::zero(); vars];
                for &(slot, c) in row {
                    dense[slot] += Rational::from_integer(BigInt::from(c));
                }
                dense
            })
            .collect();
        let mut pivot_cols = Vec::new();
        let mut rank = 0;
        for col in 0..vars {
            let Some(p) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else { continue };
            rows.swap(rank, p);
            let inv = Rational::one() / &rows[rank][col];
            for v in rows[rank].iter_mut() {
                *v *= &inv;
            }
            let pivot_row = rows[rank].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r == rank || row[col].is_zero() {
                    continue;
                }
                let f = row[col].clone();
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    if !pv.is_zero() {
                        *v -= &f * pv;
                    }
                }
            }
            pivot_cols.push(col);
            rank += 1;
        }
        let free: Vec<usize> = (0..vars).filter(|c| !pivot_cols.contains(c)).collect();
        let mut expr = alloc::vec![alloc::vec![Rational::zero(); free.len()]; vars];
        for (f, &slot) in free.iter().enumerate() {
            expr[slot][f] = Rational::one();
        }
        for (r, &col) in pivot_cols.iter().enumerate() {
            for (f, &slot) in free.iter().enumerate() {
                expr[col][f] = -rows[r][slot].clone();
            }
        }
        let total = (0..free.len()).map(|f| expr.iter().map(|e| &e[f]).sum()).collect();
        Reduction { layout, free, expr, total }
    }

    pub fn for_points(n: usize) -> Self {
        let layout = TensorLayout::new(n);
        let dummy = GromovStructure::from_index_pairs(&default_picks(n)).expect("valid");
        let problem = FeasibilityProblem {
            equalities: build_equalities(&layout),
            structure: dummy,
            layout,
            positivity: Vec::new(),
            minimality: Vec::new(),
        };
        Self::new(&problem)
    }

    pub fn n(&self) -> usize {
        self.layout.n()
    }

    /// Number of products left free by the equalities.
    pub fn dimension(&self) -> usize {
        self.free.len()
    }

    fn combine(&self, slot: usize, x: &[Rational]) -> Rational {
        self.expr[slot].iter().zip(x).filter(|(c, _)| !c.is_zero()).map(|(c, v)| c * v).sum()
    }

    pub fn solve(&self, problem: &FeasibilityProblem) -> GenericityVerdict {
        assert_eq!(problem.layout, self.layout, "reduction built for another point count");
        let dim = self.free.len();
        let is_free: Vec<bool> = {
            let mut v = alloc::vec![false; self.layout.len()];
            for &s in &self.free {
                v[s] = true;
            }
            v
        };
        // Rows `coeffs · x − gap · t ≥ 0` over the shifted products.
        let mut constraint_rows: Vec<(Vec<Rational>, bool)> = Vec::new();
        for &slot in &problem.positivity {
            if !is_free[slot] {
                constraint_rows.push((self.expr[slot].clone(), false));
            }
        }
        for &(other, picked) in &problem.minimality {
            let coeffs = self.expr[other].iter().zip(&self.expr[picked]).map(|(a, b)| a - b).collect();
            constraint_rows.push((coeffs, true));
        }
        let slots = Rational::from_integer(BigInt::from(self.layout.len()));

        // Dual variables: y (one per row), z+, z-, then one surplus per free product.
        let k = constraint_rows.len();
        let width = k + 2 + dim;
        let mut rows = Vec::with_capacity(dim + 1);
        for f in 0..dim {
            let mut row = alloc::vec![Rational::zero(); width];
            for (r, (coeffs, _)) in constraint_rows.iter().enumerate() {
                row[r] = -coeffs[f].clone();
            }
            row[k] = self.total[f].clone();
            row[k + 1] = -self.total[f].clone();
            row[k + 2 + f] = -Rational::one();
            rows.push(row);
        }
        let mut last = alloc::vec![Rational::zero(); width];
        for (r, (_, gap)) in constraint_rows.iter().enumerate() {
            if *gap {
                last[r] = Rational::one();
            }
        }
        last[k] = slots.clone();
        last[k + 1] = -slots;
        rows.push(last);
        let mut rhs = alloc::vec![Rational::zero(); dim + 1];
        rhs[dim] = Rational::one();
        let mut cost = alloc::vec![Rational::zero(); width];
        cost[k] = Rational::one();
        cost[k + 1] = -Rational::one();

        let solution = match minimize(&StandardForm { rows, rhs, cost }) {
            Outcome::Optimal(s) => s,
            other => panic!("margin problem is always feasible and bounded, simplex reported {other:?}"),
        };
        let x = &solution.dual[..dim];
        let margin = solution.dual[dim].clone();
        debug_assert_eq!(margin, solution.value);
        if !margin.is_positive() {
            return GenericityVerdict { generic: false, margin, witness: None };
        }
        let values: Vec<Rational> = (0..self.layout.len()).map(|s| self.combine(s, x) + &margin).collect();
        debug_assert!(problem.satisfies_equalities(&values));
        debug_assert_eq!(problem.margin_of(&values), margin);
        GenericityVerdict {
            generic: true,
            margin,
            witness: Some(GromovTensor::from_values(self.layout.clone(), values)),
        }
    }
}

fn default_picks(n: usize) -> Vec<(usize, usize)> {
    (0..n).map(|a| ((a + 1) % n, (a + 2) % n)).map(|(b, c)| (b.min(c), b.max(c))).collect()
}

fn build_equalities(layout: &TensorLayout) -> Vec<[(usize, i8); 4]> {
    let n = layout.n();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let mut others = (0..n).filter(|&k| k != i && k != j);
            let k0 = others.next().expect("n >= 3");
            for k in others {
                out.push([
                    (layout.slot(i, j, k), 1),
                    (layout.slot(j, i, k), 1),
                    (layout.slot(i, j, k0), -1),
                    (layout.slot(j, i, k0), -1),
                ]);
            }
        }
    }
    out
}

/// Solves a single problem; prefer [`Reduction::solve`] when solving many on the same `n`.
pub fn solve(problem: &FeasibilityProblem) -> GenericityVerdict {
    Reduction::new(problem).solve(problem)
}

/// Smallest integer metric proportional to the distances of a witness.
pub fn witness_metric(witness: &GromovTensor) -> DistanceMatrix {
    let d = witness.to_distances().expect("witness distances are positive");
    let n = d.n();
    let entries: Vec<Rational> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).map(|(i, j)| d.get(i, j).clone()).collect();
    let scale = Rational::from_integer(common_denominator(&entries));
    let integral: Vec<Rational> = entries.iter().map(|v| v * &scale).collect();
    let g = numerator_gcd(&integral);
    let factor = if g.is_zero() { scale } else { scale / Rational::from_integer(g) };
    d.scaled(&factor)
}

/// An integer metric whose structure is exactly `s`.
pub fn realize_metric(s: &GromovStructure) -> Result<DistanceMatrix, GenericityError> {
    let problem = build_problem(s)?;
    let verdict = solve(&problem);
    match verdict.witness {
        Some(w) => Ok(witness_metric(&w)),
        None => Err(GenericityError::NotGeneric { margin: verdict.margin }),
    }
}

/// Exact check that `d` realizes `s` with all products strictly positive.
pub fn certifies(d: &DistanceMatrix, s: &GromovStructure) -> bool {
    let t = gromov_products(d);
    t.values().iter().all(|v| v.is_positive()) && t.structure().as_ref() == Ok(s)
}
