#![allow(dead_code)]

use std::collections::BTreeSet;

use gromov::core::lp::{minimize, Outcome, StandardForm};
use gromov::core::rational::{int, ratio, Rational};
use gromov::core::{DistanceMatrix, GromovStructure, Permutation};
use num_traits::{One, Zero};
use proptest::prelude::*;

/// Zero-based pairs not containing `a`, in lexicographic order.
pub fn options(n: usize, a: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for b in 0..n {
        for c in b + 1..n {
            if b != a && c != a {
                out.push((b, c));
            }
        }
    }
    out
}

/// Every map from nodes to pairs avoiding the node, with no pruning.
pub fn every_candidate(n: usize, mut f: impl FnMut(&[(usize, usize)])) {
    let opts: Vec<_> = (0..n).map(|a| options(n, a)).collect();
    let k = opts[0].len();
    let mut idx = vec![0usize; n];
    loop {
        let picks: Vec<_> = idx.iter().enumerate().map(|(a, &i)| opts[a][i]).collect();
        f(&picks);
        let mut a = 0;
        loop {
            if a == n {
                return;
            }
            idx[a] += 1;
            if idx[a] < k {
                break;
            }
            idx[a] = 0;
            a += 1;
        }
    }
}

/// The exclusion rule written out from its definition.
pub fn allowed(picks: &[(usize, usize)]) -> bool {
    let contains = |p: (usize, usize), x: usize| p.0 == x || p.1 == x;
    let same = |p: (usize, usize), x: usize, y: usize| (p.0, p.1) == (x.min(y), x.max(y));
    for (a, &(b, c)) in picks.iter().enumerate() {
        if contains(picks[b], c) || contains(picks[c], b) {
            return false;
        }
        for (i, &p) in picks.iter().enumerate() {
            if i != a && (same(p, a, b) || same(p, a, c)) {
                return false;
            }
        }
    }
    true
}

pub fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in all_permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Smallest serialization over the whole relabeling orbit.
pub fn orbit_minimum(s: &GromovStructure, perms: &[Vec<usize>]) -> String {
    perms
        .iter()
        .map(|p| s.apply_permutation(&Permutation::from_indices(p)).unwrap().serialize())
        .min()
        .unwrap()
}

pub fn orbit(s: &GromovStructure, perms: &[Vec<usize>]) -> BTreeSet<String> {
    perms.iter().map(|p| s.apply_permutation(&Permutation::from_indices(p)).unwrap().serialize()).collect()
}

/// Optimal margin of `s` from an LP over the distances: maximize `t` with
/// every product and every gap to the picked product at least `t`, products
/// summing to one. Works for any candidate, allowable or not.
pub fn margin_over_distances(s: &GromovStructure) -> Rational {
    let n = s.n();
    let mut edge = vec![vec![0usize; n]; n];
    let mut e = 0;
    for i in 0..n {
        for j in i + 1..n {
            edge[i][j] = e;
            edge[j][i] = e;
            e += 1;
        }
    }
    let product = |i: usize, j: usize, k: usize| {
        let mut row = vec![Rational::zero(); e];
        row[edge[i][j]] += int(1);
        row[edge[i][k]] += int(1);
        row[edge[j][k]] -= int(1);
        row
    };
    let mut inequalities = Vec::new();
    let mut total = vec![Rational::zero(); e];
    for i in 0..n {
        let (b, c) = s.pick_indices(i);
        let picked = product(i, b, c);
        for j in 0..n {
            for k in j + 1..n {
                if j == i || k == i {
                    continue;
                }
                let p = product(i, j, k);
                for (t, v) in total.iter_mut().zip(&p) {
                    *t += v;
                }
                if (j, k) != (b, c) {
                    inequalities.push(p.iter().zip(&picked).map(|(x, y)| x - y).collect::<Vec<_>>());
                }
                inequalities.push(p);
            }
        }
    }
    // Rows are twice the products, so t enters with coefficient 2.
    let m = inequalities.len();
    let width = e + 2 + m;
    let mut rows = Vec::new();
    for (r, ineq) in inequalities.iter().enumerate() {
        let mut row = vec![Rational::zero(); width];
        row[..e].clone_from_slice(ineq);
        row[e] = int(-2);
        row[e + 1] = int(2);
        row[e + 2 + r] = int(-1);
        rows.push(row);
    }
    let mut norm = vec![Rational::zero(); width];
    norm[..e].clone_from_slice(&total);
    rows.push(norm);
    let mut rhs = vec![Rational::zero(); m + 1];
    rhs[m] = int(2);
    let mut cost = vec![Rational::zero(); width];
    cost[e] = -Rational::one();
    cost[e + 1] = Rational::one();
    match minimize(&StandardForm { rows, rhs, cost }) {
        Outcome::Optimal(sol) => -sol.value,
        other => panic!("distance LP for {s}: {other:?}"),
    }
}

pub fn permutation(n: usize) -> impl Strategy<Value = Permutation> {
    Just((0..n).collect::<Vec<usize>>()).prop_shuffle().prop_map(|v| Permutation::from_indices(&v))
}

/// Any candidate structure, allowable or not.
pub fn candidate(n: usize) -> impl Strategy<Value = GromovStructure> {
    let k = (n - 1) * (n - 2) / 2;
    prop::collection::vec(0..k, n).prop_map(move |choice| {
        let pairs: Vec<_> = choice.iter().enumerate().map(|(a, &i)| options(n, a)[i]).collect();
        GromovStructure::from_index_pairs(&pairs).unwrap()
    })
}

/// Rational distances in [1, 2), so every triangle inequality is strict.
pub fn metric(n: usize) -> impl Strategy<Value = DistanceMatrix> {
    prop::collection::vec(0i64..9973, n * (n - 1) / 2).prop_map(move |raw| {
        let mut it = raw.into_iter();
        let mut rows = vec![vec![0i64; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let v = it.next().unwrap();
                rows[i][j] = v;
                rows[j][i] = v;
            }
        }
        DistanceMatrix::from_fn(n, |i, j| ratio(9973 + rows[i][j], 9973)).unwrap()
    })
}
