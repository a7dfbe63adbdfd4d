#![allow(dead_code)]

use gromov_core::rational::ratio;
use gromov_core::{DistanceMatrix, GromovStructure, Permutation};
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

pub fn structure(n: usize) -> impl Strategy<Value = GromovStructure> {
    let k = (n - 1) * (n - 2) / 2;
    prop::collection::vec(0..k, n).prop_map(move |choice| {
        let pairs: Vec<_> = choice.iter().enumerate().map(|(a, &i)| options(n, a)[i]).collect();
        GromovStructure::from_index_pairs(&pairs).unwrap()
    })
}

pub fn permutation(n: usize) -> impl Strategy<Value = Permutation> {
    Just((0..n).collect::<Vec<usize>>()).prop_shuffle().prop_map(|v| Permutation::from_indices(&v))
}

/// Distances drawn from [1, 2): every triangle inequality holds strictly.
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
