//! Gromov product structures of finite metric spaces: the combinatorial
//! objects, their matrix invariants, canonical forms under relabeling, and
//! an exact decision procedure for realizability by a Δ-generic metric.
//!
//! Everything here is exact (bignum rationals) and needs only `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod canon;
pub mod enumerate;
pub mod genericity;
pub mod lp;
pub mod matrixrep;
pub mod metric;
pub mod rational;
pub mod structure;

pub use canon::{canonical_form, equivalent, invariant_key, CanonicalCode, CanonicalForm, InvariantKey};
pub use enumerate::{check_allowable, enumerate_allowable, is_allowable, EnumerationMode, Enumerator, ExclusionViolation};
pub use genericity::{build_problem, realize_metric, GenericityError, GenericityVerdict, Reduction};
pub use matrixrep::{chain_decomposition, closed_subsets, invariants_of, structure_matrix, TypeLabel};
pub use metric::{gromov_products, structure_of_metric, DistanceMatrix, GromovTensor, MetricError};
pub use rational::Rational;
pub use structure::{GromovStructure, NodeId, Pair, Permutation, StructureError};
