//! Catalogs of Gromov product structures: the classification pipeline,
//! published-table fixtures and their verification, JSON persistence and
//! the `gromov` command line. The algorithms live in `gromov-core`.

pub mod catalog;
pub mod cli;
pub mod fixture;
pub mod names;
pub mod store;
pub mod verify;

pub use catalog::{classify_all, classify_substructures, identify, Catalog, ClassRecord, Classifier, StageCounts};
pub use fixture::Fixture;
pub use gromov_core as core;
pub use names::NameMap;
pub use verify::{verify_fixtures, Report};

