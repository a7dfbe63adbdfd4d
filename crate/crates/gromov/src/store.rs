//! JSON catalog files.
//!
//! Loading revalidates every record against a recomputation from its
//! canonical form, so a hand-edited or truncated file is rejected rather
//! than trusted.

use std::fs;
use std::path::{Path, PathBuf};

use gromov_core::genericity::certifies;
use gromov_core::{canonical_form, GromovStructure};
use num_traits::Signed;
use serde::Deserialize;
use thiserror::Error;

use crate::catalog::{make_record, Catalog, ClassRecord, StageCounts};
use crate::names::NameMap;

pub const SCHEMA_VERSION: u32 = 1;

/// Environment variable naming the directory that holds `catalog-n<N>.json` files.
pub const CATALOG_DIR_VAR: &str = "GROMOV_CATALOG_DIR";

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: malformed catalog: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("schema version {found}, expected {expected}")]
    SchemaVersionMismatch { found: u32, expected: u32 },
    #[error("record {id}: {reason}")]
    CorruptRecord { id: usize, reason: String },
}

#[derive(Deserialize)]
struct CatalogFile {
    schema_version: u32,
    n: usize,
    stages: StageCounts,
    records: Vec<ClassRecord>,
}

/// One record per line, so that catalogs diff line by line.
pub fn to_json(c: &Catalog) -> String {
    let stages = serde_json::to_string(&c.stages).expect("stage counts serialize");
    let mut text = format!("{{\n  \"schema_version\": {SCHEMA_VERSION},\n  \"n\": {},\n  \"stages\": {stages},\n  \"records\": [", c.n);
    for (i, record) in c.records.iter().enumerate() {
        text.push_str(if i == 0 { "\n    " } else { ",\n    " });
        text.push_str(&serde_json::to_string(record).expect("records serialize"));
    }
    text.push_str(if c.records.is_empty() { "]\n}\n" } else { "\n  ]\n}\n" });
    text
}

pub fn save(c: &Catalog, path: &Path) -> Result<(), StoreError> {
    fs::write(path, to_json(c)).map_err(|source| StoreError::Io { path: path.to_path_buf(), source })
}

/// Parses and revalidates; `verify_witnesses` also checks each witness metric exactly.
pub fn from_json(text: &str, path: &Path, verify_witnesses: bool) -> Result<Catalog, StoreError> {
    let file: CatalogFile =
        serde_json::from_str(text).map_err(|source| StoreError::Json { path: path.to_path_buf(), source })?;
    if file.schema_version != SCHEMA_VERSION {
        return Err(StoreError::SchemaVersionMismatch { found: file.schema_version, expected: SCHEMA_VERSION });
    }
    let names = NameMap::bundled();
    let mut previous = None;
    for (i, record) in file.records.iter().enumerate() {
        let corrupt = |reason: String| StoreError::CorruptRecord { id: record.id, reason };
        if record.id != i + 1 {
            return Err(corrupt(format!("id out of sequence at position {}", i + 1)));
        }
        let s: GromovStructure = GromovStructure::parse(&record.canonical, file.n)
            .map_err(|e| corrupt(format!("canonical form does not parse: {e}")))?;
        let canonical = canonical_form(&s);
        if canonical.structure != s {
            return Err(corrupt(format!("{} is not in canonical form ({})", record.canonical, canonical.text())));
        }
        if previous.is_some_and(|p| p >= canonical.code) {
            return Err(corrupt("records are not strictly sorted by canonical form".into()));
        }
        previous = Some(canonical.code);
        let mut expected = make_record(&s, &names, record.margin.clone(), record.witness.clone(), record.contains.clone());
        expected.id = record.id;
        if expected != *record {
            return Err(corrupt("stored invariants disagree with recomputation".into()));
        }
        if record.witness.is_some() != record.generic || !record.generic {
            return Err(corrupt("catalogs hold generic classes with witnesses only".into()));
        }
        if !record.margin.is_positive() {
            return Err(corrupt("generic class with non-positive margin".into()));
        }
        if record.contains.is_empty() != record.irreducible {
            return Err(corrupt("closed-subset list disagrees with irreducibility".into()));
        }
        if verify_witnesses {
            let ok = record.witness_matrix().is_some_and(|d| certifies(&d, &s));
            if !ok {
                return Err(corrupt("witness metric does not realize the structure".into()));
            }
        }
    }
    let count = file.records.len() as u64;
    if file.stages.generic != count {
        return Err(StoreError::CorruptRecord { id: 0, reason: format!("metadata lists {} generic classes, file holds {count}", file.stages.generic) });
    }
    Ok(Catalog::new(file.n, file.stages, file.records))
}

pub fn load(path: &Path, verify_witnesses: bool) -> Result<Catalog, StoreError> {
    let text = fs::read_to_string(path).map_err(|source| StoreError::Io { path: path.to_path_buf(), source })?;
    from_json(&text, path, verify_witnesses)
}

pub fn file_name(n: usize) -> String {
    format!("catalog-n{n}.json")
}

const BUNDLED: [(usize, &str); 4] = [
    (4, include_str!("../data/catalog-n4.json")),
    (5, include_str!("../data/catalog-n5.json")),
    (6, include_str!("../data/catalog-n6.json")),
    (7, include_str!("../data/catalog-n7.json")),
];

/// The reference catalog shipped with the crate.
pub fn bundled(n: usize) -> Option<Catalog> {
    Some(bundled_checked(n, false)?.expect("bundled catalog is valid"))
}

/// Like [`bundled`], but reports validation failures instead of panicking.
pub fn bundled_checked(n: usize, verify_witnesses: bool) -> Option<Result<Catalog, StoreError>> {
    let (_, text) = BUNDLED.iter().find(|(m, _)| *m == n)?;
    Some(from_json(text, Path::new(&file_name(n)), verify_witnesses))
}

/// Catalog for `n` from `dir` when given, else the bundled one.
pub fn locate(dir: Option<&Path>, n: usize, verify_witnesses: bool) -> Option<Result<Catalog, StoreError>> {
    match dir {
        Some(dir) => Some(load(&dir.join(file_name(n)), verify_witnesses)),
        None => bundled_checked(n, verify_witnesses),
    }
}

