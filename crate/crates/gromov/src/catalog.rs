//! The classification pipeline and the catalogs it produces.
//!
//! Allowable structures are streamed per enumeration subtree, reduced to
//! canonical codes, grouped by invariant key, and the surviving classes are
//! sent through the genericity LP. Each stage is a parallel map whose
//! results are merged in a fixed order, so the catalog does not depend on
//! the worker count.

use std::collections::BTreeMap;

use gromov_core::canon::{canonical_code, decode};
use gromov_core::genericity::{certifies, witness_metric};
use gromov_core::rational::Rational;
use gromov_core::{
    build_problem, canonical_form, closed_subsets, invariant_key, invariants_of, structure_of_metric, CanonicalCode,
    DistanceMatrix, EnumerationMode, Enumerator, GenericityError, GromovStructure, InvariantKey, MetricError,
    Reduction,
};
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::names::NameMap;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageCounts {
    /// Unpruned candidates, one pair per node.
    pub raw: u64,
    pub allowable: u64,
    /// Distinct invariant keys among the canonical classes.
    pub buckets: u64,
    pub canonical: u64,
    pub generic: u64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Roles {
    pub isolated: usize,
    pub end: usize,
    pub interior: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContainsEntry {
    pub size: usize,
    pub label: String,
    /// One-based nodes of the closed subset, in the record's canonical labeling.
    pub nodes: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassRecord {
    pub id: usize,
    pub canonical: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub type_label: String,
    pub roles: Roles,
    pub removed_edges: usize,
    pub rank: usize,
    pub trace_powers: Vec<u64>,
    pub irreducible: bool,
    pub generic: bool,
    #[serde(with = "rational_text")]
    pub margin: Rational,
    pub witness: Option<Vec<Vec<u64>>>,
    pub contains: Vec<ContainsEntry>,
}

impl ClassRecord {
    pub fn structure(&self) -> GromovStructure {
        self.canonical.parse().expect("record holds a valid structure")
    }

    pub fn witness_matrix(&self) -> Option<DistanceMatrix> {
        let w = self.witness.as_ref()?;
        let rows: Vec<Vec<i64>> = w.iter().map(|r| r.iter().map(|&v| v as i64).collect()).collect();
        let refs: Vec<&[i64]> = rows.iter().map(Vec::as_slice).collect();
        DistanceMatrix::from_integers(&refs).ok()
    }

    /// Name if published, otherwise `C<n>.<id>`.
    pub fn label(&self) -> String {
        match &self.name {
            Some(name) => name.clone(),
            None => format!("C{}.{}", self.structure().n(), self.id),
        }
    }

    /// Size of the smallest closed subset, for reducible classes.
    pub fn smallest_core(&self) -> Option<usize> {
        self.contains.iter().map(|c| c.size).min()
    }
}

pub(crate) mod rational_text {
    use gromov_core::rational::{format_rational, parse_rational, Rational};
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).ok_or_else(|| D::Error::custom(format!("bad rational {text:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Catalog {
    pub n: usize,
    pub stages: StageCounts,
    pub records: Vec<ClassRecord>,
    codes: Vec<CanonicalCode>,
}

impl Catalog {
    /// Sorts by canonical code and renumbers from one.
    pub fn new(n: usize, stages: StageCounts, mut records: Vec<ClassRecord>) -> Self {
        let mut keyed: Vec<(CanonicalCode, ClassRecord)> =
            records.drain(..).map(|r| (canonical_form(&r.structure()).code, r)).collect();
        keyed.sort_by_key(|(c, _)| *c);
        let (codes, mut records): (Vec<_>, Vec<_>) = keyed.into_iter().unzip();
        for (i, r) in records.iter_mut().enumerate() {
            r.id = i + 1;
        }
        Catalog { n, stages, records, codes }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn codes(&self) -> &[CanonicalCode] {
        &self.codes
    }

    pub fn find(&self, code: CanonicalCode) -> Option<&ClassRecord> {
        self.codes.binary_search(&code).ok().map(|i| &self.records[i])
    }

    pub fn find_structure(&self, s: &GromovStructure) -> Option<&ClassRecord> {
        if s.n() != self.n {
            return None;
        }
        self.find(canonical_form(s).code)
    }

    pub fn irreducible_count(&self) -> usize {
        self.records.iter().filter(|r| r.irreducible).count()
    }

    /// Classes whose matrix rank differs from their removed-edge count.
    pub fn rank_divergences(&self) -> Vec<&ClassRecord> {
        self.records.iter().filter(|r| r.rank != r.removed_edges).collect()
    }
}

#[derive(Debug, Error)]
pub enum ClassifyError {
    #[error("classification supports 4..=8 points, got {0}")]
    UnsupportedN(usize),
    #[error("internal defect: {0}")]
    Defect(String),
}

#[derive(Debug, Error)]
pub enum IdentifyError {
    #[error("metric has {found} points, catalog has {expected}")]
    SizeMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("structure {0} is not in the catalog (catalog and genericity test disagree)")]
    NotFound(String),
}

#[derive(Debug, Error)]
#[error("closed subset {nodes:?} of {structure} restricts to {restriction}, which is not in the {size}-point catalog")]
pub struct LookupFailure {
    pub structure: String,
    pub nodes: Vec<usize>,
    pub size: usize,
    pub restriction: String,
}

/// Builds catalogs, keeping smaller ones for labeling closed subsets.
pub struct Classifier {
    workers: Option<usize>,
    mode: EnumerationMode,
    names: NameMap,
    built: BTreeMap<usize, Catalog>,
}

impl Default for Classifier {
    fn default() -> Self {
        Self::new()
    }
}

impl Classifier {
    pub fn new() -> Self {
        Classifier { workers: None, mode: EnumerationMode::Full, names: NameMap::bundled(), built: BTreeMap::new() }
    }

    /// Caps parallelism; `None` uses every available core.
    pub fn workers(mut self, workers: Option<usize>) -> Self {
        self.workers = workers;
        self
    }

    pub fn mode(mut self, mode: EnumerationMode) -> Self {
        self.mode = mode;
        self
    }

    /// Supplies an already built catalog (used for closed-subset labels).
    pub fn with_catalog(mut self, catalog: Catalog) -> Self {
        self.built.insert(catalog.n, catalog);
        self
    }

    pub fn names(&self) -> &NameMap {
        &self.names
    }

    pub fn catalogs(&self) -> &BTreeMap<usize, Catalog> {
        &self.built
    }

    pub fn classify(&mut self, n: usize) -> Result<&Catalog, ClassifyError> {
        if !(4..=8).contains(&n) {
            return Err(ClassifyError::UnsupportedN(n));
        }
        for m in 4..=n {
            if !self.built.contains_key(&m) {
                let catalog = self.run_pool(m)?;
                self.built.insert(m, catalog);
            }
        }
        Ok(&self.built[&n])
    }

    fn run_pool(&self, n: usize) -> Result<Catalog, ClassifyError> {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(k) = self.workers {
            builder = builder.num_threads(k.max(1));
        }
        let pool = builder.build().map_err(|e| ClassifyError::Defect(format!("thread pool: {e}")))?;
        pool.install(|| self.run(n))
    }

    fn run(&self, n: usize) -> Result<Catalog, ClassifyError> {
        let enumerator = Enumerator::new(n, self.mode).map_err(|e| ClassifyError::UnsupportedN(e.0))?;
        let partials: Vec<(u64, BTreeMap<CanonicalCode, Vec<(usize, usize)>>)> = enumerator
            .subtrees()
            .par_iter()
            .map(|&subtree| {
                let mut count = 0;
                let mut classes = BTreeMap::new();
                enumerator.for_each_in_subtree(subtree, |picks| {
                    count += 1;
                    classes.entry(canonical_code(picks)).or_insert_with(|| picks.to_vec());
                });
                (count, classes)
            })
            .collect();
        let mut allowable = 0;
        let mut classes: BTreeMap<CanonicalCode, Vec<(usize, usize)>> = BTreeMap::new();
        for (count, part) in partials {
            allowable += count;
            for (code, picks) in part {
                classes.entry(code).or_insert(picks);
            }
        }

        // Keys are computed on the first structure seen and on the canonical
        // form; any disagreement means canonicalization or the invariants are broken.
        let keyed: Vec<(CanonicalCode, InvariantKey)> = classes
            .par_iter()
            .map(|(&code, picks)| {
                let seen = GromovStructure::from_index_pairs(picks).expect("enumerated picks are valid");
                let key = invariant_key(&decode(code, n));
                if invariant_key(&seen) != key {
                    return Err(ClassifyError::Defect(format!("invariant key changes under canonicalization of {seen}")));
                }
                Ok((code, key))
            })
            .collect::<Result<_, _>>()?;
        let mut buckets: BTreeMap<InvariantKey, Vec<CanonicalCode>> = BTreeMap::new();
        for (code, key) in keyed {
            buckets.entry(key).or_default().push(code);
        }

        let reduction = Reduction::for_points(n);
        let codes: Vec<CanonicalCode> = buckets.values().flatten().copied().collect();
        let records: Vec<Option<ClassRecord>> =
            codes.par_iter().map(|&code| self.examine(&reduction, decode(code, n))).collect::<Result<_, _>>()?;
        let records: Vec<ClassRecord> = records.into_iter().flatten().collect();
        let stages = StageCounts {
            raw: enumerator.raw_candidates(),
            allowable,
            buckets: buckets.len() as u64,
            canonical: codes.len() as u64,
            generic: records.len() as u64,
        };
        Ok(Catalog::new(n, stages, records))
    }

    /// LP verdict and record for one canonical class; `None` if not generic.
    fn examine(&self, reduction: &Reduction, s: GromovStructure) -> Result<Option<ClassRecord>, ClassifyError> {
        let problem = build_problem(&s).map_err(|e| ClassifyError::Defect(format!("{s}: {e}")))?;
        let verdict = reduction.solve(&problem);
        let Some(witness) = verdict.witness else { return Ok(None) };
        let d = witness_metric(&witness);
        if !certifies(&d, &s) {
            return Err(ClassifyError::Defect(format!("witness for {s} does not realize it")));
        }
        let contains = classify_substructures(&self.built, &self.names, &s).map_err(|e| ClassifyError::Defect(e.to_string()))?;
        Ok(Some(make_record(&s, &self.names, verdict.margin, Some(integer_rows(&d)?), contains)))
    }
}

fn integer_rows(d: &DistanceMatrix) -> Result<Vec<Vec<u64>>, ClassifyError> {
    (0..d.n())
        .map(|i| {
            (0..d.n())
                .map(|j| {
                    let v = d.get(i, j);
                    v.to_integer()
                        .to_u64()
                        .filter(|_| v.is_integer())
                        .ok_or_else(|| ClassifyError::Defect(format!("witness entry {v} does not fit")))
                })
                .collect()
        })
        .collect()
}

/// Record fields that depend only on the structure, plus the given verdict data.
pub fn make_record(
    s: &GromovStructure,
    names: &NameMap,
    margin: Rational,
    witness: Option<Vec<Vec<u64>>>,
    contains: Vec<ContainsEntry>,
) -> ClassRecord {
    let canonical = canonical_form(s);
    let inv = invariants_of(&canonical.structure);
    ClassRecord {
        id: 0,
        canonical: canonical.text(),
        name: names.get(s.n(), canonical.code).map(str::to_string),
        type_label: inv.type_label.to_string(),
        roles: Roles { isolated: inv.roles.isolated, end: inv.roles.end, interior: inv.roles.interior },
        removed_edges: inv.removed_edges,
        rank: inv.rank,
        trace_powers: inv.trace_powers,
        irreducible: inv.irreducible,
        generic: witness.is_some(),
        margin,
        witness,
        contains,
    }
}

/// Labels every closed proper subset of `s` (in its canonical labeling) by
/// looking its restriction up in the smaller catalogs.
pub fn classify_substructures(
    smaller: &BTreeMap<usize, Catalog>,
    names: &NameMap,
    s: &GromovStructure,
) -> Result<Vec<ContainsEntry>, LookupFailure> {
    let canonical = canonical_form(s).structure;
    let mut out = Vec::new();
    for subset in closed_subsets(&canonical) {
        let Some(restriction) = subset.restriction else { continue };
        let m = restriction.n();
        let nodes: Vec<usize> = subset.nodes.iter().map(|v| v.get()).collect();
        let code = canonical_form(&restriction).code;
        let failure = || LookupFailure { structure: canonical.serialize(), nodes: nodes.clone(), size: m, restriction: restriction.serialize() };
        let record = smaller.get(&m).and_then(|c| c.find(code)).ok_or_else(failure)?;
        let label = names.get(m, code).map(str::to_string).unwrap_or_else(|| record.label());
        out.push(ContainsEntry { size: m, label, nodes });
    }
    Ok(out)
}

/// The catalog record of the class of `d`.
pub fn identify<'a>(catalog: &'a Catalog, d: &DistanceMatrix) -> Result<&'a ClassRecord, IdentifyError> {
    if d.n() != catalog.n {
        return Err(IdentifyError::SizeMismatch { expected: catalog.n, found: d.n() });
    }
    let s = structure_of_metric(d)?;
    catalog.find_structure(&s).ok_or_else(|| IdentifyError::NotFound(s.serialize()))
}

/// Catalog for `n` with every option at its default.
pub fn classify_all(n: usize) -> Result<Catalog, ClassifyError> {
    Classifier::new().classify(n).cloned()
}

/// Genericity of a single structure, for rows that are not in a catalog.
pub fn is_generic(s: &GromovStructure) -> Result<bool, GenericityError> {
    let problem = build_problem(s)?;
    Ok(Reduction::new(&problem).solve(&problem).generic)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_catalogs() {
        let mut c = Classifier::new().workers(Some(1));
        let four = c.classify(4).unwrap().clone();
        assert_eq!(four.len(), 1);
        assert_eq!(four.records[0].name.as_deref(), Some("X4"));
        let five = c.classify(5).unwrap();
        assert_eq!(five.len(), 3);
        assert_eq!(five.stages.raw, 7776);
        assert_eq!(five.stages.allowable, 102);
        assert_eq!(five.stages.canonical, 3);
        let mut names: Vec<_> = five.records.iter().map(|r| r.label()).collect();
        names.sort();
        assert_eq!(names, ["X5A", "X5B", "X5C"]);
    }

    #[test]
    fn rejects_unsupported_sizes() {
        assert!(matches!(Classifier::new().classify(3), Err(ClassifyError::UnsupportedN(3))));
        assert!(matches!(Classifier::new().classify(9), Err(ClassifyError::UnsupportedN(9))));
    }
}
