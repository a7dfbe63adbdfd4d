//! Verification of a computed catalog against a transcribed fixture.
//!
//! Row checks: (a) allowable and generic, (b) present in the catalog,
//! (c) pairwise inequivalent, (e) type label, R/I flag and tabulated
//! invariants, (f) heading label among the closed-subset labels. Catalog
//! check: (d) every class has a row. Census check: per-type counts of
//! irreducible classes and closed-core sizes of reducible ones.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use gromov_core::matrixrep::ComponentKind;
use gromov_core::{canonical_form, chain_decomposition, check_allowable, CanonicalCode, TypeLabel};

use crate::catalog::{is_generic, Catalog, ClassRecord};
use crate::fixture::{CensusLine, Fixture, Roles};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Discrepancy {
    pub check: char,
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for Discrepancy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "({}) line {line}: {}", self.check, self.message),
            None => write!(f, "({}) {}", self.check, self.message),
        }
    }
}

/// One census group: its printed labels, the tabulated count and the computed one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CensusGroup {
    pub line: usize,
    pub labels: Vec<String>,
    pub reducible: bool,
    pub expected: usize,
    pub found: usize,
}

impl CensusGroup {
    pub fn name(&self) -> String {
        self.labels.join(", ")
    }

    pub fn holds(&self) -> bool {
        self.expected == self.found
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub n: usize,
    pub fixture_rows: usize,
    pub catalog_classes: usize,
    pub matched: usize,
    pub failures: Vec<Discrepancy>,
    /// Tabulated values that are internally inconsistent and were replaced
    /// by a derived expectation. These do not fail the report.
    pub errata: Vec<Discrepancy>,
    pub census: Vec<CensusGroup>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.census.iter().all(CensusGroup::holds)
    }

    /// Failures of one check letter.
    pub fn failures_of(&self, check: char) -> impl Iterator<Item = &Discrepancy> {
        self.failures.iter().filter(move |d| d.check == check)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "n = {}: {} fixture rows, {} catalog classes, {} matched",
            self.n, self.fixture_rows, self.catalog_classes, self.matched
        )?;
        for d in &self.failures {
            writeln!(f, "FAIL {d}")?;
        }
        if !self.census.is_empty() {
            writeln!(f, "census:")?;
            for g in &self.census {
                let status = if g.holds() { "ok" } else { "MISMATCH" };
                writeln!(f, "  {:<24} {} expected {:>3} found {:>3}  {status}", g.name(), if g.reducible { "R" } else { "I" }, g.expected, g.found)?;
            }
        }
        for d in &self.errata {
            writeln!(f, "erratum {d}")?;
        }
        writeln!(f, "result: {}", if self.passed() { "match" } else { "MISMATCH" })
    }
}

fn label_of(record: &ClassRecord) -> TypeLabel {
    chain_decomposition(&record.structure()).type_label()
}

fn roles_of(record: &ClassRecord) -> Roles {
    Roles { isolated: record.roles.isolated, end: record.roles.end, interior: record.roles.interior }
}

/// Roles implied by a printed label, reading unqualified components as chains.
fn roles_from_label(printed: &str) -> Option<Roles> {
    let (lengths, kind) = gromov_core::matrixrep::parse_printed_label(printed)?;
    let mut roles = Roles { isolated: 0, end: 0, interior: 0 };
    for (i, &len) in lengths.iter().enumerate() {
        match (i, kind, len) {
            (0, Some(ComponentKind::Cycle), _) => roles.interior += len,
            (_, _, 1) => roles.isolated += 1,
            _ => {
                roles.end += 2;
                roles.interior += len - 2;
            }
        }
    }
    Some(roles)
}

pub fn verify_fixtures(catalog: &Catalog, fixture: &Fixture) -> Report {
    let n = catalog.n;
    let mut failures = Vec::new();
    let mut errata = Vec::new();
    let fail = |failures: &mut Vec<Discrepancy>, check, line, message: String| failures.push(Discrepancy { check, line, message });
    if fixture.n != n {
        fail(&mut failures, 'a', None, format!("fixture is for {} points, catalog for {n}", fixture.n));
    }
    let mut seen: BTreeMap<CanonicalCode, usize> = BTreeMap::new();
    let mut matched = 0;
    for (table, row) in fixture.rows() {
        let line = Some(row.line);
        let s = match &row.structure {
            Ok(s) if s.n() == n => s,
            Ok(s) => {
                fail(&mut failures, 'a', line, format!("{} has {} points", row.text, s.n()));
                continue;
            }
            Err(e) => {
                fail(&mut failures, 'a', line, format!("{:?} does not parse: {e}", row.text));
                continue;
            }
        };
        if let Err(v) = check_allowable(s) {
            fail(&mut failures, 'a', line, format!("{s} is not allowable: {v}"));
            continue;
        }
        let code = canonical_form(s).code;
        if let Some(first) = seen.insert(code, row.line) {
            fail(&mut failures, 'c', line, format!("{s} is equivalent to the row on line {first}"));
            seen.insert(code, first);
        }
        let Some(record) = catalog.find(code) else {
            match is_generic(s) {
                Ok(true) => fail(&mut failures, 'b', line, format!("{s} is generic but missing from the catalog")),
                _ => fail(&mut failures, 'a', line, format!("{s} is not generic")),
            }
            continue;
        };
        matched += 1;
        let computed = label_of(record);
        if let Some(printed) = &row.type_label {
            if !computed.matches(printed) {
                fail(&mut failures, 'e', line, format!("{s} has type {computed}, table {} says {printed}", table.id));
            }
        }
        if let Some(reducible) = row.reducible {
            if reducible == record.irreducible {
                let says = if reducible { "reducible" } else { "irreducible" };
                fail(&mut failures, 'e', line, format!("{s} is listed as {says}"));
            }
        }
        if let Some(t) = &row.tabulated {
            if t.roles != roles_of(record) {
                fail(&mut failures, 'e', line, format!("{s}: tabulated roles {} but computed {}", t.roles, roles_of(record)));
            }
            if t.removed_edges != record.removed_edges {
                fail(&mut failures, 'e', line, format!("{s}: tabulated removed edges {} but computed {}", t.removed_edges, record.removed_edges));
            }
        }
        if let Some(name) = &row.name {
            if record.name.as_deref() != Some(name.as_str()) {
                fail(&mut failures, 'e', line, format!("{s}: named {name}, catalog names it {}", record.label()));
            }
        }
        if let Some(heading) = &row.heading {
            if !record.contains.iter().any(|c| &c.label == heading) {
                let labels: Vec<&str> = record.contains.iter().map(|c| c.label.as_str()).collect();
                fail(&mut failures, 'f', line, format!("{s}: heading {heading} not among closed-subset labels {labels:?}"));
            }
        }
    }
    for (record, code) in catalog.records.iter().zip(catalog.codes()) {
        if !seen.contains_key(code) {
            let kind = if record.irreducible { "irreducible" } else { "reducible" };
            fail(&mut failures, 'd', None, format!("catalog class {} {} ({}, {kind}) has no fixture row", record.id, record.canonical, record.type_label));
        }
    }
    let census =
        if fixture.census.is_empty() { Vec::new() } else { census(catalog, &fixture.census, &mut failures, &mut errata) };
    Report { n, fixture_rows: fixture.row_count(), catalog_classes: catalog.len(), matched, failures, errata, census }
}

fn census(catalog: &Catalog, lines: &[CensusLine], failures: &mut Vec<Discrepancy>, errata: &mut Vec<Discrepancy>) -> Vec<CensusGroup> {
    let mut groups: Vec<(CensusGroup, Vec<&CensusLine>)> = Vec::new();
    for line in lines {
        match (line.number, groups.last_mut()) {
            (None, Some((group, members))) => {
                group.labels.push(line.label.clone());
                members.push(line);
            }
            (Some(expected), _) => groups.push((
                CensusGroup { line: line.line, labels: vec![line.label.clone()], reducible: line.reducible, expected, found: 0 },
                vec![line],
            )),
            (None, None) => failures.push(Discrepancy { check: 'g', line: Some(line.line), message: "census line without a count".into() }),
        }
    }
    for record in catalog.records.iter().filter(|r| r.irreducible) {
        let label = label_of(record);
        let hits: Vec<(usize, &CensusLine)> = groups
            .iter()
            .enumerate()
            .filter(|(_, (g, _))| !g.reducible)
            .flat_map(|(i, (_, members))| members.iter().filter(|m| label.matches(&m.label)).map(move |m| (i, *m)))
            .collect();
        let [(group, line)] = hits.as_slice() else {
            failures.push(Discrepancy {
                check: 'g',
                line: None,
                message: format!("irreducible class {} of type {label} matches {} census lines", record.canonical, hits.len()),
            });
            continue;
        };
        groups[*group].0.found += 1;
        let computed = roles_of(record);
        let Some(tabulated) = line.roles else { continue };
        if tabulated.total() == catalog.n {
            if tabulated != computed {
                failures.push(Discrepancy {
                    check: 'g',
                    line: Some(line.line),
                    message: format!("{}: tabulated roles {tabulated}, computed {computed} for {}", line.label, record.canonical),
                });
            }
            continue;
        }
        let derived = roles_from_label(&line.label);
        let message = format!(
            "{}: tabulated roles {tabulated} do not sum to {}; derived {}, computed {computed}",
            line.label,
            catalog.n,
            derived.map(|r| r.to_string()).unwrap_or_else(|| "?".into()),
        );
        let entry = Discrepancy { check: 'g', line: Some(line.line), message };
        if derived == Some(computed) {
            if !errata.contains(&entry) {
                errata.push(entry);
            }
        } else {
            failures.push(entry);
        }
    }
    for (group, members) in groups.iter_mut().filter(|(g, _)| g.reducible) {
        let sizes: Vec<usize> = members.iter().filter_map(|m| m.contains_size()).collect();
        group.found = catalog
            .records
            .iter()
            .filter(|r| !r.irreducible && r.smallest_core().is_some_and(|k| sizes.contains(&k)))
            .count();
    }
    groups.into_iter().map(|(g, _)| g).collect()
}
