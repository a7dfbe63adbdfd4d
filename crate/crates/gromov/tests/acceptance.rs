//! Acceptance criteria, one result line each.
//!
//! A criterion is PASS, FAIL, or FAIL (known) when its only discrepancy is
//! the pair of 7-point classes listed in `EXTRA_SEVEN_POINT_CLASSES`, which
//! are generic but absent from the published appendix. For a known failure
//! the check is rerun with those two classes removed and must then pass
//! exactly. Any other failure makes this target exit nonzero.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::process::ExitCode;
use std::time::Instant;

use gromov::catalog::Classifier;
use gromov::core::{
    canonical_form, gromov_products, realize_metric, structure_matrix, structure_of_metric, GromovStructure,
};
use gromov::fixture;
use gromov::verify::verify_fixtures;
use gromov::{Catalog, Report, StageCounts};
use num_traits::Signed;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

use common::{all_permutations, allowed, candidate, every_candidate, margin_over_distances, metric, orbit, permutation};

const PUBLISHED: [(usize, usize); 4] = [(4, 1), (5, 3), (6, 26), (7, 431)];

const EXTRA_SEVEN_POINT_CLASSES: [&str; 2] = ["123,214,314,425,536,615,746", "123,214,315,436,547,627,716"];

#[derive(PartialEq, Eq)]
enum Status {
    Pass,
    Known,
    Fail,
}

struct Verdict {
    status: Status,
    summary: String,
    details: Vec<String>,
}

impl Verdict {
    fn new(status: Status, summary: impl Into<String>) -> Self {
        Verdict { status, summary: summary.into(), details: Vec::new() }
    }

    fn pass_if(ok: bool, summary: impl Into<String>) -> Self {
        Verdict::new(if ok { Status::Pass } else { Status::Fail }, summary)
    }

    fn with(mut self, details: Vec<String>) -> Self {
        self.details = details;
        self
    }
}

fn without_extras(c: &Catalog) -> Catalog {
    let records: Vec<_> = c.records.iter().filter(|r| !EXTRA_SEVEN_POINT_CLASSES.contains(&r.canonical.as_str())).cloned().collect();
    let stages = StageCounts { generic: records.len() as u64, ..c.stages };
    Catalog::new(c.n, stages, records)
}

fn extras_present(c: &Catalog) -> bool {
    EXTRA_SEVEN_POINT_CLASSES.iter().all(|t| c.records.iter().any(|r| r.canonical == *t))
}

fn report_for(c: &Catalog) -> Report {
    verify_fixtures(c, &fixture::bundled(c.n).expect("bundled fixture"))
}

fn counts(catalogs: &BTreeMap<usize, Catalog>) -> Verdict {
    let computed: Vec<usize> = PUBLISHED.iter().map(|(n, _)| catalogs[n].len()).collect();
    let published: Vec<usize> = PUBLISHED.iter().map(|p| p.1).collect();
    let summary = format!("n=4..7: computed {computed:?}, published {published:?}");
    if computed == published {
        return Verdict::new(Status::Pass, summary);
    }
    let reduced = without_extras(&catalogs[&7]);
    let explained = computed[..3] == published[..3]
        && extras_present(&catalogs[&7])
        && reduced.len() == published[3]
        && report_for(&reduced).passed();
    let details = EXTRA_SEVEN_POINT_CLASSES.iter().map(|t| format!("generic class absent from the appendix: {t}")).collect();
    Verdict::new(if explained { Status::Known } else { Status::Fail }, summary).with(details)
}

fn six_point_table(catalogs: &BTreeMap<usize, Catalog>) -> Verdict {
    let f = fixture::bundled(6).unwrap();
    let report = verify_fixtures(&catalogs[&6], &f);
    let tabulated = f.rows().filter(|(_, r)| r.tabulated.is_some() && r.reducible.is_some()).count();
    let ok = report.passed() && report.matched == 26 && report.catalog_classes == 26 && tabulated == 26;
    let summary = format!(
        "{} rows, {} matched, {} catalog classes, roles/removed edges/R-I checked on {tabulated} rows, {} discrepancies",
        report.fixture_rows,
        report.matched,
        report.catalog_classes,
        report.failures.len()
    );
    Verdict::pass_if(ok, summary).with(report.failures.iter().map(|d| d.to_string()).collect())
}

fn census(catalogs: &BTreeMap<usize, Catalog>) -> Verdict {
    let report = report_for(&catalogs[&7]);
    let erratum = report.errata.iter().any(|e| e.message.starts_with("1×7") && e.message.contains("derived (7,0,0), computed (7,0,0)"));
    let census_failures = report.failures_of('g').count();
    let mismatched: Vec<String> = report
        .census
        .iter()
        .filter(|g| !g.holds())
        .map(|g| format!("{}: published {}, computed {}", g.name(), g.expected, g.found))
        .collect();
    let summary = format!(
        "{}/{} groups agree, 1×7 role erratum {}",
        report.census.len() - mismatched.len(),
        report.census.len(),
        if erratum { "reported" } else { "MISSING" }
    );
    let ok = erratum && census_failures == 0 && report.census.len() == 17;
    if ok && mismatched.is_empty() {
        return Verdict::new(Status::Pass, summary);
    }
    let reduced = report_for(&without_extras(&catalogs[&7]));
    let explained = ok && extras_present(&catalogs[&7]) && reduced.census.iter().all(|g| g.holds()) && reduced.failures_of('g').count() == 0;
    Verdict::new(if explained { Status::Known } else { Status::Fail }, summary).with(mismatched)
}

fn appendix(catalogs: &BTreeMap<usize, Catalog>) -> Verdict {
    let report = report_for(&catalogs[&7]);
    let row_failures: Vec<String> =
        report.failures.iter().filter(|d| "abcef".contains(d.check)).map(|d| d.to_string()).collect();
    let missing_rows: Vec<String> = report.failures_of('d').map(|d| d.to_string()).collect();
    let summary = format!(
        "{} rows, {} matched, {} row discrepancies, {} catalog classes without a row",
        report.fixture_rows,
        report.matched,
        row_failures.len(),
        missing_rows.len()
    );
    let rows_ok = row_failures.is_empty() && report.matched == report.fixture_rows;
    if rows_ok && missing_rows.is_empty() {
        return Verdict::new(Status::Pass, summary);
    }
    let reduced = report_for(&without_extras(&catalogs[&7]));
    let explained = rows_ok && missing_rows.len() == 2 && extras_present(&catalogs[&7]) && reduced.failures.is_empty();
    Verdict::new(if explained { Status::Known } else { Status::Fail }, summary).with([row_failures, missing_rows].concat())
}

fn brute_force_five(catalogs: &BTreeMap<usize, Catalog>) -> Verdict {
    let perms = all_permutations(5);
    let mut candidates = 0;
    let mut generic = 0;
    let mut inconsistent = Vec::new();
    let mut classes: BTreeMap<String, gromov::core::Rational> = BTreeMap::new();
    every_candidate(5, |picks| {
        candidates += 1;
        let s = GromovStructure::from_index_pairs(picks).unwrap();
        let margin = margin_over_distances(&s);
        if !margin.is_positive() {
            return;
        }
        generic += 1;
        if !allowed(picks) {
            inconsistent.push(format!("{s} violates the exclusion rule but has margin {margin}"));
        }
        let orbit = orbit(&s, &perms);
        let first = orbit.iter().next().unwrap().clone();
        if let Some(previous) = classes.insert(first, margin.clone()) {
            if previous != margin {
                inconsistent.push(format!("orbit of {s} has margins {previous} and {margin}"));
            }
        }
    });
    let brute: BTreeSet<(String, String)> = classes.iter().map(|(k, m)| (k.clone(), m.to_string())).collect();
    let pipeline: BTreeSet<(String, String)> =
        catalogs[&5].records.iter().map(|r| (r.canonical.clone(), r.margin.to_string())).collect();
    let summary = format!(
        "{candidates} candidates, {generic} generic, {} orbits; pipeline has {} classes; forms and margins {}",
        classes.len(),
        pipeline.len(),
        if brute == pipeline { "equal" } else { "DIFFER" }
    );
    Verdict::pass_if(candidates == 7776 && brute == pipeline && inconsistent.is_empty(), summary).with(inconsistent)
}

fn round_trip(catalogs: &BTreeMap<usize, Catalog>) -> Verdict {
    let mut total = 0;
    let mut failures = Vec::new();
    for c in catalogs.values() {
        for r in &c.records {
            total += 1;
            let s = r.structure();
            let back = realize_metric(&s)
                .map_err(|e| e.to_string())
                .and_then(|d| structure_of_metric(&d).map_err(|e| e.to_string()))
                .map(|t| canonical_form(&t).text());
            if back.as_deref() != Ok(r.canonical.as_str()) {
                failures.push(format!("{}: {back:?}", r.canonical));
            }
        }
    }
    let sizes: Vec<String> = catalogs.values().map(|c| c.len().to_string()).collect();
    let summary = format!("{} failures over {total} classes ({})", failures.len(), sizes.join("+"));
    Verdict::pass_if(failures.is_empty(), summary).with(failures)
}

fn runner_config(cases: u32) -> Config {
    Config { cases, failure_persistence: None, ..Config::default() }
}

fn property_suite(catalogs: &BTreeMap<usize, Catalog>) -> Verdict {
    let mut lines = Vec::new();
    let mut ok = true;
    let mut record = |name: String, result: Result<(), String>| {
        ok &= result.is_ok();
        lines.push(match result {
            Ok(()) => format!("{name}: ok"),
            Err(e) => format!("{name}: {e}"),
        });
    };
    for n in 5..=7 {
        let mut runner = TestRunner::new(runner_config(1000));
        let result = runner.run(&metric(n), |d| {
            gromov_products(&d).verify_identities().map_err(|e| TestCaseError::fail(e.to_string()))?;
            if let Ok(s) = structure_of_metric(&d) {
                if structure_matrix(&s).row_sums().iter().any(|&x| x != 2) {
                    return Err(TestCaseError::fail(format!("row sums of {s}")));
                }
            }
            Ok(())
        });
        record(format!("n={n}: identities and row sums on 1000 random metrics"), result.map_err(|e| e.to_string()));

        let mut runner = TestRunner::new(runner_config(100));
        let strategy = (candidate(n), proptest::collection::vec(permutation(n), 8));
        let result = runner.run(&strategy, |(s, perms)| {
            let code = canonical_form(&s).code;
            for p in &perms {
                if canonical_form(&s.apply_permutation(p).unwrap()).code != code {
                    return Err(TestCaseError::fail(format!("canonical form of {s} changes under {p:?}")));
                }
            }
            Ok(())
        });
        record(format!("n={n}: canonical form constant on 100 random orbits"), result.map_err(|e| e.to_string()));

        let mut runner = TestRunner::new(runner_config(100));
        let result = runner.run(&(metric(n), permutation(n)), |(d, p)| {
            let moved = structure_of_metric(&d.permuted(&p));
            let same = match structure_of_metric(&d) {
                Ok(s) => moved.ok() == Some(s.apply_permutation(&p).unwrap()),
                Err(_) => moved.is_err(),
            };
            if same {
                Ok(())
            } else {
                Err(TestCaseError::fail("structure_of_metric is not equivariant"))
            }
        });
        record(format!("n={n}: equivariance on 100 random (metric, permutation) pairs"), result.map_err(|e| e.to_string()));
    }
    let bad_rows: Vec<&str> = catalogs
        .values()
        .flat_map(|c| c.records.iter())
        .filter(|r| structure_matrix(&r.structure()).row_sums().iter().any(|&x| x != 2))
        .map(|r| r.canonical.as_str())
        .collect();
    record("row sums on every catalog class".into(), if bad_rows.is_empty() { Ok(()) } else { Err(format!("{bad_rows:?}")) });
    let passed = lines.iter().filter(|l| l.ends_with(": ok")).count();
    Verdict::pass_if(ok, format!("{passed}/{} properties hold", lines.len())).with(lines)
}

fn rank_audit(catalogs: &BTreeMap<usize, Catalog>) -> Verdict {
    let mut agree = 0;
    let mut divergent = Vec::new();
    for c in catalogs.values() {
        for r in &c.records {
            if r.rank == r.removed_edges {
                agree += 1;
            } else {
                divergent.push(format!("n={} {}: rank {}, removed edges {}", c.n, r.canonical, r.rank, r.removed_edges));
            }
        }
    }
    let f = fixture::bundled(6).unwrap();
    let mut table_rows = 0;
    let mut table_mismatches = Vec::new();
    for (_, row) in f.rows() {
        let (Ok(s), Some(t)) = (&row.structure, &row.tabulated) else { continue };
        table_rows += 1;
        let computed = catalogs[&6].find_structure(s).map(|r| r.removed_edges);
        if computed != Some(t.removed_edges) {
            table_mismatches.push(format!("line {}: tabulated {}, computed {computed:?}", row.line, t.removed_edges));
        }
    }
    let summary = format!(
        "rank equals removed edges on {agree} classes, differs on {}; 6-point table removed edges match on {}/{table_rows} rows",
        divergent.len(),
        table_rows - table_mismatches.len()
    );
    Verdict::pass_if(table_rows == 26 && table_mismatches.is_empty(), summary).with([table_mismatches, divergent].concat())
}

fn main() -> ExitCode {
    let start = Instant::now();
    let mut classifier = Classifier::new();
    if let Err(e) = classifier.classify(7) {
        println!("classification failed: {e}");
        return ExitCode::FAILURE;
    }
    let catalogs = classifier.catalogs().clone();
    println!("catalogs for n=4..7 built in {:.1?}", start.elapsed());

    let criteria: [(u8, &str, fn(&BTreeMap<usize, Catalog>) -> Verdict); 8] = [
        (1, "count reproduction", counts),
        (2, "6-point catalog match", six_point_table),
        (3, "7-point census", census),
        (4, "appendix fixture verification", appendix),
        (5, "5-point oracle equivalence", brute_force_five),
        (6, "round trip", round_trip),
        (7, "invariant suite", property_suite),
        (8, "rank audit", rank_audit),
    ];
    let mut results = Vec::new();
    for (id, name, check) in criteria {
        let t = Instant::now();
        let v = check(&catalogs);
        for d in &v.details {
            println!("    {d}");
        }
        let tag = match v.status {
            Status::Pass => "PASS",
            Status::Known => "FAIL (known)",
            Status::Fail => "FAIL",
        };
        println!("criterion {id} {tag}: {name}: {} [{:.1?}]", v.summary, t.elapsed());
        results.push((id, tag, v.status));
    }
    println!();
    for (id, tag, _) in &results {
        println!("criterion {id}: {tag}");
    }
    let unexpected = results.iter().filter(|r| r.2 == Status::Fail).count();
    let known: Vec<String> = results.iter().filter(|r| r.2 == Status::Known).map(|r| r.0.to_string()).collect();
    println!(
        "{} of 8 criteria pass; known failures: {}; unexpected failures: {unexpected}",
        results.iter().filter(|r| r.2 == Status::Pass).count(),
        if known.is_empty() { "none".to_string() } else { known.join(", ") }
    );
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
