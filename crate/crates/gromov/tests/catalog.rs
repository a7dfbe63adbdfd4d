use gromov::catalog::{classify_substructures, identify, Classifier, IdentifyError};
use gromov::core::rational::int;
use gromov::core::{DistanceMatrix, EnumerationMode, GromovStructure, MetricError, Permutation};
use gromov::{fixture, store, verify_fixtures, Catalog, NameMap};

fn parse(text: &str) -> GromovStructure {
    text.parse().unwrap()
}

fn built(n: usize) -> Classifier {
    let mut c = Classifier::new().workers(Some(2));
    c.classify(n).unwrap();
    c
}

#[test]
fn fresh_catalogs_equal_shipped_ones() {
    let c = built(6);
    for n in 4..=6 {
        assert_eq!(c.catalogs()[&n], store::bundled(n).unwrap(), "n = {n}");
    }
    let counts: Vec<usize> = (4..=6).map(|n| c.catalogs()[&n].len()).collect();
    assert_eq!(counts, [1, 3, 26]);
}

#[test]
fn worker_count_does_not_change_the_catalog() {
    let mut one = Classifier::new().workers(Some(1));
    let mut three = Classifier::new().workers(Some(3));
    assert_eq!(store::to_json(one.classify(6).unwrap()), store::to_json(three.classify(6).unwrap()));
}

#[test]
fn chain_seeded_mode_finds_the_same_classes() {
    let mut seeded = Classifier::new().mode(EnumerationMode::ChainSeeded);
    let seeded = seeded.classify(6).unwrap();
    let full = store::bundled(6).unwrap();
    assert_eq!(seeded.records, full.records);
    assert!(seeded.stages.allowable < full.stages.allowable);
}

#[test]
fn stage_counts() {
    let expected = [(4, [81, 3, 1, 1, 1]), (5, [7776, 102, 3, 3, 3]), (6, [1_000_000, 13140, 27, 32, 26])];
    for (n, [raw, allowable, buckets, canonical, generic]) in expected {
        let s = store::bundled(n).unwrap().stages;
        assert_eq!([s.raw, s.allowable, s.buckets, s.canonical, s.generic], [raw, allowable, buckets, canonical, generic]);
    }
    let seven = store::bundled(7).unwrap().stages;
    assert_eq!((seven.allowable, seven.canonical, seven.generic), (2_068_320, 477, 433));
}

#[test]
fn unsupported_sizes_are_rejected() {
    assert!(Classifier::new().classify(3).is_err());
    assert!(Classifier::new().classify(9).is_err());
}

#[test]
fn five_point_classes_carry_their_names() {
    let five = store::bundled(5).unwrap();
    let mut names: Vec<_> = five.records.iter().map(|r| r.label()).collect();
    names.sort();
    assert_eq!(names, ["X5A", "X5B", "X5C"]);
    assert_eq!(five.irreducible_count(), 2);
}

fn smaller_catalogs() -> std::collections::BTreeMap<usize, Catalog> {
    (4..=6).map(|n| (n, store::bundled(n).unwrap())).collect()
}

#[test]
fn closed_subsets_of_a_seven_point_class() {
    let names = NameMap::bundled();
    let found = classify_substructures(&smaller_catalogs(), &names, &parse("124,213,324,413,513,613,713")).unwrap();
    let labels: Vec<(usize, &str)> = found.iter().map(|c| (c.size, c.label.as_str())).collect();
    assert!(labels.contains(&(4, "X4")));
    assert!(labels.contains(&(5, "X5C")));
    assert!(labels.contains(&(6, "R1")));

    let found = classify_substructures(&smaller_catalogs(), &names, &parse("125,213,324,435,514,627,716")).unwrap();
    assert!(found.iter().any(|c| c.size == 5 && c.label == "X5A"));
}

#[test]
fn irreducible_classes_have_no_closed_subsets() {
    let names = NameMap::bundled();
    let cycle = parse("127,213,324,435,546,657,716");
    assert!(classify_substructures(&smaller_catalogs(), &names, &cycle).unwrap().is_empty());
}

#[test]
fn identify_finds_witnesses_and_their_relabelings() {
    let six = store::bundled(6).unwrap();
    let p = Permutation::from_indices(&[3, 5, 0, 1, 4, 2]);
    for r in &six.records {
        let d = r.witness_matrix().unwrap();
        assert_eq!(identify(&six, &d).unwrap().id, r.id);
        assert_eq!(identify(&six, &d.permuted(&p)).unwrap().id, r.id);
    }
}

#[test]
fn identify_rejects_ties_and_wrong_sizes() {
    let six = store::bundled(6).unwrap();
    let equilateral = DistanceMatrix::from_fn(6, |_, _| int(1)).unwrap();
    assert!(matches!(identify(&six, &equilateral), Err(IdentifyError::Metric(MetricError::NotDeltaGeneric { .. }))));
    let five = DistanceMatrix::from_fn(5, |_, _| int(1)).unwrap();
    assert!(matches!(identify(&six, &five), Err(IdentifyError::SizeMismatch { expected: 6, found: 5 })));
}

#[test]
fn six_point_table_matches() {
    let report = verify_fixtures(&store::bundled(6).unwrap(), &fixture::bundled(6).unwrap());
    assert!(report.passed(), "{report}");
    assert_eq!((report.fixture_rows, report.matched, report.catalog_classes), (26, 26, 26));
}

#[test]
fn small_named_fixtures_match() {
    for n in [4, 5] {
        let report = verify_fixtures(&store::bundled(n).unwrap(), &fixture::bundled(n).unwrap());
        assert!(report.passed(), "{report}");
    }
}

#[test]
fn seven_point_discrepancies_are_exactly_the_two_unlisted_classes() {
    let report = verify_fixtures(&store::bundled(7).unwrap(), &fixture::bundled(7).unwrap());
    assert_eq!((report.fixture_rows, report.matched, report.catalog_classes), (431, 431, 433));
    let missing: Vec<_> = report.failures_of('d').collect();
    assert_eq!(missing.len(), 2);
    assert_eq!(report.failures.len(), 2, "{report}");
    assert!(missing[0].message.contains("123,214,314,425,536,615,746"));
    assert!(missing[1].message.contains("123,214,315,436,547,627,716"));
    let off: Vec<(String, usize, usize)> =
        report.census.iter().filter(|g| !g.holds()).map(|g| (g.name(), g.expected, g.found)).collect();
    assert_eq!(off, [("3+2+1+1".to_string(), 42, 43), ("Contains X6".to_string(), 93, 94)]);
    assert_eq!(report.errata.len(), 1);
}

#[test]
fn a_mislabeled_row_is_reported_with_its_line() {
    let text = fixture::TABLE_SIX.replacen("6+0 (Cycle) | I |", "5+1 | I |", 1);
    let f = fixture::Fixture::parse_tabulated(&text).unwrap();
    let report = verify_fixtures(&store::bundled(6).unwrap(), &f);
    assert!(!report.passed());
    let e: Vec<_> = report.failures_of('e').collect();
    assert_eq!(e.len(), 1);
    assert!(e[0].line.is_some());
}

#[test]
fn duplicate_and_non_allowable_rows_are_reported() {
    let mut text = fixture::NAMED_SMALL.to_string();
    text.push_str("X5D 123,214,315,425,534\nBAD 124,214,324,413,513\n");
    let f = fixture::Fixture::parse_named(&text, 5).unwrap();
    let report = verify_fixtures(&store::bundled(5).unwrap(), &f);
    assert_eq!(report.failures_of('c').count(), 1, "{report}");
    assert_eq!(report.failures_of('a').count(), 1, "{report}");
}
