use std::fs;

use gromov::store::{self, StoreError};

fn temp_dir(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("gromov-store-{name}-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn save_then_load_is_lossless() {
    let dir = temp_dir("roundtrip");
    for n in 4..=6 {
        let c = store::bundled(n).unwrap();
        let path = dir.join(store::file_name(n));
        store::save(&c, &path).unwrap();
        assert_eq!(store::load(&path, true).unwrap(), c);
    }
    fs::remove_dir_all(dir).unwrap();
}

#[test]
fn serialization_is_stable() {
    for n in 4..=7 {
        let c = store::bundled(n).unwrap();
        let again = store::from_json(&store::to_json(&c), "x".as_ref(), false).unwrap();
        assert_eq!(store::to_json(&again), store::to_json(&c));
    }
}

#[test]
fn shipped_seven_point_catalog() {
    let c = store::bundled_checked(7, true).unwrap().unwrap();
    assert_eq!(c.len(), 433);
    assert_eq!(c.irreducible_count(), 288);
}

#[test]
fn tampered_canonical_form_is_rejected() {
    let text = store::to_json(&store::bundled(5).unwrap());
    let tampered = text.replacen("\"canonical\":\"123,214,314,423,514\"", "\"canonical\":\"124,213,314,423,514\"", 1);
    assert_ne!(text, tampered);
    let err = store::from_json(&tampered, "t.json".as_ref(), false).unwrap_err();
    assert!(matches!(err, StoreError::CorruptRecord { id: 1, .. }), "{err}");
}

#[test]
fn tampered_invariants_and_witnesses_are_rejected() {
    let text = store::to_json(&store::bundled(5).unwrap());
    let rank = text.replacen("\"rank\":2", "\"rank\":3", 1);
    assert!(matches!(store::from_json(&rank, "t.json".as_ref(), false), Err(StoreError::CorruptRecord { .. })));
    let witness = text.replacen("[[0,5,5,8,5]", "[[0,5,5,9,5]", 1);
    assert_ne!(text, witness);
    assert!(matches!(store::from_json(&witness, "t.json".as_ref(), true), Err(StoreError::CorruptRecord { .. })));
}

#[test]
fn schema_version_is_checked() {
    let text = store::to_json(&store::bundled(4).unwrap()).replacen("\"schema_version\": 1", "\"schema_version\": 2", 1);
    assert!(matches!(
        store::from_json(&text, "t.json".as_ref(), false),
        Err(StoreError::SchemaVersionMismatch { found: 2, expected: 1 })
    ));
}

#[test]
fn truncated_files_are_rejected() {
    let text = store::to_json(&store::bundled(6).unwrap());
    assert!(matches!(store::from_json(&text[..text.len() / 2], "t.json".as_ref(), false), Err(StoreError::Json { .. })));
    assert!(matches!(store::load("/nonexistent/catalog-n6.json".as_ref(), false), Err(StoreError::Io { .. })));
}
