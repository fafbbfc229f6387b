use std::fs;
use std::path::PathBuf;

use qde_core::harness::{parse_curves, validate, validate_parallel, Format};
use qde_core::Error;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

#[test]
fn bundled_csv_and_json_fixtures_agree() {
    let csv = parse_curves(&fixture("curves.csv"), Format::Csv).unwrap();
    let json = parse_curves(&fixture("curves.json"), Format::Json).unwrap();
    assert_eq!(csv, json);
    assert_eq!(csv.records.len(), 8);
    let report = validate(&csv.records);
    assert_eq!(report.consistent + report.violations, report.total);
    assert_eq!(report.to_json(), validate_parallel(&csv.records, 3).unwrap().to_json());
}

#[test]
fn format_from_extension() {
    assert_eq!(Format::from_path(&fixture("curves.json")), Format::Json);
    assert_eq!(Format::from_path(&fixture("curves.csv")), Format::Csv);
}

#[test]
fn files_on_disk() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("one.csv");
    fs::write(&path, "label,rank,sha_order\n11a1,0,1").unwrap();
    let set = parse_curves(&path, Format::Csv).unwrap();
    assert_eq!(set.records.len(), 1);
    assert_eq!((set.records[0].rank, set.records[0].sha_order), (0, 1));

    let path = dir.path().join("bad.json");
    fs::write(&path, r#"[{"label": "a", "rank": 0, "sha_order": 1}, {"label": "a", "rank": 1, "sha_order": 4}]"#).unwrap();
    match parse_curves(&path, Format::Json) {
        Err(Error::Ingest(rows)) => assert_eq!(rows[0].line, 2),
        other => panic!("{other:?}"),
    }

    match parse_curves(&dir.path().join("missing.csv"), Format::Csv) {
        Err(Error::Io { path, .. }) => assert!(path.ends_with("missing.csv")),
        other => panic!("{other:?}"),
    }
}
