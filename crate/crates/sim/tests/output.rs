use std::fs;

use eit_sim::output::{manifest, MANIFEST};
use eit_sim::scenario::Scenario;
use eit_sim::table::{read_csv, Metadata, RESULT_SCHEMA};
use eit_sim::{run_study, write_results, Cell, OutputFormat, ResultTable, SimError, StudyKind};
use proptest::prelude::*;

fn metadata() -> Metadata {
    Metadata {
        study: "tri-pol".into(),
        seed: 3,
        scale: 0.5,
        generator: "eit-sim test".into(),
        scenario_hash: "ab".repeat(32),
    }
}

fn validator() -> jsonschema::Validator {
    let schema: serde_json::Value = serde_json::from_str(RESULT_SCHEMA).unwrap();
    jsonschema::validator_for(&schema).unwrap()
}

fn small(kind: StudyKind) -> Scenario {
    let mut s = Scenario::with_defaults(kind);
    s.scale = 0.02;
    s
}

#[test]
fn csv_roundtrip_keeps_values() {
    let dir = tempfile::tempdir().unwrap();
    let mut t = ResultTable::new("t", &[("label", "text"), ("n", "count"), ("x", "m")]);
    let xs = [0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, 0.0, 2f64.sqrt(), -7.5e-7];
    for (i, x) in xs.iter().enumerate() {
        t.push(vec!["a, \"quoted\" label".into(), i.into(), (*x).into()]);
    }
    let path = dir.path().join("t.csv");
    t.write_csv(&path).unwrap();
    let (headers, rows) = read_csv(&path).unwrap();
    assert_eq!(headers, vec!["label(text)", "n(count)", "x(m)"]);
    for (row, x) in rows.iter().zip(xs) {
        assert_eq!(row[0], "a, \"quoted\" label");
        let back: f64 = row[2].parse().unwrap();
        assert!((back - x).abs() <= 1e-12 * x.abs(), "{back} vs {x}");
    }
}

#[test]
fn empty_table_writes_only_the_header() {
    let dir = tempfile::tempdir().unwrap();
    let t = ResultTable::new("empty", &[("a", "1"), ("b", "s")]);
    let path = dir.path().join("e.csv");
    t.write_csv(&path).unwrap();
    assert_eq!(fs::read_to_string(&path).unwrap(), "a(1),b(s)\n");
}

#[test]
fn non_finite_values_are_refused() {
    let dir = tempfile::tempdir().unwrap();
    let mut t = ResultTable::new("bad", &[("x", "1")]);
    t.push(vec![f64::NAN.into()]);
    let e = t.write_csv(&dir.path().join("bad.csv")).unwrap_err();
    assert!(matches!(e, SimError::Output { .. }));
    assert_eq!(e.exit_code(), 2);
}

#[test]
fn json_tables_validate_against_the_schema() {
    let dir = tempfile::tempdir().unwrap();
    let v = validator();
    for kind in StudyKind::ALL {
        let out = run_study(&small(kind)).unwrap();
        let sub = dir.path().join(kind.as_str());
        for path in write_results(&out, &sub, OutputFormat::Json).unwrap() {
            if path.ends_with(MANIFEST) {
                continue;
            }
            let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
            let errs: Vec<String> = v.iter_errors(&doc).map(|e| e.to_string()).collect();
            assert!(errs.is_empty(), "{}: {errs:?}", path.display());
            assert_eq!(doc["metadata"]["study"], kind.as_str());
        }
    }
}

#[test]
fn schema_rejects_malformed_documents() {
    let v = validator();
    let good = serde_json::json!({
        "schema_version": 1, "table": "t",
        "metadata": {"study": "tri-pol", "seed": 1, "scale": 1.0, "generator": "g", "scenario_hash": "0".repeat(64)},
        "columns": [{"name": "x", "unit": "m"}], "rows": [[1.5], ["a"]]
    });
    assert!(v.is_valid(&good));
    let mut bad = good.clone();
    bad["metadata"]["scenario_hash"] = "xyz".into();
    assert!(!v.is_valid(&bad));
    let mut bad = good.clone();
    bad["rows"] = serde_json::json!([[null]]);
    assert!(!v.is_valid(&bad));
    let mut bad = good;
    bad["schema_version"] = 2.into();
    assert!(!v.is_valid(&bad));
}

#[test]
fn manifest_describes_every_file() {
    let out = run_study(&small(StudyKind::NearField)).unwrap();
    let m = manifest(&out, OutputFormat::Csv);
    assert!(m.starts_with("study: near-field\nseed: 1\n"));
    for t in &out.tables {
        assert!(m.contains(&format!("\n{}.csv\n", t.table.name)), "{m}");
    }
    assert!(m.contains("plot: x = distance [m], y = correlation [1], one curve per carrier_frequency"));
    assert!(m.contains(&format!("scenario_hash: {}", out.metadata.scenario_hash)));
}

#[test]
fn output_directory_does_not_change_the_bytes() {
    let mut a = small(StudyKind::EmCoreValidation);
    a.output.directory = "somewhere".into();
    let mut b = a.clone();
    b.output.directory = "elsewhere".into();
    let (da, db) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let pa = write_results(&run_study(&a).unwrap(), da.path(), OutputFormat::Json).unwrap();
    let pb = write_results(&run_study(&b).unwrap(), db.path(), OutputFormat::Json).unwrap();
    for (x, y) in pa.iter().zip(&pb) {
        assert_eq!(fs::read(x).unwrap(), fs::read(y).unwrap());
    }
}

#[test]
fn seeds_change_the_random_tables() {
    let a = small(StudyKind::TriPol);
    let mut b = a.clone();
    b.seed = 2;
    let ta = run_study(&a).unwrap();
    let tb = run_study(&b).unwrap();
    assert_ne!(ta.table("ue_results"), tb.table("ue_results"));
    assert_ne!(ta.metadata.scenario_hash, tb.metadata.scenario_hash);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn any_finite_table_roundtrips_through_csv(
        xs in prop::collection::vec(prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO, 0..40),
        ns in prop::collection::vec(any::<i64>(), 40),
        label in "[ -~]{0,12}",
    ) {
        let dir = tempfile::tempdir().unwrap();
        let mut t = ResultTable::new("p", &[("x", "1"), ("n", "count"), ("s", "text")]);
        for (x, n) in xs.iter().zip(&ns) {
            t.push(vec![Cell::Num(*x), Cell::Int(*n), Cell::Text(label.clone())]);
        }
        let path = dir.path().join("p.csv");
        t.write_csv(&path).unwrap();
        let (_, rows) = read_csv(&path).unwrap();
        prop_assert_eq!(rows.len(), xs.len());
        for ((row, x), n) in rows.iter().zip(&xs).zip(&ns) {
            prop_assert_eq!(row[0].parse::<f64>().unwrap(), *x);
            prop_assert_eq!(row[1].parse::<i64>().unwrap(), *n);
            prop_assert_eq!(&row[2], &label);
        }
    }

    #[test]
    fn json_metadata_follows_the_schema(seed in any::<u64>(), scale in 1e-3f64..10.0, rows in 0usize..5) {
        let dir = tempfile::tempdir().unwrap();
        let mut t = ResultTable::new("j", &[("x", "1")]);
        for i in 0..rows {
            t.push(vec![(i as f64 * 0.25).into()]);
        }
        let path = dir.path().join("j.json");
        t.write_json(&path, &Metadata { seed, scale, ..metadata() }).unwrap();
        let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
        prop_assert!(validator().is_valid(&doc));
        prop_assert_eq!(doc["metadata"]["seed"].as_u64(), Some(seed));
    }
}
