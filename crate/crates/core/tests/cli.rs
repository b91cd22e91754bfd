//! End-to-end tests of the `relay-aoi` binary.

use std::path::Path;
use std::process::{Command, Output};

use relay_aoi::model::{asymptotic_success, objective_f, weighted_sum_aoi};
use relay_aoi::{PowerProfile, SystemParams};

fn relay_aoi(args: &[&str], out_dir: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_relay-aoi"));
    cmd.args(args).env_remove("RELAY_AOI_OUT_DIR");
    if let Some(d) = out_dir {
        cmd.env("RELAY_AOI_OUT_DIR", d);
    }
    cmd.output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn records(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let header = rdr.headers().unwrap().iter().map(String::from).collect();
    let rows = rdr.records().map(|r| r.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

fn column(header: &[String], row: &[String], name: &str) -> String {
    let k = header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"));
    row[k].clone()
}

fn num(header: &[String], row: &[String], name: &str) -> f64 {
    column(header, row, name).parse().unwrap()
}

/// Values are printed with 9 significant digits.
fn close9(printed: f64, exact: f64) {
    assert!((printed - exact).abs() <= 1e-8 * exact.abs().max(1e-300), "{printed} vs {exact}");
}

fn write_scenario(dir: &Path, text: &str) -> String {
    let p = dir.join("scenario.json");
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn optimize_reports_reference_optimum() {
    let o = relay_aoi(&["optimize", "--format", "json"], None);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["result"]["p_a_star"], 1.0);
    assert!((v["result"]["p_b_star"].as_f64().unwrap() - 1.196).abs() < 1e-3);
    assert!((v["result"]["aoi_star"].as_f64().unwrap() - 3.636).abs() < 1e-3);
    assert_eq!(v["result"]["peak_a_candidate"]["provenance"], "lemma1-at-peakA");
}

#[test]
fn oracle_gap_is_reported() {
    let o = relay_aoi(&["optimize", "--oracle", "0.001"], None);
    let (h, rows) = records(&stdout(&o));
    let oracle = rows.iter().find(|r| r[0] == "oracle").unwrap();
    let note = column(&h, oracle, "note");
    let gap = |key: &str| -> f64 {
        note.split_whitespace()
            .find_map(|kv| kv.strip_prefix(&format!("{key}=")))
            .unwrap()
            .parse()
            .unwrap()
    };
    assert!(gap("gap_p_a") <= 1e-3 && gap("gap_p_b") <= 1e-3);
    assert!(gap("gap_objective").abs() <= 1e-4);
}

#[test]
fn symmetric_setup_notes_tie() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_scenario(dir.path(), r#"{"params": {"peak_b": 1}}"#);
    let o = relay_aoi(&["optimize", "--config", &cfg], None);
    let (h, rows) = records(&stdout(&o));
    assert!(column(&h, &rows[0], "note").contains("tie"));
    let cands: Vec<_> = rows.iter().filter(|r| r[0] == "candidate").collect();
    assert_eq!(column(&h, cands[0], "p_a"), column(&h, cands[1], "p_b"));
    assert_eq!(column(&h, cands[0], "p_b"), column(&h, cands[1], "p_a"));
}

#[test]
fn exit_codes() {
    assert_eq!(relay_aoi(&["optimize"], None).status.code(), Some(0));
    assert_eq!(relay_aoi(&["--help"], None).status.code(), Some(0));
    assert_eq!(relay_aoi(&["frobnicate"], None).status.code(), Some(1));
    assert_eq!(relay_aoi(&["optimize", "--seed", "x"], None).status.code(), Some(1));
    assert_eq!(relay_aoi(&["analyze"], None).status.code(), Some(1));
    assert_eq!(relay_aoi(&["optimize", "--config", "/nonexistent.json"], None).status.code(), Some(1));
    assert_eq!(relay_aoi(&["simulate", "--p-a", "1", "--p-b", "1", "--slots", "3"], None).status.code(), Some(1));

    let dir = tempfile::tempdir().unwrap();
    let cfg = write_scenario(dir.path(), r#"{"params": {"unknown_field": 1}}"#);
    assert_eq!(relay_aoi(&["optimize", "--config", &cfg], None).status.code(), Some(1));

    let o = relay_aoi(&["optimize", "--gamma-th-db", "26.5"], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("feasible range"));
}

#[test]
fn db_threshold_conversion() {
    let o = relay_aoi(&["grid", "--gamma-th-db", "20", "--print-config"], None);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["params"]["gamma_th"].as_f64().unwrap() - 100.0).abs() < 1e-12);

    let o = relay_aoi(&["grid", "--gamma-th-db", "10", "--print-config"], None);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["params"]["gamma_th"].as_f64().unwrap() - 10.0).abs() < 1e-12);
}

#[test]
fn flags_override_scenario_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_scenario(
        dir.path(),
        r#"{"preset": "quick", "params": {"gamma_th_db": 15}, "simulation": {"seed": 3}, "powers": {"p_a": 1, "p_b": 1.5}}"#,
    );
    let o = relay_aoi(&["analyze", "--config", &cfg, "--seed", "8", "--p-b", "1.2", "--print-config"], None);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["simulation"]["seed"], 8);
    assert_eq!(v["simulation"]["n_slots"], 100_000);
    assert_eq!(v["powers"]["p_a"], 1.0);
    assert_eq!(v["powers"]["p_b"], 1.2);
    assert_eq!(v["powers"]["p_r"], 0.75);
}

#[test]
fn output_directory_and_explicit_path() {
    let dir = tempfile::tempdir().unwrap();
    let o = relay_aoi(&["grid", "--preset", "quick"], Some(dir.path()));
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(dir.path().join("grid.csv")).unwrap();
    assert!(text.starts_with("kind,p_a,p_b,f_a,f_b,weighted_aoi\n"));

    let explicit = dir.path().join("nested/opt.json");
    let o = relay_aoi(&["optimize", "--format", "json", "--out", explicit.to_str().unwrap()], Some(dir.path()));
    assert!(o.status.success());
    assert!(explicit.exists());
    assert!(!dir.path().join("optimize.json").exists());

    // analyze also prints its single record.
    let o = relay_aoi(&["analyze", "--p-a", "1", "--p-b", "1.196", "--preset", "quick"], Some(dir.path()));
    assert_eq!(stdout(&o), std::fs::read_to_string(dir.path().join("analyze.csv")).unwrap());
}

#[test]
fn analyze_row_recomputes_from_its_inputs() {
    let o = relay_aoi(&["analyze", "--p-a", "1", "--p-b", "1.196", "--samples", "20000"], None);
    let (h, rows) = records(&stdout(&o));
    assert_eq!(rows.len(), 1);
    let r = &rows[0];
    let params = SystemParams::default();
    let powers = PowerProfile::new(num(&h, r, "p_a"), num(&h, r, "p_b"), num(&h, r, "p_r")).unwrap();
    let pair = asymptotic_success(&params, &powers).unwrap();
    let aoi = weighted_sum_aoi(&params, &pair).unwrap();
    close9(num(&h, r, "asym_f_a"), pair.f_a);
    close9(num(&h, r, "asym_f_b"), pair.f_b);
    close9(num(&h, r, "asym_aoi_a"), aoi.aoi_a);
    close9(num(&h, r, "asym_weighted_aoi"), aoi.weighted);
    close9(num(&h, r, "asym_weighted_aoi"), 3.6359476455180593);
    assert_eq!(column(&h, r, "asym_valid"), "true");
    let n = num(&h, r, "n_samples");
    let f = num(&h, r, "emp_f_a");
    close9(num(&h, r, "emp_ci_a"), 1.96 * (f * (1.0 - f) / n).sqrt());
}

#[test]
fn analyze_flags_low_power_point() {
    let o = relay_aoi(&["analyze", "--p-a", "0.05", "--p-b", "0.05", "--preset", "quick"], None);
    assert!(o.status.success());
    let (h, rows) = records(&stdout(&o));
    assert_eq!(column(&h, &rows[0], "asym_valid"), "false");
    assert_eq!(column(&h, &rows[0], "asym_weighted_aoi"), "infeasible");
    assert!(num(&h, &rows[0], "emp_weighted_aoi") > 0.0);
}

#[test]
fn zero_threshold_anchors() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_scenario(dir.path(), r#"{"params": {"gamma_th": 0}, "powers": {"p_a": 1, "p_b": 1.196}, "preset": "quick"}"#);
    let (h, rows) = records(&stdout(&relay_aoi(&["simulate", "--config", &cfg], None)));
    assert_eq!(column(&h, &rows[0], "sim_weighted_aoi"), "2.5");
    assert_eq!(column(&h, &rows[0], "emp_f_a"), "1");
    let (h, rows) = records(&stdout(&relay_aoi(&["analyze", "--config", &cfg], None)));
    assert_eq!(column(&h, &rows[0], "emp_f_a"), "1");
    assert_eq!(column(&h, &rows[0], "emp_weighted_aoi"), "2.5");
    assert_eq!(column(&h, &rows[0], "asym_weighted_aoi"), "2.5");
}

#[test]
fn grid_rows_recompute_and_footer_is_minimum() {
    let o = relay_aoi(&["grid"], None);
    let (h, rows) = records(&stdout(&o));
    let params = SystemParams::default();
    let (points, footer) = rows.split_at(rows.len() - 1);
    for r in points.iter().step_by(97) {
        let (a, b) = (num(&h, r, "p_a"), num(&h, r, "p_b"));
        let pair = asymptotic_success(&params, &PowerProfile::new(a, b, params.peak_r).unwrap()).unwrap();
        close9(num(&h, r, "f_a"), pair.f_a);
        close9(num(&h, r, "f_b"), pair.f_b);
        close9(num(&h, r, "weighted_aoi"), 0.5 + objective_f(&params, a, b).value().unwrap());
    }
    let best = &footer[0];
    assert_eq!(best[0], "argmin");
    assert_eq!(num(&h, best, "p_a"), 1.0);
    assert!((num(&h, best, "p_b") - 1.196).abs() <= 0.01);
    assert!((num(&h, best, "weighted_aoi") - 3.636).abs() <= 1e-3);
    let min = points.iter().map(|r| num(&h, r, "weighted_aoi")).fold(f64::INFINITY, f64::min);
    assert_eq!(min, num(&h, best, "weighted_aoi"));
    // Low powers sit outside the F > 0.5 region.
    assert!(points.iter().all(|r| !(num(&h, r, "p_a") <= 0.4 && num(&h, r, "p_b") <= 0.4)));
}

#[test]
fn sweep_csv_layout() {
    let o = relay_aoi(&["sweep", "--preset", "quick", "--samples", "2000", "--slots", "2000"], None);
    let text = stdout(&o);
    assert!(text.starts_with("# "));
    let (h, rows) = records(&text);
    assert_eq!(rows.len(), 51);
    let params = SystemParams::default();
    for r in &rows {
        let powers = PowerProfile::new(num(&h, r, "p_a"), num(&h, r, "p_b"), params.peak_r).unwrap();
        let pair = asymptotic_success(&params, &powers).unwrap();
        close9(num(&h, r, "asym_f_b"), pair.f_b);
        close9(num(&h, r, "asym_weighted_aoi"), weighted_sum_aoi(&params, &pair).unwrap().weighted);
    }
}

/// Every field named in the published schema is accepted by the loader.
#[test]
fn schema_fields_are_accepted() {
    let schema: serde_json::Value =
        serde_json::from_str(include_str!("../docs/scenario.schema.json")).unwrap();
    let sample = serde_json::json!({
        "preset": "quick",
        "params": {
            "sigma2_a": 1e-3, "sigma2_b": 1e-3, "sigma2_r": 1e-3, "gamma_th_db": 20,
            "weight_a": 0.5, "weight_b": 0.5, "peak_a": 1, "peak_b": 2, "peak_r": 0.75
        },
        "powers": { "p_a": 1, "p_b": 1.2, "p_r": 0.75 },
        "sweep": { "axis": "p_b", "fixed": 1, "lower": 0.5, "upper": 2, "step": 0.1 },
        "grid": { "step": 0.01 },
        "simulation": { "n_slots": 1000, "n_samples": 1000, "seed": 4 },
        "optimizer": { "min_success": 0.1, "oracle_step": 0.01 },
        "output": { "path": "out.csv", "format": "csv" }
    });
    let props = |v: &serde_json::Value| -> Vec<String> {
        let mut keys: Vec<String> = v.as_object().unwrap().keys().cloned().collect();
        keys.sort();
        keys
    };
    let schema_props = &schema["properties"];
    assert_eq!(props(schema_props), props(&sample));
    for (section, value) in sample.as_object().unwrap() {
        if value.is_object() {
            let mut keys = props(&schema_props[section]["properties"]);
            if section == "params" {
                keys.retain(|k| k != "gamma_th");
                keys.sort();
            }
            assert_eq!(keys, props(value), "{section}");
        }
    }
    let dir = tempfile::tempdir().unwrap();
    let exclusive = ["powers", "sweep", "grid"];
    for keep in exclusive {
        let mut variant = sample.clone();
        let obj = variant.as_object_mut().unwrap();
        obj.retain(|k, _| k == keep || !exclusive.contains(&k.as_str()));
        let cfg = write_scenario(dir.path(), &variant.to_string());
        let o = relay_aoi(&["grid", "--config", &cfg, "--print-config"], None);
        assert!(o.status.success(), "{keep}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let cfg = write_scenario(dir.path(), &sample.to_string());
    assert_eq!(relay_aoi(&["grid", "--config", &cfg], None).status.code(), Some(1));
}
