use std::path::PathBuf;
use std::process::Command;

use proptest::prelude::*;
use serde_json::{json, Value};

use qwnlab_cli::record::Value as RecordValue;
use qwnlab_cli::{run, CliError, Experiment, ExperimentConfig, Format, RunOptions};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qwnlab"))
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("qwnlab-cli-tests-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn config(v: Value) -> ExperimentConfig {
    ExperimentConfig::parse_json(&v.to_string()).unwrap()
}

fn real(rec: &qwnlab_cli::ResultRecord, name: &str) -> f64 {
    match rec.get_output(name) {
        Some(RecordValue::Real(x)) => *x,
        other => panic!("{name}: {other:?}"),
    }
}

#[test]
fn diagonalize_record() {
    let cfg = config(json!({"experiment": "diagonalize", "parameters": {"omega": 1.0, "g": 0.4}}));
    let rec = run(Experiment::Diagonalize, &cfg, &RunOptions::default()).unwrap();
    assert!((real(&rec, "Omega") - 0.6).abs() < 1e-14);
    assert!((real(&rec, "kappa") + 0.2).abs() < 1e-14);
}

#[test]
fn diagonalize_threshold_exits_2() {
    let path = scratch(
        "bad.json",
        r#"{"experiment":"diagonalize","parameters":{"omega":1.0,"g":0.5}}"#,
    );
    let out = bin()
        .arg("diagonalize")
        .arg("--config")
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("|g/omega|") && msg.contains("< 1/2"), "{msg}");
}

#[test]
fn compare_oracle_agrees_after_alignment() {
    let cfg = config(
        json!({"parameters": {"Omega": 2.0, "f1": 1.0, "f2": 1.0, "T": 1.0, "N": 400, "d": 25}}),
    );
    let rec = run(Experiment::CompareOracle, &cfg, &RunOptions::default()).unwrap();
    assert_eq!(rec.status, "ok");
    assert!(real(&rec, "brute_vs_oracle_rel") <= 1e-8);
    assert!(real(&rec, "aligned_discrepancy") <= 1e-8);
    assert_eq!(
        rec.get_output("confirmed_convention"),
        Some(&RecordValue::Text("derived".into()))
    );
    assert!(rec.diagnostics.iter().any(|(k, _)| k == "convention"));
}

#[test]
fn correlator_reports_convention() {
    let cfg = config(
        json!({"parameters": {"Omega": 2.0, "f1": 1.0, "f2": [1.0, 0.0], "T": 1.0, "N": 10}}),
    );
    for (conv, sign) in [("paper", 1.0), ("derived", -1.0)] {
        let opts = RunOptions {
            convention: conv.parse().unwrap(),
            ..RunOptions::default()
        };
        let rec = run(Experiment::Correlator, &cfg, &opts).unwrap();
        let Some(RecordValue::Complex(z)) = rec.get_output("correlator") else {
            panic!()
        };
        assert!((z.im - sign * 1f64.sin()).abs() < 1e-13);
        assert_eq!(
            rec.diagnostics
                .iter()
                .find(|(k, _)| k == "convention")
                .unwrap()
                .1,
            RecordValue::Text(conv.into())
        );
    }
}

#[test]
fn critical_sweep_csv() {
    let path = scratch(
        "crit.json",
        r#"{"parameters":{"f":1.0,"epsilons":[1.0,0.5,0.25]}}"#,
    );
    let out = bin()
        .args(["critical", "--format", "csv", "--config"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "epsilon,Omega,error_vs_2f");
    assert_eq!(lines.len(), 4);
    let omega: f64 = lines[1].split(',').nth(1).unwrap().parse().unwrap();
    assert!((omega - 3f64.sqrt()).abs() < 1e-14);
}

#[test]
fn empty_sweep_is_header_only() {
    let cfg = config(json!({"parameters": {"epsilons": []}}));
    let rec = run(Experiment::Critical, &cfg, &RunOptions::default()).unwrap();
    assert_eq!(rec.render(Format::Csv), "epsilon,Omega,error_vs_2f\n");
}

#[test]
fn ito_associator_json() {
    let path = scratch(
        "ito.json",
        r#"{"experiment":"ito","parameters":{"op":"associator","x":"dB(0,2)","y":"dB(2,0)","z":"dB(1,1)"}}"#,
    );
    let out_path = path.with_file_name("ito-out.json");
    let out = bin()
        .arg("ito")
        .arg("--config")
        .arg(&path)
        .arg("--out")
        .arg(&out_path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(v["outputs"]["result"], json!("4·dB(1,1)"));
}

#[test]
fn json_round_trip_is_bit_exact() {
    let cfg = config(
        json!({"parameters": {"Omega": 2.0, "f1": [0.3, 0.1], "f2": 1.0, "T": 1.0, "N": 50, "d": 20}}),
    );
    let rec = run(Experiment::CompareOracle, &cfg, &RunOptions::default()).unwrap();
    let parsed: Value = serde_json::from_str(&rec.render(Format::Json)).unwrap();
    for (name, value) in &rec.outputs {
        match value {
            RecordValue::Complex(z) => {
                assert_eq!(
                    parsed["outputs"][name]["re"].as_f64().unwrap().to_bits(),
                    z.re.to_bits()
                );
                assert_eq!(
                    parsed["outputs"][name]["im"].as_f64().unwrap().to_bits(),
                    z.im.to_bits()
                );
            }
            RecordValue::Real(x) => assert_eq!(
                parsed["outputs"][name].as_f64().unwrap().to_bits(),
                x.to_bits()
            ),
            _ => {}
        }
    }
}

#[test]
fn csv_round_trip() {
    let cfg = config(json!({"parameters": {"lambdas": [0.5, 0.3]}}));
    let rec = run(Experiment::Limit, &cfg, &RunOptions::default()).unwrap();
    let csv = rec.render(Format::Csv);
    let rows: Vec<Vec<f64>> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    let qwnlab_cli::record::ColumnData::Complex(smeared) = &rec.columns[1].data else {
        panic!()
    };
    for (row, z) in rows.iter().zip(smeared) {
        assert!((row[1] - z.re).abs() <= 1e-15 * z.re.abs());
        assert!((row[2] - z.im).abs() <= 1e-15 * z.im.abs().max(1e-300));
    }
}

#[test]
fn output_is_byte_stable_and_thread_independent() {
    let path = scratch(
        "cmp.json",
        r#"{"parameters":{"Omega":1.5,"f1":1.0,"f2":[0.5,0.5],"T":1.0,"N":200,"d":20}}"#,
    );
    let run_with = |threads: Option<&str>| {
        let mut cmd = bin();
        cmd.arg("compare-oracle").arg("--config").arg(&path);
        if let Some(t) = threads {
            cmd.env("QWNLAB_THREADS", t);
        }
        cmd.output().unwrap().stdout
    };
    let a = run_with(None);
    assert_eq!(a, run_with(None));
    assert_eq!(a, run_with(Some("1")));
}

#[test]
fn exit_codes() {
    let cases: [(&str, &str, &[&str]); 8] = [
        (
            "diagonalize",
            r#"{"parameters":{"omega":1.0,"g":0.4},"extra":1}"#,
            &[],
        ),
        (
            "diagonalize",
            r#"{"parameters":{"omega":1.0,"g":0.4,"h":1}}"#,
            &[],
        ),
        ("diagonalize", "not json", &[]),
        ("critical", r#"{"parameters":{"epsilons":[2.0]}}"#, &[]),
        ("spectrum", r#"{"experiment":"ito","parameters":{}}"#, &[]),
        (
            "spectrum",
            r#"{"parameters":{"omega":1.0,"g":0.4,"d":30,"m":5}}"#,
            &[],
        ),
        (
            "correlator",
            r#"{"parameters":{"Omega":2.0,"f1":1.0,"f2":1.0,"T":1.0,"N":4,"c":0.3}}"#,
            &[],
        ),
        (
            "diagonalize",
            r#"{"parameters":{"omega":1.0,"g":0.4}}"#,
            &["--format", "xml"],
        ),
    ];
    for (i, (exp, text, extra)) in cases.iter().enumerate() {
        let path = scratch(&format!("bad{i}.json"), text);
        let out = bin()
            .arg(exp)
            .arg("--config")
            .arg(&path)
            .args(*extra)
            .output()
            .unwrap();
        assert_eq!(
            out.status.code(),
            Some(2),
            "case {i}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }

    let good = scratch("good.json", r#"{"parameters":{"omega":1.0,"g":0.4}}"#);
    let out = bin()
        .arg("diagonalize")
        .arg("--config")
        .arg(&good)
        .env("QWNLAB_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    let out = bin()
        .arg("diagonalize")
        .arg("--config")
        .arg(&good)
        .args(["--out", "/nonexistent-dir/qwnlab/out.json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));

    let out = bin()
        .arg("diagonalize")
        .arg("--config")
        .arg(&good)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn injected_unknown_keys_are_config_errors(key in "[a-z_]{1,12}", exp_idx in 0usize..4) {
        let (exp, mut params) = match exp_idx {
            0 => (Experiment::Diagonalize, json!({"omega": 1.0, "g": 0.1})),
            1 => (Experiment::Critical, json!({"epsilons": [0.5]})),
            2 => (Experiment::Ito, json!({"op": "table"})),
            _ => (Experiment::Spectrum, json!({"omega": 1.0, "g": 0.1, "d": 30, "m": 2})),
        };
        let known = ["omega", "g", "horizon", "delta", "f", "epsilons", "op", "x", "y", "z", "d", "m"];
        prop_assume!(!known.contains(&key.as_str()));
        params[&key] = json!(1.0);
        let err = run(exp, &config(json!({"parameters": params})), &RunOptions::default()).unwrap_err();
        prop_assert!(matches!(err, CliError::Config(_)));
        prop_assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn threshold_violations_are_config_errors(w in 0.1..10.0f64, r in 0.5..3.0f64) {
        let cfg = config(json!({"parameters": {"omega": w, "g": r * w}}));
        let err = run(Experiment::Diagonalize, &cfg, &RunOptions::default()).unwrap_err();
        prop_assert_eq!(err.exit_code(), 2);
    }
}
