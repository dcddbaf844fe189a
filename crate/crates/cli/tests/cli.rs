use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bergman(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bergman"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn manifest(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn chebyshev_ratio_value() {
    let o = bergman(&[
        "ratio",
        "--model",
        "jacobi:a=0.5,b=0",
        "--n",
        "200",
        "--z",
        "2+0i",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let re: f64 = text.trim().split('+').next().unwrap().parse().unwrap();
    assert!((re - (4.0 - 2.0 * 3f64.sqrt())).abs() < 1e-8, "{text}");
}

#[test]
fn invalid_coefficient_exits_with_config_code() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    fs::write(
        &cfg,
        r#"{"operation":"ratio","model":{"model":"verblunsky","kind":"explicit","params":{"values":[0.1,0.2,1.5]}},"n":2,"z":"2"}"#,
    )
    .unwrap();
    let o = bergman(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("index 2"), "{}", stderr(&o));
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    fs::write(
        &cfg,
        r#"{"operation":"zeros","model":"jacobi:a=0.5","n":3,"colour":"red"}"#,
    )
    .unwrap();
    let o = bergman(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("colour"));
}

#[test]
fn numeric_and_io_failures_have_their_own_codes() {
    let o = bergman(&["ratio", "--model", "jacobi:a=0.5", "--n", "1", "--z", "0"]);
    assert_eq!(o.status.code(), Some(3));
    let o = bergman(&[
        "build-matrix",
        "--model",
        "jacobi:a=0.5",
        "--size",
        "3",
        "--out",
        "/nonexistent-dir/m.csv",
    ]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn random_requires_a_seed() {
    let o = bergman(&[
        "random",
        "--model",
        "verblunsky:kind=iid,atoms=0.3;-0.3",
        "--model-b",
        "verblunsky:value=0.3",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("seed"));
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    fs::write(
        &cfg,
        r#"{"operation":"ratio","model":"verblunsky","n":10,"z":[0,2]}"#,
    )
    .unwrap();
    let o = bergman(&["ratio", "--config", cfg.to_str().unwrap(), "--z", "4"]);
    assert_eq!(stdout(&o).trim(), "0.25+0i");
    let o = bergman(&["zeros", "--config", cfg.to_str().unwrap()]);
    assert_eq!(
        o.status.code(),
        Some(2),
        "operation mismatch must be rejected"
    );
}

#[test]
fn degenerate_example_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("deg.csv");
    let o = bergman(&[
        "compare",
        "--paper-example",
        "degenerate",
        "--n",
        "500",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let m = manifest(&dir.path().join("deg.manifest.json"));
    let s = &m["summary"];
    assert!(s["ratio_mu_abs"].as_f64().unwrap() <= 0.05);
    assert!(s["ratio_nu_abs"].as_f64().unwrap() <= 0.05);
    assert!((s["diagonal_gap_tail"].as_f64().unwrap() - 2.0 * 0.5f64.sin()).abs() <= 1e-2);
    assert_eq!(m["config_sha256"].as_str().unwrap().len(), 64);
    assert_eq!(m["defaults"]["points"], 64);
    assert_eq!(m["defaults"]["epsilon"], 1e-3);
    assert!(fs::read_to_string(&out)
        .unwrap()
        .starts_with("quantity,j,n,re,im,bound\n"));
}

#[test]
fn identical_configs_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    fs::write(
        &cfg,
        r#"{"operation":"random","model":"verblunsky:kind=iid,atoms=0.3;-0.3","model_b":"verblunsky:value=0.3","seed":7,"n":20,"k":20,"horizon":3000,"runs":2}"#,
    )
    .unwrap();
    let mut outputs = Vec::new();
    for name in ["a", "b"] {
        let out = dir.path().join(format!("{name}.csv"));
        let man = dir.path().join(format!("{name}.json"));
        let o = bergman(&[
            "run",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--manifest",
            man.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let mut m = manifest(&man);
        m["outputs"] = Value::Null;
        outputs.push((fs::read(&out).unwrap(), m));
    }
    assert_eq!(outputs[0].0, outputs[1].0);
    assert_eq!(outputs[0].1, outputs[1].1);
    assert!(outputs[0].1["resolved"]["radius"].as_f64().unwrap() > 0.0);
}

#[test]
fn every_subcommand_runs() {
    let cases: &[&[&str]] = &[
        &[
            "build-matrix",
            "--model",
            "verblunsky:kind=reciprocal",
            "--size",
            "4",
        ],
        &[
            "ratio",
            "--model",
            "discrete:kind=roots_of_unity,count=32",
            "--n",
            "5",
            "--points",
            "8",
        ],
        &[
            "laurent",
            "--model",
            "jacobi:a=0.5",
            "--n",
            "10",
            "--terms",
            "6",
        ],
        &["moments", "--model", "jacobi:a=0.5", "--n-grid", "3,6"],
        &[
            "zeros",
            "--model",
            "verblunsky:value=0.5",
            "--n-grid",
            "4,8",
        ],
        &[
            "right-limit",
            "--model",
            "verblunsky:kind=periodic,period=0.5;-0.3i",
            "--sub",
            "20:2:80",
        ],
        &[
            "right-limit",
            "--model",
            "verblunsky:kind=periodic,period=0.5;-0.3i",
            "--model-b",
            "verblunsky:kind=periodic,period=-0.3i;0.5",
            "--sub",
            "20:2:80",
            "--sub-b",
            "19:2:79",
            "--quantity",
            "normalized-ratio",
        ],
        &[
            "compare",
            "--model",
            "verblunsky:kind=reciprocal",
            "--model-b",
            "verblunsky",
            "--n-grid",
            "10,20",
            "--quantity",
            "cesaro-bound",
        ],
        &["compare", "--paper-example", "alexandrov", "--n", "120"],
        &[
            "compare",
            "--paper-example",
            "stripping",
            "--strip",
            "2",
            "--n",
            "100",
        ],
        &[
            "universal",
            "--family",
            "jacobi",
            "--base",
            "1,2",
            "--base-b",
            "0,1",
            "--length",
            "12",
        ],
    ];
    for args in cases {
        let o = bergman(args);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", stderr(&o));
        assert!(stdout(&o).lines().count() >= 2, "{args:?}");
    }
}

#[test]
fn universal_prefix() {
    let o = bergman(&["universal", "--base", "0.1,0.2,0.3", "--length", "8"]);
    let values: Vec<String> = stdout(&o)
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().to_string())
        .collect();
    assert_eq!(
        values,
        ["0.1", "0.1", "0.2", "0.2", "0.1", "0.1", "0.2", "0.3"]
    );
}
