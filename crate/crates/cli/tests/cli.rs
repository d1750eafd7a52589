use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn eprsim(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eprsim"))
        .args(args)
        .current_dir(dir)
        .env_remove("EPRSIM_WORKERS")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn config(name: &str) -> String {
    configs().join(name).display().to_string()
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.display().to_string()
}

#[test]
fn ideal_chsh_summary() {
    let tmp = tempfile::tempdir().unwrap();
    let o = eprsim(
        &["run", &config("chsh_ideal.json"), "--out", "out"],
        tmp.path(),
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).trim(), "S=2.828427 (analytic)");
}

#[test]
fn analytic_runs_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config("chsh_calibrated.json");
    for out in ["a", "b"] {
        let o = eprsim(&["run", &cfg, "--shots", "0", "--out", out], tmp.path());
        assert_eq!(code(&o), 0);
        assert_eq!(stdout(&o).trim(), "S=2.450000 (analytic)");
    }
    for ext in ["json", "csv"] {
        let name = format!("chsh_calibrated.{ext}");
        let a = std::fs::read_to_string(tmp.path().join("a").join(&name)).unwrap();
        let b = std::fs::read_to_string(tmp.path().join("b").join(&name)).unwrap();
        assert_eq!(a, b, "{name}");
    }
}

#[test]
fn sampled_fringes_independent_of_workers() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config("fringes_ideal.json");
    for (workers, out) in [("1", "w1"), ("8", "w8")] {
        let o = eprsim(
            &[
                "run",
                &cfg,
                "--seed",
                "7",
                "--shots",
                "20000",
                "--workers",
                workers,
                "--out",
                out,
            ],
            tmp.path(),
        );
        assert_eq!(code(&o), 0);
    }
    for ext in ["json", "csv"] {
        let name = format!("fringes_ideal.{ext}");
        let a = std::fs::read_to_string(tmp.path().join("w1").join(&name)).unwrap();
        let b = std::fs::read_to_string(tmp.path().join("w8").join(&name)).unwrap();
        assert_eq!(a, b, "{name}");
    }
}

#[test]
fn workers_env_fallback_does_not_change_output() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config("wigner.json");
    let run = |workers: &str, out: &str| {
        Command::new(env!("CARGO_BIN_EXE_eprsim"))
            .args(["run", &cfg, "--shots", "30000", "--out", out])
            .env("EPRSIM_WORKERS", workers)
            .current_dir(tmp.path())
            .output()
            .unwrap()
    };
    assert_eq!(code(&run("1", "e1")), 0);
    assert_eq!(code(&run("6", "e6")), 0);
    assert_eq!(
        std::fs::read_to_string(tmp.path().join("e1/wigner.csv")).unwrap(),
        std::fs::read_to_string(tmp.path().join("e6/wigner.csv")).unwrap()
    );
}

#[test]
fn outputs_embed_version_and_resolved_config() {
    let tmp = tempfile::tempdir().unwrap();
    let o = eprsim(
        &["run", &config("ghz.json"), "--out", "o", "--workers", "3"],
        tmp.path(),
    );
    assert_eq!(code(&o), 0);
    let doc: Value =
        serde_json::from_slice(&std::fs::read(tmp.path().join("o/ghz.json")).unwrap()).unwrap();
    assert_eq!(doc["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(doc["config"]["experiment"], "ghz");
    assert_eq!(doc["config"]["params"]["labels"][1], "XXXX");
    assert!(doc["config"].get("workers").is_none());
    assert_eq!(doc["results"][0]["value"], 1.0);
    assert_eq!(doc["results"][1]["value"], -1.0);

    let csv = std::fs::read_to_string(tmp.path().join("o/ghz.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        format!("# eprsim {}", env!("CARGO_PKG_VERSION"))
    );
    let echoed: Value =
        serde_json::from_str(lines.next().unwrap().strip_prefix("# config: ").unwrap()).unwrap();
    assert_eq!(echoed, doc["config"]);
    assert!(lines.next().unwrap().starts_with("# summary: "));
    assert_eq!(
        lines.next().unwrap(),
        "estimator,value,std_error,shots,seed,settings"
    );
}

#[test]
fn defaults_are_filled_without_config() {
    let tmp = tempfile::tempdir().unwrap();
    let o = eprsim(&["epr", "--out", "o", "--format", "json"], tmp.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).starts_with("dx*dp=0.187278 hbar < hbar/2"));
    assert!(tmp.path().join("o/epr.json").exists());
    assert!(!tmp.path().join("o/epr.csv").exists());
}

#[test]
fn config_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let typo = write_config(
        tmp.path(),
        "typo.json",
        r#"{"experiment": "chsh", "shot": 10}"#,
    );
    let noise_typo = write_config(
        tmp.path(),
        "noise.json",
        r#"{"experiment": "chsh", "noise": {"singlet_fidelty": 0.5}}"#,
    );
    let param_typo = write_config(
        tmp.path(),
        "param.json",
        r#"{"experiment": "wigner", "params": {"d": 1.0}}"#,
    );
    let no_seed = write_config(
        tmp.path(),
        "seed.json",
        r#"{"experiment": "chsh", "shots": 100}"#,
    );
    let bad_fid = write_config(
        tmp.path(),
        "fid.json",
        r#"{"experiment": "chsh", "noise": {"detection_fidelity": 1.5}}"#,
    );
    for cfg in [&typo, &noise_typo, &param_typo, &no_seed, &bad_fid] {
        let o = eprsim(&["run", cfg, "--out", "o"], tmp.path());
        assert_eq!(code(&o), 2, "{cfg}: {}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(code(&eprsim(&["run", "missing.json"], tmp.path())), 2);
    assert_eq!(
        code(&eprsim(
            &["chsh", "--shots", "10", "--out", "o"],
            tmp.path()
        )),
        2
    );
    assert_eq!(
        code(&eprsim(
            &["ghz", "--config", &no_seed, "--out", "o"],
            tmp.path()
        )),
        2
    );
    assert!(!tmp.path().join("o").exists());
}

#[test]
fn non_psd_covariance_exits_3() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "bad.json",
        r#"{"experiment": "epr", "params": {"state": {
            "mean": [0, 0, 0, 0],
            "cov": [[1, 0, 2, 0], [0, 1, 0, 0], [2, 0, 1, 0], [0, 0, 0, 1]]}}}"#,
    );
    let o = eprsim(&["run", &cfg, "--out", "o"], tmp.path());
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn gates_verify_reports_and_fails_on_broken_scheme() {
    let tmp = tempfile::tempdir().unwrap();
    let ok = eprsim(
        &["run", &config("gates_verify.json"), "--out", "o"],
        tmp.path(),
    );
    assert_eq!(code(&ok), 0);
    assert!(stdout(&ok).contains(": ok"));
    let doc: Value =
        serde_json::from_slice(&std::fs::read(tmp.path().join("o/gates_verify.json")).unwrap())
            .unwrap();
    let rows = doc["results"].as_array().unwrap();
    assert_eq!(rows.len(), 2 * 101 * 3);
    for r in rows {
        let d = r["value"].as_f64().unwrap();
        assert!(d < 1e-10);
        if r["settings"]["theta"] == 0.0 {
            // Only rounding in the echo pulses remains at θ = 0.
            assert!(d <= 1e-15, "{r}");
            if r["settings"]["scheme"] == "scheme1" && r["settings"]["role"] == "target" {
                assert_eq!(d, 0.0);
            }
        }
    }

    let broken = eprsim(
        &["run", &config("gates_verify_broken.json"), "--out", "o"],
        tmp.path(),
    );
    assert_eq!(code(&broken), 3);
    assert!(tmp.path().join("o/gates_verify_broken.csv").exists());
}

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../seqlang/tests/golden")
        .join(name)
}

#[test]
fn lint_and_compile_seq_files() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::copy(
        golden("w003_open_ramp.seq"),
        tmp.path().join("w003_open_ramp.seq"),
    )
    .unwrap();
    let o = eprsim(&["lint", "w003_open_ramp.seq", "--out", "o"], tmp.path());
    assert_eq!(code(&o), 0);
    let expected = std::fs::read_to_string(golden("w003_open_ramp.diag")).unwrap();
    assert!(stdout(&o).starts_with(&expected), "{}", stdout(&o));

    std::fs::write(
        tmp.path().join("gate.seq"),
        "sites 2\npulse global x -180deg\nramp on @[0] shift 10kHz dur 100us\npulse addressed x 45deg @[0]\n\
         ramp off @[0] shift 10kHz dur 100us\npulse global x 180deg\nramp on @[0] shift 10kHz dur 100us\n\
         pulse addressed x 45deg @[0]\nramp off @[0] shift 10kHz dur 100us\n",
    )
    .unwrap();
    let o = eprsim(&["compile", "gate.seq", "--out", "o"], tmp.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).starts_with("compiled 8 events over 2 sites"));
    let doc: Value =
        serde_json::from_slice(&std::fs::read(tmp.path().join("o/compile.json")).unwrap()).unwrap();
    assert_eq!(
        doc["details"]["schedule"]["events"]
            .as_array()
            .unwrap()
            .len(),
        8
    );

    std::fs::write(
        tmp.path().join("bad.seq"),
        "sites 2\npulse global q 90deg\n",
    )
    .unwrap();
    let o = eprsim(&["compile", "bad.seq"], tmp.path());
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("bad.seq:2:14: error[E002]"));
}
