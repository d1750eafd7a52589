//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure.

use eprsim_cli::config::{GatesParams, Scheme};
use eprsim_cli::output::{csv_document, json_document};
use eprsim_cli::{execute, Experiment, Report, RunConfig};
use eprsim_core::control::{scheme1_sequence, scheme2_sequence, GateParams};
use eprsim_core::measure::{
    chsh_s, fringe_grid, fringe_scan, ghz_collapse, ghz_correlations, wigner_test, CHSHSettings,
    WIGNER_ANGLES,
};
use eprsim_core::noise::{t2_estimate, FieldNoiseSpec, NoiseConfig};
use eprsim_core::qcore::{pauli_string, Axis, CVector, PureState, QuantumState, C64};
use eprsim_core::shots::{substream, ShotContext};
use eprsim_core::source::{ghz_ket, path_ket, singlet_ket};
use eprsim_seqlang::{check, format, from_schedule, lint, lower, parse, render_all};
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use rand::Rng;
use rand_distr::StandardNormal;
use serde_json::json;
use std::f64::consts::{PI, SQRT_2, TAU};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::Instant;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)*) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($fmt)*));
        }
    };
}

fn workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn manifest() -> &'static Path {
    Path::new(env!("CARGO_MANIFEST_DIR"))
}

fn shipped(name: &str) -> RunConfig {
    RunConfig::load(&manifest().join("configs").join(name)).expect("shipped config loads")
}

fn run(cfg: &RunConfig, workers: usize) -> Result<Report, String> {
    execute(cfg, workers).map_err(|e| e.to_string())
}

fn value(report: &Report, estimator: &str) -> f64 {
    report
        .results
        .iter()
        .find(|r| r.estimator == estimator)
        .unwrap_or_else(|| panic!("no {estimator} result"))
        .value
}

fn random_ket(rng: &mut impl Rng, n_qubits: usize) -> PureState {
    let amps = CVector::from_fn(1 << n_qubits, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let norm = amps.norm();
    PureState::new(amps / C64::new(norm, 0.0)).unwrap()
}

fn random_settings(rng: &mut impl Rng) -> CHSHSettings {
    CHSHSettings {
        theta_l: rng.random_range(0.0..TAU),
        theta_l_prime: rng.random_range(0.0..TAU),
        theta_r: rng.random_range(0.0..TAU),
        theta_r_prime: rng.random_range(0.0..TAU),
    }
}

fn chsh_ideal() -> Outcome {
    let ctx = ShotContext::new(1, workers());
    let settings = CHSHSettings::default();
    let analytic = chsh_s(&settings, &singlet_ket(), 0, None, &ctx).map_err(|e| e.to_string())?;
    let err = (analytic.value - 2.0 * SQRT_2).abs();
    ensure!(
        err <= 1e-12,
        "analytic S = {} (|ΔS| = {err:e})",
        analytic.value
    );
    let sampled =
        chsh_s(&settings, &singlet_ket(), 1_000_000, None, &ctx).map_err(|e| e.to_string())?;
    let dev = (sampled.value - 2.0 * SQRT_2).abs();
    ensure!(
        dev <= 0.01,
        "sampled S = {} deviates by {dev}",
        sampled.value
    );
    Ok(format!(
        "analytic S = {:.15} (|ΔS| = {err:.1e}); sampled S = {:.5} ± {:.5} at 1e6 shots",
        analytic.value, sampled.value, sampled.std_error
    ))
}

fn chsh_calibrated() -> Outcome {
    let mut cfg = shipped("chsh_calibrated.json");
    ensure!(
        cfg.shots == 1_000_000,
        "shipped config runs {} shots",
        cfg.shots
    );
    let sampled = value(&run(&cfg, workers())?, "chsh_s");
    cfg.shots = 0;
    let report = run(&cfg, workers())?;
    let analytic = value(&report, "chsh_s");
    let predicted = value(&report, "chsh_predicted_s");
    ensure!(
        (predicted - 2.45).abs() <= 0.005,
        "predicted S = {predicted}"
    );
    ensure!((analytic - 2.45).abs() <= 0.005, "analytic S = {analytic}");
    ensure!((sampled - 2.45).abs() <= 0.02, "sampled S = {sampled}");
    Ok(format!(
        "predicted S = {predicted:.6}, analytic S = {analytic:.6}, sampled S = {sampled:.5} at 1e6 shots"
    ))
}

fn chsh_bounds() -> Outcome {
    let ctx = ShotContext::new(0, 1);
    let mut rng = substream(303, 0, 0);
    let s = |state: &PureState, settings: &CHSHSettings| {
        chsh_s(settings, state, 0, None, &ctx)
            .map(|r| r.value)
            .map_err(|e| e.to_string())
    };
    let mut max_product: f64 = 0.0;
    let mut max_entangled: f64 = 0.0;
    for _ in 0..1000 {
        let product = random_ket(&mut rng, 1)
            .tensor(&random_ket(&mut rng, 1))
            .map_err(|e| e.to_string())?;
        let entangled = random_ket(&mut rng, 2);
        for settings in [CHSHSettings::default(), random_settings(&mut rng)] {
            max_product = max_product.max(s(&product, &settings)?);
            max_entangled = max_entangled.max(s(&entangled, &settings)?);
        }
    }
    ensure!(
        max_product <= 2.0 + 1e-9,
        "product state reached S = {max_product}"
    );
    ensure!(
        max_entangled <= 2.0 * SQRT_2 + 1e-9,
        "entangled state reached S = {max_entangled}"
    );
    Ok(format!(
        "max S over 1000 product states = {max_product:.6}, over 1000 entangled states = {max_entangled:.6}"
    ))
}

fn gate_identities() -> Outcome {
    let mut rng = substream(404, 0, 0);
    let thetas: Vec<f64> = (0..100).map(|_| rng.random_range(-TAU..=TAU)).collect();
    let mut cfg = RunConfig::new(Experiment::GatesVerify);
    let params = GatesParams {
        thetas: Some(thetas),
        targets: vec![1],
        static_shift: 412.0,
        ..GatesParams::default()
    };
    cfg.params = serde_json::to_value(&params).unwrap();
    let report = run(&cfg, 1)?;
    ensure!(
        report.results.len() == 100 * 2 * 3,
        "{} rows",
        report.results.len()
    );
    let worst = |role: &str| {
        report
            .results
            .iter()
            .filter(|r| r.settings["role"] == role)
            .map(|r| r.value)
            .fold(0.0, f64::max)
    };
    let (target, spectator) = (worst("target"), worst("non_target"));
    ensure!(report.failure.is_none(), "{report:?}");
    ensure!(
        target <= 1e-10 && spectator <= 1e-10,
        "target {target:e}, non-target {spectator:e}"
    );

    cfg.params = json!({ "schemes": [Scheme::Scheme2Literal] });
    let broken = run(&cfg, 1)?;
    ensure!(
        broken.failure.is_some(),
        "sign-broken scheme was not rejected"
    );
    Ok(format!(
        "both schemes, 100 θ: max target distance {target:.1e}, max non-target distance {spectator:.1e}; sign-broken control rejected"
    ))
}

fn fringes() -> Outcome {
    let ctx = ShotContext::new(0, 1);
    let scan = fringe_scan(&fringe_grid(9), &path_ket(), 0, &NoiseConfig::ideal(), &ctx)
        .map_err(|e| e.to_string())?;
    ensure!(scan.points.len() == 81, "{} grid points", scan.points.len());
    let mut worst: f64 = 0.0;
    for p in &scan.points {
        let c = p.phi_l.cos() * p.phi_r.cos();
        worst = worst
            .max((p.p_plus - 0.5 * (1.0 + c)).abs())
            .max((p.p_minus - 0.5 * (1.0 - c)).abs());
    }
    ensure!(worst <= 1e-12, "max |ΔP±| = {worst:e}");
    let ideal = value(
        &run(&shipped("fringes_ideal.json"), workers())?,
        "fringe_visibility",
    );
    let degraded = value(
        &run(&shipped("fringes_degraded.json"), workers())?,
        "fringe_visibility",
    );
    ensure!((ideal - 1.0).abs() <= 0.01, "ideal V = {ideal}");
    ensure!((degraded - 0.8).abs() <= 0.01, "degraded V = {degraded}");
    Ok(format!(
        "9×9 grid max |ΔP±| = {worst:.1e}; fitted V = {ideal:.4} (ideal), {degraded:.4} (degraded)"
    ))
}

fn epr() -> Outcome {
    let mut cfg = shipped("epr.json");
    ensure!(
        cfg.shots == 100_000,
        "shipped config runs {} shots",
        cfg.shots
    );
    let sampled = value(&run(&cfg, workers())?, "epr_product");
    cfg.shots = 0;
    let analytic = value(&run(&cfg, workers())?, "epr_product");
    let oracle = 0.02 * TAU / 0.671;
    ensure!(
        (sampled - 0.187).abs() <= 0.02 && sampled < 0.5,
        "sampled product = {sampled}"
    );
    ensure!(
        (analytic - oracle).abs() <= 1e-6 && analytic < 0.5,
        "analytic product = {analytic}, oracle {oracle}"
    );
    Ok(format!(
        "analytic Δx·Δp = {analytic:.7}ħ (oracle {oracle:.7}ħ); sampled = {sampled:.5}ħ at 1e5 shots; both < ħ/2"
    ))
}

fn t2_prime() -> Outcome {
    let t = |field_stability| {
        t2_estimate(&FieldNoiseSpec {
            sensitivity: 5.0,
            field_stability,
        })
        .map_err(|e| e.to_string())
    };
    let (a, b) = (t(1.0)?, t(0.1)?);
    ensure!(a == 0.2 && b == 2.0, "T2' = {a} s, {b} s");
    Ok(format!("5 Hz/mG: 1 mG → {a} s, 0.1 mG → {b} s"))
}

fn wigner() -> Outcome {
    let (a, b, c) = WIGNER_ANGLES;
    let analytic = wigner_test(a, b, c, &singlet_ket(), 0, &ShotContext::new(0, 1))
        .map_err(|e| e.to_string())?;
    let rhs = analytic.p_ac.value + analytic.p_cb.value;
    ensure!(
        (analytic.p_ab.value - 0.375).abs() <= 1e-12,
        "P++(a,b) = {}",
        analytic.p_ab.value
    );
    ensure!((rhs - 0.25).abs() <= 1e-12, "bound = {rhs}");
    let report = run(&shipped("wigner.json"), workers())?;
    let excess = report
        .results
        .iter()
        .find(|r| r.estimator == "wigner_excess")
        .expect("excess");
    ensure!(excess.shots == 100_000, "{} shots", excess.shots);
    let sigmas = excess.value / excess.std_error;
    ensure!(sigmas >= 5.0, "sampled violation only {sigmas:.2}σ");
    Ok(format!(
        "analytic P++ = {:.6} vs {rhs:.6}; sampled excess {:.4} = {sigmas:.1}σ at 1e5 shots",
        analytic.p_ab.value, excess.value
    ))
}

fn ghz() -> Outcome {
    let ctx = ShotContext::new(0, 1);
    let r = ghz_correlations(&ghz_ket(), &["ZZZZ", "XXXX"], 0, &ctx).map_err(|e| e.to_string())?;
    ensure!(r[0].value == 1.0, "<ZZZZ> = {:?}", r[0].value);
    ensure!(r[1].value == -1.0, "<XXXX> = {:?}", r[1].value);
    let mut rng = substream(909, 0, 0);
    let axes = [Axis::X, Axis::Y, Axis::Z];
    let letter = |a: Axis| a.as_str().to_ascii_uppercase();
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let qubit = rng.random_range(0..4);
        let outcome = if rng.random::<bool>() { 1 } else { -1 };
        let (p, post) =
            ghz_collapse(&ghz_ket(), qubit, Axis::Z, outcome).map_err(|e| e.to_string())?;
        ensure!((p - 0.5).abs() < 1e-12, "outcome probability {p}");
        let post = post.ok_or("impossible outcome")?;
        let picks: Vec<Axis> = (0..3).map(|_| axes[rng.random_range(0..3)]).collect();
        let joint: String = picks.iter().map(|&a| letter(a)).collect();
        let expect = |label: &str| post.expectation(&pauli_string(label).unwrap()).unwrap();
        let product: f64 = (0..3)
            .map(|q| {
                let mut label = vec!["I".to_string(); 3];
                label[q] = letter(picks[q]);
                expect(&label.concat())
            })
            .product();
        worst = worst.max((expect(&joint) - product).abs());
    }
    ensure!(
        worst <= 1e-12,
        "collapsed correlator differs from product by {worst:e}"
    );
    Ok(format!(
        "<ZZZZ> = {}, <XXXX> = {}; 100 collapse trials factorize (max deviation {worst:.1e})",
        r[0].value, r[1].value
    ))
}

fn golden_dir() -> PathBuf {
    manifest().join("../seqlang/tests/golden")
}

fn seqlang() -> Outcome {
    let config = Config {
        cases: 1000,
        failure_persistence: None,
        ..Config::default()
    };
    let mut runner =
        TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    runner
        .run(&eprsim_seqlang::strategy::program(), |p| {
            let text = format(&p);
            let reparsed = parse(&text)
                .map_err(|d| proptest::test_runner::TestCaseError::fail(format!("{d:?}")))?;
            proptest::prop_assert_eq!(&reparsed, &p);
            proptest::prop_assert_eq!(format(&reparsed), text);
            Ok(())
        })
        .map_err(|e| format!("round trip: {e}"))?;

    let params = GateParams {
        site_count: 4,
        ..GateParams::default()
    };
    let mut schedules = 0;
    for k in 0..25 {
        let theta = -2.0 * PI + 4.0 * PI * k as f64 / 24.0;
        for build in [scheme1_sequence, scheme2_sequence] {
            let schedule = build(theta, &[1, 3], &params).map_err(|e| e.to_string())?;
            let program =
                parse(&format(&from_schedule(&schedule))).map_err(|d| format!("{d:?}"))?;
            let warnings = lint(&program);
            ensure!(warnings.is_empty(), "θ = {theta}: {warnings:?}");
            ensure!(
                lower(&program).map_err(|d| format!("{d:?}"))? == schedule,
                "θ = {theta}: lowering differs"
            );
            schedules += 1;
        }
    }

    for name in ["w001_unramped", "w002_unpaired_echo", "w003_open_ramp"] {
        let file = format!("{name}.seq");
        let text = std::fs::read_to_string(golden_dir().join(&file)).map_err(|e| e.to_string())?;
        let expected = std::fs::read_to_string(golden_dir().join(format!("{name}.diag")))
            .map_err(|e| e.to_string())?;
        let (_, diagnostics) = check(&text);
        let got = render_all(&diagnostics, &file);
        ensure!(
            got == expected,
            "{name}: got {got:?}, expected {expected:?}"
        );
    }
    Ok(format!(
        "1000 generated programs round-trip; {schedules} scheme schedules lint-clean; 3 goldens byte-exact"
    ))
}

fn determinism() -> Outcome {
    let with = |name: &str, shots: u64, params: Option<serde_json::Value>| {
        let mut cfg = shipped(name);
        cfg.shots = shots;
        cfg.seed = cfg.seed.or(Some(5));
        if let Some(p) = params {
            cfg.params = p;
        }
        cfg
    };
    let cases = [
        with("chsh_calibrated.json", 60_000, None),
        with("wigner.json", 60_000, None),
        with(
            "fringes_degraded.json",
            20_000,
            Some(json!({ "grid_points": 5 })),
        ),
        with("epr.json", 60_000, None),
        with("ghz.json", 40_000, None),
    ];
    for cfg in &cases {
        let one = run(cfg, 1)?;
        let eight = run(cfg, 8)?;
        let name = cfg.experiment.name();
        ensure!(
            json_document(cfg, &one) == json_document(cfg, &eight),
            "{name}: JSON differs"
        );
        ensure!(
            csv_document(cfg, &one).map_err(|e| e.to_string())?
                == csv_document(cfg, &eight).map_err(|e| e.to_string())?,
            "{name}: CSV differs"
        );
    }
    Ok("chsh, wigner, fringes, epr, ghz: JSON and CSV byte-identical at 1 and 8 workers".into())
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("CHSH ideal", chsh_ideal),
        ("CHSH calibrated noise", chsh_calibrated),
        ("classical and Tsirelson bounds", chsh_bounds),
        ("gate identities", gate_identities),
        ("path fringes", fringes),
        ("EPR product", epr),
        ("T2' from field noise", t2_prime),
        ("Wigner inequality", wigner),
        ("GHZ correlations and collapse", ghz),
        ("seqlang round trip, lint, goldens", seqlang),
        ("worker-count determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|panic| {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.1}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
