use eprsim_core::control::{
    composite_unitary, scheme1_sequence, scheme2_sequence, site_models, GateParams,
};
use eprsim_core::measure::{chsh_s, ghz_collapse, ghz_correlations, wigner_test, CHSHSettings};
use eprsim_core::qcore::{
    measure_qubit, outcome_probability, pauli_string, rotation, Axis, CMatrix, CVector, MixedState,
    PureState, QuantumState, Unitary, C64,
};
use eprsim_core::shots::{substream, ShotContext};
use eprsim_core::source::{ghz_ket, singlet_ket, werner};
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::f64::consts::{PI, SQRT_2, TAU};

fn random_ket(rng: &mut ChaCha8Rng, n_qubits: usize) -> PureState {
    let amps = CVector::from_fn(1 << n_qubits, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let norm = amps.norm();
    PureState::new(amps / C64::new(norm, 0.0)).unwrap()
}

fn random_density(rng: &mut ChaCha8Rng, n_qubits: usize) -> MixedState {
    let d = 1 << n_qubits;
    let g = CMatrix::from_fn(d, d, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let rho = &g * g.adjoint();
    let tr = rho.trace();
    MixedState::new(rho / tr).unwrap()
}

fn random_settings(rng: &mut ChaCha8Rng) -> CHSHSettings {
    CHSHSettings {
        theta_l: rng.random_range(0.0..TAU),
        theta_l_prime: rng.random_range(0.0..TAU),
        theta_r: rng.random_range(0.0..TAU),
        theta_r_prime: rng.random_range(0.0..TAU),
    }
}

#[test]
fn tsirelson_bound_over_random_states() {
    let mut rng = substream(11, 0, 0);
    let ctx = ShotContext::new(0, 1);
    for i in 0..1000 {
        let settings = if i % 2 == 0 {
            CHSHSettings::default()
        } else {
            random_settings(&mut rng)
        };
        let s = if i % 3 == 0 {
            chsh_s(&settings, &random_density(&mut rng, 2), 0, None, &ctx)
                .unwrap()
                .value
        } else {
            chsh_s(&settings, &random_ket(&mut rng, 2), 0, None, &ctx)
                .unwrap()
                .value
        };
        assert!(s <= 2.0 * SQRT_2 + 1e-9, "S = {s}");
    }
}

#[test]
fn classical_bound_over_random_product_states() {
    let mut rng = substream(12, 0, 0);
    for i in 0..1000 {
        let state = random_ket(&mut rng, 1)
            .tensor(&random_ket(&mut rng, 1))
            .unwrap();
        let settings = random_settings(&mut rng);
        let analytic = chsh_s(&settings, &state, 0, None, &ShotContext::new(0, 1)).unwrap();
        assert!(analytic.value <= 2.0 + 1e-9);
        let sampled = chsh_s(&settings, &state, 2000, None, &ShotContext::new(i, 1)).unwrap();
        assert!(
            sampled.value <= 2.0 + 4.0 * sampled.std_error + 1e-12,
            "{sampled:?}"
        );
    }
}

#[test]
fn born_rule_sampling() {
    let mut rng = substream(13, 0, 0);
    let state = random_ket(&mut rng, 2);
    let theta = 0.83;
    let p = outcome_probability(&state, 1, theta).unwrap();
    let n = 100_000;
    let plus = (0..n)
        .filter(|_| measure_qubit(&state, 1, theta, &mut rng).unwrap().0.outcome == 1)
        .count() as f64;
    let se = (p * (1.0 - p) / n as f64).sqrt();
    assert!((plus / n as f64 - p).abs() < 4.0 * se);
}

#[test]
fn singlet_outcomes_always_opposite() {
    let mut rng = substream(14, 0, 0);
    for _ in 0..200 {
        let theta = rng.random_range(-PI..PI);
        let (first, post) = measure_qubit(&singlet_ket(), 0, theta, &mut rng).unwrap();
        let (second, _) = measure_qubit(&post, 1, theta, &mut rng).unwrap();
        assert_eq!(first.outcome, -second.outcome);
    }
}

#[test]
fn gate_identities_on_theta_grid() {
    let params = GateParams {
        site_count: 3,
        ..Default::default()
    };
    for k in 0..100 {
        let theta = -2.0 * PI + 4.0 * PI * k as f64 / 99.0;
        for build in [scheme1_sequence, scheme2_sequence] {
            let s = build(theta, &[1], &params).unwrap();
            let models = site_models(&s, 412.0);
            let target = composite_unitary(&s, 1, &models[1]).unwrap();
            assert!(target.phase_distance(&rotation(Axis::X, theta).unwrap()) < 1e-10);
            for site in [0, 2] {
                let u = composite_unitary(&s, site, &models[site]).unwrap();
                assert!(u.phase_distance(&Unitary::identity(2)) < 1e-10);
            }
        }
    }
}

#[test]
fn ghz_collapse_factorizes() {
    let mut rng = substream(15, 0, 0);
    let axes = [Axis::X, Axis::Y, Axis::Z];
    let letter = |a: Axis| a.as_str().to_ascii_uppercase();
    for _ in 0..100 {
        let qubit = rng.random_range(0..4);
        let outcome = if rng.random::<bool>() { 1 } else { -1 };
        let (p, post) = ghz_collapse(&ghz_ket(), qubit, Axis::Z, outcome).unwrap();
        assert!((p - 0.5).abs() < 1e-12);
        let post = post.unwrap();
        let picks: Vec<Axis> = (0..3).map(|_| axes[rng.random_range(0..3)]).collect();
        let joint: String = picks.iter().map(|&a| letter(a)).collect();
        let whole = post.expectation(&pauli_string(&joint).unwrap()).unwrap();
        let product: f64 = (0..3)
            .map(|q| {
                let mut label = vec!["I".to_string(); 3];
                label[q] = letter(picks[q]);
                post.expectation(&pauli_string(&label.concat()).unwrap())
                    .unwrap()
            })
            .product();
        assert!(
            (whole - product).abs() < 1e-12,
            "{joint}: {whole} vs {product}"
        );
    }
}

#[test]
fn ghz_stabilizers_exact() {
    let ctx = ShotContext::new(0, 1);
    let r = ghz_correlations(&ghz_ket(), &["ZZZZ", "XXXX"], 0, &ctx).unwrap();
    assert_eq!(r[0].value, 1.0);
    assert_eq!(r[1].value, -1.0);
}

#[test]
fn sampling_is_worker_independent() {
    let rho = werner(&singlet_ket(), 0.9).unwrap();
    let run = |workers| {
        let ctx = ShotContext::new(31337, workers);
        let chsh = chsh_s(&CHSHSettings::default(), &rho, 70_000, None, &ctx).unwrap();
        let wigner = wigner_test(0.0, 2.0, 1.0, &rho, 70_000, &ctx).unwrap();
        serde_json::to_string(&(chsh, wigner)).unwrap()
    };
    assert_eq!(run(1), run(8));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn rotations_compose(axis in prop::sample::select(vec![Axis::X, Axis::Y, Axis::Z]), a in -10.0..10.0f64, b in -10.0..10.0f64) {
        let ab = rotation(axis, a).unwrap().mul(&rotation(axis, b).unwrap()).unwrap();
        prop_assert!(ab.phase_distance(&rotation(axis, a + b).unwrap()) < 1e-10);
        prop_assert!(ab.unitarity_deviation() < 1e-12);
    }

    #[test]
    fn scheme_equivalence(theta in -2.0 * PI..2.0 * PI) {
        let params = GateParams::default();
        let one = scheme1_sequence(theta, &[0], &params).unwrap();
        let two = scheme2_sequence(theta, &[0], &params).unwrap();
        let m1 = site_models(&one, 0.0);
        let m2 = site_models(&two, 0.0);
        let u1 = composite_unitary(&one, 0, &m1[0]).unwrap();
        let u2 = composite_unitary(&two, 0, &m2[0]).unwrap();
        prop_assert!(u1.phase_distance(&u2) < 1e-10);
    }

    #[test]
    fn werner_singlet_s_linear(f in 0.0..=1.0f64) {
        let rho = werner(&singlet_ket(), f).unwrap();
        let s = chsh_s(&CHSHSettings::default(), &rho, 0, None, &ShotContext::new(0, 1)).unwrap().value;
        prop_assert!((s - 2.0 * SQRT_2 * f).abs() < 1e-12);
    }
}
