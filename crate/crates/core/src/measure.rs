//! Estimators for the entanglement witnesses, each available analytically
//! (`shots == 0`) or by seeded shot sampling.
//!
//! Readout imperfections follow [`NoiseConfig`]: the residual visibility acts
//! as a depolarizing factor on every Pauli expectation, basis misalignment
//! adds an independent Gaussian offset to each analysis angle on every shot,
//! and each atom's outcome is flipped with probability `1 − f_d`. The
//! prepared state's own fidelity is carried by the state passed in.

use nalgebra::{Matrix4, Vector4};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};

use crate::error::{Error, Result};
use crate::noise::{flip_outcome, NoiseConfig};
use crate::qcore::{
    identity, joint_distribution, kron_all, pauli, pauli_string, pauli_table, rotation, Axis,
    CMatrix, MixedState, QuantumState, Unitary, C64,
};
use crate::shots::{cumulative, sample_cdf, ShotContext};
use crate::source::{cv_index, GaussianPairState, PhysicalConstants};

mod domain {
    pub const CHSH: u64 = 0x10;
    pub const WIGNER: u64 = 0x20;
    pub const EPR_X: u64 = 0x30;
    pub const EPR_P: u64 = 0x31;
    pub const GHZ: u64 = 0x1000;
    pub const FRINGE: u64 = 0x10_0000;
}

/// Analysis angles of the two CHSH stations.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CHSHSettings {
    pub theta_l: f64,
    pub theta_l_prime: f64,
    pub theta_r: f64,
    pub theta_r_prime: f64,
}

impl Default for CHSHSettings {
    /// `(3π/4, π/4, π/2, 0)`.
    fn default() -> Self {
        CHSHSettings {
            theta_l: 3.0 * FRAC_PI_4,
            theta_l_prime: FRAC_PI_4,
            theta_r: FRAC_PI_2,
            theta_r_prime: 0.0,
        }
    }
}

impl CHSHSettings {
    pub fn validate(&self) -> Result<()> {
        for a in [
            self.theta_l,
            self.theta_l_prime,
            self.theta_r,
            self.theta_r_prime,
        ] {
            if !a.is_finite() {
                return Err(Error::NonFiniteAngle(a));
            }
        }
        Ok(())
    }

    /// The four `(θ_L, θ_R)` pairs in the order they enter S.
    pub fn pairs(&self) -> [(f64, f64); 4] {
        [
            (self.theta_l, self.theta_r),
            (self.theta_l, self.theta_r_prime),
            (self.theta_l_prime, self.theta_r),
            (self.theta_l_prime, self.theta_r_prime),
        ]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub estimator: String,
    pub value: f64,
    pub std_error: f64,
    /// Zero for analytic results.
    pub shots: u64,
    pub seed: u64,
    pub settings: BTreeMap<String, Value>,
}

impl ExperimentResult {
    fn new(estimator: &str, value: f64, std_error: f64, shots: u64, ctx: &ShotContext) -> Self {
        ExperimentResult {
            estimator: estimator.to_string(),
            value,
            std_error,
            shots,
            seed: ctx.seed,
            settings: BTreeMap::new(),
        }
    }

    fn with(mut self, key: &str, value: Value) -> Self {
        self.settings.insert(key.to_string(), value);
        self
    }

    pub fn is_analytic(&self) -> bool {
        self.shots == 0
    }
}

fn check_qubits<S: QuantumState>(state: &S, n: usize) -> Result<()> {
    if state.n_qubits() == n {
        Ok(())
    } else {
        Err(Error::QubitCount(state.n_qubits()))
    }
}

/// Bloch direction measured by `σ_θ = cosθ σ_z + sinθ σ_x`.
fn sigma_theta_direction(theta: f64) -> [f64; 3] {
    [theta.sin(), 0.0, theta.cos()]
}

/// Outcome statistics of a two-qubit state measured along a pair of Bloch
/// directions, built from its Pauli table.
struct PairModel {
    table: [[f64; 4]; 4],
    /// Multiplies every non-identity Pauli expectation.
    contrast: f64,
}

impl PairModel {
    fn new<S: QuantumState>(state: &S, residual: f64) -> Result<Self> {
        Ok(PairModel {
            table: pauli_table(state)?,
            contrast: residual,
        })
    }

    /// `⟨(n_L·σ) ⊗ (n_R·σ)⟩`.
    fn correlation(&self, nl: [f64; 3], nr: [f64; 3]) -> f64 {
        let mut e = 0.0;
        for (l, row) in nl.iter().zip(&self.table[1..]) {
            for (r, t) in nr.iter().zip(&row[1..]) {
                e += l * r * t;
            }
        }
        e
    }

    /// Probabilities of `(++, +−, −+, −−)`.
    fn probabilities(&self, nl: [f64; 3], nr: [f64; 3]) -> [f64; 4] {
        let ml: f64 = (0..3).map(|i| nl[i] * self.table[i + 1][0]).sum();
        let mr: f64 = (0..3).map(|j| nr[j] * self.table[0][j + 1]).sum();
        let c = self.correlation(nl, nr);
        let r = self.contrast;
        let mut out = [0.0; 4];
        for (k, (a, b)) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)]
            .into_iter()
            .enumerate()
        {
            out[k] = ((1.0 + r * (a * ml + b * mr + a * b * c)) / 4.0).max(0.0);
        }
        out
    }
}

/// One station's analysis direction as a function of its setting angle.
type Direction = fn(f64) -> [f64; 3];

/// Samples `shots` two-atom outcomes; returns counts of `(++, +−, −+, −−)`.
fn sample_pair(
    model: &PairModel,
    (dir_l, angle_l): (Direction, f64),
    (dir_r, angle_r): (Direction, f64),
    noise: &NoiseConfig,
    shots: u64,
    domain: u64,
    ctx: &ShotContext,
) -> Result<[u64; 4]> {
    let sigma = noise.basis_misalignment_sigma;
    let jitter = Normal::new(0.0, sigma.max(f64::MIN_POSITIVE)).expect("valid sigma");
    let fixed = cumulative(&model.probabilities(dir_l(angle_l), dir_r(angle_r)));
    let fd = noise.detection_fidelity;
    ctx.count(domain, shots, |rng: &mut ChaCha8Rng, n| {
        let mut counts = [0u64; 4];
        for _ in 0..n {
            let k = if sigma > 0.0 {
                let al = angle_l + jitter.sample(rng);
                let ar = angle_r + jitter.sample(rng);
                sample_cdf(
                    &cumulative(&model.probabilities(dir_l(al), dir_r(ar))),
                    rng.random(),
                )
            } else {
                sample_cdf(&fixed, rng.random())
            };
            let a = flip_outcome(if k < 2 { 1 } else { -1 }, fd, rng);
            let b = flip_outcome(if k % 2 == 0 { 1 } else { -1 }, fd, rng);
            counts[(usize::from(a < 0) << 1) | usize::from(b < 0)] += 1;
        }
        counts
    })
}

/// `(⟨ab⟩, its standard error)` from outcome counts.
fn correlation_from_counts(counts: &[u64; 4]) -> (f64, f64) {
    let n: u64 = counts.iter().sum();
    let nf = n as f64;
    let e = (counts[0] + counts[3]) as f64 / nf - (counts[1] + counts[2]) as f64 / nf;
    (e, ((1.0 - e * e).max(0.0) / nf).sqrt())
}

fn chsh_combine(e: [f64; 4]) -> f64 {
    (e[0] - e[1]).abs() + (e[2] + e[3]).abs()
}

/// CHSH parameter `S = |E(θL,θR) − E(θL,θR′)| + |E(θL′,θR) + E(θL′,θR′)|`.
///
/// `shots` counts shots per setting pair; `0` evaluates expectations. With
/// `noise`, readout imperfections are applied on top of `state`.
pub fn chsh_s<S: QuantumState>(
    settings: &CHSHSettings,
    state: &S,
    shots: u64,
    noise: Option<&NoiseConfig>,
    ctx: &ShotContext,
) -> Result<ExperimentResult> {
    check_qubits(state, 2)?;
    settings.validate()?;
    let noise = noise.cloned().unwrap_or_else(NoiseConfig::ideal);
    noise.validate()?;
    let model = PairModel::new(state, noise.residual_visibility)?;
    let pairs = settings.pairs();
    let mut e = [0.0; 4];
    let mut var = 0.0;
    for (k, &(tl, tr)) in pairs.iter().enumerate() {
        if shots == 0 {
            e[k] = noise.readout_visibility()
                * model.correlation(sigma_theta_direction(tl), sigma_theta_direction(tr));
        } else {
            let counts = sample_pair(
                &model,
                (sigma_theta_direction, tl),
                (sigma_theta_direction, tr),
                &noise,
                shots,
                domain::CHSH + k as u64,
                ctx,
            )?;
            let (ek, se) = correlation_from_counts(&counts);
            e[k] = ek;
            var += se * se;
        }
    }
    let mode = if shots == 0 { "analytic" } else { "sampled" };
    Ok(
        ExperimentResult::new("chsh_s", chsh_combine(e), var.sqrt(), shots, ctx)
            .with("mode", json!(mode))
            .with("theta_l", json!(settings.theta_l))
            .with("theta_l_prime", json!(settings.theta_l_prime))
            .with("theta_r", json!(settings.theta_r))
            .with("theta_r_prime", json!(settings.theta_r_prime))
            .with("correlations", json!(e)),
    )
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WignerResult {
    /// `P₊₊(a,b)`, `P₊₊(a,c)`, `P₊₊(c,b)`.
    pub p_ab: ExperimentResult,
    pub p_ac: ExperimentResult,
    pub p_cb: ExperimentResult,
    /// `P₊₊(a,b) − P₊₊(a,c) − P₊₊(c,b)`.
    pub excess: f64,
    pub excess_std_error: f64,
    pub violation: bool,
}

/// Wigner's inequality `P₊₊(a,b) ≤ P₊₊(a,c) + P₊₊(c,b)`, flagged as violated
/// when the excess is positive by more than three standard errors.
pub fn wigner_test<S: QuantumState>(
    a: f64,
    b: f64,
    c: f64,
    state: &S,
    shots: u64,
    ctx: &ShotContext,
) -> Result<WignerResult> {
    check_qubits(state, 2)?;
    let mut results = Vec::with_capacity(3);
    for (k, (name, tl, tr)) in [("p_ab", a, b), ("p_ac", a, c), ("p_cb", c, b)]
        .into_iter()
        .enumerate()
    {
        let probs = joint_distribution(state, &[tl, tr])?;
        let (value, se) = if shots == 0 {
            (probs[0], 0.0)
        } else {
            let cdf = cumulative(&probs);
            let [hits] = ctx.count(
                domain::WIGNER + k as u64,
                shots,
                |rng: &mut ChaCha8Rng, n| {
                    [(0..n)
                        .filter(|_| sample_cdf(&cdf, rng.random()) == 0)
                        .count() as u64]
                },
            )?;
            let p = hits as f64 / shots as f64;
            (p, (p * (1.0 - p) / shots as f64).sqrt())
        };
        results.push(
            ExperimentResult::new(&format!("wigner_{name}"), value, se, shots, ctx)
                .with("theta_l", json!(tl))
                .with("theta_r", json!(tr)),
        );
    }
    let excess = results[0].value - results[1].value - results[2].value;
    let excess_std_error = results
        .iter()
        .map(|r| r.std_error * r.std_error)
        .sum::<f64>()
        .sqrt();
    let violation = if shots == 0 {
        excess > 1e-12
    } else {
        excess > 3.0 * excess_std_error
    };
    let mut it = results.into_iter();
    Ok(WignerResult {
        p_ab: it.next().expect("three"),
        p_ac: it.next().expect("three"),
        p_cb: it.next().expect("three"),
        excess,
        excess_std_error,
        violation,
    })
}

/// Bloch direction analysed by the left interferometer at phase `φ`: the
/// recombiner maps the path qubit's `x`–`y` plane onto the detector ports.
pub fn fringe_direction_left(phi: f64) -> [f64; 3] {
    [phi.cos(), phi.sin(), 0.0]
}

/// Right interferometer: its recombiner is rotated a quarter turn relative
/// to the left one, so the phase sweeps the `x`–`z` plane. With orthogonal
/// sweep planes the path singlet yields the product form `cosφ_L cosφ_R`.
pub fn fringe_direction_right(phi: f64) -> [f64; 3] {
    [-phi.cos(), 0.0, phi.sin()]
}

/// `n × n` grid of `(φ_L, φ_R)` spanning `[0, 2π]` inclusive.
pub fn fringe_grid(n: usize) -> Vec<(f64, f64)> {
    let step = |i: usize| {
        if n > 1 {
            TAU * i as f64 / (n - 1) as f64
        } else {
            0.0
        }
    };
    (0..n)
        .flat_map(|i| (0..n).map(move |j| (step(i), step(j))))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FringePoint {
    pub phi_l: f64,
    pub phi_r: f64,
    /// Probability that both detectors fire in equal-parity ports.
    pub p_plus: f64,
    pub p_minus: f64,
    pub std_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FringeScan {
    pub points: Vec<FringePoint>,
    /// Least-squares `V` in `P± = ½[1 ± V cosφ_L cosφ_R]`.
    pub visibility: f64,
    pub visibility_std_error: f64,
    pub shots: u64,
    pub seed: u64,
}

/// Scans the two-interferometer coincidence probabilities over `grid`.
///
/// `shots` counts shots per grid point; `0` evaluates probabilities.
pub fn fringe_scan<S: QuantumState>(
    grid: &[(f64, f64)],
    state: &S,
    shots: u64,
    noise: &NoiseConfig,
    ctx: &ShotContext,
) -> Result<FringeScan> {
    check_qubits(state, 2)?;
    if grid.is_empty() {
        return Err(Error::InvalidParameter {
            name: "grid",
            reason: "must contain at least one point".into(),
        });
    }
    if let Some(&(l, r)) = grid.iter().find(|(l, r)| !(l.is_finite() && r.is_finite())) {
        return Err(Error::NonFiniteAngle(if l.is_finite() { r } else { l }));
    }
    noise.validate()?;
    let model = PairModel::new(state, noise.residual_visibility)?;
    let mut points = Vec::with_capacity(grid.len());
    for (k, &(phi_l, phi_r)) in grid.iter().enumerate() {
        let (p_plus, p_minus, std_error) = if shots == 0 {
            let e = noise.readout_visibility()
                * model.correlation(fringe_direction_left(phi_l), fringe_direction_right(phi_r));
            {
                let plus = 0.5 * (1.0 + e);
                (plus, 1.0 - plus, 0.0)
            }
        } else {
            let counts = sample_pair(
                &model,
                (fringe_direction_left, phi_l),
                (fringe_direction_right, phi_r),
                noise,
                shots,
                domain::FRINGE + k as u64,
                ctx,
            )?;
            let plus = (counts[0] + counts[3]) as f64 / shots as f64;
            let minus = (counts[1] + counts[2]) as f64 / shots as f64;
            (plus, minus, (plus * minus / shots as f64).sqrt())
        };
        points.push(FringePoint {
            phi_l,
            phi_r,
            p_plus,
            p_minus,
            std_error,
        });
    }
    let (visibility, visibility_std_error) = fit_visibility(&points);
    Ok(FringeScan {
        points,
        visibility,
        visibility_std_error,
        shots,
        seed: ctx.seed,
    })
}

/// Closed-form least squares for `P₊ − P₋ = V·c` with `c = cosφ_L cosφ_R`.
fn fit_visibility(points: &[FringePoint]) -> (f64, f64) {
    let c = |p: &FringePoint| p.phi_l.cos() * p.phi_r.cos();
    let sxx: f64 = points.iter().map(|p| c(p).powi(2)).sum();
    if sxx == 0.0 {
        return (0.0, 0.0);
    }
    let sxy: f64 = points.iter().map(|p| c(p) * (p.p_plus - p.p_minus)).sum();
    // Each point's P₊ − P₋ has standard error 2·se(P₊).
    let var: f64 = points
        .iter()
        .map(|p| (c(p) * 2.0 * p.std_error).powi(2))
        .sum();
    (sxy / sxx, var.sqrt() / sxx)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EPRResult {
    /// `Δ(x₂|x₁)`, µm.
    pub delta_x: f64,
    /// `Δ(p₂|p₁)`, ħ/µm.
    pub delta_p: f64,
    /// `Δ(x₂|x₁)·Δ(p₂|p₁)` in units of ħ.
    pub product: f64,
    pub heisenberg_bound: f64,
    pub violates_bound: bool,
    pub std_error: f64,
    /// Momentum error from neglecting the initial position in the
    /// time-of-flight inversion, `sd(x₂)/(ħ t/m)` in ħ/µm.
    pub tof_position_bias: f64,
    pub shots: u64,
    pub seed: u64,
}

/// Covariance of the measured quantities `(x̂₁, x̂₂, p̂₁, p̂₂)`.
///
/// `x̂ᵢ = xᵢ + bᵢ` and `p̂ᵢ = (xᵢ + (ħt/m)·pᵢ + bᵢ′)/(ħt/m)` with independent
/// imaging blurs `b, b′ ~ N(0, σ_img²)`.
fn measurement_map(lever: f64) -> Matrix4<f64> {
    use cv_index::*;
    let mut m = Matrix4::zeros();
    m[(0, X1)] = 1.0;
    m[(1, X2)] = 1.0;
    m[(2, X1)] = 1.0 / lever;
    m[(2, P1)] = 1.0;
    m[(3, X2)] = 1.0 / lever;
    m[(3, P2)] = 1.0;
    m
}

fn blur_variances(sigma_img: f64, lever: f64) -> Vector4<f64> {
    let s2 = sigma_img * sigma_img;
    Vector4::new(s2, s2, s2 / (lever * lever), s2 / (lever * lever))
}

/// Infers the EPR product from position images and time-of-flight images.
///
/// Each branch takes `shots` independent pair realizations; `0` conditions
/// the Gaussian covariance directly.
pub fn epr_infer(
    cv: &GaussianPairState,
    sigma_img: f64,
    t_tof: f64,
    shots: u64,
    ctx: &ShotContext,
) -> Result<EPRResult> {
    epr_infer_with(
        cv,
        sigma_img,
        t_tof,
        shots,
        ctx,
        &PhysicalConstants::lithium6(),
    )
}

pub fn epr_infer_with(
    cv: &GaussianPairState,
    sigma_img: f64,
    t_tof: f64,
    shots: u64,
    ctx: &ShotContext,
    constants: &PhysicalConstants,
) -> Result<EPRResult> {
    cv.validate()?;
    if !(sigma_img >= 0.0 && sigma_img.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "sigma_img",
            reason: format!("{sigma_img} must be finite and non-negative"),
        });
    }
    if !(t_tof > 0.0 && t_tof.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "t_tof",
            reason: format!("{t_tof} must be positive"),
        });
    }
    if shots == 1 || shots == 2 {
        return Err(Error::InvalidParameter {
            name: "shots",
            reason: "regression needs at least 3 samples".into(),
        });
    }
    let lever = constants.hbar_over_mass * t_tof;
    let m = measurement_map(lever);
    let cov = m * cv.cov_matrix() * m.transpose()
        + Matrix4::from_diagonal(&blur_variances(sigma_img, lever));
    let mean = m * cv.mean_vector();
    let tof_position_bias = cv.variance(cv_index::X2).sqrt() / lever;

    let (delta_x, delta_p, std_error) = if shots == 0 {
        let cond = |a: usize, b: usize| {
            crate::source::conditional_sd(cov[(b, b)], cov[(a, b)], cov[(a, a)])
        };
        (cond(0, 1), cond(2, 3), 0.0)
    } else {
        let chol = cv
            .cov_matrix()
            .cholesky()
            .ok_or_else(|| Error::NotPositiveDefinite("Cholesky failed".into()))?;
        let l = chol.l();
        let state_mean = cv.mean_vector();
        let sigma_p = sigma_img / lever;
        let draw = |rng: &mut ChaCha8Rng| -> Vector4<f64> {
            let z = Vector4::from_fn(|_, _| StandardNormal.sample(rng));
            state_mean + l * z
        };
        let branch = |domain: u64, rows: [usize; 2], blur: f64| -> Result<f64> {
            let parts = ctx.run_blocks(domain, shots, |rng: &mut ChaCha8Rng, n| {
                let mut acc = Moments::default();
                for _ in 0..n {
                    let v = m * draw(rng);
                    let mut noise = || -> f64 {
                        let z: f64 = StandardNormal.sample(rng);
                        blur * z
                    };
                    let a = v[rows[0]] + noise() - mean[rows[0]];
                    let b = v[rows[1]] + noise() - mean[rows[1]];
                    acc.push(a, b);
                }
                acc
            })?;
            let total = parts.into_iter().fold(Moments::default(), Moments::merge);
            Ok(total.residual_sd())
        };
        let dx = branch(domain::EPR_X, [0, 1], sigma_img)?;
        let dp = branch(domain::EPR_P, [2, 3], sigma_p)?;
        let rel = (1.0 / (shots as f64 - 2.0)).sqrt();
        (dx, dp, dx * dp * rel)
    };
    let product = delta_x * delta_p;
    Ok(EPRResult {
        delta_x,
        delta_p,
        product,
        heisenberg_bound: 0.5,
        violates_bound: product + 3.0 * std_error < 0.5,
        std_error,
        tof_position_bias,
        shots,
        seed: ctx.seed,
    })
}

/// Running second moments of a pair `(a, b)` (Chan et al. merge).
#[derive(Clone, Copy, Debug, Default)]
struct Moments {
    n: f64,
    mean_a: f64,
    mean_b: f64,
    m_aa: f64,
    m_bb: f64,
    m_ab: f64,
}

impl Moments {
    fn push(&mut self, a: f64, b: f64) {
        self.n += 1.0;
        let da = a - self.mean_a;
        self.mean_a += da / self.n;
        let db = b - self.mean_b;
        self.mean_b += db / self.n;
        self.m_aa += da * (a - self.mean_a);
        self.m_bb += db * (b - self.mean_b);
        self.m_ab += da * (b - self.mean_b);
    }

    fn merge(self, other: Moments) -> Moments {
        if self.n == 0.0 {
            return other;
        }
        if other.n == 0.0 {
            return self;
        }
        let n = self.n + other.n;
        let da = other.mean_a - self.mean_a;
        let db = other.mean_b - self.mean_b;
        let w = self.n * other.n / n;
        Moments {
            n,
            mean_a: self.mean_a + da * other.n / n,
            mean_b: self.mean_b + db * other.n / n,
            m_aa: self.m_aa + other.m_aa + da * da * w,
            m_bb: self.m_bb + other.m_bb + db * db * w,
            m_ab: self.m_ab + other.m_ab + da * db * w,
        }
    }

    /// Residual standard deviation of the regression of `b` on `a`.
    fn residual_sd(&self) -> f64 {
        let ss = self.m_bb - self.m_ab * self.m_ab / self.m_aa;
        (ss.max(0.0) / (self.n - 2.0)).sqrt()
    }
}

fn parse_pauli_label(label: &str, n: usize) -> Result<Vec<Option<Axis>>> {
    let axes: Vec<Option<Axis>> = label
        .chars()
        .map(|c| match c.to_ascii_uppercase() {
            'I' => Ok(None),
            'X' => Ok(Some(Axis::X)),
            'Y' => Ok(Some(Axis::Y)),
            'Z' => Ok(Some(Axis::Z)),
            _ => Err(Error::InvalidParameter {
                name: "pauli label",
                reason: format!("unknown character {c:?} in {label:?}"),
            }),
        })
        .collect::<Result<_>>()?;
    if axes.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: axes.len(),
        });
    }
    Ok(axes)
}

/// Unitary mapping the measured Pauli onto `σ_z`.
fn basis_change(axis: Option<Axis>) -> Result<CMatrix> {
    Ok(match axis {
        Some(Axis::X) => rotation(Axis::Y, -FRAC_PI_2)?.into_matrix(),
        Some(Axis::Y) => rotation(Axis::X, FRAC_PI_2)?.into_matrix(),
        _ => identity(2),
    })
}

/// Products of single-qubit ±1 outcomes on a 4-qubit register, one result per
/// Pauli label (e.g. `"XXYY"`; `I` marks an unmeasured qubit).
pub fn ghz_correlations<S: QuantumState>(
    state: &S,
    labels: &[&str],
    shots: u64,
    ctx: &ShotContext,
) -> Result<Vec<ExperimentResult>> {
    check_qubits(state, 4)?;
    labels
        .iter()
        .enumerate()
        .map(|(k, label)| {
            let axes = parse_pauli_label(label, 4)?;
            let (value, se) = if shots == 0 {
                (
                    state.expectation(&pauli_string(&label.to_ascii_uppercase())?)?,
                    0.0,
                )
            } else {
                let rotations: Vec<CMatrix> = axes
                    .iter()
                    .map(|&a| basis_change(a))
                    .collect::<Result<_>>()?;
                let rotated = state
                    .to_mixed()
                    .apply(&Unitary::new(kron_all(rotations.iter()))?)?;
                let probs: Vec<f64> = (0..16).map(|i| rotated.rho()[(i, i)].re.max(0.0)).collect();
                let cdf = cumulative(&probs);
                let mask = axes
                    .iter()
                    .enumerate()
                    .filter(|(_, a)| a.is_some())
                    .fold(0usize, |m, (q, _)| m | (1 << (3 - q)));
                let [odd] =
                    ctx.count(domain::GHZ + k as u64, shots, |rng: &mut ChaCha8Rng, n| {
                        [(0..n)
                            .filter(|_| {
                                (sample_cdf(&cdf, rng.random()) & mask).count_ones() % 2 == 1
                            })
                            .count() as u64]
                    })?;
                let e = 1.0 - 2.0 * odd as f64 / shots as f64;
                (e, ((1.0 - e * e).max(0.0) / shots as f64).sqrt())
            };
            Ok(
                ExperimentResult::new("ghz_correlation", value, se, shots, ctx)
                    .with("label", json!(label)),
            )
        })
        .collect()
}

/// Projects `qubit` onto outcome `outcome` of the Pauli `axis` and traces it
/// out. Returns the outcome probability and the remaining state, or `None`
/// for an impossible outcome.
pub fn ghz_collapse<S: QuantumState>(
    state: &S,
    qubit: usize,
    axis: Axis,
    outcome: i8,
) -> Result<(f64, Option<MixedState>)> {
    let n = state.n_qubits();
    if qubit >= n {
        return Err(Error::QubitOutOfRange {
            index: qubit,
            n_qubits: n,
        });
    }
    let sign = if outcome >= 0 { 1.0 } else { -1.0 };
    let local = (identity(2) + pauli(axis) * C64::new(sign, 0.0)) * C64::new(0.5, 0.0);
    let ops: Vec<CMatrix> = (0..n)
        .map(|q| {
            if q == qubit {
                local.clone()
            } else {
                identity(2)
            }
        })
        .collect();
    let (prob, post) = state.to_mixed().project(&kron_all(ops.iter()));
    let keep: Vec<usize> = (0..n).filter(|&q| q != qubit).collect();
    let reduced = post.map(|s| s.partial_trace(&keep)).transpose()?;
    Ok((prob, reduced))
}

/// Singlet `P₊₊(α,β) = ½ sin²((α − β)/2)`.
pub fn singlet_p_plus_plus(alpha: f64, beta: f64) -> f64 {
    0.5 * ((alpha - beta) / 2.0).sin().powi(2)
}

/// `(a, b, c)` with the largest singlet violation, `0.375` against `0.25`.
pub const WIGNER_ANGLES: (f64, f64, f64) = (0.0, 2.0 * PI / 3.0, PI / 3.0);
