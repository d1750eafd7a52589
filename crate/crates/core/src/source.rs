//! Entangled resource states produced by dissociating a single molecule.
//!
//! Imperfect preparation is white-noise (Werner) mixing with the ideal target
//! at the configured fidelity. The continuous-variable pair is a
//! second-moment Gaussian model over `(x₁, p₁, x₂, p₂)` in units where
//! `ħ = 1`: lengths in µm, momenta in ħ/µm.

use nalgebra::{Matrix4, Vector4};
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{Error, Result};
use crate::qcore::{MixedState, PureState, QuantumState};

/// Qubit layout of the hyperentangled state.
pub mod ghz_qubits {
    pub const SPIN_L: usize = 0;
    pub const PATH_L: usize = 1;
    pub const SPIN_R: usize = 2;
    pub const PATH_R: usize = 3;
}

fn check_probability(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: format!("{value} not in [0, 1]"),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PreparationConfig {
    /// Probability that a microtrap holds exactly one atom pair.
    pub pair_prep_fidelity: f64,
    /// Weight of the ideal entangled state in the Werner mixture.
    pub singlet_fidelity: f64,
    pub association_fidelity: f64,
}

impl Default for PreparationConfig {
    fn default() -> Self {
        PreparationConfig {
            pair_prep_fidelity: 0.97,
            singlet_fidelity: 1.0,
            association_fidelity: 1.0,
        }
    }
}

impl PreparationConfig {
    pub fn with_fidelity(singlet_fidelity: f64) -> Self {
        PreparationConfig {
            singlet_fidelity,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_probability("pair_prep_fidelity", self.pair_prep_fidelity)?;
        check_probability("singlet_fidelity", self.singlet_fidelity)?;
        check_probability("association_fidelity", self.association_fidelity)
    }
}

/// `F·|ψ⟩⟨ψ| + (1 − F)·I/d`.
pub fn werner(target: &PureState, fidelity: f64) -> Result<MixedState> {
    check_probability("fidelity", fidelity)?;
    let noise = MixedState::maximally_mixed(target.n_qubits())?;
    target.to_mixed().mix(&noise, fidelity)
}

/// `(|↑↓⟩ − |↓↑⟩)/√2`.
pub fn singlet_ket() -> PureState {
    PureState::from_real(&[0.0, FRAC_1_SQRT_2, -FRAC_1_SQRT_2, 0.0]).expect("normalized")
}

/// `(|A⟩_L|B⟩_R − |B⟩_L|A⟩_R)/√2` with `A → 0`, `B → 1`.
pub fn path_ket() -> PureState {
    singlet_ket()
}

/// `(|↑_L A_L ↓_R B_R⟩ − |↓_L B_L ↑_R A_R⟩)/√2 = (|0011⟩ − |1100⟩)/√2`.
pub fn ghz_ket() -> PureState {
    let mut amps = [0.0; 16];
    amps[0b0011] = FRAC_1_SQRT_2;
    amps[0b1100] = -FRAC_1_SQRT_2;
    PureState::from_real(&amps).expect("normalized")
}

pub fn prepare_singlet(cfg: &PreparationConfig) -> Result<MixedState> {
    cfg.validate()?;
    werner(&singlet_ket(), cfg.singlet_fidelity)
}

pub fn prepare_path_state(cfg: &PreparationConfig) -> Result<MixedState> {
    cfg.validate()?;
    werner(&path_ket(), cfg.singlet_fidelity)
}

pub fn prepare_ghz_hyper(cfg: &PreparationConfig) -> Result<MixedState> {
    cfg.validate()?;
    werner(&ghz_ket(), cfg.singlet_fidelity)
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DissociationMethod {
    RfSpinFlip,
    FieldSweep,
    Photodissociation,
}

impl DissociationMethod {
    /// Allowed dissociation time window in seconds, `(min, max)`; the RF
    /// window is open at the upper end.
    pub fn timescale_window(self) -> (f64, f64) {
        match self {
            DissociationMethod::RfSpinFlip => (0.0, 1e-3),
            DissociationMethod::FieldSweep => (0.5e-3, 10e-3),
            DissociationMethod::Photodissociation => (1e-9, 1e-6),
        }
    }

    fn in_window(self, t: f64) -> bool {
        let (lo, hi) = self.timescale_window();
        match self {
            DissociationMethod::RfSpinFlip => t > lo && t < hi,
            _ => t >= lo && t <= hi,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DissociationSpec {
    pub method: DissociationMethod,
    /// Seconds.
    pub timescale: f64,
    /// Mean momentum per atom, in units of ħk_rec.
    pub mean_momentum: f64,
    /// Relative momentum spread Δp_rel, in units of ħk_rec.
    pub momentum_spread: f64,
    /// Molecular coupling constant g↑↓; carried as an opaque parameter.
    #[serde(default)]
    pub binding_coupling: f64,
}

impl DissociationSpec {
    /// `strict` additionally checks the timescale against the method's window.
    pub fn validate(&self, strict: bool) -> Result<()> {
        if !(self.timescale > 0.0 && self.timescale.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "timescale",
                reason: format!("{} must be positive", self.timescale),
            });
        }
        if !(self.momentum_spread > 0.0 && self.momentum_spread.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "momentum_spread",
                reason: format!("{} must be positive", self.momentum_spread),
            });
        }
        if !self.mean_momentum.is_finite() || !self.binding_coupling.is_finite() {
            return Err(Error::InvalidParameter {
                name: "mean_momentum",
                reason: "must be finite".into(),
            });
        }
        if strict && !self.method.in_window(self.timescale) {
            let (lo, hi) = self.method.timescale_window();
            return Err(Error::InvalidParameter {
                name: "timescale",
                reason: format!(
                    "{} s outside the {:?} window [{lo:e}, {hi:e}] s",
                    self.timescale, self.method
                ),
            });
        }
        Ok(())
    }
}

/// SI constants and the µm / ħ/µm unit system used by the Gaussian model.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    /// J·s.
    pub hbar: f64,
    /// kg.
    pub mass_li6: f64,
    /// Resonance wavelength in µm.
    pub wavelength_um: f64,
    /// `2π / λ` in 1/µm, i.e. ħk_rec expressed in ħ/µm.
    pub k_rec: f64,
    /// `ħ / m` in µm²/s; converts momentum in ħ/µm to velocity in µm/s.
    pub hbar_over_mass: f64,
}

impl PhysicalConstants {
    pub const HBAR: f64 = 1.054_571_817e-34;
    pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;
    pub const LI6_MASS_U: f64 = 6.015_122_887_4;
    pub const WAVELENGTH_UM: f64 = 0.671;

    pub fn lithium6() -> Self {
        let mass_li6 = Self::LI6_MASS_U * Self::ATOMIC_MASS_UNIT;
        PhysicalConstants {
            hbar: Self::HBAR,
            mass_li6,
            wavelength_um: Self::WAVELENGTH_UM,
            k_rec: 2.0 * PI / Self::WAVELENGTH_UM,
            hbar_over_mass: Self::HBAR / mass_li6 * 1e12,
        }
    }

    /// Converts a momentum in ħk_rec to ħ/µm.
    pub fn recoil_to_internal(&self, p_recoil: f64) -> f64 {
        p_recoil * self.k_rec
    }

    pub fn internal_to_recoil(&self, p_internal: f64) -> f64 {
        p_internal / self.k_rec
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::lithium6()
    }
}

/// Gaussian second-moment model of the dissociated pair over `(x₁, p₁, x₂, p₂)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianPairState {
    pub mean: [f64; 4],
    pub cov: [[f64; 4]; 4],
}

pub mod cv_index {
    pub const X1: usize = 0;
    pub const P1: usize = 1;
    pub const X2: usize = 2;
    pub const P2: usize = 3;
}

impl GaussianPairState {
    /// Validates symmetry, positive definiteness and the per-atom
    /// uncertainty bound `Var(x)·Var(p) ≥ 1/4` (ħ = 1).
    pub fn new(mean: [f64; 4], cov: [[f64; 4]; 4]) -> Result<Self> {
        let state = GaussianPairState { mean, cov };
        state.validate()?;
        Ok(state)
    }

    pub fn cov_matrix(&self) -> Matrix4<f64> {
        Matrix4::from_fn(|r, c| self.cov[r][c])
    }

    pub fn mean_vector(&self) -> Vector4<f64> {
        Vector4::from_column_slice(&self.mean)
    }

    pub fn validate(&self) -> Result<()> {
        if self
            .mean
            .iter()
            .chain(self.cov.iter().flatten())
            .any(|v| !v.is_finite())
        {
            return Err(Error::NotPositiveDefinite("non-finite entry".into()));
        }
        let scale = (0..4)
            .map(|i| self.cov[i][i].abs())
            .fold(0.0, f64::max)
            .max(f64::MIN_POSITIVE);
        for r in 0..4 {
            for c in (r + 1)..4 {
                if (self.cov[r][c] - self.cov[c][r]).abs() > 1e-12 * scale {
                    return Err(Error::NotPositiveDefinite(format!(
                        "covariance not symmetric at ({r}, {c})"
                    )));
                }
            }
        }
        if self.cov_matrix().cholesky().is_none() {
            return Err(Error::NotPositiveDefinite(
                "covariance has a non-positive eigenvalue (Cholesky failed)".into(),
            ));
        }
        for (atom, (x, p)) in [(cv_index::X1, cv_index::P1), (cv_index::X2, cv_index::P2)]
            .into_iter()
            .enumerate()
        {
            let product = self.cov[x][x] * self.cov[p][p];
            if product < 0.25 * (1.0 - 1e-12) {
                return Err(Error::HeisenbergViolation {
                    atom: atom + 1,
                    product,
                });
            }
        }
        Ok(())
    }

    pub fn variance(&self, i: usize) -> f64 {
        self.cov[i][i]
    }

    pub fn covariance(&self, i: usize, j: usize) -> f64 {
        self.cov[i][j]
    }

    /// Standard deviation of variable `b` conditioned on variable `a`:
    /// `√(Var(b) − Cov(a,b)²/Var(a))`.
    pub fn conditional_sd(&self, b: usize, a: usize) -> f64 {
        conditional_sd(self.cov[b][b], self.cov[a][b], self.cov[a][a])
    }
}

pub fn conditional_sd(var_b: f64, cov_ab: f64, var_a: f64) -> f64 {
    (var_b - cov_ab * cov_ab / var_a).max(0.0).sqrt()
}

/// Gaussian pair after dissociation with initial relative size `σ₀` (µm).
///
/// `Var(x₁ − x₂) = 2σ₀²` and `Var(p₁ + p₂) = Δp_rel²`. Each atom's marginal
/// is broad: `Var(xᵢ) = (10σ₀)²`, `Var(pᵢ) = p₀²/4 + Δp_rel²`, with mean
/// momenta `±p₀`.
pub fn prepare_cv_state(spec: &DissociationSpec, initial_size: f64) -> Result<GaussianPairState> {
    prepare_cv_state_with(spec, initial_size, &PhysicalConstants::lithium6())
}

pub fn prepare_cv_state_with(
    spec: &DissociationSpec,
    initial_size: f64,
    constants: &PhysicalConstants,
) -> Result<GaussianPairState> {
    spec.validate(false)?;
    if !(initial_size > 0.0 && initial_size.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "initial_size",
            reason: format!("{initial_size} must be positive"),
        });
    }
    use cv_index::*;
    let p0 = constants.recoil_to_internal(spec.mean_momentum);
    let dp = constants.recoil_to_internal(spec.momentum_spread);
    let var_x = (10.0 * initial_size).powi(2);
    let cov_x = var_x - initial_size * initial_size;
    let var_p = p0 * p0 / 4.0 + dp * dp;
    let cov_p = (dp * dp - 2.0 * var_p) / 2.0;
    let mut cov = [[0.0; 4]; 4];
    cov[X1][X1] = var_x;
    cov[X2][X2] = var_x;
    cov[X1][X2] = cov_x;
    cov[X2][X1] = cov_x;
    cov[P1][P1] = var_p;
    cov[P2][P2] = var_p;
    cov[P1][P2] = cov_p;
    cov[P2][P1] = cov_p;
    GaussianPairState::new([0.0, p0, 0.0, -p0], cov)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DissociationRecord {
    pub method: DissociationMethod,
    pub name: String,
    pub timescale: String,
    pub timescale_min_s: f64,
    pub timescale_max_s: f64,
    pub key_features: String,
    pub limitations: String,
    pub suitable: bool,
    pub unsuitable_reason: Option<String>,
}

pub fn dissociation_catalog() -> Vec<DissociationRecord> {
    let record =
        |method: DissociationMethod, name: &str, timescale: &str, features: &str, limits: &str| {
            let (lo, hi) = method.timescale_window();
            let suitable = method != DissociationMethod::Photodissociation;
            DissociationRecord {
                method,
                name: name.to_string(),
                timescale: timescale.to_string(),
                timescale_min_s: lo,
                timescale_max_s: hi,
                key_features: features.to_string(),
                limitations: limits.to_string(),
                suitable,
                unsuitable_reason: (!suitable).then(|| limits.to_string()),
            }
        };
    vec![
        record(
            DissociationMethod::RfSpinFlip,
            "RF spin-flip",
            "sub-ms",
            "Fast, coherent, minimal recoil",
            "Requires strong, homogeneous RF fields",
        ),
        record(
            DissociationMethod::FieldSweep,
            "Magnetic-field sweep",
            "0.5–10 ms",
            "Deterministic, tunable momentum spectrum",
            "Relatively slow",
        ),
        record(
            DissociationMethod::Photodissociation,
            "Optical photodissociation",
            "ns–µs",
            "Fast, precise timing",
            "Photon recoil; spontaneous emission",
        ),
    ]
}

pub fn catalog_json() -> String {
    serde_json::to_string_pretty(&dissociation_catalog()).expect("catalog serializes")
}
