//! Scalar noise budget: preparation and detection fidelities, field-limited
//! dephasing, basis misalignment and a residual visibility factor.

use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::SQRT_2;

use crate::error::{Error, Result};
use crate::qcore::{MixedState, QuantumState};

/// Upper limit returned by [`t2_estimate`] when the field noise vanishes.
pub const T2_CAP_SECONDS: f64 = 1e4;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseConfig {
    /// Probability of reading a spin or detector port correctly.
    pub detection_fidelity: f64,
    /// Werner weight of the prepared entangled state.
    pub singlet_fidelity: f64,
    /// Seconds.
    pub t2_prime: f64,
    /// Standard deviation (radians) of a random offset on each analysis angle.
    pub basis_misalignment_sigma: f64,
    /// Remaining multiplicative loss of contrast not covered by the other terms.
    pub residual_visibility: f64,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        NoiseConfig {
            detection_fidelity: 0.99,
            singlet_fidelity: 0.97,
            t2_prime: 0.2,
            basis_misalignment_sigma: 0.0,
            residual_visibility: 1.0,
        }
    }
}

impl NoiseConfig {
    pub fn ideal() -> Self {
        NoiseConfig {
            detection_fidelity: 1.0,
            singlet_fidelity: 1.0,
            t2_prime: T2_CAP_SECONDS,
            basis_misalignment_sigma: 0.0,
            residual_visibility: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |name: &'static str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::InvalidParameter {
                    name,
                    reason: format!("{v} not in [0, 1]"),
                })
            }
        };
        unit("detection_fidelity", self.detection_fidelity)?;
        unit("singlet_fidelity", self.singlet_fidelity)?;
        unit("residual_visibility", self.residual_visibility)?;
        if self.t2_prime.is_nan() || self.t2_prime <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "t2_prime",
                reason: format!("{} must be positive", self.t2_prime),
            });
        }
        if !(self.basis_misalignment_sigma >= 0.0 && self.basis_misalignment_sigma.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "basis_misalignment_sigma",
                reason: format!(
                    "{} must be finite and non-negative",
                    self.basis_misalignment_sigma
                ),
            });
        }
        Ok(())
    }

    /// Contrast left after two independent outcome flips, `(2f_d − 1)²`.
    pub fn detection_visibility(&self) -> f64 {
        (2.0 * self.detection_fidelity - 1.0).powi(2)
    }

    /// `E[cos(δ_L − δ_R)]` for independent Gaussian angle errors, `exp(−σ²)`.
    pub fn misalignment_visibility(&self) -> f64 {
        (-self.basis_misalignment_sigma.powi(2)).exp()
    }

    /// Contrast factors that act after state preparation (everything except
    /// the singlet fidelity).
    pub fn readout_visibility(&self) -> f64 {
        self.detection_visibility() * self.residual_visibility * self.misalignment_visibility()
    }
}

/// `V_eff = (2f_d − 1)² · F · residual`, times `exp(−σ²)` for misalignment.
pub fn effective_visibility(cfg: &NoiseConfig) -> f64 {
    cfg.singlet_fidelity * cfg.readout_visibility()
}

pub fn predicted_s(cfg: &NoiseConfig) -> f64 {
    2.0 * SQRT_2 * effective_visibility(cfg)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FieldNoiseSpec {
    /// Differential qubit sensitivity, Hz/mG.
    pub sensitivity: f64,
    /// RMS field excursion, mG.
    pub field_stability: f64,
}

impl Default for FieldNoiseSpec {
    fn default() -> Self {
        FieldNoiseSpec {
            sensitivity: 5.0,
            field_stability: 1.0,
        }
    }
}

/// `T₂′ = 1 / (sensitivity × stability)`, capped at [`T2_CAP_SECONDS`].
pub fn t2_estimate(spec: &FieldNoiseSpec) -> Result<f64> {
    if !(spec.sensitivity >= 0.0 && spec.field_stability >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "field noise",
            reason: "sensitivity and stability must be non-negative".into(),
        });
    }
    let rate = spec.sensitivity * spec.field_stability;
    if rate <= 0.0 {
        return Ok(T2_CAP_SECONDS);
    }
    Ok((1.0 / rate).min(T2_CAP_SECONDS))
}

/// Coherence factor `exp(−elapsed / T₂′)` of the phase-damping channel.
pub fn coherence_factor(elapsed: f64, t2_prime: f64) -> f64 {
    (-elapsed / t2_prime).exp()
}

/// Independent phase damping on every qubit for `elapsed` seconds.
///
/// Each qubit's coherences are multiplied by `exp(−elapsed/T₂′)`, i.e. phase
/// damping with parameter `1 − exp(−elapsed/T₂′)`; populations are untouched.
pub fn apply_noise_channels(
    state: &MixedState,
    cfg: &NoiseConfig,
    elapsed: f64,
) -> Result<MixedState> {
    if elapsed.is_nan() || elapsed < 0.0 {
        return Err(Error::InvalidParameter {
            name: "elapsed",
            reason: format!("{elapsed} must be non-negative"),
        });
    }
    cfg.validate()?;
    Ok(dephase(state, coherence_factor(elapsed, cfg.t2_prime)))
}

pub(crate) fn dephase(state: &MixedState, factor: f64) -> MixedState {
    if factor == 1.0 {
        return state.clone();
    }
    let mut rho = state.rho().clone();
    let dim = state.dim();
    for r in 0..dim {
        for c in 0..dim {
            let differing = (r ^ c).count_ones() as i32;
            if differing > 0 {
                rho[(r, c)] *= factor.powi(differing);
            }
        }
    }
    MixedState::from_raw(state.n_qubits(), rho)
}

/// Reports `outcome` with probability `f_d`, its negation otherwise.
pub fn flip_outcome<R: Rng + ?Sized>(outcome: i8, detection_fidelity: f64, rng: &mut R) -> i8 {
    if rng.random::<f64>() < detection_fidelity {
        outcome
    } else {
        -outcome
    }
}
