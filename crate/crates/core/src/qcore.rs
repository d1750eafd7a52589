//! Dense linear algebra for one to four qubits.
//!
//! Conventions used everywhere in the crate:
//!
//! * `rotation(n, θ) = exp(-i θ σ·n / 2)`.
//! * The measurement direction at angle `θ` is `(sin θ, 0, cos θ)`, so the
//!   measured observable is `σ_θ = cos θ σ_z + sin θ σ_x`; outcome `+1` is the
//!   `|↑⟩ = |0⟩` side of the Bloch sphere at `θ = 0`.
//! * Qubit 0 is the leftmost label in a ket and the most significant bit of a
//!   basis index.
//! * Global phases are kept. Operator equality is tested with
//!   [`Unitary::phase_distance`].

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const MAX_QUBITS: usize = 4;

const NORM_TOL: f64 = 1e-10;
const HERMITIAN_TOL: f64 = 1e-10;
const EIGEN_TOL: f64 = 1e-10;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn as_str(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        }
    }
}

impl std::fmt::Display for Axis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

pub fn pauli(axis: Axis) -> CMatrix {
    match axis {
        Axis::X => CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]),
        Axis::Y => CMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]),
        Axis::Z => CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]),
    }
}

/// Single-qubit observable `cos θ σ_z + sin θ σ_x`.
pub fn sigma_theta(theta: f64) -> CMatrix {
    let (s, c) = theta.sin_cos();
    CMatrix::from_row_slice(
        2,
        2,
        &[
            C64::new(c, 0.0),
            C64::new(s, 0.0),
            C64::new(s, 0.0),
            C64::new(-c, 0.0),
        ],
    )
}

/// Projector onto outcome `outcome` (±1) of `σ_θ`.
pub fn projector(theta: f64, outcome: i8) -> CMatrix {
    let sign = if outcome >= 0 { 1.0 } else { -1.0 };
    (identity(2) + sigma_theta(theta) * C64::new(sign, 0.0)) * C64::new(0.5, 0.0)
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Tensor product of a list of operators, first entry acting on qubit 0.
pub fn kron_all<'a>(ops: impl IntoIterator<Item = &'a CMatrix>) -> CMatrix {
    ops.into_iter()
        .fold(CMatrix::identity(1, 1), |acc, op| acc.kronecker(op))
}

/// Operator from a Pauli label such as `"XXZI"`.
pub fn pauli_string(label: &str) -> Result<CMatrix> {
    let mut ops = Vec::with_capacity(label.len());
    for ch in label.chars() {
        ops.push(match ch.to_ascii_uppercase() {
            'I' => identity(2),
            'X' => pauli(Axis::X),
            'Y' => pauli(Axis::Y),
            'Z' => pauli(Axis::Z),
            other => {
                return Err(Error::InvalidParameter {
                    name: "pauli_string",
                    reason: format!("unknown Pauli label {other:?}"),
                })
            }
        });
    }
    if ops.is_empty() || ops.len() > MAX_QUBITS {
        return Err(Error::QubitCount(ops.len()));
    }
    Ok(kron_all(ops.iter()))
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn hermitian_deviation(m: &CMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

fn qubits_for_dim(dim: usize) -> Result<usize> {
    if dim < 2 || !dim.is_power_of_two() {
        return Err(Error::InvalidState(format!(
            "dimension {dim} is not a power of two >= 2"
        )));
    }
    let n = dim.trailing_zeros() as usize;
    if n > MAX_QUBITS {
        return Err(Error::QubitCount(n));
    }
    Ok(n)
}

fn check_qubit(index: usize, n_qubits: usize) -> Result<()> {
    if index >= n_qubits {
        Err(Error::QubitOutOfRange { index, n_qubits })
    } else {
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Unitary {
    matrix: CMatrix,
}

impl Unitary {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                found: matrix.ncols(),
            });
        }
        let dim = matrix.nrows();
        if dim == 0 || !dim.is_power_of_two() {
            return Err(Error::InvalidParameter {
                name: "unitary",
                reason: format!("dimension {dim} is not a power of two"),
            });
        }
        let dev = max_abs(&(matrix.adjoint() * &matrix - identity(dim)));
        if dev > NORM_TOL {
            return Err(Error::InvalidParameter {
                name: "unitary",
                reason: format!("U†U deviates from identity by {dev:e}"),
            });
        }
        Ok(Unitary { matrix })
    }

    pub fn identity(dim: usize) -> Self {
        Unitary {
            matrix: identity(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn adjoint(&self) -> Self {
        Unitary {
            matrix: self.matrix.adjoint(),
        }
    }

    /// Operator product `self · other` (apply `other` first).
    pub fn mul(&self, other: &Unitary) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(Unitary {
            matrix: &self.matrix * &other.matrix,
        })
    }

    /// Composition in time order: `self` first, then `later`.
    pub fn then(&self, later: &Unitary) -> Result<Self> {
        later.mul(self)
    }

    /// `min_φ ‖U − e^{iφ} V‖_F`.
    ///
    /// The minimizing phase is `arg tr(V†U)`; the residual is then evaluated
    /// elementwise so that it stays at rounding level for equal operators.
    pub fn phase_distance(&self, other: &Unitary) -> f64 {
        phase_distance(&self.matrix, &other.matrix)
    }

    pub fn unitarity_deviation(&self) -> f64 {
        max_abs(&(self.matrix.adjoint() * &self.matrix - identity(self.dim())))
    }
}

pub fn phase_distance(u: &CMatrix, v: &CMatrix) -> f64 {
    assert_eq!(u.shape(), v.shape(), "phase_distance on mismatched shapes");
    let overlap: C64 = v.adjoint().component_mul(&u.transpose()).sum();
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        ONE
    };
    u.iter()
        .zip(v.iter())
        .map(|(a, b)| (a - phase * b).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// `exp(−i θ σ_axis / 2)`.
pub fn rotation(axis: Axis, theta: f64) -> Result<Unitary> {
    if !theta.is_finite() {
        return Err(Error::NonFiniteAngle(theta));
    }
    let (s, c) = (theta / 2.0).sin_cos();
    let matrix = identity(2) * C64::new(c, 0.0) - pauli(axis) * C64::new(0.0, s);
    Ok(Unitary { matrix })
}

/// Lifts `u` (acting on `targets`, in the listed order) to an `n`-qubit operator.
pub fn embed(u: &Unitary, targets: &[usize], n: usize) -> Result<Unitary> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::QubitCount(n));
    }
    let k = targets.len();
    if u.dim() != 1 << k {
        return Err(Error::DimensionMismatch {
            expected: 1 << k,
            found: u.dim(),
        });
    }
    for (i, &t) in targets.iter().enumerate() {
        check_qubit(t, n)?;
        if targets[..i].contains(&t) {
            return Err(Error::DuplicateTarget(t));
        }
    }
    let dim = 1usize << n;
    let shifts: Vec<usize> = targets.iter().map(|&t| n - 1 - t).collect();
    let sub_index = |full: usize| {
        shifts
            .iter()
            .fold(0usize, |acc, &s| (acc << 1) | ((full >> s) & 1))
    };
    let with_sub = |full: usize, sub: usize| {
        shifts.iter().enumerate().fold(full, |acc, (pos, &s)| {
            let bit = (sub >> (k - 1 - pos)) & 1;
            (acc & !(1 << s)) | (bit << s)
        })
    };
    let mut out = CMatrix::zeros(dim, dim);
    for col in 0..dim {
        let sc = sub_index(col);
        for sr in 0..(1 << k) {
            let amp = u.matrix[(sr, sc)];
            if amp != ZERO {
                out[(with_sub(col, sr), col)] = amp;
            }
        }
    }
    Ok(Unitary { matrix: out })
}

fn embed_operator(op: &CMatrix, qubit: usize, n: usize) -> CMatrix {
    let ops: Vec<CMatrix> = (0..n)
        .map(|q| if q == qubit { op.clone() } else { identity(2) })
        .collect();
    kron_all(ops.iter())
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub qubit_index: usize,
    pub basis_angle: f64,
    pub outcome: i8,
}

/// Behaviour shared by pure and mixed states.
pub trait QuantumState: Sized + Clone {
    fn n_qubits(&self) -> usize;

    fn dim(&self) -> usize {
        1 << self.n_qubits()
    }

    fn apply(&self, u: &Unitary) -> Result<Self>;

    /// `⟨O⟩` for a Hermitian `O` of matching dimension.
    fn expectation(&self, observable: &CMatrix) -> Result<f64>;

    /// Applies the (not necessarily trace-preserving) operator `p` and
    /// returns the squared norm / trace before renormalization together with
    /// the renormalized state, or `None` if the weight is zero.
    fn project(&self, p: &CMatrix) -> (f64, Option<Self>);

    fn to_mixed(&self) -> MixedState;
}

fn check_observable(observable: &CMatrix, dim: usize) -> Result<()> {
    if observable.nrows() != dim || observable.ncols() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: observable.nrows(),
        });
    }
    let dev = hermitian_deviation(observable);
    if dev > HERMITIAN_TOL {
        return Err(Error::NotHermitian(dev));
    }
    Ok(())
}

fn real_part(value: C64) -> f64 {
    // Imaginary residue from rounding is dropped.
    value.re
}

#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    n_qubits: usize,
    amplitudes: CVector,
}

impl PureState {
    /// Builds a state from amplitudes; input within 1e-10 of unit norm is
    /// renormalized, anything else is rejected.
    pub fn new(amplitudes: CVector) -> Result<Self> {
        let n_qubits = qubits_for_dim(amplitudes.len())?;
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!(
                "amplitude norm {norm} is not 1"
            )));
        }
        Ok(PureState {
            n_qubits,
            amplitudes: amplitudes / C64::new(norm, 0.0),
        })
    }

    pub fn from_slice(amplitudes: &[C64]) -> Result<Self> {
        Self::new(CVector::from_column_slice(amplitudes))
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::new(CVector::from_iterator(
            amplitudes.len(),
            amplitudes.iter().map(|&a| C64::new(a, 0.0)),
        ))
    }

    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::QubitCount(n_qubits));
        }
        let dim = 1 << n_qubits;
        if index >= dim {
            return Err(Error::InvalidParameter {
                name: "basis index",
                reason: format!("{index} >= {dim}"),
            });
        }
        let mut amplitudes = CVector::zeros(dim);
        amplitudes[index] = ONE;
        Ok(PureState {
            n_qubits,
            amplitudes,
        })
    }

    /// Computational basis state from a bit label, e.g. `"0011"`.
    pub fn from_bits(bits: &str) -> Result<Self> {
        let mut index = 0usize;
        for ch in bits.chars() {
            index = (index << 1)
                | match ch {
                    '0' => 0,
                    '1' => 1,
                    other => {
                        return Err(Error::InvalidParameter {
                            name: "bits",
                            reason: format!("unexpected character {other:?}"),
                        })
                    }
                };
        }
        Self::basis(bits.len(), index)
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        let n = self.n_qubits + other.n_qubits;
        if n > MAX_QUBITS {
            return Err(Error::QubitCount(n));
        }
        Ok(PureState {
            n_qubits: n,
            amplitudes: self.amplitudes.kronecker(&other.amplitudes),
        })
    }

    pub fn inner(&self, other: &PureState) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &PureState) -> f64 {
        self.inner(other).norm_sqr()
    }
}

impl QuantumState for PureState {
    fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    fn apply(&self, u: &Unitary) -> Result<Self> {
        if u.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: u.dim(),
            });
        }
        let amplitudes = u.matrix() * &self.amplitudes;
        let norm = amplitudes.norm();
        Ok(PureState {
            n_qubits: self.n_qubits,
            amplitudes: amplitudes / C64::new(norm, 0.0),
        })
    }

    fn expectation(&self, observable: &CMatrix) -> Result<f64> {
        check_observable(observable, self.dim())?;
        // Dividing by the norm absorbs the rounding of amplitudes like 1/√2,
        // so eigenstate expectations come out exactly ±1.
        Ok(
            real_part(self.amplitudes.dotc(&(observable * &self.amplitudes)))
                / self.amplitudes.norm_squared(),
        )
    }

    fn project(&self, p: &CMatrix) -> (f64, Option<Self>) {
        let v = p * &self.amplitudes;
        let weight = v.norm_squared();
        if weight <= 0.0 {
            return (0.0, None);
        }
        let norm = weight.sqrt();
        (
            weight,
            Some(PureState {
                n_qubits: self.n_qubits,
                amplitudes: v / C64::new(norm, 0.0),
            }),
        )
    }

    fn to_mixed(&self) -> MixedState {
        let rho = &self.amplitudes * self.amplitudes.adjoint();
        let trace = real_part(rho.trace());
        MixedState {
            n_qubits: self.n_qubits,
            rho: rho.unscale(trace),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MixedState {
    n_qubits: usize,
    rho: CMatrix,
}

impl MixedState {
    /// Validates Hermiticity, unit trace and positivity (eigenvalues ≥ −1e-10).
    pub fn new(rho: CMatrix) -> Result<Self> {
        if !rho.is_square() {
            return Err(Error::DimensionMismatch {
                expected: rho.nrows(),
                found: rho.ncols(),
            });
        }
        let n_qubits = qubits_for_dim(rho.nrows())?;
        let state = MixedState { n_qubits, rho };
        state.check_invariants()?;
        Ok(state)
    }

    pub fn maximally_mixed(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::QubitCount(n_qubits));
        }
        let dim = 1 << n_qubits;
        Ok(MixedState {
            n_qubits,
            rho: identity(dim) * C64::new(1.0 / dim as f64, 0.0),
        })
    }

    /// `weight · self + (1 − weight) · other`.
    pub fn mix(&self, other: &MixedState, weight: f64) -> Result<Self> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        if !(0.0..=1.0).contains(&weight) {
            return Err(Error::InvalidParameter {
                name: "mixing weight",
                reason: format!("{weight} not in [0, 1]"),
            });
        }
        Ok(MixedState {
            n_qubits: self.n_qubits,
            rho: &self.rho * C64::new(weight, 0.0) + &other.rho * C64::new(1.0 - weight, 0.0),
        })
    }

    pub fn rho(&self) -> &CMatrix {
        &self.rho
    }

    pub fn trace(&self) -> C64 {
        self.rho.trace()
    }

    pub fn purity(&self) -> f64 {
        real_part((&self.rho * &self.rho).trace())
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self
            .rho
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    pub fn check_invariants(&self) -> Result<()> {
        let dev = hermitian_deviation(&self.rho);
        if dev > NORM_TOL {
            return Err(Error::InvalidState(format!(
                "density matrix not Hermitian ({dev:e})"
            )));
        }
        let tr = self.trace();
        if (tr - ONE).norm() > NORM_TOL {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        let min = self.eigenvalues().first().copied().unwrap_or(0.0);
        if min < -EIGEN_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }

    pub fn tensor(&self, other: &MixedState) -> Result<MixedState> {
        let n = self.n_qubits + other.n_qubits;
        if n > MAX_QUBITS {
            return Err(Error::QubitCount(n));
        }
        Ok(MixedState {
            n_qubits: n,
            rho: self.rho.kronecker(&other.rho),
        })
    }

    /// Traces out every qubit not listed in `keep`; kept qubits stay in
    /// ascending order.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<MixedState> {
        if keep.is_empty() {
            return Err(Error::EmptyKeepSet);
        }
        let n = self.n_qubits;
        let mut kept: Vec<usize> = keep.to_vec();
        kept.sort_unstable();
        for (i, &q) in kept.iter().enumerate() {
            check_qubit(q, n)?;
            if i > 0 && kept[i - 1] == q {
                return Err(Error::DuplicateTarget(q));
            }
        }
        let traced: Vec<usize> = (0..n).filter(|q| !kept.contains(q)).collect();
        let k = kept.len();
        let t = traced.len();
        let compose = |kept_bits: usize, traced_bits: usize| {
            let mut full = 0usize;
            for (pos, &q) in kept.iter().enumerate() {
                let bit = (kept_bits >> (k - 1 - pos)) & 1;
                full |= bit << (n - 1 - q);
            }
            for (pos, &q) in traced.iter().enumerate() {
                let bit = (traced_bits >> (t - 1 - pos)) & 1;
                full |= bit << (n - 1 - q);
            }
            full
        };
        let kd = 1 << k;
        let mut out = CMatrix::zeros(kd, kd);
        for r in 0..kd {
            for c in 0..kd {
                let mut acc = ZERO;
                for e in 0..(1 << t) {
                    acc += self.rho[(compose(r, e), compose(c, e))];
                }
                out[(r, c)] = acc;
            }
        }
        Ok(MixedState {
            n_qubits: k,
            rho: out,
        })
    }

    /// Applies a Kraus channel `ρ → Σ K ρ K†`.
    pub fn apply_kraus(&self, kraus: &[CMatrix]) -> Result<Self> {
        let mut rho = CMatrix::zeros(self.dim(), self.dim());
        for k in kraus {
            if k.nrows() != self.dim() {
                return Err(Error::DimensionMismatch {
                    expected: self.dim(),
                    found: k.nrows(),
                });
            }
            rho += k * &self.rho * k.adjoint();
        }
        Ok(MixedState {
            n_qubits: self.n_qubits,
            rho,
        })
    }

    pub(crate) fn from_raw(n_qubits: usize, rho: CMatrix) -> Self {
        MixedState { n_qubits, rho }
    }
}

impl QuantumState for MixedState {
    fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    fn apply(&self, u: &Unitary) -> Result<Self> {
        if u.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: u.dim(),
            });
        }
        let rho = u.matrix() * &self.rho * u.matrix().adjoint();
        Ok(MixedState {
            n_qubits: self.n_qubits,
            rho,
        })
    }

    fn expectation(&self, observable: &CMatrix) -> Result<f64> {
        check_observable(observable, self.dim())?;
        Ok(real_part((&self.rho * observable).trace()))
    }

    fn project(&self, p: &CMatrix) -> (f64, Option<Self>) {
        let rho = p * &self.rho * p.adjoint();
        let weight = real_part(rho.trace());
        if weight <= 0.0 {
            return (0.0, None);
        }
        (
            weight,
            Some(MixedState {
                n_qubits: self.n_qubits,
                rho: rho / C64::new(weight, 0.0),
            }),
        )
    }

    fn to_mixed(&self) -> MixedState {
        self.clone()
    }
}

/// Born probability of outcome `+1` for `σ_θ` on `qubit`.
pub fn outcome_probability<S: QuantumState>(state: &S, qubit: usize, theta: f64) -> Result<f64> {
    check_qubit(qubit, state.n_qubits())?;
    if !theta.is_finite() {
        return Err(Error::NonFiniteAngle(theta));
    }
    let p = embed_operator(&projector(theta, 1), qubit, state.n_qubits());
    Ok(state.expectation(&p)?.clamp(0.0, 1.0))
}

/// Collapses `qubit` onto a chosen outcome of `σ_θ`; returns the outcome's
/// probability and the post-measurement state (`None` if impossible).
pub fn condition_on<S: QuantumState>(
    state: &S,
    qubit: usize,
    theta: f64,
    outcome: i8,
) -> Result<(f64, Option<S>)> {
    check_qubit(qubit, state.n_qubits())?;
    if !theta.is_finite() {
        return Err(Error::NonFiniteAngle(theta));
    }
    let p = embed_operator(&projector(theta, outcome), qubit, state.n_qubits());
    Ok(state.project(&p))
}

/// Samples a projective `σ_θ` measurement on one qubit.
pub fn measure_qubit<S: QuantumState, R: Rng + ?Sized>(
    state: &S,
    qubit: usize,
    theta: f64,
    rng: &mut R,
) -> Result<(MeasurementRecord, S)> {
    let p_plus = outcome_probability(state, qubit, theta)?;
    let outcome: i8 = if rng.random::<f64>() < p_plus { 1 } else { -1 };
    let (_, post) = condition_on(state, qubit, theta, outcome)?;
    let post =
        post.ok_or_else(|| Error::InvalidState("sampled a zero-probability outcome".into()))?;
    Ok((
        MeasurementRecord {
            qubit_index: qubit,
            basis_angle: theta,
            outcome,
        },
        post,
    ))
}

/// Observable `σ_θ₀ ⊗ σ_θ₁ ⊗ …` for one angle per qubit.
pub fn correlator(angles: &[f64]) -> Result<CMatrix> {
    if angles.is_empty() || angles.len() > MAX_QUBITS {
        return Err(Error::QubitCount(angles.len()));
    }
    if let Some(&bad) = angles.iter().find(|a| !a.is_finite()) {
        return Err(Error::NonFiniteAngle(bad));
    }
    let ops: Vec<CMatrix> = angles.iter().map(|&t| sigma_theta(t)).collect();
    Ok(kron_all(ops.iter()))
}

/// Joint outcome distribution when every qubit is measured along its own
/// `σ_θ`; index bit `q` (qubit 0 most significant) set means outcome `−1`.
pub fn joint_distribution<S: QuantumState>(state: &S, angles: &[f64]) -> Result<Vec<f64>> {
    let n = state.n_qubits();
    if angles.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: angles.len(),
        });
    }
    // Rotate each σ_θ onto σ_z, then read the diagonal.
    let mut rotations = Vec::with_capacity(n);
    for &t in angles {
        rotations.push(rotation(Axis::Y, -t)?.into_matrix());
    }
    let u = Unitary {
        matrix: kron_all(rotations.iter()),
    };
    let rho = state.to_mixed().apply(&u)?;
    let mut probs: Vec<f64> = (0..rho.dim())
        .map(|i| rho.rho[(i, i)].re.max(0.0))
        .collect();
    let total: f64 = probs.iter().sum();
    for p in &mut probs {
        *p /= total;
    }
    Ok(probs)
}

/// Expectation of every two-qubit Pauli product `σ_a ⊗ σ_b` with
/// `a, b ∈ {I, X, Y, Z}`, indexed `[a][b]` in that order.
pub fn pauli_table<S: QuantumState>(state: &S) -> Result<[[f64; 4]; 4]> {
    if state.n_qubits() != 2 {
        return Err(Error::QubitCount(state.n_qubits()));
    }
    let basis = [identity(2), pauli(Axis::X), pauli(Axis::Y), pauli(Axis::Z)];
    let mut out = [[0.0; 4]; 4];
    for (a, pa) in basis.iter().enumerate() {
        for (b, pb) in basis.iter().enumerate() {
            out[a][b] = state.expectation(&kron(pa, pb))?;
        }
    }
    Ok(out)
}
