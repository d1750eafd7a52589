//! Addressed single-qubit gates as timed pulse schedules over a site array.
//!
//! Static-shift model: while any addressing window is open, a site outside
//! every open window precesses about `z` at its [`SiteModel::static_shift`]
//! (linear ramp edges count half). Sites inside an open window are driven in
//! the frame of their shifted transition, so they pick up no extra phase.
//! Pulses are ideal rotations; their Rabi frequency and duration only feed
//! the crosstalk estimate.

use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::noise::{coherence_factor, dephase, NoiseConfig};
use crate::qcore::{
    kron_all, pauli, Axis, CMatrix, MixedState, PureState, QuantumState, Unitary, C64,
};

/// Square-pulse power spectrum `sinc²(π f τ)` falls to one half at
/// `f = SQUARE_PULSE_HWHM / τ`.
pub const SQUARE_PULSE_HWHM: f64 = 0.442_946_470_689_452_3;

/// Sorted, de-duplicated site indices. For ramps and measurements an empty
/// set means every site.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SiteSet(Vec<usize>);

impl SiteSet {
    pub fn new(sites: impl IntoIterator<Item = usize>) -> Self {
        let mut v: Vec<usize> = sites.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        SiteSet(v)
    }

    pub fn all() -> Self {
        SiteSet(Vec::new())
    }

    pub fn is_all(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, site: usize) -> bool {
        self.0.is_empty() || self.0.binary_search(&site).is_ok()
    }

    pub fn sites(&self) -> &[usize] {
        &self.0
    }

    pub fn max(&self) -> Option<usize> {
        self.0.last().copied()
    }
}

impl From<&[usize]> for SiteSet {
    fn from(sites: &[usize]) -> Self {
        SiteSet::new(sites.iter().copied())
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RampEdge {
    On,
    Off,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PulseEvent {
    GlobalPulse {
        axis: Axis,
        angle: f64,
        duration: f64,
        rabi: f64,
    },
    AddressedPulse {
        axis: Axis,
        angle: f64,
        targets: SiteSet,
        duration: f64,
        rabi: f64,
    },
    AddressingRamp {
        edge: RampEdge,
        targets: SiteSet,
        /// Light shift on the addressed sites, Hz.
        shift: f64,
        duration: f64,
    },
    Wait {
        duration: f64,
    },
    /// Readout marker; identity for the unitary part of a schedule.
    Measure {
        basis: f64,
        targets: SiteSet,
    },
}

impl PulseEvent {
    pub fn duration(&self) -> f64 {
        match self {
            PulseEvent::GlobalPulse { duration, .. }
            | PulseEvent::AddressedPulse { duration, .. }
            | PulseEvent::AddressingRamp { duration, .. }
            | PulseEvent::Wait { duration } => *duration,
            PulseEvent::Measure { .. } => 0.0,
        }
    }

    fn targets(&self) -> Option<&SiteSet> {
        match self {
            PulseEvent::AddressedPulse { targets, .. }
            | PulseEvent::AddressingRamp { targets, .. }
            | PulseEvent::Measure { targets, .. } => Some(targets),
            _ => None,
        }
    }

    fn validate(&self, index: usize, site_count: usize) -> Result<()> {
        let bad = |name: &'static str, reason: String| Error::InvalidParameter { name, reason };
        let d = self.duration();
        if !(d >= 0.0 && d.is_finite()) {
            return Err(bad(
                "duration",
                format!("event {index}: {d} must be finite and >= 0"),
            ));
        }
        match self {
            PulseEvent::GlobalPulse { angle, .. } | PulseEvent::AddressedPulse { angle, .. }
                if !angle.is_finite() =>
            {
                return Err(Error::NonFiniteAngle(*angle))
            }
            PulseEvent::Measure { basis, .. } if !basis.is_finite() => {
                return Err(Error::NonFiniteAngle(*basis))
            }
            PulseEvent::AddressingRamp { shift, .. } if !shift.is_finite() => {
                return Err(bad("shift", format!("event {index}: shift must be finite")))
            }
            PulseEvent::AddressedPulse { targets, .. } if targets.is_all() => {
                return Err(Error::EmptyTargets)
            }
            _ => {}
        }
        if let Some(max) = self.targets().and_then(SiteSet::max) {
            if max >= site_count {
                return Err(Error::SiteOutOfRange {
                    site: max,
                    site_count,
                });
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    site_count: usize,
    events: Vec<PulseEvent>,
}

impl Schedule {
    /// Checks per-event invariants. Ramp nesting is checked lazily by
    /// [`Schedule::check_ramps`] so that lint-level problems stay representable.
    pub fn new(site_count: usize, events: Vec<PulseEvent>) -> Result<Self> {
        if site_count == 0 {
            return Err(Error::InvalidParameter {
                name: "site_count",
                reason: "must be at least 1".into(),
            });
        }
        for (i, e) in events.iter().enumerate() {
            e.validate(i, site_count)?;
        }
        Ok(Schedule { site_count, events })
    }

    pub fn site_count(&self) -> usize {
        self.site_count
    }

    pub fn events(&self) -> &[PulseEvent] {
        &self.events
    }

    pub fn duration(&self) -> f64 {
        self.events.iter().map(PulseEvent::duration).sum()
    }

    /// Whether any addressed pulse acts on `site`.
    pub fn addresses(&self, site: usize) -> bool {
        self.events.iter().any(|e| match e {
            PulseEvent::AddressedPulse { targets, .. } => targets.contains(site),
            _ => false,
        })
    }

    /// Every `ramp on` must be closed by a `ramp off` on the same site set,
    /// with no re-opening of a window that is already open.
    pub fn check_ramps(&self) -> Result<()> {
        let mut open: Vec<&SiteSet> = Vec::new();
        for (i, e) in self.events.iter().enumerate() {
            if let PulseEvent::AddressingRamp { edge, targets, .. } = e {
                match edge {
                    RampEdge::On => {
                        if open.contains(&targets) {
                            return Err(Error::RampNesting(format!(
                                "event {i}: window {:?} already open",
                                targets.sites()
                            )));
                        }
                        open.push(targets);
                    }
                    RampEdge::Off => match open.iter().position(|w| *w == targets) {
                        Some(pos) => {
                            open.remove(pos);
                        }
                        None => {
                            return Err(Error::RampNesting(format!(
                                "event {i}: ramp off for unopened window {:?}",
                                targets.sites()
                            )))
                        }
                    },
                }
            }
        }
        if let Some(w) = open.first() {
            return Err(Error::RampNesting(format!(
                "window {:?} never closed",
                w.sites()
            )));
        }
        Ok(())
    }

    /// Readout angles in event order.
    pub fn readouts(&self) -> Vec<(f64, &SiteSet)> {
        self.events
            .iter()
            .filter_map(|e| match e {
                PulseEvent::Measure { basis, targets } => Some((*basis, targets)),
                _ => None,
            })
            .collect()
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SiteModel {
    pub is_target: bool,
    /// Phase rate (Hz) while addressing is active elsewhere.
    pub static_shift: f64,
    /// Detuning of the auxiliary-state coupling (Hz); informational for
    /// Scheme II sites.
    pub aux_detuning: f64,
}

impl SiteModel {
    pub fn target() -> Self {
        SiteModel {
            is_target: true,
            static_shift: 0.0,
            aux_detuning: 0.0,
        }
    }

    pub fn non_target(static_shift: f64) -> Self {
        SiteModel {
            is_target: false,
            static_shift,
            aux_detuning: 0.0,
        }
    }

    /// Spectator site seeing an off-resonant drive of Rabi frequency `rabi`
    /// detuned by `detuning`: AC Zeeman shift `Ω²/(4Δ)`.
    pub fn off_resonant(rabi: f64, detuning: f64) -> Self {
        SiteModel {
            is_target: false,
            static_shift: rabi * rabi / (4.0 * detuning),
            aux_detuning: detuning,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.static_shift.is_finite() && self.aux_detuning.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidParameter {
                name: "site model",
                reason: "shifts must be finite".into(),
            })
        }
    }
}

/// One model per site: targets where the schedule addresses the site,
/// spectators with `static_shift` elsewhere.
pub fn site_models(schedule: &Schedule, static_shift: f64) -> Vec<SiteModel> {
    (0..schedule.site_count())
        .map(|s| {
            if schedule.addresses(s) {
                SiteModel::target()
            } else {
                SiteModel::non_target(static_shift)
            }
        })
        .collect()
}

/// Timing used by the scheme generators.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GateParams {
    pub site_count: usize,
    /// Rabi frequency of every RF/MW pulse, Hz.
    pub rabi: f64,
    /// Addressing light shift Δ, Hz.
    pub shift: f64,
    /// Duration of each linear ramp edge, seconds.
    pub ramp_duration: f64,
}

impl Default for GateParams {
    fn default() -> Self {
        GateParams {
            site_count: 2,
            rabi: 1e3,
            shift: 1e4,
            ramp_duration: 100e-6,
        }
    }
}

impl GateParams {
    pub fn pulse_duration(&self, angle: f64) -> f64 {
        angle.abs() / (TAU * self.rabi)
    }

    fn global(&self, axis: Axis, angle: f64) -> PulseEvent {
        PulseEvent::GlobalPulse {
            axis,
            angle,
            duration: self.pulse_duration(angle),
            rabi: self.rabi,
        }
    }

    /// Ramp on, addressed pulse, ramp off.
    fn addressed(&self, axis: Axis, angle: f64, targets: &SiteSet) -> [PulseEvent; 3] {
        let ramp = |edge| PulseEvent::AddressingRamp {
            edge,
            targets: targets.clone(),
            shift: self.shift,
            duration: self.ramp_duration,
        };
        [
            ramp(RampEdge::On),
            PulseEvent::AddressedPulse {
                axis,
                angle,
                targets: targets.clone(),
                duration: self.pulse_duration(angle),
                rabi: self.rabi,
            },
            ramp(RampEdge::Off),
        ]
    }
}

fn gate_preconditions(theta: f64, targets: &[usize]) -> Result<SiteSet> {
    if !theta.is_finite() {
        return Err(Error::NonFiniteAngle(theta));
    }
    if theta.abs() > 2.0 * PI + 1e-12 {
        return Err(Error::InvalidParameter {
            name: "theta",
            reason: format!("{theta} outside [-2π, 2π]"),
        });
    }
    if targets.is_empty() {
        return Err(Error::EmptyTargets);
    }
    Ok(SiteSet::from(targets))
}

/// Scheme I: `R_x^ad(θ/2) · R_x^gl(π) · R_x^ad(θ/2) · R_x^gl(−π)`, emitted in
/// time order (rightmost factor first).
pub fn scheme1_sequence(theta: f64, targets: &[usize], params: &GateParams) -> Result<Schedule> {
    let set = gate_preconditions(theta, targets)?;
    let mut events = vec![params.global(Axis::X, -PI)];
    events.extend(params.addressed(Axis::X, theta / 2.0, &set));
    events.push(params.global(Axis::X, PI));
    events.extend(params.addressed(Axis::X, theta / 2.0, &set));
    Schedule::new(params.site_count, events)
}

/// Scheme II: `R_y^gl(−π/2) · R_z^ad(−θ/2) · R_x^gl(π) · R_z^ad(θ/2) · R_y^gl(π/2)`
/// preceded by a zero-duration frame rotation `R_z(−π)`.
///
/// The second addressed phase is emitted with flipped sign because the echo
/// pulse inverts the logical phase accumulated after it; the frame rotation
/// removes the `R_z(π)` left behind by the `y`-conjugated echo. With both,
/// the target composite is `R_x(θ)` and spectators see the identity.
pub fn scheme2_sequence(theta: f64, targets: &[usize], params: &GateParams) -> Result<Schedule> {
    let set = gate_preconditions(theta, targets)?;
    let mut events = vec![
        PulseEvent::GlobalPulse {
            axis: Axis::Z,
            angle: -PI,
            duration: 0.0,
            rabi: 0.0,
        },
        params.global(Axis::Y, PI / 2.0),
    ];
    events.extend(params.addressed(Axis::Z, theta / 2.0, &set));
    events.push(params.global(Axis::X, PI));
    events.extend(params.addressed(Axis::Z, -theta / 2.0, &set));
    events.push(params.global(Axis::Y, -PI / 2.0));
    Schedule::new(params.site_count, events)
}

/// Scheme II read literally, with both addressed phases `+θ/2` and no frame
/// rotation. Kept as a negative control: the addressed phases cancel.
pub fn scheme2_literal_sequence(
    theta: f64,
    targets: &[usize],
    params: &GateParams,
) -> Result<Schedule> {
    let set = gate_preconditions(theta, targets)?;
    let mut events = vec![params.global(Axis::Y, PI / 2.0)];
    events.extend(params.addressed(Axis::Z, theta / 2.0, &set));
    events.push(params.global(Axis::X, PI));
    events.extend(params.addressed(Axis::Z, theta / 2.0, &set));
    events.push(params.global(Axis::Y, -PI / 2.0));
    Schedule::new(params.site_count, events)
}

/// `exp(−i (a·σ) / 2)` for a rotation vector `a = angle · n`.
fn vector_rotation(v: [f64; 3]) -> CMatrix {
    let angle = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if angle == 0.0 {
        return CMatrix::identity(2, 2);
    }
    let (s, c) = (angle / 2.0).sin_cos();
    let gen = pauli(Axis::X) * C64::new(v[0] / angle, 0.0)
        + pauli(Axis::Y) * C64::new(v[1] / angle, 0.0)
        + pauli(Axis::Z) * C64::new(v[2] / angle, 0.0);
    CMatrix::identity(2, 2) * C64::new(c, 0.0) - gen * C64::new(0.0, s)
}

fn axis_vector(axis: Axis, angle: f64) -> [f64; 3] {
    match axis {
        Axis::X => [angle, 0.0, 0.0],
        Axis::Y => [0.0, angle, 0.0],
        Axis::Z => [0.0, 0.0, angle],
    }
}

/// Per-event single-site propagators for `site` (`None` = a spectator that
/// no event targets).
fn event_propagators(
    schedule: &Schedule,
    site: Option<usize>,
    model: &SiteModel,
) -> Result<Vec<CMatrix>> {
    schedule.check_ramps()?;
    model.validate()?;
    let inside = |set: &SiteSet| site.is_some_and(|s| set.contains(s));
    let mut open: Vec<&SiteSet> = Vec::new();
    let mut out = Vec::with_capacity(schedule.events.len());
    for e in &schedule.events {
        // Fraction of the event during which a spectator precesses.
        let spectator = |open: &[&SiteSet]| !open.is_empty() && !open.iter().any(|w| inside(w));
        let phase = |weight: f64| TAU * model.static_shift * e.duration() * weight;
        let u = match e {
            PulseEvent::GlobalPulse { axis, angle, .. } => {
                let mut v = axis_vector(*axis, *angle);
                if spectator(&open) {
                    v[2] += phase(1.0);
                }
                vector_rotation(v)
            }
            PulseEvent::AddressedPulse {
                axis,
                angle,
                targets,
                ..
            } => {
                if inside(targets) {
                    vector_rotation(axis_vector(*axis, *angle))
                } else if spectator(&open) {
                    vector_rotation([0.0, 0.0, phase(1.0)])
                } else {
                    CMatrix::identity(2, 2)
                }
            }
            PulseEvent::AddressingRamp { edge, targets, .. } => {
                let mut during = open.clone();
                if *edge == RampEdge::On {
                    during.push(targets);
                }
                let u = if spectator(&during) {
                    vector_rotation([0.0, 0.0, phase(0.5)])
                } else {
                    CMatrix::identity(2, 2)
                };
                match edge {
                    RampEdge::On => open.push(targets),
                    RampEdge::Off => {
                        let pos = open
                            .iter()
                            .position(|w| *w == targets)
                            .expect("checked nesting");
                        open.remove(pos);
                    }
                }
                u
            }
            PulseEvent::Wait { .. } => {
                if spectator(&open) {
                    vector_rotation([0.0, 0.0, phase(1.0)])
                } else {
                    CMatrix::identity(2, 2)
                }
            }
            PulseEvent::Measure { .. } => CMatrix::identity(2, 2),
        };
        out.push(u);
    }
    Ok(out)
}

fn check_site(schedule: &Schedule, site: usize, model: &SiteModel) -> Result<()> {
    if site >= schedule.site_count {
        return Err(Error::SiteOutOfRange {
            site,
            site_count: schedule.site_count,
        });
    }
    let addressed = schedule.addresses(site);
    if model.is_target != addressed {
        return Err(Error::SiteModelMismatch {
            site,
            reason: format!(
                "model.is_target = {} but schedule addresses site: {addressed}",
                model.is_target
            ),
        });
    }
    Ok(())
}

/// Product of the event propagators for one site, in time order.
pub fn composite_unitary(schedule: &Schedule, site: usize, model: &SiteModel) -> Result<Unitary> {
    check_site(schedule, site, model)?;
    fold(event_propagators(schedule, Some(site), model)?)
}

/// Composite for a site that no event targets.
pub fn spectator_unitary(schedule: &Schedule, model: &SiteModel) -> Result<Unitary> {
    fold(event_propagators(schedule, None, model)?)
}

fn fold(props: Vec<CMatrix>) -> Result<Unitary> {
    let m = props
        .into_iter()
        .fold(CMatrix::identity(2, 2), |acc, u| u * acc);
    Unitary::new(m)
}

fn check_models(schedule: &Schedule, n_qubits: usize, models: &[SiteModel]) -> Result<()> {
    if n_qubits != schedule.site_count {
        return Err(Error::DimensionMismatch {
            expected: schedule.site_count,
            found: n_qubits,
        });
    }
    if models.len() != schedule.site_count {
        return Err(Error::DimensionMismatch {
            expected: schedule.site_count,
            found: models.len(),
        });
    }
    for (site, m) in models.iter().enumerate() {
        check_site(schedule, site, m)?;
    }
    Ok(())
}

/// Runs `schedule` on a register with one qubit per site.
///
/// Without noise this applies `⊗ composite_unitary(site)`. With noise each
/// event is followed by independent phase damping over its duration.
pub fn simulate_schedule(
    schedule: &Schedule,
    state: &MixedState,
    models: &[SiteModel],
    noise: Option<&NoiseConfig>,
) -> Result<MixedState> {
    check_models(schedule, state.n_qubits(), models)?;
    let per_site: Vec<Vec<CMatrix>> = models
        .iter()
        .enumerate()
        .map(|(site, m)| event_propagators(schedule, Some(site), m))
        .collect::<Result<_>>()?;
    match noise {
        None => {
            let composites: Vec<CMatrix> = per_site
                .into_iter()
                .map(|p| fold(p).map(Unitary::into_matrix))
                .collect::<Result<_>>()?;
            state.apply(&Unitary::new(kron_all(composites.iter()))?)
        }
        Some(cfg) => {
            cfg.validate()?;
            let mut rho = state.clone();
            for (k, e) in schedule.events.iter().enumerate() {
                let u = Unitary::new(kron_all(per_site.iter().map(|p| &p[k])))?;
                rho = rho.apply(&u)?;
                rho = dephase(&rho, coherence_factor(e.duration(), cfg.t2_prime));
            }
            Ok(rho)
        }
    }
}

/// Noise-free evolution of a pure register.
pub fn evolve_pure(
    schedule: &Schedule,
    state: &PureState,
    models: &[SiteModel],
) -> Result<PureState> {
    check_models(schedule, state.n_qubits(), models)?;
    let composites: Vec<CMatrix> = models
        .iter()
        .enumerate()
        .map(|(site, m)| composite_unitary(schedule, site, m).map(Unitary::into_matrix))
        .collect::<Result<_>>()?;
    state.apply(&Unitary::new(kron_all(composites.iter()))?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PulseSpectrum {
    pub event_index: usize,
    pub duration: f64,
    /// Fourier half-width at half-maximum of the square pulse, Hz.
    pub hwhm: f64,
    /// `Δ / HWHM`.
    pub shift_to_hwhm: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrosstalkReport {
    pub rabi: f64,
    pub shift: f64,
    /// Phase-insensitive distance between a spectator's composite with and
    /// without its AC Zeeman shift `Ω²/(4Δ)`.
    pub first_order_residual: f64,
    /// `(Ω / 2Δ)²`, the off-resonant admixture per addressed pulse.
    pub leakage_per_pulse: f64,
    pub addressed_pulses: usize,
    pub total_leakage: f64,
    pub pulses: Vec<PulseSpectrum>,
}

pub fn leakage_estimate(rabi: f64, shift: f64) -> f64 {
    (rabi / (2.0 * shift)).powi(2)
}

pub fn fourier_hwhm(duration: f64) -> f64 {
    SQUARE_PULSE_HWHM / duration
}

pub fn crosstalk_report(schedule: &Schedule, rabi: f64, shift: f64) -> Result<CrosstalkReport> {
    if !(shift > 0.0 && shift.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "shift",
            reason: format!("Δ = {shift} must be positive"),
        });
    }
    if !(rabi >= 0.0 && rabi.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "rabi",
            reason: format!("Ω = {rabi} must be non-negative"),
        });
    }
    let shifted = spectator_unitary(schedule, &SiteModel::off_resonant(rabi, shift))?;
    let bare = spectator_unitary(schedule, &SiteModel::non_target(0.0))?;
    let pulses: Vec<PulseSpectrum> = schedule
        .events
        .iter()
        .enumerate()
        .filter_map(|(i, e)| match e {
            PulseEvent::AddressedPulse { duration, .. } if *duration > 0.0 => {
                let hwhm = fourier_hwhm(*duration);
                Some(PulseSpectrum {
                    event_index: i,
                    duration: *duration,
                    hwhm,
                    shift_to_hwhm: shift / hwhm,
                })
            }
            _ => None,
        })
        .collect();
    let addressed_pulses = schedule
        .events
        .iter()
        .filter(|e| matches!(e, PulseEvent::AddressedPulse { .. }))
        .count();
    let leakage = leakage_estimate(rabi, shift);
    Ok(CrosstalkReport {
        rabi,
        shift,
        first_order_residual: shifted.phase_distance(&bare),
        leakage_per_pulse: leakage,
        addressed_pulses,
        total_leakage: leakage * addressed_pulses as f64,
        pulses,
    })
}
