//! Translation between programs and executable schedules.

use eprsim_core::control::{GateParams, PulseEvent, RampEdge, Schedule, SiteSet};
use std::f64::consts::TAU;

use crate::ast::*;
use crate::diag::{Diagnostic, Span};

/// Values used where a statement leaves an attribute out.
#[derive(Clone, Debug, PartialEq)]
pub struct LowerOptions {
    /// Rabi frequency (Hz) of pulses without `rabi`.
    pub rabi: f64,
    /// Edge duration (s) of ramps without `dur`.
    pub ramp_duration: f64,
}

impl Default for LowerOptions {
    fn default() -> Self {
        let g = GateParams::default();
        LowerOptions {
            rabi: g.rabi,
            ramp_duration: g.ramp_duration,
        }
    }
}

fn sites(targets: &Targets) -> SiteSet {
    SiteSet::new(targets.iter().map(|t| t.value))
}

pub fn lower(program: &SeqProgram) -> Result<Schedule, Vec<Diagnostic>> {
    lower_with(program, &LowerOptions::default())
}

/// Order-preserving translation to a [`Schedule`]: angles to radians, times
/// to seconds, frequencies to Hz. Pulses without `dur` last `|θ|/(2πΩ)`.
pub fn lower_with(program: &SeqProgram, opts: &LowerOptions) -> Result<Schedule, Vec<Diagnostic>> {
    let site_count = program.site_count().ok_or_else(|| {
        vec![Diagnostic::error(
            "E005",
            Span::new(1, 1, 1),
            "missing 'sites N' header",
        )]
    })?;
    let mut events = Vec::new();
    let mut errors = Vec::new();
    for stmt in program.statements() {
        let event = match &stmt.kind {
            StmtKind::Pulse {
                scope,
                axis,
                angle,
                targets,
                rabi,
                dur,
            } => {
                let theta = angle.radians();
                let rabi = rabi.map_or(opts.rabi, |f| f.hz());
                let duration = match dur {
                    Some(t) => t.seconds(),
                    None if theta == 0.0 => 0.0,
                    None if rabi > 0.0 => theta.abs() / (TAU * rabi),
                    None => {
                        errors.push(Diagnostic::error(
                            "E004",
                            stmt.span,
                            "pulse with zero Rabi frequency needs an explicit 'dur'",
                        ));
                        continue;
                    }
                };
                match (scope, targets) {
                    (Scope::Addressed, Some(t)) => PulseEvent::AddressedPulse {
                        axis: *axis,
                        angle: theta,
                        targets: sites(t),
                        duration,
                        rabi,
                    },
                    _ => PulseEvent::GlobalPulse {
                        axis: *axis,
                        angle: theta,
                        duration,
                        rabi,
                    },
                }
            }
            StmtKind::Ramp {
                edge,
                targets,
                shift,
                dur,
            } => PulseEvent::AddressingRamp {
                edge: match edge {
                    Edge::On => RampEdge::On,
                    Edge::Off => RampEdge::Off,
                },
                targets: sites(targets),
                shift: shift.hz(),
                duration: dur.map_or(opts.ramp_duration, |t| t.seconds()),
            },
            StmtKind::Wait { time } => PulseEvent::Wait {
                duration: time.seconds(),
            },
            StmtKind::Measure { basis, targets } => PulseEvent::Measure {
                basis: basis.radians(),
                targets: targets.as_ref().map_or_else(SiteSet::all, sites),
            },
        };
        // Unit conversion can overflow a finite literal.
        if !event.duration().is_finite() {
            errors.push(Diagnostic::error("E004", stmt.span, "duration overflows"));
            continue;
        }
        events.push(event);
    }
    if !errors.is_empty() {
        return Err(errors);
    }
    Schedule::new(site_count, events)
        .map_err(|e| vec![Diagnostic::error("E004", Span::new(1, 1, 1), e.to_string())])
}

fn targets_of(set: &SiteSet, site_count: usize) -> Targets {
    let all: Vec<usize> = if set.is_all() {
        (0..site_count).collect()
    } else {
        set.sites().to_vec()
    };
    all.into_iter().map(Spanned::bare).collect()
}

fn seconds(value: f64) -> Time {
    Time {
        value,
        unit: TimeUnit::S,
    }
}

fn hz(value: f64) -> Freq {
    Freq {
        value,
        unit: FreqUnit::Hz,
    }
}

/// Program that lowers back to `schedule` exactly: radians, seconds and Hz
/// with every attribute spelled out.
pub fn from_schedule(schedule: &Schedule) -> SeqProgram {
    let n = schedule.site_count();
    let mut items = vec![Item::Header {
        sites: Spanned::bare(n),
        comment: None,
    }];
    for event in schedule.events() {
        let kind = match event {
            PulseEvent::GlobalPulse {
                axis,
                angle,
                duration,
                rabi,
            } => StmtKind::Pulse {
                scope: Scope::Global,
                axis: *axis,
                angle: Angle::rad(*angle),
                targets: None,
                rabi: Some(hz(*rabi)),
                dur: Some(seconds(*duration)),
            },
            PulseEvent::AddressedPulse {
                axis,
                angle,
                targets,
                duration,
                rabi,
            } => StmtKind::Pulse {
                scope: Scope::Addressed,
                axis: *axis,
                angle: Angle::rad(*angle),
                targets: Some(targets_of(targets, n)),
                rabi: Some(hz(*rabi)),
                dur: Some(seconds(*duration)),
            },
            PulseEvent::AddressingRamp {
                edge,
                targets,
                shift,
                duration,
            } => StmtKind::Ramp {
                edge: match edge {
                    RampEdge::On => Edge::On,
                    RampEdge::Off => Edge::Off,
                },
                targets: targets_of(targets, n),
                shift: hz(*shift),
                dur: Some(seconds(*duration)),
            },
            PulseEvent::Wait { duration } => StmtKind::Wait {
                time: seconds(*duration),
            },
            PulseEvent::Measure { basis, targets } => StmtKind::Measure {
                basis: Angle::rad(*basis),
                targets: (!targets.is_all()).then(|| targets_of(targets, n)),
            },
        };
        items.push(Item::Stmt(Stmt {
            kind,
            span: Span::default(),
            detail: Span::default(),
            comment: None,
        }));
    }
    SeqProgram { items }
}
