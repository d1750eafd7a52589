use eprsim_core::qcore::Axis;
use std::f64::consts::PI;

use crate::diag::Span;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum AngleUnit {
    Deg,
    Rad,
    /// No suffix; read as radians.
    Bare,
}

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct Angle {
    pub value: f64,
    pub unit: AngleUnit,
}

impl Angle {
    pub fn rad(value: f64) -> Self {
        Angle {
            value,
            unit: AngleUnit::Rad,
        }
    }

    pub fn deg(value: f64) -> Self {
        Angle {
            value,
            unit: AngleUnit::Deg,
        }
    }

    pub fn radians(&self) -> f64 {
        match self.unit {
            AngleUnit::Deg => self.value * (PI / 180.0),
            AngleUnit::Rad | AngleUnit::Bare => self.value,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum TimeUnit {
    Ns,
    Us,
    Ms,
    S,
}

impl TimeUnit {
    pub fn as_str(self) -> &'static str {
        match self {
            TimeUnit::Ns => "ns",
            TimeUnit::Us => "us",
            TimeUnit::Ms => "ms",
            TimeUnit::S => "s",
        }
    }

    fn scale(self) -> f64 {
        match self {
            TimeUnit::Ns => 1e9,
            TimeUnit::Us => 1e6,
            TimeUnit::Ms => 1e3,
            TimeUnit::S => 1.0,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct Time {
    pub value: f64,
    pub unit: TimeUnit,
}

impl Time {
    pub fn seconds(&self) -> f64 {
        match self.unit {
            TimeUnit::S => self.value,
            unit => self.value / unit.scale(),
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum FreqUnit {
    Hz,
    KHz,
    MHz,
}

impl FreqUnit {
    pub fn as_str(self) -> &'static str {
        match self {
            FreqUnit::Hz => "Hz",
            FreqUnit::KHz => "kHz",
            FreqUnit::MHz => "MHz",
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct Freq {
    pub value: f64,
    pub unit: FreqUnit,
}

impl Freq {
    pub fn hz(&self) -> f64 {
        match self.unit {
            FreqUnit::Hz => self.value,
            FreqUnit::KHz => self.value * 1e3,
            FreqUnit::MHz => self.value * 1e6,
        }
    }
}

/// A value together with where it was written.
#[derive(Clone, Debug, PartialEq)]
pub struct Spanned<T> {
    pub value: T,
    pub span: Span,
}

impl<T> Spanned<T> {
    pub fn new(value: T, span: Span) -> Self {
        Spanned { value, span }
    }

    pub fn bare(value: T) -> Self {
        Spanned {
            value,
            span: Span::default(),
        }
    }
}

pub type Targets = Vec<Spanned<usize>>;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Scope {
    Global,
    Addressed,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Edge {
    On,
    Off,
}

#[derive(Clone, Debug, PartialEq)]
pub enum StmtKind {
    Pulse {
        scope: Scope,
        axis: Axis,
        angle: Angle,
        targets: Option<Targets>,
        rabi: Option<Freq>,
        dur: Option<Time>,
    },
    Ramp {
        edge: Edge,
        targets: Targets,
        shift: Freq,
        dur: Option<Time>,
    },
    Wait {
        time: Time,
    },
    Measure {
        basis: Angle,
        targets: Option<Targets>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Stmt {
    pub kind: StmtKind,
    /// Span of the leading keyword.
    pub span: Span,
    /// Span of the second keyword (`global`, `on`, …) where there is one.
    pub detail: Span,
    /// Trailing comment text after `#`.
    pub comment: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Item {
    Header {
        sites: Spanned<usize>,
        comment: Option<String>,
    },
    Stmt(Stmt),
    /// Full-line comment; text after `#`.
    Comment(String),
    Blank,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SeqProgram {
    pub items: Vec<Item>,
}

impl SeqProgram {
    pub fn site_count(&self) -> Option<usize> {
        self.items.iter().find_map(|item| match item {
            Item::Header { sites, .. } => Some(sites.value),
            _ => None,
        })
    }

    pub fn statements(&self) -> impl Iterator<Item = &Stmt> {
        self.items.iter().filter_map(|item| match item {
            Item::Stmt(s) => Some(s),
            _ => None,
        })
    }
}
