//! Canonical pretty-printer.
//!
//! One statement per line, single spaces, `@[a,b]` target lists, attributes
//! in the order `rabi`, `dur`, trailing comments two spaces after the code.
//! Numbers print in their shortest round-trip form and keep the unit they
//! were written with (`µs` is spelled `us`).

use std::fmt::Write;

use crate::ast::*;

fn angle(a: &Angle) -> String {
    match a.unit {
        AngleUnit::Deg => format!("{}deg", a.value),
        AngleUnit::Rad => format!("{}rad", a.value),
        AngleUnit::Bare => format!("{}", a.value),
    }
}

fn time(t: &Time) -> String {
    format!("{}{}", t.value, t.unit.as_str())
}

fn freq(f: &Freq) -> String {
    format!("{}{}", f.value, f.unit.as_str())
}

fn targets(t: &Targets) -> String {
    let items: Vec<String> = t.iter().map(|s| s.value.to_string()).collect();
    format!("@[{}]", items.join(","))
}

fn statement(kind: &StmtKind) -> String {
    let mut s = String::new();
    match kind {
        StmtKind::Pulse {
            scope,
            axis,
            angle: a,
            targets: t,
            rabi,
            dur,
        } => {
            let scope = match scope {
                Scope::Global => "global",
                Scope::Addressed => "addressed",
            };
            write!(s, "pulse {scope} {} {}", axis.as_str(), angle(a)).unwrap();
            if let Some(t) = t {
                write!(s, " {}", targets(t)).unwrap();
            }
            if let Some(r) = rabi {
                write!(s, " rabi {}", freq(r)).unwrap();
            }
            if let Some(d) = dur {
                write!(s, " dur {}", time(d)).unwrap();
            }
        }
        StmtKind::Ramp {
            edge,
            targets: t,
            shift,
            dur,
        } => {
            let edge = match edge {
                Edge::On => "on",
                Edge::Off => "off",
            };
            write!(s, "ramp {edge} {} shift {}", targets(t), freq(shift)).unwrap();
            if let Some(d) = dur {
                write!(s, " dur {}", time(d)).unwrap();
            }
        }
        StmtKind::Wait { time: t } => write!(s, "wait {}", time(t)).unwrap(),
        StmtKind::Measure { basis, targets: t } => {
            write!(s, "measure basis {}", angle(basis)).unwrap();
            if let Some(t) = t {
                write!(s, " {}", targets(t)).unwrap();
            }
        }
    }
    s
}

fn with_comment(code: String, comment: &Option<String>) -> String {
    match comment {
        Some(c) => format!("{code}  #{c}"),
        None => code,
    }
}

pub fn format(program: &SeqProgram) -> String {
    let mut out = String::new();
    for item in &program.items {
        let line = match item {
            Item::Header { sites, comment } => {
                with_comment(format!("sites {}", sites.value), comment)
            }
            Item::Stmt(stmt) => with_comment(statement(&stmt.kind), &stmt.comment),
            Item::Comment(c) => format!("#{c}"),
            Item::Blank => String::new(),
        };
        out.push_str(&line);
        out.push('\n');
    }
    out
}
