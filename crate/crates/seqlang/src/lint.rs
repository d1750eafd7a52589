//! Spin-echo discipline checks. Lint findings are warnings: a program that
//! breaks them still lowers.

use eprsim_core::qcore::Axis;
use std::collections::BTreeSet;
use std::f64::consts::PI;

use crate::ast::*;
use crate::diag::{Diagnostic, Span};

fn site_set(targets: &Targets) -> BTreeSet<usize> {
    targets.iter().map(|t| t.value).collect()
}

fn is_echo_pulse(kind: &StmtKind) -> bool {
    matches!(kind, StmtKind::Pulse { scope: Scope::Global, axis: Axis::X, angle, .. }
        if (angle.radians().abs() - PI).abs() < 1e-9)
}

/// Runs every rule; diagnostics come back ordered by position.
///
/// * `W001` addressed pulse on a site outside every open ramp window
/// * `W002` addressed pulses must come in pairs `(1st, 2nd), (3rd, 4th), …`
///   separated by an odd number of global `x` π pulses
/// * `W003` ramp switched on and never switched off
/// * `W004` ramp switched off that was not on, or switched on twice
pub fn lint(program: &SeqProgram) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut open: Vec<(BTreeSet<usize>, Span)> = Vec::new();
    // (span of the first pulse of the current pair, echo count since it)
    let mut pending: Option<(Span, usize)> = None;
    for stmt in program.statements() {
        match &stmt.kind {
            StmtKind::Ramp { edge, targets, .. } => {
                let set = site_set(targets);
                let pos = open.iter().position(|(w, _)| *w == set);
                match (edge, pos) {
                    (Edge::On, None) => open.push((set, stmt.detail)),
                    (Edge::On, Some(_)) => out.push(Diagnostic::warning(
                        "W004",
                        stmt.detail,
                        format!("ramp window {} is already on", fmt_set(&set)),
                    )),
                    (Edge::Off, Some(p)) => {
                        open.remove(p);
                    }
                    (Edge::Off, None) => out.push(Diagnostic::warning(
                        "W004",
                        stmt.detail,
                        format!("ramp off for window {} that is not on", fmt_set(&set)),
                    )),
                }
            }
            StmtKind::Pulse {
                scope: Scope::Addressed,
                targets: Some(targets),
                ..
            } => {
                for site in targets {
                    if !open.iter().any(|(w, _)| w.contains(&site.value)) {
                        out.push(Diagnostic::warning(
                            "W001",
                            site.span,
                            format!(
                                "addressed pulse on site {} outside any ramp window",
                                site.value
                            ),
                        ));
                    }
                }
                pending = match pending {
                    None => Some((stmt.span, 0)),
                    Some((_, echoes)) => {
                        if echoes % 2 == 0 {
                            out.push(Diagnostic::warning(
                                "W002",
                                stmt.span,
                                format!(
                                    "unpaired echo: {echoes} global x π pulse{} between paired addressed pulses (need an odd number)",
                                    if echoes == 1 { "" } else { "s" }
                                ),
                            ));
                        }
                        None
                    }
                };
            }
            kind if is_echo_pulse(kind) => {
                if let Some((_, echoes)) = pending.as_mut() {
                    *echoes += 1;
                }
            }
            _ => {}
        }
    }
    if let Some((span, _)) = pending {
        out.push(Diagnostic::warning(
            "W002",
            span,
            "unpaired echo: addressed pulse has no echo partner",
        ));
    }
    for (set, span) in open {
        out.push(Diagnostic::warning(
            "W003",
            span,
            format!("ramp window {} is never switched off", fmt_set(&set)),
        ));
    }
    out.sort_by_key(|d| (d.line, d.col));
    out
}

fn fmt_set(set: &BTreeSet<usize>) -> String {
    let items: Vec<String> = set.iter().map(usize::to_string).collect();
    format!("@[{}]", items.join(","))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse;

    fn codes(text: &str) -> Vec<&'static str> {
        lint(&parse(text).unwrap())
            .into_iter()
            .map(|d| d.code)
            .collect()
    }

    #[test]
    fn addressed_without_ramp() {
        let d = lint(&parse("sites 4\npulse addressed x 45deg @[1,3]").unwrap());
        let w001: Vec<_> = d
            .iter()
            .filter(|d| d.code == "W001")
            .map(|d| (d.line, d.col))
            .collect();
        assert_eq!(w001, vec![(2, 27), (2, 29)]);
    }

    #[test]
    fn echo_pairing() {
        let prog = "sites 2
ramp on @[0] shift 10kHz
pulse addressed x 1 @[0]
pulse global x 180deg
pulse addressed x 1 @[0]
pulse addressed x 1 @[0]
ramp off @[0] shift 10kHz
";
        assert_eq!(codes(prog), vec!["W002"]);
        let clean = prog.replace(
            "pulse addressed x 1 @[0]\nramp off",
            "pulse addressed x 1 @[0]\npulse global x -180deg\npulse addressed x 1 @[0]\nramp off",
        );
        assert!(codes(&clean).is_empty(), "{:?}", codes(&clean));
        let even = "sites 1\nramp on @[0] shift 1Hz\npulse addressed x 1 @[0]\npulse global x 3.141592653589793\npulse global x 3.141592653589793rad\npulse addressed x 1 @[0]\nramp off @[0] shift 1Hz";
        assert_eq!(codes(even), vec!["W002"]);
    }

    #[test]
    fn ramp_rules() {
        assert_eq!(codes("sites 2\nramp on @[0] shift 1kHz"), vec!["W003"]);
        assert_eq!(codes("sites 2\nramp off @[0] shift 1kHz"), vec!["W004"]);
        assert_eq!(codes("sites 2\nramp on @[0] shift 1kHz\nramp on @[0] shift 1kHz\nramp off @[0] shift 1kHz"), vec!["W004"]);
        assert!(codes("sites 2\nramp on @[0,1] shift 1kHz\nramp off @[1,0] shift 1kHz").is_empty());
    }
}
