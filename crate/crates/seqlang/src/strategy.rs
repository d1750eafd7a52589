//! Proptest generators for random, well-formed programs.

use eprsim_core::qcore::Axis;
use proptest::prelude::*;

use crate::ast::*;
use crate::diag::Span;

pub fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![
        3 => -1000.0..1000.0f64,
        1 => prop::sample::select(vec![0.0, 1.0, 90.0, 180.0, -0.5, 1e-9, 2.5e7]),
        1 => any::<f64>().prop_filter("finite", |v| v.is_finite()),
    ]
}

pub fn angle() -> impl Strategy<Value = Angle> {
    (
        finite(),
        prop::sample::select(vec![AngleUnit::Deg, AngleUnit::Rad, AngleUnit::Bare]),
    )
        .prop_map(|(value, unit)| Angle { value, unit })
}

pub fn time() -> impl Strategy<Value = Time> {
    (
        finite().prop_map(f64::abs),
        prop::sample::select(vec![TimeUnit::Ns, TimeUnit::Us, TimeUnit::Ms, TimeUnit::S]),
    )
        .prop_map(|(value, unit)| Time { value, unit })
}

pub fn freq(non_negative: bool) -> impl Strategy<Value = Freq> {
    (
        finite().prop_map(move |v| if non_negative { v.abs() } else { v }),
        prop::sample::select(vec![FreqUnit::Hz, FreqUnit::KHz, FreqUnit::MHz]),
    )
        .prop_map(|(value, unit)| Freq { value, unit })
}

pub fn targets(n: usize) -> impl Strategy<Value = Targets> {
    prop::sample::subsequence((0..n).collect::<Vec<_>>(), 1..=n)
        .prop_shuffle()
        .prop_map(|v| v.into_iter().map(Spanned::bare).collect())
}

pub fn axis() -> impl Strategy<Value = Axis> {
    prop::sample::select(vec![Axis::X, Axis::Y, Axis::Z])
}

pub fn comment() -> impl Strategy<Value = Option<String>> {
    prop::option::of("[ a-zA-Z0-9#,.@\\[\\]µ-]{0,16}".prop_map(|s| s.trim_end().to_string()))
}

pub fn kind(n: usize) -> impl Strategy<Value = StmtKind> {
    prop_oneof![
        (
            axis(),
            angle(),
            prop::option::of(freq(true)),
            prop::option::of(time())
        )
            .prop_map(|(axis, angle, rabi, dur)| StmtKind::Pulse {
                scope: Scope::Global,
                axis,
                angle,
                targets: None,
                rabi,
                dur
            }),
        (
            axis(),
            angle(),
            targets(n),
            prop::option::of(freq(true)),
            prop::option::of(time())
        )
            .prop_map(|(axis, angle, t, rabi, dur)| StmtKind::Pulse {
                scope: Scope::Addressed,
                axis,
                angle,
                targets: Some(t),
                rabi,
                dur
            }),
        (
            any::<bool>(),
            targets(n),
            freq(false),
            prop::option::of(time())
        )
            .prop_map(|(on, targets, shift, dur)| {
                StmtKind::Ramp {
                    edge: if on { Edge::On } else { Edge::Off },
                    targets,
                    shift,
                    dur,
                }
            }),
        time().prop_map(|time| StmtKind::Wait { time }),
        (angle(), prop::option::of(targets(n)))
            .prop_map(|(basis, targets)| StmtKind::Measure { basis, targets }),
    ]
}

pub fn item(n: usize) -> impl Strategy<Value = Item> {
    prop_oneof![
        6 => (kind(n), comment()).prop_map(|(kind, comment)| Item::Stmt(Stmt {
            kind,
            span: Span::default(),
            detail: Span::default(),
            comment,
        })),
        1 => comment().prop_map(|c| Item::Comment(c.unwrap_or_default())),
        1 => Just(Item::Blank),
    ]
}

/// Programs of 1–5 sites and up to 12 body items, in the shape the parser
/// produces (no two consecutive blank lines).
pub fn program() -> impl Strategy<Value = SeqProgram> {
    (1usize..6)
        .prop_flat_map(|n| (Just(n), comment(), prop::collection::vec(item(n), 0..12)))
        .prop_map(|(n, header_comment, body)| {
            let mut items = vec![Item::Header {
                sites: Spanned::bare(n),
                comment: header_comment,
            }];
            for item in body {
                // The parser folds runs of blank lines into one.
                if item == Item::Blank && items.last() == Some(&Item::Blank) {
                    continue;
                }
                items.push(item);
            }
            SeqProgram { items }
        })
}
