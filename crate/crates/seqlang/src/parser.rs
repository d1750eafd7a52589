//! Line-oriented parser. Each line is parsed on its own, so an error costs
//! at most the statement it occurs in.

use eprsim_core::qcore::Axis;

use crate::ast::*;
use crate::diag::{Diagnostic, Span};
use crate::lexer::{lex_line, Token, TokenKind};

/// Parse result with every error found; `program` holds the lines that
/// parsed cleanly.
#[derive(Clone, Debug, PartialEq)]
pub struct Parsed {
    pub program: SeqProgram,
    pub errors: Vec<Diagnostic>,
}

/// Parses `text`, returning the program or all error diagnostics.
pub fn parse(text: &str) -> Result<SeqProgram, Vec<Diagnostic>> {
    let parsed = parse_recovering(text);
    if parsed.errors.is_empty() {
        Ok(parsed.program)
    } else {
        Err(parsed.errors)
    }
}

pub fn parse_recovering(text: &str) -> Parsed {
    let mut program = SeqProgram::default();
    let mut errors = Vec::new();
    let mut site_count: Option<usize> = None;
    let mut seen_header = false;
    let mut last_blank = false;
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let lexed = match lex_line(line, line_no) {
            Ok(l) => l,
            Err(d) => {
                errors.push(d);
                last_blank = false;
                continue;
            }
        };
        if lexed.tokens.is_empty() {
            let blank = lexed.comment.is_none();
            match lexed.comment {
                Some(c) => program.items.push(Item::Comment(c)),
                None if !last_blank => program.items.push(Item::Blank),
                None => {}
            }
            last_blank = blank;
            continue;
        }
        last_blank = false;
        let mut cursor = Cursor::new(&lexed.tokens, line_no, line.chars().count());
        let first = &lexed.tokens[0];
        let is_header = matches!(&first.kind, TokenKind::Word(w) if w == "sites");
        if is_header {
            match cursor.header() {
                Ok(_) if seen_header => {
                    errors.push(Diagnostic::error(
                        "E005",
                        first.span,
                        "duplicate 'sites' header",
                    ));
                }
                Ok(sites) => {
                    site_count = Some(sites.value);
                    program.items.push(Item::Header {
                        sites,
                        comment: lexed.comment,
                    });
                }
                Err(d) => errors.push(d),
            }
            seen_header = true;
            continue;
        }
        if !seen_header {
            errors.push(Diagnostic::error(
                "E005",
                first.span,
                "program must start with a 'sites N' header",
            ));
            seen_header = true;
        }
        match cursor.statement(site_count) {
            Ok((kind, detail)) => program.items.push(Item::Stmt(Stmt {
                kind,
                span: first.span,
                detail,
                comment: lexed.comment,
            })),
            Err(d) => errors.push(d),
        }
    }
    if !seen_header {
        errors.push(Diagnostic::error(
            "E005",
            Span::new(1, 1, 1),
            "missing 'sites N' header",
        ));
    }
    Parsed { program, errors }
}

struct Cursor<'a> {
    tokens: &'a [Token],
    pos: usize,
    line: usize,
    line_len: usize,
}

type PResult<T> = Result<T, Diagnostic>;

impl<'a> Cursor<'a> {
    fn new(tokens: &'a [Token], line: usize, line_len: usize) -> Self {
        Cursor {
            tokens,
            pos: 0,
            line,
            line_len,
        }
    }

    fn peek(&self) -> Option<&'a Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<&'a Token> {
        let t = self.tokens.get(self.pos);
        self.pos += 1;
        t
    }

    /// Position just past the end of the line, for "expected …" errors.
    fn eol(&self) -> Span {
        Span::new(self.line, self.line_len + 1, 1)
    }

    fn expect_any(&mut self, what: &str) -> PResult<&'a Token> {
        let eol = self.eol();
        self.next().ok_or_else(|| {
            Diagnostic::error("E003", eol, format!("expected {what}, found end of line"))
        })
    }

    fn word(&mut self, what: &str) -> PResult<(&'a str, Span)> {
        let t = self.expect_any(what)?;
        match &t.kind {
            TokenKind::Word(w) => Ok((w.as_str(), t.span)),
            _ => Err(Diagnostic::error(
                "E003",
                t.span,
                format!("expected {what}"),
            )),
        }
    }

    fn keyword(&mut self, kw: &str) -> PResult<Span> {
        let (w, span) = self.word(&format!("'{kw}'"))?;
        if w == kw {
            Ok(span)
        } else {
            Err(Diagnostic::error(
                "E003",
                span,
                format!("expected '{kw}', found '{w}'"),
            ))
        }
    }

    fn number(&mut self, what: &str) -> PResult<(f64, &'a str, Span)> {
        let t = self.expect_any(what)?;
        match &t.kind {
            TokenKind::Number { text, suffix } => {
                let value: f64 = text.parse().map_err(|_| {
                    Diagnostic::error("E001", t.span, format!("malformed number '{text}'"))
                })?;
                if !value.is_finite() {
                    return Err(Diagnostic::error(
                        "E004",
                        t.span,
                        format!("{what} '{text}' is not finite"),
                    ));
                }
                Ok((value, suffix.as_str(), t.span))
            }
            _ => Err(Diagnostic::error(
                "E003",
                t.span,
                format!("expected {what}"),
            )),
        }
    }

    fn integer(&mut self, what: &str) -> PResult<Spanned<usize>> {
        let t = self.expect_any(what)?;
        match &t.kind {
            TokenKind::Number { text, suffix }
                if suffix.is_empty() && text.chars().all(|c| c.is_ascii_digit()) =>
            {
                let value = text.parse().map_err(|_| {
                    Diagnostic::error("E004", t.span, format!("{what} '{text}' is too large"))
                })?;
                Ok(Spanned::new(value, t.span))
            }
            _ => Err(Diagnostic::error(
                "E003",
                t.span,
                format!("expected {what} (non-negative integer)"),
            )),
        }
    }

    fn angle(&mut self) -> PResult<Angle> {
        let (value, suffix, span) = self.number("angle")?;
        let unit = match suffix {
            "" => AngleUnit::Bare,
            "deg" => AngleUnit::Deg,
            "rad" => AngleUnit::Rad,
            other => {
                return Err(Diagnostic::error(
                    "E006",
                    span,
                    format!("unknown angle unit '{other}' (use deg or rad)"),
                ))
            }
        };
        Ok(Angle { value, unit })
    }

    fn time(&mut self) -> PResult<Time> {
        let (value, suffix, span) = self.number("time")?;
        let unit = match suffix {
            "ns" => TimeUnit::Ns,
            "us" | "µs" | "μs" => TimeUnit::Us,
            "ms" => TimeUnit::Ms,
            "s" => TimeUnit::S,
            "" => {
                return Err(Diagnostic::error(
                    "E006",
                    span,
                    "time needs a unit (ns, us, ms or s)",
                ))
            }
            other => {
                return Err(Diagnostic::error(
                    "E006",
                    span,
                    format!("unknown time unit '{other}'"),
                ))
            }
        };
        if value < 0.0 {
            return Err(Diagnostic::error("E004", span, "time must be non-negative"));
        }
        Ok(Time { value, unit })
    }

    fn freq(&mut self) -> PResult<Freq> {
        let (value, suffix, span) = self.number("frequency")?;
        let unit = match suffix {
            "Hz" => FreqUnit::Hz,
            "kHz" => FreqUnit::KHz,
            "MHz" => FreqUnit::MHz,
            "" => {
                return Err(Diagnostic::error(
                    "E006",
                    span,
                    "frequency needs a unit (Hz, kHz or MHz)",
                ))
            }
            other => {
                return Err(Diagnostic::error(
                    "E006",
                    span,
                    format!("unknown frequency unit '{other}'"),
                ))
            }
        };
        Ok(Freq { value, unit })
    }

    fn at_targets(&self) -> bool {
        matches!(self.peek().map(|t| &t.kind), Some(TokenKind::TargetsOpen))
    }

    fn targets(&mut self, site_count: Option<usize>) -> PResult<Targets> {
        let open = self.expect_any("'@['")?;
        if open.kind != TokenKind::TargetsOpen {
            return Err(Diagnostic::error(
                "E003",
                open.span,
                "expected target list '@[...]'",
            ));
        }
        let mut out: Targets = Vec::new();
        loop {
            let site = self.integer("site index")?;
            if let Some(n) = site_count {
                if site.value >= n {
                    return Err(Diagnostic::error(
                        "E004",
                        site.span,
                        format!("site {} out of range for {n} sites", site.value),
                    ));
                }
            }
            if out.iter().any(|s| s.value == site.value) {
                return Err(Diagnostic::error(
                    "E004",
                    site.span,
                    format!("duplicate site {}", site.value),
                ));
            }
            out.push(site);
            let sep = self.expect_any("',' or ']'")?;
            match sep.kind {
                TokenKind::Comma => continue,
                TokenKind::Close => break,
                _ => return Err(Diagnostic::error("E003", sep.span, "expected ',' or ']'")),
            }
        }
        Ok(out)
    }

    fn finish(&mut self) -> PResult<()> {
        match self.peek() {
            None => Ok(()),
            Some(t) => Err(Diagnostic::error("E003", t.span, "unexpected token")),
        }
    }

    fn header(&mut self) -> PResult<Spanned<usize>> {
        self.keyword("sites")?;
        let n = self.integer("site count").map_err(|mut d| {
            d.code = "E005";
            d
        })?;
        if n.value == 0 {
            return Err(Diagnostic::error(
                "E005",
                n.span,
                "site count must be at least 1",
            ));
        }
        self.finish()?;
        Ok(n)
    }

    fn statement(&mut self, site_count: Option<usize>) -> PResult<(StmtKind, Span)> {
        let (kw, kw_span) = self.word("statement")?;
        let (kind, detail) = match kw {
            "pulse" => self.pulse(site_count)?,
            "ramp" => {
                let (edge, span) = self.word("'on' or 'off'")?;
                let edge = match edge {
                    "on" => Edge::On,
                    "off" => Edge::Off,
                    other => {
                        return Err(Diagnostic::error(
                            "E003",
                            span,
                            format!("expected 'on' or 'off', found '{other}'"),
                        ))
                    }
                };
                let targets = self.targets(site_count)?;
                self.keyword("shift")?;
                let shift = self.freq()?;
                let dur = self.optional_dur()?;
                (
                    StmtKind::Ramp {
                        edge,
                        targets,
                        shift,
                        dur,
                    },
                    span,
                )
            }
            "wait" => (StmtKind::Wait { time: self.time()? }, kw_span),
            "measure" => {
                let span = self.keyword("basis")?;
                let basis = self.angle()?;
                let targets = if self.at_targets() {
                    Some(self.targets(site_count)?)
                } else {
                    None
                };
                (StmtKind::Measure { basis, targets }, span)
            }
            other => {
                return Err(Diagnostic::error(
                    "E003",
                    kw_span,
                    format!("unknown statement '{other}'"),
                ))
            }
        };
        self.finish()?;
        Ok((kind, detail))
    }

    fn optional_dur(&mut self) -> PResult<Option<Time>> {
        if matches!(self.peek().map(|t| &t.kind), Some(TokenKind::Word(w)) if w == "dur") {
            self.next();
            Ok(Some(self.time()?))
        } else {
            Ok(None)
        }
    }

    fn pulse(&mut self, site_count: Option<usize>) -> PResult<(StmtKind, Span)> {
        let (scope_word, scope_span) = self.word("'global' or 'addressed'")?;
        let scope = match scope_word {
            "global" => Scope::Global,
            "addressed" => Scope::Addressed,
            other => {
                return Err(Diagnostic::error(
                    "E003",
                    scope_span,
                    format!("expected 'global' or 'addressed', found '{other}'"),
                ))
            }
        };
        let axis_tok = self.expect_any("axis")?;
        let axis = match &axis_tok.kind {
            TokenKind::Word(w) if w == "x" => Axis::X,
            TokenKind::Word(w) if w == "y" => Axis::Y,
            TokenKind::Word(w) if w == "z" => Axis::Z,
            TokenKind::Word(w) => {
                return Err(Diagnostic::error(
                    "E002",
                    axis_tok.span,
                    format!("unknown axis '{w}' (expected x, y or z)"),
                ))
            }
            _ => {
                return Err(Diagnostic::error(
                    "E002",
                    axis_tok.span,
                    "expected axis x, y or z",
                ))
            }
        };
        let angle = self.angle()?;
        let targets = if self.at_targets() {
            let open_span = self.peek().expect("peeked").span;
            let t = self.targets(site_count)?;
            if scope == Scope::Global {
                return Err(Diagnostic::error(
                    "E007",
                    open_span,
                    "global pulse cannot take targets",
                ));
            }
            Some(t)
        } else {
            if scope == Scope::Addressed {
                return Err(Diagnostic::error(
                    "E007",
                    scope_span,
                    "addressed pulse needs a target list '@[...]'",
                ));
            }
            None
        };
        let (mut rabi, mut dur) = (None, None);
        while let Some(t) = self.peek() {
            match &t.kind {
                TokenKind::Word(w) if w == "rabi" && rabi.is_none() => {
                    self.next();
                    let f = self.freq()?;
                    if f.value < 0.0 {
                        return Err(Diagnostic::error(
                            "E004",
                            t.span,
                            "rabi frequency must be non-negative",
                        ));
                    }
                    rabi = Some(f);
                }
                TokenKind::Word(w) if w == "dur" && dur.is_none() => {
                    self.next();
                    dur = Some(self.time()?);
                }
                _ => break,
            }
        }
        Ok((
            StmtKind::Pulse {
                scope,
                axis,
                angle,
                targets,
                rabi,
                dur,
            },
            scope_span,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one(text: &str) -> StmtKind {
        let p = parse(text).unwrap();
        let kind = p.statements().next().unwrap().kind.clone();
        kind
    }

    #[test]
    fn single_global_pulse() {
        let p = parse("sites 4\npulse global x 90deg").unwrap();
        assert_eq!(p.site_count(), Some(4));
        assert_eq!(p.statements().count(), 1);
        assert_eq!(
            one("sites 1\npulse global x 90deg"),
            StmtKind::Pulse {
                scope: Scope::Global,
                axis: Axis::X,
                angle: Angle::deg(90.0),
                targets: None,
                rabi: None,
                dur: None
            }
        );
    }

    #[test]
    fn statements() {
        assert!(matches!(
            one("sites 4\nramp on @[1,3] shift 10kHz dur 100us"),
            StmtKind::Ramp { edge: Edge::On, ref targets, shift: Freq { value: 10.0, unit: FreqUnit::KHz }, dur: Some(Time { unit: TimeUnit::Us, .. }) } if targets.len() == 2
        ));
        assert_eq!(
            one("sites 2\nwait 0.5ms"),
            StmtKind::Wait {
                time: Time {
                    value: 0.5,
                    unit: TimeUnit::Ms
                }
            }
        );
        assert!(matches!(
            one("sites 2\nmeasure basis 0.3 @[1]"),
            StmtKind::Measure {
                basis: Angle {
                    unit: AngleUnit::Bare,
                    ..
                },
                targets: Some(_)
            }
        ));
        assert!(matches!(
            one("sites 2\npulse addressed y 1rad @[0] dur 2µs rabi 1MHz"),
            StmtKind::Pulse {
                rabi: Some(_),
                dur: Some(Time {
                    unit: TimeUnit::Us,
                    ..
                }),
                ..
            }
        ));
    }

    fn codes(text: &str) -> Vec<(&'static str, usize, usize)> {
        parse(text)
            .unwrap_err()
            .into_iter()
            .map(|d| (d.code, d.line, d.col))
            .collect()
    }

    #[test]
    fn errors() {
        assert_eq!(
            codes("sites 1\npulse global q 90deg"),
            vec![("E002", 2, 14)]
        );
        assert_eq!(codes("pulse global q 90deg").first().unwrap().0, "E005");
        assert_eq!(codes("sites 2\nwait 5"), vec![("E006", 2, 6)]);
        assert_eq!(
            codes("sites 2\npulse global x 1e999deg"),
            vec![("E004", 2, 16)]
        );
        assert_eq!(
            codes("sites 2\npulse addressed x 1 @[2]"),
            vec![("E004", 2, 23)]
        );
        assert_eq!(
            codes("sites 2\npulse global x 1 @[1]"),
            vec![("E007", 2, 18)]
        );
        assert_eq!(codes("sites 2\npulse addressed x 1"), vec![("E007", 2, 7)]);
        assert_eq!(codes("sites 2\njump 3"), vec![("E003", 2, 1)]);
        assert_eq!(codes("sites 2\nwait 3ms extra"), vec![("E003", 2, 10)]);
        assert_eq!(codes("sites 0"), vec![("E005", 1, 7)]);
    }

    #[test]
    fn recovers_per_line() {
        let parsed =
            parse_recovering("sites 2\npulse global q 1\nwait 1ms\nwait 2\npulse global x 1");
        assert_eq!(parsed.errors.len(), 2);
        assert_eq!(parsed.program.statements().count(), 2);
    }

    #[test]
    fn comments_and_blanks() {
        let p = parse("# lead\nsites 2  # header\n\n\n\nwait 1s # tail\n").unwrap();
        assert_eq!(p.items.len(), 4);
        assert_eq!(p.items[0], Item::Comment(" lead".into()));
        assert_eq!(p.items[2], Item::Blank);
        match &p.items[3] {
            Item::Stmt(s) => assert_eq!(s.comment.as_deref(), Some(" tail")),
            other => panic!("{other:?}"),
        }
    }
}
