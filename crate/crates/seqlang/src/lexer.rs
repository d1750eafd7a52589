//! Per-line tokenizer.

use crate::diag::{Diagnostic, Span};

#[derive(Clone, Debug, PartialEq)]
pub enum TokenKind {
    Word(String),
    /// Numeric literal with any unit letters glued to it.
    Number {
        text: String,
        suffix: String,
    },
    /// `@[`
    TargetsOpen,
    Comma,
    Close,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: Span,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct LexedLine {
    pub tokens: Vec<Token>,
    /// Text after `#`, trailing whitespace removed.
    pub comment: Option<String>,
}

fn is_unit_char(c: char) -> bool {
    c.is_alphabetic()
}

/// Splits one line (without its newline) into tokens.
pub fn lex_line(line: &str, line_no: usize) -> Result<LexedLine, Diagnostic> {
    let chars: Vec<char> = line.chars().collect();
    let mut out = LexedLine::default();
    let mut i = 0;
    let span = |start: usize, end: usize| Span::new(line_no, start + 1, end - start);
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c == '#' {
            let text: String = chars[i + 1..].iter().collect();
            out.comment = Some(text.trim_end().to_string());
            break;
        }
        let kind = match c {
            '@' => {
                if chars.get(i + 1) != Some(&'[') {
                    return Err(Diagnostic::error(
                        "E001",
                        span(i, i + 1),
                        "expected '[' after '@'",
                    ));
                }
                i += 2;
                TokenKind::TargetsOpen
            }
            ',' => {
                i += 1;
                TokenKind::Comma
            }
            ']' => {
                i += 1;
                TokenKind::Close
            }
            c if c.is_ascii_digit() || c == '.' || c == '-' || c == '+' => {
                let mut j = i;
                if chars[j] == '-' || chars[j] == '+' {
                    j += 1;
                }
                let mantissa_start = j;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                if j < chars.len() && chars[j] == '.' {
                    j += 1;
                    while j < chars.len() && chars[j].is_ascii_digit() {
                        j += 1;
                    }
                }
                let digits = chars[mantissa_start..j]
                    .iter()
                    .filter(|c| c.is_ascii_digit())
                    .count();
                if digits == 0 {
                    return Err(Diagnostic::error(
                        "E001",
                        span(start, j.max(start + 1)),
                        "malformed number",
                    ));
                }
                // Exponent only if followed by digits, so `e` never eats a unit.
                if j < chars.len() && (chars[j] == 'e' || chars[j] == 'E') {
                    let mut k = j + 1;
                    if k < chars.len() && (chars[k] == '-' || chars[k] == '+') {
                        k += 1;
                    }
                    if k < chars.len() && chars[k].is_ascii_digit() {
                        while k < chars.len() && chars[k].is_ascii_digit() {
                            k += 1;
                        }
                        j = k;
                    }
                }
                let text: String = chars[i..j].iter().collect();
                let mut k = j;
                while k < chars.len() && is_unit_char(chars[k]) {
                    k += 1;
                }
                let suffix: String = chars[j..k].iter().collect();
                if k < chars.len()
                    && (chars[k].is_ascii_digit() || chars[k] == '.' || chars[k] == '_')
                {
                    return Err(Diagnostic::error(
                        "E001",
                        span(start, k + 1),
                        "malformed number",
                    ));
                }
                i = k;
                TokenKind::Number { text, suffix }
            }
            c if c.is_alphabetic() || c == '_' => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                let word: String = chars[i..j].iter().collect();
                i = j;
                TokenKind::Word(word)
            }
            other => {
                return Err(Diagnostic::error(
                    "E001",
                    span(i, i + 1),
                    format!("unexpected character {other:?}"),
                ));
            }
        };
        out.tokens.push(Token {
            kind,
            span: span(start, i),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(line: &str) -> Vec<TokenKind> {
        lex_line(line, 1)
            .unwrap()
            .tokens
            .into_iter()
            .map(|t| t.kind)
            .collect()
    }

    fn num(text: &str, suffix: &str) -> TokenKind {
        TokenKind::Number {
            text: text.into(),
            suffix: suffix.into(),
        }
    }

    #[test]
    fn tokens_and_spans() {
        let lexed = lex_line("pulse addressed x -45deg @[1, 3] # note  ", 7).unwrap();
        assert_eq!(lexed.comment.as_deref(), Some(" note"));
        let spans: Vec<(usize, usize)> = lexed
            .tokens
            .iter()
            .map(|t| (t.span.col, t.span.len))
            .collect();
        assert_eq!(
            spans,
            vec![
                (1, 5),
                (7, 9),
                (17, 1),
                (19, 6),
                (26, 2),
                (28, 1),
                (29, 1),
                (31, 1),
                (32, 1)
            ]
        );
        assert_eq!(lexed.tokens[3].kind, num("-45", "deg"));
    }

    #[test]
    fn numbers() {
        assert_eq!(kinds("1e-3s"), vec![num("1e-3", "s")]);
        assert_eq!(kinds("2.5µs"), vec![num("2.5", "µs")]);
        assert_eq!(kinds("10kHz"), vec![num("10", "kHz")]);
        assert_eq!(kinds("3"), vec![num("3", "")]);
        assert_eq!(kinds("4e"), vec![num("4", "e")]);
    }

    #[test]
    fn lexical_errors() {
        let e = lex_line("pulse global x 90deg $", 2).unwrap_err();
        assert_eq!((e.code, e.line, e.col), ("E001", 2, 22));
        assert_eq!(lex_line("@ [1]", 1).unwrap_err().code, "E001");
        assert_eq!(lex_line("wait -ms", 1).unwrap_err().code, "E001");
    }
}
