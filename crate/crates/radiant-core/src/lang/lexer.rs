//! Tokenizer for Radiant programs.
//!
//! The language has no reserved words: keywords are recognized by the parser
//! from context, so `sensor` or `to` are perfectly fine identifiers. The
//! lexer only distinguishes identifiers, numbers, `:` and `;`. Whitespace is
//! insignificant and `//` starts a line comment.

use super::ast::{Diagnostic, Span};

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Ident(String),
    Number(f64),
    Colon,
    Semicolon,
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
    /// Raw source text, used for messages about numbers.
    pub text: String,
}

pub fn lex(text: &str) -> (Vec<Token>, Vec<Diagnostic>) {
    let mut tokens = Vec::new();
    let mut diagnostics = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    let mut line: u32 = 1;
    let mut col: u32 = 1;

    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let span_start = (line, col);

        match c {
            b'\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_ascii_whitespace() => {
                i += 1;
                col += 1;
            }
            b'/' if bytes.get(i + 1) == Some(&b'/') => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                    col += 1;
                }
            }
            b':' => {
                i += 1;
                tokens.push(token(Tok::Colon, text, start, i, span_start));
                col += 1;
            }
            b';' => {
                i += 1;
                tokens.push(token(Tok::Semicolon, text, start, i, span_start));
                col += 1;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                col += (i - start) as u32;
                let word = &text[start..i];
                tokens.push(token(
                    Tok::Ident(word.to_string()),
                    text,
                    start,
                    i,
                    span_start,
                ));
            }
            c if c.is_ascii_digit() || c == b'-' => {
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' && digit_at(bytes, i + 1) {
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                col += (i - start) as u32;
                let word = &text[start..i];
                let span = make_span(start, i, span_start);
                match word.parse::<f64>() {
                    Ok(v) => tokens.push(Token {
                        tok: Tok::Number(v),
                        span,
                        text: word.to_string(),
                    }),
                    Err(_) => diagnostics.push(Diagnostic::error(
                        format!("malformed number {word:?}"),
                        span,
                    )),
                }
            }
            _ => {
                let ch = text[i..].chars().next().unwrap();
                let span = make_span(start, i + ch.len_utf8(), span_start);
                diagnostics.push(Diagnostic::error(
                    format!("unexpected character {ch:?}"),
                    span,
                ));
                i += ch.len_utf8();
                col += 1;
            }
        }
    }

    (tokens, diagnostics)
}

fn digit_at(bytes: &[u8], i: usize) -> bool {
    bytes.get(i).is_some_and(|b| b.is_ascii_digit())
}

fn make_span(start: usize, end: usize, (line, col): (u32, u32)) -> Span {
    Span {
        offset: start,
        line,
        col,
        len: (end - start) as u32,
    }
}

fn token(tok: Tok, text: &str, start: usize, end: usize, span_start: (u32, u32)) -> Token {
    Token {
        tok,
        span: make_span(start, end, span_start),
        text: text[start..end].to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(text: &str) -> Vec<Tok> {
        let (tokens, diags) = lex(text);
        assert!(diags.is_empty(), "unexpected diagnostics: {diags:?}");
        tokens.into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn lexes_condition_line() {
        let toks = kinds("In SM_1 sensor m1_speed changes_from 0 to -512;");
        assert_eq!(
            toks,
            vec![
                Tok::Ident("In".into()),
                Tok::Ident("SM_1".into()),
                Tok::Ident("sensor".into()),
                Tok::Ident("m1_speed".into()),
                Tok::Ident("changes_from".into()),
                Tok::Number(0.0),
                Tok::Ident("to".into()),
                Tok::Number(-512.0),
                Tok::Semicolon,
            ]
        );
    }

    #[test]
    fn skips_comments_and_whitespace() {
        let toks = kinds("a // rest of line : ;\n  b");
        assert_eq!(toks, vec![Tok::Ident("a".into()), Tok::Ident("b".into())]);
    }

    #[test]
    fn lexes_decimals() {
        assert_eq!(kinds("29.1"), vec![Tok::Number(29.1)]);
        assert_eq!(kinds("-3.5"), vec![Tok::Number(-3.5)]);
    }

    #[test]
    fn tracks_line_and_column() {
        let (tokens, _) = lex("Process P:\n  Activity A:");
        let activity = &tokens[3];
        assert_eq!(activity.span.line, 2);
        assert_eq!(activity.span.col, 3);
    }

    #[test]
    fn reports_unexpected_characters() {
        let (tokens, diags) = lex("a @ b");
        assert_eq!(tokens.len(), 2);
        assert_eq!(diags.len(), 1);
        assert!(diags[0].message.contains('@'));
    }

    #[test]
    fn lone_minus_is_malformed() {
        let (_, diags) = lex("- to");
        assert_eq!(diags.len(), 1);
        assert!(diags[0].message.contains("malformed number"));
    }
}
