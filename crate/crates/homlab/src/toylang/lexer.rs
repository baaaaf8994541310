//! Hand-rolled lexer. `//` starts a line comment; whitespace is free-form.

use super::{ParseError, Pos};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    KwUnit,
    KwFn,
    KwTest,
    KwLet,
    KwIf,
    KwElse,
    KwWhile,
    KwReturn,
    KwAssert,
    KwTrue,
    KwFalse,
    KwInt,
    KwBool,
    LBrace,
    RBrace,
    LParen,
    RParen,
    Comma,
    Semi,
    Colon,
    Arrow,
    EqEq,
    NotEq,
    LessEq,
    GreaterEq,
    Less,
    Greater,
    AndAnd,
    OrOr,
    Bang,
    Plus,
    Minus,
    Star,
    Slash,
    Percent,
    Assign,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(name) => format!("identifier `{name}`"),
            Tok::Int(value) => format!("integer `{value}`"),
            Tok::Eof => "end of input".to_string(),
            other => format!("`{}`", other.text()),
        }
    }

    fn text(&self) -> &'static str {
        match self {
            Tok::KwUnit => "unit",
            Tok::KwFn => "fn",
            Tok::KwTest => "test",
            Tok::KwLet => "let",
            Tok::KwIf => "if",
            Tok::KwElse => "else",
            Tok::KwWhile => "while",
            Tok::KwReturn => "return",
            Tok::KwAssert => "assert",
            Tok::KwTrue => "true",
            Tok::KwFalse => "false",
            Tok::KwInt => "int",
            Tok::KwBool => "bool",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::Comma => ",",
            Tok::Semi => ";",
            Tok::Colon => ":",
            Tok::Arrow => "->",
            Tok::EqEq => "==",
            Tok::NotEq => "!=",
            Tok::LessEq => "<=",
            Tok::GreaterEq => ">=",
            Tok::Less => "<",
            Tok::Greater => ">",
            Tok::AndAnd => "&&",
            Tok::OrOr => "||",
            Tok::Bang => "!",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Slash => "/",
            Tok::Percent => "%",
            Tok::Assign => "=",
            Tok::Ident(_) | Tok::Int(_) | Tok::Eof => unreachable!(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

pub fn lex(source: &str) -> Result<Vec<Token>, ParseError> {
    let mut tokens = Vec::new();
    let bytes = source.as_bytes();
    let mut i = 0;
    let mut line: u32 = 1;
    let mut col: u32 = 1;

    macro_rules! push {
        ($tok:expr, $len:expr) => {{
            tokens.push(Token {
                tok: $tok,
                pos: Pos { line, col },
            });
            i += $len;
            col += $len as u32;
        }};
    }

    while i < bytes.len() {
        let b = bytes[i];
        match b {
            b'\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            b' ' | b'\t' | b'\r' => {
                i += 1;
                col += 1;
            }
            b'/' if bytes.get(i + 1) == Some(&b'/') => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
            }
            b'{' => push!(Tok::LBrace, 1),
            b'}' => push!(Tok::RBrace, 1),
            b'(' => push!(Tok::LParen, 1),
            b')' => push!(Tok::RParen, 1),
            b',' => push!(Tok::Comma, 1),
            b';' => push!(Tok::Semi, 1),
            b':' => push!(Tok::Colon, 1),
            b'+' => push!(Tok::Plus, 1),
            b'*' => push!(Tok::Star, 1),
            b'/' => push!(Tok::Slash, 1),
            b'%' => push!(Tok::Percent, 1),
            b'-' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    push!(Tok::Arrow, 2)
                } else {
                    push!(Tok::Minus, 1)
                }
            }
            b'=' => {
                if bytes.get(i + 1) == Some(&b'=') {
                    push!(Tok::EqEq, 2)
                } else {
                    push!(Tok::Assign, 1)
                }
            }
            b'!' => {
                if bytes.get(i + 1) == Some(&b'=') {
                    push!(Tok::NotEq, 2)
                } else {
                    push!(Tok::Bang, 1)
                }
            }
            b'<' => {
                if bytes.get(i + 1) == Some(&b'=') {
                    push!(Tok::LessEq, 2)
                } else {
                    push!(Tok::Less, 1)
                }
            }
            b'>' => {
                if bytes.get(i + 1) == Some(&b'=') {
                    push!(Tok::GreaterEq, 2)
                } else {
                    push!(Tok::Greater, 1)
                }
            }
            b'&' => {
                if bytes.get(i + 1) == Some(&b'&') {
                    push!(Tok::AndAnd, 2)
                } else {
                    return Err(ParseError::syntax(
                        Pos { line, col },
                        "single `&` is not an operator (use `&&`)",
                    ));
                }
            }
            b'|' => {
                if bytes.get(i + 1) == Some(&b'|') {
                    push!(Tok::OrOr, 2)
                } else {
                    return Err(ParseError::syntax(
                        Pos { line, col },
                        "single `|` is not an operator (use `||`)",
                    ));
                }
            }
            b'0'..=b'9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let text = &source[start..i];
                let value: i64 = text.parse().map_err(|_| {
                    ParseError::syntax(
                        Pos { line, col },
                        format!("integer literal `{text}` does not fit in 64 bits"),
                    )
                })?;
                tokens.push(Token {
                    tok: Tok::Int(value),
                    pos: Pos { line, col },
                });
                col += (i - start) as u32;
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                let text = &source[start..i];
                let tok = match text {
                    "unit" => Tok::KwUnit,
                    "fn" => Tok::KwFn,
                    "test" => Tok::KwTest,
                    "let" => Tok::KwLet,
                    "if" => Tok::KwIf,
                    "else" => Tok::KwElse,
                    "while" => Tok::KwWhile,
                    "return" => Tok::KwReturn,
                    "assert" => Tok::KwAssert,
                    "true" => Tok::KwTrue,
                    "false" => Tok::KwFalse,
                    "int" => Tok::KwInt,
                    "bool" => Tok::KwBool,
                    _ => Tok::Ident(text.to_string()),
                };
                tokens.push(Token {
                    tok,
                    pos: Pos { line, col },
                });
                col += (i - start) as u32;
            }
            other => {
                let shown = if other.is_ascii_graphic() {
                    format!("`{}`", other as char)
                } else {
                    format!("byte 0x{other:02x}")
                };
                return Err(ParseError::syntax(
                    Pos { line, col },
                    format!("unexpected character {shown}"),
                ));
            }
        }
    }
    tokens.push(Token {
        tok: Tok::Eof,
        pos: Pos { line, col },
    });
    Ok(tokens)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexes_operators_and_comments() {
        let tokens = lex("a <= b // comment\n&& c").unwrap();
        let kinds: Vec<_> = tokens.into_iter().map(|t| t.tok).collect();
        assert_eq!(
            kinds,
            vec![
                Tok::Ident("a".into()),
                Tok::LessEq,
                Tok::Ident("b".into()),
                Tok::AndAnd,
                Tok::Ident("c".into()),
                Tok::Eof,
            ]
        );
    }

    #[test]
    fn positions_are_one_based() {
        let tokens = lex("x\n  y").unwrap();
        assert_eq!(tokens[0].pos, Pos { line: 1, col: 1 });
        assert_eq!(tokens[1].pos, Pos { line: 2, col: 3 });
    }

    #[test]
    fn rejects_stray_ampersand() {
        assert!(matches!(lex("a & b"), Err(ParseError::Syntax { .. })));
    }

    #[test]
    fn rejects_overflowing_literal() {
        assert!(matches!(
            lex("99999999999999999999"),
            Err(ParseError::Syntax { .. })
        ));
    }
}
