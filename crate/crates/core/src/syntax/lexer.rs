use crate::diag::{Diagnostic, Pos};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Data,
    Where,
    Upper(String),
    Lower(String),
    Nat(u64),
    Atom(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Colon,
    Arrow,
    Equals,
    Newline,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Data => "`data`".into(),
            Tok::Where => "`where`".into(),
            Tok::Upper(s) | Tok::Lower(s) => format!("identifier `{s}`"),
            Tok::Nat(n) => format!("number `{n}`"),
            Tok::Atom(a) => format!("atom `'{a}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Equals => "`=`".into(),
            Tok::Newline => "end of line".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

/// Splits `text` into tokens. Comments run from `--` to end of line.
pub fn lex(text: &str) -> Result<Vec<Token>, Diagnostic> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut col) = (1u32, 1u32);

    macro_rules! bump {
        () => {{
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                col = 1;
            } else if c.is_some() {
                col += 1;
            }
            c
        }};
    }

    while let Some(&c) = chars.peek() {
        let pos = Pos::new(line, col);
        let single = |t: Tok| Token { tok: t, pos };
        match c {
            '\n' => {
                bump!();
                out.push(single(Tok::Newline));
            }
            c if c.is_whitespace() => {
                bump!();
            }
            '-' => {
                bump!();
                match chars.peek() {
                    Some('-') => {
                        while let Some(&c) = chars.peek() {
                            if c == '\n' {
                                break;
                            }
                            bump!();
                        }
                    }
                    Some('>') => {
                        bump!();
                        out.push(single(Tok::Arrow));
                    }
                    _ => return Err(Diagnostic::error(pos, "unexpected character `-`")),
                }
            }
            '→' => {
                bump!();
                out.push(single(Tok::Arrow));
            }
            '(' | ')' | '[' | ']' | ',' | ':' | '=' => {
                bump!();
                out.push(single(match c {
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    '[' => Tok::LBracket,
                    ']' => Tok::RBracket,
                    ',' => Tok::Comma,
                    ':' => Tok::Colon,
                    _ => Tok::Equals,
                }));
            }
            '0'..='9' => {
                let mut n: u64 = 0;
                while let Some(&d) = chars.peek() {
                    let Some(v) = d.to_digit(10) else { break };
                    n = n
                        .checked_mul(10)
                        .and_then(|n| n.checked_add(u64::from(v)))
                        .ok_or_else(|| Diagnostic::error(pos, "numeric literal out of range"))?;
                    bump!();
                }
                if chars.peek().is_some_and(|&c| is_ident_continue(c)) {
                    return Err(Diagnostic::error(pos, "malformed numeric literal"));
                }
                out.push(single(Tok::Nat(n)));
            }
            '\'' => {
                bump!();
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if !is_ident_continue(c) {
                        break;
                    }
                    s.push(c);
                    bump!();
                }
                if s.is_empty() {
                    return Err(Diagnostic::error(pos, "empty atom literal"));
                }
                out.push(single(Tok::Atom(s)));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if !is_ident_continue(c) {
                        break;
                    }
                    s.push(c);
                    bump!();
                }
                let tok = match s.as_str() {
                    "data" => Tok::Data,
                    "where" => Tok::Where,
                    _ if s.starts_with(|c: char| c.is_ascii_uppercase()) => Tok::Upper(s),
                    _ => Tok::Lower(s),
                };
                out.push(single(tok));
            }
            other => return Err(Diagnostic::error(pos, format!("unexpected character `{other}`"))),
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        pos: Pos::new(line, col),
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        lex(s).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn arrows_and_comments() {
        assert_eq!(
            toks("a -> b -- trailing\n"),
            vec![
                Tok::Lower("a".into()),
                Tok::Arrow,
                Tok::Lower("b".into()),
                Tok::Newline,
                Tok::Eof
            ]
        );
    }

    #[test]
    fn positions_are_one_based() {
        let ts = lex("data\n  Bush").unwrap();
        assert_eq!((ts[0].pos.line, ts[0].pos.col), (1, 1));
        assert_eq!((ts[2].pos.line, ts[2].pos.col), (2, 3));
    }

    #[test]
    fn rejects_stray_characters() {
        let err = lex("data X where\n  mk : X ; ").unwrap_err();
        assert_eq!((err.pos.line, err.pos.col), (2, 10));
        assert!(lex("x - y").is_err());
        assert!(lex("99999999999999999999999").is_err());
        assert!(lex("12ab").is_err());
    }

    #[test]
    fn atoms() {
        assert_eq!(toks("'x"), vec![Tok::Atom("x".into()), Tok::Eof]);
    }
}
