use super::ast::{Constructor, Program, TypeDecl, TypeExpr};
use super::lexer::{lex, Tok, Token};
use crate::diag::{Diagnostic, Pos};

pub(crate) struct Parser {
    toks: Vec<Token>,
    at: usize,
    /// Bracket/paren nesting; newlines are insignificant while positive.
    nesting: usize,
}

pub(crate) type PResult<T> = Result<T, Diagnostic>;

impl Parser {
    pub(crate) fn new(text: &str) -> PResult<Self> {
        Ok(Parser {
            toks: lex(text)?,
            at: 0,
            nesting: 0,
        })
    }

    pub(crate) fn peek(&mut self) -> &Token {
        if self.nesting > 0 {
            while self.toks[self.at].tok == Tok::Newline {
                self.at += 1;
            }
        }
        &self.toks[self.at]
    }

    pub(crate) fn peek_tok(&mut self) -> Tok {
        self.peek().tok.clone()
    }

    pub(crate) fn peek_nth(&self, n: usize) -> &Tok {
        let i = (self.at + n).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    pub(crate) fn pos(&mut self) -> Pos {
        self.peek().pos
    }

    pub(crate) fn bump(&mut self) -> Token {
        let t = self.peek().clone();
        if t.tok != Tok::Eof {
            self.at += 1;
        }
        t
    }

    pub(crate) fn skip_newlines(&mut self) {
        while self.toks[self.at].tok == Tok::Newline {
            self.at += 1;
        }
    }

    pub(crate) fn unexpected(&mut self, wanted: &str) -> Diagnostic {
        let t = self.peek().clone();
        Diagnostic::error(
            t.pos,
            format!("syntax error: expected {wanted}, found {}", t.tok.describe()),
        )
    }

    pub(crate) fn expect(&mut self, tok: Tok, wanted: &str) -> PResult<Pos> {
        if self.peek_tok() == tok {
            Ok(self.bump().pos)
        } else {
            Err(self.unexpected(wanted))
        }
    }

    pub(crate) fn open(&mut self) {
        self.nesting += 1;
    }

    pub(crate) fn close(&mut self) {
        self.nesting -= 1;
    }

    fn decl(&mut self) -> PResult<TypeDecl> {
        let pos = self.expect(Tok::Data, "`data`")?;
        let name = match self.bump().tok {
            Tok::Upper(n) => n,
            other => {
                return Err(Diagnostic::error(
                    pos,
                    format!(
                        "syntax error: expected a capitalized type name, found {}",
                        other.describe()
                    ),
                ))
            }
        };
        let mut params = Vec::new();
        loop {
            match self.peek_tok() {
                Tok::Lower(p) => {
                    self.bump();
                    params.push(p);
                }
                Tok::LParen => {
                    // `(a b : Set)`
                    self.bump();
                    self.open();
                    let mut group = Vec::new();
                    while let Tok::Lower(p) = self.peek_tok() {
                        self.bump();
                        group.push(p);
                    }
                    if group.is_empty() {
                        return Err(self.unexpected("a type parameter"));
                    }
                    self.expect(Tok::Colon, "`:`")?;
                    self.kind()?;
                    self.close();
                    self.expect(Tok::RParen, "`)`")?;
                    params.extend(group);
                }
                _ => break,
            }
        }
        if self.peek_tok() == Tok::Colon {
            self.bump();
            self.kind()?;
        }
        self.expect(Tok::Where, "`where`")?;
        self.skip_newlines();
        let mut ctors = Vec::new();
        while !matches!(self.peek_tok(), Tok::Data | Tok::Eof) {
            ctors.push(self.ctor()?);
            match self.peek_tok() {
                Tok::Newline => self.skip_newlines(),
                Tok::Eof => {}
                _ => return Err(self.unexpected("end of line after constructor")),
            }
        }
        if ctors.is_empty() {
            return Err(Diagnostic::error(
                pos,
                format!("declaration `{name}` has no constructors"),
            ));
        }
        Ok(TypeDecl {
            name,
            params,
            ctors,
            pos,
        })
    }

    /// Kind annotations (`Set`, `Set -> Set`) are accepted and ignored.
    fn kind(&mut self) -> PResult<()> {
        loop {
            match self.peek_tok() {
                Tok::Upper(s) if s == "Set" => {
                    self.bump();
                }
                _ => return Err(self.unexpected("`Set`")),
            }
            if self.peek_tok() == Tok::Arrow {
                self.bump();
            } else {
                return Ok(());
            }
        }
    }

    fn ctor(&mut self) -> PResult<Constructor> {
        let pos = self.pos();
        let name = match self.bump().tok {
            Tok::Lower(n) | Tok::Upper(n) => n,
            other => {
                return Err(Diagnostic::error(
                    pos,
                    format!("syntax error: expected a constructor name, found {}", other.describe()),
                ))
            }
        };
        self.expect(Tok::Colon, "`:`")?;
        let mut parts = vec![self.type_app()?];
        while self.peek_tok() == Tok::Arrow {
            self.bump();
            parts.push(self.type_app()?);
        }
        let result = parts.pop().expect("at least one part");
        Ok(Constructor {
            name,
            args: parts,
            result,
            pos,
        })
    }

    /// `Upper arg*` or a single argument.
    pub(crate) fn type_app(&mut self) -> PResult<TypeExpr> {
        let pos = self.pos();
        match self.peek_tok() {
            Tok::Upper(head) => {
                self.bump();
                let mut args = Vec::new();
                while matches!(self.peek_tok(), Tok::Upper(_) | Tok::Lower(_) | Tok::LParen) {
                    args.push(self.type_arg()?);
                }
                Ok(TypeExpr::App { head, args, pos })
            }
            _ => self.type_arg(),
        }
    }

    fn type_arg(&mut self) -> PResult<TypeExpr> {
        let pos = self.pos();
        match self.bump().tok {
            Tok::Upper(head) => Ok(TypeExpr::App {
                head,
                args: vec![],
                pos,
            }),
            Tok::Lower(name) => Ok(TypeExpr::Var { name, pos }),
            Tok::LParen => {
                self.open();
                let inner = self.type_app()?;
                if self.peek_tok() == Tok::Arrow {
                    let p = self.pos();
                    return Err(Diagnostic::error(
                        p,
                        "function types not permitted in constructor arguments",
                    ));
                }
                self.close();
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            other => Err(Diagnostic::error(
                pos,
                format!("syntax error: expected a type, found {}", other.describe()),
            )),
        }
    }
}

/// Parses declarations without resolving names.
pub fn parse_declarations(text: &str, source_name: &str) -> Result<Program, Diagnostic> {
    let mut p = Parser::new(text)?;
    p.skip_newlines();
    let mut decls = Vec::new();
    while p.peek_tok() != Tok::Eof {
        decls.push(p.decl()?);
        p.skip_newlines();
    }
    if decls.is_empty() {
        return Err(Diagnostic::error(
            p.pos(),
            "syntax error: expected at least one `data` declaration",
        ));
    }
    Ok(Program {
        source_name: source_name.to_string(),
        decls,
    })
}

/// Name resolution: duplicate declarations, unknown type constructors and
/// arity mismatches. Every declaration may reference every other one.
pub fn resolve(program: &Program) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    for (i, d) in program.decls.iter().enumerate() {
        if program.decls[..i].iter().any(|e| e.name == d.name) {
            diags.push(Diagnostic::error(d.pos, format!("duplicate declaration `{}`", d.name)));
        }
    }
    for d in &program.decls {
        for c in &d.ctors {
            for t in c.args.iter().chain(std::iter::once(&c.result)) {
                t.visit_apps(&mut |head, args, pos| match program.decl(head) {
                    None => diags.push(Diagnostic::error(pos, format!("unknown type constructor {head}"))),
                    Some(target) if target.arity() != args.len() => diags.push(Diagnostic::error(
                        pos,
                        format!(
                            "arity mismatch: `{head}` expects {} argument(s), found {}",
                            target.arity(),
                            args.len()
                        ),
                    )),
                    Some(_) => {}
                });
            }
        }
    }
    diags
}

/// Parses and resolves a `.ndt` source.
pub fn parse_program(text: &str, source_name: &str) -> Result<Program, Vec<Diagnostic>> {
    let program = parse_declarations(text, source_name).map_err(|d| vec![d])?;
    let diags = resolve(&program);
    if diags.is_empty() {
        Ok(program)
    } else {
        Err(diags)
    }
}
