//! Value literals (`.ndv` files).
//!
//! A literal is either explicit constructor application (`cons 4 leaf`),
//! a natural, an atom (`'x`), or bracket sugar `[x1, .., xn]`, which is
//! type-directed: each element after the first lives one level further
//! down the spine's argument type, so `[4, [8]]` at `Bush Nat` puts `[8]`
//! at `Bush Nat` and the tail at `Bush (Bush Nat)`.
//!
//! A file holds either one bare literal (typed at the first declaration
//! applied to `Nat`) or bindings `name : Type = literal`, where the type is
//! optional.

use super::ast::{Payload, Program, TypeExpr, Value};
use super::lexer::Tok;
use super::parser::{PResult, Parser};
use crate::analysis::{value_type, GroupSchema, IndexExpr, ValueType};
use crate::diag::{Diagnostic, Pos};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValueBinding {
    pub name: Option<String>,
    pub ty: TypeExpr,
    pub schema: GroupSchema,
    pub value_type: ValueType,
    pub value: Value,
    pub pos: Pos,
}

struct LitParser<'a> {
    p: Parser,
    program: &'a Program,
    schema: &'a GroupSchema,
}

impl LitParser<'_> {
    fn literal(&mut self, ctx: Option<&IndexExpr>) -> PResult<Value> {
        let pos = self.p.pos();
        match self.p.peek_tok() {
            Tok::Lower(name) | Tok::Upper(name) => {
                self.p.bump();
                let templates = self.arg_templates(&name, ctx, pos)?;
                let mut args = Vec::new();
                while self.starts_atom() {
                    let arg_ctx = templates.as_ref().and_then(|t| t.get(args.len())).cloned();
                    args.push(self.atom(arg_ctx.as_ref())?);
                }
                Ok(Value::Con(name, args))
            }
            _ => self.atom(ctx),
        }
    }

    fn starts_atom(&mut self) -> bool {
        matches!(
            self.p.peek_tok(),
            Tok::Nat(_) | Tok::Atom(_) | Tok::LBracket | Tok::LParen
        ) || (matches!(self.p.peek_tok(), Tok::Lower(_) | Tok::Upper(_))
            && !matches!(self.p.peek_nth(1), Tok::Colon | Tok::Equals))
    }

    fn arg_templates(&self, name: &str, ctx: Option<&IndexExpr>, pos: Pos) -> PResult<Option<Vec<IndexExpr>>> {
        if self.program.ctor(name).is_none() {
            return Err(Diagnostic::error(pos, format!("unknown constructor `{name}`")));
        }
        Ok(match ctx {
            Some(IndexExpr::App(d, args)) => self.schema.decls[*d]
                .ctors
                .iter()
                .find(|c| c.name == name)
                .map(|c| c.args.iter().map(|t| t.subst(args)).collect()),
            _ => None,
        })
    }

    fn atom(&mut self, ctx: Option<&IndexExpr>) -> PResult<Value> {
        let pos = self.p.pos();
        match self.p.peek_tok() {
            Tok::Nat(n) => {
                self.p.bump();
                Ok(Value::Base(Payload::Nat(n)))
            }
            Tok::Atom(a) => {
                self.p.bump();
                Ok(Value::Base(Payload::Atom(a)))
            }
            Tok::Lower(name) | Tok::Upper(name) => {
                self.p.bump();
                self.arg_templates(&name, ctx, pos)?;
                Ok(Value::Con(name, vec![]))
            }
            Tok::LParen => {
                self.p.bump();
                self.p.open();
                let v = self.literal(ctx)?;
                self.p.close();
                self.p.expect(Tok::RParen, "`)`")?;
                Ok(v)
            }
            Tok::LBracket => self.brackets(ctx),
            _ => Err(self.p.unexpected("a value")),
        }
    }

    fn brackets(&mut self, ctx: Option<&IndexExpr>) -> PResult<Value> {
        let pos = self.p.expect(Tok::LBracket, "`[`")?;
        self.p.open();
        let Some(IndexExpr::App(d, _)) = ctx else {
            return Err(Diagnostic::error(
                pos,
                "bracket sugar needs a data type at this position",
            ));
        };
        let Some((nil, cons)) = self.schema.spine_shape(*d) else {
            return Err(Diagnostic::error(
                pos,
                format!(
                    "bracket sugar requires `{}` to have one nullary and one two-argument constructor",
                    self.schema.decls[*d].name
                ),
            ));
        };
        let decl = &self.schema.decls[*d];
        let (nil_name, cons_ctor) = (decl.ctors[nil].name.clone(), decl.ctors[cons].clone());
        let mut spine_ctx = ctx.cloned();
        let mut elems = Vec::new();
        if self.p.peek_tok() != Tok::RBracket {
            loop {
                let IndexExpr::App(_, args) = spine_ctx.clone().expect("spine stays applied") else {
                    unreachable!("spine tail is headed by the declaration");
                };
                let head_ctx = cons_ctor.args[0].subst(&args);
                elems.push(self.literal(Some(&head_ctx))?);
                spine_ctx = Some(cons_ctor.args[1].subst(&args));
                match self.p.peek_tok() {
                    Tok::Comma => {
                        self.p.bump();
                    }
                    Tok::RBracket => break,
                    _ => return Err(self.p.unexpected("`,` or `]`")),
                }
            }
        }
        self.p.close();
        self.p.expect(Tok::RBracket, "`]`")?;
        Ok(elems.into_iter().rev().fold(Value::Con(nil_name, vec![]), |tail, x| {
            Value::Con(cons_ctor.name.clone(), vec![x, tail])
        }))
    }
}

/// Parses a single literal at the given type; trailing input is an error.
pub fn parse_value_literal(
    text: &str,
    program: &Program,
    schema: &GroupSchema,
    target: &ValueType,
) -> Result<Value, Diagnostic> {
    let mut lp = LitParser {
        p: Parser::new(text)?,
        program,
        schema,
    };
    lp.p.skip_newlines();
    let v = lp.literal(Some(&target.index))?;
    lp.p.skip_newlines();
    if lp.p.peek_tok() != Tok::Eof {
        return Err(lp.p.unexpected("end of input"));
    }
    Ok(v)
}

/// The type a bare literal gets: the first declaration over `Nat`.
pub fn default_value_type(program: &Program) -> TypeExpr {
    let d = &program.decls[0];
    TypeExpr::app(&d.name, d.params.iter().map(|_| TypeExpr::app("Nat", vec![])).collect())
}

/// Parses a whole `.ndv` file.
pub fn parse_value_file(text: &str, program: &Program) -> Result<Vec<ValueBinding>, Diagnostic> {
    let mut p = Parser::new(text)?;
    p.skip_newlines();
    let bindings_form = matches!(p.peek_tok(), Tok::Lower(_)) && matches!(p.peek_nth(1), Tok::Colon | Tok::Equals);
    let mut out = Vec::new();
    loop {
        p.skip_newlines();
        if p.peek_tok() == Tok::Eof {
            break;
        }
        let pos = p.pos();
        let (name, ty) = if bindings_form {
            let Tok::Lower(name) = p.bump().tok else {
                return Err(Diagnostic::error(pos, "syntax error: expected a binding name"));
            };
            let ty = if p.peek_tok() == Tok::Colon {
                p.bump();
                p.type_app()?
            } else {
                default_value_type(program)
            };
            p.expect(Tok::Equals, "`=`")?;
            p.skip_newlines();
            (Some(name), ty)
        } else {
            (None, default_value_type(program))
        };
        let head = ty.head().unwrap_or_default().to_string();
        let schema = crate::analysis::schema_for(program, &head)
            .ok_or_else(|| Diagnostic::error(ty.pos(), format!("unknown type constructor {head}")))?
            .map_err(|e| Diagnostic::error(ty.pos(), e.to_string()))?;
        let vt = value_type(&schema, &ty).map_err(|e| Diagnostic::error(ty.pos(), e.to_string()))?;
        let mut lp = LitParser {
            p,
            program,
            schema: &schema,
        };
        let value = lp.literal(Some(&vt.index))?;
        p = lp.p;
        out.push(ValueBinding {
            name,
            ty,
            schema: schema.clone(),
            value_type: vt,
            value,
            pos,
        });
        match p.peek_tok() {
            Tok::Newline | Tok::Eof => {}
            _ => return Err(p.unexpected("end of line")),
        }
        if !bindings_form {
            p.skip_newlines();
            if p.peek_tok() != Tok::Eof {
                return Err(p.unexpected("end of input"));
            }
        }
    }
    if out.is_empty() {
        return Err(Diagnostic::error(Pos::new(1, 1), "no value literal found"));
    }
    Ok(out)
}
