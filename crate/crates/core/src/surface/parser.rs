//! Recursive-descent parser for the vernacular and term syntax.
//!
//! Precedence, loosest first: binder forms (`forall`, `fun`, `let`, `fix`),
//! `->` (right associative), `=` (non-associative), `::` (right
//! associative), application, atoms.

use super::ast::*;
use super::lexer::{tokenize, Tok, Token};
use super::{ParseError, Pos};
use crate::term::Sort;

pub const RESERVED: &[&str] = &[
    "forall", "fun", "let", "in", "fix", "match", "with", "end", "return", "as", "struct", "Type", "Prop",
    "Inductive", "Definition", "Derive", "Scheme",
];

pub fn parse_program(src: &str) -> Result<Vec<Command>, ParseError> {
    let mut p = Parser::new(src)?;
    let mut out = Vec::new();
    while !p.at(&Tok::Eof) {
        out.push(p.command()?);
    }
    Ok(out)
}

/// Parses a complete term (no trailing input).
pub fn parse_surface_term(src: &str) -> Result<STerm, ParseError> {
    let mut p = Parser::new(src)?;
    let t = p.term()?;
    p.expect(&Tok::Eof, "end of input")?;
    Ok(t)
}

struct Parser {
    toks: Vec<Token>,
    i: usize,
}

impl Parser {
    fn new(src: &str) -> Result<Parser, ParseError> {
        Ok(Parser {
            toks: tokenize(src)?,
            i: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.i].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.i + k).min(self.toks.len() - 1)].tok
    }

    fn pos(&self) -> Pos {
        self.toks[self.i].pos
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.i].clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn at(&self, t: &Tok) -> bool {
        self.peek() == t
    }

    fn at_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn error<T>(&self, expected: &[&str]) -> Result<T, ParseError> {
        Err(ParseError::new(
            self.pos(),
            expected.iter().map(|s| s.to_string()).collect(),
            self.peek().to_string(),
        ))
    }

    fn expect(&mut self, t: &Tok, what: &str) -> Result<Pos, ParseError> {
        if self.at(t) {
            Ok(self.bump().pos)
        } else {
            self.error(&[what])
        }
    }

    fn expect_kw(&mut self, kw: &str) -> Result<Pos, ParseError> {
        if self.at_kw(kw) {
            Ok(self.bump().pos)
        } else {
            self.error(&[&format!("`{kw}`")])
        }
    }

    fn ident(&mut self) -> Result<Ident, ParseError> {
        match self.peek().clone() {
            Tok::Ident(name) if !RESERVED.contains(&name.as_str()) => {
                let pos = self.bump().pos;
                Ok(Ident { name, pos })
            }
            _ => self.error(&["an identifier"]),
        }
    }

    fn binder_name(&mut self) -> Result<(Option<String>, Pos), ParseError> {
        if self.at(&Tok::Underscore) {
            return Ok((None, self.bump().pos));
        }
        let id = self.ident()?;
        Ok((Some(id.name), id.pos))
    }

    fn at_binder_name(&self) -> bool {
        matches!(self.peek(), Tok::Underscore) || matches!(self.peek(), Tok::Ident(s) if !RESERVED.contains(&s.as_str()))
    }

    // ---------------------------------------------------------------- commands

    fn command(&mut self) -> Result<Command, ParseError> {
        let pos = self.pos();
        if self.at_kw("MetaCoq") {
            self.bump();
            self.expect_kw("Run")?;
        }
        let kind = if self.at_kw("Inductive") {
            self.bump();
            CommandKind::DefineInductive(self.inductive()?)
        } else if self.at_kw("Definition") {
            self.bump();
            CommandKind::DefineConstant(self.definition()?)
        } else if self.at_kw("Derive") {
            self.bump();
            if self.at_kw("Generalized") {
                self.bump();
                self.expect_kw("Constructor")?;
                self.expect_kw("for")?;
                let ctor = self.ident()?;
                self.expect_kw("as")?;
                let as_name = self.ident()?;
                CommandKind::DeriveGenCtor { ctor, as_name }
            } else if matches!(self.peek(), Tok::Ident(s) if s.eq_ignore_ascii_case("subterm")) {
                self.bump();
                self.expect_kw("for")?;
                CommandKind::DeriveSubterm { ind: self.ident()? }
            } else {
                return self.error(&["`Generalized`", "`Subterm`"]);
            }
        } else if self.at_kw("Scheme") {
            self.bump();
            self.expect_kw("Induction")?;
            self.expect_kw("for")?;
            let ind = self.ident()?;
            let name = if self.at_kw("as") {
                self.bump();
                Some(self.ident()?)
            } else {
                None
            };
            CommandKind::SchemeInduction { ind, name }
        } else {
            return self.error(&["`Inductive`", "`Definition`", "`Derive`", "`Scheme`"]);
        };
        self.expect(&Tok::Dot, "`.`")?;
        Ok(Command { kind, pos })
    }

    fn inductive(&mut self) -> Result<SInductive, ParseError> {
        let name = self.ident()?;
        let params = self.binders(false)?;
        let arity = if self.at(&Tok::Colon) {
            self.bump();
            Some(self.term()?)
        } else {
            None
        };
        self.expect(&Tok::ColonEq, "`:=`")?;
        let mut ctors = Vec::new();
        if self.at(&Tok::Bar) {
            self.bump();
        }
        if !self.at(&Tok::Dot) {
            loop {
                ctors.push(self.constructor()?);
                if self.at(&Tok::Bar) {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        Ok(SInductive {
            name,
            params,
            arity,
            ctors,
        })
    }

    fn constructor(&mut self) -> Result<SConstructor, ParseError> {
        let name = self.ident()?;
        let binders = self.binders(false)?;
        let ty = if self.at(&Tok::Colon) {
            self.bump();
            Some(self.term()?)
        } else {
            None
        };
        Ok(SConstructor { name, binders, ty })
    }

    fn definition(&mut self) -> Result<SDefinition, ParseError> {
        let name = self.ident()?;
        let binders = self.binders(false)?;
        let ty = if self.at(&Tok::Colon) {
            self.bump();
            Some(self.term()?)
        } else {
            None
        };
        self.expect(&Tok::ColonEq, "`:=`")?;
        let body = self.term()?;
        Ok(SDefinition {
            name,
            binders,
            ty,
            body,
        })
    }

    /// Binder groups: `x`, `_`, `(x y : T)`. With `bare_typed`, a trailing
    /// `: T` after bare names types all of them (`forall x y : T, ...`).
    fn binders(&mut self, bare_typed: bool) -> Result<Vec<Binder>, ParseError> {
        let mut out = Vec::new();
        let mut only_bare = true;
        loop {
            if self.at(&Tok::LParen) && (matches!(self.peek_at(1), Tok::Underscore) || self.is_binder_ident(1)) {
                self.bump();
                let mut names = Vec::new();
                while self.at_binder_name() {
                    names.push(self.binder_name()?);
                }
                self.expect(&Tok::Colon, "`:`")?;
                let ty = self.term()?;
                self.expect(&Tok::RParen, "`)`")?;
                out.extend(names.into_iter().map(|(name, pos)| Binder {
                    name,
                    ty: Some(Box::new(ty.clone())),
                    pos,
                }));
                only_bare = false;
            } else if self.at_binder_name() {
                let (name, pos) = self.binder_name()?;
                out.push(Binder { name, ty: None, pos });
            } else {
                break;
            }
        }
        if bare_typed && only_bare && !out.is_empty() && self.at(&Tok::Colon) {
            self.bump();
            let ty = self.term()?;
            for b in &mut out {
                b.ty = Some(Box::new(ty.clone()));
            }
        }
        Ok(out)
    }

    fn is_binder_ident(&self, k: usize) -> bool {
        matches!(self.peek_at(k), Tok::Ident(s) if !RESERVED.contains(&s.as_str()))
            && matches!(self.peek_at(k + 1), Tok::Colon | Tok::Ident(_) | Tok::Underscore)
    }

    // ------------------------------------------------------------------- terms

    pub fn term(&mut self) -> Result<STerm, ParseError> {
        if self.at_kw("forall") || self.at_kw("fun") {
            let is_forall = self.at_kw("forall");
            self.bump();
            let binders = self.binders(true)?;
            if binders.is_empty() {
                return self.error(&["a binder"]);
            }
            if is_forall {
                self.expect(&Tok::Comma, "`,`")?;
            } else {
                self.expect(&Tok::DArrow, "`=>`")?;
            }
            let body = self.term()?;
            return Ok(if is_forall {
                STerm::Forall(binders, Box::new(body))
            } else {
                STerm::Fun(binders, Box::new(body))
            });
        }
        if self.at_kw("let") {
            self.bump();
            let (name, pos) = self.binder_name()?;
            let ty = if self.at(&Tok::Colon) {
                self.bump();
                Some(Box::new(self.term()?))
            } else {
                None
            };
            self.expect(&Tok::ColonEq, "`:=`")?;
            let val = self.term()?;
            self.expect_kw("in")?;
            let body = self.term()?;
            return Ok(STerm::Let {
                binder: Binder { name, ty, pos },
                val: Box::new(val),
                body: Box::new(body),
            });
        }
        if self.at_kw("fix") {
            self.bump();
            return self.fix();
        }
        self.arrow()
    }

    fn fix(&mut self) -> Result<STerm, ParseError> {
        let name = self.ident()?;
        let binders = self.binders(false)?;
        let struct_arg = if self.at(&Tok::LBrace) {
            self.bump();
            self.expect_kw("struct")?;
            let arg = match self.peek().clone() {
                Tok::Num(n) => {
                    let pos = self.bump().pos;
                    StructArg::Index(n as usize, pos)
                }
                _ => StructArg::Name(self.ident()?),
            };
            self.expect(&Tok::RBrace, "`}`")?;
            Some(arg)
        } else {
            None
        };
        self.expect(&Tok::Colon, "`:`")?;
        let ty = self.term()?;
        self.expect(&Tok::ColonEq, "`:=`")?;
        let body = self.term()?;
        Ok(STerm::Fix(Box::new(Fix {
            name,
            binders,
            struct_arg,
            ty,
            body,
        })))
    }

    fn arrow(&mut self) -> Result<STerm, ParseError> {
        let lhs = self.equality()?;
        if self.at(&Tok::Arrow) {
            self.bump();
            let rhs = self.term()?;
            return Ok(STerm::Arrow(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn equality(&mut self) -> Result<STerm, ParseError> {
        let lhs = self.cons()?;
        if self.at(&Tok::Equals) {
            let pos = self.bump().pos;
            let rhs = self.cons()?;
            return Ok(STerm::Eq(Box::new(lhs), Box::new(rhs), pos));
        }
        Ok(lhs)
    }

    fn cons(&mut self) -> Result<STerm, ParseError> {
        let lhs = self.application()?;
        if self.at(&Tok::ColonColon) {
            let pos = self.bump().pos;
            let rhs = self.cons()?;
            return Ok(STerm::Cons(Box::new(lhs), Box::new(rhs), pos));
        }
        Ok(lhs)
    }

    fn application(&mut self) -> Result<STerm, ParseError> {
        let head = self.atom()?;
        let mut args = Vec::new();
        while self.at_atom_start() {
            args.push(self.atom()?);
        }
        Ok(if args.is_empty() {
            head
        } else {
            STerm::App(Box::new(head), args)
        })
    }

    fn at_atom_start(&self) -> bool {
        match self.peek() {
            Tok::LParen | Tok::Num(_) => true,
            Tok::Ident(s) => !RESERVED.contains(&s.as_str()) || s == "match" || s == "Type" || s == "Prop",
            _ => false,
        }
    }

    fn atom(&mut self) -> Result<STerm, ParseError> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let t = self.term()?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(t)
            }
            Tok::Num(n) => {
                let pos = self.bump().pos;
                Ok(STerm::Num(n, pos))
            }
            Tok::Ident(s) if s == "Prop" => {
                let pos = self.bump().pos;
                Ok(STerm::Sort(Sort::Prop, pos))
            }
            Tok::Ident(s) if s == "Type" => {
                let pos = self.bump().pos;
                if self.at(&Tok::At) {
                    self.bump();
                    self.expect(&Tok::LBrace, "`{`")?;
                    let level = match self.peek().clone() {
                        Tok::Num(n) if n <= Sort::MAX_LEVEL as u64 => {
                            self.bump();
                            n as u32
                        }
                        _ => return self.error(&[&format!("a universe level at most {}", Sort::MAX_LEVEL)]),
                    };
                    self.expect(&Tok::RBrace, "`}`")?;
                    return Ok(STerm::Sort(Sort::Type(level), pos));
                }
                Ok(STerm::Sort(Sort::Type(0), pos))
            }
            Tok::Ident(s) if s == "match" => self.match_expr(),
            Tok::Ident(_) => Ok(STerm::Var(self.ident()?)),
            _ => self.error(&["a term"]),
        }
    }

    fn match_expr(&mut self) -> Result<STerm, ParseError> {
        let pos = self.expect_kw("match")?;
        let scrutinee = self.term()?;
        let as_name = if self.at_kw("as") {
            self.bump();
            self.binder_name()?.0
        } else {
            None
        };
        let in_clause = if self.at_kw("in") {
            self.bump();
            if self.at(&Tok::LParen) {
                Some(InClause::Pattern(self.atom_pattern()?))
            } else {
                Some(InClause::Inductive(self.ident()?))
            }
        } else {
            None
        };
        let ret = if self.at_kw("return") {
            self.bump();
            Some(self.term()?)
        } else {
            None
        };
        self.expect_kw("with")?;
        let mut branches = Vec::new();
        if self.at(&Tok::Bar) {
            self.bump();
        }
        if !self.at_kw("end") {
            loop {
                let ctor = self.ident()?;
                let mut args = Vec::new();
                loop {
                    if self.at(&Tok::LParen) {
                        self.bump();
                        let (name, pos) = self.binder_name()?;
                        self.expect(&Tok::Colon, "`:`")?;
                        let ty = self.term()?;
                        self.expect(&Tok::RParen, "`)`")?;
                        args.push(Binder {
                            name,
                            ty: Some(Box::new(ty)),
                            pos,
                        });
                    } else if self.at_binder_name() {
                        let (name, pos) = self.binder_name()?;
                        args.push(Binder { name, ty: None, pos });
                    } else {
                        break;
                    }
                }
                self.expect(&Tok::DArrow, "`=>`")?;
                let body = self.term()?;
                branches.push(Branch { ctor, args, body });
                if self.at(&Tok::Bar) {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.expect_kw("end")?;
        Ok(STerm::Match(Box::new(Match {
            scrutinee,
            as_name,
            in_clause,
            ret,
            branches,
            pos,
        })))
    }

    /// A parenthesized `in` pattern; `_` is allowed among its arguments.
    fn atom_pattern(&mut self) -> Result<STerm, ParseError> {
        self.expect(&Tok::LParen, "`(`")?;
        let mut parts = Vec::new();
        loop {
            match self.peek().clone() {
                Tok::Underscore => {
                    let pos = self.bump().pos;
                    parts.push(STerm::Var(Ident { name: "_".into(), pos }));
                }
                Tok::Ident(s) if !RESERVED.contains(&s.as_str()) => parts.push(STerm::Var(self.ident()?)),
                _ => break,
            }
        }
        let pat = if self.at(&Tok::Equals) && parts.len() == 1 {
            let pos = self.bump().pos;
            let rhs = match self.peek().clone() {
                Tok::Underscore => STerm::Var(Ident {
                    name: "_".into(),
                    pos: self.bump().pos,
                }),
                _ => STerm::Var(self.ident()?),
            };
            STerm::Eq(Box::new(parts.pop().unwrap()), Box::new(rhs), pos)
        } else if parts.is_empty() {
            return self.error(&["an inductive pattern"]);
        } else {
            let head = parts.remove(0);
            if parts.is_empty() {
                head
            } else {
                STerm::App(Box::new(head), parts)
            }
        };
        self.expect(&Tok::RParen, "`)`")?;
        Ok(pat)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_bool() {
        let cmds = parse_program("Inductive bool : Type := true | false.").unwrap();
        let CommandKind::DefineInductive(ind) = &cmds[0].kind else { panic!() };
        assert_eq!(ind.name.name, "bool");
        assert!(ind.params.is_empty());
        assert_eq!(ind.syntactic_index_count(), 0);
        assert_eq!(ind.ctors.len(), 2);
    }

    #[test]
    fn parses_brtree_split() {
        let src = "Inductive brtree A : nat -> Type :=
            | Leaf (a : A) : brtree A 0
            | Node (n : nat) (l : list (brtree A n)) : brtree A (S n).";
        let cmds = parse_program(src).unwrap();
        let CommandKind::DefineInductive(ind) = &cmds[0].kind else { panic!() };
        assert_eq!(ind.params.len(), 1);
        assert_eq!(ind.syntactic_index_count(), 1);
        assert_eq!(ind.ctors.iter().map(|c| c.name.name.as_str()).collect::<Vec<_>>(), ["Leaf", "Node"]);
    }

    #[test]
    fn parses_vernacular() {
        let cmds = parse_program(
            "MetaCoq Run Derive Generalized Constructor for Node as Node_eqs.
             Scheme Induction for brtree.
             Derive subterm for list.
             Derive Subterm for list.",
        )
        .unwrap();
        assert!(matches!(&cmds[0].kind, CommandKind::DeriveGenCtor { ctor, as_name }
            if ctor.name == "Node" && as_name.name == "Node_eqs"));
        assert!(matches!(&cmds[1].kind, CommandKind::SchemeInduction { ind, name: None } if ind.name == "brtree"));
        assert!(matches!(&cmds[2].kind, CommandKind::DeriveSubterm { ind } if ind.name == "list"));
        assert!(matches!(&cmds[3].kind, CommandKind::DeriveSubterm { ind } if ind.name == "list"));
    }

    #[test]
    fn reports_position_and_expected() {
        let err = parse_program("Inductive bool : Type := true | .").unwrap_err();
        assert_eq!(err.pos, Pos { line: 1, col: 33 });
        assert_eq!(err.expected, vec!["an identifier".to_string()]);
        assert_eq!(parse_program("Inductive bool : Type := true | .").unwrap_err(), err);
    }

    #[test]
    fn operator_precedence() {
        let t = parse_surface_term("a :: l = m -> B").unwrap();
        let STerm::Arrow(lhs, _) = t else { panic!() };
        let STerm::Eq(l, _, _) = *lhs else { panic!() };
        assert!(matches!(*l, STerm::Cons(..)));
    }
}
