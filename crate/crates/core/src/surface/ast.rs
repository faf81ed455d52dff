//! Named surface syntax, produced by the parser and consumed by the resolver.

use super::Pos;
use crate::term::Sort;

#[derive(Clone, Debug, PartialEq)]
pub struct Ident {
    pub name: String,
    pub pos: Pos,
}

/// A binder; `name` is `None` for `_`, `ty` is `None` when left implicit.
#[derive(Clone, Debug, PartialEq)]
pub struct Binder {
    pub name: Option<String>,
    pub ty: Option<Box<STerm>>,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq)]
pub enum STerm {
    Var(Ident),
    Sort(Sort, Pos),
    Num(u64, Pos),
    App(Box<STerm>, Vec<STerm>),
    Arrow(Box<STerm>, Box<STerm>),
    Forall(Vec<Binder>, Box<STerm>),
    Fun(Vec<Binder>, Box<STerm>),
    Let {
        binder: Binder,
        val: Box<STerm>,
        body: Box<STerm>,
    },
    Eq(Box<STerm>, Box<STerm>, Pos),
    Cons(Box<STerm>, Box<STerm>, Pos),
    Match(Box<Match>),
    Fix(Box<Fix>),
}

impl STerm {
    pub fn pos(&self) -> Pos {
        match self {
            STerm::Var(id) => id.pos,
            STerm::Sort(_, p) | STerm::Num(_, p) | STerm::Eq(_, _, p) | STerm::Cons(_, _, p) => *p,
            STerm::App(f, _) => f.pos(),
            STerm::Arrow(a, _) => a.pos(),
            STerm::Forall(bs, body) | STerm::Fun(bs, body) => bs.first().map_or_else(|| body.pos(), |b| b.pos),
            STerm::Let { binder, .. } => binder.pos,
            STerm::Match(m) => m.pos,
            STerm::Fix(f) => f.name.pos,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum InClause {
    /// `in I`: the `return` clause is the full motive function.
    Inductive(Ident),
    /// `in (I _ .. y ..)` or `in (_ = y)`: names the indices for `return`.
    Pattern(STerm),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Match {
    pub scrutinee: STerm,
    pub as_name: Option<String>,
    pub in_clause: Option<InClause>,
    pub ret: Option<STerm>,
    pub branches: Vec<Branch>,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Branch {
    pub ctor: Ident,
    pub args: Vec<Binder>,
    pub body: STerm,
}

#[derive(Clone, Debug, PartialEq)]
pub enum StructArg {
    Name(Ident),
    Index(usize, Pos),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Fix {
    pub name: Ident,
    /// Empty in the explicit `fix F {struct k} : T := body` form.
    pub binders: Vec<Binder>,
    pub struct_arg: Option<StructArg>,
    pub ty: STerm,
    pub body: STerm,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SConstructor {
    pub name: Ident,
    pub binders: Vec<Binder>,
    pub ty: Option<STerm>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SInductive {
    pub name: Ident,
    pub params: Vec<Binder>,
    pub arity: Option<STerm>,
    pub ctors: Vec<SConstructor>,
}

impl SInductive {
    /// Number of indices as written (arrow or forall components of the arity).
    pub fn syntactic_index_count(&self) -> usize {
        fn count(t: &STerm) -> usize {
            match t {
                STerm::Arrow(_, b) => 1 + count(b),
                STerm::Forall(bs, b) => bs.len() + count(b),
                _ => 0,
            }
        }
        self.arity.as_ref().map_or(0, count)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SDefinition {
    pub name: Ident,
    pub binders: Vec<Binder>,
    pub ty: Option<STerm>,
    pub body: STerm,
}

#[derive(Clone, Debug, PartialEq)]
pub enum CommandKind {
    DefineInductive(SInductive),
    DefineConstant(SDefinition),
    DeriveGenCtor { ctor: Ident, as_name: Ident },
    SchemeInduction { ind: Ident, name: Option<Ident> },
    DeriveSubterm { ind: Ident },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Command {
    pub kind: CommandKind,
    pub pos: Pos,
}
