use std::fmt;

use crate::term::pretty::pretty_print;
use crate::term::sexp;
use crate::term::{Context, GlobalEnv, Term};

#[derive(Debug, Clone, PartialEq)]
pub enum TypeErrorKind {
    UnboundRel(usize),
    UnknownGlobal(String),
    NotAFunction,
    Mismatch { expected: Term, got: Term },
    NotASort,
    UniverseOverflow,
    IllFormedCase(String),
    IllFormedFix(String),
    IllFormedInductive(String),
    GuardViolation(String),
    PositivityViolation(String),
}

impl TypeErrorKind {
    pub fn label(&self) -> &'static str {
        match self {
            TypeErrorKind::UnboundRel(_) => "unbound variable",
            TypeErrorKind::UnknownGlobal(_) => "unknown global",
            TypeErrorKind::NotAFunction => "not a function",
            TypeErrorKind::Mismatch { .. } => "mismatch",
            TypeErrorKind::NotASort => "not a sort",
            TypeErrorKind::UniverseOverflow => "universe overflow",
            TypeErrorKind::IllFormedCase(_) => "ill-formed case",
            TypeErrorKind::IllFormedFix(_) => "ill-formed fixpoint",
            TypeErrorKind::IllFormedInductive(_) => "ill-formed inductive",
            TypeErrorKind::GuardViolation(_) => "guard violation",
            TypeErrorKind::PositivityViolation(_) => "positivity violation",
        }
    }
}

/// A kernel rejection, pinned to the offending subterm and its context.
#[derive(Debug, Clone, PartialEq)]
pub struct TypeError {
    pub kind: TypeErrorKind,
    pub ctx: Context,
    pub subject: Term,
}

impl TypeError {
    pub fn new(kind: TypeErrorKind, ctx: &Context, subject: &Term) -> TypeError {
        TypeError {
            kind,
            ctx: ctx.clone(),
            subject: subject.clone(),
        }
    }

    /// Human-readable message; terms are pretty-printed against `env` when
    /// possible and fall back to the s-expression form otherwise.
    pub fn render(&self, env: &GlobalEnv) -> String {
        let show = |t: &Term| pretty_print(env, &self.ctx, t).unwrap_or_else(|_| sexp::term_to_sexp(t));
        let label = self.kind.label();
        match &self.kind {
            TypeErrorKind::Mismatch { expected, got } => {
                format!("{label}: expected {}, got {}", show(expected), show(got))
            }
            TypeErrorKind::UnboundRel(i) => format!("{label}: #{i}"),
            TypeErrorKind::UnknownGlobal(n) => format!("{label}: {n}"),
            TypeErrorKind::IllFormedCase(m)
            | TypeErrorKind::IllFormedFix(m)
            | TypeErrorKind::IllFormedInductive(m)
            | TypeErrorKind::GuardViolation(m)
            | TypeErrorKind::PositivityViolation(m) => format!("{label}: {m} in {}", show(&self.subject)),
            TypeErrorKind::NotAFunction | TypeErrorKind::NotASort | TypeErrorKind::UniverseOverflow => {
                format!("{label}: {}", show(&self.subject))
            }
        }
    }
}

impl fmt::Display for TypeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render(&GlobalEnv::empty()))
    }
}

impl std::error::Error for TypeError {}
