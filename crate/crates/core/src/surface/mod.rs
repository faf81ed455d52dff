//! Coq-like concrete syntax: lexer, parser, name resolution to de Bruijn
//! terms, and the built-in prelude.

pub mod ast;
mod lexer;
mod parser;
mod prelude;
mod resolve;

use std::fmt;

use thiserror::Error;

use crate::kernel::TypeError;
use crate::term::{Context, GlobalEnv, Term};

pub use parser::{parse_program, parse_surface_term, RESERVED};
pub use prelude::{prelude, PRELUDE_SOURCE};
pub use resolve::{define, load_program, resolve_definition, resolve_inductive, Resolver};

/// 1-based line and column.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{pos}: parse error: expected {}, got {found}", expected.join(" or "))]
pub struct ParseError {
    pub pos: Pos,
    pub expected: Vec<String>,
    pub found: String,
}

impl ParseError {
    pub fn new(pos: Pos, expected: Vec<String>, found: String) -> ParseError {
        ParseError { pos, expected, found }
    }
}

/// Any failure turning source text into kernel declarations.
#[derive(Clone, Debug, Error)]
pub enum SurfaceError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("{pos}: unbound identifier: {name}")]
    Unbound { name: String, pos: Pos },
    #[error("{pos}: resolution error: {msg}")]
    Resolve { msg: String, pos: Pos },
    #[error("{pos}: {}", .err.kind.label())]
    Type { err: Box<TypeError>, pos: Pos },
    #[error("{pos}: name clash: `{name}` is already defined")]
    NameClash { name: String, pos: Pos },
}

impl SurfaceError {
    pub fn pos(&self) -> Pos {
        match self {
            SurfaceError::Parse(e) => e.pos,
            SurfaceError::Unbound { pos, .. }
            | SurfaceError::Resolve { pos, .. }
            | SurfaceError::Type { pos, .. }
            | SurfaceError::NameClash { pos, .. } => *pos,
        }
    }

    /// `<kind>: <detail>` without the position prefix; type errors are
    /// rendered against `env`.
    pub fn message(&self, env: &GlobalEnv) -> String {
        match self {
            SurfaceError::Parse(e) => format!("parse error: expected {}, got {}", e.expected.join(" or "), e.found),
            SurfaceError::Unbound { name, .. } => format!("unbound identifier: {name}"),
            SurfaceError::Resolve { msg, .. } => format!("resolution error: {msg}"),
            SurfaceError::Type { err, .. } => err.render(env),
            SurfaceError::NameClash { name, .. } => format!("name clash: `{name}` is already defined"),
        }
    }
}

/// Parses and resolves a single term in `ctx`.
pub fn parse_term(src: &str, ctx: &Context, env: &GlobalEnv) -> Result<Term, SurfaceError> {
    let surface = parse_surface_term(src)?;
    Resolver::new(env, ctx).resolve(&surface)
}
