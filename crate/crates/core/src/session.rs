//! Command interpreter: runs a program's declarations and derivation
//! commands in order against a single global environment.

use std::fmt;

use crate::derive::{
    derive_generalized_constructor, derive_induction, derive_subterm, DeriveError, DerivedDef, GenCtorRequest,
    SchemeRequest, SpineMode,
};
use crate::surface::ast::{Command, CommandKind};
use crate::surface::{define, parse_program, prelude, Pos, SurfaceError};
use crate::term::GlobalEnv;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SessionOptions {
    /// Kernel-check every derived definition before it is registered.
    pub check: bool,
    /// Add container hypotheses for nested recursive arguments.
    pub nested: bool,
    pub spine_mode: SpineMode,
}

impl Default for SessionOptions {
    fn default() -> SessionOptions {
        SessionOptions {
            check: true,
            nested: true,
            spine_mode: SpineMode::IndexSpine,
        }
    }
}

/// Error classes, each mapped to its own process exit code by the CLI.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorClass {
    Parse,
    /// Type, positivity, guard, scope, unknown-name and name-clash errors.
    Type,
    Unsupported,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SessionError {
    pub class: ErrorClass,
    pub pos: Pos,
    /// `<kind>: <detail>`, without the position.
    pub message: String,
}

impl fmt::Display for SessionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.pos, self.message)
    }
}

impl std::error::Error for SessionError {}

/// Everything a program produced before it finished or failed.
#[derive(Debug, Default)]
pub struct SessionReport {
    pub outputs: Vec<DerivedDef>,
    pub error: Option<SessionError>,
}

pub struct Session {
    pub env: GlobalEnv,
    pub options: SessionOptions,
}

impl Session {
    /// A session over the prelude.
    pub fn new(options: SessionOptions) -> Session {
        Session {
            env: prelude(),
            options,
        }
    }

    /// Parses and runs `src`, stopping at the first error.
    pub fn run_source(&mut self, src: &str) -> SessionReport {
        let mut report = SessionReport::default();
        let commands = match parse_program(src) {
            Ok(c) => c,
            Err(e) => {
                report.error = Some(surface_error(&self.env, SurfaceError::Parse(e)));
                return report;
            }
        };
        for cmd in &commands {
            match self.execute(cmd) {
                Ok(defs) => report.outputs.extend(defs),
                Err(e) => {
                    report.error = Some(e);
                    break;
                }
            }
        }
        report
    }

    /// Runs one command; derivations return their outputs, auxiliary
    /// translations first.
    pub fn execute(&mut self, cmd: &Command) -> Result<Vec<DerivedDef>, SessionError> {
        let check = self.options.check;
        let target = match &cmd.kind {
            CommandKind::DeriveGenCtor { ctor: id, .. }
            | CommandKind::SchemeInduction { ind: id, .. }
            | CommandKind::DeriveSubterm { ind: id } => id.pos,
            _ => cmd.pos,
        };
        let derived = match &cmd.kind {
            CommandKind::DefineInductive(_) | CommandKind::DefineConstant(_) => {
                define(&mut self.env, cmd).map_err(|e| surface_error(&self.env, e))?;
                return Ok(Vec::new());
            }
            CommandKind::DeriveGenCtor { ctor, as_name } => {
                GenCtorRequest::for_constructor(&self.env, &ctor.name, &as_name.name)
                    .and_then(|req| {
                        let req = GenCtorRequest {
                            mode: self.options.spine_mode,
                            ..req
                        };
                        derive_generalized_constructor(&mut self.env, &req, check)
                    })
                    .map(|d| vec![d])
            }
            CommandKind::SchemeInduction { ind, name } => {
                let mut req = SchemeRequest::new(&ind.name, self.options.nested);
                if let Some(n) = name {
                    req.name = n.name.as_str().into();
                }
                derive_induction(&mut self.env, &req, check).map(|out| {
                    let mut v = out.forced;
                    v.push(out.scheme);
                    v
                })
            }
            CommandKind::DeriveSubterm { ind } => derive_subterm(&mut self.env, &ind.name, check).map(|(d, _)| vec![d]),
        };
        derived.map_err(|e| derive_error(&self.env, e, target))
    }
}

fn surface_error(env: &GlobalEnv, e: SurfaceError) -> SessionError {
    let class = match e {
        SurfaceError::Parse(_) => ErrorClass::Parse,
        _ => ErrorClass::Type,
    };
    SessionError {
        class,
        pos: e.pos(),
        message: e.message(env),
    }
}

fn derive_error(env: &GlobalEnv, e: DeriveError, pos: Pos) -> SessionError {
    let class = match e {
        DeriveError::Unsupported(_) => ErrorClass::Unsupported,
        _ => ErrorClass::Type,
    };
    SessionError {
        class,
        pos,
        message: e.render(env),
    }
}
