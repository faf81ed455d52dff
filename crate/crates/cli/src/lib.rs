//! Batch driver: runs a `.ind` file through a session and renders the
//! derived definitions.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::ValueEnum;
use derivekit_core::derive::{DerivedDef, SpineMode};
use derivekit_core::session::{ErrorClass, Session, SessionOptions};
use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 1;
pub const EXIT_TYPE: i32 = 2;
pub const EXIT_UNSUPPORTED: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, ValueEnum)]
pub enum EmitMode {
    #[default]
    Pretty,
    Sexp,
    Both,
}

#[derive(Clone, Debug)]
pub struct SessionConfig {
    pub input_path: PathBuf,
    pub emit: EmitMode,
    pub check: bool,
    /// Standard output when `None`.
    pub output_path: Option<PathBuf>,
    pub no_nested: bool,
    pub full_spine: bool,
}

impl SessionConfig {
    pub fn new(input_path: impl Into<PathBuf>) -> SessionConfig {
        SessionConfig {
            input_path: input_path.into(),
            emit: EmitMode::Pretty,
            check: true,
            output_path: None,
            no_nested: false,
            full_spine: false,
        }
    }

    fn options(&self) -> SessionOptions {
        SessionOptions {
            check: self.check,
            nested: !self.no_nested,
            spine_mode: if self.full_spine {
                SpineMode::FullSpine
            } else {
                SpineMode::IndexSpine
            },
        }
    }
}

#[derive(Debug, Error)]
#[error("{}: io error: {source}", path.display())]
pub struct IoError {
    pub path: PathBuf,
    #[source]
    pub source: io::Error,
}

fn pretty_block(defs: &[DerivedDef]) -> String {
    let items: Vec<String> = defs
        .iter()
        .map(|d| {
            let flag = if d.checked { "" } else { "(* unchecked *)\n" };
            format!("{flag}{}\n", d.pretty)
        })
        .collect();
    items.join("\n")
}

fn sexp_block(defs: &[DerivedDef]) -> String {
    defs.iter()
        .map(|d| {
            let flag = if d.checked { "" } else { "; unchecked\n" };
            format!("{flag}{}\n", d.sexp())
        })
        .collect()
}

/// Renders a sequence of derived definitions in the given mode.
pub fn render_output(defs: &[DerivedDef], mode: EmitMode) -> String {
    if defs.is_empty() {
        return String::new();
    }
    match mode {
        EmitMode::Pretty => pretty_block(defs),
        EmitMode::Sexp => sexp_block(defs),
        EmitMode::Both => format!("{}----\n{}", pretty_block(defs), sexp_block(defs)),
    }
}

/// Renders a single derived definition.
pub fn emit(def: &DerivedDef, mode: EmitMode) -> String {
    render_output(std::slice::from_ref(def), mode)
}

fn exit_code(class: ErrorClass) -> i32 {
    match class {
        ErrorClass::Parse => EXIT_PARSE,
        ErrorClass::Type => EXIT_TYPE,
        ErrorClass::Unsupported => EXIT_UNSUPPORTED,
    }
}

fn write_output(cfg: &SessionConfig, text: &str, stdout: &mut dyn Write) -> Result<(), IoError> {
    match &cfg.output_path {
        Some(p) => fs::write(p, text).map_err(|source| IoError {
            path: p.clone(),
            source,
        }),
        None => stdout
            .write_all(text.as_bytes())
            .and_then(|_| stdout.flush())
            .map_err(|source| IoError {
                path: PathBuf::from("<stdout>"),
                source,
            }),
    }
}

/// Runs a session, writing derived output to the configured destination
/// and diagnostics to `stderr`. Returns the process exit code.
pub fn run_session_with(cfg: &SessionConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let file = cfg.input_path.display().to_string();
    let src = match fs::read(&cfg.input_path) {
        Ok(bytes) => match String::from_utf8(bytes) {
            Ok(s) => s,
            Err(_) => {
                let _ = writeln!(stderr, "{file}: io error: input is not valid UTF-8");
                return EXIT_IO;
            }
        },
        Err(source) => {
            let e = IoError {
                path: cfg.input_path.clone(),
                source,
            };
            let _ = writeln!(stderr, "{e}");
            return EXIT_IO;
        }
    };
    let mut session = Session::new(cfg.options());
    let report = session.run_source(&src);
    for d in &report.outputs {
        for w in &d.warnings {
            let _ = writeln!(stderr, "{file}: warning: {w}");
        }
    }
    if let Err(e) = write_output(cfg, &render_output(&report.outputs, cfg.emit), stdout) {
        let _ = writeln!(stderr, "{e}");
        return EXIT_IO;
    }
    match report.error {
        None => EXIT_OK,
        Some(e) => {
            let _ = writeln!(stderr, "{file}:{e}");
            exit_code(e.class)
        }
    }
}

/// [`run_session_with`] on the process's standard streams.
pub fn run_session(cfg: &SessionConfig) -> i32 {
    run_session_with(cfg, &mut io::stdout().lock(), &mut io::stderr().lock())
}
