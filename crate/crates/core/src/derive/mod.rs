//! The three derivation plugins: generalized constructors, nested induction
//! schemes (via a unary parametricity translation), and direct subterm
//! relations. Every output is re-checked by the kernel unless checking is
//! explicitly disabled.

pub mod genctor;
pub mod induction;
pub mod subterm;

use std::rc::Rc;

use thiserror::Error;

use crate::kernel::{self, TypeError};
use crate::term::pretty::{pretty_inductive, render_definition, ScopeError};
use crate::term::sexp;
use crate::term::{alpha_eq, Context, Definition, GlobalEnv, Ident, InductiveDecl};

pub use genctor::{
    abstract_eqns, build_transport_body, derive_generalized_constructor, split_index_spine, GenCtorRequest,
    SpineMode,
};
pub use induction::{
    build_case_hypothesis, build_motive, derive_induction, param_translate_inductive, SchemeRequest,
};
pub use subterm::{
    derive_subterm, direct_subterm_pairs, transitive_closure, transitive_closure_step, SubtermDecl,
};

#[derive(Debug, Clone, Error)]
pub enum DeriveError {
    #[error("unknown inductive: {0}")]
    UnknownInductive(String),
    #[error("unknown constructor: {0}")]
    UnknownConstructor(String),
    #[error("name clash: `{0}` is already defined")]
    NameClash(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("malformed constructor head: {0}")]
    MalformedConstructorHead(String),
    #[error("{0}")]
    Kernel(Box<TypeError>),
    #[error("cannot display the result: {0}")]
    Display(#[from] ScopeError),
}

impl From<TypeError> for DeriveError {
    fn from(e: TypeError) -> DeriveError {
        DeriveError::Kernel(Box::new(e))
    }
}

impl DeriveError {
    /// Message with kernel errors rendered against `env`.
    pub fn render(&self, env: &GlobalEnv) -> String {
        match self {
            DeriveError::Kernel(e) => e.render(env),
            other => other.to_string(),
        }
    }
}

pub type DeriveResult<T> = Result<T, DeriveError>;

#[derive(Debug, Clone)]
pub enum DerivedItem {
    Constant(Rc<Definition>),
    Inductive(Rc<InductiveDecl>),
}

/// A named derivation output with its check status and display form.
#[derive(Debug, Clone)]
pub struct DerivedDef {
    pub name: Ident,
    pub item: DerivedItem,
    /// False only when kernel checking was disabled for the session.
    pub checked: bool,
    pub warnings: Vec<String>,
    pub pretty: String,
}

impl DerivedDef {
    pub fn sexp(&self) -> String {
        match &self.item {
            DerivedItem::Constant(d) => sexp::definition_to_sexp(d),
            DerivedItem::Inductive(d) => sexp::inductive_to_sexp(d),
        }
    }
}

/// Checks (optionally) and registers a derived definition.
pub(crate) fn finish_definition(
    env: &mut GlobalEnv,
    def: Definition,
    check: bool,
    warnings: Vec<String>,
) -> DeriveResult<DerivedDef> {
    if env.contains(&def.name) || env.constructor(&def.name).is_some() {
        return Err(DeriveError::NameClash(def.name.to_string()));
    }
    if check {
        let empty = Context::new();
        kernel::infer_sort(env, &empty, &def.ty)?;
        kernel::check(env, &empty, &def.body, &def.ty)?;
    }
    let added = env
        .add_definition(def)
        .map_err(|e| DeriveError::NameClash(e.to_string()))?;
    let pretty = render_definition(env, &added.name, &added.ty, &added.body)?;
    Ok(DerivedDef {
        name: added.name.clone(),
        item: DerivedItem::Constant(added),
        checked: check,
        warnings,
        pretty,
    })
}

/// Checks (optionally) and registers a derived inductive.
pub(crate) fn finish_inductive(
    env: &mut GlobalEnv,
    decl: InductiveDecl,
    check: bool,
    warnings: Vec<String>,
) -> DeriveResult<DerivedDef> {
    ensure_fresh(env, &decl)?;
    if check {
        kernel::check_inductive(env, &decl)?;
    }
    let added = env
        .add_inductive(decl)
        .map_err(|e| DeriveError::NameClash(e.to_string()))?;
    let pretty = pretty_inductive(env, &added)?;
    Ok(DerivedDef {
        name: added.name.clone(),
        item: DerivedItem::Inductive(added),
        checked: check,
        warnings,
        pretty,
    })
}

fn ensure_fresh(env: &GlobalEnv, decl: &InductiveDecl) -> DeriveResult<()> {
    let names = std::iter::once(&decl.name).chain(decl.ctors.iter().map(|c| &c.name));
    for n in names {
        if env.contains(n) || env.constructor(n).is_some() {
            return Err(DeriveError::NameClash(n.to_string()));
        }
    }
    Ok(())
}

/// Structural equality of declarations up to binder names.
pub fn inductive_alpha_eq(a: &InductiveDecl, b: &InductiveDecl) -> bool {
    let ctx_eq = |x: &Context, y: &Context| {
        x.len() == y.len()
            && x.decls()
                .iter()
                .zip(y.decls())
                .all(|(d, e)| alpha_eq(&d.ty, &e.ty))
    };
    a.name == b.name
        && a.sort == b.sort
        && ctx_eq(&a.params, &b.params)
        && ctx_eq(&a.indices, &b.indices)
        && a.ctors.len() == b.ctors.len()
        && a.ctors
            .iter()
            .zip(&b.ctors)
            .all(|(c, d)| c.name == d.name && alpha_eq(&c.ty, &d.ty))
}
