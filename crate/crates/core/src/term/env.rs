use std::collections::HashMap;
use std::rc::Rc;

use indexmap::IndexMap;
use thiserror::Error;

use super::{compose_prod, lift, mk_apps, Ident, Name, Sort, Term};

/// A local declaration; `body` is set for let-bound variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Decl {
    pub name: Name,
    pub ty: Term,
    pub body: Option<Term>,
}

impl Decl {
    pub fn new(name: Name, ty: Term) -> Decl {
        Decl { name, ty, body: None }
    }

    pub fn with_body(name: Name, ty: Term, body: Term) -> Decl {
        Decl {
            name,
            ty,
            body: Some(body),
        }
    }
}

/// Ordered local context, innermost declaration last.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Context {
    decls: Vec<Decl>,
}

impl Context {
    pub fn new() -> Context {
        Context::default()
    }

    pub fn len(&self) -> usize {
        self.decls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.decls.is_empty()
    }

    pub fn push(&mut self, decl: Decl) {
        self.decls.push(decl);
    }

    pub fn pop(&mut self) -> Option<Decl> {
        self.decls.pop()
    }

    /// Copy of `self` extended with `decl`.
    pub fn pushed(&self, decl: Decl) -> Context {
        let mut out = self.clone();
        out.push(decl);
        out
    }

    pub fn extend(&mut self, other: &Context) {
        self.decls.extend(other.decls.iter().cloned());
    }

    pub fn decls(&self) -> &[Decl] {
        &self.decls
    }

    pub fn into_decls(self) -> Vec<Decl> {
        self.decls
    }

    /// The declaration `Rel(i)` refers to.
    pub fn get(&self, i: usize) -> Option<&Decl> {
        self.decls.len().checked_sub(i + 1).map(|l| &self.decls[l])
    }

    /// Type of `Rel(i)`, lifted into the full context.
    pub fn type_of(&self, i: usize) -> Option<Term> {
        self.get(i).map(|d| lift(i + 1, 0, &d.ty))
    }

    pub fn names(&self) -> Vec<Option<&str>> {
        self.decls.iter().map(|d| d.name.as_str()).collect()
    }
}

impl From<Vec<Decl>> for Context {
    fn from(decls: Vec<Decl>) -> Context {
        Context { decls }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstructorDecl {
    pub name: Ident,
    /// Scoped under the parameter context; the inductive itself appears as `Ind`.
    pub ty: Term,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InductiveDecl {
    pub name: Ident,
    pub params: Context,
    /// Scoped under `params`.
    pub indices: Context,
    pub sort: Sort,
    pub ctors: Vec<ConstructorDecl>,
}

impl InductiveDecl {
    pub fn num_params(&self) -> usize {
        self.params.len()
    }

    pub fn num_indices(&self) -> usize {
        self.indices.len()
    }

    /// `Π params. Π indices. sort`, closed.
    pub fn arity(&self) -> Term {
        compose_prod(self.params.decls(), self.arity_after_params())
    }

    /// `Π indices. sort`, scoped under the parameters.
    pub fn arity_after_params(&self) -> Term {
        compose_prod(self.indices.decls(), Term::Sort(self.sort))
    }

    /// `Π params. ctor.ty`, closed.
    pub fn ctor_type(&self, idx: usize) -> Term {
        compose_prod(self.params.decls(), self.ctors[idx].ty.clone())
    }

    pub fn ctor_index(&self, name: &str) -> Option<usize> {
        self.ctors.iter().position(|c| &*c.name == name)
    }

    /// The inductive applied to its own parameters, scoped under `params`
    /// followed by `extra` further binders.
    pub fn applied_to_params(&self, extra: usize) -> Term {
        let np = self.num_params();
        mk_apps(Term::Ind(self.name.clone()), (0..np).map(|j| Term::Rel(extra + np - 1 - j)))
    }

    /// Number of arguments (after parameters) of constructor `idx`.
    pub fn ctor_arity(&self, idx: usize) -> usize {
        super::prod_arity(&self.ctors[idx].ty)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Definition {
    pub name: Ident,
    pub ty: Term,
    pub body: Term,
}

#[derive(Clone, Debug)]
pub enum GlobalEntry {
    Inductive(Rc<InductiveDecl>),
    Definition(Rc<Definition>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnvError {
    #[error("name clash: `{0}` is already defined")]
    NameClash(String),
}

/// Append-only global environment.
#[derive(Clone, Debug, Default)]
pub struct GlobalEnv {
    entries: IndexMap<Ident, GlobalEntry>,
    ctors: HashMap<Ident, (Ident, usize)>,
}

impl GlobalEnv {
    /// An environment with no entries at all (not even the prelude).
    pub fn empty() -> GlobalEnv {
        GlobalEnv::default()
    }

    /// Whether `name` is taken by an inductive, a constructor or a constant.
    pub fn contains(&self, name: &str) -> bool {
        self.entries.contains_key(name) || self.ctors.contains_key(name)
    }

    pub fn lookup(&self, name: &str) -> Option<&GlobalEntry> {
        self.entries.get(name)
    }

    pub fn inductive(&self, name: &str) -> Option<&Rc<InductiveDecl>> {
        match self.entries.get(name) {
            Some(GlobalEntry::Inductive(d)) => Some(d),
            _ => None,
        }
    }

    pub fn definition(&self, name: &str) -> Option<&Rc<Definition>> {
        match self.entries.get(name) {
            Some(GlobalEntry::Definition(d)) => Some(d),
            _ => None,
        }
    }

    /// Looks up a constructor by its global name: `(inductive, index)`.
    pub fn constructor(&self, name: &str) -> Option<(&Rc<InductiveDecl>, usize)> {
        let (ind, idx) = self.ctors.get(name)?;
        Some((self.inductive(ind)?, *idx))
    }

    pub fn ctor_name(&self, ind: &str, idx: usize) -> Option<&Ident> {
        self.inductive(ind)?.ctors.get(idx).map(|c| &c.name)
    }

    pub fn add_inductive(&mut self, decl: InductiveDecl) -> Result<Rc<InductiveDecl>, EnvError> {
        if self.contains(&decl.name) {
            return Err(EnvError::NameClash(decl.name.to_string()));
        }
        for (i, c) in decl.ctors.iter().enumerate() {
            if self.contains(&c.name) || c.name == decl.name || decl.ctors[..i].iter().any(|d| d.name == c.name) {
                return Err(EnvError::NameClash(c.name.to_string()));
            }
        }
        for (i, c) in decl.ctors.iter().enumerate() {
            self.ctors.insert(c.name.clone(), (decl.name.clone(), i));
        }
        let decl = Rc::new(decl);
        self.entries.insert(decl.name.clone(), GlobalEntry::Inductive(decl.clone()));
        Ok(decl)
    }

    pub fn add_definition(&mut self, def: Definition) -> Result<Rc<Definition>, EnvError> {
        if self.contains(&def.name) {
            return Err(EnvError::NameClash(def.name.to_string()));
        }
        let def = Rc::new(def);
        self.entries.insert(def.name.clone(), GlobalEntry::Definition(def.clone()));
        Ok(def)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Ident, &GlobalEntry)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Every global name: inductives, constructors and constants.
    pub fn global_names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().chain(self.ctors.keys()).map(|s| &**s)
    }
}
