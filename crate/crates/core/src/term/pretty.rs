//! Named, minimally parenthesized rendering of kernel terms.
//!
//! The output is accepted by the surface parser and resolves back to an
//! alpha-equal term. Binder names are freshened with primes against every
//! name in scope and every global, so each printed variable is unambiguous.

use std::collections::HashSet;

use thiserror::Error;

use super::{
    alpha_eq, decompose_app, lift, occurs_rel, suggest_name, Context, Decl, GlobalEnv, InductiveDecl, Name, Sort, Term,
};
use crate::kernel;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScopeError {
    #[error("variable #{0} escapes the context")]
    EscapingRel(usize),
    #[error("unknown constructor {0}#{1}")]
    UnknownConstructor(String, usize),
    #[error("unknown inductive {0}")]
    UnknownInductive(String),
}

/// Words that cannot be used as binder names.
pub use crate::surface::RESERVED as KEYWORDS;

const TOP: u8 = 0;
const ARROW: u8 = 1;
const EQ: u8 = 2;
const CONS: u8 = 3;
const APP: u8 = 4;
const ATOM: u8 = 5;

pub fn pretty_print(env: &GlobalEnv, ctx: &Context, t: &Term) -> Result<String, ScopeError> {
    let mut p = Printer::new(env, ctx);
    p.term(t, TOP, true)
}

/// Display form of an inductive: full arity, constructors quantified over
/// the parameters.
pub fn pretty_inductive(env: &GlobalEnv, decl: &InductiveDecl) -> Result<String, ScopeError> {
    let empty = Context::new();
    let mut out = format!("Inductive {} : {} :=", decl.name, pretty_print(env, &empty, &decl.arity())?);
    if decl.ctors.is_empty() {
        out.push('.');
        return Ok(out);
    }
    for (i, c) in decl.ctors.iter().enumerate() {
        let ty = pretty_print(env, &empty, &decl.ctor_type(i))?;
        out.push_str(&format!("\n| {} : {ty}", c.name));
    }
    out.push('.');
    Ok(out)
}

/// Source form of an inductive: parameters before the colon, so that
/// parsing it back reproduces the same parameter/index split.
pub fn render_inductive_source(env: &GlobalEnv, decl: &InductiveDecl) -> Result<String, ScopeError> {
    let mut p = Printer::new(env, &Context::new());
    let mut out = format!("Inductive {}", decl.name);
    for d in decl.params.decls() {
        let ty = p.term(&d.ty, TOP, true)?;
        let name = p.binder_name(&d.name, &d.ty, true);
        out.push_str(&format!(" ({name} : {ty})"));
        p.push(name, d.clone());
    }
    let arity = p.term(&decl.arity_after_params(), TOP, true)?;
    out.push_str(&format!(" : {arity} :="));
    for c in &decl.ctors {
        let ty = p.term(&c.ty, TOP, true)?;
        out.push_str(&format!("\n| {} : {ty}", c.name));
    }
    out.push('.');
    Ok(out)
}

pub fn render_definition(env: &GlobalEnv, name: &str, ty: &Term, body: &Term) -> Result<String, ScopeError> {
    let empty = Context::new();
    Ok(format!(
        "Definition {name} : {} :=\n  {}.",
        pretty_print(env, &empty, ty)?,
        pretty_print(env, &empty, body)?
    ))
}

struct Printer<'e> {
    env: &'e GlobalEnv,
    names: Vec<String>,
    ctx: Context,
    reserved: HashSet<String>,
}

impl<'e> Printer<'e> {
    fn new(env: &'e GlobalEnv, ctx: &Context) -> Printer<'e> {
        let mut reserved: HashSet<String> = env.global_names().map(str::to_string).collect();
        reserved.extend(KEYWORDS.iter().map(|k| k.to_string()));
        let mut p = Printer {
            env,
            names: Vec::new(),
            ctx: Context::new(),
            reserved,
        };
        for d in ctx.decls() {
            let name = p.binder_name(&d.name, &d.ty, true);
            p.push(name, d.clone());
        }
        p
    }

    fn push(&mut self, name: String, decl: Decl) {
        self.names.push(name);
        self.ctx.push(decl);
    }

    fn pop(&mut self, n: usize) {
        for _ in 0..n {
            self.names.pop();
            self.ctx.pop();
        }
    }

    fn fresh(&self, base: &str) -> String {
        let mut s = base.to_string();
        while self.reserved.contains(&s) || self.names.iter().any(|n| *n == s) {
            s.push('\'');
        }
        s
    }

    fn binder_name(&self, na: &Name, ty: &Term, used: bool) -> String {
        match na {
            Name::Named(s) => self.fresh(s),
            Name::Anonymous if used => {
                let names: Vec<Option<&str>> = self.names.iter().map(|s| Some(s.as_str())).collect();
                self.fresh(&suggest_name(ty, &names))
            }
            Name::Anonymous => "_".to_string(),
        }
    }

    fn wrap(s: String, own: u8, open: bool, required: u8, tail: bool) -> String {
        let bare = if open {
            required == TOP || (required == ARROW && tail)
        } else {
            own >= required
        };
        if bare {
            s
        } else {
            format!("({s})")
        }
    }

    fn term(&mut self, t: &Term, required: u8, tail: bool) -> Result<String, ScopeError> {
        let (s, own, open) = self.form(t, tail || required == TOP)?;
        Ok(Self::wrap(s, own, open, required, tail))
    }

    /// Renders `t` and reports its precedence level and whether it is an
    /// open-ended form (binder notation extending to the right).
    fn form(&mut self, t: &Term, tail: bool) -> Result<(String, u8, bool), ScopeError> {
        Ok(match t {
            Term::Sort(Sort::Prop) => ("Prop".into(), ATOM, false),
            Term::Sort(Sort::Type(0)) => ("Type".into(), ATOM, false),
            Term::Sort(Sort::Type(i)) => (format!("Type@{{{i}}}"), ATOM, false),
            Term::Rel(i) => {
                let name = self
                    .names
                    .len()
                    .checked_sub(i + 1)
                    .map(|l| self.names[l].clone())
                    .ok_or(ScopeError::EscapingRel(*i))?;
                (name, ATOM, false)
            }
            Term::Ind(n) | Term::Const(n) => (n.to_string(), ATOM, false),
            Term::Construct(..) | Term::App(..) => return self.application(t),
            Term::Prod(na, dom, cod) => {
                if occurs_rel(cod, 0) {
                    (self.binder_group(t, "forall", ",")?, TOP, true)
                } else {
                    let left = self.term(dom, EQ, false)?;
                    self.push("_".into(), Decl::new(na.clone(), (**dom).clone()));
                    let right = self.term(cod, ARROW, tail);
                    self.pop(1);
                    (format!("{left} -> {}", right?), ARROW, false)
                }
            }
            Term::Lam(..) => (self.binder_group(t, "fun", " =>")?, TOP, true),
            Term::LetIn(na, val, ty, body) => {
                let ty_s = self.term(ty, TOP, true)?;
                let val_s = self.term(val, TOP, true)?;
                let name = self.binder_name(na, ty, occurs_rel(body, 0));
                self.push(name.clone(), Decl::with_body(na.clone(), (**ty).clone(), (**val).clone()));
                let body_s = self.term(body, TOP, true);
                self.pop(1);
                (format!("let {name} : {ty_s} := {val_s} in {}", body_s?), TOP, true)
            }
            Term::Case {
                ind,
                motive,
                scrutinee,
                branches,
            } => (self.case(ind, motive, scrutinee, branches)?, APP, false),
            Term::Fix { .. } => (self.fix(t)?, TOP, true),
        })
    }

    /// `forall (x : A) (y : B), body` or `fun (x : A) => body`; a single
    /// binder drops the parentheses.
    fn binder_group(&mut self, t: &Term, keyword: &str, sep: &str) -> Result<String, ScopeError> {
        let is_prod = matches!(t, Term::Prod(..));
        let mut binders = Vec::new();
        let mut cur = t;
        loop {
            let (na, dom, body) = match cur {
                Term::Prod(na, dom, cod) if is_prod && occurs_rel(cod, 0) => (na, dom, cod),
                Term::Lam(na, dom, body) if !is_prod => (na, dom, body),
                _ => break,
            };
            let dom_s = match self.term(dom, TOP, true) {
                Ok(s) => s,
                Err(e) => {
                    self.pop(binders.len());
                    return Err(e);
                }
            };
            let name = self.binder_name(na, dom, occurs_rel(body, 0) || is_prod);
            binders.push((name.clone(), dom_s));
            self.push(name, Decl::new(na.clone(), (**dom).clone()));
            cur = body;
        }
        let body = self.term(cur, TOP, true);
        self.pop(binders.len());
        let body = body?;
        let head = if let [(name, ty)] = binders.as_slice() {
            format!("{name} : {ty}")
        } else {
            binders
                .iter()
                .map(|(n, ty)| format!("({n} : {ty})"))
                .collect::<Vec<_>>()
                .join(" ")
        };
        Ok(format!("{keyword} {head}{sep} {body}"))
    }

    fn nat_numeral(&self, t: &Term) -> Option<u64> {
        let is_nat = self.env.ctor_name("nat", 0).is_some_and(|n| &**n == "O")
            && self.env.ctor_name("nat", 1).is_some_and(|n| &**n == "S");
        if !is_nat {
            return None;
        }
        let mut n = 0;
        let mut cur = t;
        loop {
            match cur {
                Term::Construct(i, 0) if &**i == "nat" => return Some(n),
                Term::App(f, a) if matches!(&**f, Term::Construct(i, 1) if &**i == "nat") => {
                    n += 1;
                    cur = a;
                }
                _ => return None,
            }
        }
    }

    fn inferred_is(&self, t: &Term, ty: &Term) -> bool {
        kernel::infer(self.env, &self.ctx, t).is_ok_and(|inferred| alpha_eq(&inferred, ty))
    }

    fn application(&mut self, t: &Term) -> Result<(String, u8, bool), ScopeError> {
        if let Some(n) = self.nat_numeral(t) {
            return Ok((n.to_string(), ATOM, false));
        }
        let (head, args) = decompose_app(t);
        match (&head, args.as_slice()) {
            (Term::Ind(n), [ty, a, b]) if &**n == "eq" && self.inferred_is(a, ty) => {
                let l = self.term(a, CONS, false)?;
                let r = self.term(b, CONS, false)?;
                return Ok((format!("{l} = {r}"), EQ, false));
            }
            (Term::Construct(n, 1), [ty, a, b])
                if &**n == "list"
                    && self.env.ctor_name("list", 1).is_some_and(|c| &**c == "cons")
                    && self.inferred_is(a, ty) =>
            {
                let l = self.term(a, APP, false)?;
                let r = self.term(b, CONS, false)?;
                return Ok((format!("{l} :: {r}"), CONS, false));
            }
            _ => {}
        }
        let head_s = match &head {
            Term::Construct(ind, idx) => self
                .env
                .ctor_name(ind, *idx)
                .map(|n| n.to_string())
                .ok_or_else(|| ScopeError::UnknownConstructor(ind.to_string(), *idx))?,
            _ => self.term(&head, ATOM, false)?,
        };
        if args.is_empty() {
            return Ok((head_s, ATOM, false));
        }
        let mut parts = vec![head_s];
        for a in &args {
            parts.push(self.term(a, ATOM, false)?);
        }
        Ok((parts.join(" "), APP, false))
    }

    fn case(&mut self, ind: &str, motive: &Term, scrutinee: &Term, branches: &[Term]) -> Result<String, ScopeError> {
        let decl = self
            .env
            .inductive(ind)
            .cloned()
            .ok_or_else(|| ScopeError::UnknownInductive(ind.to_string()))?;
        let scrut = self.term(scrutinee, TOP, true)?;
        let motive_s = self.term(motive, ATOM, false)?;
        let mut out = format!("match {scrut} in {ind} return {motive_s} with");
        for (i, branch) in branches.iter().enumerate() {
            let cname = decl
                .ctors
                .get(i)
                .map(|c| c.name.to_string())
                .ok_or_else(|| ScopeError::UnknownConstructor(ind.to_string(), i))?;
            let arity = decl.ctor_arity(i);
            let mut pattern = cname;
            let mut cur = branch;
            let mut pushed = 0;
            if arity > 0 && leading_lams(branch) >= arity {
                for _ in 0..arity {
                    let Term::Lam(na, dom, body) = cur else { unreachable!() };
                    let dom_s = match self.term(dom, TOP, true) {
                        Ok(s) => s,
                        Err(e) => {
                            self.pop(pushed);
                            return Err(e);
                        }
                    };
                    let name = self.binder_name(na, dom, occurs_rel(body, 0));
                    pattern.push_str(&format!(" ({name} : {dom_s})"));
                    self.push(name, Decl::new(na.clone(), (**dom).clone()));
                    pushed += 1;
                    cur = body;
                }
            }
            let body = self.term(cur, TOP, true);
            self.pop(pushed);
            out.push_str(&format!(" | {pattern} => {}", body?));
        }
        out.push_str(" end");
        Ok(out)
    }

    fn fix(&mut self, t: &Term) -> Result<String, ScopeError> {
        let Term::Fix {
            name,
            struct_arg,
            ty,
            body,
        } = t
        else {
            unreachable!()
        };
        let k = *struct_arg;
        let fname = self.fresh(name.as_str().unwrap_or("F"));
        let fix_decl = Decl::new(name.clone(), (**ty).clone());

        // Binders shared by the type and the body: body domains must be the
        // type domains shifted over the fixpoint binder.
        let mut shared = Vec::new();
        let (mut tcur, mut bcur): (&Term, &Term) = (ty, body);
        while let (Term::Prod(tn, tdom, tcod), Term::Lam(_, bdom, bbody)) = (tcur, bcur) {
            if !alpha_eq(bdom, &lift(1, shared.len(), tdom)) {
                break;
            }
            shared.push((tn.clone(), (**tdom).clone(), (**bdom).clone()));
            tcur = tcod;
            bcur = bbody;
        }
        if shared.len() <= k {
            let ty_s = self.term(ty, TOP, true)?;
            self.push(fname.clone(), fix_decl);
            let body_s = self.term(body, TOP, true);
            self.pop(1);
            return Ok(format!("fix {fname} {{struct {k}}} : {ty_s} := {}", body_s?));
        }

        // Choose argument names with the fixpoint name already in scope.
        self.names.push(fname.clone());
        let mut arg_names = Vec::new();
        for (na, tdom, _) in &shared {
            let n = self.binder_name(na, tdom, true);
            self.names.push(n.clone());
            arg_names.push(n);
        }
        for _ in 0..=shared.len() {
            self.names.pop();
        }

        let mut binders = Vec::new();
        let mut pushed = 0;
        let mut result = Ok(());
        for ((na, tdom, _), n) in shared.iter().zip(&arg_names) {
            match self.term(tdom, TOP, true) {
                Ok(s) => binders.push(format!("({n} : {s})")),
                Err(e) => {
                    result = Err(e);
                    break;
                }
            }
            self.push(n.clone(), Decl::new(na.clone(), tdom.clone()));
            pushed += 1;
        }
        let ret = result.and_then(|_| self.term(tcur, TOP, true));
        self.pop(pushed);
        let ret = ret?;

        self.push(fname.clone(), fix_decl);
        for ((na, _, bdom), n) in shared.iter().zip(&arg_names) {
            self.push(n.clone(), Decl::new(na.clone(), bdom.clone()));
        }
        let body_s = self.term(bcur, TOP, true);
        self.pop(shared.len() + 1);
        Ok(format!(
            "fix {fname} {} {{struct {}}} : {ret} := {}",
            binders.join(" "),
            arg_names[k],
            body_s?
        ))
    }
}

fn leading_lams(t: &Term) -> usize {
    let mut n = 0;
    let mut cur = t;
    while let Term::Lam(_, _, b) = cur {
        n += 1;
        cur = b;
    }
    n
}
