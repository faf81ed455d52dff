//! Scope resolution: named surface syntax to de Bruijn kernel terms.
//!
//! Besides plain name lookup, the resolver elaborates the few conveniences
//! the syntax offers: numerals, `a = b` and `a :: l` (whose type argument is
//! inferred by the kernel), match motives and branch binder types, and the
//! types of unannotated binders (taken from the first application in scope
//! that uses the binder as a direct argument).

use crate::kernel::{self, TypeError};
use crate::term::{
    compose_lam, compose_prod, decompose_app, decompose_prod, instantiate, instantiate_under, lift,
    mk_apps, occurs_rel, subst, suggest_name, ConstructorDecl, Context, Decl, Definition, GlobalEntry, GlobalEnv, InductiveDecl,
    Name, Term,
};

use super::ast::*;
use super::{parse_program, Pos, SurfaceError};

type Result<T> = std::result::Result<T, SurfaceError>;

fn resolve_err<T>(msg: impl Into<String>, pos: Pos) -> Result<T> {
    Err(SurfaceError::Resolve { msg: msg.into(), pos })
}

fn type_err(err: TypeError, pos: Pos) -> SurfaceError {
    SurfaceError::Type {
        err: Box::new(err),
        pos,
    }
}

fn to_name(n: &Option<String>) -> Name {
    n.as_deref().and_then(Name::try_named).unwrap_or(Name::Anonymous)
}

/// Resolution state: the kernel context plus the surface names of its
/// entries (`None` for binders that cannot be referenced).
pub struct Resolver<'e> {
    env: &'e GlobalEnv,
    names: Vec<Option<String>>,
    ctx: Context,
}

impl<'e> Resolver<'e> {
    pub fn new(env: &'e GlobalEnv, ctx: &Context) -> Resolver<'e> {
        Resolver {
            env,
            names: ctx.decls().iter().map(|d| d.name.as_str().map(str::to_string)).collect(),
            ctx: ctx.clone(),
        }
    }

    fn push(&mut self, name: Option<String>, decl: Decl) {
        self.names.push(name);
        self.ctx.push(decl);
    }

    fn pop(&mut self, n: usize) {
        for _ in 0..n {
            self.names.pop();
            self.ctx.pop();
        }
    }

    /// Runs `f` and restores the scope depth afterwards, even on error.
    fn scoped<T>(&mut self, f: impl FnOnce(&mut Self) -> Result<T>) -> Result<T> {
        let depth = self.names.len();
        let r = f(self);
        let extra = self.names.len() - depth;
        self.pop(extra);
        r
    }

    fn lookup_local(&self, name: &str) -> Option<usize> {
        self.names.iter().rev().position(|n| n.as_deref() == Some(name))
    }

    fn infer(&self, t: &Term, pos: Pos) -> Result<Term> {
        kernel::infer(self.env, &self.ctx, t).map_err(|e| type_err(e, pos))
    }

    pub fn resolve(&mut self, t: &STerm) -> Result<Term> {
        match t {
            STerm::Var(id) => self.var(id),
            STerm::Sort(s, _) => Ok(Term::Sort(*s)),
            STerm::Num(n, pos) => self.numeral(*n, *pos),
            STerm::App(f, args) => {
                let mut out = self.resolve(f)?;
                for a in args {
                    out = Term::app(out, self.resolve(a)?);
                }
                Ok(out)
            }
            STerm::Arrow(a, b) => {
                let dom = self.resolve(a)?;
                let cod = self.scoped(|r| {
                    r.push(None, Decl::new(Name::Anonymous, dom.clone()));
                    r.resolve(b)
                })?;
                Ok(Term::prod(Name::Anonymous, dom, cod))
            }
            STerm::Forall(bs, body) => {
                let (tele, body) = self.binders_then(bs, body)?;
                Ok(compose_prod(&tele, body))
            }
            STerm::Fun(bs, body) => {
                let (tele, body) = self.binders_then(bs, body)?;
                Ok(compose_lam(&tele, body))
            }
            STerm::Let { binder, val, body } => {
                let v = self.resolve(val)?;
                let ty = match &binder.ty {
                    Some(ty) => self.resolve(ty)?,
                    None => self.infer(&v, binder.pos)?,
                };
                let na = to_name(&binder.name);
                let b = self.scoped(|r| {
                    r.push(binder.name.clone(), Decl::with_body(na.clone(), ty.clone(), v.clone()));
                    r.resolve(body)
                })?;
                Ok(Term::let_in(na, v, ty, b))
            }
            STerm::Eq(a, b, pos) => {
                self.require_inductive("eq", *pos)?;
                let a = self.resolve(a)?;
                let b = self.resolve(b)?;
                let ty = self.infer(&a, *pos)?;
                Ok(mk_apps(Term::ind("eq"), [ty, a, b]))
            }
            STerm::Cons(a, l, pos) => {
                self.require_inductive("list", *pos)?;
                let a = self.resolve(a)?;
                let l = self.resolve(l)?;
                let ty = self.infer(&a, *pos)?;
                Ok(mk_apps(Term::construct("list", 1), [ty, a, l]))
            }
            STerm::Match(m) => self.match_expr(m),
            STerm::Fix(f) => self.fix(f),
        }
    }

    fn require_inductive(&self, name: &str, pos: Pos) -> Result<()> {
        if self.env.inductive(name).is_some() {
            Ok(())
        } else {
            resolve_err(format!("this notation needs the inductive `{name}`"), pos)
        }
    }

    fn var(&self, id: &Ident) -> Result<Term> {
        if let Some(i) = self.lookup_local(&id.name) {
            return Ok(Term::Rel(i));
        }
        match self.env.lookup(&id.name) {
            Some(GlobalEntry::Inductive(d)) => return Ok(Term::Ind(d.name.clone())),
            Some(GlobalEntry::Definition(d)) => return Ok(Term::Const(d.name.clone())),
            None => {}
        }
        if let Some((decl, idx)) = self.env.constructor(&id.name) {
            return Ok(Term::Construct(decl.name.clone(), idx));
        }
        Err(SurfaceError::Unbound {
            name: id.name.clone(),
            pos: id.pos,
        })
    }

    fn numeral(&self, n: u64, pos: Pos) -> Result<Term> {
        let is_nat = self.env.ctor_name("nat", 0).is_some_and(|c| &**c == "O")
            && self.env.ctor_name("nat", 1).is_some_and(|c| &**c == "S");
        if !is_nat {
            return resolve_err("numerals need the inductive `nat` with constructors O and S", pos);
        }
        let mut t = Term::construct("nat", 0);
        for _ in 0..n {
            t = Term::app(Term::construct("nat", 1), t);
        }
        Ok(t)
    }

    /// Resolves a binder telescope followed by a body, returning the
    /// telescope declarations and the body scoped under them.
    fn binders_then(&mut self, bs: &[Binder], body: &STerm) -> Result<(Vec<Decl>, Term)> {
        self.scoped(|r| {
            let mut tele = Vec::new();
            for (i, b) in bs.iter().enumerate() {
                let ty = r.binder_type(b, &bs[i + 1..], &[body])?;
                let decl = Decl::new(to_name(&b.name), ty);
                r.push(b.name.clone(), decl.clone());
                tele.push(decl);
            }
            let body = r.resolve(body)?;
            Ok((tele, body))
        })
    }

    /// The annotated type of `b`, or one deduced from its first use as a
    /// direct argument in `rest` / `tail`.
    fn binder_type(&mut self, b: &Binder, rest: &[Binder], tail: &[&STerm]) -> Result<Term> {
        if let Some(ty) = &b.ty {
            return self.resolve(ty);
        }
        let Some(x) = &b.name else {
            return resolve_err("cannot infer the type of `_`; add an annotation", b.pos);
        };
        let mut candidates: Vec<&STerm> = Vec::new();
        for r in rest {
            if r.name.as_deref() == Some(x.as_str()) {
                break;
            }
            if let Some(ty) = &r.ty {
                candidates.push(ty);
            }
        }
        let shadowed = rest.iter().any(|r| r.name.as_deref() == Some(x.as_str()));
        if !shadowed {
            candidates.extend(tail.iter().copied());
        }
        for t in candidates {
            if let Some(ty) = self.type_from_use(x, t) {
                return Ok(ty);
            }
        }
        resolve_err(format!("cannot infer the type of `{x}`; add an annotation"), b.pos)
    }

    fn type_from_use(&mut self, x: &str, t: &STerm) -> Option<Term> {
        let mut uses = Vec::new();
        collect_uses(t, x, &mut uses);
        uses.into_iter().find_map(|(head, args, k)| self.use_type(head, &args[..k]))
    }

    /// Type of the `prefix.len()`-th argument of `head`, if `head` and the
    /// preceding arguments all resolve in the current scope.
    fn use_type(&mut self, head: &STerm, prefix: &[STerm]) -> Option<Term> {
        let head = self.try_resolve(head)?;
        let mut ty = kernel::infer(self.env, &self.ctx, &head).ok()?;
        for a in prefix {
            let a = self.try_resolve(a)?;
            match kernel::whnf(self.env, &self.ctx, &ty) {
                Term::Prod(_, _, cod) => ty = subst(&cod, 0, &a),
                _ => return None,
            }
        }
        match kernel::whnf(self.env, &self.ctx, &ty) {
            Term::Prod(_, dom, _) => Some((*dom).clone()),
            _ => None,
        }
    }

    fn try_resolve(&mut self, t: &STerm) -> Option<Term> {
        self.resolve(t).ok()
    }

    fn match_expr(&mut self, m: &Match) -> Result<Term> {
        let scrut = self.resolve(&m.scrutinee)?;
        let scrut_pos = m.scrutinee.pos();
        let sty = self.infer(&scrut, scrut_pos)?;
        let sty = kernel::whnf(self.env, &self.ctx, &sty);
        let (head, args) = decompose_app(&sty);
        let decl = match &head {
            Term::Ind(n) => self.env.inductive(n).cloned(),
            _ => None,
        };
        let Some(decl) = decl else {
            return resolve_err("the scrutinee does not have an inductive type", scrut_pos);
        };
        let np = decl.num_params();
        let ni = decl.num_indices();
        if args.len() != np + ni {
            return resolve_err("the scrutinee's inductive type is not fully applied", scrut_pos);
        }
        let params = &args[..np];

        let branches = self.branches(m, &decl, params)?;

        let motive = match (&m.in_clause, &m.ret) {
            (Some(InClause::Inductive(i)), Some(ret)) => {
                if i.name != *decl.name {
                    return resolve_err(format!("the scrutinee has type {}, not {}", decl.name, i.name), i.pos);
                }
                self.resolve(ret)?
            }
            (Some(InClause::Inductive(i)), None) => {
                return resolve_err("`in I` needs a `return` clause giving the motive", i.pos);
            }
            (pattern, Some(ret)) => {
                let index_names = match pattern {
                    Some(InClause::Pattern(p)) => self.index_pattern(p, &decl)?,
                    _ => vec![None; ni],
                };
                let tele = motive_telescope(&decl, params, &index_names, &m.as_name);
                let body = self.scoped(|r| {
                    for (name, d) in &tele {
                        r.push(name.clone(), d.clone());
                    }
                    r.resolve(ret)
                })?;
                compose_lam(&tele.into_iter().map(|(_, d)| d).collect::<Vec<_>>(), body)
            }
            (_, None) => {
                let ty = self.constant_branch_type(&decl, &branches, m.pos)?;
                let tele = motive_telescope(&decl, params, &vec![None; ni], &None);
                let tele: Vec<Decl> = tele.into_iter().map(|(_, d)| d).collect();
                let body = lift(tele.len(), 0, &ty);
                compose_lam(&tele, body)
            }
        };
        Ok(Term::case(&decl.name, motive, scrut, branches))
    }

    fn index_pattern(&self, p: &STerm, decl: &InductiveDecl) -> Result<Vec<Option<String>>> {
        let np = decl.num_params();
        let (head, args): (Option<&str>, Vec<&STerm>) = match p {
            STerm::Eq(a, b, _) => (Some("eq"), vec![a, a, b]),
            STerm::App(h, args) => match &**h {
                STerm::Var(id) => (Some(id.name.as_str()), args.iter().collect()),
                _ => (None, vec![]),
            },
            STerm::Var(id) => (Some(id.name.as_str()), vec![]),
            _ => (None, vec![]),
        };
        if head != Some(&*decl.name) || args.len() != np + decl.num_indices() {
            let msg = format!("the `in` pattern must be {} applied to its parameters and indices", decl.name);
            return resolve_err(msg, p.pos());
        }
        args[np..]
            .iter()
            .map(|a| match a {
                STerm::Var(id) if id.name == "_" => Ok(None),
                STerm::Var(id) => Ok(Some(id.name.clone())),
                other => resolve_err("index patterns must be variables or `_`", other.pos()),
            })
            .collect()
    }

    fn branches(&mut self, m: &Match, decl: &InductiveDecl, params: &[Term]) -> Result<Vec<Term>> {
        for b in &m.branches {
            if decl.ctor_index(&b.ctor.name).is_none() {
                return resolve_err(format!("`{}` is not a constructor of {}", b.ctor.name, decl.name), b.ctor.pos);
            }
        }
        let mut out = Vec::new();
        for (i, ctor) in decl.ctors.iter().enumerate() {
            let mut matching = m.branches.iter().filter(|b| b.ctor.name == *ctor.name);
            let Some(branch) = matching.next() else {
                return resolve_err(format!("missing branch for constructor `{}`", ctor.name), m.pos);
            };
            if let Some(dup) = matching.next() {
                return resolve_err(format!("duplicate branch for constructor `{}`", ctor.name), dup.ctor.pos);
            }
            let arity = decl.ctor_arity(i);
            if branch.args.is_empty() {
                out.push(self.resolve(&branch.body)?);
                continue;
            }
            if branch.args.len() != arity {
                let msg = format!("constructor `{}` takes {arity} arguments, the pattern binds {}", ctor.name, branch.args.len());
                return resolve_err(msg, branch.ctor.pos);
            }
            let cty = instantiate(&ctor.ty, params);
            let (tele, _) = decompose_prod(&cty);
            let resolved = self.scoped(|r| {
                let mut decls = Vec::new();
                for (arg, d) in branch.args.iter().zip(tele.decls()) {
                    let ty = match &arg.ty {
                        Some(ty) => r.resolve(ty)?,
                        None => d.ty.clone(),
                    };
                    let decl = Decl::new(to_name(&arg.name), ty);
                    r.push(arg.name.clone(), decl.clone());
                    decls.push(decl);
                }
                let body = r.resolve(&branch.body)?;
                Ok(compose_lam(&decls, body))
            })?;
            out.push(resolved);
        }
        Ok(out)
    }

    /// Result type shared by all branches when no `return` clause is given;
    /// it must not depend on pattern variables.
    fn constant_branch_type(&mut self, decl: &InductiveDecl, branches: &[Term], pos: Pos) -> Result<Term> {
        for (i, b) in branches.iter().enumerate() {
            let arity = decl.ctor_arity(i);
            let ty = self.infer(b, pos)?;
            let (tele, concl) = decompose_prod(&ty);
            if tele.len() < arity {
                continue;
            }
            let rest = compose_prod(&tele.decls()[arity..], concl);
            if (0..arity).any(|k| occurs_rel(&rest, k)) {
                continue;
            }
            let mut t = rest;
            for _ in 0..arity {
                t = lower(&t, 0);
            }
            return Ok(t);
        }
        resolve_err("cannot infer the type of this match; add a `return` clause", pos)
    }

    fn fix(&mut self, f: &Fix) -> Result<Term> {
        let name = Name::try_named(&f.name.name).unwrap_or(Name::Anonymous);
        if f.binders.is_empty() {
            let k = match &f.struct_arg {
                Some(StructArg::Index(k, _)) => *k,
                _ => return resolve_err("a fixpoint without binders needs `{struct k}` with a numeral", f.name.pos),
            };
            let ty = self.resolve(&f.ty)?;
            let body = self.scoped(|r| {
                r.push(Some(f.name.name.clone()), Decl::new(name.clone(), ty.clone()));
                r.resolve(&f.body)
            })?;
            return Ok(Term::fix(name, k, ty, body));
        }
        let k = match &f.struct_arg {
            Some(StructArg::Index(k, _)) => *k,
            Some(StructArg::Name(id)) => f
                .binders
                .iter()
                .position(|b| b.name.as_deref() == Some(id.name.as_str()))
                .map_or_else(|| resolve_err(format!("`{}` is not an argument of the fixpoint", id.name), id.pos), Ok)?,
            None if f.binders.len() == 1 => 0,
            None => return resolve_err("give the structural argument with `{struct x}`", f.name.pos),
        };
        if k >= f.binders.len() {
            return resolve_err("the structural argument is out of range", f.name.pos);
        }
        if let Some(b) = f.binders.iter().find(|b| b.ty.is_none()) {
            return resolve_err("fixpoint arguments need type annotations", b.pos);
        }
        let (tele, ret) = self.binders_then(&f.binders, &f.ty)?;
        let ty = compose_prod(&tele, ret);
        let (btele, body) = self.scoped(|r| {
            r.push(Some(f.name.name.clone()), Decl::new(name.clone(), ty.clone()));
            r.binders_then(&f.binders, &f.body)
        })?;
        Ok(Term::fix(name, k, ty, compose_lam(&btele, body)))
    }
}

/// Removes the (unused) variable `Rel(k)`.
fn lower(t: &Term, k: usize) -> Term {
    subst(t, k, &Term::prop())
}

/// Motive binders: the indices then the scrutinee, instantiated at `params`
/// (which are scoped in the enclosing context).
fn motive_telescope(
    decl: &InductiveDecl,
    params: &[Term],
    index_names: &[Option<String>],
    as_name: &Option<String>,
) -> Vec<(Option<String>, Decl)> {
    let mut out = Vec::new();
    for (j, d) in decl.indices.decls().iter().enumerate() {
        let ty = instantiate_under(&d.ty, j, params);
        let name = index_names.get(j).cloned().flatten();
        let na = match &name {
            Some(n) => to_name(&Some(n.clone())),
            None => d.name.clone(),
        };
        out.push((name, Decl::new(na, ty)));
    }
    let ni = decl.num_indices();
    let self_ty = mk_apps(
        Term::Ind(decl.name.clone()),
        params
            .iter()
            .map(|p| lift(ni, 0, p))
            .chain((0..ni).map(|j| Term::Rel(ni - 1 - j))),
    );
    out.push((as_name.clone(), Decl::new(to_name(as_name), self_ty)));
    out
}

/// Direct argument uses of `x` in `t`: `(head, args, k)` with `args[k] = x`,
/// in source order, ignoring scopes where `x` is rebound.
fn collect_uses<'t>(t: &'t STerm, x: &str, out: &mut Vec<(&'t STerm, &'t [STerm], usize)>) {
    let binds = |bs: &[Binder]| bs.iter().any(|b| b.name.as_deref() == Some(x));
    match t {
        STerm::Var(_) | STerm::Sort(..) | STerm::Num(..) => {}
        STerm::App(head, args) => {
            if let Some(k) = args.iter().position(|a| matches!(a, STerm::Var(id) if id.name == x)) {
                out.push((&**head, args.as_slice(), k));
            }
            collect_uses(head, x, out);
            for a in args {
                collect_uses(a, x, out);
            }
        }
        STerm::Arrow(a, b) | STerm::Eq(a, b, _) | STerm::Cons(a, b, _) => {
            collect_uses(a, x, out);
            collect_uses(b, x, out);
        }
        STerm::Forall(bs, body) | STerm::Fun(bs, body) => {
            for b in bs {
                if let Some(ty) = &b.ty {
                    collect_uses(ty, x, out);
                }
                if b.name.as_deref() == Some(x) {
                    return;
                }
            }
            collect_uses(body, x, out);
        }
        STerm::Let { binder, val, body } => {
            collect_uses(val, x, out);
            if let Some(ty) = &binder.ty {
                collect_uses(ty, x, out);
            }
            if binder.name.as_deref() != Some(x) {
                collect_uses(body, x, out);
            }
        }
        STerm::Match(m) => {
            collect_uses(&m.scrutinee, x, out);
            for b in &m.branches {
                if !binds(&b.args) {
                    collect_uses(&b.body, x, out);
                }
            }
        }
        STerm::Fix(f) => {
            if f.name.name != x && !binds(&f.binders) {
                collect_uses(&f.body, x, out);
            }
        }
    }
}

/// Resolves an inductive declaration against `env` (which must not yet
/// contain it). The result still has to pass the kernel's well-formedness
/// check.
pub fn resolve_inductive(env: &GlobalEnv, ind: &SInductive) -> Result<InductiveDecl> {
    let name = &ind.name;
    if env.contains(&name.name) || env.constructor(&name.name).is_some() {
        return Err(SurfaceError::NameClash {
            name: name.name.clone(),
            pos: name.pos,
        });
    }
    let mut r = Resolver::new(env, &Context::new());
    let mut params = Context::new();
    for b in &ind.params {
        let ty = match &b.ty {
            Some(ty) => r.resolve(ty)?,
            None => Term::type0(),
        };
        let decl = Decl::new(to_name(&b.name), ty);
        r.push(b.name.clone(), decl.clone());
        params.push(decl);
    }
    let arity = match &ind.arity {
        Some(a) => r.resolve(a)?,
        None => Term::type0(),
    };
    let (mut indices, sort) = decompose_prod(&arity);
    let Term::Sort(sort) = sort else {
        return resolve_err("the arity of an inductive must end in a sort", ind.arity.as_ref().map_or(name.pos, |a| a.pos()));
    };
    let mut named = Context::new();
    for d in indices.decls() {
        let mut d = d.clone();
        if d.name == Name::Anonymous {
            let mut all_names: Vec<Option<&str>> = params.decls().iter().map(|p| p.name.as_str()).collect();
            all_names.extend(named.decls().iter().map(|p| p.name.as_str()));
            d.name = Name::named(&suggest_name(&d.ty, &all_names));
        }
        named.push(d);
    }
    indices = named;

    let mut provisional = env.clone();
    let shell = InductiveDecl {
        name: name.name.as_str().into(),
        params: params.clone(),
        indices: indices.clone(),
        sort,
        ctors: Vec::new(),
    };
    provisional.add_inductive(shell.clone()).map_err(|_| SurfaceError::NameClash {
        name: name.name.clone(),
        pos: name.pos,
    })?;

    let mut ctors: Vec<ConstructorDecl> = Vec::new();
    for c in &ind.ctors {
        let clash = env.contains(&c.name.name)
            || env.constructor(&c.name.name).is_some()
            || c.name.name == name.name
            || ctors.iter().any(|d| *d.name == *c.name.name);
        if clash {
            return Err(SurfaceError::NameClash {
                name: c.name.name.clone(),
                pos: c.name.pos,
            });
        }
        let mut r = Resolver::new(&provisional, &params);
        let ty = match &c.ty {
            Some(ty) => {
                let (tele, concl) = r.binders_then(&c.binders, ty)?;
                compose_prod(&tele, concl)
            }
            None => {
                if !indices.is_empty() {
                    let msg = format!("constructor `{}` of an indexed family needs a type", c.name.name);
                    return resolve_err(msg, c.name.pos);
                }
                let default = STerm::App(
                    Box::new(STerm::Var(name.clone())),
                    ind.params
                        .iter()
                        .map(|p| STerm::Var(Ident {
                            name: p.name.clone().unwrap_or_else(|| "_".into()),
                            pos: p.pos,
                        }))
                        .collect(),
                );
                let (tele, concl) = r.binders_then(&c.binders, &default)?;
                compose_prod(&tele, concl)
            }
        };
        ctors.push(ConstructorDecl {
            name: c.name.name.as_str().into(),
            ty,
        });
    }
    Ok(InductiveDecl { ctors, ..shell })
}

pub fn resolve_definition(env: &GlobalEnv, def: &SDefinition) -> Result<Definition> {
    let name = &def.name;
    if env.contains(&name.name) || env.constructor(&name.name).is_some() {
        return Err(SurfaceError::NameClash {
            name: name.name.clone(),
            pos: name.pos,
        });
    }
    let mut r = Resolver::new(env, &Context::new());
    let (tele, body, ty) = r.scoped(|r| {
        let mut tele = Vec::new();
        let tail: Vec<&STerm> = def.ty.iter().chain(std::iter::once(&def.body)).collect();
        for (i, b) in def.binders.iter().enumerate() {
            let ty = r.binder_type(b, &def.binders[i + 1..], &tail)?;
            let decl = Decl::new(to_name(&b.name), ty);
            r.push(b.name.clone(), decl.clone());
            tele.push(decl);
        }
        let ty = match &def.ty {
            Some(t) => Some(r.resolve(t)?),
            None => None,
        };
        let body = r.resolve(&def.body)?;
        Ok((tele, body, ty))
    })?;
    let body = compose_lam(&tele, body);
    let ty = match ty {
        Some(t) => compose_prod(&tele, t),
        None => kernel::infer(env, &Context::new(), &body).map_err(|e| type_err(e, def.body.pos()))?,
    };
    Ok(Definition {
        name: name.name.as_str().into(),
        ty,
        body,
    })
}

/// Checks and adds a single `Inductive` or `Definition` command to `env`.
/// Derivation commands are rejected; they are run by the session layer.
pub fn define(env: &mut GlobalEnv, cmd: &Command) -> Result<()> {
    match &cmd.kind {
        CommandKind::DefineInductive(ind) => {
            let decl = resolve_inductive(env, ind)?;
            kernel::check_inductive(env, &decl).map_err(|e| type_err(e, ind.name.pos))?;
            env.add_inductive(decl).map_err(|_| SurfaceError::NameClash {
                name: ind.name.name.clone(),
                pos: ind.name.pos,
            })?;
        }
        CommandKind::DefineConstant(def) => {
            let d = resolve_definition(env, def)?;
            kernel::infer_sort(env, &Context::new(), &d.ty).map_err(|e| type_err(e, cmd.pos))?;
            kernel::check(env, &Context::new(), &d.body, &d.ty).map_err(|e| type_err(e, def.body.pos()))?;
            env.add_definition(d).map_err(|_| SurfaceError::NameClash {
                name: def.name.name.clone(),
                pos: def.name.pos,
            })?;
        }
        _ => return resolve_err("derivation commands are not allowed here", cmd.pos),
    }
    Ok(())
}

/// Parses `src` and adds its inductives and definitions to `env`, checking
/// each with the kernel.
pub fn load_program(env: &mut GlobalEnv, src: &str) -> Result<()> {
    for cmd in parse_program(src)? {
        define(env, &cmd)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{parse_term, prelude};

    #[test]
    fn resolves_lambda() {
        let env = prelude();
        let t = parse_term("fun (A : Type) (a : A) => a", &Context::new(), &env).unwrap();
        let expected = Term::lam(Name::named("A"), Term::type0(), Term::lam(Name::named("a"), Term::rel(0), Term::rel(0)));
        assert_eq!(t, expected);
    }

    #[test]
    fn numerals_and_constructors() {
        let env = prelude();
        let ctx = Context::new();
        assert_eq!(parse_term("O", &ctx, &env).unwrap(), Term::construct("nat", 0));
        let two = Term::app(Term::construct("nat", 1), Term::app(Term::construct("nat", 1), Term::construct("nat", 0)));
        assert_eq!(parse_term("S (S O)", &ctx, &env).unwrap(), two);
        assert_eq!(parse_term("2", &ctx, &env).unwrap(), two);
    }

    #[test]
    fn unbound_identifier() {
        let env = prelude();
        let err = parse_term("foo", &Context::new(), &env).unwrap_err();
        assert!(matches!(err, SurfaceError::Unbound { ref name, .. } if name == "foo"));
    }

    #[test]
    fn untyped_binder_from_use() {
        let mut env = prelude();
        load_program(&mut env, "Inductive vec (A : Type) : nat -> Type := vnil : vec A 0.").unwrap();
        let ctx = Context::from(vec![Decl::new(Name::named("A"), Term::type0())]);
        let t = parse_term("forall n, vec A n", &ctx, &env).unwrap();
        let expected = Term::prod(
            Name::named("n"),
            Term::ind("nat"),
            mk_apps(Term::ind("vec"), [Term::rel(1), Term::rel(0)]),
        );
        assert_eq!(t, expected);
    }

    #[test]
    fn match_without_return_gets_constant_motive() {
        let env = prelude();
        let ctx = Context::from(vec![Decl::new(Name::named("n"), Term::ind("nat"))]);
        let t = parse_term("match n with O => true | S m => false end", &ctx, &env).unwrap();
        let ty = kernel::infer(&env, &ctx, &t).unwrap();
        assert_eq!(kernel::whnf(&env, &ctx, &ty), Term::ind("bool"));
    }
}
