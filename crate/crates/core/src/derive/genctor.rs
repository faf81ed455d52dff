//! Generalized constructors: a constructor whose result indices are replaced
//! by fresh variables constrained by equations, e.g.
//! `Node_eqs : forall A n l x, x = S n -> brtree A x`.

use crate::kernel::try_infer;
use crate::term::{
    compose_lam, decompose_app, decompose_prod, lift, mk_apps, Context, Decl, Definition, GlobalEnv, Ident,
    InductiveDecl, Name, Term,
};

use super::{finish_definition, DeriveError, DeriveResult, DerivedDef};

/// Which application arguments of the constructor's result are abstracted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SpineMode {
    /// Only the indices (arguments after the parameters).
    #[default]
    IndexSpine,
    /// Every argument, parameters included.
    FullSpine,
}

#[derive(Clone, Debug)]
pub struct GenCtorRequest {
    pub ind: Ident,
    pub ctor: usize,
    pub new_name: Ident,
    pub mode: SpineMode,
}

impl GenCtorRequest {
    pub fn for_constructor(env: &GlobalEnv, ctor: &str, new_name: &str) -> DeriveResult<GenCtorRequest> {
        let (decl, idx) = env
            .constructor(ctor)
            .ok_or_else(|| DeriveError::UnknownConstructor(ctor.to_string()))?;
        Ok(GenCtorRequest {
            ind: decl.name.clone(),
            ctor: idx,
            new_name: new_name.into(),
            mode: SpineMode::IndexSpine,
        })
    }
}

/// Number of leading application arguments of `ty` left untouched.
fn kept_args(env: &GlobalEnv, ty: &Term, mode: SpineMode) -> usize {
    let (head, args) = decompose_app(ty);
    match (mode, &head) {
        (SpineMode::FullSpine, _) => 0,
        (SpineMode::IndexSpine, Term::Ind(name)) => env.inductive(name).map_or(args.len(), |d| d.num_params()),
        (SpineMode::IndexSpine, _) => args.len(),
    }
}

/// Walks the products of `ty` and, at the result, abstracts each selected
/// application argument `a` (last argument first) into a binder `x : T` and
/// an equation `x = a`. `n` counts the pairs introduced so far; `ctx` grows
/// by both binders of every pair.
pub fn abstract_eqns(env: &GlobalEnv, ctx: &Context, ty: &Term, n: usize, mode: SpineMode) -> Term {
    match ty {
        Term::Prod(na, a, b) => {
            let inner = ctx.pushed(Decl::new(na.clone(), (**a).clone()));
            Term::prod(na.clone(), (**a).clone(), abstract_eqns(env, &inner, b, 0, mode))
        }
        Term::App(l, a) if decompose_app(ty).1.len() > kept_args(env, ty, mode) => {
            let type_of_x = try_infer(env, ctx, &lift(2 * n, 0, a));
            let eqn = mk_apps(
                Term::ind("eq"),
                [lift(1, 0, &type_of_x), Term::Rel(0), lift(1 + 2 * n, 0, a)],
            );
            let mut inner = ctx.pushed(Decl::new(Name::named("x"), type_of_x.clone()));
            inner.push(Decl::new(Name::Anonymous, eqn.clone()));
            let rest = abstract_eqns(env, &inner, l, n + 1, mode);
            Term::prod(Name::named("x"), type_of_x, Term::prod(Name::Anonymous, eqn, rest))
        }
        b => mk_apps(lift(2 * n, 0, b), (0..n).map(|m| Term::Rel(1 + 2 * m))),
    }
}

/// Splits `I params indices` at the parameter count of `ind`.
pub fn split_index_spine(head: &Term, ind: &InductiveDecl) -> DeriveResult<(Term, Vec<Term>)> {
    let (h, args) = decompose_app(head);
    let np = ind.num_params();
    if !matches!(&h, Term::Ind(n) if *n == ind.name) || args.len() < np {
        let msg = format!("expected {} applied to at least {np} parameters", ind.name);
        return Err(DeriveError::MalformedConstructorHead(msg));
    }
    Ok((mk_apps(h, args[..np].iter().cloned()), args[np..].to_vec()))
}

/// A term of type `gen_ty` built from the original constructor by
/// transporting along each equation, innermost equation first.
pub fn build_transport_body(env: &GlobalEnv, req: &GenCtorRequest, gen_ty: &Term) -> DeriveResult<Term> {
    let decl = env
        .inductive(&req.ind)
        .ok_or_else(|| DeriveError::UnknownInductive(req.ind.to_string()))?;
    let cty = decl.ctor_type(req.ctor);
    let (ctele, concl) = decompose_prod(&cty);
    let (base, slots) = match req.mode {
        SpineMode::IndexSpine => split_index_spine(&concl, decl)?,
        SpineMode::FullSpine => decompose_app(&concl),
    };
    let k = slots.len();
    let (gtele, _) = decompose_prod(gen_ty);
    let total = ctele.len() + 2 * k;
    if gtele.len() != total {
        let msg = format!("generalized type has {} binders, expected {total}", gtele.len());
        return Err(DeriveError::MalformedConstructorHead(msg));
    }

    // Slot s (0-based, in spine order) has its variable at Rel(2s+1) and its
    // equation at Rel(2s) in the full context.
    let x = |s: usize| Term::Rel(2 * s + 1);
    let e = |s: usize| lift(2 * k, 0, &slots[s]);
    let slot_type = |s: usize| -> Term {
        let level = total - 1 - 2 * s;
        let eq_ty = lift(total - level, 0, &gtele.decls()[level].ty);
        decompose_app(&eq_ty).1.into_iter().next().unwrap_or(Term::Rel(0))
    };
    let base = lift(2 * k, 0, &base);
    // Goal with slots before `s` already generalized and `z` in slot `s`,
    // everything shifted under `shift` extra binders.
    let goal = |s: usize, z: Term, shift: usize| -> Term {
        let vals = (0..k).map(|j| match j.cmp(&s) {
            std::cmp::Ordering::Less => lift(shift, 0, &x(j)),
            std::cmp::Ordering::Equal => z.clone(),
            std::cmp::Ordering::Greater => lift(shift, 0, &e(j)),
        });
        mk_apps(lift(shift, 0, &base), vals)
    };

    let nargs = ctele.len();
    let mut acc = mk_apps(
        Term::Construct(decl.name.clone(), req.ctor),
        (0..nargs).map(|l| Term::Rel(total - 1 - l)),
    );
    for s in 0..k {
        let t = slot_type(s);
        let motive = Term::lam(
            Name::named("y"),
            t.clone(),
            Term::lam(
                Name::Anonymous,
                mk_apps(Term::ind("eq"), [lift(1, 0, &t), lift(1, 0, &x(s)), Term::Rel(0)]),
                Term::prod(Name::Anonymous, goal(s, Term::Rel(1), 2), goal(s, lift(3, 0, &x(s)), 3)),
            ),
        );
        let branch = Term::lam(Name::named("t"), goal(s, x(s), 0), Term::Rel(0));
        acc = Term::app(Term::case("eq", motive, Term::Rel(2 * s), vec![branch]), acc);
    }
    Ok(compose_lam(gtele.decls(), acc))
}

pub fn derive_generalized_constructor(
    env: &mut GlobalEnv,
    req: &GenCtorRequest,
    check: bool,
) -> DeriveResult<DerivedDef> {
    if env.contains(&req.new_name) || env.constructor(&req.new_name).is_some() {
        return Err(DeriveError::NameClash(req.new_name.to_string()));
    }
    let decl = env
        .inductive(&req.ind)
        .cloned()
        .ok_or_else(|| DeriveError::UnknownInductive(req.ind.to_string()))?;
    if req.ctor >= decl.ctors.len() {
        return Err(DeriveError::UnknownConstructor(format!("{}#{}", req.ind, req.ctor)));
    }
    let (_, concl) = decompose_prod(&decl.ctors[req.ctor].ty);
    split_index_spine(&concl, &decl)?;
    let gen_ty = abstract_eqns(env, &Context::new(), &decl.ctor_type(req.ctor), 0, req.mode);
    let body = build_transport_body(env, req, &gen_ty)?;
    let def = Definition {
        name: req.new_name.clone(),
        ty: gen_ty,
        body,
    };
    finish_definition(env, def, check, Vec::new())
}
