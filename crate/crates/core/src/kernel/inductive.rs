//! Well-formedness of inductive declarations: arity, constructor shapes,
//! universe levels and strict positivity (including nesting through the
//! parameters of earlier inductives).

use std::rc::Rc;

use crate::term::{
    alpha_eq, decompose_app, decompose_prod, instantiate, lift, mentions_global, Context, Decl, GlobalEnv, Ident,
    InductiveDecl, Sort, Term,
};

use super::error::{TypeError, TypeErrorKind};
use super::reduce::whnf;
use super::typing::TypeChecker;

pub fn check_inductive(env: &GlobalEnv, decl: &InductiveDecl) -> Result<(), TypeError> {
    let ill = |msg: String, ctx: &Context, t: &Term| TypeError::new(TypeErrorKind::IllFormedInductive(msg), ctx, t);
    let self_ref = Term::Ind(decl.name.clone());
    let tc = TypeChecker::new(env);
    let mut ctx = Context::new();
    for d in decl.params.decls().iter().chain(decl.indices.decls()) {
        tc.infer_sort(&ctx, &d.ty)?;
        ctx.push(d.clone());
    }
    if decl.sort.succ().is_none() {
        return Err(TypeError::new(TypeErrorKind::UniverseOverflow, &ctx, &Term::Sort(decl.sort)));
    }

    let mut provisional = env.clone();
    provisional
        .add_inductive(InductiveDecl {
            ctors: Vec::new(),
            ..decl.clone()
        })
        .map_err(|e| ill(e.to_string(), &Context::new(), &self_ref))?;
    let tc = TypeChecker::new(&provisional);
    let np = decl.num_params();
    let ni = decl.num_indices();
    let positivity = Positivity {
        env: &provisional,
        name: &decl.name,
        np,
    };

    for ctor in &decl.ctors {
        tc.infer_sort(&decl.params, &ctor.ty)?;
        let (tele, concl) = decompose_prod(&ctor.ty);
        let m = tele.len();
        let mut ctx = decl.params.clone();
        for arg in tele.decls() {
            if decl.sort != Sort::Prop {
                let s = tc.infer_sort(&ctx, &arg.ty)?;
                if !s.leq(decl.sort) {
                    let msg = format!("argument of {} is too large for {:?}", ctor.name, decl.sort);
                    return Err(ill(msg, &ctx, &arg.ty));
                }
            }
            positivity.check(&ctx, &arg.ty, &mut Vec::new())?;
            ctx.push(arg.clone());
        }
        let (head, args) = decompose_app(&concl);
        let uniform = args.len() == np + ni
            && matches!(&head, Term::Ind(n) if *n == decl.name)
            && args[..np]
                .iter()
                .enumerate()
                .all(|(j, a)| *a == Term::Rel(m + np - 1 - j))
            && args[np..].iter().all(|a| !mentions_global(a, &decl.name));
        if !uniform {
            let msg = format!("conclusion of {} must be {} applied to its parameters and indices", ctor.name, decl.name);
            return Err(ill(msg, &ctx, &concl));
        }
    }
    Ok(())
}

struct Positivity<'a> {
    env: &'a GlobalEnv,
    name: &'a Ident,
    np: usize,
}

/// A nested instance under inspection: inductive, its parameter arguments
/// and the context depth they are scoped at.
type Instance = (Rc<str>, Vec<Term>, usize);

impl Positivity<'_> {
    fn violation(&self, msg: &str, ctx: &Context, t: &Term) -> TypeError {
        let msg = format!("{} {msg}", self.name);
        TypeError::new(TypeErrorKind::PositivityViolation(msg), ctx, t)
    }

    fn check(&self, ctx: &Context, t: &Term, in_progress: &mut Vec<Instance>) -> Result<(), TypeError> {
        if !mentions_global(t, self.name) {
            return Ok(());
        }
        let w = whnf(self.env, ctx, t);
        if let Term::Prod(na, dom, cod) = &w {
            if mentions_global(dom, self.name) {
                return Err(self.violation("occurs to the left of an arrow", ctx, t));
            }
            let inner = ctx.pushed(Decl::new(na.clone(), (**dom).clone()));
            return self.check(&inner, cod, in_progress);
        }
        let (head, args) = decompose_app(&w);
        match &head {
            Term::Ind(n) if n == self.name => {
                let d = ctx.len();
                let uniform = args.len() >= self.np
                    && args[..self.np]
                        .iter()
                        .enumerate()
                        .all(|(j, a)| *a == Term::Rel(d - 1 - j))
                    && args[self.np..].iter().all(|a| !mentions_global(a, self.name));
                if uniform {
                    Ok(())
                } else {
                    Err(self.violation("recursive occurrence must use the uniform parameters", ctx, t))
                }
            }
            Term::Ind(other) => {
                let Some(decl) = self.env.inductive(other) else {
                    return Err(self.violation("occurs under an unknown inductive", ctx, t));
                };
                let np = decl.num_params();
                if args.len() != np + decl.num_indices() {
                    return Err(self.violation("occurs under a partially applied inductive", ctx, t));
                }
                if args[np..].iter().any(|a| mentions_global(a, self.name)) {
                    return Err(self.violation(&format!("occurs in an index of {other}"), ctx, t));
                }
                let params = &args[..np];
                let depth = ctx.len();
                let seen = in_progress.iter().any(|(n, ps, d)| {
                    n == other && ps.iter().zip(params).all(|(p, q)| alpha_eq(&lift(depth - d, 0, p), q))
                });
                if seen {
                    return Ok(());
                }
                in_progress.push((other.clone(), params.to_vec(), depth));
                for ctor in &decl.ctors {
                    let cty = instantiate(&ctor.ty, params);
                    let (tele, _) = decompose_prod(&cty);
                    let mut c = ctx.clone();
                    for arg in tele.decls() {
                        self.check(&c, &arg.ty, in_progress)?;
                        c.push(arg.clone());
                    }
                }
                in_progress.pop();
                Ok(())
            }
            _ => Err(self.violation("occurs in a position that is not strictly positive", ctx, t)),
        }
    }
}
