//! Bidirectional type inference and checking.

use crate::term::{
    compose_prod, decompose_app, decompose_prod, decompose_prod_n, instantiate, lift, mk_apps, subst, Context, Decl,
    GlobalEnv, InductiveDecl, Name, Sort, Term,
};

use super::error::{TypeError, TypeErrorKind};
use super::guard;
use super::reduce::{conv, conv_leq, whnf};

pub fn infer(env: &GlobalEnv, ctx: &Context, t: &Term) -> Result<Term, TypeError> {
    TypeChecker::new(env).infer(ctx, t)
}

pub fn check(env: &GlobalEnv, ctx: &Context, t: &Term, ty: &Term) -> Result<(), TypeError> {
    TypeChecker::new(env).check(ctx, t, ty)
}

/// [`infer`], or the literal `Rel(0)` when inference fails.
pub fn try_infer(env: &GlobalEnv, ctx: &Context, t: &Term) -> Term {
    infer(env, ctx, t).unwrap_or(Term::Rel(0))
}

pub fn infer_sort(env: &GlobalEnv, ctx: &Context, t: &Term) -> Result<Sort, TypeError> {
    TypeChecker::new(env).infer_sort(ctx, t)
}

#[derive(Clone, Copy)]
pub struct TypeChecker<'e> {
    env: &'e GlobalEnv,
}

impl<'e> TypeChecker<'e> {
    pub fn new(env: &'e GlobalEnv) -> TypeChecker<'e> {
        TypeChecker { env }
    }

    fn err(&self, kind: TypeErrorKind, ctx: &Context, subject: &Term) -> TypeError {
        TypeError::new(kind, ctx, subject)
    }

    fn inductive(&self, ctx: &Context, name: &str, subject: &Term) -> Result<&'e InductiveDecl, TypeError> {
        self.env
            .inductive(name)
            .map(|d| &**d)
            .ok_or_else(|| self.err(TypeErrorKind::UnknownGlobal(name.to_string()), ctx, subject))
    }

    pub fn infer_sort(&self, ctx: &Context, t: &Term) -> Result<Sort, TypeError> {
        let ty = self.infer(ctx, t)?;
        match whnf(self.env, ctx, &ty) {
            Term::Sort(s) => Ok(s),
            _ => Err(self.err(TypeErrorKind::NotASort, ctx, t)),
        }
    }

    pub fn check(&self, ctx: &Context, t: &Term, ty: &Term) -> Result<(), TypeError> {
        if let Term::Lam(na, dom, body) = t {
            if let Term::Prod(_, expected_dom, cod) = whnf(self.env, ctx, ty) {
                self.infer_sort(ctx, dom)?;
                if !conv(self.env, ctx, dom, &expected_dom) {
                    let kind = TypeErrorKind::Mismatch {
                        expected: (*expected_dom).clone(),
                        got: (**dom).clone(),
                    };
                    return Err(self.err(kind, ctx, t));
                }
                let inner = ctx.pushed(Decl::new(na.clone(), (**dom).clone()));
                return self.check(&inner, body, &cod);
            }
        }
        let got = self.infer(ctx, t)?;
        if conv_leq(self.env, ctx, &got, ty) {
            Ok(())
        } else {
            let kind = TypeErrorKind::Mismatch { expected: ty.clone(), got };
            Err(self.err(kind, ctx, t))
        }
    }

    pub fn infer(&self, ctx: &Context, t: &Term) -> Result<Term, TypeError> {
        match t {
            Term::Sort(s) => s
                .succ()
                .map(Term::Sort)
                .ok_or_else(|| self.err(TypeErrorKind::UniverseOverflow, ctx, t)),
            Term::Rel(i) => ctx
                .type_of(*i)
                .ok_or_else(|| self.err(TypeErrorKind::UnboundRel(*i), ctx, t)),
            Term::Prod(na, dom, cod) => {
                let s1 = self.infer_sort(ctx, dom)?;
                let inner = ctx.pushed(Decl::new(na.clone(), (**dom).clone()));
                let s2 = self.infer_sort(&inner, cod)?;
                Ok(Term::Sort(Sort::product(s1, s2)))
            }
            Term::Lam(na, dom, body) => {
                self.infer_sort(ctx, dom)?;
                let inner = ctx.pushed(Decl::new(na.clone(), (**dom).clone()));
                let body_ty = self.infer(&inner, body)?;
                Ok(Term::prod(na.clone(), (**dom).clone(), body_ty))
            }
            Term::LetIn(na, val, ty, body) => {
                self.infer_sort(ctx, ty)?;
                self.check(ctx, val, ty)?;
                let inner = ctx.pushed(Decl::with_body(na.clone(), (**ty).clone(), (**val).clone()));
                let body_ty = self.infer(&inner, body)?;
                Ok(subst(&body_ty, 0, val))
            }
            Term::App(f, a) => {
                let fty = self.infer(ctx, f)?;
                match whnf(self.env, ctx, &fty) {
                    Term::Prod(_, dom, cod) => {
                        self.check(ctx, a, &dom)?;
                        Ok(subst(&cod, 0, a))
                    }
                    _ => Err(self.err(TypeErrorKind::NotAFunction, ctx, f)),
                }
            }
            Term::Ind(name) => Ok(self.inductive(ctx, name, t)?.arity()),
            Term::Construct(name, idx) => {
                let decl = self.inductive(ctx, name, t)?;
                if *idx >= decl.ctors.len() {
                    return Err(self.err(TypeErrorKind::UnknownGlobal(format!("{name}#{idx}")), ctx, t));
                }
                Ok(decl.ctor_type(*idx))
            }
            Term::Const(name) => self
                .env
                .definition(name)
                .map(|d| d.ty.clone())
                .ok_or_else(|| self.err(TypeErrorKind::UnknownGlobal(name.to_string()), ctx, t)),
            Term::Case {
                ind,
                motive,
                scrutinee,
                branches,
            } => self.infer_case(ctx, t, ind, motive, scrutinee, branches),
            Term::Fix {
                name, struct_arg, ty, body,
            } => {
                self.infer_sort(ctx, ty)?;
                self.check_fix_type(ctx, t, ty, *struct_arg)?;
                let inner = ctx.pushed(Decl::new(name.clone(), (**ty).clone()));
                self.check(&inner, body, &lift(1, 0, ty))?;
                guard::check_guard(self.env, ctx, t)?;
                Ok((**ty).clone())
            }
        }
    }

    /// The fixpoint type must take at least `k + 1` arguments, the last of
    /// which lives in an inductive type.
    fn check_fix_type(&self, ctx: &Context, fix: &Term, ty: &Term, k: usize) -> Result<(), TypeError> {
        let mut cur = ty.clone();
        let mut c = ctx.clone();
        for j in 0..=k {
            match whnf(self.env, &c, &cur) {
                Term::Prod(na, dom, cod) => {
                    if j == k {
                        let dom_w = whnf(self.env, &c, &dom);
                        if !matches!(decompose_app(&dom_w).0, Term::Ind(_)) {
                            let msg = "structural argument is not of an inductive type".to_string();
                            return Err(self.err(TypeErrorKind::IllFormedFix(msg), ctx, fix));
                        }
                    }
                    c.push(Decl::new(na, (*dom).clone()));
                    cur = (*cod).clone();
                }
                _ => {
                    let msg = format!("type has fewer than {} arguments", k + 1);
                    return Err(self.err(TypeErrorKind::IllFormedFix(msg), ctx, fix));
                }
            }
        }
        Ok(())
    }

    fn infer_case(
        &self,
        ctx: &Context,
        t: &Term,
        ind: &str,
        motive: &Term,
        scrutinee: &Term,
        branches: &[Term],
    ) -> Result<Term, TypeError> {
        let decl = self.inductive(ctx, ind, t)?;
        let (np, ni) = (decl.num_params(), decl.num_indices());
        let sty = self.infer(ctx, scrutinee)?;
        let sty = whnf(self.env, ctx, &sty);
        let (head, args) = decompose_app(&sty);
        if !matches!(&head, Term::Ind(n) if &**n == ind) || args.len() != np + ni {
            let msg = format!("scrutinee does not inhabit an instance of {ind}");
            return Err(self.err(TypeErrorKind::IllFormedCase(msg), ctx, scrutinee));
        }
        let (params, indices) = args.split_at(np);

        // Motive: Π indices. Π (_ : ind params indices). s
        let arity = instantiate(&decl.arity_after_params(), params);
        let (mut expected, _) = decompose_prod_n(&arity, ni).expect("arity has an index telescope");
        let self_ty = mk_apps(
            Term::Ind(ind.into()),
            params
                .iter()
                .map(|p| lift(ni, 0, p))
                .chain((0..ni).rev().map(Term::Rel)),
        );
        expected.push(Decl::new(Name::Anonymous, self_ty));
        let motive_ty = self.infer(ctx, motive)?;
        let motive_sort = self.motive_sort(ctx, motive, &motive_ty, &expected)?;
        if decl.sort == Sort::Prop && motive_sort != Sort::Prop && !self.allows_large_elim(decl)? {
            let msg = format!("{ind} lives in Prop and cannot be eliminated into {motive_sort:?}");
            return Err(self.err(TypeErrorKind::IllFormedCase(msg), ctx, t));
        }

        if branches.len() != decl.ctors.len() {
            let msg = format!("expected {} branches, found {}", decl.ctors.len(), branches.len());
            return Err(self.err(TypeErrorKind::IllFormedCase(msg), ctx, t));
        }
        for (i, branch) in branches.iter().enumerate() {
            let expected = self.branch_type(decl, i, params, motive);
            self.check(ctx, branch, &expected)?;
        }
        Ok(mk_apps(motive.clone(), indices.iter().cloned().chain([scrutinee.clone()])))
    }

    /// `Π args. motive result_indices (c params args)` for constructor `i`.
    pub fn branch_type(&self, decl: &InductiveDecl, i: usize, params: &[Term], motive: &Term) -> Term {
        let np = decl.num_params();
        let cty = instantiate(&decl.ctors[i].ty, params);
        let (tele, concl) = decompose_prod(&cty);
        let m = tele.len();
        let (_, cargs) = decompose_app(&concl);
        let result_indices = cargs.into_iter().skip(np);
        let ctor_app = mk_apps(
            Term::Construct(decl.name.clone(), i),
            params.iter().map(|p| lift(m, 0, p)).chain((0..m).rev().map(Term::Rel)),
        );
        let body = mk_apps(lift(m, 0, motive), result_indices.chain([ctor_app]));
        compose_prod(tele.decls(), body)
    }

    fn motive_sort(&self, ctx: &Context, motive: &Term, motive_ty: &Term, expected: &Context) -> Result<Sort, TypeError> {
        let mut cur = motive_ty.clone();
        let mut c = ctx.clone();
        for d in expected.decls() {
            match whnf(self.env, &c, &cur) {
                Term::Prod(na, dom, cod) => {
                    if !conv(self.env, &c, &dom, &d.ty) {
                        let kind = TypeErrorKind::Mismatch {
                            expected: d.ty.clone(),
                            got: (*dom).clone(),
                        };
                        return Err(TypeError::new(kind, &c, motive));
                    }
                    c.push(Decl::new(na, d.ty.clone()));
                    cur = (*cod).clone();
                }
                _ => {
                    let msg = "motive does not abstract the indices and the scrutinee".to_string();
                    return Err(self.err(TypeErrorKind::IllFormedCase(msg), ctx, motive));
                }
            }
        }
        match whnf(self.env, &c, &cur) {
            Term::Sort(s) => Ok(s),
            _ => {
                let msg = "motive does not return a sort".to_string();
                Err(self.err(TypeErrorKind::IllFormedCase(msg), ctx, motive))
            }
        }
    }

    /// Singleton elimination: a Prop inductive with at most one constructor
    /// whose arguments all live in Prop may be eliminated into any sort.
    fn allows_large_elim(&self, decl: &InductiveDecl) -> Result<bool, TypeError> {
        match decl.ctors.len() {
            0 => Ok(true),
            1 => {
                let (tele, _) = decompose_prod(&decl.ctors[0].ty);
                let mut c = decl.params.clone();
                for d in tele.decls() {
                    if self.infer_sort(&c, &d.ty)? != Sort::Prop {
                        return Ok(false);
                    }
                    c.push(d.clone());
                }
                Ok(true)
            }
            _ => Ok(false),
        }
    }
}
