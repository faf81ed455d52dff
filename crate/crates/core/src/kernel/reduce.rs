//! Weak-head reduction, full normalization and conversion.

use crate::term::{alpha_eq, decompose_app, lift, mk_apps, subst, Context, Decl, GlobalEnv, Term};

/// Weak-head normal form under beta, iota, fix-unfolding, delta and zeta.
pub fn whnf(env: &GlobalEnv, ctx: &Context, t: &Term) -> Term {
    // `stack.last()` is the next argument to be consumed.
    let mut stack: Vec<Term> = Vec::new();
    let mut head = t.clone();
    loop {
        if let Term::App(..) = head {
            let (h, args) = decompose_app(&head);
            stack.extend(args.into_iter().rev());
            head = h;
            continue;
        }
        match &head {
            Term::Lam(_, _, body) if !stack.is_empty() => {
                let arg = stack.pop().expect("nonempty");
                head = subst(body, 0, &arg);
            }
            Term::LetIn(_, val, _, body) => head = subst(body, 0, val),
            Term::Rel(i) => match ctx.get(*i) {
                Some(Decl { body: Some(b), .. }) => head = lift(i + 1, 0, b),
                _ => break,
            },
            Term::Const(name) => match env.definition(name) {
                Some(def) => head = def.body.clone(),
                None => break,
            },
            Term::Case {
                ind,
                motive,
                scrutinee,
                branches,
            } => {
                let s = whnf(env, ctx, scrutinee);
                match iota(env, ind, &s, branches) {
                    Some(reduct) => head = reduct,
                    None => {
                        head = Term::Case {
                            ind: ind.clone(),
                            motive: motive.clone(),
                            scrutinee: s.into(),
                            branches: branches.clone(),
                        };
                        break;
                    }
                }
            }
            Term::Fix { struct_arg, body, .. } => {
                let k = *struct_arg;
                if stack.len() <= k {
                    break;
                }
                let pos = stack.len() - 1 - k;
                let arg = whnf(env, ctx, &stack[pos]);
                let ready = matches!(decompose_app(&arg).0, Term::Construct(..));
                stack[pos] = arg;
                if !ready {
                    break;
                }
                head = subst(body, 0, &head);
            }
            _ => break,
        }
    }
    mk_apps(head, stack.into_iter().rev())
}

/// Case on a constructor-headed scrutinee: the matching branch applied to the
/// constructor's non-parameter arguments.
fn iota(env: &GlobalEnv, ind: &str, scrutinee: &Term, branches: &[Term]) -> Option<Term> {
    let (head, args) = decompose_app(scrutinee);
    let Term::Construct(ci, idx) = head else {
        return None;
    };
    if &*ci != ind {
        return None;
    }
    let np = env.inductive(ind)?.num_params();
    if args.len() < np {
        return None;
    }
    let branch = branches.get(idx)?;
    Some(mk_apps(branch.clone(), args.into_iter().skip(np)))
}

/// Full beta-iota-delta-zeta-fix normal form.
pub fn normalize(env: &GlobalEnv, ctx: &Context, t: &Term) -> Term {
    let w = whnf(env, ctx, t);
    let (head, args) = decompose_app(&w);
    let head = match head {
        Term::Lam(na, a, b) => {
            let a = normalize(env, ctx, &a);
            let inner = ctx.pushed(Decl::new(na.clone(), a.clone()));
            Term::lam(na, a, normalize(env, &inner, &b))
        }
        Term::Prod(na, a, b) => {
            let a = normalize(env, ctx, &a);
            let inner = ctx.pushed(Decl::new(na.clone(), a.clone()));
            Term::prod(na, a, normalize(env, &inner, &b))
        }
        Term::Case {
            ind,
            motive,
            scrutinee,
            branches,
        } => Term::Case {
            ind,
            motive: normalize(env, ctx, &motive).into(),
            scrutinee: normalize(env, ctx, &scrutinee).into(),
            branches: branches.iter().map(|b| normalize(env, ctx, b)).collect(),
        },
        Term::Fix {
            name,
            struct_arg,
            ty,
            body,
        } => {
            let ty = normalize(env, ctx, &ty);
            let inner = ctx.pushed(Decl::new(name.clone(), ty.clone()));
            Term::fix(name, struct_arg, ty, normalize(env, &inner, &body))
        }
        other => other,
    };
    mk_apps(head, args.iter().map(|a| normalize(env, ctx, a)))
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    Eq,
    Leq,
}

/// Definitional equality.
pub fn conv(env: &GlobalEnv, ctx: &Context, a: &Term, b: &Term) -> bool {
    conv_in(env, ctx, a, b, Mode::Eq)
}

/// Definitional equality up to cumulativity (`a` below `b`).
pub fn conv_leq(env: &GlobalEnv, ctx: &Context, a: &Term, b: &Term) -> bool {
    conv_in(env, ctx, a, b, Mode::Leq)
}

fn conv_in(env: &GlobalEnv, ctx: &Context, a: &Term, b: &Term, mode: Mode) -> bool {
    if alpha_eq(a, b) {
        return true;
    }
    let a = whnf(env, ctx, a);
    let b = whnf(env, ctx, b);
    conv_whnf(env, ctx, &a, &b, mode)
}

fn conv_whnf(env: &GlobalEnv, ctx: &Context, a: &Term, b: &Term, mode: Mode) -> bool {
    match (a, b) {
        (Term::Sort(x), Term::Sort(y)) => match mode {
            Mode::Eq => x == y,
            Mode::Leq => x.leq(*y),
        },
        (Term::Prod(na, a1, b1), Term::Prod(_, a2, b2)) => {
            conv_in(env, ctx, a1, a2, Mode::Eq) && {
                let inner = ctx.pushed(Decl::new(na.clone(), (**a1).clone()));
                conv_in(env, &inner, b1, b2, mode)
            }
        }
        (Term::Lam(na, a1, b1), Term::Lam(_, a2, b2)) => {
            conv_in(env, ctx, a1, a2, Mode::Eq) && {
                let inner = ctx.pushed(Decl::new(na.clone(), (**a1).clone()));
                conv_in(env, &inner, b1, b2, Mode::Eq)
            }
        }
        (Term::Lam(na, dom, body), other) | (other, Term::Lam(na, dom, body)) => {
            let inner = ctx.pushed(Decl::new(na.clone(), (**dom).clone()));
            let expanded = Term::app(lift(1, 0, other), Term::Rel(0));
            conv_in(env, &inner, body, &expanded, Mode::Eq)
        }
        _ => {
            let (h1, args1) = decompose_app(a);
            let (h2, args2) = decompose_app(b);
            args1.len() == args2.len()
                && conv_head(env, ctx, &h1, &h2)
                && args1.iter().zip(&args2).all(|(x, y)| conv_in(env, ctx, x, y, Mode::Eq))
        }
    }
}

fn conv_head(env: &GlobalEnv, ctx: &Context, a: &Term, b: &Term) -> bool {
    match (a, b) {
        (Term::Rel(i), Term::Rel(j)) => i == j,
        (Term::Sort(x), Term::Sort(y)) => x == y,
        (Term::Ind(x), Term::Ind(y)) | (Term::Const(x), Term::Const(y)) => x == y,
        (Term::Construct(x, i), Term::Construct(y, j)) => x == y && i == j,
        (
            Term::Case {
                ind: i1,
                motive: m1,
                scrutinee: s1,
                branches: br1,
            },
            Term::Case {
                ind: i2,
                motive: m2,
                scrutinee: s2,
                branches: br2,
            },
        ) => {
            i1 == i2
                && br1.len() == br2.len()
                && conv(env, ctx, m1, m2)
                && conv(env, ctx, s1, s2)
                && br1.iter().zip(br2).all(|(x, y)| conv(env, ctx, x, y))
        }
        (
            Term::Fix {
                name,
                struct_arg: k1,
                ty: t1,
                body: b1,
            },
            Term::Fix {
                struct_arg: k2,
                ty: t2,
                body: b2,
                ..
            },
        ) => {
            k1 == k2 && conv(env, ctx, t1, t2) && {
                let inner = ctx.pushed(Decl::new(name.clone(), (**t1).clone()));
                conv(env, &inner, b1, b2)
            }
        }
        _ => false,
    }
}
