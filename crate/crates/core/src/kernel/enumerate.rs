//! Exhaustive enumeration of closed constructor terms, used as a test oracle.
//!
//! Depth counts constructor nesting: nullary constructors have depth 0 and
//! `c args` has depth `1 + max(depth args)`; parameters do not count.

use std::collections::HashMap;

use thiserror::Error;

use crate::term::{alpha_eq, decompose_app, mk_apps, subst, Context, GlobalEnv, Term};

use super::reduce::normalize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumError {
    #[error("unsupported: {0}")]
    Unsupported(String),
}

/// All closed constructor-normal inhabitants of `ty` with depth at most
/// `max_depth`, in constructor-declaration then argument order.
pub fn enumerate_closed_terms(env: &GlobalEnv, ty: &Term, max_depth: usize) -> Result<Vec<Term>, EnumError> {
    Enumerator {
        env,
        memo: HashMap::new(),
    }
    .enumerate(ty, max_depth)
}

struct Enumerator<'e> {
    env: &'e GlobalEnv,
    memo: HashMap<(Term, usize), Vec<Term>>,
}

impl Enumerator<'_> {
    fn enumerate(&mut self, ty: &Term, depth: usize) -> Result<Vec<Term>, EnumError> {
        let empty = Context::new();
        let ty = normalize(self.env, &empty, ty);
        if let Some(hit) = self.memo.get(&(ty.clone(), depth)) {
            return Ok(hit.clone());
        }
        let (head, args) = decompose_app(&ty);
        let decl = match &head {
            Term::Ind(name) => self
                .env
                .inductive(name)
                .cloned()
                .ok_or_else(|| EnumError::Unsupported(format!("unknown inductive {name}")))?,
            _ => return Err(EnumError::Unsupported("not an applied inductive type".into())),
        };
        let np = decl.num_params();
        if args.len() != np + decl.num_indices() {
            return Err(EnumError::Unsupported(format!("{} is not fully applied", decl.name)));
        }
        let (params, target) = args.split_at(np);
        let mut out = Vec::new();
        for (i, ctor) in decl.ctors.iter().enumerate() {
            let cty = crate::term::instantiate(&ctor.ty, params);
            let nullary = !matches!(cty, Term::Prod(..));
            if !nullary && depth == 0 {
                continue;
            }
            let mut fills = Vec::new();
            self.fill(&cty, depth.saturating_sub(1), np, target, &mut Vec::new(), &mut fills)?;
            for fill in fills {
                out.push(mk_apps(Term::Construct(decl.name.clone(), i), params.iter().cloned().chain(fill)));
            }
        }
        self.memo.insert((ty, depth), out.clone());
        Ok(out)
    }

    fn fill(
        &mut self,
        cty: &Term,
        depth: usize,
        np: usize,
        target: &[Term],
        acc: &mut Vec<Term>,
        out: &mut Vec<Vec<Term>>,
    ) -> Result<(), EnumError> {
        match cty {
            Term::Prod(_, dom, cod) => {
                let dom_n = normalize(self.env, &Context::new(), dom);
                if matches!(dom_n, Term::Sort(_) | Term::Prod(..)) {
                    return Err(EnumError::Unsupported(
                        "constructor argument ranges over a sort or a function space".into(),
                    ));
                }
                for v in self.enumerate(&dom_n, depth)? {
                    let next = subst(cod, 0, &v);
                    acc.push(v);
                    self.fill(&next, depth, np, target, acc, out)?;
                    acc.pop();
                }
                Ok(())
            }
            concl => {
                let concl = normalize(self.env, &Context::new(), concl);
                let (_, cargs) = decompose_app(&concl);
                let matches = cargs.len() == np + target.len()
                    && cargs[np..].iter().zip(target).all(|(a, b)| alpha_eq(a, b));
                if matches {
                    out.push(acc.clone());
                }
                Ok(())
            }
        }
    }
}
