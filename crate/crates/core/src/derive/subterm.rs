//! Direct subterm relations: `I_direct_subterm ps is x is' y` holds when `x`
//! is an immediate recursive argument of the constructor value `y`.

use std::rc::Rc;

use crate::kernel::whnf;
use crate::term::{
    alpha_eq, compose_prod, decompose_app, decompose_prod, lift, mentions_global, mk_apps, suggest_name,
    ConstructorDecl, Context, Decl, GlobalEnv, InductiveDecl, Name, Sort, Term,
};

use super::{finish_inductive, DeriveError, DeriveResult, DerivedDef, DerivedItem};

/// A derived relation with, for each rule, the constructor and argument
/// position it came from.
#[derive(Clone, Debug)]
pub struct SubtermDecl {
    pub decl: Rc<InductiveDecl>,
    pub source: Rc<InductiveDecl>,
    pub provenance: Vec<(usize, usize)>,
}

pub fn relation_name(ind: &str) -> String {
    format!("{ind}_direct_subterm")
}

pub fn derive_subterm(env: &mut GlobalEnv, ind: &str, check: bool) -> DeriveResult<(DerivedDef, SubtermDecl)> {
    let src = env
        .inductive(ind)
        .cloned()
        .ok_or_else(|| DeriveError::UnknownInductive(ind.to_string()))?;
    let np = src.num_params();
    let ni = src.num_indices();
    let rel: Rc<str> = relation_name(ind).into();

    // Relation indices: is1, sub : I ps is1, is2, sup : I ps is2.
    let mut indices = Context::new();
    for d in src.indices.decls() {
        indices.push(d.clone());
    }
    let sub_ty = mk_apps(
        Term::Ind(src.name.clone()),
        (0..np)
            .map(|l| Term::Rel(ni + np - 1 - l))
            .chain((0..ni).map(|j| Term::Rel(ni - 1 - j))),
    );
    let sub_name = suggest_name(&sub_ty, &[]);
    indices.push(Decl::new(Name::named(&sub_name), sub_ty));
    for (j, d) in src.indices.decls().iter().enumerate() {
        // Scoped under params, is1 and sub instead of params and is2[..j].
        let shifted = crate::term::map_rels(&d.ty, 0, &|i, depth| {
            if i < depth + j {
                Term::Rel(i)
            } else {
                Term::Rel(i + ni + 1)
            }
        });
        indices.push(Decl::new(d.name.clone(), shifted));
    }
    let base = 2 * ni + 1;
    let sup_ty = mk_apps(
        Term::Ind(src.name.clone()),
        (0..np)
            .map(|l| Term::Rel(base + np - 1 - l))
            .chain((0..ni).map(|j| Term::Rel(ni - 1 - j))),
    );
    indices.push(Decl::new(Name::named(&sub_name), sup_ty));

    let mut ctors = Vec::new();
    let mut provenance = Vec::new();
    let mut warnings = Vec::new();
    for (ci, c) in src.ctors.iter().enumerate() {
        let (ctele, concl) = decompose_prod(&c.ty);
        let m = ctele.len();
        let mut ctx = src.params.clone();
        ctx.extend(&ctele);
        let (_, cargs) = decompose_app(&concl);
        let value = mk_apps(
            Term::Construct(src.name.clone(), ci),
            (0..np + m).map(|l| Term::Rel(np + m - 1 - l)),
        );
        let mut rule_no = 0;
        for (k, arg) in ctele.decls().iter().enumerate() {
            let ty = lift(m - k, 0, &arg.ty);
            let w = whnf(env, &ctx, &ty);
            let (head, targs) = decompose_app(&w);
            let arg_name = arg.name.as_str().unwrap_or("_");
            match &head {
                Term::Ind(n) if *n == src.name => {
                    let result = mk_apps(
                        Term::Ind(rel.clone()),
                        (0..np)
                            .map(|l| Term::Rel(np + m - 1 - l))
                            .chain(targs[np..].iter().cloned())
                            .chain(std::iter::once(Term::Rel(m - 1 - k)))
                            .chain(cargs[np..].iter().cloned())
                            .chain(std::iter::once(value.clone())),
                    );
                    ctors.push(ConstructorDecl {
                        name: format!("{}_subterm{rule_no}", c.name).into(),
                        ty: compose_prod(ctele.decls(), result),
                    });
                    provenance.push((ci, k));
                    rule_no += 1;
                }
                _ if mentions_global(&w, &src.name) => warnings.push(format!(
                    "argument `{arg_name}` of `{}` is a nested or higher-order occurrence of `{}` and yields no rule",
                    c.name, src.name
                )),
                _ => {}
            }
        }
    }
    if ctors.is_empty() {
        warnings.push(format!("`{}` has no recursive arguments; the relation is empty", src.name));
    }
    let decl = InductiveDecl {
        name: rel,
        params: src.params.clone(),
        indices,
        sort: Sort::Prop,
        ctors,
    };
    let def = finish_inductive(env, decl, check, warnings)?;
    let DerivedItem::Inductive(added) = &def.item else {
        unreachable!("finish_inductive yields an inductive")
    };
    let sd = SubtermDecl {
        decl: added.clone(),
        source: src,
        provenance,
    };
    Ok((def, sd))
}

/// The immediate subterms of a closed constructor value, one per rule of
/// the relation that applies to it.
pub fn direct_subterm_pairs(rel: &SubtermDecl, value: &Term) -> Vec<(Term, Term)> {
    let (head, args) = decompose_app(value);
    let Term::Construct(n, ci) = &head else {
        return Vec::new();
    };
    if *n != rel.source.name {
        return Vec::new();
    }
    let np = rel.source.num_params();
    rel.provenance
        .iter()
        .filter(|(c, _)| c == ci)
        .filter_map(|&(_, k)| args.get(np + k).map(|a| (a.clone(), value.clone())))
        .collect()
}

/// Pairs `(a, c)` obtained by chaining two pairs `(a, b)` and `(b, c)`,
/// together with the input, without duplicates up to alpha-equivalence.
pub fn transitive_closure_step(pairs: &[(Term, Term)]) -> Vec<(Term, Term)> {
    let mut out: Vec<(Term, Term)> = Vec::new();
    let mut add = |p: (Term, Term)| {
        if !out.iter().any(|q| alpha_eq(&q.0, &p.0) && alpha_eq(&q.1, &p.1)) {
            out.push(p);
        }
    };
    for p in pairs {
        add(p.clone());
    }
    for (a, b) in pairs {
        for (b2, c) in pairs {
            if alpha_eq(b, b2) {
                add((a.clone(), c.clone()));
            }
        }
    }
    out
}

/// Iterates [`transitive_closure_step`] to a fixpoint.
pub fn transitive_closure(pairs: &[(Term, Term)]) -> Vec<(Term, Term)> {
    let mut cur = transitive_closure_step(pairs);
    loop {
        let next = transitive_closure_step(&cur);
        if next.len() == cur.len() {
            return cur;
        }
        cur = next;
    }
}
