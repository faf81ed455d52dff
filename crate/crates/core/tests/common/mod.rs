#![allow(dead_code)]

use derivekit_core::surface::{load_program, prelude};
use derivekit_core::term::{GlobalEnv, Name, Sort, Term};

pub const CORPUS: &str = include_str!("../data/corpus.ind");

/// The prelude extended with the corpus declarations.
pub fn corpus_env() -> GlobalEnv {
    let mut env = prelude();
    load_program(&mut env, CORPUS).expect("corpus loads");
    env
}

pub fn env_with(src: &str) -> GlobalEnv {
    let mut env = prelude();
    load_program(&mut env, src).expect("program loads");
    env
}

/// Every term of exactly `size` nodes over a small alphabet: three
/// variables, `Prop`, `nat`, and the binary formers product, abstraction,
/// application and fixpoint.
pub fn terms_of_size(size: usize) -> Vec<Term> {
    let mut table: Vec<Vec<Term>> = vec![Vec::new()];
    for s in 1..=size {
        let mut out = Vec::new();
        if s == 1 {
            out.extend((0..3).map(Term::Rel));
            out.push(Term::Sort(Sort::Prop));
            out.push(Term::ind("nat"));
        } else {
            for l in 1..s - 1 {
                let r = s - 1 - l;
                for a in &table[l] {
                    for b in &table[r] {
                        out.push(Term::prod(Name::Anonymous, a.clone(), b.clone()));
                        out.push(Term::lam(Name::named("x"), a.clone(), b.clone()));
                        out.push(Term::app(a.clone(), b.clone()));
                        out.push(Term::fix(Name::named("f"), 0, a.clone(), b.clone()));
                    }
                }
            }
        }
        table.push(out);
    }
    table.swap_remove(size)
}

pub fn terms_up_to(size: usize) -> Vec<Term> {
    (1..=size).flat_map(terms_of_size).collect()
}

pub fn nat_lit(n: usize) -> Term {
    (0..n).fold(Term::construct("nat", 0), |acc, _| Term::app(Term::construct("nat", 1), acc))
}

/// Runs every derivation on every inductive of `env` (generalized
/// constructors for each constructor, nested schemes, subterm relations),
/// panicking on the first failure.
pub fn derive_everything(env: &mut GlobalEnv) -> Vec<derivekit_core::derive::DerivedDef> {
    use derivekit_core::derive::*;
    use derivekit_core::term::GlobalEntry;
    let inds: Vec<String> = env
        .iter()
        .filter_map(|(n, e)| matches!(e, GlobalEntry::Inductive(_)).then(|| n.to_string()))
        .collect();
    let mut out = Vec::new();
    for ind in &inds {
        let ctors: Vec<String> = env.inductive(ind).unwrap().ctors.iter().map(|c| c.name.to_string()).collect();
        for c in ctors {
            let req = GenCtorRequest::for_constructor(env, &c, &format!("{c}_eqs")).unwrap();
            out.push(derive_generalized_constructor(env, &req, true).unwrap_or_else(|e| panic!("{c}: {e}")));
        }
        let s = derive_induction(env, &SchemeRequest::new(ind, true), true).unwrap_or_else(|e| panic!("{ind}: {e}"));
        out.extend(s.forced);
        out.push(s.scheme);
        let (d, _) = derive_subterm(env, ind, true).unwrap_or_else(|e| panic!("{ind}: {e}"));
        out.push(d);
    }
    out
}
