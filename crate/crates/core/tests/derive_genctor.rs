mod common;

use common::{corpus_env, env_with};
use derivekit_core::derive::{
    abstract_eqns, derive_generalized_constructor, split_index_spine, DeriveError, GenCtorRequest, SpineMode,
};
use derivekit_core::kernel::check;
use derivekit_core::surface::parse_term;
use derivekit_core::term::{alpha_eq, decompose_app, decompose_prod, Context, Definition, GlobalEnv, Term};

fn derive(env: &mut GlobalEnv, ctor: &str, name: &str) -> Definition {
    let req = GenCtorRequest::for_constructor(env, ctor, name).unwrap();
    let out = derive_generalized_constructor(env, &req, true).unwrap();
    assert!(out.checked);
    (*env.definition(name).unwrap().clone()).clone()
}

fn expect_type(env: &GlobalEnv, def: &Definition, src: &str) {
    let expected = parse_term(src, &Context::new(), env).unwrap();
    assert!(alpha_eq(&def.ty, &expected), "got {:?}", def.ty);
    check(env, &Context::new(), &def.body, &def.ty).unwrap();
}

#[test]
fn node_eqs() {
    let mut env = corpus_env();
    let def = derive(&mut env, "Node", "Node_eqs");
    expect_type(
        &env,
        &def,
        "forall (A:Type) (n:nat) (l : list (brtree A n)) (x:nat), x = S n -> brtree A x",
    );
}

#[test]
fn vcons_eqs() {
    let mut env = corpus_env();
    let def = derive(&mut env, "vcons", "vcons_eqs");
    expect_type(&env, &def, "forall A n (a:A) (v:vec A n) (x:nat), x = S n -> vec A x");
}

#[test]
fn index_free_constructor_is_unchanged() {
    let mut env = corpus_env();
    let def = derive(&mut env, "cons", "cons_eqs");
    let cons_ty = env.inductive("list").unwrap().ctor_type(1);
    assert!(alpha_eq(&def.ty, &cons_ty));
    let (tele, body) = derivekit_core::term::decompose_lam(&def.body);
    assert_eq!(tele.len(), 3);
    let (head, args) = decompose_app(&body);
    assert_eq!(head, Term::construct("list", 1));
    assert_eq!(args, vec![Term::rel(2), Term::rel(1), Term::rel(0)]);
}

#[test]
fn two_index_lift_bookkeeping() {
    let env = corpus_env();
    let ty = env.inductive("le2").unwrap().ctor_type(1);
    let out = abstract_eqns(&env, &Context::new(), &ty, 0, SpineMode::IndexSpine);
    let (tele, head) = decompose_prod(&out);
    // n m h, then (x, e) for the last index, then (x', e') for the first.
    assert_eq!(tele.len(), 7);
    assert_eq!(head, derivekit_core::term::mk_apps(Term::ind("le2"), [Term::rel(1), Term::rel(3)]));
    // Second equation: `x' = n`, whose right-hand side `n` (Rel 2 in the
    // constructor's context) is lifted by 3 past x, e and x'.
    let second = &tele.decls()[6].ty;
    let (_, args) = decompose_app(second);
    assert_eq!(args[1], Term::rel(0));
    assert_eq!(args[2], Term::rel(2 + 3));
    assert_eq!(args[0], Term::ind("nat"));
}

#[test]
fn two_index_body_checks() {
    let mut env = corpus_env();
    let def = derive(&mut env, "le2_step", "le2_step_eqs");
    expect_type(&env, &def, "forall (n m : nat) (h : le2 n m) (x : nat), x = S m -> forall x' : nat, x' = n -> le2 x' x");
    let (_, body) = derivekit_core::term::decompose_lam(&def.body);
    let (head, _) = decompose_app(&body);
    assert!(matches!(head, Term::Case { .. }));
}

#[test]
fn split_spine_examples() {
    let env = corpus_env();
    let brtree = env.inductive("brtree").unwrap();
    let t = parse_term("fun (A : Type) (n : nat) => brtree A (S n)", &Context::new(), &env).unwrap();
    let (_, body) = derivekit_core::term::decompose_lam(&t);
    let (h, ixs) = split_index_spine(&body, brtree).unwrap();
    assert_eq!(h, Term::app(Term::ind("brtree"), Term::rel(1)));
    assert_eq!(ixs.len(), 1);
    let list = env.inductive("list").unwrap();
    let (_, ixs) = split_index_spine(&Term::app(Term::ind("list"), Term::rel(0)), list).unwrap();
    assert!(ixs.is_empty());
    assert!(matches!(
        split_index_spine(&Term::ind("list"), list),
        Err(DeriveError::MalformedConstructorHead(_))
    ));
}

#[test]
fn name_clash_is_reported() {
    let mut env = corpus_env();
    let req = GenCtorRequest::for_constructor(&env, "Node", "plus").unwrap();
    assert!(matches!(derive_generalized_constructor(&mut env, &req, true), Err(DeriveError::NameClash(_))));
}

#[test]
fn every_corpus_constructor_checks() {
    let mut env = corpus_env();
    let ctors: Vec<(String, String)> = collect_ctors(&env);
    for (ind, c) in ctors {
        let name = format!("{c}_eqs");
        let req = GenCtorRequest::for_constructor(&env, &c, &name).unwrap();
        let out = derive_generalized_constructor(&mut env, &req, true).unwrap_or_else(|e| panic!("{ind}/{c}: {e}"));
        let def = env.definition(&out.name).unwrap();
        let nind = env.inductive(&ind).unwrap().num_indices();
        let (tele, _) = decompose_prod(&def.ty);
        let (ctele, _) = decompose_prod(&env.inductive(&ind).unwrap().ctor_type(req.ctor));
        assert_eq!(tele.len(), ctele.len() + 2 * nind, "{c}");
    }
}

#[test]
fn full_spine_mode_abstracts_parameters() {
    let env = env_with("Inductive box (A : Type) := mk (a : A).");
    let ty = env.inductive("box").unwrap().ctor_type(0);
    let out = abstract_eqns(&env, &Context::new(), &ty, 0, SpineMode::FullSpine);
    let (tele, _) = decompose_prod(&out);
    assert_eq!(tele.len(), 4);
    let mut env = env;
    let req = GenCtorRequest {
        mode: SpineMode::FullSpine,
        ..GenCtorRequest::for_constructor(&env, "mk", "mk_eqs").unwrap()
    };
    // Abstracting a Type parameter produces an equation over `Type`, which
    // the prelude's `eq` cannot express; the kernel rejects it.
    assert!(matches!(derive_generalized_constructor(&mut env, &req, true), Err(DeriveError::Kernel(_))));
}

pub fn collect_ctors(env: &GlobalEnv) -> Vec<(String, String)> {
    let mut out = Vec::new();
    for (_, e) in env.iter() {
        if let derivekit_core::term::GlobalEntry::Inductive(d) = e {
            for c in &d.ctors {
                out.push((d.name.to_string(), c.name.to_string()));
            }
        }
    }
    out
}
