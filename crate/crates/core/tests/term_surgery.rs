mod common;

use common::{terms_of_size, terms_up_to};
use derivekit_core::term::{
    alpha_eq, compose_lam, compose_prod, decompose_app, decompose_lam, decompose_prod, is_closed_within, lift,
    mk_apps, mk_impl, subst, Name, Term,
};
use proptest::prelude::*;

/// A second lift, written by direct structural recursion.
fn lift_ref(n: usize, k: usize, t: &Term) -> Term {
    match t {
        Term::Rel(i) if *i >= k => Term::Rel(i + n),
        Term::Prod(na, a, b) => Term::prod(na.clone(), lift_ref(n, k, a), lift_ref(n, k + 1, b)),
        Term::Lam(na, a, b) => Term::lam(na.clone(), lift_ref(n, k, a), lift_ref(n, k + 1, b)),
        Term::App(a, b) => Term::app(lift_ref(n, k, a), lift_ref(n, k, b)),
        Term::Fix {
            name,
            struct_arg,
            ty,
            body,
        } => Term::fix(name.clone(), *struct_arg, lift_ref(n, k, ty), lift_ref(n, k + 1, body)),
        other => other.clone(),
    }
}

/// A second substitution, written by direct structural recursion. `u` is
/// scoped in the same context as `t`, so it is lifted by the binders crossed.
fn subst_ref(t: &Term, k: usize, u: &Term) -> Term {
    fn go(t: &Term, k: usize, crossed: usize, u: &Term) -> Term {
        match t {
            Term::Rel(i) if *i == k + crossed => lift_ref(crossed, 0, u),
            Term::Rel(i) if *i > k + crossed => Term::Rel(i - 1),
            Term::Prod(na, a, b) => Term::prod(na.clone(), go(a, k, crossed, u), go(b, k, crossed + 1, u)),
            Term::Lam(na, a, b) => Term::lam(na.clone(), go(a, k, crossed, u), go(b, k, crossed + 1, u)),
            Term::App(a, b) => Term::app(go(a, k, crossed, u), go(b, k, crossed, u)),
            Term::Fix {
                name,
                struct_arg,
                ty,
                body,
            } => Term::fix(name.clone(), *struct_arg, go(ty, k, crossed, u), go(body, k, crossed + 1, u)),
            other => other.clone(),
        }
    }
    go(t, k, 0, u)
}

#[test]
fn enumerator_sizes() {
    assert_eq!(terms_of_size(1).len(), 5);
    assert_eq!(terms_of_size(2).len(), 0);
    assert_eq!(terms_of_size(3).len(), 4 * 25);
    assert!(terms_of_size(5).iter().all(|t| t.size() == 5));
}

#[test]
fn lift_examples() {
    let t = Term::prod(Name::named("x"), Term::rel(0), Term::app(Term::rel(0), Term::rel(1)));
    let expected = Term::prod(Name::named("x"), Term::rel(1), Term::app(Term::rel(0), Term::rel(2)));
    assert_eq!(lift(1, 0, &t), expected);
    assert_eq!(lift(2, 0, &Term::rel(0)), Term::rel(2));
    for t in terms_up_to(5) {
        assert_eq!(lift(0, 5, &t), t);
    }
}

#[test]
fn lift_matches_reference() {
    for t in terms_up_to(5) {
        for n in 0..3 {
            for k in 0..3 {
                assert_eq!(lift(n, k, &t), lift_ref(n, k, &t), "lift {n} {k} {t:?}");
            }
        }
    }
}

#[test]
fn subst_examples() {
    let u = Term::ind("bool");
    assert_eq!(subst(&Term::rel(0), 0, &u), u);
    assert_eq!(subst(&Term::rel(1), 0, &u), Term::rel(0));
    let open = Term::rel(3);
    let t = Term::prod(Name::Anonymous, Term::rel(0), Term::rel(1));
    let expected = Term::prod(Name::Anonymous, open.clone(), lift(1, 0, &open));
    assert_eq!(subst(&t, 0, &open), expected);
}

#[test]
fn subst_matches_reference() {
    let us = [Term::rel(0), Term::rel(2), Term::app(Term::rel(1), Term::ind("nat"))];
    for t in terms_up_to(5) {
        for u in &us {
            for k in 0..2 {
                assert_eq!(subst(&t, k, u), subst_ref(&t, k, u), "subst {t:?} {k} {u:?}");
            }
        }
    }
}

#[test]
fn lift_composition() {
    for t in terms_up_to(5) {
        for k in 0..3 {
            for (m, n) in [(1, 1), (2, 1), (1, 3)] {
                assert_eq!(lift(m, k, &lift(n, k, &t)), lift(m + n, k, &t));
            }
        }
    }
}

#[test]
fn subst_lift_cancellation() {
    let all = terms_up_to(5);
    let us: Vec<&Term> = all.iter().step_by(37).collect();
    for t in &all {
        for u in &us {
            for k in 0..3 {
                assert_eq!(&subst(&lift(1, k, t), k, u), t);
            }
        }
    }
}

#[test]
fn decompose_rebuild_inverses() {
    for t in terms_up_to(5) {
        let (h, args) = decompose_app(&t);
        assert!(!h.is_app());
        assert_eq!(mk_apps(h, args), t);
        let (tele, head) = decompose_prod(&t);
        assert!(!matches!(head, Term::Prod(..)));
        assert_eq!(compose_prod(tele.decls(), head), t);
        let (tele, body) = decompose_lam(&t);
        assert_eq!(compose_lam(tele.decls(), body), t);
    }
}

#[test]
fn lift_and_subst_preserve_scope() {
    for t in terms_up_to(5) {
        if !is_closed_within(&t, 2) {
            continue;
        }
        assert!(is_closed_within(&lift(1, 0, &t), 3));
        assert!(is_closed_within(&lift(1, 1, &t), 3));
        assert!(is_closed_within(&subst(&t, 0, &Term::rel(0)), 1));
    }
}

#[test]
fn mk_apps_and_mk_impl_examples() {
    let f = Term::ind("f");
    assert_eq!(mk_apps(f.clone(), []), f);
    let (a, b) = (Term::ind("a"), Term::ind("b"));
    assert_eq!(mk_apps(f.clone(), [a.clone(), b.clone()]), Term::app(Term::app(f, a.clone()), b.clone()));
    assert_eq!(mk_impl(a.clone(), b.clone()), Term::prod(Name::Anonymous, a, b));
    assert_eq!(mk_impl(Term::rel(0), Term::rel(0)), Term::prod(Name::Anonymous, Term::rel(0), Term::rel(1)));
    let eqn = mk_apps(Term::ind("eq"), [Term::ind("nat"), Term::rel(0), Term::rel(1)]);
    assert_eq!(mk_impl(eqn.clone(), Term::rel(4)), Term::prod(Name::Anonymous, eqn, Term::rel(5)));
}

#[test]
fn alpha_eq_ignores_binder_names() {
    let a = Term::prod(Name::named("x"), Term::ind("nat"), Term::rel(0));
    let b = Term::prod(Name::named("y"), Term::ind("nat"), Term::rel(0));
    assert!(alpha_eq(&a, &b));
    assert!(!alpha_eq(&Term::rel(0), &Term::rel(1)));
}

fn arb_term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![(0usize..4).prop_map(Term::Rel), Just(Term::ind("nat")), Just(Term::prop())];
    leaf.prop_recursive(5, 48, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::prod(Name::named("x"), a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::lam(Name::Anonymous, a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::app(a, b)),
            (inner.clone(), inner.clone(), inner).prop_map(|(v, t, b)| Term::let_in(Name::named("v"), v, t, b)),
        ]
    })
}

proptest! {
    #[test]
    fn prop_lift_composition(t in arb_term(), m in 0usize..3, n in 0usize..3, k in 0usize..3) {
        prop_assert_eq!(lift(m, k, &lift(n, k, &t)), lift(m + n, k, &t));
    }

    #[test]
    fn prop_subst_lift_cancellation(t in arb_term(), u in arb_term(), k in 0usize..3) {
        prop_assert_eq!(subst(&lift(1, k, &t), k, &u), t);
    }

    #[test]
    fn prop_app_round_trip(t in arb_term()) {
        let (h, args) = decompose_app(&t);
        prop_assert_eq!(mk_apps(h, args), t);
    }
}
