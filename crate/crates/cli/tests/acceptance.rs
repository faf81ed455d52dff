//! The acceptance suite: one check per criterion, each printed as a single
//! PASS or FAIL line. Run with `--nocapture` to see the report.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;

use derivekit_core::derive::{
    derive_generalized_constructor, derive_induction, derive_subterm, direct_subterm_pairs, inductive_alpha_eq,
    transitive_closure, DerivedDef, GenCtorRequest, SchemeRequest, SubtermDecl,
};
use derivekit_core::kernel::{
    check, check_inductive, conv, enumerate_closed_terms, guard_check, infer, infer_sort, normalize, whnf,
};
use derivekit_core::session::{Session, SessionOptions};
use derivekit_core::surface::ast::CommandKind;
use derivekit_core::surface::{load_program, parse_program, parse_term, prelude, resolve_definition, resolve_inductive};
use derivekit_core::term::pretty::{render_definition, render_inductive_source};
use derivekit_core::term::sexp::{definition_from_sexp, definition_to_sexp, inductive_from_sexp, inductive_to_sexp};
use derivekit_core::term::{
    alpha_eq, compose_lam, compose_prod, decompose_app, decompose_lam, decompose_prod, decompose_prod_n, instantiate,
    lift, mk_apps, subst, Context, Decl, GlobalEntry, GlobalEnv, Name, Sort, Term,
};

const CORPUS: &str = include_str!("../../core/tests/data/corpus.ind");

type Outcome = Result<(), String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn corpus_env() -> Result<GlobalEnv, String> {
    let mut env = prelude();
    load_program(&mut env, CORPUS).map_err(|e| format!("corpus: {}", e.message(&env)))?;
    Ok(env)
}

fn parse(env: &GlobalEnv, ctx: &Context, src: &str) -> Result<Term, String> {
    parse_term(src, ctx, env).map_err(|e| format!("`{src}`: {}", e.message(env)))
}

fn inductive_names(env: &GlobalEnv) -> Vec<String> {
    env.iter()
        .filter(|(_, e)| matches!(e, GlobalEntry::Inductive(_)))
        .map(|(n, _)| n.to_string())
        .collect()
}

fn nat_lit(n: usize) -> Term {
    (0..n).fold(Term::construct("nat", 0), |acc, _| Term::app(Term::construct("nat", 1), acc))
}

fn generalized_constructor() -> Outcome {
    let mut env = corpus_env()?;
    let req = GenCtorRequest::for_constructor(&env, "Node", "Node_eqs").map_err(|e| e.to_string())?;
    derive_generalized_constructor(&mut env, &req, false).map_err(|e| e.render(&env))?;
    let def = env.definition("Node_eqs").ok_or("Node_eqs missing")?.clone();
    let expected = parse(
        &env,
        &Context::new(),
        "forall (A:Type) (n:nat) (l : list (brtree A n)) (x:nat), x = S n -> brtree A x",
    )?;
    ensure(alpha_eq(&def.ty, &expected), || format!("type mismatch: {:?}", def.ty))?;
    infer_sort(&env, &Context::new(), &def.ty).map_err(|e| e.render(&env))?;
    check(&env, &Context::new(), &def.body, &def.ty).map_err(|e| e.render(&env))
}

const BRTREE_IND_MC: &str = "forall p : forall (A:Type)(n:nat), brtree A n -> Type, \
    (forall A a, p A 0 (Leaf A a)) -> \
    (forall A n l, is_list (brtree A n) (p A n) l -> p A (S n) (Node A n l)) -> \
    forall A n t, p A n t";

fn nested_induction() -> Outcome {
    let mut env = corpus_env()?;
    let out = derive_induction(&mut env, &SchemeRequest::new("brtree", true), true).map_err(|e| e.render(&env))?;
    ensure(&*out.scheme.name == "brtree_ind_MC", || format!("scheme named {}", out.scheme.name))?;
    let def = env.definition("brtree_ind_MC").ok_or("scheme missing")?.clone();
    let expected = parse(&env, &Context::new(), BRTREE_IND_MC)?;
    ensure(alpha_eq(&def.ty, &expected), || "scheme type differs".into())?;

    let forced: Vec<&str> = out.forced.iter().map(|d| &*d.name).collect();
    ensure(forced == ["is_list"], || format!("forced {forced:?}"))?;
    let is_list = env.inductive("is_list").ok_or("is_list missing")?;
    let ctors: Vec<&str> = is_list.ctors.iter().map(|c| &*c.name).collect();
    ensure(ctors == ["is_nil", "is_cons"], || format!("is_list constructors {ctors:?}"))?;
    let nil = parse(&env, &Context::new(), "forall (A : Type) (P : A -> Type), is_list A P (nil A)")?;
    let cons = parse(
        &env,
        &Context::new(),
        "forall (A : Type) (P : A -> Type) (a : A), P a -> forall l : list A, is_list A P l -> is_list A P (cons A a l)",
    )?;
    ensure(alpha_eq(&is_list.ctor_type(0), &nil), || "is_nil type differs".into())?;
    ensure(alpha_eq(&is_list.ctor_type(1), &cons), || "is_cons type differs".into())?;

    check(&env, &Context::new(), &def.body, &def.ty).map_err(|e| e.render(&env))?;
    let (_, fix) = decompose_lam(&def.body);
    ensure(matches!(fix, Term::Fix { .. }), || "body is not a fixpoint under the lambdas".into())?;
    guard_check(&env, &fix).map_err(|e| e.render(&env))
}

fn subterm_golden() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let input = dir.path().join("list.ind");
    std::fs::write(&input, "Derive Subterm for list.\n").map_err(|e| e.to_string())?;
    let out = Command::new(env!("CARGO_BIN_EXE_derivekit"))
        .args(["run", input.to_str().ok_or("path")?, "--emit", "pretty"])
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.code() == Some(0), || format!("exit {:?}", out.status.code()))?;
    let golden_path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/list_subterm.txt");
    let golden = std::fs::read(golden_path).map_err(|e| e.to_string())?;
    ensure(out.stdout == golden, || {
        format!("output differs from golden:\n{}", String::from_utf8_lossy(&out.stdout))
    })
}

fn non_nested_mode() -> Outcome {
    let options = SessionOptions {
        nested: false,
        ..SessionOptions::default()
    };
    let mut session = Session::new(options);
    let report = session.run_source(&format!("{CORPUS}\nScheme Induction for brtree."));
    if let Some(e) = report.error {
        return Err(e.to_string());
    }
    ensure(report.outputs.len() == 1, || format!("{} outputs", report.outputs.len()))?;
    let env = &session.env;
    ensure(env.inductive("is_list").is_none(), || "is_list was forced".into())?;
    let def = env.definition("brtree_ind_MC").ok_or("scheme missing")?.clone();
    ensure(!report.outputs[0].pretty.contains("is_list"), || "is_list in output".into())?;
    check(env, &Context::new(), &def.body, &def.ty).map_err(|e| e.render(env))?;

    // The recursor quantifies the motive after the parameter; the derived
    // scheme quantifies it first and passes the parameter explicitly. Fix
    // the parameter to `A` and the motive to `P` in both before comparing.
    let ty = parse(env, &Context::new(), "Type")?;
    let ctx = Context::new().pushed(Decl::new(Name::named("A"), ty.clone()));
    let pty = parse(env, &ctx, "forall n : nat, brtree A n -> Type")?;
    let ctx = ctx.pushed(Decl::new(Name::named("P"), pty));
    let expected = [
        "forall a, P 0 (Leaf A a)",
        "forall n l, P (S n) (Node A n l)",
    ];
    let (hctx, _) = decompose_prod_n(&def.ty, 1 + expected.len()).ok_or("too few hypotheses")?;
    let as_p = Term::lam(Name::named("A"), ty, Term::Rel(1));
    for (i, want) in expected.iter().enumerate() {
        let h = &hctx.decls()[1 + i].ty;
        let mut args = vec![as_p.clone()];
        args.extend((0..i).map(|_| Term::Sort(Sort::Prop)));
        let Term::Prod(_, _, body) = instantiate(h, &args) else {
            return Err(format!("hypothesis {i} does not bind the parameter"));
        };
        let got = normalize(env, &ctx, &subst(&body, 0, &Term::Rel(1)));
        let want = parse(env, &ctx, want)?;
        ensure(alpha_eq(&got, &want), || format!("hypothesis {i}: {got:?}"))?;
    }
    Ok(())
}

/// Runs every derivation on every inductive of `env`, kernel-checking each
/// output as it is produced.
fn derive_all(env: &mut GlobalEnv) -> Result<Vec<DerivedDef>, String> {
    let mut out = Vec::new();
    for ind in inductive_names(env) {
        let ctors: Vec<String> = env.inductive(&ind).ok_or("vanished")?.ctors.iter().map(|c| c.name.to_string()).collect();
        for c in ctors {
            let req = GenCtorRequest::for_constructor(env, &c, &format!("{c}_eqs")).map_err(|e| e.to_string())?;
            out.push(derive_generalized_constructor(env, &req, true).map_err(|e| format!("{c}: {}", e.render(env)))?);
        }
        let s = derive_induction(env, &SchemeRequest::new(&ind, true), true)
            .map_err(|e| format!("{ind}: {}", e.render(env)))?;
        out.extend(s.forced);
        out.push(s.scheme);
        let (d, _) = derive_subterm(env, &ind, true).map_err(|e| format!("{ind}: {}", e.render(env)))?;
        out.push(d);
    }
    Ok(out)
}

fn corpus_well_typed() -> Outcome {
    let mut env = corpus_env()?;
    let inds = inductive_names(&env);
    for required in ["bool", "nat", "option", "sum", "list", "vec", "brtree", "rose"] {
        ensure(inds.iter().any(|n| n == required), || format!("corpus lacks {required}"))?;
    }
    let outputs = derive_all(&mut env)?;
    ensure(outputs.iter().all(|d| d.checked), || "unchecked output".into())?;
    // Re-check everything against a fresh environment rebuilt in order.
    let mut fresh = GlobalEnv::empty();
    for (name, entry) in env.iter() {
        match entry {
            GlobalEntry::Inductive(d) => {
                check_inductive(&fresh, d).map_err(|e| format!("{name}: {}", e.render(&fresh)))?;
                fresh.add_inductive((**d).clone()).map_err(|e| e.to_string())?;
            }
            GlobalEntry::Definition(d) => {
                infer_sort(&fresh, &Context::new(), &d.ty).map_err(|e| format!("{name}: {}", e.render(&fresh)))?;
                check(&fresh, &Context::new(), &d.body, &d.ty).map_err(|e| format!("{name}: {}", e.render(&fresh)))?;
                fresh.add_definition((**d).clone()).map_err(|e| e.to_string())?;
            }
        }
    }
    ensure(outputs.len() > 3 * inds.len(), || format!("only {} outputs", outputs.len()))
}

fn count_leaves(t: &Term) -> usize {
    let (head, args) = decompose_app(t);
    let own = usize::from(matches!(&head, Term::Construct(n, 0) if &**n == "brtree"));
    own + args.iter().map(count_leaves).sum::<usize>()
}

const TREE: &str = "Node bool 1 (cons (brtree bool 1) (Node bool 0 (cons (brtree bool 0) (Leaf bool true) \
    (cons (brtree bool 0) (Leaf bool false) (nil (brtree bool 0))))) \
    (cons (brtree bool 1) (Node bool 0 (cons (brtree bool 0) (Leaf bool true) \
    (cons (brtree bool 0) (Leaf bool true) (nil (brtree bool 0))))) (nil (brtree bool 1))))";

fn computation_law() -> Outcome {
    let mut env = corpus_env()?;
    derive_induction(&mut env, &SchemeRequest::new("brtree", true), true).map_err(|e| e.render(&env))?;
    load_program(
        &mut env,
        "Definition sumw : forall (A : Type) (l : list A), is_list A (fun _ : A => nat) l -> nat :=\n\
           fix sumw (A : Type) (l : list A) (w : is_list A (fun _ : A => nat) l) {struct w} : nat :=\n\
             match w with is_nil => 0 | is_cons a h l' w' => plus h (sumw A l' w') end.",
    )
    .map_err(|e| e.message(&env))?;
    let ctx = Context::new();
    let tree = parse(&env, &ctx, TREE)?;
    let tree_ty = infer(&env, &ctx, &tree).map_err(|e| e.render(&env))?;
    let expected_ty = parse(&env, &ctx, "brtree bool 2")?;
    ensure(conv(&env, &ctx, &tree_ty, &expected_ty), || "tree is not a brtree bool 2".into())?;
    let oracle = count_leaves(&tree);
    ensure(oracle == 4, || format!("brute-force count is {oracle}"))?;

    let count = parse(
        &env,
        &ctx,
        &format!(
            "brtree_ind_MC (fun (A : Type) (n : nat) (_ : brtree A n) => nat) \
               (fun (A : Type) (_ : A) => 1) \
               (fun (A : Type) (n : nat) (l : list (brtree A n)) \
                    (w : is_list (brtree A n) (fun _ : brtree A n => nat) l) => sumw (brtree A n) l w) \
               bool 2 ({TREE})"
        ),
    )?;
    let ty = infer(&env, &ctx, &count).map_err(|e| e.render(&env))?;
    ensure(conv(&env, &ctx, &ty, &Term::ind("nat")), || "count is not a nat".into())?;
    let nf = normalize(&env, &ctx, &count);
    ensure(nf == nat_lit(oracle), || format!("normalized to {nf:?}"))
}

/// Closed instances of a telescope, capped at `cap` combinations. Sorts are
/// instantiated by `bool`.
fn telescope_instances(env: &GlobalEnv, tele: &[Decl], prefix: &[Term], depth: usize, cap: usize) -> Vec<Vec<Term>> {
    let mut acc: Vec<Vec<Term>> = vec![Vec::new()];
    for d in tele {
        let mut next = Vec::new();
        for inst in &acc {
            let all: Vec<Term> = prefix.iter().chain(inst.iter()).cloned().collect();
            let ty = instantiate(&d.ty, &all);
            let values = match whnf(env, &Context::new(), &ty) {
                Term::Sort(_) => vec![Term::ind("bool")],
                _ => enumerate_closed_terms(env, &ty, depth).unwrap_or_default(),
            };
            for v in values {
                if next.len() < cap {
                    let mut i = inst.clone();
                    i.push(v);
                    next.push(i);
                }
            }
        }
        acc = next;
    }
    acc
}

fn round_trip_law() -> Outcome {
    let mut env = corpus_env()?;
    let mut checked = 0;
    for ind in inductive_names(&env) {
        let decl = env.inductive(&ind).ok_or("vanished")?.clone();
        let np = decl.num_params();
        let params = telescope_instances(&env, decl.params.decls(), &[], 1, 1);
        let Some(ps) = params.into_iter().next() else { continue };
        for (ci, c) in decl.ctors.iter().enumerate() {
            let name = format!("{}_eqs", c.name);
            let req = GenCtorRequest::for_constructor(&env, &c.name, &name).map_err(|e| e.to_string())?;
            derive_generalized_constructor(&mut env, &req, true).map_err(|e| e.render(&env))?;
            let (ctele, concl) = decompose_prod(&c.ty);
            let (_, cargs) = decompose_app(&concl);
            for args in telescope_instances(&env, ctele.decls(), &ps, 2, 40) {
                let all: Vec<Term> = ps.iter().chain(args.iter()).cloned().collect();
                let original = mk_apps(Term::Construct(decl.name.clone(), ci), all.iter().cloned());
                let mut app = mk_apps(Term::Const(name.as_str().into()), all.iter().cloned());
                // Equations are bound last index first.
                for idx in cargs[np..].iter().rev() {
                    let v = normalize(&env, &Context::new(), &instantiate(idx, &all));
                    let t = infer(&env, &Context::new(), &v).map_err(|e| e.render(&env))?;
                    app = mk_apps(app, [v.clone(), mk_apps(Term::construct("eq", 0), [t, v])]);
                }
                infer(&env, &Context::new(), &app).map_err(|e| format!("{name}: {}", e.render(&env)))?;
                let lhs = normalize(&env, &Context::new(), &app);
                let rhs = normalize(&env, &Context::new(), &original);
                ensure(alpha_eq(&lhs, &rhs), || format!("{name}: {lhs:?} vs {rhs:?}"))?;
                checked += 1;
            }
        }
    }
    ensure(checked > 20, || format!("only {checked} instances"))
}

/// Immediate arguments of `t` headed by a constructor of `ind`.
fn structural_scan(ind: &str, universe: &[Term]) -> Vec<(Term, Term)> {
    let mut out = Vec::new();
    for t in universe {
        let (_, args) = decompose_app(t);
        for a in args {
            if matches!(decompose_app(&a).0, Term::Construct(ref n, _) if &**n == ind) {
                out.push((a, t.clone()));
            }
        }
    }
    out
}

fn same_pairs(a: &[(Term, Term)], b: &[(Term, Term)]) -> bool {
    let within = |x: &[(Term, Term)], y: &[(Term, Term)]| {
        x.iter().all(|p| y.iter().any(|q| alpha_eq(&p.0, &q.0) && alpha_eq(&p.1, &q.1)))
    };
    within(a, b) && within(b, a)
}

fn acyclicity() -> Outcome {
    let mut env = corpus_env()?;
    let cases: Vec<(&str, Vec<Term>, usize)> = vec![
        ("nat", vec![Term::ind("nat")], 4),
        ("list", vec![Term::app(Term::ind("list"), Term::ind("bool"))], 3),
        ("vec", (0..=3).map(|n| mk_apps(Term::ind("vec"), [Term::ind("bool"), nat_lit(n)])).collect(), 3),
    ];
    for (ind, tys, depth) in cases {
        let (_, rel): (DerivedDef, SubtermDecl) = derive_subterm(&mut env, ind, true).map_err(|e| e.render(&env))?;
        let mut universe = Vec::new();
        for ty in &tys {
            universe.extend(enumerate_closed_terms(&env, ty, depth).map_err(|e| e.to_string())?);
        }
        if ind == "list" {
            ensure(universe.len() == 15, || format!("list bool: {} values", universe.len()))?;
        }
        let pairs: Vec<(Term, Term)> = universe.iter().flat_map(|t| direct_subterm_pairs(&rel, t)).collect();
        ensure(same_pairs(&pairs, &structural_scan(ind, &universe)), || format!("{ind}: scan disagrees"))?;
        let closure = transitive_closure(&pairs);
        ensure(closure.iter().all(|(a, b)| !alpha_eq(a, b)), || format!("{ind}: reflexive pair"))?;
    }
    Ok(())
}

fn terms_up_to(size: usize) -> Vec<Term> {
    let mut table: Vec<Vec<Term>> = vec![Vec::new()];
    for s in 1..=size {
        let mut out = Vec::new();
        if s == 1 {
            out.extend((0..3).map(Term::Rel));
            out.push(Term::Sort(Sort::Prop));
            out.push(Term::ind("nat"));
        } else {
            for l in 1..s - 1 {
                for a in &table[l] {
                    for b in &table[s - 1 - l] {
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
    table.into_iter().flatten().collect()
}

fn term_surgery() -> Outcome {
    let all = terms_up_to(5);
    ensure(all.len() == 4105, || format!("{} terms", all.len()))?;
    let us: Vec<&Term> = all.iter().step_by(53).collect();
    for t in &all {
        for k in 0..3 {
            for (m, n) in [(1, 1), (2, 1), (1, 3)] {
                ensure(lift(m, k, &lift(n, k, t)) == lift(m + n, k, t), || format!("lift composition: {t:?}"))?;
            }
            for u in &us {
                ensure(&subst(&lift(1, k, t), k, u) == t, || format!("subst/lift: {t:?}"))?;
            }
        }
        let (h, args) = decompose_app(t);
        ensure(mk_apps(h, args) == *t, || format!("app spine: {t:?}"))?;
        let (ctx, body) = decompose_prod(t);
        ensure(compose_prod(ctx.decls(), body) == *t, || format!("prod telescope: {t:?}"))?;
        let (ctx, body) = decompose_lam(t);
        ensure(compose_lam(ctx.decls(), body) == *t, || format!("lam telescope: {t:?}"))?;
    }
    Ok(())
}

fn parser_round_trip() -> Outcome {
    let mut env = corpus_env()?;
    derive_all(&mut env)?;
    let mut rebuilt = GlobalEnv::empty();
    for (name, entry) in env.iter() {
        match entry {
            GlobalEntry::Inductive(d) => {
                let src = render_inductive_source(&env, d).map_err(|e| e.to_string())?;
                let cmds = parse_program(&src).map_err(|e| format!("{name}: {e}"))?;
                let Some(CommandKind::DefineInductive(ind)) = cmds.first().map(|c| &c.kind) else {
                    return Err(format!("{name}: not an inductive"));
                };
                let back = resolve_inductive(&rebuilt, ind).map_err(|e| format!("{name}: {}", e.message(&rebuilt)))?;
                ensure(inductive_alpha_eq(&back, d), || format!("{name}: pretty round trip\n{src}"))?;
                let sexp = inductive_to_sexp(d);
                ensure(inductive_from_sexp(&sexp).ok().as_ref() == Some(&**d), || format!("{name}: sexp"))?;
                rebuilt.add_inductive((**d).clone()).map_err(|e| e.to_string())?;
            }
            GlobalEntry::Definition(d) => {
                let src = render_definition(&env, &d.name, &d.ty, &d.body).map_err(|e| e.to_string())?;
                let cmds = parse_program(&src).map_err(|e| format!("{name}: {e}"))?;
                let Some(CommandKind::DefineConstant(def)) = cmds.first().map(|c| &c.kind) else {
                    return Err(format!("{name}: not a definition"));
                };
                let back = resolve_definition(&rebuilt, def).map_err(|e| format!("{name}: {}", e.message(&rebuilt)))?;
                ensure(alpha_eq(&back.ty, &d.ty) && alpha_eq(&back.body, &d.body), || {
                    format!("{name}: pretty round trip\n{src}")
                })?;
                let sexp = definition_to_sexp(d);
                ensure(definition_from_sexp(&sexp).ok().as_ref() == Some(&**d), || format!("{name}: sexp"))?;
                rebuilt.add_definition((**d).clone()).map_err(|e| e.to_string())?;
            }
        }
    }
    let derived = env.iter().filter(|(_, e)| matches!(e, GlobalEntry::Definition(_))).count();
    ensure(derived > 20, || format!("only {derived} definitions"))?;
    Ok(())
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 10] = [
        ("generalized constructor golden", generalized_constructor),
        ("nested induction golden", nested_induction),
        ("subterm golden", subterm_golden),
        ("non-nested mode", non_nested_mode),
        ("corpus well-typedness", corpus_well_typed),
        ("computation law", computation_law),
        ("round-trip law", round_trip_law),
        ("acyclicity", acyclicity),
        ("term surgery", term_surgery),
        ("parser round trip", parser_round_trip),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(()) => println!("criterion {:>2}: {name}: PASS", i + 1),
            Err(msg) => {
                println!("criterion {:>2}: {name}: FAIL ({msg})", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
