mod common;

use common::corpus_env;
use derivekit_core::surface::ast::CommandKind;
use derivekit_core::surface::{parse_program, parse_term, prelude, resolve_inductive, SurfaceError};
use derivekit_core::term::{mk_apps, Context, Decl, Name, Term};

#[test]
fn bool_declaration() {
    let cmds = parse_program("Inductive bool : Type := true | false.").unwrap();
    let CommandKind::DefineInductive(ind) = &cmds[0].kind else { panic!() };
    assert_eq!(ind.name.name, "bool");
    assert!(ind.params.is_empty());
    assert_eq!(ind.syntactic_index_count(), 0);
    assert_eq!(ind.ctors.len(), 2);
}

#[test]
fn brtree_declaration() {
    let src = "Inductive brtree A : nat -> Type :=\n\
               | Leaf (a : A) : brtree A 0\n\
               | Node (n : nat) (l : list (brtree A n)) : brtree A (S n).";
    let cmds = parse_program(src).unwrap();
    let CommandKind::DefineInductive(ind) = &cmds[0].kind else { panic!() };
    let decl = resolve_inductive(&prelude(), ind).unwrap();
    assert_eq!(decl.num_params(), 1);
    assert_eq!(decl.params.decls()[0].ty, Term::type0());
    assert_eq!(decl.indices.decls()[0].ty, Term::ind("nat"));
    let names: Vec<&str> = decl.ctors.iter().map(|c| &*c.name).collect();
    assert_eq!(names, ["Leaf", "Node"]);
}

#[test]
fn vernacular_commands() {
    let src = "Derive Subterm for list.\n\
               Derive subterm for brtree.\n\
               MetaCoq Run Scheme Induction for brtree.\n\
               MetaCoq Run Derive Generalized Constructor for Node as Node_eqs.";
    let cmds = parse_program(src).unwrap();
    assert!(matches!(&cmds[0].kind, CommandKind::DeriveSubterm { ind } if ind.name == "list"));
    assert!(matches!(&cmds[1].kind, CommandKind::DeriveSubterm { ind } if ind.name == "brtree"));
    assert!(matches!(&cmds[2].kind, CommandKind::SchemeInduction { ind, name: None } if ind.name == "brtree"));
    assert!(matches!(
        &cmds[3].kind,
        CommandKind::DeriveGenCtor { ctor, as_name } if ctor.name == "Node" && as_name.name == "Node_eqs"
    ));
}

#[test]
fn bare_constructor_types_are_accepted() {
    let src = "Inductive rose (A : Type) : Type := R : A -> list (rose A) -> rose A.";
    let cmds = parse_program(src).unwrap();
    let CommandKind::DefineInductive(ind) = &cmds[0].kind else { panic!() };
    let decl = resolve_inductive(&prelude(), ind).unwrap();
    assert_eq!(decl.ctor_arity(0), 2);
}

#[test]
fn resolution_examples() {
    let env = corpus_env();
    let t = parse_term("fun (A : Type) (a : A) => a", &Context::new(), &env).unwrap();
    assert_eq!(t, Term::lam(Name::named("A"), Term::type0(), Term::lam(Name::named("a"), Term::rel(0), Term::rel(0))));
    let ctx = Context::from(vec![Decl::new(Name::named("A"), Term::type0())]);
    let t = parse_term("forall n, brtree A n", &ctx, &env).unwrap();
    let expected = Term::prod(Name::named("n"), Term::ind("nat"), mk_apps(Term::ind("brtree"), [Term::rel(1), Term::rel(0)]));
    assert_eq!(t, expected);
    assert!(matches!(parse_term("foo", &Context::new(), &env), Err(SurfaceError::Unbound { .. })));
}

#[test]
fn parse_errors_are_located_and_deterministic() {
    let src = "Inductive bool := true\n| false\nDefinition x := 1.";
    let a = parse_program(src).unwrap_err();
    let b = parse_program(src).unwrap_err();
    assert_eq!(a, b);
    assert_eq!((a.pos.line, a.pos.col), (3, 1));
    assert!(a.to_string().contains("expected"));
}

#[test]
fn comments_are_ignored() {
    let cmds = parse_program("(* a (* nested *) comment *) Inductive unit := tt.").unwrap();
    assert_eq!(cmds.len(), 1);
}
