use crate::term::GlobalEnv;

use super::load_program;

/// Declarations every session starts from.
pub const PRELUDE_SOURCE: &str = r#"
Inductive eq (A : Type) (x : A) : A -> Prop := eq_refl : eq A x x.

Inductive nat : Type := O | S (n : nat).

Inductive bool : Type := true | false.

Inductive list (A : Type) : Type := nil | cons (a : A) (l : list A).

Inductive option (A : Type) : Type := None | Some (a : A).

Definition plus : nat -> nat -> nat :=
  fix plus (n : nat) (m : nat) {struct n} : nat :=
    match n with
    | O => m
    | S p => S (plus p m)
    end.

Definition nat_rect : forall p : nat -> Type, p O -> (forall n : nat, p n -> p (S n)) -> forall n : nat, p n :=
  fun (p : nat -> Type) (hO : p O) (hS : forall n : nat, p n -> p (S n)) =>
    fix F (n : nat) {struct n} : p n :=
      match n as n' return p n' with
      | O => hO
      | S m => hS m (F m)
      end.
"#;

/// A fresh environment holding the checked prelude.
pub fn prelude() -> GlobalEnv {
    let mut env = GlobalEnv::empty();
    if let Err(e) = load_program(&mut env, PRELUDE_SOURCE) {
        panic!("built-in prelude is ill-formed: {e}");
    }
    env
}
