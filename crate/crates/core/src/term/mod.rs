//! Kernel term language and binding-aware term surgery.
//!
//! Terms use 0-based de Bruijn indices: `Rel(0)` is the innermost binder.
//! Application is binary and curried; [`mk_apps`] and [`decompose_app`]
//! convert between binary nodes and head/spine form.

mod env;
pub mod pretty;
pub mod sexp;

pub use env::{ConstructorDecl, Context, Decl, Definition, EnvError, GlobalEntry, GlobalEnv, InductiveDecl};

use std::fmt;
use std::rc::Rc;

/// Global identifiers (inductives, constructors, constants).
pub type Ident = Rc<str>;

/// Binder names. Binder names never affect meaning; see [`alpha_eq`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Name {
    Anonymous,
    Named(Ident),
}

impl Name {
    /// Builds a named binder.
    ///
    /// Panics if `s` is not a valid identifier; callers that handle user
    /// input go through [`Name::try_named`].
    pub fn named(s: &str) -> Name {
        Name::try_named(s).unwrap_or_else(|| panic!("invalid binder name {s:?}"))
    }

    pub fn try_named(s: &str) -> Option<Name> {
        is_valid_ident(s).then(|| Name::Named(s.into()))
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Name::Anonymous => None,
            Name::Named(s) => Some(s),
        }
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Name::Anonymous => f.write_str("_"),
            Name::Named(s) => f.write_str(s),
        }
    }
}

/// `[A-Za-z_][A-Za-z0-9_']*`, excluding the bare wildcard `_`.
pub fn is_valid_ident(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    s != "_" && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

/// Sorts of the finite cumulative hierarchy `Prop : Type(0) : Type(1) : ...`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sort {
    Prop,
    Type(u32),
}

impl Sort {
    /// The hierarchy stops here: `Type(MAX_LEVEL)` has no type.
    pub const MAX_LEVEL: u32 = 8;

    pub fn level(self) -> u32 {
        match self {
            Sort::Prop => 0,
            Sort::Type(i) => i,
        }
    }

    /// The sort of this sort, if still inside the hierarchy.
    pub fn succ(self) -> Option<Sort> {
        match self {
            Sort::Prop => Some(Sort::Type(0)),
            Sort::Type(i) if i < Self::MAX_LEVEL => Some(Sort::Type(i + 1)),
            Sort::Type(_) => None,
        }
    }

    /// Cumulativity: `Prop <= Type(i)` and `Type(i) <= Type(j)` for `i <= j`.
    pub fn leq(self, other: Sort) -> bool {
        match (self, other) {
            (Sort::Prop, _) => true,
            (Sort::Type(_), Sort::Prop) => false,
            (Sort::Type(i), Sort::Type(j)) => i <= j,
        }
    }

    /// Sort of `Π x:A. B` given the sorts of `A` and `B` (Prop is impredicative).
    pub fn product(dom: Sort, cod: Sort) -> Sort {
        match cod {
            Sort::Prop => Sort::Prop,
            Sort::Type(j) => Sort::Type(dom.level().max(j)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Sort(Sort),
    Rel(usize),
    Prod(Name, Rc<Term>, Rc<Term>),
    Lam(Name, Rc<Term>, Rc<Term>),
    /// `let na : ty := val in body`; field order is (name, val, ty, body).
    LetIn(Name, Rc<Term>, Rc<Term>, Rc<Term>),
    App(Rc<Term>, Rc<Term>),
    Ind(Ident),
    Construct(Ident, usize),
    /// Dependent elimination. `motive` abstracts the indices and then the
    /// scrutinee; `branches[i]` abstracts the arguments of constructor `i`.
    Case {
        ind: Ident,
        motive: Rc<Term>,
        scrutinee: Rc<Term>,
        branches: Vec<Term>,
    },
    /// Single fixpoint. `body` is scoped under the fixpoint itself (`Rel(0)`).
    Fix {
        name: Name,
        struct_arg: usize,
        ty: Rc<Term>,
        body: Rc<Term>,
    },
    Const(Ident),
}

impl Term {
    pub fn sort(s: Sort) -> Term {
        Term::Sort(s)
    }

    pub fn prop() -> Term {
        Term::Sort(Sort::Prop)
    }

    pub fn type0() -> Term {
        Term::Sort(Sort::Type(0))
    }

    pub fn rel(i: usize) -> Term {
        Term::Rel(i)
    }

    pub fn prod(na: Name, dom: Term, cod: Term) -> Term {
        Term::Prod(na, Rc::new(dom), Rc::new(cod))
    }

    pub fn lam(na: Name, dom: Term, body: Term) -> Term {
        Term::Lam(na, Rc::new(dom), Rc::new(body))
    }

    pub fn let_in(na: Name, val: Term, ty: Term, body: Term) -> Term {
        Term::LetIn(na, Rc::new(val), Rc::new(ty), Rc::new(body))
    }

    pub fn app(f: Term, a: Term) -> Term {
        Term::App(Rc::new(f), Rc::new(a))
    }

    pub fn ind(name: &str) -> Term {
        Term::Ind(name.into())
    }

    pub fn construct(ind: &str, idx: usize) -> Term {
        Term::Construct(ind.into(), idx)
    }

    pub fn constant(name: &str) -> Term {
        Term::Const(name.into())
    }

    pub fn case(ind: &str, motive: Term, scrutinee: Term, branches: Vec<Term>) -> Term {
        Term::Case {
            ind: ind.into(),
            motive: Rc::new(motive),
            scrutinee: Rc::new(scrutinee),
            branches,
        }
    }

    pub fn fix(name: Name, struct_arg: usize, ty: Term, body: Term) -> Term {
        Term::Fix {
            name,
            struct_arg,
            ty: Rc::new(ty),
            body: Rc::new(body),
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        match self {
            Term::Sort(_) | Term::Rel(_) | Term::Ind(_) | Term::Construct(..) | Term::Const(_) => 1,
            Term::Prod(_, a, b) | Term::Lam(_, a, b) | Term::App(a, b) => 1 + a.size() + b.size(),
            Term::LetIn(_, v, t, b) => 1 + v.size() + t.size() + b.size(),
            Term::Case {
                motive,
                scrutinee,
                branches,
                ..
            } => 1 + motive.size() + scrutinee.size() + branches.iter().map(Term::size).sum::<usize>(),
            Term::Fix { ty, body, .. } => 1 + ty.size() + body.size(),
        }
    }

    pub fn is_app(&self) -> bool {
        matches!(self, Term::App(..))
    }
}

/// Rebuilds `t`, replacing every variable occurrence. `f(i, depth)` receives
/// the raw index and the number of binders crossed so far.
pub fn map_rels(t: &Term, depth: usize, f: &impl Fn(usize, usize) -> Term) -> Term {
    match t {
        Term::Rel(i) => f(*i, depth),
        Term::Sort(_) | Term::Ind(_) | Term::Construct(..) | Term::Const(_) => t.clone(),
        Term::Prod(na, a, b) => Term::prod(na.clone(), map_rels(a, depth, f), map_rels(b, depth + 1, f)),
        Term::Lam(na, a, b) => Term::lam(na.clone(), map_rels(a, depth, f), map_rels(b, depth + 1, f)),
        Term::LetIn(na, v, ty, b) => Term::let_in(
            na.clone(),
            map_rels(v, depth, f),
            map_rels(ty, depth, f),
            map_rels(b, depth + 1, f),
        ),
        Term::App(a, b) => Term::app(map_rels(a, depth, f), map_rels(b, depth, f)),
        Term::Case {
            ind,
            motive,
            scrutinee,
            branches,
        } => Term::Case {
            ind: ind.clone(),
            motive: Rc::new(map_rels(motive, depth, f)),
            scrutinee: Rc::new(map_rels(scrutinee, depth, f)),
            branches: branches.iter().map(|b| map_rels(b, depth, f)).collect(),
        },
        Term::Fix {
            name,
            struct_arg,
            ty,
            body,
        } => Term::Fix {
            name: name.clone(),
            struct_arg: *struct_arg,
            ty: Rc::new(map_rels(ty, depth, f)),
            body: Rc::new(map_rels(body, depth + 1, f)),
        },
    }
}

/// Adds `n` to every variable with index `>= k` (cutoff grows under binders).
pub fn lift(n: usize, k: usize, t: &Term) -> Term {
    if n == 0 || !has_free_rel_from(t, k) {
        return t.clone();
    }
    map_rels(t, 0, &|i, depth| if i >= k + depth { Term::Rel(i + n) } else { Term::Rel(i) })
}

/// Replaces `Rel(k)` by `u`, decrementing the variables above `k`. `u` is
/// scoped in the same context as `t` and is lifted under binders.
pub fn subst(t: &Term, k: usize, u: &Term) -> Term {
    map_rels(t, 0, &|i, depth| {
        let k = k + depth;
        match i.cmp(&k) {
            std::cmp::Ordering::Less => Term::Rel(i),
            std::cmp::Ordering::Equal => lift(depth, 0, u),
            std::cmp::Ordering::Greater => Term::Rel(i - 1),
        }
    })
}

/// Simultaneous substitution of a telescope instance: `args` are listed
/// outermost first, so `args[last]` replaces `Rel(0)`.
pub fn instantiate(t: &Term, args: &[Term]) -> Term {
    let n = args.len();
    if n == 0 {
        return t.clone();
    }
    map_rels(t, 0, &|i, depth| {
        if i < depth {
            Term::Rel(i)
        } else if i - depth < n {
            lift(depth, 0, &args[n - 1 - (i - depth)])
        } else {
            Term::Rel(i - n)
        }
    })
}

/// Like [`instantiate`], for a telescope instance sitting below `j` binders:
/// the variables `j..j+args.len()` of `t` are replaced by `args` (scoped
/// outside those `j` binders, outermost first).
pub fn instantiate_under(t: &Term, j: usize, args: &[Term]) -> Term {
    let n = args.len();
    if n == 0 {
        return t.clone();
    }
    map_rels(t, 0, &|i, depth| {
        let d = depth + j;
        if i < d {
            Term::Rel(i)
        } else if i - d < n {
            lift(d, 0, &args[n - 1 - (i - d)])
        } else {
            Term::Rel(i - n)
        }
    })
}

/// Moves a term between contexts described by de Bruijn levels.
///
/// `t` is scoped in a context of length `src_len`; the variable at level `l`
/// is sent to level `map[l]` of a context of length `dst_len`.
pub fn reindex(t: &Term, src_len: usize, dst_len: usize, map: &[usize]) -> Term {
    map_rels(t, 0, &|i, depth| {
        if i < depth {
            Term::Rel(i)
        } else {
            let level = src_len - 1 - (i - depth);
            Term::Rel(depth + dst_len - 1 - map[level])
        }
    })
}

/// Left-nested application; `mk_apps(f, []) = f`.
pub fn mk_apps(f: Term, args: impl IntoIterator<Item = Term>) -> Term {
    args.into_iter().fold(f, Term::app)
}

/// Non-dependent arrow `a -> b`, lifting `b` over the anonymous binder.
pub fn mk_impl(a: Term, b: Term) -> Term {
    let b = lift(1, 0, &b);
    Term::prod(Name::Anonymous, a, b)
}

/// Splits an application into its non-application head and argument spine.
pub fn decompose_app(t: &Term) -> (Term, Vec<Term>) {
    let mut args = Vec::new();
    let mut cur = t;
    while let Term::App(f, a) = cur {
        args.push((**a).clone());
        cur = f;
    }
    args.reverse();
    (cur.clone(), args)
}

/// Splits leading products into a telescope and the remaining head.
pub fn decompose_prod(t: &Term) -> (Context, Term) {
    let mut ctx = Context::new();
    let mut cur = t;
    while let Term::Prod(na, a, b) = cur {
        ctx.push(Decl::new(na.clone(), (**a).clone()));
        cur = b;
    }
    (ctx, cur.clone())
}

/// Like [`decompose_prod`] but peels at most `n` products.
pub fn decompose_prod_n(t: &Term, n: usize) -> Option<(Context, Term)> {
    let mut ctx = Context::new();
    let mut cur = t;
    for _ in 0..n {
        match cur {
            Term::Prod(na, a, b) => {
                ctx.push(Decl::new(na.clone(), (**a).clone()));
                cur = b;
            }
            _ => return None,
        }
    }
    Some((ctx, cur.clone()))
}

/// Splits leading lambdas into a telescope and the body.
pub fn decompose_lam(t: &Term) -> (Context, Term) {
    let mut ctx = Context::new();
    let mut cur = t;
    while let Term::Lam(na, a, b) = cur {
        ctx.push(Decl::new(na.clone(), (**a).clone()));
        cur = b;
    }
    (ctx, cur.clone())
}

/// Re-nests a telescope as products around `head` (let-declarations become `LetIn`).
pub fn compose_prod(tele: &[Decl], head: Term) -> Term {
    tele.iter().rev().fold(head, |acc, d| match &d.body {
        Some(v) => Term::let_in(d.name.clone(), v.clone(), d.ty.clone(), acc),
        None => Term::prod(d.name.clone(), d.ty.clone(), acc),
    })
}

/// Re-nests a telescope as lambdas around `body`.
pub fn compose_lam(tele: &[Decl], body: Term) -> Term {
    tele.iter().rev().fold(body, |acc, d| match &d.body {
        Some(v) => Term::let_in(d.name.clone(), v.clone(), d.ty.clone(), acc),
        None => Term::lam(d.name.clone(), d.ty.clone(), acc),
    })
}

/// Structural equality ignoring binder names.
pub fn alpha_eq(a: &Term, b: &Term) -> bool {
    match (a, b) {
        (Term::Sort(x), Term::Sort(y)) => x == y,
        (Term::Rel(x), Term::Rel(y)) => x == y,
        (Term::Prod(_, a1, b1), Term::Prod(_, a2, b2))
        | (Term::Lam(_, a1, b1), Term::Lam(_, a2, b2))
        | (Term::App(a1, b1), Term::App(a2, b2)) => alpha_eq(a1, a2) && alpha_eq(b1, b2),
        (Term::LetIn(_, v1, t1, b1), Term::LetIn(_, v2, t2, b2)) => {
            alpha_eq(v1, v2) && alpha_eq(t1, t2) && alpha_eq(b1, b2)
        }
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
                && alpha_eq(m1, m2)
                && alpha_eq(s1, s2)
                && br1.len() == br2.len()
                && br1.iter().zip(br2).all(|(x, y)| alpha_eq(x, y))
        }
        (
            Term::Fix {
                struct_arg: k1,
                ty: t1,
                body: b1,
                ..
            },
            Term::Fix {
                struct_arg: k2,
                ty: t2,
                body: b2,
                ..
            },
        ) => k1 == k2 && alpha_eq(t1, t2) && alpha_eq(b1, b2),
        _ => false,
    }
}

fn any_rel(t: &Term, depth: usize, p: &impl Fn(usize, usize) -> bool) -> bool {
    match t {
        Term::Rel(i) => p(*i, depth),
        Term::Sort(_) | Term::Ind(_) | Term::Construct(..) | Term::Const(_) => false,
        Term::Prod(_, a, b) | Term::Lam(_, a, b) => any_rel(a, depth, p) || any_rel(b, depth + 1, p),
        Term::LetIn(_, v, ty, b) => any_rel(v, depth, p) || any_rel(ty, depth, p) || any_rel(b, depth + 1, p),
        Term::App(a, b) => any_rel(a, depth, p) || any_rel(b, depth, p),
        Term::Case {
            motive,
            scrutinee,
            branches,
            ..
        } => any_rel(motive, depth, p) || any_rel(scrutinee, depth, p) || branches.iter().any(|b| any_rel(b, depth, p)),
        Term::Fix { ty, body, .. } => any_rel(ty, depth, p) || any_rel(body, depth + 1, p),
    }
}

/// Whether `Rel(k)` occurs free in `t`.
pub fn occurs_rel(t: &Term, k: usize) -> bool {
    any_rel(t, 0, &|i, depth| i == k + depth)
}

/// Whether some variable with index `>= k` occurs free in `t`.
pub fn has_free_rel_from(t: &Term, k: usize) -> bool {
    any_rel(t, 0, &|i, depth| i >= k + depth)
}

/// Whether every free variable of `t` is below `n`.
pub fn is_closed_within(t: &Term, n: usize) -> bool {
    !has_free_rel_from(t, n)
}

/// Whether `t` mentions the global `name` (as an inductive, constructor or constant).
pub fn mentions_global(t: &Term, name: &str) -> bool {
    match t {
        Term::Ind(n) | Term::Const(n) | Term::Construct(n, _) => &**n == name,
        Term::Sort(_) | Term::Rel(_) => false,
        Term::Prod(_, a, b) | Term::Lam(_, a, b) | Term::App(a, b) => mentions_global(a, name) || mentions_global(b, name),
        Term::LetIn(_, v, ty, b) => mentions_global(v, name) || mentions_global(ty, name) || mentions_global(b, name),
        Term::Case {
            ind,
            motive,
            scrutinee,
            branches,
        } => {
            &**ind == name
                || mentions_global(motive, name)
                || mentions_global(scrutinee, name)
                || branches.iter().any(|b| mentions_global(b, name))
        }
        Term::Fix { ty, body, .. } => mentions_global(ty, name) || mentions_global(body, name),
    }
}

/// Number of leading products (syntactic).
pub fn prod_arity(t: &Term) -> usize {
    let mut n = 0;
    let mut cur = t;
    while let Term::Prod(_, _, b) = cur {
        n += 1;
        cur = b;
    }
    n
}

/// Suggests a binder name for a value of type `ty`: the lowercased initial
/// of the type's head, `A` for sorts, `x` otherwise.
pub fn suggest_name(ty: &Term, ctx_names: &[Option<&str>]) -> String {
    let (head, _) = decompose_app(ty);
    let base = match &head {
        Term::Ind(n) | Term::Const(n) => n.chars().next(),
        Term::Rel(i) => ctx_names
            .len()
            .checked_sub(1 + i)
            .and_then(|l| ctx_names[l])
            .and_then(|n| n.chars().next()),
        Term::Sort(_) => return "A".to_string(),
        _ => None,
    };
    match base {
        Some(c) if c.is_ascii_alphabetic() => c.to_ascii_lowercase().to_string(),
        _ => "x".to_string(),
    }
}
