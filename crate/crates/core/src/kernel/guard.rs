//! Structural guard condition for fixpoints.
//!
//! A recursive call is accepted when its structural argument is a variable
//! marked [`SubtermInfo::StrictSubterm`]. Strictness is conferred only by
//! (i) variables bound by case branches on the structural argument or on a
//! strict subterm, and (ii) the structural parameter of a nested fixpoint
//! applied to a strict subterm.

use crate::term::{decompose_app, Context, GlobalEnv, Term};

use super::error::{TypeError, TypeErrorKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubtermInfo {
    NotSubterm,
    StrictSubterm,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Status {
    /// The fixpoint being checked.
    Recursive,
    /// The structural argument itself.
    Argument,
    Info(SubtermInfo),
}

const NOT: Status = Status::Info(SubtermInfo::NotSubterm);
const STRICT: Status = Status::Info(SubtermInfo::StrictSubterm);

/// Guard check of a closed fixpoint term.
pub fn guard_check(env: &GlobalEnv, fixterm: &Term) -> Result<(), TypeError> {
    check_guard(env, &Context::new(), fixterm)
}

pub fn check_guard(env: &GlobalEnv, ctx: &Context, fixterm: &Term) -> Result<(), TypeError> {
    let Term::Fix { struct_arg, body, .. } = fixterm else {
        let msg = "not a fixpoint".to_string();
        return Err(TypeError::new(TypeErrorKind::IllFormedFix(msg), ctx, fixterm));
    };
    let mut guard = Guard {
        env,
        ctx,
        struct_arg: *struct_arg,
        stack: vec![Status::Recursive],
    };
    let mut cur: &Term = body;
    for j in 0..=*struct_arg {
        match cur {
            Term::Lam(_, dom, b) => {
                guard.walk(dom)?;
                guard.stack.push(if j == *struct_arg { Status::Argument } else { NOT });
                cur = b;
            }
            _ => {
                let msg = format!("body must abstract its first {} arguments", struct_arg + 1);
                return Err(guard.violation(msg, fixterm));
            }
        }
    }
    guard.walk(cur)
}

struct Guard<'a> {
    env: &'a GlobalEnv,
    ctx: &'a Context,
    struct_arg: usize,
    /// Status per binder crossed inside the fixpoint, indexed by level.
    stack: Vec<Status>,
}

impl Guard<'_> {
    fn violation(&self, msg: String, subject: &Term) -> TypeError {
        TypeError::new(TypeErrorKind::GuardViolation(msg), self.ctx, subject)
    }

    fn status(&self, i: usize) -> Status {
        match self.stack.len().checked_sub(i + 1) {
            Some(level) => self.stack[level],
            None => NOT,
        }
    }

    fn status_of(&self, t: &Term) -> Status {
        match t {
            Term::Rel(i) => self.status(*i),
            _ => NOT,
        }
    }

    fn is_recursive(&self, i: usize) -> bool {
        self.status(i) == Status::Recursive
    }

    fn walk(&mut self, t: &Term) -> Result<(), TypeError> {
        match t {
            Term::Rel(i) if self.is_recursive(*i) => {
                let msg = "recursive reference is not applied to its structural argument".to_string();
                Err(self.violation(msg, t))
            }
            Term::Rel(_) | Term::Sort(_) | Term::Ind(_) | Term::Construct(..) | Term::Const(_) => Ok(()),
            Term::App(..) => {
                let (head, args) = decompose_app(t);
                match &head {
                    Term::Rel(i) if self.is_recursive(*i) => {
                        let k = self.struct_arg;
                        if args.len() <= k {
                            let msg = format!("recursive call has fewer than {} arguments", k + 1);
                            return Err(self.violation(msg, t));
                        }
                        if self.status_of(&args[k]) != STRICT {
                            let msg = "recursive call on a term that is not a strict subterm".to_string();
                            return Err(self.violation(msg, t));
                        }
                    }
                    Term::Fix { .. } => self.walk_fix(&head, &args)?,
                    _ => self.walk(&head)?,
                }
                args.iter().try_for_each(|a| self.walk(a))
            }
            Term::Prod(_, a, b) | Term::Lam(_, a, b) => {
                self.walk(a)?;
                self.under(NOT, |g| g.walk(b))
            }
            Term::LetIn(_, v, ty, b) => {
                self.walk(v)?;
                self.walk(ty)?;
                self.under(NOT, |g| g.walk(b))
            }
            Term::Case {
                ind,
                motive,
                scrutinee,
                branches,
            } => {
                self.walk(motive)?;
                self.walk(scrutinee)?;
                let bound = match self.status_of(scrutinee) {
                    Status::Argument | STRICT => STRICT,
                    _ => NOT,
                };
                let decl = self.env.inductive(ind).cloned();
                for (i, branch) in branches.iter().enumerate() {
                    let arity = decl.as_ref().filter(|d| i < d.ctors.len()).map_or(0, |d| d.ctor_arity(i));
                    self.walk_binders(branch, arity, |_| bound)?;
                }
                Ok(())
            }
            Term::Fix { .. } => self.walk_fix(t, &[]),
        }
    }

    /// Nested fixpoint: its structural parameter inherits the status of the
    /// argument it is applied to.
    fn walk_fix(&mut self, fix: &Term, args: &[Term]) -> Result<(), TypeError> {
        let Term::Fix { struct_arg, ty, body, .. } = fix else {
            unreachable!("walk_fix on a non-fixpoint");
        };
        self.walk(ty)?;
        let inherited = match args.get(*struct_arg).map(|a| self.status_of(a)) {
            Some(s @ (Status::Argument | STRICT)) => s,
            _ => NOT,
        };
        let k = *struct_arg;
        self.under(NOT, |g| g.walk_binders(body, k + 1, |j| if j == k { inherited } else { NOT }))
    }

    /// Walks up to `n` leading lambdas of `t`, giving binder `j` status `f(j)`.
    fn walk_binders(&mut self, t: &Term, n: usize, f: impl Fn(usize) -> Status) -> Result<(), TypeError> {
        let depth = self.stack.len();
        let mut cur = t;
        let mut j = 0;
        let result = loop {
            match cur {
                Term::Lam(_, dom, b) if j < n => {
                    if let Err(e) = self.walk(dom) {
                        break Err(e);
                    }
                    self.stack.push(f(j));
                    j += 1;
                    cur = b;
                }
                _ => break self.walk(cur),
            }
        };
        self.stack.truncate(depth);
        result
    }

    fn under<R>(&mut self, status: Status, f: impl FnOnce(&mut Self) -> R) -> R {
        self.stack.push(status);
        let r = f(self);
        self.stack.pop();
        r
    }
}
