//! Reduction, conversion, type checking, inductive well-formedness, the
//! guard condition and a closed-term enumerator.

mod enumerate;
mod error;
mod guard;
mod inductive;
mod reduce;
mod typing;

pub use enumerate::{enumerate_closed_terms, EnumError};
pub use error::{TypeError, TypeErrorKind};
pub use guard::{check_guard, guard_check, SubtermInfo};
pub use inductive::check_inductive;
pub use reduce::{conv, conv_leq, normalize, whnf};
pub use typing::{check, infer, infer_sort, try_infer, TypeChecker};
