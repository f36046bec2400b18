//! Exact, finitely staged algebra for AF and Kirchberg invariants.
//!
//! The crate works with finitely generated abelian groups (via Smith normal
//! form), inductive systems of free lattices, Bratteli diagrams and their
//! dimension groups, Schreier generators of free-group subgroups, groups
//! attached to prime-labelled graphs, and the invariant-level pipeline that
//! turns an abelian group into the K-theory of a Kirchberg algebra.

pub mod abelian;
pub mod dimension;
pub mod eplag;
pub mod error;
pub mod invariants;
pub mod json;
pub mod limits;
pub mod matrix;
pub mod primes;
pub mod rordam;
pub mod schreier;

use serde::{Deserialize, Serialize};

pub use abelian::{FgAbelianGroup, LocalizedGroupDescriptor};
pub use error::{Error, Result};
pub use matrix::{smith_normal_form, IntMatrix, SmithForm};

/// Three-valued answer for questions that are only semi-decidable at a
/// finite truncation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Truth {
    True,
    False,
    Unknown,
}

impl Truth {
    pub fn is_true(self) -> bool {
        self == Truth::True
    }
}

impl From<bool> for Truth {
    fn from(b: bool) -> Self {
        if b {
            Truth::True
        } else {
            Truth::False
        }
    }
}
