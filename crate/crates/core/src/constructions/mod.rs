//! Algebras built from theories and from growth prescriptions.

mod implication;
mod merge;
mod model;
mod nu;
mod prescribed;

pub use implication::{implication_algebra, parse_bits};
pub use merge::sigma_merge;
pub use model::{model_m, model_m_over, model_v, ModelM, ModelV};
pub use nu::{example_nu, nu_formula};
pub use prescribed::{prescribed_d, prescribed_size};

use thiserror::Error;

use crate::algebra::AlgebraError;
use crate::kelly::KellyError;

#[derive(Debug, Error)]
pub enum ConstructionError {
    #[error(transparent)]
    Kelly(#[from] KellyError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("the theory is inconsistent")]
    Inconsistent,
    #[error("{0}")]
    Precondition(String),
    #[error("construction would have {size} table entries, above the guard {guard}")]
    TooLarge { size: u128, guard: u64 },
    /// A post-condition the construction guarantees failed; this is a bug.
    #[error("post-condition failed: {0}")]
    Postcondition(String),
}

/// Table-size limit shared by the constructions.
pub const TABLE_GUARD: u64 = 1 << 24;
