//! Exact decision procedures for one-sided approximation in finitely
//! generated subgroups of ℝⁿ.

pub mod decision;
pub mod density;
pub mod error;
pub mod face;
pub mod field;
pub mod heuristic;
mod lattice;
pub mod linalg;
pub mod ordered;
pub mod par;
mod poly;
pub mod simplex;
pub mod subgroup;
pub mod witness;

pub use error::{Error, Result};
pub use field::{FieldContext, FieldError, Scalar, Sign};
pub use subgroup::{OrderUnit, SubgroupSpec, TracePoint};
