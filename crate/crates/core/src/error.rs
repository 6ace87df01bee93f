use thiserror::Error;

use crate::field::FieldError;
use crate::linalg::LinalgError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("order unit coordinate {index} is not strictly positive")]
    InvalidUnit { index: usize },
    #[error("invalid trace: {0}")]
    InvalidTrace(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("precondition not met: {0}")]
    PreconditionNotMet(String),
    #[error("generators of G are not independent over Z")]
    DependentGenerators,
    #[error("G/H has torsion: {k}·g lies in H but g does not")]
    NotPure { k: String },
    #[error("convexity of H in G could not be established")]
    ConvexityNotEstablished,
    #[error("G is not a critical group: {0}")]
    NotCritical(String),
    #[error("G is not dense in its ambient space, so the strict ordering is not simple")]
    NotDense,
    #[error("this operation requires the strict ordering")]
    RequiresStrictOrdering,
    #[error("failure certificate construction failed: {0}")]
    CertificateConstructionFailed(String),
    #[error("decision routes disagree (density route: {route_ii}, primal route: {route_iii})")]
    RouteDisagreement { route_ii: bool, route_iii: bool },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
