//! Checks that a model reproduces quantum statistics, and the machinery
//! that identifies its response functions with quantum operators.

mod born;
mod coarse;
mod gleason;
mod overlap;
mod support;

use thiserror::Error;

pub use born::{
    verify_born_equivalence, ContextBattery, Measurement, MC_ROUNDOFF_FLOOR, MC_SIGMAS,
};
pub use coarse::{
    coarse_grain, informationally_complete_battery, CoarseClass, QuotientModel, CLASS_TOL,
};
pub use gleason::{gleason_fit, traceless_hermitian_basis, FitResult, MAX_CONDITION};
pub use overlap::{overlap_classify, OverlapClass, OverlapReport, OVERLAP_THRESHOLD};
pub use support::{
    operator_identification, support_implication_check, IDENTIFICATION_TOL, SUPPORT_TOL,
};

pub use crate::report::{CaseRecord, Verdict, VerificationReport};

use crate::ontic::ModelError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifierError {
    #[error("design matrix has rank {rank}, need {needed}: the projectors do not span the Hermitian operators")]
    RankDeficient { rank: usize, needed: usize },
    #[error("normal equations are ill-conditioned (condition number {condition:.3e})")]
    IllConditioned { condition: f64 },
    #[error("sample {index} has dimension {found}, expected {expected}")]
    SampleDimension {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("operator identification needs dimension at least 3, got {0}")]
    DimensionTooSmall(usize),
    #[error("model {0} does not expose a finite ontic space")]
    NotDiscrete(String),
    #[error("ontic state {0} carries no ray")]
    Unlabelled(String),
    #[error("responses differ inside the class of {class}: {first} and {second} give {a} and {b} for {event}")]
    NotCoarseGrainable {
        class: String,
        first: String,
        second: String,
        event: String,
        a: f64,
        b: f64,
    },
    #[error("class {class} responds {found} to {event} instead of the ray's own {expected}")]
    NotRayForm {
        class: String,
        event: String,
        found: f64,
        expected: f64,
    },
    #[error("support of the preparation of {ray} under {context} leaves its class: {state}")]
    SupportOutsideClass {
        ray: String,
        context: String,
        state: String,
    },
    #[error("overlap is not computable for the {0} ontic space")]
    OverlapUnsupported(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

impl From<crate::quantum::QuantumError> for VerifierError {
    fn from(e: crate::quantum::QuantumError) -> Self {
        VerifierError::Model(ModelError::Quantum(e))
    }
}
