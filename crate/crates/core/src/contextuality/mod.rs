//! No-go experiments: Kochen-Specker colorings, POVM non-contextuality of
//! the point-mass model, triviality of extensions and macroscopic realism.

mod coloring;
mod dilation;
mod macroreal;
mod triviality;
mod vectors;

use thiserror::Error;

pub use coloring::{enumerate_colorings, ks_coloring_search, Coloring, ColoringOutcome};
pub use dilation::{
    dilation_invariance_check, eigen_decomposition, mixed_decomposition, DILATION_TOL,
};
pub use macroreal::{
    macrorealism_witness, Constraint, ContradictionCertificate, MacrorealismOutcome,
    CERTIFICATE_TOL,
};
pub use triviality::{
    triviality_check, ExtensionTrivialityReport, SupportVerdict, Triviality, TrivialityEntry,
    TrivialityWitness, TRIVIALITY_GAP,
};
pub use vectors::{parse_complex, VectorSet, KS18_DIM4, ORTHOGONALITY_TOL};

use crate::ontic::ModelError;
use crate::quantum::QuantumError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ContextualityError {
    #[error("malformed vector set: {0}")]
    Malformed(String),
    #[error("basis {basis}: vectors {i} and {j} overlap by {overlap:.3e}")]
    NotOrthogonal {
        basis: usize,
        i: usize,
        j: usize,
        overlap: f64,
    },
    #[error("cannot read vector set: {0}")]
    Io(String),
    #[error("decomposition {0} is not a finite mixture of ray point masses")]
    UnsupportedDecomposition(usize),
    #[error("decomposition {index} reconstructs {reconstructed}, off the ancilla by {gap:.3e}")]
    DecompositionMismatch {
        index: usize,
        gap: f64,
        reconstructed: String,
    },
    #[error("pointer states are not orthonormal: {0}")]
    NonOrthonormalPointers(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Quantum(#[from] QuantumError),
}
