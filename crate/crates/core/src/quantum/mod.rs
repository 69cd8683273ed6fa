//! Exact finite-dimensional quantum mechanics: states, sharp and unsharp
//! measurements, composition and Born-rule probabilities.
//!
//! Composite systems always order the system factor major and the ancilla
//! factor minor: basis index `i_A * d_B + i_B`.

mod bloch;
mod operators;
pub mod random;
mod state;

use thiserror::Error;

pub use bloch::BlochVector;
pub use operators::{Effect, Povm, ProjectiveMeasurement, Projector};
pub use state::{DensityOperator, Ket, Ray};

use crate::linalg::CMatrix;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuantumError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("dimension {0} is below the minimum of 2")]
    DimensionTooSmall(usize),
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("state is not normalized (squared norm {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },
    #[error("zero vector cannot be normalized")]
    ZeroVector,
    #[error("matrix is not Hermitian (defect {defect:e})")]
    NotHermitian { defect: f64 },
    #[error("matrix is not idempotent (defect {defect:e})")]
    NotIdempotent { defect: f64 },
    #[error("projectors {i} and {j} are not orthogonal (defect {defect:e})")]
    NotOrthogonal { i: usize, j: usize, defect: f64 },
    #[error("operators do not sum to the identity (defect {defect:e})")]
    Incomplete { defect: f64 },
    #[error("operator is not positive semidefinite (minimum eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },
    #[error("operator exceeds the identity (maximum eigenvalue {max_eigenvalue})")]
    ExceedsIdentity { max_eigenvalue: f64 },
    #[error("trace is {trace}, expected 1")]
    TraceNotOne { trace: f64 },
    #[error("negative mixture weight {weight}")]
    NegativeWeight { weight: f64 },
    #[error("dimension {dim} does not factor with ancilla dimension {ancilla_dim}")]
    NotFactorizable { dim: usize, ancilla_dim: usize },
    #[error("probability {value} lies outside [0, 1]")]
    ProbabilityOutOfRange { value: f64 },
    #[error("expectation value has imaginary residue {residue:e}")]
    ImaginaryResidue { residue: f64 },
    #[error("empty operator list")]
    Empty,
}

fn ensure_dim(expected: usize, found: usize) -> Result<(), QuantumError> {
    if expected == found {
        Ok(())
    } else {
        Err(QuantumError::DimensionMismatch { expected, found })
    }
}

/// Checks that a complex expectation value is a probability, snapping
/// roundoff-sized excursions outside `[0, 1]` back onto the boundary.
fn as_probability<T: Scalar>(value: num_complex::Complex<T>) -> Result<T, QuantumError> {
    let tol = T::assembly_tol();
    if value.im.abs() > tol {
        return Err(QuantumError::ImaginaryResidue {
            residue: value.im.to_f64_lossy(),
        });
    }
    let p = value.re;
    if p < -tol || p > T::one() + tol {
        return Err(QuantumError::ProbabilityOutOfRange {
            value: p.to_f64_lossy(),
        });
    }
    Ok(p.max(T::zero()).min(T::one()))
}

/// Born rule `⟨ψ|E|ψ⟩` for a sharp event.
pub fn born_probability<T: Scalar>(
    state: &Ket<T>,
    event: &Projector<T>,
) -> Result<T, QuantumError> {
    ensure_dim(event.dim(), state.dim())?;
    as_probability(event.matrix().expectation(state.amplitudes()))
}

/// `Tr[E ρ]` for an effect and a density operator.
pub fn trace_probability<T: Scalar>(
    rho: &DensityOperator<T>,
    event: &Effect<T>,
) -> Result<T, QuantumError> {
    ensure_dim(event.dim(), rho.dim())?;
    as_probability(event.matrix().trace_product(rho.matrix()))
}

/// Kronecker composition, left operand as the system (major index).
pub trait Tensor {
    fn tensor(&self, rhs: &Self) -> Self;
}

impl<T: Scalar> Tensor for Ket<T> {
    fn tensor(&self, rhs: &Self) -> Self {
        let amps = self
            .amplitudes()
            .iter()
            .flat_map(|a| rhs.amplitudes().iter().map(move |b| a * b))
            .collect();
        Ket::from_trusted(amps)
    }
}

impl<T: Scalar> Tensor for DensityOperator<T> {
    fn tensor(&self, rhs: &Self) -> Self {
        DensityOperator::from_trusted(self.matrix().kron(rhs.matrix()))
    }
}

impl<T: Scalar> Tensor for Projector<T> {
    fn tensor(&self, rhs: &Self) -> Self {
        Projector::from_trusted(self.matrix().kron(rhs.matrix()), self.rank() * rhs.rank())
    }
}

impl<T: Scalar> Tensor for Effect<T> {
    fn tensor(&self, rhs: &Self) -> Self {
        Effect::from_derived(self.matrix().kron(rhs.matrix()))
            .expect("product of effects is an effect")
    }
}

impl<T: Scalar> Tensor for CMatrix<T> {
    fn tensor(&self, rhs: &Self) -> Self {
        self.kron(rhs)
    }
}

/// Traces out the minor (ancilla) factor of dimension `ancilla_dim`.
pub fn partial_trace_b<T: Scalar>(
    op: &CMatrix<T>,
    ancilla_dim: usize,
) -> Result<CMatrix<T>, QuantumError> {
    if !op.is_square() {
        return Err(QuantumError::NotSquare {
            rows: op.rows(),
            cols: op.cols(),
        });
    }
    let dim = op.rows();
    if ancilla_dim == 0 || !dim.is_multiple_of(ancilla_dim) {
        return Err(QuantumError::NotFactorizable { dim, ancilla_dim });
    }
    let sys = dim / ancilla_dim;
    Ok(CMatrix::from_fn(sys, sys, |i, j| {
        (0..ancilla_dim).fold(num_complex::Complex::new(T::zero(), T::zero()), |acc, b| {
            acc + op[(i * ancilla_dim + b, j * ancilla_dim + b)]
        })
    }))
}

/// Effects on the system induced by a joint projective measurement with the
/// ancilla prepared in `ancilla`: `Q_k = Tr_B[(I_A ⊗ ρ_B) E_k]`.
pub fn povm_from_dilation<T: Scalar>(
    joint: &ProjectiveMeasurement<T>,
    ancilla: &DensityOperator<T>,
) -> Result<Povm<T>, QuantumError> {
    let d_b = ancilla.dim();
    let dim = joint.dim();
    if !dim.is_multiple_of(d_b) || dim / d_b < 2 {
        return Err(QuantumError::NotFactorizable {
            dim,
            ancilla_dim: d_b,
        });
    }
    let lifted = CMatrix::identity(dim / d_b).kron(ancilla.matrix());
    let effects = joint
        .projectors()
        .iter()
        .map(|e| Effect::from_derived(partial_trace_b(&lifted.matmul(e.matrix()), d_b)?))
        .collect::<Result<Vec<_>, _>>()?;
    Povm::new(effects)
}
