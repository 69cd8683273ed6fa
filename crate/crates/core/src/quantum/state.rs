use num_complex::Complex;
use num_traits::Zero;

use super::{Projector, QuantumError};
use crate::linalg::{self, CMatrix};
use crate::scalar::Scalar;

/// Normalized state vector of dimension `d >= 2`.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
#[serde(bound(serialize = "T: serde::Serialize"))]
#[serde(transparent)]
pub struct Ket<T> {
    amplitudes: Vec<Complex<T>>,
}

impl<T: Scalar> Ket<T> {
    /// Wraps amplitudes that are already normalized (to the assembly tolerance).
    pub fn new(amplitudes: Vec<Complex<T>>) -> Result<Self, QuantumError> {
        check_dim(amplitudes.len())?;
        let norm = linalg::norm_sqr(&amplitudes);
        if (norm - T::one()).abs() > T::assembly_tol() {
            return Err(QuantumError::NotNormalized {
                norm_sqr: norm.to_f64_lossy(),
            });
        }
        Ok(Self { amplitudes })
    }

    /// Normalizes arbitrary nonzero amplitudes.
    pub fn normalized(amplitudes: Vec<Complex<T>>) -> Result<Self, QuantumError> {
        check_dim(amplitudes.len())?;
        let norm = linalg::norm_sqr(&amplitudes).sqrt();
        if norm <= T::assembly_tol() {
            return Err(QuantumError::ZeroVector);
        }
        Ok(Self {
            amplitudes: amplitudes.into_iter().map(|z| z.unscale(norm)).collect(),
        })
    }

    pub fn from_real(components: &[T]) -> Result<Self, QuantumError> {
        Self::normalized(
            components
                .iter()
                .map(|&x| Complex::new(x, T::zero()))
                .collect(),
        )
    }

    /// Computational basis vector `|k⟩`.
    pub fn basis(dim: usize, k: usize) -> Result<Self, QuantumError> {
        check_dim(dim)?;
        if k >= dim {
            return Err(QuantumError::IndexOutOfRange { index: k, dim });
        }
        let mut amplitudes = vec![Complex::zero(); dim];
        amplitudes[k] = Complex::new(T::one(), T::zero());
        Ok(Self { amplitudes })
    }

    /// Skips validation; callers guarantee the norm (e.g. tensor products).
    pub(crate) fn from_trusted(amplitudes: Vec<Complex<T>>) -> Self {
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn inner(&self, other: &Self) -> Complex<T> {
        linalg::inner(&self.amplitudes, &other.amplitudes)
    }

    /// `|ψ⟩⟨ψ|` as a raw matrix.
    pub fn outer(&self) -> CMatrix<T> {
        CMatrix::outer(&self.amplitudes, &self.amplitudes)
    }

    pub fn projector(&self) -> Projector<T> {
        Projector::from_ket(self)
    }

    pub fn density(&self) -> DensityOperator<T> {
        DensityOperator::pure(self)
    }

    pub fn ray(&self) -> Ray<T> {
        Ray::from_ket(self)
    }
}

/// A ket modulo global phase. The representative has its first amplitude
/// above `1e-12` in modulus made real and positive.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
#[serde(bound(serialize = "T: serde::Serialize"))]
#[serde(transparent)]
pub struct Ray<T> {
    representative: Ket<T>,
}

impl<T: Scalar> Ray<T> {
    pub fn from_ket(ket: &Ket<T>) -> Self {
        let threshold = T::lit(1e-12);
        let lead = ket
            .amplitudes
            .iter()
            .find(|z| z.norm() > threshold)
            .copied()
            .unwrap_or_else(|| Complex::new(T::one(), T::zero()));
        let phase = lead.conj().unscale(lead.norm());
        Self {
            representative: Ket::from_trusted(ket.amplitudes.iter().map(|&z| z * phase).collect()),
        }
    }

    pub fn ket(&self) -> &Ket<T> {
        &self.representative
    }

    pub fn dim(&self) -> usize {
        self.representative.dim()
    }

    pub fn projector(&self) -> Projector<T> {
        Projector::from_ket(&self.representative)
    }

    /// Entrywise comparison of the gauge-fixed representatives.
    pub fn approx_eq(&self, other: &Self, tol: T) -> bool {
        self.dim() == other.dim()
            && self
                .representative
                .amplitudes
                .iter()
                .zip(&other.representative.amplitudes)
                .all(|(a, b)| (a - b).norm() <= tol)
    }

    /// `|⟨ψ|φ⟩|²`.
    pub fn fidelity(&self, other: &Self) -> T {
        self.representative.inner(&other.representative).norm_sqr()
    }
}

impl<T: Scalar> From<Ket<T>> for Ray<T> {
    fn from(ket: Ket<T>) -> Self {
        Ray::from_ket(&ket)
    }
}

/// Positive semidefinite, trace-one Hermitian operator.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
#[serde(bound(serialize = "T: serde::Serialize"))]
#[serde(transparent)]
pub struct DensityOperator<T> {
    matrix: CMatrix<T>,
}

impl<T: Scalar> DensityOperator<T> {
    pub fn new(matrix: CMatrix<T>) -> Result<Self, QuantumError> {
        Self::validated(matrix, T::assembly_tol())
    }

    /// Validation for operators obtained through several products, where
    /// Hermiticity is only expected at the derived-algebra tolerance.
    pub fn from_derived(matrix: CMatrix<T>) -> Result<Self, QuantumError> {
        Self::validated(matrix, T::algebra_tol())
    }

    fn validated(matrix: CMatrix<T>, herm_tol: T) -> Result<Self, QuantumError> {
        let matrix = hermitian_checked(matrix, herm_tol)?;
        let trace = matrix.trace().re;
        if (trace - T::one()).abs() > T::assembly_tol().max(herm_tol) {
            return Err(QuantumError::TraceNotOne {
                trace: trace.to_f64_lossy(),
            });
        }
        let min = matrix.hermitian_eigenvalues()[0];
        if min < -T::algebra_tol() {
            return Err(QuantumError::NotPositive {
                min_eigenvalue: min.to_f64_lossy(),
            });
        }
        Ok(Self { matrix })
    }

    pub fn pure(ket: &Ket<T>) -> Self {
        Self {
            matrix: ket.outer(),
        }
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self, QuantumError> {
        check_dim(dim)?;
        Ok(Self {
            matrix: CMatrix::identity(dim).scale_real(T::one() / T::from_usize(dim).unwrap()),
        })
    }

    /// Convex mixture `Σ w_i |ψ_i⟩⟨ψ_i|`; weights must be nonnegative and sum to one.
    pub fn mixture(components: &[(T, Ket<T>)]) -> Result<Self, QuantumError> {
        let first = components.first().ok_or(QuantumError::Empty)?;
        let dim = first.1.dim();
        let mut matrix = CMatrix::zeros(dim, dim);
        let mut total = T::zero();
        for (w, ket) in components {
            if ket.dim() != dim {
                return Err(QuantumError::DimensionMismatch {
                    expected: dim,
                    found: ket.dim(),
                });
            }
            if *w < T::zero() {
                return Err(QuantumError::NegativeWeight {
                    weight: w.to_f64_lossy(),
                });
            }
            matrix = &matrix + &ket.outer().scale_real(*w);
            total = total + *w;
        }
        if (total - T::one()).abs() > T::assembly_tol() {
            return Err(QuantumError::TraceNotOne {
                trace: total.to_f64_lossy(),
            });
        }
        Ok(Self { matrix })
    }

    pub(crate) fn from_trusted(matrix: CMatrix<T>) -> Self {
        Self { matrix }
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn eigenvalues(&self) -> Vec<T> {
        self.matrix.hermitian_eigenvalues()
    }

    /// `Tr[ρ²]`.
    pub fn purity(&self) -> T {
        self.matrix.trace_product(&self.matrix).re
    }
}

pub(crate) fn check_dim(dim: usize) -> Result<(), QuantumError> {
    if dim < 2 {
        Err(QuantumError::DimensionTooSmall(dim))
    } else {
        Ok(())
    }
}

/// Checks squareness, dimension and Hermiticity, then returns `(M + M†)/2`.
pub(crate) fn hermitian_checked<T: Scalar>(
    matrix: CMatrix<T>,
    tol: T,
) -> Result<CMatrix<T>, QuantumError> {
    if !matrix.is_square() {
        return Err(QuantumError::NotSquare {
            rows: matrix.rows(),
            cols: matrix.cols(),
        });
    }
    check_dim(matrix.rows())?;
    let defect = matrix.hermiticity_defect();
    if defect > tol {
        return Err(QuantumError::NotHermitian {
            defect: defect.to_f64_lossy(),
        });
    }
    Ok(matrix.hermitian_part())
}
