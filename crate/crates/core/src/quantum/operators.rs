use super::state::{check_dim, hermitian_checked};
use super::{Ket, QuantumError};
use crate::linalg::CMatrix;
use crate::scalar::Scalar;

/// Orthogonal projector `P = P† = P²`.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
#[serde(bound(serialize = "T: serde::Serialize"))]
pub struct Projector<T> {
    matrix: CMatrix<T>,
    rank: usize,
}

impl<T: Scalar> Projector<T> {
    pub fn new(matrix: CMatrix<T>) -> Result<Self, QuantumError> {
        let matrix = hermitian_checked(matrix, T::assembly_tol())?;
        Self::from_hermitian(matrix)
    }

    /// For projectors assembled through derived algebra (e.g. `U P U†`).
    pub fn from_derived(matrix: CMatrix<T>) -> Result<Self, QuantumError> {
        let matrix = hermitian_checked(matrix, T::algebra_tol())?;
        Self::from_hermitian(matrix)
    }

    fn from_hermitian(matrix: CMatrix<T>) -> Result<Self, QuantumError> {
        let defect = matrix.matmul(&matrix).max_abs_diff(&matrix);
        if defect > T::algebra_tol() {
            return Err(QuantumError::NotIdempotent {
                defect: defect.to_f64_lossy(),
            });
        }
        let rank = matrix.trace().re.round().to_usize().unwrap_or(0);
        Ok(Self { matrix, rank })
    }

    /// Rank-one projector `|ψ⟩⟨ψ|`.
    pub fn from_ket(ket: &Ket<T>) -> Self {
        Self {
            matrix: ket.outer(),
            rank: 1,
        }
    }

    /// Projector onto the span of orthonormal kets.
    pub fn from_orthonormal(kets: &[Ket<T>]) -> Result<Self, QuantumError> {
        let first = kets.first().ok_or(QuantumError::Empty)?;
        let dim = first.dim();
        let mut matrix = CMatrix::zeros(dim, dim);
        for ket in kets {
            if ket.dim() != dim {
                return Err(QuantumError::DimensionMismatch {
                    expected: dim,
                    found: ket.dim(),
                });
            }
            matrix = &matrix + &ket.outer();
        }
        Self::from_derived(matrix)
    }

    pub fn identity(dim: usize) -> Result<Self, QuantumError> {
        check_dim(dim)?;
        Ok(Self {
            matrix: CMatrix::identity(dim),
            rank: dim,
        })
    }

    pub(crate) fn from_trusted(matrix: CMatrix<T>, rank: usize) -> Self {
        Self { matrix, rank }
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// `I - P`.
    pub fn complement(&self) -> Self {
        Self {
            matrix: &CMatrix::identity(self.dim()) - &self.matrix,
            rank: self.dim() - self.rank,
        }
    }
}

/// Complete set of mutually orthogonal projectors.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
#[serde(bound(serialize = "T: serde::Serialize"))]
#[serde(transparent)]
pub struct ProjectiveMeasurement<T> {
    projectors: Vec<Projector<T>>,
}

impl<T: Scalar> ProjectiveMeasurement<T> {
    pub fn new(projectors: Vec<Projector<T>>) -> Result<Self, QuantumError> {
        let dim = common_dim(projectors.iter().map(Projector::dim))?;
        let tol = T::algebra_tol();
        for i in 0..projectors.len() {
            for j in (i + 1)..projectors.len() {
                let defect = projectors[i]
                    .matrix
                    .matmul(&projectors[j].matrix)
                    .max_abs_diff(&CMatrix::zeros(dim, dim));
                if defect > tol {
                    return Err(QuantumError::NotOrthogonal {
                        i,
                        j,
                        defect: defect.to_f64_lossy(),
                    });
                }
            }
        }
        let sum = projectors
            .iter()
            .fold(CMatrix::zeros(dim, dim), |acc, p| &acc + &p.matrix);
        let defect = sum.max_abs_diff(&CMatrix::identity(dim));
        if defect > tol {
            return Err(QuantumError::Incomplete {
                defect: defect.to_f64_lossy(),
            });
        }
        Ok(Self { projectors })
    }

    /// Rank-one measurement in an orthonormal basis.
    pub fn from_basis(basis: &[Ket<T>]) -> Result<Self, QuantumError> {
        Self::new(basis.iter().map(Projector::from_ket).collect())
    }

    pub fn computational(dim: usize) -> Result<Self, QuantumError> {
        let basis = (0..dim)
            .map(|k| Ket::basis(dim, k))
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_basis(&basis)
    }

    pub fn projectors(&self) -> &[Projector<T>] {
        &self.projectors
    }

    pub fn dim(&self) -> usize {
        self.projectors[0].dim()
    }

    pub fn len(&self) -> usize {
        self.projectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projectors.is_empty()
    }
}

/// Positive operator bounded by the identity.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
#[serde(bound(serialize = "T: serde::Serialize"))]
#[serde(transparent)]
pub struct Effect<T> {
    matrix: CMatrix<T>,
}

impl<T: Scalar> Effect<T> {
    pub fn new(matrix: CMatrix<T>) -> Result<Self, QuantumError> {
        Self::validated(matrix, T::assembly_tol())
    }

    pub fn from_derived(matrix: CMatrix<T>) -> Result<Self, QuantumError> {
        Self::validated(matrix, T::algebra_tol())
    }

    fn validated(matrix: CMatrix<T>, herm_tol: T) -> Result<Self, QuantumError> {
        let matrix = hermitian_checked(matrix, herm_tol)?;
        let eig = matrix.hermitian_eigenvalues();
        let (min, max) = (eig[0], eig[eig.len() - 1]);
        if min < -T::algebra_tol() {
            return Err(QuantumError::NotPositive {
                min_eigenvalue: min.to_f64_lossy(),
            });
        }
        if max > T::one() + T::algebra_tol() {
            return Err(QuantumError::ExceedsIdentity {
                max_eigenvalue: max.to_f64_lossy(),
            });
        }
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }
}

impl<T: Scalar> From<&Projector<T>> for Effect<T> {
    fn from(p: &Projector<T>) -> Self {
        Self {
            matrix: p.matrix.clone(),
        }
    }
}

/// Effects summing to the identity.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
#[serde(bound(serialize = "T: serde::Serialize"))]
#[serde(transparent)]
pub struct Povm<T> {
    effects: Vec<Effect<T>>,
}

impl<T: Scalar> Povm<T> {
    pub fn new(effects: Vec<Effect<T>>) -> Result<Self, QuantumError> {
        let dim = common_dim(effects.iter().map(Effect::dim))?;
        let sum = effects
            .iter()
            .fold(CMatrix::zeros(dim, dim), |acc, e| &acc + &e.matrix);
        let defect = sum.max_abs_diff(&CMatrix::identity(dim));
        if defect > T::algebra_tol() {
            return Err(QuantumError::Incomplete {
                defect: defect.to_f64_lossy(),
            });
        }
        Ok(Self { effects })
    }

    pub fn effects(&self) -> &[Effect<T>] {
        &self.effects
    }

    pub fn dim(&self) -> usize {
        self.effects[0].dim()
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }
}

impl<T: Scalar> From<&ProjectiveMeasurement<T>> for Povm<T> {
    fn from(m: &ProjectiveMeasurement<T>) -> Self {
        Self {
            effects: m.projectors.iter().map(Effect::from).collect(),
        }
    }
}

fn common_dim(mut dims: impl Iterator<Item = usize>) -> Result<usize, QuantumError> {
    let dim = dims.next().ok_or(QuantumError::Empty)?;
    for found in dims {
        if found != dim {
            return Err(QuantumError::DimensionMismatch {
                expected: dim,
                found,
            });
        }
    }
    Ok(dim)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex;

    #[test]
    fn rejects_non_idempotent_matrix() {
        let m = CMatrix::from_real_diagonal(&[0.5, 1.0]);
        assert!(matches!(
            Projector::new(m),
            Err(QuantumError::NotIdempotent { .. })
        ));
    }

    #[test]
    fn measurement_requires_completeness_and_orthogonality() {
        let p0 = Projector::from_ket(&Ket::<f64>::basis(3, 0).unwrap());
        let p1 = Projector::from_ket(&Ket::basis(3, 1).unwrap());
        assert!(matches!(
            ProjectiveMeasurement::new(vec![p0.clone(), p1.clone()]),
            Err(QuantumError::Incomplete { .. })
        ));
        let plus = Ket::from_real(&[1.0, 1.0, 0.0]).unwrap();
        assert!(matches!(
            ProjectiveMeasurement::new(vec![p0.clone(), Projector::from_ket(&plus)]),
            Err(QuantumError::NotOrthogonal { i: 0, j: 1, .. })
        ));
        let rest = p0.complement();
        assert_eq!(rest.rank(), 2);
        assert!(ProjectiveMeasurement::new(vec![p0, rest]).is_ok());
    }

    #[test]
    fn effect_bounds() {
        assert!(matches!(
            Effect::new(CMatrix::from_real_diagonal(&[1.2, 0.0])),
            Err(QuantumError::ExceedsIdentity { .. })
        ));
        assert!(matches!(
            Effect::new(CMatrix::from_real_diagonal(&[-0.1, 0.0])),
            Err(QuantumError::NotPositive { .. })
        ));
        let zero = Effect::new(CMatrix::<f64>::zeros(2, 2)).unwrap();
        let id = Effect::new(CMatrix::identity(2)).unwrap();
        assert!(Povm::new(vec![zero, id]).is_ok());
    }

    #[test]
    fn projector_from_complex_ket_is_hermitian() {
        let ket = Ket::normalized(vec![Complex::new(1.0, 0.0), Complex::new(0.0, 1.0)]).unwrap();
        let p = Projector::new(ket.outer()).unwrap();
        assert_eq!(p.rank(), 1);
    }
}
