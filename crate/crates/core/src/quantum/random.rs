//! Haar-random states, bases and measurements for test batteries.

use num_complex::Complex;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{DensityOperator, Ket, ProjectiveMeasurement, Projector};
use crate::linalg::{self, CMatrix};
use crate::scalar::Scalar;

fn gaussian_vector<T: Scalar, R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<Complex<T>> {
    (0..dim)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex::new(T::lit(re), T::lit(im))
        })
        .collect()
}

/// Haar-distributed pure state.
pub fn random_ket<T: Scalar, R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Ket<T> {
    loop {
        if let Ok(k) = Ket::normalized(gaussian_vector(rng, dim)) {
            return k;
        }
    }
}

/// Haar-random orthonormal basis via Gram-Schmidt on Gaussian vectors.
pub fn random_basis<T: Scalar, R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<Ket<T>> {
    let mut basis: Vec<Ket<T>> = Vec::with_capacity(dim);
    while basis.len() < dim {
        let mut v = gaussian_vector::<T, R>(rng, dim);
        // two passes keep orthogonality at roundoff level
        for _ in 0..2 {
            for b in &basis {
                let overlap = linalg::inner(b.amplitudes(), &v);
                for (vi, bi) in v.iter_mut().zip(b.amplitudes()) {
                    *vi = *vi - bi * overlap;
                }
            }
        }
        if let Ok(k) = Ket::normalized(v) {
            basis.push(k);
        }
    }
    basis
}

/// Rank-one measurement in a Haar-random basis.
pub fn random_measurement<T: Scalar, R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
) -> ProjectiveMeasurement<T> {
    let basis = random_basis(rng, dim);
    ProjectiveMeasurement::from_basis(&basis).expect("Gram-Schmidt basis is orthonormal")
}

/// Random complete measurement whose projectors group a random basis into
/// blocks of random sizes (so ranks above one occur).
pub fn random_coarse_measurement<T: Scalar, R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
) -> ProjectiveMeasurement<T> {
    let basis = random_basis(rng, dim);
    let mut projectors = Vec::new();
    let mut start = 0;
    while start < dim {
        let size = rng.random_range(1..=dim - start);
        projectors.push(
            Projector::from_orthonormal(&basis[start..start + size]).expect("orthonormal block"),
        );
        start += size;
    }
    ProjectiveMeasurement::new(projectors).expect("blocks of a basis form a measurement")
}

pub fn random_projector<T: Scalar, R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Projector<T> {
    Projector::from_ket(&random_ket(rng, dim))
}

/// Full-rank random density operator `G G† / Tr[G G†]` (Ginibre ensemble).
pub fn random_density<T: Scalar, R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DensityOperator<T> {
    let g = CMatrix::from_row_major(dim, dim, gaussian_vector(rng, dim * dim)).expect("square");
    let w = g.matmul(&g.adjoint());
    let tr = w.trace().re;
    DensityOperator::from_derived(w.scale_real(T::one() / tr).hermitian_part())
        .expect("Ginibre matrix is a valid state")
}

/// Random trace-one Hermitian operator that need not be positive.
pub fn random_hermitian_trace_one<T: Scalar, R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
) -> CMatrix<T> {
    let g = CMatrix::from_row_major(dim, dim, gaussian_vector(rng, dim * dim)).expect("square");
    let mut h = g.hermitian_part();
    let shift = (T::one() - h.trace().re) / T::from_usize(dim).unwrap();
    for i in 0..dim {
        h[(i, i)] = h[(i, i)] + Complex::new(shift, T::zero());
    }
    h
}
