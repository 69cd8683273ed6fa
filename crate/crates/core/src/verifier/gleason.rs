//! Least-squares fit of a response function to the trace form `Tr[E ρ]`.

use num_complex::Complex;
use serde::Serialize;

use super::VerifierError;
use crate::linalg::symmetric_solve;
use crate::{CMatrix64, Projector64};

/// Normal equations with a larger spectral condition number are rejected.
pub const MAX_CONDITION: f64 = 1e8;

/// Result of [`gleason_fit`]. The fitted operator is Hermitian with unit
/// trace; positivity is reported through `min_eigenvalue`, not imposed.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitResult {
    pub fitted_rho: CMatrix64,
    /// Root-mean-square gap between observed and fitted probabilities.
    pub residual: f64,
    pub sample_count: usize,
    pub min_eigenvalue: f64,
    pub condition: f64,
}

impl FitResult {
    /// Largest entrywise gap between the fitted operator and `target`.
    pub fn deviation_from(&self, target: &CMatrix64) -> f64 {
        self.fitted_rho.max_abs_diff(target)
    }
}

/// Generalized Gell-Mann matrices: `d² − 1` traceless Hermitian operators,
/// orthogonal with `Tr[G_a G_b] = 2δ_ab`.
pub fn traceless_hermitian_basis(dim: usize) -> Vec<CMatrix64> {
    let mut basis = Vec::with_capacity(dim * dim - 1);
    for j in 0..dim {
        for k in j + 1..dim {
            let mut s = CMatrix64::zeros(dim, dim);
            s[(j, k)] = Complex::new(1.0, 0.0);
            s[(k, j)] = Complex::new(1.0, 0.0);
            basis.push(s);
            let mut a = CMatrix64::zeros(dim, dim);
            a[(j, k)] = Complex::new(0.0, -1.0);
            a[(k, j)] = Complex::new(0.0, 1.0);
            basis.push(a);
        }
    }
    for l in 1..dim {
        let scale = (2.0 / (l * (l + 1)) as f64).sqrt();
        let mut diag = vec![0.0; dim];
        for d in diag.iter_mut().take(l) {
            *d = scale;
        }
        diag[l] = -(l as f64) * scale;
        basis.push(CMatrix64::from_real_diagonal(&diag));
    }
    basis
}

/// Fits `P(E) ≈ Tr[E ρ]` with `ρ = I/d + Σ x_a G_a` by linear least squares.
///
/// Fails when the projectors do not span the traceless Hermitian operators
/// (rank of the design matrix below `d² − 1`) or when the normal equations
/// are too ill-conditioned to trust.
pub fn gleason_fit(samples: &[(Projector64, f64)], dim: usize) -> Result<FitResult, VerifierError> {
    if dim < 2 {
        return Err(crate::quantum::QuantumError::DimensionTooSmall(dim).into());
    }
    if let Some((index, (p, _))) = samples
        .iter()
        .enumerate()
        .find(|(_, (p, _))| p.dim() != dim)
    {
        return Err(VerifierError::SampleDimension {
            index,
            expected: dim,
            found: p.dim(),
        });
    }
    let basis = traceless_hermitian_basis(dim);
    let n = basis.len();
    let inv_d = 1.0 / dim as f64;
    // design row i: Tr[E_i G_a]; target: p_i − Tr[E_i]/d
    let design: Vec<Vec<f64>> = samples
        .iter()
        .map(|(p, _)| {
            basis
                .iter()
                .map(|g| p.matrix().trace_product(g).re)
                .collect()
        })
        .collect();
    let targets: Vec<f64> = samples
        .iter()
        .map(|(p, y)| y - p.rank() as f64 * inv_d)
        .collect();

    let mut normal = CMatrix64::zeros(n, n);
    let mut rhs = vec![0.0; n];
    for (row, t) in design.iter().zip(&targets) {
        for a in 0..n {
            rhs[a] += row[a] * t;
            for b in 0..n {
                normal[(a, b)].re += row[a] * row[b];
            }
        }
    }
    let (x, rank, condition) = symmetric_solve(&normal, &rhs, 1e-12);
    if rank < n {
        return Err(VerifierError::RankDeficient { rank, needed: n });
    }
    if condition > MAX_CONDITION {
        return Err(VerifierError::IllConditioned { condition });
    }

    let mut rho = CMatrix64::identity(dim).scale_real(inv_d);
    for (g, xa) in basis.iter().zip(&x) {
        rho = &rho + &g.scale_real(*xa);
    }
    let sse: f64 = design
        .iter()
        .zip(&targets)
        .map(|(row, t)| {
            let fit: f64 = row.iter().zip(&x).map(|(r, xa)| r * xa).sum();
            (fit - t).powi(2)
        })
        .sum();
    let residual = (sse / samples.len() as f64).sqrt();
    let min_eigenvalue = rho.hermitian_eigenvalues()[0];
    Ok(FitResult {
        fitted_rho: rho,
        residual,
        sample_count: samples.len(),
        min_eigenvalue,
        condition,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ontic::{
        bb_model, ks_model, Event, MeasurementContext, OnticState, OntologicalModel,
    };
    use crate::quantum::random;
    use crate::BlochVector64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn basis_is_traceless_and_orthogonal() {
        for d in 2..5 {
            let b = traceless_hermitian_basis(d);
            assert_eq!(b.len(), d * d - 1);
            for (i, g) in b.iter().enumerate() {
                assert!(g.trace().norm() < 1e-15);
                assert_eq!(g.hermiticity_defect(), 0.0);
                for (j, h) in b.iter().enumerate() {
                    let ip = g.trace_product(h);
                    let expect = if i == j { 2.0 } else { 0.0 };
                    assert!((ip.re - expect).abs() < 1e-12 && ip.im.abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn recovers_generating_density() {
        let mut rng = ChaCha8Rng::seed_from_u64(30);
        let rho0 = random::random_density::<f64, _>(&mut rng, 3);
        let samples: Vec<_> = (0..100)
            .map(|_| {
                let p = random::random_projector(&mut rng, 3);
                let y = p.matrix().trace_product(rho0.matrix()).re;
                (p, y)
            })
            .collect();
        let fit = gleason_fit(&samples, 3).unwrap();
        assert!(fit.residual < 1e-10);
        assert!(fit.deviation_from(rho0.matrix()) < 1e-10);
        assert!((fit.fitted_rho.trace().re - 1.0).abs() < 1e-10);
        assert!(fit.min_eigenvalue > -1e-10);
    }

    #[test]
    fn bb_response_is_trace_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let x = random::random_ket::<f64, _>(&mut rng, 3).ray();
        let m = bb_model(3).unwrap();
        let samples: Vec<_> = (0..100)
            .map(|_| {
                let p = random::random_projector(&mut rng, 3);
                let y = m
                    .respond(
                        &Event::Projector(p.clone()),
                        &OnticState::RayPoint(x.clone()),
                        &MeasurementContext::default(),
                    )
                    .unwrap();
                (p, y)
            })
            .collect();
        let fit = gleason_fit(&samples, 3).unwrap();
        assert!(fit.deviation_from(&x.ket().outer()) < 1e-10);
    }

    #[test]
    fn ks_response_is_not_trace_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let v = OnticState::BlochPoint(BlochVector64::new(0.0, 0.0, 1.0));
        let samples: Vec<_> = (0..200)
            .map(|_| {
                let p = random::random_projector(&mut rng, 2);
                let y = ks_model()
                    .respond(
                        &Event::Projector(p.clone()),
                        &v,
                        &MeasurementContext::default(),
                    )
                    .unwrap();
                (p, y)
            })
            .collect();
        let fit = gleason_fit(&samples, 2).unwrap();
        assert!(fit.residual > 0.05, "residual {}", fit.residual);
    }

    #[test]
    fn too_few_projectors_are_rank_deficient() {
        let samples: Vec<_> = (0..3)
            .map(|k| (crate::Ket64::basis(3, k).unwrap().projector(), 1.0 / 3.0))
            .collect();
        assert!(matches!(
            gleason_fit(&samples, 3),
            Err(VerifierError::RankDeficient { rank: 2, needed: 8 })
        ));
    }
}
