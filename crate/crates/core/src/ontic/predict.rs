//! `∫ dX P(E|X,τ) ρ(X|ψ,η)` by exact summation, sphere quadrature or
//! Monte Carlo.

use serde::Serialize;

use super::{
    check_event_dim, monte_carlo_mean, Event, MeasurementContext, ModelError, OnticDistribution,
    OnticState,
};
use super::{OntologicalModel, PreparationContext};
use crate::sphere::SphereQuadrature;
use crate::Ray64;

/// Sample count used when quadrature is requested for a distribution that
/// can only be sampled.
pub const FALLBACK_SAMPLES: usize = 100_000;
/// Seed for that fallback run.
pub const FALLBACK_SEED: u64 = 0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Quadrature(SphereQuadrature),
    MonteCarlo { samples: usize, seed: u64 },
}

impl Default for Method {
    fn default() -> Self {
        Method::Quadrature(SphereQuadrature::default())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EstimateKind {
    /// Finite sum over atoms.
    Exact,
    Quadrature {
        polar: usize,
        azimuth: usize,
    },
    MonteCarlo {
        samples: usize,
        seed: u64,
    },
}

/// A predicted probability with its error bound: zero for exact sums, the
/// doubled-order residual for quadrature, the standard error for Monte Carlo.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub kind: EstimateKind,
    pub notice: Option<String>,
}

pub fn predicted_probability(
    model: &dyn OntologicalModel,
    ray: &Ray64,
    eta: &PreparationContext,
    event: &Event,
    tau: &MeasurementContext,
    method: Method,
) -> Result<Estimate, ModelError> {
    check_event_dim(model, event)?;
    let dist = model.prepare(ray, eta)?;
    match (method, &dist) {
        (Method::Quadrature(_), OnticDistribution::Atoms(atoms)) => {
            let mut value = 0.0;
            for (x, w) in atoms {
                value += w * model.respond(event, x, tau)?;
            }
            Ok(Estimate {
                value,
                error: 0.0,
                kind: EstimateKind::Exact,
                notice: None,
            })
        }
        (Method::Quadrature(q), OnticDistribution::CosineHemisphere { axis }) => {
            let mut normals = vec![*axis];
            normals.extend(model.response_boundary(event));
            // responses are checked once up front so the integrand can be infallible
            model.respond(event, &OnticState::BlochPoint(*axis), tau)?;
            let integrand = |v: &crate::BlochVector64| {
                let x = OnticState::BlochPoint(*v);
                let d = dist.density(&x);
                if d == 0.0 {
                    0.0
                } else {
                    d * model.respond(event, &x, tau).unwrap_or(f64::NAN)
                }
            };
            let r = q.integrate_across(&normals, &integrand);
            Ok(Estimate {
                value: r.value,
                error: r.residual,
                kind: EstimateKind::Quadrature {
                    polar: q.polar,
                    azimuth: q.azimuth,
                },
                notice: None,
            })
        }
        (Method::Quadrature(_), OnticDistribution::Continuous(_)) => {
            let mut e = sampled(model, &dist, event, tau, FALLBACK_SAMPLES, FALLBACK_SEED)?;
            e.notice = Some(format!(
                "quadrature unavailable for the {} ontic space; fell back to Monte Carlo with n = {FALLBACK_SAMPLES}, seed = {FALLBACK_SEED}",
                model.name()
            ));
            Ok(e)
        }
        (Method::MonteCarlo { samples, seed }, _) => {
            sampled(model, &dist, event, tau, samples, seed)
        }
    }
}

fn sampled(
    model: &dyn OntologicalModel,
    dist: &OnticDistribution,
    event: &Event,
    tau: &MeasurementContext,
    samples: usize,
    seed: u64,
) -> Result<Estimate, ModelError> {
    let stats = monte_carlo_mean(samples, seed, |rng| {
        model.respond(event, &dist.sample(rng), tau)
    })?;
    Ok(Estimate {
        value: stats.mean,
        error: stats.std_error,
        kind: EstimateKind::MonteCarlo { samples, seed },
        notice: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ontic::{bb_model, ks_model, ContinuousDistribution};
    use crate::quantum::{born_probability, random};
    use crate::BlochVector64;
    use rand::{RngCore, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn ks_estimate(b: BlochVector64, c: BlochVector64, method: Method) -> Estimate {
        predicted_probability(
            &ks_model(),
            &b.to_ket().unwrap().ray(),
            &PreparationContext::default(),
            &Event::Projector(c.projector().unwrap()),
            &MeasurementContext::default(),
            method,
        )
        .unwrap()
    }

    #[test]
    fn ks_quadrature_gives_half_squared_cosine() {
        let b = BlochVector64::new(0.0, 0.0, 1.0);
        for alpha in [
            0.0,
            std::f64::consts::FRAC_PI_2,
            2.0 * std::f64::consts::PI / 3.0,
            std::f64::consts::PI,
        ] {
            let c = BlochVector64::from_angles(alpha, 0.3);
            let e = ks_estimate(b, c, Method::default());
            let expect = (alpha / 2.0).cos().powi(2);
            assert!(
                (e.value - expect).abs() < 1e-6,
                "alpha {alpha}: {} vs {expect}",
                e.value
            );
            assert!(e.error < 1e-6);
        }
    }

    #[test]
    fn ks_monte_carlo_within_three_errors() {
        let e = ks_estimate(
            BlochVector64::new(0.0, 0.0, 1.0),
            BlochVector64::new(1.0, 0.0, 0.0),
            Method::MonteCarlo {
                samples: 1_000_000,
                seed: 5,
            },
        );
        assert!((e.value - 0.5).abs() < 3.0 * e.error, "{e:?}");
        assert_eq!(
            e.kind,
            EstimateKind::MonteCarlo {
                samples: 1_000_000,
                seed: 5
            }
        );
    }

    #[test]
    fn bb_prediction_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = bb_model(3).unwrap();
        for _ in 0..20 {
            let psi = random::random_ket::<f64, _>(&mut rng, 3);
            let p = random::random_projector::<f64, _>(&mut rng, 3);
            let e = predicted_probability(
                &m,
                &psi.ray(),
                &PreparationContext::default(),
                &Event::Projector(p.clone()),
                &MeasurementContext::default(),
                Method::default(),
            )
            .unwrap();
            assert_eq!(e.kind, EstimateKind::Exact);
            assert!((e.value - born_probability(&psi, &p).unwrap()).abs() < 1e-15);
        }
    }

    #[derive(Debug)]
    struct Uniform;

    impl ContinuousDistribution for Uniform {
        fn density(&self, _: &OnticState) -> f64 {
            0.25 / std::f64::consts::PI
        }

        fn sample(&self, rng: &mut dyn RngCore) -> OnticState {
            OnticState::BlochPoint(crate::sphere::sample_uniform(rng))
        }
    }

    struct UniformKs;

    impl OntologicalModel for UniformKs {
        fn name(&self) -> &str {
            "uniform"
        }
        fn dim(&self) -> usize {
            2
        }
        fn space(&self) -> crate::ontic::OnticSpace {
            crate::ontic::OnticSpace::BlochSphere
        }
        fn flags(&self) -> crate::ontic::ModelFlags {
            ks_model().flags()
        }
        fn prepare(
            &self,
            _: &Ray64,
            _: &PreparationContext,
        ) -> Result<OnticDistribution, ModelError> {
            Ok(OnticDistribution::Continuous(Arc::new(Uniform)))
        }
        fn respond(
            &self,
            e: &Event,
            x: &OnticState,
            t: &MeasurementContext,
        ) -> Result<f64, ModelError> {
            ks_model().respond(e, x, t)
        }
    }

    #[test]
    fn continuous_distribution_falls_back_with_notice() {
        let e = predicted_probability(
            &UniformKs,
            &crate::Ket64::basis(2, 0).unwrap().ray(),
            &PreparationContext::default(),
            &Event::Projector(crate::Ket64::basis(2, 0).unwrap().projector()),
            &MeasurementContext::default(),
            Method::default(),
        )
        .unwrap();
        assert!(e.notice.as_deref().unwrap().contains("fell back"));
        assert!((e.value - 0.5).abs() < 4.0 * e.error);
    }

    #[test]
    fn event_dimension_is_checked() {
        let r = predicted_probability(
            &bb_model(3).unwrap(),
            &crate::Ket64::basis(3, 0).unwrap().ray(),
            &PreparationContext::default(),
            &Event::Projector(crate::Ket64::basis(2, 0).unwrap().projector()),
            &MeasurementContext::default(),
            Method::default(),
        );
        assert!(matches!(r, Err(ModelError::DimensionMismatch { .. })));
    }
}
