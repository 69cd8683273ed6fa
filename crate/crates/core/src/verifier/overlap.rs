//! Common support of the preparations of two states.

use std::f64::consts::PI;

use serde::Serialize;

use crate::ontic::{
    monte_carlo_mean, Method, OnticDistribution, OnticSpace, OnticState, OntologicalModel,
    FALLBACK_SAMPLES, FALLBACK_SEED, POINT_TOL,
};
use crate::sphere::sample_uniform;
use crate::{BlochVector64, Ray64};

use super::VerifierError;

/// Overlap measures at or below this count as zero.
pub const OVERLAP_THRESHOLD: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OverlapClass {
    Disjoint,
    Overlapping,
}

/// Measure of the intersection of two supports. The reference measure is
/// counting measure for finite distributions and solid angle on the sphere.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OverlapReport {
    pub psi: Ray64,
    pub phi: Ray64,
    pub overlap_measure: f64,
    /// Measures of the two supports on their own.
    pub support_measures: [f64; 2],
    /// Overlap as a fraction of the whole ontic space, when that is finite.
    pub fraction: Option<f64>,
    /// Quadrature residual or Monte Carlo standard error of the measure.
    pub error: f64,
    pub reference_measure: String,
    pub classification: OverlapClass,
}

impl OverlapReport {
    fn new(
        psi: &Ray64,
        phi: &Ray64,
        measures: [f64; 3],
        total: Option<f64>,
        error: f64,
        reference: &str,
    ) -> Self {
        let [overlap, a, b] = measures;
        Self {
            psi: psi.clone(),
            phi: phi.clone(),
            overlap_measure: overlap,
            support_measures: [a, b],
            fraction: total.map(|t| overlap / t),
            error,
            reference_measure: reference.to_string(),
            classification: if overlap > OVERLAP_THRESHOLD {
                OverlapClass::Overlapping
            } else {
                OverlapClass::Disjoint
            },
        }
    }

    /// Whether the overlap is the whole of the smaller support.
    pub fn is_full(&self) -> bool {
        let smaller = self.support_measures[0].min(self.support_measures[1]);
        (self.overlap_measure - smaller).abs() <= OVERLAP_THRESHOLD.max(4.0 * self.error)
    }
}

/// Classifies the preparations of `ψ` and `φ` under the model's first
/// declared preparation context.
pub fn overlap_classify(
    model: &dyn OntologicalModel,
    psi: &Ray64,
    phi: &Ray64,
    method: Method,
) -> Result<OverlapReport, VerifierError> {
    let eta = model
        .preparation_contexts()
        .into_iter()
        .next()
        .unwrap_or_default();
    let a = model.prepare(psi, &eta)?;
    let b = model.prepare(phi, &eta)?;
    match (&a, &b) {
        (OnticDistribution::Atoms(_), OnticDistribution::Atoms(_)) => {
            let sa = a.support_atoms().expect("atoms");
            let sb = b.support_atoms().expect("atoms");
            let common = sa
                .iter()
                .filter(|x| sb.iter().any(|y| x.same_point(y, POINT_TOL)))
                .count();
            let total = model.ontic_states().map(|s| s.len() as f64);
            Ok(OverlapReport::new(
                psi,
                phi,
                [common as f64, sa.len() as f64, sb.len() as f64],
                total,
                0.0,
                "counting",
            ))
        }
        _ if model.space() == OnticSpace::BlochSphere => {
            let normals: Vec<BlochVector64> = [&a, &b]
                .iter()
                .filter_map(|d| match d {
                    OnticDistribution::CosineHemisphere { axis } => Some(*axis),
                    _ => None,
                })
                .collect();
            let exact = normals.len() == 2;
            let indicator = |v: &BlochVector64, which: u8| {
                let x = OnticState::BlochPoint(*v);
                let ia = a.in_support(&x);
                let ib = b.in_support(&x);
                let hit = match which {
                    0 => ia && ib,
                    1 => ia,
                    _ => ib,
                };
                if hit {
                    1.0
                } else {
                    0.0
                }
            };
            let mut measures = [0.0; 3];
            let mut error: f64 = 0.0;
            for (which, m) in measures.iter_mut().enumerate() {
                let which = which as u8;
                let (value, err) = match method {
                    Method::Quadrature(q) if exact => {
                        let r = q.integrate_across(&normals, &|v| indicator(v, which));
                        (r.value, r.residual)
                    }
                    Method::Quadrature(_) => {
                        uniform_mc(&indicator, which, FALLBACK_SAMPLES, FALLBACK_SEED)
                    }
                    Method::MonteCarlo { samples, seed } => {
                        uniform_mc(&indicator, which, samples, seed)
                    }
                };
                *m = value;
                error = error.max(err);
            }
            Ok(OverlapReport::new(
                psi,
                phi,
                measures,
                Some(4.0 * PI),
                error,
                "solid-angle",
            ))
        }
        _ => Err(VerifierError::OverlapUnsupported(model.name().to_string())),
    }
}

fn uniform_mc(
    indicator: &(dyn Fn(&BlochVector64, u8) -> f64 + Sync),
    which: u8,
    samples: usize,
    seed: u64,
) -> (f64, f64) {
    let stats = monte_carlo_mean::<std::convert::Infallible, _>(samples, seed, |rng| {
        Ok(indicator(&sample_uniform(rng), which))
    })
    .expect("infallible");
    (4.0 * PI * stats.mean, 4.0 * PI * stats.std_error)
}
