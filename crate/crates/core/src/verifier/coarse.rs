//! Quotient of a finite ontic space by the rays its states carry.

use num_complex::Complex;

use crate::ontic::{
    check_ray_dim, fmt_amplitudes, ray_expectation, Event, MeasurementContext, ModelError,
    ModelFlags, OnticDistribution, OnticSpace, OnticState, OntologicalModel, PreparationContext,
    POINT_TOL,
};
use crate::{Ket64, Projector64, Ray64};

use super::VerifierError;

/// Responses inside a class must agree to this tolerance.
pub const CLASS_TOL: f64 = 1e-12;

/// The ontic states carrying one ray.
#[derive(Clone, Debug, PartialEq)]
pub struct CoarseClass {
    pub class_ray: Ray64,
    pub member_states: Vec<OnticState>,
}

/// Rank-one projectors onto `e_j`, `(e_j + e_k)/√2` and `(e_j + i e_k)/√2`:
/// `d²` operators spanning the Hermitian matrices.
pub fn informationally_complete_battery(dim: usize) -> Vec<Projector64> {
    let one = Complex::new(1.0, 0.0);
    let mut out = Vec::with_capacity(dim * dim);
    let ket = |entries: &[(usize, Complex<f64>)]| {
        let mut v = vec![Complex::new(0.0, 0.0); dim];
        for &(i, z) in entries {
            v[i] = z;
        }
        Ket64::normalized(v).expect("nonzero").projector()
    };
    for j in 0..dim {
        out.push(ket(&[(j, one)]));
    }
    for j in 0..dim {
        for k in j + 1..dim {
            out.push(ket(&[(j, one), (k, one)]));
            out.push(ket(&[(j, one), (k, Complex::new(0.0, 1.0))]));
        }
    }
    out
}

/// Partitions the model's ontic states by ray and returns the classes with
/// the quotient model, whose ontic states are the class rays.
///
/// The model must list its ontic states, each carrying a ray. Within a class
/// every member must respond identically on an informationally complete
/// projector battery and agree with `⟨ψ|E|ψ⟩` for the class ray `ψ`; with
/// trace-form responses this fixes the response to every event. Preparation
/// supports over all declared contexts must stay inside their class.
pub fn coarse_grain(
    model: &dyn OntologicalModel,
) -> Result<(Vec<CoarseClass>, QuotientModel), VerifierError> {
    let states = model
        .ontic_states()
        .ok_or_else(|| VerifierError::NotDiscrete(model.name().to_string()))?;
    let mut classes: Vec<CoarseClass> = Vec::new();
    for x in states {
        let ray = x
            .ray()
            .ok_or_else(|| VerifierError::Unlabelled(x.to_string()))?
            .clone();
        match classes
            .iter_mut()
            .find(|c| c.class_ray.approx_eq(&ray, POINT_TOL))
        {
            Some(c) => c.member_states.push(x),
            None => classes.push(CoarseClass {
                class_ray: ray,
                member_states: vec![x],
            }),
        }
    }

    let battery = informationally_complete_battery(model.dim());
    let tau = MeasurementContext::default();
    for class in &classes {
        let label = fmt_amplitudes(&class.class_ray);
        for p in &battery {
            let event = Event::Projector(p.clone());
            let expected = ray_expectation(&class.class_ray, &event)?;
            let first = &class.member_states[0];
            let a = model.respond(&event, first, &tau)?;
            for other in &class.member_states[1..] {
                let b = model.respond(&event, other, &tau)?;
                if (a - b).abs() > CLASS_TOL {
                    return Err(VerifierError::NotCoarseGrainable {
                        class: label,
                        first: first.to_string(),
                        second: other.to_string(),
                        event: fmt_amplitudes(&p_ray(p)),
                        a,
                        b,
                    });
                }
            }
            if (a - expected).abs() > CLASS_TOL {
                return Err(VerifierError::NotRayForm {
                    class: label,
                    event: fmt_amplitudes(&p_ray(p)),
                    found: a,
                    expected,
                });
            }
        }
        for eta in model.preparation_contexts() {
            let dist = match model.prepare(&class.class_ray, &eta) {
                Ok(d) => d,
                Err(ModelError::RayNotDeclared(_)) => continue,
                Err(e) => return Err(e.into()),
            };
            let support = dist
                .support_atoms()
                .ok_or_else(|| VerifierError::NotDiscrete(model.name().into()))?;
            if let Some(x) = support.into_iter().find(|x| {
                !class
                    .member_states
                    .iter()
                    .any(|m| m.same_point(x, POINT_TOL))
            }) {
                return Err(VerifierError::SupportOutsideClass {
                    ray: label,
                    context: eta.to_string(),
                    state: x.to_string(),
                });
            }
        }
    }
    let quotient = QuotientModel {
        name: format!("{}/coarse", model.name()),
        dim: model.dim(),
        rays: classes.iter().map(|c| c.class_ray.clone()).collect(),
    };
    Ok((classes, quotient))
}

fn p_ray(p: &Projector64) -> Ray64 {
    // battery projectors are rank one: the first nonzero column spans the range
    let m = p.matrix();
    let col = (0..m.cols())
        .map(|c| m.column(c))
        .find(|c| c.iter().any(|z| z.norm() > 1e-9))
        .expect("nonzero projector");
    Ket64::normalized(col).expect("nonzero column").ray()
}

/// Point-mass model over the class rays with responses `⟨X̃|E|X̃⟩`; every
/// preparation context gives the same point mass.
#[derive(Clone, Debug)]
pub struct QuotientModel {
    name: String,
    dim: usize,
    rays: Vec<Ray64>,
}

impl QuotientModel {
    pub fn rays(&self) -> &[Ray64] {
        &self.rays
    }
}

impl OntologicalModel for QuotientModel {
    fn name(&self) -> &str {
        &self.name
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn space(&self) -> OnticSpace {
        OnticSpace::Discrete {
            dim: self.dim,
            size: self.rays.len(),
        }
    }

    fn flags(&self) -> ModelFlags {
        ModelFlags {
            measurement_noncontextual: true,
            preparation_noncontextual: true,
            outcome_deterministic: false,
            psi_ontic: true,
        }
    }

    fn prepare(
        &self,
        ray: &Ray64,
        _ctx: &PreparationContext,
    ) -> Result<OnticDistribution, ModelError> {
        check_ray_dim(self, ray)?;
        let r = self
            .rays
            .iter()
            .find(|r| r.approx_eq(ray, POINT_TOL))
            .ok_or_else(|| ModelError::RayNotDeclared(fmt_amplitudes(ray)))?;
        Ok(OnticDistribution::point_mass(OnticState::RayPoint(
            r.clone(),
        )))
    }

    fn respond(
        &self,
        event: &Event,
        state: &OnticState,
        _ctx: &MeasurementContext,
    ) -> Result<f64, ModelError> {
        match state {
            OnticState::RayPoint(x) if x.dim() == self.dim => ray_expectation(x, event),
            _ => Err(ModelError::ForeignState {
                model: self.name.clone(),
                state: state.to_string(),
            }),
        }
    }

    fn ontic_states(&self) -> Option<Vec<OnticState>> {
        Some(
            self.rays
                .iter()
                .cloned()
                .map(OnticState::RayPoint)
                .collect(),
        )
    }
}
