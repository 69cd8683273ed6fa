//! Ontological models: preparation maps onto distributions over ontic
//! states, and response functions giving event probabilities per ontic state.

mod bb;
mod distribution;
mod extended;
mod ks;
mod monte_carlo;
mod predict;
mod toy;

use std::fmt;

use serde::Serialize;
use thiserror::Error;

pub use bb::{bb_model, BbModel};
pub use distribution::{ContinuousDistribution, OnticDistribution};
pub use extended::{ExtendedBbModel, MacrorealistDevice, Supplement, POINTER_CONTEXT};
pub use ks::{heaviside, ks_model, KsModel, BOUNDARY_TOL, KS_NORMALIZATION};
pub use monte_carlo::{case_seed, monte_carlo_mean, shard_rng, MonteCarloStats, SHARD_SIZE};
pub use predict::{
    predicted_probability, Estimate, EstimateKind, Method, FALLBACK_SAMPLES, FALLBACK_SEED,
};
pub use toy::{discrete_toy_model, ToyModel};

use crate::quantum::QuantumError;
use crate::{BlochVector64, Effect64, Projector64, Ray64};

/// Tolerance for identifying rays and ontic points.
pub const POINT_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OnticState {
    RayPoint(Ray64),
    BlochPoint(BlochVector64),
    DiscretePoint { label: usize, ray: Ray64 },
    ExtendedPoint { ray: Ray64, supplement: Vec<f64> },
}

impl OnticState {
    /// The quantum ray carried by the state, if any.
    pub fn ray(&self) -> Option<&Ray64> {
        match self {
            OnticState::RayPoint(r) => Some(r),
            OnticState::DiscretePoint { ray, .. } | OnticState::ExtendedPoint { ray, .. } => {
                Some(ray)
            }
            OnticState::BlochPoint(_) => None,
        }
    }

    /// Point identity up to `tol` (labels must match exactly).
    pub fn same_point(&self, other: &Self, tol: f64) -> bool {
        match (self, other) {
            (OnticState::RayPoint(a), OnticState::RayPoint(b)) => a.approx_eq(b, tol),
            (OnticState::BlochPoint(a), OnticState::BlochPoint(b)) => a
                .components()
                .iter()
                .zip(b.components())
                .all(|(x, y)| (x - y).abs() <= tol),
            (
                OnticState::DiscretePoint { label: a, .. },
                OnticState::DiscretePoint { label: b, .. },
            ) => a == b,
            (
                OnticState::ExtendedPoint {
                    ray: ra,
                    supplement: ya,
                },
                OnticState::ExtendedPoint {
                    ray: rb,
                    supplement: yb,
                },
            ) => {
                ra.approx_eq(rb, tol)
                    && ya.len() == yb.len()
                    && ya.iter().zip(yb).all(|(x, y)| (x - y).abs() <= tol)
            }
            _ => false,
        }
    }
}

impl fmt::Display for OnticState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OnticState::RayPoint(r) => write!(f, "ray{}", fmt_amplitudes(r)),
            OnticState::BlochPoint(v) => write!(f, "bloch({:.6},{:.6},{:.6})", v.x(), v.y(), v.z()),
            OnticState::DiscretePoint { label, .. } => write!(f, "copy#{label}"),
            OnticState::ExtendedPoint { ray, supplement } => {
                write!(f, "ext{}|Y={:?}", fmt_amplitudes(ray), supplement)
            }
        }
    }
}

pub fn fmt_amplitudes(ray: &Ray64) -> String {
    let parts: Vec<String> = ray
        .ket()
        .amplitudes()
        .iter()
        .map(|z| format!("{:.6}{:+.6}i", z.re, z.im))
        .collect();
    format!("[{}]", parts.join(","))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum OnticSpace {
    ProjectiveHilbert { dim: usize },
    BlochSphere,
    Discrete { dim: usize, size: usize },
    Extended { dim: usize },
}

/// Label `η` of a preparation procedure.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PreparationContext(pub String);

/// Label `τ` of a measurement procedure.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct MeasurementContext(pub String);

macro_rules! context_label {
    ($t:ident) => {
        impl Default for $t {
            fn default() -> Self {
                $t("default".to_string())
            }
        }

        impl From<&str> for $t {
            fn from(s: &str) -> Self {
                $t(s.to_string())
            }
        }

        impl From<i64> for $t {
            fn from(n: i64) -> Self {
                $t(n.to_string())
            }
        }

        impl fmt::Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }
    };
}

context_label!(PreparationContext);
context_label!(MeasurementContext);

/// An event is labelled by a projector (sharp) or an effect (unsharp).
#[derive(Clone, Debug, PartialEq)]
pub enum Event {
    Projector(Projector64),
    Effect(Effect64),
}

impl Event {
    pub fn dim(&self) -> usize {
        match self {
            Event::Projector(p) => p.dim(),
            Event::Effect(e) => e.dim(),
        }
    }

    pub fn matrix(&self) -> &crate::CMatrix64 {
        match self {
            Event::Projector(p) => p.matrix(),
            Event::Effect(e) => e.matrix(),
        }
    }

    /// The event as a projector, when its operator is idempotent.
    pub fn as_projector(&self) -> Option<Projector64> {
        match self {
            Event::Projector(p) => Some(p.clone()),
            Event::Effect(e) => Projector64::new(e.matrix().clone()).ok(),
        }
    }

    pub fn as_effect(&self) -> Effect64 {
        match self {
            Event::Projector(p) => Effect64::from(p),
            Event::Effect(e) => e.clone(),
        }
    }
}

impl From<Projector64> for Event {
    fn from(p: Projector64) -> Self {
        Event::Projector(p)
    }
}

impl From<Effect64> for Event {
    fn from(e: Effect64) -> Self {
        Event::Effect(e)
    }
}

/// Structural claims a model makes about itself.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ModelFlags {
    pub measurement_noncontextual: bool,
    pub preparation_noncontextual: bool,
    pub outcome_deterministic: bool,
    pub psi_ontic: bool,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("model {model} works in dimension {expected}, got {found}")]
    DimensionMismatch {
        model: String,
        expected: usize,
        found: usize,
    },
    #[error("model {model} cannot respond to {what}")]
    UnsupportedEvent { model: String, what: String },
    #[error("model {model} received an ontic state outside its space: {state}")]
    ForeignState { model: String, state: String },
    #[error("ray {0} is not declared by the model")]
    RayNotDeclared(String),
    #[error("unknown preparation context {0:?}")]
    UnknownContext(String),
    #[error("invalid model parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Quantum(#[from] QuantumError),
}

/// A preparation map `ψ, η ↦ ρ(X|ψ,η)` together with a response function
/// `P(E|X,τ)`.
pub trait OntologicalModel: Send + Sync {
    fn name(&self) -> &str;

    fn dim(&self) -> usize;

    fn space(&self) -> OnticSpace;

    fn flags(&self) -> ModelFlags;

    /// Preparation contexts the model distinguishes.
    fn preparation_contexts(&self) -> Vec<PreparationContext> {
        vec![PreparationContext::default()]
    }

    fn prepare(
        &self,
        ray: &Ray64,
        ctx: &PreparationContext,
    ) -> Result<OnticDistribution, ModelError>;

    fn respond(
        &self,
        event: &Event,
        state: &OnticState,
        ctx: &MeasurementContext,
    ) -> Result<f64, ModelError>;

    /// Normal of the great circle across which `respond(event, ·)` jumps,
    /// for models over the Bloch sphere.
    fn response_boundary(&self, _event: &Event) -> Option<BlochVector64> {
        None
    }

    /// Events the model responds to specially, with the measurement context
    /// in which that happens.
    fn distinguished_events(&self) -> Vec<(Event, MeasurementContext)> {
        Vec::new()
    }

    /// The whole ontic space, when it is finite.
    fn ontic_states(&self) -> Option<Vec<OnticState>> {
        None
    }
}

pub(crate) fn check_event_dim(
    model: &dyn OntologicalModel,
    event: &Event,
) -> Result<(), ModelError> {
    if event.dim() != model.dim() {
        return Err(ModelError::DimensionMismatch {
            model: model.name().to_string(),
            expected: model.dim(),
            found: event.dim(),
        });
    }
    Ok(())
}

pub(crate) fn check_ray_dim(model: &dyn OntologicalModel, ray: &Ray64) -> Result<(), ModelError> {
    if ray.dim() != model.dim() {
        return Err(ModelError::DimensionMismatch {
            model: model.name().to_string(),
            expected: model.dim(),
            found: ray.dim(),
        });
    }
    Ok(())
}

/// `⟨X|E|X⟩` clamped to `[0, 1]`, for either kind of event.
pub(crate) fn ray_expectation(ray: &Ray64, event: &Event) -> Result<f64, ModelError> {
    Ok(match event {
        Event::Projector(p) => crate::quantum::born_probability(ray.ket(), p)?,
        Event::Effect(e) => crate::quantum::trace_probability(&ray.ket().density(), e)?,
    })
}
