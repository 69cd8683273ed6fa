use std::f64::consts::FRAC_1_PI;

use super::{
    check_ray_dim, Event, MeasurementContext, ModelError, ModelFlags, OnticDistribution,
    OnticSpace, OnticState, OntologicalModel, PreparationContext,
};
use crate::{BlochVector64, Ray64};

/// `1/π`: the cosine-weighted hemisphere has total weight `π`.
pub const KS_NORMALIZATION: f64 = FRAC_1_PI;

/// Band around `c·v = 0` treated as the boundary, absorbing the roundoff of
/// Bloch vectors recovered from projectors.
pub const BOUNDARY_TOL: f64 = 1e-12;

/// Heaviside step with `θ(0) = 1/2`.
pub fn heaviside(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        0.0
    } else {
        0.5
    }
}

/// Qubit model over Bloch vectors: a state with Bloch vector `b` prepares
/// the density `(1/π) θ(v·b)(v·b)`, and the rank-one event with Bloch vector
/// `c` fires deterministically when `c·v > 0`.
#[derive(Clone, Debug, Default)]
pub struct KsModel;

pub fn ks_model() -> KsModel {
    KsModel
}

impl KsModel {
    /// Same as [`ks_model`] but validating a requested dimension.
    pub fn with_dim(dim: usize) -> Result<Self, ModelError> {
        if dim != 2 {
            return Err(ModelError::DimensionMismatch {
                model: "ks".into(),
                expected: 2,
                found: dim,
            });
        }
        Ok(KsModel)
    }

    fn event_vector(&self, event: &Event) -> Result<(usize, BlochVector64), ModelError> {
        let p = event
            .as_projector()
            .ok_or_else(|| ModelError::UnsupportedEvent {
                model: "ks".into(),
                what: "unsharp effect".into(),
            })?;
        Ok((p.rank(), BlochVector64::from_projector(&p)?))
    }
}

impl OntologicalModel for KsModel {
    fn name(&self) -> &str {
        "ks"
    }

    fn dim(&self) -> usize {
        2
    }

    fn space(&self) -> OnticSpace {
        OnticSpace::BlochSphere
    }

    fn flags(&self) -> ModelFlags {
        ModelFlags {
            measurement_noncontextual: true,
            preparation_noncontextual: true,
            outcome_deterministic: true,
            psi_ontic: false,
        }
    }

    fn prepare(
        &self,
        ray: &Ray64,
        _ctx: &PreparationContext,
    ) -> Result<OnticDistribution, ModelError> {
        check_ray_dim(self, ray)?;
        Ok(OnticDistribution::CosineHemisphere {
            axis: BlochVector64::from_ket(ray.ket())?,
        })
    }

    fn respond(
        &self,
        event: &Event,
        state: &OnticState,
        _ctx: &MeasurementContext,
    ) -> Result<f64, ModelError> {
        let OnticState::BlochPoint(v) = state else {
            return Err(ModelError::ForeignState {
                model: self.name().to_string(),
                state: state.to_string(),
            });
        };
        if event.dim() != 2 {
            return Err(ModelError::DimensionMismatch {
                model: "ks".into(),
                expected: 2,
                found: event.dim(),
            });
        }
        let (rank, c) = self.event_vector(event)?;
        Ok(match rank {
            0 => 0.0,
            1 => {
                let x = c.dot(v);
                heaviside(if x.abs() <= BOUNDARY_TOL { 0.0 } else { x })
            }
            _ => 1.0,
        })
    }

    fn response_boundary(&self, event: &Event) -> Option<BlochVector64> {
        match self.event_vector(event) {
            Ok((1, c)) => Some(c),
            _ => None,
        }
    }
}
