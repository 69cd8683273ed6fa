//! Extended quantum theories: the quantum ray is kept as preparation data and
//! supplemented with a classical variable `Y`, giving ontic states `(ψ, Y)`.

use super::{
    check_ray_dim, ray_expectation, Event, MeasurementContext, ModelError, ModelFlags,
    OnticDistribution, OnticSpace, OnticState, OntologicalModel, PreparationContext, POINT_TOL,
};
use crate::quantum::Tensor;
use crate::{CMatrix64, Ket64, Projector64, Ray64};

/// What the classical supplement of a lifted BB model records.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Supplement {
    /// A fair coin `Y ∈ {0, 1}` independent of everything.
    FairCoin,
    /// The real and imaginary parts of the ray's amplitudes.
    DuplicateRay,
}

/// BB responses over `(ψ, Y)`; `Y` is carried along and ignored.
#[derive(Clone, Debug)]
pub struct ExtendedBbModel {
    dim: usize,
    supplement: Supplement,
}

impl ExtendedBbModel {
    pub fn new(dim: usize, supplement: Supplement) -> Result<Self, ModelError> {
        if dim < 2 {
            return Err(ModelError::InvalidParameter(format!("dimension {dim} < 2")));
        }
        Ok(Self { dim, supplement })
    }
}

impl OntologicalModel for ExtendedBbModel {
    fn name(&self) -> &str {
        match self.supplement {
            Supplement::FairCoin => "extended-bb",
            Supplement::DuplicateRay => "extended-dup",
        }
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn space(&self) -> OnticSpace {
        OnticSpace::Extended { dim: self.dim }
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
        let point = |supplement: Vec<f64>| OnticState::ExtendedPoint {
            ray: ray.clone(),
            supplement,
        };
        Ok(match self.supplement {
            Supplement::FairCoin => {
                OnticDistribution::Atoms(vec![(point(vec![0.0]), 0.5), (point(vec![1.0]), 0.5)])
            }
            Supplement::DuplicateRay => {
                let y = ray
                    .ket()
                    .amplitudes()
                    .iter()
                    .flat_map(|z| [z.re, z.im])
                    .collect();
                OnticDistribution::point_mass(point(y))
            }
        })
    }

    fn respond(
        &self,
        event: &Event,
        state: &OnticState,
        _ctx: &MeasurementContext,
    ) -> Result<f64, ModelError> {
        match state {
            OnticState::ExtendedPoint { ray, .. } if ray.dim() == self.dim => {
                ray_expectation(ray, event)
            }
            _ => Err(ModelError::ForeignState {
                model: self.name().to_string(),
                state: state.to_string(),
            }),
        }
    }
}

/// Measurement context under which pointer readouts are taken.
pub const POINTER_CONTEXT: &str = "pointer";

/// System ⊗ pointer-qubit device whose supplement is the macroscopic
/// pointer bit `n = ±1`.
///
/// `n` is drawn with the Born weights of the two pointer branches. A pointer
/// readout taken in the `pointer` context is decided by `n` alone; every
/// other event, or the same projector in another context, follows the Born
/// rule on the full state. The statistics agree with quantum theory, and
/// the dependence on the context is unavoidable.
#[derive(Clone, Debug)]
pub struct MacrorealistDevice {
    system_dim: usize,
    pointer_events: [Projector64; 2],
}

impl MacrorealistDevice {
    /// `pointers` must be an orthonormal basis of the pointer qubit.
    pub fn new(system_dim: usize, pointers: [Ket64; 2]) -> Result<Self, ModelError> {
        if system_dim < 2 {
            return Err(ModelError::InvalidParameter(format!(
                "system dimension {system_dim} < 2"
            )));
        }
        if pointers.iter().any(|p| p.dim() != 2) {
            return Err(ModelError::InvalidParameter(
                "pointer states must be qubit kets".into(),
            ));
        }
        if pointers[0].inner(&pointers[1]).norm() > POINT_TOL {
            return Err(ModelError::InvalidParameter(
                "pointer states are not orthogonal".into(),
            ));
        }
        let id = Projector64::identity(system_dim)?;
        let pointer_events = [
            id.tensor(&pointers[0].projector()),
            id.tensor(&pointers[1].projector()),
        ];
        Ok(Self {
            system_dim,
            pointer_events,
        })
    }

    pub fn pointer_event(&self, n: i32) -> &Projector64 {
        if n >= 0 {
            &self.pointer_events[0]
        } else {
            &self.pointer_events[1]
        }
    }

    fn pointer_index(&self, m: &CMatrix64) -> Option<usize> {
        self.pointer_events
            .iter()
            .position(|p| p.matrix().max_abs_diff(m) <= POINT_TOL)
    }
}

impl OntologicalModel for MacrorealistDevice {
    fn name(&self) -> &str {
        "macrorealist"
    }

    fn dim(&self) -> usize {
        self.system_dim * 2
    }

    fn space(&self) -> OnticSpace {
        OnticSpace::Extended { dim: self.dim() }
    }

    fn flags(&self) -> ModelFlags {
        ModelFlags {
            measurement_noncontextual: false,
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
        let mut atoms = Vec::with_capacity(2);
        for (p, n) in self.pointer_events.iter().zip([1.0, -1.0]) {
            let w = crate::quantum::born_probability(ray.ket(), p)?;
            if w > 0.0 {
                atoms.push((
                    OnticState::ExtendedPoint {
                        ray: ray.clone(),
                        supplement: vec![n],
                    },
                    w,
                ));
            }
        }
        Ok(OnticDistribution::Atoms(atoms))
    }

    fn respond(
        &self,
        event: &Event,
        state: &OnticState,
        ctx: &MeasurementContext,
    ) -> Result<f64, ModelError> {
        let OnticState::ExtendedPoint { ray, supplement } = state else {
            return Err(ModelError::ForeignState {
                model: self.name().to_string(),
                state: state.to_string(),
            });
        };
        if ray.dim() != self.dim() || supplement.len() != 1 {
            return Err(ModelError::ForeignState {
                model: self.name().to_string(),
                state: state.to_string(),
            });
        }
        if ctx.0 == POINTER_CONTEXT {
            if let Some(m) = self.pointer_index(event.matrix()) {
                let n = if supplement[0] >= 0.0 { 0 } else { 1 };
                return Ok(if m == n { 1.0 } else { 0.0 });
            }
        }
        ray_expectation(ray, event)
    }

    fn distinguished_events(&self) -> Vec<(Event, MeasurementContext)> {
        self.pointer_events
            .iter()
            .map(|p| {
                (
                    Event::Projector(p.clone()),
                    MeasurementContext::from(POINTER_CONTEXT),
                )
            })
            .collect()
    }
}
