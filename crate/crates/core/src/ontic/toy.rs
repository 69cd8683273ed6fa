use std::collections::BTreeMap;

use super::{
    check_ray_dim, ray_expectation, Event, MeasurementContext, ModelError, ModelFlags,
    OnticDistribution, OnticSpace, OnticState, OntologicalModel, PreparationContext, POINT_TOL,
};
use crate::quantum::trace_probability;
use crate::{DensityOperator64, Ray64};

/// Finite model with `copies` redundant ontic states per declared ray.
///
/// Ray `i` owns labels `i * copies .. (i + 1) * copies`. A preparation
/// context spreads the ray's probability over its copies with that context's
/// weights. By default every copy responds with `⟨ψ_i|E|ψ_i⟩`; individual
/// labels may be given a different response operator `Tr[E ρ]`.
#[derive(Clone, Debug)]
pub struct ToyModel {
    dim: usize,
    rays: Vec<Ray64>,
    copies: usize,
    spreads: Vec<(PreparationContext, Vec<f64>)>,
    response_operators: BTreeMap<usize, DensityOperator64>,
}

pub fn discrete_toy_model(
    rays: Vec<Ray64>,
    copies: usize,
    spreads: Vec<(PreparationContext, Vec<f64>)>,
) -> Result<ToyModel, ModelError> {
    let dim = rays
        .first()
        .ok_or_else(|| ModelError::InvalidParameter("toy model needs at least one ray".into()))?
        .dim();
    if let Some(r) = rays.iter().find(|r| r.dim() != dim) {
        return Err(ModelError::InvalidParameter(format!(
            "ray dimensions differ ({dim} vs {})",
            r.dim()
        )));
    }
    if copies == 0 {
        return Err(ModelError::InvalidParameter(
            "copies per ray must be at least 1".into(),
        ));
    }
    if spreads.is_empty() {
        return Err(ModelError::InvalidParameter(
            "toy model needs at least one context".into(),
        ));
    }
    for (ctx, weights) in &spreads {
        if weights.len() != copies {
            return Err(ModelError::InvalidParameter(format!(
                "context {ctx} has {} weights for {copies} copies",
                weights.len()
            )));
        }
        if weights.iter().any(|w| *w < 0.0) {
            return Err(ModelError::InvalidParameter(format!(
                "context {ctx} has a negative weight"
            )));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(ModelError::InvalidParameter(format!(
                "context {ctx} weights sum to {total}"
            )));
        }
    }
    Ok(ToyModel {
        dim,
        rays,
        copies,
        spreads,
        response_operators: BTreeMap::new(),
    })
}

impl ToyModel {
    /// Uniform spread over the copies under the default context.
    pub fn uniform(rays: Vec<Ray64>, copies: usize) -> Result<Self, ModelError> {
        let w = vec![1.0 / copies.max(1) as f64; copies];
        discrete_toy_model(rays, copies, vec![(PreparationContext::default(), w)])
    }

    /// Replaces the response of one ontic label by `Tr[E ρ]`.
    pub fn with_response_operator(
        mut self,
        label: usize,
        rho: DensityOperator64,
    ) -> Result<Self, ModelError> {
        if label >= self.size() {
            return Err(ModelError::InvalidParameter(format!(
                "label {label} out of range"
            )));
        }
        if rho.dim() != self.dim {
            return Err(ModelError::DimensionMismatch {
                model: "toy".into(),
                expected: self.dim,
                found: rho.dim(),
            });
        }
        self.response_operators.insert(label, rho);
        Ok(self)
    }

    pub fn rays(&self) -> &[Ray64] {
        &self.rays
    }

    pub fn copies(&self) -> usize {
        self.copies
    }

    pub fn size(&self) -> usize {
        self.rays.len() * self.copies
    }

    pub fn ray_index(&self, ray: &Ray64) -> Option<usize> {
        self.rays.iter().position(|r| r.approx_eq(ray, POINT_TOL))
    }

    fn state(&self, label: usize) -> OnticState {
        OnticState::DiscretePoint {
            label,
            ray: self.rays[label / self.copies].clone(),
        }
    }
}

impl OntologicalModel for ToyModel {
    fn name(&self) -> &str {
        "toy"
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn space(&self) -> OnticSpace {
        OnticSpace::Discrete {
            dim: self.dim,
            size: self.size(),
        }
    }

    fn flags(&self) -> ModelFlags {
        let first = &self.spreads[0].1;
        ModelFlags {
            measurement_noncontextual: true,
            preparation_noncontextual: self.spreads.iter().all(|(_, w)| w == first),
            outcome_deterministic: false,
            psi_ontic: true,
        }
    }

    fn preparation_contexts(&self) -> Vec<PreparationContext> {
        self.spreads.iter().map(|(c, _)| c.clone()).collect()
    }

    fn prepare(
        &self,
        ray: &Ray64,
        ctx: &PreparationContext,
    ) -> Result<OnticDistribution, ModelError> {
        check_ray_dim(self, ray)?;
        let i = self
            .ray_index(ray)
            .ok_or_else(|| ModelError::RayNotDeclared(super::fmt_amplitudes(ray)))?;
        let weights = &self
            .spreads
            .iter()
            .find(|(c, _)| c == ctx)
            .ok_or_else(|| ModelError::UnknownContext(ctx.0.clone()))?
            .1;
        Ok(OnticDistribution::Atoms(
            weights
                .iter()
                .enumerate()
                .filter(|(_, w)| **w > 0.0)
                .map(|(j, w)| (self.state(i * self.copies + j), *w))
                .collect(),
        ))
    }

    fn respond(
        &self,
        event: &Event,
        state: &OnticState,
        _ctx: &MeasurementContext,
    ) -> Result<f64, ModelError> {
        let OnticState::DiscretePoint { label, .. } = state else {
            return Err(ModelError::ForeignState {
                model: "toy".into(),
                state: state.to_string(),
            });
        };
        if *label >= self.size() {
            return Err(ModelError::ForeignState {
                model: "toy".into(),
                state: state.to_string(),
            });
        }
        match self.response_operators.get(label) {
            Some(rho) => Ok(trace_probability(rho, &event.as_effect())?),
            None => ray_expectation(&self.rays[label / self.copies], event),
        }
    }

    fn ontic_states(&self) -> Option<Vec<OnticState>> {
        Some((0..self.size()).map(|l| self.state(l)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ontic::bb_model;
    use crate::quantum::random;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rays(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Vec<Ray64> {
        (0..n)
            .map(|_| random::random_ket::<f64, _>(rng, d).ray())
            .collect()
    }

    #[test]
    fn single_copy_matches_bb() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let rs = rays(&mut rng, 4, 3);
        let toy = ToyModel::uniform(rs.clone(), 1).unwrap();
        let bb = bb_model(3).unwrap();
        let tau = MeasurementContext::default();
        for r in &rs {
            let d = toy.prepare(r, &PreparationContext::default()).unwrap();
            let atoms = d.atoms().unwrap();
            assert_eq!(atoms.len(), 1);
            for _ in 0..5 {
                let e = Event::Projector(random::random_projector(&mut rng, 3));
                let a = toy.respond(&e, &atoms[0].0, &tau).unwrap();
                let b = bb
                    .respond(&e, &OnticState::RayPoint(r.clone()), &tau)
                    .unwrap();
                assert_eq!(a.to_bits(), b.to_bits());
            }
        }
    }

    #[test]
    fn copies_respond_identically() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let rs = rays(&mut rng, 2, 3);
        let toy = ToyModel::uniform(rs, 3).unwrap();
        let states = toy.ontic_states().unwrap();
        let e = Event::Projector(random::random_projector(&mut rng, 3));
        let tau = MeasurementContext::default();
        for ray in 0..2 {
            let vals: Vec<f64> = (0..3)
                .map(|j| toy.respond(&e, &states[ray * 3 + j], &tau).unwrap())
                .collect();
            assert!(vals.iter().all(|v| v.to_bits() == vals[0].to_bits()));
        }
    }

    #[test]
    fn contexts_with_different_spreads_predict_the_same() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let rs = rays(&mut rng, 3, 3);
        let toy = discrete_toy_model(
            rs.clone(),
            4,
            vec![
                ("a".into(), vec![0.7, 0.1, 0.1, 0.1]),
                ("b".into(), vec![0.0, 0.0, 0.5, 0.5]),
            ],
        )
        .unwrap();
        assert!(!toy.flags().preparation_noncontextual);
        let tau = MeasurementContext::default();
        for r in &rs {
            for _ in 0..10 {
                let p = random::random_projector(&mut rng, 3);
                let e = Event::Projector(p.clone());
                let born = crate::quantum::born_probability(r.ket(), &p).unwrap();
                for ctx in ["a", "b"] {
                    // direct summation over the context's atoms
                    let d = toy.prepare(r, &ctx.into()).unwrap();
                    let sum: f64 = d
                        .atoms()
                        .unwrap()
                        .iter()
                        .map(|(s, w)| w * toy.respond(&e, s, &tau).unwrap())
                        .sum();
                    assert!((sum - born).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn validation_errors() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        let rs = rays(&mut rng, 2, 3);
        assert!(discrete_toy_model(rs.clone(), 0, vec![("a".into(), vec![])]).is_err());
        assert!(discrete_toy_model(rs.clone(), 2, vec![("a".into(), vec![0.5, 0.6])]).is_err());
        let toy = ToyModel::uniform(rs, 2).unwrap();
        let stranger = random::random_ket::<f64, _>(&mut rng, 3).ray();
        assert!(matches!(
            toy.prepare(&stranger, &PreparationContext::default()),
            Err(ModelError::RayNotDeclared(_))
        ));
        let r0 = toy.rays()[0].clone();
        assert!(matches!(
            toy.prepare(&r0, &"nope".into()),
            Err(ModelError::UnknownContext(_))
        ));
    }
}
