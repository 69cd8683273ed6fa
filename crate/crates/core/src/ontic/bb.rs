use super::{
    check_ray_dim, ray_expectation, Event, MeasurementContext, ModelError, ModelFlags,
    OnticDistribution, OnticSpace, OnticState, OntologicalModel, PreparationContext,
};
use crate::Ray64;

/// Ontic states are rays; a preparation is a point mass on its own ray and
/// an event `E` fires with probability `⟨X|E|X⟩`.
#[derive(Clone, Debug)]
pub struct BbModel {
    dim: usize,
}

pub fn bb_model(dim: usize) -> Result<BbModel, ModelError> {
    if dim < 2 {
        return Err(ModelError::InvalidParameter(format!("dimension {dim} < 2")));
    }
    Ok(BbModel { dim })
}

impl OntologicalModel for BbModel {
    fn name(&self) -> &str {
        "bb"
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn space(&self) -> OnticSpace {
        OnticSpace::ProjectiveHilbert { dim: self.dim }
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
        Ok(OnticDistribution::point_mass(OnticState::RayPoint(
            ray.clone(),
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
                model: self.name().to_string(),
                state: state.to_string(),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{born_probability, random};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn prepare_is_point_mass_on_the_ray() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let model = bb_model(3).unwrap();
        let psi = random::random_ket::<f64, _>(&mut rng, 3).ray();
        let d = model.prepare(&psi, &PreparationContext::from(7)).unwrap();
        for _ in 0..10 {
            assert!(d
                .sample(&mut rng)
                .same_point(&OnticState::RayPoint(psi.clone()), 1e-15));
        }
        let own = Event::Projector(psi.projector());
        let r = model
            .respond(
                &own,
                &OnticState::RayPoint(psi),
                &MeasurementContext::default(),
            )
            .unwrap();
        assert!((r - 1.0).abs() < 1e-12);
    }

    #[test]
    fn respond_equals_born_rule() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let model = bb_model(3).unwrap();
        for _ in 0..50 {
            let psi = random::random_ket::<f64, _>(&mut rng, 3);
            let e = random::random_projector(&mut rng, 3);
            let r = model
                .respond(
                    &Event::Projector(e.clone()),
                    &OnticState::RayPoint(psi.ray()),
                    &MeasurementContext::default(),
                )
                .unwrap();
            assert!((r - born_probability(&psi, &e).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn respond_ignores_measurement_context_bitwise() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let model = bb_model(4).unwrap();
        let x = OnticState::RayPoint(random::random_ket::<f64, _>(&mut rng, 4).ray());
        let e = Event::Projector(random::random_projector(&mut rng, 4));
        let a = model
            .respond(&e, &x, &MeasurementContext::from("a"))
            .unwrap();
        let b = model
            .respond(&e, &x, &MeasurementContext::from("b"))
            .unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn rejects_foreign_states_and_dimensions() {
        let model = bb_model(2).unwrap();
        let e = Event::Projector(crate::Projector64::identity(2).unwrap());
        let v = OnticState::BlochPoint(crate::BlochVector64::new(0.0, 0.0, 1.0));
        assert!(matches!(
            model.respond(&e, &v, &MeasurementContext::default()),
            Err(ModelError::ForeignState { .. })
        ));
        let psi = crate::Ket64::basis(3, 0).unwrap().ray();
        assert!(matches!(
            model.prepare(&psi, &PreparationContext::default()),
            Err(ModelError::DimensionMismatch { .. })
        ));
        assert!(bb_model(1).is_err());
    }
}
