use rayon::prelude::*;

use crate::ontic::{
    case_seed, fmt_amplitudes, predicted_probability, EstimateKind, Event, MeasurementContext,
    Method, OntologicalModel, PreparationContext,
};
use crate::quantum::{born_probability, trace_probability};
use crate::report::{digest, CaseRecord, VerificationReport};
use crate::{Povm64, ProjectiveMeasurement64, Ray64};

/// Monte Carlo cases pass within this many standard errors.
pub const MC_SIGMAS: f64 = 4.0;
/// Absolute slack added to the Monte Carlo band so that zero-variance
/// estimates (point masses) are not failed by roundoff.
pub const MC_ROUNDOFF_FLOOR: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum Measurement {
    Projective(ProjectiveMeasurement64),
    Povm(Povm64),
}

impl Measurement {
    pub fn dim(&self) -> usize {
        match self {
            Measurement::Projective(m) => m.dim(),
            Measurement::Povm(m) => m.dim(),
        }
    }

    pub fn events(&self) -> Vec<Event> {
        match self {
            Measurement::Projective(m) => m
                .projectors()
                .iter()
                .cloned()
                .map(Event::Projector)
                .collect(),
            Measurement::Povm(m) => m.effects().iter().cloned().map(Event::Effect).collect(),
        }
    }
}

impl From<ProjectiveMeasurement64> for Measurement {
    fn from(m: ProjectiveMeasurement64) -> Self {
        Measurement::Projective(m)
    }
}

impl From<Povm64> for Measurement {
    fn from(m: Povm64) -> Self {
        Measurement::Povm(m)
    }
}

/// Preparation and measurement context labels to cross with every case.
#[derive(Clone, Debug, PartialEq)]
pub struct ContextBattery {
    pub preparations: Vec<PreparationContext>,
    pub measurements: Vec<MeasurementContext>,
}

impl Default for ContextBattery {
    fn default() -> Self {
        Self {
            preparations: vec![PreparationContext::default()],
            measurements: vec![MeasurementContext::default()],
        }
    }
}

impl ContextBattery {
    /// The model's declared preparation contexts with the default measurement context.
    pub fn for_model(model: &dyn OntologicalModel) -> Self {
        Self {
            preparations: model.preparation_contexts(),
            measurements: vec![MeasurementContext::default()],
        }
    }
}

struct Case<'a> {
    state: usize,
    eta: &'a PreparationContext,
    measurement: usize,
    outcome: usize,
    event: Event,
    tau: &'a MeasurementContext,
}

/// Compares the model's predicted probability with the quantum one for
/// every state, context pair, measurement and outcome. Failures are recorded
/// as cases, never returned as errors.
pub fn verify_born_equivalence(
    model: &dyn OntologicalModel,
    states: &[Ray64],
    measurements: &[Measurement],
    contexts: &ContextBattery,
    method: Method,
    tolerance: f64,
) -> VerificationReport {
    let mut cases = Vec::new();
    for (si, _) in states.iter().enumerate() {
        for eta in &contexts.preparations {
            for (mi, m) in measurements.iter().enumerate() {
                for (k, event) in m.events().into_iter().enumerate() {
                    for tau in &contexts.measurements {
                        cases.push(Case {
                            state: si,
                            eta,
                            measurement: mi,
                            outcome: k,
                            event: event.clone(),
                            tau,
                        });
                    }
                }
            }
        }
    }
    let records: Vec<CaseRecord> = cases
        .par_iter()
        .enumerate()
        .map(|(id, case)| evaluate(model, &states[case.state], case, id, method, tolerance))
        .collect();
    let seed = match method {
        Method::MonteCarlo { seed, .. } => Some(seed),
        Method::Quadrature(_) => None,
    };
    let notices = records
        .iter()
        .filter_map(|r| r.note.clone())
        .filter(|n| n.contains("fell back"))
        .take(1)
        .collect();
    VerificationReport::new("born-equivalence", model.name(), seed, records).with_notices(notices)
}

fn evaluate(
    model: &dyn OntologicalModel,
    ray: &Ray64,
    case: &Case<'_>,
    id: usize,
    method: Method,
    tolerance: f64,
) -> CaseRecord {
    let inputs = format!(
        "state={} eta={} measurement={} outcome={} tau={}",
        case.state, case.eta, case.measurement, case.outcome, case.tau
    );
    let digest = digest(&format!(
        "{inputs} {} {:?}",
        fmt_amplitudes(ray),
        case.event.matrix().as_slice()
    ));
    let method = match method {
        Method::MonteCarlo { samples, seed } => Method::MonteCarlo {
            samples,
            seed: case_seed(seed, id as u64),
        },
        m => m,
    };
    let quantum = match &case.event {
        Event::Projector(p) => born_probability(ray.ket(), p),
        Event::Effect(e) => trace_probability(&ray.ket().density(), e),
    };
    let quantum = match quantum {
        Ok(q) => q,
        Err(e) => return CaseRecord::failed(id, inputs, digest, e.to_string()),
    };
    let estimate = match predicted_probability(model, ray, case.eta, &case.event, case.tau, method)
    {
        Ok(e) => e,
        Err(e) => return CaseRecord::failed(id, inputs, digest, e.to_string()),
    };
    let band = match estimate.kind {
        EstimateKind::MonteCarlo { .. } => MC_SIGMAS * estimate.error + MC_ROUNDOFF_FLOOR,
        _ => tolerance,
    };
    let mut record = CaseRecord::compare(id, inputs, digest, estimate.value, quantum, band);
    record.error = Some(estimate.error);
    record.note = estimate.notice;
    record
}
