//! Whether an extended model's responses vary across the support of a
//! single preparation.

use serde::Serialize;

use crate::ontic::{
    case_seed, fmt_amplitudes, shard_rng, Event, MeasurementContext, ModelError, OnticState,
    OntologicalModel, PreparationContext,
};
use crate::quantum::random::random_projector;
use crate::report::{digest, CaseRecord, VerificationReport};
use crate::verifier::informationally_complete_battery;
use crate::{CMatrix64, Ray64};

/// Response gaps above this make an extension non-trivial.
pub const TRIVIALITY_GAP: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SupportVerdict {
    ConstantOnSupport,
    VariesOnSupport,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Triviality {
    Trivial,
    NonTrivial,
}

/// Two support states of one preparation responding differently to an event.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrivialityWitness {
    pub first: OnticState,
    pub second: OnticState,
    pub event: CMatrix64,
    pub measurement_context: String,
    pub responses: [f64; 2],
    pub gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrivialityEntry {
    pub state: Ray64,
    pub context: String,
    pub support_size: usize,
    pub verdict: SupportVerdict,
    pub witness: Option<TrivialityWitness>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExtensionTrivialityReport {
    pub model: String,
    pub entries: Vec<TrivialityEntry>,
    pub overall: Triviality,
}

impl ExtensionTrivialityReport {
    /// One case per `(ψ, η)` comparing the largest response gap with zero;
    /// when a non-trivial outcome is expected a single case asks for a
    /// witness instead.
    pub fn to_report(&self, expected: Option<Triviality>, seed: u64) -> VerificationReport {
        let gap = |e: &TrivialityEntry| e.witness.as_ref().map_or(0.0, |w| w.gap);
        let cases = if expected == Some(Triviality::NonTrivial) {
            let max = self.entries.iter().map(gap).fold(0.0, f64::max);
            let mut c = CaseRecord::compare(
                0,
                "overall".into(),
                digest("overall"),
                max,
                0.0,
                TRIVIALITY_GAP,
            );
            c.pass = self.overall == Triviality::NonTrivial;
            vec![c.with_note("a witness with a positive gap is expected")]
        } else {
            self.entries
                .iter()
                .enumerate()
                .map(|(i, e)| {
                    let inputs = format!("state={} eta={}", fmt_amplitudes(&e.state), e.context);
                    let dg = digest(&inputs);
                    CaseRecord::compare(i, inputs, dg, gap(e), 0.0, TRIVIALITY_GAP)
                })
                .collect()
        };
        VerificationReport::new("triviality", self.model.clone(), Some(seed), cases)
            .with_certificate(serde_json::to_value(self).expect("report serializes"))
    }
}

/// For each state and preparation context, collects support states (all
/// atoms, or `n_samples` draws), then scans the model's distinguished events
/// in their own contexts, an informationally complete projector battery and
/// `event_budget` random rank-one projectors for a response gap.
pub fn triviality_check(
    model: &dyn OntologicalModel,
    states: &[Ray64],
    contexts: &[PreparationContext],
    event_budget: usize,
    n_samples: usize,
    seed: u64,
) -> Result<ExtensionTrivialityReport, ModelError> {
    let dim = model.dim();
    let mut events: Vec<(Event, MeasurementContext)> = model.distinguished_events();
    events.extend(
        informationally_complete_battery(dim)
            .into_iter()
            .map(|p| (Event::Projector(p), MeasurementContext::default())),
    );
    let mut rng = shard_rng(seed, 0);
    events.extend((0..event_budget).map(|_| {
        (
            Event::Projector(random_projector(&mut rng, dim)),
            MeasurementContext::default(),
        )
    }));

    let mut entries = Vec::new();
    for psi in states {
        for eta in contexts {
            let dist = model.prepare(psi, eta)?;
            let support: Vec<OnticState> = match dist.support_atoms() {
                Some(a) => a.into_iter().cloned().collect(),
                None => {
                    let mut r = shard_rng(case_seed(seed, entries.len() as u64 + 1), 0);
                    (0..n_samples).map(|_| dist.sample(&mut r)).collect()
                }
            };
            let mut witness = None;
            'scan: for (event, tau) in &events {
                let mut lo: Option<(f64, &OnticState)> = None;
                let mut hi: Option<(f64, &OnticState)> = None;
                for x in &support {
                    let r = model.respond(event, x, tau)?;
                    if lo.is_none_or(|(v, _)| r < v) {
                        lo = Some((r, x));
                    }
                    if hi.is_none_or(|(v, _)| r > v) {
                        hi = Some((r, x));
                    }
                }
                if let (Some((a, xa)), Some((b, xb))) = (hi, lo) {
                    if a - b > TRIVIALITY_GAP {
                        witness = Some(TrivialityWitness {
                            first: xa.clone(),
                            second: xb.clone(),
                            event: event.matrix().clone(),
                            measurement_context: tau.to_string(),
                            responses: [a, b],
                            gap: a - b,
                        });
                        break 'scan;
                    }
                }
            }
            entries.push(TrivialityEntry {
                state: psi.clone(),
                context: eta.to_string(),
                support_size: support.len(),
                verdict: if witness.is_some() {
                    SupportVerdict::VariesOnSupport
                } else {
                    SupportVerdict::ConstantOnSupport
                },
                witness,
            });
        }
    }
    let overall = if entries.iter().any(|e| e.witness.is_some()) {
        Triviality::NonTrivial
    } else {
        Triviality::Trivial
    };
    Ok(ExtensionTrivialityReport {
        model: model.name().to_string(),
        entries,
        overall,
    })
}
