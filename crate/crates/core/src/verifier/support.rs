//! Support implication (`ρ(X|ψ,η) > 0 ⇒ P(E_ψ|X) = 1`) and identification of
//! the response operator on the support with `|ψ⟩⟨ψ|`.

use crate::ontic::{
    case_seed, fmt_amplitudes, shard_rng, Event, MeasurementContext, ModelError, OnticDistribution,
    OnticState, OntologicalModel, PreparationContext,
};
use crate::quantum::random::random_projector;
use crate::report::{digest, CaseRecord, VerificationReport};
use crate::{Projector64, Ray64};

use super::{gleason_fit, VerifierError};

/// A support state passes when it responds to `|ψ⟩⟨ψ|` within this of 1.
pub const SUPPORT_TOL: f64 = 1e-10;
/// Fitted response operators must match `|ψ⟩⟨ψ|` entrywise within this.
pub const IDENTIFICATION_TOL: f64 = 1e-8;
/// Support states examined per context when the distribution is continuous.
const IDENTIFICATION_SAMPLES: usize = 16;

/// Every support atom for finite distributions, otherwise `n` samples drawn
/// from stream `case_seed(seed, case)`.
fn support_states(dist: &OnticDistribution, n: usize, seed: u64, case: usize) -> Vec<OnticState> {
    match dist.support_atoms() {
        Some(atoms) => atoms.into_iter().cloned().collect(),
        None => {
            let mut rng = shard_rng(case_seed(seed, case as u64), 0);
            (0..n).map(|_| dist.sample(&mut rng)).collect()
        }
    }
}

pub fn support_implication_check(
    model: &dyn OntologicalModel,
    psi: &Ray64,
    contexts: &[PreparationContext],
    n_samples: usize,
    seed: u64,
) -> VerificationReport {
    let own = Event::Projector(psi.projector());
    let tau = MeasurementContext::default();
    let cases = contexts
        .iter()
        .enumerate()
        .map(|(id, eta)| {
            let inputs = format!("eta={eta}");
            let dg = digest(&format!("{inputs} {}", fmt_amplitudes(psi)));
            let run = || -> Result<CaseRecord, ModelError> {
                let dist = model.prepare(psi, eta)?;
                let states = support_states(&dist, n_samples, seed, id);
                let mut worst: Option<(f64, &OnticState)> = None;
                for x in &states {
                    let r = model.respond(&own, x, &tau)?;
                    if worst.is_none_or(|(w, _)| r < w) {
                        worst = Some((r, x));
                    }
                }
                let (min, witness) = worst.map_or((1.0, None), |(r, x)| (r, Some(x)));
                let record =
                    CaseRecord::compare(id, inputs.clone(), dg.clone(), min, 1.0, SUPPORT_TOL);
                Ok(match witness {
                    Some(x) if !record.pass => {
                        record.with_note(format!("witness {x} responds {min}"))
                    }
                    _ => record.with_note(format!("{} support states checked", states.len())),
                })
            };
            run().unwrap_or_else(|e| {
                CaseRecord::failed(id, inputs.clone(), dg.clone(), e.to_string())
            })
        })
        .collect();
    VerificationReport::new("support-implication", model.name(), Some(seed), cases)
}

/// Fits the response function of each support state to the trace form and
/// compares the fitted operator with `|ψ⟩⟨ψ|`.
pub fn operator_identification(
    model: &dyn OntologicalModel,
    psi: &Ray64,
    contexts: &[PreparationContext],
    projector_budget: usize,
    seed: u64,
) -> Result<VerificationReport, VerifierError> {
    let dim = model.dim();
    if dim < 3 {
        return Err(VerifierError::DimensionTooSmall(dim));
    }
    let mut rng = shard_rng(seed, 0);
    let battery: Vec<Projector64> = (0..projector_budget)
        .map(|_| random_projector(&mut rng, dim))
        .collect();
    let target = psi.ket().outer();
    let tau = MeasurementContext::default();
    let mut cases = Vec::new();
    for (ci, eta) in contexts.iter().enumerate() {
        let dist = model.prepare(psi, eta)?;
        for x in support_states(&dist, IDENTIFICATION_SAMPLES, seed, ci + 1) {
            let id = cases.len();
            let inputs = format!("eta={eta} state={x}");
            let dg = digest(&format!("{inputs} {}", fmt_amplitudes(psi)));
            let samples = battery
                .iter()
                .map(|p| {
                    Ok((
                        p.clone(),
                        model.respond(&Event::Projector(p.clone()), &x, &tau)?,
                    ))
                })
                .collect::<Result<Vec<_>, ModelError>>();
            let samples = match samples {
                Ok(s) => s,
                Err(e) => {
                    cases.push(CaseRecord::failed(id, inputs, dg, e.to_string()));
                    continue;
                }
            };
            let fit = gleason_fit(&samples, dim)?;
            let deviation = fit.deviation_from(&target);
            let overlap = psi.ket().outer().trace_product(&fit.fitted_rho).re;
            let pass = deviation <= IDENTIFICATION_TOL;
            let mut record = CaseRecord::compare(id, inputs, dg, overlap, 1.0, IDENTIFICATION_TOL);
            record.deviation = deviation;
            record.error = Some(fit.residual);
            record.pass = pass;
            if !pass {
                record.note = Some(format!(
                    "fitted operator {} (residual {:.3e}, min eigenvalue {:.3e})",
                    serde_json::to_string(&fit.fitted_rho).expect("matrix serializes"),
                    fit.residual,
                    fit.min_eigenvalue
                ));
            }
            cases.push(record);
        }
    }
    Ok(VerificationReport::new(
        "operator-id",
        model.name(),
        Some(seed),
        cases,
    ))
}
