//! POVM non-contextuality of the point-mass (BB) model: an effect's
//! probability depends only on the effect, not on how the ancilla of its
//! dilation is decomposed into pure states.

use num_complex::Complex;
use serde_json::json;

use super::ContextualityError;
use crate::ontic::{
    bb_model, fmt_amplitudes, Event, MeasurementContext, OnticDistribution, OnticState,
    OntologicalModel,
};
use crate::quantum::{povm_from_dilation, trace_probability, Tensor};
use crate::report::{digest, CaseRecord, VerificationReport};
use crate::{CMatrix64, DensityOperator64, Ket64, ProjectiveMeasurement64, Ray64};

/// Agreement required between the joint-level and effect-level probabilities,
/// and between a decomposition and the ancilla operator it claims to give.
pub const DILATION_TOL: f64 = 1e-10;

/// For each decomposition of the ancilla into weighted rays, compares
///
/// * the joint-level probability `Σ_j w_j P(E_k | ψ_A ⊗ X_j)` with point-mass
///   responses on the product states, and
/// * the effect-level probability `Tr[Q_k |ψ_A⟩⟨ψ_A|]`, `Q_k` the effect the
///   dilation induces on the system.
///
/// A decomposition that does not reproduce the ancilla operator within
/// [`DILATION_TOL`] is a precondition violation.
pub fn dilation_invariance_check(
    psi_a: &Ray64,
    ancilla: &DensityOperator64,
    joint: &ProjectiveMeasurement64,
    decompositions: &[OnticDistribution],
) -> Result<VerificationReport, ContextualityError> {
    let povm = povm_from_dilation(joint, ancilla)?;
    if povm.dim() != psi_a.dim() {
        return Err(crate::quantum::QuantumError::DimensionMismatch {
            expected: povm.dim(),
            found: psi_a.dim(),
        }
        .into());
    }
    let rho_a = psi_a.ket().density();
    let effect_level: Vec<f64> = povm
        .effects()
        .iter()
        .map(|q| trace_probability(&rho_a, q))
        .collect::<Result<_, _>>()?;

    let model = bb_model(joint.dim())?;
    let tau = MeasurementContext::default();
    let mut cases = Vec::new();
    let mut per_decomposition = Vec::new();
    for (di, dec) in decompositions.iter().enumerate() {
        let atoms = point_masses(di, dec)?;
        let mut rebuilt = CMatrix64::zeros(ancilla.dim(), ancilla.dim());
        for (w, x) in &atoms {
            rebuilt = &rebuilt + &x.ket().outer().scale_real(*w);
        }
        let gap = rebuilt.max_abs_diff(ancilla.matrix());
        if gap > DILATION_TOL {
            return Err(ContextualityError::DecompositionMismatch {
                index: di,
                gap,
                reconstructed: serde_json::to_string(&rebuilt).expect("matrix serializes"),
            });
        }
        let mut joint_probs = Vec::with_capacity(joint.len());
        for (k, e) in joint.projectors().iter().enumerate() {
            let event = Event::Projector(e.clone());
            let mut p = 0.0;
            for (w, x) in &atoms {
                let product = OnticState::RayPoint(psi_a.ket().tensor(x.ket()).ray());
                p += w * model.respond(&event, &product, &tau)?;
            }
            let inputs = format!("decomposition={di} outcome={k}");
            let dg = digest(&format!(
                "{inputs} {} {:?}",
                fmt_amplitudes(psi_a),
                atoms
                    .iter()
                    .map(|(w, x)| (w, fmt_amplitudes(x)))
                    .collect::<Vec<_>>()
            ));
            cases.push(CaseRecord::compare(
                cases.len(),
                inputs,
                dg,
                p,
                effect_level[k],
                DILATION_TOL,
            ));
            joint_probs.push(p);
        }
        per_decomposition.push(joint_probs);
    }
    let spread = (0..joint.len())
        .map(|k| {
            let vals = per_decomposition.iter().map(|v| v[k]);
            let max = vals.clone().fold(f64::NEG_INFINITY, f64::max);
            let min = vals.fold(f64::INFINITY, f64::min);
            if per_decomposition.is_empty() {
                0.0
            } else {
                max - min
            }
        })
        .fold(0.0, f64::max);
    Ok(
        VerificationReport::new("dilation", model.name(), None, cases).with_certificate(json!({
            "effect_level": effect_level,
            "joint_level": per_decomposition,
            "max_gap_across_decompositions": spread,
        })),
    )
}

/// `ρ = Σ λ_i |e_i⟩⟨e_i|` as point masses, dropping zero weights.
pub fn eigen_decomposition(rho: &DensityOperator64) -> OnticDistribution {
    let (values, vectors) = rho.matrix().hermitian_eigen();
    OnticDistribution::Atoms(
        values
            .iter()
            .enumerate()
            .filter(|(_, l)| **l > DILATION_TOL)
            .map(|(i, l)| {
                let ket = Ket64::normalized(vectors.column(i)).expect("eigenvectors are unit");
                (OnticState::RayPoint(ket.ray()), *l)
            })
            .collect(),
    )
}

/// Another ensemble for the same operator: `|f_j⟩ = Σ_i U_ji √λ_i |e_i⟩`
/// with weights `‖f_j‖²`, where the rows of `U` are the given orthonormal
/// kets.
pub fn mixed_decomposition(rho: &DensityOperator64, unitary_rows: &[Ket64]) -> OnticDistribution {
    let (values, vectors) = rho.matrix().hermitian_eigen();
    let d = rho.dim();
    let atoms = unitary_rows
        .iter()
        .filter_map(|row| {
            let mut f = vec![Complex::new(0.0, 0.0); d];
            for (i, l) in values.iter().enumerate() {
                let c = row.amplitudes()[i] * l.max(0.0).sqrt();
                for (r, fr) in f.iter_mut().enumerate() {
                    *fr += c * vectors[(r, i)];
                }
            }
            let w: f64 = f.iter().map(|z| z.norm_sqr()).sum();
            (w > DILATION_TOL).then(|| {
                (
                    OnticState::RayPoint(Ket64::normalized(f).expect("nonzero").ray()),
                    w,
                )
            })
        })
        .collect();
    OnticDistribution::Atoms(atoms)
}

fn point_masses(
    index: usize,
    dec: &OnticDistribution,
) -> Result<Vec<(f64, Ray64)>, ContextualityError> {
    let atoms = dec
        .atoms()
        .ok_or(ContextualityError::UnsupportedDecomposition(index))?;
    atoms
        .iter()
        .map(|(x, w)| match x {
            OnticState::RayPoint(r) => Ok((*w, r.clone())),
            _ => Err(ContextualityError::UnsupportedDecomposition(index)),
        })
        .collect()
}
