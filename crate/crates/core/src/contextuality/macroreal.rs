//! Macroscopic realism against a non-contextual response: the algebraic
//! contradiction for a device entangled with a pointer.

use serde::Serialize;

use super::ContextualityError;
use crate::quantum::{born_probability, Tensor};
use crate::{CMatrix64, Ket64, Projector64};

/// Self-verification tolerance of certificates.
pub const CERTIFICATE_TOL: f64 = 1e-10;

/// A probability the hypothetical ontic state must assign to an event.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Constraint {
    pub event: String,
    pub operator: CMatrix64,
    pub required: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContradictionCertificate {
    pub device_state: Ket64,
    /// The ontic pointer value `n = ±1` under consideration.
    pub pointer_value: i32,
    pub constraints: Vec<Constraint>,
    /// The operator forced by the probability-one constraint on `|Ψ⟩⟨Ψ|`.
    pub forced_operator: CMatrix64,
    /// Index into `constraints` of the constraint the forced operator breaks.
    pub violated: usize,
    pub violating_value: f64,
    pub explanation: String,
}

impl ContradictionCertificate {
    /// Recomputes `Tr[ρ E]` for every constraint with the forced operator:
    /// the support constraint must hold, and the violated one must give the
    /// recorded value and differ from its requirement.
    pub fn verify(&self) -> bool {
        let value = |c: &Constraint| self.forced_operator.trace_product(&c.operator).re;
        let psi = self.device_state.outer();
        let forced_ok = self.forced_operator.max_abs_diff(&psi) <= CERTIFICATE_TOL;
        let support_ok =
            (value(&self.constraints[0]) - self.constraints[0].required).abs() <= CERTIFICATE_TOL;
        let v = value(&self.constraints[self.violated]);
        forced_ok
            && support_ok
            && (v - self.violating_value).abs() <= CERTIFICATE_TOL
            && (v - self.constraints[self.violated].required).abs() > CERTIFICATE_TOL
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum MacrorealismOutcome {
    Contradiction(ContradictionCertificate),
    /// The forced operator already gives the pointer value with certainty.
    Feasible {
        device_state: Ket64,
        pointer_value: i32,
        pointer_probability: f64,
    },
}

impl MacrorealismOutcome {
    pub fn value(&self) -> f64 {
        match self {
            MacrorealismOutcome::Contradiction(c) => c.violating_value,
            MacrorealismOutcome::Feasible {
                pointer_probability,
                ..
            } => *pointer_probability,
        }
    }
}

/// Builds `|Ψ⟩ ∝ a|1⟩|φ₊⟩ + b|−1⟩|φ₋⟩` (system qubit basis `|1⟩, |−1⟩`
/// taken as the computational basis) and considers an ontic state whose
/// pointer value `n` has nonzero amplitude (`n = +1` unless `a = 0`).
///
/// Support implication demands `P(|Ψ⟩⟨Ψ|) = 1`; macroscopic realism demands
/// `P(I ⊗ |φ_n⟩⟨φ_n|) = 1`. A trace-form response with `Tr[ρ |Ψ⟩⟨Ψ|] = 1`,
/// `ρ ≥ 0` and `Tr ρ = 1` has `ρ = |Ψ⟩⟨Ψ|`, which gives the pointer event
/// probability `|amplitude_n|²`: a contradiction unless that is 1.
pub fn macrorealism_witness(
    pointers: [&Ket64; 2],
    amplitudes: [f64; 2],
) -> Result<MacrorealismOutcome, ContextualityError> {
    let [plus, minus] = pointers;
    if plus.dim() != minus.dim() {
        return Err(ContextualityError::NonOrthonormalPointers(format!(
            "dimensions {} and {}",
            plus.dim(),
            minus.dim()
        )));
    }
    let overlap = plus.inner(minus).norm();
    if overlap > CERTIFICATE_TOL {
        return Err(ContextualityError::NonOrthonormalPointers(format!(
            "overlap {overlap:.3e}"
        )));
    }
    let up = Ket64::basis(2, 0)?;
    let down = Ket64::basis(2, 1)?;
    let branches: Vec<_> = [up.tensor(plus), down.tensor(minus)]
        .iter()
        .zip(amplitudes)
        .flat_map(|(k, a)| {
            k.amplitudes()
                .iter()
                .map(move |z| z * a)
                .collect::<Vec<_>>()
        })
        .collect();
    // sum the two branch vectors entrywise
    let half = branches.len() / 2;
    let amps: Vec<_> = (0..half)
        .map(|i| branches[i] + branches[half + i])
        .collect();
    let psi = Ket64::normalized(amps)?;

    let (pointer_value, pointer) = if amplitudes[0].abs() > CERTIFICATE_TOL {
        (1, plus)
    } else {
        (-1, minus)
    };
    let own = psi.projector();
    let pointer_event = Projector64::identity(2)?.tensor(&pointer.projector());
    let forced = forced_operator(&own);
    let value = forced.trace_product(pointer_event.matrix()).re;
    debug_assert!((value - born_probability(&psi, &pointer_event)?).abs() < 1e-12);

    if (value - 1.0).abs() <= CERTIFICATE_TOL {
        return Ok(MacrorealismOutcome::Feasible {
            device_state: psi,
            pointer_value,
            pointer_probability: value,
        });
    }
    let constraints = vec![
        Constraint {
            event: "device state |Ψ⟩⟨Ψ| (support implication)".into(),
            operator: own.matrix().clone(),
            required: 1.0,
        },
        Constraint {
            event: format!(
                "pointer I ⊗ |φ_{pointer_value:+}⟩⟨φ_{pointer_value:+}| (macroscopic realism)"
            ),
            operator: pointer_event.matrix().clone(),
            required: 1.0,
        },
    ];
    Ok(MacrorealismOutcome::Contradiction(ContradictionCertificate {
        device_state: psi,
        pointer_value,
        constraints,
        forced_operator: forced,
        violated: 1,
        violating_value: value,
        explanation: format!(
            "Tr[ρ |Ψ⟩⟨Ψ|] = 1 with ρ ≥ 0 and Tr ρ = 1 forces ρ = |Ψ⟩⟨Ψ|; then the pointer event has probability {value} instead of 1"
        ),
    }))
}

/// The unique density operator giving probability one to a rank-one
/// projector is that projector.
fn forced_operator(event: &Projector64) -> CMatrix64 {
    debug_assert_eq!(event.rank(), 1);
    event.matrix().clone()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pointers() -> [Ket64; 2] {
        [Ket64::basis(2, 0).unwrap(), Ket64::basis(2, 1).unwrap()]
    }

    #[test]
    fn equal_amplitudes_give_one_half() {
        let p = pointers();
        let out = macrorealism_witness([&p[0], &p[1]], [1.0, 1.0]).unwrap();
        let MacrorealismOutcome::Contradiction(c) = out else {
            panic!("expected a contradiction")
        };
        assert!((c.violating_value - 0.5).abs() < 1e-12);
        assert!(c.verify());
        assert!(c.forced_operator.max_abs_diff(&c.device_state.outer()) < 1e-15);
    }

    #[test]
    fn product_state_is_feasible() {
        let p = pointers();
        let out = macrorealism_witness([&p[0], &p[1]], [1.0, 0.0]).unwrap();
        assert!(matches!(
            out,
            MacrorealismOutcome::Feasible {
                pointer_value: 1,
                ..
            }
        ));
        assert!((out.value() - 1.0).abs() < 1e-12);
        let out = macrorealism_witness([&p[0], &p[1]], [0.0, 1.0]).unwrap();
        assert!(matches!(
            out,
            MacrorealismOutcome::Feasible {
                pointer_value: -1,
                ..
            }
        ));
    }

    #[test]
    fn asymmetric_amplitudes_give_point_nine() {
        let p = pointers();
        let out = macrorealism_witness([&p[0], &p[1]], [0.9f64.sqrt(), 0.1f64.sqrt()]).unwrap();
        assert!((out.value() - 0.9).abs() < 1e-12);
        let MacrorealismOutcome::Contradiction(c) = out else {
            panic!()
        };
        assert!(c.verify());
        // tampering with the recorded value breaks verification
        let mut bad = c.clone();
        bad.violating_value = 0.8;
        assert!(!bad.verify());
    }

    #[test]
    fn rejects_non_orthogonal_pointers() {
        let a = Ket64::basis(2, 0).unwrap();
        let b = Ket64::from_real(&[1.0, 1.0]).unwrap();
        assert!(matches!(
            macrorealism_witness([&a, &b], [1.0, 1.0]),
            Err(ContextualityError::NonOrthonormalPointers(_))
        ));
    }

    #[test]
    fn qutrit_pointers_work() {
        let a = Ket64::basis(3, 1).unwrap();
        let b = Ket64::from_real(&[1.0, 0.0, 1.0]).unwrap();
        let out = macrorealism_witness([&a, &b], [1.0, 1.0]).unwrap();
        assert!((out.value() - 0.5).abs() < 1e-12);
    }
}
