use std::fmt::Debug;
use std::sync::Arc;

use rand::{Rng, RngCore};

use super::ks::{heaviside, KS_NORMALIZATION};
use super::{OnticState, POINT_TOL};
use crate::sphere::{sample_cosine_hemisphere, SphereFrame, SphereQuadrature};
use crate::BlochVector64;

/// Density threshold defining the support of a continuous distribution.
pub const SUPPORT_THRESHOLD: f64 = 1e-12;

/// A continuous distribution known only through density, sampler and support.
pub trait ContinuousDistribution: Send + Sync + Debug {
    fn density(&self, state: &OnticState) -> f64;

    fn sample(&self, rng: &mut dyn RngCore) -> OnticState;

    fn in_support(&self, state: &OnticState) -> bool {
        self.density(state) > SUPPORT_THRESHOLD
    }
}

/// `ρ(X|ψ,η)`.
#[derive(Clone, Debug)]
pub enum OnticDistribution {
    /// Finite mixture of point masses; weights are probabilities.
    Atoms(Vec<(OnticState, f64)>),
    /// Density `(1/π) θ(v·b)(v·b)` on the Bloch sphere.
    CosineHemisphere { axis: BlochVector64 },
    /// Anything else, usable only by sampling.
    Continuous(Arc<dyn ContinuousDistribution>),
}

impl OnticDistribution {
    pub fn point_mass(state: OnticState) -> Self {
        OnticDistribution::Atoms(vec![(state, 1.0)])
    }

    pub fn atoms(&self) -> Option<&[(OnticState, f64)]> {
        match self {
            OnticDistribution::Atoms(a) => Some(a),
            _ => None,
        }
    }

    /// Atoms with positive weight.
    pub fn support_atoms(&self) -> Option<Vec<&OnticState>> {
        self.atoms()
            .map(|a| a.iter().filter(|(_, w)| *w > 0.0).map(|(s, _)| s).collect())
    }

    /// Density with respect to the natural measure: counting measure for
    /// atoms (so the atom's weight), solid angle on the sphere.
    pub fn density(&self, state: &OnticState) -> f64 {
        match self {
            OnticDistribution::Atoms(atoms) => atoms
                .iter()
                .filter(|(s, _)| s.same_point(state, POINT_TOL))
                .map(|(_, w)| *w)
                .sum(),
            OnticDistribution::CosineHemisphere { axis } => match state {
                OnticState::BlochPoint(v) => {
                    let c = v.dot(axis);
                    KS_NORMALIZATION * heaviside(c) * c
                }
                _ => 0.0,
            },
            OnticDistribution::Continuous(d) => d.density(state),
        }
    }

    pub fn in_support(&self, state: &OnticState) -> bool {
        match self {
            OnticDistribution::Continuous(d) => d.in_support(state),
            _ => self.density(state) > SUPPORT_THRESHOLD,
        }
    }

    pub fn sample(&self, rng: &mut dyn RngCore) -> OnticState {
        match self {
            OnticDistribution::Atoms(atoms) => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                for (s, w) in atoms {
                    acc += w;
                    if u < acc {
                        return s.clone();
                    }
                }
                // roundoff in the cumulative sum: fall back to the last supported atom
                atoms
                    .iter()
                    .rev()
                    .find(|(_, w)| *w > 0.0)
                    .map(|(s, _)| s.clone())
                    .expect("distribution has positive mass")
            }
            OnticDistribution::CosineHemisphere { axis } => {
                OnticState::BlochPoint(sample_cosine_hemisphere(&SphereFrame::new(*axis), rng))
            }
            OnticDistribution::Continuous(d) => d.sample(rng),
        }
    }

    /// Total mass: exact for atoms, quadrature on the sphere, `None` when
    /// only a sampler is available.
    pub fn total_mass(&self) -> Option<f64> {
        match self {
            OnticDistribution::Atoms(atoms) => Some(atoms.iter().map(|(_, w)| w).sum()),
            OnticDistribution::CosineHemisphere { axis } => {
                let frame = SphereFrame::containing_great_circles(&[*axis]);
                let breaks = frame
                    .great_circle_breaks(axis)
                    .expect("frame built around axis");
                let value = SphereQuadrature::default().integrate(&frame, &breaks, &|v| {
                    self.density(&OnticState::BlochPoint(*v))
                });
                Some(value)
            }
            OnticDistribution::Continuous(_) => None,
        }
    }

    /// Whether every weight or density value is nonnegative (atoms only;
    /// the hemisphere density is nonnegative by construction).
    pub fn is_nonnegative(&self) -> bool {
        match self {
            OnticDistribution::Atoms(atoms) => atoms.iter().all(|(_, w)| *w >= 0.0),
            _ => true,
        }
    }
}
