//! Scalar abstraction shared by the quantum and geometry layers.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive};

/// Real field the quantum layer is generic over (`f32` or `f64`).
///
/// Besides the arithmetic, each precision carries the two tolerances the
/// library validates against: a tight one for freshly assembled objects and
/// a looser one for quantities derived through several matrix products.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Tolerance for norms, Hermiticity and traces at construction time.
    fn assembly_tol() -> Self;

    /// Tolerance for idempotency, orthogonality, completeness and eigenvalue bounds.
    fn algebra_tol() -> Self;

    /// Converts an `f64` literal, panicking only if the target cannot represent it.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    fn assembly_tol() -> Self {
        1e-12
    }
    fn algebra_tol() -> Self {
        1e-10
    }
}

impl Scalar for f32 {
    fn assembly_tol() -> Self {
        1e-5
    }
    fn algebra_tol() -> Self {
        1e-4
    }
}
