//! Numerical laboratory for ontological (hidden-variable) models of quantum
//! measurement.

pub mod contextuality;
pub mod linalg;
pub mod ontic;
pub mod quantum;
pub mod report;
pub mod scalar;
pub mod sphere;
pub mod verifier;

pub use scalar::Scalar;

pub type CMatrix64 = linalg::CMatrix<f64>;
pub type Ket64 = quantum::Ket<f64>;
pub type Ray64 = quantum::Ray<f64>;
pub type Projector64 = quantum::Projector<f64>;
pub type Effect64 = quantum::Effect<f64>;
pub type Povm64 = quantum::Povm<f64>;
pub type ProjectiveMeasurement64 = quantum::ProjectiveMeasurement<f64>;
pub type DensityOperator64 = quantum::DensityOperator<f64>;
pub type BlochVector64 = quantum::BlochVector<f64>;

pub type Ket32 = quantum::Ket<f32>;
pub type Projector32 = quantum::Projector<f32>;
pub type DensityOperator32 = quantum::DensityOperator<f32>;
