use std::ops::Neg;

use num_complex::Complex;

use super::{Ket, Projector, QuantumError};
use crate::scalar::Scalar;

/// Real 3-vector on (or inside) the Bloch sphere.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
#[serde(bound(serialize = "T: serde::Serialize"))]
#[serde(transparent)]
pub struct BlochVector<T> {
    components: [T; 3],
}

impl<T: Scalar> BlochVector<T> {
    pub fn new(x: T, y: T, z: T) -> Self {
        Self {
            components: [x, y, z],
        }
    }

    /// Normalizes to the unit sphere.
    pub fn unit(x: T, y: T, z: T) -> Result<Self, QuantumError> {
        let v = Self::new(x, y, z);
        let n = v.norm();
        if n <= T::assembly_tol() {
            return Err(QuantumError::ZeroVector);
        }
        Ok(v.scaled(T::one() / n))
    }

    /// Unit vector at polar angle `theta` from +z and azimuth `phi`.
    pub fn from_angles(theta: T, phi: T) -> Self {
        Self::new(
            theta.sin() * phi.cos(),
            theta.sin() * phi.sin(),
            theta.cos(),
        )
    }

    pub fn x(&self) -> T {
        self.components[0]
    }

    pub fn y(&self) -> T {
        self.components[1]
    }

    pub fn z(&self) -> T {
        self.components[2]
    }

    pub fn components(&self) -> [T; 3] {
        self.components
    }

    pub fn dot(&self, other: &Self) -> T {
        self.x() * other.x() + self.y() * other.y() + self.z() * other.z()
    }

    pub fn cross(&self, other: &Self) -> Self {
        Self::new(
            self.y() * other.z() - self.z() * other.y(),
            self.z() * other.x() - self.x() * other.z(),
            self.x() * other.y() - self.y() * other.x(),
        )
    }

    pub fn norm(&self) -> T {
        self.dot(self).sqrt()
    }

    pub fn scaled(&self, s: T) -> Self {
        Self::new(self.x() * s, self.y() * s, self.z() * s)
    }

    pub fn is_unit(&self) -> bool {
        (self.norm() - T::one()).abs() <= T::assembly_tol()
    }

    /// Bloch vector `(⟨σx⟩, ⟨σy⟩, ⟨σz⟩)` of a qubit ket.
    pub fn from_ket(ket: &Ket<T>) -> Result<Self, QuantumError> {
        if ket.dim() != 2 {
            return Err(QuantumError::DimensionMismatch {
                expected: 2,
                found: ket.dim(),
            });
        }
        let a = ket.amplitudes();
        let two = T::lit(2.0);
        let cross = a[0].conj() * a[1];
        Ok(Self::new(
            two * cross.re,
            two * cross.im,
            a[0].norm_sqr() - a[1].norm_sqr(),
        ))
    }

    /// Bloch vector of a qubit projector: `c_i = Tr[P σ_i]`. Rank-one
    /// projectors give unit vectors, the identity and zero give the origin.
    pub fn from_projector(p: &Projector<T>) -> Result<Self, QuantumError> {
        if p.dim() != 2 {
            return Err(QuantumError::DimensionMismatch {
                expected: 2,
                found: p.dim(),
            });
        }
        let m = p.matrix();
        let two = T::lit(2.0);
        Ok(Self::new(
            two * m[(1, 0)].re,
            two * m[(1, 0)].im,
            m[(0, 0)].re - m[(1, 1)].re,
        ))
    }

    /// Pure qubit state `cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩` for this direction.
    pub fn to_ket(&self) -> Result<Ket<T>, QuantumError> {
        let n = self.norm();
        if n <= T::assembly_tol() {
            return Err(QuantumError::ZeroVector);
        }
        let theta = (self.z() / n).max(-T::one()).min(T::one()).acos();
        let phi = self.y().atan2(self.x());
        let half = theta / T::lit(2.0);
        Ket::normalized(vec![
            Complex::new(half.cos(), T::zero()),
            Complex::from_polar(half.sin(), phi),
        ])
    }

    pub fn projector(&self) -> Result<Projector<T>, QuantumError> {
        Ok(Projector::from_ket(&self.to_ket()?))
    }

    /// Any unit vector orthogonal to `self`.
    pub fn orthogonal_unit(&self) -> Self {
        let [x, y, z] = self.components.map(|c| c.abs());
        let seed = if x <= y && x <= z {
            Self::new(T::one(), T::zero(), T::zero())
        } else if y <= z {
            Self::new(T::zero(), T::one(), T::zero())
        } else {
            Self::new(T::zero(), T::zero(), T::one())
        };
        let c = self.cross(&seed);
        c.scaled(T::one() / c.norm())
    }
}

impl<T: Scalar> Neg for BlochVector<T> {
    type Output = Self;

    fn neg(self) -> Self {
        self.scaled(-T::one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn ket_round_trip() {
        for &(theta, phi) in &[(0.3, 1.1), (PI / 2.0, -2.0), (2.9, 0.0)] {
            let b = BlochVector::<f64>::from_angles(theta, phi);
            let back = BlochVector::from_ket(&b.to_ket().unwrap()).unwrap();
            assert!((back.x() - b.x()).abs() < 1e-14);
            assert!((back.y() - b.y()).abs() < 1e-14);
            assert!((back.z() - b.z()).abs() < 1e-14);
            let from_p = BlochVector::from_projector(&b.projector().unwrap()).unwrap();
            assert!((from_p.dot(&b) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn orthogonal_unit_is_orthogonal() {
        let b = BlochVector::<f64>::unit(0.2, -0.7, 0.4).unwrap();
        let o = b.orthogonal_unit();
        assert!(o.dot(&b).abs() < 1e-15);
        assert!(o.is_unit());
    }
}
