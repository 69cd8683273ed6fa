//! Integration and sampling on the unit sphere.
//!
//! The quadrature is a product rule: Gauss-Legendre in the polar angle of a
//! chosen frame times a rule in the azimuth. Integrands that jump across
//! great circles through the frame's polar axis declare those meridians as
//! azimuthal breakpoints; each smooth azimuthal segment then gets its own
//! Gauss-Legendre rule, so the jump costs no accuracy. Without breakpoints
//! the azimuth uses the periodic trapezoid rule.

use std::f64::consts::PI;

use rand::Rng;

use crate::quantum::BlochVector;
use crate::scalar::Scalar;

/// Gauss-Legendre rule on `[-1, 1]`.
#[derive(Clone, Debug)]
pub struct GaussLegendre<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Scalar> GaussLegendre<T> {
    /// Nodes by Newton iteration on `P_n`, started from the Chebyshev guess.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "Gauss-Legendre order must be positive");
        let n = order;
        let mut nodes = vec![0.0f64; n];
        let mut weights = vec![0.0f64; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self {
            nodes: nodes.into_iter().map(T::lit).collect(),
            weights: weights.into_iter().map(T::lit).collect(),
        }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// `∫_a^b f(x) dx`.
    pub fn integrate(&self, a: T, b: T, mut f: impl FnMut(T) -> T) -> T {
        let half = (b - a) / T::lit(2.0);
        let mid = (a + b) / T::lit(2.0);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum::<T>()
            * half
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let prev = if n == 0 { 0.0 } else { p0 };
    let d = n as f64 * (x * p - prev) / (x * x - 1.0);
    (p, d)
}

/// Right-handed orthonormal frame; `axis` is the polar direction.
#[derive(Clone, Copy, Debug)]
pub struct SphereFrame<T> {
    e1: BlochVector<T>,
    e2: BlochVector<T>,
    axis: BlochVector<T>,
}

impl<T: Scalar> SphereFrame<T> {
    pub fn new(axis: BlochVector<T>) -> Self {
        let axis = axis.scaled(T::one() / axis.norm());
        let e1 = axis.orthogonal_unit();
        let e2 = axis.cross(&e1);
        Self { e1, e2, axis }
    }

    pub fn standard() -> Self {
        Self {
            e1: BlochVector::new(T::one(), T::zero(), T::zero()),
            e2: BlochVector::new(T::zero(), T::one(), T::zero()),
            axis: BlochVector::new(T::zero(), T::zero(), T::one()),
        }
    }

    /// Frame whose polar axis is orthogonal to every given direction, so
    /// that the great circles orthogonal to them all pass through the
    /// poles. Exists for at most two independent directions.
    pub fn containing_great_circles(normals: &[BlochVector<T>]) -> Self {
        let tol = T::lit(1e-9);
        match normals {
            [] => Self::standard(),
            [n] => Self::new(n.orthogonal_unit()),
            [a, b, ..] => {
                let c = a.cross(b);
                if c.norm() > tol {
                    Self::new(c)
                } else {
                    Self::new(a.orthogonal_unit())
                }
            }
        }
    }

    pub fn axis(&self) -> BlochVector<T> {
        self.axis
    }

    pub fn point(&self, theta: T, phi: T) -> BlochVector<T> {
        let (st, ct) = (theta.sin(), theta.cos());
        let (sp, cp) = (phi.sin(), phi.cos());
        let comp = |k: usize| {
            st * cp * self.e1.components()[k]
                + st * sp * self.e2.components()[k]
                + ct * self.axis.components()[k]
        };
        BlochVector::new(comp(0), comp(1), comp(2))
    }

    /// Azimuths of the two meridians forming the great circle `n · v = 0`,
    /// or `None` if that circle does not pass through the poles.
    pub fn great_circle_breaks(&self, normal: &BlochVector<T>) -> Option<[T; 2]> {
        let n = normal.scaled(T::one() / normal.norm());
        if n.dot(&self.axis).abs() > T::lit(1e-9) {
            return None;
        }
        let d = self.axis.cross(&n);
        let phi = d.dot(&self.e2).atan2(d.dot(&self.e1));
        Some([phi, phi + T::PI()])
    }
}

/// Product quadrature order on the sphere.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SphereQuadrature {
    pub polar: usize,
    pub azimuth: usize,
}

impl Default for SphereQuadrature {
    fn default() -> Self {
        Self {
            polar: 64,
            azimuth: 128,
        }
    }
}

/// Integral value with the doubled-order residual.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureValue<T> {
    pub value: T,
    pub residual: T,
}

impl SphereQuadrature {
    pub fn new(polar: usize, azimuth: usize) -> Self {
        Self { polar, azimuth }
    }

    pub fn doubled(&self) -> Self {
        Self {
            polar: 2 * self.polar,
            azimuth: 2 * self.azimuth,
        }
    }

    /// `∫ f dΩ` over the unit sphere. `breaks` are azimuths (in `frame`) of
    /// meridians across which `f` may jump.
    pub fn integrate<T: Scalar>(
        &self,
        frame: &SphereFrame<T>,
        breaks: &[T],
        f: &dyn Fn(&BlochVector<T>) -> T,
    ) -> T {
        let polar_rule = GaussLegendre::<T>::new(self.polar);
        let segments = azimuth_segments(breaks, self.azimuth);
        let two_pi = T::lit(2.0 * PI);
        polar_rule.integrate(T::zero(), T::PI(), |theta| {
            let st = theta.sin();
            let ring = match &segments {
                None => {
                    let m = self.azimuth;
                    let h = two_pi / T::from_usize(m).unwrap();
                    (0..m)
                        .map(|k| f(&frame.point(theta, h * T::from_usize(k).unwrap())))
                        .sum::<T>()
                        * h
                }
                Some(segs) => segs
                    .iter()
                    .map(|(a, b, rule)| rule.integrate(*a, *b, |phi| f(&frame.point(theta, phi))))
                    .sum(),
            };
            st * ring
        })
    }

    /// Integrates at this order and at double order; the residual is their gap.
    pub fn integrate_with_residual<T: Scalar>(
        &self,
        frame: &SphereFrame<T>,
        breaks: &[T],
        f: &dyn Fn(&BlochVector<T>) -> T,
    ) -> QuadratureValue<T> {
        let value = self.integrate(frame, breaks, f);
        let fine = self.doubled().integrate(frame, breaks, f);
        QuadratureValue {
            value,
            residual: (fine - value).abs(),
        }
    }
}

impl SphereQuadrature {
    /// Integrates `f` whose jumps lie on the great circles `n · v = 0` for the
    /// given normals (at most two independent ones are resolved exactly).
    pub fn integrate_across<T: Scalar>(
        &self,
        normals: &[BlochVector<T>],
        f: &dyn Fn(&BlochVector<T>) -> T,
    ) -> QuadratureValue<T> {
        let frame = SphereFrame::containing_great_circles(normals);
        let breaks: Vec<T> = normals
            .iter()
            .filter_map(|n| frame.great_circle_breaks(n))
            .flatten()
            .collect();
        self.integrate_with_residual(&frame, &breaks, f)
    }
}

type Segment<T> = (T, T, GaussLegendre<T>);

/// Splits `[φ0, φ0 + 2π)` at the sorted breakpoints, giving each piece a
/// Gauss-Legendre rule with a share of `total` nodes proportional to its length.
fn azimuth_segments<T: Scalar>(breaks: &[T], total: usize) -> Option<Vec<Segment<T>>> {
    if breaks.is_empty() {
        return None;
    }
    let two_pi = T::lit(2.0 * PI);
    let mut cuts: Vec<T> = breaks
        .iter()
        .map(|&b| {
            let r = b % two_pi;
            if r < T::zero() {
                r + two_pi
            } else {
                r
            }
        })
        .collect();
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup_by(|a, b| (*a - *b).abs() < T::lit(1e-14));
    let first = cuts[0];
    cuts.push(first + two_pi);
    let mut segs = Vec::with_capacity(cuts.len() - 1);
    for w in cuts.windows(2) {
        let len = w[1] - w[0];
        if len <= T::lit(1e-14) {
            continue;
        }
        let share = (T::from_usize(total).unwrap() * len / two_pi)
            .ceil()
            .to_usize()
            .unwrap_or(1);
        segs.push((w[0], w[1], GaussLegendre::new(share.max(4))));
    }
    Some(segs)
}

/// Draws `v` with density `(1/π) max(v·b, 0)`: `cos θ = √u` about `b`,
/// azimuth uniform.
pub fn sample_cosine_hemisphere<T: Scalar, R: Rng + ?Sized>(
    frame: &SphereFrame<T>,
    rng: &mut R,
) -> BlochVector<T> {
    let u: f64 = rng.random();
    let phi: f64 = rng.random::<f64>() * 2.0 * PI;
    let cos_theta = u.sqrt();
    frame.point(T::lit(cos_theta.acos()), T::lit(phi))
}

/// Uniform point on the sphere.
pub fn sample_uniform<T: Scalar, R: Rng + ?Sized>(rng: &mut R) -> BlochVector<T> {
    let z: f64 = 2.0 * rng.random::<f64>() - 1.0;
    let phi: f64 = rng.random::<f64>() * 2.0 * PI;
    SphereFrame::standard().point(T::lit(z.acos()), T::lit(phi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        let gl = GaussLegendre::<f64>::new(8);
        // degree 15 is the highest exactly integrated by 8 nodes
        let v = gl.integrate(-1.0, 1.0, |x| x.powi(14) + x.powi(15));
        assert!((v - 2.0 / 15.0).abs() < 1e-14);
        assert!((gl.weights().iter().sum::<f64>() - 2.0).abs() < 1e-14);
        let gl64 = GaussLegendre::<f64>::new(64);
        assert!((gl64.integrate(0.0, PI, f64::sin) - 2.0).abs() < 1e-13);
    }

    #[test]
    fn sphere_area_and_hemisphere_cosine() {
        let q = SphereQuadrature::default();
        let frame = SphereFrame::<f64>::standard();
        let area = q.integrate(&frame, &[], &|_| 1.0);
        assert!((area - 4.0 * PI).abs() < 1e-12);

        let b = BlochVector::<f64>::unit(1.0, 2.0, -0.5).unwrap();
        let frame = SphereFrame::containing_great_circles(&[b]);
        let breaks = frame.great_circle_breaks(&b).unwrap();
        let cosine = q.integrate(&frame, &breaks, &|v| v.dot(&b).max(0.0));
        assert!((cosine - PI).abs() < 1e-12);
    }

    #[test]
    fn lune_area_with_declared_breaks() {
        // Intersection of two hemispheres at angle α has area 2(π − α).
        let q = SphereQuadrature::default();
        for alpha in [0.3, PI / 2.0, 2.5] {
            let b = BlochVector::<f64>::new(0.0, 0.0, 1.0);
            let c = BlochVector::from_angles(alpha, 0.4);
            let frame = SphereFrame::containing_great_circles(&[b, c]);
            let mut breaks = frame.great_circle_breaks(&b).unwrap().to_vec();
            breaks.extend(frame.great_circle_breaks(&c).unwrap());
            let area = q.integrate(&frame, &breaks, &|v| {
                if v.dot(&b) > 0.0 && v.dot(&c) > 0.0 {
                    1.0
                } else {
                    0.0
                }
            });
            assert!(
                (area - 2.0 * (PI - alpha)).abs() < 1e-12,
                "alpha {alpha}: {area}"
            );
        }
    }

    #[test]
    fn cosine_sampler_moments() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let b = BlochVector::<f64>::unit(0.3, -0.4, 0.8).unwrap();
        let frame = SphereFrame::new(b);
        let n = 200_000;
        let mut mean = 0.0;
        for _ in 0..n {
            let v = sample_cosine_hemisphere(&frame, &mut rng);
            let c = v.dot(&b);
            assert!(c >= 0.0);
            mean += c;
        }
        mean /= n as f64;
        // E[cos θ] under density cos θ / π is 2/3
        assert!((mean - 2.0 / 3.0).abs() < 4.0 * (1.0f64 / 18.0 / n as f64).sqrt());
    }
}
