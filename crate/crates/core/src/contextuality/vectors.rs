//! Vector sets for coloring experiments and their text format.
//!
//! ```text
//! # comment
//! dim n_vectors n_bases
//! <n_vectors lines of dim components>
//! <n_bases lines of dim 0-based vector indices>
//! ```
//!
//! Components are real numbers or complex numbers written `a+bi`, `a-bi`
//! or `bi` without spaces.

use std::path::Path;

use num_complex::Complex;

use super::ContextualityError;
use crate::{Ket64, Ray64};

/// Orthogonality tolerance inside a basis.
pub const ORTHOGONALITY_TOL: f64 = 1e-10;

/// The bundled uncolorable set in dimension 4 (18 vectors, 9 bases).
pub const KS18_DIM4: &str = include_str!("../../data/ks18_dim4.txt");

#[derive(Clone, Debug, PartialEq)]
pub struct VectorSet {
    dim: usize,
    vectors: Vec<Ray64>,
    bases: Vec<Vec<usize>>,
}

impl VectorSet {
    /// Checks that every basis has `dim` distinct in-range members that are
    /// pairwise orthogonal.
    pub fn new(
        dim: usize,
        vectors: Vec<Ray64>,
        bases: Vec<Vec<usize>>,
    ) -> Result<Self, ContextualityError> {
        if let Some((i, v)) = vectors.iter().enumerate().find(|(_, v)| v.dim() != dim) {
            return Err(ContextualityError::Malformed(format!(
                "vector {i} has dimension {}, expected {dim}",
                v.dim()
            )));
        }
        for (b, basis) in bases.iter().enumerate() {
            if basis.len() != dim {
                return Err(ContextualityError::Malformed(format!(
                    "basis {b} has {} members, expected {dim}",
                    basis.len()
                )));
            }
            if let Some(&i) = basis.iter().find(|&&i| i >= vectors.len()) {
                return Err(ContextualityError::Malformed(format!(
                    "basis {b} refers to vector {i} of {}",
                    vectors.len()
                )));
            }
            for (x, &i) in basis.iter().enumerate() {
                for &j in &basis[x + 1..] {
                    if i == j {
                        return Err(ContextualityError::Malformed(format!(
                            "basis {b} repeats vector {i}"
                        )));
                    }
                    let overlap = vectors[i].ket().inner(vectors[j].ket()).norm();
                    if overlap > ORTHOGONALITY_TOL {
                        return Err(ContextualityError::NotOrthogonal {
                            basis: b,
                            i,
                            j,
                            overlap,
                        });
                    }
                }
            }
        }
        Ok(Self {
            dim,
            vectors,
            bases,
        })
    }

    /// The bundled dimension-4 set.
    pub fn ks18() -> Self {
        Self::parse(KS18_DIM4).expect("bundled vector set is valid")
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, ContextualityError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| ContextualityError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ContextualityError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(n, l)| (n + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (n, header) = lines
            .next()
            .ok_or_else(|| ContextualityError::Malformed("empty vector-set file".into()))?;
        let head: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse())
            .collect::<Result<_, _>>()
            .map_err(|e| ContextualityError::Malformed(format!("line {n}: bad header: {e}")))?;
        let [dim, n_vectors, n_bases] = head[..] else {
            return Err(ContextualityError::Malformed(format!(
                "line {n}: header must be `dim n_vectors n_bases`"
            )));
        };
        let mut vectors = Vec::with_capacity(n_vectors);
        for _ in 0..n_vectors {
            let (n, line) = lines.next().ok_or_else(|| {
                ContextualityError::Malformed(format!("expected {n_vectors} vectors"))
            })?;
            let amps = line
                .split_whitespace()
                .map(parse_complex)
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| {
                    ContextualityError::Malformed(format!("line {n}: bad component in `{line}`"))
                })?;
            if amps.len() != dim {
                return Err(ContextualityError::Malformed(format!(
                    "line {n}: {} components, expected {dim}",
                    amps.len()
                )));
            }
            let ket = Ket64::normalized(amps)
                .map_err(|e| ContextualityError::Malformed(format!("line {n}: {e}")))?;
            vectors.push(ket.ray());
        }
        let mut bases = Vec::with_capacity(n_bases);
        for _ in 0..n_bases {
            let (n, line) = lines.next().ok_or_else(|| {
                ContextualityError::Malformed(format!("expected {n_bases} bases"))
            })?;
            let idx = line
                .split_whitespace()
                .map(|t| t.parse::<usize>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| ContextualityError::Malformed(format!("line {n}: {e}")))?;
            bases.push(idx);
        }
        if let Some((n, _)) = lines.next() {
            return Err(ContextualityError::Malformed(format!(
                "line {n}: trailing content"
            )));
        }
        Self::new(dim, vectors, bases)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vectors(&self) -> &[Ray64] {
        &self.vectors
    }

    pub fn bases(&self) -> &[Vec<usize>] {
        &self.bases
    }

    /// Number of bases containing each vector.
    pub fn memberships(&self) -> Vec<usize> {
        let mut m = vec![0; self.vectors.len()];
        for b in &self.bases {
            for &i in b {
                m[i] += 1;
            }
        }
        m
    }
}

/// Parses a real number or a complex number written `a+bi`, `a-bi` or `bi`.
pub fn parse_complex(token: &str) -> Option<Complex<f64>> {
    let Some(body) = token.strip_suffix('i') else {
        return token.parse::<f64>().ok().map(|x| Complex::new(x, 0.0));
    };
    // split at the last sign that is neither leading nor part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let imag = |s: &str| match s {
        "" | "+" => Some(1.0),
        "-" => Some(-1.0),
        s => s.parse::<f64>().ok(),
    };
    match split {
        Some(k) => Some(Complex::new(body[..k].parse().ok()?, imag(&body[k..])?)),
        None => Some(Complex::new(0.0, imag(body)?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_set_structure() {
        let s = VectorSet::ks18();
        assert_eq!((s.dim(), s.vectors().len(), s.bases().len()), (4, 18, 9));
        // every vector in exactly two bases: the parity obstruction
        assert!(s.memberships().iter().all(|&m| m == 2));
    }

    #[test]
    fn parses_complex_components() {
        assert_eq!(parse_complex("0.5"), Some(Complex::new(0.5, 0.0)));
        assert_eq!(parse_complex("1-2i"), Some(Complex::new(1.0, -2.0)));
        assert_eq!(parse_complex("-i"), Some(Complex::new(0.0, -1.0)));
        assert_eq!(parse_complex("1e-3+1e-3i"), Some(Complex::new(1e-3, 1e-3)));
        assert_eq!(parse_complex("x"), None);
        let s = VectorSet::parse("2 2 1\n1 i\n1 -i\n0 1\n").unwrap();
        assert_eq!(s.bases().len(), 1);
    }

    #[test]
    fn rejects_malformed_sets() {
        assert!(matches!(
            VectorSet::parse("2 2 1\n1 0\n1 1\n0 1\n"),
            Err(ContextualityError::NotOrthogonal { .. })
        ));
        assert!(VectorSet::parse("2 2 1\n1 0\n0 1\n0 2\n").is_err());
        assert!(VectorSet::parse("2 2 1\n1 0\n0 1\n0\n").is_err());
        assert!(VectorSet::parse("3 1\n").is_err());
        assert!(VectorSet::parse("2 2 1\n1 0\n0 1\n0 1\n5 5\n").is_err());
    }
}
