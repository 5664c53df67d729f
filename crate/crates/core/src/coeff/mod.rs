//! Sampled coefficient fields `x ↦ A(x) ∈ L((ℂᴺ)ᵈ)`.
//!
//! A sample is a complex `(d·N)×(d·N)` matrix whose row index `(i, α)` is
//! flattened as `k = i·N + α` (spatial index major); columns `(j, β)` use the
//! same convention. Torus samples are stored in row-major grid order with the
//! last axis varying fastest.

mod io;
pub mod sample;

pub use io::{data_section, load_field, save_field, to_json_string, FORMAT_VERSION};

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::linalg::{self, CMatrix};

#[derive(Debug, Clone, PartialEq)]
pub enum Domain {
    /// Periodic grid with `n` samples per axis on a cube of side `side`.
    Torus { n: usize, side: f64 },
    /// Scattered sample points, one coordinate vector per sample.
    Points { coords: Vec<Vec<f64>> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixField {
    d: usize,
    n_comp: usize,
    domain: Domain,
    samples: Vec<CMatrix>,
}

impl MatrixField {
    /// Validating constructor; every other constructor goes through here.
    pub fn new(d: usize, n_comp: usize, domain: Domain, samples: Vec<CMatrix>) -> Result<Self> {
        if d < 3 {
            return Err(invalid("d", format!("spatial dimension must be >= 3, got {d}")));
        }
        if n_comp < 1 {
            return Err(invalid("N", "system size must be >= 1"));
        }
        let dn = d * n_comp;
        match &domain {
            Domain::Torus { n, side } => {
                if *n < 2 {
                    return Err(invalid("n", format!("torus needs n >= 2, got {n}")));
                }
                if !(side.is_finite() && *side > 0.0) {
                    return Err(invalid("side", format!("torus side must be > 0, got {side}")));
                }
                let expected = n.checked_pow(d as u32).ok_or_else(|| invalid("n", "grid too large"))?;
                if samples.len() != expected {
                    return Err(Error::DimensionMismatch(format!(
                        "torus with n={n}, d={d} needs {expected} samples, got {}",
                        samples.len()
                    )));
                }
            }
            Domain::Points { coords } => {
                if coords.len() != samples.len() {
                    return Err(Error::DimensionMismatch(format!(
                        "{} coordinates for {} samples",
                        coords.len(),
                        samples.len()
                    )));
                }
                if let Some((k, c)) = coords.iter().enumerate().find(|(_, c)| c.len() != d) {
                    return Err(Error::DimensionMismatch(format!(
                        "coordinate {k} has length {}, expected {d}",
                        c.len()
                    )));
                }
                if coords.iter().flatten().any(|x| !x.is_finite()) {
                    return Err(invalid("coords", "sample coordinates must be finite"));
                }
            }
        }
        if samples.is_empty() {
            return Err(invalid("samples", "field has no samples"));
        }
        for (s, m) in samples.iter().enumerate() {
            if m.nrows() != dn || m.ncols() != dn {
                return Err(Error::DimensionMismatch(format!(
                    "sample {s} is {}x{}, expected {dn}x{dn}",
                    m.nrows(),
                    m.ncols()
                )));
            }
            check_finite(s, m)?;
        }
        Ok(Self {
            d,
            n_comp,
            domain,
            samples,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// System size `N`.
    pub fn n_comp(&self) -> usize {
        self.n_comp
    }

    /// Block size `d·N`.
    pub fn block(&self) -> usize {
        self.d * self.n_comp
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn samples(&self) -> &[CMatrix] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// `(n, side)` for torus fields.
    pub fn torus(&self) -> Option<(usize, f64)> {
        match self.domain {
            Domain::Torus { n, side } => Some((n, side)),
            Domain::Points { .. } => None,
        }
    }

    /// Entry `A^{αβ}_{ij}` of sample `s`.
    pub fn entry(&self, s: usize, i: usize, alpha: usize, j: usize, beta: usize) -> Complex64 {
        let n = self.n_comp;
        self.samples[s][(i * n + alpha, j * n + beta)]
    }

    /// Same domain, samples replaced by `f(sample)`.
    pub fn map_samples(&self, f: impl Fn(&CMatrix) -> CMatrix) -> Result<Self> {
        Self::new(
            self.d,
            self.n_comp,
            self.domain.clone(),
            self.samples.iter().map(f).collect(),
        )
    }

    /// Pointwise adjoint field `A*`.
    pub fn adjoint(&self) -> Self {
        Self {
            samples: self.samples.iter().map(|m| m.adjoint()).collect(),
            ..self.clone()
        }
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        self.map_samples(|m| m.scale(c))
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.samples.iter().all(|m| linalg::is_hermitian(m, tol))
    }

    /// Build a field from known entries `A^{αβ}_{ij}(s)`.
    pub fn from_entries(
        d: usize,
        n_comp: usize,
        domain: Domain,
        count: usize,
        entry: impl Fn(usize, usize, usize, usize, usize) -> Complex64,
    ) -> Result<Self> {
        let dn = d * n_comp;
        let samples = (0..count)
            .map(|s| {
                CMatrix::from_fn(dn, dn, |r, c| {
                    entry(s, r / n_comp, r % n_comp, c / n_comp, c % n_comp)
                })
            })
            .collect();
        Self::new(d, n_comp, domain, samples)
    }
}

fn check_finite(sample: usize, m: &CMatrix) -> Result<()> {
    let dn = m.ncols();
    for r in 0..m.nrows() {
        for c in 0..dn {
            let z = m[(r, c)];
            let part = if !z.re.is_finite() {
                "real"
            } else if !z.im.is_finite() {
                "imaginary"
            } else {
                continue;
            };
            return Err(Error::NonFinite {
                sample,
                flat_index: r * dn + c,
                part,
            });
        }
    }
    Ok(())
}

/// Single-sample field for a constant-coefficient operator, placed at the origin.
pub fn constant_field(d: usize, n_comp: usize, matrix: CMatrix) -> Result<MatrixField> {
    let dn = d * n_comp;
    if matrix.nrows() != dn || matrix.ncols() != dn {
        return Err(Error::DimensionMismatch(format!(
            "constant matrix is {}x{}, expected {dn}x{dn}",
            matrix.nrows(),
            matrix.ncols()
        )));
    }
    MatrixField::new(
        d,
        n_comp,
        Domain::Points {
            coords: vec![vec![0.0; d]],
        },
        vec![matrix],
    )
}

/// Constant field sampled on a torus grid.
pub fn constant_torus(d: usize, n_comp: usize, matrix: CMatrix, n: usize, side: f64) -> Result<MatrixField> {
    let count = n.checked_pow(d as u32).ok_or_else(|| invalid("n", "grid too large"))?;
    MatrixField::new(d, n_comp, Domain::Torus { n, side }, vec![matrix; count])
}

/// Extend a field given on a bounded set by `(t*)⁻¹·I` without changing its
/// ellipticity distance.
///
/// Torus fields are embedded as the lower-corner block of a torus with twice
/// as many samples per axis and twice the side; point fields receive one
/// padding sample outside their bounding box.
pub fn extend_constant(field: &MatrixField, t_star: f64) -> Result<MatrixField> {
    if !(t_star.is_finite() && t_star > 0.0) {
        return Err(invalid("t_star", format!("must be > 0, got {t_star}")));
    }
    let dn = field.block();
    let pad = linalg::identity(dn).scale(1.0 / t_star);
    let d = field.d();
    match field.domain() {
        Domain::Torus { n, side } => {
            let big = 2 * n;
            let count = big.pow(d as u32);
            let mut samples = Vec::with_capacity(count);
            let mut idx = vec![0usize; d];
            for _ in 0..count {
                if idx.iter().all(|&k| k < *n) {
                    let small = idx.iter().fold(0, |acc, &k| acc * n + k);
                    samples.push(field.samples()[small].clone());
                } else {
                    samples.push(pad.clone());
                }
                for ax in (0..d).rev() {
                    idx[ax] += 1;
                    if idx[ax] < big {
                        break;
                    }
                    idx[ax] = 0;
                }
            }
            MatrixField::new(d, field.n_comp(), Domain::Torus { n: big, side: 2.0 * side }, samples)
        }
        Domain::Points { coords } => {
            let mut coords = coords.clone();
            let outside: Vec<f64> = (0..d)
                .map(|ax| coords.iter().map(|c| c[ax]).fold(f64::NEG_INFINITY, f64::max) + 1.0)
                .collect();
            coords.push(outside);
            let mut samples = field.samples().to_vec();
            samples.push(pad);
            MatrixField::new(d, field.n_comp(), Domain::Points { coords }, samples)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_low_dimension_and_bad_sizes() {
        assert!(constant_field(2, 1, linalg::identity(2)).is_err());
        assert!(constant_field(3, 1, linalg::identity(4)).is_err());
        assert!(constant_torus(3, 1, linalg::identity(3), 1, 1.0).is_err());
        assert!(constant_torus(3, 1, linalg::identity(3), 2, 0.0).is_err());
    }

    #[test]
    fn identity_torus_has_eight_samples() {
        let f = constant_torus(3, 1, linalg::identity(3), 2, 1.0).unwrap();
        assert_eq!(f.len(), 8);
        assert!(f.samples().iter().all(|m| *m == linalg::identity(3)));
    }

    #[test]
    fn nan_entry_names_flat_index() {
        let mut m = linalg::identity(3);
        m[(1, 2)] = Complex64::new(f64::NAN, 0.0);
        match constant_field(3, 1, m) {
            Err(Error::NonFinite {
                sample, flat_index, ..
            }) => {
                assert_eq!(sample, 0);
                assert_eq!(flat_index, 5);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn flattening_reads_back_entries() {
        let (d, n) = (3, 2);
        let code = |i: usize, a: usize, j: usize, b: usize| {
            Complex64::new((1000 * i + 100 * a + 10 * j + b) as f64, i as f64 - b as f64)
        };
        let f = MatrixField::from_entries(d, n, Domain::Points { coords: vec![vec![0.0; 3]] }, 1, |_, i, a, j, b| {
            code(i, a, j, b)
        })
        .unwrap();
        for i in 0..d {
            for a in 0..n {
                for j in 0..d {
                    for b in 0..n {
                        assert_eq!(f.samples()[0][(i * n + a, j * n + b)], code(i, a, j, b));
                        assert_eq!(f.entry(0, i, a, j, b), code(i, a, j, b));
                    }
                }
            }
        }
    }

    #[test]
    fn extend_torus_pads_with_scaled_identity() {
        let f = constant_torus(3, 1, linalg::identity(3).scale(2.0), 2, 1.0).unwrap();
        let e = extend_constant(&f, 0.8).unwrap();
        assert_eq!(e.torus(), Some((4, 2.0)));
        assert_eq!(e.len(), 64);
        let pads = e
            .samples()
            .iter()
            .filter(|m| linalg::max_abs_entry_diff(m, &linalg::identity(3).scale(1.25)) < 1e-15)
            .count();
        assert_eq!(pads, 56);
        assert!(extend_constant(&f, 0.0).is_err());
    }
}
