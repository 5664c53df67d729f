//! Ellipticity constants and the distance `d(A) = min_{t≥0} ‖I − tA‖_∞`.
//!
//! Essential sup/inf over space are taken as max/min over the sample set.

mod mollify;

pub use mollify::{mollifier_weights, mollify};

use serde::Serialize;

use crate::coeff::MatrixField;
use crate::error::{Error, Result};
use crate::linalg;
use crate::optimize::golden_section;

/// Golden-section stopping width, relative to the search interval `[0, 2/Λ]`.
pub const T_TOL_REL: f64 = 1e-12;

/// Slack allowed on the inequalities checked by [`verify_sandwich`].
pub const SANDWICH_TOL: f64 = 1e-10;
/// Tolerance on the Hermitian equality case of the sandwich.
pub const HERMITIAN_EQ_TOL: f64 = 1e-8;

/// `λ(A)`: least eigenvalue of the Hermitian part, minimized over samples.
/// May be `<= 0` for non-elliptic fields.
pub fn lambda_min(field: &MatrixField) -> f64 {
    field
        .samples()
        .iter()
        .map(linalg::min_real_part_eigen)
        .fold(f64::INFINITY, f64::min)
}

/// `Λ(A)`: largest operator norm over samples.
pub fn lambda_max(field: &MatrixField) -> f64 {
    field.samples().iter().map(linalg::op_norm).fold(0.0, f64::max)
}

/// `g(t) = max_x ‖I − t·A(x)‖`, convex in `t`.
pub fn distance_profile(field: &MatrixField, t: f64) -> f64 {
    field
        .samples()
        .iter()
        .map(|m| linalg::shifted_norm(m, t))
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Distance {
    pub dist: f64,
    pub t_star: f64,
}

/// Minimize `g` over `[0, 2/Λ]`. The upper end is safe because
/// `t*·Λ ≤ 1 + d(A) < 2` for every minimizer.
pub fn distance(field: &MatrixField) -> Result<Distance> {
    let lambda = lambda_min(field);
    if !(lambda > 0.0) {
        return Err(Error::NotElliptic { lambda });
    }
    let big = lambda_max(field);
    let hi = 2.0 / big;
    let m = golden_section(|t| distance_profile(field, t), 0.0, hi, T_TOL_REL * hi);
    Ok(Distance {
        dist: m.value,
        t_star: m.x,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EllipticityReport {
    pub lambda: f64,
    #[serde(rename = "Lambda")]
    pub big_lambda: f64,
    pub rho: f64,
    pub dist: f64,
    pub t_star: f64,
}

pub fn ellipticity_report(field: &MatrixField) -> Result<EllipticityReport> {
    let lambda = lambda_min(field);
    if !(lambda > 0.0) {
        return Err(Error::NotElliptic { lambda });
    }
    let big_lambda = lambda_max(field);
    let Distance { dist, t_star } = distance(field)?;
    Ok(EllipticityReport {
        lambda,
        big_lambda,
        rho: lambda / big_lambda,
        dist,
        t_star,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SandwichReport {
    pub rho: f64,
    /// `(1−ρ)/(1+ρ)`
    pub lower: f64,
    pub dist: f64,
    /// `sqrt(1−ρ²)`
    pub upper: f64,
    pub lower_slack: f64,
    pub upper_slack: f64,
    pub hermitian: bool,
}

/// Check `(1−ρ)/(1+ρ) ≤ d(A) ≤ sqrt(1−ρ²)`, with equality on the left for
/// pointwise Hermitian fields.
pub fn verify_sandwich(field: &MatrixField) -> Result<SandwichReport> {
    let rep = ellipticity_report(field)?;
    let rho = rep.rho;
    let lower = (1.0 - rho) / (1.0 + rho);
    let upper = (1.0 - rho * rho).max(0.0).sqrt();
    let hermitian = field.is_hermitian(1e-14);
    let out = SandwichReport {
        rho,
        lower,
        dist: rep.dist,
        upper,
        lower_slack: rep.dist - lower,
        upper_slack: upper - rep.dist,
        hermitian,
    };
    if out.lower_slack < -SANDWICH_TOL || out.upper_slack < -SANDWICH_TOL {
        return Err(Error::Invariant(format!(
            "sandwich violated: {lower} <= {} <= {upper} fails",
            rep.dist
        )));
    }
    if hermitian && out.lower_slack.abs() > HERMITIAN_EQ_TOL {
        return Err(Error::Invariant(format!(
            "Hermitian field but d(A) = {} differs from (1-rho)/(1+rho) = {lower}",
            rep.dist
        )));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::{constant_field, sample, Domain, MatrixField};
    use crate::linalg::{identity, CMatrix};
    use nalgebra::DVector;
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn diag(v: &[f64]) -> CMatrix {
        CMatrix::from_diagonal(&DVector::from_iterator(v.len(), v.iter().map(|&x| Complex64::from(x))))
    }

    #[test]
    fn identity_field() {
        let f = constant_field(3, 1, identity(3)).unwrap();
        assert_eq!(lambda_min(&f), 1.0);
        assert!((lambda_max(&f) - 1.0).abs() < 1e-15);
        let d = distance(&f).unwrap();
        assert!(d.dist < 1e-10, "{d:?}");
        assert!((d.t_star - 1.0).abs() < 1e-10);
        assert!((distance_profile(&f, 0.0) - 1.0).abs() < 1e-15);
        let s = verify_sandwich(&f).unwrap();
        assert!(s.lower.abs() < 1e-15 && s.upper.abs() < 1e-7 && s.rho == 1.0);
    }

    #[test]
    fn diagonal_closed_form() {
        let f = constant_field(3, 1, diag(&[1.0, 2.0, 3.0])).unwrap();
        assert!((lambda_min(&f) - 1.0).abs() < 1e-14);
        assert!((lambda_max(&f) - 3.0).abs() < 1e-14);
        let d = distance(&f).unwrap();
        assert!((d.dist - 0.5).abs() < 1e-10);
        assert!((d.t_star - 0.5).abs() < 1e-9);
    }

    #[test]
    fn two_sample_hermitian_field_is_lower_bound() {
        // diag(1,·) and diag(2,·) samples: λ=1, Λ=2, d = 1/3
        let f = MatrixField::new(
            3,
            1,
            Domain::Points {
                coords: vec![vec![0.0; 3], vec![1.0; 3]],
            },
            vec![identity(3), identity(3).scale(2.0)],
        )
        .unwrap();
        let s = verify_sandwich(&f).unwrap();
        assert!((s.dist - 1.0 / 3.0).abs() < 1e-10);
        assert!((s.lower - 1.0 / 3.0).abs() < 1e-15);
        assert!(s.hermitian);
    }

    #[test]
    fn non_elliptic_is_rejected() {
        let f = constant_field(3, 1, diag(&[1.0, -1.0, 2.0])).unwrap();
        assert!(matches!(distance(&f), Err(Error::NotElliptic { .. })));
    }

    #[test]
    fn report_invariants_on_random_fields() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let m = sample::random_elliptic(6, 0.3, 2.0, 1.0, &mut rng);
            let f = constant_field(3, 2, m).unwrap();
            let r = ellipticity_report(&f).unwrap();
            assert!(r.dist < 1.0 && r.dist >= 0.0);
            assert!((r.rho - r.lambda / r.big_lambda).abs() < 1e-15);
            assert!(r.t_star * r.lambda >= 1.0 - r.dist - 1e-9);
            assert!(r.t_star * r.big_lambda <= 1.0 + r.dist + 1e-9);
        }
    }
}
