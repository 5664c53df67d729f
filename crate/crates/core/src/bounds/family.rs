use num_complex::Complex64;
use serde::Serialize;

use super::{delta, sobolev_conjugate};
use crate::coeff::MatrixField;
use crate::ellipticity::distance;
use crate::error::{invalid, Result};
use crate::linalg;

/// `A_z = τ(I − F(z)·B)` with `F(z) = r^{1−z} R^z` and `B = I − t*·A`.
#[derive(Debug, Clone, Serialize)]
pub struct InterpolationFamily {
    pub d: usize,
    pub tau: f64,
    pub t_star: f64,
    pub dist: f64,
    #[serde(skip)]
    pub b: MatrixField,
    pub r: f64,
    #[serde(rename = "R")]
    pub big_r: f64,
    pub eps: f64,
    pub theta: f64,
}

impl InterpolationFamily {
    /// `F(z) = r^{1−z} R^z`.
    pub fn f(&self, z: Complex64) -> Complex64 {
        ((Complex64::new(1.0, 0.0) - z) * self.r.ln() + z * self.big_r.ln()).exp()
    }

    /// `2*/θ`, which tends to the `p₊` lower bound as `eps → 0`.
    pub fn p_bound(&self) -> f64 {
        sobolev_conjugate(self.d).expect("family built with valid d") / self.theta
    }
}

pub fn build_family(field: &MatrixField, eps: f64) -> Result<InterpolationFamily> {
    let d = field.d();
    let delta = delta(d)?;
    let dd = distance(field)?;
    if dd.dist < delta {
        return Err(invalid(
            "field",
            format!("dist = {} < delta({d}) = {delta}: subcritical, no interpolation needed", dd.dist),
        ));
    }
    if !(eps > 0.0 && eps < 1.0 - dd.dist) {
        return Err(invalid("eps", format!("must lie in (0, {}), got {eps}", 1.0 - dd.dist)));
    }
    let t = dd.t_star;
    let dn = field.block();
    let id = linalg::identity(dn);
    let b = field.map_samples(|a| &id - a.scale(t))?;
    let r = delta / (dd.dist + eps);
    let big_r = 1.0 / (dd.dist + eps);
    let theta = 1.0 - big_r.ln() / (big_r / r).ln();
    Ok(InterpolationFamily {
        d,
        tau: 1.0 / t,
        t_star: t,
        dist: dd.dist,
        b,
        r,
        big_r,
        eps,
        theta,
    })
}

/// Sample `A_z`. `z` must lie in the closed strip `0 ≤ Re z ≤ 1` unless
/// `allow_wide` is set.
pub fn family_matrix(family: &InterpolationFamily, z: Complex64, allow_wide: bool) -> Result<MatrixField> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(invalid("z", "must be finite"));
    }
    if !allow_wide && !(0.0..=1.0).contains(&z.re) {
        return Err(invalid("z", format!("Re z = {} outside [0, 1]", z.re)));
    }
    let fz = family.f(z);
    let id = linalg::identity(family.b.block());
    let tau = Complex64::from(family.tau);
    family.b.map_samples(|b| (&id - b * fz) * tau)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::p_plus_lower;
    use crate::coeff::{constant_field, sample};
    use crate::linalg::max_abs_entry_diff;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Hermitian constant field with dist = 0.9: spectrum [1, 19].
    fn field_09() -> MatrixField {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        constant_field(3, 1, sample::random_hermitian(3, 1.0, 19.0, &mut rng)).unwrap()
    }

    #[test]
    fn theta_balances_r_and_big_r() {
        let fam = build_family(&field_09(), 1e-3).unwrap();
        assert_abs_diff_eq!(fam.r.powf(1.0 - fam.theta) * fam.big_r.powf(fam.theta), 1.0, epsilon = 1e-12);
        assert!(fam.r * fam.dist < delta(3).unwrap());
        assert!(fam.theta > 0.0 && fam.theta < 1.0);
        let b_norm = fam.b.samples().iter().map(linalg::op_norm).fold(0.0, f64::max);
        assert_abs_diff_eq!(b_norm, fam.dist, epsilon = 1e-9);
    }

    #[test]
    fn eps_refinement_approaches_p_plus() {
        let f = field_09();
        let target = p_plus_lower(0.9, 3).unwrap().to_f64();
        let ps: Vec<f64> = [1e-2, 1e-4, 1e-6].iter().map(|&e| build_family(&f, e).unwrap().p_bound()).collect();
        assert!(ps[0] < ps[1] && ps[1] < ps[2]);
        assert!((ps[2] - target).abs() < 1e-3, "{ps:?} vs {target}");
    }

    #[test]
    fn theta_recovers_field() {
        let f = field_09();
        let fam = build_family(&f, 1e-4).unwrap();
        let a = family_matrix(&fam, Complex64::new(fam.theta, 0.0), false).unwrap();
        assert!(max_abs_entry_diff(&a.samples()[0], &f.samples()[0]) < 1e-12);
    }

    #[test]
    fn imaginary_axis_is_subcritical() {
        let fam = build_family(&field_09(), 1e-4).unwrap();
        for t in [0.0, 1.0, -1.0, 10.0, -10.0] {
            let a = family_matrix(&fam, Complex64::new(0.0, t), false).unwrap();
            let d = distance(&a).unwrap().dist;
            assert!(d <= fam.r * fam.dist + 1e-9, "t={t}: {d}");
        }
        let a1 = family_matrix(&fam, Complex64::new(1.0, 0.0), false).unwrap();
        assert_abs_diff_eq!(fam.f(Complex64::new(1.0, 0.0)).norm(), fam.big_r, epsilon = 1e-12);
        assert!(distance(&a1).unwrap().dist <= fam.big_r * fam.dist + 1e-9);
    }

    #[test]
    fn rejects_bad_inputs() {
        let f = field_09();
        assert!(build_family(&f, 0.0).is_err());
        assert!(build_family(&f, 0.2).is_err());
        let sub = constant_field(3, 1, linalg::identity(3)).unwrap();
        assert!(build_family(&sub, 1e-3).is_err());
        let fam = build_family(&f, 1e-3).unwrap();
        assert!(family_matrix(&fam, Complex64::new(1.5, 0.0), false).is_err());
        assert!(family_matrix(&fam, Complex64::new(1.5, 0.0), true).is_ok());
    }
}
