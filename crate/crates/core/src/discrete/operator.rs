use num_complex::Complex64;

use super::fft::TorusFft;
use super::grid::BoxGrid;
use super::stencil::Stencil;
use crate::coeff::MatrixField;
use crate::ellipticity::{ellipticity_report, EllipticityReport};
use crate::error::{Error, Result};

/// Discrete `L = −Divₕ(A ∇ₕ ·)` on a periodic grid.
///
/// Sample `k` of the field is the coefficient of the cell whose lower
/// corner is node `k`.
#[derive(Debug, Clone)]
pub struct TorusOperator {
    field: MatrixField,
    stencil: Stencil,
    adjoint: Stencil,
    hermitian: bool,
    report: EllipticityReport,
    fft: TorusFft,
}

pub fn assemble(field: &MatrixField) -> Result<TorusOperator> {
    let (n, side) = field.torus().ok_or(Error::NotTorus)?;
    let report = ellipticity_report(field)?;
    let grid = BoxGrid::torus(field.d(), n, side);
    let adj = field.adjoint();
    Ok(TorusOperator {
        stencil: Stencil::new(grid.clone(), field.n_comp(), field.samples()),
        adjoint: Stencil::new(grid, field.n_comp(), adj.samples()),
        hermitian: field.is_hermitian(1e-14),
        report,
        fft: TorusFft::new(field.d(), n),
        field: field.clone(),
    })
}

impl TorusOperator {
    pub fn field(&self) -> &MatrixField {
        &self.field
    }

    pub fn stencil(&self) -> &Stencil {
        &self.stencil
    }

    pub fn grid(&self) -> &BoxGrid {
        self.stencil.grid()
    }

    pub fn fft(&self) -> &TorusFft {
        &self.fft
    }

    pub fn report(&self) -> &EllipticityReport {
        &self.report
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn d(&self) -> usize {
        self.field.d()
    }

    pub fn n_comp(&self) -> usize {
        self.field.n_comp()
    }

    pub fn h(&self) -> f64 {
        self.grid().h()
    }

    /// Length of a grid function.
    pub fn len(&self) -> usize {
        self.stencil.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn apply(&self, u: &[Complex64]) -> Vec<Complex64> {
        self.stencil.apply_vec(u)
    }

    pub fn apply_into(&self, u: &[Complex64], out: &mut [Complex64]) {
        self.stencil.apply(u, out)
    }

    pub fn apply_adjoint(&self, u: &[Complex64]) -> Vec<Complex64> {
        self.adjoint.apply_vec(u)
    }

    /// The operator built from `A*`.
    pub fn adjoint(&self) -> TorusOperator {
        TorusOperator {
            field: self.field.adjoint(),
            stencil: self.adjoint.clone(),
            adjoint: self.stencil.clone(),
            hermitian: self.hermitian,
            report: self.report,
            fft: self.fft.clone(),
        }
    }

    /// Largest real part of the diagonal of `L`.
    pub fn max_diagonal(&self) -> f64 {
        self.stencil.diagonal().iter().map(|z| z.re).fold(0.0, f64::max)
    }

    /// Discrete `Lᵖ` norm `(h^d Σ |u(x)|ᵖ)^{1/p}` with the Euclidean norm on `ℂᴺ`.
    pub fn lp_norm(&self, u: &[Complex64], p: f64) -> f64 {
        lp_norm(u, self.n_comp(), self.h().powi(self.d() as i32), p)
    }
}

/// `(w Σ_blocks |block|ᵖ)^{1/p}` over consecutive blocks of length `block`.
pub fn lp_norm(u: &[Complex64], block: usize, w: f64, p: f64) -> f64 {
    let mags = u.chunks(block).map(|b| b.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt());
    if p.is_infinite() {
        return mags.fold(0.0, f64::max);
    }
    // scale by the max to avoid overflow at large p
    let m = u.chunks(block).map(|b| b.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()).fold(0.0, f64::max);
    if m == 0.0 {
        return 0.0;
    }
    m * (w * mags.map(|x| (x / m).powf(p)).sum::<f64>()).powf(1.0 / p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::{constant_field, constant_torus, sample};
    use crate::discrete::stencil::dot;
    use crate::linalg::identity;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn assemble_requires_torus_and_ellipticity() {
        assert!(matches!(assemble(&constant_field(3, 1, identity(3)).unwrap()), Err(Error::NotTorus)));
        let bad = constant_torus(3, 1, identity(3).scale(-1.0), 4, 1.0).unwrap();
        assert!(matches!(assemble(&bad), Err(Error::NotElliptic { .. })));
    }

    #[test]
    fn adjoint_duality_on_random_field() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let f = sample::elliptic_torus(3, 1, 4, 1.0, 0.5, 2.0, 0.8, &mut rng).unwrap();
        let op = assemble(&f).unwrap();
        assert!(!op.is_hermitian());
        let u: Vec<Complex64> = sample::random_matrix(op.len(), &mut rng).column(0).iter().copied().collect();
        let v: Vec<Complex64> = sample::random_matrix(op.len(), &mut rng).column(1).iter().copied().collect();
        let lhs = dot(&op.apply(&u), &v);
        let rhs = dot(&u, &op.adjoint().apply(&v));
        assert!((lhs - rhs).norm() < 1e-12 * lhs.norm());
    }

    #[test]
    fn identity_diagonal() {
        let op = assemble(&constant_torus(3, 1, identity(3), 4, 2.0).unwrap()).unwrap();
        assert!((op.max_diagonal() - 6.0 / 0.25).abs() < 1e-12);
    }

    #[test]
    fn lp_norm_cases() {
        let u = vec![Complex64::new(3.0, 4.0), Complex64::new(0.0, 0.0)];
        assert!((lp_norm(&u, 1, 1.0, 2.0) - 5.0).abs() < 1e-14);
        assert!((lp_norm(&u, 2, 1.0, 7.0) - 5.0).abs() < 1e-14);
        assert!((lp_norm(&u, 1, 0.5, f64::INFINITY) - 5.0).abs() < 1e-14);
        assert!((lp_norm(&u, 1, 2.0, 1.0) - 10.0).abs() < 1e-14);
    }
}
