//! Small dense complex linear algebra used by the ellipticity calculators.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;

/// Matrices up to this size use a full SVD for the operator norm, larger
/// ones fall back to power iteration on the Gram matrix.
pub const SVD_SIZE_LIMIT: usize = 64;

const POWER_RESIDUAL: f64 = 1e-12;
const POWER_MAX_ITER: usize = 100_000;

pub fn hermitian_part(a: &CMatrix) -> CMatrix {
    (a + a.adjoint()).scale(0.5)
}

/// Least eigenvalue of the Hermitian part, i.e. `min_{|ξ|=1} Re(Aξ·ξ̄)`.
pub fn min_real_part_eigen(a: &CMatrix) -> f64 {
    hermitian_part(a)
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

pub fn is_hermitian(a: &CMatrix, tol: f64) -> bool {
    let scale = a.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
    (a - a.adjoint()).iter().all(|z| z.norm() <= tol * scale)
}

/// Spectral norm (largest singular value).
pub fn op_norm(a: &CMatrix) -> f64 {
    if a.nrows().max(a.ncols()) <= SVD_SIZE_LIMIT {
        op_norm_svd(a)
    } else {
        op_norm_power(a)
    }
}

pub fn op_norm_svd(a: &CMatrix) -> f64 {
    a.singular_values().iter().copied().fold(0.0, f64::max)
}

/// Power iteration on `A*A`, stopped when the eigen-residual of the Gram
/// matrix drops below `1e-12` relative to the current estimate.
pub fn op_norm_power(a: &CMatrix) -> f64 {
    let n = a.ncols();
    if n == 0 {
        return 0.0;
    }
    let gram = a.adjoint() * a;
    // deterministic, non-degenerate start vector
    let mut v = nalgebra::DVector::<Complex64>::from_fn(n, |i, _| {
        Complex64::new(1.0 + (i as f64) * 0.618_033_988_749_895 % 1.0, 0.25)
    });
    let nv = v.norm();
    v /= Complex64::from(nv);
    let mut mu = 0.0;
    for _ in 0..POWER_MAX_ITER {
        let w = &gram * &v;
        mu = v.dotc(&w).re;
        let resid = (&w - &v * Complex64::from(mu)).norm();
        let nw = w.norm();
        if nw == 0.0 {
            return 0.0;
        }
        v = w / Complex64::from(nw);
        if resid <= POWER_RESIDUAL * mu.abs().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    mu.max(0.0).sqrt()
}

/// `‖I − t·A‖` in the spectral norm.
pub fn shifted_norm(a: &CMatrix, t: f64) -> f64 {
    let n = a.nrows();
    let m = CMatrix::identity(n, n) - a.scale(t);
    op_norm(&m)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn max_abs_entry_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn diagonal_norms() {
        let a = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            c(1.0, 0.0),
            c(2.0, 0.0),
            c(3.0, 0.0),
        ]));
        assert!((op_norm(&a) - 3.0).abs() < 1e-14);
        assert!((min_real_part_eigen(&a) - 1.0).abs() < 1e-14);
        assert!(is_hermitian(&a, 1e-15));
    }

    #[test]
    fn power_iteration_matches_svd() {
        let a = CMatrix::from_fn(7, 7, |i, j| {
            c(((i * 7 + j) as f64).sin(), ((i + 3 * j) as f64).cos() * 0.5)
        });
        let s = op_norm_svd(&a);
        let p = op_norm_power(&a);
        assert!((s - p).abs() < 1e-9 * s, "{s} vs {p}");
    }

    #[test]
    fn skew_part_does_not_move_real_part_eigen() {
        let h = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(2.0, 0.0), c(5.0, 0.0)]));
        let k = CMatrix::from_row_slice(2, 2, &[c(0.0, 1.0), c(3.0, 0.0), c(-3.0, 0.0), c(0.0, -2.0)]);
        assert!((min_real_part_eigen(&(h + k)) - 2.0).abs() < 1e-13);
    }
}
