//! Preconditioned Krylov solvers on flat complex vectors.

use num_complex::Complex64;

use super::stencil::{dot, norm2};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveStats {
    pub iterations: usize,
    /// Final `‖b − Ax‖ / ‖b‖`.
    pub residual: f64,
}

fn axpy(y: &mut [Complex64], a: Complex64, x: &[Complex64]) {
    y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += a * xi);
}

fn residual(apply: &mut impl FnMut(&[Complex64], &mut [Complex64]), b: &[Complex64], x: &[Complex64], r: &mut [Complex64]) {
    apply(x, r);
    r.iter_mut().zip(b).for_each(|(ri, bi)| *ri = bi - *ri);
}

/// Preconditioned conjugate gradients for Hermitian positive definite `A`
/// with a Hermitian positive definite preconditioner `M⁻¹`. `x` holds the
/// initial guess on entry.
pub fn pcg(
    mut apply: impl FnMut(&[Complex64], &mut [Complex64]),
    mut precond: impl FnMut(&[Complex64], &mut [Complex64]),
    b: &[Complex64],
    x: &mut [Complex64],
    tol: f64,
    max_iter: usize,
) -> Result<SolveStats> {
    let n = b.len();
    let bnorm = norm2(b);
    if bnorm == 0.0 {
        x.fill(Complex64::new(0.0, 0.0));
        return Ok(SolveStats {
            iterations: 0,
            residual: 0.0,
        });
    }
    let mut r = vec![Complex64::new(0.0, 0.0); n];
    residual(&mut apply, b, x, &mut r);
    let mut rel = norm2(&r) / bnorm;
    if rel <= tol {
        return Ok(SolveStats {
            iterations: 0,
            residual: rel,
        });
    }
    let mut z = vec![Complex64::new(0.0, 0.0); n];
    precond(&r, &mut z);
    let mut p = z.clone();
    let mut rz = dot(&z, &r).re;
    let mut ap = vec![Complex64::new(0.0, 0.0); n];
    for it in 1..=max_iter {
        apply(&p, &mut ap);
        let pap = dot(&ap, &p).re;
        if !(pap > 0.0) {
            return Err(Error::NoConvergence {
                solver: "pcg",
                iterations: it,
                residual: rel,
            });
        }
        let alpha = rz / pap;
        axpy(x, alpha.into(), &p);
        axpy(&mut r, (-alpha).into(), &ap);
        rel = norm2(&r) / bnorm;
        if rel <= tol {
            // confirm against the true residual
            residual(&mut apply, b, x, &mut r);
            rel = norm2(&r) / bnorm;
            if rel <= tol {
                return Ok(SolveStats {
                    iterations: it,
                    residual: rel,
                });
            }
        }
        precond(&r, &mut z);
        let rz_new = dot(&z, &r).re;
        let beta = rz_new / rz;
        rz = rz_new;
        p.iter_mut().zip(&z).for_each(|(pi, zi)| *pi = zi + *pi * beta);
    }
    Err(Error::NoConvergence {
        solver: "pcg",
        iterations: max_iter,
        residual: rel,
    })
}

/// Right-preconditioned BiCGSTAB for general `A`.
pub fn bicgstab(
    mut apply: impl FnMut(&[Complex64], &mut [Complex64]),
    mut precond: impl FnMut(&[Complex64], &mut [Complex64]),
    b: &[Complex64],
    x: &mut [Complex64],
    tol: f64,
    max_iter: usize,
) -> Result<SolveStats> {
    let n = b.len();
    let zero = Complex64::new(0.0, 0.0);
    let bnorm = norm2(b);
    if bnorm == 0.0 {
        x.fill(zero);
        return Ok(SolveStats {
            iterations: 0,
            residual: 0.0,
        });
    }
    let mut r = vec![zero; n];
    residual(&mut apply, b, x, &mut r);
    let mut rel = norm2(&r) / bnorm;
    if rel <= tol {
        return Ok(SolveStats {
            iterations: 0,
            residual: rel,
        });
    }
    let r_hat = r.clone();
    let (mut rho, mut alpha, mut omega) = (Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0));
    let mut v = vec![zero; n];
    let mut p = vec![zero; n];
    let mut y = vec![zero; n];
    let mut s = vec![zero; n];
    let mut z = vec![zero; n];
    let mut t = vec![zero; n];
    for it in 1..=max_iter {
        let rho_new = dot(&r, &r_hat);
        if rho_new.norm() < 1e-300 {
            break;
        }
        let beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        for i in 0..n {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
        precond(&p, &mut y);
        apply(&y, &mut v);
        alpha = rho / dot(&v, &r_hat);
        for i in 0..n {
            s[i] = r[i] - alpha * v[i];
        }
        axpy(x, alpha, &y);
        if norm2(&s) / bnorm <= tol {
            residual(&mut apply, b, x, &mut r);
            rel = norm2(&r) / bnorm;
            if rel <= tol {
                return Ok(SolveStats {
                    iterations: it,
                    residual: rel,
                });
            }
            continue;
        }
        precond(&s, &mut z);
        apply(&z, &mut t);
        let tt = dot(&t, &t).re;
        omega = if tt > 0.0 { dot(&s, &t) / tt } else { zero };
        axpy(x, omega, &z);
        for i in 0..n {
            r[i] = s[i] - omega * t[i];
        }
        rel = norm2(&r) / bnorm;
        if rel <= tol {
            residual(&mut apply, b, x, &mut r);
            rel = norm2(&r) / bnorm;
            if rel <= tol {
                return Ok(SolveStats {
                    iterations: it,
                    residual: rel,
                });
            }
        }
        if omega.norm() == 0.0 {
            break;
        }
    }
    Err(Error::NoConvergence {
        solver: "bicgstab",
        iterations: max_iter,
        residual: rel,
    })
}
