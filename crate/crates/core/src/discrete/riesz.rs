//! Riesz transforms and the Neumann-series solver for `L u = f` on the torus.
//!
//! With `G = ∇ₕ` (corner gradients), `K = G*G = −Δₕ` and `R = G K^{−1/2}`
//! (an isometry on mean-zero functions), writing `A = τ(I − B)`, `τ = 1/t*`,
//! gives `L = τ K^{1/2} (I − R*BR) K^{1/2}` and `‖R*BR‖₂ ≤ ‖B‖ = d(A)`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use super::fft::TorusFft;
use super::operator::TorusOperator;
use super::stencil::{norm2, Stencil};
use crate::error::{invalid, Error, Result};
use crate::linalg::identity;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Spectral Riesz transform: symbol `−i k/|k|` per component, `0` at `k = 0`.
/// Returns one grid function per axis.
pub fn riesz_apply(fft: &TorusFft, f: &[Complex64], n_comp: usize) -> Vec<Vec<Complex64>> {
    let d = fft.frequency(0).len();
    let mut hat = f.to_vec();
    fft.forward(&mut hat, n_comp);
    (0..d)
        .map(|j| {
            let mut out = hat.clone();
            for m in 0..fft.num_nodes() {
                let k = fft.frequency(m);
                let norm = k.iter().map(|&x| (x * x) as f64).sum::<f64>().sqrt();
                let s = if norm == 0.0 {
                    ZERO
                } else {
                    Complex64::new(0.0, -(k[j] as f64) / norm)
                };
                out[m * n_comp..(m + 1) * n_comp].iter_mut().for_each(|z| *z *= s);
            }
            fft.inverse(&mut out, n_comp);
            out
        })
        .collect()
}

/// Mean of each component.
pub fn component_means(f: &[Complex64], n_comp: usize) -> Vec<Complex64> {
    let nodes = (f.len() / n_comp) as f64;
    (0..n_comp)
        .map(|c| f.iter().skip(c).step_by(n_comp).sum::<Complex64>() / nodes)
        .collect()
}

/// The pieces of the factorization for one operator.
#[derive(Debug, Clone)]
pub struct NeumannFactorization {
    b_stencil: Stencil,
    inv_sqrt_symbol: Vec<f64>,
    fft: TorusFft,
    n_comp: usize,
    t_star: f64,
    dist: f64,
}

impl NeumannFactorization {
    pub fn new(op: &TorusOperator) -> Result<Self> {
        let t_star = op.report().t_star;
        let dn = op.d() * op.n_comp();
        let b: Vec<_> = op
            .field()
            .samples()
            .iter()
            .map(|a| identity(dn) - a.scale(t_star))
            .collect();
        let inv_sqrt_symbol = op
            .fft()
            .laplacian_symbol(op.h())
            .into_iter()
            .map(|l| if l > 0.0 { 1.0 / l.sqrt() } else { 0.0 })
            .collect();
        Ok(Self {
            b_stencil: Stencil::new(op.grid().clone(), op.n_comp(), &b),
            inv_sqrt_symbol,
            fft: op.fft().clone(),
            n_comp: op.n_comp(),
            t_star,
            dist: op.report().dist,
        })
    }

    pub fn dist(&self) -> f64 {
        self.dist
    }

    /// `K^{−1/2} v`, projecting out the mean.
    pub fn inv_sqrt_laplacian(&self, v: &[Complex64]) -> Vec<Complex64> {
        let sym = &self.inv_sqrt_symbol;
        self.fft.multiply(v, self.n_comp, |m| sym[m].into())
    }

    /// `R*BR v = K^{−1/2} G*BG K^{−1/2} v`.
    pub fn apply_rbr(&self, v: &[Complex64]) -> Vec<Complex64> {
        let w = self.inv_sqrt_laplacian(v);
        self.inv_sqrt_laplacian(&self.b_stencil.apply_vec(&w))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NeumannSolution {
    #[serde(skip)]
    pub u: Vec<Complex64>,
    /// Applications of `R*BR` until the increment dropped below tolerance.
    pub iterations: usize,
    /// `‖L u − f‖₂ / ‖f‖₂` checked with the assembled operator.
    pub residual: f64,
    /// `‖(R*BR)^n g₀‖₂ / ‖g₀‖₂` for `n = 0..=iterations`.
    pub increments: Vec<f64>,
}

/// Increments above this multiple of the first term count as divergence.
const DIVERGENCE_GROWTH: f64 = 1e3;

/// Solve `L u = f` for mean-zero `f`; the returned `u` has mean zero.
pub fn neumann_solve(op: &TorusOperator, rhs: &[Complex64], tol: f64, max_iter: usize) -> Result<NeumannSolution> {
    if !(tol > 0.0) {
        return Err(invalid("tol", format!("must be > 0, got {tol}")));
    }
    if rhs.len() != op.len() {
        return Err(invalid("rhs", format!("length {} != {}", rhs.len(), op.len())));
    }
    let nc = op.n_comp();
    let scale = norm2(rhs) / (op.grid().num_nodes() as f64).sqrt();
    if component_means(rhs, nc).iter().any(|m| m.norm() > 1e-10 * scale.max(f64::MIN_POSITIVE)) {
        return Err(invalid("rhs", "must have zero mean in every component"));
    }
    let fac = NeumannFactorization::new(op)?;
    let g0 = fac.inv_sqrt_laplacian(rhs);
    let g0_norm = norm2(&g0);
    let mut x = g0.clone();
    let mut term = g0;
    let mut increments = vec![1.0];
    let mut iterations = 0;
    if g0_norm > 0.0 {
        loop {
            if iterations == max_iter {
                return Err(Error::NoConvergence {
                    solver: "neumann",
                    iterations,
                    residual: *increments.last().expect("non-empty"),
                });
            }
            term = fac.apply_rbr(&term);
            iterations += 1;
            let inc = norm2(&term);
            increments.push(inc / g0_norm);
            if !inc.is_finite() || inc > DIVERGENCE_GROWTH * g0_norm {
                let prev = increments[increments.len() - 2];
                return Err(Error::SeriesDivergence {
                    iteration: iterations,
                    ratio: inc / g0_norm / prev,
                });
            }
            x.iter_mut().zip(&term).for_each(|(a, b)| *a += b);
            if inc <= tol * norm2(&x) {
                break;
            }
        }
    }
    let mut u = fac.inv_sqrt_laplacian(&x);
    u.iter_mut().for_each(|z| *z *= fac.t_star);
    let lu = op.apply(&u);
    let f_norm = norm2(rhs);
    let residual = if f_norm > 0.0 {
        norm2(&lu.iter().zip(rhs).map(|(a, b)| a - b).collect::<Vec<_>>()) / f_norm
    } else {
        0.0
    };
    Ok(NeumannSolution {
        u,
        iterations,
        residual,
        increments,
    })
}

/// Largest system `direct_solve` will assemble densely.
pub const DIRECT_MAX_UNKNOWNS: usize = 4096;

/// Dense LU solve of `(L + P₀) u = f`, `P₀` the projection onto constants.
/// For mean-zero `f` this is the mean-zero solution of `L u = f`.
pub fn direct_solve(op: &TorusOperator, rhs: &[Complex64]) -> Result<Vec<Complex64>> {
    let len = op.len();
    if len > DIRECT_MAX_UNKNOWNS {
        return Err(invalid("grid", format!("{len} unknowns exceed the dense limit {DIRECT_MAX_UNKNOWNS}")));
    }
    if rhs.len() != len {
        return Err(invalid("rhs", format!("length {} != {len}", rhs.len())));
    }
    let nc = op.n_comp();
    let nodes = op.grid().num_nodes() as f64;
    let mut m = DMatrix::<Complex64>::zeros(len, len);
    let mut e = vec![ZERO; len];
    for col in 0..len {
        e[col] = Complex64::new(1.0, 0.0);
        let lc = op.apply(&e);
        for (row, v) in lc.into_iter().enumerate() {
            m[(row, col)] = v;
        }
        e[col] = ZERO;
        for row in (col % nc..len).step_by(nc) {
            m[(row, col)] += 1.0 / nodes;
        }
    }
    let b = nalgebra::DVector::from_column_slice(rhs);
    m.lu()
        .solve(&b)
        .map(|v| v.iter().copied().collect())
        .ok_or_else(|| Error::Invariant("L + P0 is singular".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::{constant_torus, sample};
    use crate::discrete::grid::BoxGrid;
    use crate::discrete::operator::assemble;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn mean_zero(len: usize, nc: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
        let mut f: Vec<Complex64> = sample::random_matrix(len, rng).column(0).iter().copied().collect();
        let means = component_means(&f, nc);
        f.iter_mut().enumerate().for_each(|(i, z)| *z -= means[i % nc]);
        f
    }

    #[test]
    fn riesz_pure_mode_and_isometry() {
        let (d, n) = (3, 6);
        let fft = TorusFft::new(d, n);
        let grid = BoxGrid::torus(d, n, 3.0);
        let k = [1i64, -2, 0];
        let wave: Vec<Complex64> = (0..grid.num_nodes())
            .map(|m| {
                let x = grid.node_multi(m);
                let ph: f64 = x.iter().zip(&k).map(|(&a, &b)| a as f64 * b as f64).sum();
                Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * ph / n as f64)
            })
            .collect();
        let r = riesz_apply(&fft, &wave, 1);
        let norm = 5f64.sqrt();
        for j in 0..d {
            let s = Complex64::new(0.0, -(k[j] as f64) / norm);
            for (a, b) in r[j].iter().zip(&wave) {
                assert!((a - s * b).norm() < 1e-12);
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let f: Vec<Complex64> = sample::random_matrix(2 * grid.num_nodes(), &mut rng).column(0).iter().copied().collect();
        let r = riesz_apply(&fft, &f, 2);
        let lhs: f64 = r.iter().map(|v| norm2(v).powi(2)).sum::<f64>().sqrt();
        let means = component_means(&f, 2);
        let centered: Vec<Complex64> = f.iter().enumerate().map(|(i, z)| z - means[i % 2]).collect();
        assert!((lhs - norm2(&centered)).abs() < 1e-12 * lhs);
        let c = vec![Complex64::new(3.0, 1.0); 2 * grid.num_nodes()];
        assert!(riesz_apply(&fft, &c, 2).iter().all(|v| norm2(v) < 1e-12));
    }

    #[test]
    fn identity_converges_immediately() {
        let op = assemble(&constant_torus(3, 1, identity(3), 6, 6.0).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = mean_zero(op.len(), 1, &mut rng);
        let s = neumann_solve(&op, &f, 1e-10, 10).unwrap();
        assert_eq!(s.iterations, 1);
        assert!(s.residual < 1e-12);
    }

    #[test]
    fn rbr_contracts_by_dist() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let field = sample::elliptic_torus(3, 2, 4, 4.0, 1.0, 3.0, 0.5, &mut rng).unwrap();
        let op = assemble(&field).unwrap();
        let fac = NeumannFactorization::new(&op).unwrap();
        let mut v = mean_zero(op.len(), 2, &mut rng);
        let n0 = norm2(&v);
        for k in 1..=5 {
            v = fac.apply_rbr(&v);
            assert!(norm2(&v) <= fac.dist().powi(k) * n0 * (1.0 + 1e-10));
        }
    }

    #[test]
    fn matches_direct_solve_on_small_grid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let field = sample::elliptic_torus(3, 1, 4, 4.0, 1.0, 2.0, 0.4, &mut rng).unwrap();
        let op = assemble(&field).unwrap();
        let f = mean_zero(op.len(), 1, &mut rng);
        let s = neumann_solve(&op, &f, 1e-12, 500).unwrap();
        let u = direct_solve(&op, &f).unwrap();
        let diff: Vec<Complex64> = s.u.iter().zip(&u).map(|(a, b)| a - b).collect();
        assert!(norm2(&diff) < 1e-9 * norm2(&u));
        assert!(s.residual < 1e-10);
    }

    #[test]
    fn rejects_nonzero_mean() {
        let op = assemble(&constant_torus(3, 1, identity(3), 4, 4.0).unwrap()).unwrap();
        let f = vec![Complex64::new(1.0, 0.0); op.len()];
        assert!(neumann_solve(&op, &f, 1e-8, 10).is_err());
    }
}
