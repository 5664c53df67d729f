//! Dirichlet problems `Lu = 0` on a cube and the Hölder-seminorm probe.
//!
//! A torus-sampled field with `n` samples per axis and side `s` is read as
//! the cell coefficients of the cube `[0, s]^d` split into `n` cells per axis.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::grid::BoxGrid;
use super::solver::{bicgstab, pcg, SolveStats};
use super::stencil::Stencil;
use crate::coeff::MatrixField;
use crate::ellipticity::lambda_min;
use crate::error::{invalid, Error, Result};

pub const DIRICHLET_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct CubeSolution {
    pub grid: BoxGrid,
    pub n_comp: usize,
    pub values: Vec<Complex64>,
    pub stats: SolveStats,
}

impl CubeSolution {
    /// Multilinear interpolation at a physical point of the cube.
    pub fn interpolate(&self, x: &[f64]) -> Vec<Complex64> {
        let g = &self.grid;
        let n = g.cells_per_axis();
        let nc = self.n_comp;
        let mut base = Vec::with_capacity(g.d());
        let mut frac = Vec::with_capacity(g.d());
        let origin = g.node_coord(0);
        for (xi, o) in x.iter().zip(&origin) {
            let s = ((xi - o) / g.h()).clamp(0.0, n as f64);
            let i = (s.floor() as usize).min(n - 1);
            base.push(i);
            frac.push(s - i as f64);
        }
        let mut out = vec![Complex64::new(0.0, 0.0); nc];
        let mut idx = base.clone();
        for corner in 0..(1usize << g.d()) {
            let mut w = 1.0;
            for ax in 0..g.d() {
                let up = (corner >> ax) & 1;
                idx[ax] = base[ax] + up;
                w *= if up == 1 { frac[ax] } else { 1.0 - frac[ax] };
            }
            if w == 0.0 {
                continue;
            }
            let k = g.node_index(&idx);
            for c in 0..nc {
                out[c] += self.values[k * nc + c] * w;
            }
        }
        out
    }

    /// Trapezoidal `L²` norm over the cube.
    pub fn l2_norm(&self) -> f64 {
        let g = &self.grid;
        let nc = self.n_comp;
        let n = g.cells_per_axis();
        let hd = g.h().powi(g.d() as i32);
        let sum: f64 = (0..g.num_nodes())
            .map(|k| {
                let w: f64 = g.node_multi(k).iter().map(|&i| if i == 0 || i == n { 0.5 } else { 1.0 }).product();
                w * self.values[k * nc..(k + 1) * nc].iter().map(|z| z.norm_sqr()).sum::<f64>()
            })
            .sum();
        (sum * hd).sqrt()
    }
}

/// Cube stencil whose cell coefficients are the field samples.
pub fn cube_stencil(field: &MatrixField) -> Result<Stencil> {
    let (n, side) = field.torus().ok_or(Error::NotTorus)?;
    let grid = BoxGrid::cube(field.d(), n, 0.0, side);
    Ok(Stencil::new(grid, field.n_comp(), field.samples()))
}

/// Solve `Lu = 0` in the open cube with `u = boundary(x)` on its faces.
pub fn dirichlet_solve(field: &MatrixField, boundary: impl Fn(&[f64]) -> Vec<Complex64>) -> Result<CubeSolution> {
    let lambda = lambda_min(field);
    if !(lambda > 0.0) {
        return Err(Error::NotElliptic { lambda });
    }
    let st = cube_stencil(field)?;
    let g = st.grid().clone();
    let nc = field.n_comp();
    let zero = Complex64::new(0.0, 0.0);
    let interior: Vec<bool> = (0..g.num_nodes()).map(|k| !g.is_boundary(k)).collect();
    let mut ub = vec![zero; st.len()];
    for k in 0..g.num_nodes() {
        if !interior[k] {
            let v = boundary(&g.node_coord(k));
            if v.len() != nc {
                return Err(invalid("boundary", format!("returned {} components, expected {nc}", v.len())));
            }
            ub[k * nc..(k + 1) * nc].copy_from_slice(&v);
        }
    }
    let mask = |v: &mut [Complex64]| {
        for (k, &inner) in interior.iter().enumerate() {
            if !inner {
                v[k * nc..(k + 1) * nc].fill(zero);
            }
        }
    };
    let mut b = st.apply_vec(&ub);
    b.iter_mut().for_each(|z| *z = -*z);
    mask(&mut b);
    let diag = st.diagonal();
    let apply = |x: &[Complex64], y: &mut [Complex64]| {
        st.apply(x, y);
        mask(y);
    };
    let precond = |r: &[Complex64], z: &mut [Complex64]| {
        for (i, (zi, ri)) in z.iter_mut().zip(r).enumerate() {
            *zi = if interior[i / nc] { ri / diag[i].re } else { zero };
        }
    };
    let mut x = vec![zero; st.len()];
    let max_iter = 20 * g.nodes_per_axis() * nc + 200;
    let stats = if field.is_hermitian(1e-14) {
        pcg(apply, precond, &b, &mut x, DIRICHLET_TOL, max_iter)?
    } else {
        bicgstab(apply, precond, &b, &mut x, DIRICHLET_TOL, max_iter)?
    };
    for (xi, bi) in x.iter_mut().zip(&ub) {
        *xi += bi;
    }
    Ok(CubeSolution {
        grid: g,
        n_comp: nc,
        values: x,
        stats,
    })
}

/// Seeded low-frequency boundary data `g(x) = scale·Σ c_k cos(π k·x/s + φ_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryData {
    side: f64,
    scale: f64,
    terms: Vec<(Vec<f64>, f64, Vec<Complex64>)>,
}

impl BoundaryData {
    pub const TERMS: usize = 8;
    pub const MAX_FREQUENCY: u32 = 2;

    pub fn random(d: usize, n_comp: usize, side: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let terms = (0..Self::TERMS)
            .map(|_| {
                let k = (0..d).map(|_| rng.random_range(0..=Self::MAX_FREQUENCY) as f64).collect();
                let phase = rng.random_range(0.0..2.0 * PI);
                let c = (0..n_comp)
                    .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                    .collect();
                (k, phase, c)
            })
            .collect();
        Self { side, scale: 1.0, terms }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            scale: self.scale * factor,
            ..self.clone()
        }
    }

    pub fn eval(&self, x: &[f64]) -> Vec<Complex64> {
        let nc = self.terms.first().map_or(0, |t| t.2.len());
        let mut out = vec![Complex64::new(0.0, 0.0); nc];
        for (k, phase, c) in &self.terms {
            let arg: f64 = k.iter().zip(x).map(|(ki, xi)| ki * xi).sum::<f64>() * PI / self.side + phase;
            let w = arg.cos() * self.scale;
            for (o, ci) in out.iter_mut().zip(c) {
                *o += ci * w;
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HolderProbe {
    /// `r^μ [u]_μ / (r^{−d/2} ‖u‖₂)`: the empirical constant.
    pub ratio: f64,
    pub seminorm: f64,
    pub l2_norm: f64,
    pub radius: f64,
    pub mu: f64,
    pub iterations: usize,
}

/// Hölder probe with seeded random boundary data.
pub fn holder_probe(field: &MatrixField, mu: f64, inner_fraction: f64, pair_samples: usize, seed: u64) -> Result<HolderProbe> {
    let (_, side) = field.torus().ok_or(Error::NotTorus)?;
    let data = BoundaryData::random(field.d(), field.n_comp(), side, seed);
    holder_probe_with(field, mu, inner_fraction, pair_samples, seed, &data)
}

/// Solve with the given boundary data, then compare the Hölder seminorm on the
/// central cube of side `inner_fraction·s` with the `L²` norm on the whole
/// cube. Pairs are uniform random physical points, evaluated by multilinear
/// interpolation, so the sample set does not depend on the grid.
pub fn holder_probe_with(
    field: &MatrixField,
    mu: f64,
    inner_fraction: f64,
    pair_samples: usize,
    seed: u64,
    data: &BoundaryData,
) -> Result<HolderProbe> {
    if !(mu > 0.0 && mu <= 1.0) {
        return Err(invalid("mu", format!("must lie in (0, 1], got {mu}")));
    }
    if !(inner_fraction > 0.0 && inner_fraction < 1.0) {
        return Err(invalid("inner_fraction", format!("must lie in (0, 1), got {inner_fraction}")));
    }
    if pair_samples == 0 {
        return Err(invalid("pair_samples", "must be >= 1"));
    }
    let (_, side) = field.torus().ok_or(Error::NotTorus)?;
    let sol = dirichlet_solve(field, |x| data.eval(x))?;
    let d = field.d();
    let lo = 0.5 * side * (1.0 - inner_fraction);
    let width = side * inner_fraction;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut seminorm: f64 = 0.0;
    for _ in 0..pair_samples {
        let x: Vec<f64> = (0..d).map(|_| lo + width * rng.random::<f64>()).collect();
        let y: Vec<f64> = (0..d).map(|_| lo + width * rng.random::<f64>()).collect();
        let dist = x.iter().zip(&y).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        if dist < 1e-12 {
            continue;
        }
        let (ux, uy) = (sol.interpolate(&x), sol.interpolate(&y));
        let diff = ux.iter().zip(&uy).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
        seminorm = seminorm.max(diff / dist.powf(mu));
    }
    let l2 = sol.l2_norm();
    let r = 0.5 * side;
    Ok(HolderProbe {
        ratio: r.powf(mu) * seminorm / (r.powf(-(d as f64) / 2.0) * l2),
        seminorm,
        l2_norm: l2,
        radius: r,
        mu,
        iterations: sol.stats.iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::{constant_torus, sample};
    use crate::linalg::identity;

    #[test]
    fn linear_boundary_data_is_reproduced() {
        let f = constant_torus(3, 1, identity(3), 8, 1.0).unwrap();
        let sol = dirichlet_solve(&f, |x| vec![Complex64::new(x[0], 0.0)]).unwrap();
        for k in 0..sol.grid.num_nodes() {
            assert!((sol.values[k] - sol.grid.node_coord(k)[0]).norm() < 1e-9);
        }
        let v = sol.interpolate(&[0.3, 0.71, 0.2]);
        assert!((v[0].re - 0.3).abs() < 1e-9);
    }

    #[test]
    fn maximum_principle() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let f = sample::blocky_hermitian_torus(3, 1, 8, 1.0, 2, 1.0, 2.0, &mut rng).unwrap();
        // real symmetric samples keep the stencil real
        let f = f.map_samples(|m| m.map(|z| Complex64::new(z.re, 0.0))).unwrap();
        let data = BoundaryData::random(3, 1, 1.0, 4);
        let sol = dirichlet_solve(&f, |x| vec![Complex64::new(data.eval(x)[0].re, 0.0)]).unwrap();
        let g = &sol.grid;
        let bvals: Vec<f64> = (0..g.num_nodes()).filter(|&k| g.is_boundary(k)).map(|k| sol.values[k].re).collect();
        let (bmin, bmax) = bvals.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        for k in 0..g.num_nodes() {
            let v = sol.values[k].re;
            assert!(v >= bmin - 1e-8 && v <= bmax + 1e-8);
        }
    }

    #[test]
    fn holder_ratio_is_homogeneous() {
        let f = constant_torus(3, 1, identity(3), 8, 1.0).unwrap();
        let data = BoundaryData::random(3, 1, 1.0, 7);
        let a = holder_probe_with(&f, 0.5, 0.25, 200, 7, &data).unwrap();
        let b = holder_probe_with(&f, 0.5, 0.25, 200, 7, &data.scaled(10.0)).unwrap();
        assert!(a.ratio.is_finite() && a.ratio > 0.0);
        assert!((a.ratio - b.ratio).abs() <= 1e-10 * a.ratio);
    }
}
