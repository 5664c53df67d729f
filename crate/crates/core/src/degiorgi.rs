//! De Giorgi type counterexample systems with the singular solution
//! `u(x) = x/|x|^b`.
//!
//! Coefficients (with `N = d`, `x̂ = x/|x|`):
//! `A^{αβ}_{ij}(x) = δ_ij δ_αβ + (c δ_iα + D x̂_i x̂_α)(c δ_jβ + D x̂_j x̂_β)`.
//! At every `x` this is `I + v vᵀ` with `|v|² = dc² + 2cD + D²`, so the
//! spectrum is `{1, 1 + |v|²}` independently of the direction.

use num_complex::Complex64;
use serde::Serialize;

use crate::bounds::delta;
use crate::coeff::{Domain, MatrixField};
use crate::discrete::grid::BoxGrid;
use crate::discrete::stencil::cell_flux;
use crate::ellipticity::distance;
use crate::error::{invalid, Error, Result};
use crate::linalg::CMatrix;
use crate::optimize::{bisect, golden_section};

/// Sphere samples used by [`solve_c_for_delta`].
pub const SOLVE_SAMPLES: usize = 200;
/// Log-grid points of the `c` scan.
pub const SCAN_POINTS: usize = 64;
pub const C_SCAN: (f64, f64) = (0.05, 20.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeGiorgiSpec {
    pub d: usize,
    pub c: f64,
    #[serde(rename = "D")]
    pub big_d: f64,
    pub b: f64,
}

/// `D` on the curve `b = 1`.
pub fn threshold_d(d: usize, c: f64) -> f64 {
    (c * c + 1.0) / ((d as f64 - 2.0) * c)
}

fn b_radicand(d: usize, c: f64, big_d: f64) -> f64 {
    let df = d as f64;
    df * df / 4.0 - (df * (df - 1.0) * c * big_d + (df - 1.0) * big_d * big_d) / (1.0 + (c + big_d).powi(2))
}

/// Exponent `b(c, D)`; no range checks.
pub fn exponent_b(d: usize, c: f64, big_d: f64) -> f64 {
    d as f64 / 2.0 - b_radicand(d, c, big_d).max(0.0).sqrt()
}

pub fn build_spec(d: usize, c: f64, big_d: f64) -> Result<DeGiorgiSpec> {
    if d < 3 {
        return Err(invalid("d", format!("must be >= 3, got {d}")));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(invalid("c", format!("must be > 0, got {c}")));
    }
    let thr = threshold_d(d, c);
    // Admit rounding noise in D computed from the threshold formula itself.
    if !(big_d.is_finite() && big_d >= thr * (1.0 - 4.0 * f64::EPSILON)) {
        return Err(invalid("D", format!("must be >= (c^2+1)/((d-2)c) = {thr}, got {big_d}")));
    }
    let rad = b_radicand(d, c, big_d);
    if rad < 0.0 {
        return Err(Error::Invariant(format!("negative radicand {rad} in the exponent formula")));
    }
    // On the threshold the formula gives 1 up to rounding.
    let b = (d as f64 / 2.0 - rad.sqrt()).max(if big_d <= thr * (1.0 + 1e-12) { 1.0 } else { 0.0 });
    if !(b > 1.0 - 1e-10 && b < d as f64 / 2.0) {
        return Err(Error::Invariant(format!("b = {b} outside [1, d/2)")));
    }
    Ok(DeGiorgiSpec { d, c, big_d, b })
}

/// `D` maximizing `b(c, ·)`. `b` rises from 1 at the threshold and decays
/// back to 1 as `D → ∞`, so the maximizer is unique.
pub fn peak_d(d: usize, c: f64) -> f64 {
    let thr = threshold_d(d, c);
    let m = golden_section(|l| -exponent_b(d, c, thr + l.exp()), (1e-6 * thr).ln(), (1e6 * thr).ln(), 1e-12);
    thr + m.x.exp()
}

/// `D` on the increasing branch `[threshold, peak_d]` with `b(c, D) = b_target`.
pub fn d_for_b(d: usize, c: f64, b_target: f64) -> Result<f64> {
    if !(b_target >= 1.0 && b_target < d as f64 / 2.0) {
        return Err(invalid("b", format!("must lie in [1, d/2), got {b_target}")));
    }
    let lo = threshold_d(d, c);
    let hi = peak_d(d, c);
    let b_max = exponent_b(d, c, hi);
    if b_target > b_max {
        return Err(Error::NoBracket(format!("b = {b_target} exceeds the maximum {b_max} at c = {c}")));
    }
    bisect(|x| exponent_b(d, c, x) - b_target, lo, hi, 1e-15 * hi)
        .ok_or_else(|| Error::NoBracket(format!("b = {b_target}")))
}

/// `|v|²` with `v = c·I + D x̂x̂ᵀ` flattened.
pub fn spectral_gap(spec: &DeGiorgiSpec) -> f64 {
    let (d, c, big_d) = (spec.d as f64, spec.c, spec.big_d);
    d * c * c + 2.0 * c * big_d + big_d * big_d
}

pub fn coefficients_at(spec: &DeGiorgiSpec, x: &[f64]) -> Result<CMatrix> {
    let d = spec.d;
    if x.len() != d {
        return Err(Error::DimensionMismatch(format!("point has {} coordinates, d = {d}", x.len())));
    }
    let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(r > 0.0 && r.is_finite()) {
        return Err(invalid("x", "must be a finite nonzero point"));
    }
    let xh: Vec<f64> = x.iter().map(|v| v / r).collect();
    let v: Vec<f64> = (0..d * d)
        .map(|k| {
            let (i, a) = (k / d, k % d);
            let kron = if i == a { spec.c } else { 0.0 };
            kron + spec.big_d * xh[i] * xh[a]
        })
        .collect();
    Ok(CMatrix::from_fn(d * d, d * d, |p, q| {
        Complex64::new(if p == q { 1.0 } else { 0.0 } + v[p] * v[q], 0.0)
    }))
}

/// Deterministic quasi-uniform directions on the unit sphere of `ℝᵈ`.
///
/// `d = 3` uses the Fibonacci spiral; higher dimensions push a
/// generalized-golden-ratio Kronecker sequence through Box–Muller and
/// normalize.
pub fn sphere_points(d: usize, count: usize) -> Vec<Vec<f64>> {
    use std::f64::consts::PI;
    if d == 3 {
        let golden = PI * (3.0 - 5f64.sqrt());
        return (0..count)
            .map(|k| {
                let z = 1.0 - (2.0 * k as f64 + 1.0) / count as f64;
                let rho = (1.0 - z * z).sqrt();
                let phi = golden * k as f64;
                vec![rho * phi.cos(), rho * phi.sin(), z]
            })
            .collect();
    }
    let dims = d.div_ceil(2) * 2;
    // Root of x^{dims+1} = x + 1.
    let mut g = 1.5f64;
    for _ in 0..64 {
        g = (1.0 + g).powf(1.0 / (dims as f64 + 1.0));
    }
    let alpha: Vec<f64> = (1..=dims).map(|j| g.powi(-(j as i32)).fract()).collect();
    (0..count)
        .map(|k| {
            let u: Vec<f64> = alpha.iter().map(|a| (0.5 + a * (k + 1) as f64).fract()).collect();
            let mut p: Vec<f64> = u
                .chunks(2)
                .flat_map(|w| {
                    let r = (-2.0 * w[0].max(1e-300).ln()).sqrt();
                    [r * (2.0 * PI * w[1]).cos(), r * (2.0 * PI * w[1]).sin()]
                })
                .take(d)
                .collect();
            let n = p.iter().map(|v| v * v).sum::<f64>().sqrt();
            p.iter_mut().for_each(|v| *v /= n);
            p
        })
        .collect()
}

/// Point-list field of `A_DG` on the given directions.
pub fn sampled_field(spec: &DeGiorgiSpec, directions: &[Vec<f64>]) -> Result<MatrixField> {
    let samples = directions.iter().map(|x| coefficients_at(spec, x)).collect::<Result<Vec<_>>>()?;
    MatrixField::new(
        spec.d,
        spec.d,
        Domain::Points {
            coords: directions.to_vec(),
        },
        samples,
    )
}

/// `d(A_DG)` from `sphere_samples` directions (0-homogeneity makes the
/// sphere sufficient).
pub fn distance_of_degiorgi(spec: &DeGiorgiSpec, sphere_samples: usize) -> Result<f64> {
    if sphere_samples < 100 {
        return Err(invalid("sphere_samples", format!("must be >= 100, got {sphere_samples}")));
    }
    let field = sampled_field(spec, &sphere_points(spec.d, sphere_samples))?;
    Ok(distance(&field)?.dist)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalParameter {
    pub c: f64,
    #[serde(rename = "D")]
    pub big_d: f64,
    pub dist: f64,
    pub delta: f64,
    /// `(c, dist(c))` along `b = 1` on the log grid.
    #[serde(skip)]
    pub scan: Vec<(f64, f64)>,
    /// `true` if a sign change of `dist − δ` was bisected, `false` if the
    /// root was found as a tangential minimum.
    pub bracketed: bool,
}

fn dist_on_curve(d: usize, c: f64) -> Result<f64> {
    let spec = build_spec(d, c, threshold_d(d, c))?;
    distance_of_degiorgi(&spec, SOLVE_SAMPLES)
}

/// `c > 0` with `|d(A_DG) − δ(d)| ≤ tol` along the curve `b = 1`.
pub fn solve_c_for_delta(d: usize, tol: f64) -> Result<CriticalParameter> {
    let target = delta(d)?;
    if !(tol > 0.0) {
        return Err(invalid("tol", format!("must be > 0, got {tol}")));
    }
    let (l0, l1) = (C_SCAN.0.ln(), C_SCAN.1.ln());
    let step = (l1 - l0) / (SCAN_POINTS - 1) as f64;
    let mut scan = Vec::with_capacity(SCAN_POINTS);
    for k in 0..SCAN_POINTS {
        let c = (l0 + step * k as f64).exp();
        scan.push((c, dist_on_curve(d, c)?));
    }
    let finish = |c: f64, dist: f64, bracketed: bool, scan: Vec<(f64, f64)>| CriticalParameter {
        c,
        big_d: threshold_d(d, c),
        dist,
        delta: target,
        scan,
        bracketed,
    };
    if let Some(w) = scan.windows(2).find(|w| (w[0].1 - target) * (w[1].1 - target) < 0.0) {
        let (a, b) = (w[0].0.ln(), w[1].0.ln());
        let g = |lc: f64| dist_on_curve(d, lc.exp()).map(|v| v - target).unwrap_or(f64::NAN);
        let lc = bisect(g, a, b, 1e-12).ok_or_else(|| Error::NoBracket("bisection lost the bracket".into()))?;
        let dist = dist_on_curve(d, lc.exp())?;
        return Ok(finish(lc.exp(), dist, true, scan));
    }
    let k = (0..scan.len()).min_by(|&i, &j| scan[i].1.total_cmp(&scan[j].1)).expect("non-empty scan");
    let lo = scan[k.saturating_sub(1)].0.ln();
    let hi = scan[(k + 1).min(scan.len() - 1)].0.ln();
    let m = golden_section(|lc| dist_on_curve(d, lc.exp()).unwrap_or(f64::INFINITY), lo, hi, 1e-10);
    if (m.value - target).abs() <= tol {
        return Ok(finish(m.x.exp(), m.value, false, scan));
    }
    let (min, max) = scan.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.1), b.max(p.1)));
    Err(Error::NoBracket(format!(
        "dist - delta has no root on c in [{}, {}]: dist ranges over [{min:.10}, {max:.10}], minimum {:.10} vs delta {target:.10}",
        C_SCAN.0, C_SCAN.1, m.value
    )))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Perturbation {
    pub spec: DeGiorgiSpec,
    pub eta: f64,
    pub dist: f64,
    pub delta: f64,
    pub eps: f64,
    /// `d/(b−1)`: `u ∉ L^q` near the origin for `q` at or above this.
    pub integrability_threshold: f64,
}

/// Raise `D` by the largest `η = 2^{−k}` for which `d(A_DG) < δ(d) + ε`.
pub fn perturbation(d: usize, c: f64, eps: f64) -> Result<Perturbation> {
    if !(eps > 0.0) {
        return Err(invalid("eps", format!("must be > 0, got {eps}")));
    }
    let target = delta(d)?;
    let base = threshold_d(d, c);
    let mut eta = 1.0;
    for _ in 0..80 {
        let spec = build_spec(d, c, base + eta)?;
        let dist = distance_of_degiorgi(&spec, SOLVE_SAMPLES)?;
        if spec.b > 1.0 && dist < target + eps {
            return Ok(Perturbation {
                spec,
                eta,
                dist,
                delta: target,
                eps,
                integrability_threshold: d as f64 / (spec.b - 1.0),
            });
        }
        eta *= 0.5;
    }
    Err(Error::NotApplicable(
        "perturbation",
        format!("no eta found with dist < delta + {eps} at c = {c}"),
    ))
}

/// `u_α(x) = x_α/|x|^b`.
pub fn singular_solution(spec: &DeGiorgiSpec, x: &[f64]) -> Vec<f64> {
    let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let s = r.powf(-spec.b);
    x.iter().map(|v| v * s).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnnulusResidual {
    pub n: usize,
    pub h: f64,
    /// Max over annulus nodes of `|L_h u|`, divided by `Λ·r_inner^{−b−1}`.
    pub residual: f64,
    pub nodes: usize,
}

/// Discrete residual of `u = x/|x|^b` on `[−1,1]^d` restricted to the annulus
/// `r_inner ≤ |x| ≤ r_outer`, with cell coefficients evaluated at cell
/// centers. `coeff` overrides `A_DG` (used for the `A = I` check).
pub fn residual_on_annulus_with(
    spec: &DeGiorgiSpec,
    grid_n: usize,
    r_inner: f64,
    r_outer: f64,
    coeff: impl Fn(&[f64]) -> Result<CMatrix>,
    u: impl Fn(&[f64]) -> Vec<f64>,
    scale: f64,
) -> Result<AnnulusResidual> {
    if grid_n < 16 {
        return Err(invalid("grid_n", format!("must be >= 16, got {grid_n}")));
    }
    if !(0.0 < r_inner && r_inner < r_outer && r_outer <= 1.0) {
        return Err(invalid("annulus", format!("need 0 < r_inner < r_outer <= 1, got [{r_inner}, {r_outer}]")));
    }
    let d = spec.d;
    let nc = d;
    let grid = BoxGrid::cube(d, grid_n, -1.0, 2.0);
    let h = grid.h();
    if r_inner <= (d as f64).sqrt() * h {
        return Err(invalid(
            "annulus",
            format!("too thin for the grid: r_inner = {r_inner} <= sqrt(d)*h = {}", (d as f64).sqrt() * h),
        ));
    }
    let corners = 1usize << d;
    let inv_h = 1.0 / h;
    let zero = Complex64::new(0.0, 0.0);
    let mut local = vec![zero; corners * nc];
    let mut out = vec![zero; corners * nc];
    let mut g = vec![zero; d * nc];
    let mut f = vec![zero; d * nc];
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for k in 0..grid.num_nodes() {
        if grid.is_boundary(k) {
            continue;
        }
        let x = grid.node_coord(k);
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if r < r_inner || r > r_outer {
            continue;
        }
        count += 1;
        let mut acc = vec![zero; nc];
        // Node `x` is corner `s` of the cell whose lower corner is `x − h·s`.
        for s in 0..corners {
            let lower: Vec<f64> = (0..d).map(|j| x[j] - h * ((s >> j) & 1) as f64).collect();
            let center: Vec<f64> = lower.iter().map(|v| v + 0.5 * h).collect();
            let a = coeff(&center)?;
            let a_flat: Vec<Complex64> = (0..d * nc).flat_map(|p| (0..d * nc).map(move |q| (p, q))).map(|(p, q)| a[(p, q)]).collect();
            for t in 0..corners {
                let y: Vec<f64> = (0..d).map(|j| lower[j] + h * ((t >> j) & 1) as f64).collect();
                for (al, v) in u(&y).into_iter().enumerate() {
                    local[t * nc + al] = Complex64::new(v, 0.0);
                }
            }
            out.fill(zero);
            cell_flux(&a_flat, d, nc, inv_h, &local, &mut out, &mut g, &mut f);
            for al in 0..nc {
                acc[al] += out[s * nc + al];
            }
        }
        worst = worst.max(acc.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt());
    }
    Ok(AnnulusResidual {
        n: grid_n,
        h,
        residual: worst / scale,
        nodes: count,
    })
}

pub fn residual_on_annulus(spec: &DeGiorgiSpec, grid_n: usize, r_inner: f64, r_outer: f64) -> Result<AnnulusResidual> {
    let scale = (1.0 + spectral_gap(spec)) * r_inner.powf(-spec.b - 1.0);
    residual_on_annulus_with(
        spec,
        grid_n,
        r_inner,
        r_outer,
        |x| coefficients_at(spec, x),
        |x| singular_solution(spec, x),
        scale,
    )
}

/// `true` iff `|x|^{(1−b)q}` fails to be integrable at the origin, i.e.
/// `q ≥ d/(b−1)`.
pub fn integrability_witness(spec: &DeGiorgiSpec, q: f64) -> Result<bool> {
    if spec.b - 1.0 <= 1e-12 {
        return Err(Error::NotApplicable(
            "integrability_witness",
            format!("b = {} is 1; x/|x|^b is bounded", spec.b),
        ));
    }
    if !(q > 0.0) {
        return Err(invalid("q", format!("must be > 0, got {q}")));
    }
    // (1−b)q ≤ −d, compared in the form that is exact for the boundary case.
    Ok(q * (spec.b - 1.0) >= spec.d as f64 * (1.0 - 1e-15))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ellipticity::lambda_min;
    use crate::linalg::{identity, is_hermitian};

    #[test]
    fn b_formula_cases() {
        let s = build_spec(3, 1.0, 2.0).unwrap();
        assert!((s.b - 1.0).abs() < 1e-10);
        let s = build_spec(3, 1.0, 2.5).unwrap();
        assert!(s.b > 1.0 && s.b < 1.5);
        assert!(build_spec(3, 1.0, 1.9).is_err());
        assert!(build_spec(3, 0.0, 2.0).is_err());
        assert!(build_spec(2, 1.0, 2.0).is_err());
    }

    #[test]
    fn b_is_unimodal_in_d() {
        for (d, c) in [(3, 1.0), (4, 0.3), (4, 4.0), (5, 1.5)] {
            let t = threshold_d(d, c);
            let p = peak_d(d, c);
            let rise: Vec<f64> = (0..=50).map(|k| exponent_b(d, c, t + (p - t) * k as f64 / 50.0)).collect();
            assert!(rise.windows(2).all(|w| w[1] > w[0]));
            let fall: Vec<f64> = (0..50).map(|k| exponent_b(d, c, p * 1.5f64.powi(k))).collect();
            assert!(fall.windows(2).all(|w| w[1] < w[0]));
            assert!(rise.iter().chain(&fall).all(|&b| (1.0..d as f64 / 2.0).contains(&b)));
            assert!(fall[49] - 1.0 < 1e-3);
        }
    }

    #[test]
    fn coefficients_structure() {
        let s = build_spec(3, 1.0, 2.0).unwrap();
        let a = coefficients_at(&s, &[1.0, 0.0, 0.0]).unwrap();
        // v = I + 2 e1 e1ᵀ flattened; A = I + v vᵀ.
        let v = |i: usize, al: usize| (i == al) as u8 as f64 + 2.0 * (i == 0 && al == 0) as u8 as f64;
        for p in 0..9 {
            for q in 0..9 {
                let e = (p == q) as u8 as f64 + v(p / 3, p % 3) * v(q / 3, q % 3);
                assert_eq!(a[(p, q)].re, e);
            }
        }
        let x = [0.3, -1.2, 0.7];
        let a1 = coefficients_at(&s, &x).unwrap();
        let a2 = coefficients_at(&s, &x.map(|v| 2.0 * v)).unwrap();
        let a3 = coefficients_at(&s, &x.map(|v| -v)).unwrap();
        assert!((&a1 - &a2).norm() < 1e-12 && (&a1 - &a3).norm() < 1e-12);
        assert!(is_hermitian(&a1, 0.0));
        assert!(coefficients_at(&s, &[0.0; 3]).is_err());
    }

    #[test]
    fn sampled_distance_matches_spectrum() {
        for d in [3, 4] {
            let s = build_spec(d, 2.0, threshold_d(d, 2.0)).unwrap();
            let gap = spectral_gap(&s);
            let dist = distance_of_degiorgi(&s, 150).unwrap();
            assert!((dist - gap / (gap + 2.0)).abs() < 1e-9);
            let field = sampled_field(&s, &sphere_points(d, 100)).unwrap();
            assert!((lambda_min(&field) - 1.0).abs() < 1e-9);
        }
        assert!(distance_of_degiorgi(&build_spec(3, 1.0, 2.0).unwrap(), 99).is_err());
    }

    #[test]
    fn sphere_points_are_unit() {
        for d in [3, 4, 5] {
            let p = sphere_points(d, 300);
            assert!(p.iter().all(|x| (x.iter().map(|v| v * v).sum::<f64>() - 1.0).abs() < 1e-12));
            let mean: Vec<f64> = (0..d).map(|j| p.iter().map(|x| x[j]).sum::<f64>() / 300.0).collect();
            assert!(mean.iter().all(|m| m.abs() < 0.1), "{mean:?}");
        }
    }

    #[test]
    fn identity_residual_vanishes_on_linear_function() {
        let s = build_spec(3, 1.0, 2.0).unwrap();
        let r = residual_on_annulus_with(&s, 16, 0.25, 0.75, |_| Ok(identity(9)), |x| x.to_vec(), 1.0).unwrap();
        assert!(r.residual < 1e-12 && r.nodes > 0);
        assert!(residual_on_annulus(&s, 16, 0.1, 0.75).is_err());
    }

    #[test]
    fn integrability_boundary() {
        let c = 1.0;
        let s = build_spec(3, c, d_for_b(3, c, 1.2).unwrap()).unwrap();
        assert!((s.b - 1.2).abs() < 1e-12);
        assert!(integrability_witness(&s, 15.0).unwrap());
        assert!(!integrability_witness(&s, 14.999).unwrap());
        let s1 = build_spec(3, 1.0, 2.0).unwrap();
        assert!(matches!(integrability_witness(&s1, 15.0), Err(Error::NotApplicable(..))));
    }
}
