//! One-sided Gaussian envelope `|K_t(x,y)| ≤ c·t^{−d/2}·exp(−a|x−y|²/t)` fitted
//! to sampled heat-kernel columns.

use num_complex::Complex64;
use rand::seq::index::sample as sample_indices;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::heat::{delta_at, heat_evolve};
use super::operator::TorusOperator;
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct FitConfig {
    /// Samples with `|K| < floor·peak` are ignored by the fit.
    pub floor: f64,
    /// Samples farther than `window·side` from the pole are ignored by the fit.
    pub window: f64,
    /// Require `guard_factor·sqrt(t_max/a_ref) < side/2` with `a_ref = t*/4`.
    pub guard_factor: f64,
    pub a_min: f64,
    pub a_max: f64,
    pub a_points: usize,
    /// CN substeps for the smallest time; later times reuse the same step.
    pub substeps: usize,
    pub seed: u64,
    /// Extra columns evaluated against the fitted envelope but not fitted.
    pub holdout_columns: usize,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            floor: 1e-2,
            window: 0.25,
            guard_factor: 4.0,
            a_min: 1e-3,
            a_max: 10.0,
            a_points: 801,
            substeps: 64,
            seed: 0,
            holdout_columns: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeatKernelFit {
    pub times: Vec<f64>,
    pub c_fit: f64,
    pub a_fit: f64,
    /// Positive part of `|K| − envelope`, relative to the column peak at the
    /// same time, maximized over every sampled value of the fitted columns.
    pub max_violation: f64,
    /// Same quantity on the held-out columns.
    pub holdout_violation: f64,
    /// Empirical Hölder exponent of `x ↦ K_t(x,y)` from kernel increments.
    pub mu_fit: f64,
    /// `c_fit·t^{−d/2}` divided by the largest on-diagonal value, per time.
    pub peak_ratio: Vec<f64>,
    pub columns: Vec<usize>,
    pub holdout: Vec<usize>,
    pub a_ref: f64,
    pub fit_samples: usize,
}

#[derive(Clone, Copy)]
struct Sample {
    r2: f64,
    value: f64,
    t: f64,
    peak: f64,
}

/// `|K_t(x,y)|` as the Frobenius norm of the `N×N` block, for every `x` and
/// every time.
fn kernel_blocks(op: &TorusOperator, times: &[f64], y: usize, dt: f64) -> Result<Vec<Vec<f64>>> {
    let nc = op.n_comp();
    let nodes = op.grid().num_nodes();
    let mut acc = vec![vec![0.0; nodes]; times.len()];
    for comp in 0..nc {
        let states = heat_evolve(op, times, &delta_at(op, y, comp), dt)?;
        for (a, s) in acc.iter_mut().zip(&states) {
            for (x, v) in a.iter_mut().enumerate() {
                *v += s[x * nc..(x + 1) * nc].iter().map(Complex64::norm_sqr).sum::<f64>();
            }
        }
    }
    acc.iter_mut().for_each(|a| a.iter_mut().for_each(|v| *v = v.sqrt()));
    Ok(acc)
}

fn collect(op: &TorusOperator, times: &[f64], y: usize, blocks: &[Vec<f64>]) -> Vec<Sample> {
    let g = op.grid();
    let mut out = Vec::new();
    for (t, col) in times.iter().zip(blocks) {
        let peak = col.iter().copied().fold(0.0, f64::max);
        for (x, &v) in col.iter().enumerate() {
            out.push(Sample {
                r2: g.torus_distance(x, y).powi(2),
                value: v,
                t: *t,
                peak,
            });
        }
    }
    out
}

fn envelope(c: f64, a: f64, d: usize, s: &Sample) -> f64 {
    c * s.t.powf(-(d as f64) / 2.0) * (-a * s.r2 / s.t).exp()
}

fn worst_violation(c: f64, a: f64, d: usize, samples: &[Sample]) -> f64 {
    samples
        .iter()
        .map(|s| ((s.value - envelope(c, a, d, s)) / s.peak).max(0.0))
        .fold(0.0, f64::max)
}

/// Slope of `ln max_x |K(x + s·e_j) − K(x)|` against `ln s`, `s = 1..4`.
fn increment_exponent(op: &TorusOperator, col: &[f64]) -> f64 {
    let g = op.grid();
    let n = g.nodes_per_axis();
    let d = g.d();
    let steps: Vec<usize> = (1..=4.min(n / 2)).collect();
    let pts: Vec<(f64, f64)> = steps
        .iter()
        .map(|&s| {
            let mut m: f64 = 0.0;
            for x in 0..col.len() {
                let idx = g.node_multi(x);
                for ax in 0..d {
                    let mut j = idx.clone();
                    j[ax] = (j[ax] + s) % n;
                    m = m.max((col[g.node_index(&j)] - col[x]).abs());
                }
            }
            ((s as f64 * g.h()).ln(), m.max(f64::MIN_POSITIVE).ln())
        })
        .collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Fit `(c, a)` over `column_sample_count` seeded kernel columns.
///
/// For every `a` on a log grid, `c(a)` is the smallest constant for which the
/// envelope dominates every fit sample; `a` is chosen to minimize the mean
/// log gap between envelope and kernel on the fit set.
pub fn gaussian_fit(
    op: &TorusOperator,
    times: &[f64],
    column_sample_count: usize,
    cfg: &FitConfig,
) -> Result<HeatKernelFit> {
    if times.len() < 2 || times.windows(2).any(|w| w[1] <= w[0]) || times[0] <= 0.0 {
        return Err(invalid("times", "need at least two positive increasing times"));
    }
    if column_sample_count == 0 {
        return Err(invalid("column_sample_count", "must be >= 1"));
    }
    let d = op.d();
    let side = op.grid().side();
    let a_ref = op.report().t_star / 4.0;
    let t_max = *times.last().expect("non-empty");
    let reach = cfg.guard_factor * (t_max / a_ref).sqrt();
    if reach >= side / 2.0 {
        return Err(invalid(
            "times",
            format!("wrap-around guard fails: {reach:.4} >= side/2 = {:.4} at t = {t_max}", side / 2.0),
        ));
    }
    let nodes = op.grid().num_nodes();
    let total = (column_sample_count + cfg.holdout_columns).min(nodes);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let picked = sample_indices(&mut rng, nodes, total).into_vec();
    let fit_count = column_sample_count.min(total);
    let (columns, holdout) = (picked[..fit_count].to_vec(), picked[fit_count..].to_vec());
    let dt = times[0] / cfg.substeps as f64;
    let hd = op.h().powi(d as i32);

    let mut fit_samples = Vec::new();
    let mut all_fit_columns = Vec::new();
    let mut mu_slopes = Vec::new();
    let mut diag_peak = vec![0.0f64; times.len()];
    for &y in &columns {
        let blocks = kernel_blocks(op, times, y, dt)?;
        let mass_at_pole = blocks[0][y] * hd;
        if mass_at_pole >= 0.999 * (op.n_comp() as f64).sqrt() {
            return Err(Error::NotApplicable(
                "gaussian_fit",
                format!("kernel mass concentrated at one node at t = {}; grid too coarse", times[0]),
            ));
        }
        for (k, col) in blocks.iter().enumerate() {
            diag_peak[k] = diag_peak[k].max(col[y]);
        }
        mu_slopes.push(increment_exponent(op, blocks.last().expect("times non-empty")));
        let samples = collect(op, times, y, &blocks);
        let window2 = (cfg.window * side).powi(2);
        fit_samples.extend(
            samples
                .iter()
                .filter(|s| s.value >= cfg.floor * s.peak && s.r2 <= window2)
                .copied(),
        );
        all_fit_columns.extend(samples);
    }
    if fit_samples.is_empty() {
        return Err(Error::NotApplicable("gaussian_fit", "no kernel samples above the floor".into()));
    }

    let mut best: Option<(f64, f64, f64)> = None;
    let (la, lb) = (cfg.a_min.ln(), cfg.a_max.ln());
    for i in 0..cfg.a_points {
        let a = (la + (lb - la) * i as f64 / (cfg.a_points - 1).max(1) as f64).exp();
        let c = fit_samples
            .iter()
            .map(|s| s.value * s.t.powf(d as f64 / 2.0) * (a * s.r2 / s.t).exp())
            .fold(0.0, f64::max);
        let gap = fit_samples
            .iter()
            .map(|s| (envelope(c, a, d, s) / s.value).ln())
            .sum::<f64>()
            / fit_samples.len() as f64;
        if best.is_none_or(|b| gap < b.2) {
            best = Some((c, a, gap));
        }
    }
    let (c_fit, a_fit, _) = best.expect("a grid non-empty");

    let max_violation = worst_violation(c_fit, a_fit, d, &all_fit_columns);
    let mut holdout_violation: f64 = 0.0;
    for &y in &holdout {
        let blocks = kernel_blocks(op, times, y, dt)?;
        holdout_violation = holdout_violation.max(worst_violation(c_fit, a_fit, d, &collect(op, times, y, &blocks)));
    }
    let peak_ratio = times
        .iter()
        .zip(&diag_peak)
        .map(|(t, p)| c_fit * t.powf(-(d as f64) / 2.0) / p)
        .collect();
    Ok(HeatKernelFit {
        times: times.to_vec(),
        c_fit,
        a_fit,
        max_violation,
        holdout_violation,
        mu_fit: mu_slopes.iter().sum::<f64>() / mu_slopes.len() as f64,
        peak_ratio,
        columns,
        holdout,
        a_ref,
        fit_samples: fit_samples.len(),
    })
}
