//! Crank–Nicolson approximation of `e^{−tL}`.

use num_complex::Complex64;

use super::operator::TorusOperator;
use super::solver::{bicgstab, pcg, SolveStats};
use crate::error::{invalid, Result};

/// Relative residual of every inner solve.
pub const INNER_TOL: f64 = 1e-10;
pub const INNER_MAX_ITER: usize = 500;
pub const DEFAULT_SUBSTEPS: usize = 64;

/// Inner-solve diagnostics accumulated over a run.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct HeatStats {
    pub steps: usize,
    pub inner_iterations: usize,
    pub max_inner_residual: f64,
}

/// One CN step `(I + Δt/2·L) v = (I − Δt/2·L) u`, with the FFT-diagonal
/// preconditioner `(I + Δt/2·τ·(−Δₕ))⁻¹`, `τ = 1/t*`.
struct Stepper<'a> {
    op: &'a TorusOperator,
    dt: f64,
    precond_symbol: Vec<f64>,
    lu: Vec<Complex64>,
    rhs: Vec<Complex64>,
}

impl<'a> Stepper<'a> {
    fn new(op: &'a TorusOperator, dt: f64) -> Self {
        let tau = 1.0 / op.report().t_star;
        let precond_symbol = op
            .fft()
            .laplacian_symbol(op.h())
            .into_iter()
            .map(|l| 1.0 / (1.0 + 0.5 * dt * tau * l))
            .collect();
        Self {
            op,
            dt,
            precond_symbol,
            lu: vec![Complex64::new(0.0, 0.0); op.len()],
            rhs: vec![Complex64::new(0.0, 0.0); op.len()],
        }
    }

    fn step(&mut self, u: &mut [Complex64], stats: &mut HeatStats) -> Result<()> {
        let half = 0.5 * self.dt;
        self.op.apply_into(u, &mut self.lu);
        for ((r, ui), li) in self.rhs.iter_mut().zip(u.iter()).zip(&self.lu) {
            *r = ui - li * half;
        }
        let op = self.op;
        let nc = op.n_comp();
        let sym = &self.precond_symbol;
        let apply = |x: &[Complex64], y: &mut [Complex64]| {
            op.apply_into(x, y);
            y.iter_mut().zip(x).for_each(|(yi, xi)| *yi = xi + *yi * half);
        };
        let precond = |r: &[Complex64], z: &mut [Complex64]| {
            let out = op.fft().multiply(r, nc, |m| sym[m].into());
            z.copy_from_slice(&out);
        };
        let st: SolveStats = if op.is_hermitian() {
            pcg(apply, precond, &self.rhs, u, INNER_TOL, INNER_MAX_ITER)?
        } else {
            bicgstab(apply, precond, &self.rhs, u, INNER_TOL, INNER_MAX_ITER)?
        };
        stats.steps += 1;
        stats.inner_iterations += st.iterations;
        stats.max_inner_residual = stats.max_inner_residual.max(st.residual);
        Ok(())
    }
}

/// `e^{−tL} f` by `m` Crank–Nicolson substeps.
pub fn heat_apply(op: &TorusOperator, t: f64, f: &[Complex64], m: usize) -> Result<Vec<Complex64>> {
    heat_apply_stats(op, t, f, m).map(|(u, _)| u)
}

pub fn heat_apply_stats(op: &TorusOperator, t: f64, f: &[Complex64], m: usize) -> Result<(Vec<Complex64>, HeatStats)> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(invalid("t", format!("must be > 0, got {t}")));
    }
    if m == 0 {
        return Err(invalid("substeps", "must be >= 1"));
    }
    if f.len() != op.len() {
        return Err(invalid("f", format!("length {} != {}", f.len(), op.len())));
    }
    let mut u = f.to_vec();
    let mut stats = HeatStats::default();
    let mut stepper = Stepper::new(op, t / m as f64);
    for _ in 0..m {
        stepper.step(&mut u, &mut stats)?;
    }
    Ok((u, stats))
}

/// Evolve with a fixed step `dt` and return the state at each of `times`
/// (ascending). Every time must be a multiple of `dt` up to rounding.
pub fn heat_evolve(op: &TorusOperator, times: &[f64], f: &[Complex64], dt: f64) -> Result<Vec<Vec<Complex64>>> {
    if !(dt > 0.0) {
        return Err(invalid("dt", "must be > 0"));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) || times.first().is_none_or(|&t| t <= 0.0) {
        return Err(invalid("times", "must be positive and strictly increasing"));
    }
    let mut u = f.to_vec();
    let mut stats = HeatStats::default();
    let mut stepper = Stepper::new(op, dt);
    let mut done = 0usize;
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        let target = (t / dt).round() as usize;
        if ((target as f64) * dt - t).abs() > 1e-9 * t {
            return Err(invalid("times", format!("{t} is not a multiple of dt = {dt}")));
        }
        while done < target {
            stepper.step(&mut u, &mut stats)?;
            done += 1;
        }
        out.push(u.clone());
    }
    Ok(out)
}

/// Discrete delta at node `y`, component `comp`, scaled by `h^{−d}`.
pub fn delta_at(op: &TorusOperator, y: usize, comp: usize) -> Vec<Complex64> {
    let mut f = vec![Complex64::new(0.0, 0.0); op.len()];
    f[y * op.n_comp() + comp] = Complex64::new(op.h().powi(-(op.d() as i32)), 0.0);
    f
}

/// `K_t(·, y)` for component `comp` of the delta.
pub fn kernel_column(op: &TorusOperator, t: f64, y: usize, comp: usize, m: usize) -> Result<Vec<Complex64>> {
    if y >= op.grid().num_nodes() || comp >= op.n_comp() {
        return Err(invalid("y", format!("node {y}/component {comp} out of range")));
    }
    heat_apply(op, t, &delta_at(op, y, comp), m)
}
