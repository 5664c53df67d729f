//! Randomized lower bounds for `‖e^{−tL}‖_{p→p}` and `‖√t ∇ₕ e^{−tL}‖_{p→p}`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::heat::{heat_apply, DEFAULT_SUBSTEPS};
use super::operator::{lp_norm, TorusOperator};
use crate::error::{invalid, Result};

/// Substeps for time `t`: at least [`DEFAULT_SUBSTEPS`], and enough that
/// `Δt·max diag(L)/2 ≤ 1`, which keeps each CN factor positivity preserving
/// when `L` is an M-matrix (e.g. `A = I`).
pub fn probe_substeps(op: &TorusOperator, t: f64) -> usize {
    let need = (0.5 * t * op.max_diagonal()).ceil() as usize;
    need.max(DEFAULT_SUBSTEPS)
}

/// Trial `k`: even trials are complex white noise, odd trials are a single
/// node impulse at a random node and component.
fn trial(op: &TorusOperator, k: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    let len = op.len();
    if k % 2 == 0 {
        (0..len)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect()
    } else {
        let mut f = vec![Complex64::new(0.0, 0.0); len];
        f[rng.random_range(0..len)] = Complex64::new(1.0, 0.0);
        f
    }
}

fn check(t: f64, p: f64, trials: usize) -> Result<()> {
    if !(t > 0.0) {
        return Err(invalid("t", format!("must be > 0, got {t}")));
    }
    if !(p > 1.0) {
        return Err(invalid("p", format!("must lie in (1, inf], got {p}")));
    }
    if trials == 0 {
        return Err(invalid("trials", "must be >= 1"));
    }
    Ok(())
}

/// `max_f ‖e^{−tL}f‖_p / ‖f‖_p` over seeded random `f`.
pub fn lp_ratio_probe(op: &TorusOperator, t: f64, p: f64, trials: usize, seed: u64) -> Result<f64> {
    check(t, p, trials)?;
    let m = probe_substeps(op, t);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: f64 = 0.0;
    for k in 0..trials {
        let f = trial(op, k, &mut rng);
        let u = heat_apply(op, t, &f, m)?;
        best = best.max(op.lp_norm(&u, p) / op.lp_norm(&f, p));
    }
    Ok(best)
}

/// `‖√t ∇ₕ u‖_p` with the Euclidean norm over `(j, β)` at every cell corner.
pub fn gradient_lp_norm(op: &TorusOperator, u: &[Complex64], p: f64) -> f64 {
    let st = op.stencil();
    lp_norm(&st.gradient(u), op.d() * op.n_comp(), st.gradient_weight(), p)
}

/// `max_f ‖√t ∇ₕ e^{−tL}f‖_p / ‖f‖_p` over seeded random `f`.
pub fn gradient_probe(op: &TorusOperator, t: f64, p: f64, trials: usize, seed: u64) -> Result<f64> {
    check(t, p, trials)?;
    let m = probe_substeps(op, t);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: f64 = 0.0;
    for k in 0..trials {
        let f = trial(op, k, &mut rng);
        let u = heat_apply(op, t, &f, m)?;
        best = best.max(t.sqrt() * gradient_lp_norm(op, &u, p) / op.lp_norm(&f, p));
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::constant_torus;
    use crate::discrete::operator::assemble;
    use crate::linalg::identity;

    #[test]
    fn identity_is_lp_contractive() {
        let op = assemble(&constant_torus(3, 1, identity(3), 6, 6.0).unwrap()).unwrap();
        for p in [1.5, 2.0, 7.0] {
            let r = lp_ratio_probe(&op, 1.0, p, 4, 3).unwrap();
            assert!(r <= 1.0 + 1e-6 && r > 0.0, "p={p}: {r}");
        }
        assert!(lp_ratio_probe(&op, 1.0, 1.0, 4, 3).is_err());
    }

    #[test]
    fn gradient_of_constants_vanishes() {
        let op = assemble(&constant_torus(3, 1, identity(3), 4, 4.0).unwrap()).unwrap();
        let c = vec![Complex64::new(1.0, 0.0); op.len()];
        assert_eq!(gradient_lp_norm(&op, &c, 2.0), 0.0);
        let r = gradient_probe(&op, 0.5, 2.0, 4, 1).unwrap();
        assert!(r <= (2.0 * std::f64::consts::E).powf(-0.5) + 1e-3);
    }

    #[test]
    fn seeded_probes_are_reproducible() {
        let op = assemble(&constant_torus(3, 1, identity(3), 4, 4.0).unwrap()).unwrap();
        let a = lp_ratio_probe(&op, 0.3, 3.0, 3, 9).unwrap();
        let b = lp_ratio_probe(&op, 0.3, 3.0, 3, 9).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }
}
