//! Riesz isometry and the Neumann-series solve of L u = f, checked against a
//! dense direct solve.

use ellipcert::coeff::sample;
use ellipcert::discrete::riesz::component_means;
use ellipcert::discrete::stencil::norm2;
use ellipcert::discrete::{assemble, direct_solve, neumann_solve, riesz_apply};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn main() -> ellipcert::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let field = sample::hermitian_torus(3, 1, 8, 8.0, 1.0, 3.0, &mut rng)?;
    let op = assemble(&field)?;
    let mut f: Vec<Complex64> = (0..op.len())
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let m = component_means(&f, 1)[0];
    f.iter_mut().for_each(|z| *z -= m);

    let r = riesz_apply(op.fft(), &f, 1);
    let rn = r.iter().map(|v| norm2(v).powi(2)).sum::<f64>().sqrt();
    println!("|Rf| = {rn:.15}  |f| = {:.15}", norm2(&f));

    let sol = neumann_solve(&op, &f, 1e-8, 200)?;
    let bound = (1e-8f64.ln() / op.report().dist.ln()).ceil() + 5.0;
    println!("dist {:.6}: {} iterations (bound {bound}), residual {:.2e}", op.report().dist, sol.iterations, sol.residual);
    let u = direct_solve(&op, &f)?;
    let diff: Vec<Complex64> = sol.u.iter().zip(&u).map(|(a, b)| a - b).collect();
    println!("relative difference to direct solve {:.2e}", norm2(&diff) / norm2(&u));
    Ok(())
}
