//! Randomized lower bounds for ‖e^{−tL}‖_{p→p} and ‖√t∇e^{−tL}‖_{p→p}
//! across a decade of t.

use ellipcert::bounds::q_plus_lower;
use ellipcert::coeff::sample;
use ellipcert::discrete::{assemble, gradient_probe, lp_ratio_probe};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> ellipcert::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let field = sample::hermitian_torus(3, 1, 12, 12.0, 1.0, 3.0, &mut rng)?;
    let op = assemble(&field)?;
    let q = q_plus_lower(op.report().dist)?;
    println!("dist {:.4}, q_plus_lower {q:.4}", op.report().dist);
    for t in [0.1, 0.3, 1.0] {
        let lp = lp_ratio_probe(&op, t, 50.0, 6, 7)?;
        let grad = gradient_probe(&op, t, q.min(4.0), 6, 7)?;
        println!("t {t:<4} |e^-tL|_50 >= {lp:.4}   |sqrt(t) grad e^-tL|_p >= {grad:.4}");
    }
    Ok(())
}
