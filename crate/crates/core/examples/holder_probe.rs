//! Empirical Hölder constant of L-harmonic functions under grid refinement.

use ellipcert::bounds::{choose_alpha, HOLDER_MARGIN};
use ellipcert::coeff::sample;
use ellipcert::discrete::holder_probe;
use ellipcert::ellipticity::distance;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> ellipcert::Result<()> {
    let mut ratios = Vec::new();
    for n in [16, 32] {
        // same seed and block count: same physical coefficients at both sizes
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let field = sample::blocky_hermitian_torus(3, 1, n, 1.0, 4, 1.0, 2.0, &mut rng)?;
        let mu = choose_alpha(3, distance(&field)?.dist, HOLDER_MARGIN)?.mu;
        let p = holder_probe(&field, mu, 0.25, 2000, 5)?;
        println!("n {n}: mu {mu:.4} ratio {:.6} ({} solver iterations)", p.ratio, p.iterations);
        ratios.push(p.ratio);
    }
    println!("relative change {:.3}%", 100.0 * (ratios[1] / ratios[0] - 1.0));
    Ok(())
}
