//! Mollification never increases d(A): λ goes up, Λ goes down.

use ellipcert::coeff::sample;
use ellipcert::ellipticity::{ellipticity_report, mollify};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> ellipcert::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let field = sample::blocky_hermitian_torus(3, 1, 16, 1.0, 4, 1.0, 5.0, &mut rng)?;
    let r0 = ellipticity_report(&field)?;
    println!("raw       lambda {:.6} Lambda {:.6} dist {:.6}", r0.lambda, r0.big_lambda, r0.dist);
    for n in [4, 2, 1] {
        let r = ellipticity_report(&mollify(&field, n)?)?;
        println!("n = {n:<6} lambda {:.6} Lambda {:.6} dist {:.6}", r.lambda, r.big_lambda, r.dist);
    }
    Ok(())
}
