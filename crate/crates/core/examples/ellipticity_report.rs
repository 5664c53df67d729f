//! λ, Λ, d(A) and the sandwich (1−ρ)/(1+ρ) ≤ d(A) ≤ √(1−ρ²) on random
//! constant fields.

use ellipcert::coeff::{constant_field, sample};
use ellipcert::ellipticity::{ellipticity_report, verify_sandwich};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> ellipcert::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for skew in [0.0, 0.5, 2.0] {
        let a = if skew == 0.0 {
            sample::random_hermitian(6, 1.0, 4.0, &mut rng)
        } else {
            sample::random_elliptic(6, 1.0, 4.0, skew, &mut rng)
        };
        let field = constant_field(3, 2, a)?;
        let r = ellipticity_report(&field)?;
        let s = verify_sandwich(&field)?;
        println!(
            "skew {skew:<4} lambda {:.4} Lambda {:.4} t* {:.4}  {:.6} <= d = {:.6} <= {:.6}",
            r.lambda, r.big_lambda, r.t_star, s.lower, s.dist, s.upper
        );
    }
    Ok(())
}
