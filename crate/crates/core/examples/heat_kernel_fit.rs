//! Gaussian envelope fitted to Crank–Nicolson heat kernels on a 16³ torus.
//! Slow in debug builds; use --release.

use ellipcert::coeff::{constant_torus, sample};
use ellipcert::discrete::{assemble, gaussian_fit, FitConfig};
use ellipcert::linalg::identity;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> ellipcert::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let times = [0.05, 0.1, 0.2, 0.4];
    let fields = [
        ("identity", constant_torus(3, 1, identity(3), 16, 16.0)?),
        ("dist 0.5", sample::hermitian_torus(3, 1, 16, 16.0, 1.0, 3.0, &mut rng)?),
    ];
    for (name, field) in &fields {
        let op = assemble(field)?;
        let fit = gaussian_fit(&op, &times, 4, &FitConfig::default())?;
        println!(
            "{name:<9} c {:.4} a {:.4} (a_ref {:.4}) violation {:.2e} holdout {:.2e} mu {:.3}",
            fit.c_fit, fit.a_fit, fit.a_ref, fit.max_violation, fit.holdout_violation, fit.mu_fit
        );
    }
    Ok(())
}
