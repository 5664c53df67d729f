//! The analytic family A_z = τ(I − F(z)B) around a supercritical field.

use ellipcert::bounds::{build_family, family_matrix};
use ellipcert::bounds::p_plus_lower;
use ellipcert::coeff::sample;
use ellipcert::ellipticity::distance;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> ellipcert::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    // spectrum [1, 19]: dist = 0.9
    let field = sample::hermitian_torus(3, 1, 2, 1.0, 1.0, 19.0, &mut rng)?;
    println!("p_plus_lower(0.9, 3) = {}", p_plus_lower(0.9, 3)?);
    for eps in [1e-2, 1e-4, 1e-6] {
        let fam = build_family(&field, eps)?;
        println!("eps {eps:e}: theta {:.8} 2*/theta {:.8}", fam.theta, fam.p_bound());
    }
    let fam = build_family(&field, 1e-2)?;
    for t in [0.0, 1.0, -10.0] {
        let a = family_matrix(&fam, Complex64::new(0.0, t), false)?;
        println!("d(A_(i{t})) = {:.6} <= r*dist = {:.6}", distance(&a)?.dist, fam.r * fam.dist);
    }
    Ok(())
}
