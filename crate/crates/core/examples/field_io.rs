//! Write a few torus fields to disk and read them back.
//!
//! `cargo run --example field_io -- <dir>` (default: ./fields). The files are
//! valid `--field` inputs for `ellipcert simulate`.

use std::path::PathBuf;

use ellipcert::coeff::{constant_torus, load_field, sample, save_field};
use ellipcert::ellipticity::ellipticity_report;
use ellipcert::linalg::identity;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> ellipcert::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "fields".into()));
    std::fs::create_dir_all(&dir).map_err(|source| ellipcert::Error::Io { path: dir.clone(), source })?;
    let mut rng = ChaCha8Rng::seed_from_u64(0);

    let fields = [
        ("identity_16.json", constant_torus(3, 1, identity(3), 16, 16.0)?),
        // spectrum [1, 3]: dist = 0.5
        ("hermitian_16.json", sample::hermitian_torus(3, 1, 16, 16.0, 1.0, 3.0, &mut rng)?),
        ("hermitian_8.json", sample::hermitian_torus(3, 1, 8, 8.0, 1.0, 3.0, &mut rng)?),
        ("blocky_16.json", sample::blocky_hermitian_torus(3, 1, 16, 1.0, 4, 1.0, 2.0, &mut rng)?),
        ("elliptic_8.json", sample::elliptic_torus(3, 2, 8, 8.0, 1.0, 2.0, 0.5, &mut rng)?),
    ];
    for (name, field) in &fields {
        let path = dir.join(name);
        save_field(field, &path)?;
        let back = load_field(&path)?;
        assert_eq!(&back, field);
        let r = ellipticity_report(&back)?;
        println!("{:<20} lambda={:.4} Lambda={:.4} dist={:.6}", path.display(), r.lambda, r.big_lambda, r.dist);
    }
    Ok(())
}
