//! Koshelev window: largest α with d(A)·c(α, d, ε) ≤ 1 − margin, and the
//! resulting Hölder exponent μ.

use ellipcert::bounds::{choose_alpha, delta, HOLDER_MARGIN};

fn main() -> ellipcert::Result<()> {
    for d in [3, 4, 5] {
        let dl = delta(d)?;
        for frac in [0.0, 0.5, 0.9] {
            let dist = frac * dl;
            let h = choose_alpha(d, dist, HOLDER_MARGIN)?;
            println!("d {d} dist {dist:.4}: alpha {:.6} c {:.6} mu {:.6}", h.alpha, h.c_alpha, h.mu);
        }
    }
    Ok(())
}
