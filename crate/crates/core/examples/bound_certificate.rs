//! Lower bounds for p₊(L) and q₊(L) as functions of d(A).

use ellipcert::bounds::{certificate, phi, q_plus_branch_point, sigma, sigma_residual};

fn main() -> ellipcert::Result<()> {
    let s = sigma();
    println!("sigma = {s:.15} (residual {:e})", sigma_residual(s));
    println!("Phi(sigma) = {:.12}, 2(sigma-1) = {:.12}", phi(s)?, 2.0 * (s - 1.0));
    println!("q_plus branch point = {:.6}", q_plus_branch_point());
    println!("{:>2} {:>6} {:>12} {:>14} {:>14}", "d", "dist", "regime", "p_plus", "q_plus");
    for d in [3, 4] {
        for dist in [0.0, 0.3, 0.6, 0.9, 0.99] {
            let c = certificate(d, dist)?;
            println!(
                "{d:>2} {dist:>6} {:>12} {:>14} {:>14}",
                format!("{:?}", c.regime),
                c.p_plus_lower.to_string(),
                c.q_plus_lower.to_string()
            );
        }
    }
    Ok(())
}
