//! Critical De Giorgi parameter c(d) with d(A_DG) = δ(d), a perturbed system
//! with b > 1, and the grid residual of u = x/|x|^b.

use ellipcert::degiorgi::{perturbation, residual_on_annulus, solve_c_for_delta};

fn main() -> ellipcert::Result<()> {
    let d = 3;
    let crit = solve_c_for_delta(d, 1e-4)?;
    println!("c = {:.10}  D = {:.10}  dist = {:.10}  delta = {:.10}", crit.c, crit.big_d, crit.dist, crit.delta);
    let p = perturbation(d, crit.c, 0.01)?;
    println!(
        "eta = {}  b = {:.8}  dist = {:.8}  u not in L^q for q >= {:.4}",
        p.eta, p.spec.b, p.dist, p.integrability_threshold
    );
    let mut prev = None;
    for n in [16, 32, 64] {
        let r = residual_on_annulus(&p.spec, n, 0.25, 0.75)?;
        let ratio = prev.map(|q: f64| q / r.residual);
        println!("n {n:>3}: residual {:.4e} over {} nodes, ratio {:?}", r.residual, r.nodes, ratio);
        prev = Some(r.residual);
    }
    Ok(())
}
