use std::f64::consts::PI;

use crate::coeff::{Domain, MatrixField};
use crate::error::{invalid, Error, Result};
use crate::linalg::CMatrix;

/// Offsets (in grid steps) and weights of the discrete mollifier `η_n`.
///
/// Tensor-product raised cosine with per-axis half-width `1/(n·√d)`, so the
/// support lies in the ball of radius `1/n`; weights are renormalized to unit
/// mass after sampling.
pub fn mollifier_weights(d: usize, h: f64, n: usize) -> Result<Vec<(Vec<i64>, f64)>> {
    if n == 0 {
        return Err(invalid("n", "smoothing index must be >= 1"));
    }
    let half = 1.0 / (n as f64 * (d as f64).sqrt());
    let reach = (half / h).ceil() as i64 - 1;
    if reach < 1 {
        return Err(invalid(
            "n",
            format!("bump half-width {half:e} is below the grid spacing {h:e}"),
        ));
    }
    let axis: Vec<(i64, f64)> = (-reach..=reach)
        .map(|m| (m, 0.5 * (1.0 + (PI * m as f64 * h / half).cos())))
        .filter(|&(_, w)| w > 0.0)
        .collect();
    let mut out = vec![(Vec::new(), 1.0)];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|(off, w)| {
                axis.iter().map(move |&(m, wa)| {
                    let mut o = off.clone();
                    o.push(m);
                    (o, w * wa)
                })
            })
            .collect();
    }
    let mass: f64 = out.iter().map(|(_, w)| w).sum();
    for (_, w) in &mut out {
        *w /= mass;
    }
    Ok(out)
}

/// Periodic discrete convolution `A_n = A * η_n` of a torus field.
pub fn mollify(field: &MatrixField, n: usize) -> Result<MatrixField> {
    let (grid, side) = field.torus().ok_or(Error::NotTorus)?;
    let d = field.d();
    let h = side / grid as f64;
    let weights = mollifier_weights(d, h, n)?;
    let g = grid as i64;
    let dn = field.block();
    let count = field.len();
    let mut idx = vec![0i64; d];
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let mut acc = CMatrix::zeros(dn, dn);
        for (off, w) in &weights {
            let src = idx
                .iter()
                .zip(off)
                .fold(0i64, |a, (&k, &m)| a * g + (k - m).rem_euclid(g));
            acc += field.samples()[src as usize].scale(*w);
        }
        out.push(acc);
        for ax in (0..d).rev() {
            idx[ax] += 1;
            if idx[ax] < g {
                break;
            }
            idx[ax] = 0;
        }
    }
    MatrixField::new(d, field.n_comp(), Domain::Torus { n: grid, side }, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::{constant_torus, MatrixField};
    use crate::ellipticity::{distance, lambda_max, lambda_min};
    use crate::linalg::{identity, max_abs_entry_diff};

    #[test]
    fn weights_have_unit_mass_and_are_nonnegative() {
        let w = mollifier_weights(3, 0.125, 2).unwrap();
        let mass: f64 = w.iter().map(|(_, w)| w).sum();
        assert!((mass - 1.0).abs() < 1e-15);
        assert!(w.iter().all(|(_, w)| *w >= 0.0));
        assert!(w.len() > 1);
    }

    #[test]
    fn too_fine_bump_is_rejected() {
        assert!(mollify(&constant_torus(3, 1, identity(3), 4, 1.0).unwrap(), 50).is_err());
        assert!(mollify(&constant_torus(3, 1, identity(3), 4, 1.0).unwrap(), 0).is_err());
    }

    #[test]
    fn constant_field_is_fixed() {
        let a = identity(3).scale(1.7);
        let f = constant_torus(3, 1, a.clone(), 8, 1.0).unwrap();
        let m = mollify(&f, 2).unwrap();
        for s in m.samples() {
            assert!(max_abs_entry_diff(s, &a) < 1e-14);
        }
    }

    #[test]
    fn checkerboard_distance_decreases() {
        let n = 8;
        let samples = (0..n * n * n)
            .map(|k| {
                let (i, j, l) = (k / 64, (k / 8) % 8, k % 8);
                let mut m = identity(3);
                m[(0, 0)] = if (i + j + l) % 2 == 0 { 1.0.into() } else { 2.0.into() };
                m
            })
            .collect();
        let f = MatrixField::new(3, 1, Domain::Torus { n, side: 1.0 }, samples).unwrap();
        let m = mollify(&f, 2).unwrap();
        let (d0, d1) = (distance(&f).unwrap().dist, distance(&m).unwrap().dist);
        assert!(d1 <= d0 + 1e-10, "{d1} > {d0}");
        assert!(lambda_min(&m) >= lambda_min(&f) - 1e-10);
        assert!(lambda_max(&m) <= lambda_max(&f) + 1e-10);
    }
}
