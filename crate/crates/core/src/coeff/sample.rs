//! Seeded generators for random coefficient matrices and fields.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{Domain, MatrixField};
use crate::error::{invalid, Result};
use crate::linalg::CMatrix;

fn gaussian(rng: &mut (impl Rng + ?Sized)) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn random_matrix(n: usize, rng: &mut (impl Rng + ?Sized)) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| gaussian(rng))
}

/// Haar-ish random unitary from the QR factor of a complex Gaussian matrix.
pub fn random_unitary(n: usize, rng: &mut (impl Rng + ?Sized)) -> CMatrix {
    random_matrix(n, rng).qr().q()
}

/// Hermitian matrix with spectrum in `[lambda, big_lambda]`, both endpoints attained.
pub fn random_hermitian(n: usize, lambda: f64, big_lambda: f64, rng: &mut (impl Rng + ?Sized)) -> CMatrix {
    let mut eig: Vec<f64> = (0..n).map(|_| rng.random_range(lambda..=big_lambda)).collect();
    eig[0] = lambda;
    if n > 1 {
        eig[n - 1] = big_lambda;
    }
    let u = random_unitary(n, rng);
    let diag = CMatrix::from_diagonal(&DVector::from_iterator(n, eig.into_iter().map(Complex64::from)));
    let h = &u * diag * u.adjoint();
    (h.clone() + h.adjoint()).scale(0.5)
}

/// Non-Hermitian elliptic matrix: Hermitian part with spectrum in
/// `[lambda, big_lambda]` plus a random skew-Hermitian part of norm about `skew`.
pub fn random_elliptic(n: usize, lambda: f64, big_lambda: f64, skew: f64, rng: &mut (impl Rng + ?Sized)) -> CMatrix {
    let h = random_hermitian(n, lambda, big_lambda, rng);
    let g = random_matrix(n, rng);
    let k = (&g - g.adjoint()).scale(0.5);
    let kn = crate::linalg::op_norm(&k).max(f64::MIN_POSITIVE);
    h + k.scale(skew / kn)
}

fn torus_count(d: usize, n: usize) -> Result<usize> {
    n.checked_pow(d as u32).ok_or_else(|| invalid("n", "grid too large"))
}

/// Torus field whose samples are independent Hermitian matrices with spectra
/// spanning exactly `[lambda, big_lambda]`, so that `dist = (Λ−λ)/(Λ+λ)`.
pub fn hermitian_torus(
    d: usize,
    n_comp: usize,
    n: usize,
    side: f64,
    lambda: f64,
    big_lambda: f64,
    rng: &mut (impl Rng + ?Sized),
) -> Result<MatrixField> {
    let dn = d * n_comp;
    let samples = (0..torus_count(d, n)?)
        .map(|_| random_hermitian(dn, lambda, big_lambda, rng))
        .collect();
    MatrixField::new(d, n_comp, Domain::Torus { n, side }, samples)
}

/// Torus field of independent non-Hermitian elliptic samples.
pub fn elliptic_torus(
    d: usize,
    n_comp: usize,
    n: usize,
    side: f64,
    lambda: f64,
    big_lambda: f64,
    skew: f64,
    rng: &mut (impl Rng + ?Sized),
) -> Result<MatrixField> {
    let dn = d * n_comp;
    let samples = (0..torus_count(d, n)?)
        .map(|_| random_elliptic(dn, lambda, big_lambda, skew, rng))
        .collect();
    MatrixField::new(d, n_comp, Domain::Torus { n, side }, samples)
}

/// Piecewise-constant Hermitian field on a fixed `blocks`ᵈ partition of the
/// torus. Sampling the same seed at any `n` divisible by `blocks` gives the
/// same physical coefficients, which makes grid-refinement studies meaningful.
pub fn blocky_hermitian_torus(
    d: usize,
    n_comp: usize,
    n: usize,
    side: f64,
    blocks: usize,
    lambda: f64,
    big_lambda: f64,
    rng: &mut (impl Rng + ?Sized),
) -> Result<MatrixField> {
    if blocks == 0 || n % blocks != 0 {
        return Err(invalid("n", format!("{n} is not a multiple of {blocks} blocks")));
    }
    let dn = d * n_comp;
    let pieces: Vec<CMatrix> = (0..torus_count(d, blocks)?)
        .map(|_| random_hermitian(dn, lambda, big_lambda, rng))
        .collect();
    let per = n / blocks;
    let mut samples = Vec::with_capacity(torus_count(d, n)?);
    let mut idx = vec![0usize; d];
    for _ in 0..torus_count(d, n)? {
        let b = idx.iter().fold(0, |acc, &k| acc * blocks + k / per);
        samples.push(pieces[b].clone());
        for ax in (0..d).rev() {
            idx[ax] += 1;
            if idx[ax] < n {
                break;
            }
            idx[ax] = 0;
        }
    }
    MatrixField::new(d, n_comp, Domain::Torus { n, side }, samples)
}
