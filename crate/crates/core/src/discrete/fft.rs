//! Separable n-dimensional FFT on periodic grids with `N` interleaved components.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

pub struct TorusFft {
    d: usize,
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for TorusFft {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TorusFft").field("d", &self.d).field("n", &self.n).finish()
    }
}

impl Clone for TorusFft {
    fn clone(&self) -> Self {
        Self {
            d: self.d,
            n: self.n,
            forward: Arc::clone(&self.forward),
            inverse: Arc::clone(&self.inverse),
        }
    }
}

impl TorusFft {
    pub fn new(d: usize, n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            d,
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.n.pow(self.d as u32)
    }

    /// Signed integer frequency of index `k` along one axis.
    pub fn signed_frequency(&self, k: usize) -> i64 {
        if k < self.n.div_ceil(2) {
            k as i64
        } else {
            k as i64 - self.n as i64
        }
    }

    /// Signed frequency vector of flat mode index `m`.
    pub fn frequency(&self, mut m: usize) -> Vec<i64> {
        let mut out = vec![0; self.d];
        for ax in (0..self.d).rev() {
            out[ax] = self.signed_frequency(m % self.n);
            m /= self.n;
        }
        out
    }

    fn transform(&self, data: &mut [Complex64], nc: usize, inverse: bool) {
        let plan = if inverse { &self.inverse } else { &self.forward };
        let n = self.n;
        let total = self.num_nodes();
        assert_eq!(data.len(), total * nc);
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
        for ax in 0..self.d {
            let stride = n.pow((self.d - 1 - ax) as u32);
            for base in 0..total {
                if (base / stride) % n != 0 {
                    continue;
                }
                for comp in 0..nc {
                    for (i, v) in line.iter_mut().enumerate() {
                        *v = data[(base + i * stride) * nc + comp];
                    }
                    plan.process_with_scratch(&mut line, &mut scratch);
                    for (i, v) in line.iter().enumerate() {
                        data[(base + i * stride) * nc + comp] = *v;
                    }
                }
            }
        }
        if inverse {
            let s = 1.0 / total as f64;
            data.iter_mut().for_each(|z| *z *= s);
        }
    }

    pub fn forward(&self, data: &mut [Complex64], nc: usize) {
        self.transform(data, nc, false);
    }

    /// Normalized inverse.
    pub fn inverse(&self, data: &mut [Complex64], nc: usize) {
        self.transform(data, nc, true);
    }

    /// Apply a scalar Fourier multiplier `symbol(mode)` to every component.
    pub fn multiply(&self, f: &[Complex64], nc: usize, symbol: impl Fn(usize) -> Complex64) -> Vec<Complex64> {
        let mut data = f.to_vec();
        self.forward(&mut data, nc);
        for m in 0..self.num_nodes() {
            let s = symbol(m);
            for c in 0..nc {
                data[m * nc + c] *= s;
            }
        }
        self.inverse(&mut data, nc);
        data
    }

    /// Symbol of `−Δₕ` (standard `2d+1`-point Laplacian) with spacing `h`.
    pub fn laplacian_symbol(&self, h: f64) -> Vec<f64> {
        let axis: Vec<f64> = (0..self.n)
            .map(|k| 4.0 * (std::f64::consts::PI * k as f64 / self.n as f64).sin().powi(2) / (h * h))
            .collect();
        let mut out = vec![0.0; self.num_nodes()];
        for (m, v) in out.iter_mut().enumerate() {
            let mut rest = m;
            for _ in 0..self.d {
                *v += axis[rest % self.n];
                rest /= self.n;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discrete::grid::BoxGrid;
    use crate::discrete::stencil::Stencil;
    use crate::linalg::identity;

    #[test]
    fn round_trip_and_pure_mode() {
        let (d, n) = (3, 6);
        let fft = TorusFft::new(d, n);
        let grid = BoxGrid::torus(d, n, 1.0);
        let k = [1i64, -2, 2];
        let wave: Vec<Complex64> = (0..grid.num_nodes())
            .map(|m| {
                let x = grid.node_multi(m);
                let phase: f64 = x.iter().zip(&k).map(|(&xi, &ki)| ki as f64 * xi as f64).sum();
                Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * phase / n as f64)
            })
            .collect();
        let mut data = wave.clone();
        fft.forward(&mut data, 1);
        let peak = (0..data.len()).max_by(|&a, &b| data[a].norm().total_cmp(&data[b].norm())).unwrap();
        assert_eq!(fft.frequency(peak), vec![1, -2, 2]);
        fft.inverse(&mut data, 1);
        for (a, b) in data.iter().zip(&wave) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn laplacian_symbol_matches_stencil() {
        let (d, n) = (3, 4);
        let grid = BoxGrid::torus(d, n, 2.0);
        let st = Stencil::new(grid.clone(), 2, &vec![identity(6); 64]);
        let fft = TorusFft::new(d, n);
        let sym = fft.laplacian_symbol(grid.h());
        let u: Vec<Complex64> = (0..st.len()).map(|i| Complex64::new((i as f64).sin(), (3.0 * i as f64).cos())).collect();
        let a = st.apply_vec(&u);
        let b = fft.multiply(&u, 2, |m| sym[m].into());
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).norm() < 1e-11);
        }
    }
}
