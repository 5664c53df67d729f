/// Uniform box grid with `cells` cells per axis.
///
/// Periodic grids have one node per cell (node `k` is the lower corner of
/// cell `k`); non-periodic (cube) grids have `cells + 1` nodes per axis.
/// Linear indices are row-major with the last axis fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxGrid {
    d: usize,
    cells: usize,
    periodic: bool,
    h: f64,
    origin: f64,
}

impl BoxGrid {
    pub fn torus(d: usize, n: usize, side: f64) -> Self {
        Self {
            d,
            cells: n,
            periodic: true,
            h: side / n as f64,
            origin: 0.0,
        }
    }

    /// Cube `[origin, origin + side]^d` split into `n` cells per axis.
    pub fn cube(d: usize, n: usize, origin: f64, side: f64) -> Self {
        Self {
            d,
            cells: n,
            periodic: false,
            h: side / n as f64,
            origin,
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn periodic(&self) -> bool {
        self.periodic
    }

    pub fn cells_per_axis(&self) -> usize {
        self.cells
    }

    pub fn nodes_per_axis(&self) -> usize {
        if self.periodic {
            self.cells
        } else {
            self.cells + 1
        }
    }

    pub fn side(&self) -> f64 {
        self.h * self.cells as f64
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes_per_axis().pow(self.d as u32)
    }

    pub fn num_cells(&self) -> usize {
        self.cells.pow(self.d as u32)
    }

    pub fn node_multi(&self, mut k: usize) -> Vec<usize> {
        let n = self.nodes_per_axis();
        let mut idx = vec![0; self.d];
        for ax in (0..self.d).rev() {
            idx[ax] = k % n;
            k /= n;
        }
        idx
    }

    pub fn node_index(&self, idx: &[usize]) -> usize {
        let n = self.nodes_per_axis();
        idx.iter().fold(0, |acc, &i| acc * n + i)
    }

    pub fn cell_multi(&self, mut c: usize) -> Vec<usize> {
        let mut idx = vec![0; self.d];
        for ax in (0..self.d).rev() {
            idx[ax] = c % self.cells;
            c /= self.cells;
        }
        idx
    }

    pub fn cell_index(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.cells + i)
    }

    /// Node indices of the `2^d` corners of cell `c`; bit `j` of the corner
    /// number selects the upper node along axis `j`.
    pub fn cell_corners(&self, c: usize, out: &mut Vec<usize>) {
        let lower = self.cell_multi(c);
        let n = self.nodes_per_axis();
        out.clear();
        for s in 0..(1usize << self.d) {
            let node = lower.iter().enumerate().fold(0, |acc, (j, &l)| {
                let mut i = l + ((s >> j) & 1);
                if i == n {
                    i = 0;
                }
                acc * n + i
            });
            out.push(node);
        }
    }

    pub fn node_coord(&self, k: usize) -> Vec<f64> {
        self.node_multi(k)
            .into_iter()
            .map(|i| self.origin + i as f64 * self.h)
            .collect()
    }

    pub fn cell_center(&self, c: usize) -> Vec<f64> {
        self.cell_multi(c)
            .into_iter()
            .map(|i| self.origin + (i as f64 + 0.5) * self.h)
            .collect()
    }

    /// Cube grids only: node lies on a face of the cube.
    pub fn is_boundary(&self, k: usize) -> bool {
        !self.periodic && self.node_multi(k).iter().any(|&i| i == 0 || i == self.cells)
    }

    /// Periodic distance between two nodes.
    pub fn torus_distance(&self, a: usize, b: usize) -> f64 {
        let n = self.nodes_per_axis();
        self.node_multi(a)
            .iter()
            .zip(self.node_multi(b))
            .map(|(&i, j)| {
                let k = i.abs_diff(j);
                let k = if self.periodic { k.min(n - k) } else { k };
                (k as f64 * self.h).powi(2)
            })
            .sum::<f64>()
            .sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corners_wrap_on_torus() {
        let g = BoxGrid::torus(3, 4, 1.0);
        let mut c = Vec::new();
        g.cell_corners(g.cell_index(&[3, 0, 3]), &mut c);
        assert_eq!(c.len(), 8);
        assert_eq!(g.node_multi(c[0]), vec![3, 0, 3]);
        assert_eq!(g.node_multi(c[1]), vec![0, 0, 3]);
        assert_eq!(g.node_multi(c[7]), vec![0, 1, 0]);
    }

    #[test]
    fn cube_counts_and_boundary() {
        let g = BoxGrid::cube(3, 4, -1.0, 2.0);
        assert_eq!(g.num_nodes(), 125);
        assert_eq!(g.num_cells(), 64);
        let interior = (0..g.num_nodes()).filter(|&k| !g.is_boundary(k)).count();
        assert_eq!(interior, 27);
        assert_eq!(g.node_coord(0), vec![-1.0; 3]);
        assert_eq!(g.cell_center(0), vec![-0.75; 3]);
    }

    #[test]
    fn torus_distance_wraps() {
        let g = BoxGrid::torus(3, 8, 8.0);
        let a = g.node_index(&[0, 0, 0]);
        let b = g.node_index(&[7, 0, 4]);
        assert!((g.torus_distance(a, b) - 17f64.sqrt()).abs() < 1e-14);
    }
}
