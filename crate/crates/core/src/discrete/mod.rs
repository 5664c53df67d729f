//! Finite-difference experiments on periodic and cube grids.

pub mod dirichlet;
pub mod fft;
pub mod grid;
pub mod heat;
pub mod kernel_fit;
pub mod operator;
pub mod probe;
pub mod report;
pub mod riesz;
pub mod solver;
pub mod stencil;

pub use dirichlet::{dirichlet_solve, holder_probe, holder_probe_with, BoundaryData, CubeSolution, HolderProbe};
pub use grid::BoxGrid;
pub use kernel_fit::{gaussian_fit, FitConfig, HeatKernelFit};
pub use heat::{heat_apply, heat_evolve, kernel_column};
pub use probe::{gradient_probe, lp_ratio_probe};
pub use report::{field_digest, ExperimentRecord, GridInfo};
pub use riesz::{direct_solve, neumann_solve, riesz_apply, NeumannFactorization, NeumannSolution};
pub use operator::{assemble, lp_norm, TorusOperator};
pub use stencil::Stencil;
