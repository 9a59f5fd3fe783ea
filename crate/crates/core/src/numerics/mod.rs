//! Grids, spectral differentiation, quadrature, dense eigensolves and ODE
//! integration shared by every other module.

pub mod eig;
pub mod fourier;
pub mod grid;
pub mod ode;
pub mod quadrature;

pub use eig::{
    eig_dense, eig_dense_with, inverse_iteration, ComplexMatrix, EigConfig, EigenDecomposition,
};
pub use fourier::{
    differentiation_matrix, laplacian_symbol, spectral_derivative, spectral_derivative_bloch,
    spectral_derivative_real, FourierTransform, FourierTransform2D,
};
pub use grid::{Grid1D, Grid2D};
pub use ode::{integrate_ode_2nd, Direction, OdeSolution};
pub use quadrature::cumulative_integral;
