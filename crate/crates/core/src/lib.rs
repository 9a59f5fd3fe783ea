//! Spectral analysis of non-Hermitian Schrodinger operators with complex
//! potentials built from real generator functions.

pub mod error;
pub mod numerics;
pub mod potential;
pub mod propagate;
pub mod spectrum;
pub mod transition;
pub mod zs;

pub use error::{Error, Result};
pub use num_complex::Complex64;
