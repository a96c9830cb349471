//! Green functions of the Laplacian and of its Schrödinger and
//! divergence-form perturbations on planar domains.

pub mod beltrami;
pub mod dirichlet;
pub mod error;
pub mod geometry;
pub mod growth;
pub mod inverse;
pub mod green;
pub mod oracle;
pub mod perturbation;
pub mod quadrature;
pub mod schrodinger;

pub use error::{Error, Result};
pub use num_complex::Complex64;
