//! Reference solvers used to validate the main numerical path. They share
//! no code with it beyond Gauss-Legendre nodes.

pub mod bessel;
pub mod fd;
pub mod radial;

pub use bessel::{bessel_flux, bessel_i0};
pub use fd::{fd_beltrami_green, fd_green, FdSolution, PolarGrid};
