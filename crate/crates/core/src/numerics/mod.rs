//! Shared numeric foundations: complex arithmetic, adaptive quadrature,
//! analytic Gaussian integrals and reproducible random streams.

pub mod gaussian;
pub mod quadrature;
pub mod rng;

pub use gaussian::{gaussian_integral, gaussian_l2_norm, gaussian_overlap_analytic};
pub use quadrature::{integrate_complex, integrate_real, QuadratureSpec};
pub use rng::RngStream;

/// Complex scalar used throughout the crate.
pub type Complex = num_complex::Complex64;

/// i as a constant.
pub const I: Complex = Complex::new(0.0, 1.0);
