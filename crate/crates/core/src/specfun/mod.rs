//! Special functions and quadrature shared by the series and family modules.

mod bessel;
mod gamma;
mod quad;

pub use bessel::{bessel_j0, bessel_j0_zero};
pub use gamma::{digamma, polygamma, trigamma, Polygamma};
pub use quad::{
    gauss_kronrod_adaptive, gauss_legendre, integrate_semi_infinite, Domain, Integral,
    QuadratureRule, Strategy,
};

pub use num_complex::Complex64;
