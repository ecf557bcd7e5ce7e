//! K-Bessel functions of imaginary order and the Airy functions they are built on.

pub mod airy;
mod bessel;
pub mod quadrature;
pub mod tables;

pub use airy::{airy_ai, airy_ai_prime, airy_pair};
pub use bessel::{
    eval_debye, eval_hankel, eval_transitional, eval_uniform, k_bessel_peak, k_bessel_quadrature,
    k_bessel_scaled, uniform_frame, BesselArgs, BesselEvaluator, BesselResult, UniformFrame,
    DEFAULT_QUADRATURE_BELOW, DEFAULT_TERMS, DEFAULT_WINDOW, TURNING_U_MAX,
};
pub use tables::{lambda_coeff, tables, u_poly, CoefficientTables};
