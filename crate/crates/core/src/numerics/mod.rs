//! Special functions, quadrature and one-dimensional search.

mod optimize;
mod quadrature;
mod special;

pub use optimize::{bisect, golden_section_max, scan_maximize, scan_roots};
pub use quadrature::{
    adaptive_legendre, composite_legendre, default_quad_order, gauss_hermite,
    gauss_hermite_cached, gauss_legendre, gaussian_expectation, parse_quad_order, Expectation,
    QuadMethod, QuadSettings, QuadratureRule, DEFAULT_QUAD_ORDER, MAX_QUAD_ORDER, QUAD_ORDER_ENV,
};
pub use special::{
    binomial, binomial_i128, erf, erfc, erfcx, hyp2f1_terminating, hyp4f3_terminating,
    hyp_pfq_terminating, jacobi_p, jacobi_reciprocal_expansion, ln_binomial_signed, ln_factorial,
};
