//! Quadrature and series primitives with explicit error control.

pub mod compensated;
pub mod quad;
pub mod series;

pub use compensated::{ComplexDD, ComplexNeumaierSum, DoubleDouble, NeumaierSum};
pub use quad::{
    composite_gauss_legendre, gauss_legendre, integrate_adaptive, integrate_adaptive_relative, integrate_halfline,
    integrate_halfline_scaled, QuadResult, QuadValue,
};
pub use series::{sum_series, SeriesResult};
