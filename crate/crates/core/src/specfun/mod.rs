//! Special functions: complex log-gamma, Pochhammer symbols, Gauss and
//! Kummer hypergeometric functions, the nu-function and `|Gamma(l+1+ib)|`.

pub mod gamma;
pub mod hypergeometric;
pub mod nu;

use num_complex::Complex64;

/// Complex arguments and results of the special functions.
pub type ComplexValue = Complex64;

pub use gamma::{gamma_abs, gamma_real, ln_gamma, ln_gamma_abs, ln_gamma_real, ln_sinh, pochhammer};
pub use hypergeometric::{
    hyp1f1, hyp1f1_diagnostic, hyp2f1, hyp2f1_diagnostic, hyp2f1_terminating, HypDiagnostic, HypMethod, PRECISION_BUDGET,
};
pub use nu::{nu, nu_with_tol};
