use super::gamma::ln_gamma_real;
use crate::error::{domain, Result};
use crate::numerics::quad::integrate_halfline_scaled;

/// Absolute tolerance used by [`nu`].
pub const NU_TOL: f64 = 1e-13;

/// `nu(x) = integral_0^inf x^t / Gamma(t + 1) dt`, the continuous analogue of `e^x`.
pub fn nu(x: f64) -> Result<f64> {
    nu_with_tol(x, NU_TOL)
}

pub fn nu_with_tol(x: f64, tol: f64) -> Result<f64> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(domain("nu", format!("x = {x} must be finite and non-negative")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let ln_x = x.ln();
    let scale = 1.0 + x;
    let r = integrate_halfline_scaled(|t: f64| (t * ln_x - ln_gamma_real(t + 1.0)).exp(), scale, tol)?;
    Ok(r.value)
}

/// Integrand of the truncated shifted integral `integral_0^1 x^t / Gamma(t) dt`,
/// written with `1/Gamma(t) = t / Gamma(t+1)` so that it is regular at zero.
pub fn inv_gamma_weighted(x: f64, t: f64) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    t * (t * x.ln() - ln_gamma_real(t + 1.0)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nu_at_zero_and_negative() {
        assert_eq!(nu(0.0).unwrap(), 0.0);
        assert!(nu(-0.1).is_err());
    }

    #[test]
    fn nu_grows_with_x() {
        let a = nu(0.25).unwrap();
        let b = nu(1.0).unwrap();
        assert!(a > 0.0 && a < b);
    }
}
