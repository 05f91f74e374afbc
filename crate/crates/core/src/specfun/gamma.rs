use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS_P: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_7;

fn is_pole(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re.fract() == 0.0
}

/// Log-gamma on the principal sheet (cut along the negative real axis).
///
/// Lanczos (g = 7, 9 terms) for `Re z >= 1/2`, reflection otherwise.
pub fn ln_gamma(z: Complex64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(crate::error::domain("ln_gamma", "non-finite argument"));
    }
    if is_pole(z) {
        return Err(Error::Pole { re: z.re, im: z.im });
    }
    if z.re < 0.5 {
        let one = Complex64::new(1.0, 0.0);
        Ok(Complex64::new(PI.ln(), 0.0) - ln_sin_pi(z) - lanczos(one - z))
    } else {
        Ok(lanczos(z))
    }
}

fn lanczos(z: Complex64) -> Complex64 {
    let z = z - 1.0;
    let mut x = Complex64::new(LANCZOS_P[0], 0.0);
    for (i, p) in LANCZOS_P.iter().enumerate().skip(1) {
        x += *p / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    HALF_LN_2PI + (z + 0.5) * t.ln() - t + x.ln()
}

// ln sin(pi z), written to avoid overflow of sin for large |Im z|.
fn ln_sin_pi(z: Complex64) -> Complex64 {
    let i = Complex64::new(0.0, 1.0);
    if z.im.abs() < 20.0 {
        (PI * z).sin().ln()
    } else if z.im > 0.0 {
        let small = (2.0 * PI * i * z).exp();
        -PI * i * z + Complex64::new(0.5, 0.0).ln() + i.ln() + (1.0 - small).ln()
    } else {
        let small = (-2.0 * PI * i * z).exp();
        PI * i * z + Complex64::new(0.5, 0.0).ln() + (-i).ln() + (1.0 - small).ln()
    }
}

/// Real log-gamma for `x > 0`.
pub fn ln_gamma_real(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x < 0.5 {
        // Gamma(x) Gamma(1-x) = pi / sin(pi x), all positive on (0, 1/2)
        return PI.ln() - (PI * x).sin().ln() - lanczos_real(1.0 - x);
    }
    lanczos_real(x)
}

fn lanczos_real(x: f64) -> f64 {
    let z = x - 1.0;
    let mut s = LANCZOS_P[0];
    for (i, p) in LANCZOS_P.iter().enumerate().skip(1) {
        s += p / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    HALF_LN_2PI + (z + 0.5) * t.ln() - t + s.ln()
}

/// Gamma(x) for real `x > 0`.
pub fn gamma_real(x: f64) -> f64 {
    ln_gamma_real(x).exp()
}

/// Rising factorial `(z)_n = z (z+1) ... (z+n-1)`, `(z)_0 = 1`.
pub fn pochhammer(z: f64, n: usize) -> f64 {
    (0..n).fold(1.0, |acc, j| acc * (z + j as f64))
}

/// `|Gamma(ell + 1 + i b)|` from `|Gamma(1 + i b)|^2 = pi b / sinh(pi b)` and
/// `|Gamma(w + 1)| = |w| |Gamma(w)|`.
pub fn gamma_abs(ell: u32, b: f64) -> f64 {
    ln_gamma_abs(ell, b).exp()
}

/// Natural log of [`gamma_abs`]; stays finite where `sinh(pi b)` overflows.
pub fn ln_gamma_abs(ell: u32, b: f64) -> f64 {
    let b = b.abs();
    let mut acc = 0.0;
    for j in 1..=ell {
        let j = j as f64;
        acc += 0.5 * (j * j + b * b).ln();
    }
    if b == 0.0 {
        return acc;
    }
    let x = PI * b;
    acc + 0.5 * (x.ln() - ln_sinh(x))
}

/// `ln sinh(x)` for `x > 0`, finite where `sinh` overflows.
pub fn ln_sinh(x: f64) -> f64 {
    if x < 1.0 {
        x.sinh().ln()
    } else {
        x - std::f64::consts::LN_2 + (-(-2.0 * x).exp()).ln_1p()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn integer_points() {
        assert!(ln_gamma(c(1.0, 0.0)).unwrap().norm() < 1e-15);
        assert!((ln_gamma(c(5.0, 0.0)).unwrap() - c(24f64.ln(), 0.0)).norm() < 1e-14);
        assert!((ln_gamma_real(5.0) - 24f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn poles_are_reported() {
        assert!(matches!(ln_gamma(c(0.0, 0.0)), Err(Error::Pole { .. })));
        assert!(matches!(ln_gamma(c(-3.0, 0.0)), Err(Error::Pole { .. })));
        assert!(ln_gamma(c(-3.0, 1e-9)).is_ok());
    }

    #[test]
    fn reflection_at_large_imaginary_part_stays_finite() {
        let z = c(-2.0, 300.0);
        let lhs = ln_gamma(z + 1.0).unwrap();
        let rhs = ln_gamma(z).unwrap() + z.ln();
        let d = lhs - rhs;
        // equal modulo 2 pi i
        assert!(d.re.abs() < 1e-9, "{d}");
        let k = (d.im / (2.0 * PI)).round();
        assert!((d.im - 2.0 * PI * k).abs() < 1e-9, "{d}");
    }

    #[test]
    fn pochhammer_values() {
        assert_eq!(pochhammer(3.0, 0), 1.0);
        assert_eq!(pochhammer(3.0, 2), 12.0);
        assert_eq!(pochhammer(2.5, 3), 39.375);
    }

    #[test]
    fn gamma_abs_values() {
        assert_eq!(gamma_abs(0, 0.0), 1.0);
        assert_eq!(gamma_abs(3, 0.0), 6.0);
        let expected = (PI / PI.sinh()).sqrt();
        assert!((gamma_abs(0, 1.0) - expected).abs() < 1e-15);
        assert!((gamma_abs(0, 1.0) - 0.521_564).abs() < 1e-6);
        assert!((gamma_abs(1, 1.0) - 2f64.sqrt() * expected).abs() < 1e-15);
        assert!(ln_gamma_abs(0, 1e3).is_finite());
    }
}
