//! Gauss 2F1 and Kummer 1F1 by direct series.
//!
//! Terminating series (a non-positive integer numerator parameter) are summed
//! exactly to their degree; degrees above [`EXTENDED_DEGREE`], and shorter
//! sums with heavy cancellation, run the term recurrence and the accumulator
//! in double-double. Non-terminating 1F1 also
//! runs in double-double and switches to the large-|z| expansion when that
//! one is accurate.

use num_complex::Complex64;

use super::gamma::ln_gamma;
use crate::error::{domain, Error, Result};
use crate::numerics::compensated::{ComplexDD, ComplexNeumaierSum, DoubleDouble};
use crate::numerics::series::{sum_series, STOP_RUN};

/// Polynomial degree above which the extended accumulator is used.
pub const EXTENDED_DEGREE: usize = 60;

/// Largest estimated relative error a caller should accept from a
/// hypergeometric evaluation.
pub const PRECISION_BUDGET: f64 = 1e-8;

/// Estimated relative error above which a short polynomial is re-summed in double-double.
const CANCELLATION_LIMIT: f64 = 1e-13;
const SERIES_TOL: f64 = 1e-17;
const DD_SERIES_TOL: f64 = 1e-31;
const MAX_TERMS: usize = 200_000;
const OVERFLOW_SCALE: f64 = 1e290;
const ASYMPTOTIC_MIN_ABS_Z: f64 = 30.0;

/// Accuracy bookkeeping for one hypergeometric evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HypDiagnostic {
    pub terms: usize,
    /// `sum |term| / |sum|`: the cancellation factor.
    pub condition: f64,
    pub est_rel_err: f64,
    pub method: HypMethod,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HypMethod {
    Polynomial,
    PolynomialExtended,
    Series,
    SeriesExtended,
    Asymptotic,
}

impl HypDiagnostic {
    pub fn within_budget(&self) -> bool {
        self.est_rel_err <= PRECISION_BUDGET
    }
}

/// Degree `m` if `a == -m` for a non-negative integer `m`.
pub fn nonpositive_integer(a: Complex64) -> Option<usize> {
    if a.im == 0.0 && a.re <= 0.0 && a.re.fract() == 0.0 && a.re > -1e9 {
        Some((-a.re) as usize)
    } else {
        None
    }
}

fn real_is_nonpositive_integer(c: f64) -> bool {
    c <= 0.0 && c.fract() == 0.0
}

/// Gauss hypergeometric function `2F1(a, b; c; z)`.
pub fn hyp2f1(a: Complex64, b: Complex64, c: f64, z: Complex64) -> Result<Complex64> {
    hyp2f1_diagnostic(a, b, c, z).map(|(v, _)| v)
}

pub fn hyp2f1_diagnostic(
    a: Complex64,
    b: Complex64,
    c: f64,
    z: Complex64,
) -> Result<(Complex64, HypDiagnostic)> {
    if real_is_nonpositive_integer(c) {
        return Err(domain("hyp2f1", format!("c = {c} is a non-positive integer")));
    }
    // Canonical parameter order makes the result symmetric in (a, b) bit for bit.
    let (a, b) = match (nonpositive_integer(a), nonpositive_integer(b)) {
        (Some(m), Some(k)) if k < m => (b, a),
        (Some(_), _) => (a, b),
        (None, Some(_)) => (b, a),
        (None, None) => {
            let key = |w: Complex64| (w.re, w.im);
            let (ka, kb) = (key(a), key(b));
            if ka.0.total_cmp(&kb.0).then(ka.1.total_cmp(&kb.1)).is_le() {
                (a, b)
            } else {
                (b, a)
            }
        }
    };
    let ratio = TermRatio { a, b: Some(b), c, z };

    if let Some(m) = nonpositive_integer(a) {
        return Ok(terminating_sum(m, ratio));
    }
    if z.norm() >= 1.0 {
        return Err(domain(
            "hyp2f1",
            format!("|z| = {} outside the unit disk for a non-terminating series", z.norm()),
        ));
    }
    let mut t = Complex64::new(1.0, 0.0);
    let mut abs_sum = 0.0;
    let res = sum_series(
        |n| {
            if n > 0 {
                t *= ratio.at((n - 1) as f64);
            }
            abs_sum += t.norm();
            t
        },
        SERIES_TOL,
        MAX_TERMS,
    )?;
    let condition = abs_sum / res.value.norm();
    Ok((
        res.value,
        HypDiagnostic {
            terms: res.terms_used,
            condition,
            est_rel_err: condition * f64::EPSILON * (res.terms_used as f64).sqrt()
                + res.truncation_bound / res.value.norm(),
            method: HypMethod::Series,
        },
    ))
}

/// Terminating `2F1(-m, b; c; z)` with a complex lower parameter, summed in
/// compensated double precision.
pub fn hyp2f1_terminating(m: usize, b: Complex64, c: Complex64, z: Complex64) -> Result<(Complex64, HypDiagnostic)> {
    if c.im == 0.0 && real_is_nonpositive_integer(c.re) && -c.re < m as f64 {
        return Err(domain("hyp2f1_terminating", format!("c = {} hits a pole before degree {m}", c.re)));
    }
    let mut t = Complex64::new(1.0, 0.0);
    let mut acc = ComplexNeumaierSum::new();
    acc.add(t);
    let mut abs_sum = 1.0;
    for j in 0..m {
        let jf = j as f64;
        t *= (jf - m as f64) * (b + jf) / ((c + jf) * (jf + 1.0)) * z;
        acc.add(t);
        abs_sum += t.norm();
    }
    let v = acc.value();
    let condition = abs_sum / v.norm();
    if !abs_sum.is_finite() {
        return Err(Error::Overflow {
            func: "hyp2f1_terminating",
            scale: abs_sum,
        });
    }
    Ok((
        v,
        HypDiagnostic {
            terms: m + 1,
            condition,
            est_rel_err: condition * f64::EPSILON * (m as f64 + 1.0),
            method: HypMethod::Polynomial,
        },
    ))
}

/// Parameters of `pFq` with `p <= 2`, `q = 1` plus the implicit `n!`:
/// the term ratio is `(a+j)(b+j) z / ((c+j)(j+1))`, with `b` absent for 1F1.
#[derive(Debug, Clone, Copy)]
struct TermRatio {
    a: Complex64,
    b: Option<Complex64>,
    c: f64,
    z: Complex64,
}

impl TermRatio {
    fn at(&self, j: f64) -> Complex64 {
        let num = match self.b {
            Some(b) => (self.a + j) * (b + j),
            None => self.a + j,
        };
        num / ((self.c + j) * (j + 1.0)) * self.z
    }

    fn at_dd(&self, j: f64) -> ComplexDD {
        let shift = |w: Complex64| ComplexDD {
            re: DoubleDouble::from(w.re) + DoubleDouble::from(j),
            im: DoubleDouble::from(w.im),
        };
        let mut num = shift(self.a);
        if let Some(b) = self.b {
            num = num * shift(b);
        }
        num = num * ComplexDD::from(self.z);
        let den = (DoubleDouble::from(self.c) + DoubleDouble::from(j)) * DoubleDouble::from(j + 1.0);
        num.div_real(den)
    }
}

// Exact sum of a degree-m terminating series.
fn terminating_sum(m: usize, ratio: TermRatio) -> (Complex64, HypDiagnostic) {
    if m > EXTENDED_DEGREE {
        return extended_sum(ratio, Some(m));
    }
    let mut t = Complex64::new(1.0, 0.0);
    let mut acc = ComplexNeumaierSum::new();
    acc.add(t);
    let mut abs_sum = 1.0;
    for j in 0..m {
        t *= ratio.at(j as f64);
        acc.add(t);
        abs_sum += t.norm();
    }
    let v = acc.value();
    let condition = abs_sum / v.norm();
    let est_rel_err = condition * f64::EPSILON * (m as f64 + 1.0);
    if est_rel_err > CANCELLATION_LIMIT && v.norm() > 0.0 {
        return extended_sum(ratio, Some(m));
    }
    (
        v,
        HypDiagnostic {
            terms: m + 1,
            condition,
            est_rel_err,
            method: HypMethod::Polynomial,
        },
    )
}

// A terminating sum that lands exactly on zero has no relative error to
// speak of; its absolute error is at roundoff of the largest term.
fn exact_polynomial_zero(v: Complex64, d: &HypDiagnostic) -> bool {
    v == Complex64::new(0.0, 0.0) && matches!(d.method, HypMethod::Polynomial | HypMethod::PolynomialExtended)
}

/// Kummer confluent hypergeometric function `1F1(a; b; z)`.
pub fn hyp1f1(a: Complex64, b: f64, z: Complex64) -> Result<Complex64> {
    let (v, d) = hyp1f1_diagnostic(a, b, z)?;
    if d.est_rel_err > 1e-6 && !exact_polynomial_zero(v, &d) {
        return Err(Error::PrecisionBudget {
            func: "hyp1f1",
            degree: d.terms,
            estimate: d.est_rel_err,
        });
    }
    Ok(v)
}

pub fn hyp1f1_diagnostic(a: Complex64, b: f64, z: Complex64) -> Result<(Complex64, HypDiagnostic)> {
    if real_is_nonpositive_integer(b) {
        return Err(domain("hyp1f1", format!("b = {b} is a non-positive integer")));
    }
    let ratio = TermRatio { a, b: None, c: b, z };
    if let Some(m) = nonpositive_integer(a) {
        return Ok(terminating_sum(m, ratio));
    }
    let asymptotic = if z.norm() >= ASYMPTOTIC_MIN_ABS_Z {
        kummer_asymptotic(a, b, z)?
    } else {
        None
    };
    if let Some(res) = asymptotic {
        if res.1.est_rel_err <= 1e-14 {
            return Ok(res);
        }
    }
    let (v, d) = extended_sum(ratio, None);
    let scale = d.condition * v.norm();
    let series_ok = scale.is_finite() && scale <= OVERFLOW_SCALE;
    match asymptotic {
        Some(res) if !series_ok || res.1.est_rel_err < d.est_rel_err => Ok(res),
        _ if !series_ok => Err(Error::Overflow {
            func: "hyp1f1",
            scale,
        }),
        _ => Ok((v, d)),
    }
}

// Double-double term recurrence and accumulator. With `degree` the series is
// summed exactly to that degree, otherwise until the stop rule fires.
fn extended_sum(ratio: TermRatio, degree: Option<usize>) -> (Complex64, HypDiagnostic) {
    let mut t = ComplexDD::ONE;
    let mut acc = ComplexDD::ONE;
    let mut abs_sum = 1.0;
    let mut run = 0;
    let mut n = 0;
    let limit = degree.unwrap_or(MAX_TERMS);
    // terms only decrease for good once j exceeds |a| + |b| + |z| - c
    let settle = ratio.z.norm() + ratio.a.norm() + ratio.b.map_or(0.0, |b| b.norm()) - ratio.c;
    while n < limit {
        let j = n as f64;
        t = t * ratio.at_dd(j);
        acc = acc + t;
        n += 1;
        let tn = t.norm_f64();
        abs_sum += tn;
        if !abs_sum.is_finite() {
            break;
        }
        if degree.is_none() {
            if tn <= DD_SERIES_TOL * acc.norm_f64() {
                run += 1;
            } else {
                run = 0;
            }
            if run >= STOP_RUN && j > settle {
                break;
            }
        }
    }
    let v = acc.to_c64();
    let condition = abs_sum / v.norm();
    let method = if degree.is_some() {
        HypMethod::PolynomialExtended
    } else {
        HypMethod::SeriesExtended
    };
    (
        v,
        HypDiagnostic {
            terms: n + 1,
            condition,
            est_rel_err: condition * 1e-31 * (n as f64 + 1.0) + f64::EPSILON,
            method,
        },
    )
}

// Large-|z| expansion (two algebraic series), truncated at the smallest
// term. Returns None when the result is not finite.
fn kummer_asymptotic(a: Complex64, b: f64, z: Complex64) -> Result<Option<(Complex64, HypDiagnostic)>> {
    let bc = Complex64::new(b, 0.0);
    let ln_gb = ln_gamma(bc)?;
    // e^{+i pi a} for Im z >= 0, e^{-i pi a} below the axis
    let sign = if z.im >= 0.0 { 1.0 } else { -1.0 };
    let i = Complex64::new(0.0, 1.0);

    let (s1, e1, n1) = asymptotic_tail(1.0 - a, bc - a, z.inv());
    let pref1 = if nonpositive_integer(a).is_some() {
        Complex64::new(0.0, 0.0)
    } else {
        (ln_gb + z + (a - b) * z.ln() - ln_gamma(a)?).exp()
    };
    let (s2, e2, n2) = asymptotic_tail(a, a - b + 1.0, -z.inv());
    let pref2 = if nonpositive_integer(bc - a).is_some() {
        Complex64::new(0.0, 0.0)
    } else {
        (ln_gb + sign * i * std::f64::consts::PI * a - a * z.ln() - ln_gamma(bc - a)?).exp()
    };
    let t1 = pref1 * s1;
    let t2 = pref2 * s2;
    let v = t1 + t2;
    let abs_err = pref1.norm() * e1 + pref2.norm() * e2;
    let scale = t1.norm() + t2.norm();
    let est = abs_err / v.norm() + f64::EPSILON * 8.0 * scale / v.norm();
    if !v.re.is_finite() || !v.im.is_finite() || !est.is_finite() {
        return Ok(None);
    }
    Ok(Some((
        v,
        HypDiagnostic {
            terms: n1 + n2,
            condition: scale / v.norm(),
            est_rel_err: est,
            method: HypMethod::Asymptotic,
        },
    )))
}

// Sums sum_s (p)_s (q)_s / s! w^s until the terms stop shrinking or become
// negligible. Returns (sum, |last term| as absolute error, terms).
fn asymptotic_tail(p: Complex64, q: Complex64, w: Complex64) -> (Complex64, f64, usize) {
    let mut t = Complex64::new(1.0, 0.0);
    let mut acc = ComplexNeumaierSum::new();
    acc.add(t);
    let mut prev = 1.0;
    let mut s = 0;
    loop {
        let sf = s as f64;
        let next = t * (p + sf) * (q + sf) / (sf + 1.0) * w;
        let nn = next.norm();
        if nn == 0.0 {
            return (acc.value(), 0.0, s + 1);
        }
        if nn > prev || s > 500 {
            return (acc.value(), prev, s + 1);
        }
        acc.add(next);
        t = next;
        prev = nn;
        s += 1;
        if nn <= 1e-18 * acc.value().norm() {
            return (acc.value(), nn, s + 1);
        }
    }
}
