use num_complex::Complex64;

use super::compensated::ComplexNeumaierSum;
use crate::error::{Error, Result};

/// Consecutive negligible terms required before a series is declared converged.
pub const STOP_RUN: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesResult {
    pub value: Complex64,
    pub terms_used: usize,
    pub truncation_bound: f64,
}

/// Sums `term(0) + term(1) + ...` with a compensated accumulator.
///
/// `term` is called with strictly increasing indices starting from zero, so
/// closures may carry recurrence state. Summation stops once [`STOP_RUN`]
/// consecutive terms satisfy `|t| <= tol * |partial|`.
pub fn sum_series<F>(mut term: F, tol: f64, max_terms: usize) -> Result<SeriesResult>
where
    F: FnMut(usize) -> Complex64,
{
    if !(tol > 0.0) {
        return Err(crate::error::domain("sum_series", "tol must be positive"));
    }
    let mut acc = ComplexNeumaierSum::new();
    let mut run = 0;
    let mut last = [0.0f64; STOP_RUN];
    for n in 0..max_terms {
        let t = term(n);
        if !(t.re.is_finite() && t.im.is_finite()) {
            let p = acc.value();
            return Err(Error::SeriesNoConvergence {
                partial_re: p.re,
                partial_im: p.im,
                terms: n,
            });
        }
        acc.add(t);
        last[n % STOP_RUN] = t.norm();
        let partial = acc.value().norm();
        if t.norm() <= tol * partial {
            run += 1;
        } else {
            run = 0;
        }
        if run >= STOP_RUN {
            return Ok(SeriesResult {
                value: acc.value(),
                terms_used: n + 1,
                truncation_bound: tail_bound(&last, n),
            });
        }
    }
    let p = acc.value();
    Err(Error::SeriesNoConvergence {
        partial_re: p.re,
        partial_im: p.im,
        terms: max_terms,
    })
}

// Geometric tail estimate from the last terms; falls back to their sum when
// the observed ratio is not contracting.
fn tail_bound(last: &[f64; STOP_RUN], n: usize) -> f64 {
    let newest = last[n % STOP_RUN];
    let previous = last[(n + STOP_RUN - 1) % STOP_RUN];
    if previous > 0.0 && newest < previous {
        let ratio = newest / previous;
        newest * ratio / (1.0 - ratio)
    } else {
        last.iter().sum()
    }
}
