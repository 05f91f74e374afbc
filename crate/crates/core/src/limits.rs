//! Flat-space limits: convergence of curved energies, generalized factorials
//! and eigenfunctions to their `R -> inf` counterparts, with empirical orders
//! from least-squares fits of `log residual` against `log R`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::numerics::DoubleDouble;
use crate::spectrum::{
    critical_index, energy_curved, energy_curved_compensated, energy_flat_bound, gen_factorial_curved,
    gen_factorial_flat, ContinuumLabel, PhysicalConfig, Sector, SpectralIndex,
};
use crate::specfun::PRECISION_BUDGET;
use crate::wavefunctions::{BoundEigenfunction, ContinuumEigenfunction, CurvedEigenfunction, CurvedPoint};

/// Largest curved level used by the continuum wavefunction study.
pub const MAX_CONTINUUM_DEGREE: u32 = 120;

/// Residuals of one study along increasing `R`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub study: String,
    #[serde(rename = "R_values")]
    pub r_values: Vec<f64>,
    pub residuals: Vec<f64>,
    /// Slope of `ln residual` against `ln R`; absent when fewer than two
    /// residuals are positive.
    pub fitted_order: Option<f64>,
    pub target_order: Option<f64>,
    /// Coefficient of determination of the fit.
    pub r_squared: Option<f64>,
    /// Per-`R` auxiliary columns (indices, fitted scales, closed forms).
    pub extras: BTreeMap<String, Vec<f64>>,
}

impl ConvergenceReport {
    fn new(study: &str, r_values: Vec<f64>, residuals: Vec<f64>, target_order: Option<f64>) -> Self {
        let fit = log_log_fit(&r_values, &residuals);
        Self {
            study: study.to_string(),
            r_values,
            residuals,
            fitted_order: fit.map(|f| f.0),
            target_order,
            r_squared: fit.map(|f| f.1),
            extras: BTreeMap::new(),
        }
    }

    pub fn is_strictly_decreasing(&self) -> bool {
        self.residuals.windows(2).all(|w| w[1] < w[0])
    }

    pub fn all_zero(&self) -> bool {
        self.residuals.iter().all(|&r| r == 0.0)
    }
}

/// Unweighted least squares of `ln y` on `ln x` over points with `y > 0`;
/// returns `(slope, r_squared)`.
pub fn log_log_fit(x: &[f64], y: &[f64]) -> Option<(f64, f64)> {
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(&a, &b)| a > 0.0 && b > 0.0)
        .map(|(a, b)| (a.ln(), b.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Some((slope, r2))
}

fn check_radii(r_list: &[f64]) -> Result<()> {
    if r_list.is_empty() || r_list.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
        return Err(domain("limits", "R values must be positive and finite"));
    }
    Ok(())
}

/// `|E_n(R) - E_n^flat|`, formed in double-double so that the result is the
/// curvature term `(n+l)(n+l+2)/(2R^2)` to working precision.
pub fn bound_energy_convergence(
    n: u32,
    sec: Sector,
    cfg_base: &PhysicalConfig,
    r_list: &[f64],
) -> Result<ConvergenceReport> {
    check_radii(r_list)?;
    let idx = SpectralIndex::new(n);
    let flat = energy_flat_bound(idx, sec, cfg_base);
    let mut residuals = Vec::with_capacity(r_list.len());
    let mut closed = Vec::with_capacity(r_list.len());
    for &r in r_list {
        let cfg = cfg_base.with_radius(r)?;
        let e = energy_curved_compensated(idx, sec, &cfg)?;
        residuals.push((e - DoubleDouble::from(flat)).abs().to_f64());
        let nl = (n + sec.ell) as f64;
        closed.push(nl * (nl + 2.0) / (2.0 * r * r));
    }
    let mut rep = ConvergenceReport::new("bound_energy", r_list.to_vec(), residuals, Some(-2.0));
    rep.extras.insert("closed_form".into(), closed);
    Ok(rep)
}

/// Curved level `round(n_c + k R)` (ties up) approaching the continuum energy `k^2/2`.
pub fn continuum_index(k: f64, sec: Sector, cfg: &PhysicalConfig) -> Result<u32> {
    let r = cfg.radius()?;
    let x = critical_index(sec, cfg)? + k * r;
    Ok((x + 0.5).floor().max(0.0) as u32)
}

pub fn continuum_energy_convergence(
    k: f64,
    sec: Sector,
    cfg_base: &PhysicalConfig,
    r_list: &[f64],
) -> Result<ConvergenceReport> {
    check_radii(r_list)?;
    if !(k > 0.0) {
        return Err(domain("continuum_energy_convergence", format!("k = {k} must be > 0")));
    }
    let mut residuals = Vec::new();
    let mut indices = Vec::new();
    let mut crit = Vec::new();
    for &r in r_list {
        let cfg = cfg_base.with_radius(r)?;
        let n = continuum_index(k, sec, &cfg)?;
        let e = energy_curved(SpectralIndex::new(n), sec, &cfg)?;
        residuals.push((e - 0.5 * k * k).abs());
        indices.push(n as f64);
        crit.push(critical_index(sec, &cfg)?);
    }
    let mut rep = ConvergenceReport::new("continuum_energy", r_list.to_vec(), residuals, None);
    rep.extras.insert("index".into(), indices);
    rep.extras.insert("n_c".into(), crit);
    Ok(rep)
}

/// `|[n]_R! - [n]!|`.
pub fn factorial_convergence(
    n: u32,
    sec: Sector,
    cfg_base: &PhysicalConfig,
    r_list: &[f64],
) -> Result<ConvergenceReport> {
    check_radii(r_list)?;
    let flat = gen_factorial_flat(n, sec);
    let residuals = r_list
        .iter()
        .map(|&r| Ok((gen_factorial_curved(n, sec, &cfg_base.with_radius(r)?)? - flat).abs()))
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceReport::new("factorial", r_list.to_vec(), residuals, Some(-2.0)))
}

fn check_grid(r_grid: &[f64], r_list: &[f64]) -> Result<()> {
    check_radii(r_list)?;
    let r_min = r_list.iter().cloned().fold(f64::INFINITY, f64::min);
    if r_grid.is_empty() || r_grid.iter().any(|&r| !(r >= 0.0 && r < r_min)) {
        return Err(domain("limits", format!("grid points must lie in [0, {r_min})")));
    }
    Ok(())
}

fn curved_on_grid(w: &CurvedEigenfunction, r_grid: &[f64]) -> Result<Vec<f64>> {
    r_grid
        .par_iter()
        .map(|&r| {
            let p = CurvedPoint::from_radius(r, w.radius)?;
            let (v, d) = w.eval_with_diagnostic(p.chi)?;
            if d.est_rel_err > PRECISION_BUDGET {
                return Err(Error::PrecisionBudget {
                    func: "radial_curved",
                    degree: w.idx.n as usize,
                    estimate: d.est_rel_err,
                });
            }
            let phase = w.params.c_curved / w.params.c_curved.norm();
            Ok((v * phase.conj()).re)
        })
        .collect()
}

/// `max_r |w_{n,l}(arcsin(r/R)) - u_{n,l}(r)|`, both unit-normalized and
/// real with positive slope at the origin.
pub fn bound_wavefunction_convergence(
    n: u32,
    sec: Sector,
    cfg_base: &PhysicalConfig,
    r_grid: &[f64],
    r_list: &[f64],
) -> Result<ConvergenceReport> {
    check_grid(r_grid, r_list)?;
    let idx = SpectralIndex::new(n);
    let u = BoundEigenfunction::new(idx, sec, cfg_base);
    let flat: Vec<f64> = r_grid.iter().map(|&r| u.eval(r)).collect::<Result<_>>()?;
    let mut residuals = Vec::new();
    let mut defects = Vec::new();
    for &rad in r_list {
        let w = CurvedEigenfunction::new(idx, sec, &cfg_base.with_radius(rad)?)?;
        let curved = curved_on_grid(&w, r_grid)?;
        let res = curved.iter().zip(&flat).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        residuals.push(res);
        defects.push(w.norm_defect());
    }
    let mut rep = ConvergenceReport::new("bound_wavefunction", r_list.to_vec(), residuals, None);
    rep.extras.insert("norm_defect".into(), defects);
    Ok(rep)
}

/// Minimax scale: `min_c max_i |c w_i - v_i|`, returned as `(c, value)`.
///
/// The objective is convex and piecewise linear in `c`, so a ternary search
/// on a bracket containing every minimizer converges to the minimum.
pub fn minimax_scale(w: &[f64], v: &[f64]) -> (f64, f64) {
    let obj = |c: f64| w.iter().zip(v).map(|(a, b)| (c * a - b).abs()).fold(0.0, f64::max);
    if w.iter().all(|a| *a == 0.0) {
        return (0.0, obj(0.0));
    }
    // obj(c) >= |c| max|w| - max|v| and obj(0) = max|v| bound any minimizer
    let vmax = v.iter().fold(0.0f64, |m, b| m.max(b.abs()));
    let wmax = w.iter().fold(0.0f64, |m, a| m.max(a.abs()));
    let span = 2.0 * vmax / wmax * (1.0 + 1e-12);
    let (mut lo, mut hi) = (-span, span);
    for _ in 0..300 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if obj(m1) <= obj(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let c = 0.5 * (lo + hi);
    (c, obj(c))
}

/// Scale-free distance between the curved level `round(n_c + kR)` and the
/// continuum function: `min_c max_r |c w - v| / max_r |v|`.
pub fn continuum_wavefunction_convergence(
    k: f64,
    sec: Sector,
    cfg_base: &PhysicalConfig,
    r_grid: &[f64],
    r_list: &[f64],
) -> Result<ConvergenceReport> {
    check_grid(r_grid, r_list)?;
    let lbl = ContinuumLabel::from_k(k, cfg_base)?;
    let v = ContinuumEigenfunction::new(lbl, sec, cfg_base)?;
    let flat: Vec<f64> = r_grid.iter().map(|&r| Ok(v.eval(r)?.re)).collect::<Result<_>>()?;
    let vmax = flat.iter().fold(0.0f64, |m, b| m.max(b.abs()));
    let mut residuals = Vec::new();
    let mut scales = Vec::new();
    let mut scaled = Vec::new();
    let mut indices = Vec::new();
    for &rad in r_list {
        let cfg = cfg_base.with_radius(rad)?;
        let n = continuum_index(k, sec, &cfg)?;
        if n > MAX_CONTINUUM_DEGREE {
            return Err(Error::PrecisionBudget {
                func: "continuum_wavefunction_convergence",
                degree: n as usize,
                estimate: f64::INFINITY,
            });
        }
        let w = CurvedEigenfunction::new(SpectralIndex::new(n), sec, &cfg)?;
        let curved = curved_on_grid(&w, r_grid)?;
        let (c, res) = minimax_scale(&curved, &flat);
        residuals.push(res / vmax);
        scales.push(c);
        scaled.push(c / rad.sqrt());
        indices.push(n as f64);
    }
    let mut rep = ConvergenceReport::new("continuum_wavefunction", r_list.to_vec(), residuals, None);
    rep.extras.insert("index".into(), indices);
    rep.extras.insert("scale".into(), scales);
    rep.extras.insert("scale_over_sqrt_R".into(), scaled);
    Ok(rep)
}
