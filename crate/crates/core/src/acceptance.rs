//! The acceptance suite: twelve criteria, each a set of measured quantities
//! compared against fixed tolerances.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coherent::{
    action_identity_residual, flat_discrete_closed, flat_discrete_sum, moment_residuals, swave_printed_bracket,
    swave_weight, temporal_stability_residual, ActionIdentity, CoherentLabel, CoherentState, CoherentVector,
    ContinuumOrigin, EnergyOffset, Portion,
};
use crate::error::Result;
use crate::limits::{
    bound_energy_convergence, continuum_energy_convergence, continuum_wavefunction_convergence, log_log_fit,
};
use crate::numerics::{integrate_adaptive, integrate_halfline_scaled};
use crate::spectrum::{gen_factorial_flat, gen_factorial_flat_closed, ContinuumLabel, PhysicalConfig, Sector, SpectralIndex};
use crate::wavefunctions::{smoothed_delta_ratio, BoundEigenfunction, ContinuumEigenfunction, CurvedEigenfunction};

const BUILD_TOL: f64 = 1e-12;

/// One measured quantity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    /// `None` for reported quantities.
    pub tolerance: Option<f64>,
    pub pass: bool,
    /// Reported only; does not affect the criterion.
    pub gating: bool,
}

impl Check {
    pub fn at_most(name: &str, measured: f64, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            measured,
            tolerance: Some(tolerance),
            pass: measured <= tolerance,
            gating: true,
        }
    }

    pub fn below(name: &str, measured: f64, tolerance: f64) -> Self {
        Self {
            pass: measured < tolerance,
            ..Self::at_most(name, measured, tolerance)
        }
    }

    pub fn report(name: &str, measured: f64) -> Self {
        Self {
            name: name.to_string(),
            measured,
            tolerance: None,
            pass: true,
            gating: false,
        }
    }

    fn ratio(&self) -> f64 {
        match self.tolerance {
            Some(t) if self.pass => self.measured / t,
            Some(_) => f64::INFINITY,
            None => f64::NEG_INFINITY,
        }
    }
}

/// Folds `new` into `acc`, keeping the worst measurement of each named check.
pub fn merge_checks(acc: &mut Vec<Check>, new: Vec<Check>) {
    for c in new {
        match acc.iter_mut().find(|a| a.name == c.name) {
            Some(a) => {
                if c.measured > a.measured || c.measured.is_nan() {
                    a.measured = c.measured;
                }
                a.pass = a.pass && c.pass;
            }
            None => acc.push(c),
        }
    }
}

/// Outcome of one criterion. `measured` and `tolerance` come from the gating
/// check closest to (or furthest beyond) its tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: String,
    pub measured: Option<f64>,
    pub tolerance: Option<f64>,
    pub pass: bool,
    /// Wall time; not serialized so that reports are reproducible.
    #[serde(skip)]
    pub seconds: f64,
    pub checks: Vec<Check>,
    pub error: Option<String>,
}

impl CriterionResult {
    fn from_checks(id: u8, name: &str, checks: Result<Vec<Check>>, seconds: f64) -> Self {
        match checks {
            Ok(checks) => {
                let worst = checks
                    .iter()
                    .filter(|c| c.gating)
                    .max_by(|a, b| a.ratio().total_cmp(&b.ratio()));
                Self {
                    id,
                    name: name.to_string(),
                    measured: worst.map(|c| c.measured),
                    tolerance: worst.and_then(|c| c.tolerance),
                    pass: checks.iter().all(|c| c.pass || !c.gating),
                    seconds,
                    checks,
                    error: None,
                }
            }
            Err(e) => Self {
                id,
                name: name.to_string(),
                measured: None,
                tolerance: None,
                pass: false,
                seconds,
                checks: Vec::new(),
                error: Some(e.to_string()),
            },
        }
    }

    /// `[PASS]  3 coherent state normalization: measured 2.3e-15 vs tolerance 1.0e-8 (0.03 s)`.
    pub fn line(&self) -> String {
        let tag = if self.pass { "PASS" } else { "FAIL" };
        match (&self.error, self.measured, self.tolerance) {
            (Some(e), _, _) => format!("[{tag}] {:>2} {}: error: {e}", self.id, self.name),
            (None, Some(m), Some(t)) => format!(
                "[{tag}] {:>2} {}: measured {m:.3e} vs tolerance {t:.3e} ({:.2} s)",
                self.id, self.name, self.seconds
            ),
            _ => format!("[{tag}] {:>2} {}: no gating checks", self.id, self.name),
        }
    }
}

pub const NORMALIZATION_TOL: f64 = 1e-8;
pub const ACTION_TOL: f64 = 1e-9;
pub const ACTION_CONTINUUM_TOL: f64 = 1e-6;
pub const STABILITY_TOL: f64 = 1e-10;
pub const MOMENT_TOL: f64 = 1e-10;

pub const CRITERIA: [(u8, &str); 12] = [
    (1, "s-wave generalized factorial"),
    (2, "generalized factorial closed form vs product"),
    (3, "coherent state normalization"),
    (4, "discrete sum closed form"),
    (5, "action identity"),
    (6, "temporal stability"),
    (7, "s-wave resolution of unity"),
    (8, "eigenfunction orthonormality"),
    (9, "bound energy limit"),
    (10, "continuum limit"),
    (11, "continuum reality and regularity"),
    (12, "hydrogen ground state"),
];

pub fn run_criterion(id: u8) -> Option<CriterionResult> {
    let name = CRITERIA.iter().find(|c| c.0 == id)?.1;
    let start = Instant::now();
    let checks = match id {
        1 => swave_factorial(),
        2 => factorial_routes(),
        3 => normalization(),
        4 => discrete_closed_form(),
        5 => action_identity(),
        6 => temporal_stability(),
        7 => resolution_of_unity(),
        8 => orthonormality(),
        9 => energy_limit(),
        10 => continuum_limit(),
        11 => continuum_reality(),
        12 => hydrogen_ground_state(),
        _ => return None,
    };
    Some(CriterionResult::from_checks(id, name, checks, start.elapsed().as_secs_f64()))
}

pub fn run_all() -> Vec<CriterionResult> {
    CRITERIA.iter().filter_map(|c| run_criterion(c.0)).collect()
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

fn swave_factorial() -> Result<Vec<Check>> {
    let worst = (0..=50u32)
        .map(|n| rel(gen_factorial_flat(n, Sector::s_wave()), (n as f64 + 2.0) / (2.0 * (n as f64 + 1.0))))
        .fold(0.0, f64::max);
    Ok(vec![Check::at_most("max relative deviation from (n+2)/(2(n+1)), n <= 50", worst, 1e-13)])
}

fn factorial_routes() -> Result<Vec<Check>> {
    let mut worst = 0.0f64;
    for ell in 0..=5 {
        for n in 0..=50 {
            let s = Sector::new(ell);
            worst = worst.max(rel(gen_factorial_flat(n, s), gen_factorial_flat_closed(n, s)));
        }
    }
    Ok(vec![Check::at_most("max relative product/closed mismatch, n <= 50, l <= 5", worst, 1e-13)])
}

fn label_grid(ell: u32) -> impl Iterator<Item = CoherentLabel> {
    [0.1, 0.3, 0.5, 0.7, 0.9].into_iter().flat_map(move |s| {
        [0.0, 1.0, 5.0].into_iter().map(move |g| CoherentLabel {
            s: s / (ell as f64 + 1.0),
            gamma: g,
        })
    })
}

/// `|<psi|psi> - 1|` for the state with this label.
pub fn normalization_checks(lbl: CoherentLabel, sec: Sector, cfg: &PhysicalConfig, tol: f64) -> Result<Vec<Check>> {
    let state = CoherentState::build(lbl, sec, cfg, tol, Portion::Combined)?;
    let name = if cfg.radius.is_some() { "curved" } else { "flat combined" };
    Ok(vec![Check::at_most(name, (state.norm_sqr() - 1.0).abs(), NORMALIZATION_TOL)])
}

fn normalization() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for cfg in [PhysicalConfig::curved(0.5, 10.0)?, PhysicalConfig::flat(0.5)?] {
        for ell in 0..=2 {
            for lbl in label_grid(ell) {
                merge_checks(&mut checks, normalization_checks(lbl, Sector::new(ell), &cfg, BUILD_TOL)?);
            }
        }
    }
    Ok(checks)
}

fn discrete_closed_form() -> Result<Vec<Check>> {
    let mut worst = 0.0f64;
    for ell in 0..=2 {
        let sec = Sector::new(ell);
        for j in 1..=8 {
            let s2 = 0.1 * j as f64 / ((ell + 1) * (ell + 1)) as f64;
            worst = worst.max(rel(flat_discrete_sum(s2, sec, 1e-15)?, flat_discrete_closed(s2, sec)?));
        }
    }
    let sec = Sector::s_wave();
    let series = flat_discrete_sum(0.5, sec, 1e-15)?;
    let closed = flat_discrete_closed(0.5, sec)?;
    let oracle = (series - 2.454_823).abs().max((closed - 2.454_823).abs());
    let printed = swave_printed_bracket(0.5)?;
    Ok(vec![
        Check::at_most("max relative series vs 2F1", worst, 1e-9),
        Check::at_most("|value - 2.454823| at l = 0, s^2 = 0.5", oracle, 1e-5),
        Check::at_most("printed s-wave bracket vs s^2 * series (relative)", rel(printed, 0.5 * series), 1e-13),
        Check::report("printed s-wave bracket at s^2 = 0.5", printed),
    ])
}

// Residual relative to `omega s^2`; the s = 0 state is |0> and both sides vanish.
fn relative_to_rhs(a: &ActionIdentity, omega: f64) -> f64 {
    a.residual.abs() / if a.rhs > 0.0 { a.rhs } else { omega }
}

/// `<H - E_0> = omega s^2` for curved and discrete-only flat states; with a
/// continuum, the residual against its spectral prediction for both origins.
pub fn action_checks(lbl: CoherentLabel, sec: Sector, cfg: &PhysicalConfig, tol: f64) -> Result<Vec<Check>> {
    let ground = ContinuumOrigin::GroundState;
    if cfg.radius.is_some() {
        let a = action_identity_residual(lbl, sec, cfg, Portion::Combined, ground, tol)?;
        return Ok(vec![Check::at_most("curved, relative to omega s^2", relative_to_rhs(&a, cfg.omega), ACTION_TOL)]);
    }
    let d = action_identity_residual(lbl, sec, cfg, Portion::DiscreteOnly, ground, tol)?;
    let g = action_identity_residual(lbl, sec, cfg, Portion::Combined, ground, tol)?;
    let t = action_identity_residual(lbl, sec, cfg, Portion::Combined, ContinuumOrigin::Threshold, tol)?;
    Ok(vec![
        Check::at_most("flat discrete-only, relative to omega s^2", relative_to_rhs(&d, cfg.omega), ACTION_TOL),
        Check::at_most("flat combined, residual vs prediction", rel(g.residual, g.predicted), ACTION_CONTINUUM_TOL),
        Check::at_most(
            "flat combined, threshold origin, residual vs prediction",
            rel(t.residual, t.predicted),
            ACTION_CONTINUUM_TOL,
        ),
        Check::report("flat combined residual", g.residual),
    ])
}

fn action_identity() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for cfg in [PhysicalConfig::curved(0.5, 10.0)?, PhysicalConfig::flat(0.5)?] {
        for ell in 0..=2 {
            for lbl in label_grid(ell).filter(|l| l.gamma == 0.0) {
                merge_checks(&mut checks, action_checks(lbl, Sector::new(ell), &cfg, BUILD_TOL)?);
            }
        }
    }
    Ok(checks)
}

/// `1 - |<U(t) psi(s, gamma)|psi(s, gamma + omega t)>|`: curved states and the
/// flat discrete portion under `H - E_0`, the flat continuum portion under
/// `H`, and (reported only) the combined flat state under `H`.
pub fn stability_checks(
    lbl: CoherentLabel,
    sec: Sector,
    cfg: &PhysicalConfig,
    t: f64,
    tol: f64,
) -> Result<Vec<Check>> {
    let r = |off, por| temporal_stability_residual(lbl, sec, cfg, t, off, por, tol);
    if cfg.radius.is_some() {
        return Ok(vec![Check::at_most(
            "curved, H - E0",
            r(EnergyOffset::SubtractE0, Portion::Combined)?,
            STABILITY_TOL,
        )]);
    }
    let mut checks = vec![Check::at_most(
        "flat discrete portion, H - E0",
        r(EnergyOffset::SubtractE0, Portion::DiscreteOnly)?,
        STABILITY_TOL,
    )];
    if lbl.s > 0.0 {
        checks.push(Check::at_most(
            "flat continuum portion, H",
            r(EnergyOffset::None, Portion::ContinuumOnly)?,
            STABILITY_TOL,
        ));
    }
    checks.push(Check::report("flat combined, H", r(EnergyOffset::None, Portion::Combined)?));
    Ok(checks)
}

fn temporal_stability() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for cfg in [PhysicalConfig::curved(0.5, 10.0)?, PhysicalConfig::flat(0.5)?] {
        for ell in 0..=2 {
            for lbl in label_grid(ell) {
                for t in [0.1, 1.0, 10.0] {
                    merge_checks(&mut checks, stability_checks(lbl, Sector::new(ell), &cfg, t, BUILD_TOL)?);
                }
            }
        }
    }
    Ok(checks)
}

/// `|moment_n(rho) - [n]!|` for the s-wave weight, `n <= n_max`.
pub fn moment_checks(n_max: u32, tol: f64) -> Result<Vec<Check>> {
    let res = moment_residuals(&swave_weight(), Sector::s_wave(), n_max, tol)?;
    let worst = res.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    Ok(vec![Check::at_most(&format!("max moment residual, n <= {n_max}"), worst, MOMENT_TOL)])
}

fn resolution_of_unity() -> Result<Vec<Check>> {
    moment_checks(30, 1e-14)
}

fn orthonormality() -> Result<Vec<Check>> {
    let curved = PhysicalConfig::curved(0.5, 10.0)?;
    let flat = PhysicalConfig::flat(0.5)?;
    let r3 = 1000.0;
    let (mut wc, mut wf) = (0.0f64, 0.0f64);
    for ell in 0..=2 {
        let sec = Sector::new(ell);
        let ws = (0..=8)
            .map(|n| CurvedEigenfunction::new(SpectralIndex::new(n), sec, &curved))
            .collect::<Result<Vec<_>>>()?;
        let us: Vec<_> = (0..=8).map(|n| BoundEigenfunction::new(SpectralIndex::new(n), sec, &flat)).collect();
        for i in 0..=8 {
            for j in i..=8 {
                let delta = if i == j { 1.0 } else { 0.0 };
                let o = integrate_adaptive(
                    |chi: f64| {
                        let a = ws[i].eval(chi).unwrap_or(Complex64::new(f64::NAN, 0.0));
                        let b = ws[j].eval(chi).unwrap_or(Complex64::new(f64::NAN, 0.0));
                        a.conj() * b * r3 * chi.sin().powi(2)
                    },
                    0.0,
                    PI,
                    1e-12,
                )?;
                wc = wc.max((o.value - delta).norm());
                let big_n = (j as u32 + ell + 1) as f64;
                let o = integrate_halfline_scaled(
                    |r: f64| us[i].eval(r).unwrap_or(f64::NAN) * us[j].eval(r).unwrap_or(f64::NAN) * r * r,
                    big_n * big_n * flat.a,
                    1e-13,
                )?;
                wf = wf.max((o.value - delta).abs());
            }
        }
    }
    Ok(vec![
        Check::at_most("curved, n, n' <= 8, l <= 2, R = 10", wc, 1e-7),
        Check::at_most("flat bound, n, n' <= 8, l <= 2", wf, 1e-9),
    ])
}

fn energy_limit() -> Result<Vec<Check>> {
    let base = PhysicalConfig::flat(0.5)?;
    let radii = [10.0, 100.0, 1000.0];
    let mut worst = 0.0f64;
    let mut order_dev = 0.0f64;
    let mut r2_min = 1.0f64;
    for ell in 0..=2 {
        for n in 0..=5 {
            let rep = bound_energy_convergence(n, Sector::new(ell), &base, &radii)?;
            for (r, c) in rep.residuals.iter().zip(&rep.extras["closed_form"]) {
                worst = worst.max(rel(*r, *c));
            }
            if let (Some(o), Some(r2)) = (rep.fitted_order, rep.r_squared) {
                order_dev = order_dev.max((o + 2.0).abs());
                r2_min = r2_min.min(r2);
            }
        }
    }
    Ok(vec![
        Check::at_most("relative deviation from (n+l)(n+l+2)/(2R^2)", worst, 1e-12),
        Check::at_most("|fitted order + 2|", order_dev, 0.01),
        Check::at_most("1 - regression R^2", 1.0 - r2_min, 0.01),
    ])
}

fn max_step_ratio(res: &[f64]) -> f64 {
    res.windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max)
}

fn continuum_limit() -> Result<Vec<Check>> {
    let base = PhysicalConfig::flat(0.5)?;
    let sec = Sector::s_wave();
    let energy = continuum_energy_convergence(0.5, sec, &base, &[1e2, 1e3, 1e4])?;
    let a = base.a;
    let grid: Vec<f64> = (0..=95).map(|j| a * (0.5 + 0.1 * j as f64)).collect();
    let shape = continuum_wavefunction_convergence(0.5, sec, &base, &grid, &[50.0, 100.0, 200.0])?;
    let mut checks = vec![
        Check::below("energy residual step ratio, R = 1e2, 1e3, 1e4", max_step_ratio(&energy.residuals), 1.0),
        Check::below("shape residual step ratio, R = 50, 100, 200", max_step_ratio(&shape.residuals), 1.0),
    ];
    if let Some(o) = shape.fitted_order {
        checks.push(Check::report("shape residual fitted order", o));
    }
    if let Some(o) = energy.fitted_order {
        checks.push(Check::report("energy residual fitted order", o));
    }
    Ok(checks)
}

fn continuum_reality() -> Result<Vec<Check>> {
    let cfg = PhysicalConfig::flat(0.5)?;
    let a = cfg.a;
    let mut worst_im = 0.0f64;
    let mut worst_slope = 0.0f64;
    let mut worst_amp = 0.0f64;
    let mut worst_delta = 0.0f64;
    for ell in 0..=1 {
        worst_delta = worst_delta.max((smoothed_delta_ratio(Sector::new(ell), &cfg, 3.0, 0.5, 60.0 * a)? - 1.0).abs());
    }
    for k in [0.5, 1.0, 2.0] {
        for ell in 0..=1u32 {
            let v = ContinuumEigenfunction::new(ContinuumLabel::from_k(k, &cfg)?, Sector::new(ell), &cfg)?;
            for j in 0..=1000 {
                let r = 50.0 / k * j as f64 / 1000.0;
                let z = v.eval(r)?;
                worst_im = worst_im.max(z.im.abs() / (1.0 + z.re.abs()));
            }
            let (xs, ys): (Vec<f64>, Vec<f64>) = (0..=20)
                .map(|j| {
                    let r = a * 1e-4 * 100f64.powf(j as f64 / 20.0);
                    v.eval(r).map(|z| (r, z.re.abs()))
                })
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .unzip();
            let slope = log_log_fit(&xs, &ys)
                .ok_or_else(|| crate::error::domain("continuum_reality", "log-log fit failed"))?
                .0;
            worst_slope = worst_slope.max((slope - ell as f64).abs());
            worst_amp = worst_amp.max(measured_amplitude_defect(&v, k, ell, a)?);
        }
    }
    Ok(vec![
        Check::at_most("max |Im v| / (1 + |Re v|), kr <= 50", worst_im, 1e-8),
        Check::at_most("|log-log slope - l| on [1e-4, 1e-2] a", worst_slope, 0.01),
        Check::report("asymptotic amplitude: relative defect of the predicted form", worst_amp),
        Check::report("smoothed delta(eps): |ratio - 1| over l = 0, 1", worst_delta),
    ])
}

// Relative difference between the WKB-corrected peak of |r v| far out and
// the predicted asymptotic amplitude; the ratio to the delta(eps) amplitude is
// then a fixed, known factor.
fn measured_amplitude_defect(v: &ContinuumEigenfunction, k: f64, ell: u32, a: f64) -> Result<f64> {
    let r0 = 400.0 / k;
    let mut peak = 0.0f64;
    for j in 0..2000 {
        let r = r0 + j as f64 * 0.002 * PI / k;
        let rho = k * r;
        let p = (1.0 + 2.0 / (a * k * rho) - (ell * (ell + 1)) as f64 / (rho * rho)).sqrt();
        peak = peak.max((r * v.eval(r)?.re).abs() * p.sqrt());
    }
    Ok(rel(peak, v.asymptotic_amplitude()))
}

fn hydrogen_ground_state() -> Result<Vec<Check>> {
    let cfg = PhysicalConfig::flat(0.5)?;
    let a = cfg.a;
    let u = BoundEigenfunction::new(SpectralIndex::new(0), Sector::s_wave(), &cfg);
    let mut worst = 0.0f64;
    for j in 0..=1000 {
        let r = 10.0 * a * j as f64 / 1000.0;
        worst = worst.max(rel(u.eval(r)?, 2.0 * a.powf(-1.5) * (-r / a).exp()));
    }
    Ok(vec![Check::at_most("max relative deviation on [0, 10a]", worst, 1e-12)])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_criteria_pass() {
        for id in [1, 2, 4, 7, 9, 12] {
            let r = run_criterion(id).unwrap();
            assert!(r.pass, "{}", r.line());
        }
        assert!(run_criterion(13).is_none());
    }
}
