//! Gazeau-Klauder coherent states in one radial sector.
//!
//! Curved states are discrete expansions `c_n = M s^n e^{-i gamma [n]_R} / sqrt([n]_R!)`.
//! Flat states add a continuum portion `c(eps) = N s^eps e^{-i gamma eps} / sqrt(Gamma(eps+1))`
//! carried analytically and integrated on Gauss-Legendre panels up to a
//! cutoff where the density has fallen by 18 orders of magnitude.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::numerics::{composite_gauss_legendre, integrate_adaptive, sum_series, NeumaierSum};
use crate::spectrum::{
    energy_curved, energy_flat_bound, gen_factorial_flat, gen_number_curved_value, gen_number_flat_value,
    ContinuumLabel, PhysicalConfig, Sector, SpectralIndex,
};
use crate::specfun::{hyp2f1, ln_gamma_real, nu, pochhammer};
use crate::specfun::nu::inv_gamma_weighted;
use crate::wavefunctions::{BoundEigenfunction, ContinuumEigenfunction};

const MAX_TERMS: usize = 100_000;
const CUTOFF_DECADES: f64 = 18.0;
const GL_ORDER: usize = 20;

/// Coherent-state label `(s, gamma)`, with action variable `J = s^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherentLabel {
    pub s: f64,
    pub gamma: f64,
}

impl CoherentLabel {
    pub fn new(s: f64, gamma: f64) -> Result<Self> {
        if !(s >= 0.0 && s.is_finite() && gamma.is_finite()) {
            return Err(domain("CoherentLabel", format!("need finite s >= 0 and gamma, got ({s}, {gamma})")));
        }
        Ok(Self { s, gamma })
    }

    pub fn j(&self) -> f64 {
        self.s * self.s
    }

    pub fn shifted(&self, dgamma: f64) -> Self {
        Self {
            s: self.s,
            gamma: self.gamma + dgamma,
        }
    }
}

/// Which parts of a flat state are kept; each is normalized on its own.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Portion {
    Combined,
    DiscreteOnly,
    ContinuumOnly,
}

/// Generator used for time evolution: `H` or `H - E_0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnergyOffset {
    None,
    SubtractE0,
}

/// Energy assigned to the continuum label `eps` inside `<H - E_0>`.
///
/// `GroundState`: `eps` is measured from `E_0`, contributing `omega eps`.
/// `Threshold`: `eps` is the physical energy `omega eps` above zero,
/// contributing `omega eps - E_0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContinuumOrigin {
    GroundState,
    Threshold,
}

/// Truncated discrete expansion `sum_n c_n |n>`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteExpansion {
    pub sector: Sector,
    pub omega: f64,
    /// `None` for flat space.
    pub radius: Option<f64>,
    pub ground_energy: f64,
    pub coeffs: Vec<Complex64>,
    /// `[n]` (or `[n]_R`) for each retained level.
    pub gen_numbers: Vec<f64>,
    /// Bound on the omitted weight `sum_{n > n_max} |c_n|^2`.
    pub tail_bound: f64,
}

impl DiscreteExpansion {
    pub fn n_max(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn weight(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).collect::<NeumaierSum>().value()
    }

    fn empty(sector: Sector, omega: f64, radius: Option<f64>, ground_energy: f64) -> Self {
        Self {
            sector,
            omega,
            radius,
            ground_energy,
            coeffs: Vec::new(),
            gen_numbers: Vec::new(),
            tail_bound: 0.0,
        }
    }

    fn overlap(&self, other: &Self) -> Result<Complex64> {
        if self.sector != other.sector || self.radius != other.radius {
            return Err(Error::SectorMismatch);
        }
        let mut acc = crate::numerics::ComplexNeumaierSum::new();
        for (a, b) in self.coeffs.iter().zip(&other.coeffs) {
            acc.add(a.conj() * b);
        }
        Ok(acc.value())
    }

    fn evolve(&self, t: f64, offset: EnergyOffset) -> Self {
        let shift = match offset {
            EnergyOffset::None => self.ground_energy * t,
            EnergyOffset::SubtractE0 => 0.0,
        };
        let mut out = self.clone();
        for (c, g) in out.coeffs.iter_mut().zip(&self.gen_numbers) {
            *c *= Complex64::from_polar(1.0, -(self.omega * g * t + shift));
        }
        out
    }

    // (sum |c_n|^2 omega [n], sum |c_n|^2)
    fn spectral_sums(&self) -> (f64, f64) {
        let mut e = NeumaierSum::new();
        let mut w = NeumaierSum::new();
        for (c, g) in self.coeffs.iter().zip(&self.gen_numbers) {
            e.add(c.norm_sqr() * self.omega * g);
            w.add(c.norm_sqr());
        }
        (e.value(), w.value())
    }
}

/// Continuum portion `c(eps) = p s^eps e^{i(phi - gamma eps)} / sqrt(Gamma(eps+1))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuumComponent {
    /// The prefactor `p` (zero when the portion is absent).
    pub prefactor: f64,
    pub s: f64,
    pub gamma: f64,
    /// Global phase `phi` picked up under the `H - E_0` generator.
    pub phase: f64,
    pub omega: f64,
    pub eps_cut: f64,
    /// Bound on `p^2 int_{eps_cut}^inf |c/p|^2`.
    pub tail_bound: f64,
    pub quad_nodes: Vec<(f64, f64)>,
}

impl ContinuumComponent {
    fn absent(omega: f64) -> Self {
        Self {
            prefactor: 0.0,
            s: 0.0,
            gamma: 0.0,
            phase: 0.0,
            omega,
            eps_cut: 0.0,
            tail_bound: 0.0,
            quad_nodes: Vec::new(),
        }
    }

    fn new(prefactor: f64, lbl: CoherentLabel, omega: f64) -> Self {
        if prefactor == 0.0 || lbl.s == 0.0 {
            let mut c = Self::absent(omega);
            c.s = lbl.s;
            c.gamma = lbl.gamma;
            return c;
        }
        let s2 = lbl.j();
        let (eps_cut, tail) = continuum_cutoff(s2);
        Self {
            prefactor,
            s: lbl.s,
            gamma: lbl.gamma,
            phase: 0.0,
            omega,
            eps_cut,
            tail_bound: prefactor * prefactor * tail,
            quad_nodes: continuum_nodes(eps_cut),
        }
    }

    pub fn is_absent(&self) -> bool {
        self.prefactor == 0.0 || self.s == 0.0
    }

    pub fn density(&self, eps: f64) -> Complex64 {
        if self.is_absent() || eps < 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let m = (eps * self.s.ln() - 0.5 * ln_gamma_real(eps + 1.0)).exp();
        Complex64::from_polar(self.prefactor * m, self.phase - self.gamma * eps)
    }

    pub fn weight(&self) -> f64 {
        self.quad_nodes
            .iter()
            .map(|&(e, w)| w * self.density(e).norm_sqr())
            .collect::<NeumaierSum>()
            .value()
    }

    fn overlap(&self, other: &Self) -> Complex64 {
        if self.is_absent() || other.is_absent() {
            return Complex64::new(0.0, 0.0);
        }
        let nodes = if self.eps_cut >= other.eps_cut {
            &self.quad_nodes
        } else {
            &other.quad_nodes
        };
        let mut acc = crate::numerics::ComplexNeumaierSum::new();
        for &(e, w) in nodes {
            acc.add(w * self.density(e).conj() * other.density(e));
        }
        acc.value()
    }

    fn evolve(&self, t: f64, offset: EnergyOffset, ground_energy: f64) -> Self {
        let mut out = self.clone();
        out.gamma += self.omega * t;
        if offset == EnergyOffset::SubtractE0 {
            out.phase += ground_energy * t;
        }
        out
    }

    // (int |c|^2 omega eps, int |c|^2)
    fn spectral_sums(&self) -> (f64, f64) {
        let mut e = NeumaierSum::new();
        let mut w = NeumaierSum::new();
        for &(eps, wt) in &self.quad_nodes {
            let d = wt * self.density(eps).norm_sqr();
            e.add(d * self.omega * eps);
            w.add(d);
        }
        (e.value(), w.value())
    }
}

// Log of s^{2 eps} / Gamma(eps + 1), concave in eps.
fn log_continuum_integrand(s2: f64, eps: f64) -> f64 {
    eps * s2.ln() - ln_gamma_real(eps + 1.0)
}

/// Cutoff `eps_cut` where `s^{2 eps}/Gamma(eps+1)` falls below `1e-18` of its
/// peak, with a bound on the omitted integral.
///
/// The integrand is log-concave, so beyond `c + 1` it decays at least as fast
/// as `exp(-q (eps - c - 1))` with `q` the log-drop over `[c, c+1]`.
pub fn continuum_cutoff(s2: f64) -> (f64, f64) {
    if s2 <= 0.0 {
        return (0.0, 0.0);
    }
    let f = |e: f64| log_continuum_integrand(s2, e);
    let (mut lo, mut hi) = (0.0f64, 10.0 + 2.0 * s2);
    for _ in 0..200 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if f(m1) < f(m2) {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    let peak_at = 0.5 * (lo + hi);
    let floor = f(peak_at) - CUTOFF_DECADES * std::f64::consts::LN_10;
    let mut cut = peak_at.ceil().max(1.0);
    while f(cut) > floor {
        cut += 1.0;
    }
    let q = f(cut) - f(cut + 1.0);
    let tail = f(cut).exp() + f(cut + 1.0).exp() / q;
    (cut, tail)
}

fn continuum_nodes(eps_cut: f64) -> Vec<(f64, f64)> {
    if eps_cut <= 0.0 {
        return Vec::new();
    }
    composite_gauss_legendre(0.0, eps_cut, eps_cut.ceil() as usize, GL_ORDER)
}

/// Flat coherent state: discrete plus continuum portions with a shared constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlatCoherentState {
    pub label: CoherentLabel,
    pub sector: Sector,
    pub portion: Portion,
    pub discrete: DiscreteExpansion,
    pub continuum: ContinuumComponent,
    /// `N(s^2)` for combined states; the portion's own constant otherwise.
    pub norm_const: f64,
}

impl FlatCoherentState {
    pub fn discrete_fraction(&self) -> f64 {
        self.discrete.weight()
    }

    pub fn continuum_fraction(&self) -> f64 {
        self.continuum.weight()
    }
}

/// Common operations of curved and flat states.
pub trait CoherentVector: Sized {
    fn overlap_with(&self, other: &Self) -> Result<Complex64>;
    fn evolved(&self, t: f64, offset: EnergyOffset) -> Self;
    /// `<H>` computed spectrally.
    fn energy(&self) -> f64;
    fn norm_sqr(&self) -> f64;
}

impl CoherentVector for DiscreteExpansion {
    fn overlap_with(&self, other: &Self) -> Result<Complex64> {
        self.overlap(other)
    }

    fn evolved(&self, t: f64, offset: EnergyOffset) -> Self {
        self.evolve(t, offset)
    }

    fn energy(&self) -> f64 {
        let (e, w) = self.spectral_sums();
        e + self.ground_energy * w
    }

    fn norm_sqr(&self) -> f64 {
        self.weight()
    }
}

impl CoherentVector for FlatCoherentState {
    fn overlap_with(&self, other: &Self) -> Result<Complex64> {
        if self.sector != other.sector {
            return Err(Error::SectorMismatch);
        }
        Ok(self.discrete.overlap(&other.discrete)? + self.continuum.overlap(&other.continuum))
    }

    fn evolved(&self, t: f64, offset: EnergyOffset) -> Self {
        let mut out = self.clone();
        out.discrete = self.discrete.evolve(t, offset);
        out.continuum = self.continuum.evolve(t, offset, self.discrete.ground_energy);
        out
    }

    fn energy(&self) -> f64 {
        let (ed, wd) = self.discrete.spectral_sums();
        let (ec, _) = self.continuum.spectral_sums();
        ed + self.discrete.ground_energy * wd + ec
    }

    fn norm_sqr(&self) -> f64 {
        self.discrete.weight() + self.continuum.weight()
    }
}

/// `<A|B>`; errors when the states live in different sectors or spaces.
pub fn overlap<S: CoherentVector>(a: &S, b: &S) -> Result<Complex64> {
    a.overlap_with(b)
}

/// Evolution by `e^{-iHt}` or `e^{-i(H - E_0)t}`, continuum energies `omega eps`.
pub fn evolve<S: CoherentVector>(state: &S, t: f64, offset: EnergyOffset) -> S {
    state.evolved(t, offset)
}

pub fn energy_expectation<S: CoherentVector>(state: &S) -> f64 {
    state.energy()
}

struct SeriesTerms {
    terms: Vec<f64>,
    gens: Vec<f64>,
    sum: f64,
    tail: f64,
}

// Terms s^{2n}/[n]! for n = 0, 1, ... from the recurrence t_n = t_{n-1} s^2 / [n].
fn generalized_exponential<G>(s2: f64, tol: f64, mut gen: G) -> Result<SeriesTerms>
where
    G: FnMut(u32) -> Result<f64>,
{
    let mut terms = Vec::new();
    let mut gens = Vec::new();
    let mut failure = None;
    let mut t = 1.0;
    let res = sum_series(
        |n| {
            let g = if n == 0 {
                0.0
            } else {
                match gen(n as u32) {
                    Ok(g) => g,
                    Err(e) => {
                        failure.get_or_insert(e);
                        f64::NAN
                    }
                }
            };
            if n > 0 {
                t *= s2 / g;
            }
            terms.push(t);
            gens.push(g);
            Complex64::new(t, 0.0)
        },
        tol,
        MAX_TERMS,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let res = res?;
    Ok(SeriesTerms {
        terms,
        gens,
        sum: res.value.re,
        tail: res.truncation_bound,
    })
}

fn series_tol(tol: f64) -> f64 {
    (tol * 1e-3).clamp(1e-17, 1e-6)
}

fn check_s2(s2: f64) -> Result<()> {
    if !(s2 >= 0.0 && s2.is_finite()) {
        return Err(domain("coherent", format!("s^2 = {s2} must be finite and >= 0")));
    }
    Ok(())
}

fn check_flat_radius(s2: f64, sec: Sector) -> Result<()> {
    check_s2(s2)?;
    if s2 >= sec.flat_radius_s2() {
        return Err(domain(
            "coherent",
            format!(
                "s^2 = {s2} outside the convergence radius 1/(l+1)^2 = {} for l = {}",
                sec.flat_radius_s2(),
                sec.ell
            ),
        ));
    }
    Ok(())
}

/// `M(s^2)` with `M^{-2} = sum_n s^{2n} / [n]_R!`; converges for every `s^2`.
pub fn norm_curved(s2: f64, sec: Sector, cfg: &PhysicalConfig, tol: f64) -> Result<f64> {
    check_s2(s2)?;
    cfg.radius()?;
    let series = generalized_exponential(s2, series_tol(tol), |n| gen_number_curved_value(n, sec, cfg))?;
    Ok(1.0 / series.sum.sqrt())
}

/// Discrete flat sum `sum_n s^{2n} / [n]!`.
pub fn flat_discrete_sum(s2: f64, sec: Sector, tol: f64) -> Result<f64> {
    check_flat_radius(s2, sec)?;
    Ok(generalized_exponential(s2, series_tol(tol), |n| Ok(gen_number_flat_value(n, sec)))?.sum)
}

/// Closed form of [`flat_discrete_sum`]: `2F1(l+2, l+2; 2l+3; (l+1)^2 s^2)`.
pub fn flat_discrete_closed(s2: f64, sec: Sector) -> Result<f64> {
    check_flat_radius(s2, sec)?;
    let l = sec.ell as f64;
    let a = Complex64::new(l + 2.0, 0.0);
    let x = (l + 1.0) * (l + 1.0) * s2;
    Ok(hyp2f1(a, a, 2.0 * l + 3.0, Complex64::new(x, 0.0))?.re)
}

/// `int_0^inf s^{2 eps} / Gamma(eps+1) d eps` on the continuum quadrature grid.
pub fn continuum_integral(s2: f64) -> f64 {
    let (cut, _) = continuum_cutoff(s2);
    continuum_nodes(cut)
        .into_iter()
        .map(|(e, w)| w * log_continuum_integrand(s2, e).exp())
        .collect::<NeumaierSum>()
        .value()
}

/// Both routes to `N(s^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlatNormRoutes {
    pub discrete_series: f64,
    pub discrete_closed: f64,
    pub continuum_quadrature: f64,
    pub continuum_nu: f64,
    /// `(series + quadrature)^{-1/2}`.
    pub norm_series: f64,
    /// `(2F1 + nu)^{-1/2}`.
    pub norm_closed: f64,
    pub rel_diff: f64,
}

pub fn norm_flat_routes(s2: f64, sec: Sector, tol: f64) -> Result<FlatNormRoutes> {
    let discrete_series = flat_discrete_sum(s2, sec, tol)?;
    let discrete_closed = flat_discrete_closed(s2, sec)?;
    let continuum_quadrature = continuum_integral(s2);
    let continuum_nu = nu(s2)?;
    let norm_series = 1.0 / (discrete_series + continuum_quadrature).sqrt();
    let norm_closed = 1.0 / (discrete_closed + continuum_nu).sqrt();
    Ok(FlatNormRoutes {
        discrete_series,
        discrete_closed,
        continuum_quadrature,
        continuum_nu,
        norm_series,
        norm_closed,
        rel_diff: (norm_series - norm_closed).abs() / norm_closed,
    })
}

/// `N(s^2)` with `N^{-2} = 2F1(l+2, l+2; 2l+3; (l+1)^2 s^2) + nu(s^2)`.
pub fn norm_flat(s2: f64, sec: Sector, tol: f64) -> Result<f64> {
    Ok(norm_flat_routes(s2, sec, tol)?.norm_closed)
}

/// The s-wave bracket `(2/s^2)(s^2/(1-s^2) + ln(1-s^2))` in its printed form;
/// it equals `s^2` times the discrete sum.
pub fn swave_printed_bracket(s2: f64) -> Result<f64> {
    check_flat_radius(s2, Sector::s_wave())?;
    if s2 == 0.0 {
        return Ok(0.0);
    }
    Ok(2.0 / s2 * (s2 / (1.0 - s2) + (-s2).ln_1p()))
}

/// Corrected s-wave closed form `2/(1-s^2) + 2/s^2 + (2/s^4) ln(1-s^2)` of the discrete sum.
pub fn swave_discrete_closed(s2: f64) -> Result<f64> {
    check_flat_radius(s2, Sector::s_wave())?;
    if s2 < 1e-4 {
        // 2 sum (n+1) s^{2n} / (n+2), enough terms for double precision
        return Ok((0..12).map(|n| 2.0 * (n as f64 + 1.0) / (n as f64 + 2.0) * s2.powi(n)).sum());
    }
    Ok(2.0 / (1.0 - s2) + 2.0 / s2 + 2.0 / (s2 * s2) * (-s2).ln_1p())
}

/// Largest relative difference between `1/[n]!` and the `n`-th coefficient of
/// `2F1(l+2, l+2; 2l+3; (l+1)^2 x)` in `x`, for `n <= n_max`.
pub fn series_coefficient_mismatch(sec: Sector, n_max: u32) -> f64 {
    let l = sec.ell as f64;
    let l1sq = (l + 1.0) * (l + 1.0);
    let mut worst = 0.0f64;
    for n in 0..=n_max {
        let nn = n as usize;
        let hyp = pochhammer(l + 2.0, nn).powi(2) / (pochhammer(2.0 * l + 3.0, nn) * pochhammer(1.0, nn))
            * l1sq.powi(n as i32);
        let direct = 1.0 / gen_factorial_flat(n, sec);
        worst = worst.max((hyp - direct).abs() / direct);
    }
    worst
}

fn coefficients(prefactor: f64, lbl: CoherentLabel, series: &SeriesTerms) -> Vec<Complex64> {
    series
        .terms
        .iter()
        .zip(&series.gens)
        .map(|(t, g)| Complex64::from_polar(prefactor * t.sqrt(), -lbl.gamma * g))
        .collect()
}

/// Curved coherent state with `M(s^2)` from [`norm_curved`]; truncated where
/// the omitted weight drops below `tol`.
pub fn build_curved_state(lbl: CoherentLabel, sec: Sector, cfg: &PhysicalConfig, tol: f64) -> Result<DiscreteExpansion> {
    let radius = cfg.radius()?;
    let s2 = lbl.j();
    let m = norm_curved(s2, sec, cfg, tol)?;
    let series = generalized_exponential(s2, series_tol(tol), |n| gen_number_curved_value(n, sec, cfg))?;
    Ok(DiscreteExpansion {
        sector: sec,
        omega: cfg.omega,
        radius: Some(radius),
        ground_energy: energy_curved(SpectralIndex::new(0), sec, cfg)?,
        coeffs: coefficients(m, lbl, &series),
        gen_numbers: series.gens.clone(),
        tail_bound: m * m * series.tail,
    })
}

/// Flat coherent state. `cfg` supplies `omega`; its radius is ignored.
///
/// Combined states use `N(s^2)` from the closed form; a single portion is
/// normalized by its own series or quadrature.
pub fn build_flat_state(
    lbl: CoherentLabel,
    sec: Sector,
    cfg: &PhysicalConfig,
    tol: f64,
    portion: Portion,
) -> Result<FlatCoherentState> {
    let s2 = lbl.j();
    check_flat_radius(s2, sec)?;
    let e0 = energy_flat_bound(SpectralIndex::new(0), sec, cfg);
    let series = generalized_exponential(s2, series_tol(tol), |n| Ok(gen_number_flat_value(n, sec)))?;
    let (disc_pref, cont_pref, norm_const) = match portion {
        Portion::Combined => {
            let n = norm_flat(s2, sec, tol)?;
            (n, n, n)
        }
        Portion::DiscreteOnly => {
            let n = 1.0 / series.sum.sqrt();
            (n, 0.0, n)
        }
        Portion::ContinuumOnly => {
            if s2 == 0.0 {
                return Err(domain("build_flat_state", "the continuum portion vanishes at s = 0"));
            }
            let n = 1.0 / continuum_integral(s2).sqrt();
            (0.0, n, n)
        }
    };
    let discrete = if disc_pref > 0.0 {
        DiscreteExpansion {
            sector: sec,
            omega: cfg.omega,
            radius: None,
            ground_energy: e0,
            coeffs: coefficients(disc_pref, lbl, &series),
            gen_numbers: series.gens.clone(),
            tail_bound: disc_pref * disc_pref * series.tail,
        }
    } else {
        DiscreteExpansion::empty(sec, cfg.omega, None, e0)
    };
    Ok(FlatCoherentState {
        label: lbl,
        sector: sec,
        portion,
        discrete,
        continuum: ContinuumComponent::new(cont_pref, lbl, cfg.omega),
        norm_const,
    })
}

/// Either kind of state, selected by the presence of a curvature radius.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "space", rename_all = "snake_case")]
pub enum CoherentState {
    Curved(DiscreteExpansion),
    Flat(FlatCoherentState),
}

impl CoherentState {
    pub fn build(lbl: CoherentLabel, sec: Sector, cfg: &PhysicalConfig, tol: f64, portion: Portion) -> Result<Self> {
        if cfg.radius.is_some() {
            Ok(Self::Curved(build_curved_state(lbl, sec, cfg, tol)?))
        } else {
            Ok(Self::Flat(build_flat_state(lbl, sec, cfg, tol, portion)?))
        }
    }

    pub fn discrete(&self) -> &DiscreteExpansion {
        match self {
            Self::Curved(d) => d,
            Self::Flat(f) => &f.discrete,
        }
    }

    pub fn continuum(&self) -> Option<&ContinuumComponent> {
        match self {
            Self::Curved(_) => None,
            Self::Flat(f) => Some(&f.continuum),
        }
    }
}

impl CoherentVector for CoherentState {
    fn overlap_with(&self, other: &Self) -> Result<Complex64> {
        match (self, other) {
            (Self::Curved(a), Self::Curved(b)) => a.overlap_with(b),
            (Self::Flat(a), Self::Flat(b)) => a.overlap_with(b),
            _ => Err(Error::SectorMismatch),
        }
    }

    fn evolved(&self, t: f64, offset: EnergyOffset) -> Self {
        match self {
            Self::Curved(a) => Self::Curved(a.evolved(t, offset)),
            Self::Flat(a) => Self::Flat(a.evolved(t, offset)),
        }
    }

    fn energy(&self) -> f64 {
        match self {
            Self::Curved(a) => a.energy(),
            Self::Flat(a) => a.energy(),
        }
    }

    fn norm_sqr(&self) -> f64 {
        match self {
            Self::Curved(a) => a.norm_sqr(),
            Self::Flat(a) => a.norm_sqr(),
        }
    }
}

/// `1 - |<U(t) psi(s, gamma) | psi(s, gamma + omega t)>|`, with both states
/// normalized before the overlap is taken.
pub fn temporal_stability_residual(
    lbl: CoherentLabel,
    sec: Sector,
    cfg: &PhysicalConfig,
    t: f64,
    offset: EnergyOffset,
    portion: Portion,
    tol: f64,
) -> Result<f64> {
    let a = CoherentState::build(lbl, sec, cfg, tol, portion)?.evolved(t, offset);
    let b = CoherentState::build(lbl.shifted(cfg.omega * t), sec, cfg, tol, portion)?;
    let o = a.overlap_with(&b)?.norm() / (a.norm_sqr() * b.norm_sqr()).sqrt();
    Ok((1.0 - o).max(0.0))
}

/// Outcome of the action-identity check `<H - E_0> = omega s^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActionIdentity {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    /// Residual expected from the spectral decomposition: zero for curved
    /// and discrete-only states, `omega p^2 int_0^1 s^{2 eps}/Gamma(eps) d eps`
    /// (plus `|E_0| p^2 nu(s^2)` at the threshold origin) with a continuum.
    pub predicted: f64,
}

/// `int_0^1 x^eps / Gamma(eps) d eps` by adaptive Gauss-Kronrod.
pub fn shifted_continuum_integral(x: f64) -> Result<f64> {
    if x == 0.0 {
        return Ok(0.0);
    }
    Ok(integrate_adaptive(|e: f64| inv_gamma_weighted(x, e), 0.0, 1.0, 1e-15)?.value)
}

pub fn action_identity_residual(
    lbl: CoherentLabel,
    sec: Sector,
    cfg: &PhysicalConfig,
    portion: Portion,
    origin: ContinuumOrigin,
    tol: f64,
) -> Result<ActionIdentity> {
    let rhs = cfg.omega * lbl.j();
    let state = CoherentState::build(lbl, sec, cfg, tol, portion)?;
    let (ed, _) = state.discrete().spectral_sums();
    let mut lhs = ed;
    let mut predicted = 0.0;
    if let Some(c) = state.continuum().filter(|c| !c.is_absent()) {
        let e0 = state.discrete().ground_energy;
        let (ec, wc) = c.spectral_sums();
        lhs += ec;
        let p2 = c.prefactor * c.prefactor;
        predicted = cfg.omega * p2 * shifted_continuum_integral(lbl.j())?;
        if origin == ContinuumOrigin::Threshold {
            lhs -= e0 * wc;
            predicted -= e0 * p2 * nu(lbl.j())?;
        }
    }
    Ok(ActionIdentity {
        lhs,
        rhs,
        residual: lhs - rhs,
        predicted,
    })
}

/// Weight `rho(u)` on `[0, u_bar]`: a density plus point masses.
#[derive(Clone)]
pub struct WeightFunction {
    pub density: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub point_masses: Vec<(f64, f64)>,
    pub u_bar: f64,
}

impl fmt::Debug for WeightFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WeightFunction")
            .field("point_masses", &self.point_masses)
            .field("u_bar", &self.u_bar)
            .finish_non_exhaustive()
    }
}

impl WeightFunction {
    pub fn new<F>(density: F, point_masses: Vec<(f64, f64)>, u_bar: f64) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(u_bar > 0.0 && u_bar.is_finite()) {
            return Err(domain("WeightFunction", format!("u_bar = {u_bar} must be positive")));
        }
        for &(x, m) in &point_masses {
            if !(m >= 0.0 && (0.0..=u_bar).contains(&x)) {
                return Err(domain("WeightFunction", format!("point mass {m} at {x} invalid")));
            }
        }
        Ok(Self {
            density: Arc::new(density),
            point_masses,
            u_bar,
        })
    }

    pub fn zero() -> Self {
        Self::new(|_| 0.0, Vec::new(), 1.0).expect("valid")
    }

    /// `int_0^{u_bar} u^n rho(u) du`.
    pub fn moment(&self, n: u32, tol: f64) -> Result<f64> {
        let d = &self.density;
        let smooth = integrate_adaptive(|u: f64| u.powi(n as i32) * d(u), 0.0, self.u_bar, tol)?.value;
        let masses: f64 = self.point_masses.iter().map(|&(x, m)| m * x.powi(n as i32)).sum();
        Ok(smooth + masses)
    }
}

/// The s-wave weight: mass 1/2 at `u = 1` plus density 1/2 on `[0, 1]`,
/// whose moments are `(n+2)/(2(n+1))`.
pub fn swave_weight() -> WeightFunction {
    WeightFunction::new(|_| 0.5, vec![(1.0, 0.5)], 1.0).expect("valid")
}

/// `moment_n(rho) - [n]!` for `n = 0..=n_max`.
pub fn moment_residuals(w: &WeightFunction, sec: Sector, n_max: u32, tol: f64) -> Result<Vec<f64>> {
    (0..=n_max)
        .map(|n| Ok(w.moment(n, tol)? - gen_factorial_flat(n, sec)))
        .collect()
}

/// Position-space radial amplitude of a flat state.
///
/// Bound levels enter through `u_{n,l}`; the continuum through the
/// energy-normalized Coulomb function on the state's quadrature nodes.
pub fn position_amplitude(state: &FlatCoherentState, r_grid: &[f64], cfg: &PhysicalConfig) -> Result<Vec<Complex64>> {
    let sec = state.sector;
    let bound: Vec<_> = (0..state.discrete.coeffs.len())
        .map(|n| BoundEigenfunction::new(SpectralIndex::new(n as u32), sec, cfg))
        .collect();
    let cont = &state.continuum;
    let mut continuum = Vec::with_capacity(cont.quad_nodes.len());
    if !cont.is_absent() {
        for &(eps, w) in &cont.quad_nodes {
            let f = ContinuumEigenfunction::new(ContinuumLabel::from_eps(eps, cfg)?, sec, cfg)?;
            continuum.push((f, w * cont.density(eps)));
        }
    }
    r_grid
        .par_iter()
        .map(|&r| {
            if !(r >= 0.0) {
                return Err(domain("position_amplitude", format!("r = {r} must be >= 0")));
            }
            let mut acc = crate::numerics::ComplexNeumaierSum::new();
            for (c, u) in state.discrete.coeffs.iter().zip(&bound) {
                acc.add(c * u.eval(r)?);
            }
            for (f, wc) in &continuum {
                acc.add(wc * f.eval_energy_normalized(r)?);
            }
            Ok(acc.value())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const TOL: f64 = 1e-12;

    fn curved() -> PhysicalConfig {
        PhysicalConfig::curved(0.5, 10.0).unwrap()
    }

    fn flat() -> PhysicalConfig {
        PhysicalConfig::default()
    }

    fn label(s: f64, g: f64) -> CoherentLabel {
        CoherentLabel::new(s, g).unwrap()
    }

    #[test]
    fn curved_norm_against_direct_sum() {
        let c = curved();
        let sec = Sector::s_wave();
        assert_eq!(norm_curved(0.0, sec, &c, TOL).unwrap(), 1.0);
        for s2 in [0.5, 4.0] {
            let mut acc = NeumaierSum::new();
            let mut t = 1.0;
            acc.add(t);
            for n in 1..200 {
                t *= s2 / gen_number_curved_value(n, sec, &c).unwrap();
                acc.add(t);
            }
            let m = norm_curved(s2, sec, &c, TOL).unwrap();
            assert!((m.powi(-2) - acc.value()).abs() < 1e-13 * acc.value(), "s2={s2}");
        }
        assert!(norm_curved(0.5, sec, &flat(), TOL).is_err());
    }

    #[test]
    fn flat_norm_routes_and_witness() {
        let sec = Sector::s_wave();
        assert_eq!(norm_flat(0.0, sec, TOL).unwrap(), 1.0);
        let r = norm_flat_routes(0.5, sec, TOL).unwrap();
        assert!((r.discrete_series - 2.454_823).abs() < 1e-5);
        assert!((r.discrete_closed - r.discrete_series).abs() < 1e-12 * r.discrete_series);
        assert!(r.rel_diff < 1e-7);
        assert!((swave_discrete_closed(0.5).unwrap() - r.discrete_series).abs() < 1e-12);
        let printed = swave_printed_bracket(0.5).unwrap();
        assert!((printed - 1.227_411).abs() < 1e-6);
        assert!((printed - 0.5 * r.discrete_series).abs() < 1e-13);
        assert!(norm_flat(0.5, Sector::new(1), TOL).is_err());
        assert!(series_coefficient_mismatch(Sector::new(2), 60) < 1e-14);
    }

    #[test]
    fn curved_state_examples() {
        let c = curved();
        let sec = Sector::s_wave();
        let st = build_curved_state(label(0.0, 1.0), sec, &c, TOL).unwrap();
        assert_eq!(st.coeffs[0], Complex64::new(1.0, 0.0));
        assert!(st.coeffs[1..].iter().all(|c| c.norm() == 0.0));
        let st = build_curved_state(label(0.7, 0.0), sec, &c, TOL).unwrap();
        assert!(st.coeffs.iter().all(|c| c.im == 0.0 && c.re > 0.0));
        let st = build_curved_state(label(0.7, 2.3), sec, &c, 1e-10).unwrap();
        assert!((st.weight() - 1.0).abs() < 1e-10);
        assert!(st.tail_bound < 1e-10);
    }

    #[test]
    fn flat_state_examples() {
        let c = flat();
        let sec = Sector::s_wave();
        let st = build_flat_state(label(0.0, 0.0), sec, &c, TOL, Portion::Combined).unwrap();
        assert_eq!(st.discrete.coeffs[0], Complex64::new(1.0, 0.0));
        assert_eq!(st.continuum_fraction(), 0.0);

        let st = build_flat_state(label(0.6, 0.0), sec, &c, TOL, Portion::Combined).unwrap();
        let mut direct = NeumaierSum::new();
        for n in 0..400 {
            direct.add(0.36f64.powi(n) / gen_factorial_flat(n as u32, sec));
        }
        let expected = st.norm_const.powi(2) * direct.value();
        assert!((st.discrete_fraction() - expected).abs() < 1e-12);
        assert!((st.norm_sqr() - 1.0).abs() < 1e-8);

        let g = build_flat_state(label(0.6, 4.2), sec, &c, TOL, Portion::Combined).unwrap();
        assert!((g.norm_sqr() - st.norm_sqr()).abs() < 1e-12);
        assert!(build_flat_state(label(0.5, 0.0), Sector::new(1), &c, TOL, Portion::Combined).is_err());
    }

    #[test]
    fn overlap_examples() {
        let c = flat();
        let sec = Sector::s_wave();
        let a = build_flat_state(label(0.5, 0.0), sec, &c, TOL, Portion::Combined).unwrap();
        let b = build_flat_state(label(0.6, 0.0), sec, &c, TOL, Portion::Combined).unwrap();
        let ab = overlap(&a, &b).unwrap();
        let oracle = a.norm_const
            * b.norm_const
            * (flat_discrete_closed(0.3, sec).unwrap() + nu(0.3).unwrap());
        assert!(ab.im.abs() < 1e-15 && ab.re > 0.0);
        assert!((ab.re - oracle).abs() < 1e-9, "{ab} vs {oracle}");
        let ba = overlap(&b, &a).unwrap();
        assert!((ab - ba.conj()).norm() < 1e-15);
        let d = build_flat_state(label(0.5, 0.7), sec, &c, TOL, Portion::Combined).unwrap();
        assert!(overlap(&a, &d).unwrap().norm() < 1.0);
        let other = build_flat_state(label(0.3, 0.0), Sector::new(1), &c, TOL, Portion::Combined).unwrap();
        assert!(matches!(overlap(&a, &other), Err(Error::SectorMismatch)));
    }

    #[test]
    fn evolution_examples() {
        let c = curved();
        let sec = Sector::new(1);
        let st = build_curved_state(label(0.4, 0.3), sec, &c, TOL).unwrap();
        assert_eq!(evolve(&st, 0.0, EnergyOffset::None), st);
        let t = 2.7;
        let ev = evolve(&st, t, EnergyOffset::SubtractE0);
        let shifted = build_curved_state(label(0.4, 0.3 + c.omega * t), sec, &c, TOL).unwrap();
        for (x, y) in ev.coeffs.iter().zip(&shifted.coeffs) {
            assert!((x - y).norm() < 1e-14);
        }
        assert!((ev.weight() - st.weight()).abs() < 1e-12);

        let f = flat();
        let st = build_flat_state(label(0.6, 0.0), Sector::s_wave(), &f, TOL, Portion::Combined).unwrap();
        let ev = evolve(&st, 1.0, EnergyOffset::None);
        assert!((ev.norm_sqr() - st.norm_sqr()).abs() < 1e-12);
        let shifted = build_flat_state(label(0.6, f.omega), Sector::s_wave(), &f, TOL, Portion::Combined).unwrap();
        let e0 = st.discrete.ground_energy;
        let expected_disc = shifted.discrete.overlap(&shifted.discrete).unwrap() * Complex64::from_polar(1.0, -e0);
        assert!((ev.discrete.overlap(&shifted.discrete).unwrap().conj() - expected_disc).norm() < 1e-12);
        assert!((ev.continuum.overlap(&shifted.continuum) - shifted.continuum.weight()).norm() < 1e-14);
    }

    #[test]
    fn temporal_stability() {
        let c = curved();
        let f = flat();
        let sec = Sector::s_wave();
        let lbl = label(0.6, 0.0);
        for t in [0.1, 1.0, 10.0] {
            let r = temporal_stability_residual(lbl, sec, &c, t, EnergyOffset::SubtractE0, Portion::Combined, TOL);
            assert!(r.unwrap() <= 1e-10);
            let d = temporal_stability_residual(lbl, sec, &f, t, EnergyOffset::SubtractE0, Portion::DiscreteOnly, TOL);
            assert!(d.unwrap() <= 1e-10);
            let k = temporal_stability_residual(lbl, sec, &f, t, EnergyOffset::None, Portion::ContinuumOnly, TOL);
            assert!(k.unwrap() <= 1e-10);
        }
        let st = build_flat_state(lbl, sec, &f, TOL, Portion::Combined).unwrap();
        let (dw, cw) = (st.discrete_fraction(), st.continuum_fraction());
        let e0 = st.discrete.ground_energy;
        let predicted = 1.0 - (Complex64::from_polar(dw, -e0) + cw).norm();
        let r = temporal_stability_residual(lbl, sec, &f, 1.0, EnergyOffset::None, Portion::Combined, TOL).unwrap();
        assert!(r > 1e-3);
        assert!((r - predicted).abs() < 1e-9);
    }

    #[test]
    fn action_identity() {
        let c = curved();
        for ell in 0..3 {
            let sec = Sector::new(ell);
            for s in [0.0, 0.3, 0.9, 1.7] {
                let a = action_identity_residual(label(s, 0.4), sec, &c, Portion::Combined, ContinuumOrigin::GroundState, TOL)
                    .unwrap();
                assert!(a.residual.abs() <= 1e-9 * c.omega * (1.0 + a.rhs), "{a:?}");
            }
        }
        let f = flat();
        let sec = Sector::s_wave();
        let a = action_identity_residual(label(0.0, 0.0), sec, &f, Portion::Combined, ContinuumOrigin::GroundState, TOL)
            .unwrap();
        assert_eq!((a.lhs, a.rhs), (0.0, 0.0));
        let a = action_identity_residual(label(0.6, 0.0), sec, &f, Portion::DiscreteOnly, ContinuumOrigin::GroundState, TOL)
            .unwrap();
        assert!(a.residual.abs() <= 1e-9 * a.rhs);
        for origin in [ContinuumOrigin::GroundState, ContinuumOrigin::Threshold] {
            for portion in [Portion::Combined, Portion::ContinuumOnly] {
                let a = action_identity_residual(label(0.6, 0.0), sec, &f, portion, origin, TOL).unwrap();
                assert!(a.predicted > 0.0);
                assert!((a.residual - a.predicted).abs() <= 1e-6 * a.predicted, "{origin:?} {portion:?} {a:?}");
            }
        }
    }

    #[test]
    fn swave_moments() {
        let w = swave_weight();
        assert!((w.moment(0, 1e-14).unwrap() - 1.0).abs() < 1e-14);
        assert!((w.moment(1, 1e-14).unwrap() - 0.75).abs() < 1e-14);
        let res = moment_residuals(&w, Sector::s_wave(), 30, 1e-14).unwrap();
        assert!(res.iter().all(|r| r.abs() <= 1e-10));
        let zero = moment_residuals(&WeightFunction::zero(), Sector::s_wave(), 5, 1e-14).unwrap();
        assert_eq!(zero[5], -gen_factorial_flat(5, Sector::s_wave()));
        let p = moment_residuals(&w, Sector::new(1), 5, 1e-14).unwrap();
        assert!(p[1..].iter().all(|r| r.abs() > 0.05));
    }

    #[test]
    fn cutoff_bounds_tail() {
        for s2 in [1e-3, 0.2, 0.8] {
            let (cut, tail) = continuum_cutoff(s2);
            assert!(tail < 1e-15, "s2={s2} tail={tail}");
            let q = continuum_integral(s2);
            assert!((q - nu(s2).unwrap()).abs() < 1e-12, "s2={s2}");
            assert!(cut >= 1.0);
        }
    }

    #[test]
    fn position_amplitude_examples() {
        let f = flat();
        let st = build_flat_state(label(0.0, 0.0), Sector::s_wave(), &f, TOL, Portion::Combined).unwrap();
        let psi = position_amplitude(&st, &[0.0, 1.0, 3.0], &f).unwrap();
        for (p, r) in psi.iter().zip([0.0, 1.0, 3.0]) {
            let u = BoundEigenfunction::new(SpectralIndex::new(0), Sector::s_wave(), &f).eval(r).unwrap();
            assert!((p.re - u).abs() < 1e-14 && p.im == 0.0);
        }
        let st = build_flat_state(label(0.3, 1.0), Sector::new(1), &f, TOL, Portion::Combined).unwrap();
        let psi = position_amplitude(&st, &[0.0], &f).unwrap();
        assert_eq!(psi[0].norm(), 0.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn curved_normalization_any_label(s in 0.0f64..2.5, g in -10.0f64..10.0, ell in 0u32..3) {
            let st = build_curved_state(label(s, g), Sector::new(ell), &curved(), TOL).unwrap();
            prop_assert!((st.weight() - 1.0).abs() < 1e-11);
        }

        #[test]
        fn flat_overlap_hermitian_and_bounded(
            s1 in 0.0f64..0.95, s2 in 0.0f64..0.95, g1 in -5.0f64..5.0, g2 in -5.0f64..5.0
        ) {
            let f = flat();
            let a = build_flat_state(label(s1, g1), Sector::s_wave(), &f, TOL, Portion::Combined).unwrap();
            let b = build_flat_state(label(s2, g2), Sector::s_wave(), &f, TOL, Portion::Combined).unwrap();
            let ab = overlap(&a, &b).unwrap();
            let ba = overlap(&b, &a).unwrap();
            prop_assert!((ab - ba.conj()).norm() < 1e-13);
            prop_assert!(ab.norm() <= 1.0 + 1e-8);
        }

        // ||psi(s, g) - psi(s', g')||^2 = 2 - 2 Re<.|.> scales quadratically
        // with the label step.
        #[test]
        fn label_continuity(s in 0.05f64..0.85, g in -3.0f64..3.0, ds in -1.0f64..1.0, dg in -1.0f64..1.0) {
            let f = flat();
            let sec = Sector::s_wave();
            let base = build_flat_state(label(s, g), sec, &f, TOL, Portion::Combined).unwrap();
            let dist = |h: f64| {
                let o = build_flat_state(label(s + h * ds, g + h * dg), sec, &f, TOL, Portion::Combined).unwrap();
                base.norm_sqr() + o.norm_sqr() - 2.0 * overlap(&base, &o).unwrap().re
            };
            let (d1, d2) = (dist(1e-2), dist(5e-3));
            prop_assert!(d1 < 1e-2);
            if d1 > 1e-9 {
                let ratio = d1 / d2;
                prop_assert!((3.0..5.0).contains(&ratio), "ratio {}", ratio);
            }
        }
    }
}
