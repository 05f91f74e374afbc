//! Curved and flat radial Coulomb spectra, generalized numbers `[n]`,
//! their factorials, the critical index and the continuum weight.
//!
//! Units: `hbar = 1`, unit mass. `omega = Z^2 e^4 / 2` carries the charge
//! and `a = (2 omega)^{-1/2}` is the Bohr radius.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::compensated::{two_sum, DoubleDouble};
use crate::specfun::{ln_gamma_real, pochhammer};

/// Physical constants for one computation. `radius = None` means flat space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConfig {
    pub omega: f64,
    pub charge: f64,
    pub a: f64,
    pub radius: Option<f64>,
}

impl Default for PhysicalConfig {
    fn default() -> Self {
        Self::flat(0.5).expect("default omega is valid")
    }
}

impl PhysicalConfig {
    /// Flat space with energy scale `omega`; the charge is reported as
    /// `sqrt(2 omega)` (e = 1).
    pub fn flat(omega: f64) -> Result<Self> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::Config(format!("omega must be positive, got {omega}")));
        }
        Ok(Self {
            omega,
            charge: (2.0 * omega).sqrt(),
            a: 1.0 / (2.0 * omega).sqrt(),
            radius: None,
        })
    }

    pub fn curved(omega: f64, radius: f64) -> Result<Self> {
        Self::flat(omega)?.with_radius(radius)
    }

    /// `omega = Z^2 / 2` with `e = 1`.
    pub fn from_charge(charge: f64) -> Result<Self> {
        if !(charge > 0.0 && charge.is_finite()) {
            return Err(Error::Config(format!("charge must be positive, got {charge}")));
        }
        let mut cfg = Self::flat(0.5 * charge * charge)?;
        cfg.charge = charge;
        Ok(cfg)
    }

    pub fn with_radius(mut self, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Config(format!("curvature radius must be positive, got {radius}")));
        }
        self.radius = Some(radius);
        Ok(self)
    }

    pub fn flat_limit(mut self) -> Self {
        self.radius = None;
        self
    }

    pub fn radius(&self) -> Result<f64> {
        self.radius.ok_or(Error::MissingCurvature)
    }

    /// Curvature `K = 1 / R^2`.
    pub fn curvature(&self) -> Option<f64> {
        self.radius.map(|r| 1.0 / (r * r))
    }

    /// `2 omega R^2`, the dimensionless size of the sphere.
    pub fn sphere_parameter(&self) -> Result<f64> {
        let r = self.radius()?;
        Ok(2.0 * self.omega * r * r)
    }
}

/// Fixed orbital angular momentum sector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Sector {
    pub ell: u32,
}

impl Sector {
    pub fn new(ell: u32) -> Self {
        Self { ell }
    }

    pub fn s_wave() -> Self {
        Self { ell: 0 }
    }

    pub(crate) fn l(&self) -> f64 {
        self.ell as f64
    }

    /// Radius of convergence in `s^2` of the flat discrete series, `1/(l+1)^2`.
    pub fn flat_radius_s2(&self) -> f64 {
        let l1 = self.l() + 1.0;
        1.0 / (l1 * l1)
    }
}

/// Radial quantum number `n`; the principal number is `N = n + l + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SpectralIndex {
    pub n: u32,
}

impl SpectralIndex {
    pub fn new(n: u32) -> Self {
        Self { n }
    }

    pub fn principal(&self, sec: Sector) -> u32 {
        self.n + sec.ell + 1
    }
}

/// Continuum label: wave number `k` and dimensionless energy `eps = k^2 / (2 omega)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuumLabel {
    pub k: f64,
    pub eps: f64,
}

impl ContinuumLabel {
    pub fn from_k(k: f64, cfg: &PhysicalConfig) -> Result<Self> {
        if !(k >= 0.0 && k.is_finite()) {
            return Err(crate::error::domain("ContinuumLabel", format!("k = {k} must be >= 0")));
        }
        Ok(Self {
            k,
            eps: k * k / (2.0 * cfg.omega),
        })
    }

    pub fn from_eps(eps: f64, cfg: &PhysicalConfig) -> Result<Self> {
        if !(eps >= 0.0 && eps.is_finite()) {
            return Err(crate::error::domain("ContinuumLabel", format!("eps = {eps} must be >= 0")));
        }
        Ok(Self {
            k: (2.0 * cfg.omega * eps).sqrt(),
            eps,
        })
    }
}

/// A generalized number together with its running factorial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenNumber {
    pub value: f64,
    pub factorial: f64,
}

/// `E_n = (n+l)(n+l+2) / (2R^2) - omega / (n+l+1)^2`.
pub fn energy_curved(idx: SpectralIndex, sec: Sector, cfg: &PhysicalConfig) -> Result<f64> {
    let (hi, lo) = energy_curved_parts(idx, sec, cfg)?;
    Ok(hi + lo)
}

// Curvature and Coulomb terms, kept apart so differences against the flat
// spectrum can be formed without cancellation.
fn energy_curved_parts(idx: SpectralIndex, sec: Sector, cfg: &PhysicalConfig) -> Result<(f64, f64)> {
    let r = cfg.radius()?;
    let nl = idx.n as f64 + sec.l();
    let big_n = nl + 1.0;
    let kinetic = nl * (nl + 2.0) / (2.0 * r * r);
    Ok((kinetic, -cfg.omega / (big_n * big_n)))
}

/// [`energy_curved`] as a double-double, exact up to the rounding of its two terms.
pub fn energy_curved_compensated(
    idx: SpectralIndex,
    sec: Sector,
    cfg: &PhysicalConfig,
) -> Result<DoubleDouble> {
    let (kinetic, coulomb) = energy_curved_parts(idx, sec, cfg)?;
    let (hi, lo) = two_sum(kinetic, coulomb);
    Ok(DoubleDouble::new(hi, lo))
}

/// Hydrogen bound levels `E_n = -omega / (n+l+1)^2`.
pub fn energy_flat_bound(idx: SpectralIndex, sec: Sector, cfg: &PhysicalConfig) -> f64 {
    let big_n = idx.n as f64 + sec.l() + 1.0;
    -cfg.omega / (big_n * big_n)
}

/// Continuum energy `k^2 / 2`.
pub fn energy_flat_continuum(lbl: ContinuumLabel) -> f64 {
    0.5 * lbl.k * lbl.k
}

/// Real root of `(n+l)(n+l+2)(n+l+1)^2 = 2 omega R^2` with `n + l + 1 > 0`.
///
/// With `y = (n+l+1)^2` the equation is `y^2 - y - 2 omega R^2 = 0`.
pub fn critical_index(sec: Sector, cfg: &PhysicalConfig) -> Result<f64> {
    let p = cfg.sphere_parameter()?;
    let y = 0.5 * (1.0 + (1.0 + 4.0 * p).sqrt());
    Ok(y.sqrt() - sec.l() - 1.0)
}

/// Integer split point between the negative- and non-negative-energy parts
/// of the curved spectrum: `ceil(n_c)`, clamped at zero.
pub fn continuum_threshold(sec: Sector, cfg: &PhysicalConfig) -> Result<u32> {
    let nc = critical_index(sec, cfg)?;
    Ok(nc.ceil().max(0.0) as u32)
}

/// `[n]_R = (E_n - E_0) / omega` on the sphere.
pub fn gen_number_curved_value(n: u32, sec: Sector, cfg: &PhysicalConfig) -> Result<f64> {
    if n == 0 {
        cfg.radius()?;
        return Ok(0.0);
    }
    let en = energy_curved(SpectralIndex::new(n), sec, cfg)?;
    let e0 = energy_curved(SpectralIndex::new(0), sec, cfg)?;
    Ok((en - e0) / cfg.omega)
}

/// The product factor `m(m+2l+2) / ((m+l+1)^2 (l+1)^2) * (1 + (m+l+1)^2 (l+1)^2 / (2 omega R^2))`.
pub fn gen_number_curved_product(m: u32, sec: Sector, cfg: &PhysicalConfig) -> Result<f64> {
    let p = cfg.sphere_parameter()?;
    let mf = m as f64;
    let l1 = sec.l() + 1.0;
    let big = mf + l1;
    let w = big * big * l1 * l1;
    Ok(mf * (mf + 2.0 * l1) / w * (1.0 + w / p))
}

pub fn gen_number_curved(n: u32, sec: Sector, cfg: &PhysicalConfig) -> Result<GenNumber> {
    Ok(GenNumber {
        value: gen_number_curved_value(n, sec, cfg)?,
        factorial: gen_factorial_curved(n, sec, cfg)?,
    })
}

/// `[n]_R! = [1]_R [2]_R ... [n]_R`, `[0]_R! = 1`.
pub fn gen_factorial_curved(n: u32, sec: Sector, cfg: &PhysicalConfig) -> Result<f64> {
    let mut f = 1.0;
    for m in 1..=n {
        f *= gen_number_curved_value(m, sec, cfg)?;
    }
    if n == 0 {
        cfg.radius()?;
    }
    Ok(f)
}

/// Relative mismatch between the energy-difference and product-factor routes for `[n]_R`.
pub fn curved_route_mismatch(n: u32, sec: Sector, cfg: &PhysicalConfig) -> Result<f64> {
    let a = gen_number_curved_value(n, sec, cfg)?;
    let b = gen_number_curved_product(n, sec, cfg)?;
    if a == b {
        return Ok(0.0);
    }
    Ok((a - b).abs() / a.abs().max(b.abs()))
}

/// Flat-space `[n] = n(n+2l+2) / ((l+1)^2 (n+l+1)^2)`.
pub fn gen_number_flat_value(n: u32, sec: Sector) -> f64 {
    let nf = n as f64;
    let l1 = sec.l() + 1.0;
    let big = nf + l1;
    nf * (nf + 2.0 * l1) / (l1 * l1 * big * big)
}

pub fn gen_number_flat(n: u32, sec: Sector) -> GenNumber {
    GenNumber {
        value: gen_number_flat_value(n, sec),
        factorial: gen_factorial_flat(n, sec),
    }
}

/// `[n]!` as the running product of `[m]`.
pub fn gen_factorial_flat(n: u32, sec: Sector) -> f64 {
    (1..=n).fold(1.0, |acc, m| acc * gen_number_flat_value(m, sec))
}

/// `[n]! = n! / (l+1)^{2n} * (2l+3)_n / ((l+2)_n)^2` via Pochhammer symbols.
pub fn gen_factorial_flat_closed(n: u32, sec: Sector) -> f64 {
    let l = sec.l();
    let nn = n as usize;
    let num = pochhammer(1.0, nn) * pochhammer(2.0 * l + 3.0, nn);
    let den = (l + 1.0).powi(2 * n as i32) * pochhammer(l + 2.0, nn).powi(2);
    if num.is_finite() && den.is_finite() && den > 0.0 {
        return num / den;
    }
    let ln_poch = |z: f64| ln_gamma_real(z + n as f64) - ln_gamma_real(z);
    (ln_gamma_real(n as f64 + 1.0) + ln_poch(2.0 * l + 3.0)
        - 2.0 * n as f64 * (l + 1.0).ln()
        - 2.0 * ln_poch(l + 2.0))
    .exp()
}

/// Continuum weight `rho(eps) = Gamma(eps + 1)`.
pub fn continuum_weight(eps: f64) -> Result<f64> {
    if !(eps >= 0.0) {
        return Err(crate::error::domain("continuum_weight", format!("eps = {eps} must be >= 0")));
    }
    Ok(ln_gamma_real(eps + 1.0).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg10() -> PhysicalConfig {
        PhysicalConfig::curved(0.5, 10.0).unwrap()
    }

    #[test]
    fn config_invariants() {
        let c = cfg10();
        assert!((c.a * (2.0 * c.omega).sqrt() - 1.0).abs() < 1e-14);
        assert!((c.curvature().unwrap() * 100.0 - 1.0).abs() < 1e-15);
        assert!(PhysicalConfig::flat(0.0).is_err());
        assert!(PhysicalConfig::curved(0.5, -1.0).is_err());
        let z2 = PhysicalConfig::from_charge(2.0).unwrap();
        assert_eq!(z2.omega, 2.0);
        assert_eq!(SpectralIndex::new(2).principal(Sector::new(1)), 4);
    }

    #[test]
    fn curved_energies() {
        let c = cfg10();
        let s0 = Sector::new(0);
        assert_eq!(energy_curved(SpectralIndex::new(0), s0, &c).unwrap(), -0.5);
        assert!((energy_curved(SpectralIndex::new(1), s0, &c).unwrap() + 0.11).abs() < 1e-15);
        let e = energy_curved(SpectralIndex::new(2), Sector::new(1), &c).unwrap();
        assert!((e - 0.04375).abs() < 1e-15);
        assert_eq!(
            energy_curved(SpectralIndex::new(0), s0, &c.flat_limit()),
            Err(Error::MissingCurvature)
        );
    }

    #[test]
    fn flat_energies() {
        let c = PhysicalConfig::flat(0.5).unwrap();
        assert_eq!(energy_flat_bound(SpectralIndex::new(0), Sector::new(0), &c), -0.5);
        assert_eq!(energy_flat_bound(SpectralIndex::new(1), Sector::new(0), &c), -0.125);
        assert_eq!(energy_flat_bound(SpectralIndex::new(0), Sector::new(1), &c), -0.125);
        for (k, e) in [(0.0, 0.0), (1.0, 0.5), (2.0, 2.0)] {
            let lbl = ContinuumLabel::from_k(k, &c).unwrap();
            assert_eq!(energy_flat_continuum(lbl), e);
        }
        assert!(ContinuumLabel::from_k(-1.0, &c).is_err());
    }

    #[test]
    fn critical_index_root_and_bracket() {
        let c = cfg10();
        let nc = critical_index(Sector::new(0), &c).unwrap();
        // 2 omega R^2 = 100
        let expected = ((1.0 + 401f64.sqrt()) / 2.0).sqrt() - 1.0;
        assert!((nc - expected).abs() < 1e-14);
        assert!((nc - 2.2423).abs() < 1e-4);
        let residual = nc * (nc + 2.0) * (nc + 1.0).powi(2) - 100.0;
        assert!(residual.abs() / 100.0 < 1e-9);
        let nc2 = critical_index(Sector::new(2), &c).unwrap();
        assert!((nc - 2.0 - nc2).abs() < 1e-14);

        for ell in 0..3 {
            let sec = Sector::new(ell);
            let nc = critical_index(sec, &c).unwrap();
            let up = energy_curved(SpectralIndex::new(nc.ceil() as u32), sec, &c).unwrap();
            assert!(up >= 0.0);
            if nc >= 0.0 {
                let down = energy_curved(SpectralIndex::new(nc.floor() as u32), sec, &c).unwrap();
                assert!(down <= 0.0);
            }
        }
    }

    #[test]
    fn curved_generalized_numbers() {
        let c = cfg10();
        let s0 = Sector::new(0);
        let g0 = gen_number_curved(0, s0, &c).unwrap();
        assert_eq!((g0.value, g0.factorial), (0.0, 1.0));
        let g1 = gen_number_curved(1, s0, &c).unwrap();
        assert!((g1.value - 0.78).abs() < 1e-14);
        assert!((gen_number_curved_product(1, s0, &c).unwrap() - 0.78).abs() < 1e-15);
        let far = PhysicalConfig::curved(0.5, 1e6).unwrap();
        assert!((gen_number_curved_value(1, s0, &far).unwrap() - 0.75).abs() < 1e-11);
        for ell in 0..4 {
            for n in 1..30 {
                assert!(curved_route_mismatch(n, Sector::new(ell), &c).unwrap() < 1e-12);
            }
        }
    }

    #[test]
    fn flat_factorials() {
        let s0 = Sector::new(0);
        assert_eq!(gen_factorial_flat(0, s0), 1.0);
        assert!((gen_factorial_flat(1, s0) - 0.75).abs() < 1e-16);
        let f = gen_factorial_flat(2, Sector::new(1));
        assert!((f - 5.0 / 192.0).abs() < 1e-17);
        assert!((gen_factorial_flat_closed(2, Sector::new(1)) - 5.0 / 192.0).abs() < 1e-17);
    }

    #[test]
    fn continuum_weight_values() {
        assert!((continuum_weight(0.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((continuum_weight(1.0).unwrap() - 1.0).abs() < 1e-14);
        let expected = 15.0 * std::f64::consts::PI.sqrt() / 8.0;
        assert!((continuum_weight(2.5).unwrap() - expected).abs() < 1e-13);
        assert!(continuum_weight(-0.5).is_err());
    }

    #[test]
    fn spectra_strictly_increasing() {
        let c = cfg10();
        for ell in 0..4 {
            let sec = Sector::new(ell);
            let mut prev_e = f64::NEG_INFINITY;
            let mut prev_g = -1.0;
            for n in 0..60 {
                let e = energy_curved(SpectralIndex::new(n), sec, &c).unwrap();
                let g = gen_number_curved_value(n, sec, &c).unwrap();
                assert!(e > prev_e && g > prev_g);
                prev_e = e;
                prev_g = g;
            }
        }
    }

    #[test]
    fn flat_number_approaches_radius() {
        for ell in 0..4 {
            let sec = Sector::new(ell);
            for n in 50..200 {
                let d = (gen_number_flat_value(n, sec) - sec.flat_radius_s2()).abs();
                assert!(d <= 3.0 / n as f64);
            }
        }
    }
}
