//! Radial eigenfunctions: the curved-space `w_{n,l}(chi)` on the 3-sphere,
//! the hydrogen bound states `u_{n,l}(r)` and the regular Coulomb continuum
//! functions `v_{k,l}(r)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use rayon::prelude::*;

use crate::numerics::{composite_gauss_legendre, integrate_adaptive_relative};
use crate::spectrum::{ContinuumLabel, PhysicalConfig, Sector, SpectralIndex};
use crate::specfun::{hyp1f1, hyp2f1_diagnostic, hyp2f1_terminating, ln_gamma, ln_gamma_abs, ln_gamma_real, ln_sinh, HypDiagnostic};

const NORM_RTOL: f64 = 1e-13;
const SWITCH_EST: f64 = 1e-12;

/// Geodesic polar angle on the sphere, `r = R sin(chi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvedPoint {
    pub chi: f64,
}

impl CurvedPoint {
    pub fn new(chi: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&chi) {
            return Err(domain("CurvedPoint", format!("chi = {chi} outside [0, pi]")));
        }
        Ok(Self { chi })
    }

    /// Point on the northern half with `R sin(chi) = r`.
    pub fn from_radius(r: f64, radius: f64) -> Result<Self> {
        if !(r >= 0.0 && r <= radius) {
            return Err(domain("CurvedPoint", format!("r = {r} outside [0, R = {radius}]")));
        }
        Self::new((r / radius).asin())
    }

    pub fn r(&self, radius: f64) -> f64 {
        radius * self.chi.sin()
    }
}

/// Parameters of one curved level and the matching hydrogen constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveParams {
    /// `lambda_n = -R / (a N)`.
    pub lambda_n: f64,
    /// Normalization constant evaluated as written, phases included.
    pub c_curved: Complex64,
    /// `min(N, |lambda_n|)`.
    pub kappa_n: f64,
    /// Hydrogen normalization `C_n`.
    pub c_flat: f64,
}

pub fn wave_params(idx: SpectralIndex, sec: Sector, cfg: &PhysicalConfig) -> Result<WaveParams> {
    let radius = cfg.radius()?;
    let n = idx.n as f64;
    let l = sec.ell as f64;
    let big_n = idx.principal(sec) as f64;
    let lambda = -radius / (cfg.a * big_n);
    let kappa = big_n.min(lambda.abs());
    let i = Complex64::i();

    let ln_inner = i.ln()
        + (big_n * big_n + lambda * lambda).ln()
        + ln_gamma(Complex64::new(l + 1.0, lambda))?
        + ln_gamma_real(n + 2.0 * l + 2.0)
        - 3.0 * radius.ln()
        - kappa.ln()
        - ln_gamma(Complex64::new(-l, lambda))?
        - ln_gamma_real(n + 1.0);
    let phase = Complex64::from_polar(1.0, PI * (2.0 * n + l + 1.0) / 2.0);
    let front = ((l + 1.0) * std::f64::consts::LN_2 - ln_gamma_real(2.0 * l + 2.0)).exp();
    let c_curved = phase * front * (0.5 * ln_inner).exp();

    Ok(WaveParams {
        lambda_n: lambda,
        c_curved,
        kappa_n: kappa,
        c_flat: hydrogen_constant(idx, sec, cfg),
    })
}

// C_n = sqrt((2/(aN))^3 (n+2l+1)! / (2N n!)) / (2l+1)!, with exact factorial
// ratios while they fit in f64.
fn hydrogen_constant(idx: SpectralIndex, sec: Sector, cfg: &PhysicalConfig) -> f64 {
    let n = idx.n as u64;
    let l = sec.ell as u64;
    let big_n = idx.principal(sec) as f64;
    let scale = (2.0 / (cfg.a * big_n)).powi(3) / (2.0 * big_n);
    if n + 2 * l < 170 {
        let ratio: f64 = (n + 1..=n + 2 * l + 1).map(|j| j as f64).product();
        let fact: f64 = (1..=2 * l + 1).map(|j| j as f64).product();
        (scale * ratio).sqrt() / fact
    } else {
        let ln = 0.5 * (scale.ln() + ln_gamma_real((n + 2 * l + 2) as f64) - ln_gamma_real((n + 1) as f64))
            - ln_gamma_real((2 * l + 2) as f64);
        ln.exp()
    }
}

/// Curved eigenfunction with its normalization cached.
///
/// The constant `c_curved` is used as written and the function is then
/// rescaled so that `int |w|^2 R^3 sin^2(chi) dchi = 1`; `norm_defect`
/// records how far the unscaled norm was from one.
#[derive(Debug, Clone)]
pub struct CurvedEigenfunction {
    pub idx: SpectralIndex,
    pub sec: Sector,
    pub radius: f64,
    pub params: WaveParams,
    connection: Complex64,
    renorm: f64,
    raw_norm: f64,
}

impl CurvedEigenfunction {
    pub fn new(idx: SpectralIndex, sec: Sector, cfg: &PhysicalConfig) -> Result<Self> {
        let params = wave_params(idx, sec, cfg)?;
        let l = sec.ell as f64;
        let c_minus_b = Complex64::new(l + 1.0, params.lambda_n);
        let connection = (0..idx.n).fold(Complex64::new(1.0, 0.0), |acc, i| {
            acc * (c_minus_b + i as f64) / (2.0 * l + 2.0 + i as f64)
        });
        let mut w = Self {
            idx,
            sec,
            radius: cfg.radius()?,
            params,
            connection,
            renorm: 1.0,
            raw_norm: 1.0,
        };
        let r3 = w.radius.powi(3);
        // integrate the real shape to avoid overflow from |C| at large n
        let shape_norm = integrate_adaptive_relative(
            |chi: f64| {
                let s = w.shape(chi).unwrap_or(f64::NAN);
                s * s * chi.sin().powi(2)
            },
            0.0,
            PI,
            NORM_RTOL,
        )?
        .value
            * r3;
        let c_abs = params.c_curved.norm();
        w.raw_norm = c_abs * c_abs * shape_norm;
        w.renorm = 1.0 / shape_norm.sqrt();
        Ok(w)
    }

    /// `w / C`, which is real: `sin^l e^{lambda chi} e^{-i n chi} 2F1(...)`.
    pub fn shape(&self, chi: f64) -> Result<f64> {
        Ok(self.shape_complex(chi)?.0.re)
    }

    // 2F1(-n, b; c; 1 - x) with x = e^{2 i chi}, either summed in powers of
    // 1 - x = -2i e^{i chi} sin(chi) or, after the 1 - z connection
    // formula, in powers of x itself:
    //   (c-b)_n/(c)_n 2F1(-n, b; b-c-n+1; x).
    // The first suits |lambda| >> n, the second n >> |lambda|; the other one
    // is tried when the estimated error of the first is too large.
    fn shape_complex(&self, chi: f64) -> Result<(Complex64, HypDiagnostic)> {
        let l = self.sec.ell as f64;
        let lambda = self.params.lambda_n;
        let n = self.idx.n as f64;
        let s = chi.sin();
        let b = Complex64::new(l + 1.0, -lambda);
        let direct = || {
            let z = Complex64::new(0.0, -2.0) * Complex64::from_polar(1.0, chi) * s;
            hyp2f1_diagnostic(Complex64::new(-n, 0.0), b, 2.0 * l + 2.0, z)
        };
        let connected = || {
            let x = Complex64::from_polar(1.0, 2.0 * chi);
            let (f, mut d) = hyp2f1_terminating(self.idx.n as usize, b, Complex64::new(-l - n, -lambda), x)?;
            d.est_rel_err += n * f64::EPSILON;
            Ok::<_, crate::Error>((self.connection * f, d))
        };
        let prefer_connected = n > lambda.abs();
        let first = if prefer_connected { connected() } else { direct() };
        let (f, diag) = match first {
            Ok((v, d)) if d.est_rel_err <= SWITCH_EST => (v, d),
            first => {
                let second = if prefer_connected { direct() } else { connected() };
                match (first, second) {
                    (Ok(a), Ok(b)) => {
                        if a.1.est_rel_err <= b.1.est_rel_err {
                            a
                        } else {
                            b
                        }
                    }
                    (Ok(a), Err(_)) | (Err(_), Ok(a)) => a,
                    (Err(e), Err(_)) => return Err(e),
                }
            }
        };
        let envelope = s.powi(self.sec.ell as i32) * (lambda * chi).exp();
        Ok((envelope * Complex64::from_polar(1.0, -n * chi) * f, diag))
    }

    /// Unnormalized value `C sin^l e^{-i chi (n + i lambda)} 2F1(...)`.
    pub fn eval_raw(&self, chi: f64) -> Result<Complex64> {
        CurvedPoint::new(chi)?;
        Ok(self.params.c_curved * self.shape_complex(chi)?.0)
    }

    /// Unit-norm value, keeping the phase of `C`.
    pub fn eval(&self, chi: f64) -> Result<Complex64> {
        CurvedPoint::new(chi)?;
        let phase = self.params.c_curved / self.params.c_curved.norm();
        Ok(phase * self.renorm * self.shape_complex(chi)?.0)
    }

    /// Unit-norm value with the constant phase of `C` removed; real and
    /// positive near `chi = 0`.
    pub fn eval_real(&self, chi: f64) -> Result<f64> {
        CurvedPoint::new(chi)?;
        Ok(self.renorm * self.shape(chi)?)
    }

    pub fn eval_with_diagnostic(&self, chi: f64) -> Result<(Complex64, HypDiagnostic)> {
        CurvedPoint::new(chi)?;
        let phase = self.params.c_curved / self.params.c_curved.norm();
        let (v, d) = self.shape_complex(chi)?;
        Ok((phase * self.renorm * v, d))
    }

    /// `|int |w_raw|^2 R^3 sin^2 - 1|` before renormalization.
    pub fn norm_defect(&self) -> f64 {
        (self.raw_norm - 1.0).abs()
    }

    pub fn raw_norm(&self) -> f64 {
        self.raw_norm
    }
}

/// Normalized curved eigenfunction at one point.
pub fn radial_curved(idx: SpectralIndex, sec: Sector, cfg: &PhysicalConfig, chi: f64) -> Result<Complex64> {
    CurvedPoint::new(chi)?;
    CurvedEigenfunction::new(idx, sec, cfg)?.eval(chi)
}

/// Hydrogen bound state `u_{n,l}` with unit norm under `r^2 dr`.
#[derive(Debug, Clone, Copy)]
pub struct BoundEigenfunction {
    pub idx: SpectralIndex,
    pub sec: Sector,
    pub c_flat: f64,
    scale: f64,
}

impl BoundEigenfunction {
    pub fn new(idx: SpectralIndex, sec: Sector, cfg: &PhysicalConfig) -> Self {
        Self {
            idx,
            sec,
            c_flat: hydrogen_constant(idx, sec, cfg),
            scale: 2.0 / (cfg.a * idx.principal(sec) as f64),
        }
    }

    pub fn eval(&self, r: f64) -> Result<f64> {
        if !(r >= 0.0) {
            return Err(domain("radial_flat_bound", format!("r = {r} must be >= 0")));
        }
        let x = self.scale * r;
        let f = hyp1f1(
            Complex64::new(-(self.idx.n as f64), 0.0),
            2.0 * self.sec.ell as f64 + 2.0,
            Complex64::new(x, 0.0),
        )?;
        Ok(self.c_flat * x.powi(self.sec.ell as i32) * (-0.5 * x).exp() * f.re)
    }
}

pub fn radial_flat_bound(idx: SpectralIndex, sec: Sector, cfg: &PhysicalConfig, r: f64) -> Result<f64> {
    BoundEigenfunction::new(idx, sec, cfg).eval(r)
}

/// Regular Coulomb continuum function.
///
/// Evaluated as `P (2kr)^l e^{-ikr} 1F1(l+1+i/(ak); 2l+2; 2ikr)`, which is
/// real; `P` is the printed prefactor with the gamma modulus and `sinh`
/// combined in logarithms. Its large-`r` form is `A sin(theta(r)) / r` with
/// `A = sqrt(a/pi) k sqrt(1 - exp(-2 pi/(ak)))`.
#[derive(Debug, Clone, Copy)]
pub struct ContinuumEigenfunction {
    pub k: f64,
    pub sec: Sector,
    pub a: f64,
    pub omega: f64,
    prefactor: f64,
}

impl ContinuumEigenfunction {
    pub fn new(lbl: ContinuumLabel, sec: Sector, cfg: &PhysicalConfig) -> Result<Self> {
        let k = lbl.k;
        if !(k > 0.0 && k.is_finite()) {
            return Err(domain("radial_flat_continuum", format!("k = {k} must be > 0")));
        }
        let a = cfg.a;
        let b = 1.0 / (a * k);
        let ln_p = 0.5 * (2.0 * a / PI).ln() + 2.0 * k.ln() - ln_gamma_real(2.0 * sec.ell as f64 + 2.0)
            + ln_gamma_abs(sec.ell, b)
            + 0.5 * ln_sinh(PI * b);
        Ok(Self {
            k,
            sec,
            a,
            omega: cfg.omega,
            prefactor: ln_p.exp(),
        })
    }

    /// Value at `r = 0` for `l = 0`; zero otherwise.
    pub fn origin_value(&self) -> f64 {
        if self.sec.ell == 0 {
            self.prefactor
        } else {
            0.0
        }
    }

    pub fn eval(&self, r: f64) -> Result<Complex64> {
        if !(r >= 0.0) {
            return Err(domain("radial_flat_continuum", format!("r = {r} must be >= 0")));
        }
        let l = self.sec.ell as f64;
        let kr = self.k * r;
        let f = hyp1f1(
            Complex64::new(l + 1.0, 1.0 / (self.a * self.k)),
            2.0 * l + 2.0,
            Complex64::new(0.0, 2.0 * kr),
        )?;
        Ok(self.prefactor * (2.0 * kr).powi(self.sec.ell as i32) * Complex64::from_polar(1.0, -kr) * f)
    }

    /// Large-`r` amplitude of `r v(r)`.
    pub fn asymptotic_amplitude(&self) -> f64 {
        let x = 2.0 * PI / (self.a * self.k);
        (self.a / PI).sqrt() * self.k * (-(-x).exp_m1()).sqrt()
    }

    /// Amplitude of `r phi(r)` for a function normalized to `delta(eps - eps')`
    /// with `eps = k^2/(2 omega)`.
    pub fn energy_normalized_amplitude(&self) -> f64 {
        (2.0 / PI).sqrt() * (self.omega / self.k).sqrt()
    }

    /// Real part of `v` rescaled to `delta(eps - eps')` normalization.
    pub fn eval_energy_normalized(&self, r: f64) -> Result<f64> {
        Ok(self.eval(r)?.re * self.energy_normalized_amplitude() / self.asymptotic_amplitude())
    }
}

pub fn radial_flat_continuum(
    lbl: ContinuumLabel,
    sec: Sector,
    cfg: &PhysicalConfig,
    r: f64,
) -> Result<Complex64> {
    ContinuumEigenfunction::new(lbl, sec, cfg)?.eval(r)
}

/// Number of sign changes along a grid, skipping exact zeros.
/// Smoothed-delta test of the energy normalization.
///
/// Builds the packet `psi(r) = int g(eps) phi_eps(r) d eps` from the
/// energy-normalized continuum functions with a Gaussian profile `g` of
/// width `sigma` about `eps0`, and returns `int_0^r_max |psi|^2 r^2 dr / int g^2`.
/// The ratio is 1 for functions normalized to `delta(eps - eps')`. The
/// profile is sampled on 60 Gauss-Legendre nodes, so `r_max` should stay
/// below the first recurrence of the packet (about `60 a` at `sigma = 0.5`).
pub fn smoothed_delta_ratio(sec: Sector, cfg: &PhysicalConfig, eps0: f64, sigma: f64, r_max: f64) -> Result<f64> {
    let (lo, hi) = (eps0 - 6.0 * sigma, eps0 + 6.0 * sigma);
    if !(sigma > 0.0 && lo >= 0.0 && r_max > 0.0) {
        return Err(domain("smoothed_delta_ratio", format!("need sigma > 0, eps0 >= 6 sigma, r_max > 0; got ({eps0}, {sigma}, {r_max})")));
    }
    let g = |e: f64| (-(e - eps0) * (e - eps0) / (4.0 * sigma * sigma)).exp();
    let nodes = composite_gauss_legendre(lo, hi, 6, 10);
    let packet = nodes
        .iter()
        .map(|&(e, w)| Ok((ContinuumEigenfunction::new(ContinuumLabel::from_eps(e, cfg)?, sec, cfg)?, w * g(e))))
        .collect::<Result<Vec<_>>>()?;
    let g2: f64 = nodes.iter().map(|&(e, w)| w * g(e) * g(e)).sum();
    let h = 0.1 * cfg.a;
    let steps = (r_max / h).ceil() as usize;
    let h = r_max / steps as f64;
    let density = (0..=steps)
        .into_par_iter()
        .map(|j| {
            let r = j as f64 * h;
            let mut psi = 0.0;
            for (f, w) in &packet {
                psi += w * f.eval_energy_normalized(r)?;
            }
            let edge = if j == 0 || j == steps { 0.5 } else { 1.0 };
            Ok(edge * psi * psi * r * r)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(h * density.iter().sum::<f64>() / g2)
}

pub fn count_sign_changes(values: &[f64]) -> usize {
    let mut count = 0;
    let mut prev = 0.0f64;
    for &v in values {
        if v == 0.0 {
            continue;
        }
        if prev != 0.0 && (v > 0.0) != (prev > 0.0) {
            count += 1;
        }
        prev = v;
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{integrate_adaptive, integrate_halfline_scaled};

    fn cfg(r: f64) -> PhysicalConfig {
        PhysicalConfig::curved(0.5, r).unwrap()
    }

    #[test]
    fn params_relations() {
        let c = cfg(10.0);
        let p = wave_params(SpectralIndex::new(2), Sector::new(1), &c).unwrap();
        assert!((p.lambda_n * c.a * 4.0 + 10.0).abs() < 1e-12);
        assert_eq!(p.kappa_n, 2.5);
        assert!(wave_params(SpectralIndex::new(0), Sector::s_wave(), &PhysicalConfig::default()).is_err());
    }

    #[test]
    fn curved_origin_and_ground_envelope() {
        let c = cfg(10.0);
        let w = CurvedEigenfunction::new(SpectralIndex::new(0), Sector::new(1), &c).unwrap();
        assert_eq!(w.eval(0.0).unwrap().norm(), 0.0);
        let mut prev = f64::INFINITY;
        for j in 1..200 {
            let chi = PI * j as f64 / 200.0;
            let v = w.eval(chi).unwrap().norm() / chi.sin();
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn curved_node_counts() {
        let c = cfg(10.0);
        for n in 0..5 {
            let w = CurvedEigenfunction::new(SpectralIndex::new(n), Sector::s_wave(), &c).unwrap();
            let grid: Vec<f64> = (1..10_000).map(|j| w.eval_real(PI * j as f64 / 10_000.0).unwrap()).collect();
            assert_eq!(count_sign_changes(&grid), n as usize, "n = {n}");
        }
    }

    #[test]
    fn curved_function_is_real_up_to_constant_phase() {
        let c = cfg(7.0);
        let w = CurvedEigenfunction::new(SpectralIndex::new(3), Sector::new(2), &c).unwrap();
        for chi in [0.1, 0.7, 1.5, 2.9] {
            let (v, _) = w.shape_complex(chi).unwrap();
            assert!(v.im.abs() < 1e-12 * (1.0 + v.re.abs()), "{v}");
        }
    }

    #[test]
    fn curved_orthonormality() {
        let c = cfg(6.0);
        for ell in 0..=2 {
            let ws: Vec<_> = (0..=8)
                .map(|n| CurvedEigenfunction::new(SpectralIndex::new(n), Sector::new(ell), &c).unwrap())
                .collect();
            for i in 0..ws.len() {
                for j in i..ws.len() {
                    let o = integrate_adaptive(
                        |chi: f64| {
                            ws[i].eval(chi).unwrap().conj() * ws[j].eval(chi).unwrap() * 216.0 * chi.sin().powi(2)
                        },
                        0.0,
                        PI,
                        1e-12,
                    )
                    .unwrap()
                    .value;
                    let expected = if i == j { 1.0 } else { 0.0 };
                    assert!((o - expected).norm() < 1e-7, "l={ell} {i},{j}: {o}");
                }
            }
        }
    }

    // radial equation on the sphere, checked with central differences
    #[test]
    fn curved_eigenfunction_solves_radial_equation() {
        let c = cfg(5.0);
        let rr = 5.0;
        for (n, ell) in [(0, 0), (2, 0), (1, 1), (3, 2)] {
            let idx = SpectralIndex::new(n);
            let sec = Sector::new(ell);
            let w = CurvedEigenfunction::new(idx, sec, &c).unwrap();
            let e = crate::spectrum::energy_curved(idx, sec, &c).unwrap();
            let l = ell as f64;
            let h = 1e-3;
            for chi in [0.4, 1.1, 2.0] {
                let f = |x: f64| w.eval_real(x).unwrap();
                let f0 = f(chi);
                let d1 = (f(chi + h) - f(chi - h)) / (2.0 * h);
                let d2 = (f(chi + h) - 2.0 * f0 + f(chi - h)) / (h * h);
                let cot = chi.cos() / chi.sin();
                let hw = -(d2 + 2.0 * cot * d1 - l * (l + 1.0) / chi.sin().powi(2) * f0) / (2.0 * rr * rr)
                    - (2.0 * c.omega).sqrt() * cot / rr * f0;
                let scale = f0.abs() + d2.abs() / (rr * rr);
                assert!((hw - e * f0).abs() < 1e-5 * scale, "n={n} l={ell} chi={chi}");
            }
        }
    }

    #[test]
    fn flat_ground_state_and_nodes() {
        let c = PhysicalConfig::default();
        let u0 = BoundEigenfunction::new(SpectralIndex::new(0), Sector::s_wave(), &c);
        assert!((u0.eval(0.0).unwrap() - 2.0 * c.a.powf(-1.5)).abs() < 1e-14);
        assert!((u0.eval(1.3).unwrap() - 2.0 * c.a.powf(-1.5) * (-1.3 / c.a).exp()).abs() < 1e-14);
        for n in 0..6 {
            let u = BoundEigenfunction::new(SpectralIndex::new(n), Sector::new(1), &c);
            let grid: Vec<f64> = (1..10_000).map(|j| u.eval(j as f64 * 0.01).unwrap()).collect();
            assert_eq!(count_sign_changes(&grid), n as usize);
        }
    }

    #[test]
    fn flat_bound_norm_and_orthogonality() {
        let c = PhysicalConfig::flat(0.8).unwrap();
        for ell in 0..3 {
            for n in 0..5 {
                let u = BoundEigenfunction::new(SpectralIndex::new(n), Sector::new(ell), &c);
                let norm =
                    integrate_halfline_scaled(|r: f64| u.eval(r).unwrap().powi(2) * r * r, 10.0, 1e-13).unwrap();
                assert!((norm.value - 1.0).abs() < 1e-9, "n={n} l={ell}: {}", norm.value);
            }
        }
        let u0 = BoundEigenfunction::new(SpectralIndex::new(0), Sector::s_wave(), &c);
        let u1 = BoundEigenfunction::new(SpectralIndex::new(1), Sector::s_wave(), &c);
        let o = integrate_halfline_scaled(|r: f64| u0.eval(r).unwrap() * u1.eval(r).unwrap() * r * r, 5.0, 1e-13)
            .unwrap();
        assert!(o.value.abs() < 1e-9);
    }

    #[test]
    fn continuum_origin_and_reality() {
        let c = PhysicalConfig::default();
        let lbl = ContinuumLabel::from_k(1.0, &c).unwrap();
        let v = ContinuumEigenfunction::new(lbl, Sector::s_wave(), &c).unwrap();
        let b = 1.0 / c.a;
        let expected = (2.0 * c.a / PI).sqrt() * crate::specfun::gamma_abs(0, b) * (PI * b).sinh().sqrt();
        assert!((v.eval(0.0).unwrap().re - expected).abs() < 1e-13 * expected);
        for r in [0.5, 1.0, 5.0] {
            assert!(v.eval(r).unwrap().im.abs() < 1e-8);
        }
        let v1 = ContinuumEigenfunction::new(lbl, Sector::new(1), &c).unwrap();
        assert_eq!(v1.eval(0.0).unwrap().norm(), 0.0);
        assert!(ContinuumEigenfunction::new(ContinuumLabel { k: 0.0, eps: 0.0 }, Sector::s_wave(), &c).is_err());
    }

    // the asymptotic amplitude matches max |r v| sqrt(p), with p the local
    // WKB momentum in units of k
    #[test]
    fn continuum_asymptotic_amplitude() {
        let c = PhysicalConfig::default();
        for (k, ell) in [(0.5, 0), (1.0, 1), (2.0, 0)] {
            let v = ContinuumEigenfunction::new(ContinuumLabel::from_k(k, &c).unwrap(), Sector::new(ell), &c).unwrap();
            let r0 = 400.0 / k;
            let peak = (0..4000)
                .map(|j| {
                    let r = r0 + j as f64 * 0.002 * PI / k;
                    let rho = k * r;
                    let p = (1.0 + 2.0 / (c.a * k * rho) - (ell * (ell + 1)) as f64 / (rho * rho)).sqrt();
                    (r * v.eval(r).unwrap().re).abs() * p.sqrt()
                })
                .fold(0.0, f64::max);
            let a = v.asymptotic_amplitude();
            assert!((peak - a).abs() < 1e-4 * a, "k={k}: {peak} vs {a}");
        }
    }
    #[test]
    fn both_hypergeometric_routes_agree() {
        for (rad, n, ell) in [(10.0, 4, 0), (3.0, 9, 1), (40.0, 2, 2)] {
            let c = cfg(rad);
            let w = CurvedEigenfunction::new(SpectralIndex::new(n), Sector::new(ell), &c).unwrap();
            let l = ell as f64;
            let b = Complex64::new(l + 1.0, -w.params.lambda_n);
            for chi in [0.05, 0.8, 1.6, 3.0] {
                let z = Complex64::new(0.0, -2.0) * Complex64::from_polar(1.0, chi) * chi.sin();
                let (d, _) = hyp2f1_diagnostic(Complex64::new(-(n as f64), 0.0), b, 2.0 * l + 2.0, z).unwrap();
                let x = Complex64::from_polar(1.0, 2.0 * chi);
                let (f, _) =
                    hyp2f1_terminating(n as usize, b, Complex64::new(-l - n as f64, -w.params.lambda_n), x).unwrap();
                let k = w.connection * f;
                assert!((d - k).norm() < 1e-11 * (1.0 + d.norm()), "R={rad} n={n} chi={chi}: {d} vs {k}");
            }
        }
    }

    #[test]
    fn smoothed_delta_rejects_bad_profiles() {
        let cfg = PhysicalConfig::flat(0.5).unwrap();
        let sec = Sector::s_wave();
        assert!(smoothed_delta_ratio(sec, &cfg, 1.0, 0.5, 10.0).is_err());
        assert!(smoothed_delta_ratio(sec, &cfg, 3.0, 0.0, 10.0).is_err());
        assert!(smoothed_delta_ratio(sec, &cfg, 3.0, 0.5, 0.0).is_err());
    }
}
