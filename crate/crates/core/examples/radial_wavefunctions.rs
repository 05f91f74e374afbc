//! Curved radial eigenfunctions next to their flat counterparts: a bound
//! level, and a high curved level standing in for a continuum function.
//!
//! cargo run --release --example radial_wavefunctions

use coulomb_coherent::limits::{continuum_index, minimax_scale};
use coulomb_coherent::spectrum::{ContinuumLabel, PhysicalConfig, Sector, SpectralIndex};
use coulomb_coherent::wavefunctions::{BoundEigenfunction, ContinuumEigenfunction, CurvedEigenfunction, CurvedPoint};

fn main() -> coulomb_coherent::Result<()> {
    let flat = PhysicalConfig::flat(0.5)?;
    let sec = Sector::new(1);
    let radius = 60.0;
    let curved = flat.with_radius(radius)?;

    let idx = SpectralIndex::new(1);
    let w = CurvedEigenfunction::new(idx, sec, &curved)?;
    let u = BoundEigenfunction::new(idx, sec, &flat);
    println!("bound n = 1, l = 1, R = {radius}; norm defect of the printed constant {:.3e}", w.norm_defect());
    println!("   r      curved        flat");
    for r in [0.5, 2.0, 5.0, 10.0, 20.0] {
        let chi = CurvedPoint::from_radius(r, radius)?.chi;
        println!("{r:5.1}  {:11.7}  {:11.7}", w.eval_real(chi)?, u.eval(r)?);
    }

    let k = 0.5;
    let n = continuum_index(k, sec, &curved)?;
    let wc = CurvedEigenfunction::new(SpectralIndex::new(n), sec, &curved)?;
    let v = ContinuumEigenfunction::new(ContinuumLabel::from_k(k, &flat)?, sec, &flat)?;
    let grid: Vec<f64> = (1..=40).map(|j| 0.25 * j as f64).collect();
    let a: Vec<f64> = grid.iter().map(|&r| wc.eval_real(CurvedPoint::from_radius(r, radius)?.chi)).collect::<Result<_, _>>()?;
    let b: Vec<f64> = grid.iter().map(|&r| v.eval(r).map(|z| z.re)).collect::<Result<_, _>>()?;
    let (c, res) = minimax_scale(&a, &b);
    let vmax = b.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    println!("\ncontinuum k = {k}: curved level n = {n}, scale {c:.5}, relative shape residual {:.4}", res / vmax);
    Ok(())
}
