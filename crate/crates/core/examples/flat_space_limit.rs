//! Curved quantities approaching their flat limits: energies and factorials
//! at second order in 1/R, bound and continuum wavefunctions, and coherent
//! states, which tend to the flat discrete portion.
//!
//! cargo run --release --example flat_space_limit

use coulomb_coherent::coherent::{build_curved_state, build_flat_state, CoherentLabel, Portion};
use coulomb_coherent::limits::{
    bound_energy_convergence, bound_wavefunction_convergence, continuum_energy_convergence,
    continuum_wavefunction_convergence, factorial_convergence, ConvergenceReport,
};
use coulomb_coherent::spectrum::{PhysicalConfig, Sector};

fn show(rep: &ConvergenceReport) {
    let res: Vec<String> = rep.residuals.iter().map(|r| format!("{r:.3e}")).collect();
    println!("{:20} R = {:?}: {}  order {:?}", rep.study, rep.r_values, res.join(", "), rep.fitted_order.map(|o| (o * 1000.0).round() / 1000.0));
}

fn main() -> coulomb_coherent::Result<()> {
    let flat = PhysicalConfig::flat(0.5)?;
    let sec = Sector::s_wave();
    show(&bound_energy_convergence(2, sec, &flat, &[10.0, 100.0, 1000.0])?);
    show(&continuum_energy_convergence(0.5, sec, &flat, &[1e2, 1e3, 1e4])?);
    show(&factorial_convergence(5, sec, &flat, &[10.0, 100.0, 1000.0])?);

    let grid: Vec<f64> = (0..=95).map(|j| 0.5 + 0.1 * j as f64).collect();
    show(&bound_wavefunction_convergence(1, sec, &flat, &grid, &[50.0, 100.0, 200.0])?);
    let rep = continuum_wavefunction_convergence(0.5, sec, &flat, &grid, &[50.0, 100.0, 200.0])?;
    show(&rep);
    println!("{:20} curved levels {:?}", "", rep.extras["index"]);

    let lbl = CoherentLabel::new(0.6, 0.0)?;
    let disc = build_flat_state(lbl, sec, &flat, 1e-12, Portion::DiscreteOnly)?;
    let comb = build_flat_state(lbl, sec, &flat, 1e-12, Portion::Combined)?;
    println!("\ncoherent state s = 0.6: c_0 flat discrete-only {:.8}, flat combined {:.8}", disc.discrete.coeffs[0].re, comb.discrete.coeffs[0].re);
    for radius in [10.0, 100.0, 1000.0] {
        let c = build_curved_state(lbl, sec, &flat.with_radius(radius)?, 1e-12)?;
        println!("R = {radius:6}: curved c_0 {:.8}", c.coeffs[0].re);
    }
    Ok(())
}
