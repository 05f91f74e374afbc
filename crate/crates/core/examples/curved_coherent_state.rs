//! A coherent state on the sphere: coefficients, normalization, the action
//! identity, and temporal stability under `H - E_0`.
//!
//! cargo run --example curved_coherent_state

use coulomb_coherent::coherent::{
    action_identity_residual, build_curved_state, overlap, temporal_stability_residual, CoherentLabel,
    CoherentVector, ContinuumOrigin, EnergyOffset, Portion,
};
use coulomb_coherent::spectrum::{PhysicalConfig, Sector};

fn main() -> coulomb_coherent::Result<()> {
    let cfg = PhysicalConfig::curved(0.5, 10.0)?;
    let sec = Sector::s_wave();
    let lbl = CoherentLabel::new(0.8, 0.3)?;
    let st = build_curved_state(lbl, sec, &cfg, 1e-13)?;
    println!("s = {}, gamma = {}, R = 10: {} levels, tail bound {:.1e}", lbl.s, lbl.gamma, st.n_max() + 1, st.tail_bound);
    println!(" n   [n]_R      |c_n|^2");
    for (n, (c, g)) in st.coeffs.iter().zip(&st.gen_numbers).enumerate().take(8) {
        println!("{n:2}  {g:8.5}  {:10.3e}", c.norm_sqr());
    }
    println!("<psi|psi> - 1 = {:.2e}", st.norm_sqr() - 1.0);

    let a = action_identity_residual(lbl, sec, &cfg, Portion::Combined, ContinuumOrigin::GroundState, 1e-13)?;
    println!("<H - E0> = {:.15}, omega s^2 = {:.15}", a.lhs, a.rhs);

    for t in [0.5, 5.0, 50.0] {
        let r = temporal_stability_residual(lbl, sec, &cfg, t, EnergyOffset::SubtractE0, Portion::Combined, 1e-13)?;
        println!("t = {t:4}: stability residual {r:.2e}");
    }

    let other = build_curved_state(CoherentLabel::new(0.6, 0.3)?, sec, &cfg, 1e-13)?;
    println!("|<psi(0.8)|psi(0.6)>| = {:.10}", overlap(&st, &other)?.norm());
    Ok(())
}
