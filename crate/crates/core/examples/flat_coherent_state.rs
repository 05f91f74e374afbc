//! A flat-space coherent state with its continuum portion: the two routes to
//! the normalization, the split of weight between bound and scattering
//! states, the action identity, and the radial amplitude in position space.
//!
//! cargo run --release --example flat_coherent_state

use coulomb_coherent::coherent::{
    action_identity_residual, build_flat_state, norm_flat_routes, position_amplitude, swave_discrete_closed,
    swave_printed_bracket, CoherentLabel, ContinuumOrigin, Portion,
};
use coulomb_coherent::spectrum::{PhysicalConfig, Sector};

fn main() -> coulomb_coherent::Result<()> {
    let cfg = PhysicalConfig::flat(0.5)?;
    let sec = Sector::s_wave();
    let s2 = 0.5;

    let routes = norm_flat_routes(s2, sec, 1e-14)?;
    println!("s^2 = {s2}: {routes:#?}");
    println!("s-wave discrete sum closed form {:.10}", swave_discrete_closed(s2)?);
    println!("printed bracket {:.10} (= s^2 times the sum)", swave_printed_bracket(s2)?);

    let lbl = CoherentLabel::new(s2.sqrt(), 0.0)?;
    let st = build_flat_state(lbl, sec, &cfg, 1e-12, Portion::Combined)?;
    println!(
        "\ndiscrete weight {:.6}, continuum weight {:.6}, cutoff eps = {:.2}",
        st.discrete_fraction(),
        st.continuum_fraction(),
        st.continuum.eps_cut
    );

    for origin in [ContinuumOrigin::GroundState, ContinuumOrigin::Threshold] {
        let a = action_identity_residual(lbl, sec, &cfg, Portion::Combined, origin, 1e-12)?;
        println!("{origin:?}: residual {:.10}, predicted {:.10}", a.residual, a.predicted);
    }

    let r: Vec<f64> = (0..=10).map(|j| 2.0 * j as f64).collect();
    let psi = position_amplitude(&st, &r, &cfg)?;
    println!("\n   r     |psi(r)|^2 r^2");
    for (r, p) in r.iter().zip(&psi) {
        println!("{r:5.1}  {:12.5e}", p.norm_sqr() * r * r);
    }
    Ok(())
}
