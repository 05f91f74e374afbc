//! Curved and flat energy levels, generalized numbers `[n]` and their
//! factorials, and the critical index where curved levels turn positive.
//!
//! cargo run --example spectrum_levels

use coulomb_coherent::spectrum::{
    critical_index, energy_curved, energy_flat_bound, gen_factorial_curved, gen_factorial_flat,
    gen_number_curved_value, gen_number_flat_value, PhysicalConfig, Sector, SpectralIndex,
};

fn main() -> coulomb_coherent::Result<()> {
    let flat = PhysicalConfig::flat(0.5)?;
    let curved = flat.with_radius(10.0)?;
    for ell in [0, 1] {
        let sec = Sector::new(ell);
        println!("l = {ell}, R = 10, critical index {:.4}", critical_index(sec, &curved)?);
        println!(" n     E_R          E_flat       [n]_R        [n]          [n]_R!       [n]!");
        for n in 0..8 {
            let idx = SpectralIndex::new(n);
            println!(
                "{n:2}  {:11.6}  {:11.6}  {:11.6}  {:11.6}  {:11.4e}  {:11.4e}",
                energy_curved(idx, sec, &curved)?,
                energy_flat_bound(idx, sec, &flat),
                gen_number_curved_value(n, sec, &curved)?,
                gen_number_flat_value(n, sec),
                gen_factorial_curved(n, sec, &curved)?,
                gen_factorial_flat(n, sec),
            );
        }
        println!();
    }
    Ok(())
}
