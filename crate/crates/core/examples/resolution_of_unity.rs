//! The s-wave resolution of unity as a moment problem: the weight with mass
//! 1/2 at u = 1 and density 1/2 on [0, 1] reproduces `[n]!` for every n.
//!
//! cargo run --example resolution_of_unity

use coulomb_coherent::coherent::{moment_residuals, swave_weight, WeightFunction};
use coulomb_coherent::spectrum::{gen_factorial_flat, Sector};

fn main() -> coulomb_coherent::Result<()> {
    let sec = Sector::s_wave();
    let w = swave_weight();
    println!(" n   moment            [n]!              residual");
    for n in [0, 1, 2, 5, 10, 30] {
        println!("{n:2}  {:.15}  {:.15}  {:+.1e}", w.moment(n, 1e-14)?, gen_factorial_flat(n, sec), w.moment(n, 1e-14)? - gen_factorial_flat(n, sec));
    }

    let uniform = WeightFunction::new(|_| 1.0, Vec::new(), 1.0)?;
    let worst = moment_residuals(&uniform, sec, 10, 1e-14)?.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    println!("\nwithout the point mass the largest residual is {worst:.3}");
    Ok(())
}
