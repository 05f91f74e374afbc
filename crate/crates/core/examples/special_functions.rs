//! Log-gamma, Pochhammer symbols, the nu-function and the two hypergeometric
//! functions, with the diagnostics each evaluation carries.
//!
//! cargo run --example special_functions

use coulomb_coherent::specfun::{gamma_abs, hyp1f1_diagnostic, hyp2f1_diagnostic, ln_gamma, nu, pochhammer};
use num_complex::Complex64;

fn main() -> coulomb_coherent::Result<()> {
    for z in [Complex64::new(0.5, 0.0), Complex64::new(1.0, 10.0), Complex64::new(-2.5, 3.0)] {
        println!("ln Gamma({z}) = {}", ln_gamma(z)?);
    }
    println!("|Gamma(3 + 2i)| = {}", gamma_abs(2, 2.0));
    println!("(0.5)_10 = {}", pochhammer(0.5, 10));

    println!("\n  x        nu(x)             e^x");
    for x in [0.1, 1.0, 5.0, 20.0] {
        println!("{x:5}  {:16.10e}  {:16.10e}", nu(x)?, f64::exp(x));
    }

    let (v, d) = hyp2f1_diagnostic(Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0), 2.0, Complex64::new(0.5, 0.0))?;
    println!("\n2F1(1, 1; 2; 0.5) = {} (exact {}), {:?}, {} terms", v.re, 2.0 * 2f64.ln(), d.method, d.terms);

    let (v, d) = hyp1f1_diagnostic(Complex64::new(-30.0, 0.0), 2.0, Complex64::new(40.0, 0.0))?;
    println!("1F1(-30; 2; 40) = {:e}, estimated relative error {:.1e}", v.re, d.est_rel_err);
    Ok(())
}
