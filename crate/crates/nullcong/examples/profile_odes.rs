//! The closed-form angular profile λ₀(φ) that drives the Einstein family:
//! its polynomial coefficients in cos²φ, the ODE systems it satisfies, its
//! value at the equator, and its limits at the conformal poles.
//!
//! Run with: cargo run --example profile_odes

use nullcong::{aj_coefficients, lambda0, lambda0_ode_residuals, EinsteinParams};

fn main() -> nullcong::Result<()> {
    let params = EinsteinParams::new(2, 1.0, 0.0, 0.0)?;
    println!(
        "rank m = {}, Λ = {}, base constant = {}, c = {}",
        params.m, params.lambda, params.ulambda, params.c
    );

    let aj = aj_coefficients(&params);
    println!("binomial-type profile coefficients a_j = {aj:?}");
    println!("value at the equator: λ₀(0) = {}", lambda0(&params, 0.0)?.value());
    let half = std::f64::consts::FRAC_PI_2;
    let limit = params.lambda / (2.0 * params.m as f64 + 1.0);
    println!(
        "pole limits: λ₀(±(π/2 - 1e-3)) = {:+.9}, {:+.9}   (Λ/(2m+1) = {limit:+.9})",
        lambda0(&params, half - 1e-3)?.value(),
        lambda0(&params, -half + 1e-3)?.value(),
    );
    println!();

    println!("  phi        λ₀          dλ₀/dφ      scalar ODE  mixed ODE   1st integral alternate   top coeff");
    for k in 0..9 {
        let phi = -1.4 + 0.35 * k as f64;
        let v = lambda0(&params, phi)?;
        let odes = lambda0_ode_residuals(&params, phi)?;
        println!(
            "  {phi:+5.2}   {:+10.6}  {:+10.6}  {:9.2e}  {:9.2e}  {:9.2e}   {:9.2e}  {:9.2e}",
            v.value(),
            v.grad(0),
            odes.scalar_ode,
            odes.mixed_ode,
            odes.first_order,
            odes.alternate_ode,
            odes.b_coefficient,
        );
    }
    Ok(())
}
