//! Rewriting the family over a CR-Einstein base in a static radial normal
//! form: the substitution r = Λ̲ tanφ turns the angular profile into a
//! rational radial function F(r) satisfying a first-order ODE, and the
//! 1/r-coefficient of its numerator recovers the closed-form mass constant
//! familiar from the Taub-NUT family.
//!
//! Run with: cargo run --example radial_form

use nullcong::{taubnut_map, EinsteinParams};

fn main() -> nullcong::Result<()> {
    let params = EinsteinParams::new(2, 0.7, 2.0, 0.3)?;
    println!(
        "rank m = {}, Λ = {}, base constant Λ̲ = {}, c = {}",
        params.m, params.lambda, params.ulambda, params.c
    );
    println!("expected mass constant: -Λ̲^(2m-1) c = {}\n", -params.ulambda.powi(3) * params.c);

    println!("  r        phi        F(r)        ODE residual  angle round-trip  extracted mass");
    for k in 0..9 {
        let r = -8.0 + 2.0 * k as f64;
        let point = taubnut_map(&params, r)?;
        let mass = point
            .mass
            .map(|v| format!("{v:+.9}"))
            .unwrap_or_else(|| "     (skipped near r = 0)".into());
        println!(
            "  {r:+5.1}  {:+8.4}  {:+11.5}   {:10.2e}    {:10.2e}     {mass}",
            point.phi, point.f_value, point.f_ode_residual, point.round_trip,
        );
    }
    Ok(())
}
