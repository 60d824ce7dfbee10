//! The distinguished member of the family whose cosmological constant is
//! proportional to the CR-Einstein constant of the base: the angular profile
//! becomes constant, the vertical vector field is conformal-Killing for the
//! rescaled metric, its Weyl and Cotton contractions degenerate, and a
//! scalar curvature criterion takes the exact value -1.
//!
//! Run with: cargo run --example fefferman_member

use nullcong::{
    assemble_einstein, fefferman_criteria, fs_lift, kerr_schild_check, killing_check, lambda0,
    EinsteinParams,
};

fn main() -> nullcong::Result<()> {
    let base = fs_lift(2)?;
    // (2m+2) Λ = (2m+1) Λ̲ with Λ̲ = 3 on the rank-2 lift  =>  Λ = 2.5
    let params = EinsteinParams::new(2, 2.5, 3.0, 0.0)?;
    assert!(params.is_fefferman());
    let model = assemble_einstein(&base, &params)?;

    println!("distinguished member on the Fubini-Study lift: Λ = {}", params.lambda);
    let l0 = lambda0(&params, 0.6)?;
    println!("constant angular profile: λ₀ = {} (derivative {:.2e})\n", l0.value(), l0.grad(0));

    for phi in [-0.7, 0.4] {
        let pt = [phi, 0.25, -0.3, 0.15, 0.45, -0.2];
        let crit = fefferman_criteria(&model, &pt)?;
        let kill = killing_check(&model, &pt)?;
        println!("  phi = {phi:+4.1}:");
        println!("    vertical Weyl contraction residual   {:9.2e}", crit.weyl_res);
        println!("    vertical Cotton contraction residual {:9.2e}", crit.cotton_res);
        println!(
            "    scalar criterion                     {:+12.9}   (must be -1)",
            crit.scalar_value
        );
        println!("    conformal-Killing residual           {:9.2e}", kill.conformal);
    }

    // Every member of the family differs from this one by a term quadratic
    // in the null direction (a Kerr-Schild-type relation); check it for a
    // generic member.
    let generic = assemble_einstein(&base, &EinsteinParams::new(2, 0.9, 3.0, 0.55)?)?;
    let pt = [0.3, 0.2, 0.1, -0.25, 0.35, 0.4];
    println!(
        "\nquadratic-difference relation for a generic member: residual {:9.2e}",
        kerr_schild_check(&generic, &pt)?
    );
    Ok(())
}
