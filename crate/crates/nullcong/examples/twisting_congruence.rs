//! The shear-free twisting null congruence at the heart of the family: its
//! optical invariants, the algebraic degeneracy of the Weyl tensor along it,
//! and the pointwise identity tying the repeated Weyl eigenvalue to the
//! twist.
//!
//! Run with: cargo run --example twisting_congruence

use nullcong::{
    assemble_einstein, congruence_invariants, fs_lift, weyl_degeneracy_report,
    weyl_twist_identity_residual, EinsteinParams,
};

fn main() -> nullcong::Result<()> {
    let base = fs_lift(2)?;
    let params = EinsteinParams::new(2, -0.6, 3.0, 0.7)?;
    let model = assemble_einstein(&base, &params)?;
    let metric = model.metric();

    println!("Einstein member over the Fubini-Study lift, Λ = {}", params.lambda);
    println!("optical scalars of the distinguished null congruence:\n");
    for phi in [-0.8, 0.0, 0.9] {
        let pt = [phi, 0.3, 0.2, -0.4, 0.1, 0.5];
        let inv = congruence_invariants(&metric, &pt)?;
        println!(
            "  phi = {phi:+4.1}  geodesic {:8.1e}   shear {:8.1e}   expansion {:+8.5} (this representative)   twist {:+.5}",
            inv.geodesy_residual(),
            inv.shear_max(),
            inv.expansion(),
            inv.twist_max(),
        );
        println!(
            "             twist endomorphism squares to -1: residual {:8.1e}",
            inv.twist_structure_residual()
        );
    }

    println!("\nWeyl degeneracy along the congruence (contractions that must vanish):");
    let pt = [0.35, -0.2, 0.45, 0.1, -0.3, 0.25];
    let deg = weyl_degeneracy_report(&metric, &pt)?;
    println!("  screen quadratic form        {:9.2e}", deg.quad_form);
    println!("  aligned contraction          {:9.2e}", deg.aligned);
    println!("  repeated principal direction {:9.2e}", deg.repeated);
    println!("  screen trace-freeness        {:9.2e}", deg.screen_tracefree);
    println!("  full wedge alignment         {:9.2e}", deg.full_wedge);

    let identity = weyl_twist_identity_residual(&metric, &pt)?;
    println!("\nrepeated-eigenvalue / twist identity residual: {identity:9.2e}");
    Ok(())
}
