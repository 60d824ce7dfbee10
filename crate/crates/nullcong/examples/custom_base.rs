//! Supplying your own almost-CR base through a text manifest: parse the
//! shipped example (the flat rank-2 model in a rotated coframe gauge),
//! validate it, verify the CR-Einstein system, and assemble an Einstein
//! metric over it.
//!
//! Run with: cargo run --example custom_base

use nullcong::{
    assemble_einstein, cr_einstein_check, einstein_residual, parse_manifest, validate_adapted,
    EinsteinParams,
};

fn main() -> nullcong::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/bases/rotated-flat.txt");
    let text = std::fs::read_to_string(path).expect("example manifest ships with the crate");
    let base = parse_manifest(&text)?;
    println!("parsed manifest: rank {}, chart dim {}", base.m(), base.dim());

    let pt = [0.3, 0.2, -0.4, 0.15, 0.35];
    println!("adapted-coframe residual at {pt:?}: {:9.2e}", validate_adapted(&base, &pt)?);
    let report = cr_einstein_check(&base, &pt)?;
    println!(
        "CR-Einstein residuals: torsion {:8.1e}, Nijenhuis divergence {:8.1e}, Ricci {:8.1e}",
        report.a_res, report.div_n_res, report.ric_res
    );
    println!("CR-Einstein constant of the base: {:+.6}", report.lambda);

    let params = EinsteinParams::new(base.m(), 0.7, report.lambda, 0.2)?;
    let model = assemble_einstein(&base, &params)?;
    println!("\nEinstein member over the manifest base, Λ = {}", params.lambda);
    for phi in [-0.5, 0.4] {
        let spacetime_pt = [phi, 0.3, 0.2, -0.4, 0.15, 0.35];
        println!(
            "  phi = {phi:+4.1}  |Ric - Λg|/|g| = {:9.2e}",
            einstein_residual(&model, &spacetime_pt)?
        );
    }
    Ok(())
}
