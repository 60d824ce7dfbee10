//! Assembles the explicit Lorentzian Einstein metrics fibered over the two
//! built-in almost-CR bases and verifies the Einstein equation Ric = Λ g
//! pointwise, together with the structural pattern of the null coframe.
//!
//! Run with: cargo run --example einstein_family

use nullcong::einstein::frame_pattern_residual;
use nullcong::{
    assemble_einstein, einstein_residual, fs_lift, heisenberg, step_residuals, EinsteinParams,
};

fn main() -> nullcong::Result<()> {
    // (label, base, CR-Einstein constant of the base)
    let bases = [
        ("flat Heisenberg base", heisenberg(2)?, 0.0),
        ("Fubini-Study lift   ", fs_lift(2)?, 3.0),
    ];

    // A handful of chart points (phi, t, x1, y1, x2, y2); phi stays away
    // from the conformal-infinity poles at +/- pi/2.
    let pts: [&[f64]; 3] = [
        &[0.3, 0.1, -0.2, 0.4, 0.25, -0.15],
        &[-0.9, 0.5, 0.3, -0.1, -0.4, 0.2],
        &[1.2, -0.3, 0.15, 0.35, 0.1, -0.45],
    ];

    for (label, base, ulambda) in bases {
        // Cosmological constant and free profile constant are arbitrary.
        let params = EinsteinParams::new(2, 0.8, ulambda, 0.3)?;
        let model = assemble_einstein(&base, &params)?;
        println!("{label}: dim {} spacetime, Λ = {}", model.dim(), params.lambda);
        for pt in pts {
            let einstein = einstein_residual(&model, pt)?;
            let pattern = frame_pattern_residual(&model, pt)?;
            let steps = step_residuals(&model, pt)?;
            println!(
                "  phi = {:5.2}   |Ric - Λg|/|g| = {einstein:9.2e}   coframe pattern {pattern:9.2e}   construction steps {:9.2e}",
                pt[0],
                steps.max()
            );
        }
        println!();
    }
    Ok(())
}
