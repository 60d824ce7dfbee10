//! Webster-Tanaka geometry of the built-in almost-CR bases: connection
//! solve residuals, torsion, scalar curvature, the CR-Einstein system, and
//! the Chern-Moser obstruction tensor.
//!
//! Run with: cargo run --example cr_webster

use nullcong::{
    cr_einstein_check, fs_lift, heisenberg, validate_adapted, webster_curvature, Jet,
};

fn main() -> nullcong::Result<()> {
    let bases = [("flat Heisenberg base", heisenberg(2)?), ("Fubini-Study lift", fs_lift(2)?)];
    // base chart point (t, x1, y1, x2, y2)
    let pt = [0.2, 0.35, -0.15, 0.4, 0.1];

    for (label, base) in bases {
        println!("{label} (rank {}, dim {}):", base.m(), base.dim());
        let adapted = validate_adapted(&base, &pt)?;
        println!("  adapted-coframe residual          {adapted:9.2e}");

        let pack = webster_curvature(&base, &pt)?;
        println!("  connection solve residual         {:9.2e}", pack.point.solve_residual);
        let torsion: f64 = pack
            .point
            .torsion
            .iter()
            .flatten()
            .map(|j| j.value().norm())
            .fold(0.0, f64::max);
        println!("  Webster torsion max |A|           {torsion:9.2e}");
        println!("  Webster scalar curvature          {:+9.5}", pack.scalar.value().re);
        let cm: f64 = pack.chern_moser.iter().map(|j| j.value().norm()).fold(0.0, f64::max);
        println!("  Chern-Moser obstruction max       {cm:9.2e}");

        let report = cr_einstein_check(&base, &pt)?;
        println!("  CR-Einstein torsion residual      {:9.2e}", report.a_res);
        println!("  Nijenhuis divergence residual     {:9.2e}", report.div_n_res);
        println!("  Webster-Ricci Einstein residual   {:9.2e}", report.ric_res);
        println!("  frame gradient of the constant    {:9.2e}", report.grad_lambda_res);
        println!("  CR-Einstein constant              {:+9.5}", report.lambda);
        println!();
    }
    Ok(())
}
