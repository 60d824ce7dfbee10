//! Two global structures of the family: the distinguished Killing vector
//! whose squared length is the angular profile, and the second null
//! congruence obtained by swapping the roles of the two null directions,
//! with its displayed gradient identities.
//!
//! Run with: cargo run --example killing_and_dual

use nullcong::{
    assemble_einstein, dual_robinson_check, heisenberg, killing_check, DualRobinsonStatus,
    EinsteinParams,
};

fn main() -> nullcong::Result<()> {
    let base = heisenberg(2)?;
    let params = EinsteinParams::new(2, 0.8, 0.0, -0.6)?;
    let model = assemble_einstein(&base, &params)?;

    println!("generic member over the flat base, Λ = {}\n", params.lambda);
    println!("Killing vector v = λ♯ + (λ₀/2) κ♯:");
    for phi in [-0.3, 0.1, 0.25] {
        let pt = [phi, 0.4, -0.2, 0.3, 0.1, -0.35];
        let res = killing_check(&model, &pt)?;
        println!(
            "  phi = {phi:+5.2}  symmetrized ∇v {:9.2e}   |g(v,v) - λ₀| {:9.2e}",
            res.sym, res.norm
        );
    }

    println!("\ndual congruence (roles of the null pair exchanged):");
    for phi in [-0.3, 0.1, 0.25] {
        let pt = [phi, 0.4, -0.2, 0.3, 0.1, -0.35];
        let rec = dual_robinson_check(&model, &pt)?;
        match rec.status {
            DualRobinsonStatus::Checked => println!(
                "  phi = {phi:+5.2}  λ₀ = {:+8.5}   primary display {:9.2e}   dual display {:9.2e}   optical invariants {:9.2e}",
                rec.lambda0,
                rec.primary_residual.unwrap(),
                rec.dual_residual.unwrap(),
                rec.congruence_residual,
            ),
            DualRobinsonStatus::SkippedNearZero => {
                println!("  phi = {phi:+5.2}  λ₀ = {:+8.5}   (skipped: profile too close to zero)", rec.lambda0)
            }
            DualRobinsonStatus::ParallelLambda => println!(
                "  phi = {phi:+5.2}  profile vanishes identically; |∇λ| = {:9.2e}",
                rec.parallel_residual.unwrap()
            ),
        }
    }

    // When every constant vanishes the profile is identically zero and the
    // screen gradient is parallel instead.
    let flat = assemble_einstein(&base, &EinsteinParams::new(2, 0.0, 0.0, 0.0)?)?;
    let rec = dual_robinson_check(&flat, &[0.2, 0.1, -0.3, 0.4, 0.25, -0.1])?;
    println!("\nall constants zero: status {:?}, |∇λ| = {:9.2e}", rec.status, rec.parallel_residual.unwrap());
    Ok(())
}
