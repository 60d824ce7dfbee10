//! Driving the verification suites from code instead of the command line:
//! configure a run, execute it, inspect the structured results, and emit
//! the same JSON/CSV reports the `nullcong` binary prints.
//!
//! Run with: cargo run --example suite_report

use nullcong::{emit, run_suite, BaseSpec, Format, RunConfig, Suite};

fn main() -> nullcong::Result<()> {
    let mut cfg = RunConfig::new(Suite::Killing);
    cfg.base = BaseSpec::FsLift;
    cfg.lambda = Some(0.9);
    cfg.c = 0.4;
    cfg.samples = 25;
    cfg.seed = 11;

    let report = run_suite(&cfg)?;
    println!("suite {:9} pass = {} ({} ms)", report.suite, report.pass, report.wall_ms);
    for check in &report.checks {
        println!(
            "  {:<18} {} samples, max rel {:9.2e} vs tol {:7.1e} -> {}",
            check.name,
            check.samples,
            check.max_rel,
            check.tol,
            if check.pass { "ok" } else { "FAIL" }
        );
    }

    println!("\nJSON emission:\n{}", emit(&report, Format::Json));
    println!("CSV emission:\n{}", emit(&report, Format::Csv));
    Ok(())
}
