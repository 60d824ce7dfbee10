//! Command-line front end: run a named verification suite over a configured
//! base geometry and emit a machine-readable residual report.
//!
//! Exit codes: 0 every check passed, 1 a check failed, 2 usage error,
//! 3 evaluation error.

use clap::Parser;
use nullcong::einstein::aj_coefficients;
use nullcong::{emit, lambda0, run_suite, BaseSpec, Format, RunConfig, Suite, UlambdaSpec};

#[derive(Parser, Debug)]
#[command(
    name = "nullcong",
    about = "Numerical verification of an Einstein metric family with a twisting, \
             non-shearing null congruence over almost-CR geometry",
    after_help = "SUITES:\n  einstein         Einstein equation of the family\n  \
                  appendix         frame-curvature closed forms against numerics\n  \
                  twist-identity   Weyl/twist identity of non-shearing congruences\n  \
                  weyl-degeneracy  alignment conditions of the null direction\n  \
                  cr-base          Webster calculus and CR-Einstein conditions\n  \
                  lambda0          profile ODEs and endpoint values\n  \
                  fefferman        conformal criteria of the Fefferman-type member\n  \
                  taubnut          radial (Bianchi-type) form and mass extraction\n  \
                  killing          Killing field shared by the family\n  \
                  dual-robinson    second shear-free congruence\n  \
                  conformal-laws   curvature engine conventions and conformal laws\n  \
                  all              every suite above"
)]
struct Cli {
    /// Verification suite to run.
    suite: String,

    /// Screen rank (defaults to 2, or to the manifest rank for file bases).
    #[arg(long)]
    m: Option<usize>,

    /// Base geometry: heisenberg, fs-lift, or file:<path> (base manifest).
    #[arg(long, default_value = "heisenberg")]
    base: String,

    /// Cosmological constant of the model.
    #[arg(long, allow_negative_numbers = true)]
    lambda: Option<f64>,

    /// CR-Einstein constant of the base: `auto` (read from the base) or a
    /// number validated against it.
    #[arg(long, default_value = "auto", allow_hyphen_values = true)]
    ulambda: String,

    /// Free constant of the profile.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    c: f64,

    /// Number of sample points (or parameter samples, suite dependent).
    #[arg(long, default_value_t = 50)]
    samples: usize,

    /// RNG seed; reports are byte-reproducible per seed.
    #[arg(long, default_value_t = 42)]
    seed: u64,

    /// Override every per-check tolerance.
    #[arg(long, allow_negative_numbers = true)]
    tol: Option<f64>,

    /// Keep samples at |phi| <= pi/2 - margin.
    #[arg(long, default_value_t = 0.2, allow_negative_numbers = true)]
    phi_margin: f64,

    /// Report format: json or csv.
    #[arg(long, default_value = "json")]
    format: String,

    /// Worker threads (0 = library default); NULLCONG_JOBS is used when the
    /// flag is absent.
    #[arg(long)]
    jobs: Option<usize>,
}

fn build_config(cli: &Cli) -> nullcong::Result<RunConfig> {
    let suite = Suite::parse(&cli.suite)?;
    let jobs = match cli.jobs {
        Some(j) => j,
        None => match std::env::var("NULLCONG_JOBS") {
            Ok(v) => v.parse::<usize>().map_err(|_| {
                nullcong::Error::Argument(format!("NULLCONG_JOBS must be an integer, got `{v}`"))
            })?,
            Err(_) => 0,
        },
    };
    let mut cfg = RunConfig::new(suite);
    cfg.m = cli.m;
    cfg.base = BaseSpec::parse(&cli.base)?;
    cfg.lambda = cli.lambda;
    cfg.ulambda = UlambdaSpec::parse(&cli.ulambda)?;
    cfg.c = cli.c;
    cfg.samples = cli.samples;
    cfg.seed = cli.seed;
    cfg.tol = cli.tol;
    cfg.phi_margin = cli.phi_margin;
    cfg.format = Format::parse(&cli.format)?;
    cfg.jobs = jobs;
    Ok(cfg)
}

/// Human-readable profile summary for the lambda0 suite (stderr only; stdout
/// stays machine-readable).
fn print_profile_summary(cfg: &RunConfig, report: &nullcong::ResidualReport) {
    let m = report.config.m;
    let params = nullcong::einstein::EinsteinParams::new(
        m,
        report.config.lambda,
        report.config.ulambda,
        report.config.c,
    );
    let (Ok(params), Ok(a)) = (params, aj_coefficients(m)) else {
        return;
    };
    if let Ok(v0) = lambda0(&params, 0.0) {
        let aj = a.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(", ");
        eprintln!("lambda0(0) = {}; a_j = ({})", v0.value(), aj);
    }
    let _ = cfg;
}

fn main() {
    let cli = Cli::parse();
    let cfg = match build_config(&cli) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("nullcong: {e}");
            std::process::exit(e.exit_code());
        }
    };
    match run_suite(&cfg) {
        Ok(report) => {
            if cfg.suite == Suite::Lambda0 {
                print_profile_summary(&cfg, &report);
            }
            print!("{}", emit(&report, cfg.format));
            std::process::exit(if report.pass { 0 } else { 1 });
        }
        Err(e) => {
            eprintln!("nullcong: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
