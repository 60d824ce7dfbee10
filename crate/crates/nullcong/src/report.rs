//! Verification suites behind the command-line front end: run configuration,
//! deterministic point sampling, suite execution, and machine-readable
//! reports (JSON or CSV) with a fixed exit-code contract.

use std::fmt;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use rand::Rng as _;
use rand::SeedableRng as _;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cr::bases;
use crate::cr::manifest::parse_manifest;
use crate::cr::{cr_einstein_check_pack, validate_adapted, webster_curvature, CRBase};
use crate::curvature::{
    curvature_pack, random_polynomial_metric, rel, transform_law_residuals,
    weyl_conformal_residual, MetricField,
};
use crate::einstein::{
    appendix_oracle, assemble_einstein, assemble_general, bce_coefficients, dual_robinson_check,
    einstein_residual, fefferman_criteria, frame_pattern_residual, kerr_schild_check,
    killing_check, lambda0, lambda0_ode_residuals, step_residuals, taubnut_map,
    DualRobinsonStatus, EinsteinParams, GeneralLambda,
};
use crate::error::{Error, Result};
use crate::field::Polynomial;
use crate::optical::{congruence_invariants, weyl_degeneracy_report, weyl_twist_identity_residual};

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

/// The named verification suites.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Einstein,
    Appendix,
    TwistIdentity,
    WeylDegeneracy,
    CrBase,
    Lambda0,
    Fefferman,
    Taubnut,
    Killing,
    DualRobinson,
    ConformalLaws,
    All,
}

impl Suite {
    pub const ALL_NAMES: [&'static str; 12] = [
        "einstein",
        "appendix",
        "twist-identity",
        "weyl-degeneracy",
        "cr-base",
        "lambda0",
        "fefferman",
        "taubnut",
        "killing",
        "dual-robinson",
        "conformal-laws",
        "all",
    ];

    pub fn parse(name: &str) -> Result<Suite> {
        Ok(match name {
            "einstein" => Suite::Einstein,
            "appendix" => Suite::Appendix,
            "twist-identity" => Suite::TwistIdentity,
            "weyl-degeneracy" => Suite::WeylDegeneracy,
            "cr-base" => Suite::CrBase,
            "lambda0" => Suite::Lambda0,
            "fefferman" => Suite::Fefferman,
            "taubnut" => Suite::Taubnut,
            "killing" => Suite::Killing,
            "dual-robinson" => Suite::DualRobinson,
            "conformal-laws" => Suite::ConformalLaws,
            "all" => Suite::All,
            other => {
                return Err(Error::Argument(format!(
                    "unknown suite `{other}`; expected one of {}",
                    Suite::ALL_NAMES.join(", ")
                )))
            }
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Einstein => "einstein",
            Suite::Appendix => "appendix",
            Suite::TwistIdentity => "twist-identity",
            Suite::WeylDegeneracy => "weyl-degeneracy",
            Suite::CrBase => "cr-base",
            Suite::Lambda0 => "lambda0",
            Suite::Fefferman => "fefferman",
            Suite::Taubnut => "taubnut",
            Suite::Killing => "killing",
            Suite::DualRobinson => "dual-robinson",
            Suite::ConformalLaws => "conformal-laws",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Which almost-CR base to verify over.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BaseSpec {
    Heisenberg,
    FsLift,
    File(PathBuf),
}

impl BaseSpec {
    pub fn parse(text: &str) -> Result<BaseSpec> {
        Ok(match text {
            "heisenberg" => BaseSpec::Heisenberg,
            "fs-lift" => BaseSpec::FsLift,
            other => match other.strip_prefix("file:") {
                Some(path) if !path.is_empty() => BaseSpec::File(PathBuf::from(path)),
                _ => {
                    return Err(Error::Argument(format!(
                        "unknown base `{other}`; expected heisenberg, fs-lift or file:<path>"
                    )))
                }
            },
        })
    }

    pub fn echo(&self) -> String {
        match self {
            BaseSpec::Heisenberg => "heisenberg".into(),
            BaseSpec::FsLift => "fs-lift".into(),
            BaseSpec::File(p) => format!("file:{}", p.display()),
        }
    }

    fn is_builtin(&self) -> bool {
        !matches!(self, BaseSpec::File(_))
    }
}

/// CR–Einstein constant: read from the base, or an explicit value validated
/// against the base.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum UlambdaSpec {
    Auto,
    Value(f64),
}

impl UlambdaSpec {
    pub fn parse(text: &str) -> Result<UlambdaSpec> {
        if text == "auto" {
            return Ok(UlambdaSpec::Auto);
        }
        text.parse::<f64>().map(UlambdaSpec::Value).map_err(|_| {
            Error::Argument(format!("--ulambda expects `auto` or a number, got `{text}`"))
        })
    }
}

/// Report output format.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    pub fn parse(text: &str) -> Result<Format> {
        match text {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(Error::Argument(format!("unknown format `{other}`"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

/// Full configuration of a verification run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub suite: Suite,
    /// Screen rank; defaults to 2 for built-in bases and to the manifest rank
    /// for file bases.
    pub m: Option<usize>,
    pub base: BaseSpec,
    /// Cosmological constant; defaults to 0, except for the `fefferman`
    /// suite where it defaults to the Fefferman-type value.
    pub lambda: Option<f64>,
    pub ulambda: UlambdaSpec,
    pub c: f64,
    pub samples: usize,
    pub seed: u64,
    /// Overrides every per-check tolerance when set.
    pub tol: Option<f64>,
    /// Sampling keeps `|φ| ≤ π/2 − margin`.
    pub phi_margin: f64,
    pub format: Format,
    /// Worker threads; 0 means the library default.
    pub jobs: usize,
}

impl RunConfig {
    pub fn new(suite: Suite) -> Self {
        RunConfig {
            suite,
            m: None,
            base: BaseSpec::Heisenberg,
            lambda: None,
            ulambda: UlambdaSpec::Auto,
            c: 0.0,
            samples: 50,
            seed: 42,
            tol: None,
            phi_margin: 0.2,
            format: Format::Json,
            jobs: 0,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.samples < 1 {
            return Err(Error::Argument("--samples must be at least 1".into()));
        }
        if !(self.phi_margin > 0.0 && self.phi_margin < std::f64::consts::FRAC_PI_2) {
            return Err(Error::Argument("--phi-margin must lie in (0, π/2)".into()));
        }
        if let Some(t) = self.tol {
            if !(t > 0.0) {
                return Err(Error::Argument("--tol must be positive".into()));
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Report types
// ---------------------------------------------------------------------------

/// One named residual check inside a report.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: String,
    /// Number of evaluations contributing to the maxima.
    pub samples: usize,
    pub max_abs: f64,
    pub max_rel: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Echo of the effective configuration carried inside a report.
#[derive(Debug, Clone)]
pub struct ConfigEcho {
    pub m: usize,
    pub base: String,
    pub lambda: f64,
    pub ulambda: f64,
    pub c: f64,
    pub samples: usize,
    pub seed: u64,
    pub tol: Option<f64>,
    pub phi_margin: f64,
    pub format: String,
    pub jobs: usize,
}

/// Result of a suite run.
#[derive(Debug, Clone)]
pub struct ResidualReport {
    pub suite: String,
    pub config: ConfigEcho,
    pub checks: Vec<CheckResult>,
    pub pass: bool,
    pub wall_ms: u64,
}

/// Residual accumulator for one check.
struct Acc {
    name: String,
    tol: f64,
    n: usize,
    max_abs: f64,
    max_rel: f64,
}

impl Acc {
    fn new(name: &str, tol: f64, override_tol: Option<f64>) -> Acc {
        Acc { name: name.into(), tol: override_tol.unwrap_or(tol), n: 0, max_abs: 0.0, max_rel: 0.0 }
    }

    fn push(&mut self, abs: f64, relv: f64) {
        self.n += 1;
        self.max_abs = self.max_abs.max(abs);
        self.max_rel = self.max_rel.max(relv);
    }

    /// For residuals reported as a single (already normalized) number.
    fn push1(&mut self, v: f64) {
        self.push(v, v);
    }

    fn done(self) -> CheckResult {
        CheckResult {
            pass: self.max_rel < self.tol,
            name: self.name,
            samples: self.n,
            max_abs: self.max_abs,
            max_rel: self.max_rel,
            tol: self.tol,
        }
    }
}

/// Collects non-empty accumulators into check results.
fn finish(accs: Vec<Acc>) -> Vec<CheckResult> {
    accs.into_iter().filter(|a| a.n > 0).map(Acc::done).collect()
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

/// Deterministic sample points for a run: `φ` uniform in
/// `[−π/2+margin, π/2−margin]` on axis 0, remaining product-chart coordinates
/// uniform in `[−1, 1]`.
pub fn sample_points(config: &RunConfig, dim: usize) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    points_from_rng(&mut rng, config.samples, dim, config.phi_margin)
}

fn points_from_rng(
    rng: &mut ChaCha8Rng,
    samples: usize,
    dim: usize,
    margin: f64,
) -> Vec<Vec<f64>> {
    let half = std::f64::consts::FRAC_PI_2 - margin;
    (0..samples)
        .map(|_| {
            let mut pt: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            pt[0] = rng.gen_range(-half..=half);
            pt
        })
        .collect()
}

/// Evaluate `f` at every point, in parallel, preserving order; the first
/// error in point order wins.
fn par_eval<T, F>(points: &[Vec<f64>], f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&[f64]) -> Result<T> + Sync,
{
    let out: Vec<Result<T>> = points.par_iter().map(|p| f(p)).collect();
    let mut res = Vec::with_capacity(out.len());
    for r in out {
        res.push(r?);
    }
    Ok(res)
}

// ---------------------------------------------------------------------------
// Resolution
// ---------------------------------------------------------------------------

struct Ctx {
    cfg: RunConfig,
    base: CRBase,
    params: EinsteinParams,
    dim: usize,
}

impl Ctx {
    fn resolve(cfg: &RunConfig) -> Result<Ctx> {
        cfg.validate()?;
        let base = match &cfg.base {
            BaseSpec::Heisenberg => bases::heisenberg(cfg.m.unwrap_or(2))?,
            BaseSpec::FsLift => bases::fs_lift(cfg.m.unwrap_or(2))?,
            BaseSpec::File(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    Error::Argument(format!("cannot read base manifest {}: {e}", path.display()))
                })?;
                let parsed = parse_manifest(&text)?;
                if let Some(m) = cfg.m {
                    if m != parsed.m() {
                        return Err(Error::Argument(format!(
                            "--m {m} does not match the manifest rank {}",
                            parsed.m()
                        )));
                    }
                }
                parsed
            }
        };
        let m = base.m();
        if m < 2 {
            return Err(Error::Argument(format!(
                "the Einstein family needs screen rank m >= 2, got {m}"
            )));
        }

        // CR–Einstein constant of the base, measured at a fixed probe point.
        let probe: Vec<f64> = (0..base.dim()).map(|i| 0.11 + 0.05 * i as f64).collect();
        let pack = webster_curvature(&base, &probe)?;
        let measured = cr_einstein_check_pack(&pack)?.lambda;
        let measured = if measured.abs() < 1e-9 { 0.0 } else { measured };
        let ulambda = match cfg.ulambda {
            UlambdaSpec::Auto => measured,
            UlambdaSpec::Value(v) => {
                if (v - measured).abs() > 1e-6 * (1.0 + measured.abs()) {
                    return Err(Error::Argument(format!(
                        "--ulambda {v} disagrees with the base constant {measured:.9}"
                    )));
                }
                v
            }
        };

        let lambda = cfg.lambda.unwrap_or(if cfg.suite == Suite::Fefferman {
            (2.0 * m as f64 + 1.0) / (2.0 * m as f64 + 2.0) * ulambda
        } else {
            0.0
        });
        let params = EinsteinParams::new(m, lambda, ulambda, cfg.c)?;
        Ok(Ctx { cfg: cfg.clone(), base, params, dim: 2 * m + 2 })
    }

    fn echo(&self) -> ConfigEcho {
        ConfigEcho {
            m: self.params.m,
            base: self.cfg.base.echo(),
            lambda: self.params.lambda,
            ulambda: self.params.ulambda,
            c: self.params.c,
            samples: self.cfg.samples,
            seed: self.cfg.seed,
            tol: self.cfg.tol,
            phi_margin: self.cfg.phi_margin,
            format: self.cfg.format.name().into(),
            jobs: self.cfg.jobs,
        }
    }

    fn points(&self) -> Vec<Vec<f64>> {
        sample_points(&self.cfg, self.dim)
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.cfg.seed.wrapping_add(stream.wrapping_mul(0x9e3779b9)))
    }
}

// ---------------------------------------------------------------------------
// Suite runner
// ---------------------------------------------------------------------------

/// Execute the configured suite and assemble its report. Deterministic for a
/// fixed configuration (up to `wall_ms`).
pub fn run_suite(cfg: &RunConfig) -> Result<ResidualReport> {
    let t0 = Instant::now();
    let ctx = Ctx::resolve(cfg)?;
    let checks = if cfg.jobs == 0 {
        dispatch(&ctx)?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.jobs)
            .build()
            .map_err(|e| Error::Numeric(format!("worker pool: {e}")))?;
        pool.install(|| dispatch(&ctx))?
    };
    let pass = checks.iter().all(|c| c.pass);
    Ok(ResidualReport {
        suite: cfg.suite.name().into(),
        config: ctx.echo(),
        checks,
        pass,
        wall_ms: t0.elapsed().as_millis() as u64,
    })
}

fn dispatch(ctx: &Ctx) -> Result<Vec<CheckResult>> {
    match ctx.cfg.suite {
        Suite::Einstein => suite_einstein(ctx),
        Suite::Appendix => suite_appendix(ctx),
        Suite::TwistIdentity => suite_twist_identity(ctx),
        Suite::WeylDegeneracy => suite_weyl_degeneracy(ctx),
        Suite::CrBase => suite_cr_base(ctx),
        Suite::Lambda0 => suite_lambda0(ctx),
        Suite::Fefferman => suite_fefferman(ctx),
        Suite::Taubnut => suite_taubnut(ctx),
        Suite::Killing => suite_killing(ctx),
        Suite::DualRobinson => suite_dual_robinson(ctx),
        Suite::ConformalLaws => suite_conformal_laws(ctx),
        Suite::All => suite_all(ctx),
    }
}

fn suite_all(ctx: &Ctx) -> Result<Vec<CheckResult>> {
    let mut checks = Vec::new();
    let subs = [
        Suite::Einstein,
        Suite::Appendix,
        Suite::TwistIdentity,
        Suite::WeylDegeneracy,
        Suite::CrBase,
        Suite::Lambda0,
        Suite::Fefferman,
        Suite::Taubnut,
        Suite::Killing,
        Suite::DualRobinson,
        Suite::ConformalLaws,
    ];
    for sub in subs {
        // The radial form needs a nonzero CR–Einstein constant, and the
        // Fefferman-type member degenerates to the parallel case when the
        // constant vanishes; skip both on such bases rather than failing
        // the sweep.
        if matches!(sub, Suite::Taubnut | Suite::Fefferman) && ctx.params.ulambda == 0.0 {
            continue;
        }
        let mut sub_cfg = ctx.cfg.clone();
        sub_cfg.suite = sub;
        sub_cfg.samples = ctx.cfg.samples.min(40);
        if sub == Suite::Fefferman {
            // The sweep runs the Fefferman-type member regardless of the
            // configured cosmological constant.
            sub_cfg.lambda = None;
            sub_cfg.c = 0.0;
        }
        let sub_ctx = Ctx::resolve(&sub_cfg)?;
        for mut check in dispatch(&sub_ctx)? {
            check.name = format!("{}/{}", sub.name(), check.name);
            checks.push(check);
        }
    }
    Ok(checks)
}

fn suite_einstein(ctx: &Ctx) -> Result<Vec<CheckResult>> {
    let model = assemble_einstein(&ctx.base, &ctx.params)?;
    let pts = ctx.points();
    let ov = ctx.cfg.tol;
    let mut eq = Acc::new("einstein-equation", 1e-7, ov);
    let mut fp = Acc::new("frame-pattern", 1e-9, ov);
    let rs = par_eval(&pts, |p| {
        Ok((einstein_residual(&model, p)?, frame_pattern_residual(&model, p)?))
    })?;
    for (a, b) in rs {
        eq.push1(a);
        fp.push1(b);
    }

    let k = pts.len().min(25);
    let mut st = Acc::new("construction-steps", 1e-7, ov);
    let mut ks = Acc::new("kerr-schild", 1e-9, ov);
    let rs = par_eval(&pts[..k], |p| {
        Ok((step_residuals(&model, p)?.max(), kerr_schild_check(&model, p)?))
    })?;
    for (a, b) in rs {
        st.push1(a);
        ks.push1(b);
    }
    Ok(finish(vec![eq, fp, st, ks]))
}

fn suite_appendix(ctx: &Ctx) -> Result<Vec<CheckResult>> {
    let draws = 10usize;
    let per_draw = ctx.cfg.samples.div_ceil(draws);
    let ov = ctx.cfg.tol;
    let mut riem = Acc::new("riemann-components", 1e-7, ov);
    let mut ricci = Acc::new("ricci-components", 1e-7, ov);
    let mut scalar = Acc::new("scalar-curvature", 1e-7, ov);
    let mut bianchi = Acc::new("bianchi-combinations", 1e-8, ov);
    let mut exterior = Acc::new("exterior-derivative", 1e-8, ov);
    let mut rng = ctx.rng(1);
    for _ in 0..draws {
        let lam = GeneralLambda::random(ctx.params.m, &mut rng, 0.25);
        let pts = points_from_rng(&mut rng, per_draw, ctx.dim, ctx.cfg.phi_margin);
        let rs = par_eval(&pts, |p| {
            let rec = appendix_oracle(&ctx.base, &lam, p)?;
            let bce = bce_coefficients(&ctx.base, &lam, p)?;
            Ok((
                rec.max_riemann(),
                rec.max_ricci(),
                rec.scalar,
                rec.max_bianchi(),
                bce.exterior_residual.max(bce.hermitian_residual),
            ))
        })?;
        for (a, b, sc, bi, ex) in rs {
            riem.push1(a);
            ricci.push1(b);
            scalar.push1(sc);
            bianchi.push1(bi);
            exterior.push1(ex);
        }
    }
    Ok(finish(vec![riem, ricci, scalar, bianchi, exterior]))
}

fn suite_twist_identity(ctx: &Ctx) -> Result<Vec<CheckResult>> {
    let ov = ctx.cfg.tol;
    let mut identity = Acc::new("twist-identity", 1e-7, ov);
    let mut identity_gen = Acc::new("twist-identity-general", 1e-7, ov);
    let mut geodesy = Acc::new("congruence-geodesy", 1e-9, ov);
    let mut shear = Acc::new("congruence-shear", 1e-9, ov);
    let mut expansion = Acc::new("nonexpanding-representative", 1e-9, ov);
    let mut structure = Acc::new("twist-structure", 1e-9, ov);
    let mut normalization = Acc::new("twist-normalization", 1e-9, ov);

    let model = assemble_einstein(&ctx.base, &ctx.params)?;
    let pts = ctx.points();
    {
        let g = model.metric();
        let rs = par_eval(&pts, |p| {
            let inv = congruence_invariants(&g, p)?;
            let id = weyl_twist_identity_residual(&g, p)?;
            Ok((
                id,
                inv.geodesy_residual(),
                inv.shear_max(),
                inv.expansion().abs(),
                inv.twist_structure_residual(),
                (inv.twist_max() - 2.0).abs(),
            ))
        })?;
        for (id, ge, sh, ex, stx, nm) in rs {
            identity.push1(id);
            geodesy.push1(ge);
            shear.push1(sh);
            expansion.push1(ex);
            structure.push1(stx);
            normalization.push1(nm);
        }
    }

    // The identity holds for arbitrary profile data, not only the Einstein
    // family; exercise it on random polynomial data as well.
    let mut rng = ctx.rng(2);
    for _ in 0..2 {
        let lam = GeneralLambda::random(ctx.params.m, &mut rng, 0.2);
        let pts =
            points_from_rng(&mut rng, ctx.cfg.samples.div_ceil(4), ctx.dim, ctx.cfg.phi_margin);
        let general = assemble_general(&ctx.base, lam)?;
        let g = general.metric();
        let rs = par_eval(&pts, |p| {
            let inv = congruence_invariants(&g, p)?;
            Ok((
                weyl_twist_identity_residual(&g, p)?,
                inv.geodesy_residual(),
                inv.shear_max(),
                inv.expansion().abs(),
            ))
        })?;
        for (id, ge, sh, ex) in rs {
            identity_gen.push1(id);
            geodesy.push1(ge);
            shear.push1(sh);
            expansion.push1(ex);
        }
    }
    Ok(finish(vec![
        identity,
        identity_gen,
        geodesy,
        shear,
        expansion,
        structure,
        normalization,
    ]))
}

fn suite_weyl_degeneracy(ctx: &Ctx) -> Result<Vec<CheckResult>> {
    let ov = ctx.cfg.tol;
    let model = assemble_einstein(&ctx.base, &ctx.params)?;
    let pts = ctx.points();
    let mut quad = Acc::new("screen-quadratic", 1e-8, ov);
    let mut aligned = Acc::new("aligned-contraction", 1e-8, ov);
    let mut repeated = Acc::new("repeated-direction", 1e-8, ov);
    let mut tracefree = Acc::new("wedge-tracefree", 1e-8, ov);
    let conformally_flat = ctx.cfg.base == BaseSpec::Heisenberg
        && ctx.params.lambda == 0.0
        && ctx.params.ulambda == 0.0
        && ctx.params.c == 0.0;
    let mut full = Acc::new("full-wedge", 1e-7, ov);
    let mut flat = Acc::new("conformal-flatness", 1e-7, ov);

    let g = model.metric();
    let ghat = model.rescaled_metric();
    let builtin = ctx.cfg.base.is_builtin();
    let rs = par_eval(&pts, |p| {
        let rep = weyl_degeneracy_report(&g, p)?;
        let wmax = if conformally_flat {
            let pack = curvature_pack(&ghat, p, 2).map_err(|e| e.at_point(p))?;
            Some(pack.weyl_down_values()?.max_modulus())
        } else {
            None
        };
        Ok((rep, wmax))
    })?;
    for (rep, wmax) in rs {
        quad.push1(rep.quad_form);
        aligned.push1(rep.aligned);
        repeated.push1(rep.repeated);
        if builtin {
            // The trace-free wedge condition holds exactly when the base has
            // vanishing Nijenhuis tensor, as the built-ins do.
            tracefree.push1(rep.screen_tracefree);
        }
        if conformally_flat {
            full.push1(rep.full_wedge);
        }
        if let Some(w) = wmax {
            flat.push1(w);
        }
    }
    Ok(finish(vec![quad, aligned, repeated, tracefree, full, flat]))
}

fn suite_cr_base(ctx: &Ctx) -> Result<Vec<CheckResult>> {
    let ov = ctx.cfg.tol;
    let mut solve = Acc::new("structure-solve", 1e-9, ov);
    let mut adapted = Acc::new("adaptedness", 1e-9, ov);
    let mut torsion = Acc::new("cr-einstein-torsion", 1e-7, ov);
    let mut div_n = Acc::new("cr-einstein-nijenhuis-divergence", 1e-7, ov);
    let mut ric = Acc::new("cr-einstein-ricci", 1e-7, ov);
    let mut grad = Acc::new("cr-einstein-constant-gradient", 1e-7, ov);
    let mut spread = Acc::new("cr-einstein-constant-spread", 1e-7, ov);
    let mut flatness = Acc::new("webster-flatness", 1e-10, ov);
    let mut chern = Acc::new("chern-moser", 1e-6, ov);
    let mut expansion = Acc::new("congruence-expansion", 1e-9, ov);

    let pts = ctx.points();
    let m = ctx.params.m;
    let is_heis = ctx.cfg.base == BaseSpec::Heisenberg;
    let builtin = ctx.cfg.base.is_builtin();

    struct PointOut {
        solve: f64,
        adapted: f64,
        report: crate::cr::CrEinsteinReport,
        flatness: Option<f64>,
        chern: Option<f64>,
    }
    let rs = par_eval(&pts, |p| {
        let bp = &p[1..];
        let pack = webster_curvature(&ctx.base, bp)?;
        let report = cr_einstein_check_pack(&pack)?;
        let adapted_res = validate_adapted(&ctx.base, bp)?;
        let flat = if is_heis {
            let mut worst: f64 = 0.0;
            let n = 2 * m + 1;
            for a in 0..n {
                for b in 0..n {
                    for cx in 0..n {
                        for d in 0..n {
                            worst = worst.max(pack.curvature.get(&[a, b, cx, d]).value().norm());
                        }
                    }
                }
            }
            for row in &pack.ricci {
                for v in row {
                    worst = worst.max(v.value().norm());
                }
            }
            worst = worst.max(pack.scalar.value().norm());
            for row in &pack.point.torsion {
                for v in row {
                    worst = worst.max(v.value().norm());
                }
            }
            Some(worst)
        } else {
            None
        };
        let cm = if builtin {
            Some(pack.chern_moser.iter().map(|v| v.value().norm()).fold(0.0f64, f64::max))
        } else {
            None
        };
        Ok(PointOut {
            solve: pack.point.solve_residual,
            adapted: adapted_res,
            report,
            flatness: flat,
            chern: cm,
        })
    })?;
    let mut lam_min = f64::INFINITY;
    let mut lam_max = f64::NEG_INFINITY;
    for out in &rs {
        solve.push1(out.solve);
        adapted.push1(out.adapted);
        torsion.push1(out.report.a_res);
        div_n.push1(out.report.div_n_res);
        ric.push1(out.report.ric_res);
        grad.push1(out.report.grad_lambda_res);
        lam_min = lam_min.min(out.report.lambda);
        lam_max = lam_max.max(out.report.lambda);
        if let Some(f) = out.flatness {
            flatness.push1(f);
        }
        if let Some(cmv) = out.chern {
            chern.push1(cmv);
        }
    }
    spread.push1(rel(lam_max - lam_min, 1.0f64.max(lam_max.abs()).max(lam_min.abs())));

    // The congruence of the rescaled Einstein model expands like 2m·tanφ.
    let model = assemble_einstein(&ctx.base, &ctx.params)?;
    let ghat = model.rescaled_metric();
    let k = pts.len().min(25);
    let rs = par_eval(&pts[..k], |p| {
        let inv = congruence_invariants(&ghat, p)?;
        let target = 2.0 * m as f64 * p[0].tan();
        Ok(rel((inv.expansion() - target).abs(), 1.0f64.max(target.abs())))
    })?;
    for v in rs {
        expansion.push1(v);
    }

    Ok(finish(vec![
        solve, adapted, torsion, div_n, ric, grad, spread, flatness, chern, expansion,
    ]))
}

fn suite_lambda0(ctx: &Ctx) -> Result<Vec<CheckResult>> {
    let ov = ctx.cfg.tol;
    let params = ctx.params;
    let mut scalar_ode = Acc::new("profile-ode-scalar", 1e-10, ov);
    let mut mixed_ode = Acc::new("profile-ode-mixed", 1e-10, ov);
    let mut first = Acc::new("profile-first-integral", 1e-10, ov);
    let mut alternate = Acc::new("profile-ode-alternate", 1e-10, ov);
    let mut brel = Acc::new("profile-b-relation", 1e-12, ov);
    let mut at_zero = Acc::new("profile-value-at-zero", 1e-12, ov);
    let mut endpoint = Acc::new("profile-endpoint-limit", 1e-6, ov);

    let half = std::f64::consts::FRAC_PI_2 - ctx.cfg.phi_margin;
    let mut rng = ctx.rng(3);
    let phis: Vec<f64> = (0..ctx.cfg.samples).map(|_| rng.gen_range(-half..=half)).collect();
    for phi in phis {
        let res = lambda0_ode_residuals(&params, phi)?;
        scalar_ode.push1(res.scalar_ode);
        mixed_ode.push1(res.mixed_ode);
        first.push1(res.first_order);
        alternate.push1(res.alternate_ode);
        brel.push1(res.b_coefficient);
    }

    let target0 = params.ulambda - params.lambda;
    let v0 = lambda0(&params, 0.0)?.value();
    at_zero.push1(rel((v0 - target0).abs(), 1.0f64.max(target0.abs())));

    let limit = params.lambda / (2.0 * params.m as f64 + 1.0);
    for sign in [-1.0, 1.0] {
        let phi = sign * (std::f64::consts::FRAC_PI_2 - 1e-3);
        let v = lambda0(&params, phi)?.value();
        endpoint.push1(rel((v - limit).abs(), 1.0f64.max(limit.abs())));
    }

    Ok(finish(vec![scalar_ode, mixed_ode, first, alternate, brel, at_zero, endpoint]))
}

fn suite_fefferman(ctx: &Ctx) -> Result<Vec<CheckResult>> {
    if !ctx.params.is_fefferman() {
        return Err(Error::Precondition(format!(
            "the fefferman suite needs parameters of Fefferman type \
             (got lambda = {}, ulambda = {}, c = {}); omit --lambda to use them",
            ctx.params.lambda, ctx.params.ulambda, ctx.params.c
        )));
    }
    let ov = ctx.cfg.tol;
    let model = assemble_einstein(&ctx.base, &ctx.params)?;
    let pts = ctx.points();

    let mut spread = Acc::new("profile-spread", 1e-12, ov);
    let mut killing = Acc::new("conformal-killing", 1e-8, ov);
    let mut weyl = Acc::new("null-weyl", 1e-7, ov);
    let mut cotton = Acc::new("null-cotton", 1e-6, ov);
    let mut scalar = Acc::new("scalar-criterion", 1e-8, ov);

    let mut lam_min = f64::INFINITY;
    let mut lam_max = f64::NEG_INFINITY;
    let rs = par_eval(&pts, |p| {
        let l0 = model.lambda().lambda0_jet(p)?.value();
        let kc = killing_check(&model, p)?;
        Ok((l0, kc.conformal))
    })?;
    for (l0, conf) in rs {
        lam_min = lam_min.min(l0);
        lam_max = lam_max.max(l0);
        killing.push1(conf);
    }
    spread.push1(lam_max - lam_min);

    let k = pts.len().min(40);
    let rs = par_eval(&pts[..k], |p| fefferman_criteria(&model, p))?;
    for crit in rs {
        weyl.push1(crit.weyl_res);
        cotton.push1(crit.cotton_res);
        scalar.push1((crit.scalar_value + 1.0).abs());
    }
    Ok(finish(vec![spread, killing, weyl, cotton, scalar]))
}

fn suite_taubnut(ctx: &Ctx) -> Result<Vec<CheckResult>> {
    let ov = ctx.cfg.tol;
    let mut ode = Acc::new("radial-ode", 1e-8, ov);
    let mut round = Acc::new("radial-round-trip", 1e-12, ov);
    let mut mass = Acc::new("mass-extraction", 1e-6, ov);

    let mut rng = ctx.rng(4);
    let mut radii: Vec<f64> = (0..ctx.cfg.samples).map(|_| rng.gen_range(-10.0..10.0)).collect();
    radii.push(-10.0);
    radii.push(10.0);
    for r in radii {
        let tn = taubnut_map(&ctx.params, r)?;
        ode.push1(tn.f_ode_residual);
        round.push1(tn.round_trip);
        if let Some(mv) = tn.mass {
            mass.push1(rel(
                (mv - tn.mass_reference).abs(),
                1.0f64.max(tn.mass_reference.abs()),
            ));
        }
    }
    Ok(finish(vec![ode, round, mass]))
}

fn suite_killing(ctx: &Ctx) -> Result<Vec<CheckResult>> {
    let ov = ctx.cfg.tol;
    let model = assemble_einstein(&ctx.base, &ctx.params)?;
    let pts = ctx.points();
    let mut sym = Acc::new("killing-symmetry", 1e-8, ov);
    let mut norm = Acc::new("killing-norm", 1e-10, ov);
    let rs = par_eval(&pts, |p| killing_check(&model, p))?;
    for kc in rs {
        sym.push1(kc.sym);
        norm.push1(kc.norm);
    }
    Ok(finish(vec![sym, norm]))
}

fn suite_dual_robinson(ctx: &Ctx) -> Result<Vec<CheckResult>> {
    let ov = ctx.cfg.tol;
    let model = assemble_einstein(&ctx.base, &ctx.params)?;
    let pts = ctx.points();
    let mut primary = Acc::new("primary-display", 1e-8, ov);
    let mut dual = Acc::new("dual-display", 1e-9, ov);
    let mut parallel = Acc::new("parallel-lambda", 1e-10, ov);
    let mut congruence = Acc::new("congruence-invariants", 1e-9, ov);
    let rs = par_eval(&pts, |p| dual_robinson_check(&model, p))?;
    for rec in rs {
        congruence.push1(rec.congruence_residual);
        match rec.status {
            DualRobinsonStatus::Checked => {
                primary.push1(rec.primary_residual.unwrap_or(0.0));
                dual.push1(rec.dual_residual.unwrap_or(0.0));
            }
            DualRobinsonStatus::ParallelLambda => {
                parallel.push1(rec.parallel_residual.unwrap_or(0.0));
            }
            DualRobinsonStatus::SkippedNearZero => {}
        }
    }
    Ok(finish(vec![primary, dual, parallel, congruence]))
}

fn suite_conformal_laws(ctx: &Ctx) -> Result<Vec<CheckResult>> {
    let ov = ctx.cfg.tol;
    let mut commutator = Acc::new("commutator-convention", 1e-7, ov);
    let mut trace = Acc::new("weyl-trace", 1e-7, ov);
    let mut invariance = Acc::new("weyl-conformal-invariance", 1e-7, ov);
    let mut connection = Acc::new("connection-transformation", 1e-7, ov);
    let mut schouten = Acc::new("schouten-transformation", 1e-7, ov);

    let mut rng = ctx.rng(5);
    struct Case {
        metric: Arc<dyn MetricField>,
        phi: crate::field::SharedRealField,
        vector: Vec<crate::jet::CJet>,
        pt: Vec<f64>,
    }
    let cases: Vec<Case> = (0..ctx.cfg.samples)
        .map(|i| {
            let d = if i % 2 == 0 { 4 } else { 6 };
            let mut diag = vec![1.0; d];
            if i % 4 >= 2 {
                diag[0] = -1.0; // alternate Riemannian and Lorentzian draws
            }
            let metric: Arc<dyn MetricField> =
                Arc::new(random_polynomial_metric(diag, &mut rng, 0.12, 3));
            let phi = Polynomial::random(&mut rng, d, 2, 4, 0.2, true).into_real_field();
            let pt: Vec<f64> = (0..d).map(|_| rng.gen_range(-0.3..0.3)).collect();
            let vector: Vec<crate::jet::CJet> = (0..d)
                .map(|_| Polynomial::random(&mut rng, d, 2, 4, 0.5, false).eval(&pt, 2))
                .collect();
            Case { metric, phi, vector, pt }
        })
        .collect();

    let rs: Vec<Result<(f64, f64, f64, f64, f64)>> = cases
        .par_iter()
        .map(|case| {
            let pack = curvature_pack(case.metric.as_ref(), &case.pt, 2)
                .map_err(|e| e.at_point(&case.pt))?;
            let comm = pack.commutator_residual(&case.vector);
            let tr = pack.weyl_trace_residual()?;
            let laws =
                transform_law_residuals(case.metric.clone(), case.phi.clone(), &case.pt)?;
            let inv = weyl_conformal_residual(case.metric.clone(), case.phi.clone(), &case.pt)?;
            Ok((comm, tr, inv, laws.connection_residual, laws.schouten_residual))
        })
        .collect();
    for r in rs {
        let (comm, tr, inv, conn, sch) = r?;
        commutator.push1(comm);
        trace.push1(tr);
        invariance.push1(inv);
        connection.push1(conn);
        schouten.push1(sch);
    }
    Ok(finish(vec![commutator, trace, invariance, connection, schouten]))
}

// ---------------------------------------------------------------------------
// Emission
// ---------------------------------------------------------------------------

/// A float with 17 significant digits, round-trip exact for f64.
fn sig17(x: f64) -> String {
    if x.is_finite() {
        format!("{:.16e}", x)
    } else {
        // Residual maxima are finite by construction; clamp defensively so
        // the output stays parseable.
        format!("{:.16e}", f64::MAX)
    }
}

fn json_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out
}

/// Render a report in the requested format.
pub fn emit(report: &ResidualReport, format: Format) -> String {
    match format {
        Format::Json => emit_json(report),
        Format::Csv => emit_csv(report),
    }
}

fn emit_json(report: &ResidualReport) -> String {
    let cfg = &report.config;
    let mut out = String::new();
    out.push_str("{\n");
    out.push_str(&format!("  \"suite\": \"{}\",\n", json_escape(&report.suite)));
    out.push_str("  \"config\": {\n");
    out.push_str(&format!("    \"m\": {},\n", cfg.m));
    out.push_str(&format!("    \"base\": \"{}\",\n", json_escape(&cfg.base)));
    out.push_str(&format!("    \"lambda\": {},\n", sig17(cfg.lambda)));
    out.push_str(&format!("    \"ulambda\": {},\n", sig17(cfg.ulambda)));
    out.push_str(&format!("    \"c\": {},\n", sig17(cfg.c)));
    out.push_str(&format!("    \"samples\": {},\n", cfg.samples));
    out.push_str(&format!("    \"seed\": {},\n", cfg.seed));
    match cfg.tol {
        Some(t) => out.push_str(&format!("    \"tol\": {},\n", sig17(t))),
        None => out.push_str("    \"tol\": null,\n"),
    }
    out.push_str(&format!("    \"phi_margin\": {},\n", sig17(cfg.phi_margin)));
    out.push_str(&format!("    \"format\": \"{}\",\n", json_escape(&cfg.format)));
    out.push_str(&format!("    \"jobs\": {}\n", cfg.jobs));
    out.push_str("  },\n");
    out.push_str("  \"checks\": [");
    for (i, check) in report.checks.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str("\n    {");
        out.push_str(&format!("\"name\": \"{}\", ", json_escape(&check.name)));
        out.push_str(&format!("\"samples\": {}, ", check.samples));
        out.push_str(&format!("\"max_abs\": {}, ", sig17(check.max_abs)));
        out.push_str(&format!("\"max_rel\": {}, ", sig17(check.max_rel)));
        out.push_str(&format!("\"tol\": {}, ", sig17(check.tol)));
        out.push_str(&format!("\"pass\": {}}}", check.pass));
    }
    if report.checks.is_empty() {
        out.push_str("],\n");
    } else {
        out.push_str("\n  ],\n");
    }
    out.push_str(&format!("  \"pass\": {},\n", report.pass));
    out.push_str(&format!("  \"wall_ms\": {}\n", report.wall_ms));
    out.push_str("}\n");
    out
}

fn emit_csv(report: &ResidualReport) -> String {
    let mut out = String::from("check,samples,max_abs,max_rel,tol,pass\n");
    for check in &report.checks {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            check.name,
            check.samples,
            sig17(check.max_abs),
            sig17(check.max_rel),
            sig17(check.tol),
            check.pass
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for name in Suite::ALL_NAMES {
            assert_eq!(Suite::parse(name).unwrap().name(), name);
        }
        assert!(matches!(Suite::parse("nope"), Err(Error::Argument(_))));
    }

    #[test]
    fn base_and_ulambda_parsing() {
        assert_eq!(BaseSpec::parse("heisenberg").unwrap(), BaseSpec::Heisenberg);
        assert_eq!(BaseSpec::parse("fs-lift").unwrap(), BaseSpec::FsLift);
        assert_eq!(
            BaseSpec::parse("file:bases/demo.crb").unwrap(),
            BaseSpec::File(PathBuf::from("bases/demo.crb"))
        );
        assert!(BaseSpec::parse("file:").is_err());
        assert!(BaseSpec::parse("sphere").is_err());
        assert_eq!(UlambdaSpec::parse("auto").unwrap(), UlambdaSpec::Auto);
        assert_eq!(UlambdaSpec::parse("1.5").unwrap(), UlambdaSpec::Value(1.5));
        assert!(UlambdaSpec::parse("one").is_err());
    }

    #[test]
    fn sampling_is_deterministic_and_bounded() {
        let mut cfg = RunConfig::new(Suite::Einstein);
        cfg.samples = 1000;
        cfg.phi_margin = 0.2;
        let a = sample_points(&cfg, 6);
        let b = sample_points(&cfg, 6);
        assert_eq!(a, b);
        let half = std::f64::consts::FRAC_PI_2 - 0.2;
        for p in &a {
            assert_eq!(p.len(), 6);
            assert!(p[0].abs() <= half + 1e-15);
            for &x in &p[1..] {
                assert!((-1.0..1.0).contains(&x));
            }
        }
        cfg.seed = 43;
        let c = sample_points(&cfg, 6);
        assert_ne!(a, c);
    }

    #[test]
    fn config_invariants_are_enforced() {
        let mut cfg = RunConfig::new(Suite::Lambda0);
        cfg.samples = 0;
        assert!(matches!(run_suite(&cfg), Err(Error::Argument(_))));
        let mut cfg = RunConfig::new(Suite::Lambda0);
        cfg.phi_margin = 2.0;
        assert!(matches!(run_suite(&cfg), Err(Error::Argument(_))));
        let mut cfg = RunConfig::new(Suite::Lambda0);
        cfg.tol = Some(0.0);
        assert!(matches!(run_suite(&cfg), Err(Error::Argument(_))));
    }

    #[test]
    fn ulambda_validation_against_base() {
        let mut cfg = RunConfig::new(Suite::Lambda0);
        cfg.base = BaseSpec::FsLift;
        cfg.ulambda = UlambdaSpec::Value(1.0); // fs-lift(2) carries 3
        cfg.samples = 2;
        assert!(matches!(run_suite(&cfg), Err(Error::Argument(_))));
        cfg.ulambda = UlambdaSpec::Value(3.0);
        cfg.lambda = Some(2.5);
        let report = run_suite(&cfg).unwrap();
        assert!(report.pass, "{report:?}");
        assert!((report.config.ulambda - 3.0).abs() < 1e-12);
    }

    #[test]
    fn lambda0_suite_passes_and_echoes_config() {
        let mut cfg = RunConfig::new(Suite::Lambda0);
        cfg.lambda = Some(1.0);
        cfg.ulambda = UlambdaSpec::Value(0.0);
        cfg.samples = 100;
        let report = run_suite(&cfg).unwrap();
        assert!(report.pass, "{report:?}");
        assert_eq!(report.suite, "lambda0");
        assert_eq!(report.config.samples, 100);
        let names: Vec<&str> = report.checks.iter().map(|c| c.name.as_str()).collect();
        assert!(names.contains(&"profile-value-at-zero"));
        assert!(names.contains(&"profile-endpoint-limit"));
        for check in &report.checks {
            assert!(check.samples >= 1);
        }
    }

    #[test]
    fn taubnut_requires_nonzero_constant() {
        let mut cfg = RunConfig::new(Suite::Taubnut);
        cfg.samples = 3;
        // heisenberg base has vanishing CR–Einstein constant.
        let err = run_suite(&cfg).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn emission_formats() {
        let report = ResidualReport {
            suite: "lambda0".into(),
            config: ConfigEcho {
                m: 2,
                base: "heisenberg".into(),
                lambda: 1.0,
                ulambda: 0.0,
                c: 0.25,
                samples: 10,
                seed: 42,
                tol: None,
                phi_margin: 0.2,
                format: "json".into(),
                jobs: 0,
            },
            checks: vec![CheckResult {
                name: "profile-ode-scalar".into(),
                samples: 10,
                max_abs: 0.25,
                max_rel: 1.5e-12,
                tol: 1e-10,
                pass: true,
            }],
            pass: true,
            wall_ms: 7,
        };
        let json = emit(&report, Format::Json);
        let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed["suite"], "lambda0");
        assert_eq!(parsed["pass"], true);
        assert_eq!(parsed["checks"][0]["name"], "profile-ode-scalar");
        assert!((parsed["checks"][0]["max_rel"].as_f64().unwrap() - 1.5e-12).abs() < 1e-25);
        assert_eq!(parsed["config"]["tol"], serde_json::Value::Null);
        // 17 significant digits on every float: exact string for a dyadic
        // value, and the shared formatter for one that is not.
        assert!(json.contains("2.5000000000000000e-1"));
        assert!(json.contains(&format!("{:.16e}", 1.5e-12)));

        let empty = ResidualReport { checks: vec![], ..report.clone() };
        let parsed: serde_json::Value =
            serde_json::from_str(&emit(&empty, Format::Json)).unwrap();
        assert_eq!(parsed["checks"].as_array().unwrap().len(), 0);

        let csv_text = emit(&report, Format::Csv);
        assert!(csv_text.starts_with("check,samples,max_abs,max_rel,tol,pass\n"));
        let mut rdr = csv::Reader::from_reader(csv_text.as_bytes());
        let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
        assert_eq!(rows.len(), 1);
        assert_eq!(&rows[0][0], "profile-ode-scalar");
        assert_eq!(rows[0][3].parse::<f64>().unwrap(), 1.5e-12);
    }

    #[test]
    fn reports_are_reproducible() {
        let mut cfg = RunConfig::new(Suite::Killing);
        cfg.lambda = Some(0.6);
        cfg.c = -0.4;
        cfg.samples = 4;
        let a = run_suite(&cfg).unwrap();
        let b = run_suite(&cfg).unwrap();
        let strip = |r: &ResidualReport| {
            emit(r, Format::Json)
                .lines()
                .filter(|l| !l.contains("wall_ms"))
                .collect::<Vec<_>>()
                .join("\n")
        };
        assert_eq!(strip(&a), strip(&b));
        assert!(a.pass);
    }
}
