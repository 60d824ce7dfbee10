//! Distinguished structure of the Einstein family: the Killing field shared
//! by every member, the Fefferman-type member and its conformal
//! characterization, the Kerr–Schild relation between members over the same
//! base, the Bianchi-type (Taub–NUT) radial form, and the second shear-free
//! null congruence dual to the defining one.

use num_complex::Complex64;

use super::oracle::EmbeddedWebster;
use super::{assemble_einstein, lambda0_from_phi_jet, EinsteinParams, SpacetimeModel};
use crate::curvature::{curvature_pack, rel, MetricField, Variance};
use crate::error::{Error, Result};
use crate::jet::{CJet, RJet};

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn ic(im: f64) -> Complex64 {
    Complex64::new(0.0, im)
}

fn require_einstein(model: &SpacetimeModel) -> Result<EinsteinParams> {
    model
        .params()
        .copied()
        .ok_or_else(|| Error::Argument("this check needs a model of the Einstein family".into()))
}

/// Residuals of the symmetry structure of an Einstein-family model.
#[derive(Debug, Clone, Copy)]
pub struct KillingResiduals {
    /// Killing equation `∇_{(a}α_{b)} = 0` for the metric-dual of
    /// `α = λ + ½λ₀κ`.
    pub sym: f64,
    /// Deviation of the squared length of the Killing field from `λ₀`.
    pub norm: f64,
    /// Trace-adjusted conformal-Killing residual of the null direction `∂_φ`
    /// with respect to the rescaled metric; small exactly for the
    /// Fefferman-type member.
    pub conformal: f64,
}

/// Check the Killing field `α = λ + ½λ₀κ` of an Einstein model at `pt`, and
/// the conformal-Killing property of the null direction.
pub fn killing_check(model: &SpacetimeModel, pt: &[f64]) -> Result<KillingResiduals> {
    require_einstein(model)?;
    let d = model.dim();
    let g = model.metric();
    let pack = curvature_pack(&g, pt, 2).map_err(|e| e.at_point(pt))?;
    let cf = model.coframe(pt, 2)?;
    let l0 = model.lambda().lambda0_jet(pt)?.promote().truncated(2);

    // α = λ + ½ λ₀ κ; its covariant derivative must be antisymmetric.
    let alpha: Vec<CJet> = (0..d)
        .map(|i| &cf.lam[i] + &(&l0 * &cf.kappa[i]).scaled(c(0.5)))
        .collect();
    let na = pack.covariant_derivative(&alpha, &[Variance::Down]);
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 1.0;
    for x in 0..d {
        for y in 0..d {
            let s = 0.5 * (na.get(&[x, y]) + na.get(&[y, x]));
            worst = worst.max(s.norm());
            scale = scale.max(na.get(&[x, y]).norm());
        }
    }
    let sym = rel(worst, scale);

    // Squared length g(v,v) = g^{ab} α_a α_b equals λ₀.
    let ginv = pack.inverse_values();
    let mut nv = c(0.0);
    for a in 0..d {
        for b in 0..d {
            nv += ginv.get(&[a, b]) * alpha[a].value() * alpha[b].value();
        }
    }
    let norm = rel((nv - l0.value()).norm(), 1.0f64.max(l0.value().norm()));

    // Conformal-Killing residual of k = ∂_φ for the rescaled metric.
    let gh = model.rescaled_metric();
    let hpack = curvature_pack(&gh, pt, 2).map_err(|e| e.at_point(pt))?;
    let gj = hpack.metric_jets();
    let kc: Vec<CJet> = (0..d).map(|b| gj.get(b, 0).clone()).collect();
    let nk = hpack.covariant_derivative(&kc, &[Variance::Down]);
    let ghv = hpack.metric_values();
    let ghinv = hpack.inverse_values();
    let mut s = vec![c(0.0); d * d];
    let mut tr = c(0.0);
    for x in 0..d {
        for y in 0..d {
            s[x * d + y] = 0.5 * (nk.get(&[x, y]) + nk.get(&[y, x]));
        }
    }
    for x in 0..d {
        for y in 0..d {
            tr += ghinv.get(&[x, y]) * s[x * d + y];
        }
    }
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 1.0;
    for x in 0..d {
        for y in 0..d {
            let dev = s[x * d + y] - tr / (d as f64) * ghv.get(&[x, y]);
            worst = worst.max(dev.norm());
            scale = scale.max(s[x * d + y].norm()).max(tr.norm());
        }
    }
    let conformal = rel(worst, scale);

    Ok(KillingResiduals { sym, norm, conformal })
}

/// The three conformal invariants characterizing the Fefferman-type member.
#[derive(Debug, Clone, Copy)]
pub struct FeffermanCriteria {
    /// `max |k^a W_{abcd}|` (relative) for the rescaled metric.
    pub weyl_res: f64,
    /// `max |k^c Y_{abc}|` (relative) for the rescaled metric.
    pub cotton_res: f64,
    /// The scalar invariant
    /// `(∇_a k^a)²/(2m+2)² − k^a k^b Ρ_{ab} − k^a ∇_a(∇_b k^b)/(2m+2)`,
    /// which equals `−1` for a Fefferman-type metric.
    pub scalar_value: f64,
}

/// Evaluate the conformal criteria of the Fefferman-type member at `pt`.
/// Errors with a precondition failure if the model parameters are not of
/// Fefferman type.
pub fn fefferman_criteria(model: &SpacetimeModel, pt: &[f64]) -> Result<FeffermanCriteria> {
    let params = require_einstein(model)?;
    if !params.is_fefferman() {
        return Err(Error::Precondition(format!(
            "parameters are not of Fefferman type: lambda = {}, ulambda = {}, c = {}",
            params.lambda, params.ulambda, params.c
        )));
    }
    let d = model.dim();
    let gh = model.rescaled_metric();
    let pack = curvature_pack(&gh, pt, 3).map_err(|e| e.at_point(pt))?;

    let w = pack.weyl_down_values()?;
    let mut worst: f64 = 0.0;
    for b in 0..d {
        for cc in 0..d {
            for e in 0..d {
                worst = worst.max(w.get(&[0, b, cc, e]).norm());
            }
        }
    }
    let weyl_res = rel(worst, 1.0f64.max(w.max_modulus()));

    let y = pack.cotton_values()?;
    let mut worst: f64 = 0.0;
    for a in 0..d {
        for b in 0..d {
            worst = worst.max(y.get(&[a, b, 0]).norm());
        }
    }
    let cotton_res = rel(worst, 1.0f64.max(y.max_modulus()));

    // Scalar invariant built from the divergence of k = ∂_φ.
    let n1 = d as f64; // 2m + 2
    let mut div = CJet::constant(d, 2, c(0.0));
    for a in 0..d {
        div = &div + pack.christoffel_jet(a, a, 0);
    }
    let p00 = pack.schouten_jet(0, 0)?.value();
    let dv = div.value();
    let s = dv * dv / (n1 * n1) - p00 - div.grad(0) / n1;
    Ok(FeffermanCriteria { weyl_res, cotton_res, scalar_value: s.re })
}

/// Residual of the Kerr–Schild relation between an Einstein model and the
/// Fefferman-type member over the same base: the difference of the rescaled
/// metrics must be `sec²φ (λ₀ − Λ̲/(2m+2)) κ⊗κ`.
pub fn kerr_schild_check(model: &SpacetimeModel, pt: &[f64]) -> Result<f64> {
    let params = require_einstein(model)?;
    let d = model.dim();
    let fe = assemble_einstein(model.base(), &params.fefferman_match())?;
    let gm = model.rescaled_metric().eval(pt)?;
    let gf = fe.rescaled_metric().eval(pt)?;
    let cf = model.coframe(pt, 2)?;
    let l0 = model.lambda().lambda0_jet(pt)?.value();
    let sec2 = 1.0 / (pt[0].cos() * pt[0].cos());
    let coef = sec2 * (l0 - params.ulambda / (d as f64));
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 1.0;
    for a in 0..d {
        for b in 0..d {
            let diff = gm.get(a, b).value() - gf.get(a, b).value();
            let expected = coef * cf.kappa[a].value() * cf.kappa[b].value();
            worst = worst.max((diff - expected).norm());
            scale = scale.max(diff.norm()).max(expected.norm());
        }
    }
    Ok(rel(worst, scale))
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// One point of the radial (Bianchi-type) form of an Einstein model over a
/// torsion-free CR–Einstein base with `Λ̲ ≠ 0`.
#[derive(Debug, Clone, Copy)]
pub struct TaubNutPoint {
    /// Radial coordinate `r = Λ̲ tan φ`.
    pub r: f64,
    /// Latitude `φ(r)`.
    pub phi: f64,
    /// Metric profile `F = −((r²+Λ̲²)/Λ̲²) λ₀(φ(r))`.
    pub f_value: f64,
    /// Residual of the cleared-denominator radial equation satisfied by `F`.
    pub f_ode_residual: f64,
    /// Round-trip deviation `|Λ̲ tan(φ(r)) − r|` (relative).
    pub round_trip: f64,
    /// Mass parameter extracted from `F` by subtracting the polynomial and
    /// `1/r` parts (undefined at `r = 0`).
    pub mass: Option<f64>,
    /// Closed-form mass `−Λ̲^{2m−1} c̲`.
    pub mass_reference: f64,
}

/// Map an Einstein model with `Λ̲ ≠ 0` to its radial form at radius `r`.
pub fn taubnut_map(params: &EinsteinParams, r: f64) -> Result<TaubNutPoint> {
    let ul = params.ulambda;
    if ul == 0.0 {
        return Err(Error::Argument(
            "the radial form needs a nonzero CR–Einstein constant".into(),
        ));
    }
    let m = params.m;
    let rj = RJet::coordinate(&[r], 0, 3)?;
    let phi_j = rj.scaled(1.0 / ul).try_atan()?;
    let phi = phi_j.value();
    let round_trip = rel((ul * phi.tan() - r).abs(), 1.0f64.max(r.abs()));

    let l0_j = lambda0_from_phi_jet(params, &phi_j)?;
    let r2 = &rj * &rj;
    let w = &r2 + &RJet::constant(1, 3, ul * ul); // r² + Λ̲²
    let q = w.scaled(1.0 / (ul * ul)); // sec²φ along the map
    let f_j = -&(&q * &l0_j);
    let f_value = f_j.value();

    // u = (r²+Λ̲²)^m F satisfies r u′ − u = (r²+Λ̲²)^m Λ̲ − (r²+Λ̲²)^{m+1} Λ/Λ̲².
    let wm = w.try_powi(m as i32)?;
    let u = &wm * &f_j;
    let t1 = r * u.derivative(0).value();
    let t2 = -u.value();
    let t3 = -wm.value() * ul;
    let t4 = w.try_powi(m as i32 + 1)?.value() * params.lambda / (ul * ul);
    let f_ode_residual = rel(
        (t1 + t2 + t3 + t4).abs(),
        [t1, t2, t3, t4].iter().fold(1.0f64, |a, t| a.max(t.abs())),
    );

    // Mass extraction: subtract from u/r the polynomial-plus-1/r part.
    let mass = if r.abs() > 1e-3 {
        let mut p = -ul.powi(2 * m as i32) / r;
        for j in 1..=m {
            p += binom(m, j) * ul.powi(2 * (m - j) as i32) * r.powi(2 * j as i32 - 1)
                / (2.0 * j as f64 - 1.0);
        }
        let mut p2 = -ul.powi(2 * m as i32 + 2) / r;
        for j in 1..=(m + 1) {
            p2 += binom(m + 1, j) * ul.powi(2 * (m + 1 - j) as i32) * r.powi(2 * j as i32 - 1)
                / (2.0 * j as f64 - 1.0);
        }
        let poly = ul * p - params.lambda / (ul * ul) * p2;
        Some(u.value() / r - poly)
    } else {
        None
    };
    let mass_reference = -ul.powi(2 * m as i32 - 1) * params.c;

    Ok(TaubNutPoint { r, phi, f_value, f_ode_residual, round_trip, mass, mass_reference })
}

/// Outcome classification of the dual-congruence check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DualRobinsonStatus {
    /// `λ₀ ≠ 0` at the point: both dual coframe displays checked.
    Checked,
    /// `λ₀ ≡ 0` for these parameters: `λ` is parallel and no dual structure
    /// exists.
    ParallelLambda,
    /// `λ₀` vanishes near this point but not identically: the dual coframe is
    /// singular here and the displays are skipped.
    SkippedNearZero,
}

/// Residuals of the second (dual) shear-free congruence of an Einstein model.
#[derive(Debug, Clone, Copy)]
pub struct DualRobinsonRecord {
    /// Value of `λ₀` at the point.
    pub lambda0: f64,
    pub status: DualRobinsonStatus,
    /// `∇(2λ/λ₀)` pattern residual (when checked).
    pub primary_residual: Option<f64>,
    /// `∇(½λ₀κ)` pattern residual (when checked).
    pub dual_residual: Option<f64>,
    /// `max |∇λ|` when the profile vanishes identically.
    pub parallel_residual: Option<f64>,
    /// Geodesic, shear and expansion invariants of the `ℓ` congruence.
    pub congruence_residual: f64,
}

/// Check the dual shear-free congruence generated by `ℓ` and its defining
/// coframe derivatives at `pt`.
pub fn dual_robinson_check(model: &SpacetimeModel, pt: &[f64]) -> Result<DualRobinsonRecord> {
    let params = require_einstein(model)?;
    let m = model.m();
    let d = model.dim();
    let g = model.metric();
    let pack = curvature_pack(&g, pt, 2).map_err(|e| e.at_point(pt))?;
    let cf = model.coframe(pt, 2)?;
    let fr = model.frame(pt)?;
    let l0c = model.lambda().lambda0_jet(pt)?.promote().truncated(2);
    let l0 = l0c.value().re;
    let l0d = l0c.derivative(0).value().re;
    let ll = 0usize;
    let lk = d - 1;

    // ℓ as a vector field on the chart: ℓ = ½(Reeb-lift − λ₀ ∂_φ).
    let ew = EmbeddedWebster::new(model.base(), pt)?;
    let reeb = ew.frame_vector(0);
    let mut ell: Vec<CJet> = (0..d).map(|i| reeb[i].scaled(c(0.5)).truncated(2)).collect();
    ell[0] = l0c.scaled(c(-0.5));
    let nell = pack.covariant_derivative(&ell, &[Variance::Up]);
    let ellv: Vec<Complex64> = ell.iter().map(|j| j.value()).collect();
    let kapv: Vec<Complex64> = cf.kappa.iter().map(|j| j.value()).collect();

    // Geodesic deviation: ∇_ℓ ℓ must be proportional to ℓ, with the
    // coefficient read off through κ (since κ(ℓ) = 1).
    let mut acc_scale: f64 = 1.0;
    let mut b = vec![c(0.0); d];
    for cc in 0..d {
        for x in 0..d {
            b[cc] += ellv[x] * nell.get(&[x, cc]);
        }
        acc_scale = acc_scale.max(b[cc].norm());
    }
    let mut mu = c(0.0);
    for cc in 0..d {
        mu += kapv[cc] * b[cc];
    }
    let mut geo: f64 = 0.0;
    for cc in 0..d {
        geo = geo.max((b[cc] - mu * ellv[cc]).norm());
    }

    // Screen deformation of the congruence: the symmetric part of ∇λ on the
    // screen directions carries the shear and expansion, both of which must
    // vanish.
    let dl = pack.covariant_derivative(&cf.lam, &[Variance::Down]);
    let mut shear: f64 = 0.0;
    for a in 1..=(2 * m) {
        for bq in 1..=(2 * m) {
            let s = 0.5 * (fr.contract(&dl, &[a, bq]) + fr.contract(&dl, &[bq, a]));
            shear = shear.max(s.norm());
            acc_scale = acc_scale.max(fr.contract(&dl, &[a, bq]).norm());
        }
    }

    // Expansion invariant: div ℓ − (∇_ℓ λ)(k) must vanish.
    let mut div = c(0.0);
    for x in 0..d {
        div += nell.get(&[x, x]);
    }
    let eps = (div - fr.contract(&dl, &[ll, lk])).norm();
    acc_scale = acc_scale.max(div.norm());
    let congruence_residual = rel(geo.max(shear).max(eps), acc_scale);

    let hol = |a: usize| a + 1;
    let anti = |a: usize| m + 1 + a;
    let identically_zero = params.lambda == 0.0 && params.ulambda == 0.0 && params.c == 0.0;
    let mut primary_residual = None;
    let mut dual_residual = None;
    let mut parallel_residual = None;
    let status = if identically_zero {
        let mut worst: f64 = 0.0;
        for x in 0..d {
            for y in 0..d {
                worst = worst.max(fr.contract(&dl, &[x, y]).norm());
            }
        }
        parallel_residual = Some(worst);
        DualRobinsonStatus::ParallelLambda
    } else if l0.abs() < 1e-4 {
        DualRobinsonStatus::SkippedNearZero
    } else {
        // Primary display: ∇(2λ/λ₀) has the twist pattern of a parallel-type
        // form with one residual `λ̇₀` entry on (k,k).
        let scale_j = l0c.try_recip()?.scaled(c(2.0));
        let lamp: Vec<CJet> = (0..d).map(|i| &cf.lam[i] * &scale_j).collect();
        let nlp = pack.covariant_derivative(&lamp, &[Variance::Down]);
        let mut f_worst: f64 = 0.0;
        let mut f_scale: f64 = 1.0;
        for x in 0..d {
            for y in 0..d {
                let numeric = fr.contract(&nlp, &[x, y]);
                let mut expected = c(0.0);
                if (1..=m).contains(&x) && y == x + m {
                    expected += ic(1.0);
                }
                if (1..=m).contains(&y) && x == y + m {
                    expected -= ic(1.0);
                }
                if x == lk && y == lk {
                    expected -= c(2.0 * l0d / (l0 * l0));
                }
                f_worst = f_worst.max((numeric - expected).norm());
                f_scale = f_scale.max(numeric.norm()).max(expected.norm());
            }
        }
        primary_residual = Some(rel(f_worst, f_scale));

        // Dual display: ∇(½λ₀κ) carries the λ₀-scaled twist with one
        // residual `λ̇₀` entry on (k,ℓ).
        let kapp: Vec<CJet> = (0..d).map(|i| (&l0c * &cf.kappa[i]).scaled(c(0.5))).collect();
        let nkp = pack.covariant_derivative(&kapp, &[Variance::Down]);
        let mut f_worst: f64 = 0.0;
        let mut f_scale: f64 = 1.0;
        for x in 0..d {
            for y in 0..d {
                let numeric = fr.contract(&nkp, &[x, y]);
                let mut expected = c(0.0);
                for a in 0..m {
                    if x == hol(a) && y == anti(a) {
                        expected += ic(0.5 * l0);
                    }
                    if x == anti(a) && y == hol(a) {
                        expected -= ic(0.5 * l0);
                    }
                }
                if x == lk && y == ll {
                    expected += c(0.5 * l0d);
                }
                f_worst = f_worst.max((numeric - expected).norm());
                f_scale = f_scale.max(numeric.norm()).max(expected.norm());
            }
        }
        dual_residual = Some(rel(f_worst, f_scale));
        DualRobinsonStatus::Checked
    };

    Ok(DualRobinsonRecord {
        lambda0: l0,
        status,
        primary_residual,
        dual_residual,
        parallel_residual,
        congruence_residual,
    })
}
