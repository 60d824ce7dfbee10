//! Built-in almost-CR bases: the flat model on the Heisenberg group and
//! circle-bundle lifts of Kähler-type data given by a potential.

use std::sync::Arc;

use num_complex::Complex64;

use super::{CRBase, RawCoframe};
use crate::curvature::{curvature_pack, rel, FnMetric};
use crate::error::{Error, Result};
use crate::jet::{CJet, RJet};
use crate::tensor::{max_abs_diff, JetMatrix};

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn im() -> Complex64 {
    Complex64::new(0.0, 1.0)
}

/// Standard chart coordinate names `(t, x1, y1, ..., xm, ym)`.
pub fn standard_coords(m: usize) -> Vec<String> {
    let mut names = vec!["t".to_string()];
    for a in 1..=m {
        names.push(format!("x{a}"));
        names.push(format!("y{a}"));
    }
    names
}

/// The flat model of rank `m`: chart `(t, x^a, y^a)` with
/// `theta0 = dt + Σ (x^a dy^a - y^a dx^a)`, `theta^a = dz^a`, identity Levi
/// form.  All Webster data vanishes identically.
pub fn heisenberg(m: usize) -> Result<CRBase> {
    if m == 0 {
        return Err(Error::Argument("heisenberg needs holomorphic rank m >= 1".into()));
    }
    let d = 2 * m + 1;
    let eval = move |pt: &[f64], order: u8| -> Result<RawCoframe> {
        let mut theta0 = Vec::with_capacity(d);
        theta0.push(CJet::constant(d, order, c(1.0)));
        for a in 0..m {
            let x = CJet::coordinate(pt, 1 + 2 * a, order)?;
            let y = CJet::coordinate(pt, 2 + 2 * a, order)?;
            theta0.push(-&y);
            theta0.push(x);
        }
        let mut theta = Vec::with_capacity(m);
        for a in 0..m {
            let mut row = vec![CJet::constant(d, order, c(0.0)); d];
            row[1 + 2 * a] = CJet::constant(d, order, c(1.0));
            row[2 + 2 * a] = CJet::constant(d, order, im());
            theta.push(row);
        }
        let levi = (0..m)
            .map(|a| {
                (0..m)
                    .map(|b| CJet::constant(d, order, c(if a == b { 1.0 } else { 0.0 })))
                    .collect()
            })
            .collect();
        Ok(RawCoframe { theta0, theta, levi })
    };
    CRBase::new(m, standard_coords(m), Arc::new(eval))
}

/// Kähler-type potential on a chart of `C^m` with real coordinates
/// `(x^1, y^1, ..., x^m, y^m)`.  Implementations supply the holomorphic
/// gradient and the metric `h_{alpha beta-bar} = ∂_alpha ∂_beta-bar K` in
/// closed form as jets (so that third-order coframe jets never require
/// fifth-order derivatives of `K` numerically).
pub trait KahlerPotential: Send + Sync {
    fn m(&self) -> usize;
    /// The potential `K` itself (real-valued).
    fn value(&self, z: &[f64], order: u8) -> Result<RJet>;
    /// Holomorphic derivatives `∂_alpha K`, length `m`, jets on `R^{2m}`.
    fn d_alpha(&self, z: &[f64], order: u8) -> Result<Vec<CJet>>;
    /// The induced Hermitian metric `h_{alpha beta-bar}`.
    fn levi(&self, z: &[f64], order: u8) -> Result<Vec<Vec<CJet>>>;
}

/// Complex coordinate jets `z^a = x^a + i y^a` and conjugates on `R^{2m}`.
fn complex_coords(m: usize, z: &[f64], order: u8) -> Result<(Vec<CJet>, Vec<CJet>)> {
    let mut zj = Vec::with_capacity(m);
    let mut zb = Vec::with_capacity(m);
    for a in 0..m {
        let x = CJet::coordinate(z, 2 * a, order)?;
        let y = CJet::coordinate(z, 2 * a + 1, order)?;
        let zz = &x + &y.scaled(im());
        zb.push(zz.conj());
        zj.push(zz);
    }
    Ok((zj, zb))
}

/// `K = |z|^2`: the flat potential.  Its lift reproduces the flat model.
pub struct FlatPotential {
    pub m: usize,
}

impl KahlerPotential for FlatPotential {
    fn m(&self) -> usize {
        self.m
    }

    fn value(&self, z: &[f64], order: u8) -> Result<RJet> {
        let (zj, zb) = complex_coords(self.m, z, order)?;
        let mut acc = CJet::constant(2 * self.m, order, c(0.0));
        for a in 0..self.m {
            acc = &acc + &(&zj[a] * &zb[a]);
        }
        Ok(acc.real_part())
    }

    fn d_alpha(&self, z: &[f64], order: u8) -> Result<Vec<CJet>> {
        let (_, zb) = complex_coords(self.m, z, order)?;
        Ok(zb)
    }

    fn levi(&self, z: &[f64], order: u8) -> Result<Vec<Vec<CJet>>> {
        let _ = z;
        let n = 2 * self.m;
        Ok((0..self.m)
            .map(|a| {
                (0..self.m)
                    .map(|b| CJet::constant(n, order, c(if a == b { 1.0 } else { 0.0 })))
                    .collect()
            })
            .collect())
    }
}

/// `K = log(1 + |z|^2)`: the Fubini–Study potential on the affine chart.
/// The induced metric is Einstein with constant `m + 1` in the normalisation
/// used by [`kahler_base_metric`].
pub struct FubiniStudyPotential {
    pub m: usize,
}

impl FubiniStudyPotential {
    /// `1 + |z|^2` and its reciprocal as jets.
    fn denom(&self, z: &[f64], order: u8) -> Result<(Vec<CJet>, Vec<CJet>, CJet, CJet)> {
        let (zj, zb) = complex_coords(self.m, z, order)?;
        let mut s = CJet::constant(2 * self.m, order, c(1.0));
        for a in 0..self.m {
            s = &s + &(&zj[a] * &zb[a]);
        }
        let sinv = s.try_recip()?;
        Ok((zj, zb, s, sinv))
    }
}

impl KahlerPotential for FubiniStudyPotential {
    fn m(&self) -> usize {
        self.m
    }

    fn value(&self, z: &[f64], order: u8) -> Result<RJet> {
        let (_, _, s, _) = self.denom(z, order)?;
        Ok(s.try_ln()?.real_part())
    }

    fn d_alpha(&self, z: &[f64], order: u8) -> Result<Vec<CJet>> {
        let (_, zb, _, sinv) = self.denom(z, order)?;
        Ok(zb.iter().map(|b| b * &sinv).collect())
    }

    fn levi(&self, z: &[f64], order: u8) -> Result<Vec<Vec<CJet>>> {
        let (zj, zb, _, sinv) = self.denom(z, order)?;
        let sinv2 = &sinv * &sinv;
        let mut h = Vec::with_capacity(self.m);
        for a in 0..self.m {
            let mut row = Vec::with_capacity(self.m);
            for b in 0..self.m {
                let mut v = -&(&(&zb[a] * &zj[b]) * &sinv2);
                if a == b {
                    v = &v + &sinv;
                }
                row.push(v);
            }
            h.push(row);
        }
        Ok(h)
    }
}

/// The transverse Riemannian metric induced by a potential:
/// `g_ij = 2 Re Σ h_{alpha beta-bar} (dz^alpha)_i (conj(dz^beta))_j`
/// on `R^{2m}` (positive definite wherever `h` is).
pub fn kahler_base_metric(potential: &Arc<dyn KahlerPotential>) -> FnMetric {
    let p = potential.clone();
    let m = p.m();
    let n = 2 * m;
    FnMetric::new(
        n,
        (n, 0),
        Arc::new(move |x: &[f64]| -> Result<JetMatrix> {
            let h = p.levi(x, 3)?;
            let dz = |a: usize, i: usize| -> Complex64 {
                if i == 2 * a {
                    c(1.0)
                } else if i == 2 * a + 1 {
                    im()
                } else {
                    c(0.0)
                }
            };
            Ok(JetMatrix::from_fn(n, |ii, jj| {
                let mut acc = CJet::constant(n, 3, c(0.0));
                for a in 0..m {
                    for b in 0..m {
                        let coeff = dz(a, ii) * dz(b, jj).conj();
                        if coeff != c(0.0) {
                            acc = &acc + &h[a][b].scaled(coeff);
                        }
                    }
                }
                &acc + &acc.conj()
            }))
        }),
    )
}

/// Deterministic sample points used for the construction-time Einstein check
/// of [`lift_from_kahler`].
fn einstein_check_points(n: usize) -> Vec<Vec<f64>> {
    (0..5)
        .map(|k| {
            (0..n)
                .map(|i| 0.31 * (1.7 * (i as f64 + 1.0) + 0.9 * k as f64).sin())
                .collect()
        })
        .collect()
}

/// Circle-bundle lift of a Kähler-type potential: chart `(t, x^a, y^a)` with
///
/// ```text
/// theta0  = dt + Im Σ (∂_alpha K) dz^alpha ,   theta^alpha = dz^alpha ,
/// ```
///
/// so that `d theta0` equals half the pull-back of the Hermitian 2-form of
/// the transverse metric.  When `lambda_tilde` is nonzero the transverse
/// metric is required to be Einstein with that constant (verified through the
/// curvature engine at fixed sample points); the resulting base then carries
/// a CR–Einstein structure with the same constant.
pub fn lift_from_kahler(
    potential: Arc<dyn KahlerPotential>,
    lambda_tilde: f64,
) -> Result<CRBase> {
    let m = potential.m();
    if m == 0 {
        return Err(Error::Argument("potential must have rank m >= 1".into()));
    }
    if lambda_tilde != 0.0 {
        let metric = kahler_base_metric(&potential);
        for pt in einstein_check_points(2 * m) {
            let pack = curvature_pack(&metric, &pt, 2)?;
            let g = pack.metric_values();
            let ric = pack.ricci_values();
            let res = max_abs_diff(&ric, &g.scale(c(lambda_tilde)));
            let scale = g.max_modulus() * lambda_tilde.abs().max(1.0);
            if rel(res, scale) > 1e-6 {
                return Err(Error::Precondition(format!(
                    "transverse metric is not Einstein with constant {lambda_tilde} \
                     (residual {res:.3e} at {pt:?})"
                )));
            }
        }
    }
    let d = 2 * m + 1;
    let p = potential.clone();
    let eval = move |pt: &[f64], order: u8| -> Result<RawCoframe> {
        let base_pt = &pt[1..];
        let axis_map: Vec<usize> = (1..=2 * m).collect();
        let da = p.d_alpha(base_pt, order)?;
        let mut theta0 = vec![CJet::constant(d, order, c(0.0)); d];
        theta0[0] = CJet::constant(d, order, c(1.0));
        for (a, dk) in da.iter().enumerate() {
            let dk = dk.embedded(d, &axis_map);
            theta0[1 + 2 * a] = dk.imag_part().promote();
            theta0[2 + 2 * a] = dk.real_part().promote();
        }
        let mut theta = Vec::with_capacity(m);
        for a in 0..m {
            let mut row = vec![CJet::constant(d, order, c(0.0)); d];
            row[1 + 2 * a] = CJet::constant(d, order, c(1.0));
            row[2 + 2 * a] = CJet::constant(d, order, im());
            theta.push(row);
        }
        let levi_base = p.levi(base_pt, order)?;
        let levi = levi_base
            .iter()
            .map(|row| row.iter().map(|h| h.embedded(d, &axis_map)).collect())
            .collect();
        Ok(RawCoframe { theta0, theta, levi })
    };
    Ok(CRBase::new(m, standard_coords(m), Arc::new(eval))?
        .with_kahler_einstein_constant(lambda_tilde))
}

/// Lift of the Fubini–Study potential (`m >= 2`): a compact-type CR–Einstein
/// base with Einstein constant `m + 1`.
pub fn fs_lift(m: usize) -> Result<CRBase> {
    if m < 2 {
        return Err(Error::Argument(
            "fs_lift needs holomorphic rank m >= 2 (the rank-1 case carries no \
             curvature content in this suite)"
                .into(),
        ));
    }
    lift_from_kahler(Arc::new(FubiniStudyPotential { m }), m as f64 + 1.0)
}
