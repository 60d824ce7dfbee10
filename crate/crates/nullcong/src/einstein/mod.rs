//! Lorentzian Einstein metrics fibred over an almost-CR base.
//!
//! The spacetime chart is `(φ, base coordinates)` with the distinguished null
//! congruence generated by `k = ∂/∂φ` (axis 0).  The metric has the form
//! `g = 2κ⊙λ + h` with `κ` twice the pulled-back contact form, `h` the
//! pulled-back Levi form, and `λ = dφ + λ_α θ^α + λ_ᾱ θ̄^ᾱ + λ₀ θ⁰` carrying
//! the free data; the physical metric is the rescaling `ĝ = sec²φ · g`.
//!
//! For the Einstein family the screen components `λ_α` vanish and `λ₀` is an
//! explicit trigonometric profile in `φ` determined by the cosmological
//! constant, the CR–Einstein constant of the base, and one further constant.

mod oracle;
mod special;

pub use oracle::{
    appendix_oracle, bce_coefficients, coframe_derivative_check, weyl_einstein_components,
    AppendixRecord, BceCoefficients, CoframeDerivativeResiduals, WeylComponentRecord,
};
pub use special::{
    dual_robinson_check, fefferman_criteria, kerr_schild_check, killing_check, taubnut_map,
    DualRobinsonRecord, DualRobinsonStatus, FeffermanCriteria, KillingResiduals, TaubNutPoint,
};

use num_complex::Complex64;
use std::sync::Arc;

use crate::cr::{cr_einstein_check, webster_curvature, CRBase};
use crate::curvature::{curvature_pack, rel, FnMetric};
use crate::error::{Error, Result};
use crate::field::{Polynomial, SharedField, SharedRealField};
use crate::jet::{CJet, RJet};
use crate::tensor::{JetMatrix, PointTensor};

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Parameters of the Einstein family: screen rank `m ≥ 2`, cosmological
/// constant `Λ` (so the Ricci scalar is `(2m+2)Λ`), the CR–Einstein constant
/// `Λ̲` of the base, and the free constant `c̲` of the `λ₀` profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EinsteinParams {
    pub m: usize,
    pub lambda: f64,
    pub ulambda: f64,
    pub c: f64,
}

impl EinsteinParams {
    pub fn new(m: usize, lambda: f64, ulambda: f64, c: f64) -> Result<Self> {
        if m < 2 {
            return Err(Error::Argument(format!(
                "Einstein family requires screen rank m >= 2, got {m}"
            )));
        }
        Ok(EinsteinParams { m, lambda, ulambda, c })
    }

    /// True when the parameters satisfy `(2m+2)Λ = (2m+1)Λ̲` and `c̲ = 0`,
    /// the case in which `λ₀` is constant and the metric is of Fefferman type.
    pub fn is_fefferman(&self) -> bool {
        let scale = 1.0f64.max(self.lambda.abs()).max(self.ulambda.abs());
        let m = self.m as f64;
        ((2.0 * m + 2.0) * self.lambda - (2.0 * m + 1.0) * self.ulambda).abs() < 1e-12 * scale
            && self.c.abs() < 1e-12
    }

    /// The matching Fefferman-type parameters over the same base
    /// (`Λ = (2m+1)Λ̲/(2m+2)`, `c̲ = 0`).
    pub fn fefferman_match(&self) -> EinsteinParams {
        let m = self.m as f64;
        EinsteinParams {
            m: self.m,
            lambda: (2.0 * m + 1.0) / (2.0 * m + 2.0) * self.ulambda,
            ulambda: self.ulambda,
            c: 0.0,
        }
    }
}

/// Coefficients `a₀..a_m` of the cosine expansion of the `λ₀` profile:
/// `a₀ = 1`, `a_j = (2m−2j+4)/(2m−2j+1) · a_{j−1}`.
pub fn aj_coefficients(m: usize) -> Result<Vec<f64>> {
    if m == 0 {
        return Err(Error::Argument("profile coefficients need m >= 1".into()));
    }
    let mut a = Vec::with_capacity(m + 1);
    a.push(1.0);
    for j in 1..=m {
        let mj = (2 * m) as f64 - 2.0 * j as f64;
        let prev = a[j - 1];
        a.push((mj + 4.0) / (mj + 1.0) * prev);
    }
    Ok(a)
}

/// The `λ₀` profile evaluated on an arbitrary jet of `φ`:
/// `λ₀ = Λ̲/(2m+2) + (Λ/(2m+1) − Λ̲/(2m+2)) (Σ_j a_j cos^{2j}φ − 2 a_m cos^{2m+2}φ)
///       + c̲ cos^{2m+1}φ sinφ`.
pub fn lambda0_from_phi_jet(params: &EinsteinParams, phi: &RJet) -> Result<RJet> {
    let m = params.m;
    let a = aj_coefficients(m)?;
    let dim = phi.dim();
    let order = phi.order();
    let cosj = phi.cos();
    let sinj = phi.sin();
    let cos2 = cosj.mul_jet(&cosj);
    let amp = params.lambda / (2.0 * m as f64 + 1.0) - params.ulambda / (2.0 * m as f64 + 2.0);
    let mut series = RJet::constant(dim, order, 0.0);
    let mut upow = RJet::constant(dim, order, 1.0);
    let mut cos2m = RJet::constant(dim, order, 1.0);
    for (j, &aj) in a.iter().enumerate() {
        series = series.add_jet(&upow.scaled(aj));
        if j == m {
            cos2m = upow.clone();
        }
        upow = upow.mul_jet(&cos2);
    }
    // After the loop `upow = cos^{2m+2}` and `cos2m = cos^{2m}`.
    series = series.sub_jet(&upow.scaled(2.0 * a[m]));
    let odd = cos2m.mul_jet(&cosj).mul_jet(&sinj);
    Ok(RJet::constant(dim, order, params.ulambda / (2.0 * m as f64 + 2.0))
        .add_jet(&series.scaled(amp))
        .add_jet(&odd.scaled(params.c)))
}

/// The `λ₀` profile as a one-dimensional order-3 jet in `φ`.
pub fn lambda0(params: &EinsteinParams, phi: f64) -> Result<RJet> {
    let pj = RJet::coordinate(&[phi], 0, 3)?;
    lambda0_from_phi_jet(params, &pj)
}

/// Residuals of the differential equations satisfied by the `λ₀` profile.
#[derive(Debug, Clone, Copy)]
pub struct Lambda0OdeResiduals {
    /// Second-order equation from the scalar-trace component.
    pub scalar_ode: f64,
    /// Second-order equation from the mixed `(ℓ,k)` component.
    pub mixed_ode: f64,
    /// First-order reduction of the two second-order equations.
    pub first_order: f64,
    /// Alternate second-order combination (holomorphic trace component).
    pub alternate_ode: f64,
    /// Deviation of the extracted `cos^{2m+2}` coefficient from
    /// `−2(Λ/(2m+1) − Λ̲/(2m+2)) a_m`.
    pub b_coefficient: f64,
}

impl Lambda0OdeResiduals {
    pub fn max(&self) -> f64 {
        self.scalar_ode
            .max(self.mixed_ode)
            .max(self.first_order)
            .max(self.alternate_ode)
            .max(self.b_coefficient)
    }
}

/// Evaluate the four ODE residuals of the `λ₀` profile at `φ`, plus the
/// coefficient relation for the `cos^{2m+2}` term.
pub fn lambda0_ode_residuals(params: &EinsteinParams, phi: f64) -> Result<Lambda0OdeResiduals> {
    let m = params.m as f64;
    let lj = lambda0(params, phi)?;
    let l0 = lj.value();
    let l1 = lj.derivative(0).value();
    let l2 = lj.derivative(0).derivative(0).value();
    let t = phi.tan();
    let s2 = 1.0 / phi.cos().powi(2);
    let (lam, ulam) = (params.lambda, params.ulambda);

    let norm = |lhs: f64, scale: f64| rel(lhs.abs(), scale.max(1.0));

    // λ̈₀ + 2(2m+1) tanφ λ̇₀ + (−4m(m+1) + 2(m+1)(2m+1) sec²φ) λ₀
    //   = 2(m+1) Λ sec²φ − 2m Λ̲
    let r1_lhs = l2 + 2.0 * (2.0 * m + 1.0) * t * l1
        + (-4.0 * m * (m + 1.0) + 2.0 * (m + 1.0) * (2.0 * m + 1.0) * s2) * l0;
    let r1_rhs = 2.0 * (m + 1.0) * lam * s2 - 2.0 * m * ulam;
    let scalar_ode = norm(r1_lhs - r1_rhs, r1_lhs.abs().max(r1_rhs.abs()));

    // λ̈₀ + (2m+1) tanφ λ̇₀ + (2(m+1) + (2m+1) sec²φ) λ₀ = Λ sec²φ + Λ̲
    let r2_lhs = l2 + (2.0 * m + 1.0) * t * l1 + (2.0 * (m + 1.0) + (2.0 * m + 1.0) * s2) * l0;
    let r2_rhs = lam * s2 + ulam;
    let mixed_ode = norm(r2_lhs - r2_rhs, r2_lhs.abs().max(r2_rhs.abs()));

    // tanφ λ̇₀ − (2m+2 − (2m+1) sec²φ) λ₀ = Λ sec²φ − Λ̲
    let r4_lhs = t * l1 - (2.0 * m + 2.0 - (2.0 * m + 1.0) * s2) * l0;
    let r4_rhs = lam * s2 - ulam;
    let first_order = norm(r4_lhs - r4_rhs, r4_lhs.abs().max(r4_rhs.abs()));

    // λ̈₀ + (4(m+1)² − 2m(2m+1) sec²φ) λ₀ = −2m Λ sec²φ + 2(m+1) Λ̲
    let r3_lhs = l2 + (4.0 * (m + 1.0).powi(2) - 2.0 * m * (2.0 * m + 1.0) * s2) * l0;
    let r3_rhs = -2.0 * m * lam * s2 + 2.0 * (m + 1.0) * ulam;
    let alternate_ode = norm(r3_lhs - r3_rhs, r3_lhs.abs().max(r3_rhs.abs()));

    // Recover the cos^{2m+2} coefficient of the even part of the profile by
    // polynomial interpolation in u = cos²φ.
    let mi = params.m;
    let n_pts = mi + 2;
    let mut v = nalgebra::DMatrix::<f64>::zeros(n_pts, n_pts);
    let mut rhs = nalgebra::DVector::<f64>::zeros(n_pts);
    for k in 0..n_pts {
        // Chebyshev-spread samples of u in [0.2, 1.0].
        let x = (std::f64::consts::PI * (k as f64 + 0.5) / n_pts as f64).cos();
        let u = 0.6 + 0.4 * x;
        let ph = u.sqrt().acos();
        let even = 0.5
            * (lambda0(params, ph)?.value() + lambda0(params, -ph)?.value());
        rhs[k] = even;
        let mut up = 1.0;
        for j in 0..n_pts {
            v[(k, j)] = up;
            up *= u;
        }
    }
    let sol = v
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Numeric("profile interpolation system is singular".into()))?;
    let a = aj_coefficients(mi)?;
    let b_target = -2.0
        * (params.lambda / (2.0 * m + 1.0) - params.ulambda / (2.0 * m + 2.0))
        * a[mi];
    let b_coefficient = (sol[n_pts - 1] - b_target).abs();

    Ok(Lambda0OdeResiduals {
        scalar_ode,
        mixed_ode,
        first_order,
        alternate_ode,
        b_coefficient,
    })
}

/// The free data of the general metric form: `m` complex screen components
/// `λ_α` and the real component `λ₀`, all fields on the product chart.
#[derive(Clone)]
pub struct GeneralLambda {
    m: usize,
    lambda_alpha: Vec<SharedField>,
    lambda0: SharedRealField,
}

impl std::fmt::Debug for GeneralLambda {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GeneralLambda").field("m", &self.m).finish_non_exhaustive()
    }
}

impl GeneralLambda {
    pub fn new(m: usize, lambda_alpha: Vec<SharedField>, lambda0: SharedRealField) -> Result<Self> {
        if lambda_alpha.len() != m {
            return Err(Error::Argument(format!(
                "expected {m} screen components, got {}",
                lambda_alpha.len()
            )));
        }
        Ok(GeneralLambda { m, lambda_alpha, lambda0 })
    }

    /// The trivial data `λ = dφ`.
    pub fn flat(m: usize) -> Self {
        let zero: SharedField = Arc::new(move |pt: &[f64]| {
            Ok(CJet::constant(pt.len(), 3, Complex64::new(0.0, 0.0)))
        });
        let zero_r: SharedRealField =
            Arc::new(move |pt: &[f64]| Ok(RJet::constant(pt.len(), 3, 0.0)));
        GeneralLambda { m, lambda_alpha: vec![zero; m], lambda0: zero_r }
    }

    /// The Einstein-family data: vanishing screen components and the built-in
    /// `λ₀(φ)` profile.
    pub fn from_einstein(params: &EinsteinParams) -> Self {
        let m = params.m;
        let p = *params;
        let zero: SharedField = Arc::new(move |pt: &[f64]| {
            Ok(CJet::constant(pt.len(), 3, Complex64::new(0.0, 0.0)))
        });
        let profile: SharedRealField = Arc::new(move |pt: &[f64]| {
            let phi = RJet::coordinate(pt, 0, 3)?;
            lambda0_from_phi_jet(&p, &phi)
        });
        GeneralLambda { m, lambda_alpha: vec![zero; m], lambda0: profile }
    }

    /// Random polynomial data for verification sweeps (degree ≤ 2 in all
    /// product-chart coordinates, coefficients of the given scale, `λ₀` real).
    pub fn random(m: usize, rng: &mut impl rand::Rng, scale: f64) -> Self {
        let dim = 2 * m + 2;
        let lambda_alpha = (0..m)
            .map(|_| Polynomial::random(rng, dim, 2, 5, scale, false).into_field())
            .collect();
        let lambda0 = Polynomial::random(rng, dim, 2, 5, scale, true).into_real_field();
        GeneralLambda { m, lambda_alpha, lambda0 }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Jet of `λ_α` (1-based `alpha`) at a product-chart point.
    pub fn alpha_jet(&self, alpha: usize, pt: &[f64]) -> Result<CJet> {
        debug_assert!((1..=self.m).contains(&alpha));
        (self.lambda_alpha[alpha - 1])(pt)
    }

    /// Jet of `λ₀` at a product-chart point.
    pub fn lambda0_jet(&self, pt: &[f64]) -> Result<RJet> {
        (self.lambda0)(pt)
    }
}

/// Coordinate-component jets of the spacetime coframe at one point.
pub struct SpacetimeCoframe {
    pub m: usize,
    /// `κ = 2 ϖ*θ⁰` (real).
    pub kappa: Vec<CJet>,
    /// `θ^α` rows, `α = 1..m` (pullbacks of the unitary base coframe).
    pub theta: Vec<Vec<CJet>>,
    /// `λ = dφ + λ_α θ^α + λ_ᾱ θ̄^ᾱ + λ₀ ϖ*θ⁰` (real).
    pub lam: Vec<CJet>,
    /// The pulled-back contact form `ϖ*θ⁰ = κ/2`.
    pub base_theta0: Vec<CJet>,
}

impl SpacetimeCoframe {
    /// Metric jets `g_{ab} = κ_a λ_b + λ_a κ_b + Σ_α (θ^α_a θ̄^ᾱ_b + θ̄^ᾱ_a θ^α_b)`.
    pub fn metric_jets(&self) -> JetMatrix {
        let d = self.kappa.len();
        JetMatrix::from_fn(d, |a, b| {
            let mut acc = self.kappa[a]
                .mul_jet(&self.lam[b])
                .add_jet(&self.lam[a].mul_jet(&self.kappa[b]));
            for th in &self.theta {
                acc = acc
                    .add_jet(&th[a].mul_jet(&th[b].conj()))
                    .add_jet(&th[a].conj().mul_jet(&th[b]));
            }
            acc
        })
    }
}

/// Evaluate the spacetime coframe of `(base, lam)` at a product-chart point.
pub fn spacetime_coframe(
    base: &CRBase,
    lam: &GeneralLambda,
    pt: &[f64],
    order: u8,
) -> Result<SpacetimeCoframe> {
    let m = base.m();
    let d = 2 * m + 2;
    if pt.len() != d {
        return Err(Error::Argument(format!(
            "spacetime point has {} coordinates, chart has {d}",
            pt.len()
        )));
    }
    if lam.m() != m {
        return Err(Error::Argument(format!(
            "metric data has rank {} but base has rank {m}",
            lam.m()
        )));
    }
    let base_pt = &pt[1..];
    let uc = base.eval_unitary(base_pt, order)?;
    let axis_map: Vec<usize> = (1..d).collect();
    let zero = CJet::constant(d, order, Complex64::new(0.0, 0.0));

    let mut base_theta0 = vec![zero.clone(); d];
    for i in 0..(d - 1) {
        base_theta0[i + 1] = uc.theta0[i].embedded(d, &axis_map);
    }
    let kappa: Vec<CJet> = base_theta0.iter().map(|j| j.scaled(c(2.0))).collect();

    let mut theta = Vec::with_capacity(m);
    for al in 0..m {
        let mut row = vec![zero.clone(); d];
        for i in 0..(d - 1) {
            row[i + 1] = uc.theta[al][i].embedded(d, &axis_map);
        }
        theta.push(row);
    }

    let mut lam_comp = vec![zero.clone(); d];
    lam_comp[0] = CJet::constant(d, order, c(1.0));
    let l0 = lam.lambda0_jet(pt)?.promote().truncated(order);
    for a in 0..d {
        lam_comp[a] = lam_comp[a].add_jet(&l0.mul_jet(&base_theta0[a]));
    }
    for al in 1..=m {
        let la = lam.alpha_jet(al, pt)?.truncated(order);
        let lac = la.conj();
        for a in 0..d {
            lam_comp[a] = lam_comp[a]
                .add_jet(&la.mul_jet(&theta[al - 1][a]))
                .add_jet(&lac.mul_jet(&theta[al - 1][a].conj()));
        }
    }

    Ok(SpacetimeCoframe { m, kappa, theta, lam: lam_comp, base_theta0 })
}

/// Frame vector values at a point, ordered `[ℓ, e_1..e_m, ē_1..ē_m, k]`;
/// each entry holds coordinate components.
#[derive(Debug, Clone)]
pub struct FrameVectors {
    pub m: usize,
    pub vecs: Vec<Vec<Complex64>>,
}

impl FrameVectors {
    pub fn ell(&self) -> &[Complex64] {
        &self.vecs[0]
    }

    pub fn hol(&self, alpha: usize) -> &[Complex64] {
        &self.vecs[alpha]
    }

    pub fn anti(&self, alpha: usize) -> &[Complex64] {
        &self.vecs[self.m + alpha]
    }

    pub fn k(&self) -> &[Complex64] {
        &self.vecs[2 * self.m + 1]
    }

    /// Contract coordinate slots of an all-covariant tensor with frame
    /// vectors selected by `labels` (indices into `vecs`).
    pub fn contract(&self, tensor: &PointTensor, labels: &[usize]) -> Complex64 {
        let d = tensor.dim();
        let rank = tensor.rank();
        assert_eq!(labels.len(), rank);
        let mut acc = Complex64::new(0.0, 0.0);
        let mut idx = vec![0usize; rank];
        loop {
            let mut w = Complex64::new(1.0, 0.0);
            for (s, &i) in idx.iter().enumerate() {
                w *= self.vecs[labels[s]][i];
            }
            acc += w * tensor.get(&idx);
            let mut k = rank;
            loop {
                if k == 0 {
                    return acc;
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < d {
                    break;
                }
                idx[k] = 0;
            }
        }
    }
}

/// A metric model over an almost-CR base: the unrescaled metric `g`, the
/// physical metric `ĝ = sec²φ · g`, and the defining data.
#[derive(Debug, Clone)]
pub struct SpacetimeModel {
    base: CRBase,
    lam: GeneralLambda,
    params: Option<EinsteinParams>,
}

impl SpacetimeModel {
    pub fn base(&self) -> &CRBase {
        &self.base
    }

    pub fn m(&self) -> usize {
        self.base.m()
    }

    /// Spacetime dimension `2m+2`.
    pub fn dim(&self) -> usize {
        2 * self.base.m() + 2
    }

    pub fn params(&self) -> Option<&EinsteinParams> {
        self.params.as_ref()
    }

    pub fn lambda(&self) -> &GeneralLambda {
        &self.lam
    }

    pub fn coframe(&self, pt: &[f64], order: u8) -> Result<SpacetimeCoframe> {
        spacetime_coframe(&self.base, &self.lam, pt, order)
    }

    /// The unrescaled metric `g` as a metric field.
    pub fn metric(&self) -> FnMetric {
        let base = self.base.clone();
        let lam = self.lam.clone();
        let d = self.dim();
        FnMetric::new(
            d,
            (d - 1, 1),
            Arc::new(move |pt: &[f64]| {
                let cf = spacetime_coframe(&base, &lam, pt, 3)?;
                Ok(cf.metric_jets())
            }),
        )
    }

    /// The physical metric `ĝ = sec²φ · g`.
    pub fn rescaled_metric(&self) -> FnMetric {
        let base = self.base.clone();
        let lam = self.lam.clone();
        let d = self.dim();
        FnMetric::new(
            d,
            (d - 1, 1),
            Arc::new(move |pt: &[f64]| {
                let cf = spacetime_coframe(&base, &lam, pt, 3)?;
                let g = cf.metric_jets();
                let phi = CJet::coordinate(pt, 0, 3)?;
                let sec = phi.cos().try_recip().map_err(|e| e.at_point(pt))?;
                let sec2 = sec.mul_jet(&sec);
                Ok(JetMatrix::from_fn(d, |a, b| g.get(a, b).mul_jet(&sec2)))
            }),
        )
    }

    /// Frame vector values at a product-chart point.
    ///
    /// `ℓ = ½(r − λ₀ k)` with `r` the Reeb lift, `e_α` the horizontal lifts
    /// corrected by `−λ_α k`, and `k = ∂/∂φ`.
    pub fn frame(&self, pt: &[f64]) -> Result<FrameVectors> {
        let m = self.m();
        let d = self.dim();
        let base_pt = &pt[1..];
        let uc = self.base.eval_unitary(base_pt, 1)?;
        let rows = uc.rows();
        let n = d - 1;
        let mut mat = nalgebra::DMatrix::<Complex64>::zeros(n, n);
        for r in 0..n {
            for i in 0..n {
                mat[(r, i)] = rows.get(r, i).value();
            }
        }
        let inv = mat
            .try_inverse()
            .ok_or_else(|| Error::Structure("base coframe is degenerate".into()).at_point(pt))?;
        // Column `A` of the inverse is base frame vector `A` (0 = Reeb).
        let base_vec = |label: usize| -> Vec<Complex64> {
            (0..n).map(|i| inv[(i, label)]).collect()
        };
        let l0 = self.lam.lambda0_jet(pt)?.value();
        let mut vecs = Vec::with_capacity(d);
        let reeb = base_vec(0);
        let mut ell = vec![Complex64::new(0.0, 0.0); d];
        ell[0] = c(-0.5 * l0);
        for i in 0..n {
            ell[i + 1] = 0.5 * reeb[i];
        }
        vecs.push(ell);
        for al in 1..=m {
            let la = self.lam.alpha_jet(al, pt)?.value();
            let bv = base_vec(al);
            let mut v = vec![Complex64::new(0.0, 0.0); d];
            v[0] = -la;
            for i in 0..n {
                v[i + 1] = bv[i];
            }
            vecs.push(v);
        }
        for al in 1..=m {
            let la = self.lam.alpha_jet(al, pt)?.value().conj();
            let bv = base_vec(m + al);
            let mut v = vec![Complex64::new(0.0, 0.0); d];
            v[0] = -la;
            for i in 0..n {
                v[i + 1] = bv[i];
            }
            vecs.push(v);
        }
        let mut kv = vec![Complex64::new(0.0, 0.0); d];
        kv[0] = c(1.0);
        vecs.push(kv);
        Ok(FrameVectors { m, vecs })
    }
}

/// Default probe point used for base-level precondition checks.
fn probe_point(dim: usize) -> Vec<f64> {
    (0..dim).map(|i| 0.03 + 0.021 * i as f64).collect()
}

/// Deviation of the frame metric from its canonical pattern
/// `g(ℓ,k) = 1`, `g(e_α,ē_β̄) = δ_{αβ}`, all other frame pairings zero.
pub fn frame_pattern_residual(model: &SpacetimeModel, pt: &[f64]) -> Result<f64> {
    let cf = model.coframe(pt, 1)?;
    let gv = cf.metric_jets().values();
    let frame = model.frame(pt)?;
    let m = model.m();
    let d = model.dim();
    let mut worst: f64 = 0.0;
    for a in 0..d {
        for b in 0..d {
            let val = frame.contract(&gv, &[a, b]);
            let ell_k = (a == 0 && b == d - 1) || (a == d - 1 && b == 0);
            let levi = (1..=m).contains(&a) && b == a + m || (1..=m).contains(&b) && a == b + m;
            let target = if ell_k || levi { c(1.0) } else { c(0.0) };
            worst = worst.max((val - target).norm());
        }
    }
    Ok(worst)
}

/// Assemble the Einstein-family model over a CR–Einstein base.
///
/// The base must pass the CR–Einstein check and its constant must match
/// `params.ulambda`; a mismatch is an argument error reporting both values.
pub fn assemble_einstein(base: &CRBase, params: &EinsteinParams) -> Result<SpacetimeModel> {
    if base.m() != params.m {
        return Err(Error::Argument(format!(
            "base has rank {} but parameters have m = {}",
            base.m(),
            params.m
        )));
    }
    let probe = probe_point(base.dim());
    let report = cr_einstein_check(base, &probe)?;
    let res = report.a_res.max(report.div_n_res).max(report.ric_res).max(report.grad_lambda_res);
    if res > 1e-6 {
        return Err(Error::Precondition(format!(
            "base is not CR–Einstein: residual {res:.3e}"
        )));
    }
    let scale = 1.0f64.max(report.lambda.abs()).max(params.ulambda.abs());
    if (report.lambda - params.ulambda).abs() > 1e-7 * scale {
        return Err(Error::Argument(format!(
            "base CR–Einstein constant {} does not match the ulambda parameter {}",
            report.lambda, params.ulambda
        )));
    }
    Ok(SpacetimeModel {
        base: base.clone(),
        lam: GeneralLambda::from_einstein(params),
        params: Some(*params),
    })
}

/// Assemble the general metric form with arbitrary `λ` data (no Einstein
/// condition imposed or assumed).
pub fn assemble_general(base: &CRBase, lam: GeneralLambda) -> Result<SpacetimeModel> {
    if base.m() != lam.m() {
        return Err(Error::Argument(format!(
            "base has rank {} but metric data has rank {}",
            base.m(),
            lam.m()
        )));
    }
    Ok(SpacetimeModel { base: base.clone(), lam, params: None })
}

/// Relative residual of the Einstein equation `Ric(ĝ) = Λ ĝ` at `pt`.
pub fn einstein_residual(model: &SpacetimeModel, pt: &[f64]) -> Result<f64> {
    let params = model
        .params()
        .ok_or_else(|| Error::Argument("model carries no Einstein parameters".into()))?;
    let ghat = model.rescaled_metric();
    let pack = curvature_pack(&ghat, pt, 2).map_err(|e| e.at_point(pt))?;
    let ric = pack.ricci_values();
    let gv = pack.metric_values();
    let d = model.dim();
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 1.0;
    for a in 0..d {
        for b in 0..d {
            let target = c(params.lambda) * gv.get(&[a, b]);
            let val = ric.get(&[a, b]);
            scale = scale.max(val.norm()).max(target.norm());
            worst = worst.max((val - target).norm());
        }
    }
    Ok(rel(worst, scale))
}

/// Residuals of the eight frame components of the Schouten tensor of `ĝ`
/// against their closed-form expressions, plus the pure-radiation excess.
///
/// Each field compares the numerically computed frame component with the
/// formula it must equal for the Einstein family; a failure localizes the
/// defect to one step of the construction.
#[derive(Debug, Clone, Copy)]
pub struct StepResiduals {
    /// `Ρ̂(k,k)` against `1 − φ̈ + φ̇²` (zero in the fixed parametrization).
    pub kk: f64,
    /// `Ρ̂(e_α,k)` against zero (screen data of the family vanishes).
    pub alpha_k: f64,
    /// `Ρ̂(e_α,e_β)` against `(1/m)∇^γN_{γ(αβ)} + (i/2)(1+i tanφ)A_{αβ}`.
    pub hol_hol: f64,
    /// Trace-free part of `Ρ̂(e_α,ē_β̄)` against the trace-free part of
    /// `(1/2m)(Ric_α{}^β − N_{αδγ}N^{βδγ})`.
    pub mixed_tracefree: f64,
    /// Holomorphic trace `Ρ̂_α{}^α` against its `λ₀` expression.
    pub mixed_trace: f64,
    /// `Ρ̂(ℓ,k)` against its `λ₀` expression.
    pub ell_k: f64,
    /// `Ρ̂(e_α,ℓ)` against zero (the profile constant is base-independent).
    pub alpha_ell: f64,
    /// `Ρ̂(ℓ,ℓ)` against zero.
    pub ell_ell: f64,
    /// Pure-radiation component `Φ = 2m cos⁴φ · Ρ̂(ℓ,ℓ)`.
    pub radiation_phi: f64,
}

impl StepResiduals {
    pub fn max(&self) -> f64 {
        self.kk
            .max(self.alpha_k)
            .max(self.hol_hol)
            .max(self.mixed_tracefree)
            .max(self.mixed_trace)
            .max(self.ell_k)
            .max(self.alpha_ell)
            .max(self.ell_ell)
    }
}

/// Compute the step-wise Schouten residuals of an Einstein model at `pt`.
pub fn step_residuals(model: &SpacetimeModel, pt: &[f64]) -> Result<StepResiduals> {
    let params = model
        .params()
        .ok_or_else(|| Error::Argument("step residuals need an Einstein model".into()))?;
    let m = model.m();
    let mf = m as f64;
    let ghat = model.rescaled_metric();
    let pack = curvature_pack(&ghat, pt, 2).map_err(|e| e.at_point(pt))?;
    let schouten = pack.schouten_values()?;
    let frame = model.frame(pt)?;
    let scale = schouten.max_modulus().max(1.0);

    let phi = pt[0];
    let t = phi.tan();
    let s2 = 1.0 / phi.cos().powi(2);
    let lj = lambda0(params, phi)?;
    let l0 = lj.value();
    let l1 = lj.derivative(0).value();
    let l2 = lj.derivative(0).derivative(0).value();

    // Base Webster data for the holomorphic families.
    let base_pt = &pt[1..];
    let wpack = webster_curvature(model.base(), base_pt)?;
    let wp = &wpack.point;

    let comp = |labels: &[usize]| frame.contract(&schouten, labels);
    let lbl_ell = 0usize;
    let lbl_k = 2 * m + 1;

    // (k,k): the fixed parametrization makes 1 − φ̈ + φ̇² vanish.
    let kk = rel((comp(&[lbl_k, lbl_k]) - c(1.0 - s2 + t * t)).norm(), scale);

    // (e_α, k): zero for vanishing screen data.
    let mut alpha_k: f64 = 0.0;
    for al in 1..=m {
        alpha_k = alpha_k.max(comp(&[al, lbl_k]).norm());
    }
    let alpha_k = rel(alpha_k, scale);

    // (e_α, e_β): (1/m) ∇^γ N_{γ(αβ)} + (i/2)(1 + i tanφ) A_{αβ}.
    let n4 = wp.nijenhuis_tensor();
    let dn = wp.webster_derivative(&n4)?;
    let mut hol_hol: f64 = 0.0;
    for al in 1..=m {
        for be in 1..=m {
            let mut div = Complex64::new(0.0, 0.0);
            for g in 1..=m {
                let ab = dn.get(&[m + g, g, al, be]).value();
                let ba = dn.get(&[m + g, g, be, al]).value();
                div += 0.5 * (ab + ba);
            }
            let tors = wp.torsion[al - 1][be - 1].value();
            let rhs = div / mf + Complex64::new(0.0, 0.5) * Complex64::new(1.0, t) * tors;
            hol_hol = hol_hol.max((comp(&[al, be]) - rhs).norm());
        }
    }
    let hol_hol = rel(hol_hol, scale);

    // Mixed family: numeric Ρ̂(e_α, ē_β̄) against
    // (1/2m)(Ric_α{}^β − N_{αδγ}N^{βδγ}) plus a pure-trace λ₀ part.
    let mut numeric = vec![vec![Complex64::new(0.0, 0.0); m]; m];
    let mut closed = vec![vec![Complex64::new(0.0, 0.0); m]; m];
    for al in 1..=m {
        for be in 1..=m {
            numeric[al - 1][be - 1] = comp(&[al, m + be]);
            let mut v = wpack.ricci[al - 1][be - 1].value();
            for dl in 0..m {
                for g in 0..m {
                    v -= wp.nijenhuis[al - 1][dl][g].value()
                        * wp.nijenhuis[be - 1][dl][g].value().conj();
                }
            }
            closed[al - 1][be - 1] = v / (2.0 * mf);
        }
    }
    let trace_numeric: Complex64 = (0..m).map(|i| numeric[i][i]).sum();
    let trace_closed: Complex64 = (0..m).map(|i| closed[i][i]).sum();
    let mut mixed_tracefree: f64 = 0.0;
    for a in 0..m {
        for b in 0..m {
            let mut diff = numeric[a][b] - closed[a][b];
            if a == b {
                diff -= (trace_numeric - trace_closed) / mf;
            }
            mixed_tracefree = mixed_tracefree.max(diff.norm());
        }
    }
    let mixed_tracefree = rel(mixed_tracefree, scale);

    // Holomorphic trace against its λ₀ expression.
    let trace_target = -(0.5 * l2 + (2.0 * (mf + 1.0).powi(2) - mf * (2.0 * mf + 1.0) * s2) * l0)
        / (2.0 * (2.0 * mf + 1.0))
        + (mf + 1.0) / (2.0 * (2.0 * mf + 1.0)) * params.ulambda;
    let mixed_trace = rel((trace_numeric - c(trace_target)).norm(), scale);

    // (ℓ, k) against its λ₀ expression.
    let ell_k_target = -params.ulambda / (2.0 * (2.0 * mf + 1.0))
        + l2 / (2.0 * (2.0 * mf + 1.0))
        + 0.5 * t * l1
        + ((mf + 1.0) / (2.0 * mf + 1.0) + 0.5 * s2) * l0;
    let ell_k = rel((comp(&[lbl_ell, lbl_k]) - c(ell_k_target)).norm(), scale);

    // (e_α, ℓ): proportional to the base gradient of the profile constant,
    // which is zero here.
    let mut alpha_ell: f64 = 0.0;
    for al in 1..=m {
        alpha_ell = alpha_ell.max(comp(&[al, lbl_ell]).norm());
    }
    let alpha_ell = rel(alpha_ell, scale);

    // (ℓ, ℓ): excludes pure radiation.
    let ell_ell_val = comp(&[lbl_ell, lbl_ell]);
    let ell_ell = rel(ell_ell_val.norm(), scale);
    let radiation_phi = (2.0 * mf * phi.cos().powi(4) * ell_ell_val).norm();

    Ok(StepResiduals {
        kk,
        alpha_k,
        hol_hol,
        mixed_tracefree,
        mixed_trace,
        ell_k,
        alpha_ell,
        ell_ell,
        radiation_phi,
    })
}

#[cfg(test)]
mod tests;
