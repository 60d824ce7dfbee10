//! Curvature engine: from a metric field with order-3 jets to Christoffel
//! symbols, Riemann, Ricci, scalar curvature, Schouten, Weyl and Cotton
//! tensors, plus conformal-rescaling utilities and transformation-law checks.
//!
//! Sign conventions (fixed by tests, not by memory):
//! * `R_ab^c_d` satisfies the commutator property
//!   `2 ∇_[a ∇_b] V^c = R_ab^c_d V^d`;
//! * `Ric_ab = R_ca^c_b`, `Sc = g^ab Ric_ab`;
//! * Schouten `P = (Ric − Sc/(2(n+1)) g)/n` with `n = d − 2`;
//! * Weyl `W_abcd = R_abcd − (g_ac P_db − g_ad P_cb − g_bc P_da + g_bd P_ca)`;
//! * Cotton `Y_abc = ∇_b P_ca − ∇_c P_ba`.

use crate::error::{Error, Result};
use crate::field::SharedRealField;
use crate::jet::CJet;
use crate::tensor::{JetMatrix, PointTensor};
use num_complex::Complex64;
use std::sync::Arc;

/// A metric given by components with order-3 jets at any chart point.
pub trait MetricField: Send + Sync {
    fn dim(&self) -> usize;
    /// Expected eigenvalue signs of the metric: (positive, negative) counts.
    fn signature(&self) -> (usize, usize);
    fn eval(&self, point: &[f64]) -> Result<JetMatrix>;
}

/// Metric field from a closure (used for built-in test metrics and all
/// assembled models).
pub struct FnMetric {
    dim: usize,
    signature: (usize, usize),
    eval: Arc<dyn Fn(&[f64]) -> Result<JetMatrix> + Send + Sync>,
}

impl FnMetric {
    pub fn new(
        dim: usize,
        signature: (usize, usize),
        eval: Arc<dyn Fn(&[f64]) -> Result<JetMatrix> + Send + Sync>,
    ) -> Self {
        FnMetric { dim, signature, eval }
    }
}

impl MetricField for FnMetric {
    fn dim(&self) -> usize {
        self.dim
    }
    fn signature(&self) -> (usize, usize) {
        self.signature
    }
    fn eval(&self, point: &[f64]) -> Result<JetMatrix> {
        (self.eval)(point)
    }
}

/// Variance of a tensor slot (used by covariant derivatives).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variance {
    Up,
    Down,
}

/// Relative residual: `diff / (scale + 1e-30)`.
pub fn rel(diff: f64, scale: f64) -> f64 {
    diff / (scale + 1e-30)
}

/// All curvature data of a metric at one point.
pub struct CurvaturePack {
    dim: usize,
    point: Vec<f64>,
    metric: JetMatrix,
    inverse: JetMatrix,
    /// Γ^c_ab as jets, flattened `[c][a][b]`.
    christoffel: Vec<CJet>,
    /// R_ab^c_d as jets, flattened `[a][b][c][d]`.
    riemann: Vec<CJet>,
    /// Ric_ab as jets, flattened `[a][b]`.
    ricci: Vec<CJet>,
    scalar: CJet,
    /// P_ab as jets (dim ≥ 3 only).
    schouten: Option<Vec<CJet>>,
    weyl_down: Option<PointTensor>,
    cotton: Option<PointTensor>,
}

fn idx3(d: usize, a: usize, b: usize, c: usize) -> usize {
    (a * d + b) * d + c
}

fn idx4(d: usize, a: usize, b: usize, c: usize, e: usize) -> usize {
    ((a * d + b) * d + c) * d + e
}

/// Verify that the metric's real part has the declared signature and that
/// its imaginary part is negligible.
fn validate_signature(g: &JetMatrix, expected: (usize, usize)) -> Result<()> {
    let d = g.n();
    let scale = (0..d)
        .flat_map(|i| (0..d).map(move |j| (i, j)))
        .map(|(i, j)| g.get(i, j).value().norm())
        .fold(0.0, f64::max)
        .max(1.0);
    let mut mat = nalgebra::DMatrix::<f64>::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            let v = g.get(i, j).value();
            if v.im.abs() > 1e-8 * scale {
                return Err(Error::Structure(format!(
                    "metric component ({i},{j}) has imaginary part {:.3e}",
                    v.im
                )));
            }
            mat[(i, j)] = v.re;
        }
    }
    let sym = (&mat + mat.transpose()) * 0.5;
    let eig = nalgebra::SymmetricEigen::new(sym);
    let mut plus = 0;
    let mut minus = 0;
    for &ev in eig.eigenvalues.iter() {
        if ev > 1e-10 * scale {
            plus += 1;
        } else if ev < -1e-10 * scale {
            minus += 1;
        }
    }
    if (plus, minus) != expected {
        return Err(Error::Structure(format!(
            "metric signature ({plus},{minus}) does not match declared {expected:?}"
        )));
    }
    Ok(())
}

/// Compute the full curvature pack at `point`.
///
/// `order` is 2 or 3: at order 2 the Cotton tensor (which needs third metric
/// derivatives) is omitted and internal jets are truncated one order lower.
pub fn curvature_pack(
    metric: &dyn MetricField,
    point: &[f64],
    order: u8,
) -> Result<CurvaturePack> {
    if !(2..=3).contains(&order) {
        return Err(Error::Argument(format!("curvature order must be 2 or 3, got {order}")));
    }
    let d = metric.dim();
    if point.len() != d {
        return Err(Error::Argument(format!(
            "point has {} coordinates, metric expects {d}",
            point.len()
        )));
    }
    let g_raw = metric.eval(point).map_err(|e| e.at_point(point))?;
    if g_raw.n() != d {
        return Err(Error::Structure("metric evaluator returned wrong dimension".into()));
    }
    // Symmetry check, then exact symmetrization to remove rounding drift.
    let scale = (0..d)
        .flat_map(|i| (0..d).map(move |j| (i, j)))
        .map(|(i, j)| g_raw.get(i, j).value().norm())
        .fold(0.0, f64::max);
    let asym = (0..d)
        .flat_map(|i| (0..d).map(move |j| (i, j)))
        .map(|(i, j)| g_raw.get(i, j).sub_jet(g_raw.get(j, i)).max_modulus())
        .fold(0.0, f64::max);
    if asym > 1e-9 * (scale + 1e-30) {
        return Err(Error::Structure(format!(
            "metric is not symmetric: residual {asym:.3e}"
        )).at_point(point));
    }
    let half = Complex64::new(0.5, 0.0);
    let g = JetMatrix::from_fn(d, |i, j| {
        g_raw.get(i, j).add_jet(g_raw.get(j, i)).scaled(half).truncated(order)
    });
    validate_signature(&g, metric.signature()).map_err(|e| e.at_point(point))?;
    let ginv = g.invert().map_err(|e| e.at_point(point))?;

    // ∂g cache: dg[e][a][b] = ∂_e g_ab (order-1 lower).
    let mut dg: Vec<CJet> = Vec::with_capacity(d * d * d);
    for e in 0..d {
        for a in 0..d {
            for b in 0..d {
                dg.push(g.get(a, b).derivative(e));
            }
        }
    }
    // Γ^c_ab = ½ g^{ce} (∂_a g_eb + ∂_b g_ea − ∂_e g_ab), symmetric in (a,b).
    let gamma_order = order - 1;
    let zero = CJet::constant(d, gamma_order, Complex64::new(0.0, 0.0));
    let mut christoffel = vec![zero.clone(); d * d * d];
    for c in 0..d {
        for a in 0..d {
            for b in a..d {
                let mut acc = zero.clone();
                for e in 0..d {
                    let sum = dg[idx3(d, a, e, b)]
                        .add_jet(&dg[idx3(d, b, e, a)])
                        .sub_jet(&dg[idx3(d, e, a, b)]);
                    acc = acc + ginv.get(c, e).truncated(gamma_order).mul_jet(&sum);
                }
                let gamma = acc.scaled(half);
                christoffel[idx3(d, c, a, b)] = gamma.clone();
                christoffel[idx3(d, c, b, a)] = gamma;
            }
        }
    }

    // R_ab^c_d = ∂_a Γ^c_bd − ∂_b Γ^c_ad + Γ^c_ae Γ^e_bd − Γ^c_be Γ^e_ad.
    let r_order = order - 2;
    let zero_r = CJet::constant(d, r_order, Complex64::new(0.0, 0.0));
    let mut riemann = vec![zero_r.clone(); d * d * d * d];
    for a in 0..d {
        for b in (a + 1)..d {
            for c in 0..d {
                for dd in 0..d {
                    let mut acc = christoffel[idx3(d, c, b, dd)]
                        .derivative(a)
                        .sub_jet(&christoffel[idx3(d, c, a, dd)].derivative(b));
                    for e in 0..d {
                        acc = acc
                            + christoffel[idx3(d, c, a, e)]
                                .truncated(r_order)
                                .mul_jet(&christoffel[idx3(d, e, b, dd)].truncated(r_order))
                            - christoffel[idx3(d, c, b, e)]
                                .truncated(r_order)
                                .mul_jet(&christoffel[idx3(d, e, a, dd)].truncated(r_order));
                    }
                    riemann[idx4(d, a, b, c, dd)] = acc.clone();
                    riemann[idx4(d, b, a, c, dd)] = -acc;
                }
            }
        }
    }

    // Ric_ab = R_ca^c_b; Sc = g^ab Ric_ab.
    let mut ricci = vec![zero_r.clone(); d * d];
    for a in 0..d {
        for b in 0..d {
            let mut acc = zero_r.clone();
            for c in 0..d {
                acc = acc + &riemann[idx4(d, c, a, c, b)];
            }
            ricci[a * d + b] = acc;
        }
    }
    let mut scalar = zero_r.clone();
    for a in 0..d {
        for b in 0..d {
            scalar = scalar + ginv.get(a, b).truncated(r_order).mul_jet(&ricci[a * d + b]);
        }
    }

    // Schouten (d ≥ 3): P = (Ric − Sc/(2(n+1)) g)/n, n = d−2.
    let schouten = if d >= 3 {
        let n = (d - 2) as f64;
        let coef = Complex64::new(-1.0 / (2.0 * (n + 1.0)), 0.0);
        let inv_n = Complex64::new(1.0 / n, 0.0);
        let mut p = Vec::with_capacity(d * d);
        for a in 0..d {
            for b in 0..d {
                let t = ricci[a * d + b]
                    .add_jet(&scalar.mul_jet(&g.get(a, b).truncated(r_order)).scaled(coef));
                p.push(t.scaled(inv_n));
            }
        }
        Some(p)
    } else {
        None
    };

    // Weyl (d ≥ 4), all-covariant values:
    // W_abcd = R_abcd − (g_ac P_db − g_ad P_cb − g_bc P_da + g_bd P_ca).
    let weyl_down = schouten.as_ref().filter(|_| d >= 4).map(|p| {
        let gv = |i: usize, j: usize| g.get(i, j).value();
        let pv = |i: usize, j: usize| p[i * d + j].value();
        let mut r_down = PointTensor::zeros(d, 4);
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    for e in 0..d {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for f in 0..d {
                            acc += gv(c, f) * riemann[idx4(d, a, b, f, e)].value();
                        }
                        r_down.set(&[a, b, c, e], acc);
                    }
                }
            }
        }
        PointTensor::from_fn(d, 4, |i| {
            let (a, b, c, e) = (i[0], i[1], i[2], i[3]);
            r_down.get(i)
                - (gv(a, c) * pv(e, b) - gv(a, e) * pv(c, b) - gv(b, c) * pv(e, a)
                    + gv(b, e) * pv(c, a))
        })
    });

    // Cotton (order 3 and d ≥ 3): Y_abc = ∇_b P_ca − ∇_c P_ba.
    let cotton = schouten.as_ref().filter(|_| order >= 3).map(|p| {
        let nabla_p = |b: usize, c: usize, a: usize| -> Complex64 {
            // ∇_b P_ca
            let mut acc = p[c * d + a].grad(b);
            for e in 0..d {
                acc -= christoffel[idx3(d, e, b, c)].value() * p[e * d + a].value();
                acc -= christoffel[idx3(d, e, b, a)].value() * p[c * d + e].value();
            }
            acc
        };
        PointTensor::from_fn(d, 3, |i| {
            let (a, b, c) = (i[0], i[1], i[2]);
            nabla_p(b, c, a) - nabla_p(c, b, a)
        })
    });

    Ok(CurvaturePack {
        dim: d,
        point: point.to_vec(),
        metric: g,
        inverse: ginv,
        christoffel,
        riemann,
        ricci,
        scalar,
        schouten,
        weyl_down,
        cotton,
    })
}

impl CurvaturePack {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self) -> &[f64] {
        &self.point
    }

    pub fn metric_jets(&self) -> &JetMatrix {
        &self.metric
    }

    pub fn inverse_jets(&self) -> &JetMatrix {
        &self.inverse
    }

    pub fn metric_values(&self) -> PointTensor {
        self.metric.values()
    }

    pub fn inverse_values(&self) -> PointTensor {
        self.inverse.values()
    }

    pub fn christoffel_jet(&self, c: usize, a: usize, b: usize) -> &CJet {
        &self.christoffel[idx3(self.dim, c, a, b)]
    }

    /// Γ^c_ab values as a rank-3 tensor `[c][a][b]`.
    pub fn christoffel_values(&self) -> PointTensor {
        PointTensor::from_fn(self.dim, 3, |i| {
            self.christoffel[idx3(self.dim, i[0], i[1], i[2])].value()
        })
    }

    pub fn riemann_jet(&self, a: usize, b: usize, c: usize, e: usize) -> &CJet {
        &self.riemann[idx4(self.dim, a, b, c, e)]
    }

    /// R_ab^c_d values.
    pub fn riemann_values(&self) -> PointTensor {
        PointTensor::from_fn(self.dim, 4, |i| {
            self.riemann[idx4(self.dim, i[0], i[1], i[2], i[3])].value()
        })
    }

    /// All-covariant R_abcd = g_ce R_ab^e_d values.
    pub fn riemann_down_values(&self) -> PointTensor {
        let d = self.dim;
        PointTensor::from_fn(d, 4, |i| {
            let (a, b, c, e) = (i[0], i[1], i[2], i[3]);
            let mut acc = Complex64::new(0.0, 0.0);
            for f in 0..d {
                acc += self.metric.get(c, f).value() * self.riemann[idx4(d, a, b, f, e)].value();
            }
            acc
        })
    }

    pub fn ricci_jet(&self, a: usize, b: usize) -> &CJet {
        &self.ricci[a * self.dim + b]
    }

    pub fn ricci_values(&self) -> PointTensor {
        PointTensor::from_fn(self.dim, 2, |i| self.ricci[i[0] * self.dim + i[1]].value())
    }

    pub fn scalar_jet(&self) -> &CJet {
        &self.scalar
    }

    pub fn scalar_value(&self) -> Complex64 {
        self.scalar.value()
    }

    pub fn schouten_jet(&self, a: usize, b: usize) -> Result<&CJet> {
        self.schouten
            .as_ref()
            .map(|p| &p[a * self.dim + b])
            .ok_or_else(|| Error::Argument("Schouten tensor needs dimension >= 3".into()))
    }

    pub fn schouten_values(&self) -> Result<PointTensor> {
        let p = self
            .schouten
            .as_ref()
            .ok_or_else(|| Error::Argument("Schouten tensor needs dimension >= 3".into()))?;
        Ok(PointTensor::from_fn(self.dim, 2, |i| p[i[0] * self.dim + i[1]].value()))
    }

    /// Schouten trace ρ = g^{ab} P_ab.
    pub fn schouten_trace(&self) -> Result<Complex64> {
        let p = self.schouten_values()?;
        Ok(p.contract(0, &self.inverse_values(), 0).trace_pair(0, 1).get(&[]))
    }

    /// All-covariant Weyl values W_abcd.
    pub fn weyl_down_values(&self) -> Result<&PointTensor> {
        self.weyl_down
            .as_ref()
            .ok_or_else(|| Error::Argument("Weyl tensor needs dimension >= 4".into()))
    }

    /// Weyl with third slot raised: W_ab^c_d = g^{ce} W_abed.
    pub fn weyl_mixed_values(&self) -> Result<PointTensor> {
        let w = self.weyl_down_values()?;
        let d = self.dim;
        let ginv = self.inverse_values();
        Ok(PointTensor::from_fn(d, 4, |i| {
            let (a, b, c, e) = (i[0], i[1], i[2], i[3]);
            let mut acc = Complex64::new(0.0, 0.0);
            for f in 0..d {
                acc += ginv.get(&[c, f]) * w.get(&[a, b, f, e]);
            }
            acc
        }))
    }

    pub fn cotton_values(&self) -> Result<&PointTensor> {
        self.cotton.as_ref().ok_or_else(|| {
            Error::Argument("Cotton tensor needs order 3 and dimension >= 3".into())
        })
    }

    /// Covariant derivative of a tensor given by jets (order ≥ 1) with the
    /// stated slot variances. The derivative slot comes FIRST in the result:
    /// `out(x, i_1..i_r) = ∇_x T_{i_1..i_r}`.
    pub fn covariant_derivative(&self, comps: &[CJet], variance: &[Variance]) -> PointTensor {
        let d = self.dim;
        let r = variance.len();
        assert_eq!(comps.len(), d.pow(r as u32));
        let gv = |c: usize, a: usize, b: usize| self.christoffel[idx3(d, c, a, b)].value();
        PointTensor::from_fn(d, r + 1, |idx| {
            let x = idx[0];
            let t_idx = &idx[1..];
            let mut off = 0;
            for &i in t_idx {
                off = off * d + i;
            }
            let mut acc = comps[off].grad(x);
            let mut scratch = t_idx.to_vec();
            for (s, &var) in variance.iter().enumerate() {
                let orig = scratch[s];
                for e in 0..d {
                    scratch[s] = e;
                    let mut off_e = 0;
                    for &i in &scratch {
                        off_e = off_e * d + i;
                    }
                    let term = match var {
                        Variance::Up => gv(orig, x, e) * comps[off_e].value(),
                        Variance::Down => -gv(e, x, orig) * comps[off_e].value(),
                    };
                    acc += term;
                }
                scratch[s] = orig;
            }
            acc
        })
    }

    /// Max-modulus residual of the first Bianchi identity
    /// `R_ab^c_d + R_bd^c_a + R_da^c_b = 0` (relative).
    pub fn first_bianchi_residual(&self) -> f64 {
        let d = self.dim;
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    for e in 0..d {
                        let rv = self.riemann[idx4(d, a, b, c, e)].value();
                        scale = scale.max(rv.norm());
                        let cyc = rv
                            + self.riemann[idx4(d, b, e, c, a)].value()
                            + self.riemann[idx4(d, e, a, c, b)].value();
                        worst = worst.max(cyc.norm());
                    }
                }
            }
        }
        rel(worst, scale)
    }

    /// Max-modulus residual of the second Bianchi identity
    /// `∇_e R_ab^c_d + ∇_a R_be^c_d + ∇_b R_ea^c_d = 0` (relative).
    /// Needs order-3 construction (Riemann with order-1 jets).
    pub fn second_bianchi_residual(&self) -> f64 {
        let d = self.dim;
        let gv = |c: usize, a: usize, b: usize| self.christoffel[idx3(d, c, a, b)].value();
        let rv = |a: usize, b: usize, c: usize, e: usize| self.riemann[idx4(d, a, b, c, e)].value();
        // ∇_x R_ab^c_e
        let nabla_r = |x: usize, a: usize, b: usize, c: usize, e: usize| -> Complex64 {
            let mut acc = self.riemann[idx4(d, a, b, c, e)].grad(x);
            for f in 0..d {
                acc -= gv(f, x, a) * rv(f, b, c, e);
                acc -= gv(f, x, b) * rv(a, f, c, e);
                acc += gv(c, x, f) * rv(a, b, f, e);
                acc -= gv(f, x, e) * rv(a, b, c, f);
            }
            acc
        };
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for x in 0..d {
            for a in 0..d {
                for b in 0..d {
                    for c in 0..d {
                        for e in 0..d {
                            let t = nabla_r(x, a, b, c, e);
                            scale = scale.max(t.norm());
                            let cyc = t + nabla_r(a, b, x, c, e) + nabla_r(b, x, a, c, e);
                            worst = worst.max(cyc.norm());
                        }
                    }
                }
            }
        }
        rel(worst, scale)
    }

    /// Relative residual of `2 ∇_[a ∇_b] V^c = R_ab^c_d V^d` for a vector
    /// field given by order-≥2 jets.
    pub fn commutator_residual(&self, v: &[CJet]) -> f64 {
        let d = self.dim;
        assert_eq!(v.len(), d);
        // W_b^c = ∇_b V^c as order-1 jets.
        let mut w: Vec<CJet> = Vec::with_capacity(d * d);
        for b in 0..d {
            for c in 0..d {
                let mut acc = v[c].derivative(b).truncated(1);
                for e in 0..d {
                    acc = acc
                        + self.christoffel[idx3(d, c, b, e)]
                            .truncated(1)
                            .mul_jet(&v[e].truncated(1));
                }
                w.push(acc);
            }
        }
        let gv = |c: usize, a: usize, b: usize| self.christoffel[idx3(d, c, a, b)].value();
        // ∇_a W_b^c values.
        let nabla_w = |a: usize, b: usize, c: usize| -> Complex64 {
            let mut acc = w[b * d + c].grad(a);
            for e in 0..d {
                acc -= gv(e, a, b) * w[e * d + c].value();
                acc += gv(c, a, e) * w[b * d + e].value();
            }
            acc
        };
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    let lhs = nabla_w(a, b, c) - nabla_w(b, a, c);
                    let mut rhs = Complex64::new(0.0, 0.0);
                    for e in 0..d {
                        rhs += self.riemann[idx4(d, a, b, c, e)].value() * v[e].value();
                    }
                    scale = scale.max(lhs.norm()).max(rhs.norm());
                    worst = worst.max((lhs - rhs).norm());
                }
            }
        }
        rel(worst, scale)
    }

    /// Max relative trace of the Weyl tensor over all single contractions.
    pub fn weyl_trace_residual(&self) -> Result<f64> {
        let w = self.weyl_down_values()?;
        let ginv = self.inverse_values();
        let scale = w.max_modulus();
        let mut worst: f64 = 0.0;
        for s1 in 0..4 {
            for s2 in (s1 + 1)..4 {
                let tr = ginv.contract(0, w, s1);
                // After contracting ginv slot 0 with w slot s1, the free ginv
                // slot sits at position 0 and w's remaining slots follow; w's
                // slot s2 is now at 1 + (s2 adjusted).
                let pos = 1 + if s2 > s1 { s2 - 1 } else { s2 };
                let traced = tr.trace_pair(0, pos);
                worst = worst.max(traced.max_modulus());
            }
        }
        Ok(rel(worst, scale))
    }

    /// Residual of metric compatibility ∇g = 0 (relative).
    pub fn metric_compatibility_residual(&self) -> f64 {
        let d = self.dim;
        let comps: Vec<CJet> = (0..d * d)
            .map(|k| self.metric.get(k / d, k % d).truncated(1))
            .collect();
        let nabla_g = self.covariant_derivative(&comps, &[Variance::Down, Variance::Down]);
        rel(nabla_g.max_modulus(), self.metric_values().max_modulus())
    }
}

// ---------------------------------------------------------------------------
// Conformal rescaling
// ---------------------------------------------------------------------------

/// `ĝ = e^{2φ} g` with jets composed exactly.
pub struct ConformalRescale {
    base: Arc<dyn MetricField>,
    log_factor: SharedRealField,
}

impl ConformalRescale {
    pub fn new(base: Arc<dyn MetricField>, log_factor: SharedRealField) -> Self {
        ConformalRescale { base, log_factor }
    }
}

impl MetricField for ConformalRescale {
    fn dim(&self) -> usize {
        self.base.dim()
    }
    fn signature(&self) -> (usize, usize) {
        self.base.signature()
    }
    fn eval(&self, point: &[f64]) -> Result<JetMatrix> {
        let g = self.base.eval(point)?;
        let phi = (self.log_factor)(point)?;
        let factor = phi.scaled(2.0).exp().promote();
        Ok(JetMatrix::from_fn(g.n(), |i, j| g.get(i, j).mul_jet(&factor)))
    }
}

/// Residuals of the conformal transformation laws at `pt` for `ĝ = e^{2φ} g`:
/// the Levi-Civita connection law (checked as
/// `Γ̂^c_ab − Γ^c_ab = δ^c_a Υ_b + δ^c_b Υ_a − g_ab Υ^c` with `Υ = dφ`,
/// equivalent to the one-form law at weight 0) and the Schouten law
/// `P̂ = P − ∇Υ + Υ⊗Υ − ½|Υ|² g`.
pub struct TransformLawResiduals {
    pub connection_residual: f64,
    pub schouten_residual: f64,
}

pub fn transform_law_residuals(
    g: Arc<dyn MetricField>,
    phi: SharedRealField,
    pt: &[f64],
) -> Result<TransformLawResiduals> {
    let d = g.dim();
    let pack = curvature_pack(g.as_ref(), pt, 3)?;
    let ghat = ConformalRescale::new(g, phi.clone());
    let pack_hat = curvature_pack(&ghat, pt, 3)?;
    let phi_jet = phi(pt)?;
    let ups: Vec<Complex64> = (0..d).map(|a| Complex64::new(phi_jet.grad(a), 0.0)).collect();
    let ginv = pack.inverse_values();
    let gv = pack.metric_values();
    let ups_up: Vec<Complex64> = (0..d)
        .map(|c| (0..d).map(|e| ginv.get(&[c, e]) * ups[e]).sum())
        .collect();

    let mut conn_worst: f64 = 0.0;
    let mut conn_scale: f64 = 0.0;
    for c in 0..d {
        for a in 0..d {
            for b in 0..d {
                let lhs = pack_hat.christoffel_jet(c, a, b).value()
                    - pack.christoffel_jet(c, a, b).value();
                let delta = |i: usize, j: usize| {
                    if i == j {
                        Complex64::new(1.0, 0.0)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                };
                let rhs = delta(c, a) * ups[b] + delta(c, b) * ups[a] - gv.get(&[a, b]) * ups_up[c];
                conn_scale = conn_scale.max(lhs.norm()).max(rhs.norm()).max(1.0);
                conn_worst = conn_worst.max((lhs - rhs).norm());
            }
        }
    }

    // ∇_a Υ_b = ∂_a∂_b φ − Γ^e_ab Υ_e.
    let ups_norm2: Complex64 = (0..d).map(|e| ups[e] * ups_up[e]).sum();
    let p = pack.schouten_values()?;
    let p_hat = pack_hat.schouten_values()?;
    let mut sch_worst: f64 = 0.0;
    let mut sch_scale: f64 = 0.0;
    for a in 0..d {
        for b in 0..d {
            let mut nabla_ups = Complex64::new(phi_jet.hess(a, b), 0.0);
            for e in 0..d {
                nabla_ups -= pack.christoffel_jet(e, a, b).value() * ups[e];
            }
            let rhs = p.get(&[a, b]) - nabla_ups + ups[a] * ups[b]
                - 0.5 * ups_norm2 * gv.get(&[a, b]);
            let lhs = p_hat.get(&[a, b]);
            sch_scale = sch_scale.max(lhs.norm()).max(rhs.norm()).max(1.0);
            sch_worst = sch_worst.max((lhs - rhs).norm());
        }
    }

    Ok(TransformLawResiduals {
        connection_residual: rel(conn_worst, conn_scale),
        schouten_residual: rel(sch_worst, sch_scale),
    })
}

/// Relative deviation of the (1,3)-Weyl tensor under `g → e^{2φ} g`
/// (conformal invariance of `W_ab^c_d`).
pub fn weyl_conformal_residual(
    g: Arc<dyn MetricField>,
    phi: SharedRealField,
    pt: &[f64],
) -> Result<f64> {
    let pack = curvature_pack(g.as_ref(), pt, 2)?;
    let ghat = ConformalRescale::new(g, phi);
    let pack_hat = curvature_pack(&ghat, pt, 2)?;
    let w = pack.weyl_mixed_values()?;
    let w_hat = pack_hat.weyl_mixed_values()?;
    let scale = w.max_modulus().max(w_hat.max_modulus());
    Ok(rel(w.sub(&w_hat).max_modulus(), scale))
}

/// Random polynomial perturbation of a flat diagonal metric (for randomized
/// law checks). `diag` fixes the flat background and the signature.
pub fn random_polynomial_metric(
    diag: Vec<f64>,
    rng: &mut impl rand::Rng,
    scale: f64,
    max_deg: u32,
) -> FnMetric {
    use crate::field::Polynomial;
    let d = diag.len();
    let plus = diag.iter().filter(|&&x| x > 0.0).count();
    let minus = d - plus;
    let mut polys: Vec<Polynomial> = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            if j < i {
                polys.push(Polynomial::new(d)); // placeholder, mirrored below
            } else {
                polys.push(Polynomial::random(rng, d, max_deg, 6, scale, true));
            }
        }
    }
    let eval = Arc::new(move |x: &[f64]| -> Result<JetMatrix> {
        Ok(JetMatrix::from_fn(d, |i, j| {
            let (a, b) = if i <= j { (i, j) } else { (j, i) };
            let mut jet = polys[a * d + b].eval(x, 3);
            if i == j {
                jet = jet + CJet::constant(d, 3, Complex64::new(diag[i], 0.0));
            }
            jet
        }))
    });
    FnMetric::new(d, (plus, minus), eval)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Polynomial;
    use crate::jet::Jet;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c64(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn minkowski() -> FnMetric {
        FnMetric::new(
            4,
            (3, 1),
            Arc::new(|x: &[f64]| {
                let d = x.len();
                Ok(JetMatrix::from_fn(d, |i, j| {
                    let v = if i != j {
                        0.0
                    } else if i == 0 {
                        -1.0
                    } else {
                        1.0
                    };
                    CJet::constant(d, 3, c64(v))
                }))
            }),
        )
    }

    #[test]
    fn minkowski_is_flat() {
        let g = minkowski();
        let pack = curvature_pack(&g, &[0.3, 1.0, -2.0, 0.5], 3).unwrap();
        assert!(pack.riemann_values().max_modulus() < 1e-12);
        assert!(pack.ricci_values().max_modulus() < 1e-12);
        assert!(pack.scalar_value().norm() < 1e-12);
        assert!(pack.weyl_down_values().unwrap().max_modulus() < 1e-12);
        assert!(pack.cotton_values().unwrap().max_modulus() < 1e-12);
    }

    #[test]
    fn signature_mismatch_is_rejected() {
        let mut g = minkowski();
        g.signature = (4, 0);
        assert!(matches!(
            curvature_pack(&g, &[0.0, 0.0, 0.0, 0.0], 2),
            Err(Error::Evaluation { .. }) | Err(Error::Structure(_))
        ));
    }

    /// Round 2-sphere chart metric of radius r: g = r²(dθ² + sin²θ dφ²).
    fn sphere(r: f64) -> FnMetric {
        FnMetric::new(
            2,
            (2, 0),
            Arc::new(move |x: &[f64]| {
                let th: CJet = Jet::coordinate(x, 0, 3).unwrap();
                let s = th.sin();
                let zero = CJet::constant(2, 3, c64(0.0));
                let rr = c64(r * r);
                Ok(JetMatrix::from_fn(2, |i, j| match (i, j) {
                    (0, 0) => CJet::constant(2, 3, rr),
                    (1, 1) => (&s * &s).scaled(rr),
                    _ => zero.clone(),
                }))
            }),
        )
    }

    /// Independent finite-difference pipeline: scalar curvature from metric
    /// component evaluations only (no jets anywhere).
    fn fd_scalar_curvature(g: &dyn Fn(&[f64]) -> Vec<Vec<f64>>, x: &[f64]) -> f64 {
        let d = x.len();
        let inv = |m: &Vec<Vec<f64>>| -> Vec<Vec<f64>> {
            let mat = nalgebra::DMatrix::from_fn(d, d, |i, j| m[i][j]);
            let inv = mat.try_inverse().unwrap();
            (0..d).map(|i| (0..d).map(|j| inv[(i, j)]).collect()).collect()
        };
        let h = 1e-5;
        let dg = |y: &[f64], e: usize| -> Vec<Vec<f64>> {
            let mut yp = y.to_vec();
            let mut ym = y.to_vec();
            yp[e] += h;
            ym[e] -= h;
            let gp = g(&yp);
            let gm = g(&ym);
            (0..d)
                .map(|i| (0..d).map(|j| (gp[i][j] - gm[i][j]) / (2.0 * h)).collect())
                .collect()
        };
        let gamma = |y: &[f64]| -> Vec<Vec<Vec<f64>>> {
            let ginv = inv(&g(y));
            let grads: Vec<Vec<Vec<f64>>> = (0..d).map(|e| dg(y, e)).collect();
            let mut out = vec![vec![vec![0.0; d]; d]; d];
            for c in 0..d {
                for a in 0..d {
                    for b in 0..d {
                        let mut acc = 0.0;
                        for e in 0..d {
                            acc += ginv[c][e]
                                * (grads[a][e][b] + grads[b][e][a] - grads[e][a][b]);
                        }
                        out[c][a][b] = 0.5 * acc;
                    }
                }
            }
            out
        };
        let hh = 1e-4;
        let dgamma = |e: usize| -> Vec<Vec<Vec<f64>>> {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[e] += hh;
            xm[e] -= hh;
            let gp = gamma(&xp);
            let gm = gamma(&xm);
            (0..d)
                .map(|c| {
                    (0..d)
                        .map(|a| (0..d).map(|b| (gp[c][a][b] - gm[c][a][b]) / (2.0 * hh)).collect())
                        .collect()
                })
                .collect()
        };
        let gam = gamma(x);
        let dgam: Vec<Vec<Vec<Vec<f64>>>> = (0..d).map(dgamma).collect();
        let riem = |a: usize, b: usize, c: usize, dd: usize| -> f64 {
            let mut acc = dgam[a][c][b][dd] - dgam[b][c][a][dd];
            for e in 0..d {
                acc += gam[c][a][e] * gam[e][b][dd] - gam[c][b][e] * gam[e][a][dd];
            }
            acc
        };
        let ginv = inv(&g(x));
        let mut sc = 0.0;
        for a in 0..d {
            for b in 0..d {
                let mut ric = 0.0;
                for c in 0..d {
                    ric += riem(c, a, c, b);
                }
                sc += ginv[a][b] * ric;
            }
        }
        sc
    }

    #[test]
    fn sphere_scalar_curvature_matches_classical_value_and_fd_pipeline() {
        for r in [1.0, 2.5] {
            let g = sphere(r);
            let pt = [1.1, 0.4];
            let pack = curvature_pack(&g, &pt, 2).unwrap();
            let sc = pack.scalar_value();
            assert!((sc.re - 2.0 / (r * r)).abs() < 1e-10, "Sc != 2/r²: {sc}");
            assert!(sc.im.abs() < 1e-12);
            let g_plain = move |y: &[f64]| -> Vec<Vec<f64>> {
                vec![
                    vec![r * r, 0.0],
                    vec![0.0, r * r * y[0].sin().powi(2)],
                ]
            };
            let sc_fd = fd_scalar_curvature(&g_plain, &pt);
            assert!(
                (sc.re - sc_fd).abs() < 1e-5,
                "engine {} vs finite differences {}",
                sc.re,
                sc_fd
            );
        }
    }

    /// Schwarzschild in static coordinates: vacuum (Ric = 0) but curved.
    fn schwarzschild(mass: f64) -> FnMetric {
        FnMetric::new(
            4,
            (3, 1),
            Arc::new(move |x: &[f64]| {
                // chart (t, r, θ, φ)
                let r: CJet = Jet::coordinate(x, 1, 3).unwrap();
                let th: CJet = Jet::coordinate(x, 2, 3).unwrap();
                let one = CJet::constant(4, 3, c64(1.0));
                let f = &one - &r.try_recip()?.scaled(c64(2.0 * mass));
                let zero = CJet::constant(4, 3, c64(0.0));
                let r2 = &r * &r;
                let s = th.sin();
                Ok(JetMatrix::from_fn(4, |i, j| match (i, j) {
                    (0, 0) => -&f,
                    (1, 1) => f.try_recip().unwrap(),
                    (2, 2) => r2.clone(),
                    (3, 3) => (&s * &s).mul_jet(&r2),
                    _ => zero.clone(),
                }))
            }),
        )
    }

    #[test]
    fn schwarzschild_is_ricci_flat_but_weyl_curved() {
        let g = schwarzschild(1.0);
        let pt = [0.0, 5.0, 1.2, 0.7];
        let pack = curvature_pack(&g, &pt, 3).unwrap();
        let scale = pack.riemann_values().max_modulus();
        assert!(scale > 1e-4, "expected genuine curvature");
        assert!(rel(pack.ricci_values().max_modulus(), scale) < 1e-10);
        assert!(pack.weyl_down_values().unwrap().max_modulus() > 1e-4);
        assert!(pack.weyl_trace_residual().unwrap() < 1e-9);
        assert!(pack.cotton_values().unwrap().max_modulus() < 1e-8);
    }

    /// Static de Sitter patch: Einstein with Ric = 3H² g, nonzero Schouten.
    fn de_sitter(hh: f64) -> FnMetric {
        FnMetric::new(
            4,
            (3, 1),
            Arc::new(move |x: &[f64]| {
                let r: CJet = Jet::coordinate(x, 1, 3).unwrap();
                let th: CJet = Jet::coordinate(x, 2, 3).unwrap();
                let one = CJet::constant(4, 3, c64(1.0));
                let f = &one - (&r * &r).scaled(c64(hh * hh));
                let zero = CJet::constant(4, 3, c64(0.0));
                let r2 = &r * &r;
                let s = th.sin();
                Ok(JetMatrix::from_fn(4, |i, j| match (i, j) {
                    (0, 0) => -&f,
                    (1, 1) => f.try_recip().unwrap(),
                    (2, 2) => r2.clone(),
                    (3, 3) => (&s * &s).mul_jet(&r2),
                    _ => zero.clone(),
                }))
            }),
        )
    }

    #[test]
    fn einstein_metric_has_vanishing_cotton_and_proportional_ricci() {
        let hh = 0.3;
        let g = de_sitter(hh);
        let pt = [0.1, 1.4, 1.0, 0.5];
        let pack = curvature_pack(&g, &pt, 3).unwrap();
        let gv = pack.metric_values();
        let ric = pack.ricci_values();
        let lam = 3.0 * hh * hh;
        let dev = ric.sub(&gv.scale(c64(lam))).max_modulus();
        assert!(rel(dev, ric.max_modulus()) < 1e-9, "Ric != 3H² g");
        assert!(pack.cotton_values().unwrap().max_modulus() < 1e-6);
    }

    #[test]
    fn random_metric_satisfies_curvature_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for trial in 0..12 {
            let d = if trial % 2 == 0 { 4 } else { 6 };
            let mut diag = vec![1.0; d];
            diag[0] = -1.0;
            let g = random_polynomial_metric(diag, &mut rng, 0.05, 3);
            let pt: Vec<f64> = (0..d).map(|_| rng.gen_range(-0.4..0.4)).collect();
            let pack = curvature_pack(&g, &pt, 3).unwrap();
            // Riemann antisymmetry in the first two slots is structural.
            let r = pack.riemann_values();
            assert!(
                r.add(&r.permuted(&[1, 0, 2, 3])).max_modulus() < 1e-12 * (r.max_modulus() + 1.0)
            );
            // Ricci symmetric.
            let ric = pack.ricci_values();
            assert!(rel(ric.sub(&ric.permuted(&[1, 0])).max_modulus(), ric.max_modulus()) < 1e-9);
            assert!(pack.first_bianchi_residual() < 1e-8);
            assert!(pack.second_bianchi_residual() < 1e-6);
            assert!(pack.metric_compatibility_residual() < 1e-10);
            assert!(pack.weyl_trace_residual().unwrap() < 1e-9);
            // Commutator property on a random polynomial vector field.
            let v: Vec<CJet> = (0..d)
                .map(|_| Polynomial::random(&mut rng, d, 2, 5, 1.0, false).eval(&pt, 2))
                .collect();
            assert!(pack.commutator_residual(&v) < 1e-7);
        }
    }

    #[test]
    fn torsion_freeness_nabla_df_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let d = 4;
        let mut diag = vec![1.0; d];
        diag[0] = -1.0;
        let g = random_polynomial_metric(diag, &mut rng, 0.05, 3);
        let pt = [0.1, -0.2, 0.3, 0.05];
        let pack = curvature_pack(&g, &pt, 3).unwrap();
        let f = Polynomial::random(&mut rng, d, 3, 8, 1.0, false);
        let fj = f.eval(&pt, 3);
        let df: Vec<CJet> = (0..d).map(|b| fj.derivative(b)).collect();
        let nabla_df = pack.covariant_derivative(&df, &[Variance::Down]);
        let asym = nabla_df.sub(&nabla_df.permuted(&[1, 0])).max_modulus();
        assert!(rel(asym, nabla_df.max_modulus()) < 1e-10);
    }

    #[test]
    fn conformal_transformation_laws() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        // Constant φ: both residuals vanish to rounding.
        let g: Arc<dyn MetricField> = Arc::new(minkowski());
        let phi_const = Polynomial::constant(4, c64(0.7)).into_real_field();
        let res = transform_law_residuals(g.clone(), phi_const, &[0.1, 0.2, 0.3, 0.4]).unwrap();
        assert!(res.connection_residual < 1e-12);
        assert!(res.schouten_residual < 1e-12);
        // Random quadratic φ on random curved metrics, d ∈ {4, 6}.
        for trial in 0..8 {
            let d = if trial % 2 == 0 { 4 } else { 6 };
            let mut diag = vec![1.0; d];
            diag[0] = -1.0;
            let g: Arc<dyn MetricField> =
                Arc::new(random_polynomial_metric(diag, &mut rng, 0.04, 3));
            let phi = Polynomial::random(&mut rng, d, 2, 5, 0.2, true).into_real_field();
            let pt: Vec<f64> = (0..d).map(|_| rng.gen_range(-0.3..0.3)).collect();
            let res = transform_law_residuals(g.clone(), phi.clone(), &pt).unwrap();
            assert!(res.connection_residual < 1e-8, "connection law: {:.3e}", res.connection_residual);
            assert!(res.schouten_residual < 1e-8, "Schouten law: {:.3e}", res.schouten_residual);
            let wres = weyl_conformal_residual(g, phi, &pt).unwrap();
            assert!(wres < 1e-8, "Weyl invariance: {wres:.3e}");
        }
    }

    #[test]
    fn order_two_pack_omits_cotton() {
        let g = minkowski();
        let pack = curvature_pack(&g, &[0.0; 4], 2).unwrap();
        assert!(pack.cotton_values().is_err());
        assert!(pack.weyl_down_values().is_ok());
        assert!(curvature_pack(&g, &[0.0; 4], 4).is_err());
    }
}
