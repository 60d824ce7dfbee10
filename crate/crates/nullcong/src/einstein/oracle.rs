//! Frame-curvature oracle for the metric family.
//!
//! Every closed-form curvature component of `g = 2κ⊙λ + h` — Riemann, Ricci,
//! scalar, the differential consequences of the second Bianchi identity, and
//! the Weyl components of the Einstein family — is evaluated from the base
//! Webster calculus and the `λ` data, then compared against numerically
//! computed frame curvature.  The module also checks the exterior-derivative
//! expansion defining the connection coefficients `B`, `C`, `E`, and the
//! covariant-derivative patterns of the distinguished coframe.

use num_complex::Complex64;

use super::{
    assemble_einstein, assemble_general, lambda0, spacetime_coframe, EinsteinParams,
    GeneralLambda, SpacetimeModel,
};
use crate::cr::{conj_label, webster_curvature, CRBase};
use crate::curvature::{curvature_pack, rel, Variance};
use crate::error::{Error, Result};
use crate::jet::CJet;
use crate::tensor::{d_one_form_jets, PointTensor};

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn ic(im: f64) -> Complex64 {
    Complex64::new(0.0, im)
}

/// The base Webster calculus re-expressed on the product chart: frame
/// vectors, connection coefficients, torsion, Nijenhuis tensor and curvature
/// of the base, all embedded as `φ`-independent jets.
pub(crate) struct EmbeddedWebster {
    m: usize,
    d: usize,
    /// Frame vectors by label (0 = Reeb, `1..=m` holomorphic, `m+1..=2m`
    /// conjugate); product-chart components with zero `φ`-component.
    frame: Vec<Vec<CJet>>,
    gamma0: Vec<Vec<CJet>>,
    gamma_hol: Vec<Vec<Vec<CJet>>>,
    gamma_anti: Vec<Vec<Vec<CJet>>>,
    /// Torsion `A_{αβ}` (0-based).
    pub(crate) torsion: Vec<Vec<CJet>>,
    /// Nijenhuis tensor `N_{αβγ}` (0-based).
    pub(crate) nijenhuis: Vec<Vec<Vec<CJet>>>,
    /// Base Webster–Ricci tensor `Ric_{αβ̄}`.
    pub(crate) ricci: Vec<Vec<CJet>>,
    /// Base Webster scalar curvature.
    pub(crate) scalar: CJet,
    /// Base curvature `R_{γ}{}^{δ}{}_{α}{}^{β}`, flattened 0-based.
    rmat: Vec<CJet>,
    /// Base Chern–Moser tensor, (down, up, down, up) slots, flattened 0-based.
    chern_moser: Vec<CJet>,
}

impl EmbeddedWebster {
    pub(crate) fn new(base: &CRBase, pt: &[f64]) -> Result<Self> {
        let m = base.m();
        let d = 2 * m + 2;
        if pt.len() != d {
            return Err(Error::Argument(format!(
                "spacetime point has {} coordinates, chart has {d}",
                pt.len()
            )));
        }
        let pack = webster_curvature(base, &pt[1..])?;
        let wp = &pack.point;
        let axis_map: Vec<usize> = (1..d).collect();
        let emb = |j: &CJet| j.embedded(d, &axis_map);
        let nlab = 2 * m + 1;
        let mut frame = Vec::with_capacity(nlab);
        for lbl in 0..nlab {
            let mut comps = vec![CJet::constant(d, 2, c(0.0)); d];
            for i in 0..(d - 1) {
                comps[i + 1] = emb(&wp.frame[lbl][i]);
            }
            frame.push(comps);
        }
        let emb_mat =
            |t: &Vec<Vec<CJet>>| t.iter().map(|r| r.iter().map(emb).collect()).collect();
        let emb_cube = |t: &Vec<Vec<Vec<CJet>>>| {
            t.iter()
                .map(|p| p.iter().map(|r| r.iter().map(emb).collect()).collect())
                .collect()
        };
        let mut rmat = Vec::with_capacity(m * m * m * m);
        for g in 1..=m {
            for dl in 1..=m {
                for a in 1..=m {
                    for b in 1..=m {
                        rmat.push(emb(pack.curvature.get(&[g, m + dl, a, m + b])));
                    }
                }
            }
        }
        Ok(EmbeddedWebster {
            m,
            d,
            frame,
            gamma0: emb_mat(&wp.gamma0),
            gamma_hol: emb_cube(&wp.gamma_hol),
            gamma_anti: emb_cube(&wp.gamma_anti),
            torsion: emb_mat(&wp.torsion),
            nijenhuis: emb_cube(&wp.nijenhuis),
            ricci: emb_mat(&pack.ricci),
            scalar: emb(&pack.scalar),
            rmat,
            chern_moser: pack.chern_moser.iter().map(emb).collect(),
        })
    }

    pub(crate) fn m(&self) -> usize {
        self.m
    }

    /// Product-chart components of base frame vector `label`.
    pub(crate) fn frame_vector(&self, label: usize) -> &[CJet] {
        &self.frame[label]
    }

    /// Base curvature `R_{γ}{}^{δ}{}_{α}{}^{β}` (0-based indices).
    pub(crate) fn r_comp(&self, g: usize, dl: usize, a: usize, b: usize) -> &CJet {
        let m = self.m;
        &self.rmat[((g * m + dl) * m + a) * m + b]
    }

    /// Base Chern–Moser component, (down, up, down, up) slots, 0-based.
    pub(crate) fn chern_moser_comp(&self, a: usize, b: usize, g: usize, dl: usize) -> &CJet {
        let m = self.m;
        &self.chern_moser[((a * m + b) * m + g) * m + dl]
    }

    /// Connection coefficient `Γ_{D β}{}^{α}` (frame label `dir`, 1-based
    /// holomorphic `beta`, `alpha`).
    fn gamma(&self, dir: usize, beta: usize, alpha: usize) -> &CJet {
        let m = self.m;
        if dir == 0 {
            &self.gamma0[beta - 1][alpha - 1]
        } else if dir <= m {
            &self.gamma_hol[dir - 1][beta - 1][alpha - 1]
        } else {
            &self.gamma_anti[dir - m - 1][beta - 1][alpha - 1]
        }
    }

    /// Directional derivative along base frame vector `dir` on the product
    /// chart (fixed `φ`); lowers the jet order by one.
    pub(crate) fn fd(&self, dir: usize, f: &CJet) -> CJet {
        let ord = f.order().saturating_sub(1);
        let mut acc = CJet::constant(self.d, ord, c(0.0));
        for i in 0..self.d {
            acc = &acc + &(&self.frame[dir][i].truncated(ord) * &f.derivative(i));
        }
        acc
    }

    /// Webster derivative of a down-holomorphic family `v[β]`.
    pub(crate) fn nab_h(&self, dir: usize, v: &[CJet]) -> Vec<CJet> {
        let m = self.m;
        (0..m)
            .map(|b| {
                let mut acc = self.fd(dir, &v[b]);
                for g in 0..m {
                    acc = &acc - &(self.gamma(dir, b + 1, g + 1) * &v[g]);
                }
                acc
            })
            .collect()
    }

    /// Webster derivative of a down-conjugate family `v[β] = T_{β̄}`.
    pub(crate) fn nab_a(&self, dir: usize, v: &[CJet]) -> Vec<CJet> {
        let m = self.m;
        let cdir = conj_label(m, dir);
        (0..m)
            .map(|b| {
                let mut acc = self.fd(dir, &v[b]);
                for g in 0..m {
                    acc = &acc - &(&self.gamma(cdir, b + 1, g + 1).conj() * &v[g]);
                }
                acc
            })
            .collect()
    }

    /// Webster derivative of a rank-2 all-holomorphic family `t[α][β]`.
    pub(crate) fn nab_hh(&self, dir: usize, t: &[Vec<CJet>]) -> Vec<Vec<CJet>> {
        let m = self.m;
        (0..m)
            .map(|a| {
                (0..m)
                    .map(|b| {
                        let mut acc = self.fd(dir, &t[a][b]);
                        for g in 0..m {
                            acc = &acc - &(self.gamma(dir, a + 1, g + 1) * &t[g][b]);
                            acc = &acc - &(self.gamma(dir, b + 1, g + 1) * &t[a][g]);
                        }
                        acc
                    })
                    .collect()
            })
            .collect()
    }

    /// Webster derivative of a mixed family `t[α][β] = T_{αβ̄}`.
    pub(crate) fn nab_hm(&self, dir: usize, t: &[Vec<CJet>]) -> Vec<Vec<CJet>> {
        let m = self.m;
        let cdir = conj_label(m, dir);
        (0..m)
            .map(|a| {
                (0..m)
                    .map(|b| {
                        let mut acc = self.fd(dir, &t[a][b]);
                        for g in 0..m {
                            acc = &acc - &(self.gamma(dir, a + 1, g + 1) * &t[g][b]);
                            acc = &acc
                                - &(&self.gamma(cdir, b + 1, g + 1).conj() * &t[a][g]);
                        }
                        acc
                    })
                    .collect()
            })
            .collect()
    }

    /// Webster derivative of a rank-3 all-holomorphic family `t[α][β][γ]`.
    pub(crate) fn nab_hhh(&self, dir: usize, t: &[Vec<Vec<CJet>>]) -> Vec<Vec<Vec<CJet>>> {
        let m = self.m;
        (0..m)
            .map(|a| {
                (0..m)
                    .map(|b| {
                        (0..m)
                            .map(|g| {
                                let mut acc = self.fd(dir, &t[a][b][g]);
                                for p in 0..m {
                                    acc = &acc
                                        - &(self.gamma(dir, a + 1, p + 1) * &t[p][b][g]);
                                    acc = &acc
                                        - &(self.gamma(dir, b + 1, p + 1) * &t[a][p][g]);
                                    acc = &acc
                                        - &(self.gamma(dir, g + 1, p + 1) * &t[a][b][p]);
                                }
                                acc
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect()
    }
}

/// The `λ` data and the derived connection coefficients as product-chart jets.
pub(crate) struct LambdaJets {
    /// `λ_α` (order 3).
    pub(crate) la: Vec<CJet>,
    /// `λ₀` (order 3).
    pub(crate) l0: CJet,
    /// `E_α = ½ ∂_φ λ_α` (order 2).
    pub(crate) e: Vec<CJet>,
    /// `E₀ = ½ ∂_φ λ₀` (order 2).
    pub(crate) e0: CJet,
    /// `B_{αβ}` (order 2).
    pub(crate) b_hh: Vec<Vec<CJet>>,
    /// `B_{αβ̄}` (order 2).
    pub(crate) b_hm: Vec<Vec<CJet>>,
    /// `C_α` (order 2).
    pub(crate) cc: Vec<CJet>,
}

pub(crate) fn lambda_jets(
    ew: &EmbeddedWebster,
    lam: &GeneralLambda,
    pt: &[f64],
) -> Result<LambdaJets> {
    let m = ew.m();
    let la: Vec<CJet> = (1..=m).map(|al| lam.alpha_jet(al, pt)).collect::<Result<_>>()?;
    let l0 = lam.lambda0_jet(pt)?.promote();
    let la_dot: Vec<CJet> = la.iter().map(|j| j.derivative(0)).collect();
    let l0_dot = l0.derivative(0);
    let e: Vec<CJet> = la_dot.iter().map(|j| j.scaled(c(0.5))).collect();
    let e0 = l0_dot.scaled(c(0.5));
    let la_bar: Vec<CJet> = la.iter().map(|j| j.conj()).collect();

    // ∇ of the screen components in every base frame direction.
    let nlab = 2 * m + 1;
    let dla: Vec<Vec<CJet>> = (0..nlab).map(|dir| ew.nab_h(dir, &la)).collect();
    let dla_bar: Vec<Vec<CJet>> = (0..nlab).map(|dir| ew.nab_a(dir, &la_bar)).collect();

    // B_{αβ} = −∇_{[α}λ_{β]} + λ_{[α}λ̇_{β]} + ½ N_{αβγ} λ^γ.
    let mut b_hh = vec![vec![CJet::constant(2 * m + 2, 2, c(0.0)); m]; m];
    for a in 0..m {
        for b in 0..m {
            let mut acc = (&dla[a + 1][b] - &dla[b + 1][a]).scaled(c(-0.5));
            acc = &acc
                + &(&(&la[a] * &la_dot[b]) - &(&la[b] * &la_dot[a])).scaled(c(0.5));
            for g in 0..m {
                acc = &acc + &(&ew.nijenhuis[a][b][g] * &la_bar[g]).scaled(c(0.5));
            }
            b_hh[a][b] = acc.truncated(2);
        }
    }

    // B_{αβ̄} = −½(∇_αλ_β̄ − ∇_β̄λ_α − λ_αλ̇_β̄ + λ_β̄λ̇_α + i λ₀ h_{αβ̄}).
    let mut b_hm = vec![vec![CJet::constant(2 * m + 2, 2, c(0.0)); m]; m];
    for a in 0..m {
        for b in 0..m {
            let mut acc = &dla_bar[a + 1][b] - &dla[m + 1 + b][a];
            acc = &acc - &(&la[a] * &la_dot[b].conj());
            acc = &acc + &(&la_bar[b] * &la_dot[a]);
            if a == b {
                acc = &acc + &l0.scaled(ic(1.0));
            }
            b_hm[a][b] = acc.scaled(c(-0.5)).truncated(2);
        }
    }

    // C_α = −½(∇_αλ₀ − ∇_0λ_α − λ_αλ̇₀ + λ₀λ̇_α − A_{αβ} λ^β).
    let mut cc = Vec::with_capacity(m);
    for a in 0..m {
        let mut acc = ew.fd(a + 1, &l0);
        acc = &acc - &dla[0][a];
        acc = &acc - &(&la[a] * &l0_dot);
        acc = &acc + &(&l0 * &la_dot[a]);
        for b in 0..m {
            acc = &acc - &(&ew.torsion[a][b] * &la_bar[b]);
        }
        cc.push(acc.scaled(c(-0.5)).truncated(2));
    }

    Ok(LambdaJets { la, l0, e, e0, b_hh, b_hm, cc })
}

/// The connection coefficients of the general metric form at one point,
/// together with the exterior-derivative cross-check.
#[derive(Debug, Clone)]
pub struct BceCoefficients {
    /// `B_{αβ}` (antisymmetric screen rotation part).
    pub b_hol_hol: Vec<Vec<Complex64>>,
    /// `B_{αβ̄}` (anti-Hermitian screen part).
    pub b_mixed: Vec<Vec<Complex64>>,
    /// `C_α` (contact–screen part).
    pub c_hol: Vec<Complex64>,
    /// `E_α = ½λ̇_α`.
    pub e_hol: Vec<Complex64>,
    /// `E₀ = ½λ̇₀` (real).
    pub e_contact: Complex64,
    /// Max relative deviation of the coefficients from the frame components
    /// of the exterior derivative of `λ`.
    pub exterior_residual: f64,
    /// Max deviation of `B_{αβ̄}` from anti-Hermitian symmetry
    /// (`conj(B_{αβ̄}) = −B_{βᾱ}` transposed check).
    pub hermitian_residual: f64,
}

/// Evaluate the connection coefficients `B`, `C`, `E` of `(base, lam)` at
/// `pt` and cross-check them against the exterior derivative of `λ`.
pub fn bce_coefficients(
    base: &CRBase,
    lam: &GeneralLambda,
    pt: &[f64],
) -> Result<BceCoefficients> {
    let ew = EmbeddedWebster::new(base, pt)?;
    let lj = lambda_jets(&ew, lam, pt)?;
    let m = base.m();
    let d = 2 * m + 2;

    // Exterior derivative of λ on the frame.
    let cf = spacetime_coframe(base, lam, pt, 2)?;
    let dl = d_one_form_jets(&cf.lam);
    let dlt = PointTensor::from_fn(d, 2, |i| dl[i[0]][i[1]].value());
    let model = assemble_general(base, lam.clone())?;
    let fr = model.frame(pt)?;
    let t2 = |x: usize, y: usize| fr.contract(&dlt, &[x, y]);

    let lbl_ell = 0usize;
    let lbl_k = 2 * m + 1;
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 1.0;
    let mut herm: f64 = 0.0;
    let mut b_hol_hol = vec![vec![c(0.0); m]; m];
    let mut b_mixed = vec![vec![c(0.0); m]; m];
    let mut c_hol = vec![c(0.0); m];
    let mut e_hol = vec![c(0.0); m];
    for a in 0..m {
        for b in 0..m {
            let bh = lj.b_hh[a][b].value();
            let bm = lj.b_hm[a][b].value();
            b_hol_hol[a][b] = bh;
            b_mixed[a][b] = bm;
            scale = scale.max(bh.norm()).max(bm.norm());
            worst = worst.max((bh + t2(a + 1, b + 1)).norm());
            worst = worst.max((bm + t2(a + 1, m + 1 + b)).norm());
        }
        let ca = lj.cc[a].value();
        let ea = lj.e[a].value();
        c_hol[a] = ca;
        e_hol[a] = ea;
        scale = scale.max(ca.norm()).max(ea.norm());
        worst = worst.max((ca + 2.0 * t2(a + 1, lbl_ell)).norm());
        worst = worst.max((ea + t2(a + 1, lbl_k)).norm());
    }
    let e0 = lj.e0.value();
    scale = scale.max(e0.norm());
    worst = worst.max((e0 + 2.0 * t2(lbl_ell, lbl_k)).norm());
    for a in 0..m {
        for b in 0..m {
            herm = herm.max((b_mixed[a][b].conj() + b_mixed[b][a]).norm());
        }
    }
    Ok(BceCoefficients {
        b_hol_hol,
        b_mixed,
        c_hol,
        e_hol,
        e_contact: e0,
        exterior_residual: rel(worst, scale),
        hermitian_residual: rel(herm, scale),
    })
}

/// Residuals of the closed-form curvature identities of `g = 2κ⊙λ + h`,
/// grouped by family; each entry pairs a frame-slot pattern with the maximal
/// relative deviation over all index choices.
#[derive(Debug, Clone)]
pub struct AppendixRecord {
    /// Sixteen Riemann-component families.
    pub riemann: Vec<(String, f64)>,
    /// Seven Ricci-component families.
    pub ricci: Vec<(String, f64)>,
    /// Scalar-curvature identity.
    pub scalar: f64,
    /// Seven differential consequences of the second Bianchi identity,
    /// expressed purely in the connection data.
    pub bianchi: Vec<(String, f64)>,
}

impl AppendixRecord {
    pub fn max_riemann(&self) -> f64 {
        self.riemann.iter().map(|p| p.1).fold(0.0, f64::max)
    }

    pub fn max_ricci(&self) -> f64 {
        self.ricci.iter().map(|p| p.1).fold(0.0, f64::max)
    }

    pub fn max_bianchi(&self) -> f64 {
        self.bianchi.iter().map(|p| p.1).fold(0.0, f64::max)
    }

    /// Largest residual among the curvature identities (Riemann, Ricci,
    /// scalar).
    pub fn max_curvature(&self) -> f64 {
        self.max_riemann().max(self.max_ricci()).max(self.scalar)
    }

    pub fn max_all(&self) -> f64 {
        self.max_curvature().max(self.max_bianchi())
    }
}

/// Helper: track the worst deviation and magnitude scale of one family.
struct FamilyAcc {
    worst: f64,
    scale: f64,
}

impl FamilyAcc {
    fn new() -> Self {
        FamilyAcc { worst: 0.0, scale: 1.0 }
    }

    fn push(&mut self, numeric: Complex64, closed: Complex64) {
        self.scale = self.scale.max(numeric.norm()).max(closed.norm());
        self.worst = self.worst.max((numeric - closed).norm());
    }

    fn residual(&self) -> f64 {
        rel(self.worst, self.scale)
    }
}

/// Sum a combination of terms that must cancel, normalized by the largest
/// participating term.
fn combo_residual(terms: &[Complex64]) -> f64 {
    let sum: Complex64 = terms.iter().sum();
    let scale = terms.iter().map(|t| t.norm()).fold(1.0, f64::max);
    rel(sum.norm(), scale)
}

/// Compare every closed-form curvature component of the general metric form
/// against numerically computed frame curvature at `pt`.
pub fn appendix_oracle(
    base: &CRBase,
    lam: &GeneralLambda,
    pt: &[f64],
) -> Result<AppendixRecord> {
    let m = base.m();
    let mf = m as f64;
    let ew = EmbeddedWebster::new(base, pt)?;
    let lj = lambda_jets(&ew, lam, pt)?;
    let model = assemble_general(base, lam.clone())?;
    let pack = curvature_pack(&model.metric(), pt, 2).map_err(|e| e.at_point(pt))?;
    let rd = pack.riemann_down_values();
    let ricv = pack.ricci_values();
    let fr = model.frame(pt)?;
    let ll = 0usize;
    let lk = 2 * m + 1;
    let hol = |a: usize| a + 1;
    let anti = |a: usize| m + 1 + a;

    let rr = |labels: &[usize]| fr.contract(&rd, labels);
    let rc = |labels: &[usize]| fr.contract(&ricv, labels);

    // Derivative families of the connection data in every base direction.
    let nlab = 2 * m + 1;
    let v = |j: &CJet| j.value();
    let dot = |j: &CJet| j.derivative(0).value();
    let d_e: Vec<Vec<CJet>> = (0..nlab).map(|dir| ew.nab_h(dir, &lj.e)).collect();
    let ebar: Vec<CJet> = lj.e.iter().map(|j| j.conj()).collect();
    let d_ebar: Vec<Vec<CJet>> = (0..nlab).map(|dir| ew.nab_a(dir, &ebar)).collect();
    let d_bhh: Vec<Vec<Vec<CJet>>> = (0..nlab).map(|dir| ew.nab_hh(dir, &lj.b_hh)).collect();
    let d_bhm: Vec<Vec<Vec<CJet>>> = (0..nlab).map(|dir| ew.nab_hm(dir, &lj.b_hm)).collect();
    let d_c: Vec<Vec<CJet>> = (0..nlab).map(|dir| ew.nab_h(dir, &lj.cc)).collect();
    let cbar: Vec<CJet> = lj.cc.iter().map(|j| j.conj()).collect();
    let d_cbar: Vec<Vec<CJet>> = (0..nlab).map(|dir| ew.nab_a(dir, &cbar)).collect();
    let d_a: Vec<Vec<Vec<CJet>>> = (0..nlab).map(|dir| ew.nab_hh(dir, &ew.torsion)).collect();
    let d_n: Vec<Vec<Vec<Vec<CJet>>>> =
        (0..nlab).map(|dir| ew.nab_hhh(dir, &ew.nijenhuis)).collect();
    let d_e0: Vec<CJet> = (0..nlab).map(|dir| ew.fd(dir, &lj.e0)).collect();

    // Point values of the connection data.
    let la = |a: usize| lj.la[a].value();
    let l0 = lj.l0.value();
    let e = |a: usize| lj.e[a].value();
    let ed = |a: usize| dot(&lj.e[a]);
    let e0 = lj.e0.value();
    let e0d = dot(&lj.e0);
    let bhh = |a: usize, b: usize| lj.b_hh[a][b].value();
    let bhhd = |a: usize, b: usize| dot(&lj.b_hh[a][b]);
    let bhm = |a: usize, b: usize| lj.b_hm[a][b].value();
    let bhmd = |a: usize, b: usize| dot(&lj.b_hm[a][b]);
    let cv = |a: usize| lj.cc[a].value();
    let cvd = |a: usize| dot(&lj.cc[a]);
    let nij = |a: usize, b: usize, g: usize| ew.nijenhuis[a][b][g].value();
    let tor = |a: usize, b: usize| ew.torsion[a][b].value();
    let h = |a: usize, b: usize| if a == b { c(1.0) } else { c(0.0) };
    let i1 = ic(1.0);

    let mut riemann = Vec::with_capacity(16);

    // R(e_γ, k, k, e_α) = 0.
    let mut f = FamilyAcc::new();
    for g in 0..m {
        for a in 0..m {
            f.push(rr(&[hol(g), lk, lk, hol(a)]), c(0.0));
        }
    }
    riemann.push(("R(e,k,k,e)".to_string(), f.residual()));

    // R(ē_γ̄, k, k, e_α) = −h_{αγ̄}.
    let mut f = FamilyAcc::new();
    for g in 0..m {
        for a in 0..m {
            f.push(rr(&[anti(g), lk, lk, hol(a)]), -h(a, g));
        }
    }
    riemann.push(("R(ebar,k,k,e)".to_string(), f.residual()));

    // R(ℓ, k, k, e_α) = Ė_α − i E_α.
    let mut f = FamilyAcc::new();
    for a in 0..m {
        f.push(rr(&[ll, lk, lk, hol(a)]), ed(a) - i1 * e(a));
    }
    riemann.push(("R(l,k,k,e)".to_string(), f.residual()));

    // R(e_β, e_δ, k, e_α) = −2i N_{βδα}.
    let mut f = FamilyAcc::new();
    for b in 0..m {
        for dl in 0..m {
            for a in 0..m {
                f.push(rr(&[hol(b), hol(dl), lk, hol(a)]), ic(-2.0) * nij(b, dl, a));
            }
        }
    }
    riemann.push(("R(e,e,k,e)".to_string(), f.residual()));

    // R(e_β, ē_γ̄, k, e_α) = −2i E_α h_{βγ̄} − i E_β h_{αγ̄}.
    let mut f = FamilyAcc::new();
    for b in 0..m {
        for g in 0..m {
            for a in 0..m {
                f.push(
                    rr(&[hol(b), anti(g), lk, hol(a)]),
                    ic(-2.0) * e(a) * h(b, g) - i1 * e(b) * h(a, g),
                );
            }
        }
    }
    riemann.push(("R(e,ebar,k,e)".to_string(), f.residual()));

    // R(e_γ, ℓ, k, e_α).
    let mut f = FamilyAcc::new();
    for g in 0..m {
        for a in 0..m {
            let mut closed = -v(&d_e[hol(g)][a]) + la(g) * ed(a) + e(a) * e(g);
            for b in 0..m {
                closed += e(b).conj() * nij(b, a, g);
            }
            closed += ic(-0.5) * tor(a, g) - i1 * bhh(g, a);
            f.push(rr(&[hol(g), ll, lk, hol(a)]), closed);
        }
    }
    riemann.push(("R(e,l,k,e)".to_string(), f.residual()));

    // R(ē_β̄, ℓ, k, e_α).
    let mut f = FamilyAcc::new();
    for b in 0..m {
        for a in 0..m {
            let closed = -v(&d_e[anti(b)][a]) + la(b).conj() * ed(a) + e(a) * e(b).conj()
                + i1 * e0 * h(a, b)
                - i1 * bhm(a, b);
            f.push(rr(&[anti(b), ll, lk, hol(a)]), closed);
        }
    }
    riemann.push(("R(ebar,l,k,e)".to_string(), f.residual()));

    // R(ℓ, k, k, ℓ) = Ė₀ − 2 E_α E^α.
    let mut f = FamilyAcc::new();
    let mut ee: Complex64 = c(0.0);
    for a in 0..m {
        ee += e(a) * e(a).conj();
    }
    f.push(rr(&[ll, lk, lk, ll]), e0d - 2.0 * ee);
    riemann.push(("R(l,k,k,l)".to_string(), f.residual()));

    // R(e_γ, e_δ, e_α, e_β) = ∇_γ N_{αβδ} − ∇_δ N_{αβγ}.
    let mut f = FamilyAcc::new();
    for g in 0..m {
        for dl in 0..m {
            for a in 0..m {
                for b in 0..m {
                    let closed = v(&d_n[hol(g)][a][b][dl]) - v(&d_n[hol(dl)][a][b][g]);
                    f.push(rr(&[hol(g), hol(dl), hol(a), hol(b)]), closed);
                }
            }
        }
    }
    riemann.push(("R(e,e,e,e)".to_string(), f.residual()));

    // R(e_γ, ē_δ̄, e_α, e_β).
    let mut f = FamilyAcc::new();
    for g in 0..m {
        for dl in 0..m {
            for a in 0..m {
                for b in 0..m {
                    let closed = ic(2.0) * bhh(a, b) * h(g, dl)
                        - i1 * (bhh(g, a) * h(b, dl) - bhh(g, b) * h(a, dl))
                        - v(&d_n[anti(dl)][a][b][g])
                        + ic(0.5) * (tor(g, a) * h(b, dl) - tor(g, b) * h(a, dl));
                    f.push(rr(&[hol(g), anti(dl), hol(a), hol(b)]), closed);
                }
            }
        }
    }
    riemann.push(("R(e,ebar,e,e)".to_string(), f.residual()));

    // R(e_γ, ē_δ̄, ē_β̄, e_α).
    let mut f = FamilyAcc::new();
    for g in 0..m {
        for dl in 0..m {
            for b in 0..m {
                for a in 0..m {
                    let mut closed = v(ew.r_comp(g, dl, a, b))
                        - ic(2.0) * bhm(a, b) * h(g, dl)
                        - ic(2.0) * bhm(g, dl) * h(a, b)
                        - i1 * bhm(g, b) * h(a, dl)
                        - i1 * bhm(a, dl) * h(g, b);
                    for ep in 0..m {
                        closed += nij(ep, a, g) * nij(ep, b, dl).conj();
                    }
                    f.push(rr(&[hol(g), anti(dl), anti(b), hol(a)]), closed);
                }
            }
        }
    }
    riemann.push(("R(e,ebar,ebar,e)".to_string(), f.residual()));

    // R(ℓ, k, e_α, ℓ).
    let mut f = FamilyAcc::new();
    for a in 0..m {
        let mut closed = c(0.5) * v(&d_e[0][a]) - c(0.5) * l0 * ed(a) + i1 * cv(a) - cvd(a);
        for b in 0..m {
            closed += e(b).conj() * bhh(a, b) + e(b) * bhm(a, b);
        }
        f.push(rr(&[ll, lk, hol(a), ll]), closed);
    }
    riemann.push(("R(l,k,e,l)".to_string(), f.residual()));

    // R(e_γ, ℓ, e_α, e_β).
    let mut f = FamilyAcc::new();
    for g in 0..m {
        for a in 0..m {
            for b in 0..m {
                let mut closed = v(&d_bhh[hol(g)][a][b]) - la(g) * bhhd(a, b)
                    + c(0.5) * (e(a) * tor(b, g) - e(b) * tor(a, g))
                    + e(a) * bhh(b, g)
                    - e(b) * bhh(a, g)
                    - c(0.5) * v(&d_n[0][a][b][g]);
                for dl in 0..m {
                    closed += bhm(a, dl) * nij(b, dl, g) - bhm(b, dl) * nij(a, dl, g);
                }
                f.push(rr(&[hol(g), ll, hol(a), hol(b)]), closed);
            }
        }
    }
    riemann.push(("R(e,l,e,e)".to_string(), f.residual()));

    // R(e_β, ē_γ̄, e_α, ℓ).
    let mut f = FamilyAcc::new();
    for b in 0..m {
        for g in 0..m {
            for a in 0..m {
                let mut closed = -v(&d_bhh[anti(g)][a][b]) + la(g).conj() * bhhd(a, b)
                    + v(&d_bhm[hol(b)][a][g])
                    - la(b) * bhmd(a, g)
                    - 2.0 * e(a) * bhm(b, g)
                    + e(b) * bhm(a, g)
                    - e(g).conj() * bhh(a, b)
                    + ic(2.0) * cv(a) * h(b, g)
                    - c(0.5) * e(g).conj() * tor(a, b)
                    - c(0.5) * v(&d_a[anti(g)][a][b]);
                for dl in 0..m {
                    closed += bhh(g, dl).conj() * nij(dl, a, b);
                    closed -= c(0.5) * tor(g, dl).conj() * nij(dl, a, b);
                }
                f.push(rr(&[hol(b), anti(g), hol(a), ll]), closed);
            }
        }
    }
    riemann.push(("R(e,ebar,e,l)".to_string(), f.residual()));

    // R(e_β, ℓ, e_α, ℓ).
    let mut f = FamilyAcc::new();
    for b in 0..m {
        for a in 0..m {
            let mut closed = -c(0.5) * v(&d_bhh[0][a][b]) + c(0.5) * l0 * bhhd(a, b)
                + v(&d_c[hol(b)][a])
                - la(b) * cvd(a)
                - e(a) * cv(b)
                + e(b) * cv(a)
                - c(0.5) * e0 * tor(a, b)
                - e0 * bhh(a, b)
                - c(0.25) * v(&d_a[0][a][b]);
            for g in 0..m {
                closed += -bhm(a, g) * tor(b, g) + bhh(a, g) * bhm(b, g)
                    - cv(g).conj() * nij(g, a, b)
                    + bhh(b, g) * bhm(a, g);
            }
            f.push(rr(&[hol(b), ll, hol(a), ll]), closed);
        }
    }
    riemann.push(("R(e,l,e,l)".to_string(), f.residual()));

    // R(ē_β̄, ℓ, e_α, ℓ).
    let mut f = FamilyAcc::new();
    for b in 0..m {
        for a in 0..m {
            let mut closed = -c(0.5) * v(&d_bhm[0][a][b]) + c(0.5) * l0 * bhmd(a, b)
                + v(&d_c[anti(b)][a])
                - la(b).conj() * cvd(a)
                - e(a) * cv(b).conj()
                + e(b).conj() * cv(a)
                - e0 * bhm(a, b);
            for g in 0..m {
                closed += -bhh(a, g) * tor(b, g).conj() + bhh(a, g) * bhh(b, g).conj()
                    - bhm(a, g) * bhm(g, b)
                    - c(0.25) * tor(a, g) * tor(b, g).conj();
            }
            f.push(rr(&[anti(b), ll, hol(a), ll]), closed);
        }
    }
    riemann.push(("R(ebar,l,e,l)".to_string(), f.residual()));

    // ----- Ricci families -----
    let mut ricci = Vec::with_capacity(7);

    // Ric(k,k) = 2m.
    let mut f = FamilyAcc::new();
    f.push(rc(&[lk, lk]), c(2.0 * mf));
    ricci.push(("Ric(k,k)".to_string(), f.residual()));

    // Ric(e_α, k) = Ė_α − 4i E_α.
    let mut f = FamilyAcc::new();
    for a in 0..m {
        f.push(rc(&[hol(a), lk]), ed(a) - ic(4.0) * e(a));
    }
    ricci.push(("Ric(e,k)".to_string(), f.residual()));

    // Ric(e_α, e_β).
    let mut f = FamilyAcc::new();
    for a in 0..m {
        for b in 0..m {
            let mut closed = v(&d_e[hol(a)][b]) + v(&d_e[hol(b)][a])
                - la(a) * ed(b)
                - la(b) * ed(a)
                - 2.0 * e(a) * e(b)
                + i1 * mf * tor(a, b);
            for g in 0..m {
                closed += v(&d_n[anti(g)][g][a][b]) + v(&d_n[anti(g)][g][b][a]);
                closed -= (nij(g, a, b) + nij(g, b, a)) * e(g).conj();
            }
            f.push(rc(&[hol(a), hol(b)]), closed);
        }
    }
    ricci.push(("Ric(e,e)".to_string(), f.residual()));

    // Ric(e_α, ē_β̄).
    let mut f = FamilyAcc::new();
    for a in 0..m {
        for b in 0..m {
            let mut closed = v(&d_ebar[hol(a)][b]) + v(&d_e[anti(b)][a])
                - la(a) * ed(b).conj()
                - la(b).conj() * ed(a)
                - 2.0 * e(a) * e(b).conj()
                - ic(4.0) * bhm(a, b)
                + v(&ew.ricci[a][b]);
            for dl in 0..m {
                for g in 0..m {
                    closed -= nij(a, dl, g) * nij(b, dl, g).conj();
                }
            }
            f.push(rc(&[hol(a), anti(b)]), closed);
        }
    }
    ricci.push(("Ric(e,ebar)".to_string(), f.residual()));

    // Ric(ℓ, k).
    let mut f = FamilyAcc::new();
    let mut closed = e0d;
    for a in 0..m {
        closed += v(&d_ebar[hol(a)][a]) + v(&d_e[anti(a)][a])
            - la(a) * ed(a).conj()
            - la(a).conj() * ed(a)
            - 4.0 * e(a) * e(a).conj()
            + ic(2.0) * bhm(a, a);
    }
    f.push(rc(&[ll, lk]), closed);
    ricci.push(("Ric(l,k)".to_string(), f.residual()));

    // Ric(ℓ, e_β).
    let mut f = FamilyAcc::new();
    for b in 0..m {
        let mut closed = v(&d_e0[hol(b)]) - c(0.5) * v(&d_e[0][b]) - la(b) * e0d
            + c(0.5) * l0 * ed(b)
            - i1 * cv(b);
        for a in 0..m {
            closed += -c(0.5) * e(a).conj() * tor(b, a) - 2.0 * e(a).conj() * bhh(a, b)
                + 2.0 * e(a) * bhm(b, a)
                + v(&d_bhh[anti(a)][a][b])
                - la(a).conj() * bhhd(a, b)
                - v(&d_bhm[hol(a)][b][a])
                + la(a) * bhmd(b, a)
                + c(0.5) * v(&d_a[anti(a)][b][a]);
            for g in 0..m {
                closed += c(0.5) * bhh(a, g).conj() * nij(a, g, b)
                    + c(0.5) * tor(a, g).conj() * nij(b, a, g);
            }
        }
        f.push(rc(&[ll, hol(b)]), closed);
    }
    ricci.push(("Ric(l,e)".to_string(), f.residual()));

    // Ric(ℓ, ℓ).
    let mut f = FamilyAcc::new();
    let mut closed = c(0.0);
    for a in 0..m {
        closed += v(&d_cbar[hol(a)][a]) + v(&d_c[anti(a)][a])
            - la(a) * cvd(a).conj()
            - la(a).conj() * cvd(a);
        for b in 0..m {
            closed += -c(0.5) * tor(a, b) * tor(a, b).conj()
                + 2.0 * bhh(a, b) * bhh(a, b).conj()
                - 2.0 * bhm(a, b) * bhm(b, a);
        }
    }
    f.push(rc(&[ll, ll]), closed);
    ricci.push(("Ric(l,l)".to_string(), f.residual()));

    // ----- Scalar curvature -----
    let mut f = FamilyAcc::new();
    let mut closed = 2.0 * e0d + 2.0 * v(&ew.scalar);
    for a in 0..m {
        closed += 4.0 * v(&d_ebar[hol(a)][a]) + 4.0 * v(&d_e[anti(a)][a])
            - 4.0 * la(a) * ed(a).conj()
            - 4.0 * la(a).conj() * ed(a)
            - 12.0 * e(a) * e(a).conj()
            - ic(4.0) * bhm(a, a);
        for b in 0..m {
            for g in 0..m {
                closed -= 2.0 * nij(a, b, g) * nij(a, b, g).conj();
            }
        }
    }
    f.push(pack.scalar_value(), closed);
    let scalar_res = f.residual();

    // ----- Bianchi consequences -----
    let mut bianchi = Vec::with_capacity(7);

    // Ḃ_{αβ} + 2∇_{[α}E_{β]} − 2λ_{[α}Ė_{β]} − N_{αβγ}E^γ = 0.
    let mut worst: f64 = 0.0;
    for a in 0..m {
        for b in 0..m {
            let mut terms = vec![
                bhhd(a, b),
                v(&d_e[hol(a)][b]),
                -v(&d_e[hol(b)][a]),
                -la(a) * ed(b),
                la(b) * ed(a),
            ];
            for g in 0..m {
                terms.push(-nij(a, b, g) * e(g).conj());
            }
            worst = worst.max(combo_residual(&terms));
        }
    }
    bianchi.push(("Bdot-hol-hol".to_string(), worst));

    // Ḃ_{αβ̄} + ∇_αE_β̄ − ∇_β̄E_α − λ_αĖ_β̄ + λ_β̄Ė_α + iE₀h_{αβ̄} = 0.
    let mut worst: f64 = 0.0;
    for a in 0..m {
        for b in 0..m {
            let terms = vec![
                bhmd(a, b),
                v(&d_ebar[hol(a)][b]),
                -v(&d_e[anti(b)][a]),
                -la(a) * ed(b).conj(),
                la(b).conj() * ed(a),
                i1 * e0 * h(a, b),
            ];
            worst = worst.max(combo_residual(&terms));
        }
    }
    bianchi.push(("Bdot-mixed".to_string(), worst));

    // Ċ_α + ∇_αE₀ − ∇_0E_α − λ_αĖ₀ + λ₀Ė_α − A_{βα}E^β = 0.
    let mut worst: f64 = 0.0;
    for a in 0..m {
        let mut terms = vec![
            cvd(a),
            v(&d_e0[hol(a)]),
            -v(&d_e[0][a]),
            -la(a) * e0d,
            l0 * ed(a),
        ];
        for b in 0..m {
            terms.push(-tor(b, a) * e(b).conj());
        }
        worst = worst.max(combo_residual(&terms));
    }
    bianchi.push(("Cdot".to_string(), worst));

    // ∇_{[α}B_{βγ]} − λ_{[α}Ḃ_{βγ]} + B_{[α}{}^δN_{βγ]δ} + 2E_{[α}B_{βγ]} = 0.
    let mut worst: f64 = 0.0;
    let asym3 = |fcn: &dyn Fn(usize, usize, usize) -> Complex64, a: usize, b: usize, g: usize| {
        (fcn(a, b, g) - fcn(a, g, b) + fcn(b, g, a) - fcn(b, a, g) + fcn(g, a, b)
            - fcn(g, b, a))
            / 6.0
    };
    for a in 0..m {
        for b in 0..m {
            for g in 0..m {
                let t1 = |x: usize, y: usize, z: usize| v(&d_bhh[hol(x)][y][z]);
                let t2 = |x: usize, y: usize, z: usize| -la(x) * bhhd(y, z);
                let t3 = |x: usize, y: usize, z: usize| {
                    let mut acc = c(0.0);
                    for dl in 0..m {
                        acc += bhm(x, dl) * nij(y, z, dl);
                    }
                    acc
                };
                let t4 = |x: usize, y: usize, z: usize| 2.0 * e(x) * bhh(y, z);
                let terms = vec![
                    asym3(&t1, a, b, g),
                    asym3(&t2, a, b, g),
                    asym3(&t3, a, b, g),
                    asym3(&t4, a, b, g),
                ];
                worst = worst.max(combo_residual(&terms));
            }
        }
    }
    bianchi.push(("curlB-hol".to_string(), worst));

    // 2∇_{[α}B_{β]γ̄} + ∇_γ̄B_{αβ} − 2λ_{[α}Ḃ_{β]γ̄} − λ_γ̄Ḃ_{αβ}
    //   + 4E_{[α}B_{β]γ̄} + 2E_γ̄B_{αβ} − 2iC_{[α}h_{β]γ̄} + N_{αβδ}B_γ̄{}^δ = 0.
    let mut worst: f64 = 0.0;
    for a in 0..m {
        for b in 0..m {
            for g in 0..m {
                let mut terms = vec![
                    v(&d_bhm[hol(a)][b][g]),
                    -v(&d_bhm[hol(b)][a][g]),
                    v(&d_bhh[anti(g)][a][b]),
                    -la(a) * bhmd(b, g),
                    la(b) * bhmd(a, g),
                    -la(g).conj() * bhhd(a, b),
                    2.0 * e(a) * bhm(b, g),
                    -2.0 * e(b) * bhm(a, g),
                    2.0 * e(g).conj() * bhh(a, b),
                    -i1 * cv(a) * h(b, g),
                    i1 * cv(b) * h(a, g),
                ];
                for dl in 0..m {
                    terms.push(nij(a, b, dl) * bhh(g, dl).conj());
                }
                worst = worst.max(combo_residual(&terms));
            }
        }
    }
    bianchi.push(("curlB-mixed".to_string(), worst));

    // ∇_{[α}C_{β]} − λ_{[α}Ċ_{β]} + ½∇_0B_{αβ} − ½λ₀Ḃ_{αβ}
    //   + 2E_{[α}C_{β]} + E₀B_{αβ} + B_{[α}{}^γA_{β]γ} − ½N_{αβγ}C^γ = 0.
    let mut worst: f64 = 0.0;
    for a in 0..m {
        for b in 0..m {
            let mut terms = vec![
                c(0.5) * (v(&d_c[hol(a)][b]) - v(&d_c[hol(b)][a])),
                c(-0.5) * (la(a) * cvd(b) - la(b) * cvd(a)),
                c(0.5) * v(&d_bhh[0][a][b]),
                c(-0.5) * l0 * bhhd(a, b),
                e(a) * cv(b) - e(b) * cv(a),
                e0 * bhh(a, b),
            ];
            for g in 0..m {
                terms.push(c(0.5) * (bhm(a, g) * tor(b, g) - bhm(b, g) * tor(a, g)));
                terms.push(c(-0.5) * nij(a, b, g) * cv(g).conj());
            }
            worst = worst.max(combo_residual(&terms));
        }
    }
    bianchi.push(("curlC-hol".to_string(), worst));

    // ∇_αC_β̄ − ∇_β̄C_α − λ_αĊ_β̄ + λ_β̄Ċ_α + ∇_0B_{αβ̄} − λ₀Ḃ_{αβ̄}
    //   + 2E_αC_β̄ − 2E_β̄C_α + 2E₀B_{αβ̄} − B_β̄{}^γA_{γα} − A_β̄{}^γB_{γα} = 0.
    let mut worst: f64 = 0.0;
    for a in 0..m {
        for b in 0..m {
            let mut terms = vec![
                v(&d_cbar[hol(a)][b]),
                -v(&d_c[anti(b)][a]),
                -la(a) * cvd(b).conj(),
                la(b).conj() * cvd(a),
                v(&d_bhm[0][a][b]),
                -l0 * bhmd(a, b),
                2.0 * e(a) * cv(b).conj(),
                -2.0 * e(b).conj() * cv(a),
                2.0 * e0 * bhm(a, b),
            ];
            for g in 0..m {
                terms.push(-bhh(b, g).conj() * tor(g, a));
                terms.push(-tor(b, g).conj() * bhh(g, a));
            }
            worst = worst.max(combo_residual(&terms));
        }
    }
    bianchi.push(("curlC-mixed".to_string(), worst));

    Ok(AppendixRecord { riemann, ricci, scalar: scalar_res, bianchi })
}

/// One named Weyl-component comparison.
#[derive(Debug, Clone)]
pub struct WeylComponentRecord {
    pub name: String,
    pub residual: f64,
}

/// Compare the closed-form Weyl components of the Einstein family against
/// numerically computed Weyl curvature at `pt`.
pub fn weyl_einstein_components(
    base: &CRBase,
    params: &EinsteinParams,
    pt: &[f64],
) -> Result<Vec<WeylComponentRecord>> {
    let model = assemble_einstein(base, params)?;
    let m = params.m;
    let mf = m as f64;
    let ew = EmbeddedWebster::new(base, pt)?;
    let pack = curvature_pack(&model.metric(), pt, 2).map_err(|e| e.at_point(pt))?;
    let wd = pack.weyl_down_values()?;
    let fr = model.frame(pt)?;
    let ll = 0usize;
    let lk = 2 * m + 1;
    let hol = |a: usize| a + 1;
    let anti = |a: usize| m + 1 + a;
    let ww = |labels: &[usize]| fr.contract(wd, labels);
    let v = |j: &CJet| j.value();
    let nij = |a: usize, b: usize, g: usize| ew.nijenhuis[a][b][g].value();
    let h = |a: usize, b: usize| if a == b { c(1.0) } else { c(0.0) };

    let lj = lambda0(params, pt[0])?;
    let l0 = lj.value();
    let l0d = lj.derivative(0).value();
    let l0dd = lj.derivative(0).derivative(0).value();
    let ulam = params.ulambda;

    let nlab = 2 * m + 1;
    let d_n: Vec<Vec<Vec<Vec<CJet>>>> =
        (0..nlab).map(|dir| ew.nab_hhh(dir, &ew.nijenhuis)).collect();

    let mut out = Vec::new();

    // W(e_γ, k, e_α, e_β) = 2i N_{αβγ}.
    let mut f = FamilyAcc::new();
    for g in 0..m {
        for a in 0..m {
            for b in 0..m {
                f.push(ww(&[hol(g), lk, hol(a), hol(b)]), ic(2.0) * nij(a, b, g));
            }
        }
    }
    out.push(WeylComponentRecord { name: "W(e,k,e,e)".into(), residual: f.residual() });

    // W(e_γ, e_δ, e_α, e_β) = ∇_γN_{αβδ} − ∇_δN_{αβγ}.
    let mut f = FamilyAcc::new();
    for g in 0..m {
        for dl in 0..m {
            for a in 0..m {
                for b in 0..m {
                    f.push(
                        ww(&[hol(g), hol(dl), hol(a), hol(b)]),
                        v(&d_n[hol(g)][a][b][dl]) - v(&d_n[hol(dl)][a][b][g]),
                    );
                }
            }
        }
    }
    out.push(WeylComponentRecord { name: "W(e,e,e,e)".into(), residual: f.residual() });

    // W(e_γ, e_δ, ē_β̄, e_α) = ∇_β̄N_{γδα}.
    let mut f = FamilyAcc::new();
    for g in 0..m {
        for dl in 0..m {
            for b in 0..m {
                for a in 0..m {
                    f.push(
                        ww(&[hol(g), hol(dl), anti(b), hol(a)]),
                        v(&d_n[anti(b)][g][dl][a]),
                    );
                }
            }
        }
    }
    out.push(WeylComponentRecord { name: "W(e,e,ebar,e)".into(), residual: f.residual() });

    // W(e_γ, ē_δ̄, ē_β̄, e_α): base curvature plus λ₀ trace terms.
    let mut f = FamilyAcc::new();
    let ctrace = (l0dd + 2.0 * (3.0 * mf + 2.0) * l0 - 2.0 * (mf + 1.0) * ulam)
        / (2.0 * mf * (2.0 * mf + 1.0));
    for g in 0..m {
        for dl in 0..m {
            for b in 0..m {
                for a in 0..m {
                    let mut closed = v(ew.r_comp(g, dl, a, b)) - 2.0 * l0 * h(a, b) * h(g, dl)
                        - l0 * h(g, b) * h(a, dl)
                        + ctrace * h(a, dl) * h(g, b);
                    for ep in 0..m {
                        closed += nij(ep, b, dl).conj() * nij(ep, a, g);
                    }
                    f.push(ww(&[hol(g), anti(dl), anti(b), hol(a)]), closed);
                }
            }
        }
    }
    out.push(WeylComponentRecord { name: "W(e,ebar,ebar,e)".into(), residual: f.residual() });

    // W(ē_β̄, ℓ, k, e_α) ∝ h_{αβ̄}.
    let mut f = FamilyAcc::new();
    let coeff = ic(0.5) * l0d
        + c((0.5 * (2.0 * mf - 1.0) * l0dd - (2.0 * mf + 2.0) * l0 + ulam)
            / (2.0 * mf * (2.0 * mf + 1.0)));
    for b in 0..m {
        for a in 0..m {
            f.push(ww(&[anti(b), ll, lk, hol(a)]), coeff * h(a, b));
        }
    }
    out.push(WeylComponentRecord { name: "W(ebar,l,k,e)".into(), residual: f.residual() });

    // W(ℓ, k, k, ℓ): the scalar invariant of the null direction.
    let mut f = FamilyAcc::new();
    let closed = (0.5 * (2.0 * mf - 1.0) * l0dd - (2.0 * mf + 2.0) * l0 + ulam)
        / (2.0 * mf + 1.0);
    f.push(ww(&[ll, lk, lk, ll]), c(closed));
    out.push(WeylComponentRecord { name: "W(l,k,k,l)".into(), residual: f.residual() });

    // W(e_γ, ℓ, e_α, e_β) = i λ₀ N_{αβγ}.
    let mut f = FamilyAcc::new();
    for g in 0..m {
        for a in 0..m {
            for b in 0..m {
                f.push(ww(&[hol(g), ll, hol(a), hol(b)]), ic(1.0) * l0 * nij(a, b, g));
            }
        }
    }
    out.push(WeylComponentRecord { name: "W(e,l,e,e)".into(), residual: f.residual() });

    // W(k, e_α, e_β, e_γ) = −2i N_{βγα}.
    let mut f = FamilyAcc::new();
    for a in 0..m {
        for b in 0..m {
            for g in 0..m {
                f.push(ww(&[lk, hol(a), hol(b), hol(g)]), ic(-2.0) * nij(b, g, a));
            }
        }
    }
    out.push(WeylComponentRecord { name: "W(k,e,e,e)".into(), residual: f.residual() });

    // W(ē_ᾱ, e_β, e_γ, e_δ) = ∇_ᾱN_{γδβ}.
    let mut f = FamilyAcc::new();
    for a in 0..m {
        for b in 0..m {
            for g in 0..m {
                for dl in 0..m {
                    f.push(
                        ww(&[anti(a), hol(b), hol(g), hol(dl)]),
                        v(&d_n[anti(a)][g][dl][b]),
                    );
                }
            }
        }
    }
    out.push(WeylComponentRecord { name: "W(ebar,e,e,e)".into(), residual: f.residual() });

    // Trace-free screen part: W(e_β, ē_δ̄, ē_γ̄, e_α)∘ against the Nijenhuis
    // quadratic plus the base Chern–Moser tensor, both sides projected with
    // the same trace removal.
    let residual = {
        let mut lhs = vec![c(0.0); m * m * m * m];
        let mut rhs = vec![c(0.0); m * m * m * m];
        let at = |a: usize, b: usize, g: usize, dl: usize| ((a * m + b) * m + g) * m + dl;
        for a in 0..m {
            for b in 0..m {
                for g in 0..m {
                    for dl in 0..m {
                        // (down α, up γ, down β, up δ) slot layout.
                        lhs[at(a, b, g, dl)] = ww(&[hol(g), anti(dl), anti(b), hol(a)]);
                        let mut r = v(ew.chern_moser_comp(a, b, g, dl));
                        for ep in 0..m {
                            let sym_ab = 0.5 * (nij(ep, a, g) + nij(ep, g, a));
                            let sym_gd = 0.5 * (nij(ep, b, dl) + nij(ep, dl, b));
                            r += 0.5 * nij(b, dl, ep).conj() * nij(a, g, ep)
                                - sym_ab * nij(b, dl, ep).conj()
                                - sym_gd.conj() * nij(a, g, ep)
                                + sym_ab * sym_gd.conj();
                        }
                        rhs[at(a, b, g, dl)] = r;
                    }
                }
            }
        }
        let project = |t: &[Complex64]| -> Vec<Complex64> {
            // Symmetrize the two down slots and the two up slots.
            let mut sym = vec![c(0.0); m * m * m * m];
            for a in 0..m {
                for b in 0..m {
                    for g in 0..m {
                        for dl in 0..m {
                            sym[at(a, b, g, dl)] = 0.25
                                * (t[at(a, b, g, dl)]
                                    + t[at(g, b, a, dl)]
                                    + t[at(a, dl, g, b)]
                                    + t[at(g, dl, a, b)]);
                        }
                    }
                }
            }
            let mut u = vec![c(0.0); m * m];
            for g in 0..m {
                for dl in 0..m {
                    let mut acc = c(0.0);
                    for a in 0..m {
                        acc += sym[at(a, a, g, dl)];
                    }
                    u[g * m + dl] = acc;
                }
            }
            let mut us = c(0.0);
            for a in 0..m {
                us += u[a * m + a];
            }
            let mut out = vec![c(0.0); m * m * m * m];
            for a in 0..m {
                for b in 0..m {
                    for g in 0..m {
                        for dl in 0..m {
                            let mut vv = sym[at(a, b, g, dl)];
                            let mut corr = c(0.0);
                            if a == b {
                                corr += u[g * m + dl];
                            }
                            if g == b {
                                corr += u[a * m + dl];
                            }
                            if a == dl {
                                corr += u[g * m + b];
                            }
                            if g == dl {
                                corr += u[a * m + b];
                            }
                            vv -= corr / (mf + 2.0);
                            let mut kr = 0.0;
                            if a == b && g == dl {
                                kr += 1.0;
                            }
                            if a == dl && g == b {
                                kr += 1.0;
                            }
                            vv += us * kr / ((mf + 1.0) * (mf + 2.0));
                            out[at(a, b, g, dl)] = vv;
                        }
                    }
                }
            }
            out
        };
        let lp = project(&lhs);
        let rp = project(&rhs);
        let mut f = FamilyAcc::new();
        for i in 0..lp.len() {
            f.push(lp[i], rp[i]);
        }
        f.residual()
    };
    out.push(WeylComponentRecord { name: "W(e,ebar,ebar,e) tracefree".into(), residual });

    Ok(out)
}

/// Residuals of the covariant-derivative patterns of the distinguished
/// coframe `(κ, θ^α, λ)` of an Einstein model.
#[derive(Debug, Clone, Copy)]
pub struct CoframeDerivativeResiduals {
    /// `∇κ` against `2i h_{αβ̄}θ^α∧θ̄^β̄ + ½λ̇₀ κ⊗κ`.
    pub kappa: f64,
    /// `∇θ^α` against the pulled-back Webster derivative plus `λ` and `λ₀`
    /// correction terms.
    pub theta: f64,
    /// `∇λ` against `i λ₀ h_{αβ̄}θ^α∧θ̄^β̄ − ½λ̇₀ κ⊗λ`.
    pub lambda: f64,
}

impl CoframeDerivativeResiduals {
    pub fn max(&self) -> f64 {
        self.kappa.max(self.theta).max(self.lambda)
    }
}

/// Check the covariant-derivative patterns of the coframe of an Einstein
/// model at `pt` (with respect to the unrescaled metric `g`).
pub fn coframe_derivative_check(
    model: &SpacetimeModel,
    pt: &[f64],
) -> Result<CoframeDerivativeResiduals> {
    let params = *model
        .params()
        .ok_or_else(|| Error::Argument("coframe check needs an Einstein model".into()))?;
    let m = model.m();
    let d = model.dim();
    let g = model.metric();
    let pack = curvature_pack(&g, pt, 2).map_err(|e| e.at_point(pt))?;
    let cf = model.coframe(pt, 2)?;
    let fr = model.frame(pt)?;
    let ew = EmbeddedWebster::new(model.base(), pt)?;
    let lj = lambda0(&params, pt[0])?;
    let l0 = lj.value();
    let l0d = lj.derivative(0).value();
    let ll = 0usize;
    let lk = d - 1;
    let hol = |a: usize| a + 1;
    let i1 = ic(1.0);

    // ∇κ pattern.
    let nk = pack.covariant_derivative(&cf.kappa, &[Variance::Down]);
    let mut f = FamilyAcc::new();
    for x in 0..d {
        for y in 0..d {
            let numeric = fr.contract(&nk, &[x, y]);
            let mut expected = c(0.0);
            if (1..=m).contains(&x) && y == x + m {
                expected += i1;
            }
            if (1..=m).contains(&y) && x == y + m {
                expected -= i1;
            }
            if x == ll && y == ll {
                expected += c(0.5 * l0d);
            }
            f.push(numeric, expected);
        }
    }
    let kappa_res = f.residual();

    // ∇θ^α pattern.
    let mut f = FamilyAcc::new();
    for al in 0..m {
        let nt = pack.covariant_derivative(&cf.theta[al], &[Variance::Down]);
        for x in 0..d {
            for y in 0..d {
                let numeric = fr.contract(&nt, &[x, y]);
                let mut expected = c(0.0);
                // Pulled-back Webster derivative: −Γ_{Dγ}{}^α on the θ^γ slot.
                if (1..=m).contains(&y) {
                    let gidx = y;
                    if x == ll {
                        expected -= 0.5 * ew.gamma(0, gidx, al + 1).value();
                    } else if (1..=m).contains(&x) {
                        expected -= ew.gamma(x, gidx, al + 1).value();
                    } else if (m + 1..=2 * m).contains(&x) {
                        expected -= ew.gamma(x, gidx, al + 1).value();
                    }
                }
                // Nijenhuis correction on the conjugate pair.
                if (m + 1..=2 * m).contains(&x) && (m + 1..=2 * m).contains(&y) {
                    let gq = x - m - 1;
                    let bq = y - m - 1;
                    expected -= ew.nijenhuis[al][bq][gq].value().conj();
                }
                // −2i λ⊙θ^α: λ pairs with k, θ^α with e_α.
                if x == lk && y == hol(al) {
                    expected -= i1;
                }
                if y == lk && x == hol(al) {
                    expected -= i1;
                }
                // −i λ₀ κ⊙θ^α: κ pairs with ℓ.
                if x == ll && y == hol(al) {
                    expected -= ic(0.5) * l0;
                }
                if y == ll && x == hol(al) {
                    expected -= ic(0.5) * l0;
                }
                f.push(numeric, expected);
            }
        }
    }
    let theta_res = f.residual();

    // ∇λ pattern.
    let nl = pack.covariant_derivative(&cf.lam, &[Variance::Down]);
    let mut f = FamilyAcc::new();
    for x in 0..d {
        for y in 0..d {
            let numeric = fr.contract(&nl, &[x, y]);
            let mut expected = c(0.0);
            if (1..=m).contains(&x) && y == x + m {
                expected += ic(0.5) * l0;
            }
            if (1..=m).contains(&y) && x == y + m {
                expected -= ic(0.5) * l0;
            }
            if x == ll && y == lk {
                expected -= c(0.5 * l0d);
            }
            f.push(numeric, expected);
        }
    }
    let lambda_res = f.residual();

    Ok(CoframeDerivativeResiduals { kappa: kappa_res, theta: theta_res, lambda: lambda_res })
}
