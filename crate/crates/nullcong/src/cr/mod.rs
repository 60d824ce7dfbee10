//! Almost-CR base geometry.
//!
//! A base is a chart with real coordinates `(t, x^1, y^1, ..., x^m, y^m)`
//! carrying a real contact form `theta0`, `m` complex coframe forms
//! `theta^alpha` (complex combinations `z^alpha = x^alpha + i y^alpha` are the
//! natural variables), and a Hermitian positive-definite Levi form
//! `h_{alpha beta-bar}`.  The coframe is *adapted* when
//!
//! ```text
//! d theta0 = i h_{alpha beta-bar} theta^alpha ∧ conj(theta^beta).
//! ```
//!
//! This module solves the structure equations of the Webster–Tanaka connection
//! for an adapted coframe, producing the connection coefficients, the
//! pseudo-Hermitian torsion `A_{alpha beta}`, the Nijenhuis tensor
//! `N_{alpha beta gamma}`, and the full curvature with one order of derivative
//! to spare.  On top of that it offers the Webster–Ricci tensor, Webster
//! scalar, the associated Schouten-type tensor, the Chern–Moser tensor, and a
//! CR–Einstein diagnostic.
//!
//! Frame labels used throughout: `0` is the Reeb direction, `1..=m` the
//! holomorphic frame vectors `e_alpha`, and `m+1..=2m` their conjugates.  With
//! the Levi form normalised to the identity (which [`CRBase::eval_unitary`]
//! enforces), raising an index with the Levi form is pure relabelling: an
//! upper holomorphic index `alpha` is stored in the conjugate slot `m+alpha`,
//! and an upper conjugate index in the holomorphic slot `alpha`.

pub mod bases;
pub mod manifest;

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::jet::CJet;
use crate::tensor::{d_one_form_jets, d_one_form_values, JetMatrix};

/// Imaginary unit shorthand.
fn im() -> Complex64 {
    Complex64::new(0.0, 1.0)
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Raw coframe data at a chart point: coordinate components of the contact
/// form, of the `m` complex coframe forms, and the Levi form, all as jets.
pub struct RawCoframe {
    /// Coordinate components of the (real) contact form, length `2m+1`.
    pub theta0: Vec<CJet>,
    /// `theta[alpha][i]`: coordinate component `i` of `theta^{alpha+1}`.
    pub theta: Vec<Vec<CJet>>,
    /// `levi[alpha][beta]` is `h_{alpha beta-bar}` (Hermitian).
    pub levi: Vec<Vec<CJet>>,
}

/// Point evaluator for a coframe: arguments are the chart point and the
/// requested jet order.
pub type CoframeEval = Arc<dyn Fn(&[f64], u8) -> Result<RawCoframe> + Send + Sync>;

/// A chart-local almost-CR base of holomorphic rank `m` (chart dimension
/// `2m+1`).
#[derive(Clone)]
pub struct CRBase {
    m: usize,
    coord_names: Vec<String>,
    eval: CoframeEval,
    kahler_einstein_constant: Option<f64>,
}

impl std::fmt::Debug for CRBase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CRBase")
            .field("m", &self.m)
            .field("coord_names", &self.coord_names)
            .field("kahler_einstein_constant", &self.kahler_einstein_constant)
            .finish_non_exhaustive()
    }
}

impl CRBase {
    /// Wraps a coframe evaluator.  `coord_names` must have length `2m+1`.
    pub fn new(m: usize, coord_names: Vec<String>, eval: CoframeEval) -> Result<Self> {
        if m == 0 {
            return Err(Error::Argument("holomorphic rank m must be at least 1".into()));
        }
        if coord_names.len() != 2 * m + 1 {
            return Err(Error::Argument(format!(
                "expected {} coordinate names for rank {}, got {}",
                2 * m + 1,
                m,
                coord_names.len()
            )));
        }
        Ok(CRBase { m, coord_names, eval, kahler_einstein_constant: None })
    }

    /// Records the Einstein constant of the transverse Kähler-type base when
    /// this base was produced by a circle-bundle lift.
    pub fn with_kahler_einstein_constant(mut self, lambda: f64) -> Self {
        self.kahler_einstein_constant = Some(lambda);
        self
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Chart dimension `2m+1`.
    pub fn dim(&self) -> usize {
        2 * self.m + 1
    }

    pub fn coord_names(&self) -> &[String] {
        &self.coord_names
    }

    /// Einstein constant of the transverse base metric, when known.
    pub fn kahler_einstein_constant(&self) -> Option<f64> {
        self.kahler_einstein_constant
    }

    /// Evaluates the raw (non-unitarised) coframe at `pt` with jets of the
    /// requested order, validating array shapes.
    pub fn eval_raw(&self, pt: &[f64], order: u8) -> Result<RawCoframe> {
        if pt.len() != self.dim() {
            return Err(Error::Argument(format!(
                "point has {} coordinates, chart has {}",
                pt.len(),
                self.dim()
            )));
        }
        let raw = (self.eval)(pt, order)?;
        let d = self.dim();
        let shape_ok = raw.theta0.len() == d
            && raw.theta.len() == self.m
            && raw.theta.iter().all(|row| row.len() == d)
            && raw.levi.len() == self.m
            && raw.levi.iter().all(|row| row.len() == self.m)
            && raw.theta0.iter().all(|j| j.dim() == d);
        if !shape_ok {
            return Err(Error::Structure("coframe evaluator returned malformed data".into()));
        }
        Ok(raw)
    }

    /// Evaluates the coframe and rescales the complex forms so that the Levi
    /// form becomes the identity: `theta' = U theta` with `transpose(h) =
    /// adjoint(U) U` (upper-triangular Cholesky factor, applied jet-wise).
    pub fn eval_unitary(&self, pt: &[f64], order: u8) -> Result<UnitaryCoframe> {
        let raw = self.eval_raw(pt, order)?;
        let m = self.m;
        let ht = JetMatrix::from_fn(m, |i, j| raw.levi[j][i].clone());
        let u = ht.cholesky_upper().map_err(|e| {
            Error::Argument(format!("Levi form is not positive Hermitian definite: {e}"))
        })?;
        let d = self.dim();
        let mut theta = Vec::with_capacity(m);
        for a in 0..m {
            let mut row = Vec::with_capacity(d);
            for i in 0..d {
                let mut acc = CJet::constant(d, order, Complex64::new(0.0, 0.0));
                for b in 0..m {
                    acc = &acc + &(u.get(a, b) * &raw.theta[b][i]);
                }
                row.push(acc);
            }
            theta.push(row);
        }
        Ok(UnitaryCoframe { m, theta0: raw.theta0, theta })
    }
}

/// Adapted coframe with the Levi form normalised to the identity.
pub struct UnitaryCoframe {
    m: usize,
    /// Coordinate components of the contact form.
    pub theta0: Vec<CJet>,
    /// `theta[alpha][i]`: components of the rescaled complex coframe.
    pub theta: Vec<Vec<CJet>>,
}

impl UnitaryCoframe {
    pub fn m(&self) -> usize {
        self.m
    }

    /// Stacks the full coframe as a square jet matrix: row `0` is the contact
    /// form, rows `1..=m` the complex forms, rows `m+1..=2m` their conjugates.
    pub fn rows(&self) -> JetMatrix {
        let m = self.m;
        JetMatrix::from_fn(2 * m + 1, |r, i| {
            if r == 0 {
                self.theta0[i].clone()
            } else if r <= m {
                self.theta[r - 1][i].clone()
            } else {
                self.theta[r - m - 1][i].conj()
            }
        })
    }
}

/// Number of frame labels for rank `m`.
fn label_count(m: usize) -> usize {
    2 * m + 1
}

/// Conjugate of a frame label (fixes `0`, swaps holomorphic and conjugate).
pub fn conj_label(m: usize, a: usize) -> usize {
    if a == 0 {
        0
    } else if a <= m {
        a + m
    } else {
        a - m
    }
}

/// A tensor with all slots running over the `2m+1` frame labels, each
/// component a jet on the chart.  Storage is dense row-major.
pub struct CrTensor {
    m: usize,
    rank: usize,
    comps: Vec<CJet>,
}

impl CrTensor {
    pub fn zeros(m: usize, rank: usize, order: u8) -> Self {
        let n = label_count(m);
        let len = n.pow(rank as u32);
        let dim = 2 * m + 1;
        CrTensor {
            m,
            rank,
            comps: vec![CJet::constant(dim, order, Complex64::new(0.0, 0.0)); len],
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn order(&self) -> u8 {
        self.comps[0].order()
    }

    fn flat(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank);
        let n = label_count(self.m);
        let mut f = 0;
        for &i in idx {
            debug_assert!(i < n);
            f = f * n + i;
        }
        f
    }

    pub fn get(&self, idx: &[usize]) -> &CJet {
        &self.comps[self.flat(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: CJet) {
        let f = self.flat(idx);
        self.comps[f] = v;
    }

    /// Maximum modulus over all component values.
    pub fn max_value_modulus(&self) -> f64 {
        self.comps.iter().map(|j| j.value().norm()).fold(0.0, f64::max)
    }
}

/// Solved Webster–Tanaka data at one chart point.
///
/// Connection coefficient layout (all jets of order 2, chart dimension
/// `2m+1`):
/// * `gamma0[b][a]` is the Reeb-direction coefficient `Γ_{0 β}{}^{α}` for
///   `β = b+1`, `α = a+1`;
/// * `gamma_hol[g][b][a]` is `Γ_{γ β}{}^{α}` for the holomorphic direction
///   `γ = g+1`;
/// * `gamma_anti[g][b][a]` is `Γ_{γ-bar β}{}^{α}` for the conjugate direction.
///
/// `torsion[a][b]` is the pseudo-Hermitian torsion `A_{αβ}` (symmetric), and
/// `nijenhuis[a][b][g]` the Nijenhuis tensor `N_{αβγ}` (antisymmetric in its
/// first two slots, vanishing total antisymmetrisation).
pub struct WebsterPoint {
    m: usize,
    point: Vec<f64>,
    pub coframe: UnitaryCoframe,
    /// `frame[a][i]`: coordinate component `i` of frame vector `a`
    /// (dual basis of the unitary coframe; label order as in the module docs).
    pub frame: Vec<Vec<CJet>>,
    pub gamma0: Vec<Vec<CJet>>,
    pub gamma_hol: Vec<Vec<Vec<CJet>>>,
    pub gamma_anti: Vec<Vec<Vec<CJet>>>,
    pub torsion: Vec<Vec<CJet>>,
    pub nijenhuis: Vec<Vec<Vec<CJet>>>,
    /// Largest residual among the internal consistency checks of the solve.
    pub solve_residual: f64,
}

impl WebsterPoint {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn point(&self) -> &[f64] {
        &self.point
    }

    /// Connection coefficient `Γ_{D β}{}^{α}` where `D` is a frame label and
    /// `β`, `α` are 1-based holomorphic indices.
    pub fn gamma(&self, dir: usize, beta: usize, alpha: usize) -> &CJet {
        let m = self.m;
        debug_assert!((1..=m).contains(&beta) && (1..=m).contains(&alpha));
        if dir == 0 {
            &self.gamma0[beta - 1][alpha - 1]
        } else if dir <= m {
            &self.gamma_hol[dir - 1][beta - 1][alpha - 1]
        } else {
            &self.gamma_anti[dir - m - 1][beta - 1][alpha - 1]
        }
    }

    /// Directional derivative of a jet along frame vector `dir` (a frame
    /// label); lowers the jet order by one.
    pub fn frame_derivative(&self, dir: usize, f: &CJet) -> CJet {
        let d = 2 * self.m + 1;
        let ord = f.order().saturating_sub(1);
        let mut acc = CJet::constant(d, ord, Complex64::new(0.0, 0.0));
        for i in 0..d {
            acc = &acc + &(&self.frame[dir][i].truncated(ord) * &f.derivative(i));
        }
        acc
    }

    /// Webster–Tanaka covariant derivative of an all-covariant frame tensor;
    /// the derivative slot is prepended.  The contact slot (`0` label) is
    /// parallel, holomorphic slots are corrected with `-Γ`, conjugate slots
    /// with the conjugated coefficients of the conjugate direction.
    pub fn webster_derivative(&self, t: &CrTensor) -> Result<CrTensor> {
        if t.order() == 0 {
            return Err(Error::Argument(
                "webster_derivative needs at least order-1 jets".into(),
            ));
        }
        let m = self.m;
        let n = label_count(m);
        let r = t.rank();
        let ord_out = t.order() - 1;
        let mut out = CrTensor::zeros(m, r + 1, ord_out);
        let mut idx = vec![0usize; r];
        loop {
            // One multi-index of the input tensor per iteration.
            for dir in 0..n {
                let mut acc = self.frame_derivative(dir, t.get(&idx));
                for s in 0..r {
                    let e = idx[s];
                    if e == 0 {
                        continue;
                    }
                    let mut idx2 = idx.clone();
                    if e <= m {
                        for phi in 1..=m {
                            idx2[s] = phi;
                            let g = self.gamma(dir, e, phi);
                            acc = &acc - &(g * t.get(&idx2));
                        }
                    } else {
                        let eb = e - m;
                        let cdir = conj_label(m, dir);
                        for phi in 1..=m {
                            idx2[s] = m + phi;
                            let g = self.gamma(cdir, eb, phi).conj();
                            acc = &acc - &(&g * t.get(&idx2));
                        }
                    }
                }
                let mut full = Vec::with_capacity(r + 1);
                full.push(dir);
                full.extend_from_slice(&idx);
                out.set(&full, acc.truncated(ord_out));
            }
            // Odometer increment.
            let mut k = r;
            loop {
                if k == 0 {
                    return Ok(out);
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < n {
                    break;
                }
                idx[k] = 0;
            }
        }
    }

    /// Torsion as an all-covariant frame tensor (holomorphic pair plus its
    /// conjugate family).
    pub fn torsion_tensor(&self) -> CrTensor {
        let m = self.m;
        let mut t = CrTensor::zeros(m, 2, 2);
        for a in 0..m {
            for b in 0..m {
                t.set(&[a + 1, b + 1], self.torsion[a][b].clone());
                t.set(&[m + a + 1, m + b + 1], self.torsion[a][b].conj());
            }
        }
        t
    }

    /// Nijenhuis tensor as an all-covariant frame tensor (holomorphic triple
    /// plus its conjugate family).
    pub fn nijenhuis_tensor(&self) -> CrTensor {
        let m = self.m;
        let mut t = CrTensor::zeros(m, 3, 2);
        for a in 0..m {
            for b in 0..m {
                for g in 0..m {
                    t.set(&[a + 1, b + 1, g + 1], self.nijenhuis[a][b][g].clone());
                    t.set(
                        &[m + a + 1, m + b + 1, m + g + 1],
                        self.nijenhuis[a][b][g].conj(),
                    );
                }
            }
        }
        t
    }
}

/// Maximum component modulus of the values of a list of jets.
fn values_scale(jets: &[CJet]) -> f64 {
    jets.iter().map(|j| j.value().norm()).fold(0.0, f64::max)
}

/// Residual of the adaptedness relation
/// `d theta0 = i h_{alpha beta-bar} theta^alpha ∧ conj(theta^beta)`
/// in coordinate components of the raw coframe.
///
/// A degenerate (non-positive or non-Hermitian) Levi form is an argument
/// error.
pub fn validate_adapted(base: &CRBase, pt: &[f64]) -> Result<f64> {
    let raw = base.eval_raw(pt, 1)?;
    let m = base.m();
    let d = base.dim();
    // Positivity / Hermiticity gate.
    let ht = JetMatrix::from_fn(m, |i, j| raw.levi[j][i].clone());
    ht.cholesky_upper().map_err(|e| {
        Error::Argument(format!("Levi form is not positive Hermitian definite: {e}"))
    })?;
    let dth0 = d_one_form_values(&raw.theta0);
    let mut res = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            let mut rhs = Complex64::new(0.0, 0.0);
            for a in 0..m {
                for b in 0..m {
                    let wedge = 0.5
                        * (raw.theta[a][i].value() * raw.theta[b][j].value().conj()
                            - raw.theta[a][j].value() * raw.theta[b][i].value().conj());
                    rhs += im() * raw.levi[a][b].value() * wedge;
                }
            }
            res = res.max((dth0.get(&[i, j]) - rhs).norm());
        }
    }
    Ok(res)
}

/// Normalised modulus of the determinant of the stacked coframe
/// `(theta0, theta, conj(theta))`; vanishing means the contact condition
/// fails at the point.
pub fn contact_volume(base: &CRBase, pt: &[f64]) -> Result<f64> {
    let raw = base.eval_raw(pt, 0)?;
    let m = base.m();
    let n = base.dim();
    let mat = nalgebra::DMatrix::from_fn(n, n, |r, i| {
        if r == 0 {
            raw.theta0[i].value()
        } else if r <= m {
            raw.theta[r - 1][i].value()
        } else {
            raw.theta[r - m - 1][i].value().conj()
        }
    });
    let mut norm = 1.0f64;
    for r in 0..n {
        let row_inf = (0..n).map(|i| mat[(r, i)].norm()).fold(0.0, f64::max);
        norm *= row_inf.max(1e-300);
    }
    Ok(mat.lu().determinant().norm() / norm)
}

/// Reeb vector field at a point, from the defining conditions
/// `theta0(e0) = 1` and `d theta0(e0, ·) = 0`, solved in the least-squares
/// sense (the system is overdetermined but consistent on a contact chart).
///
/// Returns the coordinate components of `e0` as jets together with the two
/// defining residuals.
pub struct ReebSolution {
    pub components: Vec<CJet>,
    pub pairing_residual: f64,
    pub closure_residual: f64,
}

pub fn reeb(base: &CRBase, pt: &[f64]) -> Result<ReebSolution> {
    let raw = base.eval_raw(pt, 2)?;
    let d = base.dim();
    let dth0 = d_one_form_jets(&raw.theta0);
    // Rows of the overdetermined system M x = (1, 0, ..., 0).
    let mut rows: Vec<Vec<CJet>> = Vec::with_capacity(d + 1);
    rows.push(raw.theta0.iter().map(|j| j.truncated(1)).collect());
    for j in 0..d {
        rows.push((0..d).map(|i| dth0[i][j].clone()).collect());
    }
    let normal = JetMatrix::from_fn(d, |i, j| {
        let mut acc = CJet::constant(d, 1, Complex64::new(0.0, 0.0));
        for row in &rows {
            acc = &acc + &(&row[i] * &row[j]);
        }
        acc
    });
    let rhs: Vec<CJet> = (0..d).map(|i| rows[0][i].clone()).collect();
    let components = normal
        .solve(&rhs)
        .map_err(|e| Error::Numeric(format!("degenerate contact form: {e}")))?;
    let mut pairing = Complex64::new(-1.0, 0.0);
    for i in 0..d {
        pairing += raw.theta0[i].value() * components[i].value();
    }
    let mut closure = 0.0f64;
    for j in 0..d {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..d {
            acc += components[i].value() * dth0[i][j].value();
        }
        closure = closure.max(acc.norm());
    }
    Ok(ReebSolution {
        components,
        pairing_residual: pairing.norm(),
        closure_residual: closure,
    })
}

/// Solves the structure equations of the Webster–Tanaka connection at `pt`.
///
/// The coframe is unitarised internally; the expansion of `d theta^alpha` in
/// the frame 2-form basis then yields the connection coefficients, the
/// torsion and the Nijenhuis tensor by coefficient matching, with the
/// holomorphic-direction coefficients fixed by metric compatibility.  All
/// redundancies of the expansion are checked and reported as structure errors
/// if violated.
pub fn webster_solve(base: &CRBase, pt: &[f64]) -> Result<WebsterPoint> {
    let m = base.m();
    let d = base.dim();
    let uc = base.eval_unitary(pt, 3)?;

    // Adaptedness in the unitary frame: d theta0 = i Σ theta^a ∧ conj(theta^a).
    let dth0 = d_one_form_values(&uc.theta0);
    let mut adapt_res = 0.0f64;
    let mut adapt_scale = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            let mut rhs = Complex64::new(0.0, 0.0);
            for a in 0..m {
                rhs += im()
                    * 0.5
                    * (uc.theta[a][i].value() * uc.theta[a][j].value().conj()
                        - uc.theta[a][j].value() * uc.theta[a][i].value().conj());
            }
            adapt_res = adapt_res.max((dth0.get(&[i, j]) - rhs).norm());
            adapt_scale = adapt_scale.max(rhs.norm());
        }
    }
    if adapt_res > 1e-6 * (1.0 + adapt_scale) {
        return Err(Error::Structure(format!(
            "coframe is not adapted: max |d theta0 - i h theta ∧ conj(theta)| = {adapt_res:.3e}"
        )));
    }

    // Dual frame (columns of the inverse coframe matrix).
    let inv = uc
        .rows()
        .invert()
        .map_err(|e| Error::Numeric(format!("contact degeneracy: {e}")))?;
    let frame: Vec<Vec<CJet>> =
        (0..d).map(|a| (0..d).map(|i| inv.get(i, a).clone()).collect()).collect();

    // Frame components of d theta^alpha for every alpha.
    // two_form[a][bb * n + cc] = (d theta^{a+1})(e_bb, e_cc), jets of order 2.
    let n = d;
    let mut two_form: Vec<Vec<CJet>> = Vec::with_capacity(m);
    for a in 0..m {
        let dth = d_one_form_jets(&uc.theta[a]);
        // Row-contract first: g[bb][j] = Σ_i frame[bb][i] dth[i][j].
        let mut g: Vec<Vec<CJet>> = Vec::with_capacity(n);
        for frame_b in frame.iter().take(n) {
            let mut row = Vec::with_capacity(n);
            for j in 0..n {
                let mut acc = CJet::constant(d, 2, Complex64::new(0.0, 0.0));
                for (i, fb) in frame_b.iter().enumerate() {
                    acc = &acc + &(fb * &dth[i][j]);
                }
                row.push(acc);
            }
            g.push(row);
        }
        let mut t = Vec::with_capacity(n * n);
        for gb in g.iter().take(n) {
            for frame_c in frame.iter().take(n) {
                let mut acc = CJet::constant(d, 2, Complex64::new(0.0, 0.0));
                for (j, fc) in frame_c.iter().enumerate() {
                    acc = &acc + &(&gb[j] * fc);
                }
                t.push(acc);
            }
        }
        two_form.push(t);
    }
    let tf = |a: usize, bb: usize, cc: usize| -> &CJet { &two_form[a][bb * n + cc] };

    // Read-off.  With T = d theta^alpha in frame components:
    //   Γ_{0β}{}^α     = -2 T(e_0, e_β)
    //   A^α{}_{β-bar}  =  2 T(e_0, e_{β-bar})
    //   Γ_{γ-bar β}{}^α = 2 T(e_β, e_{γ-bar})
    //   N_{β-bar γ-bar}{}^α = -2 T(e_{β-bar}, e_{γ-bar})
    // and metric compatibility fixes Γ_{γβ}{}^α = -conj(Γ_{γ-bar α}{}^β).
    let mut gamma0 = vec![vec![CJet::constant(d, 2, c(0.0)); m]; m];
    let mut a_raw = vec![vec![CJet::constant(d, 2, c(0.0)); m]; m];
    let mut gamma_anti = vec![vec![vec![CJet::constant(d, 2, c(0.0)); m]; m]; m];
    let mut n_raw = vec![vec![vec![CJet::constant(d, 2, c(0.0)); m]; m]; m];
    for al in 0..m {
        for b in 0..m {
            gamma0[b][al] = tf(al, 0, 1 + b).scaled(c(-2.0));
            a_raw[al][b] = tf(al, 0, m + 1 + b).scaled(c(2.0));
            for g in 0..m {
                gamma_anti[g][b][al] = tf(al, 1 + b, m + 1 + g).scaled(c(2.0));
                n_raw[b][g][al] = tf(al, m + 1 + b, m + 1 + g).scaled(c(-2.0));
            }
        }
    }
    let mut gamma_hol = vec![vec![vec![CJet::constant(d, 2, c(0.0)); m]; m]; m];
    for g in 0..m {
        for b in 0..m {
            for al in 0..m {
                gamma_hol[g][b][al] = -&gamma_anti[g][al][b].conj();
            }
        }
    }

    // Scale for the defensive consistency checks.
    let mut scale = 1.0f64;
    for a in 0..m {
        scale = scale.max(values_scale(&two_form[a]));
    }
    let tol = 1e-6 * scale;
    let mut solve_residual = 0.0f64;

    // Holomorphic wedge coefficients must match the antisymmetrised
    // holomorphic connection coefficients.
    for al in 0..m {
        for b in 0..m {
            for g in (b + 1)..m {
                let lhs = tf(al, 1 + b, 1 + g).value().scale(2.0);
                let rhs = gamma_hol[g][b][al].value() - gamma_hol[b][g][al].value();
                let r = (lhs - rhs).norm();
                solve_residual = solve_residual.max(r);
                if r > tol {
                    return Err(Error::Structure(format!(
                        "structure equations inconsistent: theta^{}∧theta^{} coefficient of \
                         d theta^{} differs from the metric-compatible connection by {r:.3e}",
                        b + 1,
                        g + 1,
                        al + 1
                    )));
                }
            }
        }
    }
    // The Reeb-direction coefficients must be anti-Hermitian.
    for b in 0..m {
        for al in 0..m {
            let r = (gamma0[b][al].value() + gamma0[al][b].value().conj()).norm();
            solve_residual = solve_residual.max(r);
            if r > tol {
                return Err(Error::Structure(format!(
                    "structure equations inconsistent: Reeb-direction connection \
                     coefficient ({}, {}) is not anti-Hermitian (residual {r:.3e})",
                    b + 1,
                    al + 1
                )));
            }
        }
    }
    // Torsion must be symmetric once both indices are holomorphic.
    let mut torsion = vec![vec![CJet::constant(d, 2, c(0.0)); m]; m];
    for al in 0..m {
        for b in 0..m {
            torsion[al][b] = a_raw[al][b].conj();
        }
    }
    for al in 0..m {
        for b in (al + 1)..m {
            let r = (torsion[al][b].value() - torsion[b][al].value()).norm();
            solve_residual = solve_residual.max(r);
            if r > tol {
                return Err(Error::Structure(format!(
                    "structure equations inconsistent: torsion ({}, {}) is not symmetric \
                     (residual {r:.3e})",
                    al + 1,
                    b + 1
                )));
            }
        }
    }
    // Nijenhuis tensor: antisymmetric first pair, vanishing total
    // antisymmetrisation.
    let mut nijenhuis = vec![vec![vec![CJet::constant(d, 2, c(0.0)); m]; m]; m];
    for b in 0..m {
        for g in 0..m {
            for al in 0..m {
                nijenhuis[b][g][al] = n_raw[b][g][al].conj();
            }
        }
    }
    for b in 0..m {
        for g in 0..m {
            for al in 0..m {
                let cyc = nijenhuis[b][g][al].value()
                    + nijenhuis[g][al][b].value()
                    + nijenhuis[al][b][g].value();
                let r = cyc.norm();
                solve_residual = solve_residual.max(r);
                if r > tol {
                    return Err(Error::Structure(format!(
                        "structure equations inconsistent: Nijenhuis tensor has \
                         non-vanishing total antisymmetrisation at ({}, {}, {}) \
                         (residual {r:.3e})",
                        b + 1,
                        g + 1,
                        al + 1
                    )));
                }
            }
        }
    }

    solve_residual = solve_residual.max(adapt_res);

    Ok(WebsterPoint {
        m,
        point: pt.to_vec(),
        coframe: uc,
        frame,
        gamma0,
        gamma_hol,
        gamma_anti,
        torsion,
        nijenhuis,
        solve_residual,
    })
}

/// Webster–Tanaka curvature and derived tensors at one point.
pub struct WebsterPack {
    /// The solved connection data.
    pub point: WebsterPoint,
    /// Curvature `R_{A B β}{}^{γ}` stored all-covariantly:
    /// `curvature[A][B][β][m+γ]` for frame labels `A`, `B` and holomorphic
    /// `β`, `γ`, together with the conjugate family
    /// `curvature[A][B][m+β][γ] = conj(curvature[A†][B†][β][m+γ])`.
    /// Jets of order 1.
    pub curvature: CrTensor,
    /// Webster–Ricci tensor `Ric_{α β-bar}` (`ricci[a][b]`, order-1 jets).
    pub ricci: Vec<Vec<CJet>>,
    /// Webster scalar curvature.
    pub scalar: CJet,
    /// Schouten-type tensor `(Ric - Sc/(2m+2) h) / (m+2)`.
    pub schouten: Vec<Vec<CJet>>,
    /// Levi-trace of the Schouten-type tensor.
    pub schouten_trace: CJet,
    /// Chern–Moser tensor `S_{α}{}^{β}{}_{γ}{}^{δ}`, flattened over four
    /// holomorphic indices in slot order (down, up, down, up).
    pub chern_moser: Vec<CJet>,
    /// Squared norm of the Nijenhuis tensor.
    pub nijenhuis_norm2: CJet,
    /// Candidate Einstein-type constant `(Sc - |N|^2) / m` as a jet.
    pub lambda: CJet,
}

impl WebsterPack {
    pub fn m(&self) -> usize {
        self.point.m
    }

    /// Chern–Moser component `S_{α}{}^{β}{}_{γ}{}^{δ}` with 1-based indices.
    pub fn chern_moser_comp(&self, a: usize, b: usize, g: usize, d: usize) -> &CJet {
        let m = self.point.m;
        &self.chern_moser[(((a - 1) * m + (b - 1)) * m + (g - 1)) * m + (d - 1)]
    }
}

/// Assembles the Webster–Tanaka curvature at `pt` from the derivative of the
/// connection forms, together with the Webster–Ricci tensor, scalar,
/// Schouten-type tensor, Chern–Moser tensor and the Einstein-type constant
/// candidate.
pub fn webster_curvature(base: &CRBase, pt: &[f64]) -> Result<WebsterPack> {
    let wp = webster_solve(base, pt)?;
    let m = wp.m;
    let d = 2 * m + 1;
    let uc = &wp.coframe;

    // Coordinate components of the connection 1-forms Γ_β{}^α, order 2.
    let mut gform = vec![vec![vec![CJet::constant(d, 2, c(0.0)); d]; m]; m];
    for b in 0..m {
        for al in 0..m {
            for i in 0..d {
                let mut acc = &wp.gamma0[b][al] * &uc.theta0[i].truncated(2);
                for g in 0..m {
                    acc = &acc + &(&wp.gamma_hol[g][b][al] * &uc.theta[g][i].truncated(2));
                    acc = &acc
                        + &(&wp.gamma_anti[g][b][al] * &uc.theta[g][i].conj().truncated(2));
                }
                gform[b][al][i] = acc;
            }
        }
    }

    // Curvature 2-forms Ω_β{}^α = dΓ_β{}^α + Σ_φ Γ_φ{}^α ∧ Γ_β{}^φ (order 1),
    // then frame components R_{ABβ}{}^α = 2 Ω_β{}^α(e_A, e_B).
    let mut curvature = CrTensor::zeros(m, 4, 1);
    for b in 0..m {
        for al in 0..m {
            let dg = d_one_form_jets(&gform[b][al]);
            let mut omega = vec![vec![CJet::constant(d, 1, c(0.0)); d]; d];
            for i in 0..d {
                for j in (i + 1)..d {
                    let mut acc = dg[i][j].clone();
                    for phi in 0..m {
                        let w = &(&gform[phi][al][i] * &gform[b][phi][j])
                            - &(&gform[phi][al][j] * &gform[b][phi][i]);
                        acc = &acc + &w.scaled(c(0.5)).truncated(1);
                    }
                    omega[i][j] = acc.clone();
                    omega[j][i] = -&acc;
                }
            }
            // Frame contraction.
            for bb in 0..d {
                let mut g_row = vec![CJet::constant(d, 1, c(0.0)); d];
                for (j, gr) in g_row.iter_mut().enumerate() {
                    let mut acc = CJet::constant(d, 1, c(0.0));
                    for i in 0..d {
                        acc = &acc + &(&wp.frame[bb][i].truncated(1) * &omega[i][j]);
                    }
                    *gr = acc;
                }
                for cc in 0..d {
                    let mut acc = CJet::constant(d, 1, c(0.0));
                    for (j, gr) in g_row.iter().enumerate() {
                        acc = &acc + &(gr * &wp.frame[cc][j].truncated(1));
                    }
                    curvature.set(&[bb, cc, 1 + b, m + 1 + al], acc.scaled(c(2.0)));
                }
            }
        }
    }
    // Conjugate family.
    for bb in 0..d {
        for cc in 0..d {
            let bbc = conj_label(m, bb);
            let ccc = conj_label(m, cc);
            for b in 0..m {
                for al in 0..m {
                    let v = curvature.get(&[bbc, ccc, 1 + b, m + 1 + al]).conj();
                    curvature.set(&[bb, cc, m + 1 + b, 1 + al], v);
                }
            }
        }
    }

    // Webster–Ricci, scalar, Schouten-type tensor.
    let mut ricci = vec![vec![CJet::constant(d, 1, c(0.0)); m]; m];
    for g in 0..m {
        for dl in 0..m {
            let mut acc = CJet::constant(d, 1, c(0.0));
            for a in 0..m {
                acc = &acc + curvature.get(&[1 + a, m + 1 + a, 1 + g, m + 1 + dl]);
            }
            ricci[g][dl] = acc;
        }
    }
    let mut scalar = CJet::constant(d, 1, c(0.0));
    for g in 0..m {
        scalar = &scalar + &ricci[g][g];
    }
    let mut schouten = vec![vec![CJet::constant(d, 1, c(0.0)); m]; m];
    for a in 0..m {
        for b in 0..m {
            let mut v = ricci[a][b].clone();
            if a == b {
                v = &v - &scalar.scaled(c(1.0 / (2.0 * m as f64 + 2.0)));
            }
            schouten[a][b] = v.scaled(c(1.0 / (m as f64 + 2.0)));
        }
    }
    let mut schouten_trace = CJet::constant(d, 1, c(0.0));
    for a in 0..m {
        schouten_trace = &schouten_trace + &schouten[a][a];
    }

    // Chern–Moser tensor: trace-free part of the symmetrised (1,1)-curvature.
    let mf = m as f64;
    let mut tsym = vec![CJet::constant(d, 1, c(0.0)); m * m * m * m];
    let at = |a: usize, b: usize, g: usize, dl: usize| (((a * m) + b) * m + g) * m + dl;
    for a in 0..m {
        for b in 0..m {
            for g in 0..m {
                for dl in 0..m {
                    // (down, up, down, up) slot order; symmetrise the two
                    // down slots and the two up slots.
                    let s = (&(curvature.get(&[1 + a, m + 1 + b, 1 + g, m + 1 + dl])
                        + curvature.get(&[1 + g, m + 1 + b, 1 + a, m + 1 + dl]))
                        + &(curvature.get(&[1 + a, m + 1 + dl, 1 + g, m + 1 + b])
                            + curvature.get(&[1 + g, m + 1 + dl, 1 + a, m + 1 + b])))
                        .scaled(c(0.25));
                    tsym[at(a, b, g, dl)] = s;
                }
            }
        }
    }
    let mut utrace = vec![CJet::constant(d, 1, c(0.0)); m * m];
    for g in 0..m {
        for dl in 0..m {
            let mut acc = CJet::constant(d, 1, c(0.0));
            for a in 0..m {
                acc = &acc + &tsym[at(a, a, g, dl)];
            }
            utrace[g * m + dl] = acc;
        }
    }
    let mut u_scalar = CJet::constant(d, 1, c(0.0));
    for a in 0..m {
        u_scalar = &u_scalar + &utrace[a * m + a];
    }
    let mut chern_moser = vec![CJet::constant(d, 1, c(0.0)); m * m * m * m];
    for a in 0..m {
        for b in 0..m {
            for g in 0..m {
                for dl in 0..m {
                    let mut v = tsym[at(a, b, g, dl)].clone();
                    let mut corr = CJet::constant(d, 1, c(0.0));
                    if a == b {
                        corr = &corr + &utrace[g * m + dl];
                    }
                    if g == b {
                        corr = &corr + &utrace[a * m + dl];
                    }
                    if a == dl {
                        corr = &corr + &utrace[g * m + b];
                    }
                    if g == dl {
                        corr = &corr + &utrace[a * m + b];
                    }
                    v = &v - &corr.scaled(c(1.0 / (mf + 2.0)));
                    let mut kr = 0.0;
                    if a == b && g == dl {
                        kr += 1.0;
                    }
                    if a == dl && g == b {
                        kr += 1.0;
                    }
                    if kr != 0.0 {
                        v = &v + &u_scalar.scaled(c(kr / ((mf + 1.0) * (mf + 2.0))));
                    }
                    chern_moser[at(a, b, g, dl)] = v;
                }
            }
        }
    }

    // |N|^2 and the Einstein-type constant candidate.
    let mut nn = CJet::constant(d, 2, c(0.0));
    for a in 0..m {
        for b in 0..m {
            for g in 0..m {
                nn = &nn + &(&wp.nijenhuis[a][b][g] * &wp.nijenhuis[a][b][g].conj());
            }
        }
    }
    let lambda = (&scalar - &nn).scaled(c(1.0 / mf));

    Ok(WebsterPack {
        point: wp,
        curvature,
        ricci,
        scalar,
        schouten,
        schouten_trace,
        chern_moser,
        nijenhuis_norm2: nn,
        lambda,
    })
}

/// Residual record of the CR–Einstein conditions at a point.
#[derive(Debug, Clone)]
pub struct CrEinsteinReport {
    /// `max |A_{αβ}|`: the torsion must vanish.
    pub a_res: f64,
    /// `max |∇^γ N_{γ(αβ)}|`: the Nijenhuis divergence must vanish.
    pub div_n_res: f64,
    /// `max |Ric_α{}^β - N_{αδγ} N^{βδγ} - Λ δ_α^β|`.
    pub ric_res: f64,
    /// The Einstein-type constant `(Sc - |N|^2)/m`.
    pub lambda: f64,
    /// `max_A |e_A(Λ)|`: the constant must have vanishing frame gradient.
    pub grad_lambda_res: f64,
}

/// Evaluates the CR–Einstein conditions (vanishing torsion, divergence-free
/// Nijenhuis tensor, Einstein-type condition on the Webster–Ricci tensor with
/// constant `Λ`) at `pt`.
pub fn cr_einstein_check(base: &CRBase, pt: &[f64]) -> Result<CrEinsteinReport> {
    let pack = webster_curvature(base, pt)?;
    cr_einstein_check_pack(&pack)
}

/// Same as [`cr_einstein_check`] but reuses an already-computed pack.
pub fn cr_einstein_check_pack(pack: &WebsterPack) -> Result<CrEinsteinReport> {
    let wp = &pack.point;
    let m = wp.m;

    let mut a_res = 0.0f64;
    for row in &wp.torsion {
        for v in row {
            a_res = a_res.max(v.value().norm());
        }
    }

    let n4 = wp.nijenhuis_tensor();
    let dn = wp.webster_derivative(&n4)?;
    let mut div_n_res = 0.0f64;
    for a in 0..m {
        for b in 0..m {
            let mut acc = Complex64::new(0.0, 0.0);
            for g in 0..m {
                let ab = dn.get(&[m + 1 + g, 1 + g, 1 + a, 1 + b]).value();
                let ba = dn.get(&[m + 1 + g, 1 + g, 1 + b, 1 + a]).value();
                acc += 0.5 * (ab + ba);
            }
            div_n_res = div_n_res.max(acc.norm());
        }
    }

    let lambda_jet = &pack.lambda;
    let lambda = lambda_jet.value().re;
    let mut ric_res = 0.0f64;
    for a in 0..m {
        for b in 0..m {
            let mut v = pack.ricci[a][b].value();
            for dl in 0..m {
                for g in 0..m {
                    v -= wp.nijenhuis[a][dl][g].value()
                        * wp.nijenhuis[b][dl][g].value().conj();
                }
            }
            if a == b {
                v -= Complex64::new(lambda, 0.0);
            }
            ric_res = ric_res.max(v.norm());
        }
    }

    let mut grad_lambda_res = 0.0f64;
    for dir in 0..(2 * m + 1) {
        grad_lambda_res =
            grad_lambda_res.max(wp.frame_derivative(dir, lambda_jet).value().norm());
    }

    Ok(CrEinsteinReport { a_res, div_n_res, ric_res, lambda, grad_lambda_res })
}
