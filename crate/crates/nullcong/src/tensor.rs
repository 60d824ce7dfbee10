//! Point tensors, jet-valued linear algebra, and exterior-calculus helpers.
//!
//! Conventions used throughout the crate:
//! * wedge of one-forms: `(α∧β)_ab = (α_a β_b − β_a α_b) / 2`;
//! * exterior derivative of a one-form as a (0,2) tensor:
//!   `(dα)_ab = (∂_a α_b − ∂_b α_a) / 2`;
//! * a two-form `T` expanded in a coframe basis has coefficient
//!   `2 T(e_A, e_B)` in front of `θ^A ∧ θ^B`.

use crate::error::{Error, Result};
use crate::jet::CJet;
use num_complex::Complex64;

/// Condition-number cutoff (infinity norm) for matrix inversion.
const CONDITION_CUTOFF: f64 = 1e8;
/// Pivot threshold relative to the largest entry.
const PIVOT_EPS: f64 = 1e-13;

// ---------------------------------------------------------------------------
// Multi-index iteration
// ---------------------------------------------------------------------------

/// Odometer over `rank` digits in base `dim`.
pub struct MultiIndex {
    dim: usize,
    idx: Vec<usize>,
    started: bool,
    done: bool,
}

impl MultiIndex {
    pub fn new(dim: usize, rank: usize) -> Self {
        MultiIndex { dim, idx: vec![0; rank], started: false, done: dim == 0 && rank > 0 }
    }

    /// Advance and expose the next multi-index, or `None` when exhausted.
    pub fn next_index(&mut self) -> Option<&[usize]> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(&self.idx);
        }
        for pos in (0..self.idx.len()).rev() {
            self.idx[pos] += 1;
            if self.idx[pos] < self.dim {
                return Some(&self.idx);
            }
            self.idx[pos] = 0;
        }
        self.done = true;
        None
    }
}

// ---------------------------------------------------------------------------
// Value-level tensors at a point
// ---------------------------------------------------------------------------

/// Dense complex tensor at a single point; all slots range over `0..dim`.
/// Variance (up/down) is tracked by the caller.
#[derive(Clone, Debug, PartialEq)]
pub struct PointTensor {
    dim: usize,
    rank: usize,
    comps: Vec<Complex64>,
}

impl PointTensor {
    pub fn zeros(dim: usize, rank: usize) -> Self {
        PointTensor { dim, rank, comps: vec![Complex64::new(0.0, 0.0); dim.pow(rank as u32)] }
    }

    pub fn from_fn(dim: usize, rank: usize, mut f: impl FnMut(&[usize]) -> Complex64) -> Self {
        let mut t = Self::zeros(dim, rank);
        let mut mi = MultiIndex::new(dim, rank);
        let mut off = 0;
        while let Some(idx) = mi.next_index() {
            t.comps[off] = f(idx);
            off += 1;
        }
        t
    }

    pub fn scalar(v: Complex64) -> Self {
        PointTensor { dim: 1, rank: 0, comps: vec![v] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank);
        let mut off = 0;
        for &i in idx {
            debug_assert!(i < self.dim);
            off = off * self.dim + i;
        }
        off
    }

    pub fn get(&self, idx: &[usize]) -> Complex64 {
        self.comps[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: Complex64) {
        let off = self.offset(idx);
        self.comps[off] = v;
    }

    pub fn add_to(&mut self, idx: &[usize], v: Complex64) {
        let off = self.offset(idx);
        self.comps[off] += v;
    }

    pub fn components(&self) -> &[Complex64] {
        &self.comps
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        PointTensor {
            dim: self.dim,
            rank: self.rank,
            comps: self.comps.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn conj(&self) -> Self {
        self.map(|v| v.conj())
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.dim, self.rank), (other.dim, other.rank));
        PointTensor {
            dim: self.dim,
            rank: self.rank,
            comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.dim, self.rank), (other.dim, other.rank));
        PointTensor {
            dim: self.dim,
            rank: self.rank,
            comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map(|v| v * c)
    }

    pub fn max_modulus(&self) -> f64 {
        self.comps.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest absolute imaginary part (reality diagnostic).
    pub fn imag_max(&self) -> f64 {
        self.comps.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }

    /// `T'(i_0,…,i_{r-1}) = T(i_{perm[0]}, …, i_{perm[r-1]})`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.rank);
        let mut out = Self::zeros(self.dim, self.rank);
        let mut mi = MultiIndex::new(self.dim, self.rank);
        let mut src = vec![0usize; self.rank];
        while let Some(idx) = mi.next_index() {
            for (k, &p) in perm.iter().enumerate() {
                src[k] = idx[p];
            }
            let v = self.get(&src);
            out.set(idx, v);
        }
        out
    }

    /// Tensor product; result indices are `self`'s slots then `other`'s.
    pub fn outer(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut out = Self::zeros(self.dim, self.rank + other.rank);
        for (i, &a) in self.comps.iter().enumerate() {
            for (j, &b) in other.comps.iter().enumerate() {
                out.comps[i * other.comps.len() + j] = a * b;
            }
        }
        out
    }

    /// Contract `slot_a` of `self` with `slot_b` of `other`.
    /// Result slots: `self`'s remaining slots in order, then `other`'s.
    pub fn contract(&self, slot_a: usize, other: &Self, slot_b: usize) -> Self {
        assert_eq!(self.dim, other.dim);
        assert!(slot_a < self.rank && slot_b < other.rank);
        let d = self.dim;
        let ra = self.rank - 1;
        let rb = other.rank - 1;
        let mut out = Self::zeros(d, ra + rb);
        let mut mi = MultiIndex::new(d, ra + rb);
        let mut ia = vec![0usize; self.rank];
        let mut ib = vec![0usize; other.rank];
        let mut off = 0;
        while let Some(idx) = mi.next_index() {
            let (la, lb) = idx.split_at(ra);
            let mut acc = Complex64::new(0.0, 0.0);
            for c in 0..d {
                let mut k = 0;
                for (s, slot) in ia.iter_mut().enumerate() {
                    *slot = if s == slot_a {
                        c
                    } else {
                        let v = la[k];
                        k += 1;
                        v
                    };
                }
                let mut k = 0;
                for (s, slot) in ib.iter_mut().enumerate() {
                    *slot = if s == slot_b {
                        c
                    } else {
                        let v = lb[k];
                        k += 1;
                        v
                    };
                }
                acc += self.get(&ia) * other.get(&ib);
            }
            out.comps[off] = acc;
            off += 1;
        }
        out
    }

    /// Plain trace over two slots (no metric), result keeps remaining slots.
    pub fn trace_pair(&self, s1: usize, s2: usize) -> Self {
        assert!(s1 != s2 && s1 < self.rank && s2 < self.rank);
        let d = self.dim;
        let mut out = Self::zeros(d, self.rank - 2);
        let mut mi = MultiIndex::new(d, self.rank - 2);
        let mut full = vec![0usize; self.rank];
        let mut off = 0;
        while let Some(idx) = mi.next_index() {
            let mut acc = Complex64::new(0.0, 0.0);
            for c in 0..d {
                let mut k = 0;
                for (s, slot) in full.iter_mut().enumerate() {
                    *slot = if s == s1 || s == s2 {
                        c
                    } else {
                        let v = idx[k];
                        k += 1;
                        v
                    };
                }
                acc += self.get(&full);
            }
            out.comps[off] = acc;
            off += 1;
        }
        out
    }

    /// Symmetrize over a pair of slots: `(T + T^swap) / 2`.
    pub fn sym_pair(&self, s1: usize, s2: usize) -> Self {
        let mut perm: Vec<usize> = (0..self.rank).collect();
        perm.swap(s1, s2);
        self.add(&self.permuted(&perm)).scale(Complex64::new(0.5, 0.0))
    }

    /// Antisymmetrize over a pair of slots: `(T − T^swap) / 2`.
    pub fn antisym_pair(&self, s1: usize, s2: usize) -> Self {
        let mut perm: Vec<usize> = (0..self.rank).collect();
        perm.swap(s1, s2);
        self.sub(&self.permuted(&perm)).scale(Complex64::new(0.5, 0.0))
    }

    /// Replace slot `s` by contracting it with the second index of `mat`
    /// (rank-2): `T'(.., A, ..) = Σ_i mat(A, i) T(.., i, ..)`.
    /// The transformed slot stays in position `s`.
    pub fn apply_matrix_to_slot(&self, mat: &PointTensor, s: usize) -> Self {
        assert_eq!(mat.rank, 2);
        assert_eq!(mat.dim, self.dim);
        assert!(s < self.rank);
        let contracted = mat.contract(1, self, s);
        // contracted slots: [A, self slots without s]; move A back to position s.
        let r = self.rank;
        let mut perm = Vec::with_capacity(r);
        for k in 0..r {
            if k == s {
                perm.push(0);
            } else {
                // self slot k sits at position 1 + (k adjusted for removed s)
                let shifted = if k < s { k } else { k - 1 };
                perm.push(1 + shifted);
            }
        }
        contracted.permuted(&perm)
    }

    /// Apply one rank-2 matrix per slot (e.g. frame rows or coframe rows).
    pub fn change_basis(&self, mats: &[&PointTensor]) -> Self {
        assert_eq!(mats.len(), self.rank);
        let mut cur = self.clone();
        for (s, m) in mats.iter().enumerate() {
            cur = cur.apply_matrix_to_slot(m, s);
        }
        cur
    }
}

/// Largest modulus of the component-wise difference.
pub fn max_abs_diff(a: &PointTensor, b: &PointTensor) -> f64 {
    a.sub(b).max_modulus()
}

// ---------------------------------------------------------------------------
// Jet-valued matrices
// ---------------------------------------------------------------------------

/// Square matrix of complex jets over a shared chart.
#[derive(Clone, Debug)]
pub struct JetMatrix {
    n: usize,
    comps: Vec<CJet>,
}

impl JetMatrix {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> CJet) -> Self {
        let mut comps = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                comps.push(f(i, j));
            }
        }
        JetMatrix { n, comps }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &CJet {
        &self.comps[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: CJet) {
        self.comps[i * self.n + j] = v;
    }

    pub fn transposed(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.get(j, i).clone())
    }

    pub fn conjugated(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.get(i, j).conj())
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        Self::from_fn(self.n, |i, j| {
            let mut acc = self.get(i, 0) * other.get(0, j);
            for k in 1..self.n {
                acc = acc + self.get(i, k) * other.get(k, j);
            }
            acc
        })
    }

    /// Values-only snapshot as a rank-2 `PointTensor`.
    pub fn values(&self) -> PointTensor {
        PointTensor::from_fn(self.n, 2, |idx| self.get(idx[0], idx[1]).value())
    }

    fn inf_norm_values(&self) -> f64 {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j).value().norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Gauss–Jordan inverse with partial pivoting on value modulus.
    /// Propagates full jet information; errors on (near-)singular or
    /// ill-conditioned input.
    pub fn invert(&self) -> Result<Self> {
        let n = self.n;
        let scale = self.comps.iter().map(|c| c.value().norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return Err(Error::Numeric("cannot invert zero matrix".into()));
        }
        let mut a: Vec<CJet> = self.comps.clone();
        let proto = &self.comps[0];
        let zero = CJet::constant(proto.dim(), proto.order(), Complex64::new(0.0, 0.0));
        let one = CJet::constant(proto.dim(), proto.order(), Complex64::new(1.0, 0.0));
        let mut b: Vec<CJet> = (0..n * n)
            .map(|k| if k / n == k % n { one.clone() } else { zero.clone() })
            .collect();
        let at = |m: &[CJet], i: usize, j: usize| -> CJet { m[i * n + j].clone() };
        for col in 0..n {
            let (pivot_row, pivot_mod) = (col..n)
                .map(|r| (r, at(&a, r, col).value().norm()))
                .max_by(|x, y| x.1.total_cmp(&y.1))
                .unwrap();
            if pivot_mod < PIVOT_EPS * scale {
                return Err(Error::Numeric(format!(
                    "singular matrix: pivot modulus {pivot_mod:.3e} in column {col}"
                )));
            }
            if pivot_row != col {
                for j in 0..n {
                    a.swap(col * n + j, pivot_row * n + j);
                    b.swap(col * n + j, pivot_row * n + j);
                }
            }
            let inv_piv = at(&a, col, col).try_recip()?;
            for j in 0..n {
                a[col * n + j] = at(&a, col, j) * &inv_piv;
                b[col * n + j] = at(&b, col, j) * &inv_piv;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = at(&a, r, col);
                if f.value().norm() == 0.0 && f.max_modulus() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    a[r * n + j] = at(&a, r, j) - &f * at(&a, col, j);
                    b[r * n + j] = at(&b, r, j) - &f * at(&b, col, j);
                }
            }
        }
        let inv = JetMatrix { n, comps: b };
        let cond = self.inf_norm_values() * inv.inf_norm_values();
        if cond > CONDITION_CUTOFF {
            return Err(Error::Numeric(format!(
                "ill-conditioned matrix: condition estimate {cond:.3e} exceeds {CONDITION_CUTOFF:.1e}"
            )));
        }
        Ok(inv)
    }

    /// Solve `A x = rhs` via the inverse (sizes here are small).
    pub fn solve(&self, rhs: &[CJet]) -> Result<Vec<CJet>> {
        assert_eq!(rhs.len(), self.n);
        let inv = self.invert()?;
        Ok((0..self.n)
            .map(|i| {
                let mut acc = inv.get(i, 0) * &rhs[0];
                for k in 1..self.n {
                    acc = acc + inv.get(i, k) * &rhs[k];
                }
                acc
            })
            .collect())
    }

    /// Cholesky factor `U` (upper-triangular) with `self = U^† U`, for a
    /// Hermitian positive-definite matrix of jets.
    pub fn cholesky_upper(&self) -> Result<Self> {
        let n = self.n;
        let proto = &self.comps[0];
        let zero = CJet::constant(proto.dim(), proto.order(), Complex64::new(0.0, 0.0));
        // Hermiticity sanity check on values.
        let herm_res = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| (self.get(i, j).value() - self.get(j, i).value().conj()).norm())
            .fold(0.0, f64::max);
        let scale = self.inf_norm_values().max(1.0);
        if herm_res > 1e-10 * scale {
            return Err(Error::Structure(format!(
                "matrix is not Hermitian (residual {herm_res:.3e})"
            )));
        }
        let mut u: Vec<CJet> = vec![zero.clone(); n * n];
        for j in 0..n {
            // Diagonal entry.
            let mut s = self.get(j, j).clone();
            for k in 0..j {
                let ukj = &u[k * n + j];
                s = s - ukj.conj() * ukj;
            }
            let v = s.value();
            if v.re <= 0.0 || v.im.abs() > 1e-8 * scale {
                return Err(Error::Structure(format!(
                    "matrix is not positive definite (pivot {j} value {v})"
                )));
            }
            let diag = s.try_sqrt()?;
            let inv_diag = diag.try_recip()?;
            u[j * n + j] = diag;
            for i in (j + 1)..n {
                let mut s = self.get(j, i).clone();
                for k in 0..j {
                    s = s - u[k * n + j].conj() * &u[k * n + i];
                }
                u[j * n + i] = s * &inv_diag;
            }
        }
        Ok(JetMatrix { n, comps: u })
    }
}

// ---------------------------------------------------------------------------
// Exterior calculus on one-forms given as jet components
// ---------------------------------------------------------------------------

/// `(dα)_ab = (∂_a α_b − ∂_b α_a)/2` as values.
pub fn d_one_form_values(omega: &[CJet]) -> PointTensor {
    let d = omega.len();
    PointTensor::from_fn(d, 2, |idx| {
        let (a, b) = (idx[0], idx[1]);
        0.5 * (omega[b].grad(a) - omega[a].grad(b))
    })
}

/// `(dα)_ab` keeping jet information (one order lower than the input).
pub fn d_one_form_jets(omega: &[CJet]) -> Vec<Vec<CJet>> {
    let d = omega.len();
    (0..d)
        .map(|a| {
            (0..d)
                .map(|b| (omega[b].derivative(a) - omega[a].derivative(b)).scaled(Complex64::new(0.5, 0.0)))
                .collect()
        })
        .collect()
}

/// `(dη)_abc = (∂_a η_bc + ∂_b η_ca + ∂_c η_ab)/3` for an antisymmetric
/// rank-2 `η` given as jets; in this convention `d(dα) = 0` identically.
pub fn d_two_form_values(eta: &[Vec<CJet>]) -> PointTensor {
    let d = eta.len();
    PointTensor::from_fn(d, 3, |idx| {
        let (a, b, c) = (idx[0], idx[1], idx[2]);
        (eta[b][c].grad(a) + eta[c][a].grad(b) + eta[a][b].grad(c)) / 3.0
    })
}

/// `(α∧β)_ab = (α_a β_b − β_a α_b)/2` as values.
pub fn wedge_values(alpha: &[Complex64], beta: &[Complex64]) -> PointTensor {
    let d = alpha.len();
    assert_eq!(d, beta.len());
    PointTensor::from_fn(d, 2, |idx| {
        let (a, b) = (idx[0], idx[1]);
        0.5 * (alpha[a] * beta[b] - beta[a] * alpha[b])
    })
}

/// Symmetric product `(α⊙β)_ab = (α_a β_b + β_a α_b)/2` as values.
pub fn sym_product_values(alpha: &[Complex64], beta: &[Complex64]) -> PointTensor {
    let d = alpha.len();
    assert_eq!(d, beta.len());
    PointTensor::from_fn(d, 2, |idx| {
        let (a, b) = (idx[0], idx[1]);
        0.5 * (alpha[a] * beta[b] + beta[a] * alpha[b])
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::{Jet, RJet};
    use num_complex::Complex64;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Random polynomial jet from quadratic coefficients (order-3 exact).
    fn poly_jet(rng: &mut ChaCha8Rng, x: &[f64], order: u8) -> CJet {
        let d = x.len();
        let coords: Vec<CJet> = (0..d).map(|i| Jet::coordinate(x, i, order).unwrap()).collect();
        let mut acc = CJet::constant(d, order, c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        for i in 0..d {
            acc = acc + coords[i].scaled(c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            for j in 0..d {
                acc = acc
                    + (&coords[i] * &coords[j])
                        .scaled(c(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)));
            }
        }
        acc
    }

    #[test]
    fn jet_matrix_inverse_satisfies_product_identity_at_jet_level() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..20 {
            let x = [rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)];
            let n = 4;
            let a = JetMatrix::from_fn(n, |i, j| {
                let mut v = poly_jet(&mut rng, &x, 3).scaled(c(0.3, 0.0));
                if i == j {
                    v = v + CJet::constant(3, 3, c(3.0, 0.0));
                }
                v
            });
            let inv = a.invert().unwrap();
            let prod = a.matmul(&inv);
            for i in 0..n {
                for j in 0..n {
                    let entry = prod.get(i, j);
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!((entry.value() - c(expect, 0.0)).norm() < 1e-12);
                    // All derivative coefficients of A·A⁻¹ must vanish (or be
                    // constant), which pins the inverse's jets uniquely.
                    let dev = entry
                        .sub_jet(&CJet::constant(3, 3, c(expect, 0.0)))
                        .max_modulus();
                    assert!(dev < 1e-10, "jet product deviates: {dev:.3e}");
                }
            }
        }
    }

    #[test]
    fn singular_and_ill_conditioned_matrices_are_rejected() {
        let z = CJet::constant(2, 1, c(0.0, 0.0));
        let o = CJet::constant(2, 1, c(1.0, 0.0));
        let sing = JetMatrix::from_fn(2, |i, _| if i == 0 { o.clone() } else { o.clone() });
        assert!(matches!(sing.invert(), Err(Error::Numeric(_))));
        let tiny = CJet::constant(2, 1, c(1e-12, 0.0));
        let bad = JetMatrix::from_fn(2, |i, j| {
            match (i, j) {
                (0, 0) => o.clone(),
                (1, 1) => tiny.clone(),
                _ => z.clone(),
            }
        });
        assert!(bad.invert().is_err());
    }

    #[test]
    fn cholesky_factor_reconstructs_hermitian_input_at_jet_level() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for _ in 0..10 {
            let x = [rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3)];
            let n = 3;
            let b = JetMatrix::from_fn(n, |_, _| poly_jet(&mut rng, &x, 3).scaled(c(0.4, 0.0)));
            // h = B† B + 2 I is Hermitian positive definite with jet entries.
            let mut h = b.conjugated().transposed().matmul(&b);
            for i in 0..n {
                let v = h.get(i, i).clone() + CJet::constant(2, 3, c(2.0, 0.0));
                h.set(i, i, v);
            }
            // Hermitize exactly to cancel rounding asymmetry.
            let h = JetMatrix::from_fn(n, |i, j| {
                (h.get(i, j) + h.get(j, i).conj()).scaled(c(0.5, 0.0))
            });
            let u = h.cholesky_upper().unwrap();
            for i in 1..n {
                for j in 0..i {
                    assert_eq!(u.get(i, j).max_modulus(), 0.0, "U not upper-triangular");
                }
            }
            let rec = u.conjugated().transposed().matmul(&u);
            for i in 0..n {
                for j in 0..n {
                    let dev = rec.get(i, j).sub_jet(h.get(i, j)).max_modulus();
                    assert!(dev < 1e-9, "U†U deviates from input: {dev:.3e}");
                }
            }
        }
    }

    #[test]
    fn cholesky_rejects_non_positive_definite() {
        let neg = JetMatrix::from_fn(1, |_, _| CJet::constant(1, 1, c(-1.0, 0.0)));
        assert!(matches!(neg.cholesky_upper(), Err(Error::Structure(_))));
        let nonherm = JetMatrix::from_fn(2, |i, j| {
            CJet::constant(1, 1, if i == 0 && j == 1 { c(0.0, 5.0) } else { c(1.0, 0.0) })
        });
        assert!(matches!(nonherm.cholesky_upper(), Err(Error::Structure(_))));
    }

    #[test]
    fn exterior_derivative_of_exact_form_vanishes() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let x: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
            // f: random cubic scalar; ω = df has components f.derivative(b).
            let f = {
                let coords: Vec<RJet> =
                    (0..3).map(|i| Jet::coordinate(&x, i, 3).unwrap()).collect();
                let mut acc = RJet::constant(3, 3, rng.gen_range(-1.0..1.0));
                for i in 0..3 {
                    for j in 0..3 {
                        for k in 0..3 {
                            acc = acc
                                + (&(&coords[i] * &coords[j]) * &coords[k])
                                    .scaled(rng.gen_range(-0.3..0.3));
                        }
                    }
                }
                acc
            };
            let omega: Vec<CJet> = (0..3).map(|b| f.derivative(b).promote()).collect();
            let d_omega = d_one_form_values(&omega);
            assert!(d_omega.max_modulus() < 1e-13, "d(df) != 0");
        }
    }

    #[test]
    fn exterior_derivative_squares_to_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let x: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let omega: Vec<CJet> = (0..4).map(|_| poly_jet(&mut rng, &x, 3)).collect();
            let eta = d_one_form_jets(&omega);
            let dd = d_two_form_values(&eta);
            assert!(dd.max_modulus() < 1e-13, "dd != 0: {:.3e}", dd.max_modulus());
        }
    }

    #[test]
    fn wedge_and_coframe_coefficient_conventions_are_consistent() {
        // In a coordinate chart, θ^a = dx^a; (dx^0 ∧ dx^1)(e_0, e_1) must be
        // 1/2 so that the expansion coefficient rule 2·T(e_A, e_B) returns 1.
        let d = 2;
        let dx0 = [c(1.0, 0.0), c(0.0, 0.0)];
        let dx1 = [c(0.0, 0.0), c(1.0, 0.0)];
        let w = wedge_values(&dx0, &dx1);
        assert_eq!(w.get(&[0, 1]), c(0.5, 0.0));
        assert_eq!(w.get(&[1, 0]), c(-0.5, 0.0));
        assert_eq!(2.0 * w.get(&[0, 1]), c(1.0, 0.0));
        let _ = d;
    }

    #[test]
    fn contraction_and_permutation_shapes() {
        let a = PointTensor::from_fn(3, 3, |i| c((i[0] * 9 + i[1] * 3 + i[2]) as f64, 0.0));
        let b = PointTensor::from_fn(3, 2, |i| c((i[0] * 3 + i[1]) as f64, 1.0));
        let t = a.contract(1, &b, 0);
        assert_eq!(t.rank(), 3);
        // T(i, k, j) = Σ_c A(i, c, k) B(c, j)
        let mut expect = c(0.0, 0.0);
        for cc in 0..3 {
            expect += a.get(&[1, cc, 2]) * b.get(&[cc, 0]);
        }
        assert_eq!(t.get(&[1, 2, 0]), expect);
        let p = a.permuted(&[2, 0, 1]);
        assert_eq!(p.get(&[1, 2, 0]), a.get(&[0, 1, 2]));
        let tr = a.trace_pair(0, 2);
        let mut expect = c(0.0, 0.0);
        for cc in 0..3 {
            expect += a.get(&[cc, 1, cc]);
        }
        assert_eq!(tr.get(&[1]), expect);
    }

    #[test]
    fn matrix_slot_application_and_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let d = 3;
        let t = PointTensor::from_fn(d, 3, |_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let m = PointTensor::from_fn(d, 2, |i| {
            let diag = if i[0] == i[1] { 2.0 } else { 0.0 };
            c(diag + rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3))
        });
        // Explicit check of slot-1 application.
        let applied = t.apply_matrix_to_slot(&m, 1);
        let mut expect = c(0.0, 0.0);
        for cc in 0..d {
            expect += m.get(&[2, cc]) * t.get(&[1, cc, 0]);
        }
        assert!((applied.get(&[1, 2, 0]) - expect).norm() < 1e-14);
        // Round trip through the inverse matrix restores the tensor.
        let minv = {
            let mj = JetMatrix::from_fn(d, |i, j| CJet::constant(1, 0, m.get(&[i, j])));
            let inv = mj.invert().unwrap();
            PointTensor::from_fn(d, 2, |i| inv.get(i[0], i[1]).value())
        };
        let round = applied.apply_matrix_to_slot(&minv, 1);
        assert!(max_abs_diff(&round, &t) < 1e-12);
    }

    proptest! {
        #[test]
        fn antisymmetrization_is_idempotent_and_kills_symmetric_part(
            seed in 0u64..1000
        ) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let t = PointTensor::from_fn(3, 3, |_| {
                c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            });
            let a = t.antisym_pair(0, 2);
            let aa = a.antisym_pair(0, 2);
            prop_assert!(max_abs_diff(&a, &aa) < 1e-15);
            let s = t.sym_pair(0, 2);
            prop_assert!(s.antisym_pair(0, 2).max_modulus() < 1e-15);
            prop_assert!(max_abs_diff(&a.add(&s), &t) < 1e-15);
        }

        #[test]
        fn two_form_basis_expansion_round_trips(seed in 0u64..200) {
            // Expand a random 2-form in wedge products of a random coframe and
            // reassemble: T = Σ_{A<B} 2 T(e_A, e_B) θ^A ∧ θ^B.
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let d = 3;
            let raw = PointTensor::from_fn(d, 2, |_| {
                c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            });
            let t = raw.antisym_pair(0, 1);
            // Random invertible coframe matrix Θ[A][i] and dual frame E.
            let theta = PointTensor::from_fn(d, 2, |i| {
                let diag = if i[0] == i[1] { 2.0 } else { 0.0 };
                c(diag + rng.gen_range(-0.4..0.4), rng.gen_range(-0.4..0.4))
            });
            let frame = {
                let mj = JetMatrix::from_fn(d, |i, j| CJet::constant(1, 0, theta.get(&[i, j])));
                let inv = mj.invert().unwrap();
                // E[A][i] = (Θ⁻¹)[i][A] so that θ^A(e_B) = δ^A_B.
                PointTensor::from_fn(d, 2, |idx| inv.get(idx[1], idx[0]).value())
            };
            let mut rebuilt = PointTensor::zeros(d, 2);
            for a_lab in 0..d {
                for b_lab in (a_lab + 1)..d {
                    // frame component T(e_A, e_B)
                    let mut tab = c(0.0, 0.0);
                    for i in 0..d {
                        for j in 0..d {
                            tab += frame.get(&[a_lab, i]) * frame.get(&[b_lab, j]) * t.get(&[i, j]);
                        }
                    }
                    let th_a: Vec<Complex64> = (0..d).map(|i| theta.get(&[a_lab, i])).collect();
                    let th_b: Vec<Complex64> = (0..d).map(|i| theta.get(&[b_lab, i])).collect();
                    rebuilt = rebuilt.add(&wedge_values(&th_a, &th_b).scale(2.0 * tab));
                }
            }
            prop_assert!(max_abs_diff(&rebuilt, &t) < 1e-11);
        }
    }
}
