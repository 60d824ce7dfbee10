//! Scalar-field helpers: closure-based fields over a real chart and sparse
//! polynomials with exact jets (used for randomized verification inputs).

use crate::error::Result;
use crate::jet::{CJet, Jet, RJet};
use num_complex::Complex64;
use rand::Rng;
use std::sync::Arc;

/// Shared complex scalar field over a real chart, evaluated to jets.
pub type SharedField = Arc<dyn Fn(&[f64]) -> Result<CJet> + Send + Sync>;

/// Shared real scalar field (conformal log-factors and similar).
pub type SharedRealField = Arc<dyn Fn(&[f64]) -> Result<RJet> + Send + Sync>;

/// Sparse polynomial in the chart coordinates with complex coefficients.
/// Jets of polynomials are exact at every order.
#[derive(Clone, Debug)]
pub struct Polynomial {
    dim: usize,
    /// (coefficient, exponent per axis)
    terms: Vec<(Complex64, Vec<u32>)>,
}

impl Polynomial {
    pub fn new(dim: usize) -> Self {
        Polynomial { dim, terms: Vec::new() }
    }

    pub fn constant(dim: usize, c: Complex64) -> Self {
        let mut p = Self::new(dim);
        p.push_term(c, vec![0; dim]);
        p
    }

    pub fn push_term(&mut self, coeff: Complex64, exponents: Vec<u32>) {
        assert_eq!(exponents.len(), self.dim);
        self.terms.push((coeff, exponents));
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Random polynomial of total degree ≤ `max_deg` with `n_terms` terms,
    /// coefficients uniform in a disc of radius `scale` (real if `real_coeffs`).
    pub fn random(
        rng: &mut impl Rng,
        dim: usize,
        max_deg: u32,
        n_terms: usize,
        scale: f64,
        real_coeffs: bool,
    ) -> Self {
        let mut p = Self::new(dim);
        for _ in 0..n_terms {
            let mut exps = vec![0u32; dim];
            let deg = rng.gen_range(0..=max_deg);
            for _ in 0..deg {
                exps[rng.gen_range(0..dim)] += 1;
            }
            let re = rng.gen_range(-scale..scale);
            let im = if real_coeffs { 0.0 } else { rng.gen_range(-scale..scale) };
            p.push_term(Complex64::new(re, im), exps);
        }
        p
    }

    pub fn eval(&self, x: &[f64], order: u8) -> CJet {
        assert_eq!(x.len(), self.dim);
        let mut acc = CJet::constant(self.dim, order, Complex64::new(0.0, 0.0));
        for (coeff, exps) in &self.terms {
            let mut term = CJet::constant(self.dim, order, *coeff);
            for (axis, &e) in exps.iter().enumerate() {
                if e > 0 {
                    let c: CJet = Jet::coordinate(x, axis, order).expect("axis in range");
                    term = term
                        * c.try_powi(e as i32).expect("nonnegative integer power is total");
                }
            }
            acc = acc + term;
        }
        acc
    }

    /// Real-part jet (meaningful when all coefficients are real).
    pub fn eval_real(&self, x: &[f64], order: u8) -> RJet {
        self.eval(x, order).real_part()
    }

    /// Wrap as a shared field evaluating order-3 jets.
    pub fn into_field(self) -> SharedField {
        Arc::new(move |x: &[f64]| Ok(self.eval(x, 3)))
    }

    /// Wrap as a shared real field evaluating order-3 jets.
    pub fn into_real_field(self) -> SharedRealField {
        Arc::new(move |x: &[f64]| Ok(self.eval_real(x, 3)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn polynomial_jets_are_exact() {
        // p = (2+i) x^2 y + 3 z
        let mut p = Polynomial::new(3);
        p.push_term(Complex64::new(2.0, 1.0), vec![2, 1, 0]);
        p.push_term(Complex64::new(3.0, 0.0), vec![0, 0, 1]);
        let x = [1.5, -2.0, 0.25];
        let j = p.eval(&x, 3);
        let c = Complex64::new(2.0, 1.0);
        assert!((j.value() - (c * x[0] * x[0] * x[1] + 3.0 * x[2])).norm() < 1e-14);
        assert!((j.grad(0) - c * 2.0 * x[0] * x[1]).norm() < 1e-14);
        assert!((j.grad(2) - 3.0).norm() < 1e-14);
        assert!((j.hess(0, 1) - c * 2.0 * x[0]).norm() < 1e-14);
        assert!((j.third(0, 0, 1) - c * 2.0).norm() < 1e-14);
        assert_eq!(j.third(2, 2, 2), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn random_polynomials_respect_degree_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let p = Polynomial::random(&mut rng, 4, 3, 8, 0.5, true);
            for (_, exps) in &p.terms {
                assert!(exps.iter().sum::<u32>() <= 3);
            }
            let x = [0.1, 0.2, -0.3, 0.4];
            assert_eq!(p.eval_real(&x, 2).order(), 2);
        }
    }
}
