//! The ponderation polynomial φ: construction from Euler operators, roots,
//! partial fractions and resonance detection.

mod roots;
mod uni;

use std::fmt;

use serde::Serialize;
use thiserror::Error;

pub use roots::{roots_with_multiplicity, Root, RootOptions, RootSet};
pub use uni::UniPoly;

use crate::index::{indices_up_to, MultiIndex};
use crate::poly::SparsePoly;
use crate::scalar::Scalar;
use crate::series::EulerOperator;
use crate::stirling::{pochhammer_to_standard_multi, standard_to_pochhammer};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PonderError {
    #[error("polynomial is constant; it has no roots")]
    ConstantPolynomial,
    #[error("root finder did not converge after {iterations} iterations (residuals {residuals:?})")]
    NoConvergence { iterations: usize, residuals: Vec<f64> },
    #[error("root set does not reproduce 1/phi (relative error {error:e})")]
    InconsistentRoots { error: f64 },
    #[error("expected a univariate polynomial, got {0} variables")]
    NotUnivariate(usize),
}

/// φ in `n` integer variables, stored in the standard monomial basis.
#[derive(Clone, Debug, PartialEq)]
pub struct PonderationPoly {
    poly: SparsePoly,
}

impl PonderationPoly {
    pub fn new(poly: SparsePoly) -> Self {
        PonderationPoly { poly }
    }

    /// Univariate φ from ascending standard-basis coefficients.
    pub fn univariate(coeffs: &[Scalar]) -> Self {
        PonderationPoly::new(SparsePoly::from_terms(
            1,
            coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| (MultiIndex(vec![i as u32]), c.clone())),
        ))
    }

    pub fn constant(nvars: usize, c: Scalar) -> Self {
        PonderationPoly::new(SparsePoly::constant(nvars, c))
    }

    /// φ from Pochhammer-basis coefficients `c_γ` (`φ = Σ c_γ Π (k_j)_{γ_j}`).
    pub fn from_pochhammer(poch: &SparsePoly) -> Self {
        PonderationPoly::new(pochhammer_to_standard_multi(poch))
    }

    /// `φ(γ) = Σ a_i (γ_1)_{i_1} ⋯ (γ_n)_{i_n}` for the operator `Σ a_i x^i ∂^i`.
    pub fn from_euler_operator(op: &EulerOperator) -> Self {
        PonderationPoly::from_pochhammer(op.coeffs())
    }

    pub fn to_euler_operator(&self) -> EulerOperator {
        EulerOperator::new(self.pochhammer())
    }

    /// Pochhammer-basis coefficients.
    pub fn pochhammer(&self) -> SparsePoly {
        standard_to_pochhammer(&self.poly)
    }

    pub fn poly(&self) -> &SparsePoly {
        &self.poly
    }

    pub fn nvars(&self) -> usize {
        self.poly.nvars()
    }

    pub fn degree(&self) -> u32 {
        self.poly.total_degree().unwrap_or(0)
    }

    pub fn is_exact(&self) -> bool {
        self.poly.is_exact()
    }

    pub fn eval(&self, k: &[Scalar]) -> Scalar {
        self.poly.eval(k)
    }

    pub fn eval_lattice(&self, gamma: &MultiIndex) -> Scalar {
        self.poly.eval_lattice(gamma)
    }

    pub fn mul(&self, other: &PonderationPoly) -> PonderationPoly {
        PonderationPoly::new(self.poly.mul(&other.poly))
    }

    pub fn add(&self, other: &PonderationPoly) -> PonderationPoly {
        PonderationPoly::new(self.poly.add(&other.poly))
    }

    /// Dense univariate view; fails for `n != 1`.
    pub fn to_univariate(&self) -> Result<UniPoly, PonderError> {
        if self.nvars() != 1 {
            return Err(PonderError::NotUnivariate(self.nvars()));
        }
        let d = self.poly.degree_in(0) as usize;
        let mut c = vec![Scalar::zero(); d + 1];
        for (k, v) in self.poly.terms() {
            c[k.0[0] as usize] = v.clone();
        }
        Ok(UniPoly::new(c))
    }

    pub fn roots(&self, opts: RootOptions) -> Result<RootSet, PonderError> {
        roots_with_multiplicity(&self.to_univariate()?, opts)
    }

    pub fn partial_fractions(&self, roots: &RootSet) -> Result<PartialFractions, PonderError> {
        partial_fractions(&self.to_univariate()?, roots)
    }

    /// Lattice points `γ` with `|γ| <= bound` where φ vanishes.
    pub fn resonance_check(&self, bound: u32) -> Vec<MultiIndex> {
        let exact = self.is_exact();
        let tol = 1e-12 * (1.0 + self.poly.max_abs_coeff());
        indices_up_to(self.nvars(), bound)
            .into_iter()
            .filter(|g| {
                let v = self.eval_lattice(g);
                if exact {
                    v.is_zero()
                } else {
                    v.abs() <= tol
                }
            })
            .collect()
    }

    /// Variable names used for display: `k` for one variable, `k1..kn` otherwise.
    pub fn variable_names(&self) -> Vec<String> {
        match self.nvars() {
            1 => vec!["k".to_string()],
            n => (1..=n).map(|i| format!("k{i}")).collect(),
        }
    }
}

impl fmt::Display for PonderationPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.poly.display_with(&self.variable_names()))
    }
}

/// Coefficients `C_{i,j}` of `1/φ(k) = Σ_i Σ_{j=1}^{α_i} C_{i,j} / (k - r_i)^j`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PartialFractions {
    pub terms: Vec<RootFractions>,
}

/// The coefficients belonging to one root; `coeffs[j - 1] = C_{i,j}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RootFractions {
    pub root: Scalar,
    pub multiplicity: u32,
    pub coeffs: Vec<Scalar>,
}

impl PartialFractions {
    /// `Σ C_{i,j} / (k - r_i)^j`, or `None` at a root.
    pub fn eval(&self, k: &Scalar) -> Option<Scalar> {
        let mut acc = Scalar::zero();
        for t in &self.terms {
            let inv = (k - &t.root).recip()?;
            let mut pw = inv.clone();
            for c in &t.coeffs {
                acc += &(c * &pw);
                pw = &pw * &inv;
            }
        }
        Some(acc)
    }

    pub fn is_exact(&self) -> bool {
        self.terms
            .iter()
            .all(|t| t.root.is_exact() && t.coeffs.iter().all(Scalar::is_exact))
    }

    /// Largest relative deviation from `1/φ(k)` over `k = 0..=9`, skipping roots.
    pub fn reconstruction_error(&self, phi: &UniPoly) -> f64 {
        let mut worst: f64 = 0.0;
        for k in 0..=9 {
            let ks = Scalar::from_i64(k);
            let Some(inv) = phi.eval(&ks).recip() else {
                continue;
            };
            let Some(sum) = self.eval(&ks) else {
                continue;
            };
            let err = if inv.is_exact() && sum.is_exact() {
                if inv == sum {
                    0.0
                } else {
                    ((&sum - &inv).abs() / inv.abs()).max(f64::MIN_POSITIVE)
                }
            } else {
                (&sum - &inv).abs() / inv.abs()
            };
            worst = worst.max(err);
        }
        worst
    }
}

/// Partial fractions by local series division: with `φ(r + u) = Σ b_j u^j`
/// and `q(u) = Σ_{j>=α} b_j u^{j-α}`, `C_{r, α-m}` is the `m`-th coefficient of `1/q`.
pub fn partial_fractions(phi: &UniPoly, roots: &RootSet) -> Result<PartialFractions, PonderError> {
    if phi.degree() == 0 {
        return Err(PonderError::ConstantPolynomial);
    }
    if roots.degree() as usize != phi.degree() {
        return Err(PonderError::InconsistentRoots { error: f64::INFINITY });
    }
    let mut terms = Vec::with_capacity(roots.roots.len());
    for root in &roots.roots {
        let alpha = root.multiplicity as usize;
        let b = phi.taylor_shift(&root.value);
        let q = &b[alpha..];
        let q0 = q[0].clone();
        let inv_q0 = q0.recip().ok_or(PonderError::InconsistentRoots { error: f64::INFINITY })?;
        let mut d: Vec<Scalar> = Vec::with_capacity(alpha);
        d.push(inv_q0.clone());
        for m in 1..alpha {
            let mut s = Scalar::zero();
            for l in 1..=m.min(q.len() - 1) {
                s += &(&q[l] * &d[m - l]);
            }
            d.push(-(&s * &inv_q0));
        }
        // C_{α-m} = d_m, stored by increasing j
        let coeffs: Vec<Scalar> = (1..=alpha).map(|j| d[alpha - j].clone()).collect();
        terms.push(RootFractions {
            root: root.value.clone(),
            multiplicity: root.multiplicity,
            coeffs,
        });
    }
    let pf = PartialFractions { terms };
    let error = pf.reconstruction_error(phi);
    let tol = if pf.is_exact() { 0.0 } else { 1e-9 };
    if error > tol {
        return Err(PonderError::InconsistentRoots { error });
    }
    Ok(pf)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<Scalar> {
        v.iter().map(|&x| Scalar::from_i64(x)).collect()
    }

    #[test]
    fn example_one_partial_fractions() {
        let phi = PonderationPoly::univariate(&ints(&[2, 5, 4, 1]));
        let roots = phi.roots(RootOptions::default()).unwrap();
        let pf = phi.partial_fractions(&roots).unwrap();
        let by_root = |r: i64| {
            pf.terms
                .iter()
                .find(|t| t.root == Scalar::from_i64(r))
                .unwrap()
                .coeffs
                .clone()
        };
        assert_eq!(by_root(-1), ints(&[-1, 1]));
        assert_eq!(by_root(-2), ints(&[1]));
    }

    #[test]
    fn imaginary_pair() {
        let phi = PonderationPoly::univariate(&ints(&[1, 0, 1]));
        let pf = phi.partial_fractions(&phi.roots(RootOptions::default()).unwrap()).unwrap();
        let half_over_i = (&Scalar::from_i64(2) * &Scalar::i()).recip().unwrap();
        let at_i = pf.terms.iter().find(|t| t.root == Scalar::i()).unwrap();
        assert_eq!(at_i.coeffs, vec![half_over_i]);
    }

    #[test]
    fn resonance_points() {
        let phi = PonderationPoly::univariate(&ints(&[-2, 1]));
        assert_eq!(phi.resonance_check(10), vec![MultiIndex::from([2])]);
        let phi = PonderationPoly::univariate(&ints(&[2, 5, 4, 1]));
        assert!(phi.resonance_check(10).is_empty());
    }

    #[test]
    fn display_standard_basis() {
        let phi = PonderationPoly::univariate(&ints(&[2, 5, 4, 1]));
        assert_eq!(phi.to_string(), "k^3 + 4*k^2 + 5*k + 2");
    }
}
