//! Sparse multivariate polynomials over [`Scalar`]; shared storage for
//! ponderation polynomials, Euler operators and truncated series.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::index::MultiIndex;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Default)]
pub struct SparsePoly {
    nvars: usize,
    terms: BTreeMap<MultiIndex, Scalar>,
}

impl SparsePoly {
    pub fn zero(nvars: usize) -> Self {
        SparsePoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Scalar) -> Self {
        let mut p = SparsePoly::zero(nvars);
        p.add_term(MultiIndex::zero(nvars), c);
        p
    }

    pub fn from_terms<I>(nvars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (MultiIndex, Scalar)>,
    {
        let mut p = SparsePoly::zero(nvars);
        for (k, v) in terms {
            p.add_term(k, v);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&MultiIndex, &Scalar)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> BTreeMap<MultiIndex, Scalar> {
        self.terms
    }

    pub fn coeff(&self, idx: &MultiIndex) -> Scalar {
        self.terms.get(idx).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn get(&self, idx: &MultiIndex) -> Option<&Scalar> {
        self.terms.get(idx)
    }

    /// Adds `c` to the coefficient of `idx`, removing the entry if it cancels.
    pub fn add_term(&mut self, idx: MultiIndex, c: Scalar) {
        assert_eq!(idx.nvars(), self.nvars, "multi-index arity mismatch");
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&idx) {
            Some(v) => {
                *v += &c;
                if v.is_zero() {
                    self.terms.remove(&idx);
                }
            }
            None => {
                self.terms.insert(idx, c);
            }
        }
    }

    pub fn set(&mut self, idx: MultiIndex, c: Scalar) {
        if c.is_zero() {
            self.terms.remove(&idx);
        } else {
            self.terms.insert(idx, c);
        }
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(MultiIndex::total).max()
    }

    /// Highest exponent of variable `var` that appears.
    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|k| k.0[var]).max().unwrap_or(0)
    }

    pub fn is_exact(&self) -> bool {
        self.terms.values().all(Scalar::is_exact)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(Scalar::abs).fold(0.0, f64::max)
    }

    pub fn scale(&self, c: &Scalar) -> SparsePoly {
        SparsePoly::from_terms(
            self.nvars,
            self.terms.iter().map(|(k, v)| (k.clone(), v * c)),
        )
    }

    pub fn add(&self, other: &SparsePoly) -> SparsePoly {
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.add_term(k.clone(), v.clone());
        }
        out
    }

    pub fn sub(&self, other: &SparsePoly) -> SparsePoly {
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.add_term(k.clone(), -v);
        }
        out
    }

    /// Product, dropping every monomial of total degree above `max_total`
    /// when a bound is given.
    pub fn mul_truncated(&self, other: &SparsePoly, max_total: Option<u32>) -> SparsePoly {
        let mut out = SparsePoly::zero(self.nvars);
        for (ka, va) in &self.terms {
            let da = ka.total();
            if max_total.is_some_and(|m| da > m) {
                continue;
            }
            for (kb, vb) in &other.terms {
                if max_total.is_some_and(|m| da + kb.total() > m) {
                    continue;
                }
                out.add_term(ka.add(kb), va * vb);
            }
        }
        out
    }

    pub fn mul(&self, other: &SparsePoly) -> SparsePoly {
        self.mul_truncated(other, None)
    }

    pub fn pow(&self, e: u32) -> SparsePoly {
        let mut acc = SparsePoly::constant(self.nvars, Scalar::one());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Exact (when possible) evaluation at a point.
    pub fn eval(&self, point: &[Scalar]) -> Scalar {
        assert_eq!(point.len(), self.nvars);
        let mut acc = Scalar::zero();
        for (k, v) in &self.terms {
            let mut t = v.clone();
            for (x, e) in point.iter().zip(k.iter()) {
                if *e > 0 {
                    t = &t * &x.powu(*e);
                }
            }
            acc += &t;
        }
        acc
    }

    /// Evaluation at a nonnegative lattice point.
    pub fn eval_lattice(&self, gamma: &MultiIndex) -> Scalar {
        let point: Vec<Scalar> = gamma.iter().map(|&g| Scalar::from_i64(g as i64)).collect();
        self.eval(&point)
    }

    pub fn eval_c64(&self, point: &[Complex64]) -> Complex64 {
        assert_eq!(point.len(), self.nvars);
        self.terms
            .iter()
            .map(|(k, v)| {
                k.iter()
                    .zip(point)
                    .fold(v.to_c64(), |acc, (e, x)| acc * x.powu(*e))
            })
            .sum()
    }

    /// Formal partial derivative `∂/∂x_var`.
    pub fn derivative(&self, var: usize) -> SparsePoly {
        let mut out = SparsePoly::zero(self.nvars);
        for (k, v) in &self.terms {
            let e = k.0[var];
            if e == 0 {
                continue;
            }
            let mut nk = k.clone();
            nk.0[var] -= 1;
            out.add_term(nk, v * &Scalar::from_i64(e as i64));
        }
        out
    }

    /// `Σ c_γ x^γ` restricted to monomials of total degree `d`.
    pub fn homogeneous_part(&self, d: u32) -> SparsePoly {
        SparsePoly::from_terms(
            self.nvars,
            self.terms
                .iter()
                .filter(|(k, _)| k.total() == d)
                .map(|(k, v)| (k.clone(), v.clone())),
        )
    }

    pub fn map_coeffs<F>(&self, mut f: F) -> SparsePoly
    where
        F: FnMut(&MultiIndex, &Scalar) -> Scalar,
    {
        SparsePoly::from_terms(
            self.nvars,
            self.terms.iter().map(|(k, v)| (k.clone(), f(k, v))),
        )
    }

    /// Coefficientwise comparison with a relative tolerance scaled by the
    /// largest coefficient of either side (exact comparison when both exact).
    pub fn approx_eq(&self, other: &SparsePoly, rel_tol: f64) -> bool {
        if self.is_exact() && other.is_exact() {
            return self == other;
        }
        let scale = self.max_abs_coeff().max(other.max_abs_coeff()).max(1e-300);
        let diff = self.sub(other);
        diff.terms.values().all(|v| v.abs() <= rel_tol * scale)
    }

    /// Human-readable form over the given variable names, highest degree
    /// first, e.g. `k^3 + 4*k^2 + 5*k + 2`.
    pub fn display_with(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (k, v)) in self.terms.iter().rev().enumerate() {
            let mono: Vec<String> = k
                .iter()
                .zip(names)
                .filter(|(e, _)| **e > 0)
                .map(|(e, n)| if *e == 1 { n.clone() } else { format!("{n}^{e}") })
                .collect();
            let c = v.to_c64();
            let neg = c.im == 0.0 && c.re < 0.0;
            let mag = if neg { -v } else { v.clone() };
            let coef = mag.to_string();
            let coef = if coef.contains(' ') { format!("({coef})") } else { coef };
            let body = match (mono.is_empty(), mag.is_one()) {
                (true, _) => coef,
                (false, true) => mono.join("*"),
                (false, false) => format!("{coef}*{}", mono.join("*")),
            };
            if i == 0 {
                out.push_str(if neg { "-" } else { "" });
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            out.push_str(&body);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(terms: &[(&[u32], i64)]) -> SparsePoly {
        let n = terms[0].0.len();
        SparsePoly::from_terms(
            n,
            terms
                .iter()
                .map(|(k, v)| (MultiIndex(k.to_vec()), Scalar::from_i64(*v))),
        )
    }

    #[test]
    fn multiply_and_truncate() {
        let a = p(&[(&[1, 0], 1), (&[0, 1], 1), (&[0, 0], 1)]);
        let sq = a.mul(&a);
        assert_eq!(sq.coeff(&MultiIndex::from([1, 1])), Scalar::from_i64(2));
        let t = a.mul_truncated(&a, Some(1));
        assert_eq!(t.total_degree(), Some(1));
        assert_eq!(t.coeff(&MultiIndex::from([1, 0])), Scalar::from_i64(2));
    }

    #[test]
    fn cancellation_removes_terms() {
        let a = p(&[(&[1], 3), (&[0], 1)]);
        let z = a.sub(&a);
        assert!(z.is_zero());
    }

    #[test]
    fn display_orders_by_degree() {
        let a = p(&[(&[3], 1), (&[2], 4), (&[1], -5), (&[0], 2)]);
        assert_eq!(a.display_with(&["k".to_string()]), "k^3 + 4*k^2 - 5*k + 2");
    }

    #[test]
    fn eval_exact() {
        // k1 k2 + 2 at (3, 4)
        let a = p(&[(&[1, 1], 1), (&[0, 0], 2)]);
        assert_eq!(a.eval_lattice(&MultiIndex::from([3, 4])), Scalar::from_i64(14));
    }
}
