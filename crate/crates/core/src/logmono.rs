//! Closed-form algebra of log-monomials `c · x^r (ln x)^p`, the integral
//! operators `ℓ_q`, and exact solving of `L_φ f = g` inside that algebra.

use std::cmp::Ordering;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ponder::{PartialFractions, UniPoly};
use crate::scalar::{binomial, factorial, Scalar};

const FLOAT_MERGE_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LogError {
    #[error("resonant exponent r={exponent}: phi(r) = 0")]
    Resonant { exponent: Scalar },
    #[error("root r=0 makes the closed form divide by zero")]
    ZeroRoot,
}

/// `coeff · x^exponent · (ln x)^log_power`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogTerm {
    pub exponent: Scalar,
    pub log_power: u32,
    pub coeff: Scalar,
}

/// A canonical finite sum of log-monomials: keys `(r, p)` are unique, no
/// coefficient is zero, terms are sorted by exponent then log power.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct LogMonomialSum {
    terms: Vec<LogTerm>,
}

fn same_exponent(a: &Scalar, b: &Scalar) -> bool {
    match (a.is_exact(), b.is_exact()) {
        (true, true) => a == b,
        _ => (a.to_c64() - b.to_c64()).norm() <= FLOAT_MERGE_TOL * 1f64.max(a.abs()),
    }
}

fn is_zero_like(v: &Scalar) -> bool {
    if v.is_exact() {
        v.is_zero()
    } else {
        v.abs() <= FLOAT_MERGE_TOL
    }
}

impl LogMonomialSum {
    pub fn zero() -> Self {
        LogMonomialSum::default()
    }

    pub fn monomial(exponent: Scalar, log_power: u32, coeff: Scalar) -> Self {
        let mut s = LogMonomialSum::zero();
        s.add_term(exponent, log_power, coeff);
        s
    }

    /// The constant function `c`.
    pub fn constant(c: Scalar) -> Self {
        LogMonomialSum::monomial(Scalar::zero(), 0, c)
    }

    /// `ln x`.
    pub fn ln_x() -> Self {
        LogMonomialSum::monomial(Scalar::zero(), 1, Scalar::one())
    }

    pub fn from_terms<I: IntoIterator<Item = LogTerm>>(terms: I) -> Self {
        let mut s = LogMonomialSum::zero();
        for t in terms {
            s.add_term(t.exponent, t.log_power, t.coeff);
        }
        s
    }

    pub fn terms(&self) -> &[LogTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_exact(&self) -> bool {
        self.terms.iter().all(|t| t.exponent.is_exact() && t.coeff.is_exact())
    }

    pub fn add_term(&mut self, exponent: Scalar, log_power: u32, coeff: Scalar) {
        if coeff.is_zero() {
            return;
        }
        if let Some(pos) = self
            .terms
            .iter()
            .position(|t| t.log_power == log_power && same_exponent(&t.exponent, &exponent))
        {
            let c = &self.terms[pos].coeff + &coeff;
            if c.is_zero() {
                self.terms.remove(pos);
            } else {
                self.terms[pos].coeff = c;
            }
            return;
        }
        let term = LogTerm {
            exponent,
            log_power,
            coeff,
        };
        let at = self
            .terms
            .iter()
            .position(|t| term_order(&term, t) == Ordering::Less)
            .unwrap_or(self.terms.len());
        self.terms.insert(at, term);
    }

    /// Drops float coefficients below `tol` in magnitude.
    pub fn prune(&self, tol: f64) -> LogMonomialSum {
        LogMonomialSum {
            terms: self
                .terms
                .iter()
                .filter(|t| t.coeff.is_exact() || t.coeff.abs() > tol)
                .cloned()
                .collect(),
        }
    }

    pub fn add(&self, other: &LogMonomialSum) -> LogMonomialSum {
        let mut out = self.clone();
        for t in &other.terms {
            out.add_term(t.exponent.clone(), t.log_power, t.coeff.clone());
        }
        out
    }

    pub fn sub(&self, other: &LogMonomialSum) -> LogMonomialSum {
        self.add(&other.scale(&-Scalar::one()))
    }

    pub fn scale(&self, c: &Scalar) -> LogMonomialSum {
        LogMonomialSum::from_terms(self.terms.iter().map(|t| LogTerm {
            coeff: &t.coeff * c,
            ..t.clone()
        }))
    }

    /// Multiplies by `x^r (ln x)^p`.
    pub fn mul_monomial(&self, r: &Scalar, p: u32) -> LogMonomialSum {
        LogMonomialSum::from_terms(self.terms.iter().map(|t| LogTerm {
            exponent: &t.exponent + r,
            log_power: t.log_power + p,
            coeff: t.coeff.clone(),
        }))
    }

    pub fn mul(&self, other: &LogMonomialSum) -> LogMonomialSum {
        let mut out = LogMonomialSum::zero();
        for a in &self.terms {
            for b in &other.terms {
                out.add_term(&a.exponent + &b.exponent, a.log_power + b.log_power, &a.coeff * &b.coeff);
            }
        }
        out
    }

    /// Principal-branch evaluation at `x` (intended for positive reals).
    pub fn eval(&self, x: Complex64) -> Complex64 {
        let lx = x.ln();
        self.terms
            .iter()
            .map(|t| {
                let r = t.exponent.to_c64();
                let xr = if r == Complex64::new(0.0, 0.0) { Complex64::new(1.0, 0.0) } else { (r * lx).exp() };
                t.coeff.to_c64() * xr * lx.powu(t.log_power)
            })
            .sum()
    }

    /// Largest coefficient magnitude.
    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.iter().map(|t| t.coeff.abs()).fold(0.0, f64::max)
    }

    /// Coefficientwise comparison: exact equality for exact sums, otherwise
    /// the difference's coefficients must be within `tol` relative to the
    /// larger side.
    pub fn approx_eq(&self, other: &LogMonomialSum, tol: f64) -> bool {
        if self.is_exact() && other.is_exact() {
            return self == other;
        }
        let scale = self.max_abs_coeff().max(other.max_abs_coeff()).max(1.0);
        self.sub(other).terms.iter().all(|t| t.coeff.abs() <= tol * scale)
    }
}

fn term_order(a: &LogTerm, b: &LogTerm) -> Ordering {
    a.exponent
        .canonical_cmp(&b.exponent)
        .then(b.log_power.cmp(&a.log_power))
}

impl fmt::Display for LogMonomialSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            let c = t.coeff.to_c64();
            let neg = c.im == 0.0 && c.re < 0.0;
            let mag = if neg { -&t.coeff } else { t.coeff.clone() };
            let mut factors = Vec::new();
            if !t.exponent.is_zero() {
                let e = t.exponent.to_string();
                factors.push(if e.contains(['/', ' ', '-', '*']) { format!("x^({e})") } else { format!("x^{e}") });
            }
            match t.log_power {
                0 => {}
                1 => factors.push("ln(x)".to_string()),
                p => factors.push(format!("ln(x)^{p}")),
            }
            let coef = mag.to_string();
            let coef = if coef.contains(' ') { format!("({coef})") } else { coef };
            let body = match (factors.is_empty(), mag.is_one()) {
                (true, _) => coef,
                (false, true) => factors.join("*"),
                (false, false) => format!("{coef}*{}", factors.join("*")),
            };
            match (i, neg) {
                (0, true) => write!(f, "-{body}")?,
                (0, false) => write!(f, "{body}")?,
                (_, true) => write!(f, " - {body}")?,
                (_, false) => write!(f, " + {body}")?,
            }
        }
        Ok(())
    }
}

/// `ℓ_q(f) = ∫ f(z) / z^q dz`, integration constant zero.
pub fn ell_q(f: &LogMonomialSum, q: &Scalar) -> LogMonomialSum {
    let mut out = LogMonomialSum::zero();
    for t in f.terms() {
        let s1 = &(&t.exponent - q) + &Scalar::one();
        let p = t.log_power;
        if is_zero_like(&s1) {
            let c = &t.coeff / &Scalar::from_i64(p as i64 + 1);
            out.add_term(Scalar::zero(), p + 1, c);
            continue;
        }
        let inv = s1.recip().expect("nonzero");
        let pf = factorial(p);
        let mut inv_pow = inv.clone();
        for m in 0..=p {
            // (-1)^m p!/(p-m)! / (s+1)^{m+1}
            let falling = Scalar::from_bigint(&pf / factorial(p - m));
            let mut c = &(&t.coeff * &falling) * &inv_pow;
            if m % 2 == 1 {
                c = -c;
            }
            out.add_term(s1.clone(), p - m, c);
            inv_pow = &inv_pow * &inv;
        }
    }
    out
}

/// `ℓ_1^{-1}(f) = x f'(x)`.
pub fn ell1_inverse(f: &LogMonomialSum) -> LogMonomialSum {
    let mut out = LogMonomialSum::zero();
    for t in f.terms() {
        out.add_term(t.exponent.clone(), t.log_power, &t.coeff * &t.exponent);
        if t.log_power > 0 {
            out.add_term(
                t.exponent.clone(),
                t.log_power - 1,
                &t.coeff * &Scalar::from_i64(t.log_power as i64),
            );
        }
    }
    out
}

/// Derivatives `φ, φ', …, φ^{(n)}` as polynomials.
fn derivatives(phi: &UniPoly, n: u32) -> Vec<UniPoly> {
    let mut out = vec![phi.clone()];
    for _ in 0..n {
        let d = out.last().expect("nonempty").derivative();
        out.push(d);
    }
    out
}

/// `L_φ(x^r ln^p x) = Σ_q C(p,q) φ^{(q)}(r) x^r ln^{p-q} x`, extended linearly.
pub fn apply_lphi(phi: &UniPoly, f: &LogMonomialSum) -> LogMonomialSum {
    let maxp = f.terms().iter().map(|t| t.log_power).max().unwrap_or(0);
    let ders = derivatives(phi, maxp);
    let mut out = LogMonomialSum::zero();
    for t in f.terms() {
        for q in 0..=t.log_power {
            let c = &(&Scalar::from_bigint(binomial(t.log_power, q)) * &ders[q as usize].eval(&t.exponent)) * &t.coeff;
            out.add_term(t.exponent.clone(), t.log_power - q, c);
        }
    }
    out
}

/// Exponents of `f` with the highest log power present at each.
fn exponent_groups(f: &LogMonomialSum) -> Vec<(Scalar, u32)> {
    let mut groups: Vec<(Scalar, u32)> = Vec::new();
    for t in f.terms() {
        match groups.iter_mut().find(|(r, _)| same_exponent(r, &t.exponent)) {
            Some((_, p)) => *p = (*p).max(t.log_power),
            None => groups.push((t.exponent.clone(), t.log_power)),
        }
    }
    groups
}

fn coeff_at(f: &LogMonomialSum, r: &Scalar, p: u32) -> Scalar {
    f.terms()
        .iter()
        .find(|t| t.log_power == p && same_exponent(&t.exponent, r))
        .map(|t| t.coeff.clone())
        .unwrap_or_default()
}

/// A particular solution of `L_φ f = g`, found exponent by exponent: the
/// span of `x^r ln^m x`, `m <= P`, is invariant and triangular under `L_φ`
/// with diagonal `φ(r)`.
pub fn solve_lphi(phi: &UniPoly, g: &LogMonomialSum) -> Result<LogMonomialSum, LogError> {
    let exact = phi.is_exact() && g.is_exact();
    let tol = 1e-12 * (1.0 + phi.coeffs().iter().map(Scalar::abs).fold(0.0, f64::max));
    let groups = exponent_groups(g);
    let maxp = groups.iter().map(|(_, p)| *p).max().unwrap_or(0);
    let ders = derivatives(phi, maxp);
    let mut out = LogMonomialSum::zero();
    for (r, big_p) in groups {
        let vals: Vec<Scalar> = ders.iter().map(|d| d.eval(&r)).collect();
        let diag = &vals[0];
        let singular = if exact && r.is_exact() { diag.is_zero() } else { diag.abs() <= tol };
        if singular {
            return Err(LogError::Resonant { exponent: r });
        }
        let inv = diag.recip().expect("nonzero diagonal");
        let mut f = vec![Scalar::zero(); big_p as usize + 1];
        for m in (0..=big_p).rev() {
            let mut rhs = coeff_at(g, &r, m);
            for j in m + 1..=big_p {
                let c = &Scalar::from_bigint(binomial(j, m)) * &vals[(j - m) as usize];
                rhs -= &(&c * &f[j as usize]);
            }
            f[m as usize] = &rhs * &inv;
        }
        for (m, c) in f.into_iter().enumerate() {
            out.add_term(r.clone(), m as u32, c);
        }
    }
    Ok(out)
}

/// The literal iterated-integral route:
/// `f = Σ_{i,j} C_{i,j} x^{r_i} ℓ_1^{j-1} ℓ_{r_i+1}(g)`.
pub fn solve_by_integrals(pf: &PartialFractions, g: &LogMonomialSum) -> LogMonomialSum {
    let mut out = LogMonomialSum::zero();
    for t in &pf.terms {
        let shift = &t.root + &Scalar::one();
        let mut inner = ell_q(g, &shift);
        for c in &t.coeffs {
            out = out.add(&inner.mul_monomial(&t.root, 0).scale(c));
            inner = ell_q(&inner, &Scalar::one());
        }
    }
    out
}

/// Closed form for `g = ln x`:
/// `y = Σ_{i,j} C_{i,j} (-1)^j / r_i^{j+1} · (r_i ln x + j)`.
pub fn log_rhs_closed_form(pf: &PartialFractions) -> Result<LogMonomialSum, LogError> {
    let mut out = LogMonomialSum::zero();
    for t in &pf.terms {
        let inv_r = t.root.recip().ok_or(LogError::ZeroRoot)?;
        if !t.root.is_exact() && t.root.abs() <= FLOAT_MERGE_TOL {
            return Err(LogError::ZeroRoot);
        }
        for (idx, c) in t.coeffs.iter().enumerate() {
            let j = idx as u32 + 1;
            let mut w = c * &inv_r.powu(j + 1);
            if j % 2 == 1 {
                w = -w;
            }
            out.add_term(Scalar::zero(), 1, &w * &t.root);
            out.add_term(Scalar::zero(), 0, &w * &Scalar::from_i64(j as i64));
        }
    }
    Ok(out.prune(1e-13))
}
