//! Truncated multivariate power series, Euler operators, and the
//! coefficient-wise operators `L_φ` and `L_{1/φ}`.

use std::fmt;

use num_complex::Complex64;
use serde::ser::SerializeSeq;
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::exec;
use crate::index::MultiIndex;
use crate::poly::SparsePoly;
use crate::ponder::PonderationPoly;
use crate::scalar::Scalar;

pub const DEFAULT_TRUNCATION: u32 = 32;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SeriesError {
    #[error("resonance at γ={gamma}: phi vanishes where the right-hand side is nonzero")]
    Resonance { gamma: MultiIndex },
    #[error("variable count mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SeriesWarning {
    /// φ(γ) = 0 and g_γ = 0: the coefficient was set to zero, but any value
    /// solves the equation there.
    FreeDirection { gamma: MultiIndex },
    /// |φ(γ)| is tiny relative to the scale of φ.
    IllConditioned { gamma: MultiIndex, magnitude: f64 },
}

impl fmt::Display for SeriesWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeriesWarning::FreeDirection { gamma } => {
                write!(f, "free homogeneous direction x^{gamma}: phi vanishes, coefficient set to 0")
            }
            SeriesWarning::IllConditioned { gamma, magnitude } => {
                write!(f, "ill-conditioned at γ={gamma}: |phi| = {magnitude:e}")
            }
        }
    }
}

/// `Σ_{|γ| <= N} a_γ x^γ`.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedSeries {
    trunc: u32,
    poly: SparsePoly,
}

impl TruncatedSeries {
    pub fn zero(nvars: usize, trunc: u32) -> Self {
        TruncatedSeries {
            trunc,
            poly: SparsePoly::zero(nvars),
        }
    }

    /// Drops every monomial above total degree `trunc`.
    pub fn from_poly(poly: SparsePoly, trunc: u32) -> Self {
        let n = poly.nvars();
        let kept = poly.into_terms().into_iter().filter(|(k, _)| k.total() <= trunc);
        TruncatedSeries {
            trunc,
            poly: SparsePoly::from_terms(n, kept),
        }
    }

    pub fn from_terms<I>(nvars: usize, trunc: u32, terms: I) -> Self
    where
        I: IntoIterator<Item = (MultiIndex, Scalar)>,
    {
        TruncatedSeries::from_poly(SparsePoly::from_terms(nvars, terms), trunc)
    }

    pub fn nvars(&self) -> usize {
        self.poly.nvars()
    }

    pub fn trunc(&self) -> u32 {
        self.trunc
    }

    pub fn poly(&self) -> &SparsePoly {
        &self.poly
    }

    pub fn into_poly(self) -> SparsePoly {
        self.poly
    }

    pub fn coeff(&self, gamma: &MultiIndex) -> Scalar {
        self.poly.coeff(gamma)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Scalar)> {
        self.poly.terms()
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    pub fn is_exact(&self) -> bool {
        self.poly.is_exact()
    }

    /// Re-truncates at a smaller bound (never raises it).
    pub fn truncate(&self, trunc: u32) -> TruncatedSeries {
        TruncatedSeries::from_poly(self.poly.clone(), trunc.min(self.trunc))
    }

    pub fn add(&self, other: &TruncatedSeries) -> TruncatedSeries {
        TruncatedSeries::from_poly(self.poly.add(&other.poly), self.trunc.min(other.trunc))
    }

    pub fn sub(&self, other: &TruncatedSeries) -> TruncatedSeries {
        TruncatedSeries::from_poly(self.poly.sub(&other.poly), self.trunc.min(other.trunc))
    }

    pub fn scale(&self, c: &Scalar) -> TruncatedSeries {
        TruncatedSeries {
            trunc: self.trunc,
            poly: self.poly.scale(c),
        }
    }

    /// Cauchy product, truncated.
    pub fn mul(&self, other: &TruncatedSeries) -> TruncatedSeries {
        let n = self.trunc.min(other.trunc);
        TruncatedSeries {
            trunc: n,
            poly: self.poly.mul_truncated(&other.poly, Some(n)),
        }
    }

    /// Evaluates the truncated polynomial.
    pub fn eval(&self, point: &[Scalar]) -> Scalar {
        self.poly.eval(point)
    }

    pub fn eval_c64(&self, point: &[Complex64]) -> Complex64 {
        self.poly.eval_c64(point)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.poly.max_abs_coeff()
    }

    pub fn records(&self) -> Vec<SeriesRecord> {
        self.terms()
            .map(|(k, v)| {
                let c = v.to_c64();
                SeriesRecord {
                    multi_index: k.clone(),
                    re: c.re,
                    im: c.im,
                    exact: v.exact_string(),
                }
            })
            .collect()
    }

    pub fn from_records(nvars: usize, trunc: u32, records: &[SeriesRecord]) -> Self {
        TruncatedSeries::from_terms(nvars, trunc, records.iter().map(|r| (r.multi_index.clone(), r.value())))
    }
}

/// One serialized coefficient.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesRecord {
    pub multi_index: MultiIndex,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<String>,
}

impl SeriesRecord {
    /// The exact value when the record carries one, else the float pair.
    pub fn value(&self) -> Scalar {
        self.exact
            .as_deref()
            .and_then(crate::scalar::parse_complex_text)
            .unwrap_or_else(|| Scalar::from_c64(Complex64::new(self.re, self.im)))
    }
}

impl Serialize for TruncatedSeries {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let recs = self.records();
        let mut seq = serializer.serialize_seq(Some(recs.len()))?;
        for r in &recs {
            seq.serialize_element(r)?;
        }
        seq.end()
    }
}

/// `Σ_i a_i x^i ∂^{|i|}/∂x^i`, keyed by the multi-index `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct EulerOperator {
    coeffs: SparsePoly,
}

impl EulerOperator {
    pub fn new(coeffs: SparsePoly) -> Self {
        EulerOperator { coeffs }
    }

    pub fn from_terms<I>(nvars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (MultiIndex, Scalar)>,
    {
        EulerOperator::new(SparsePoly::from_terms(nvars, terms))
    }

    pub fn nvars(&self) -> usize {
        self.coeffs.nvars()
    }

    pub fn order(&self) -> u32 {
        self.coeffs.total_degree().unwrap_or(0)
    }

    pub fn coeffs(&self) -> &SparsePoly {
        &self.coeffs
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Scalar)> {
        self.coeffs.terms()
    }

    /// Applies the operator by formal differentiation.
    pub fn apply(&self, f: &TruncatedSeries) -> TruncatedSeries {
        euler_apply(self, f)
    }

    /// Readable form using `x, y, z` (or `x1..xn`) and `D` for derivatives,
    /// e.g. `x^3*D^3 + 7*x^2*D^2`.
    pub fn display_with(&self, names: &[String]) -> String {
        let mut parts = Vec::new();
        for (i, a) in self.coeffs.terms().rev() {
            let mut mono = Vec::new();
            let mut ders = Vec::new();
            for (e, n) in i.iter().zip(names) {
                match *e {
                    0 => {}
                    1 => {
                        mono.push(n.clone());
                        ders.push(format!("D{n}"));
                    }
                    e => {
                        mono.push(format!("{n}^{e}"));
                        ders.push(format!("D{n}^{e}"));
                    }
                }
            }
            let body: Vec<String> = mono.into_iter().chain(ders).collect();
            let coef = a.to_string();
            let coef = if coef.contains(' ') { format!("({coef})") } else { coef };
            parts.push(match (body.is_empty(), a.is_one()) {
                (true, _) => coef,
                (false, true) => body.join("*"),
                (false, false) => format!("{coef}*{}", body.join("*")),
            });
        }
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" + ")
        }
    }
}

fn check_dims(a: usize, b: usize) -> Result<(), SeriesError> {
    if a == b {
        Ok(())
    } else {
        Err(SeriesError::DimensionMismatch { left: a, right: b })
    }
}

/// `L_φ f = Σ φ(γ) a_γ x^γ`.
pub fn lphi_apply(phi: &PonderationPoly, f: &TruncatedSeries) -> Result<TruncatedSeries, SeriesError> {
    check_dims(phi.nvars(), f.nvars())?;
    let terms: Vec<(&MultiIndex, &Scalar)> = f.terms().collect();
    let mapped = exec::map(&terms, |(k, v)| ((*k).clone(), &phi.eval_lattice(k) * *v));
    Ok(TruncatedSeries::from_terms(f.nvars(), f.trunc(), mapped))
}

/// Result of `L_{1/φ}` together with diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct Inverted {
    pub series: TruncatedSeries,
    pub warnings: Vec<SeriesWarning>,
}

/// `L_{1/φ} g = Σ g_γ / φ(γ) x^γ`. Fails at a lattice point where `φ(γ) = 0`
/// and `g_γ ≠ 0`. Lattice zeros of φ where `g` vanishes are reported as free
/// directions.
pub fn lphi_inverse(phi: &PonderationPoly, g: &TruncatedSeries) -> Result<Inverted, SeriesError> {
    check_dims(phi.nvars(), g.nvars())?;
    let exact = phi.is_exact();
    let scale = phi.poly().max_abs_coeff();
    let zero_tol = 1e-12 * (1.0 + scale);
    let is_zero = |v: &Scalar| if exact { v.is_zero() } else { v.abs() <= zero_tol };
    let mut warnings = Vec::new();
    for gamma in phi.resonance_check(g.trunc()) {
        if is_zero(&g.coeff(&gamma)) {
            warnings.push(SeriesWarning::FreeDirection { gamma });
        } else {
            return Err(SeriesError::Resonance { gamma });
        }
    }
    let terms: Vec<(&MultiIndex, &Scalar)> = g.terms().collect();
    let values = exec::map(&terms, |(k, v)| {
        let p = phi.eval_lattice(k);
        if is_zero(&p) {
            return ((*k).clone(), Scalar::zero(), None);
        }
        let warn = (p.abs() < 1e-12 * scale).then(|| SeriesWarning::IllConditioned {
            gamma: (*k).clone(),
            magnitude: p.abs(),
        });
        ((*k).clone(), *v / &p, warn)
    });
    let mut out = Vec::with_capacity(values.len());
    for (k, v, w) in values {
        if let Some(w) = w {
            warnings.push(w);
        }
        out.push((k, v));
    }
    Ok(Inverted {
        series: TruncatedSeries::from_terms(g.nvars(), g.trunc(), out),
        warnings,
    })
}

/// `Σ_i a_i x^i ∂^i f` by differentiating the coefficient map term by term.
pub fn euler_apply(op: &EulerOperator, f: &TruncatedSeries) -> TruncatedSeries {
    assert_eq!(op.nvars(), f.nvars(), "operator and series variable counts differ");
    let mut acc = SparsePoly::zero(f.nvars());
    for (i, a) in op.terms() {
        let mut d = f.poly().clone();
        for (var, &e) in i.iter().enumerate() {
            for _ in 0..e {
                d = d.derivative(var);
            }
        }
        // multiply by x^i
        let shifted = SparsePoly::from_terms(
            f.nvars(),
            d.terms().map(|(k, v)| (k.add(i), v * a)),
        );
        acc = acc.add(&shifted);
    }
    TruncatedSeries::from_poly(acc, f.trunc())
}

/// Size of `euler_apply(op, candidate) - g`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeriesResidual {
    pub max_abs: f64,
    /// Computed in exact arithmetic and identically zero.
    pub exact_zero: bool,
    pub worst: Option<MultiIndex>,
}

pub fn residual(op: &EulerOperator, candidate: &TruncatedSeries, g: &TruncatedSeries) -> SeriesResidual {
    let n = candidate.trunc().min(g.trunc());
    let diff = euler_apply(op, candidate).truncate(n).sub(&g.truncate(n));
    let mut worst = None;
    let mut max_abs: f64 = 0.0;
    for (k, v) in diff.terms() {
        let a = v.abs();
        if a > max_abs || worst.is_none() {
            max_abs = max_abs.max(a);
            worst = Some(k.clone());
        }
    }
    let exact = candidate.is_exact() && g.is_exact() && op.coeffs().is_exact();
    SeriesResidual {
        max_abs,
        exact_zero: exact && diff.is_zero(),
        worst,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uni_series(coeffs: &[i64], trunc: u32) -> TruncatedSeries {
        TruncatedSeries::from_terms(
            1,
            trunc,
            coeffs
                .iter()
                .enumerate()
                .map(|(i, &c)| (MultiIndex::from([i as u32]), Scalar::from_i64(c))),
        )
    }

    fn example_one_op() -> EulerOperator {
        EulerOperator::from_terms(
            1,
            [(0, 2), (1, 10), (2, 7), (3, 1)].map(|(i, c)| (MultiIndex::from([i]), Scalar::from_i64(c))),
        )
    }

    #[test]
    fn example_two_solution() {
        let op = example_one_op();
        let phi = PonderationPoly::from_euler_operator(&op);
        let g = uni_series(&[2, 3, 1], 8);
        let inv = lphi_inverse(&phi, &g).unwrap();
        assert!(inv.warnings.is_empty());
        let want = TruncatedSeries::from_terms(
            1,
            8,
            [
                (MultiIndex::from([0]), Scalar::one()),
                (MultiIndex::from([1]), Scalar::from_ratio(1, 4)),
                (MultiIndex::from([2]), Scalar::from_ratio(1, 36)),
            ],
        );
        assert_eq!(inv.series, want);
        let r = residual(&op, &inv.series, &g);
        assert!(r.exact_zero);
    }

    #[test]
    fn euler_on_monomial() {
        let op = example_one_op();
        let f = uni_series(&[0, 0, 1], 8);
        assert_eq!(euler_apply(&op, &f).coeff(&MultiIndex::from([2])), Scalar::from_i64(36));
        let op3 = EulerOperator::from_terms(
            3,
            [([1, 0, 0], 2), ([0, 1, 0], 1), ([0, 0, 1], 1), ([0, 0, 0], 4)]
                .map(|(i, c)| (MultiIndex::from(i), Scalar::from_i64(c))),
        );
        let xyz = TruncatedSeries::from_terms(3, 6, [(MultiIndex::from([1, 1, 1]), Scalar::one())]);
        assert_eq!(euler_apply(&op3, &xyz).coeff(&MultiIndex::from([1, 1, 1])), Scalar::from_i64(8));
    }

    #[test]
    fn perturbed_candidate() {
        let op = example_one_op();
        let g = uni_series(&[2, 3, 1], 8);
        let eps = Scalar::from_ratio(1, 1000);
        let cand = TruncatedSeries::from_terms(
            1,
            8,
            [
                (MultiIndex::from([0]), Scalar::one()),
                (MultiIndex::from([1]), &Scalar::from_ratio(1, 4) + &eps),
                (MultiIndex::from([2]), Scalar::from_ratio(1, 36)),
            ],
        );
        let r = residual(&op, &cand, &g);
        assert_eq!(r.worst, Some(MultiIndex::from([1])));
        assert!((r.max_abs - 0.012).abs() < 1e-15);
    }

    #[test]
    fn resonance_is_an_error() {
        let phi = PonderationPoly::univariate(&[Scalar::from_i64(-2), Scalar::one()]);
        let g = uni_series(&[0, 0, 1], 8);
        assert_eq!(
            lphi_inverse(&phi, &g),
            Err(SeriesError::Resonance { gamma: MultiIndex::from([2]) })
        );
        let g = uni_series(&[0, 1], 8);
        let inv = lphi_inverse(&phi, &g).unwrap();
        assert_eq!(inv.warnings, vec![SeriesWarning::FreeDirection { gamma: MultiIndex::from([2]) }]);
    }

    #[test]
    fn product_truncates() {
        let a = uni_series(&[1, 1], 3);
        let p = a.mul(&a).mul(&a).mul(&a);
        assert_eq!(p.poly().total_degree(), Some(3));
        assert_eq!(p.coeff(&MultiIndex::from([3])), Scalar::from_i64(4));
    }
}
