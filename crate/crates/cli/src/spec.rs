//! The JSON equation specification and its validation into a [`Problem`].

use std::path::Path;

use eulerring::divergence::{DivergenceForm, LinearFactor};
use eulerring::expr::{parse, Expression};
use eulerring::logmono::{LogMonomialSum, LogTerm};
use eulerring::poly::SparsePoly;
use eulerring::stirling::pochhammer_to_standard_multi;
use eulerring::{EulerOperator, MultiIndex, PonderationPoly, Scalar};
use num_complex::Complex64;
use serde::Deserialize;

use crate::CliError;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquationSpec {
    #[serde(default)]
    pub example_id: Option<String>,
    #[serde(default)]
    pub description: Option<String>,
    pub variables: Vec<String>,
    pub operator: OperatorSpec,
    pub rhs: RhsSpec,
    /// Linear factors of φ when the operator is given in another encoding;
    /// checked against the expanded φ.
    #[serde(default)]
    pub factorization: Option<Vec<FactorSpec>>,
    #[serde(default)]
    pub options: Options,
    /// A published closed form to check against the residual oracle.
    #[serde(default)]
    pub reference_solution: Option<String>,
    /// Published partial-fraction coefficients, compared by `partfrac`.
    #[serde(default)]
    pub reference_partial_fractions: Option<Vec<ReferenceFraction>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum OperatorSpec {
    /// φ in the falling-factorial basis, i.e. the Euler-operator coefficients.
    Pochhammer(Coeffs),
    Standard(Coeffs),
    /// `Σ a_i x^i ∂^i` as a list of `{index, coeff}` terms.
    Euler(Vec<TermSpec>),
    /// φ as an explicit product of linear factors `A_j·k + r_j`.
    Divergence(Vec<FactorSpec>),
}

/// Dense univariate coefficients (constant first) or sparse multi-index terms.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum Coeffs {
    Dense(Vec<Scalar>),
    Sparse(Vec<TermSpec>),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub index: Vec<u32>,
    pub coeff: Scalar,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorSpec {
    pub a: Vec<Scalar>,
    pub r: Scalar,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum RhsSpec {
    Polynomial(Coeffs),
    Expression(String),
    LogMonomials(Vec<LogTermSpec>),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogTermSpec {
    #[serde(default)]
    pub exponent: Scalar,
    #[serde(default)]
    pub log_power: u32,
    pub coeff: Scalar,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceFraction {
    pub root: Scalar,
    /// Power `j` of `1/(k - root)^j`.
    pub power: u32,
    pub coeff: Scalar,
}

#[derive(Clone, Copy, Debug, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum RouteChoice {
    #[default]
    Auto,
    Series,
    Logmono,
    Quadrature,
}

impl std::str::FromStr for RouteChoice {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "auto" => Ok(RouteChoice::Auto),
            "series" => Ok(RouteChoice::Series),
            "logmono" => Ok(RouteChoice::Logmono),
            "quadrature" => Ok(RouteChoice::Quadrature),
            _ => Err(format!("unknown route `{s}` (auto, series, logmono, quadrature)")),
        }
    }
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    pub truncation: Option<u32>,
    pub nodes: Option<usize>,
    /// Node count for the quadrature candidate inside the residual check.
    pub residual_nodes: Option<usize>,
    /// Endpoint grading exponent for quadrature; chosen automatically if absent.
    pub grading: Option<u32>,
    pub route: Option<RouteChoice>,
    pub sample_points: Option<Vec<Vec<Scalar>>>,
    pub tolerance: Option<f64>,
}

#[derive(Clone, Debug)]
pub enum Rhs {
    Polynomial(SparsePoly),
    Expression(Expression),
    LogMonomials(LogMonomialSum),
}

impl Rhs {
    pub fn describe(&self, vars: &[String]) -> String {
        match self {
            Rhs::Polynomial(p) => p.display_with(vars),
            Rhs::Expression(e) => e.to_string(),
            Rhs::LogMonomials(l) => l.to_string(),
        }
    }
}

/// A validated specification.
#[derive(Clone, Debug)]
pub struct Problem {
    pub example_id: Option<String>,
    pub vars: Vec<String>,
    pub phi: PonderationPoly,
    pub op: EulerOperator,
    pub explicit_form: Option<DivergenceForm>,
    pub supplied_form: Option<DivergenceForm>,
    pub rhs: Rhs,
    pub options: Options,
    pub sample_points: Option<Vec<Vec<Complex64>>>,
    pub reference_solution: Option<Expression>,
    pub reference_partial_fractions: Option<Vec<ReferenceFraction>>,
}

impl Problem {
    pub fn nvars(&self) -> usize {
        self.vars.len()
    }
}

fn input(msg: impl Into<String>) -> CliError {
    CliError::Input(msg.into())
}

fn coeffs_to_poly(c: &Coeffs, n: usize, what: &str) -> Result<SparsePoly, CliError> {
    match c {
        Coeffs::Dense(v) => {
            if n != 1 {
                return Err(input(format!("{what}: dense coefficient lists need exactly one variable, got {n}")));
            }
            Ok(SparsePoly::from_terms(
                1,
                v.iter().enumerate().map(|(i, c)| (MultiIndex::from(vec![i as u32]), c.clone())),
            ))
        }
        Coeffs::Sparse(t) => terms_to_poly(t, n, what),
    }
}

fn terms_to_poly(t: &[TermSpec], n: usize, what: &str) -> Result<SparsePoly, CliError> {
    let mut p = SparsePoly::zero(n);
    for (i, term) in t.iter().enumerate() {
        if term.index.len() != n {
            return Err(input(format!(
                "{what}: term {i} has a {}-component index, expected {n}",
                term.index.len()
            )));
        }
        p.add_term(MultiIndex::from(term.index.clone()), term.coeff.clone());
    }
    Ok(p)
}

impl EquationSpec {
    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| input(format!("invalid specification: {e}")))
    }

    pub fn validate(&self) -> Result<Problem, CliError> {
        let n = self.variables.len();
        if n == 0 {
            return Err(input("at least one variable is required"));
        }
        for (i, v) in self.variables.iter().enumerate() {
            if self.variables[..i].contains(v) {
                return Err(input(format!("variable `{v}` is listed twice")));
            }
        }
        let mut explicit_form = None;
        let phi = match &self.operator {
            OperatorSpec::Pochhammer(c) => {
                PonderationPoly::new(pochhammer_to_standard_multi(&coeffs_to_poly(c, n, "operator")?))
            }
            OperatorSpec::Standard(c) => PonderationPoly::new(coeffs_to_poly(c, n, "operator")?),
            OperatorSpec::Euler(t) => PonderationPoly::from_euler_operator(&EulerOperator::new(terms_to_poly(t, n, "operator")?)),
            OperatorSpec::Divergence(fs) => {
                if fs.is_empty() {
                    return Err(input("operator: a divergence form needs at least one factor"));
                }
                for (j, f) in fs.iter().enumerate() {
                    if f.a.len() != n {
                        return Err(input(format!("operator: factor {j} has {} coefficients, expected {n}", f.a.len())));
                    }
                }
                let form = DivergenceForm::new(fs.iter().map(|f| LinearFactor::new(f.a.clone(), f.r.clone())).collect())
                    .map_err(|e| input(format!("operator: {e}")))?;
                let phi = form.expand();
                explicit_form = Some(form);
                phi
            }
        };
        if phi.poly().is_zero() {
            return Err(input("operator: φ is identically zero"));
        }
        let mut supplied_form = None;
        if let Some(fs) = &self.factorization {
            if explicit_form.is_some() {
                return Err(input("factorization: the operator is already in divergence form"));
            }
            let factors = fs.iter().map(|f| LinearFactor::new(f.a.clone(), f.r.clone())).collect();
            supplied_form = Some(DivergenceForm::for_phi(factors, &phi).map_err(|e| input(format!("factorization: {e}")))?);
        }
        let op = phi.to_euler_operator();
        let rhs = match &self.rhs {
            RhsSpec::Polynomial(c) => Rhs::Polynomial(coeffs_to_poly(c, n, "rhs")?),
            RhsSpec::Expression(text) => Rhs::Expression(parse(text, &self.variables).map_err(|e| input(format!("rhs: {e}")))?),
            RhsSpec::LogMonomials(terms) => {
                if n != 1 {
                    return Err(input("rhs: log-monomial terms need exactly one variable"));
                }
                Rhs::LogMonomials(LogMonomialSum::from_terms(terms.iter().map(|t| LogTerm {
                    exponent: t.exponent.clone(),
                    log_power: t.log_power,
                    coeff: t.coeff.clone(),
                })))
            }
        };
        let sample_points = match &self.options.sample_points {
            None => None,
            Some(pts) => {
                if pts.is_empty() {
                    return Err(input("options.sample_points is empty"));
                }
                let mut out = Vec::with_capacity(pts.len());
                for (i, p) in pts.iter().enumerate() {
                    if p.len() != n {
                        return Err(input(format!("options.sample_points[{i}] has {} coordinates, expected {n}", p.len())));
                    }
                    out.push(p.iter().map(Scalar::to_c64).collect());
                }
                Some(out)
            }
        };
        let reference_solution = match &self.reference_solution {
            None => None,
            Some(t) => Some(parse(t, &self.variables).map_err(|e| input(format!("reference_solution: {e}")))?),
        };
        if let Some(t) = self.options.tolerance {
            if !(t > 0.0) {
                return Err(input("options.tolerance must be positive"));
            }
        }
        if self.options.nodes == Some(0) || self.options.residual_nodes == Some(0) {
            return Err(input("options.nodes must be positive"));
        }
        Ok(Problem {
            example_id: self.example_id.clone(),
            vars: self.variables.clone(),
            phi,
            op,
            explicit_form,
            supplied_form,
            rhs,
            options: self.options.clone(),
            sample_points,
            reference_solution,
            reference_partial_fractions: self.reference_partial_fractions.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encodings_agree() {
        let poch = r#"{"variables":["x"],"operator":{"pochhammer":[2,10,7,1]},"rhs":{"polynomial":[2,3,1]}}"#;
        let std = r#"{"variables":["x"],"operator":{"standard":[2,5,4,1]},"rhs":{"polynomial":[2,3,1]}}"#;
        let euler = r#"{"variables":["x"],"operator":{"euler":[{"index":[0],"coeff":2},{"index":[1],"coeff":10},{"index":[2],"coeff":7},{"index":[3],"coeff":1}]},"rhs":{"polynomial":[2,3,1]}}"#;
        let a = EquationSpec::from_json(poch).unwrap().validate().unwrap();
        let b = EquationSpec::from_json(std).unwrap().validate().unwrap();
        let c = EquationSpec::from_json(euler).unwrap().validate().unwrap();
        assert_eq!(a.phi, b.phi);
        assert_eq!(b.phi, c.phi);
    }

    #[test]
    fn two_operator_encodings_rejected() {
        let bad = r#"{"variables":["x"],"operator":{"standard":[1,1],"pochhammer":[1,1]},"rhs":{"polynomial":[1]}}"#;
        assert!(EquationSpec::from_json(bad).is_err());
    }

    #[test]
    fn variable_count_checked() {
        let bad = r#"{"variables":["x","y"],"operator":{"standard":[{"index":[1],"coeff":1}]},"rhs":{"polynomial":[1]}}"#;
        assert!(EquationSpec::from_json(bad).unwrap().validate().is_err());
        let bad = r#"{"variables":["x"],"operator":{"standard":[1, 1]},"rhs":{"expression":"y"}}"#;
        assert!(EquationSpec::from_json(bad).unwrap().validate().is_err());
    }
}
