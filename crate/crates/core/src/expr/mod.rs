//! Right-hand-side expressions: parsing, complex evaluation, Maclaurin
//! expansion, and conversion into log-monomial sums.
//!
//! Grammar (whitespace between tokens is ignored):
//!
//! ```text
//! expr    = term { ("+" | "-") term } ;
//! term    = unary { ("*" | "/") unary } ;
//! unary   = "-" unary | power ;
//! power   = atom [ "^" unary ] ;          (* right-associative *)
//! atom    = number | ident | ident "(" expr { "," expr } ")" | "(" expr ")" ;
//! number  = digits [ "." digits ] [ ("e" | "E") [ "+" | "-" ] digits ] ;
//! ```
//!
//! `ident` is a declared variable, one of the constants `i` and `pi`, or a
//! function from the registry (`sin`, `cos`, `exp`, `ln`).

mod parser;
mod taylor;

use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

use crate::evaluable::{EvalError, Evaluable};
use crate::logmono::LogMonomialSum;
use crate::scalar::Scalar;
use crate::series::TruncatedSeries;

pub use parser::parse;
pub use taylor::taylor;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExprError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("`{name}` takes {expected} argument(s), got {got} (byte {offset})")]
    Arity {
        name: String,
        expected: usize,
        got: usize,
        offset: usize,
    },
    #[error("expected {expected} coordinates, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("domain error in `{node}`: {reason}")]
    Domain { node: String, reason: String },
    #[error("`{node}` is not analytic at the origin: {reason}")]
    NotAnalytic { node: String, reason: String },
    #[error("`{node}` is outside the log-monomial algebra")]
    NotLogMonomial { node: String },
}

/// An elementary function: one evaluator and one Taylor rule.
pub struct ElementaryFn {
    pub name: &'static str,
    pub eval: fn(Complex64) -> Option<Complex64>,
    pub taylor: taylor::TaylorRule,
}

pub static REGISTRY: &[ElementaryFn] = &[
    ElementaryFn {
        name: "sin",
        eval: |z| Some(z.sin()),
        taylor: taylor::sin_rule,
    },
    ElementaryFn {
        name: "cos",
        eval: |z| Some(z.cos()),
        taylor: taylor::cos_rule,
    },
    ElementaryFn {
        name: "exp",
        eval: |z| Some(z.exp()),
        taylor: taylor::exp_rule,
    },
    ElementaryFn {
        name: "ln",
        eval: |z| (z != Complex64::new(0.0, 0.0)).then(|| z.ln()),
        taylor: taylor::ln_rule,
    },
];

pub fn lookup_function(name: &str) -> Option<usize> {
    REGISTRY.iter().position(|f| f.name == name)
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(Scalar),
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    /// Registry index and argument.
    Call(usize, Box<Expr>),
}

impl Expr {
    /// Whether this node can be singular somewhere (division or ln).
    pub fn may_be_singular(&self) -> bool {
        match self {
            Expr::Div(..) => true,
            Expr::Call(f, _) => REGISTRY[*f].name == "ln",
            _ => false,
        }
    }

    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Num(_) => true,
            Expr::Var(_) => false,
            Expr::Neg(a) | Expr::Call(_, a) => a.is_constant(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
                a.is_constant() && b.is_constant()
            }
        }
    }

    /// Exact value of a constant subexpression built from rational
    /// arithmetic, if it has one.
    pub fn exact_constant(&self) -> Option<Scalar> {
        Some(match self {
            Expr::Num(v) => v.clone(),
            Expr::Neg(a) => -a.exact_constant()?,
            Expr::Add(a, b) => a.exact_constant()? + b.exact_constant()?,
            Expr::Sub(a, b) => a.exact_constant()? - b.exact_constant()?,
            Expr::Mul(a, b) => a.exact_constant()? * b.exact_constant()?,
            Expr::Div(a, b) => a.exact_constant()?.checked_div(&b.exact_constant()?)?,
            Expr::Pow(a, b) => {
                let e = b.exact_constant()?;
                let n = integer_value(&e)?;
                a.exact_constant()?.powi(i32::try_from(n).ok()?)?
            }
            Expr::Var(_) | Expr::Call(..) => return None,
        })
    }

    pub fn max_var(&self) -> Option<usize> {
        match self {
            Expr::Num(_) => None,
            Expr::Var(i) => Some(*i),
            Expr::Neg(a) | Expr::Call(_, a) => a.max_var(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
                a.max_var().max(b.max_var())
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            Expr::Num(v) => {
                let s = v.to_string();
                if s.contains(' ') {
                    0
                } else if s.starts_with('-') {
                    3
                } else {
                    5
                }
            }
            _ => 5,
        }
    }

    /// Infix rendering over the given variable names.
    pub fn render(&self, names: &[String]) -> String {
        let wrap = |e: &Expr, min: u8| {
            let s = e.render(names);
            if e.precedence() < min {
                format!("({s})")
            } else {
                s
            }
        };
        match self {
            Expr::Num(v) => {
                let s = v.to_string();
                if s.contains('/') {
                    format!("({s})")
                } else {
                    s
                }
            }
            Expr::Var(i) => names.get(*i).cloned().unwrap_or_else(|| format!("x{}", i + 1)),
            Expr::Neg(a) => format!("-{}", wrap(a, 3)),
            Expr::Add(a, b) => format!("{} + {}", wrap(a, 1), wrap(b, 2)),
            Expr::Sub(a, b) => format!("{} - {}", wrap(a, 1), wrap(b, 2)),
            Expr::Mul(a, b) => format!("{}*{}", wrap(a, 2), wrap(b, 3)),
            Expr::Div(a, b) => format!("{}/{}", wrap(a, 2), wrap(b, 3)),
            Expr::Pow(a, b) => format!("{}^{}", wrap(a, 5), wrap(b, 4)),
            Expr::Call(f, a) => format!("{}({})", REGISTRY[*f].name, a.render(names)),
        }
    }
}

fn integer_value(v: &Scalar) -> Option<i64> {
    let r = v.as_rational()?;
    if r.is_integer() {
        num_traits::ToPrimitive::to_i64(&r.to_integer())
    } else {
        None
    }
}

/// A parsed expression together with its variable names.
#[derive(Clone, Debug, PartialEq)]
pub struct Expression {
    root: Expr,
    vars: Vec<String>,
}

impl Expression {
    pub fn new(root: Expr, vars: Vec<String>) -> Self {
        Expression { root, vars }
    }

    pub fn root(&self) -> &Expr {
        &self.root
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    fn node_text(&self, e: &Expr) -> String {
        e.render(&self.vars)
    }

    pub fn eval(&self, point: &[Complex64]) -> Result<Complex64, ExprError> {
        if point.len() != self.vars.len() {
            return Err(ExprError::Dimension {
                expected: self.vars.len(),
                got: point.len(),
            });
        }
        self.eval_node(&self.root, point)
    }

    fn eval_node(&self, e: &Expr, x: &[Complex64]) -> Result<Complex64, ExprError> {
        let domain = |reason: &str| ExprError::Domain {
            node: self.node_text(e),
            reason: reason.to_string(),
        };
        Ok(match e {
            Expr::Num(v) => v.to_c64(),
            Expr::Var(i) => x[*i],
            Expr::Neg(a) => -self.eval_node(a, x)?,
            Expr::Add(a, b) => self.eval_node(a, x)? + self.eval_node(b, x)?,
            Expr::Sub(a, b) => self.eval_node(a, x)? - self.eval_node(b, x)?,
            Expr::Mul(a, b) => self.eval_node(a, x)? * self.eval_node(b, x)?,
            Expr::Div(a, b) => {
                let d = self.eval_node(b, x)?;
                if d == Complex64::new(0.0, 0.0) {
                    return Err(domain("division by zero"));
                }
                self.eval_node(a, x)? / d
            }
            Expr::Pow(a, b) => {
                let base = self.eval_node(a, x)?;
                if let Some(n) = b.exact_constant().as_ref().and_then(integer_value) {
                    if n < 0 && base == Complex64::new(0.0, 0.0) {
                        return Err(domain("zero raised to a negative power"));
                    }
                    return Ok(base.powi(n as i32));
                }
                let positive_const = a
                    .exact_constant()
                    .map(|c| c.to_c64())
                    .or_else(|| a.is_constant().then_some(base))
                    .is_some_and(|c| c.im == 0.0 && c.re > 0.0);
                if !matches!(**a, Expr::Var(_)) && !positive_const {
                    return Err(domain("non-integer exponent needs a variable or positive constant base"));
                }
                if base == Complex64::new(0.0, 0.0) {
                    return Err(domain("zero base with non-integer exponent"));
                }
                (self.eval_node(b, x)? * base.ln()).exp()
            }
            Expr::Call(f, a) => {
                let v = self.eval_node(a, x)?;
                (REGISTRY[*f].eval)(v).ok_or_else(|| domain(&format!("{} is singular here", REGISTRY[*f].name)))?
            }
        })
    }

    pub fn taylor(&self, degree: u32) -> Result<TruncatedSeries, ExprError> {
        taylor(self, degree)
    }

    /// Rewrites a univariate expression as a finite sum `Σ c x^r (ln x)^p`.
    pub fn to_log_monomials(&self) -> Result<LogMonomialSum, ExprError> {
        if self.vars.len() != 1 {
            return Err(ExprError::Dimension {
                expected: 1,
                got: self.vars.len(),
            });
        }
        self.log_node(&self.root)
    }

    fn log_node(&self, e: &Expr) -> Result<LogMonomialSum, ExprError> {
        let outside = || ExprError::NotLogMonomial { node: self.node_text(e) };
        if let Some(c) = e.exact_constant() {
            return Ok(LogMonomialSum::constant(c));
        }
        Ok(match e {
            Expr::Num(v) => LogMonomialSum::constant(v.clone()),
            Expr::Var(_) => LogMonomialSum::monomial(Scalar::one(), 0, Scalar::one()),
            Expr::Neg(a) => self.log_node(a)?.scale(&-Scalar::one()),
            Expr::Add(a, b) => self.log_node(a)?.add(&self.log_node(b)?),
            Expr::Sub(a, b) => self.log_node(a)?.sub(&self.log_node(b)?),
            Expr::Mul(a, b) => self.log_node(a)?.mul(&self.log_node(b)?),
            Expr::Div(a, b) => {
                let den = self.log_node(b)?;
                match den.terms() {
                    [t] if t.log_power == 0 => {
                        let inv = t.coeff.recip().ok_or_else(outside)?;
                        self.log_node(a)?.mul_monomial(&-&t.exponent, 0).scale(&inv)
                    }
                    _ => return Err(outside()),
                }
            }
            Expr::Pow(a, b) => {
                let ex = b.exact_constant().or_else(|| {
                    b.is_constant()
                        .then(|| self.eval_node(b, &[Complex64::new(1.0, 0.0)]).ok().map(Scalar::from_c64))
                        .flatten()
                });
                let ex = ex.ok_or_else(outside)?;
                if let Some(n) = integer_value(&ex).filter(|n| *n >= 0) {
                    let base = self.log_node(a)?;
                    let mut acc = LogMonomialSum::constant(Scalar::one());
                    for _ in 0..n {
                        acc = acc.mul(&base);
                    }
                    acc
                } else if matches!(**a, Expr::Var(_)) {
                    LogMonomialSum::monomial(ex, 0, Scalar::one())
                } else {
                    return Err(outside());
                }
            }
            Expr::Call(f, a) if REGISTRY[*f].name == "ln" => {
                // ln(c x^r) = ln c + r ln x
                let arg = self.log_node(a)?;
                match arg.terms() {
                    [t] if t.log_power == 0 => {
                        let c = t.coeff.to_c64();
                        if c.im != 0.0 || c.re <= 0.0 {
                            return Err(outside());
                        }
                        LogMonomialSum::monomial(Scalar::zero(), 1, t.exponent.clone())
                            .add(&LogMonomialSum::constant(t.coeff.ln()))
                    }
                    _ => return Err(outside()),
                }
            }
            Expr::Call(..) => return Err(outside()),
        })
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.root.render(&self.vars))
    }
}

impl Evaluable for Expression {
    fn nvars(&self) -> usize {
        self.vars.len()
    }

    fn eval(&self, x: &[Complex64]) -> Result<Complex64, EvalError> {
        Expression::eval(self, x).map_err(|e| EvalError(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vars(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn eval_examples() {
        let e = parse("sin(x*y)", &vars(&["x", "y"])).unwrap();
        assert_eq!(e.eval(&[c(0.0), c(5.0)]).unwrap(), c(0.0));
        let e = parse("x^2 + 3*x + 2", &vars(&["x"])).unwrap();
        assert_eq!(e.eval(&[c(1.0)]).unwrap(), c(6.0));
        let e = parse("ln(x+y)", &vars(&["x", "y"])).unwrap();
        assert!((e.eval(&[c(1.0), c(1.0)]).unwrap().re - std::f64::consts::LN_2).abs() < 1e-16);
    }

    #[test]
    fn domain_errors_name_the_node() {
        let e = parse("1/(x-1) + 2", &vars(&["x"])).unwrap();
        match e.eval(&[c(1.0)]) {
            Err(ExprError::Domain { node, .. }) => assert_eq!(node, "1/(x - 1)"),
            other => panic!("{other:?}"),
        }
        let e = parse("ln(x)", &vars(&["x"])).unwrap();
        assert!(matches!(e.eval(&[c(0.0)]), Err(ExprError::Domain { .. })));
    }

    #[test]
    fn real_powers() {
        let e = parse("x^0.5", &vars(&["x"])).unwrap();
        assert!((e.eval(&[c(4.0)]).unwrap().re - 2.0).abs() < 1e-15);
        let e = parse("(x+1)^0.5", &vars(&["x"])).unwrap();
        assert!(matches!(e.eval(&[c(3.0)]), Err(ExprError::Domain { .. })));
        let e = parse("2^x", &vars(&["x"])).unwrap();
        assert!((e.eval(&[c(3.0)]).unwrap().re - 8.0).abs() < 1e-14);
    }

    #[test]
    fn log_monomial_conversion() {
        let e = parse("ln(x)", &vars(&["x"])).unwrap();
        assert_eq!(e.to_log_monomials().unwrap(), LogMonomialSum::ln_x());
        let e = parse("x^2*ln(x)^2 - 3/x + x^(1/2)", &vars(&["x"])).unwrap();
        let s = e.to_log_monomials().unwrap();
        assert_eq!(s.terms().len(), 3);
        let e = parse("sin(x)", &vars(&["x"])).unwrap();
        assert!(e.to_log_monomials().is_err());
    }
}
