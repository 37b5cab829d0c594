//! Functions of a point, the common currency of the quadrature and
//! pointwise-verification routes.

use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

use crate::logmono::LogMonomialSum;
use crate::series::TruncatedSeries;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("{0}")]
pub struct EvalError(pub String);

pub trait Evaluable: Send + Sync {
    fn nvars(&self) -> usize;
    fn eval(&self, x: &[Complex64]) -> Result<Complex64, EvalError>;
}

impl<T: Evaluable + ?Sized> Evaluable for Arc<T> {
    fn nvars(&self) -> usize {
        (**self).nvars()
    }

    fn eval(&self, x: &[Complex64]) -> Result<Complex64, EvalError> {
        (**self).eval(x)
    }
}

impl<T: Evaluable + ?Sized> Evaluable for &T {
    fn nvars(&self) -> usize {
        (**self).nvars()
    }

    fn eval(&self, x: &[Complex64]) -> Result<Complex64, EvalError> {
        (**self).eval(x)
    }
}

/// Wraps a closure as an [`Evaluable`].
pub struct FnEval<F> {
    nvars: usize,
    f: F,
}

impl<F> FnEval<F>
where
    F: Fn(&[Complex64]) -> Complex64 + Send + Sync,
{
    pub fn new(nvars: usize, f: F) -> Self {
        FnEval { nvars, f }
    }
}

impl<F> Evaluable for FnEval<F>
where
    F: Fn(&[Complex64]) -> Complex64 + Send + Sync,
{
    fn nvars(&self) -> usize {
        self.nvars
    }

    fn eval(&self, x: &[Complex64]) -> Result<Complex64, EvalError> {
        let v = (self.f)(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalError(format!("non-finite value at {x:?}")))
        }
    }
}

impl Evaluable for LogMonomialSum {
    fn nvars(&self) -> usize {
        1
    }

    fn eval(&self, x: &[Complex64]) -> Result<Complex64, EvalError> {
        if x[0] == Complex64::new(0.0, 0.0) && !self.is_zero() {
            return Err(EvalError("log-monomials are singular at x = 0".into()));
        }
        Ok(LogMonomialSum::eval(self, x[0]))
    }
}

impl Evaluable for TruncatedSeries {
    fn nvars(&self) -> usize {
        TruncatedSeries::nvars(self)
    }

    fn eval(&self, x: &[Complex64]) -> Result<Complex64, EvalError> {
        Ok(self.eval_c64(x))
    }
}
