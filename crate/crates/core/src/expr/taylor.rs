//! Maclaurin expansion by truncated-series arithmetic over the AST.
//!
//! Series are held as homogeneous components `u_0, …, u_N`. Elementary
//! functions are composed with recurrences driven by the Euler operator
//! `θ = Σ x_i ∂_i`, which scales a degree-`d` component by `d`; e.g. for
//! `h = exp(u)`, `θh = h·θu` gives `d·h_d = Σ_k k·u_k·h_{d-k}`.

use super::{Expr, ExprError, Expression, REGISTRY};
use crate::index::MultiIndex;
use crate::poly::SparsePoly;
use crate::scalar::Scalar;
use crate::series::TruncatedSeries;

/// Homogeneous components of a truncated series; `parts[d]` has degree `d`.
#[derive(Clone, Debug)]
pub struct Homogeneous {
    nvars: usize,
    parts: Vec<SparsePoly>,
}

pub type TaylorRule = fn(&Homogeneous) -> Result<Homogeneous, String>;

impl Homogeneous {
    fn zero(nvars: usize, n: u32) -> Self {
        Homogeneous {
            nvars,
            parts: vec![SparsePoly::zero(nvars); n as usize + 1],
        }
    }

    fn constant(nvars: usize, n: u32, c: Scalar) -> Self {
        let mut h = Homogeneous::zero(nvars, n);
        h.parts[0] = SparsePoly::constant(nvars, c);
        h
    }

    fn var(nvars: usize, n: u32, i: usize) -> Self {
        let mut h = Homogeneous::zero(nvars, n);
        if n >= 1 {
            h.parts[1] = SparsePoly::from_terms(nvars, [(MultiIndex::unit(nvars, i), Scalar::one())]);
        }
        h
    }

    fn degree(&self) -> usize {
        self.parts.len() - 1
    }

    fn value_at_origin(&self) -> Scalar {
        self.parts[0].coeff(&MultiIndex::zero(self.nvars))
    }

    fn map(&self, f: impl Fn(&SparsePoly) -> SparsePoly) -> Homogeneous {
        Homogeneous {
            nvars: self.nvars,
            parts: self.parts.iter().map(f).collect(),
        }
    }

    fn zip(&self, other: &Homogeneous, f: impl Fn(&SparsePoly, &SparsePoly) -> SparsePoly) -> Homogeneous {
        Homogeneous {
            nvars: self.nvars,
            parts: self.parts.iter().zip(&other.parts).map(|(a, b)| f(a, b)).collect(),
        }
    }

    fn scale(&self, c: &Scalar) -> Homogeneous {
        self.map(|p| p.scale(c))
    }

    fn mul(&self, other: &Homogeneous) -> Homogeneous {
        let n = self.degree();
        let mut out = Homogeneous::zero(self.nvars, n as u32);
        for a in 0..=n {
            if self.parts[a].is_zero() {
                continue;
            }
            for b in 0..=n - a {
                if !other.parts[b].is_zero() {
                    out.parts[a + b] = out.parts[a + b].add(&self.parts[a].mul(&other.parts[b]));
                }
            }
        }
        out
    }

    /// The same series with its constant term removed.
    fn tail(&self) -> Homogeneous {
        let mut t = self.clone();
        t.parts[0] = SparsePoly::zero(self.nvars);
        t
    }

    /// `1/u`, requires `u_0 != 0`.
    fn recip(&self) -> Option<Homogeneous> {
        let inv0 = self.value_at_origin().recip()?;
        let n = self.degree();
        let mut w = Homogeneous::zero(self.nvars, n as u32);
        w.parts[0] = SparsePoly::constant(self.nvars, inv0.clone());
        for d in 1..=n {
            let mut acc = SparsePoly::zero(self.nvars);
            for k in 1..=d {
                if !self.parts[k].is_zero() {
                    acc = acc.add(&self.parts[k].mul(&w.parts[d - k]));
                }
            }
            w.parts[d] = acc.scale(&-&inv0);
        }
        Some(w)
    }

    fn powu(&self, e: u32) -> Homogeneous {
        let mut acc = Homogeneous::constant(self.nvars, self.degree() as u32, Scalar::one());
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    fn into_series(self, n: u32) -> TruncatedSeries {
        let nv = self.nvars;
        let terms = self.parts.into_iter().flat_map(|p| p.into_terms());
        TruncatedSeries::from_terms(nv, n, terms)
    }
}

fn d_scalar(d: usize) -> Scalar {
    Scalar::from_i64(d as i64)
}

/// `exp(ũ)` for a series without constant term.
fn exp_tail(u: &Homogeneous) -> Homogeneous {
    let n = u.degree();
    let mut h = Homogeneous::constant(u.nvars, n as u32, Scalar::one());
    for d in 1..=n {
        let mut acc = SparsePoly::zero(u.nvars);
        for k in 1..=d {
            if !u.parts[k].is_zero() {
                acc = acc.add(&u.parts[k].mul(&h.parts[d - k]).scale(&d_scalar(k)));
            }
        }
        h.parts[d] = acc.scale(&d_scalar(d).recip().expect("d >= 1"));
    }
    h
}

/// `(sin ũ, cos ũ)` for a series without constant term.
fn sin_cos_tail(u: &Homogeneous) -> (Homogeneous, Homogeneous) {
    let n = u.degree();
    let mut s = Homogeneous::zero(u.nvars, n as u32);
    let mut c = Homogeneous::constant(u.nvars, n as u32, Scalar::one());
    for d in 1..=n {
        let mut sa = SparsePoly::zero(u.nvars);
        let mut ca = SparsePoly::zero(u.nvars);
        for k in 1..=d {
            if u.parts[k].is_zero() {
                continue;
            }
            let ku = u.parts[k].scale(&d_scalar(k));
            sa = sa.add(&ku.mul(&c.parts[d - k]));
            ca = ca.sub(&ku.mul(&s.parts[d - k]));
        }
        let inv = d_scalar(d).recip().expect("d >= 1");
        s.parts[d] = sa.scale(&inv);
        c.parts[d] = ca.scale(&inv);
    }
    (s, c)
}

pub fn exp_rule(u: &Homogeneous) -> Result<Homogeneous, String> {
    Ok(exp_tail(&u.tail()).scale(&u.value_at_origin().exp()))
}

pub fn sin_rule(u: &Homogeneous) -> Result<Homogeneous, String> {
    let u0 = u.value_at_origin();
    let (s, c) = sin_cos_tail(&u.tail());
    // sin(u0 + ũ) = sin u0 cos ũ + cos u0 sin ũ
    Ok(c.scale(&u0.sin()).zip(&s.scale(&u0.cos()), SparsePoly::add))
}

pub fn cos_rule(u: &Homogeneous) -> Result<Homogeneous, String> {
    let u0 = u.value_at_origin();
    let (s, c) = sin_cos_tail(&u.tail());
    // cos(u0 + ũ) = cos u0 cos ũ - sin u0 sin ũ
    Ok(c.scale(&u0.cos()).zip(&s.scale(&u0.sin()), SparsePoly::sub))
}

pub fn ln_rule(u: &Homogeneous) -> Result<Homogeneous, String> {
    let u0 = u.value_at_origin();
    let inv0 = u0.recip().ok_or_else(|| "argument vanishes at the origin".to_string())?;
    let n = u.degree();
    // θL = θu / u  ⇒  d·u_0·L_d = d·u_d - Σ_{k=1}^{d-1} k·L_k·u_{d-k}
    let mut l = Homogeneous::zero(u.nvars, n as u32);
    l.parts[0] = SparsePoly::constant(u.nvars, u0.ln());
    for d in 1..=n {
        let mut acc = u.parts[d].scale(&d_scalar(d));
        for k in 1..d {
            if !l.parts[k].is_zero() && !u.parts[d - k].is_zero() {
                acc = acc.sub(&l.parts[k].mul(&u.parts[d - k]).scale(&d_scalar(k)));
            }
        }
        l.parts[d] = acc.scale(&(&inv0 * &d_scalar(d).recip().expect("d >= 1")));
    }
    Ok(l)
}

/// Maclaurin coefficients of `e` through total degree `degree`.
pub fn taylor(e: &Expression, degree: u32) -> Result<TruncatedSeries, ExprError> {
    Ok(expand(e, e.root(), degree)?.into_series(degree))
}

fn expand(ctx: &Expression, e: &Expr, n: u32) -> Result<Homogeneous, ExprError> {
    let nv = ctx.nvars();
    let not_analytic = |reason: &str| ExprError::NotAnalytic {
        node: ctx.node_text(e),
        reason: reason.to_string(),
    };
    Ok(match e {
        Expr::Num(v) => Homogeneous::constant(nv, n, v.clone()),
        Expr::Var(i) => Homogeneous::var(nv, n, *i),
        Expr::Neg(a) => expand(ctx, a, n)?.scale(&-Scalar::one()),
        Expr::Add(a, b) => expand(ctx, a, n)?.zip(&expand(ctx, b, n)?, SparsePoly::add),
        Expr::Sub(a, b) => expand(ctx, a, n)?.zip(&expand(ctx, b, n)?, SparsePoly::sub),
        Expr::Mul(a, b) => expand(ctx, a, n)?.mul(&expand(ctx, b, n)?),
        Expr::Div(a, b) => {
            let den = expand(ctx, b, n)?
                .recip()
                .ok_or_else(|| not_analytic("denominator vanishes at the origin"))?;
            expand(ctx, a, n)?.mul(&den)
        }
        Expr::Pow(a, b) => {
            let ex = b
                .exact_constant()
                .and_then(|v| super::integer_value(&v))
                .ok_or_else(|| not_analytic("only integer exponents are expanded"))?;
            let base = expand(ctx, a, n)?;
            let base = if ex < 0 {
                base.recip()
                    .ok_or_else(|| not_analytic("negative power of a series vanishing at the origin"))?
            } else {
                base
            };
            base.powu(ex.unsigned_abs() as u32)
        }
        Expr::Call(f, a) => {
            let u = expand(ctx, a, n)?;
            (REGISTRY[*f].taylor)(&u).map_err(|r| not_analytic(&r))?
        }
    })
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;

    fn v(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    fn q(n: i64, d: i64) -> Scalar {
        Scalar::from_ratio(n, d)
    }

    #[test]
    fn sine_of_sum() {
        let e = parse("sin(x+y)", &v(&["x", "y"])).unwrap();
        let s = taylor(&e, 3).unwrap();
        let want = TruncatedSeries::from_terms(
            2,
            3,
            [
                ([1, 0], q(1, 1)),
                ([0, 1], q(1, 1)),
                ([3, 0], q(-1, 6)),
                ([2, 1], q(-1, 2)),
                ([1, 2], q(-1, 2)),
                ([0, 3], q(-1, 6)),
            ]
            .map(|(k, c)| (MultiIndex::from(k), c)),
        );
        assert_eq!(s, want);
    }

    #[test]
    fn exp_and_geometric() {
        let e = parse("exp(x)", &v(&["x"])).unwrap();
        let s = taylor(&e, 2).unwrap();
        assert_eq!(s.coeff(&MultiIndex::from([2])), q(1, 2));
        let e = parse("1/(x+y+1)", &v(&["x", "y"])).unwrap();
        let s = taylor(&e, 2).unwrap();
        assert_eq!(s.coeff(&MultiIndex::from([1, 0])), q(-1, 1));
        assert_eq!(s.coeff(&MultiIndex::from([1, 1])), q(2, 1));
        assert_eq!(s.coeff(&MultiIndex::from([0, 2])), q(1, 1));
    }

    #[test]
    fn log_of_shifted_argument() {
        // ln(1+x) = x - x^2/2 + x^3/3
        let e = parse("ln(1+x)", &v(&["x"])).unwrap();
        let s = taylor(&e, 3).unwrap();
        assert_eq!(s.coeff(&MultiIndex::from([3])), q(1, 3));
        assert!(s.is_exact());
        let e = parse("ln(x)", &v(&["x"])).unwrap();
        assert!(matches!(taylor(&e, 3), Err(ExprError::NotAnalytic { .. })));
        let e = parse("1/x", &v(&["x"])).unwrap();
        assert!(matches!(taylor(&e, 3), Err(ExprError::NotAnalytic { .. })));
    }

    #[test]
    fn shifted_trig_uses_addition_formula() {
        // cos(1 + x) at small x matches direct evaluation
        let e = parse("cos(1 + x)", &v(&["x"])).unwrap();
        let s = taylor(&e, 12).unwrap();
        let x = num_complex::Complex64::new(0.1, 0.0);
        assert!((s.eval_c64(&[x]) - (1.1f64).cos()).norm() < 1e-14);
    }
}
