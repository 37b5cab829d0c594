//! Residual oracle: apply the Euler operator to a candidate solution and
//! measure the distance to the right-hand side, independently of how the
//! candidate was produced.

use std::collections::HashMap;

use num_complex::Complex64;
use serde::Serialize;

use crate::evaluable::{EvalError, Evaluable};
use crate::exec;
use crate::index::MultiIndex;
use crate::logmono::{apply_lphi, LogMonomialSum};
use crate::ponder::PonderationPoly;
use crate::scalar::Scalar;
use crate::series::{residual, EulerOperator, TruncatedSeries};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Series,
    Logmono,
    Quadrature,
    External,
}

impl std::fmt::Display for Route {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Route::Series => "series",
            Route::Logmono => "logmono",
            Route::Quadrature => "quadrature",
            Route::External => "external",
        })
    }
}

/// Where a residual was measured.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleSite {
    /// A coefficient of a series residual.
    Lattice(MultiIndex),
    /// A log-monomial `x^exponent ln^log_power x` of an exact residual.
    Term { exponent: Scalar, log_power: u32 },
    Point(Vec<Scalar>),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Sample {
    pub at: SampleSite,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualReport {
    pub route: Route,
    /// Nonzero residual components for the algebraic checks, every included
    /// point for pointwise checks.
    pub samples: Vec<Sample>,
    /// Maximum over `samples`, 0 when empty.
    pub max: f64,
    /// `Some(true)` when the residual is exactly zero in rational arithmetic.
    pub exact: Option<bool>,
    pub excluded: Vec<Vec<Scalar>>,
    pub warnings: Vec<String>,
}

impl ResidualReport {
    fn from_samples(route: Route, samples: Vec<Sample>, exact: Option<bool>) -> Self {
        let max = samples.iter().map(|s| s.residual).fold(0.0, f64::max);
        ResidualReport {
            route,
            samples,
            max,
            exact,
            excluded: Vec::new(),
            warnings: Vec::new(),
        }
    }

    pub fn passes(&self, tol: f64) -> bool {
        match self.exact {
            Some(e) => e,
            None => self.max <= tol && !self.samples.is_empty(),
        }
    }
}

/// Coefficientwise `Σ a_i x^i ∂^i candidate - g`.
pub fn residual_series(op: &EulerOperator, candidate: &TruncatedSeries, g: &TruncatedSeries) -> ResidualReport {
    let trunc = candidate.trunc().min(g.trunc());
    let diff = crate::series::euler_apply(op, &candidate.truncate(trunc)).sub(&g.truncate(trunc));
    let summary = residual(op, candidate, g);
    let samples = diff
        .terms()
        .filter(|(_, c)| !c.is_zero())
        .map(|(gamma, c)| Sample {
            at: SampleSite::Lattice(gamma.clone()),
            residual: c.abs(),
        })
        .collect();
    let exact = diff.is_exact().then_some(summary.exact_zero);
    let mut report = ResidualReport::from_samples(Route::Series, samples, exact);
    if exact.is_none() {
        report.max = report.max.max(summary.max_abs);
    }
    report
}

/// Exact residual of a univariate log-monomial candidate, applying the operator
/// term by term through `x^i ∂^i x^r = (r)_i x^r` and its `ln` derivatives.
pub fn residual_logmono(op: &EulerOperator, candidate: &LogMonomialSum, g: &LogMonomialSum) -> Result<ResidualReport, String> {
    let phi = PonderationPoly::from_euler_operator(op)
        .to_univariate()
        .map_err(|e| e.to_string())?;
    let diff = apply_lphi(&phi, candidate).sub(g);
    let exact = diff.is_exact();
    let samples = diff
        .terms()
        .iter()
        .filter(|t| !t.coeff.is_zero())
        .map(|t| Sample {
            at: SampleSite::Term {
                exponent: t.exponent.clone(),
                log_power: t.log_power,
            },
            residual: t.coeff.abs(),
        })
        .collect::<Vec<_>>();
    let zero = samples.is_empty();
    Ok(ResidualReport::from_samples(Route::Logmono, samples, exact.then_some(zero)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiffMethod {
    /// Finite differences up to order 4 per variable, contour integrals beyond
    /// (univariate only).
    Auto,
    FiniteDifference,
    Contour,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiffOptions {
    /// Base step relative to `max(|x_i|, 0.1)`.
    pub rel_step: f64,
    /// Richardson levels (steps `h, h/2, …`).
    pub levels: usize,
    pub method: DiffMethod,
    /// Contour radius relative to `|x|`, and node count.
    pub contour_radius: f64,
    pub contour_nodes: usize,
}

impl Default for DiffOptions {
    fn default() -> Self {
        DiffOptions {
            rel_step: 0.05,
            levels: 3,
            method: DiffMethod::Auto,
            contour_radius: 0.5,
            contour_nodes: 64,
        }
    }
}

/// Fornberg weights for the `k`-th derivative on the nodes `-m..=m` (unit spacing).
pub fn central_weights(k: usize, m: usize) -> Vec<f64> {
    let nodes: Vec<f64> = (-(m as i64)..=m as i64).map(|j| j as f64).collect();
    let n = nodes.len();
    // c[j][d]: weight of node j for derivative d
    let mut c = vec![vec![0.0; k + 1]; n];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let x0 = 0.0;
    let mut c4 = nodes[0] - x0;
    for i in 1..n {
        let mn = i.min(k);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - x0;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for d in (1..=mn).rev() {
                    c[i][d] = c1 * (d as f64 * c[i - 1][d - 1] - c5 * c[i - 1][d]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for d in (1..=mn).rev() {
                c[j][d] = (c4 * c[j][d] - d as f64 * c[j][d - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.iter().map(|row| row[k]).collect()
}

/// Half-width of the sixth-order central stencil for the `k`-th derivative.
pub fn stencil_half_width(k: usize) -> usize {
    if k == 0 {
        0
    } else {
        (k + 1) / 2 + 2
    }
}

fn steps(x: &[Complex64], rel: f64) -> Vec<f64> {
    x.iter().map(|v| rel * v.norm().max(0.1)).collect()
}

/// Sixth-order product-stencil estimate of `∂^α f(x)` with steps `h`, evaluating
/// through `cache` keyed by integer offsets.
fn stencil_estimate<F>(f: &F, x: &[Complex64], alpha: &MultiIndex, h: &[f64], cache: &mut HashMap<Vec<i64>, Result<Complex64, EvalError>>) -> Result<Complex64, EvalError>
where
    F: Evaluable + ?Sized,
{
    let n = x.len();
    let weights: Vec<Vec<f64>> = alpha
        .iter()
        .map(|&k| central_weights(k as usize, stencil_half_width(k as usize)))
        .collect();
    let half: Vec<i64> = alpha.iter().map(|&k| stencil_half_width(k as usize) as i64).collect();
    let mut offset: Vec<i64> = half.iter().map(|m| -m).collect();
    let mut acc = Complex64::new(0.0, 0.0);
    loop {
        let w: f64 = (0..n).map(|j| weights[j][(offset[j] + half[j]) as usize]).product();
        if w != 0.0 {
            let value = cache
                .entry(offset.clone())
                .or_insert_with(|| {
                    let p: Vec<Complex64> = (0..n).map(|j| x[j] + offset[j] as f64 * h[j]).collect();
                    f.eval(&p).and_then(|v| {
                        if v.is_finite() {
                            Ok(v)
                        } else {
                            Err(EvalError("non-finite value".into()))
                        }
                    })
                })
                .clone()?;
            acc += w * value;
        }
        // odometer over the tensor stencil
        let mut j = 0;
        loop {
            if j == n {
                let scale: f64 = (0..n).map(|j| h[j].powi(alpha.0[j] as i32)).product();
                return Ok(acc / scale);
            }
            if offset[j] < half[j] {
                offset[j] += 1;
                break;
            }
            offset[j] = -half[j];
            j += 1;
        }
    }
}

/// `∂^α f(x)` estimated with the unextrapolated sixth-order stencil at step `h·max(|x_i|, 0.1)`.
pub fn central_difference<F: Evaluable + ?Sized>(f: &F, x: &[Complex64], alpha: &MultiIndex, rel_step: f64) -> Result<Complex64, EvalError> {
    stencil_estimate(f, x, alpha, &steps(x, rel_step), &mut HashMap::new())
}

/// Richardson table on steps halving each level; the error expands in `h^6, h^8, …`.
fn richardson(values: &[Complex64]) -> Complex64 {
    let mut row = values.to_vec();
    let mut power = 6;
    while row.len() > 1 {
        let f = 2f64.powi(power);
        row = row.windows(2).map(|w| (f * w[1] - w[0]) / (f - 1.0)).collect();
        power += 2;
    }
    row[0]
}

/// `∂^k f(x)` for univariate `f` by the trapezoidal rule on `|z - x| = ρ`.
pub fn contour_derivative<F: Evaluable + ?Sized>(f: &F, x: Complex64, k: u32, radius: f64, nodes: usize) -> Result<Complex64, EvalError> {
    let mut acc = Complex64::new(0.0, 0.0);
    for l in 0..nodes {
        let theta = 2.0 * std::f64::consts::PI * l as f64 / nodes as f64;
        let w = Complex64::from_polar(1.0, theta);
        let v = f.eval(&[x + radius * w])?;
        if !v.is_finite() {
            return Err(EvalError("non-finite value on the contour".into()));
        }
        acc += v * w.powi(-(k as i32));
    }
    let fact: f64 = (1..=k).map(f64::from).product();
    Ok(acc * fact / (nodes as f64 * radius.powi(k as i32)))
}

fn operator_at<C: Evaluable + ?Sized>(op: &EulerOperator, candidate: &C, x: &[Complex64], opts: &DiffOptions) -> Result<Complex64, EvalError> {
    let n = x.len();
    let max_order = op.terms().flat_map(|(a, _)| a.iter().copied().collect::<Vec<_>>()).max().unwrap_or(0);
    let contour = match opts.method {
        DiffMethod::Contour => true,
        DiffMethod::FiniteDifference => false,
        DiffMethod::Auto => max_order > 4 && n == 1,
    };
    let h0 = steps(x, opts.rel_step);
    let mut caches: Vec<HashMap<Vec<i64>, Result<Complex64, EvalError>>> = vec![HashMap::new(); opts.levels.max(1)];
    let mut total = Complex64::new(0.0, 0.0);
    for (alpha, a) in op.terms() {
        let d = if alpha.total() == 0 {
            candidate.eval(x)?
        } else if contour {
            if n != 1 {
                return Err(EvalError("contour differentiation is univariate".into()));
            }
            contour_derivative(candidate, x[0], alpha.0[0], opts.contour_radius * x[0].norm().max(0.1), opts.contour_nodes)?
        } else {
            let mut values = Vec::with_capacity(caches.len());
            for (level, cache) in caches.iter_mut().enumerate() {
                let h: Vec<f64> = h0.iter().map(|v| v / 2f64.powi(level as i32)).collect();
                values.push(stencil_estimate(candidate, x, alpha, &h, cache)?);
            }
            richardson(&values)
        };
        let xa: Complex64 = x.iter().zip(alpha.iter()).map(|(v, &k)| v.powi(k as i32)).product();
        total += a.to_c64() * xa * d;
    }
    Ok(total)
}

/// `|Σ a_i x^i ∂^i candidate(x) - g(x)|` at each point, derivatives by
/// Richardson-extrapolated finite differences (or contour integrals for
/// high-order univariate operators).
pub fn residual_pointwise<C, G>(op: &EulerOperator, candidate: &C, g: &G, points: &[Vec<Complex64>], route: Route, opts: DiffOptions) -> ResidualReport
where
    C: Evaluable + ?Sized,
    G: Evaluable + ?Sized,
{
    let results = exec::map(points, |x| -> Result<f64, EvalError> {
        let lhs = operator_at(op, candidate, x, &opts)?;
        let rhs = g.eval(x)?;
        let r = (lhs - rhs).norm();
        if r.is_finite() {
            Ok(r)
        } else {
            Err(EvalError("non-finite residual".into()))
        }
    });
    let mut samples = Vec::new();
    let mut excluded = Vec::new();
    let mut warnings = Vec::new();
    for (x, r) in points.iter().zip(results) {
        let site: Vec<Scalar> = x.iter().map(|v| Scalar::from_c64(*v)).collect();
        match r {
            Ok(r) => samples.push(Sample {
                at: SampleSite::Point(site),
                residual: r,
            }),
            Err(e) => {
                warnings.push(format!("excluded point {}: {}", fmt_point(x), e.0));
                excluded.push(site);
            }
        }
    }
    let mut report = ResidualReport::from_samples(route, samples, None);
    report.excluded = excluded;
    report.warnings = warnings;
    report
}

fn fmt_point(x: &[Complex64]) -> String {
    let parts: Vec<String> = x
        .iter()
        .map(|v| if v.im == 0.0 { format!("{}", v.re) } else { format!("{}", Scalar::from_c64(*v)) })
        .collect();
    format!("({})", parts.join(", "))
}

/// 8 points log-uniform in `[0.3, 3]`, coordinate `i` of point `j` at grid
/// position `(j + i·3) mod 8` so that points do not lie on the diagonal.
pub fn default_points(nvars: usize) -> Vec<Vec<Complex64>> {
    let grid: Vec<f64> = (0..8).map(|j| 0.3 * 10f64.powf(j as f64 / 7.0)).collect();
    (0..8)
        .map(|j| (0..nvars).map(|i| Complex64::new(grid[(j + 3 * i) % 8], 0.0)).collect())
        .collect()
}
