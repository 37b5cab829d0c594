//! Divergence-form solving: when `φ(k) = Π_j (A_j·k + r_j)`, the equation
//! `L_φ f = g` has the particular solution
//!
//! ```text
//! f(x) = ∫_{[0,1]^p} Π_j t_j^{r_j - 1} g(Π_j t_j^{a_{1,j}} x_1, …, Π_j t_j^{a_{n,j}} x_n) dt
//! ```
//!
//! evaluated here by tensor Gauss–Jacobi quadrature.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde::Serialize;
use thiserror::Error;

use crate::evaluable::{EvalError, Evaluable};
use crate::exec;
use crate::index::MultiIndex;
use crate::poly::SparsePoly;
use crate::ponder::PonderationPoly;
use crate::scalar::Scalar;

pub const DEFAULT_NODES: usize = 64;
pub const DEFAULT_MAX_FACTORS: usize = 6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DivergenceError {
    #[error("factor {factor}: {detail}")]
    NotPositive { factor: usize, detail: String },
    #[error("factors do not reproduce phi (relative error {error:e})")]
    Reconstruction { error: f64 },
    #[error("{p} factors exceed the limit of {max}")]
    TooManyFactors { p: usize, max: usize },
    #[error("factor {factor} has {got} coefficients, expected {expected}")]
    Dimension { factor: usize, expected: usize, got: usize },
    #[error("invalid quadrature parameters: {0}")]
    Quadrature(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// `A·k + r`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LinearFactor {
    pub a: Vec<Scalar>,
    pub r: Scalar,
}

impl LinearFactor {
    pub fn new(a: Vec<Scalar>, r: Scalar) -> Self {
        LinearFactor { a, r }
    }

    pub fn as_poly(&self) -> SparsePoly {
        let n = self.a.len();
        let mut p = SparsePoly::constant(n, self.r.clone());
        for (i, c) in self.a.iter().enumerate() {
            p.add_term(MultiIndex::unit(n, i), c.clone());
        }
        p
    }
}

/// `φ(k) = Π_j (A_j·k + r_j)` with `Re a_{i,j} > 0` or `a_{i,j} = 0`, and `Re r_j > 0`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DivergenceForm {
    nvars: usize,
    factors: Vec<LinearFactor>,
}

fn is_zero_like(v: &Scalar) -> bool {
    if v.is_exact() {
        v.is_zero()
    } else {
        v.abs() <= 1e-14
    }
}

impl DivergenceForm {
    pub fn new(factors: Vec<LinearFactor>) -> Result<Self, DivergenceError> {
        let nvars = factors.first().map_or(0, |f| f.a.len());
        for (j, f) in factors.iter().enumerate() {
            if f.a.len() != nvars {
                return Err(DivergenceError::Dimension {
                    factor: j,
                    expected: nvars,
                    got: f.a.len(),
                });
            }
            for (i, a) in f.a.iter().enumerate() {
                if !is_zero_like(a) && a.re_f64() <= 0.0 {
                    return Err(DivergenceError::NotPositive {
                        factor: j,
                        detail: format!("coefficient a_{} = {a} needs a positive real part or must vanish", i + 1),
                    });
                }
            }
            if f.r.re_f64() <= 0.0 {
                return Err(DivergenceError::NotPositive {
                    factor: j,
                    detail: format!("constant r = {} needs a positive real part", f.r),
                });
            }
        }
        Ok(DivergenceForm { nvars, factors })
    }

    /// Like [`DivergenceForm::new`], additionally checking that the product
    /// reproduces `phi` to `1e-10` relative, coefficientwise.
    pub fn for_phi(factors: Vec<LinearFactor>, phi: &PonderationPoly) -> Result<Self, DivergenceError> {
        let d = DivergenceForm::new(factors)?;
        let expanded = d.expand();
        let scale = phi.poly().max_abs_coeff().max(1e-300);
        let diff = expanded.poly().sub(phi.poly());
        let error = if diff.is_exact() && diff.is_zero() { 0.0 } else { diff.max_abs_coeff() / scale };
        if error > 1e-10 {
            return Err(DivergenceError::Reconstruction { error });
        }
        Ok(d)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn factors(&self) -> &[LinearFactor] {
        &self.factors
    }

    pub fn expand(&self) -> PonderationPoly {
        let mut p = SparsePoly::constant(self.nvars, Scalar::one());
        for f in &self.factors {
            p = p.mul(&f.as_poly());
        }
        PonderationPoly::new(p)
    }
}

/// Gauss–Jacobi rule on `[0,1]` for the weight `t^β`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    pub beta: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    /// `m`-point rule: Golub–Welsch on the shifted Jacobi recurrence, then a
    /// Newton polish of each node with Christoffel weights.
    pub fn gauss_jacobi(m: usize, beta: f64) -> Result<Self, DivergenceError> {
        if m == 0 || beta <= -1.0 || !beta.is_finite() {
            return Err(DivergenceError::Quadrature(format!("m={m}, beta={beta}")));
        }
        // monic Jacobi recurrence (α = 0) on [-1, 1], mapped by t = (1 + x)/2
        let a = |k: usize| -> f64 {
            if k == 0 {
                beta / (beta + 2.0)
            } else {
                let s = 2.0 * k as f64 + beta;
                beta * beta / (s * (s + 2.0))
            }
        };
        let b = |k: usize| -> f64 {
            let kf = k as f64;
            let s = 2.0 * kf + beta;
            4.0 * kf * kf * (kf + beta) * (kf + beta) / (s * s * (s + 1.0) * (s - 1.0))
        };
        let diag: Vec<f64> = (0..=m).map(|k| (1.0 + a(k)) / 2.0).collect();
        let off: Vec<f64> = (0..=m).map(|k| if k == 0 { 0.0 } else { b(k).sqrt() / 2.0 }).collect();
        let mu0 = 1.0 / (beta + 1.0);

        let mut jm = DMatrix::<f64>::zeros(m, m);
        for k in 0..m {
            jm[(k, k)] = diag[k];
            if k + 1 < m {
                jm[(k, k + 1)] = off[k + 1];
                jm[(k + 1, k)] = off[k + 1];
            }
        }
        let eig = SymmetricEigen::new(jm);
        let mut pairs: Vec<(f64, f64)> = (0..m)
            .map(|i| (eig.eigenvalues[i], mu0 * eig.eigenvectors[(0, i)].powi(2)))
            .collect();
        pairs.sort_by(|x, y| x.0.total_cmp(&y.0));

        // orthonormal p_0..p_m and p_m' at t
        let eval = |t: f64| -> (f64, f64, f64) {
            let mut p_prev = 0.0;
            let mut p = 1.0 / mu0.sqrt();
            let mut d_prev = 0.0;
            let mut d = 0.0;
            let mut sumsq = p * p;
            for k in 0..m {
                let pn = ((t - diag[k]) * p - off[k] * p_prev) / off[k + 1];
                let dn = ((t - diag[k]) * d + p - off[k] * d_prev) / off[k + 1];
                p_prev = p;
                p = pn;
                d_prev = d;
                d = dn;
                if k + 1 < m {
                    sumsq += p * p;
                }
            }
            (p, d, sumsq)
        };
        let mut nodes = Vec::with_capacity(m);
        let mut weights = Vec::with_capacity(m);
        for (t0, w0) in pairs {
            let mut t = t0;
            for _ in 0..3 {
                let (p, d, _) = eval(t);
                if d == 0.0 || !d.is_finite() {
                    break;
                }
                let step = p / d;
                if !step.is_finite() || step.abs() > 1e-6 {
                    break;
                }
                t -= step;
            }
            let (_, _, sumsq) = eval(t);
            let w = 1.0 / sumsq;
            // keep the eigenvector weight if the polish misbehaved
            let w = if w.is_finite() && (w - w0).abs() <= 1e-6 * w0.max(1e-300) + 1e-300 { w } else { w0 };
            nodes.push(t);
            weights.push(w);
        }
        Ok(QuadratureRule { beta, nodes, weights })
    }

    /// The rule for `∫_0^1 t^{r-1} h(t) dt` after substituting `t = u^κ`,
    /// i.e. `κ ∫_0^1 u^{κr-1} h(u^κ) du`. Grading `κ > 1` recovers fast
    /// convergence when `h` has a logarithmic singularity at `t = 0`.
    pub fn graded(m: usize, r: f64, kappa: u32) -> Result<Self, DivergenceError> {
        let k = kappa.max(1) as f64;
        let base = QuadratureRule::gauss_jacobi(m, k * r - 1.0)?;
        Ok(QuadratureRule {
            beta: r - 1.0,
            nodes: base.nodes.iter().map(|u| u.powf(k)).collect(),
            weights: base.weights.iter().map(|w| w * k).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `∫_0^1 t^β f(t) dt` by the rule.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(t, w)| w * f(*t)).sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureOptions {
    pub nodes: usize,
    pub max_factors: usize,
    /// Substitution `t = u^grading` applied per factor; 1 means plain Gauss–Jacobi.
    pub grading: u32,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        QuadratureOptions {
            nodes: DEFAULT_NODES,
            max_factors: DEFAULT_MAX_FACTORS,
            grading: 1,
        }
    }
}

/// Per-factor tables: `scale[l][i] = t_l^{a_{i,j}}`, `weight[l] = w_l · t_l^{i·Im r_j}`.
#[derive(Clone, Debug)]
struct FactorGrid {
    scale: Vec<Vec<Complex64>>,
    weight: Vec<Complex64>,
}

/// The quadrature solution as a function of the point.
#[derive(Clone, Debug)]
pub struct ProductSolution<G> {
    form: DivergenceForm,
    g: G,
    grids: Vec<FactorGrid>,
    options: QuadratureOptions,
}

impl<G: Evaluable> ProductSolution<G> {
    pub fn form(&self) -> &DivergenceForm {
        &self.form
    }

    pub fn options(&self) -> QuadratureOptions {
        self.options
    }

    pub fn rhs(&self) -> &G {
        &self.g
    }

    fn accumulate(&self, depth: usize, scale: &[Complex64], weight: Complex64, x: &[Complex64]) -> Result<Complex64, EvalError> {
        if depth == self.grids.len() {
            let point: Vec<Complex64> = x.iter().zip(scale).map(|(a, b)| a * b).collect();
            return Ok(weight * self.g.eval(&point)?);
        }
        let grid = &self.grids[depth];
        let mut acc = Complex64::new(0.0, 0.0);
        let mut next = vec![Complex64::new(0.0, 0.0); scale.len()];
        for (s, w) in grid.scale.iter().zip(&grid.weight) {
            for ((n, a), b) in next.iter_mut().zip(scale).zip(s) {
                *n = a * b;
            }
            acc += self.accumulate(depth + 1, &next, weight * w, x)?;
        }
        Ok(acc)
    }
}

impl<G: Evaluable> Evaluable for ProductSolution<G> {
    fn nvars(&self) -> usize {
        self.form.nvars
    }

    /// Lexicographic sum over the tensor grid. The outermost factor's nodes
    /// may be processed in parallel; partial sums are then added in order.
    fn eval(&self, x: &[Complex64]) -> Result<Complex64, EvalError> {
        if x.len() != self.form.nvars {
            return Err(EvalError(format!("expected {} coordinates, got {}", self.form.nvars, x.len())));
        }
        if self.grids.is_empty() {
            return self.g.eval(x);
        }
        let outer = &self.grids[0];
        let partial = exec::map_range(outer.weight.len(), |l| {
            self.accumulate(1, &outer.scale[l], outer.weight[l], x)
        });
        let mut acc = Complex64::new(0.0, 0.0);
        for p in partial {
            acc += p?;
        }
        Ok(acc)
    }
}

/// Rational exponents `a_i = p/q` make `t^{a_i}` non-analytic at 0; grading by
/// a multiple of every `q` turns them back into integer powers of `u`.
fn factor_grading(f: &LinearFactor, kappa: u32) -> u32 {
    let mut k = kappa.max(1) as u64;
    for a in &f.a {
        let Some(q) = a.as_rational().and_then(|r| r.denom().to_u64()) else {
            continue;
        };
        let l = k / num_integer::gcd(k, q) * q;
        if l > 24 {
            return kappa.max(1);
        }
        k = l;
    }
    k as u32
}

fn build_grids(form: &DivergenceForm, opts: QuadratureOptions) -> Result<Vec<FactorGrid>, DivergenceError> {
    form.factors
        .iter()
        .map(|f| {
            let r = f.r.to_c64();
            let rule = QuadratureRule::graded(opts.nodes, r.re, factor_grading(f, opts.grading))?;
            let scale = rule
                .nodes
                .iter()
                .map(|&t| {
                    let lt = t.ln();
                    f.a.iter()
                        .map(|a| {
                            if is_zero_like(a) {
                                Complex64::new(1.0, 0.0)
                            } else {
                                (a.to_c64() * lt).exp()
                            }
                        })
                        .collect()
                })
                .collect();
            let weight = rule
                .nodes
                .iter()
                .zip(&rule.weights)
                .map(|(&t, &w)| {
                    if r.im == 0.0 {
                        Complex64::new(w, 0.0)
                    } else {
                        w * Complex64::new(0.0, r.im * t.ln()).exp()
                    }
                })
                .collect();
            Ok(FactorGrid { scale, weight })
        })
        .collect()
}

/// The product-form solution `f` of `L_φ f = g` for `φ` in divergence form.
pub fn solve_product_form<G: Evaluable>(
    form: &DivergenceForm,
    g: G,
    opts: QuadratureOptions,
) -> Result<ProductSolution<G>, DivergenceError> {
    if form.factors.len() > opts.max_factors {
        return Err(DivergenceError::TooManyFactors {
            p: form.factors.len(),
            max: opts.max_factors,
        });
    }
    if g.nvars() != form.nvars {
        return Err(DivergenceError::Dimension {
            factor: 0,
            expected: form.nvars,
            got: g.nvars(),
        });
    }
    let grids = build_grids(form, opts)?;
    Ok(ProductSolution {
        form: form.clone(),
        g,
        grids,
        options: opts,
    })
}

/// `f(x) = ∫_0^1 t^{c_0 - 1} g(t^{c_1} x_1, …, t^{c_n} x_n) dt`, the solution of
/// `Div(f·D·X) + (c_0 - Tr D) f = g` with `D = diag(c)`.
pub fn solve_first_order<G: Evaluable>(
    c: &[f64],
    c0: f64,
    g: G,
    opts: QuadratureOptions,
) -> Result<ProductSolution<G>, DivergenceError> {
    if let Some(i) = c.iter().position(|v| !(*v > 0.0)) {
        return Err(DivergenceError::NotPositive {
            factor: 0,
            detail: format!("c_{} = {} must be positive", i + 1, c[i]),
        });
    }
    if !(c0 > 0.0) {
        return Err(DivergenceError::NotPositive {
            factor: 0,
            detail: format!("c_0 = {c0} must be positive"),
        });
    }
    let factor = LinearFactor::new(c.iter().map(|v| scalar_from_f64(*v)).collect(), scalar_from_f64(c0));
    solve_product_form(&DivergenceForm::new(vec![factor])?, g, opts)
}

/// Integers stay exact so that the expanded φ is exact too.
fn scalar_from_f64(v: f64) -> Scalar {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        Scalar::from_i64(v as i64)
    } else {
        Scalar::from_f64(v)
    }
}

/// Why a quadratic φ could not be put in divergence form.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum Decline {
    NotQuadratic { degree: u32 },
    /// `B^2 - 4AC < 0` for `φ = A k1^2 + B k1 k2 + C k2^2 + …`.
    Elliptic { discriminant: f64 },
    ParabolicConditionUnmet,
    HyperbolicConditionUnmet,
    Positivity { factors: Vec<LinearFactor>, detail: String },
}

impl std::fmt::Display for Decline {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Decline::NotQuadratic { degree } => write!(f, "not quadratic (total degree {degree})"),
            Decline::Elliptic { discriminant } => write!(f, "elliptic (B^2 - 4AC = {discriminant}): never decomposable"),
            Decline::ParabolicConditionUnmet => f.write_str("parabolic, but the divergence condition fails"),
            Decline::HyperbolicConditionUnmet => f.write_str("hyperbolic, but the factorization condition fails"),
            Decline::Positivity { detail, .. } => write!(f, "factors exist but violate positivity: {detail}"),
        }
    }
}

struct Quadratic {
    a: Scalar,
    b: Scalar,
    c: Scalar,
    d: Scalar,
    e: Scalar,
    f: Scalar,
}

impl Quadratic {
    fn of(phi: &PonderationPoly) -> Self {
        let p = phi.poly();
        let at = |i: u32, j: u32| p.coeff(&MultiIndex::from([i, j]));
        Quadratic {
            a: at(2, 0),
            b: at(1, 1),
            c: at(0, 2),
            d: at(1, 0),
            e: at(0, 1),
            f: at(0, 0),
        }
    }

    fn swapped(&self) -> Self {
        Quadratic {
            a: self.c.clone(),
            b: self.b.clone(),
            c: self.a.clone(),
            d: self.e.clone(),
            e: self.d.clone(),
            f: self.f.clone(),
        }
    }

    fn is_real(&self) -> bool {
        [&self.a, &self.b, &self.c, &self.d, &self.e, &self.f]
            .iter()
            .all(|v| v.to_c64().im == 0.0)
    }
}

fn close(a: &Scalar, b: &Scalar) -> bool {
    a.approx_eq(b, 1e-9)
}

fn int(v: i64) -> Scalar {
    Scalar::from_i64(v)
}

/// Relative mismatch of `(BD - 2AE)^2 = (B^2 - 4AC)(D^2 - 4AF)`, the factorization
/// condition in `φ = A k1^2 + B k1 k2 + C k2^2 + D k1 + E k2 + F`; with
/// `a = A, 2b = B, c = C, d - a = D, e - c = E, r = F` this is the classical
/// `(b(d-a) - a(e-c))^2 = (b^2 - ac)((d-a)^2 - 4ar)` up to a factor 4.
pub fn hyperbolic_condition_mismatch(phi: &PonderationPoly) -> f64 {
    let q = Quadratic::of(phi);
    let lhs = (&q.b * &q.d - &(&int(2) * &(&q.a * &q.e))).powu(2);
    let rhs = (&q.b * &q.b - &(&int(4) * &(&q.a * &q.c))) * (&q.d * &q.d - &(&int(4) * &(&q.a * &q.f)));
    if lhs.is_exact() && rhs.is_exact() && lhs == rhs {
        return 0.0;
    }
    (&lhs - &rhs).abs() / 1f64.max(lhs.abs()).max(rhs.abs())
}

/// Factor a two-variable quadratic φ into two linear factors by coefficient
/// matching, checking the divergence-form positivity conditions.
pub fn decompose_quadratic_2var(phi: &PonderationPoly) -> Result<DivergenceForm, Decline> {
    let degree = phi.degree();
    if phi.nvars() != 2 || degree != 2 {
        return Err(Decline::NotQuadratic { degree });
    }
    let q = Quadratic::of(phi);
    let disc = &q.b * &q.b - &(&int(4) * &(&q.a * &q.c));
    if q.is_real() && disc.re_f64() < 0.0 {
        return Err(Decline::Elliptic { discriminant: disc.re_f64() });
    }
    let factors = if !is_zero_like(&q.a) {
        factor_in_first(&q)?
    } else if !is_zero_like(&q.c) {
        factor_in_first(&q.swapped())?
            .into_iter()
            .map(|f| LinearFactor::new(vec![f.a[1].clone(), f.a[0].clone()], f.r))
            .collect()
    } else {
        // B k1 k2 + D k1 + E k2 + F = (B k1 + E)(k2 + D/B) iff F B = D E
        if !close(&(&q.f * &q.b), &(&q.d * &q.e)) {
            return Err(Decline::HyperbolicConditionUnmet);
        }
        vec![
            LinearFactor::new(vec![q.b.clone(), Scalar::zero()], q.e.clone()),
            LinearFactor::new(vec![Scalar::zero(), Scalar::one()], &q.d / &q.b),
        ]
    };
    let factors = normalize_signs(factors);
    match DivergenceForm::for_phi(factors.clone(), phi) {
        Ok(d) => Ok(d),
        Err(DivergenceError::NotPositive { detail, .. }) => Err(Decline::Positivity { factors, detail }),
        Err(_) => Err(Decline::HyperbolicConditionUnmet),
    }
}

/// `A ≠ 0`: as a quadratic in `k1` the discriminant
/// `Δ(k2) = (B²-4AC)k2² + (2BD-4AE)k2 + (D²-4AF)` must be a square `(p k2 + q)²`.
fn factor_in_first(q: &Quadratic) -> Result<Vec<LinearFactor>, Decline> {
    let four = int(4);
    let two = int(2);
    let p2 = &q.b * &q.b - &(&four * &(&q.a * &q.c));
    let q2 = &q.d * &q.d - &(&four * &(&q.a * &q.f));
    let cross = &q.b * &q.d - &(&two * &(&q.a * &q.e));
    let (p, qq) = if is_zero_like(&p2) {
        if !close(&cross, &Scalar::zero()) {
            return Err(Decline::ParabolicConditionUnmet);
        }
        (Scalar::zero(), q2.sqrt())
    } else {
        let p = p2.sqrt();
        let qq = &cross / &p;
        if !close(&(&qq * &qq), &q2) {
            return Err(Decline::HyperbolicConditionUnmet);
        }
        (p, qq)
    };
    let two_a = &two * &q.a;
    // φ = (A k1 + (B-p)/2 k2 + (D-q)/2)(k1 + (B+p)/(2A) k2 + (D+q)/(2A))
    let f1 = LinearFactor::new(vec![q.a.clone(), &(&q.b - &p) / &two], &(&q.d - &qq) / &two);
    let f2 = LinearFactor::new(
        vec![Scalar::one(), &(&q.b + &p) / &two_a],
        &(&q.d + &qq) / &two_a,
    );
    Ok(vec![f1, f2])
}

/// Flips the sign of a pair of factors whose nonzero coefficients are all
/// negative, which leaves the product unchanged.
fn normalize_signs(mut factors: Vec<LinearFactor>) -> Vec<LinearFactor> {
    let negative = |f: &LinearFactor| {
        f.a.iter()
            .chain(std::iter::once(&f.r))
            .filter(|v| !is_zero_like(v))
            .all(|v| v.re_f64() < 0.0)
    };
    if factors.len() == 2 && negative(&factors[0]) && negative(&factors[1]) {
        for f in &mut factors {
            f.a = f.a.iter().map(|v| -v).collect();
            f.r = -&f.r;
        }
    }
    factors
}

/// `ψ(k) = Σ k_i² + c Σ k_i + n`.
pub fn sturm_liouville_nd_build(c: &Scalar, n: usize) -> PonderationPoly {
    let mut p = SparsePoly::constant(n, Scalar::from_i64(n as i64));
    for i in 0..n {
        let mut sq = MultiIndex::zero(n);
        sq.0[i] = 2;
        p.add_term(sq, Scalar::one());
        p.add_term(MultiIndex::unit(n, i), c.clone());
    }
    PonderationPoly::new(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluable::FnEval;

    fn phi2(terms: &[([u32; 2], i64)]) -> PonderationPoly {
        PonderationPoly::new(SparsePoly::from_terms(
            2,
            terms.iter().map(|(k, c)| (MultiIndex::from(*k), Scalar::from_i64(*c))),
        ))
    }

    #[test]
    fn rule_moments() {
        for beta in [0.0, 0.5, 1.0, 3.0, -0.4] {
            let rule = QuadratureRule::gauss_jacobi(64, beta).unwrap();
            let total: f64 = rule.weights.iter().sum();
            assert!((total * (beta + 1.0) - 1.0).abs() < 1e-13, "beta {beta}: {total}");
            for m in [1, 17, 64, 127] {
                let got = rule.integrate(|t| t.powi(m));
                let want = 1.0 / (beta + 1.0 + m as f64);
                assert!(((got - want) / want).abs() < 1e-13, "beta {beta} m {m}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn sum_of_variables_factors() {
        let phi = phi2(&[([2, 0], 1), ([0, 2], 1), ([1, 1], 2), ([1, 0], 3), ([0, 1], 3), ([0, 0], 2)]);
        let d = decompose_quadratic_2var(&phi).unwrap();
        assert_eq!(d.expand(), phi);
        let rs: Vec<Scalar> = d.factors().iter().map(|f| f.r.clone()).collect();
        assert!(rs.contains(&Scalar::one()) && rs.contains(&Scalar::from_i64(2)));
        assert_eq!(hyperbolic_condition_mismatch(&phi), 0.0);
    }

    #[test]
    fn hyperbolic_example() {
        let phi = phi2(&[([2, 0], 2), ([1, 1], 6), ([0, 2], 2), ([1, 0], 4), ([0, 1], 6), ([0, 0], 2)]);
        let d = decompose_quadratic_2var(&phi).unwrap();
        let s5 = 5f64.sqrt();
        let f = d.factors();
        assert!((f[0].a[1].re_f64() - (3.0 - s5)).abs() < 1e-14);
        assert!((f[1].a[1].re_f64() - (3.0 + s5) / 2.0).abs() < 1e-14);
        assert_eq!(f[0].r, Scalar::from_i64(2));
        assert_eq!(f[1].r, Scalar::one());
        assert!(hyperbolic_condition_mismatch(&phi) < 1e-9);
    }

    #[test]
    fn elliptic_declines() {
        let phi = phi2(&[([2, 0], 1), ([0, 2], 2), ([1, 1], 2), ([0, 0], 2)]);
        assert!(matches!(decompose_quadratic_2var(&phi), Err(Decline::Elliptic { .. })));
    }

    #[test]
    fn mixed_only_and_swapped_cases() {
        // (k1 + k2 + 2)(k2 + 1) has A = 0
        let phi = phi2(&[([1, 1], 1), ([0, 2], 1), ([1, 0], 1), ([0, 1], 3), ([0, 0], 2)]);
        let d = decompose_quadratic_2var(&phi).unwrap();
        assert_eq!(d.expand(), phi);
        // (k1 + 1)(k2 + 2): A = C = 0
        let phi = phi2(&[([1, 1], 1), ([1, 0], 2), ([0, 1], 1), ([0, 0], 2)]);
        let d = decompose_quadratic_2var(&phi).unwrap();
        assert_eq!(d.expand(), phi);
    }

    #[test]
    fn positivity_is_enforced() {
        // (k1 - k2 + 1)(k1 + 1)
        let phi = phi2(&[([2, 0], 1), ([1, 1], -1), ([1, 0], 2), ([0, 1], -1), ([0, 0], 1)]);
        assert!(matches!(decompose_quadratic_2var(&phi), Err(Decline::Positivity { .. })));
    }

    #[test]
    fn constant_rhs_first_order() {
        let one = FnEval::new(3, |_: &[Complex64]| Complex64::new(1.0, 0.0));
        let f = solve_first_order(&[1.0, 1.0, 1.0], 3.0, one, QuadratureOptions::default()).unwrap();
        let v = f.eval(&[Complex64::new(0.7, 0.0); 3]).unwrap();
        assert!((v.re - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn sturm_liouville_polys() {
        let p = sturm_liouville_nd_build(&Scalar::from_i64(2), 1);
        assert_eq!(p, PonderationPoly::univariate(&[1, 2, 1].map(Scalar::from_i64)));
        let p = sturm_liouville_nd_build(&Scalar::from_i64(3), 2);
        assert_eq!(p, phi2(&[([2, 0], 1), ([0, 2], 1), ([1, 0], 3), ([0, 1], 3), ([0, 0], 2)]));
    }
}
