//! Route selection and the solve / phi / partfrac / verify pipelines.

use std::sync::Arc;

use eulerring::divergence::{
    decompose_quadratic_2var, hyperbolic_condition_mismatch, solve_product_form, DivergenceForm, LinearFactor,
    QuadratureOptions, DEFAULT_NODES,
};
use eulerring::evaluable::Evaluable;
use eulerring::expr::parse;
use eulerring::logmono::{log_rhs_closed_form, solve_by_integrals, solve_lphi, LogError, LogMonomialSum};
use eulerring::ponder::{RootOptions, UniPoly};
use eulerring::series::{lphi_inverse, SeriesError, SeriesRecord};
use eulerring::verify::{default_points, residual_logmono, residual_pointwise, residual_series, DiffOptions, ResidualReport, Route};
use eulerring::{MultiIndex, Scalar, TruncatedSeries};
use num_complex::Complex64;
use serde::Deserialize;

use crate::report::*;
use crate::spec::{Problem, ReferenceFraction, Rhs, RouteChoice};
use crate::CliError;

pub const DEFAULT_TOLERANCE: f64 = 1e-6;
/// Numeric differentiation of a quadrature solution is less accurate than
/// of a closed form.
pub const QUADRATURE_TOLERANCE: f64 = 1e-5;
pub const CROSS_TOLERANCE: f64 = 1e-6;
pub const CROSS_TRUNCATION: u32 = 24;
/// Cap on the tensor-grid size used inside the quadrature residual.
const RESIDUAL_GRID_CAP: usize = 1 << 15;

/// Command-line overrides of the spec options.
#[derive(Clone, Debug, Default)]
pub struct Settings {
    pub route: Option<RouteChoice>,
    pub trunc: Option<u32>,
    pub nodes: Option<usize>,
    pub tol: Option<f64>,
    pub cross: bool,
}

fn input(msg: impl Into<String>) -> CliError {
    CliError::Input(msg.into())
}

fn c64_point(x: &[Complex64]) -> Vec<Scalar> {
    x.iter().map(|v| Scalar::from_c64(*v)).collect()
}

pub fn phi_section(p: &Problem) -> PhiSection {
    let k = p.phi.variable_names();
    PhiSection {
        degree: p.phi.degree(),
        standard: PolyOut::new(p.phi.poly(), &k),
        pochhammer: PolyOut::new(&p.phi.pochhammer(), &k),
        operator: p.op.display_with(&p.vars),
    }
}

fn compare_fractions(pf: &eulerring::PartialFractions, printed: &[ReferenceFraction]) -> FractionComparison {
    let mut entries = Vec::with_capacity(printed.len());
    let mut matched = std::collections::BTreeSet::new();
    for r in printed {
        let hit = pf.terms.iter().enumerate().find(|(_, t)| t.root.approx_eq(&r.root, 1e-9));
        let computed = hit.and_then(|(i, t)| {
            let c = t.coeffs.get((r.power as usize).checked_sub(1)?)?;
            matched.insert((i, r.power));
            Some(c.clone())
        });
        let agrees = computed.as_ref().is_some_and(|c| c.approx_eq(&r.coeff, 1e-12));
        entries.push(FractionCheck {
            root: r.root.clone(),
            power: r.power,
            printed: r.coeff.clone(),
            computed,
            agrees,
        });
    }
    let missing_from_printed = pf
        .terms
        .iter()
        .enumerate()
        .flat_map(|(i, t)| t.coeffs.iter().enumerate().map(move |(j, c)| (i, j as u32 + 1, c)))
        .filter(|(i, j, c)| !c.is_zero() && !matched.contains(&(*i, *j)))
        .count();
    let all_agree = entries.iter().all(|e| e.agrees) && missing_from_printed == 0;
    FractionComparison {
        entries,
        missing_from_printed,
        all_agree,
    }
}

pub fn univariate_section(p: &Problem) -> Result<UnivariateSection, String> {
    let phi = p.phi.to_univariate().map_err(|e| e.to_string())?;
    let roots = p.phi.roots(RootOptions::default()).map_err(|e| e.to_string())?;
    let pf = p.phi.partial_fractions(&roots).map_err(|e| e.to_string())?;
    let reconstruction_error = pf.reconstruction_error(&phi);
    let printed_comparison = p.reference_partial_fractions.as_deref().map(|r| compare_fractions(&pf, r));
    Ok(UnivariateSection {
        roots,
        partial_fractions: pf,
        reconstruction_error,
        printed_comparison,
    })
}

pub fn phi_report(p: &Problem) -> PhiReport {
    PhiReport {
        report_version: REPORT_VERSION,
        variables: p.vars.clone(),
        phi: phi_section(p),
    }
}

pub fn partfrac_report(p: &Problem) -> Result<PartfracReport, CliError> {
    if p.nvars() != 1 {
        return Err(input(format!("partfrac needs a univariate φ, got {} variables", p.nvars())));
    }
    Ok(PartfracReport {
        report_version: REPORT_VERSION,
        example_id: p.example_id.clone(),
        phi: phi_section(p),
        univariate: univariate_section(p).map_err(input)?,
    })
}

/// The right-hand side as a function of the point.
pub fn rhs_evaluable(p: &Problem) -> Arc<dyn Evaluable> {
    match &p.rhs {
        Rhs::Polynomial(poly) => {
            let deg = poly.total_degree().unwrap_or(0);
            Arc::new(TruncatedSeries::from_poly(poly.clone(), deg))
        }
        Rhs::Expression(e) => Arc::new(e.clone()),
        Rhs::LogMonomials(l) => Arc::new(l.clone()),
    }
}

fn rhs_series(p: &Problem, trunc: u32) -> Result<TruncatedSeries, String> {
    match &p.rhs {
        Rhs::Polynomial(poly) => Ok(TruncatedSeries::from_poly(poly.clone(), trunc)),
        Rhs::Expression(e) => e.taylor(trunc).map_err(|e| e.to_string()),
        Rhs::LogMonomials(l) => {
            let mut terms = Vec::new();
            for t in l.terms() {
                match t.exponent.as_natural() {
                    Some(k) if t.log_power == 0 => terms.push((MultiIndex::from([k as u32]), t.coeff.clone())),
                    _ => return Err(format!("{} is not a power series", l)),
                }
            }
            Ok(TruncatedSeries::from_terms(1, trunc, terms))
        }
    }
}

fn rhs_logmono(p: &Problem) -> Result<LogMonomialSum, String> {
    if p.nvars() != 1 {
        return Err("log-monomials are univariate".into());
    }
    match &p.rhs {
        Rhs::Polynomial(poly) => {
            let mut out = LogMonomialSum::zero();
            for (i, c) in poly.terms() {
                out.add_term(Scalar::from_i64(i.0[0] as i64), 0, c.clone());
            }
            Ok(out)
        }
        Rhs::Expression(e) => e.to_log_monomials().map_err(|e| e.to_string()),
        Rhs::LogMonomials(l) => Ok(l.clone()),
    }
}

fn default_truncation(p: &Problem) -> u32 {
    match &p.rhs {
        Rhs::Polynomial(poly) => poly.total_degree().unwrap_or(0),
        _ if p.nvars() <= 2 => eulerring::series::DEFAULT_TRUNCATION,
        _ => 16,
    }
}

/// A divergence form for φ, when one is given or can be derived, and the
/// record of how it was obtained.
pub fn divergence_form(p: &Problem) -> (Option<DivergenceForm>, Option<DecompositionSection>) {
    let section = |status, form: &Option<DivergenceForm>| DecompositionSection {
        status,
        form: form.clone(),
        decline: None,
        hyperbolic_condition_mismatch: None,
    };
    if let Some(f) = &p.explicit_form {
        let f = Some(f.clone());
        return (f.clone(), Some(section(DecompositionStatus::Explicit, &f)));
    }
    if let Some(f) = &p.supplied_form {
        let f = Some(f.clone());
        return (f.clone(), Some(section(DecompositionStatus::Supplied, &f)));
    }
    let n = p.nvars();
    let degree = p.phi.degree();
    if n == 2 && degree == 2 {
        let mismatch = Some(hyperbolic_condition_mismatch(&p.phi));
        return match decompose_quadratic_2var(&p.phi) {
            Ok(form) => {
                let f = Some(form);
                let mut s = section(DecompositionStatus::Decomposed, &f);
                s.hyperbolic_condition_mismatch = mismatch;
                (f, Some(s))
            }
            Err(d) => {
                let mut s = section(DecompositionStatus::Declined, &None);
                s.decline = Some(d);
                s.hyperbolic_condition_mismatch = mismatch;
                (None, Some(s))
            }
        };
    }
    let attempt = if degree == 1 {
        let poly = p.phi.poly();
        let a = (0..n).map(|i| poly.coeff(&MultiIndex::unit(n, i))).collect();
        Some((DecompositionStatus::Linear, vec![LinearFactor::new(a, poly.coeff(&MultiIndex::zero(n)))]))
    } else if n == 1 && degree >= 2 {
        p.phi.roots(RootOptions::default()).ok().map(|rs| {
            let mut factors = Vec::new();
            for r in &rs.roots {
                for _ in 0..r.multiplicity {
                    factors.push(LinearFactor::new(vec![Scalar::one()], -r.value.clone()));
                }
            }
            // absorb the leading coefficient into the first factor
            if let Some(f) = factors.first_mut() {
                *f = LinearFactor::new(vec![rs.lead.clone()], &rs.lead * &f.r);
            }
            (DecompositionStatus::FromRoots, factors)
        })
    } else {
        None
    };
    match attempt {
        None => (None, None),
        Some((status, factors)) => match DivergenceForm::for_phi(factors.clone(), &p.phi) {
            Ok(form) => {
                let f = Some(form);
                (f.clone(), Some(section(status, &f)))
            }
            Err(e) => {
                let mut s = section(DecompositionStatus::Declined, &None);
                s.decline = Some(eulerring::divergence::Decline::Positivity {
                    factors,
                    detail: e.to_string(),
                });
                (None, Some(s))
            }
        },
    }
}

fn resonance(e: SeriesError) -> CliError {
    match e {
        SeriesError::Resonance { .. } => CliError::Resonance(e.to_string()),
        other => input(other.to_string()),
    }
}

/// Picks the route for `auto` from the right-hand side and φ.
pub fn select_route(p: &Problem, trunc: u32, form: Option<&DivergenceForm>) -> Result<RouteChoice, CliError> {
    match &p.rhs {
        Rhs::LogMonomials(_) => return Ok(RouteChoice::Logmono),
        Rhs::Polynomial(_) => return Ok(RouteChoice::Series),
        Rhs::Expression(_) => {}
    }
    let series = rhs_series(p, trunc);
    if let Ok(g) = &series {
        match lphi_inverse(&p.phi, g) {
            Ok(_) => return Ok(RouteChoice::Series),
            Err(e) if form.is_none() && (p.nvars() != 1 || rhs_logmono(p).is_err()) => return Err(resonance(e)),
            Err(_) => {}
        }
    }
    if p.nvars() == 1 && rhs_logmono(p).is_ok() {
        return Ok(RouteChoice::Logmono);
    }
    if form.is_some() {
        return Ok(RouteChoice::Quadrature);
    }
    Err(input(format!(
        "no route applies: the right-hand side has no Taylor expansion ({}), is not a log-monomial sum, and φ has no divergence form",
        series.err().unwrap_or_default()
    )))
}

struct Outcome {
    route: Route,
    solution: SolutionPayload,
    residual: ResidualReport,
    pointwise: Option<ResidualReport>,
    /// The candidate as a function, for reference and cross comparisons.
    candidate: Arc<dyn Evaluable>,
    computed_text: String,
    tolerance: f64,
}

fn sample_points(p: &Problem) -> Vec<Vec<Complex64>> {
    p.sample_points.clone().unwrap_or_else(|| default_points(p.nvars()))
}

/// Points in `[0.05, 0.5]^n`, inside the convergence region of most series.
fn small_points(n: usize) -> Vec<Vec<Complex64>> {
    default_points(n)
        .into_iter()
        .map(|x| x.into_iter().map(|v| v / 6.0).collect())
        .collect()
}

fn solve_series(p: &Problem, s: &Settings, tol: Option<f64>) -> Result<Outcome, CliError> {
    let trunc = s.trunc.or(p.options.truncation).unwrap_or_else(|| default_truncation(p));
    let g = rhs_series(p, trunc).map_err(|e| input(format!("series route: {e}")))?;
    let inv = lphi_inverse(&p.phi, &g).map_err(resonance)?;
    let residual = residual_series(&p.op, &inv.series, &g);
    let mut residual = residual;
    residual.warnings.extend(inv.warnings.iter().map(|w| w.to_string()));
    let tolerance = tol.unwrap_or(DEFAULT_TOLERANCE);
    let pointwise = p.sample_points.as_ref().map(|pts| {
        let rhs = rhs_evaluable(p);
        residual_pointwise(&p.op, &inv.series, &rhs, pts, Route::Series, DiffOptions::default())
    });
    let display = (inv.series.poly().len() <= 16).then(|| inv.series.poly().display_with(&p.vars));
    let computed_text = display
        .clone()
        .unwrap_or_else(|| format!("series with {} terms up to total degree {trunc}", inv.series.poly().len()));
    Ok(Outcome {
        route: Route::Series,
        solution: SolutionPayload::Series {
            truncation: trunc,
            coefficients: inv.series.clone(),
            display,
        },
        residual,
        pointwise,
        candidate: Arc::new(inv.series),
        computed_text,
        tolerance,
    })
}

fn solve_log(p: &Problem, tol: Option<f64>) -> Result<Outcome, CliError> {
    let g = rhs_logmono(p).map_err(|e| input(format!("log-monomial route: {e}")))?;
    let phi: UniPoly = p.phi.to_univariate().map_err(|e| input(e.to_string()))?;
    let f = solve_lphi(&phi, &g).map_err(|e| match e {
        LogError::Resonant { .. } => CliError::Resonance(e.to_string()),
        other => input(other.to_string()),
    })?;
    let mut warnings = Vec::new();
    let (integral_route_agrees, closed_form_agrees) = match p.phi.roots(RootOptions::default()).and_then(|r| p.phi.partial_fractions(&r)) {
        Ok(pf) => {
            let via = solve_by_integrals(&pf, &g);
            let closed = (g == LogMonomialSum::ln_x()).then(|| log_rhs_closed_form(&pf).map(|c| c.approx_eq(&f, 1e-9)).unwrap_or(false));
            (via.approx_eq(&f, 1e-9), closed)
        }
        Err(e) => {
            warnings.push(format!("integral route skipped: {e}"));
            (false, None)
        }
    };
    let mut residual = residual_logmono(&p.op, &f, &g).map_err(input)?;
    residual.warnings.extend(warnings);
    let rhs = rhs_evaluable(p);
    let pointwise = residual_pointwise(&p.op, &f, &rhs, &sample_points(p), Route::Logmono, DiffOptions::default());
    let display = f.to_string();
    Ok(Outcome {
        route: Route::Logmono,
        solution: SolutionPayload::Logmono {
            terms: f.clone(),
            display: display.clone(),
            integral_route_agrees,
            closed_form_agrees,
        },
        residual,
        pointwise: Some(pointwise),
        candidate: Arc::new(f),
        computed_text: display,
        tolerance: tol.unwrap_or(DEFAULT_TOLERANCE),
    })
}

/// Endpoint grading: a right-hand side that is not analytic at the origin
/// (e.g. `ln(x+y+z)`) gets `t = u^3`.
fn auto_grading(p: &Problem) -> u32 {
    match &p.rhs {
        Rhs::Expression(e) if e.taylor(4).is_err() => 3,
        Rhs::LogMonomials(_) => 3,
        _ => 1,
    }
}

fn residual_node_count(nodes: usize, factors: usize) -> usize {
    let mut m = nodes;
    while m > 8 && m.checked_pow(factors as u32).is_none_or(|v| v > RESIDUAL_GRID_CAP) {
        m -= 1;
    }
    m
}

fn solve_quadrature(p: &Problem, s: &Settings, form: &DivergenceForm, tol: Option<f64>) -> Result<Outcome, CliError> {
    let nodes = s.nodes.or(p.options.nodes).unwrap_or(DEFAULT_NODES);
    let grading = p.options.grading.unwrap_or_else(|| auto_grading(p));
    let residual_nodes = p
        .options
        .residual_nodes
        .unwrap_or_else(|| residual_node_count(nodes, form.factors().len()));
    let g = rhs_evaluable(p);
    let opts = |m| QuadratureOptions {
        nodes: m,
        grading,
        ..QuadratureOptions::default()
    };
    let err = |e: eulerring::divergence::DivergenceError| input(format!("quadrature route: {e}"));
    let sol = Arc::new(solve_product_form(form, g.clone(), opts(nodes)).map_err(err)?);
    let coarse = solve_product_form(form, g.clone(), opts(residual_nodes)).map_err(err)?;
    let points = sample_points(p);
    let mut residual = residual_pointwise(&p.op, &coarse, &g, &points, Route::Quadrature, DiffOptions::default());
    residual
        .warnings
        .push(format!("residual uses {residual_nodes} nodes per factor ({} factors)", form.factors().len()));
    let reference = p.reference_solution.as_ref();
    let mut samples = Vec::with_capacity(points.len());
    for x in &points {
        match sol.eval(x) {
            Ok(v) => samples.push(PointValue {
                point: c64_point(x),
                value: Scalar::from_c64(v),
                reference: reference.and_then(|r| r.eval(x).ok()).map(Scalar::from_c64),
            }),
            Err(e) => residual.warnings.push(format!("solution not evaluable at {:?}: {e}", x)),
        }
    }
    let computed_text = samples
        .iter()
        .map(|s| {
            let pt: Vec<String> = s.point.iter().map(|v| format!("{}", v.re_f64())).collect();
            format!("f({}) = {}", pt.join(", "), s.value)
        })
        .collect::<Vec<_>>()
        .join("; ");
    Ok(Outcome {
        route: Route::Quadrature,
        solution: SolutionPayload::Quadrature {
            nodes,
            residual_nodes,
            grading,
            factors: form.factors().len(),
            samples,
        },
        residual,
        pointwise: None,
        candidate: sol,
        computed_text,
        tolerance: tol.unwrap_or(QUADRATURE_TOLERANCE),
    })
}

fn max_difference(a: &dyn Evaluable, b: &dyn Evaluable, points: &[Vec<Complex64>]) -> Option<f64> {
    let mut worst: Option<f64> = None;
    for x in points {
        if let (Ok(u), Ok(v)) = (a.eval(x), b.eval(x)) {
            let d = (u - v).norm();
            worst = Some(worst.map_or(d, |w| w.max(d)));
        }
    }
    worst
}

/// Series versus quadrature at points with `|x_i| <= 0.5`.
fn cross_check(p: &Problem, s: &Settings, form: Option<&DivergenceForm>, warnings: &mut Vec<String>) -> Option<CrossCheck> {
    let Some(form) = form else {
        warnings.push("cross-check skipped: φ has no divergence form".into());
        return None;
    };
    let trunc = s.trunc.or(p.options.truncation).unwrap_or(CROSS_TRUNCATION);
    let series = match rhs_series(p, trunc).map_err(|e| e.to_string()).and_then(|g| lphi_inverse(&p.phi, &g).map_err(|e| e.to_string())) {
        Ok(inv) => inv.series,
        Err(e) => {
            warnings.push(format!("cross-check skipped: no series solution ({e})"));
            return None;
        }
    };
    let opts = QuadratureOptions {
        nodes: s.nodes.or(p.options.nodes).unwrap_or(DEFAULT_NODES),
        grading: p.options.grading.unwrap_or_else(|| auto_grading(p)),
        ..QuadratureOptions::default()
    };
    let quad = match solve_product_form(form, rhs_evaluable(p), opts) {
        Ok(q) => q,
        Err(e) => {
            warnings.push(format!("cross-check skipped: {e}"));
            return None;
        }
    };
    let points = small_points(p.nvars());
    let max_difference = max_difference(&series, &quad, &points).unwrap_or(f64::INFINITY);
    Some(CrossCheck {
        routes: [Route::Series, Route::Quadrature],
        points: points.len(),
        max_difference,
        tolerance: CROSS_TOLERANCE,
        agree: max_difference <= CROSS_TOLERANCE,
    })
}

pub fn solve(p: &Problem, s: &Settings) -> Result<SolutionReport, CliError> {
    let tol = s.tol.or(p.options.tolerance);
    let (form, decomposition) = divergence_form(p);
    let mut warnings = Vec::new();
    let univariate = if p.nvars() == 1 && p.phi.degree() >= 1 {
        match univariate_section(p) {
            Ok(u) => Some(u),
            Err(e) => {
                warnings.push(format!("roots unavailable: {e}"));
                None
            }
        }
    } else {
        None
    };
    let choice = match s.route.or(p.options.route).unwrap_or_default() {
        RouteChoice::Auto => {
            let trunc = s.trunc.or(p.options.truncation).unwrap_or_else(|| default_truncation(p));
            select_route(p, trunc, form.as_ref())?
        }
        r => r,
    };
    let out = match choice {
        RouteChoice::Series => solve_series(p, s, tol)?,
        RouteChoice::Logmono => solve_log(p, tol)?,
        RouteChoice::Quadrature => {
            let f = form.as_ref().ok_or_else(|| {
                let why = decomposition
                    .as_ref()
                    .and_then(|d| d.decline.as_ref())
                    .map_or("no factorization is known".to_string(), |d| d.to_string());
                input(format!("quadrature route: φ is not in divergence form: {why}"))
            })?;
            solve_quadrature(p, s, f, tol)?
        }
        RouteChoice::Auto => unreachable!("resolved above"),
    };
    let cross = if s.cross { cross_check(p, s, form.as_ref(), &mut warnings) } else { None };

    let mut errata = Vec::new();
    let reference = p.reference_solution.as_ref().map(|r| {
        let rhs = rhs_evaluable(p);
        let points = sample_points(p);
        let residual = residual_pointwise(&p.op, r, &rhs, &points, Route::External, DiffOptions::default());
        let passes = residual.passes(out.tolerance.max(DEFAULT_TOLERANCE));
        let compare_at = if out.route == Route::Series && p.sample_points.is_none() { small_points(p.nvars()) } else { points };
        let max_difference = max_difference(out.candidate.as_ref(), r, &compare_at);
        if !passes {
            let id = p.example_id.clone();
            match id {
                Some(example_id) => errata.push(Erratum {
                    example_id,
                    printed: r.to_string(),
                    computed: out.computed_text.clone(),
                    note: format!(
                        "the printed solution fails the residual check (max residual {:.3e}); the computed solution passes it",
                        residual.max
                    ),
                }),
                None => warnings.push(format!("reference solution fails the residual check (max {:.3e})", residual.max)),
            }
        }
        ReferenceCheck {
            expression: r.to_string(),
            residual,
            passes,
            max_difference,
        }
    });

    let passed = out.residual.passes(out.tolerance)
        && out.pointwise.as_ref().is_none_or(|r| r.passes(out.tolerance))
        && cross.as_ref().is_none_or(|c| c.agree);
    Ok(SolutionReport {
        report_version: REPORT_VERSION,
        example_id: p.example_id.clone(),
        variables: p.vars.clone(),
        route: out.route,
        rhs: p.rhs.describe(&p.vars),
        phi: phi_section(p),
        univariate,
        decomposition,
        solution: out.solution,
        residual: out.residual,
        pointwise_residual: out.pointwise,
        cross_check: cross,
        reference,
        errata,
        warnings,
        tolerance: out.tolerance,
        passed,
    })
}

/// A user-supplied solution for `verify`.
#[derive(Clone, Debug)]
pub enum Candidate {
    Expression(String),
    /// JSON `{"truncation": N, "coefficients": [records]}`.
    SeriesJson(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SeriesFile {
    truncation: u32,
    coefficients: Vec<SeriesRecord>,
}

pub fn verify(p: &Problem, candidate: &Candidate, s: &Settings) -> Result<VerifyReport, CliError> {
    let tolerance = s.tol.or(p.options.tolerance).unwrap_or(DEFAULT_TOLERANCE);
    let (text, residual) = match candidate {
        Candidate::Expression(t) => {
            let e = parse(t, &p.vars).map_err(|e| input(format!("candidate: {e}")))?;
            let rhs = rhs_evaluable(p);
            let r = residual_pointwise(&p.op, &e, &rhs, &sample_points(p), Route::External, DiffOptions::default());
            (e.to_string(), r)
        }
        Candidate::SeriesJson(json) => {
            let file: SeriesFile = serde_json::from_str(json).map_err(|e| input(format!("candidate series: {e}")))?;
            if let Some(r) = file.coefficients.iter().find(|r| r.multi_index.nvars() != p.nvars()) {
                return Err(input(format!("candidate series: index {} has the wrong variable count", r.multi_index)));
            }
            let cand = TruncatedSeries::from_records(p.nvars(), file.truncation, &file.coefficients);
            let g = rhs_series(p, file.truncation).map_err(|e| input(format!("rhs: {e}")))?;
            let mut r = residual_series(&p.op, &cand, &g);
            r.route = Route::External;
            (format!("series with {} terms up to total degree {}", cand.poly().len(), file.truncation), r)
        }
    };
    let passed = residual.passes(tolerance);
    Ok(VerifyReport {
        report_version: REPORT_VERSION,
        candidate: text,
        residual,
        tolerance,
        passed,
    })
}
