//! Machine-readable output. Bump [`REPORT_VERSION`] on any field change.

use eulerring::divergence::{Decline, DivergenceForm};
use eulerring::logmono::LogMonomialSum;
use eulerring::verify::{ResidualReport, Route};
use eulerring::{MultiIndex, PartialFractions, RootSet, Scalar, SparsePoly, TruncatedSeries};
use serde::Serialize;

pub const REPORT_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize)]
pub struct Term {
    pub index: MultiIndex,
    pub coeff: Scalar,
}

#[derive(Clone, Debug, Serialize)]
pub struct PolyOut {
    pub display: String,
    pub terms: Vec<Term>,
}

impl PolyOut {
    pub fn new(p: &SparsePoly, names: &[String]) -> Self {
        PolyOut {
            display: p.display_with(names),
            terms: p
                .terms()
                .map(|(i, c)| Term {
                    index: i.clone(),
                    coeff: c.clone(),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PhiSection {
    pub degree: u32,
    pub standard: PolyOut,
    /// Coefficients on `Π (k_j)_{γ_j}`, equal to the Euler-operator coefficients.
    pub pochhammer: PolyOut,
    pub operator: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct FractionCheck {
    pub root: Scalar,
    pub power: u32,
    pub printed: Scalar,
    pub computed: Option<Scalar>,
    pub agrees: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct FractionComparison {
    pub entries: Vec<FractionCheck>,
    /// Nonzero computed coefficients absent from the printed list.
    pub missing_from_printed: usize,
    pub all_agree: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct UnivariateSection {
    pub roots: RootSet,
    pub partial_fractions: PartialFractions,
    /// Relative deviation of `Σ C_{i,j}/(k - r_i)^j` from `1/φ(k)` over `k = 0..=9`.
    pub reconstruction_error: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub printed_comparison: Option<FractionComparison>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DecompositionStatus {
    /// The operator was given as linear factors.
    Explicit,
    /// Factors supplied next to another operator encoding.
    Supplied,
    /// Two-variable quadratic split by coefficient matching.
    Decomposed,
    /// φ is itself linear.
    Linear,
    /// Univariate φ written as a product over its roots.
    FromRoots,
    Declined,
}

#[derive(Clone, Debug, Serialize)]
pub struct DecompositionSection {
    pub status: DecompositionStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub form: Option<DivergenceForm>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decline: Option<Decline>,
    /// Relative mismatch of the two-variable factorization condition.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hyperbolic_condition_mismatch: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PointValue {
    pub point: Vec<Scalar>,
    pub value: Scalar,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference: Option<Scalar>,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SolutionPayload {
    Series {
        truncation: u32,
        coefficients: TruncatedSeries,
        #[serde(skip_serializing_if = "Option::is_none")]
        display: Option<String>,
    },
    Logmono {
        terms: LogMonomialSum,
        display: String,
        /// The iterated-integral construction gives the same sum.
        integral_route_agrees: bool,
        /// For `g = ln x`, the explicit root formula gives the same sum.
        #[serde(skip_serializing_if = "Option::is_none")]
        closed_form_agrees: Option<bool>,
    },
    Quadrature {
        nodes: usize,
        residual_nodes: usize,
        grading: u32,
        factors: usize,
        samples: Vec<PointValue>,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct CrossCheck {
    pub routes: [Route; 2],
    pub points: usize,
    pub max_difference: f64,
    pub tolerance: f64,
    pub agree: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReferenceCheck {
    pub expression: String,
    pub residual: ResidualReport,
    pub passes: bool,
    /// Largest `|computed - reference|` over the compared points.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_difference: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Erratum {
    pub example_id: String,
    pub printed: String,
    pub computed: String,
    pub note: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolutionReport {
    pub report_version: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub example_id: Option<String>,
    pub variables: Vec<String>,
    pub route: Route,
    pub rhs: String,
    pub phi: PhiSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub univariate: Option<UnivariateSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<DecompositionSection>,
    pub solution: SolutionPayload,
    /// The route's own residual: exact for series and log-monomials,
    /// pointwise for quadrature.
    pub residual: ResidualReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pointwise_residual: Option<ResidualReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cross_check: Option<CrossCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference: Option<ReferenceCheck>,
    pub errata: Vec<Erratum>,
    pub warnings: Vec<String>,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct PhiReport {
    pub report_version: u32,
    pub variables: Vec<String>,
    pub phi: PhiSection,
}

#[derive(Clone, Debug, Serialize)]
pub struct PartfracReport {
    pub report_version: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub example_id: Option<String>,
    pub phi: PhiSection,
    pub univariate: UnivariateSection,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub report_version: u32,
    pub candidate: String,
    pub residual: ResidualReport,
    pub tolerance: f64,
    pub passed: bool,
}
