//! Particular solutions of Cauchy–Euler type equations `Σ a_i x^i ∂^i f = g`
//! in one and several variables, through the coefficient-wise operator
//! `L_φ: Σ a_γ x^γ ↦ Σ φ(γ) a_γ x^γ`.

pub mod divergence;
pub mod evaluable;
pub mod exec;
pub mod expr;
pub mod index;
pub mod logmono;
pub mod poly;
pub mod ring;
pub mod ponder;
pub mod scalar;
pub mod series;
pub mod stirling;
pub mod verify;

pub use index::MultiIndex;
pub use poly::SparsePoly;
pub use ponder::{PartialFractions, PonderError, PonderationPoly, RootSet};
pub use scalar::Scalar;
pub use series::{EulerOperator, TruncatedSeries};
