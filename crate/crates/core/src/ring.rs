//! A bounded-box model of the ring of finite sums `Σ χ_{A_i} φ_i` of
//! indicator-masked ponderation polynomials, and its representation as
//! coefficient-wise operators on truncated series.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::index::{box_points, MultiIndex};
use crate::ponder::PonderationPoly;
use crate::scalar::Scalar;
use crate::series::TruncatedSeries;

pub const DEFAULT_BOX_BOUND: u32 = 16;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RingError {
    #[error("box mismatch: ({n1} vars, bound {b1}) vs ({n2} vars, bound {b2})")]
    BoxMismatch { n1: usize, b1: u32, n2: usize, b2: u32 },
    #[error("series truncation {trunc} exceeds the box bound {bound}")]
    OutsideBox { trunc: u32, bound: u32 },
    #[error("series has {got} variables, ring element has {expected}")]
    Dimension { expected: usize, got: usize },
}

/// A subset of the box `{0..=bound}^n`, stored as whichever of the set or its
/// complement is listed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Region {
    Finite(BTreeSet<MultiIndex>),
    Cofinite(BTreeSet<MultiIndex>),
}

impl Region {
    pub fn all() -> Self {
        Region::Cofinite(BTreeSet::new())
    }

    pub fn empty() -> Self {
        Region::Finite(BTreeSet::new())
    }

    pub fn contains(&self, gamma: &MultiIndex) -> bool {
        match self {
            Region::Finite(s) => s.contains(gamma),
            Region::Cofinite(s) => !s.contains(gamma),
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, Region::Finite(s) if s.is_empty())
    }

    pub fn complement(&self) -> Region {
        match self {
            Region::Finite(s) => Region::Cofinite(s.clone()),
            Region::Cofinite(s) => Region::Finite(s.clone()),
        }
    }

    pub fn intersect(&self, other: &Region) -> Region {
        use Region::*;
        match (self, other) {
            (Finite(a), Finite(b)) => Finite(a.intersection(b).cloned().collect()),
            (Finite(a), Cofinite(b)) | (Cofinite(b), Finite(a)) => Finite(a.difference(b).cloned().collect()),
            (Cofinite(a), Cofinite(b)) => Cofinite(a.union(b).cloned().collect()),
        }
    }
}

/// `γ ↦ Σ_i χ_{A_i}(γ) φ_i(γ)` on `{0..=bound}^n`.
#[derive(Clone, Debug)]
pub struct PiecewisePonderation {
    nvars: usize,
    bound: u32,
    pieces: Vec<(Region, PonderationPoly)>,
}

fn in_box(gamma: &MultiIndex, bound: u32) -> bool {
    gamma.iter().all(|&g| g <= bound)
}

impl PiecewisePonderation {
    pub fn zero(nvars: usize, bound: u32) -> Self {
        PiecewisePonderation {
            nvars,
            bound,
            pieces: Vec::new(),
        }
    }

    pub fn one(nvars: usize, bound: u32) -> Self {
        Self::from_poly(PonderationPoly::constant(nvars, Scalar::one()), bound)
    }

    pub fn from_poly(phi: PonderationPoly, bound: u32) -> Self {
        let nvars = phi.nvars();
        Self::from_pieces(nvars, bound, vec![(Region::all(), phi)])
    }

    /// `χ_A`; points outside the box are dropped.
    pub fn indicator(nvars: usize, bound: u32, set: impl IntoIterator<Item = MultiIndex>) -> Self {
        let set: BTreeSet<_> = set.into_iter().filter(|g| in_box(g, bound)).collect();
        Self::from_pieces(
            nvars,
            bound,
            vec![(Region::Finite(set), PonderationPoly::constant(nvars, Scalar::one()))],
        )
    }

    pub fn from_pieces(nvars: usize, bound: u32, pieces: Vec<(Region, PonderationPoly)>) -> Self {
        let pieces = pieces
            .into_iter()
            .map(|(r, p)| (clip(r, bound), p))
            .filter(|(r, p)| !r.is_empty() && !p.poly().is_zero())
            .collect();
        PiecewisePonderation { nvars, bound, pieces }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn bound(&self) -> u32 {
        self.bound
    }

    pub fn pieces(&self) -> &[(Region, PonderationPoly)] {
        &self.pieces
    }

    /// Value at `γ`; `None` outside the box.
    pub fn eval(&self, gamma: &MultiIndex) -> Option<Scalar> {
        if gamma.nvars() != self.nvars || !in_box(gamma, self.bound) {
            return None;
        }
        Some(
            self.pieces
                .iter()
                .filter(|(r, _)| r.contains(gamma))
                .map(|(_, p)| p.eval_lattice(gamma))
                .sum(),
        )
    }

    pub fn points(&self) -> Vec<MultiIndex> {
        box_points(self.nvars, self.bound)
    }

    fn check_box(&self, other: &Self) -> Result<(), RingError> {
        if self.nvars != other.nvars || self.bound != other.bound {
            return Err(RingError::BoxMismatch {
                n1: self.nvars,
                b1: self.bound,
                n2: other.nvars,
                b2: other.bound,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, RingError> {
        self.check_box(other)?;
        let mut pieces = self.pieces.clone();
        pieces.extend(other.pieces.iter().cloned());
        Ok(Self::from_pieces(self.nvars, self.bound, pieces))
    }

    pub fn neg(&self) -> Self {
        let minus = PonderationPoly::constant(self.nvars, -Scalar::one());
        let pieces = self.pieces.iter().map(|(r, p)| (r.clone(), p.mul(&minus))).collect();
        Self::from_pieces(self.nvars, self.bound, pieces)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, RingError> {
        self.add(&other.neg())
    }

    /// Pairwise products on the intersected regions.
    pub fn mul(&self, other: &Self) -> Result<Self, RingError> {
        self.check_box(other)?;
        let mut pieces = Vec::with_capacity(self.pieces.len() * other.pieces.len());
        for (ra, pa) in &self.pieces {
            for (rb, pb) in &other.pieces {
                pieces.push((ra.intersect(rb), pa.mul(pb)));
            }
        }
        Ok(Self::from_pieces(self.nvars, self.bound, pieces))
    }

    /// Pointwise equality over the whole box.
    pub fn eq_on_box(&self, other: &Self) -> bool {
        self.nvars == other.nvars
            && self.bound == other.bound
            && self.points().iter().all(|g| self.eval(g) == other.eval(g))
    }

    /// The witness `A = {γ : f(γ) = 1}` when `f` only takes the values 0 and 1.
    pub fn idempotent_check(&self) -> Option<BTreeSet<MultiIndex>> {
        let one = Scalar::one();
        let mut set = BTreeSet::new();
        for g in self.points() {
            let v = self.eval(&g)?;
            if v == one {
                set.insert(g);
            } else if !v.is_zero() {
                return None;
            }
        }
        Some(set)
    }

    /// The operator `L_f` on series of truncation at most the box bound.
    pub fn represent(&self) -> Representation<'_> {
        Representation { f: self }
    }
}

fn clip(r: Region, bound: u32) -> Region {
    match r {
        Region::Finite(s) => Region::Finite(s.into_iter().filter(|g| in_box(g, bound)).collect()),
        Region::Cofinite(s) => Region::Cofinite(s.into_iter().filter(|g| in_box(g, bound)).collect()),
    }
}

/// Coefficient-wise multiplication by a ring element.
#[derive(Clone, Copy, Debug)]
pub struct Representation<'a> {
    f: &'a PiecewisePonderation,
}

impl Representation<'_> {
    pub fn apply(&self, s: &TruncatedSeries) -> Result<TruncatedSeries, RingError> {
        if s.nvars() != self.f.nvars {
            return Err(RingError::Dimension {
                expected: self.f.nvars,
                got: s.nvars(),
            });
        }
        if s.trunc() > self.f.bound {
            return Err(RingError::OutsideBox {
                trunc: s.trunc(),
                bound: self.f.bound,
            });
        }
        let terms: Vec<_> = s
            .terms()
            .map(|(g, c)| {
                let v = self.f.eval(g).expect("truncation within the box");
                (g.clone(), c * &v)
            })
            .collect();
        Ok(TruncatedSeries::from_terms(s.nvars(), s.trunc(), terms))
    }
}
