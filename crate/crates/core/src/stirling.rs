//! Signed Stirling numbers of the first kind and the Pochhammer (falling
//! factorial) ↔ monomial basis transitions.
//!
//! `(k)_t = Σ_i s(t, i) k^i`, so the transition from the Pochhammer basis
//! `{(k)_0, …, (k)_t}` to `{1, k, …, k^t}` is the upper-triangular matrix with
//! entries `M[i][j] = s(j, i)`.

use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::index::MultiIndex;
use crate::poly::SparsePoly;
use crate::scalar::{factorial, Scalar};

fn first_kind_table() -> &'static Mutex<Vec<Vec<BigInt>>> {
    static TABLE: OnceLock<Mutex<Vec<Vec<BigInt>>>> = OnceLock::new();
    TABLE.get_or_init(|| Mutex::new(vec![vec![BigInt::one()]]))
}

/// Row `n` of the signed Stirling numbers of the first kind, `s(n, 0..=n)`.
pub fn stirling1_row(n: usize) -> Vec<BigInt> {
    let mut table = first_kind_table().lock().expect("stirling table poisoned");
    while table.len() <= n {
        let m = table.len() - 1;
        let prev = &table[m];
        // s(m+1, k) = -m s(m, k) + s(m, k-1)
        let mut row = vec![BigInt::zero(); m + 2];
        let mb = BigInt::from(m);
        for (k, slot) in row.iter_mut().enumerate() {
            let keep = if k <= m { -(&mb * &prev[k]) } else { BigInt::zero() };
            let shift = if k >= 1 { prev[k - 1].clone() } else { BigInt::zero() };
            *slot = keep + shift;
        }
        table.push(row);
    }
    table[n].clone()
}

/// `s(n, k)`; zero when `k > n`.
pub fn stirling1_signed(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    stirling1_row(n)[k].clone()
}

/// Unsigned Stirling number of the second kind `S(n, k)`, used only for the
/// inverse transition.
pub fn stirling2(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let mut row = vec![BigInt::one()];
    for m in 0..n {
        let mut next = vec![BigInt::zero(); m + 2];
        for (j, slot) in next.iter_mut().enumerate() {
            let keep = if j <= m { BigInt::from(j) * &row[j] } else { BigInt::zero() };
            let shift = if j >= 1 { row[j - 1].clone() } else { BigInt::zero() };
            *slot = keep + shift;
        }
        row = next;
    }
    row[k].clone()
}

/// Transition matrix of order `t`: `(t+1)×(t+1)` with `M[i][j] = s(j, i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionMatrix {
    entries: Vec<Vec<BigInt>>,
}

impl TransitionMatrix {
    pub fn new(order: usize) -> Self {
        let rows: Vec<Vec<BigInt>> = (0..=order).map(stirling1_row).collect();
        let entries = (0..=order)
            .map(|i| {
                (0..=order)
                    .map(|j| if i <= j { rows[j][i].clone() } else { BigInt::zero() })
                    .collect()
            })
            .collect();
        TransitionMatrix { entries }
    }

    pub fn order(&self) -> usize {
        self.entries.len() - 1
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i][j]
    }

    pub fn rows(&self) -> &[Vec<BigInt>] {
        &self.entries
    }

    /// The inverse transition (standard → Pochhammer): `S(j, i)`.
    pub fn inverse(&self) -> Vec<Vec<BigInt>> {
        let t = self.order();
        (0..=t)
            .map(|i| (0..=t).map(|j| stirling2(j, i)).collect())
            .collect()
    }

    pub fn apply(&self, coeffs: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(coeffs.len(), self.entries.len(), "vector length must be order + 1");
        self.entries
            .iter()
            .map(|row| {
                row.iter()
                    .zip(coeffs)
                    .filter(|(m, _)| !m.is_zero())
                    .map(|(m, c)| &Scalar::from_bigint(m.clone()) * c)
                    .sum()
            })
            .collect()
    }
}

/// Standard-basis coefficients of `Σ_i coeffs[i]·(k)_i`.
pub fn pochhammer_to_standard(coeffs: &[Scalar]) -> Vec<Scalar> {
    if coeffs.is_empty() {
        return Vec::new();
    }
    TransitionMatrix::new(coeffs.len() - 1).apply(coeffs)
}

/// Multivariate Pochhammer → standard, tensor-applied per variable: each
/// term `c_γ Π_j (k_j)_{γ_j}` is expanded through the Stirling rows.
pub fn pochhammer_to_standard_multi(poch: &SparsePoly) -> SparsePoly {
    let n = poch.nvars();
    let mut out = SparsePoly::zero(n);
    for (gamma, c) in poch.terms() {
        // expansion of each factor as (exponent, coefficient) pairs
        let mut partial: Vec<(Vec<u32>, BigInt)> = vec![(Vec::new(), BigInt::one())];
        for &g in gamma.iter() {
            let row = stirling1_row(g as usize);
            let mut next = Vec::new();
            for (exps, coef) in &partial {
                for (i, s) in row.iter().enumerate() {
                    if s.is_zero() {
                        continue;
                    }
                    let mut e = exps.clone();
                    e.push(i as u32);
                    next.push((e, coef * s));
                }
            }
            partial = next;
        }
        for (e, coef) in partial {
            out.add_term(MultiIndex(e), c * &Scalar::from_bigint(coef));
        }
    }
    out
}

/// Pochhammer-basis coefficients of `p`: `c_γ = Δ^γ p(0) / γ!` with the
/// forward differences `Δ_j p(k) = p(k + e_j) - p(k)`.
pub fn standard_to_pochhammer(p: &SparsePoly) -> SparsePoly {
    let n = p.nvars();
    if p.is_zero() {
        return SparsePoly::zero(n);
    }
    let dims: Vec<usize> = (0..n).map(|v| p.degree_in(v) as usize + 1).collect();
    let total: usize = dims.iter().product();
    // grid values p(k) for k in the box, flattened row-major
    let mut grid: Vec<Scalar> = (0..total)
        .map(|flat| p.eval_lattice(&unflatten(flat, &dims)))
        .collect();
    let strides = strides(&dims);
    for var in 0..n {
        // after pass `d` along `var`, entries with coordinate >= d hold Δ^d
        for d in 1..dims[var] {
            for flat in (0..total).rev() {
                let coord = (flat / strides[var]) % dims[var];
                if coord >= d {
                    let prev = grid[flat - strides[var]].clone();
                    grid[flat] = &grid[flat] - &prev;
                }
            }
        }
    }
    let mut out = SparsePoly::zero(n);
    for (flat, v) in grid.into_iter().enumerate() {
        if v.is_zero() {
            continue;
        }
        let gamma = unflatten(flat, &dims);
        let denom: BigInt = gamma.iter().map(|&g| factorial(g)).product();
        out.add_term(gamma, &v / &Scalar::from_bigint(denom));
    }
    out
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dims[i + 1];
    }
    s
}

fn unflatten(mut flat: usize, dims: &[usize]) -> MultiIndex {
    let mut v = vec![0u32; dims.len()];
    for i in (0..dims.len()).rev() {
        v[i] = (flat % dims[i]) as u32;
        flat /= dims[i];
    }
    MultiIndex(v)
}

/// Univariate convenience: standard-basis coefficient vector → Pochhammer
/// coefficient vector.
pub fn standard_to_pochhammer_vec(coeffs: &[Scalar]) -> Vec<Scalar> {
    let p = SparsePoly::from_terms(
        1,
        coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| (MultiIndex(vec![i as u32]), c.clone())),
    );
    let q = standard_to_pochhammer(&p);
    let mut out = vec![Scalar::zero(); coeffs.len()];
    for (k, v) in q.terms() {
        out[k.0[0] as usize] = v.clone();
    }
    out
}
