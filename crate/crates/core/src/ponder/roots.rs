//! Roots with multiplicity: an exact path (square-free factorization plus
//! rational roots) and an Aberth–Ehrlich numeric fallback.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use serde::Serialize;

use super::uni::UniPoly;
use super::PonderError;
use crate::scalar::Scalar;

/// A root `r` of multiplicity `α`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Root {
    pub value: Scalar,
    pub multiplicity: u32,
}

/// All roots of a univariate ponderation polynomial, `φ = lead · Π (k - r_i)^{α_i}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RootSet {
    pub roots: Vec<Root>,
    pub lead: Scalar,
}

impl RootSet {
    pub fn degree(&self) -> u32 {
        self.roots.iter().map(|r| r.multiplicity).sum()
    }

    pub fn is_exact(&self) -> bool {
        self.lead.is_exact() && self.roots.iter().all(|r| r.value.is_exact())
    }

    /// `lead · Π (k - r)^α` expanded.
    pub fn expand(&self) -> UniPoly {
        let mut p = UniPoly::new(vec![self.lead.clone()]);
        for r in &self.roots {
            let lin = UniPoly::linear_root(&r.value);
            for _ in 0..r.multiplicity {
                p = p.mul(&lin);
            }
        }
        p
    }

    /// Largest coefficientwise deviation of the expanded product from `phi`,
    /// relative to `phi`'s largest coefficient.
    pub fn reconstruction_error(&self, phi: &UniPoly) -> f64 {
        let e = self.expand();
        let scale = phi.coeffs().iter().map(Scalar::abs).fold(0.0, f64::max).max(1e-300);
        let n = e.coeffs().len().max(phi.coeffs().len());
        (0..n)
            .map(|i| {
                let a = e.coeffs().get(i).map(Scalar::to_c64).unwrap_or_default();
                let b = phi.coeffs().get(i).map(Scalar::to_c64).unwrap_or_default();
                (a - b).norm() / scale
            })
            .fold(0.0, f64::max)
    }
}

/// Tuning knobs for root finding.
#[derive(Clone, Copy, Debug)]
pub struct RootOptions {
    /// Relative distance under which numeric roots are merged.
    pub cluster_tol: f64,
    /// Skip the rational-root test when `|a_0|` or `|lead|` exceed this.
    pub divisor_limit: u64,
}

impl Default for RootOptions {
    fn default() -> Self {
        RootOptions {
            cluster_tol: 1e-8,
            divisor_limit: 1_000_000_000_000,
        }
    }
}

pub fn roots_with_multiplicity(phi: &UniPoly, opts: RootOptions) -> Result<RootSet, PonderError> {
    if phi.degree() == 0 || phi.is_zero() {
        return Err(PonderError::ConstantPolynomial);
    }
    let lead = phi.lead();
    let mut roots = if phi.is_exact() {
        exact_roots(phi, opts)?
    } else {
        numeric_roots(phi, opts)?
    };
    roots.sort_by(|a, b| a.value.canonical_cmp(&b.value));
    let set = RootSet { roots, lead };
    debug_assert_eq!(set.degree() as usize, phi.degree());
    Ok(set)
}

fn exact_roots(phi: &UniPoly, opts: RootOptions) -> Result<Vec<Root>, PonderError> {
    let mut out = Vec::new();
    for (factor, mult) in phi.square_free() {
        for value in square_free_roots(&factor, opts)? {
            out.push(Root {
                value,
                multiplicity: mult,
            });
        }
    }
    Ok(out)
}

/// Roots of an exact, monic, square-free polynomial.
fn square_free_roots(f: &UniPoly, opts: RootOptions) -> Result<Vec<Scalar>, PonderError> {
    let mut found = Vec::new();
    let mut rest = f.clone();
    if rest.coeffs()[0].is_zero() {
        found.push(Scalar::zero());
        rest = rest.divrem(&UniPoly::linear_root(&Scalar::zero())).0;
    }
    for r in rational_candidates(&rest, opts) {
        if rest.degree() == 0 {
            break;
        }
        if rest.eval(&r).is_zero() {
            rest = rest.divrem(&UniPoly::linear_root(&r)).0;
            found.push(r);
        }
    }
    match rest.degree() {
        0 => {}
        1 => {
            let c = rest.coeffs();
            found.push(-(&c[0] / &c[1]));
        }
        2 => {
            let c = rest.coeffs();
            let (a, b, cc) = (&c[2], &c[1], &c[0]);
            let disc = b * b - &(&Scalar::from_i64(4) * &(a * cc));
            let s = disc.sqrt();
            let two_a = a * &Scalar::from_i64(2);
            found.push(&(-b + &s) / &two_a);
            found.push(&(-b - &s) / &two_a);
        }
        _ => {
            let numeric = aberth(&rest)?;
            let mut remaining = rest.clone();
            let mut floats = Vec::new();
            for z in numeric {
                match snap_gaussian(&remaining, z) {
                    Some(exact) => {
                        remaining = remaining.divrem(&UniPoly::linear_root(&exact)).0;
                        found.push(exact);
                    }
                    None => floats.push(z),
                }
            }
            found.extend(floats.into_iter().map(|z| Scalar::from_c64(newton_polish(f, z, 4))));
        }
    }
    Ok(found)
}

/// Candidates `±p/q` of the rational-root test, after clearing denominators.
fn rational_candidates(f: &UniPoly, opts: RootOptions) -> Vec<Scalar> {
    if f.degree() == 0 {
        return Vec::new();
    }
    let Some(ints) = integer_coefficients(f) else {
        return Vec::new();
    };
    let a0 = ints[0].abs();
    let an = ints.last().expect("nonempty").abs();
    let (Some(a0u), Some(anu)) = (a0.to_u64(), an.to_u64()) else {
        return Vec::new();
    };
    if a0u == 0 || a0u > opts.divisor_limit || anu > opts.divisor_limit {
        return Vec::new();
    }
    let ps = divisors(a0u);
    let qs = divisors(anu);
    let mut cands: Vec<BigRational> = Vec::new();
    for p in &ps {
        for q in &qs {
            let r = BigRational::new(BigInt::from(*p), BigInt::from(*q));
            if !cands.contains(&r) {
                cands.push(r.clone());
                cands.push(-r);
            }
        }
    }
    cands.into_iter().map(Scalar::from_rational).collect()
}

/// Integer coefficient vector of a real-rational polynomial (scaled by the
/// lcm of denominators), or `None` for non-real input.
fn integer_coefficients(f: &UniPoly) -> Option<Vec<BigInt>> {
    let rats: Vec<&BigRational> = f.coeffs().iter().map(Scalar::as_rational).collect::<Option<_>>()?;
    let l = rats.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
    Some(rats.iter().map(|r| (*r * BigRational::from_integer(l.clone())).to_integer()).collect())
}

fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Tries small-denominator Gaussian rationals near `z`, accepting one only if
/// it is an exact root of `f`.
fn snap_gaussian(f: &UniPoly, z: Complex64) -> Option<Scalar> {
    for den in 1..=12i64 {
        let re = (z.re * den as f64).round();
        let im = (z.im * den as f64).round();
        if (re / den as f64 - z.re).abs() > 1e-6 || (im / den as f64 - z.im).abs() > 1e-6 {
            continue;
        }
        let cand = Scalar::from_gauss(
            BigRational::new(BigInt::from(re as i64), BigInt::from(den)),
            BigRational::new(BigInt::from(im as i64), BigInt::from(den)),
        );
        if f.eval(&cand).is_zero() {
            return Some(cand);
        }
    }
    None
}

fn newton_polish(f: &UniPoly, mut z: Complex64, steps: usize) -> Complex64 {
    let df = f.derivative();
    for _ in 0..steps {
        let d = df.eval_c64(z);
        if d.norm() == 0.0 {
            break;
        }
        let step = f.eval_c64(z) / d;
        if !step.is_finite() {
            break;
        }
        z -= step;
        if step.norm() <= 1e-17 * z.norm().max(1.0) {
            break;
        }
    }
    z
}

fn numeric_roots(phi: &UniPoly, opts: RootOptions) -> Result<Vec<Root>, PonderError> {
    let zs = aberth(phi)?;
    let n = zs.len();
    // union-find clustering within the relative tolerance
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        p[i] = r;
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            let scale = zs[i].norm().max(zs[j].norm()).max(1.0);
            if (zs[i] - zs[j]).norm() <= opts.cluster_tol * scale {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let mut groups: Vec<(usize, Vec<Complex64>)> = Vec::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        match groups.iter_mut().find(|(k, _)| *k == r) {
            Some((_, g)) => g.push(zs[i]),
            None => groups.push((r, vec![zs[i]])),
        }
    }
    let mut out = Vec::new();
    for (_, g) in groups {
        let m = g.len();
        let mean = g.iter().sum::<Complex64>() / m as f64;
        // a root of multiplicity m is a simple root of the (m-1)th derivative
        let mut d = phi.clone();
        for _ in 1..m {
            d = d.derivative();
        }
        let value = newton_polish(&d, mean, 4);
        out.push(Root {
            value: Scalar::from_c64(value),
            multiplicity: m as u32,
        });
    }
    Ok(out)
}

/// Aberth–Ehrlich simultaneous iteration on all roots of `f`.
pub(crate) fn aberth(f: &UniPoly) -> Result<Vec<Complex64>, PonderError> {
    let n = f.degree();
    let lead = f.lead().to_c64();
    let c: Vec<Complex64> = f.coeffs().iter().map(|x| x.to_c64() / lead).collect();
    let eval = |z: Complex64| -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for a in c.iter().rev() {
            dp = dp * z + p;
            p = p * z + a;
        }
        (p, dp)
    };
    let abs_eval = |z: Complex64| -> f64 {
        let r = z.norm();
        c.iter().rev().fold(0.0, |acc, a| acc * r + a.norm())
    };
    let center = -c[n - 1] / n as f64;
    let mut radius = eval(center).0.norm().powf(1.0 / n as f64);
    if radius == 0.0 || !radius.is_finite() {
        radius = 1.0;
    }
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            center + Complex64::from_polar(radius, theta)
        })
        .collect();
    let cap = (10 * n).max(64);
    let mut done = vec![false; n];
    for _ in 0..cap {
        for k in 0..n {
            if done[k] {
                continue;
            }
            let (p, dp) = eval(z[k]);
            if p.norm() <= 4.0 * f64::EPSILON * abs_eval(z[k]) {
                done[k] = true;
                continue;
            }
            let ratio = p / dp;
            let s: Complex64 = (0..n)
                .filter(|&j| j != k)
                .map(|j| (z[k] - z[j]).inv())
                .sum();
            let mut w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if !w.is_finite() {
                w = ratio;
            }
            if !w.is_finite() {
                continue;
            }
            z[k] -= w;
            if w.norm() <= 1e-16 * z[k].norm().max(1e-300) {
                done[k] = true;
            }
        }
        if done.iter().all(|&d| d) {
            return Ok(z);
        }
    }
    let residuals: Vec<f64> = z
        .iter()
        .map(|&zk| eval(zk).0.norm() / abs_eval(zk).max(1e-300))
        .collect();
    // roots of multiplicity > 1 converge linearly; accept a small backward error
    if residuals.iter().all(|&r| r <= 1e-10) {
        return Ok(z);
    }
    Err(PonderError::NoConvergence {
        iterations: cap,
        residuals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ip(v: &[i64]) -> UniPoly {
        UniPoly::new(v.iter().map(|&x| Scalar::from_i64(x)).collect())
    }

    fn mults(set: &RootSet) -> Vec<(Complex64, u32)> {
        set.roots.iter().map(|r| (r.value.to_c64(), r.multiplicity)).collect()
    }

    #[test]
    fn exact_small_integer_roots() {
        let set = roots_with_multiplicity(&ip(&[2, 5, 4, 1]), RootOptions::default()).unwrap();
        assert!(set.is_exact());
        assert_eq!(
            set.roots,
            vec![
                Root { value: Scalar::from_i64(-2), multiplicity: 1 },
                Root { value: Scalar::from_i64(-1), multiplicity: 2 },
            ]
        );
    }

    #[test]
    fn gaussian_roots_snap_to_exact() {
        let set = roots_with_multiplicity(&ip(&[1, 0, 1]), RootOptions::default()).unwrap();
        assert!(set.is_exact());
        assert_eq!(set.roots[0].value, -Scalar::i());
        assert_eq!(set.roots[1].value, Scalar::i());
        // a degree-4 gaussian case goes through the numeric + snap path
        let q = ip(&[1, 0, 1]).mul(&ip(&[4, 0, 1]));
        let set = roots_with_multiplicity(&q, RootOptions::default()).unwrap();
        assert!(set.is_exact(), "{set:?}");
        assert_eq!(set.reconstruction_error(&q), 0.0);
    }

    #[test]
    fn irrational_roots_are_numeric() {
        // k^2 + 3k + 1
        let set = roots_with_multiplicity(&ip(&[1, 3, 1]), RootOptions::default()).unwrap();
        let r1 = (-3.0 + 5f64.sqrt()) / 2.0;
        assert!(mults(&set).iter().any(|(z, m)| (z.re - r1).abs() < 1e-14 && *m == 1));
        assert!(set.reconstruction_error(&ip(&[1, 3, 1])) < 1e-14);
    }

    #[test]
    fn float_input_clusters_multiplicity() {
        // (k + 0.5)^2 (k - 1.25) with float coefficients
        // (k^2 + k + 0.25)(k - 1.25)
        let p2 = UniPoly::new(vec![
            Scalar::from_f64(-0.3125),
            Scalar::from_f64(0.25 - 1.25),
            Scalar::from_f64(1.0 - 1.25),
            Scalar::from_f64(1.0),
        ]);
        let set = roots_with_multiplicity(&p2, RootOptions { cluster_tol: 1e-6, ..Default::default() }).unwrap();
        let m = mults(&set);
        assert_eq!(m.len(), 2, "{m:?}");
        assert!(m.iter().any(|(z, k)| (z.re + 0.5).abs() < 1e-10 && *k == 2));
        assert!(set.reconstruction_error(&p2) < 1e-10);
    }

    #[test]
    fn ninth_order_roots() {
        let p = ip(&[648, 3132, 6534, 7737, 5744, 2779, 878, 175, 20, 1]);
        let set = roots_with_multiplicity(&p, RootOptions::default()).unwrap();
        let m: Vec<(i64, u32)> = set
            .roots
            .iter()
            .map(|r| (r.value.as_rational().unwrap().to_integer().to_i64().unwrap(), r.multiplicity))
            .collect();
        assert_eq!(m, vec![(-3, 4), (-2, 3), (-1, 2)]);
    }
}
