//! Complex scalars that stay exact (Gaussian rationals) for as long as the
//! inputs allow, and fall back to `Complex64` otherwise.
//!
//! Mixing an exact and a float operand always yields a float; exactness never
//! comes back once lost.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// A Gaussian rational `re + im·i` with arbitrary-precision parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaussRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussRational { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        GaussRational {
            re,
            im: BigRational::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(ratio_to_f64(&self.re), ratio_to_f64(&self.im))
    }

    fn add(&self, o: &Self) -> Self {
        GaussRational::new(&self.re + &o.re, &self.im + &o.im)
    }

    fn sub(&self, o: &Self) -> Self {
        GaussRational::new(&self.re - &o.re, &self.im - &o.im)
    }

    fn mul(&self, o: &Self) -> Self {
        if self.im.is_zero() && o.im.is_zero() {
            return GaussRational::real(&self.re * &o.re);
        }
        GaussRational::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }

    fn recip(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if self.im.is_zero() {
            return Some(GaussRational::real(self.re.recip()));
        }
        let n = self.norm_sqr();
        Some(GaussRational::new(&self.re / &n, -&self.im / &n))
    }
}

/// Converts a big rational to the nearest double, including values whose
/// numerator and denominator individually overflow `f64`.
pub fn ratio_to_f64(r: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    let nb = r.numer().bits() as i64;
    let db = r.denom().bits() as i64;
    let shift = nb - db - 60;
    let (n, d) = if shift > 0 {
        (r.numer().clone(), r.denom() << (shift as usize))
    } else {
        (r.numer() << ((-shift) as usize), r.denom().clone())
    };
    let q = n / d;
    let half = (shift / 2) as i32;
    q.to_f64().unwrap_or(f64::NAN) * 2f64.powi(half) * 2f64.powi(shift as i32 - half)
}

/// Exact conversion of a finite double into a rational.
pub fn f64_to_ratio(x: f64) -> Option<BigRational> {
    BigRational::from_float(x)
}

#[derive(Clone, Debug)]
pub enum Scalar {
    Exact(GaussRational),
    Float(Complex64),
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("cannot parse number `{0}`")]
pub struct ParseScalarError(pub String);

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Exact(GaussRational::real(BigRational::zero()))
    }

    pub fn one() -> Self {
        Scalar::from_i64(1)
    }

    pub fn i() -> Self {
        Scalar::Exact(GaussRational::new(BigRational::zero(), BigRational::one()))
    }

    pub fn from_i64(v: i64) -> Self {
        Scalar::Exact(GaussRational::real(BigRational::from_integer(v.into())))
    }

    pub fn from_bigint(v: BigInt) -> Self {
        Scalar::Exact(GaussRational::real(BigRational::from_integer(v)))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Scalar::Exact(GaussRational::real(BigRational::new(num.into(), den.into())))
    }

    pub fn from_rational(r: BigRational) -> Self {
        Scalar::Exact(GaussRational::real(r))
    }

    pub fn from_gauss(re: BigRational, im: BigRational) -> Self {
        Scalar::Exact(GaussRational::new(re, im))
    }

    pub fn from_f64(v: f64) -> Self {
        Scalar::Float(Complex64::new(v, 0.0))
    }

    pub fn from_c64(v: Complex64) -> Self {
        Scalar::Float(v)
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(g) => g.is_zero(),
            Scalar::Float(c) => c.re == 0.0 && c.im == 0.0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Exact(g) => g.re.is_one() && g.im.is_zero(),
            Scalar::Float(c) => c.re == 1.0 && c.im == 0.0,
        }
    }

    pub fn to_c64(&self) -> Complex64 {
        match self {
            Scalar::Exact(g) => g.to_c64(),
            Scalar::Float(c) => *c,
        }
    }

    pub fn abs(&self) -> f64 {
        self.to_c64().norm()
    }

    pub fn re_f64(&self) -> f64 {
        self.to_c64().re
    }

    /// The exact value when it is a real rational.
    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Exact(g) if g.im.is_zero() => Some(&g.re),
            _ => None,
        }
    }

    pub fn as_exact(&self) -> Option<&GaussRational> {
        match self {
            Scalar::Exact(g) => Some(g),
            Scalar::Float(_) => None,
        }
    }

    /// Nonnegative integer value, if this is exactly one.
    pub fn as_natural(&self) -> Option<u64> {
        let r = self.as_rational()?;
        if r.is_integer() && !r.is_negative() {
            r.to_integer().to_u64()
        } else {
            None
        }
    }

    /// Forces the float representation.
    pub fn to_float(&self) -> Scalar {
        Scalar::Float(self.to_c64())
    }

    pub fn conj(&self) -> Scalar {
        match self {
            Scalar::Exact(g) => Scalar::Exact(GaussRational::new(g.re.clone(), -&g.im)),
            Scalar::Float(c) => Scalar::Float(c.conj()),
        }
    }

    pub fn recip(&self) -> Option<Scalar> {
        match self {
            Scalar::Exact(g) => g.recip().map(Scalar::Exact),
            Scalar::Float(c) => {
                if c.re == 0.0 && c.im == 0.0 {
                    None
                } else {
                    Some(Scalar::Float(c.inv()))
                }
            }
        }
    }

    pub fn checked_div(&self, rhs: &Scalar) -> Option<Scalar> {
        rhs.recip().map(|r| self * &r)
    }

    pub fn powu(&self, mut e: u32) -> Scalar {
        let mut base = self.clone();
        let mut acc = Scalar::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn powi(&self, e: i32) -> Option<Scalar> {
        if e >= 0 {
            Some(self.powu(e as u32))
        } else {
            self.powu(e.unsigned_abs()).recip()
        }
    }

    /// Square root on the principal branch; exact whenever the root is a
    /// Gaussian rational.
    pub fn sqrt(&self) -> Scalar {
        if let Some(r) = self.as_rational() {
            let a = r.abs();
            if let (Some(n), Some(d)) = (exact_isqrt(a.numer()), exact_isqrt(a.denom())) {
                let root = BigRational::new(n, d);
                return if r.is_negative() {
                    Scalar::from_gauss(BigRational::zero(), root)
                } else {
                    Scalar::from_rational(root)
                };
            }
        }
        if let Some(g) = self.as_exact() {
            if let Some(root) = gauss_sqrt(g) {
                return root;
            }
        }
        Scalar::Float(self.to_c64().sqrt())
    }

    pub fn exp(&self) -> Scalar {
        if self.is_exact() && self.is_zero() {
            return Scalar::one();
        }
        Scalar::Float(self.to_c64().exp())
    }

    pub fn ln(&self) -> Scalar {
        if self.is_exact() && self.is_one() {
            return Scalar::zero();
        }
        Scalar::Float(self.to_c64().ln())
    }

    pub fn sin(&self) -> Scalar {
        if self.is_exact() && self.is_zero() {
            return Scalar::zero();
        }
        Scalar::Float(self.to_c64().sin())
    }

    pub fn cos(&self) -> Scalar {
        if self.is_exact() && self.is_zero() {
            return Scalar::one();
        }
        Scalar::Float(self.to_c64().cos())
    }

    /// Equality: exact comparison when both sides are exact, otherwise
    /// `|a-b| <= tol * max(1, |a|, |b|)`.
    pub fn approx_eq(&self, other: &Scalar, tol: f64) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            _ => {
                let a = self.to_c64();
                let b = other.to_c64();
                (a - b).norm() <= tol * 1f64.max(a.norm()).max(b.norm())
            }
        }
    }

    /// A deterministic total order used for canonical output: real part, then
    /// imaginary part (exactly when both are exact).
    pub fn canonical_cmp(&self, other: &Scalar) -> Ordering {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a.re.cmp(&b.re).then(a.im.cmp(&b.im)),
            _ => {
                let a = self.to_c64();
                let b = other.to_c64();
                a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
            }
        }
    }

    /// Exact text form (`"-29/3888"`, `"1/2*i"`, `"3 - 2*i"`) when exact.
    pub fn exact_string(&self) -> Option<String> {
        match self {
            Scalar::Exact(g) => Some(format_gauss(g)),
            Scalar::Float(_) => None,
        }
    }
}

fn exact_isqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let s = n.sqrt();
    if &(&s * &s) == n {
        Some(s)
    } else {
        None
    }
}

fn format_gauss(g: &GaussRational) -> String {
    if g.im.is_zero() {
        return g.re.to_string();
    }
    let im = if g.im.is_one() {
        "i".to_string()
    } else if g.im == -BigRational::one() {
        "-i".to_string()
    } else {
        format!("{}*i", g.im)
    };
    if g.re.is_zero() {
        return im;
    }
    if g.im.is_negative() {
        let pos = if g.im == -BigRational::one() {
            "i".to_string()
        } else {
            format!("{}*i", -&g.im)
        };
        format!("{} - {}", g.re, pos)
    } else {
        format!("{} + {}", g.re, im)
    }
}

impl PartialEq for Scalar {
    /// Structural equality: exact values compare exactly; a float never equals
    /// an exact value unless they convert to the identical double pair.
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            _ => self.to_c64() == other.to_c64(),
        }
    }
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl From<i64> for Scalar {
    fn from(v: i64) -> Self {
        Scalar::from_i64(v)
    }
}

impl From<f64> for Scalar {
    fn from(v: f64) -> Self {
        Scalar::from_f64(v)
    }
}

impl From<Complex64> for Scalar {
    fn from(v: Complex64) -> Self {
        Scalar::Float(v)
    }
}

impl From<BigRational> for Scalar {
    fn from(v: BigRational) -> Self {
        Scalar::from_rational(v)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(g) => f.write_str(&format_gauss(g)),
            Scalar::Float(c) => {
                if c.im == 0.0 {
                    write!(f, "{}", c.re)
                } else if c.re == 0.0 {
                    write!(f, "{}*i", c.im)
                } else if c.im < 0.0 {
                    write!(f, "{} - {}*i", c.re, -c.im)
                } else {
                    write!(f, "{} + {}*i", c.re, c.im)
                }
            }
        }
    }
}

/// Parses a real number written as an integer (`-12`), a fraction (`5/2`) or a
/// decimal (`0.25`, `1e-3`). Integers and fractions are exact; decimals are
/// converted exactly from their decimal text.
impl FromStr for Scalar {
    type Err = ParseScalarError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let err = || ParseScalarError(s.to_string());
        if let Some((n, d)) = t.split_once('/') {
            let n: BigInt = n.trim().parse().map_err(|_| err())?;
            let d: BigInt = d.trim().parse().map_err(|_| err())?;
            if d.is_zero() {
                return Err(err());
            }
            return Ok(Scalar::from_rational(BigRational::new(n, d)));
        }
        decimal_to_ratio(t).map(Scalar::from_rational).ok_or_else(err)
    }
}

/// Exact rational value of a decimal literal such as `-1.25e-3`.
fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    Some(BigRational::new(exact_isqrt(r.numer())?, exact_isqrt(r.denom())?))
}

/// `x + iy` with `x^2 = (|z| + a)/2`, `y = sign(b) sqrt((|z| - a)/2)`, `x >= 0`.
fn gauss_sqrt(z: &GaussRational) -> Option<Scalar> {
    let modulus = rational_sqrt(&z.norm_sqr())?;
    let two = BigRational::from_integer(BigInt::from(2));
    let x = rational_sqrt(&((&modulus + &z.re) / &two))?;
    let mut y = rational_sqrt(&((&modulus - &z.re) / &two))?;
    if z.im.is_negative() {
        y = -y;
    }
    Some(Scalar::from_gauss(x, y))
}

pub fn decimal_to_ratio(t: &str) -> Option<BigRational> {
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(p) => (&t[..p], t[p + 1..].parse::<i32>().ok()?),
        None => (t, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((a, b)) => (a, b),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut num: BigInt = digits.parse().ok()?;
    if neg {
        num = -num;
    }
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let r = if scale >= 0 {
        BigRational::from_integer(num * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(num, num_traits::pow(ten, (-scale) as usize))
    };
    Some(r)
}

fn binop<FE, FF>(a: &Scalar, b: &Scalar, fe: FE, ff: FF) -> Scalar
where
    FE: Fn(&GaussRational, &GaussRational) -> GaussRational,
    FF: Fn(Complex64, Complex64) -> Complex64,
{
    match (a, b) {
        (Scalar::Exact(x), Scalar::Exact(y)) => Scalar::Exact(fe(x, y)),
        _ => Scalar::Float(ff(a.to_c64(), b.to_c64())),
    }
}

impl Add<&Scalar> for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        binop(self, rhs, GaussRational::add, |x, y| x + y)
    }
}

impl Sub<&Scalar> for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        binop(self, rhs, GaussRational::sub, |x, y| x - y)
    }
}

impl Mul<&Scalar> for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        binop(self, rhs, GaussRational::mul, |x, y| x * y)
    }
}

impl Div<&Scalar> for &Scalar {
    type Output = Scalar;
    /// Panics on exact division by zero; float division follows IEEE rules.
    fn div(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Exact(x), Scalar::Exact(y)) => {
                Scalar::Exact(x.mul(&y.recip().expect("exact division by zero")))
            }
            _ => Scalar::Float(self.to_c64() / rhs.to_c64()),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(g) => Scalar::Exact(GaussRational::new(-&g.re, -&g.im)),
            Scalar::Float(c) => Scalar::Float(-c),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                (&self).$m(rhs)
            }
        }
        impl $tr<Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        *self = &*self * rhs;
    }
}

impl std::iter::Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |a, b| a + b)
    }
}

/// Serialized as `{"re": .., "im": .., "exact": "p/q"}`; `exact` is present
/// only for exact values.
impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let c = self.to_c64();
        let mut st = serializer.serialize_struct("Scalar", if self.is_exact() { 3 } else { 2 })?;
        st.serialize_field("re", &c.re)?;
        st.serialize_field("im", &c.im)?;
        if let Some(e) = self.exact_string() {
            st.serialize_field("exact", &e)?;
        }
        st.end()
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ScalarRepr {
    Int(i64),
    Float(f64),
    Text(String),
    Fraction { num: Box<ScalarRepr>, den: Box<ScalarRepr> },
    Complex {
        re: Box<ScalarRepr>,
        #[serde(default)]
        im: Option<Box<ScalarRepr>>,
        #[serde(default)]
        exact: Option<String>,
    },
}

impl ScalarRepr {
    fn into_scalar(self) -> Result<Scalar, String> {
        Ok(match self {
            ScalarRepr::Int(v) => Scalar::from_i64(v),
            ScalarRepr::Float(v) => Scalar::from_f64(v),
            ScalarRepr::Text(t) => parse_complex_text(&t).ok_or_else(|| format!("cannot parse number `{t}`"))?,
            ScalarRepr::Fraction { num, den } => {
                let n = num.into_scalar()?;
                let d = den.into_scalar()?;
                n.checked_div(&d).ok_or("zero denominator")?
            }
            ScalarRepr::Complex { re, im, exact } => {
                if let Some(t) = exact {
                    if let Some(v) = parse_complex_text(&t) {
                        return Ok(v);
                    }
                }
                let re = re.into_scalar()?;
                match im {
                    Some(im) => &re + &(&im.into_scalar()? * &Scalar::i()),
                    None => re,
                }
            }
        })
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        ScalarRepr::deserialize(deserializer)?
            .into_scalar()
            .map_err(serde::de::Error::custom)
    }
}

/// Parses `p/q`, decimals, and the exact forms produced by
/// [`Scalar::exact_string`] (`a + b*i`, `a - b*i`, `b*i`, `i`, `-i`).
pub fn parse_complex_text(t: &str) -> Option<Scalar> {
    let t = t.trim();
    if let Ok(v) = t.parse::<Scalar>() {
        return Some(v);
    }
    let imag = |s: &str| -> Option<Scalar> {
        let s = s.trim();
        let body = s.strip_suffix('i')?.trim_end();
        let body = body.strip_suffix('*').unwrap_or(body).trim();
        let coef = match body {
            "" | "+" => Scalar::one(),
            "-" => -Scalar::one(),
            b => b.parse::<Scalar>().ok()?,
        };
        Some(&coef * &Scalar::i())
    };
    if let Some(v) = imag(t) {
        return Some(v);
    }
    for (pos, ch) in t.char_indices().skip(1) {
        if (ch == '+' || ch == '-') && !t[..pos].trim_end().ends_with(['e', 'E']) {
            let re = t[..pos].trim().parse::<Scalar>().ok()?;
            let im = imag(&t[pos..].replace(' ', ""))?;
            return Some(&re + &im);
        }
    }
    None
}

/// `n!` as a big integer.
pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |a, k| a * BigInt::from(k))
}

/// Binomial coefficient `C(n, k)`.
pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Greatest common divisor of two big integers (nonnegative).
pub fn gcd(a: &BigInt, b: &BigInt) -> BigInt {
    a.gcd(b)
}
