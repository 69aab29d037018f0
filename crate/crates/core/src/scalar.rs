//! Exact coefficients: Laurent polynomials in `q^{1/d}` with integer
//! coefficients, their fraction field, the bar map `q -> q^-1` and the
//! usual quantum integers.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

// ---------------------------------------------------------------------------
// dense integer polynomials (private helper)
// ---------------------------------------------------------------------------

fn trim(v: &mut Vec<BigInt>) {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
}

fn poly_add(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let n = a.len().max(b.len());
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let x = a.get(i);
        let y = b.get(i);
        out.push(match (x, y) {
            (Some(x), Some(y)) => x + y,
            (Some(x), None) => x.clone(),
            (None, Some(y)) => y.clone(),
            (None, None) => unreachable!(),
        });
    }
    trim(&mut out);
    out
}

fn poly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(&mut out);
    out
}

fn poly_content(a: &[BigInt]) -> BigInt {
    let mut g = BigInt::zero();
    for c in a {
        g = g.gcd(c);
        if g.is_one() {
            break;
        }
    }
    g
}

fn poly_div_scalar(a: &[BigInt], c: &BigInt) -> Vec<BigInt> {
    a.iter().map(|x| x / c).collect()
}

fn primitive_part(a: &[BigInt]) -> Vec<BigInt> {
    let c = poly_content(a);
    if c.is_zero() || c.is_one() {
        a.to_vec()
    } else {
        poly_div_scalar(a, &c)
    }
}

/// Pseudo-remainder of `a` by `b` (`b` nonzero).
fn poly_prem(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lb = &b[db];
    while r.len() > db && !r.is_empty() {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        // r <- lb * r - lr * q^(dr-db) * b
        for c in r.iter_mut() {
            *c *= lb;
        }
        let shift = dr - db;
        for (j, c) in b.iter().enumerate() {
            r[j + shift] -= &lr * c;
        }
        trim(&mut r);
        if r.len() > dr {
            unreachable!("pseudo-remainder failed to reduce degree");
        }
    }
    r
}

/// Primitive gcd with positive leading coefficient.
fn poly_gcd(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut x = primitive_part(a);
    let mut y = primitive_part(b);
    if x.len() < y.len() {
        std::mem::swap(&mut x, &mut y);
    }
    while !y.is_empty() {
        let r = poly_prem(&x, &y);
        x = y;
        y = primitive_part(&r);
    }
    if x.last().is_some_and(|c| c.is_negative()) {
        for c in x.iter_mut() {
            *c = -c.clone();
        }
    }
    x
}

/// Exact division over the integers; `None` if `b` does not divide `a`.
fn poly_div_exact(a: &[BigInt], b: &[BigInt]) -> Option<Vec<BigInt>> {
    if b.is_empty() {
        return None;
    }
    if a.is_empty() {
        return Some(Vec::new());
    }
    if a.len() < b.len() {
        return None;
    }
    let db = b.len() - 1;
    let lb = &b[db];
    let mut r = a.to_vec();
    let mut quot = vec![BigInt::zero(); a.len() - db];
    for k in (0..quot.len()).rev() {
        let top = &r[k + db];
        if top.is_zero() {
            continue;
        }
        let (qk, rem) = top.div_rem(lb);
        if !rem.is_zero() {
            return None;
        }
        for (j, c) in b.iter().enumerate() {
            r[k + j] -= &qk * c;
        }
        quot[k] = qk;
    }
    if r.iter().any(|c| !c.is_zero()) {
        return None;
    }
    trim(&mut quot);
    Some(quot)
}

// ---------------------------------------------------------------------------
// exponents
// ---------------------------------------------------------------------------

/// An exponent `numer / denom` of `q`, as returned by [`RationalScalar::is_q_power`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct QExp {
    pub numer: i64,
    pub denom: u32,
}

impl QExp {
    pub fn integer(self) -> Option<i64> {
        (self.numer % self.denom as i64 == 0).then(|| self.numer / self.denom as i64)
    }
}

impl fmt::Display for QExp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = self.numer.gcd(&(self.denom as i64));
        let (n, d) = (self.numer / g, self.denom as i64 / g);
        if d == 1 {
            write!(f, "{n}")
        } else {
            write!(f, "{n}/{d}")
        }
    }
}

// ---------------------------------------------------------------------------
// Laurent polynomials
// ---------------------------------------------------------------------------

/// A Laurent polynomial `sum c_e q^{e/d}` with integer coefficients.
///
/// Stored densely from the lowest exponent numerator `low`; the zero element
/// has no coefficients. Equality is canonical for a fixed `denom`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LaurentScalar {
    denom: u32,
    low: i64,
    coeffs: Vec<BigInt>,
}

impl LaurentScalar {
    pub fn zero() -> Self {
        Self::zero_with_denom(1)
    }

    pub fn zero_with_denom(denom: u32) -> Self {
        assert!(denom > 0, "denominator must be positive");
        LaurentScalar { denom, low: 0, coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn from_int<T: Into<BigInt>>(c: T) -> Self {
        Self::monomial(c, 0)
    }

    /// `c * q^e` with `d = 1`.
    pub fn monomial<T: Into<BigInt>>(c: T, e: i64) -> Self {
        Self::monomial_with_denom(c, e, 1)
    }

    /// `c * q^{e/d}`.
    pub fn monomial_with_denom<T: Into<BigInt>>(c: T, e: i64, denom: u32) -> Self {
        let c = c.into();
        let mut out = Self::zero_with_denom(denom);
        if !c.is_zero() {
            out.low = e;
            out.coeffs.push(c);
        }
        out
    }

    /// `q^e` with `d = 1`.
    pub fn q_pow(e: i64) -> Self {
        Self::monomial(1, e)
    }

    pub fn from_terms<I, T>(denom: u32, terms: I) -> Self
    where
        I: IntoIterator<Item = (i64, T)>,
        T: Into<BigInt>,
    {
        let mut acc = Self::zero_with_denom(denom);
        for (e, c) in terms {
            acc += &Self::monomial_with_denom(c, e, denom);
        }
        acc
    }

    fn from_raw(denom: u32, low: i64, mut coeffs: Vec<BigInt>) -> Self {
        trim(&mut coeffs);
        let lead = coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead == coeffs.len() {
            return Self::zero_with_denom(denom);
        }
        if lead > 0 {
            coeffs.drain(..lead);
        }
        LaurentScalar { denom, low: low + lead as i64, coeffs }
    }

    pub fn denom(&self) -> u32 {
        self.denom
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.low == 0 && self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// Lowest exponent numerator, `None` for zero.
    pub fn min_exp(&self) -> Option<i64> {
        (!self.is_zero()).then_some(self.low)
    }

    pub fn max_exp(&self) -> Option<i64> {
        (!self.is_zero()).then(|| self.low + self.coeffs.len() as i64 - 1)
    }

    /// Coefficient of `q^{e/d}`.
    pub fn coeff(&self, e: i64) -> BigInt {
        if e < self.low {
            return BigInt::zero();
        }
        self.coeffs.get((e - self.low) as usize).cloned().unwrap_or_default()
    }

    pub fn constant_term(&self) -> BigInt {
        self.coeff(0)
    }

    /// Nonzero terms `(exponent numerator, coefficient)` in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigInt)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, c)| (self.low + i as i64, c))
    }

    /// The bar map `q^{1/d} -> q^{-1/d}`.
    pub fn bar(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = self.coeffs.clone();
        coeffs.reverse();
        LaurentScalar { denom: self.denom, low: -self.max_exp().unwrap(), coeffs }
    }

    pub fn is_bar_invariant(&self) -> bool {
        *self == self.bar()
    }

    /// `Some(e)` iff `self == q^{e/d}`.
    pub fn is_q_power(&self) -> Option<i64> {
        (self.coeffs.len() == 1 && self.coeffs[0].is_one()).then_some(self.low)
    }

    /// Multiply by `q^{e/d}`.
    pub fn shift(&self, e: i64) -> Self {
        let mut out = self.clone();
        if !out.is_zero() {
            out.low += e;
        }
        out
    }

    /// Keep only terms with exponent strictly above zero.
    pub fn positive_part(&self) -> Self {
        Self::from_terms(self.denom, self.terms().filter(|(e, _)| *e > 0).map(|(e, c)| (e, c.clone())))
    }

    /// Whether every exponent is `>= 0` (membership in `Z[q^{1/d}]`).
    pub fn is_polynomial(&self) -> bool {
        self.is_zero() || self.low >= 0
    }

    /// Whether every exponent is `> 0` (membership in `q Z[q^{1/d}]`).
    pub fn in_q_ideal(&self) -> bool {
        self.is_zero() || self.low > 0
    }

    /// Re-express with a finer denominator `new_denom` (a multiple of the current one).
    pub fn with_denom(&self, new_denom: u32) -> Result<Self> {
        if new_denom % self.denom != 0 {
            return Err(Error::DenomMismatch(self.denom, new_denom));
        }
        let k = (new_denom / self.denom) as i64;
        Ok(Self::from_terms(new_denom, self.terms().map(|(e, c)| (e * k, c.clone()))))
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one_with_denom(self.denom);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    fn one_with_denom(denom: u32) -> Self {
        Self::monomial_with_denom(1, 0, denom)
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.denom != other.denom {
            Err(Error::DenomMismatch(self.denom, other.denom))
        } else {
            Ok(())
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        let low = self.low.min(other.low);
        let pad = |x: &Self| {
            let mut v = vec![BigInt::zero(); (x.low - low) as usize];
            v.extend(x.coeffs.iter().cloned());
            v
        };
        Ok(Self::from_raw(self.denom, low, poly_add(&pad(self), &pad(other))))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero_with_denom(self.denom));
        }
        Ok(Self::from_raw(self.denom, self.low + other.low, poly_mul(&self.coeffs, &other.coeffs)))
    }

    /// Exact quotient in the Laurent ring, `None` when `other` does not divide `self`.
    pub fn div_exact(&self, other: &Self) -> Option<Self> {
        if self.denom != other.denom || other.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(self.clone());
        }
        let quot = poly_div_exact(&self.coeffs, &other.coeffs)?;
        Some(Self::from_raw(self.denom, self.low - other.low, quot))
    }

    /// Value at `q = 1`.
    pub fn eval_at_one(&self) -> BigInt {
        self.coeffs.iter().sum()
    }
}

impl Default for LaurentScalar {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<i64> for LaurentScalar {
    fn from(c: i64) -> Self {
        Self::from_int(c)
    }
}

macro_rules! laurent_binop {
    ($tr:ident, $f:ident, $checked:ident) => {
        impl $tr<&LaurentScalar> for &LaurentScalar {
            type Output = LaurentScalar;
            fn $f(self, rhs: &LaurentScalar) -> LaurentScalar {
                self.$checked(rhs).expect("incompatible exponent denominators")
            }
        }
        impl $tr<LaurentScalar> for LaurentScalar {
            type Output = LaurentScalar;
            fn $f(self, rhs: LaurentScalar) -> LaurentScalar {
                (&self).$f(&rhs)
            }
        }
    };
}

impl LaurentScalar {
    fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&-other)
    }
}

laurent_binop!(Add, add, checked_add);
laurent_binop!(Sub, sub, checked_sub);
laurent_binop!(Mul, mul, checked_mul);

impl Neg for &LaurentScalar {
    type Output = LaurentScalar;
    fn neg(self) -> LaurentScalar {
        LaurentScalar { denom: self.denom, low: self.low, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Neg for LaurentScalar {
    type Output = LaurentScalar;
    fn neg(self) -> LaurentScalar {
        -&self
    }
}

impl AddAssign<&LaurentScalar> for LaurentScalar {
    fn add_assign(&mut self, rhs: &LaurentScalar) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&LaurentScalar> for LaurentScalar {
    fn sub_assign(&mut self, rhs: &LaurentScalar) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&LaurentScalar> for LaurentScalar {
    fn mul_assign(&mut self, rhs: &LaurentScalar) {
        *self = &*self * rhs;
    }
}

fn fmt_exp(f: &mut fmt::Formatter<'_>, e: i64, d: u32) -> fmt::Result {
    let x = QExp { numer: e, denom: d };
    if e == 0 {
        Ok(())
    } else if x.integer() == Some(1) {
        write!(f, "q")
    } else if x.integer().is_some() {
        write!(f, "q^{x}")
    } else {
        write!(f, "q^({x})")
    }
}

impl fmt::Display for LaurentScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms().collect::<Vec<_>>().into_iter().rev() {
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            if e == 0 {
                write!(f, "{a}")?;
            } else {
                if !a.is_one() {
                    write!(f, "{a}*")?;
                }
                fmt_exp(f, e, self.denom)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// JSON form: `{"d": 1, "terms": [[1, 1], [-1, 1]]}`, exponents descending.
#[derive(Serialize, Deserialize)]
struct LaurentJson {
    d: u32,
    terms: Vec<(i64, serde_json::Value)>,
}

fn bigint_to_json(c: &BigInt) -> serde_json::Value {
    match c.to_i64() {
        Some(v) => serde_json::Value::from(v),
        None => serde_json::Value::String(c.to_string()),
    }
}

fn bigint_from_json(v: &serde_json::Value) -> Option<BigInt> {
    match v {
        serde_json::Value::Number(n) => n.as_i64().map(BigInt::from),
        serde_json::Value::String(s) => s.parse().ok(),
        _ => None,
    }
}

impl Serialize for LaurentScalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut terms: Vec<_> = self.terms().map(|(e, c)| (e, bigint_to_json(c))).collect();
        terms.reverse();
        LaurentJson { d: self.denom, terms }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for LaurentScalar {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let j = LaurentJson::deserialize(de)?;
        if j.d == 0 {
            return Err(D::Error::custom("d must be positive"));
        }
        let mut terms = Vec::with_capacity(j.terms.len());
        for (e, c) in &j.terms {
            terms.push((*e, bigint_from_json(c).ok_or_else(|| D::Error::custom("bad coefficient"))?));
        }
        Ok(LaurentScalar::from_terms(j.d, terms))
    }
}

// ---------------------------------------------------------------------------
// fraction field
// ---------------------------------------------------------------------------

/// An element of the fraction field of [`LaurentScalar`].
///
/// Canonical form: the denominator is a polynomial with nonzero constant
/// term and positive leading coefficient, numerator and denominator are
/// coprime, and their integer contents are coprime. Two values are equal
/// iff their canonical forms are identical.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalScalar {
    num: LaurentScalar,
    den: LaurentScalar,
}

impl RationalScalar {
    pub fn zero() -> Self {
        LaurentScalar::zero().into()
    }

    pub fn one() -> Self {
        LaurentScalar::one().into()
    }

    pub fn from_int(c: i64) -> Self {
        LaurentScalar::from_int(c).into()
    }

    pub fn q_pow(e: i64) -> Self {
        LaurentScalar::q_pow(e).into()
    }

    pub fn new(num: LaurentScalar, den: LaurentScalar) -> Result<Self> {
        num.check(&den)?;
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::normalize(num, den))
    }

    fn normalize(num: LaurentScalar, den: LaurentScalar) -> Self {
        let d = num.denom;
        if num.is_zero() {
            return RationalScalar { num, den: LaurentScalar::one_with_denom(d) };
        }
        let num_low = num.low - den.low;
        let (mut n, mut m) = (num.coeffs, den.coeffs);
        if m.len() > 1 {
            let g = poly_gcd(&n, &m);
            if g.len() > 1 {
                n = poly_div_exact(&n, &g).expect("gcd divides numerator");
                m = poly_div_exact(&m, &g).expect("gcd divides denominator");
            }
        }
        let c = poly_content(&n).gcd(&poly_content(&m));
        if !c.is_one() {
            n = poly_div_scalar(&n, &c);
            m = poly_div_scalar(&m, &c);
        }
        if m.last().unwrap().is_negative() {
            n.iter_mut().for_each(|x| *x = -x.clone());
            m.iter_mut().for_each(|x| *x = -x.clone());
        }
        RationalScalar {
            num: LaurentScalar::from_raw(d, num_low, n),
            den: LaurentScalar::from_raw(d, 0, m),
        }
    }

    pub fn numer(&self) -> &LaurentScalar {
        &self.num
    }

    pub fn denom_poly(&self) -> &LaurentScalar {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    /// The value as a Laurent polynomial, if it is one.
    pub fn as_laurent(&self) -> Option<&LaurentScalar> {
        self.den.is_one().then_some(&self.num)
    }

    pub fn to_laurent(&self) -> Option<LaurentScalar> {
        self.as_laurent().cloned()
    }

    pub fn bar(&self) -> Self {
        Self::normalize(self.num.bar(), self.den.bar())
    }

    /// `Some(m)` iff `self == q^m` exactly.
    pub fn is_q_power(&self) -> Option<QExp> {
        let e = self.as_laurent()?.is_q_power()?;
        Some(QExp { numer: e, denom: self.num.denom })
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::normalize(self.den.clone(), self.num.clone()))
    }

    pub fn shift(&self, e: i64) -> Self {
        RationalScalar { num: self.num.shift(e), den: self.den.clone() }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Order of vanishing at `q = 0` (lowest exponent of the Laurent expansion).
    pub fn valuation(&self) -> Option<i64> {
        self.num.min_exp()
    }

    /// Value at `q = 0` for elements without a pole there.
    pub fn value_at_zero(&self) -> Option<BigRational> {
        match self.valuation() {
            None => Some(BigRational::zero()),
            Some(v) if v > 0 => Some(BigRational::zero()),
            Some(0) => Some(BigRational::new(self.num.coeff(0), self.den.coeff(0))),
            _ => None,
        }
    }
}

impl From<LaurentScalar> for RationalScalar {
    fn from(num: LaurentScalar) -> Self {
        let d = num.denom;
        RationalScalar { num, den: LaurentScalar::one_with_denom(d) }
    }
}

impl From<i64> for RationalScalar {
    fn from(c: i64) -> Self {
        Self::from_int(c)
    }
}

impl Default for RationalScalar {
    fn default() -> Self {
        Self::zero()
    }
}

impl Add<&RationalScalar> for &RationalScalar {
    type Output = RationalScalar;
    fn add(self, rhs: &RationalScalar) -> RationalScalar {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            let num = &self.num + &rhs.num;
            if self.den.is_one() {
                return RationalScalar { num, den: self.den.clone() };
            }
            return RationalScalar::normalize(num, self.den.clone());
        }
        let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
        RationalScalar::normalize(num, &self.den * &rhs.den)
    }
}

impl Sub<&RationalScalar> for &RationalScalar {
    type Output = RationalScalar;
    fn sub(self, rhs: &RationalScalar) -> RationalScalar {
        self + &(-rhs)
    }
}

impl Mul<&RationalScalar> for &RationalScalar {
    type Output = RationalScalar;
    fn mul(self, rhs: &RationalScalar) -> RationalScalar {
        if self.is_zero() || rhs.is_zero() {
            return RationalScalar::zero_like(self);
        }
        if self.den.is_one() && rhs.den.is_one() {
            return RationalScalar { num: &self.num * &rhs.num, den: self.den.clone() };
        }
        RationalScalar::normalize(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl Div<&RationalScalar> for &RationalScalar {
    type Output = RationalScalar;
    fn div(self, rhs: &RationalScalar) -> RationalScalar {
        self * &rhs.inv().expect("division by zero")
    }
}

impl RationalScalar {
    fn zero_like(x: &Self) -> Self {
        LaurentScalar::zero_with_denom(x.num.denom).into()
    }
}

impl Neg for &RationalScalar {
    type Output = RationalScalar;
    fn neg(self) -> RationalScalar {
        RationalScalar { num: -&self.num, den: self.den.clone() }
    }
}

impl Neg for RationalScalar {
    type Output = RationalScalar;
    fn neg(self) -> RationalScalar {
        -&self
    }
}

macro_rules! rational_owned {
    ($tr:ident, $f:ident) => {
        impl $tr<RationalScalar> for RationalScalar {
            type Output = RationalScalar;
            fn $f(self, rhs: RationalScalar) -> RationalScalar {
                (&self).$f(&rhs)
            }
        }
        impl $tr<&RationalScalar> for RationalScalar {
            type Output = RationalScalar;
            fn $f(self, rhs: &RationalScalar) -> RationalScalar {
                (&self).$f(rhs)
            }
        }
    };
}

rational_owned!(Add, add);
rational_owned!(Sub, sub);
rational_owned!(Mul, mul);
rational_owned!(Div, div);

impl AddAssign<&RationalScalar> for RationalScalar {
    fn add_assign(&mut self, rhs: &RationalScalar) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&RationalScalar> for RationalScalar {
    fn sub_assign(&mut self, rhs: &RationalScalar) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&RationalScalar> for RationalScalar {
    fn mul_assign(&mut self, rhs: &RationalScalar) {
        *self = &*self * rhs;
    }
}

impl fmt::Display for RationalScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for RationalScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[derive(Serialize, Deserialize)]
struct RationalJson {
    num: LaurentScalar,
    den: LaurentScalar,
}

impl Serialize for RationalScalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.den.is_one() {
            self.num.serialize(s)
        } else {
            RationalJson { num: self.num.clone(), den: self.den.clone() }.serialize(s)
        }
    }
}

impl<'de> Deserialize<'de> for RationalScalar {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(de)?;
        if v.get("num").is_some() {
            let j: RationalJson = serde_json::from_value(v).map_err(D::Error::custom)?;
            RationalScalar::new(j.num, j.den).map_err(D::Error::custom)
        } else {
            let l: LaurentScalar = serde_json::from_value(v).map_err(D::Error::custom)?;
            Ok(l.into())
        }
    }
}

impl PartialOrd for QExp {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QExp {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.numer as i128 * other.denom as i128).cmp(&(other.numer as i128 * self.denom as i128))
    }
}

// ---------------------------------------------------------------------------
// quantum combinatorics
// ---------------------------------------------------------------------------

/// `[n]_{q^step} = (q^{step n} - q^{-step n}) / (q^step - q^{-step})`.
pub fn qint(n: i64, step: i64) -> Result<LaurentScalar> {
    if n < 0 {
        return Err(Error::NegativeArgument(n));
    }
    Ok(LaurentScalar::from_terms(1, (0..n).map(|k| (step * (n - 1 - 2 * k), 1))))
}

/// `[n]_{q^step}!`.
pub fn qfact(n: i64, step: i64) -> Result<LaurentScalar> {
    if n < 0 {
        return Err(Error::NegativeArgument(n));
    }
    let mut acc = LaurentScalar::one();
    for k in 1..=n {
        acc = &acc * &qint(k, step)?;
    }
    Ok(acc)
}

/// Gaussian binomial `[n choose k]_{q^step}` (a bar-invariant Laurent polynomial).
pub fn qbinom(n: i64, k: i64, step: i64) -> Result<LaurentScalar> {
    if n < 0 || k < 0 {
        return Err(Error::NegativeArgument(n.min(k)));
    }
    if k > n {
        return Ok(LaurentScalar::zero());
    }
    let num = qfact(n, step)?;
    let den = &qfact(k, step)? * &qfact(n - k, step)?;
    Ok(num.div_exact(&den).expect("quantum binomial is integral"))
}

/// `phi_m(z) = prod_{k=1}^m (1 - z^k)`.
pub fn phi(m: i64, z: &LaurentScalar) -> Result<LaurentScalar> {
    if m < 0 {
        return Err(Error::NegativeArgument(m));
    }
    let one = LaurentScalar::one_with_denom(z.denom);
    let mut acc = one.clone();
    let mut zk = one.clone();
    for _ in 0..m {
        zk = &zk * z;
        acc = &acc * &(&one - &zk);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(e: i64) -> LaurentScalar {
        LaurentScalar::q_pow(e)
    }

    #[test]
    fn bar_of_symmetric_is_fixed() {
        let x = &q(1) + &q(-1);
        assert_eq!(x.bar(), x);
    }

    #[test]
    fn difference_of_squares() {
        let one = LaurentScalar::one();
        let a = &one - &q(2);
        let b = &one + &q(2);
        assert_eq!(&a * &b, &one - &q(4));
    }

    #[test]
    fn half_exponents() {
        let x = LaurentScalar::monomial_with_denom(1, 1, 2);
        assert_eq!(x.bar(), LaurentScalar::monomial_with_denom(1, -1, 2));
        let r: RationalScalar = x.bar().into();
        assert_eq!(r.is_q_power(), Some(QExp { numer: -1, denom: 2 }));
        assert_eq!(r.is_q_power().unwrap().to_string(), "-1/2");
    }

    #[test]
    fn mixed_denominators_are_rejected() {
        let a = LaurentScalar::monomial_with_denom(1, 1, 2);
        let b = LaurentScalar::q_pow(1);
        assert!(matches!(a.checked_add(&b), Err(Error::DenomMismatch(2, 1))));
        assert!(matches!(a.checked_mul(&b), Err(Error::DenomMismatch(2, 1))));
        assert_eq!(b.with_denom(2).unwrap() + a.clone(), LaurentScalar::from_terms(2, [(2, 1), (1, 1)]));
    }

    #[test]
    fn quantum_integers() {
        assert_eq!(qint(2, 1).unwrap(), &q(1) + &q(-1));
        assert_eq!(qfact(0, 1).unwrap(), LaurentScalar::one());
        assert!(qint(-1, 1).is_err());
        let one = LaurentScalar::one();
        assert_eq!(phi(2, &q(2)).unwrap(), &(&one - &q(2)) * &(&one - &q(4)));
        assert!(qint(5, 2).unwrap().is_bar_invariant());
    }

    #[test]
    fn gaussian_binomials_have_nonnegative_numerators() {
        for n in 0..=8 {
            for k in 0..=n {
                let b = qbinom(n, k, 1).unwrap();
                assert!(b.is_bar_invariant());
                assert!(b.terms().all(|(_, c)| !c.is_negative()));
                assert_eq!(b.eval_at_one(), binom(n, k));
            }
        }
    }

    fn binom(n: i64, k: i64) -> BigInt {
        let mut acc = BigInt::one();
        for i in 0..k {
            acc = acc * (n - i) / (i + 1);
        }
        acc
    }

    #[test]
    fn q_power_detection() {
        assert_eq!(RationalScalar::q_pow(3).is_q_power().unwrap().numer, 3);
        let x: RationalScalar = (&LaurentScalar::one() + &q(1)).into();
        assert!(x.is_q_power().is_none());
        let y = RationalScalar::new(q(5) - q(1), q(2) - LaurentScalar::one()).unwrap();
        assert_eq!(y.is_q_power(), None);
        assert_eq!(y, RationalScalar::new(q(4) + q(2), q(1)).unwrap());
    }

    #[test]
    fn rational_canonical_form() {
        let one = LaurentScalar::one();
        let a = RationalScalar::new(&one - &q(4), &one - &q(2)).unwrap();
        assert_eq!(a, (&one + &q(2)).into());
        let b = RationalScalar::new(q(-3) * LaurentScalar::from_int(2), q(-1) * LaurentScalar::from_int(4)).unwrap();
        assert_eq!(b.numer(), &LaurentScalar::monomial(1, -2));
        assert_eq!(b.denom_poly(), &LaurentScalar::from_int(2));
        let c = RationalScalar::new(&one + &q(1), &one - &q(2)).unwrap();
        let d = RationalScalar::new(LaurentScalar::from_int(-1), &q(1) - &one).unwrap();
        assert_eq!(c, d);
        assert_eq!(&c * &c.inv().unwrap(), RationalScalar::one());
    }

    #[test]
    fn json_shape() {
        let x = &q(1) + &q(-1);
        assert_eq!(serde_json::to_string(&x).unwrap(), r#"{"d":1,"terms":[[1,1],[-1,1]]}"#);
        let back: LaurentScalar = serde_json::from_str(r#"{"d":1,"terms":[[1,1],[-1,1]]}"#).unwrap();
        assert_eq!(back, x);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn laurent() -> impl Strategy<Value = LaurentScalar> {
            proptest::collection::vec((-6i64..6, -5i64..5), 0..6).prop_map(|t| LaurentScalar::from_terms(1, t))
        }

        fn rational() -> impl Strategy<Value = RationalScalar> {
            (laurent(), laurent()).prop_filter_map("nonzero denominator", |(a, b)| RationalScalar::new(a, b).ok())
        }

        proptest! {
            #[test]
            fn bar_is_involutive_ring_map(a in laurent(), b in laurent()) {
                prop_assert_eq!(a.bar().bar(), a.clone());
                prop_assert_eq!((&a * &b).bar(), &a.bar() * &b.bar());
                prop_assert_eq!((&a + &b).bar(), &a.bar() + &b.bar());
            }

            #[test]
            fn rational_field_axioms(a in rational(), b in rational(), c in rational()) {
                prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
                prop_assert_eq!((&a * &b).bar(), &a.bar() * &b.bar());
                if !b.is_zero() {
                    prop_assert_eq!(&(&a / &b) * &b, a.clone());
                }
            }

            #[test]
            fn canonical_equality(a in laurent(), b in laurent(), c in laurent()) {
                prop_assume!(!b.is_zero() && !c.is_zero());
                let x = RationalScalar::new(a.clone(), b.clone()).unwrap();
                let y = RationalScalar::new(&a * &c, &b * &c).unwrap();
                prop_assert_eq!(x, y);
            }
        }
    }
}
