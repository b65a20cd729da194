//! Exact arithmetic for square-root-valued matrix elements.
//!
//! An [`AlgebraicValue`] is a finite sum `Σ q_r √r` with rational `q_r` and
//! square-free positive integer radicands `r`. Square roots of distinct
//! square-free integers are linearly independent over the rationals, so the
//! canonical term map decides equality exactly.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Exact rational number with arbitrary-precision numerator and denominator.
pub type Rational = BigRational;

/// Trial-division bound for square-free reduction of radicands.
const TRIAL_LIMIT: u64 = 1 << 22;

/// Errors raised by the exact arithmetic layer.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NumericError {
    #[error("square root of negative rational {0}")]
    NegativeRadicand(String),
    #[error("operation requires a single-term value, got {0} terms")]
    NotSingleTerm(usize),
    #[error("division by zero")]
    DivisionByZero,
    #[error("malformed rational literal {0:?}")]
    BadRational(String),
    #[error("malformed algebraic value encoding: {0}")]
    BadEncoding(String),
}

/// Builds a rational from an integer.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Builds the rational `n/d`.
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"a"`, `"-a"` or `"a/b"` into a rational.
pub fn parse_rational(text: &str) -> Result<Rational, NumericError> {
    let bad = || NumericError::BadRational(text.to_string());
    let t = text.trim();
    match t.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(t.parse().map_err(|_| bad())?)),
    }
}

/// Formats a rational as `"a"` or `"a/b"`.
pub fn format_rational(q: &Rational) -> String {
    q.to_string()
}

/// Splits `n = s² · t` with `t` square-free; returns `(s, t)`.
///
/// Trial division runs up to `TRIAL_LIMIT`; a cofactor above the limit that is
/// not a perfect square is kept as is, which is square-free unless it has two
/// repeated prime factors beyond the limit.
pub fn square_free_split(n: &BigUint) -> (BigUint, BigUint) {
    if n.is_zero() {
        return (BigUint::zero(), BigUint::one());
    }
    let mut rest = n.clone();
    let mut square = BigUint::one();
    let mut free = BigUint::one();
    let mut p: u64 = 2;
    while p <= TRIAL_LIMIT {
        let pb = BigUint::from(p);
        if &pb * &pb > rest {
            break;
        }
        let mut exp = 0u32;
        while (&rest % &pb).is_zero() {
            rest /= &pb;
            exp += 1;
        }
        if exp > 0 {
            square *= pb.pow(exp / 2);
            if exp % 2 == 1 {
                free *= &pb;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest > BigUint::one() {
        let root = rest.sqrt();
        if &root * &root == rest {
            square *= root;
        } else {
            free *= rest;
        }
    }
    (square, free)
}

/// Exact value `Σ coeff · √radicand`, canonical by construction.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct AlgebraicValue {
    terms: BTreeMap<BigUint, Rational>,
}

impl AlgebraicValue {
    /// The value 0.
    pub fn zero() -> Self {
        Self::default()
    }

    /// The value 1.
    pub fn one() -> Self {
        Self::from_rational(Rational::one())
    }

    /// Embeds a rational.
    pub fn from_rational(q: Rational) -> Self {
        let mut v = Self::zero();
        v.push(BigUint::one(), q);
        v
    }

    /// Embeds an integer.
    pub fn from_int(n: i64) -> Self {
        Self::from_rational(rat(n))
    }

    /// Nonnegative square root of a nonnegative rational.
    pub fn sqrt_of(q: &Rational) -> Result<Self, NumericError> {
        if q.is_negative() {
            return Err(NumericError::NegativeRadicand(q.to_string()));
        }
        if q.is_zero() {
            return Ok(Self::zero());
        }
        // √(p/d) = √(p·d) / d
        let p = q.numer().magnitude();
        let d = q.denom().magnitude();
        let (s, t) = square_free_split(&(p * d));
        let coeff = Rational::new(BigInt::from(s), BigInt::from(d.clone()));
        let mut v = Self::zero();
        v.push(t, coeff);
        Ok(v)
    }

    /// `q · √s` for a rational `q` and a nonnegative rational `s`.
    pub fn scaled_sqrt(q: &Rational, s: &Rational) -> Result<Self, NumericError> {
        Ok(Self::sqrt_of(s)?.scale(q))
    }

    /// `sign · √|square|`: the inverse of [`AlgebraicValue::signum_and_square`].
    pub fn from_signed_square(sign: i8, square: &Rational) -> Result<Self, NumericError> {
        let root = Self::sqrt_of(&square.abs())?;
        Ok(match sign.signum() {
            0 => Self::zero(),
            1 => root,
            _ => -root,
        })
    }

    fn push(&mut self, radicand: BigUint, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        let slot = self.terms.entry(radicand).or_insert_with(Rational::zero);
        *slot += coeff;
        if slot.is_zero() {
            self.terms.retain(|_, c| !c.is_zero());
        }
    }

    /// Number of stored terms.
    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Iterates `(radicand, coefficient)` in increasing radicand order.
    pub fn terms(&self) -> impl Iterator<Item = (&BigUint, &Rational)> {
        self.terms.iter()
    }

    /// Exact zero test.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Returns the rational value when there is no irrational part.
    pub fn as_rational(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&BigUint::one()).cloned(),
            _ => None,
        }
    }

    /// Multiplies by a rational.
    pub fn scale(&self, q: &Rational) -> Self {
        if q.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(r, c)| (r.clone(), c * q)).collect(),
        }
    }

    /// Sign and square of a single-term value.
    pub fn signum_and_square(&self) -> Result<(i8, Rational), NumericError> {
        match self.terms.len() {
            0 => Ok((0, Rational::zero())),
            1 => {
                let (r, c) = self.terms.iter().next().expect("one term");
                let sign = if c.is_negative() { -1 } else { 1 };
                let r = Rational::from_integer(BigInt::from(r.clone()));
                Ok((sign, c * c * r))
            }
            n => Err(NumericError::NotSingleTerm(n)),
        }
    }

    /// Sign of the value; exact for single-term values, via `to_f64` otherwise.
    pub fn signum(&self) -> i8 {
        match self.signum_and_square() {
            Ok((s, _)) => s,
            Err(_) => {
                let f = self.to_f64();
                if f > 0.0 {
                    1
                } else if f < 0.0 {
                    -1
                } else {
                    0
                }
            }
        }
    }

    /// Multiplicative inverse of a nonzero single-term value.
    pub fn inverse(&self) -> Result<Self, NumericError> {
        if self.is_zero() {
            return Err(NumericError::DivisionByZero);
        }
        if self.terms.len() != 1 {
            return Err(NumericError::NotSingleTerm(self.terms.len()));
        }
        let (r, c) = self.terms.iter().next().expect("one term");
        // 1/(c√r) = √r / (c r)
        let denom = c * Rational::from_integer(BigInt::from(r.clone()));
        let mut v = Self::zero();
        v.push(r.clone(), denom.recip());
        Ok(v)
    }

    /// Division by a nonzero single-term value.
    pub fn div_single(&self, other: &Self) -> Result<Self, NumericError> {
        Ok(self * &other.inverse()?)
    }

    /// Double-precision approximation, summing per-term roundings.
    pub fn to_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(r, c)| rational_to_f64(c) * biguint_to_f64(r).sqrt())
            .sum()
    }

    /// Encodes as `[numerator, denominator, radicand]` triples.
    pub fn to_triples(&self) -> Vec<(BigInt, BigInt, BigUint)> {
        self.terms
            .iter()
            .map(|(r, c)| (c.numer().clone(), c.denom().clone(), r.clone()))
            .collect()
    }

    /// Decodes `[numerator, denominator, radicand]` triples, canonicalizing.
    pub fn from_triples(
        triples: impl IntoIterator<Item = (BigInt, BigInt, BigUint)>,
    ) -> Result<Self, NumericError> {
        let mut v = Self::zero();
        for (n, d, r) in triples {
            if d.is_zero() {
                return Err(NumericError::DivisionByZero);
            }
            if r.is_zero() {
                return Err(NumericError::BadEncoding("zero radicand".into()));
            }
            let (s, t) = square_free_split(&r);
            let coeff = Rational::new(n, d) * Rational::from_integer(BigInt::from(s));
            v.push(t, coeff);
        }
        Ok(v)
    }
}

/// Lossy conversion of a rational to `f64` that survives huge operands.
pub fn rational_to_f64(q: &Rational) -> f64 {
    if let Some(f) = q.to_f64() {
        if f.is_finite() {
            return f;
        }
    }
    let n = q.numer().to_f64().unwrap_or(f64::NAN);
    let d = q.denom().to_f64().unwrap_or(f64::NAN);
    n / d
}

fn biguint_to_f64(n: &BigUint) -> f64 {
    n.to_f64().unwrap_or(f64::INFINITY)
}

impl fmt::Debug for AlgebraicValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for AlgebraicValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (r, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            if r.is_one() {
                write!(f, "{c}")?;
            } else if c.is_one() {
                write!(f, "√{r}")?;
            } else {
                write!(f, "{c}·√{r}")?;
            }
        }
        Ok(())
    }
}

impl From<Rational> for AlgebraicValue {
    fn from(q: Rational) -> Self {
        Self::from_rational(q)
    }
}

impl Add for &AlgebraicValue {
    type Output = AlgebraicValue;
    fn add(self, rhs: &AlgebraicValue) -> AlgebraicValue {
        let mut out = self.clone();
        for (r, c) in &rhs.terms {
            out.push(r.clone(), c.clone());
        }
        out
    }
}

impl Add for AlgebraicValue {
    type Output = AlgebraicValue;
    fn add(self, rhs: AlgebraicValue) -> AlgebraicValue {
        &self + &rhs
    }
}

impl Sub for &AlgebraicValue {
    type Output = AlgebraicValue;
    fn sub(self, rhs: &AlgebraicValue) -> AlgebraicValue {
        let mut out = self.clone();
        for (r, c) in &rhs.terms {
            out.push(r.clone(), -c.clone());
        }
        out
    }
}

impl Sub for AlgebraicValue {
    type Output = AlgebraicValue;
    fn sub(self, rhs: AlgebraicValue) -> AlgebraicValue {
        &self - &rhs
    }
}

impl Neg for AlgebraicValue {
    type Output = AlgebraicValue;
    fn neg(self) -> AlgebraicValue {
        Self {
            terms: self.terms.into_iter().map(|(r, c)| (r, -c)).collect(),
        }
    }
}

impl Neg for &AlgebraicValue {
    type Output = AlgebraicValue;
    fn neg(self) -> AlgebraicValue {
        -(self.clone())
    }
}

impl Mul for &AlgebraicValue {
    type Output = AlgebraicValue;
    fn mul(self, rhs: &AlgebraicValue) -> AlgebraicValue {
        let mut out = AlgebraicValue::zero();
        for (r, c) in &self.terms {
            for (s, d) in &rhs.terms {
                // √r·√s = g·√((r/g)(s/g)) with g = gcd(r, s); the product of
                // coprime square-free factors is square-free.
                let g = r.gcd(s);
                let radicand = (r / &g) * (s / &g);
                let coeff = c * d * Rational::from_integer(BigInt::from_biguint(Sign::Plus, g));
                out.push(radicand, coeff);
            }
        }
        out
    }
}

impl Mul for AlgebraicValue {
    type Output = AlgebraicValue;
    fn mul(self, rhs: AlgebraicValue) -> AlgebraicValue {
        &self * &rhs
    }
}

/// Serialized form of a single integer: JSON number when it fits in 64 bits,
/// decimal string otherwise.
fn int_to_json(n: &BigInt) -> serde_json::Value {
    if let Some(v) = n.to_i64() {
        serde_json::Value::from(v)
    } else if let Some(v) = n.to_u64() {
        serde_json::Value::from(v)
    } else {
        serde_json::Value::String(n.to_string())
    }
}

fn int_from_json(v: &serde_json::Value) -> Result<BigInt, NumericError> {
    match v {
        serde_json::Value::Number(n) => n
            .to_string()
            .parse()
            .map_err(|_| NumericError::BadEncoding(n.to_string())),
        serde_json::Value::String(s) => s
            .parse()
            .map_err(|_| NumericError::BadEncoding(s.clone())),
        other => Err(NumericError::BadEncoding(other.to_string())),
    }
}

impl AlgebraicValue {
    /// JSON encoding: list of `[num, den, radicand]` sorted by radicand.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.to_triples()
                .into_iter()
                .map(|(n, d, r)| {
                    serde_json::Value::Array(vec![
                        int_to_json(&n),
                        int_to_json(&d),
                        int_to_json(&BigInt::from(r)),
                    ])
                })
                .collect(),
        )
    }

    /// Inverse of [`AlgebraicValue::to_json`].
    pub fn from_json(v: &serde_json::Value) -> Result<Self, NumericError> {
        let items = v
            .as_array()
            .ok_or_else(|| NumericError::BadEncoding("expected an array".into()))?;
        let mut triples = Vec::with_capacity(items.len());
        for item in items {
            let t = item
                .as_array()
                .filter(|t| t.len() == 3)
                .ok_or_else(|| NumericError::BadEncoding("expected a triple".into()))?;
            let n = int_from_json(&t[0])?;
            let d = int_from_json(&t[1])?;
            let r = int_from_json(&t[2])?;
            let r = r
                .to_biguint()
                .ok_or_else(|| NumericError::BadEncoding("negative radicand".into()))?;
            triples.push((n, d, r));
        }
        Self::from_triples(triples)
    }
}

impl Serialize for AlgebraicValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for AlgebraicValue {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(deserializer)?;
        Self::from_json(&v).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sq(n: i64) -> AlgebraicValue {
        AlgebraicValue::sqrt_of(&rat(n)).unwrap()
    }

    #[test]
    fn sqrt_of_canonicalizes() {
        assert_eq!(sq(8), sq(2).scale(&rat(2)));
        assert_eq!(
            AlgebraicValue::sqrt_of(&ratio(4, 9)).unwrap(),
            AlgebraicValue::from_rational(ratio(2, 3))
        );
        assert!(sq(0).is_zero());
        assert!(AlgebraicValue::sqrt_of(&rat(-1)).is_err());
    }

    #[test]
    fn ring_examples() {
        assert!((&sq(2) + &(-sq(2))).is_zero());
        assert_eq!(&sq(2) * &sq(3), sq(6));
        assert_eq!(&sq(2) * &sq(2), AlgebraicValue::from_int(2));
        assert_eq!(&sq(6) * &sq(10), sq(15).scale(&rat(2)));
    }

    #[test]
    fn signum_and_square_examples() {
        let v = sq(2).scale(&rat(-3));
        assert_eq!(v.signum_and_square().unwrap(), (-1, rat(18)));
        assert_eq!(AlgebraicValue::zero().signum_and_square().unwrap(), (0, rat(0)));
        let two_terms = &sq(2) + &AlgebraicValue::one();
        assert!(matches!(
            two_terms.signum_and_square(),
            Err(NumericError::NotSingleTerm(2))
        ));
        assert!((two_terms.to_f64() - 2.414_213_562_373_095).abs() < 1e-15);
    }

    #[test]
    fn inverse_and_division() {
        let v = sq(3).scale(&ratio(2, 5));
        assert_eq!(&v * &v.inverse().unwrap(), AlgebraicValue::one());
        assert!(AlgebraicValue::zero().inverse().is_err());
    }

    #[test]
    fn square_free_split_examples() {
        let split = |n: u64| {
            let (s, t) = square_free_split(&BigUint::from(n));
            (s.to_u64().unwrap(), t.to_u64().unwrap())
        };
        assert_eq!(split(72), (6, 2));
        assert_eq!(split(1), (1, 1));
        assert_eq!(split(49 * 11), (7, 11));
        // A prime square beyond the trial bound is still detected.
        let big = 4_294_967_291u64; // prime
        let (s, t) = square_free_split(&(BigUint::from(big) * BigUint::from(big) * 3u32));
        assert_eq!((s, t), (BigUint::from(big), BigUint::from(3u32)));
    }

    #[test]
    fn json_round_trip() {
        let v = &sq(2).scale(&ratio(-3, 7)) + &AlgebraicValue::from_rational(ratio(5, 2));
        let j = v.to_json();
        assert_eq!(j.to_string(), "[[5,2,1],[-3,7,2]]");
        assert_eq!(AlgebraicValue::from_json(&j).unwrap(), v);
    }

    fn small_rational() -> impl Strategy<Value = Rational> {
        (-40i64..40, 1i64..12).prop_map(|(n, d)| ratio(n, d))
    }

    fn value() -> impl Strategy<Value = AlgebraicValue> {
        prop::collection::vec((small_rational(), 1i64..30), 0..4).prop_map(|terms| {
            terms.into_iter().fold(AlgebraicValue::zero(), |acc, (q, r)| {
                &acc + &AlgebraicValue::scaled_sqrt(&q, &rat(r)).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn ring_axioms(a in value(), b in value(), c in value()) {
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert!((&a - &a).is_zero());
        }

        #[test]
        fn sqrt_squares_back(n in 0i64..100_000, d in 1i64..10_000) {
            let q = ratio(n, d);
            let s = AlgebraicValue::sqrt_of(&q).unwrap();
            prop_assert_eq!(&s * &s, AlgebraicValue::from_rational(q));
        }

        #[test]
        fn zero_test_agrees_with_float(a in value(), b in value()) {
            let v = &(&a * &b) - &(&b * &a);
            prop_assert!(v.is_zero());
            let w = &a + &b;
            prop_assert_eq!(w.is_zero(), w.to_f64().abs() < 1e-12);
        }

        #[test]
        fn json_round_trips(a in value()) {
            prop_assert_eq!(AlgebraicValue::from_json(&a.to_json()).unwrap(), a);
        }
    }
}
