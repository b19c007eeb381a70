//! Exact numbers used for probabilities.
//!
//! Finite-poset probabilities are rationals. Limits on the ladder live in the
//! quadratic field Q(√5), so the exact type here is `a + b√5` with rational
//! `a`, `b`; a rational is simply a value with `b = 0`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// An element `rat + irr·√5` of Q(√5).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Surd5 {
    rat: BigRational,
    irr: BigRational,
}

impl Surd5 {
    pub fn new(rat: BigRational, irr: BigRational) -> Self {
        Self { rat, irr }
    }

    pub fn from_rational(r: BigRational) -> Self {
        Self { rat: r, irr: BigRational::zero() }
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_rational(BigRational::new(num.into(), den.into()))
    }

    pub fn from_counts(num: &BigUint, den: &BigUint) -> Self {
        Self::from_rational(BigRational::new(
            BigInt::from(num.clone()),
            BigInt::from(den.clone()),
        ))
    }

    pub fn zero() -> Self {
        Self::from_rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Self::from_rational(BigRational::one())
    }

    /// The golden-ratio conjugate φ = (√5 − 1)/2 ≈ 0.618.
    pub fn phi() -> Self {
        let half = BigRational::new(1.into(), 2.into());
        Self { rat: -half.clone(), irr: half }
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.rat
    }

    pub fn surd_part(&self) -> &BigRational {
        &self.irr
    }

    pub fn is_rational(&self) -> bool {
        self.irr.is_zero()
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        self.is_rational().then_some(&self.rat)
    }

    pub fn is_zero(&self) -> bool {
        self.rat.is_zero() && self.irr.is_zero()
    }

    pub fn conjugate(&self) -> Self {
        Self { rat: self.rat.clone(), irr: -self.irr.clone() }
    }

    /// `rat² − 5·irr²`; zero only for zero since √5 is irrational.
    pub fn norm(&self) -> BigRational {
        &self.rat * &self.rat - BigRational::from_integer(5.into()) * &self.irr * &self.irr
    }

    pub fn signum(&self) -> Ordering {
        let a = self.rat.cmp(&BigRational::zero());
        let b = self.irr.cmp(&BigRational::zero());
        match (a, b) {
            (Ordering::Equal, o) | (o, Ordering::Equal) => o,
            (x, y) if x == y => x,
            // opposite signs: compare rat² with 5·irr²
            (x, _) => {
                let r2 = &self.rat * &self.rat;
                let s2 = BigRational::from_integer(5.into()) * &self.irr * &self.irr;
                match r2.cmp(&s2) {
                    Ordering::Greater => x,
                    Ordering::Less => x.reverse(),
                    Ordering::Equal => Ordering::Equal,
                }
            }
        }
    }

    pub fn abs(&self) -> Self {
        if self.signum() == Ordering::Less {
            -self.clone()
        } else {
            self.clone()
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    pub fn checked_div(&self, other: &Self) -> Option<Self> {
        if other.is_zero() {
            return None;
        }
        let n = other.norm();
        let num = self * &other.conjugate();
        Some(Self { rat: num.rat / &n, irr: num.irr / n })
    }

    pub fn to_f64(&self) -> f64 {
        ratio_to_f64(&self.rat) + ratio_to_f64(&self.irr) * 5f64.sqrt()
    }

    /// Integer triple `(p, q, r)` with value `(p + q√5)/r`, `r > 0`, and
    /// `gcd(p, q, r) = 1`.
    pub fn to_triple(&self) -> (BigInt, BigInt, BigInt) {
        let r = self.rat.denom().lcm(self.irr.denom());
        let p = self.rat.numer() * (&r / self.rat.denom());
        let q = self.irr.numer() * (&r / self.irr.denom());
        let g = p.gcd(&q).gcd(&r);
        if g.is_zero() || g.is_one() {
            (p, q, r)
        } else {
            (p / &g, q / &g, r / g)
        }
    }

    pub fn from_triple(p: BigInt, q: BigInt, r: BigInt) -> Option<Self> {
        if r.is_zero() {
            return None;
        }
        Some(Self {
            rat: BigRational::new(p, r.clone()),
            irr: BigRational::new(q, r),
        })
    }
}

pub(crate) fn ratio_to_f64(r: &BigRational) -> f64 {
    if let Some(v) = r.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // fall back through a scaled integer division for huge operands
    let shift = (r.numer().bits().max(r.denom().bits()) as i64 - 60).max(0) as usize;
    let n = (r.numer() >> shift).to_f64().unwrap_or(0.0);
    let d = (r.denom() >> shift).to_f64().unwrap_or(1.0);
    n / d
}

impl Default for Surd5 {
    fn default() -> Self {
        Self::zero()
    }
}

impl PartialOrd for Surd5 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Surd5 {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum()
    }
}

impl From<BigRational> for Surd5 {
    fn from(r: BigRational) -> Self {
        Self::from_rational(r)
    }
}

impl Neg for Surd5 {
    type Output = Surd5;
    fn neg(self) -> Surd5 {
        Surd5 { rat: -self.rat, irr: -self.irr }
    }
}

impl<'a> Add<&'a Surd5> for &'a Surd5 {
    type Output = Surd5;
    fn add(self, o: &Surd5) -> Surd5 {
        Surd5 { rat: &self.rat + &o.rat, irr: &self.irr + &o.irr }
    }
}

impl<'a> Sub<&'a Surd5> for &'a Surd5 {
    type Output = Surd5;
    fn sub(self, o: &Surd5) -> Surd5 {
        Surd5 { rat: &self.rat - &o.rat, irr: &self.irr - &o.irr }
    }
}

impl<'a> Mul<&'a Surd5> for &'a Surd5 {
    type Output = Surd5;
    fn mul(self, o: &Surd5) -> Surd5 {
        if self.irr.is_zero() && o.irr.is_zero() {
            return Surd5 { rat: &self.rat * &o.rat, irr: BigRational::zero() };
        }
        let five = BigRational::from_integer(5.into());
        Surd5 {
            rat: &self.rat * &o.rat + five * &self.irr * &o.irr,
            irr: &self.rat * &o.irr + &self.irr * &o.rat,
        }
    }
}

impl Add for Surd5 {
    type Output = Surd5;
    fn add(self, o: Surd5) -> Surd5 {
        &self + &o
    }
}

impl Sub for Surd5 {
    type Output = Surd5;
    fn sub(self, o: Surd5) -> Surd5 {
        &self - &o
    }
}

impl Mul for Surd5 {
    type Output = Surd5;
    fn mul(self, o: Surd5) -> Surd5 {
        &self * &o
    }
}

impl fmt::Display for Surd5 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            return write!(f, "{}", self.rat);
        }
        let (p, q, r) = self.to_triple();
        if r.is_one() {
            write!(f, "{p} + {q}√5")
        } else {
            write!(f, "({p} + {q}√5)/{r}")
        }
    }
}

/// Exactness grade of a probability or of a measure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Grade {
    ExactRational,
    ExactQuadratic,
    Float,
    MonteCarlo,
}

impl Grade {
    pub fn is_exact(self) -> bool {
        matches!(self, Grade::ExactRational | Grade::ExactQuadratic)
    }

    /// Residual tolerance a checker applies at this grade.
    pub fn tolerance(self) -> f64 {
        match self {
            Grade::ExactRational | Grade::ExactQuadratic => 0.0,
            Grade::Float => 1e-12,
            Grade::MonteCarlo => 1e-2,
        }
    }

    pub fn combine(self, other: Grade) -> Grade {
        self.max(other)
    }
}

impl fmt::Display for Grade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Grade::ExactRational => "exact-rational",
            Grade::ExactQuadratic => "exact-quadratic",
            Grade::Float => "float",
            Grade::MonteCarlo => "monte-carlo",
        };
        f.write_str(s)
    }
}

/// A probability value: exact in Q(√5), or a float.
#[derive(Clone, Debug, PartialEq)]
pub enum Prob {
    Exact(Surd5),
    Float(f64),
}

impl Prob {
    pub fn zero() -> Self {
        Prob::Exact(Surd5::zero())
    }

    pub fn one() -> Self {
        Prob::Exact(Surd5::one())
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Prob::Exact(Surd5::from_ratio(num, den))
    }

    pub fn rational(r: BigRational) -> Self {
        Prob::Exact(Surd5::from_rational(r))
    }

    pub fn grade(&self) -> Grade {
        match self {
            Prob::Exact(s) if s.is_rational() => Grade::ExactRational,
            Prob::Exact(_) => Grade::ExactQuadratic,
            Prob::Float(_) => Grade::Float,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Prob::Exact(_))
    }

    pub fn exact(&self) -> Option<&Surd5> {
        match self {
            Prob::Exact(s) => Some(s),
            Prob::Float(_) => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Prob::Exact(s) => s.to_f64(),
            Prob::Float(x) => *x,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Prob::Exact(s) => s.is_zero(),
            Prob::Float(x) => *x == 0.0,
        }
    }

    pub fn is_positive(&self) -> bool {
        match self {
            Prob::Exact(s) => s.signum() == Ordering::Greater,
            Prob::Float(x) => *x > 0.0,
        }
    }

    pub fn add(&self, o: &Prob) -> Prob {
        match (self, o) {
            (Prob::Exact(a), Prob::Exact(b)) => Prob::Exact(a + b),
            _ => Prob::Float(self.to_f64() + o.to_f64()),
        }
    }

    pub fn sub(&self, o: &Prob) -> Prob {
        match (self, o) {
            (Prob::Exact(a), Prob::Exact(b)) => Prob::Exact(a - b),
            _ => Prob::Float(self.to_f64() - o.to_f64()),
        }
    }

    pub fn mul(&self, o: &Prob) -> Prob {
        match (self, o) {
            (Prob::Exact(a), Prob::Exact(b)) => Prob::Exact(a * b),
            _ => Prob::Float(self.to_f64() * o.to_f64()),
        }
    }

    /// `None` on division by an exact zero.
    pub fn div(&self, o: &Prob) -> Option<Prob> {
        match (self, o) {
            (Prob::Exact(a), Prob::Exact(b)) => a.checked_div(b).map(Prob::Exact),
            _ => {
                let d = o.to_f64();
                (d != 0.0).then(|| Prob::Float(self.to_f64() / d))
            }
        }
    }

    pub fn abs_diff(&self, o: &Prob) -> Prob {
        match (self, o) {
            (Prob::Exact(a), Prob::Exact(b)) => Prob::Exact((a - b).abs()),
            _ => Prob::Float((self.to_f64() - o.to_f64()).abs()),
        }
    }

    /// Ordering, exact when both sides are exact.
    pub fn cmp_value(&self, o: &Prob) -> Ordering {
        match (self, o) {
            (Prob::Exact(a), Prob::Exact(b)) => a.cmp(b),
            _ => self.to_f64().partial_cmp(&o.to_f64()).unwrap_or(Ordering::Equal),
        }
    }

    pub fn max(self, o: Prob) -> Prob {
        if o.cmp_value(&self) == Ordering::Greater {
            o
        } else {
            self
        }
    }

    pub fn sum<'a>(items: impl IntoIterator<Item = &'a Prob>) -> Prob {
        items.into_iter().fold(Prob::zero(), |acc, p| acc.add(p))
    }
}

impl fmt::Display for Prob {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Prob::Exact(s) => write!(f, "{s}"),
            Prob::Float(x) => write!(f, "{x}"),
        }
    }
}

impl From<Surd5> for Prob {
    fn from(s: Surd5) -> Self {
        Prob::Exact(s)
    }
}

/// Wire form of an exact or float value.
///
/// Rationals serialize as `{"num": "5", "den": "8"}`, quadratic values as
/// `{"p": "-1", "q": "1", "r": "2", "surd": 5}`, floats as `{"float": x}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ValueRecord {
    Rational { num: String, den: String },
    Quadratic { p: String, q: String, r: String, surd: u32 },
    Float { float: f64 },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ValueParseError {
    #[error("malformed integer `{0}`")]
    BadInteger(String),
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("unsupported surd {0}; only 5 is supported")]
    UnsupportedSurd(u32),
}

fn parse_int(s: &str) -> Result<BigInt, ValueParseError> {
    s.parse::<BigInt>().map_err(|_| ValueParseError::BadInteger(s.to_string()))
}

impl ValueRecord {
    pub fn from_surd(s: &Surd5) -> Self {
        if let Some(r) = s.as_rational() {
            ValueRecord::Rational { num: r.numer().to_string(), den: r.denom().to_string() }
        } else {
            let (p, q, r) = s.to_triple();
            ValueRecord::Quadratic {
                p: p.to_string(),
                q: q.to_string(),
                r: r.to_string(),
                surd: 5,
            }
        }
    }

    pub fn from_prob(p: &Prob) -> Self {
        match p {
            Prob::Exact(s) => Self::from_surd(s),
            Prob::Float(x) => ValueRecord::Float { float: *x },
        }
    }

    pub fn to_prob(&self) -> Result<Prob, ValueParseError> {
        match self {
            ValueRecord::Rational { num, den } => {
                let d = parse_int(den)?;
                if d.is_zero() {
                    return Err(ValueParseError::ZeroDenominator);
                }
                Ok(Prob::rational(BigRational::new(parse_int(num)?, d)))
            }
            ValueRecord::Quadratic { p, q, r, surd } => {
                if *surd != 5 {
                    return Err(ValueParseError::UnsupportedSurd(*surd));
                }
                Surd5::from_triple(parse_int(p)?, parse_int(q)?, parse_int(r)?)
                    .map(Prob::Exact)
                    .ok_or(ValueParseError::ZeroDenominator)
            }
            ValueRecord::Float { float } => Ok(Prob::Float(*float)),
        }
    }
}

/// Shorthand for an exact rational from big counts.
pub fn ratio_of(num: &BigUint, den: &BigUint) -> BigRational {
    BigRational::new(BigInt::from(num.clone()), BigInt::from(den.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn phi_satisfies_its_quadratic() {
        let phi = Surd5::phi();
        // φ² + φ = 1
        assert_eq!(&(&phi * &phi) + &phi, Surd5::one());
        assert!((phi.to_f64() - 0.6180339887498949).abs() < 1e-15);
    }

    #[test]
    fn phi_triple() {
        let (p, q, r) = Surd5::phi().to_triple();
        assert_eq!((p, q, r), (BigInt::from(-1), BigInt::from(1), BigInt::from(2)));
    }

    #[test]
    fn sign_of_mixed_terms() {
        let x = Surd5::new(BigRational::from_integer(3.into()), BigRational::from_integer((-1).into()));
        // 3 − √5 > 0
        assert_eq!(x.signum(), Ordering::Greater);
        let y = Surd5::new(BigRational::from_integer(2.into()), BigRational::from_integer((-1).into()));
        assert_eq!(y.signum(), Ordering::Less);
    }

    #[test]
    fn rational_record() {
        let rec = ValueRecord::from_prob(&Prob::ratio(5, 8));
        assert_eq!(serde_json::to_string(&rec).unwrap(), r#"{"num":"5","den":"8"}"#);
    }

    #[test]
    fn quadratic_record() {
        let rec = ValueRecord::from_prob(&Prob::Exact(Surd5::phi()));
        assert_eq!(
            serde_json::to_string(&rec).unwrap(),
            r#"{"p":"-1","q":"1","r":"2","surd":5}"#
        );
    }

    fn surd() -> impl Strategy<Value = Surd5> {
        (-50i64..50, 1i64..20, -50i64..50, 1i64..20).prop_map(|(a, b, c, d)| {
            Surd5::new(BigRational::new(a.into(), b.into()), BigRational::new(c.into(), d.into()))
        })
    }

    proptest! {
        #[test]
        fn record_round_trip(s in surd()) {
            let p = Prob::Exact(s);
            let json = serde_json::to_string(&ValueRecord::from_prob(&p)).unwrap();
            let back: ValueRecord = serde_json::from_str(&json).unwrap();
            prop_assert_eq!(back.to_prob().unwrap(), p);
        }

        #[test]
        fn division_inverts_multiplication(a in surd(), b in surd()) {
            prop_assume!(!b.is_zero());
            let q = (&a * &b).checked_div(&b).unwrap();
            prop_assert_eq!(q, a);
        }

        #[test]
        fn order_matches_floats(a in surd(), b in surd()) {
            let (x, y) = (a.to_f64(), b.to_f64());
            if (x - y).abs() > 1e-9 {
                prop_assert_eq!(a.cmp(&b), x.partial_cmp(&y).unwrap());
            }
        }
    }
}
