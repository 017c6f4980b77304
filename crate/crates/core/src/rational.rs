//! Exact rational numbers with an inline fast path.
//!
//! Values whose reduced numerator and denominator fit in `i64` are stored
//! inline and combined with `i128` intermediates; anything larger spills to a
//! heap-allocated [`BigRational`]. The representation is canonical (always
//! reduced, positive denominator, inline whenever it fits), so structural
//! equality and hashing agree with numeric equality.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

type BigRational = num_rational::BigRational;

#[derive(Clone)]
enum Repr {
    Small { num: i64, den: i64 },
    Big(Box<BigRational>),
}

/// An exact rational number.
#[derive(Clone)]
pub struct Rational(Repr);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseRationalError {
    #[error("empty rational literal")]
    Empty,
    #[error("invalid rational literal `{0}`")]
    Invalid(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    if a == 0 {
        return b;
    }
    if b == 0 {
        return a;
    }
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a << shift;
        }
    }
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    if a == 0 {
        return b;
    }
    if b == 0 {
        return a;
    }
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a << shift;
        }
    }
}

fn big_from_i128(v: i128) -> BigInt {
    BigInt::from(v)
}

impl Rational {
    pub const fn from_int(v: i64) -> Rational {
        Rational(Repr::Small { num: v, den: 1 })
    }

    pub fn zero() -> Rational {
        Rational::from_int(0)
    }

    pub fn one() -> Rational {
        Rational::from_int(1)
    }

    /// `num / den`, reduced. Panics on a zero denominator.
    pub fn new(num: i64, den: i64) -> Rational {
        assert!(den != 0, "rational with zero denominator");
        Rational::from_i128_pair(num as i128, den as i128)
    }

    pub fn from_bigints(num: BigInt, den: BigInt) -> Rational {
        Rational::from_big(BigRational::new(num, den))
    }

    fn from_big(r: BigRational) -> Rational {
        if let (Some(n), Some(d)) = (r.numer().to_i64(), r.denom().to_i64()) {
            Rational(Repr::Small { num: n, den: d })
        } else {
            Rational(Repr::Big(Box::new(r)))
        }
    }

    fn from_i128_pair(mut n: i128, mut d: i128) -> Rational {
        debug_assert!(d != 0);
        if d < 0 {
            // i128::MIN cannot occur: operands are products of i64 values.
            n = -n;
            d = -d;
        }
        if n == 0 {
            return Rational::from_int(0);
        }
        if d == 1 {
            if let Ok(n) = i64::try_from(n) {
                return Rational::from_int(n);
            }
        } else if let (Ok(un), Ok(ud)) = (u64::try_from(n.unsigned_abs()), u64::try_from(d)) {
            let g = gcd_u64(un, ud);
            let (un, ud) = (un / g, ud / g);
            n = if n < 0 { -(un as i128) } else { un as i128 };
            d = ud as i128;
        } else {
            let g = gcd_u128(n.unsigned_abs(), d as u128) as i128;
            if g > 1 {
                n /= g;
                d /= g;
            }
        }
        match (i64::try_from(n), i64::try_from(d)) {
            (Ok(n), Ok(d)) => Rational(Repr::Small { num: n, den: d }),
            _ => Rational(Repr::Big(Box::new(BigRational::new_raw(
                big_from_i128(n),
                big_from_i128(d),
            )))),
        }
    }

    fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small { num, den } => BigRational::new_raw(BigInt::from(*num), BigInt::from(*den)),
            Repr::Big(b) => (**b).clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Small { num, .. } => BigInt::from(*num),
            Repr::Big(b) => b.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Small { den, .. } => BigInt::from(*den),
            Repr::Big(b) => b.denom().clone(),
        }
    }

    /// Numerator and denominator when both fit in `i64`.
    pub fn as_small(&self) -> Option<(i64, i64)> {
        match &self.0 {
            Repr::Small { num, den } => Some((*num, *den)),
            Repr::Big(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small { num: 0, .. })
    }

    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Small { den, .. } => *den == 1,
            Repr::Big(b) => b.is_integer(),
        }
    }

    pub fn signum(&self) -> i32 {
        match &self.0 {
            Repr::Small { num, .. } => num.signum() as i32,
            Repr::Big(b) => match b.numer().sign() {
                Sign::Minus => -1,
                Sign::NoSign => 0,
                Sign::Plus => 1,
            },
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    pub fn abs(&self) -> Rational {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn recip(&self) -> Rational {
        match &self.0 {
            Repr::Small { num, den } => {
                assert!(*num != 0, "reciprocal of zero");
                Rational::from_i128_pair(*den as i128, *num as i128)
            }
            Repr::Big(b) => Rational::from_big(b.recip()),
        }
    }

    /// Integer power; negative exponents invert.
    pub fn pow(&self, exp: i32) -> Rational {
        if exp < 0 {
            return self.pow(-exp).recip();
        }
        let mut base = self.clone();
        let mut acc = Rational::one();
        let mut e = exp as u32;
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

    /// `2^exp` for any integer exponent.
    pub fn pow2(exp: i32) -> Rational {
        if exp >= 0 {
            Rational::from_bigints(BigInt::one() << exp as usize, BigInt::one())
        } else {
            Rational::from_bigints(BigInt::one(), BigInt::one() << (-exp) as usize)
        }
    }

    pub fn floor(&self) -> BigInt {
        let (n, d) = (self.numer(), self.denom());
        n.div_floor(&d)
    }

    pub fn ceil(&self) -> BigInt {
        let (n, d) = (self.numer(), self.denom());
        -((-n).div_floor(&d))
    }

    pub fn to_f64(&self) -> f64 {
        match &self.0 {
            Repr::Small { num, den } => *num as f64 / *den as f64,
            Repr::Big(b) => {
                // Scale to keep precision when both parts are huge.
                let nb = b.numer().bits() as i64;
                let db = b.denom().bits() as i64;
                let shift = nb - db - 60;
                let (n, d) = if shift > 0 {
                    (b.numer().clone(), b.denom().clone() << shift as usize)
                } else {
                    (b.numer().clone() << (-shift) as usize, b.denom().clone())
                };
                let q = (n / d).to_f64().unwrap_or(f64::NAN);
                q * 2f64.powi(shift as i32)
            }
        }
    }

    /// Exact value of a finite `f64` (every finite double is a dyadic rational).
    pub fn from_f64(v: f64) -> Option<Rational> {
        if !v.is_finite() {
            return None;
        }
        if v == 0.0 {
            return Some(Rational::zero());
        }
        let bits = v.to_bits();
        let sign = if bits >> 63 == 0 { 1i64 } else { -1 };
        let exp = ((bits >> 52) & 0x7ff) as i32;
        let frac = bits & ((1u64 << 52) - 1);
        let (mant, e) = if exp == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), exp - 1075)
        };
        let m = Rational::from_bigints(BigInt::from(mant) * sign, BigInt::one());
        Some(m * Rational::pow2(e))
    }

    /// Nearest multiple of `1/den` to `v` (ties away from zero).
    pub fn round_to_grid(v: f64, den: i64) -> Option<Rational> {
        if !v.is_finite() {
            return None;
        }
        let scaled = (v * den as f64).round();
        if scaled.abs() > 9.0e15 {
            return None;
        }
        Some(Rational::new(scaled as i64, den))
    }

    fn cmp_impl(&self, other: &Rational) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small { num: an, den: ad }, Repr::Small { num: bn, den: bd }) => {
                if ad == bd {
                    an.cmp(bn)
                } else {
                    (*an as i128 * *bd as i128).cmp(&(*bn as i128 * *ad as i128))
                }
            }
            _ => {
                let a = self.to_big();
                let b = other.to_big();
                a.cmp(&b)
            }
        }
    }

    fn add_impl(&self, other: &Rational) -> Rational {
        match (&self.0, &other.0) {
            (Repr::Small { num: an, den: ad }, Repr::Small { num: bn, den: bd }) => {
                if *bn == 0 {
                    return self.clone();
                }
                if *an == 0 {
                    return other.clone();
                }
                if ad == bd {
                    if *ad == 1 {
                        if let Some(s) = an.checked_add(*bn) {
                            return Rational::from_int(s);
                        }
                    }
                    return Rational::from_i128_pair(*an as i128 + *bn as i128, *ad as i128);
                }
                let n = *an as i128 * *bd as i128 + *bn as i128 * *ad as i128;
                let d = *ad as i128 * *bd as i128;
                Rational::from_i128_pair(n, d)
            }
            _ => {
                let a = self.to_big();
                let b = other.to_big();
                Rational::from_big(a + b)
            }
        }
    }

    fn mul_impl(&self, other: &Rational) -> Rational {
        match (&self.0, &other.0) {
            (Repr::Small { num: an, den: ad }, Repr::Small { num: bn, den: bd }) => {
                if *an == 0 || *bn == 0 {
                    return Rational::zero();
                }
                if *ad == 1 && *bd == 1 {
                    if let Some(p) = an.checked_mul(*bn) {
                        return Rational::from_int(p);
                    }
                }
                Rational::from_i128_pair(*an as i128 * *bn as i128, *ad as i128 * *bd as i128)
            }
            _ => {
                let a = self.to_big();
                let b = other.to_big();
                Rational::from_big(a * b)
            }
        }
    }

    /// `self -= a * b` without an intermediate allocation on the inline path.
    pub fn sub_mul_assign(&mut self, a: &Rational, b: &Rational) {
        if a.is_zero() || b.is_zero() {
            return;
        }
        let prod = a.mul_impl(b);
        *self = self.add_impl(&-prod);
    }
}

impl Default for Rational {
    fn default() -> Self {
        Rational::zero()
    }
}

impl PartialEq for Rational {
    fn eq(&self, other: &Rational) -> bool {
        match (&self.0, &other.0) {
            (Repr::Small { num: an, den: ad }, Repr::Small { num: bn, den: bd }) => {
                an == bn && ad == bd
            }
            (Repr::Big(a), Repr::Big(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for Rational {}

impl Hash for Rational {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match &self.0 {
            Repr::Small { num, den } => {
                0u8.hash(state);
                num.hash(state);
                den.hash(state);
            }
            Repr::Big(b) => {
                1u8.hash(state);
                b.hash(state);
            }
        }
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Rational) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Rational) -> Ordering {
        self.cmp_impl(other)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        match &self.0 {
            Repr::Small { num, den } => match num.checked_neg() {
                Some(n) => Rational(Repr::Small { num: n, den: *den }),
                None => Rational::from_i128_pair(-(*num as i128), *den as i128),
            },
            Repr::Big(b) => Rational::from_big(-(**b).clone()),
        }
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        -&self
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $body:expr) => {
        impl $trait<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                let f: fn(&Rational, &Rational) -> Rational = $body;
                f(self, rhs)
            }
        }
        impl $trait<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                (&self).$method(rhs)
            }
        }
        impl $trait<Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, |a, b| a.add_impl(b));
forward_binop!(Sub, sub, |a, b| a.add_impl(&-b));
forward_binop!(Mul, mul, |a, b| a.mul_impl(b));
forward_binop!(Div, div, |a, b| a.mul_impl(&b.recip()));

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        *self = self.add_impl(rhs);
    }
}

impl AddAssign for Rational {
    fn add_assign(&mut self, rhs: Rational) {
        *self = self.add_impl(&rhs);
    }
}

impl SubAssign<&Rational> for Rational {
    fn sub_assign(&mut self, rhs: &Rational) {
        *self = self.add_impl(&-rhs);
    }
}

impl SubAssign for Rational {
    fn sub_assign(&mut self, rhs: Rational) {
        *self -= &rhs;
    }
}

impl MulAssign<&Rational> for Rational {
    fn mul_assign(&mut self, rhs: &Rational) {
        *self = self.mul_impl(rhs);
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl Zero for Rational {
    fn zero() -> Self {
        Rational::zero()
    }
    fn is_zero(&self) -> bool {
        Rational::is_zero(self)
    }
}

impl One for Rational {
    fn one() -> Self {
        Rational::one()
    }
}

impl From<i64> for Rational {
    fn from(v: i64) -> Self {
        Rational::from_int(v)
    }
}

impl From<i32> for Rational {
    fn from(v: i32) -> Self {
        Rational::from_int(v as i64)
    }
}

impl From<u32> for Rational {
    fn from(v: u32) -> Self {
        Rational::from_int(v as i64)
    }
}

impl From<BigInt> for Rational {
    fn from(v: BigInt) -> Self {
        Rational::from_bigints(v, BigInt::one())
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small { num, den: 1 } => write!(f, "{num}"),
            Repr::Small { num, den } => write!(f, "{num}/{den}"),
            Repr::Big(b) if b.is_integer() => write!(f, "{}", b.numer()),
            Repr::Big(b) => write!(f, "{}/{}", b.numer(), b.denom()),
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_decimal(s: &str) -> Option<Rational> {
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (mantissa, exponent) = match body.find(['e', 'E']) {
        Some(pos) => (&body[..pos], body[pos + 1..].parse::<i32>().ok()?),
        None => (body, 0),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().all(|b| b.is_ascii_digit()) || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let numer = BigInt::parse_bytes(digits.as_bytes(), 10)?;
    let scale = exponent - frac_part.len() as i32;
    let ten = Rational::from_int(10).pow(scale);
    let value = Rational::from(numer) * ten;
    Some(if neg { -value } else { value })
}

impl FromStr for Rational {
    type Err = ParseRationalError;

    /// Accepts integers, `p/q` fractions and decimal literals (`0.114`, `1e-3`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err(ParseRationalError::Empty);
        }
        if let Some((n, d)) = s.split_once('/') {
            let n = parse_decimal(n.trim()).ok_or_else(|| ParseRationalError::Invalid(s.into()))?;
            let d = parse_decimal(d.trim()).ok_or_else(|| ParseRationalError::Invalid(s.into()))?;
            if d.is_zero() {
                return Err(ParseRationalError::ZeroDenominator(s.into()));
            }
            return Ok(n / d);
        }
        parse_decimal(s).ok_or_else(|| ParseRationalError::Invalid(s.into()))
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Binomial coefficient as a big integer.
pub fn binomial(n: u64, k: u64) -> BigInt {
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
