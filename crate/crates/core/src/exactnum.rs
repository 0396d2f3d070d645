//! Exact arithmetic: big rationals, rationals carrying a first-order
//! infinitesimal, and the quadratic field Q(sqrt 5).

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int<T: Into<BigInt>>(n: T) -> Rational {
    Rational::from_integer(n.into())
}

pub fn floor_rat(r: &Rational) -> BigInt {
    r.floor().to_integer()
}

pub fn ceil_rat(r: &Rational) -> BigInt {
    r.ceil().to_integer()
}

/// Renders `p/q`, or just `p` for integers.
pub fn fmt_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let err = || Error::Parse {
        what: "rational",
        input: s.to_string(),
    };
    let t = s.trim();
    if t.is_empty() {
        return Err(err());
    }
    match t.split_once('/') {
        Some((p, q)) => {
            let p = BigInt::from_str(p.trim()).map_err(|_| err())?;
            let q = BigInt::from_str(q.trim()).map_err(|_| err())?;
            if q.is_zero() {
                return Err(Error::DivisionByZero);
            }
            Ok(Rational::new(p, q))
        }
        None => {
            if let Some((ip, fp)) = t.split_once('.') {
                // plain decimal literal, read exactly
                let neg = ip.starts_with('-');
                let digits = format!("{}{}", ip.trim_start_matches(['-', '+']), fp);
                let n = BigInt::from_str(&digits).map_err(|_| err())?;
                let d = num_traits::pow(BigInt::from(10), fp.len());
                let r = Rational::new(n, d);
                Ok(if neg { -r } else { r })
            } else {
                Ok(int(BigInt::from_str(t).map_err(|_| err())?))
            }
        }
    }
}

/// Fixed-point decimal rendering, truncated toward zero. For humans only.
pub fn decimal(r: &Rational, digits: usize) -> String {
    let neg = r.is_negative();
    let a = r.abs();
    let scale = num_traits::pow(BigInt::from(10), digits);
    let scaled = (a.numer() * &scale) / a.denom();
    let (ip, fp) = scaled.div_rem(&scale);
    let mut s = String::new();
    if neg && !scaled.is_zero() {
        s.push('-');
    }
    s.push_str(&ip.to_string());
    if digits > 0 {
        s.push('.');
        s.push_str(&format!("{:0>width$}", fp.to_string(), width = digits));
    }
    s
}

/// Serde adapter writing a rational as a `"p/q"` string.
pub mod rational_serde {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

pub mod rational_vec_serde {
    use super::*;
    use serde::ser::SerializeSeq;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for r in v {
            seq.serialize_element(&fmt_rational(r))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Vec<Rational>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| parse_rational(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

/// Integers serialize as decimal strings; numbers are also accepted on input.
pub mod bigint_serde {
    use super::*;
    use serde::{Deserializer, Serializer};

    #[derive(Deserialize)]
    #[serde(untagged)]
    pub(crate) enum IntOrStr {
        I(i64),
        U(u64),
        S(String),
    }

    impl IntOrStr {
        pub(crate) fn into_bigint<E: serde::de::Error>(self) -> std::result::Result<BigInt, E> {
            match self {
                IntOrStr::I(v) => Ok(v.into()),
                IntOrStr::U(v) => Ok(v.into()),
                IntOrStr::S(s) => s.trim().parse().map_err(E::custom),
            }
        }
    }

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigInt, D::Error> {
        IntOrStr::deserialize(d)?.into_bigint()
    }
}

pub mod bigint_vec_serde {
    use super::bigint_serde::IntOrStr;
    use super::*;
    use serde::ser::SerializeSeq;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for x in v {
            seq.serialize_element(&x.to_string())?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<BigInt>, D::Error> {
        Vec::<IntOrStr>::deserialize(d)?
            .into_iter()
            .map(IntOrStr::into_bigint)
            .collect()
    }
}

/// Lattice path edges `(dx, dy)` with `dy` as a string.
pub mod edge_vec_serde {
    use super::bigint_serde::IntOrStr;
    use super::*;
    use serde::ser::SerializeSeq;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[(u64, BigInt)], s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for (dx, dy) in v {
            seq.serialize_element(&(dx, dy.to_string()))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<(u64, BigInt)>, D::Error> {
        Vec::<(u64, IntOrStr)>::deserialize(d)?
            .into_iter()
            .map(|(dx, dy)| Ok((dx, dy.into_bigint()?)))
            .collect()
    }
}

/// Sum of `floor((a*i + b) / m)` for `i` in `0..n`, with `a, b >= 0` and `m > 0`.
/// Runs in O(log) steps, so it is safe for `n` around 1e13 and beyond.
pub fn floor_sum(n: &BigInt, m: &BigInt, a: &BigInt, b: &BigInt) -> BigInt {
    debug_assert!(m.is_positive() && !a.is_negative() && !b.is_negative());
    let (mut n, mut m, mut a, mut b) = (n.clone(), m.clone(), a.clone(), b.clone());
    let mut ans = BigInt::zero();
    loop {
        if n.is_zero() {
            return ans;
        }
        if a >= m {
            let (q, r) = a.div_rem(&m);
            ans += (&n * (&n - 1u32) / 2u32) * q;
            a = r;
        }
        if b >= m {
            let (q, r) = b.div_rem(&m);
            ans += &n * q;
            b = r;
        }
        let y_max = &a * &n + &b;
        if y_max < m {
            return ans;
        }
        let (q, r) = y_max.div_rem(&m);
        n = q;
        b = r;
        std::mem::swap(&mut m, &mut a);
    }
}

/// `base + eps * ε` for a positive infinitesimal `ε`, with `ε² = 0`.
/// Serialized as its display string, e.g. `"55/8+eps"`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PerturbedRational {
    pub base: Rational,
    pub eps: Rational,
}

impl Serialize for PerturbedRational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PerturbedRational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl PerturbedRational {
    pub fn new(base: Rational, eps: Rational) -> Self {
        Self { base, eps }
    }

    pub fn exact(base: Rational) -> Self {
        Self {
            base,
            eps: Rational::zero(),
        }
    }

    /// `base + ε`
    pub fn plus_eps(base: Rational) -> Self {
        Self {
            base,
            eps: Rational::one(),
        }
    }

    pub fn minus_eps(base: Rational) -> Self {
        Self {
            base,
            eps: -Rational::one(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self::exact(int(n))
    }

    pub fn is_exact(&self) -> bool {
        self.eps.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.base.is_zero() && self.eps.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.base.is_positive() || (self.base.is_zero() && self.eps.is_positive())
    }

    /// Value at ε = 0.
    pub fn limit(&self) -> &Rational {
        &self.base
    }

    pub fn floor(&self) -> BigInt {
        if self.base.is_integer() {
            let b = self.base.to_integer();
            if self.eps.is_negative() {
                b - 1
            } else {
                b
            }
        } else {
            floor_rat(&self.base)
        }
    }

    pub fn ceil(&self) -> BigInt {
        -(-self).floor()
    }

    /// `x - floor(x)`, always in `[0, 1)` in the perturbed order.
    pub fn frac(&self) -> Self {
        self - &Self::exact(int(self.floor()))
    }

    pub fn recip(&self) -> Result<Self> {
        if self.base.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let inv = self.base.recip();
        let eps = -(&self.eps * &inv * &inv);
        Ok(Self { base: inv, eps })
    }

    pub fn scale(&self, k: &Rational) -> Self {
        Self {
            base: &self.base * k,
            eps: &self.eps * k,
        }
    }

    pub fn scale_int(&self, k: i64) -> Self {
        self.scale(&int(k))
    }

    pub fn scale_big(&self, k: &BigInt) -> Self {
        self.scale(&Rational::from_integer(k.clone()))
    }

    /// Evaluates at a concrete small `ε`.
    pub fn at(&self, e: &Rational) -> Rational {
        &self.base + &self.eps * e
    }
}

impl fmt::Display for PerturbedRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", fmt_rational(&self.base))?;
        if self.eps.is_zero() {
            return Ok(());
        }
        let sign = if self.eps.is_negative() { '-' } else { '+' };
        let mag = self.eps.abs();
        if mag.is_one() {
            write!(f, "{sign}eps")
        } else {
            write!(f, "{sign}{}eps", fmt_rational(&mag))
        }
    }
}

impl FromStr for PerturbedRational {
    type Err = Error;

    /// Accepts `p/q`, `p/q+eps`, `p/q-eps`, `p/q+Ceps`, `p/q+C*eps`, and `1/(...)`.
    fn from_str(s: &str) -> Result<Self> {
        let err = || Error::Parse {
            what: "perturbed rational",
            input: s.to_string(),
        };
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if let Some(inner) = t.strip_prefix("1/(").and_then(|r| r.strip_suffix(')')) {
            return inner.parse::<PerturbedRational>()?.recip();
        }
        let Some(body) = t.strip_suffix("eps").or_else(|| t.strip_suffix('ε')) else {
            return Ok(Self::exact(parse_rational(&t)?));
        };
        let body = body.strip_suffix('*').unwrap_or(body);
        let split = body
            .char_indices()
            .rev()
            .find(|&(i, c)| i > 0 && (c == '+' || c == '-'))
            .map(|(i, _)| i)
            .ok_or_else(err)?;
        let (b, c) = body.split_at(split);
        let base = parse_rational(b)?;
        let neg = c.starts_with('-');
        let mag = &c[1..];
        let coef = if mag.is_empty() {
            Rational::one()
        } else {
            parse_rational(mag)?
        };
        Ok(Self::new(base, if neg { -coef } else { coef }))
    }
}

macro_rules! perturbed_binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl $tr<&PerturbedRational> for &PerturbedRational {
            type Output = PerturbedRational;
            fn $m(self, o: &PerturbedRational) -> PerturbedRational {
                let f: fn(&PerturbedRational, &PerturbedRational) -> PerturbedRational = $body;
                f(self, o)
            }
        }
        impl $tr<PerturbedRational> for PerturbedRational {
            type Output = PerturbedRational;
            fn $m(self, o: PerturbedRational) -> PerturbedRational {
                (&self).$m(&o)
            }
        }
        impl $tr<&PerturbedRational> for PerturbedRational {
            type Output = PerturbedRational;
            fn $m(self, o: &PerturbedRational) -> PerturbedRational {
                (&self).$m(o)
            }
        }
    };
}

perturbed_binop!(Add, add, |a, b| PerturbedRational::new(
    &a.base + &b.base,
    &a.eps + &b.eps
));
perturbed_binop!(Sub, sub, |a, b| PerturbedRational::new(
    &a.base - &b.base,
    &a.eps - &b.eps
));
perturbed_binop!(Mul, mul, |a, b| PerturbedRational::new(
    &a.base * &b.base,
    &a.base * &b.eps + &b.base * &a.eps
));

impl Div<&PerturbedRational> for &PerturbedRational {
    type Output = Result<PerturbedRational>;
    fn div(self, o: &PerturbedRational) -> Result<PerturbedRational> {
        Ok(self * &o.recip()?)
    }
}

impl Neg for &PerturbedRational {
    type Output = PerturbedRational;
    fn neg(self) -> PerturbedRational {
        PerturbedRational::new(-&self.base, -&self.eps)
    }
}

impl Neg for PerturbedRational {
    type Output = PerturbedRational;
    fn neg(self) -> PerturbedRational {
        -&self
    }
}

impl From<Rational> for PerturbedRational {
    fn from(r: Rational) -> Self {
        Self::exact(r)
    }
}

/// `a + b*sqrt(5)` with rational `a`, `b`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadraticNumber {
    #[serde(with = "rational_serde")]
    pub a: Rational,
    #[serde(with = "rational_serde")]
    pub b: Rational,
}

impl QuadraticNumber {
    pub fn new(a: Rational, b: Rational) -> Self {
        Self { a, b }
    }

    pub fn from_rational(a: Rational) -> Self {
        Self {
            a,
            b: Rational::zero(),
        }
    }

    pub fn sqrt5() -> Self {
        Self::new(Rational::zero(), Rational::one())
    }

    /// Golden ratio.
    pub fn tau() -> Self {
        Self::new(rat(1, 2), rat(1, 2))
    }

    /// `tau^4 = (7 + 3 sqrt 5)/2`.
    pub fn tau4() -> Self {
        Self::new(rat(7, 2), rat(3, 2))
    }

    /// `(3 - sqrt 5)/6`
    pub fn sigma() -> Self {
        Self::new(rat(1, 2), rat(-1, 6))
    }

    /// `5/tau^4 = (35 - 15 sqrt 5)/2`
    pub fn five_over_tau4() -> Self {
        Self::new(rat(35, 2), rat(-15, 2))
    }

    pub fn conj(&self) -> Self {
        Self::new(self.a.clone(), -&self.b)
    }

    /// `a^2 - 5 b^2`
    pub fn norm(&self) -> Rational {
        &self.a * &self.a - int(5) * &self.b * &self.b
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn signum(&self) -> Ordering {
        let z = Rational::zero();
        let sa = self.a.cmp(&z);
        let sb = self.b.cmp(&z);
        match (sa, sb) {
            (Ordering::Equal, s) | (s, Ordering::Equal) => s,
            (s, t) if s == t => s,
            // opposite signs: the larger magnitude wins
            (sa, _) => {
                let a2 = &self.a * &self.a;
                let b2 = int(5) * &self.b * &self.b;
                match a2.cmp(&b2) {
                    Ordering::Greater => sa,
                    Ordering::Less => sa.reverse(),
                    Ordering::Equal => Ordering::Equal,
                }
            }
        }
    }

    pub fn recip(&self) -> Result<Self> {
        let n = self.norm();
        if n.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let c = self.conj();
        Ok(Self::new(c.a / &n, c.b / n))
    }

    pub fn scale(&self, k: &Rational) -> Self {
        Self::new(&self.a * k, &self.b * k)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::from_rational(Rational::one());
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn to_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.a.to_f64().unwrap_or(f64::NAN) + self.b.to_f64().unwrap_or(f64::NAN) * 5f64.sqrt()
    }
}

impl PartialOrd for QuadraticNumber {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for QuadraticNumber {
    fn cmp(&self, o: &Self) -> Ordering {
        (self - o).signum()
    }
}

impl PartialEq<Rational> for QuadraticNumber {
    fn eq(&self, o: &Rational) -> bool {
        self.b.is_zero() && &self.a == o
    }
}

impl PartialOrd<Rational> for QuadraticNumber {
    fn partial_cmp(&self, o: &Rational) -> Option<Ordering> {
        Some(self.cmp(&Self::from_rational(o.clone())))
    }
}

impl From<Rational> for QuadraticNumber {
    fn from(r: Rational) -> Self {
        Self::from_rational(r)
    }
}

impl fmt::Display for QuadraticNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", fmt_rational(&self.a));
        }
        if !self.a.is_zero() {
            write!(f, "{}", fmt_rational(&self.a))?;
            f.write_str(if self.b.is_negative() { "-" } else { "+" })?;
        } else if self.b.is_negative() {
            f.write_str("-")?;
        }
        write!(f, "{}*s5", fmt_rational(&self.b.abs()))
    }
}

impl FromStr for QuadraticNumber {
    type Err = Error;

    /// Accepts `a`, `a+b*s5`, `a-b*s5`, `b*s5`, `s5`.
    fn from_str(s: &str) -> Result<Self> {
        let err = || Error::Parse {
            what: "quadratic number",
            input: s.to_string(),
        };
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let Some(body) = t.strip_suffix("s5") else {
            return Ok(Self::from_rational(parse_rational(&t)?));
        };
        let body = body.strip_suffix('*').unwrap_or(body);
        let split = body
            .char_indices()
            .rev()
            .find(|&(i, c)| i > 0 && (c == '+' || c == '-'))
            .map(|(i, _)| i);
        let (a_str, b_str) = match split {
            Some(i) => body.split_at(i),
            None => ("", body),
        };
        let a = if a_str.is_empty() {
            Rational::zero()
        } else {
            parse_rational(a_str)?
        };
        let b = match b_str {
            "" | "+" => Rational::one(),
            "-" => -Rational::one(),
            other => parse_rational(other.strip_prefix('+').unwrap_or(other)).map_err(|_| err())?,
        };
        Ok(Self::new(a, b))
    }
}

macro_rules! quad_binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl $tr<&QuadraticNumber> for &QuadraticNumber {
            type Output = QuadraticNumber;
            fn $m(self, o: &QuadraticNumber) -> QuadraticNumber {
                let f: fn(&QuadraticNumber, &QuadraticNumber) -> QuadraticNumber = $body;
                f(self, o)
            }
        }
        impl $tr<QuadraticNumber> for QuadraticNumber {
            type Output = QuadraticNumber;
            fn $m(self, o: QuadraticNumber) -> QuadraticNumber {
                (&self).$m(&o)
            }
        }
        impl $tr<&QuadraticNumber> for QuadraticNumber {
            type Output = QuadraticNumber;
            fn $m(self, o: &QuadraticNumber) -> QuadraticNumber {
                (&self).$m(o)
            }
        }
    };
}

quad_binop!(Add, add, |x, y| QuadraticNumber::new(&x.a + &y.a, &x.b + &y.b));
quad_binop!(Sub, sub, |x, y| QuadraticNumber::new(&x.a - &y.a, &x.b - &y.b));
quad_binop!(Mul, mul, |x, y| QuadraticNumber::new(
    &x.a * &y.a + int(5) * &x.b * &y.b,
    &x.a * &y.b + &x.b * &y.a
));

impl Div<&QuadraticNumber> for &QuadraticNumber {
    type Output = Result<QuadraticNumber>;
    fn div(self, o: &QuadraticNumber) -> Result<QuadraticNumber> {
        Ok(self * &o.recip()?)
    }
}

impl Neg for &QuadraticNumber {
    type Output = QuadraticNumber;
    fn neg(self) -> QuadraticNumber {
        QuadraticNumber::new(-&self.a, -&self.b)
    }
}

impl Neg for QuadraticNumber {
    type Output = QuadraticNumber;
    fn neg(self) -> QuadraticNumber {
        -&self
    }
}

pub fn quad_cmp(x: &QuadraticNumber, y: &QuadraticNumber) -> Ordering {
    x.cmp(y)
}

pub fn perturbed_floor(x: &PerturbedRational) -> BigInt {
    x.floor()
}

pub fn perturbed_ceil(x: &PerturbedRational) -> BigInt {
    x.ceil()
}

pub fn perturbed_recip(x: &PerturbedRational) -> Result<PerturbedRational> {
    x.recip()
}
