//! Fibonacci-type sequences, continued fractions, best approximations from
//! below, and weight sequences.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::{fmt_rational, int, PerturbedRational, Rational};

fn fib_table(k_max: usize) -> Vec<BigInt> {
    let mut f = vec![BigInt::zero(), BigInt::one()];
    while f.len() <= k_max {
        let n = f.len();
        let next = &f[n - 1] + &f[n - 2];
        f.push(next);
    }
    f.truncate(k_max + 1);
    f
}

/// Fibonacci number `F_k` for any integer `k`, using `F_{-k} = (-1)^{k+1} F_k`.
pub fn fib(k: i64) -> BigInt {
    let f = fib_table(k.unsigned_abs() as usize);
    let v = f[k.unsigned_abs() as usize].clone();
    if k < 0 && k % 2 == 0 {
        -v
    } else {
        v
    }
}

/// Table of the even-index Fibonacci family and the sequences derived from it.
///
/// Index conventions: `h_k = F_{2k}`, `g_k = F_{2k-1}`, `Q_n = h_{2n+1}`,
/// `P_n = Q_{n+1}`, `l_n = h_{2n+2}/3`, `t_n = l_n - l_{n-1}`, `b_n = P_n/Q_n`.
/// Negative indices follow the backward recursion, so `l_{-1} = 0`.
#[derive(Clone, Debug)]
pub struct GhostSequences {
    n_max: usize,
    fib: Vec<BigInt>,
}

impl GhostSequences {
    pub fn new(n_max: usize) -> Self {
        // P_{n+1} = h_{2n+5} = F_{4n+10} is the largest index any accessor needs.
        Self {
            n_max,
            fib: fib_table(4 * n_max + 16),
        }
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    fn f(&self, k: i64) -> BigInt {
        let a = k.unsigned_abs() as usize;
        let v = match self.fib.get(a) {
            Some(v) => v.clone(),
            None => fib(a as i64),
        };
        if k < 0 && k % 2 == 0 {
            -v
        } else {
            v
        }
    }

    pub fn h(&self, k: i64) -> BigInt {
        self.f(2 * k)
    }

    pub fn g(&self, k: i64) -> BigInt {
        self.f(2 * k - 1)
    }

    pub fn q(&self, n: i64) -> BigInt {
        self.h(2 * n + 1)
    }

    pub fn p(&self, n: i64) -> BigInt {
        self.q(n + 1)
    }

    pub fn ell(&self, n: i64) -> BigInt {
        self.h(2 * n + 2) / 3
    }

    pub fn t(&self, n: i64) -> BigInt {
        self.ell(n) - self.ell(n - 1)
    }

    pub fn b(&self, n: i64) -> Rational {
        Rational::new(self.p(n), self.q(n))
    }

    /// `(1 + b_n)/3`, except `mu_0 = 17/6`.
    pub fn mu(&self, n: i64) -> Rational {
        if n == 0 {
            Rational::new(17.into(), 6.into())
        } else {
            (Rational::one() + self.b(n)) / int(3)
        }
    }

    /// `theta_n = b_n + eps`
    pub fn theta(&self, n: i64) -> PerturbedRational {
        PerturbedRational::plus_eps(self.b(n))
    }

    /// `1/theta_n`
    pub fn theta_tilde(&self, n: i64) -> PerturbedRational {
        self.theta(n).recip().expect("b_n > 0")
    }

    pub fn row(&self, n: i64) -> SequenceRow {
        SequenceRow {
            n,
            h: self.h(n),
            g: self.g(n),
            q: self.q(n),
            p: self.p(n),
            ell: self.ell(n),
            t: self.t(n),
            b: self.b(n),
            mu: self.mu(n),
        }
    }

    pub fn rows(&self) -> Vec<SequenceRow> {
        (0..=self.n_max as i64).map(|n| self.row(n)).collect()
    }
}

pub fn ghost_sequences(n_max: usize) -> GhostSequences {
    GhostSequences::new(n_max)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceRow {
    pub n: i64,
    #[serde(with = "crate::exactnum::bigint_serde")]
    pub h: BigInt,
    #[serde(with = "crate::exactnum::bigint_serde")]
    pub g: BigInt,
    #[serde(with = "crate::exactnum::bigint_serde")]
    pub q: BigInt,
    #[serde(with = "crate::exactnum::bigint_serde")]
    pub p: BigInt,
    #[serde(with = "crate::exactnum::bigint_serde")]
    pub ell: BigInt,
    #[serde(with = "crate::exactnum::bigint_serde")]
    pub t: BigInt,
    #[serde(with = "crate::exactnum::rational_serde")]
    pub b: Rational,
    #[serde(with = "crate::exactnum::rational_serde")]
    pub mu: Rational,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Identity {
    /// `3 g_{n+1} = g_n + g_{n+2}`
    Fib1G,
    /// `3 h_{n+1} = h_n + h_{n+2}`
    Fib1H,
    /// `t_n - t_{n-1} = 5 l_{n-1}`
    Fibt,
    /// `Q_n = l_n + l_{n-1}`
    Fibq,
    /// `h_{n+2}^2 - h_{n+1} h_{n+3} = 1`
    Fib2,
    /// `h_{2n+2}^2 - (3h_{2n+2} - h_{2n+3}) = h_{2n+1}(h_{2n+3} - 1) + 1`
    Fibh,
    /// `x_n = 7x_{n-1} - x_{n-2}` for `x` in `Q`, `l`, `t`
    BasicRecursion,
    /// `Q_{n+1} l_n = Q_n l_{n+1} + 1`
    Recurrel,
    /// `l_n^2 = l_{n-1} l_{n+1} + 1`
    RecurrelEll,
    /// `l_n P_n = l_{n-1} P_{n+1} + 8`
    RecurrelP,
    /// `P_n t_n - P_{n-1} t_{n+1} = 2`
    Pntn,
    /// `l_{n-1} P_{n-1} - l_{n-2} P_n = 8` and `floor(l_{n-1} P_{n-1}/P_n) = l_{n-2}`
    Lnbn,
    /// `5(l_n^2 - 7 l_n l_{n-1} + l_{n-1}^2) = 5`
    Fineq,
    /// `9 l_n^2 - P_n Q_n = 1`
    NineEll,
}

impl Identity {
    pub const ALL: [Identity; 14] = [
        Identity::Fib1G,
        Identity::Fib1H,
        Identity::Fibt,
        Identity::Fibq,
        Identity::Fib2,
        Identity::Fibh,
        Identity::BasicRecursion,
        Identity::Recurrel,
        Identity::RecurrelEll,
        Identity::RecurrelP,
        Identity::Pntn,
        Identity::Lnbn,
        Identity::Fineq,
        Identity::NineEll,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Identity::Fib1G => "fib1_g",
            Identity::Fib1H => "fib1_h",
            Identity::Fibt => "fibt",
            Identity::Fibq => "fibq",
            Identity::Fib2 => "fib2",
            Identity::Fibh => "fibh",
            Identity::BasicRecursion => "basic_recursion",
            Identity::Recurrel => "recurrel",
            Identity::RecurrelEll => "recurrel_ell",
            Identity::RecurrelP => "recurrel_p",
            Identity::Pntn => "pntn",
            Identity::Lnbn => "lnbn",
            Identity::Fineq => "fineq",
            Identity::NineEll => "nine_ell",
        }
    }

    pub fn min_n(self) -> i64 {
        match self {
            Identity::Fibt | Identity::BasicRecursion | Identity::Lnbn => 1,
            _ => 0,
        }
    }
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Identity {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        Identity::ALL
            .into_iter()
            .find(|i| i.id() == key)
            .ok_or_else(|| Error::UnknownIdentity(s.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub id: String,
    pub n: i64,
    pub holds: bool,
    pub lhs: Vec<String>,
    pub rhs: Vec<String>,
}

pub fn check_identity_str(id: &str, n: i64) -> Result<IdentityCheck> {
    check_identity(id.parse()?, n)
}

pub fn check_identity(id: Identity, n: i64) -> Result<IdentityCheck> {
    if n < id.min_n() {
        return Err(Error::IndexOutOfRange {
            id: id.id().to_string(),
            n,
        });
    }
    let s = GhostSequences::new(n.max(0) as usize + 2);
    let (h, g, q, p, l, t) = (
        |k| s.h(k),
        |k| s.g(k),
        |k| s.q(k),
        |k| s.p(k),
        |k| s.ell(k),
        |k| s.t(k),
    );
    let pairs: Vec<(BigInt, BigInt)> = match id {
        Identity::Fib1G => vec![(3 * g(n + 1), g(n) + g(n + 2))],
        Identity::Fib1H => vec![(3 * h(n + 1), h(n) + h(n + 2))],
        Identity::Fibt => vec![(t(n) - t(n - 1), 5 * l(n - 1))],
        Identity::Fibq => vec![(q(n), l(n) + l(n - 1))],
        Identity::Fib2 => vec![(h(n + 2) * h(n + 2) - h(n + 1) * h(n + 3), BigInt::one())],
        Identity::Fibh => {
            let a = h(2 * n + 2);
            vec![(
                &a * &a - (3 * &a - h(2 * n + 3)),
                h(2 * n + 1) * (h(2 * n + 3) - 1) + 1,
            )]
        }
        Identity::BasicRecursion => vec![
            (q(n + 1), 7 * q(n) - q(n - 1)),
            (l(n + 1), 7 * l(n) - l(n - 1)),
            (t(n + 1), 7 * t(n) - t(n - 1)),
        ],
        Identity::Recurrel => vec![(q(n + 1) * l(n), q(n) * l(n + 1) + 1)],
        Identity::RecurrelEll => vec![(l(n) * l(n), l(n - 1) * l(n + 1) + 1)],
        Identity::RecurrelP => vec![(l(n) * p(n), l(n - 1) * p(n + 1) + 8)],
        Identity::Pntn => vec![(p(n) * t(n) - p(n - 1) * t(n + 1), BigInt::from(2))],
        Identity::Lnbn => vec![
            (l(n - 1) * p(n - 1) - l(n - 2) * p(n), BigInt::from(8)),
            ((l(n - 1) * p(n - 1)).div_floor(&p(n)), l(n - 2)),
        ],
        Identity::Fineq => {
            let (a, b) = (l(n), l(n - 1));
            vec![(5 * (&a * &a - 7 * &a * &b + &b * &b), BigInt::from(5))]
        }
        Identity::NineEll => vec![(9 * l(n) * l(n) - p(n) * q(n), BigInt::one())],
    };
    Ok(IdentityCheck {
        id: id.id().to_string(),
        n,
        holds: pairs.iter().all(|(a, b)| a == b),
        lhs: pairs.iter().map(|(a, _)| a.to_string()).collect(),
        rhs: pairs.iter().map(|(_, b)| b.to_string()).collect(),
    })
}

/// `[a_0; a_1, ..., a_k]`
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ContinuedFraction {
    #[serde(with = "crate::exactnum::bigint_vec_serde")]
    pub quotients: Vec<BigInt>,
}

impl ContinuedFraction {
    pub fn new<I: IntoIterator<Item = T>, T: Into<BigInt>>(q: I) -> Self {
        Self {
            quotients: q.into_iter().map(Into::into).collect(),
        }
    }

    /// Backward evaluation.
    pub fn value(&self) -> Rational {
        let mut it = self.quotients.iter().rev();
        let Some(last) = it.next() else {
            return Rational::zero();
        };
        let mut acc = int(last.clone());
        for a in it {
            acc = int(a.clone()) + acc.recip();
        }
        acc
    }

    /// Rewrites a trailing 1 into the previous quotient, so the last entry exceeds 1.
    pub fn canonical(&self) -> Self {
        let mut q = self.quotients.clone();
        while q.len() > 1 && q.last().is_some_and(|a| a.is_one()) {
            q.pop();
            *q.last_mut().unwrap() += 1;
        }
        Self { quotients: q }
    }

    pub fn is_canonical(&self) -> bool {
        self.quotients.len() <= 1 || self.quotients.last().is_some_and(|a| a > &BigInt::one())
    }

    pub fn equivalent(&self, other: &Self) -> bool {
        self.canonical() == other.canonical()
    }

    pub fn len(&self) -> usize {
        self.quotients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.quotients.is_empty()
    }
}

impl fmt::Display for ContinuedFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut it = self.quotients.iter();
        match it.next() {
            None => f.write_str("[]"),
            Some(a0) => {
                write!(f, "[{a0}")?;
                for (i, a) in it.enumerate() {
                    write!(f, "{}{a}", if i == 0 { "; " } else { ", " })?;
                }
                f.write_str("]")
            }
        }
    }
}

/// Canonical expansion of a positive rational by the Euclidean algorithm.
pub fn continued_fraction(r: &Rational) -> Result<ContinuedFraction> {
    if !r.is_positive() {
        return Err(Error::NonPositive(fmt_rational(r)));
    }
    let (mut x, mut y) = (r.numer().clone(), r.denom().clone());
    let mut q = Vec::new();
    while !y.is_zero() {
        let (a, rem) = x.div_rem(&y);
        q.push(a);
        x = y;
        y = rem;
    }
    Ok(ContinuedFraction { quotients: q })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightBlock {
    #[serde(with = "crate::exactnum::bigint_serde")]
    pub value: BigInt,
    #[serde(with = "crate::exactnum::bigint_serde")]
    pub count: BigInt,
}

/// Integer weight sequence `W(p/q)`, stored as (value, run length) blocks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightSequence {
    #[serde(with = "crate::exactnum::rational_serde")]
    pub target: Rational,
    pub blocks: Vec<WeightBlock>,
}

impl WeightSequence {
    pub fn p(&self) -> &BigInt {
        self.target.numer()
    }

    pub fn q(&self) -> &BigInt {
        self.target.denom()
    }

    pub fn len(&self) -> BigInt {
        self.blocks.iter().map(|b| &b.count).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Expanded `W_1 >= W_2 >= ...`. Panics if the length does not fit in memory.
    pub fn weights(&self) -> Vec<BigInt> {
        let mut out = Vec::new();
        for b in &self.blocks {
            let c = b.count.to_usize().expect("run length too large to expand");
            out.extend(std::iter::repeat(b.value.clone()).take(c));
        }
        out
    }

    /// `w_i = W_i/q`
    pub fn unnormalized(&self) -> Vec<Rational> {
        let q = self.q().clone();
        self.weights()
            .into_iter()
            .map(|w| Rational::new(w, q.clone()))
            .collect()
    }

    pub fn sum(&self) -> BigInt {
        self.blocks.iter().map(|b| &b.value * &b.count).sum()
    }

    pub fn sum_squares(&self) -> BigInt {
        self.blocks
            .iter()
            .map(|b| &b.value * &b.value * &b.count)
            .sum()
    }

    pub fn run_lengths(&self) -> ContinuedFraction {
        ContinuedFraction {
            quotients: self.blocks.iter().map(|b| b.count.clone()).collect(),
        }
    }

    /// `sum W^2 = pq`, `sum W = p + q - 1`, last weight is 1.
    pub fn invariants_hold(&self) -> bool {
        let (p, q) = (self.p(), self.q());
        self.sum_squares() == p * q
            && self.sum() == p + q - 1
            && self.blocks.last().is_some_and(|b| b.value.is_one())
    }
}

pub fn weight_sequence(r: &Rational) -> Result<WeightSequence> {
    if !r.is_positive() {
        return Err(Error::NonPositive(fmt_rational(r)));
    }
    let (mut prev, mut cur) = (r.numer().clone(), r.denom().clone());
    let mut blocks = Vec::new();
    while !cur.is_zero() {
        let (a, next) = prev.div_rem(&cur);
        blocks.push(WeightBlock {
            value: cur.clone(),
            count: a,
        });
        prev = cur;
        cur = next;
    }
    Ok(WeightSequence {
        target: r.clone(),
        blocks,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    fn of(i: usize) -> Self {
        if i % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Convergent {
    pub index: usize,
    #[serde(with = "crate::exactnum::rational_serde")]
    pub value: Rational,
    #[serde(with = "crate::exactnum::bigint_serde")]
    pub p: BigInt,
    #[serde(with = "crate::exactnum::bigint_serde")]
    pub q: BigInt,
    #[serde(with = "crate::exactnum::bigint_serde")]
    pub quotient: BigInt,
    pub parity: Parity,
}

/// Partial quotients of a perturbed value. The expansion stops once the
/// remainder is a pure infinitesimal (next quotient infinite) or exactly 0.
/// `max_len` guards against huge expansions.
pub fn perturbed_quotients(x: &PerturbedRational, max_len: usize) -> Vec<BigInt> {
    let mut out = Vec::new();
    let mut cur = x.clone();
    while out.len() < max_len {
        let a = cur.floor();
        let frac = &cur - &PerturbedRational::exact(int(a.clone()));
        out.push(a);
        if frac.base.is_zero() {
            break;
        }
        cur = frac.recip().expect("nonzero base");
    }
    out
}

/// Convergents `p_k/q_k` with `q_k <= max_denominator`.
pub fn convergents(x: &PerturbedRational, max_denominator: &BigInt) -> Result<Vec<Convergent>> {
    if !x.is_positive() {
        return Err(Error::NonPositive(x.to_string()));
    }
    let mut out = Vec::new();
    let (mut p2, mut q2) = (BigInt::zero(), BigInt::one());
    let (mut p1, mut q1) = (BigInt::one(), BigInt::zero());
    let mut cur = x.clone();
    loop {
        let a = cur.floor();
        let p = &a * &p1 + &p2;
        let q = &a * &q1 + &q2;
        if &q > max_denominator {
            break;
        }
        let index = out.len();
        out.push(Convergent {
            index,
            value: Rational::new(p.clone(), q.clone()),
            p: p.clone(),
            q: q.clone(),
            quotient: a.clone(),
            parity: Parity::of(index),
        });
        let frac = &cur - &PerturbedRational::exact(int(a));
        if frac.base.is_zero() {
            break;
        }
        cur = frac.recip()?;
        p2 = std::mem::replace(&mut p1, p);
        q2 = std::mem::replace(&mut q1, q);
    }
    Ok(out)
}

/// Best approximations from below with denominator at most `max_denominator`:
/// the even convergents and the lower semiconvergents, sorted by denominator.
pub fn best_approx_below(x: &PerturbedRational, max_denominator: &BigInt) -> Result<Vec<Rational>> {
    if x.is_exact() {
        return Err(Error::RationalInput(x.to_string()));
    }
    if !x.is_positive() {
        return Err(Error::NonPositive(x.to_string()));
    }
    // The full expansion is finite: the base is rational.
    let quotients = perturbed_quotients(x, usize::MAX);
    let mut out: Vec<(BigInt, BigInt)> = Vec::new();
    let (mut p2, mut q2) = (BigInt::zero(), BigInt::one());
    let (mut p1, mut q1) = (BigInt::one(), BigInt::zero());
    let last = quotients.len() - 1;
    for (k, a) in quotients.iter().enumerate() {
        if k % 2 == 0 {
            // lower semiconvergents c_{k-2} + r c_{k-1}, then c_k itself at r = a
            let start = if k == 0 { a.clone() } else { BigInt::one() };
            let mut r = start;
            while &r <= a {
                let q = &q2 + &r * &q1;
                if &q > max_denominator {
                    break;
                }
                out.push((&p2 + &r * &p1, q));
                r += 1;
            }
        }
        let p = a * &p1 + &p2;
        let q = a * &q1 + &q2;
        p2 = std::mem::replace(&mut p1, p);
        q2 = std::mem::replace(&mut q1, q);
        if &q2 > max_denominator && &q1 > max_denominator {
            break;
        }
        if k == last && k % 2 == 1 {
            // next quotient is infinite and lower
            let mut r = BigInt::one();
            loop {
                let q = &q2 + &r * &q1;
                if &q > max_denominator {
                    break;
                }
                out.push((&p2 + &r * &p1, q));
                r += 1;
            }
        }
    }
    Ok(out.into_iter().map(|(p, q)| Rational::new(p, q)).collect())
}
