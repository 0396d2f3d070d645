//! Cremona moves on blowup classes `(d; m_1, ..., m_k)`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numberseq::{weight_sequence, GhostSequences};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BlowupClass {
    #[serde(with = "crate::exactnum::bigint_serde")]
    pub degree: BigInt,
    #[serde(with = "crate::exactnum::bigint_vec_serde")]
    pub mults: Vec<BigInt>,
}

impl BlowupClass {
    pub fn new(degree: impl Into<BigInt>, mults: Vec<BigInt>) -> Self {
        Self {
            degree: degree.into(),
            mults,
        }
    }

    pub fn from_i64(degree: i64, mults: &[i64]) -> Self {
        Self::new(degree, mults.iter().map(|&m| BigInt::from(m)).collect())
    }

    /// `3d - sum m_i`.
    pub fn c1(&self) -> BigInt {
        3 * &self.degree - self.mults.iter().sum::<BigInt>()
    }

    /// `d^2 - sum m_i^2`.
    pub fn self_intersection(&self) -> BigInt {
        &self.degree * &self.degree - self.mults.iter().map(|m| m * m).sum::<BigInt>()
    }

    /// `d - (m_1 + m_2 + m_3)` over the three largest multiplicities, zero-padded.
    pub fn defect(&self) -> BigInt {
        let mut m = self.mults.clone();
        m.sort_by(|a, b| b.cmp(a));
        m.resize(3.max(m.len()), BigInt::zero());
        &self.degree - (&m[0] + &m[1] + &m[2])
    }

    pub fn has_negative(&self) -> bool {
        self.mults.iter().any(|m| m.is_negative())
    }

    /// Drop zero multiplicities.
    pub fn trimmed(&self) -> Self {
        Self {
            degree: self.degree.clone(),
            mults: self.mults.iter().filter(|m| !m.is_zero()).cloned().collect(),
        }
    }

    /// Stable descending sort, so equal entries keep their relative order.
    pub fn sorted(&self) -> Self {
        let mut mults = self.mults.clone();
        mults.sort_by(|a, b| b.cmp(a));
        Self {
            degree: self.degree.clone(),
            mults,
        }
    }

    fn is_terminal(&self) -> bool {
        let one = BigInt::from(1);
        (self.degree == one && self.mults == [one.clone(), one.clone()])
            || (self.degree.is_zero() && self.mults == [BigInt::from(-1)])
    }

    /// The class `(h_{2n+2}; W(b_n))`.
    pub fn ghost(n: i64) -> Result<Self> {
        let s = GhostSequences::new(n.max(1) as usize + 2);
        let w = weight_sequence(&s.b(n))?;
        Ok(Self::new(s.h(2 * n + 2), w.weights()))
    }

    /// Replace two entries equal to 1 by a single 2.
    pub fn merge_two_ones(&self) -> Result<Self> {
        let one = BigInt::from(1);
        let ones: Vec<usize> = self
            .mults
            .iter()
            .enumerate()
            .filter(|(_, m)| **m == one)
            .map(|(i, _)| i)
            .take(2)
            .collect();
        if ones.len() < 2 {
            return Err(Error::Inconsistent("class has fewer than two entries equal to 1".into()));
        }
        let mut mults = self.mults.clone();
        mults[ones[0]] = BigInt::from(2);
        mults.remove(ones[1]);
        Ok(Self {
            degree: self.degree.clone(),
            mults,
        })
    }
}

impl fmt::Display for BlowupClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({};", self.degree)?;
        let mut first = true;
        let mut i = 0;
        while i < self.mults.len() {
            let mut j = i;
            while j < self.mults.len() && self.mults[j] == self.mults[i] {
                j += 1;
            }
            let sep = if first { " " } else { ", " };
            first = false;
            if j - i > 1 {
                write!(f, "{sep}{}^{}", self.mults[i], j - i)?;
            } else {
                write!(f, "{sep}{}", self.mults[i])?;
            }
            i = j;
        }
        write!(f, ")")
    }
}

impl FromStr for BlowupClass {
    type Err = Error;

    /// `"d;m1,m2,..."`, with optional parentheses.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse {
            what: "blowup class",
            input: s.to_string(),
        };
        let t = s.trim().trim_start_matches('(').trim_end_matches(')');
        let (d, rest) = t.split_once(';').ok_or_else(bad)?;
        let degree = d.trim().parse::<BigInt>().map_err(|_| bad())?;
        let mults = rest
            .split(',')
            .map(str::trim)
            .filter(|x| !x.is_empty())
            .map(|x| x.parse::<BigInt>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { degree, mults })
    }
}

/// `(d; m) -> (2d - m_i - m_j - m_k; ..., d - m_j - m_k, ...)`. Indices past the
/// end refer to zero multiplicities, which are appended.
pub fn cremona_move(v: &BlowupClass, i: usize, j: usize, k: usize) -> Result<BlowupClass> {
    if i == j || j == k || i == k {
        return Err(Error::IndexCollision(i, j, k));
    }
    let mut m = v.mults.clone();
    let top = i.max(j).max(k);
    if m.len() <= top {
        m.resize(top + 1, BigInt::zero());
    }
    let (a, b, c) = (m[i].clone(), m[j].clone(), m[k].clone());
    let d = &v.degree;
    m[i] = d - &b - &c;
    m[j] = d - &a - &c;
    m[k] = d - &a - &b;
    Ok(BlowupClass {
        degree: 2 * d - a - b - c,
        mults: m,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CremonaStep {
    pub before: String,
    pub after: String,
    #[serde(with = "crate::exactnum::bigint_serde")]
    pub c1: BigInt,
    #[serde(with = "crate::exactnum::bigint_serde")]
    pub self_intersection: BigInt,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    NonnegativeDefect,
    Terminal,
    NegativeMultiplicity,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CremonaLog {
    pub start: String,
    pub reduced: BlowupClass,
    pub steps: Vec<CremonaStep>,
    pub termination: Termination,
    /// c1 and self-intersection equal their starting values at every step.
    pub invariants_hold: bool,
}

pub const DEFAULT_MOVE_BUDGET: usize = 10_000;

pub fn cremona_reduce(v: &BlowupClass) -> Result<CremonaLog> {
    cremona_reduce_with_budget(v, DEFAULT_MOVE_BUDGET)
}

/// Greedy reduction on the three largest entries. Zeros are dropped after each move.
pub fn cremona_reduce_with_budget(v: &BlowupClass, budget: usize) -> Result<CremonaLog> {
    let (c1, si) = (v.c1(), v.self_intersection());
    let mut cur = v.trimmed().sorted();
    let mut steps = Vec::new();
    let mut ok = true;
    loop {
        if cur.is_terminal() {
            return Ok(finish(v, cur, steps, Termination::Terminal, ok));
        }
        if cur.has_negative() {
            return Ok(finish(v, cur, steps, Termination::NegativeMultiplicity, ok));
        }
        if !cur.defect().is_negative() {
            return Ok(finish(v, cur, steps, Termination::NonnegativeDefect, ok));
        }
        if steps.len() >= budget {
            return Err(Error::MoveBudget(budget));
        }
        let next = cremona_move(&cur, 0, 1, 2)?.trimmed().sorted();
        let step = CremonaStep {
            before: cur.to_string(),
            after: next.to_string(),
            c1: next.c1(),
            self_intersection: next.self_intersection(),
        };
        ok &= step.c1 == c1 && step.self_intersection == si;
        steps.push(step);
        cur = next;
    }
}

fn finish(
    v: &BlowupClass,
    reduced: BlowupClass,
    steps: Vec<CremonaStep>,
    termination: Termination,
    invariants_hold: bool,
) -> CremonaLog {
    CremonaLog {
        start: v.to_string(),
        reduced,
        steps,
        termination,
        invariants_hold,
    }
}
