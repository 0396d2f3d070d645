//! ECH and Fredholm indices, actions, writhe bounds, the index inequality
//! residual, diff vectors and the stabilized index formulas.
//!
//! Ellipsoids are `E(1, x)`: `beta_1` has action 1 and monodromy angle `1/x`,
//! `beta_2` has action `x` and angle `x`.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::{fmt_rational, int, PerturbedRational, Rational};
use crate::lattice::{area_from_partition, orbit_grading, OrbitSet};
use crate::numberseq::weight_sequence;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    Symplectization,
    CobordismX,
    BlowupE,
    Stabilized,
}

/// End multiplicities on the two orbits.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ends {
    #[serde(default)]
    pub beta1: Vec<u64>,
    #[serde(default)]
    pub beta2: Vec<u64>,
}

impl Ends {
    pub fn new(beta1: Vec<u64>, beta2: Vec<u64>) -> Self {
        Self { beta1, beta2 }
    }

    pub fn n1(&self) -> u64 {
        self.beta1.iter().sum()
    }

    pub fn n2(&self) -> u64 {
        self.beta2.iter().sum()
    }

    pub fn count(&self) -> usize {
        self.beta1.len() + self.beta2.len()
    }

    pub fn is_empty(&self) -> bool {
        self.count() == 0
    }

    pub fn orbit_set(&self, x: &PerturbedRational) -> OrbitSet {
        OrbitSet::new(self.n1(), self.n2(), int(1), x.clone())
    }

    fn validate(&self) -> Result<()> {
        if self.beta1.contains(&0) || self.beta2.contains(&0) {
            return Err(Error::MalformedPartition("end of multiplicity 0".into()));
        }
        Ok(())
    }
}

fn one() -> u64 {
    1
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveData {
    pub level: Level,
    /// Line-class degree (cobordism `X` only).
    #[serde(default)]
    pub degree: i64,
    /// Exceptional-class coefficients (blowup level only).
    #[serde(default)]
    #[serde(with = "crate::exactnum::bigint_vec_serde")]
    pub z: Vec<BigInt>,
    #[serde(default)]
    pub positive: Ends,
    #[serde(default)]
    pub negative: Ends,
    /// Number of connected components.
    #[serde(default = "one")]
    pub components: u64,
    pub x: PerturbedRational,
    /// Declared singularity count.
    #[serde(default)]
    pub delta: u64,
}

impl CurveData {
    pub fn cobordism_x(degree: i64, negative: Ends, x: PerturbedRational) -> Self {
        Self {
            level: Level::CobordismX,
            degree,
            z: Vec::new(),
            positive: Ends::default(),
            negative,
            components: 1,
            x,
            delta: 0,
        }
    }

    pub fn blowup_e(z: Vec<BigInt>, positive: Ends, x: PerturbedRational) -> Self {
        Self {
            level: Level::BlowupE,
            degree: 0,
            z,
            positive,
            negative: Ends::default(),
            components: 1,
            x,
            delta: 0,
        }
    }

    pub fn with_components(mut self, k: u64) -> Self {
        self.components = k;
        self
    }

    pub fn with_delta(mut self, delta: u64) -> Self {
        self.delta = delta;
        self
    }

    fn expect_level(&self, level: Level) -> Result<()> {
        if self.level != level {
            return Err(Error::Inconsistent(format!(
                "expected {level:?} data, got {:?}",
                self.level
            )));
        }
        self.positive.validate()?;
        self.negative.validate()
    }
}

/// `floor(y)` for a perturbed `y` that must not be an exact integer.
fn floor_nonintegral(y: &PerturbedRational) -> Result<BigInt> {
    if y.is_exact() && y.base.is_integer() {
        return Err(Error::IntegralQuotient {
            value: fmt_rational(&y.base),
        });
    }
    Ok(y.floor())
}

fn recip_x(x: &PerturbedRational) -> Result<PerturbedRational> {
    x.recip()
}

/// `sum (a + floor(a/x))` over `beta_1` ends plus `sum (b + floor(b x))` over `beta_2` ends.
fn cz_terms(ends: &Ends, x: &PerturbedRational) -> Result<BigInt> {
    let inv = recip_x(x)?;
    let mut s = BigInt::zero();
    for &a in &ends.beta1 {
        s += BigInt::from(a) + floor_nonintegral(&inv.scale_int(a as i64))?;
    }
    for &b in &ends.beta2 {
        s += BigInt::from(b) + floor_nonintegral(&x.scale_int(b as i64))?;
    }
    Ok(s)
}

/// Fredholm index of a curve in the cobordism `X` (negative ends only):
/// `2(-k + 3d - sum(a + floor(a/x)) - sum(b + floor(bx)))`.
pub fn fredholm_index_x(c: &CurveData) -> Result<BigInt> {
    c.expect_level(Level::CobordismX)?;
    if !c.positive.is_empty() {
        return Err(Error::Inconsistent("cobordism X curves have no positive ends".into()));
    }
    let half = -BigInt::from(c.components) + 3 * BigInt::from(c.degree) - cz_terms(&c.negative, &c.x)?;
    Ok(2 * half)
}

/// `I = d^2 + 3d - gr(beta)`.
pub fn ech_index_x(d: i64, set: &OrbitSet) -> BigInt {
    let d = BigInt::from(d);
    &d * &d + 3 * &d - orbit_grading(set)
}

/// `I = gr(alpha) - sum (m + m^2)`.
pub fn ech_index_e(c: &CurveData, set: &OrbitSet) -> Result<BigInt> {
    c.expect_level(Level::BlowupE)?;
    let corr: BigInt = c.z.iter().map(|m| m + m * m).sum();
    Ok(orbit_grading(set) - corr)
}

/// Fredholm index in the blown-up ellipsoid (positive ends only). The `-1`
/// of the connected formula is taken once per component.
pub fn fredholm_index_e(c: &CurveData) -> Result<BigInt> {
    c.expect_level(Level::BlowupE)?;
    if !c.negative.is_empty() {
        return Err(Error::Inconsistent("blown-up ellipsoid curves have no negative ends".into()));
    }
    let r = c.positive.count() as i64;
    let zsum: BigInt = c.z.iter().sum();
    let half = -BigInt::from(c.components) + r + cz_terms(&c.positive, &c.x)? - zsum;
    Ok(2 * half)
}

/// Extra data the action needs at each level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ActionInput<'a> {
    Symplectization,
    /// Line size `mu`.
    CobordismX(&'a Rational),
    /// Unnormalized weights `w_i`.
    BlowupE(&'a [Rational]),
}

pub fn action(c: &CurveData, input: ActionInput<'_>) -> Result<PerturbedRational> {
    let orbit = |e: &Ends| e.orbit_set(&c.x).action();
    match (c.level, input) {
        (Level::Symplectization, ActionInput::Symplectization) => {
            Ok(orbit(&c.positive) - orbit(&c.negative))
        }
        (Level::CobordismX, ActionInput::CobordismX(mu)) => {
            Ok(PerturbedRational::exact(mu * int(c.degree)) - orbit(&c.negative))
        }
        (Level::BlowupE, ActionInput::BlowupE(w)) => {
            if w.len() != c.z.len() {
                return Err(Error::LengthMismatch(c.z.len(), w.len()));
            }
            let zw: Rational = c
                .z
                .iter()
                .zip(w)
                .map(|(m, wi)| int(m.clone()) * wi)
                .sum();
            Ok(orbit(&c.positive) - PerturbedRational::exact(zw))
        }
        (level, _) => Err(Error::Inconsistent(format!(
            "action input does not match level {level:?}"
        ))),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EndSign {
    Pos,
    Neg,
}

/// Writhe bound at an end: upper bound `sum max(p_i a_j, p_j a_i) - sum p_i`
/// with `p = floor(a theta)` for positive ends, lower bound with `min` and
/// `p = ceil(a theta)` for negative ends.
pub fn writhe_bound(theta: &PerturbedRational, parts: &[u64], sign: EndSign) -> Result<BigInt> {
    if parts.is_empty() {
        return Err(Error::MalformedPartition("empty partition".into()));
    }
    let p: Vec<BigInt> = parts
        .iter()
        .map(|&a| {
            let y = theta.scale_int(a as i64);
            match sign {
                EndSign::Pos => y.floor(),
                EndSign::Neg => y.ceil(),
            }
        })
        .collect();
    let mut total = BigInt::zero();
    for (i, &ai) in parts.iter().enumerate() {
        for (j, &aj) in parts.iter().enumerate() {
            let (u, v) = (&p[i] * BigInt::from(aj), &p[j] * BigInt::from(ai));
            total += match sign {
                EndSign::Pos => u.max(v),
                EndSign::Neg => u.min(v),
            };
        }
    }
    Ok(total - p.iter().sum::<BigInt>())
}

/// Writhe of the top curve forced by adjunction when it has `s` negative ends on
/// `beta_1` of total multiplicity `h_{2n+3}`: `2 - s + h_{2n+1}(h_{2n+3} - 1) + 1 - 2 delta`.
pub fn writhe_from_adjunction(h_2n1: &BigInt, h_2n3: &BigInt, s: u64, delta: u64) -> BigInt {
    BigInt::from(2) - s + h_2n1 * (h_2n3 - 1) + 1 - 2 * BigInt::from(delta)
}

/// Two sides of `sum (a_i - 1) p_i >= (Q/P) sum (a_i^2 - a_i) + 1` with `p_i = ceil(a_i Q/P)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitCheck {
    pub parts: Vec<u64>,
    #[serde(with = "crate::exactnum::bigint_serde")]
    pub lhs: BigInt,
    #[serde(with = "crate::exactnum::rational_serde")]
    pub rhs: Rational,
    pub holds: bool,
}

pub fn split_inequality(theta: &PerturbedRational, parts: &[u64]) -> SplitCheck {
    let mut lhs = BigInt::zero();
    let mut quad = BigInt::zero();
    for &a in parts {
        let p = theta.scale_int(a as i64).ceil();
        lhs += (BigInt::from(a) - 1) * p;
        quad += BigInt::from(a) * BigInt::from(a) - a;
    }
    let rhs = &theta.base * int(quad) + int(1);
    SplitCheck {
        parts: parts.to_vec(),
        holds: int(lhs.clone()) >= rhs,
        lhs,
        rhs,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexResidual {
    #[serde(with = "crate::exactnum::bigint_serde")]
    pub ech_index: BigInt,
    #[serde(with = "crate::exactnum::bigint_serde")]
    pub fredholm_index: BigInt,
    pub delta: u64,
    #[serde(with = "crate::exactnum::rational_serde")]
    pub area_term: Rational,
    #[serde(with = "crate::exactnum::rational_serde")]
    pub residual: Rational,
}

fn sort_by_slope(theta: &PerturbedRational, parts: &[u64]) -> Vec<u64> {
    let mut v = parts.to_vec();
    v.sort_by(|&a, &b| {
        let pa = theta.scale_int(a as i64).floor() * BigInt::from(b);
        let pb = theta.scale_int(b as i64).floor() * BigInt::from(a);
        pb.cmp(&pa).then(b.cmp(&a))
    });
    v
}

/// `I - ind - 2 delta - 2 A(C)` for a blown-up-ellipsoid curve with positive ends only.
pub fn index_residual(c: &CurveData, set: &OrbitSet) -> Result<IndexResidual> {
    let i = ech_index_e(c, set)?;
    let ind = fredholm_index_e(c)?;
    let mut area = Rational::zero();
    let angles = [(recip_x(&c.x)?, &c.positive.beta1), (c.x.clone(), &c.positive.beta2)];
    for (theta, parts) in angles {
        if parts.is_empty() {
            continue;
        }
        area += area_from_partition(&theta, &sort_by_slope(&theta, parts))?.area;
    }
    let residual = int(&i - &ind) - int(2 * BigInt::from(c.delta)) - int(2) * &area;
    Ok(IndexResidual {
        ech_index: i,
        fredholm_index: ind,
        delta: c.delta,
        area_term: area,
        residual,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiffVector {
    #[serde(with = "crate::exactnum::rational_vec_serde")]
    pub z: Vec<Rational>,
    #[serde(with = "crate::exactnum::rational_vec_serde")]
    pub w: Vec<Rational>,
    #[serde(with = "crate::exactnum::rational_serde")]
    pub lambda: Rational,
    #[serde(with = "crate::exactnum::rational_vec_serde")]
    pub diff: Vec<Rational>,
}

pub fn dot(u: &[Rational], v: &[Rational]) -> Rational {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

impl DiffVector {
    pub fn norm2(&self) -> Rational {
        dot(&self.diff, &self.diff)
    }

    /// `w . diff = 0` and `z . z = lambda^2 (w . w) + diff . diff`.
    pub fn identities_hold(&self) -> bool {
        dot(&self.w, &self.diff).is_zero()
            && dot(&self.z, &self.z)
                == &self.lambda * &self.lambda * dot(&self.w, &self.w) + self.norm2()
    }
}

/// `lambda = (z.w)/(w.w)`, `diff = lambda w - z`.
pub fn diff_vector(z: &[Rational], w: &[Rational]) -> Result<DiffVector> {
    if z.len() != w.len() {
        return Err(Error::LengthMismatch(z.len(), w.len()));
    }
    let ww = dot(w, w);
    if ww.is_zero() {
        return Err(Error::ZeroVector);
    }
    let lambda = dot(z, w) / ww;
    let diff = z.iter().zip(w).map(|(zi, wi)| &lambda * wi - zi).collect();
    Ok(DiffVector {
        z: z.to_vec(),
        w: w.to_vec(),
        lambda,
        diff,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FundamentalEstimate {
    #[serde(with = "crate::exactnum::rational_serde")]
    pub area_small: Rational,
    #[serde(with = "crate::exactnum::rational_serde")]
    pub area_large: Rational,
    #[serde(with = "crate::exactnum::rational_serde")]
    pub diff_norm2: Rational,
    #[serde(with = "crate::exactnum::rational_serde")]
    pub lhs: Rational,
    #[serde(with = "crate::exactnum::rational_serde")]
    pub rhs: Rational,
    pub satisfied: bool,
}

/// `2A(1/x, s) + 2A(x, t) + diff . diff` against `1` (light) or
/// `1 + 2(s/P + t/Q)` (heavy), at the limit. Here `x = P/Q + eps`,
/// `s`, `t` are the total positive multiplicities on `beta_1`, `beta_2`,
/// and the diff vector is taken against the unnormalized weights of `P/Q`.
pub fn fundamental_estimate(c: &CurveData, heavy: bool) -> Result<FundamentalEstimate> {
    c.expect_level(Level::BlowupE)?;
    let b = c.x.base.clone();
    let ws = weight_sequence(&b)?;
    let w = ws.unnormalized();
    if c.z.len() > w.len() {
        return Err(Error::LengthMismatch(c.z.len(), w.len()));
    }
    let mut z: Vec<Rational> = c.z.iter().map(|m| int(m.clone())).collect();
    z.resize(w.len(), Rational::zero());
    let (s, t) = (c.positive.n1(), c.positive.n2());
    let two_a = |theta: &PerturbedRational, m: u64| -> Result<Rational> {
        if m == 0 {
            Ok(Rational::zero())
        } else {
            Ok(crate::lattice::twice_area(theta, m)?.base)
        }
    };
    let area_small = two_a(&recip_x(&c.x)?, s)?;
    let area_large = two_a(&c.x, t)?;
    let dv = diff_vector(&z, &w)?;
    let diff_norm2 = dv.norm2();
    let lhs = &area_small + &area_large + &diff_norm2;
    let rhs = if heavy {
        let (p, q) = (b.numer().clone(), b.denom().clone());
        int(1) + int(2) * (Rational::new(s.into(), p) + Rational::new(t.into(), q))
    } else {
        int(1)
    };
    Ok(FundamentalEstimate {
        satisfied: lhs <= rhs,
        area_small,
        area_large,
        diff_norm2,
        lhs,
        rhs,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StabilizedKind {
    /// Curve in the stabilized cobordism, possibly with Morse-Bott ends.
    TopLevel,
    /// Connected symplectization curve with positive ends only.
    SymplectizationNoNeg,
    /// Symplectization curve with one negative end `beta_1^p`.
    NeckComponent,
    /// Curve in the stabilized cobordism without Morse-Bott ends.
    CobordismNoGamma,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilizedEndData {
    /// Stabilization dimension.
    pub k: u64,
    /// Size of the round factor, when known.
    #[serde(default, with = "opt_rational")]
    pub s_round: Option<Rational>,
    #[serde(default)]
    pub degree: i64,
    pub x: PerturbedRational,
    #[serde(default)]
    pub beta1: Vec<u64>,
    #[serde(default)]
    pub beta2: Vec<u64>,
    /// Ends on the Morse-Bott orbit.
    #[serde(default)]
    pub gamma: Vec<u64>,
    /// Negative end `beta_1^p` of a neck component.
    #[serde(default)]
    pub bottom: Option<u64>,
}

mod opt_rational {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
        match r {
            Some(r) => s.serialize_some(&fmt_rational(r)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Rational>, D::Error> {
        let o = Option::<String>::deserialize(d)?;
        o.map(|s| crate::exactnum::parse_rational(&s).map_err(serde::de::Error::custom))
            .transpose()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilizedIndex {
    #[serde(with = "crate::exactnum::bigint_serde")]
    pub index: BigInt,
    /// True when `S` is given and below `3 x d^2`.
    pub below_threshold: bool,
}

fn floor_over(num: &PerturbedRational, s: &Option<Rational>) -> BigInt {
    match s {
        Some(s) => num.scale(&s.recip()).floor(),
        None => BigInt::zero(),
    }
}

pub fn stabilized_index(e: &StabilizedEndData, kind: StabilizedKind) -> Result<StabilizedIndex> {
    let x = &e.x;
    let inv = recip_x(x)?;
    if let Some(s) = &e.s_round {
        if s <= &x.base {
            return Err(Error::Inconsistent("round factor S must exceed x".into()));
        }
    }
    if kind != StabilizedKind::TopLevel && !e.gamma.is_empty() {
        return Err(Error::Inconsistent("Morse-Bott ends only occur at top level".into()));
    }
    if kind == StabilizedKind::TopLevel && !e.gamma.is_empty() && e.s_round.is_none() {
        return Err(Error::Inconsistent("Morse-Bott ends need an explicit S".into()));
    }
    if (kind == StabilizedKind::NeckComponent) != e.bottom.is_some() {
        return Err(Error::Inconsistent("bottom end is set exactly for neck components".into()));
    }
    let k = BigInt::from(e.k);
    let (n1, n2, n3) = (e.beta1.len() as i64, e.beta2.len() as i64, e.gamma.len() as i64);
    let ends = Ends::new(e.beta1.clone(), e.beta2.clone());
    ends.validate()?;
    let index = match kind {
        StabilizedKind::TopLevel => {
            let mut ind = (&k - 1) * (2 - n1 - n2 - n3) + 6 * BigInt::from(e.degree);
            for &r in &e.beta1 {
                let rr = PerturbedRational::from_int(r as i64);
                ind -= 2 * BigInt::from(r)
                    + (2 * floor_nonintegral(&inv.scale_int(r as i64))? + 1)
                    + &k * (2 * floor_over(&rr, &e.s_round) + 1);
            }
            for &s in &e.beta2 {
                let sx = x.scale_int(s as i64);
                ind -= 2 * BigInt::from(s)
                    + (2 * floor_nonintegral(&sx)? + 1)
                    + &k * (2 * floor_over(&sx, &e.s_round) + 1);
            }
            let sr = e.s_round.clone().unwrap_or_else(Rational::zero);
            for &t in &e.gamma {
                let ts = PerturbedRational::exact(&sr * int(t));
                ind -= 2 * BigInt::from(t)
                    + (2 * ts.floor() + 1)
                    + (2 * (&ts * &inv).floor() + 1)
                    + (&k - 1) * (2 * BigInt::from(t) - 1);
            }
            ind
        }
        StabilizedKind::SymplectizationNoNeg => {
            2 * (&k - 1 + n1 + n2 + cz_terms(&ends, x)?)
        }
        StabilizedKind::NeckComponent => {
            let p = e.bottom.expect("checked");
            let bottom = Ends::new(vec![p], vec![]);
            2 * (BigInt::from(-1) + n1 + n2 + cz_terms(&ends, x)? - cz_terms(&bottom, x)?)
        }
        StabilizedKind::CobordismNoGamma => {
            2 * (&k - 1 + 3 * BigInt::from(e.degree) - &k * (n1 + n2) - cz_terms(&ends, x)?)
        }
    };
    let below_threshold = match &e.s_round {
        Some(s) => {
            let d = int(e.degree);
            s < &(int(3) * &x.base * &d * &d)
        }
        None => false,
    };
    Ok(StabilizedIndex {
        index,
        below_threshold,
    })
}

/// Ceiling form of the neck-component index: `sum(r + ceil(r/x)) + sum(s + ceil(sx)) - p - ceil(p/x)`,
/// returned as the full index.
pub fn neck_index_ceiling(beta1: &[u64], beta2: &[u64], p: u64, x: &PerturbedRational) -> Result<BigInt> {
    let inv = recip_x(x)?;
    let mut h = BigInt::zero();
    for &r in beta1 {
        h += BigInt::from(r) + inv.scale_int(r as i64).ceil();
    }
    for &s in beta2 {
        h += BigInt::from(s) + x.scale_int(s as i64).ceil();
    }
    h -= BigInt::from(p) + inv.scale_int(p as i64).ceil();
    Ok(2 * h)
}

/// Ends of a curve in the stabilized cobordism without Morse-Bott ends.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverEnds {
    pub beta1: Vec<u64>,
    pub beta2: Vec<u64>,
}

/// `ind(u)/2 - (m/2) ind(u~)` for an `m`-fold cover `u` of `u~`.
pub fn cover_index_defect(
    cover: &CoverEnds,
    m: u64,
    base: &CoverEnds,
    k: u64,
    x: &PerturbedRational,
) -> Result<BigInt> {
    let sum = |v: &[u64]| v.iter().sum::<u64>();
    if sum(&cover.beta1) != m * sum(&base.beta1) || sum(&cover.beta2) != m * sum(&base.beta2) {
        return Err(Error::Inconsistent(
            "cover multiplicities must be m times the base multiplicities".into(),
        ));
    }
    let inv = recip_x(x)?;
    let fl1 = |v: &[u64]| -> Result<BigInt> {
        v.iter()
            .map(|&r| floor_nonintegral(&inv.scale_int(r as i64)))
            .sum()
    };
    let fl2 = |v: &[u64]| -> Result<BigInt> {
        v.iter()
            .map(|&s| floor_nonintegral(&x.scale_int(s as i64)))
            .sum()
    };
    let (k, m) = (BigInt::from(k), BigInt::from(m));
    let n_cover = BigInt::from(cover.beta1.len() + cover.beta2.len());
    let n_base = BigInt::from(base.beta1.len() + base.beta2.len());
    Ok((&k - 1) * (1 - &m) - &k * (n_cover - &m * n_base) - fl1(&cover.beta1)? - fl2(&cover.beta2)?
        + &m * fl1(&base.beta1)?
        + &m * fl2(&base.beta2)?)
}

/// Lower bound `sum_{i<r} (r - i) a_i` for double points in the neck, with
/// `a_1 <= ... <= a_r`.
pub fn neck_double_points(parts: &[u64]) -> Result<u64> {
    if parts.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Unsorted(parts.to_vec()));
    }
    let r = parts.len() as u64;
    Ok(parts
        .iter()
        .enumerate()
        .map(|(i, &a)| (r - 1 - i as u64) * a)
        .sum())
}

/// Relative intersection pairing in `CP^2` minus an ellipsoid for classes
/// `(d, n1, n2)`: `d d' - (n1 n2' + n1' n2)`. On the diagonal this is `d^2 - 2 n1 n2`.
pub fn q_tau_cp2(a: (&BigInt, &BigInt, &BigInt), b: (&BigInt, &BigInt, &BigInt)) -> BigInt {
    a.0 * b.0 - (a.1 * b.2 + b.1 * a.2)
}

/// Relative intersection pairing in the blown-up ellipsoid for classes
/// `(n1, n2, m)`: `n1 n2' + n1' n2 - m . m'`. On the diagonal `2 n1 n2 - |m|^2`.
pub fn q_tau_blowup(
    a: (&BigInt, &BigInt, &[BigInt]),
    b: (&BigInt, &BigInt, &[BigInt]),
) -> Result<BigInt> {
    if a.2.len() != b.2.len() {
        return Err(Error::LengthMismatch(a.2.len(), b.2.len()));
    }
    let mm: BigInt = a.2.iter().zip(b.2).map(|(u, v)| u * v).sum();
    Ok(a.0 * b.1 + b.0 * a.1 - mm)
}

/// Whether a value is nonnegative (used for action sanity checks).
pub fn is_nonnegative(v: &PerturbedRational) -> bool {
    !v.base.is_negative() && !(v.base.is_zero() && v.eps.is_negative())
}
