//! Lattice-point engines: ECH capacity sequences of ellipsoids, orbit-set
//! gradings, partition conditions as lattice paths, and the area functions.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::{fmt_rational, floor_rat, floor_sum, int, PerturbedRational, Rational};
use crate::numberseq::best_approx_below;

/// Orbit set `{(beta_1, m1), (beta_2, m2)}` on the boundary of `E(a, b)`.
/// `beta_1` has action `a`, `beta_2` has action `b`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OrbitSet {
    pub m1: u64,
    pub m2: u64,
    #[serde(with = "crate::exactnum::rational_serde")]
    pub a: Rational,
    pub b: PerturbedRational,
}

impl OrbitSet {
    pub fn new(m1: u64, m2: u64, a: Rational, b: PerturbedRational) -> Self {
        Self { m1, m2, a, b }
    }

    pub fn action(&self) -> PerturbedRational {
        PerturbedRational::exact(&self.a * int(self.m1)) + self.b.scale_int(self.m2 as i64)
    }

    /// Monodromy angle of `beta_1`, namely `a/b`.
    pub fn angle1(&self) -> PerturbedRational {
        self.b.recip().expect("b > 0").scale(&self.a)
    }

    /// Monodromy angle of `beta_2`, namely `b/a`.
    pub fn angle2(&self) -> PerturbedRational {
        self.b.scale(&self.a.recip())
    }
}

/// `sum_{i=1}^{n} floor(i * x)` for `x >= 0`, in O(log) time.
pub fn sum_floor_multiples(x: &PerturbedRational, n: &BigInt) -> BigInt {
    assert!(!x.base.is_negative(), "angle must be nonnegative");
    if n.is_zero() {
        return BigInt::zero();
    }
    let (u, v) = (x.base.numer(), x.base.denom());
    let mut s = floor_sum(&(n + 1u32), v, u, &BigInt::zero());
    if x.eps.is_negative() {
        // i*x hits an integer exactly when v | i, and then floor drops by one
        s -= n / v;
    }
    s
}

/// Sum of `2 floor(i x) + 1` for `i = 1..=m`.
fn cz_sum(x: &PerturbedRational, m: u64) -> BigInt {
    let m = BigInt::from(m);
    2 * sum_floor_multiples(x, &m) + m
}

/// ECH grading `gr(alpha)` of an orbit set, from the Conley-Zehnder sums.
pub fn orbit_grading(set: &OrbitSet) -> BigInt {
    let (m1, m2) = (BigInt::from(set.m1), BigInt::from(set.m2));
    &m1 + &m2 + 2 * &m1 * &m2 + cz_sum(&set.angle1(), set.m1) + cz_sum(&set.angle2(), set.m2)
}

/// The same grading, by counting lattice points `(x, y) >= 0` with
/// `x + (b/a) y <= m1 + (b/a) m2` row by row.
pub fn orbit_grading_lattice(set: &OrbitSet) -> BigInt {
    let r = set.angle2();
    let mut count = BigInt::zero();
    let mut y: u64 = 0;
    loop {
        let shift = r.scale(&(int(set.m2) - int(y)));
        let rhs = PerturbedRational::exact(int(set.m1)) + shift;
        if rhs.base.is_negative() || (rhs.base.is_zero() && rhs.eps.is_negative()) {
            break;
        }
        count += rhs.floor() + 1;
        y += 1;
    }
    2 * (count - 1)
}

/// Entry of a capacity sequence together with the orbit set realizing it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CapEntry {
    pub value: PerturbedRational,
    pub ell: u64,
    pub m: u64,
}

fn count_below(a: &Rational, b: &PerturbedRational, v: &Rational) -> u64 {
    let inv_a = a.recip();
    let mut total = 0u64;
    let mut m = 0u64;
    loop {
        let rest = PerturbedRational::exact(v.clone()) - b.scale_int(m as i64);
        if rest.base.is_negative() || (rest.base.is_zero() && rest.eps.is_negative()) {
            break;
        }
        let top = rest.scale(&inv_a).floor();
        total = total.saturating_add(top.to_u64().unwrap_or(u64::MAX).saturating_add(1));
        m += 1;
    }
    total
}

/// Sorted values `l*a + m*b` (`l, m >= 0`) with indices `0..=k_max`, with the
/// orbit set of each entry.
pub fn cap_sequence_with_sets(
    a: &Rational,
    b: &PerturbedRational,
    k_max: usize,
) -> Result<Vec<CapEntry>> {
    if !a.is_positive() || !b.is_positive() {
        return Err(Error::NonPositive(format!("({}, {b})", fmt_rational(a))));
    }
    let need = k_max as u64 + 1;
    let mut v = if a > &b.base { a.clone() } else { b.base.clone() };
    while count_below(a, b, &v) < need {
        v *= int(2);
    }
    let inv_a = a.recip();
    let mut out = Vec::new();
    let mut m = 0u64;
    loop {
        let mb = b.scale_int(m as i64);
        let rest = PerturbedRational::exact(v.clone()) - &mb;
        if rest.base.is_negative() || (rest.base.is_zero() && rest.eps.is_negative()) {
            break;
        }
        let top = rest.scale(&inv_a).floor().to_u64().expect("bounded sweep");
        for ell in 0..=top {
            out.push(CapEntry {
                value: PerturbedRational::exact(a * int(ell)) + &mb,
                ell,
                m,
            });
        }
        m += 1;
    }
    out.sort_by(|x, y| x.value.cmp(&y.value).then(x.m.cmp(&y.m)));
    out.truncate(k_max + 1);
    Ok(out)
}

pub fn cap_sequence(
    a: &Rational,
    b: &PerturbedRational,
    k_max: usize,
) -> Result<Vec<PerturbedRational>> {
    Ok(cap_sequence_with_sets(a, b, k_max)?
        .into_iter()
        .map(|e| e.value)
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathKind {
    /// Maximal concave path below the line.
    ConcaveBelow,
    /// Minimal convex path above the line.
    ConvexAbove,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticePath {
    pub kind: PathKind,
    /// Primitive edge vectors `(dx, dy)` in path order.
    #[serde(with = "crate::exactnum::edge_vec_serde")]
    pub edges: Vec<(u64, BigInt)>,
}

impl LatticePath {
    pub fn end(&self) -> (u64, BigInt) {
        self.edges
            .iter()
            .fold((0, BigInt::zero()), |(x, y), (dx, dy)| (x + dx, y + dy))
    }

    /// Slopes are non-increasing for concave paths and non-decreasing for convex ones.
    pub fn is_well_formed(&self) -> bool {
        let ok_pair = |a: &(u64, BigInt), b: &(u64, BigInt)| {
            let (l, r) = (&a.1 * BigInt::from(b.0), &b.1 * BigInt::from(a.0));
            match self.kind {
                PathKind::ConcaveBelow => l >= r,
                PathKind::ConvexAbove => l <= r,
            }
        };
        self.edges
            .iter()
            .all(|(dx, dy)| *dx > 0 && BigInt::from(*dx).gcd(dy).is_one())
            && self.edges.windows(2).all(|w| ok_pair(&w[0], &w[1]))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EndPartition {
    pub theta: PerturbedRational,
    pub parts: Vec<u64>,
    pub path: LatticePath,
}

impl EndPartition {
    pub fn total(&self) -> u64 {
        self.parts.iter().sum()
    }
}

fn cross(o: &(BigInt, BigInt), a: &(BigInt, BigInt), b: &(BigInt, BigInt)) -> BigInt {
    (&a.0 - &o.0) * (&b.1 - &o.1) - (&a.1 - &o.1) * (&b.0 - &o.0)
}

/// Hull through `pts` (sorted by x). `upper` keeps the upper hull, otherwise the lower.
fn hull(pts: &[(BigInt, BigInt)], upper: bool) -> Vec<(BigInt, BigInt)> {
    let mut h: Vec<(BigInt, BigInt)> = Vec::new();
    for p in pts {
        while h.len() >= 2 {
            let c = cross(&h[h.len() - 2], &h[h.len() - 1], p);
            let pop = if upper { !c.is_negative() } else { !c.is_positive() };
            if pop {
                h.pop();
            } else {
                break;
            }
        }
        h.push(p.clone());
    }
    h
}

fn split_edges(vertices: &[(BigInt, BigInt)]) -> Vec<(u64, BigInt)> {
    let mut edges = Vec::new();
    for w in vertices.windows(2) {
        let dx = &w[1].0 - &w[0].0;
        let dy = &w[1].1 - &w[0].1;
        let g = dx.gcd(&dy);
        let step = ((&dx / &g).to_u64().expect("edge width"), &dy / &g);
        for _ in 0..g.to_u64().expect("edge count") {
            edges.push(step.clone());
        }
    }
    edges
}

fn check_m(theta: &PerturbedRational, m: u64) -> Result<()> {
    if m == 0 {
        return Err(Error::MalformedPartition("m = 0 ends are not formed".into()));
    }
    if !theta.is_positive() {
        return Err(Error::NonPositive(theta.to_string()));
    }
    Ok(())
}

/// `p^+_theta(m)` from the maximal concave lattice path below `y = theta x`.
pub fn partition_pos(theta: &PerturbedRational, m: u64) -> Result<EndPartition> {
    check_m(theta, m)?;
    let pts: Vec<(BigInt, BigInt)> = (0..=m)
        .map(|i| (BigInt::from(i), theta.scale_int(i as i64).floor()))
        .collect();
    let edges = split_edges(&hull(&pts, true));
    Ok(EndPartition {
        theta: theta.clone(),
        parts: edges.iter().map(|e| e.0).collect(),
        path: LatticePath {
            kind: PathKind::ConcaveBelow,
            edges,
        },
    })
}

/// `p^-_theta(m)` from the minimal convex lattice path above `y = theta x`.
pub fn partition_neg(theta: &PerturbedRational, m: u64) -> Result<EndPartition> {
    check_m(theta, m)?;
    let pts: Vec<(BigInt, BigInt)> = (0..=m)
        .map(|i| (BigInt::from(i), theta.scale_int(i as i64).ceil()))
        .collect();
    let edges = split_edges(&hull(&pts, false));
    Ok(EndPartition {
        theta: theta.clone(),
        parts: edges.iter().map(|e| e.0).collect(),
        path: LatticePath {
            kind: PathKind::ConvexAbove,
            edges,
        },
    })
}

/// Best-approximation-from-below denominators of `theta`, used by the
/// greedy recursion for `p^+`.
#[derive(Clone, Debug)]
pub struct ApproxDenominators {
    pub theta: PerturbedRational,
    pub dens: Vec<u64>,
}

impl ApproxDenominators {
    pub fn new(theta: &PerturbedRational, max_den: u64) -> Result<Self> {
        let list = best_approx_below(theta, &BigInt::from(max_den))?;
        let dens = list
            .iter()
            .map(|r| r.denom().to_u64().expect("denominator fits"))
            .collect();
        Ok(Self {
            theta: theta.clone(),
            dens,
        })
    }

    /// Largest denominator `<= t`.
    pub fn largest_at_most(&self, t: u64) -> u64 {
        let i = self.dens.partition_point(|&d| d <= t);
        self.dens[i - 1]
    }

    /// Greedy decomposition `t = k_1 + k_2 + ...`, which is `p^+_theta(t)` in path order.
    pub fn greedy(&self, mut t: u64) -> Vec<u64> {
        let mut parts = Vec::new();
        while t > 0 {
            let k = self.largest_at_most(t);
            parts.push(k);
            t -= k;
        }
        parts
    }
}

/// `p^+_theta(m)` by the recursion `p^+(m) = p^+(m - k) + (k)`, with `k` the
/// largest best-approximation denominator not exceeding `m`.
pub fn partition_pos_recursive(theta: &PerturbedRational, m: u64) -> Result<Vec<u64>> {
    check_m(theta, m)?;
    Ok(ApproxDenominators::new(theta, m)?.greedy(m))
}

/// `kappa(theta, s) = s (s theta - floor(s theta))`
pub fn kappa(theta: &PerturbedRational, s: u64) -> PerturbedRational {
    theta.scale_int(s as i64).frac().scale_int(s as i64)
}

/// `e = a theta - floor(a theta)`
fn gap(theta: &PerturbedRational, a: u64) -> PerturbedRational {
    theta.scale_int(a as i64).frac()
}

/// Twice the area between `y = theta x` and a concave path with the given
/// parts in path order.
pub fn twice_area_of_parts(theta: &PerturbedRational, parts: &[u64]) -> PerturbedRational {
    let mut acc = PerturbedRational::from_int(0);
    let mut e_prev = PerturbedRational::from_int(0);
    for &a in parts {
        let e = gap(theta, a);
        acc = acc + e.scale_int(a as i64) + e_prev.scale_int(2 * a as i64);
        e_prev = e_prev + e;
    }
    acc
}

/// `2 A(theta, t)`.
pub fn twice_area(theta: &PerturbedRational, t: u64) -> Result<PerturbedRational> {
    let parts = partition_pos_recursive(theta, t)?;
    Ok(twice_area_of_parts(theta, &parts))
}

pub fn area_a(theta: &PerturbedRational, t: u64) -> Result<PerturbedRational> {
    Ok(twice_area(theta, t)?.scale(&Rational::new(1.into(), 2.into())))
}

/// `2A` through the grading: `theta t^2 - gr(gamma^t) + t + floor(t theta) + r`.
pub fn twice_area_via_grading(theta: &PerturbedRational, t: u64, r: usize) -> PerturbedRational {
    let tb = BigInt::from(t);
    let gr = 2 * &tb + 2 * sum_floor_multiples(theta, &tb);
    let tt = int(tb.clone() * &tb);
    theta.scale(&tt) - PerturbedRational::exact(int(gr - &tb - theta.scale_int(t as i64).floor() - BigInt::from(r)))
}

/// Area `M(theta, t)` under the maximal concave path.
pub fn area_m(theta: &PerturbedRational, t: u64) -> Result<PerturbedRational> {
    let half = Rational::new(1.into(), 2.into());
    Ok(theta.scale(&(int(t * t) * &half)) - area_a(theta, t)?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionArea {
    #[serde(with = "crate::exactnum::rational_serde")]
    pub area: Rational,
    #[serde(with = "crate::exactnum::bigint_serde")]
    pub lattice_count: BigInt,
    #[serde(with = "crate::exactnum::bigint_serde")]
    pub interior_count: BigInt,
    /// Pick data for the region under the path: `2A = 2T - B - 2`.
    #[serde(with = "crate::exactnum::bigint_serde")]
    pub twice_area_under: BigInt,
    #[serde(with = "crate::exactnum::bigint_serde")]
    pub t_points: BigInt,
    #[serde(with = "crate::exactnum::bigint_serde")]
    pub b_points: BigInt,
}

impl PartitionArea {
    pub fn pick_holds(&self) -> bool {
        self.twice_area_under == 2 * &self.t_points - &self.b_points - 2
    }
}

/// `A_C = L + b/2` for an arbitrary positive-end partition, ordered by
/// non-increasing `floor(a theta)/a`.
pub fn area_from_partition(theta: &PerturbedRational, parts: &[u64]) -> Result<PartitionArea> {
    if parts.is_empty() || parts.contains(&0) {
        return Err(Error::MalformedPartition(format!("{parts:?}")));
    }
    let p: Vec<BigInt> = parts
        .iter()
        .map(|&a| theta.scale_int(a as i64).floor())
        .collect();
    for i in 1..parts.len() {
        // floor(a_{i-1} theta)/a_{i-1} >= floor(a_i theta)/a_i
        if &p[i - 1] * BigInt::from(parts[i]) < &p[i] * BigInt::from(parts[i - 1]) {
            return Err(Error::PartitionOrder {
                parts: parts.to_vec(),
            });
        }
    }
    let m: u64 = parts.iter().sum();
    // L: lattice points strictly above the path and below the line, x = 0..=m
    let mut lcount = BigInt::zero();
    let (mut x0, mut y0) = (0u64, BigInt::zero());
    for (&a, pi) in parts.iter().zip(&p) {
        for dx in 1..=a {
            let x = x0 + dx;
            let path_y = int(y0.clone()) + Rational::new(pi * BigInt::from(dx), BigInt::from(a));
            lcount += theta.scale_int(x as i64).floor() - floor_rat(&path_y);
        }
        x0 += a;
        y0 += pi;
    }
    let interior: BigInt = parts
        .iter()
        .zip(&p)
        .map(|(&a, pi)| BigInt::from(a).gcd(pi) - 1)
        .sum();
    let area = int(lcount.clone()) + Rational::new(interior.clone(), 2.into());

    let mut twice_under = BigInt::zero();
    for (i, &ai) in parts.iter().enumerate() {
        for (j, &aj) in parts.iter().enumerate() {
            let (x, y) = (&p[i] * BigInt::from(aj), &p[j] * BigInt::from(ai));
            twice_under += if x > y { x } else { y };
        }
    }
    let mb = BigInt::from(m);
    let t_points = &mb + 1 + sum_floor_multiples(theta, &mb) - &lcount;
    let b_points = &mb + BigInt::from(parts.len()) + p.iter().sum::<BigInt>() + &interior;
    Ok(PartitionArea {
        area,
        lattice_count: lcount,
        interior_count: interior,
        twice_area_under: twice_under,
        t_points,
        b_points,
    })
}

/// All `t <= t_max` with `lim 2A(theta, t) <= bound` (or `< bound` when
/// `strict`), with their `2A` values.
///
/// Walks greedy decompositions front to back. Every prefix of a greedy
/// decomposition is itself greedy and has smaller area, so pruning at the
/// bound is exact and the walk visits only the sublevel set.
pub fn area_sublevel_set(
    theta: &PerturbedRational,
    t_max: u64,
    bound: &Rational,
    strict: bool,
) -> Result<BTreeMap<u64, PerturbedRational>> {
    let d = ApproxDenominators::new(theta, t_max)?;
    let gaps: Vec<PerturbedRational> = d.dens.iter().map(|&k| gap(theta, k)).collect();
    if gaps.iter().any(|g| g.base.is_zero()) {
        return Err(Error::Inconsistent(
            "a best approximation denominator has zero limiting gap".into(),
        ));
    }
    let within = |v: &PerturbedRational| {
        if strict {
            &v.base < bound
        } else {
            &v.base <= bound
        }
    };
    let mut out = BTreeMap::new();
    // (sum so far, accumulated gap, value, cap on the remainder)
    let mut stack = vec![(
        0u64,
        PerturbedRational::from_int(0),
        PerturbedRational::from_int(0),
        t_max,
    )];
    while let Some((sum, e_acc, val, cap)) = stack.pop() {
        for (i, &k) in d.dens.iter().enumerate() {
            if k > cap {
                break;
            }
            let v = &val + &gaps[i].scale_int(k as i64) + e_acc.scale_int(2 * k as i64);
            if !within(&v) {
                continue;
            }
            let next_cap = match d.dens.get(i + 1) {
                Some(&nk) => (cap - k).min(nk - k - 1),
                None => cap - k,
            };
            out.insert(sum + k, v.clone());
            if next_cap > 0 {
                stack.push((sum + k, &e_acc + &gaps[i], v, next_cap));
            }
        }
    }
    Ok(out)
}
