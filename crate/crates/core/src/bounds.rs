//! Closed-form sufficient conditions for `(k_A, k_B)`-choosability, the
//! exact boundary thresholds, and a grid sweeper over parameter points.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::param::{ParamPoint, PointMode};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ConditionId {
    Transversal,
    Coupon,
    Cu1,
    Cu2,
    C3c1,
    C3c2,
    C3c3,
    Boundary,
    Degrees,
}

impl ConditionId {
    pub const ALL: [ConditionId; 9] = [
        ConditionId::Transversal,
        ConditionId::Coupon,
        ConditionId::Cu1,
        ConditionId::Cu2,
        ConditionId::C3c1,
        ConditionId::C3c2,
        ConditionId::C3c3,
        ConditionId::Boundary,
        ConditionId::Degrees,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ConditionId::Transversal => "transversal",
            ConditionId::Coupon => "coupon",
            ConditionId::Cu1 => "cu1",
            ConditionId::Cu2 => "cu2",
            ConditionId::C3c1 => "c3c1",
            ConditionId::C3c2 => "c3c2",
            ConditionId::C3c3 => "c3c3",
            ConditionId::Boundary => "boundary",
            ConditionId::Degrees => "degrees",
        }
    }

    /// True if `holds` certifies choosability at the point.
    pub fn is_sufficient(self) -> bool {
        self != ConditionId::Degrees
    }
}

impl fmt::Display for ConditionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ConditionId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ConditionId::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| format!("unknown condition '{s}'"))
    }
}

/// How `margin` relates to `holds`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// holds iff margin >= 0
    Geq,
    /// holds iff margin <= 0
    Leq,
    /// holds iff margin > 0
    Gt,
    /// holds iff margin < 0
    Lt,
    /// the margin is a reported value, not a test
    Info,
}

impl Direction {
    pub fn accepts(self, margin: f64) -> Option<bool> {
        match self {
            Direction::Geq => Some(margin >= 0.0),
            Direction::Leq => Some(margin <= 0.0),
            Direction::Gt => Some(margin > 0.0),
            Direction::Lt => Some(margin < 0.0),
            Direction::Info => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionEntry {
    pub id: ConditionId,
    pub applicable: bool,
    pub holds: bool,
    pub margin: f64,
    pub direction: Direction,
    pub inputs: Vec<(String, String)>,
}

impl ConditionEntry {
    fn new(id: ConditionId, holds: bool, margin: f64, direction: Direction) -> Self {
        Self {
            id,
            applicable: true,
            holds,
            margin,
            direction,
            inputs: Vec::new(),
        }
    }

    fn not_applicable(id: ConditionId, why: &str) -> Self {
        let mut e = Self::new(id, false, f64::NAN, Direction::Info);
        e.applicable = false;
        e.echo("note", why);
        e
    }

    fn echo(&mut self, key: &str, value: impl fmt::Display) {
        self.inputs.push((key.to_string(), value.to_string()));
    }

    pub fn input(&self, key: &str) -> Option<&str> {
        self.inputs.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionReport {
    pub point: ParamPoint,
    pub entries: Vec<ConditionEntry>,
}

/// Rational bracket `[lo, hi]` around `e` from the first `n` terms of its
/// series; the tail is below `1 / (n! n)`.
fn e_bracket(n: u32) -> (BigRational, BigRational) {
    let mut sum = BigRational::zero();
    let mut fact = BigInt::one();
    for i in 0..n {
        if i > 0 {
            fact *= i;
        }
        sum += BigRational::new(BigInt::one(), fact.clone());
    }
    fact *= n.max(1);
    let tail = BigRational::new(BigInt::one(), fact * n.max(1));
    (sum.clone(), sum + tail)
}

/// Whether the rational `r` exceeds `e` (never equal, `e` is irrational).
pub fn rational_exceeds_e(r: &BigRational) -> bool {
    let mut n = 24;
    loop {
        let (lo, hi) = e_bracket(n);
        if *r > hi {
            return true;
        }
        if *r < lo {
            return false;
        }
        n *= 2;
    }
}

fn big(x: u64) -> BigInt {
    BigInt::from(x)
}

/// Decides `k_b >= (e k_a Δ_B)^{1/k_a} Δ_A`, i.e. `k_b^{k_a} > e k_a Δ_B Δ_A^{k_a}`.
fn transversal_one_way(delta_a: u64, delta_b: u64, k_a: u64, k_b: u64) -> (bool, f64) {
    let (da, db, ka, kb) = (delta_a as f64, delta_b as f64, k_a as f64, k_b as f64);
    let rhs = (std::f64::consts::E * ka * db).powf(1.0 / ka) * da;
    let log_gap = ka * kb.ln() - (1.0 + ka.ln() + db.ln() + ka * da.ln());
    let holds = if log_gap.abs() > 1e-6 {
        log_gap > 0.0
    } else {
        let lhs = big(k_b).pow(k_a as u32);
        let rest = big(k_a) * big(delta_b) * big(delta_a).pow(k_a as u32);
        rational_exceeds_e(&BigRational::new(lhs, rest))
    };
    (holds, rhs)
}

/// Local lemma condition via independent transversals, in either
/// orientation. The margin is `k_B - RHS` for the better orientation.
pub fn check_transversal_condition(point: &ParamPoint) -> ConditionEntry {
    let (da, db, ka, kb) = (point.delta_a(), point.delta_b(), point.k_a, point.k_b);
    let (h1, rhs1) = transversal_one_way(da, db, ka, kb);
    let (h2, rhs2) = transversal_one_way(db, da, kb, ka);
    let (m1, m2) = (kb as f64 - rhs1, ka as f64 - rhs2);
    let margin = if h1 == h2 { m1.max(m2) } else if h1 { m1 } else { m2 };
    let mut e = ConditionEntry::new(ConditionId::Transversal, h1 || h2, margin, Direction::Geq);
    e.echo("rhs", rhs1);
    e.echo("rhs_swapped", rhs2);
    e.echo("holds_as_stated", h1);
    e.echo("holds_swapped", h2);
    e.echo("log", "natural");
    e
}

fn coupon_exponent(delta_a: u64, k_a: u64, k_b: u64) -> BigRational {
    let ratio = BigRational::new(big(k_b), big(k_a));
    big_min(ratio, BigRational::one()) * BigRational::from_integer(big(delta_a))
}

fn big_min(x: BigRational, y: BigRational) -> BigRational {
    if x < y {
        x
    } else {
        y
    }
}

/// `ln` of the coupon left-hand side.
fn coupon_log_lhs(delta_a: u64, delta_b: u64, k_a: u64, k_b: u64) -> f64 {
    let (da, db, ka, kb) = (delta_a as f64, delta_b as f64, k_a as f64, k_b as f64);
    let x = da * (kb / ka).min(1.0);
    // ln(1 - q^x) with q = 1 - 1/k_B, accurate at both ends
    let log_q_x = x * (-1.0 / kb).ln_1p();
    let log_miss = if log_q_x < -std::f64::consts::LN_2 {
        (-log_q_x.exp()).ln_1p()
    } else {
        (-log_q_x.exp_m1()).ln()
    };
    1.0 + (da * (db - 1.0) + 1.0).ln() + ka * log_miss
}

fn coupon_one_way(delta_a: u64, delta_b: u64, k_a: u64, k_b: u64) -> (bool, f64, bool) {
    let log_lhs = coupon_log_lhs(delta_a, delta_b, k_a, k_b);
    let x = coupon_exponent(delta_a, k_a, k_b);
    if log_lhs.abs() < 1e-9 && x.is_integer() {
        let x = x.to_integer().to_u32().expect("exponent fits");
        let keep = BigRational::new(big(k_b - 1), big(k_b));
        let miss = BigRational::one() - keep.pow(x);
        let q = BigRational::from_integer(big(delta_a * (delta_b - 1) + 1)) * miss.pow(k_a as u32);
        let holds = q.is_zero() || rational_exceeds_e(&q.recip());
        return (holds, log_lhs, true);
    }
    (log_lhs <= 0.0, log_lhs, false)
}

/// Coupon-collector condition `e(Δ_A(Δ_B - 1) + 1)(1 - (1 - 1/k_B)^x)^{k_A} <= 1`
/// with `x = Δ_A min(1, k_B/k_A)`, in either orientation. The margin is
/// `LHS - 1` for the better orientation.
pub fn check_coupon_condition(point: &ParamPoint) -> ConditionEntry {
    let (da, db, ka, kb) = (point.delta_a(), point.delta_b(), point.k_a, point.k_b);
    let (h1, l1, exact1) = coupon_one_way(da, db, ka, kb);
    let (h2, l2, exact2) = coupon_one_way(db, da, kb, ka);
    let (m1, m2) = (l1.exp() - 1.0, l2.exp() - 1.0);
    let margin = if h1 == h2 { m1.min(m2) } else if h1 { m1 } else { m2 };
    let mut e = ConditionEntry::new(ConditionId::Coupon, h1 || h2, margin, Direction::Leq);
    e.echo("log_lhs", l1);
    e.echo("log_lhs_swapped", l2);
    e.echo("exact_fallback", exact1 || exact2);
    e.echo("fp_error_bound", 1e-12 * (1.0 + l1.abs().max(l2.abs())));
    e
}

/// Left-hand side of `a p^{k_A} + b (1-p)^{k_B} < 1`.
pub fn completeupper_eq1(a: u64, b: u64, k_a: u64, k_b: u64, p: f64) -> f64 {
    a as f64 * p.powf(k_a as f64) + b as f64 * (1.0 - p).powf(k_b as f64)
}

/// Left-hand side of `a p^{k_A-1} / ((1-ε) k_B) + b exp(-ε² k_B p / 2) < 1`.
pub fn completeupper_eq2(a: u64, b: u64, k_a: u64, k_b: u64, p: f64, eps: f64) -> f64 {
    a as f64 * p.powf(k_a as f64 - 1.0) / ((1.0 - eps) * k_b as f64) + b as f64 * (-eps * eps * k_b as f64 * p / 2.0).exp()
}

fn complete_parts(point: &ParamPoint) -> Option<(u64, u64)> {
    point.parts()
}

/// Both random-partition inequalities at fixed `p` and `ε`.
pub fn check_completeupper(point: &ParamPoint, p: f64, eps: f64) -> [ConditionEntry; 2] {
    let Some((a, b)) = complete_parts(point) else {
        return [
            ConditionEntry::not_applicable(ConditionId::Cu1, "requires a complete point"),
            ConditionEntry::not_applicable(ConditionId::Cu2, "requires a complete point"),
        ];
    };
    if !(0.0 < p && p < 1.0 && 0.0 < eps && eps < 1.0) {
        return [
            ConditionEntry::not_applicable(ConditionId::Cu1, "requires 0 < p, eps < 1"),
            ConditionEntry::not_applicable(ConditionId::Cu2, "requires 0 < p, eps < 1"),
        ];
    }
    let (ka, kb) = (point.k_a, point.k_b);
    let l1 = completeupper_eq1(a, b, ka, kb, p);
    let l2 = completeupper_eq2(a, b, ka, kb, p, eps);
    let mut e1 = ConditionEntry::new(ConditionId::Cu1, l1 < 1.0, l1 - 1.0, Direction::Lt);
    e1.echo("p", p);
    e1.echo("lhs", l1);
    let mut e2 = ConditionEntry::new(ConditionId::Cu2, l2 < 1.0, l2 - 1.0, Direction::Lt);
    e2.echo("p", p);
    e2.echo("eps", eps);
    e2.echo("lhs", l2);
    [e1, e2]
}

/// Minimises `f` over `(lo, hi)` with a grid scan and golden-section
/// refinement around the best grid point.
fn minimise(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, grid: usize) -> (f64, f64) {
    let step = (hi - lo) / grid as f64;
    let (mut best_x, mut best_v) = (lo + step / 2.0, f64::INFINITY);
    for i in 0..grid {
        let x = lo + step * (i as f64 + 0.5);
        let v = f(x);
        if v < best_v {
            best_x = x;
            best_v = v;
        }
    }
    let (mut a, mut b) = ((best_x - step).max(lo + 1e-12), (best_x + step).min(hi - 1e-12));
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..100 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    let (x, v) = if fc < fd { (c, fc) } else { (d, fd) };
    if v < best_v {
        (x, v)
    } else {
        (best_x, best_v)
    }
}

/// Searches `p` (and `ε` for the second form) for the smallest left-hand
/// sides and reports the entries at the optimum.
pub fn optimize_completeupper(point: &ParamPoint) -> [ConditionEntry; 2] {
    let Some((a, b)) = complete_parts(point) else {
        return check_completeupper(point, 0.5, 0.5);
    };
    let (ka, kb) = (point.k_a, point.k_b);
    let (p1, _) = minimise(&|p| completeupper_eq1(a, b, ka, kb, p), 0.0, 1.0, 400);
    let inner = |eps: f64| minimise(&|p| completeupper_eq2(a, b, ka, kb, p, eps), 0.0, 1.0, 200);
    let (eps, _) = minimise(&|eps| inner(eps).1, 0.0, 1.0, 50);
    let (p2, _) = inner(eps);
    let [mut e1, _] = check_completeupper(point, p1, 0.5);
    let [_, mut e2] = check_completeupper(point, p2, eps);
    e1.echo("optimized", true);
    e2.echo("optimized", true);
    [e1, e2]
}

/// Least integer `Δ_0 > 2` with `ε Δ_0^ε > 3` and `x^{ε/3} > ln(2x)` for all
/// `x >= Δ_0`.
pub fn delta0(eps: f64) -> f64 {
    // g(y) = (ε/3) y - ln(ln 2 + y) with y = ln x is convex with its
    // minimum at y* = 3/ε - ln 2; beyond the larger root it stays positive.
    let g = |y: f64| eps / 3.0 * y - (std::f64::consts::LN_2 + y).ln();
    let y_star = (3.0 / eps - std::f64::consts::LN_2).max(0.0);
    let y_root = if g(y_star) > 0.0 {
        0.0
    } else {
        let (mut lo, mut hi) = (y_star, y_star.max(1.0) * 2.0);
        while g(hi) <= 0.0 {
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = (lo + hi) / 2.0;
            if g(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    };
    let first = (3.0 / eps).powf(1.0 / eps);
    let mut d = y_root.exp().max(first).max(2.0).floor() + 1.0;
    while !(eps * d.powf(eps) > 3.0 && d.powf(eps / 3.0) > (2.0 * d).ln()) {
        d += 1.0;
    }
    d
}

/// The three sufficient regimes for `K_{a,b}`. When a regime fires, the
/// random-partition inequality is re-evaluated at the proof's `(p, ε)`.
pub fn check_3cases(point: &ParamPoint, eps: f64, t: f64) -> [ConditionEntry; 3] {
    let Some((a, b)) = complete_parts(point) else {
        let why = "requires a complete point";
        return [
            ConditionEntry::not_applicable(ConditionId::C3c1, why),
            ConditionEntry::not_applicable(ConditionId::C3c2, why),
            ConditionEntry::not_applicable(ConditionId::C3c3, why),
        ];
    };
    let (ka, kb) = (point.k_a, point.k_b);
    [c3c1(a, b, ka, kb, eps), c3c2(a, b, ka, kb, t), c3c3(a, b, ka, kb)]
}

fn c3c1(a: u64, b: u64, ka: u64, kb: u64, eps: f64) -> ConditionEntry {
    if !(eps > 0.0) {
        return ConditionEntry::not_applicable(ConditionId::C3c1, "requires eps > 0");
    }
    let d0 = delta0(eps);
    let (fa, fb) = (a as f64, b as f64);
    let ga = ka as f64 - fb.powf(eps);
    let gb = kb as f64 - fa.powf(eps);
    let gd = fa.min(fb) - d0 + 1.0;
    let holds = ga > 0.0 && gb > 0.0 && gd > 0.0;
    let mut e = ConditionEntry::new(ConditionId::C3c1, holds, ga.min(gb).min(gd), Direction::Gt);
    e.echo("eps", eps);
    e.echo("delta0", d0);
    if holds {
        // orient so that a >= b
        let (a, b, ka, kb) = if a >= b { (a, b, ka, kb) } else { (b, a, kb, ka) };
        let p = (2.0 * a as f64).powf(-1.0 / (b as f64).powf(eps));
        let lhs = completeupper_eq1(a, b, ka, kb, p);
        e.echo("lemma_p", p);
        e.echo("lemma_lhs", lhs);
        e.echo("lemma_confirms", lhs < 1.0);
    }
    e
}

fn c3c2(a: u64, b: u64, ka: u64, kb: u64, t: f64) -> ConditionEntry {
    if !(t > 0.0) {
        return ConditionEntry::not_applicable(ConditionId::C3c2, "requires t > 0");
    }
    let need_a = (2.0 * a as f64).log2() / t;
    let need_b = 2f64.powf(t) * (2.0 * b as f64).ln();
    let (ga, gb) = (ka as f64 - need_a, kb as f64 - need_b);
    let holds = ga >= 0.0 && gb > 0.0;
    let mut e = ConditionEntry::new(ConditionId::C3c2, holds, ga.min(gb), Direction::Geq);
    e.echo("t", t);
    e.echo("k_a_needed", need_a);
    e.echo("k_b_needed_strict", need_b);
    e.echo("log", "log2 for k_a, natural for k_b");
    if holds {
        let p = 2f64.powf(-t);
        let lhs = completeupper_eq1(a, b, ka, kb, p);
        e.echo("lemma_p", p);
        e.echo("lemma_lhs", lhs);
        e.echo("lemma_confirms", lhs < 1.0);
    }
    e
}

/// `8 (Δ / (2 ln 2Δ))^{1/k} ln 2Δ`.
pub fn c3c3_rhs(delta: u64, k: u64) -> f64 {
    let l = (2.0 * delta as f64).ln();
    8.0 * (delta as f64 / (2.0 * l)).powf(1.0 / k as f64) * l
}

fn c3c3(a: u64, b: u64, ka: u64, kb: u64) -> ConditionEntry {
    if a != b {
        return ConditionEntry::not_applicable(ConditionId::C3c3, "requires a = b");
    }
    let r1 = c3c3_rhs(a, ka);
    let r2 = c3c3_rhs(a, kb);
    let (m1, m2) = (kb as f64 - r1, ka as f64 - r2);
    let margin = m1.max(m2);
    let holds = m1 > 0.0 || m2 > 0.0;
    let mut e = ConditionEntry::new(ConditionId::C3c3, holds, margin, Direction::Gt);
    e.echo("rhs", r1);
    e.echo("rhs_swapped", r2);
    if holds {
        let (ka, kb) = if m1 > 0.0 { (ka, kb) } else { (kb, ka) };
        let p = 8.0 * (2.0 * a as f64).ln() / kb as f64;
        let lhs = if p < 1.0 { completeupper_eq2(a, a, ka, kb, p, 0.5) } else { f64::INFINITY };
        e.echo("lemma_p", p);
        e.echo("lemma_eps", 0.5);
        e.echo("lemma_lhs", lhs);
        e.echo("lemma_confirms", lhs < 1.0);
    }
    e
}

/// Least `a` for which `K_{a,b}` is not `(b - 1, δ)`-choosable, from the
/// closed forms: nearest integer to `3δ²/4` for `b = 3`, the mod-4 cases
/// for `b = 4`, and `δ^{b-1} - ((b-2)q+r)^{b-1-r} ((b-2)q+r-1)^r` for
/// `b >= 5` where `δ = q(b-1) + r`.
pub fn boundary_threshold(b: u64, delta: u64) -> BigUint {
    assert!(b >= 3 && delta >= 2, "boundary threshold needs b >= 3 and delta >= 2");
    let d = BigInt::from(delta);
    let value: BigInt = match b {
        3 => {
            // 3δ²/4 is never a half-integer
            let num = BigInt::from(3) * &d * &d;
            (num + BigInt::from(2)).div_floor(&BigInt::from(4))
        }
        4 => {
            let d3 = &d * &d * &d;
            let base = BigInt::from(11) * d3;
            let num = match delta % 4 {
                0 => base,
                1 => base + BigInt::from(3) * &d + 2,
                2 => base + BigInt::from(4) * &d,
                _ => base + BigInt::from(3) * &d - 2,
            };
            let r = BigRational::new(num, BigInt::from(16));
            r.ceil().to_integer()
        }
        _ => {
            let (q, r) = (delta / (b - 1), delta % (b - 1));
            let s = BigInt::from((b - 2) * q + r);
            let total = d.pow((b - 1) as u32);
            let low: BigInt = &s - 1;
            total - s.pow((b - 1 - r) as u32) * low.pow(r as u32)
        }
    };
    value.to_biguint().expect("threshold is positive")
}

fn check_boundary(point: &ParamPoint) -> ConditionEntry {
    let Some((a, b)) = point.parts() else {
        return ConditionEntry::not_applicable(ConditionId::Boundary, "requires a complete point");
    };
    if b < 3 || point.k_b < 2 || point.k_a + 1 != b {
        return ConditionEntry::not_applicable(ConditionId::Boundary, "requires b >= 3, k_a = b - 1, k_b >= 2");
    }
    let delta = point.k_b;
    let threshold = boundary_threshold(b, delta);
    let t = threshold.to_f64().unwrap_or(f64::INFINITY);
    let holds = BigUint::from(a) < threshold;
    let mut e = ConditionEntry::new(ConditionId::Boundary, holds, t - a as f64, Direction::Gt);
    e.echo("threshold", &threshold);
    e.echo("q", delta / (b - 1));
    e.echo("r", delta % (b - 1));
    e
}

/// `4ab ln(4a) ln(k_A)`, the minimum B-degree above which
/// non-choosability of `K_{a,b}` transfers.
pub fn degrees_threshold(a: u64, b: u64, k_a: u64) -> f64 {
    let (a, b) = (a as f64, b as f64);
    4.0 * a * b * (4.0 * a).ln() * (k_a as f64).ln()
}

fn check_degrees(point: &ParamPoint) -> ConditionEntry {
    let Some((a, b)) = point.parts() else {
        return ConditionEntry::not_applicable(ConditionId::Degrees, "requires a complete point");
    };
    if point.k_a < 2 {
        return ConditionEntry::not_applicable(ConditionId::Degrees, "requires k_a >= 2");
    }
    let v = degrees_threshold(a, b, point.k_a);
    let mut e = ConditionEntry::new(ConditionId::Degrees, true, v, Direction::Info);
    e.echo("log", "natural");
    e
}

/// Knobs for the conditions that take real parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepParams {
    pub epsilon: f64,
    pub t: f64,
    /// Fixed `p` for cu1/cu2; `None` optimises it.
    pub p: Option<f64>,
}

impl Default for SweepParams {
    fn default() -> Self {
        Self {
            epsilon: 0.5,
            t: 1.0,
            p: None,
        }
    }
}

/// Evaluates the requested conditions at one point.
pub fn check_point(point: &ParamPoint, ids: &[ConditionId], params: &SweepParams) -> ConditionReport {
    let mut entries = Vec::with_capacity(ids.len());
    let cu = || match params.p {
        Some(p) => check_completeupper(point, p, params.epsilon),
        None => optimize_completeupper(point),
    };
    let mut cu_cache: Option<[ConditionEntry; 2]> = None;
    let mut c3_cache: Option<[ConditionEntry; 3]> = None;
    for &id in ids {
        let e = match id {
            ConditionId::Transversal => check_transversal_condition(point),
            ConditionId::Coupon => check_coupon_condition(point),
            ConditionId::Cu1 | ConditionId::Cu2 => {
                let pair = cu_cache.get_or_insert_with(cu);
                pair[usize::from(id == ConditionId::Cu2)].clone()
            }
            ConditionId::C3c1 | ConditionId::C3c2 | ConditionId::C3c3 => {
                let three = c3_cache.get_or_insert_with(|| check_3cases(point, params.epsilon, params.t));
                let i = match id {
                    ConditionId::C3c1 => 0,
                    ConditionId::C3c2 => 1,
                    _ => 2,
                };
                three[i].clone()
            }
            ConditionId::Boundary => check_boundary(point),
            ConditionId::Degrees => check_degrees(point),
        };
        entries.push(e);
    }
    ConditionReport { point: *point, entries }
}

/// Finite grid of parameter points: the product of the four value lists.
#[derive(Clone, Debug, PartialEq)]
pub struct Region {
    pub mode: PointMode,
    pub x_a: Vec<u64>,
    pub x_b: Vec<u64>,
    pub k_a: Vec<u64>,
    pub k_b: Vec<u64>,
}

impl Region {
    pub fn len(&self) -> usize {
        self.x_a.len() * self.x_b.len() * self.k_a.len() * self.k_b.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn points(&self) -> Vec<ParamPoint> {
        let mut out = Vec::with_capacity(self.len());
        for &xa in &self.x_a {
            for &xb in &self.x_b {
                for &ka in &self.k_a {
                    for &kb in &self.k_b {
                        out.push(match self.mode {
                            PointMode::Degree => ParamPoint::degree(xa, xb, ka, kb),
                            PointMode::Complete => ParamPoint::complete(xa, xb, ka, kb),
                        });
                    }
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SweepError {
    #[error("region has {rows} rows, above the cap of {cap}")]
    RegionTooLarge { rows: usize, cap: usize },
    #[error("invalid region: {0}")]
    Invalid(String),
}

/// Default cap on sweep rows.
pub const DEFAULT_ROW_CAP: usize = 100_000;

/// Evaluates every point of `region`; rows keep the region's point order.
pub fn sweep(
    region: &Region,
    ids: &[ConditionId],
    params: &SweepParams,
    row_cap: usize,
) -> Result<Vec<ConditionReport>, SweepError> {
    let rows = region.len() * ids.len();
    if rows > row_cap {
        return Err(SweepError::RegionTooLarge { rows, cap: row_cap });
    }
    let all = [&region.x_a, &region.x_b, &region.k_a, &region.k_b];
    if all.iter().any(|v| v.contains(&0)) {
        return Err(SweepError::Invalid("parameters must be positive".into()));
    }
    Ok(region
        .points()
        .par_iter()
        .map(|p| check_point(p, ids, params))
        .collect())
}

pub const CSV_HEADER: [&str; 10] = ["mode", "x_a", "x_b", "k_a", "k_b", "id", "applicable", "holds", "margin", "inputs"];

/// One CSV row per (point, condition), preceded by a header.
pub fn to_csv(reports: &[ConditionReport]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory write");
    for r in reports {
        let p = &r.point;
        let mode = match p.mode {
            PointMode::Degree => "degree",
            PointMode::Complete => "complete",
        };
        for e in &r.entries {
            let inputs: Vec<String> = e.inputs.iter().map(|(k, v)| format!("{k}={v}")).collect();
            w.write_record([
                mode.to_string(),
                p.x_a.to_string(),
                p.x_b.to_string(),
                p.k_a.to_string(),
                p.k_b.to_string(),
                e.id.to_string(),
                e.applicable.to_string(),
                e.holds.to_string(),
                e.margin.to_string(),
                inputs.join(";"),
            ])
            .expect("in-memory write");
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(x: f64, y: f64, tol: f64) -> bool {
        (x - y).abs() <= tol * y.abs().max(1.0)
    }

    #[test]
    fn e_bracket_contains_e() {
        let (lo, hi) = e_bracket(20);
        assert!(lo.to_f64().unwrap() <= std::f64::consts::E);
        assert!(hi.to_f64().unwrap() >= std::f64::consts::E);
        assert!(rational_exceeds_e(&BigRational::new(BigInt::from(2719), BigInt::from(1000))));
        assert!(!rational_exceeds_e(&BigRational::new(BigInt::from(2718), BigInt::from(1000))));
    }

    #[test]
    fn transversal_examples() {
        let e = check_transversal_condition(&ParamPoint::degree(2, 10, 2, 15));
        assert!(e.holds);
        let rhs: f64 = e.input("rhs").unwrap().parse().unwrap();
        assert!(close(rhs, (std::f64::consts::E * 20.0).sqrt() * 2.0, 1e-12));
        assert!(!check_transversal_condition(&ParamPoint::degree(2, 10, 2, 14)).holds);
        assert!(!check_transversal_condition(&ParamPoint::degree(1, 1, 1, 1)).holds);
    }

    #[test]
    fn coupon_examples() {
        let e = check_coupon_condition(&ParamPoint::degree(4, 4, 4, 2));
        assert!(!e.holds);
        let lhs = e.input("log_lhs").unwrap().parse::<f64>().unwrap().exp();
        assert!(close(lhs, std::f64::consts::E * 13.0 * 0.75f64.powi(4), 1e-12));
        let e = check_coupon_condition(&ParamPoint::degree(2, 2, 6, 2));
        assert!(e.holds);
        assert!(e.margin + 1.0 < 0.03);
    }

    #[test]
    fn completeupper_examples() {
        let [e1, _] = check_completeupper(&ParamPoint::complete(1, 2, 2, 5), 0.3, 0.5);
        assert!(e1.holds);
        assert!(close(e1.margin + 1.0, 0.09 + 2.0 * 0.7f64.powi(5), 1e-12));
        let [e1, _] = check_completeupper(&ParamPoint::complete(2, 2, 2, 2), 0.5, 0.5);
        assert!(!e1.holds);
        assert_eq!(e1.margin, 0.0);
    }

    #[test]
    fn optimizer_finds_symmetric_minimum() {
        let [e1, _] = optimize_completeupper(&ParamPoint::complete(2, 2, 2, 2));
        let p: f64 = e1.input("p").unwrap().parse().unwrap();
        assert!((p - 0.5).abs() < 1e-6);
        assert!(!e1.holds);
    }

    #[test]
    fn three_cases_examples() {
        let [_, c2, _] = check_3cases(&ParamPoint::complete(512, 16, 4, 28), 0.5, 3.0);
        assert!(c2.holds);
        assert_eq!(c2.input("lemma_confirms"), Some("true"));
        let [_, c2, _] = check_3cases(&ParamPoint::complete(512, 16, 4, 27), 0.5, 3.0);
        assert!(!c2.holds);
        let a = 1024u64;
        let kb = c3c3_rhs(a, 3).ceil() as u64;
        let p = ParamPoint::complete(a, a, 3, kb);
        let [_, _, c3] = check_3cases(&p, 0.5, 1.0);
        assert!(c3.holds);
        assert_eq!(c3.input("lemma_confirms"), Some("true"));
        let [_, _, swapped] = check_3cases(&p.swapped(), 0.5, 1.0);
        assert!(swapped.holds);
    }

    #[test]
    fn delta0_satisfies_its_definition() {
        for eps in [0.3, 0.5, 1.0, 2.0] {
            let d = delta0(eps);
            assert!(eps * d.powf(eps) > 3.0);
            for x in [d, d * 2.0, d * 1e3, d * 1e9] {
                assert!(x.powf(eps / 3.0) > (2.0 * x).ln(), "eps={eps} x={x}");
            }
        }
    }

    #[test]
    fn boundary_values() {
        let t = |b, d| boundary_threshold(b, d).to_u64().unwrap();
        assert_eq!(t(3, 2), 3);
        assert_eq!(t(3, 3), 7);
        assert_eq!(t(4, 2), 6);
        assert_eq!(t(4, 3), 19);
        assert_eq!(t(4, 4), 44);
        assert_eq!(t(4, 5), 87);
        assert_eq!(t(5, 4), 175);
    }

    #[test]
    fn degrees_values() {
        assert!(close(degrees_threshold(4, 2, 2), 32.0 * 16f64.ln() * 2f64.ln(), 1e-12));
        assert!(close(degrees_threshold(1, 1, 2), 4.0 * 4f64.ln() * 2f64.ln(), 1e-12));
    }

    #[test]
    fn sweep_rows_and_cap() {
        let region = Region {
            mode: PointMode::Degree,
            x_a: vec![4, 8, 16],
            x_b: vec![1],
            k_a: vec![2],
            k_b: vec![2],
        };
        let rows = sweep(&region, &[ConditionId::Coupon], &SweepParams::default(), 100).unwrap();
        assert_eq!(rows.len(), 3);
        let empty = sweep(&region, &[], &SweepParams::default(), 100).unwrap();
        assert_eq!(to_csv(&empty).lines().count(), 1);
        assert!(matches!(
            sweep(&region, &ConditionId::ALL, &SweepParams::default(), 5),
            Err(SweepError::RegionTooLarge { rows: 27, cap: 5 })
        ));
    }

    #[test]
    fn ids_round_trip() {
        for id in ConditionId::ALL {
            assert_eq!(id.as_str().parse::<ConditionId>().unwrap(), id);
        }
    }
}
