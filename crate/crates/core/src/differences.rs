//! First- and second-order differences on radix cells, and the scans built on them.
//!
//! For a triplet `(n, k, y)` the three points are `k / r^n`, `(k + y) / r^n` and
//! `(k + 1) / r^n`;
//!
//! ```text
//! delta+ = [f((k+1)/r^n) - f((k+y)/r^n)] / ((1-y)/r^n)
//! delta- = [f((k+y)/r^n) - f(k/r^n)] / (y/r^n)
//! Delta  = 2 r^n (delta+ - delta-)
//! ```
//!
//! A function is in the class with constant `c` when `Delta <= -2 c r^n` for every
//! triplet; the scans here check that on a finite subfamily.

use std::cmp::Ordering;

use num_traits::{One, Signed};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{format_rational, frac, int, Approx, Mode, Rational, Scalar};
use crate::error::{Error, Result};
use crate::func::FuncExpr;
use crate::radix::{check_open_unit, triplet_count, Radix, Triplet};

/// Default cap on the number of triplets a single scan may visit.
pub const DEFAULT_CAP: u64 = 10_000_000;

/// Anything that can be sampled at rational points in a given arithmetic mode.
pub trait PeriodicFn: Sync {
    fn value(&self, x: &Rational, mode: Mode) -> Result<Scalar>;
}

impl PeriodicFn for FuncExpr {
    fn value(&self, x: &Rational, mode: Mode) -> Result<Scalar> {
        match mode {
            Mode::Exact => Ok(Scalar::Exact(self.eval_exact(x)?)),
            Mode::Float { .. } => Ok(Scalar::Float(self.eval_approx(Approx::from_rational(x)))),
        }
    }
}

impl<T: PeriodicFn + ?Sized> PeriodicFn for &T {
    fn value(&self, x: &Rational, mode: Mode) -> Result<Scalar> {
        (**self).value(x, mode)
    }
}

/// `delta+`, `delta-` and `Delta` at one triplet.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Differences {
    pub forward: Scalar,
    pub backward: Scalar,
    pub second: Scalar,
}

/// Differences from the three sampled values. `k` is not range-checked, so cells outside
/// `[0, 1]` are read through periodicity.
pub fn differences_from_values(r: Radix, n: u32, y: &Rational, fl: &Scalar, fm: &Scalar, fr: &Scalar, mode: Mode) -> Differences {
    let rn = r.pow_rational(n);
    let fwd_scale = mode.lift(&(&rn / (Rational::one() - y)));
    let bwd_scale = mode.lift(&(&rn / y));
    let forward = &(fr - fm) * &fwd_scale;
    let backward = &(fm - fl) * &bwd_scale;
    let second = &mode.lift(&(int(2) * rn)) * &(&forward - &backward);
    Differences { forward, backward, second }
}

pub fn differences<F: PeriodicFn + ?Sized>(f: &F, r: Radix, t: &Triplet, mode: Mode) -> Result<Differences> {
    check_open_unit(&t.y)?;
    let fl = f.value(&t.left(r), mode)?;
    let fm = f.value(&t.mid(r), mode)?;
    let fr = f.value(&t.right(r), mode)?;
    Ok(differences_from_values(r, t.n, &t.y, &fl, &fm, &fr, mode))
}

pub fn forward_diff<F: PeriodicFn + ?Sized>(f: &F, r: Radix, t: &Triplet, mode: Mode) -> Result<Scalar> {
    Ok(differences(f, r, t, mode)?.forward)
}

pub fn backward_diff<F: PeriodicFn + ?Sized>(f: &F, r: Radix, t: &Triplet, mode: Mode) -> Result<Scalar> {
    Ok(differences(f, r, t, mode)?.backward)
}

pub fn central_second_diff<F: PeriodicFn + ?Sized>(f: &F, r: Radix, t: &Triplet, mode: Mode) -> Result<Scalar> {
    Ok(differences(f, r, t, mode)?.second)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
            Verdict::Inconclusive => 2,
        }
    }

    fn combine(self, other: Verdict) -> Verdict {
        match (self, other) {
            (Verdict::Fail, _) | (_, Verdict::Fail) => Verdict::Fail,
            (Verdict::Inconclusive, _) | (_, Verdict::Inconclusive) => Verdict::Inconclusive,
            _ => Verdict::Pass,
        }
    }
}

/// Classifies a margin that must be `<= 0` (exact) or `<= tol` (float).
pub fn classify_margin(margin: &Scalar, mode: Mode) -> Verdict {
    match (margin, mode) {
        (Scalar::Exact(m), _) => {
            if m.is_positive() {
                Verdict::Fail
            } else {
                Verdict::Pass
            }
        }
        (Scalar::Float(a), Mode::Float { tol }) => classify_float(a, tol),
        (Scalar::Float(a), Mode::Exact) => classify_float(a, 0.0),
    }
}

fn classify_float(a: &Approx, tol: f64) -> Verdict {
    if a.value - a.err > tol {
        Verdict::Fail
    } else if a.value + a.err <= tol {
        Verdict::Pass
    } else {
        Verdict::Inconclusive
    }
}

/// Result of scanning `Delta_{n,k}(y; f) - bound(n)` over a triplet family.
#[derive(Debug, Clone, Serialize)]
pub struct ScanReport {
    pub verdict: Verdict,
    /// Largest margin found (`<= 0` everywhere means no violation).
    pub worst_margin: Scalar,
    /// Lexicographically smallest triplet attaining `worst_margin`.
    pub worst_triplet: Triplet,
    /// Lexicographically smallest violating triplet.
    pub first_violation: Option<Triplet>,
    pub scanned: u64,
    pub violations: u64,
    pub inconclusive: u64,
    pub mode: &'static str,
}

struct Item {
    triplet: Triplet,
    margin: Scalar,
    verdict: Verdict,
}

fn better(a: Item, b: Item) -> Item {
    match a.margin.value_cmp(&b.margin) {
        Ordering::Greater => a,
        Ordering::Less => b,
        Ordering::Equal => {
            if a.triplet <= b.triplet {
                a
            } else {
                b
            }
        }
    }
}

/// Scans `margin = Delta_{n,k}(y; f) - bound(n)` over every triplet with `n <= n_max`,
/// `k < r^n` and `y` in `y_set`. Endpoint values are shared across each level.
pub fn scan_second_diffs<F, B>(
    f: &F,
    r: Radix,
    n_max: u32,
    y_set: &[Rational],
    mode: Mode,
    cap: u64,
    bound: B,
) -> Result<ScanReport>
where
    F: PeriodicFn + ?Sized,
    B: Fn(u32) -> Rational + Sync,
{
    let mut ys = y_set.to_vec();
    ys.sort();
    ys.dedup();
    if ys.is_empty() {
        return Err(Error::invalid("y set is empty"));
    }
    for y in &ys {
        check_open_unit(y)?;
    }
    let total = triplet_count(r, n_max, ys.len());
    if total > cap as u128 {
        return Err(Error::ResourceLimit { needed: total, cap });
    }
    let mut best: Option<Item> = None;
    let mut violations = 0u64;
    let mut inconclusive = 0u64;
    let mut first_violation: Option<Triplet> = None;
    for n in 0..=n_max {
        let rn = r.pow_u64(n).expect("checked by cap");
        let den = r.pow(n);
        let ends: Vec<Scalar> = (0..=rn)
            .into_par_iter()
            .map(|k| f.value(&Rational::new(k.into(), den.clone()), mode))
            .collect::<Result<_>>()?;
        let threshold = bound(n);
        let level = (0..rn)
            .into_par_iter()
            .flat_map_iter(|k| ys.iter().map(move |y| (k, y)))
            .map(|(k, y)| -> Result<Item> {
                let t = Triplet { n, k, y: y.clone() };
                let fm = f.value(&t.mid(r), mode)?;
                let d = differences_from_values(r, n, y, &ends[k as usize], &fm, &ends[k as usize + 1], mode);
                let margin = &d.second - &Scalar::Exact(threshold.clone());
                let verdict = classify_margin(&margin, mode);
                Ok(Item { triplet: t, margin, verdict })
            })
            .map(|item| {
                item.map(|it| {
                    let v = (it.verdict == Verdict::Fail) as u64;
                    let i = (it.verdict == Verdict::Inconclusive) as u64;
                    let first = (v == 1).then(|| it.triplet.clone());
                    (it, v, i, first)
                })
            })
            .try_reduce_with(|(a, va, ia, fa), (b, vb, ib, fb)| {
                let first = match (fa, fb) {
                    (Some(x), Some(y)) => Some(x.min(y)),
                    (x, y) => x.or(y),
                };
                Ok((better(a, b), va + vb, ia + ib, first))
            });
        if let Some(res) = level {
            let (item, v, i, first) = res?;
            violations += v;
            inconclusive += i;
            if first_violation.is_none() {
                first_violation = first;
            }
            best = Some(match best {
                None => item,
                Some(prev) => better(prev, item),
            });
        }
    }
    let best = best.expect("at least one triplet");
    let verdict = if violations > 0 {
        Verdict::Fail
    } else if inconclusive > 0 {
        Verdict::Inconclusive
    } else {
        Verdict::Pass
    };
    Ok(ScanReport {
        verdict,
        worst_margin: best.margin,
        worst_triplet: best.triplet,
        first_violation,
        scanned: total as u64,
        violations,
        inconclusive,
        mode: mode.name(),
    })
}

/// Membership query: the class constant and the finite family to scan.
#[derive(Debug, Clone)]
pub struct MembershipQuery {
    pub c: Rational,
    pub r: Radix,
    pub n_max: u32,
    pub y_set: Vec<Rational>,
    pub mode: Mode,
    pub cap: u64,
}

impl MembershipQuery {
    pub fn new(c: Rational, r: Radix, n_max: u32, y_set: Vec<Rational>) -> Result<Self> {
        if !c.is_positive() {
            return Err(Error::invalid(format!("c must be positive, got {}", format_rational(&c))));
        }
        for y in &y_set {
            check_open_unit(y)?;
        }
        Ok(MembershipQuery { c, r, n_max, y_set, mode: Mode::Exact, cap: DEFAULT_CAP })
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_cap(mut self, cap: u64) -> Self {
        self.cap = cap;
        self
    }
}

/// Scans `Delta_{n,k}(y; f) + 2 c r^n <= 0` over the query family.
pub fn membership_scan<F: PeriodicFn + ?Sized>(f: &F, q: &MembershipQuery) -> Result<ScanReport> {
    let two_c = int(2) * &q.c;
    let r = q.r;
    scan_second_diffs(f, r, q.n_max, &q.y_set, q.mode, q.cap, move |n| -(&two_c * r.pow_rational(n)))
}

/// Scans `Delta_{n,k}(y; psi) <= alpha`.
pub fn semiconcavity_scan<F: PeriodicFn + ?Sized>(
    psi: &F,
    alpha: &Rational,
    r: Radix,
    n_max: u32,
    y_set: &[Rational],
    mode: Mode,
    cap: u64,
) -> Result<ScanReport> {
    if alpha.is_negative() {
        return Err(Error::invalid("alpha must be nonnegative"));
    }
    let a = alpha.clone();
    scan_second_diffs(psi, r, n_max, y_set, mode, cap, move |_| a.clone())
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub verdict: Verdict,
    /// Largest `c y (1 - y) - f(y)` found.
    pub worst_margin: Scalar,
    #[serde(serialize_with = "crate::arith::serialize_rational")]
    pub worst_y: Rational,
    pub checked: usize,
}

/// Checks `c y (1 - y) <= f(y)` on `y_set`.
pub fn fundamental_bound_check<F: PeriodicFn + ?Sized>(f: &F, c: &Rational, y_set: &[Rational], mode: Mode) -> Result<BoundReport> {
    if y_set.is_empty() {
        return Err(Error::invalid("y set is empty"));
    }
    let mut verdict = Verdict::Pass;
    let mut worst: Option<(Scalar, Rational)> = None;
    for y in y_set {
        check_open_unit(y)?;
        let lower = Scalar::Exact(c * y * (Rational::one() - y));
        let margin = &lower - &f.value(y, mode)?;
        verdict = verdict.combine(classify_margin(&margin, mode));
        let replace = match &worst {
            None => true,
            Some((w, _)) => margin.value_cmp(w) == Ordering::Greater,
        };
        if replace {
            worst = Some((margin, y.clone()));
        }
    }
    let (worst_margin, worst_y) = worst.unwrap();
    Ok(BoundReport { verdict, worst_margin, worst_y, checked: y_set.len() })
}

/// One row of the divergence probe.
#[derive(Debug, Clone, Serialize)]
pub struct ProbeRow {
    pub n: u32,
    pub k: u64,
    #[serde(serialize_with = "crate::arith::serialize_rational")]
    pub y: Rational,
    pub forward: Scalar,
    pub backward: Scalar,
    /// `delta+ - delta-`
    pub gap: Scalar,
}

/// Differences along `k_n = floor(r^n x)` for `n = 0..=depth`, with `y_n = y` when `x`
/// is a radix rational and `y_n = frac(r^n x)` otherwise.
pub fn divergence_probe<F: PeriodicFn + ?Sized>(
    f: &F,
    r: Radix,
    x: &Rational,
    depth: u32,
    y: &Rational,
    mode: Mode,
) -> Result<Vec<ProbeRow>> {
    if depth == 0 {
        return Err(Error::invalid("probe depth must be >= 1"));
    }
    check_open_unit(y)?;
    let x = frac(x);
    let radix_point = r.is_radix_rational(&x);
    (0..=depth)
        .map(|n| {
            let scaled = &x * r.pow_rational(n);
            let k = scaled.floor();
            let y_n = if radix_point { y.clone() } else { &scaled - &k };
            let k: u64 = num_traits::ToPrimitive::to_u64(&k.to_integer())
                .ok_or_else(|| Error::invalid("probe depth too large"))?;
            let t = Triplet { n, k, y: y_n };
            let d = differences(f, r, &t, mode)?;
            let gap = &d.forward - &d.backward;
            Ok(ProbeRow { n, k, y: t.y, forward: d.forward, backward: d.backward, gap })
        })
        .collect()
}

/// Whether every gap is at most `-c` (certified in float mode).
pub fn probe_verdict(rows: &[ProbeRow], c: &Rational) -> Verdict {
    rows.iter().fold(Verdict::Pass, |v, row| {
        let margin = &row.gap + &Scalar::Exact(c.clone());
        v.combine(classify_margin(&margin, Mode::Float { tol: 0.0 }))
    })
}
