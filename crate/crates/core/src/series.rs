//! The series operator `U_psi(x) = sum_{j>=0} r^-j psi(r^j x)`.
//!
//! Exact values at rational points come from the eventually periodic orbit of
//! `x -> r x mod 1`; at radix rationals the orbit reaches 0 and the series is a finite
//! sum. Float values truncate the series and add a certified tail bound.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::arith::{format_rational, int, rational_to_f64, Approx, Mode, Rational, Scalar};
use crate::differences::{self, PeriodicFn, ScanReport, Verdict};
use crate::error::{Error, Result};
use crate::func::{distance, FuncExpr};
use crate::radix::{Radix, RadixPoint, Triplet};

/// Longest orbit followed before giving up on an exact value.
pub const MAX_ORBIT: usize = 1 << 20;

/// Tail target for the default truncation, leaving room for rounding under 1e-9 overall.
const DEFAULT_TAIL: f64 = 5e-10;

/// `r / (r - 1)` rounded up.
pub(crate) fn geometric_factor(r: Radix) -> f64 {
    let r = r.get() as f64;
    (r / (r - 1.0)).next_up()
}

/// Exact `U_psi(x)` for rational `x` in `[0, 1)`.
pub(crate) fn u_value_exact(r: Radix, psi: &FuncExpr, x: &Rational) -> Result<Rational> {
    psi.require_exact()?;
    let den = x.denom().clone();
    let rb = r.as_big();
    let mut seen: HashMap<BigInt, usize> = HashMap::new();
    let mut orbit: Vec<BigInt> = Vec::new();
    let mut a = x.numer().clone();
    let start = loop {
        if let Some(&i) = seen.get(&a) {
            break i;
        }
        if orbit.len() >= MAX_ORBIT {
            return Err(Error::OrbitTooLong { x: format_rational(x), r: r.get(), cap: MAX_ORBIT });
        }
        seen.insert(a.clone(), orbit.len());
        orbit.push(a.clone());
        a = (&a * &rb) % &den;
    };
    let rr = r.as_rational();
    // Horner over a common denominator keeps the work in integers.
    let weighted = |states: &[BigInt]| -> Result<Rational> {
        if states.is_empty() {
            return Ok(Rational::zero());
        }
        let mut vals = Vec::with_capacity(states.len());
        let mut common = BigInt::one();
        for s in states {
            let v = if s.is_zero() { Rational::zero() } else { psi.eval_exact(&Rational::new(s.clone(), den.clone()))? };
            common = common.lcm(v.denom());
            vals.push(v);
        }
        let mut acc = BigInt::zero();
        for v in &vals {
            acc = acc * &rb + v.numer() * (&common / v.denom());
        }
        let scale = num_traits::pow(rb.clone(), states.len() - 1) * common;
        Ok(Rational::new(acc, scale))
    };
    let prefix = weighted(&orbit[..start])?;
    let cycle = &orbit[start..];
    if cycle.len() == 1 && cycle[0].is_zero() {
        return Ok(prefix);
    }
    let cyc = weighted(cycle)?;
    let r_start = num_traits::pow(rr.clone(), start);
    let r_len = num_traits::pow(rr, cycle.len());
    // r^-P * C / (1 - r^-L) = C * r^L / (r^P (r^L - 1))
    Ok(prefix + cyc * &r_len / (r_start * (r_len - Rational::one())))
}

/// Smallest term count whose tail bound `sup * r^(1-J) / (r-1)` is at most `target`.
pub fn terms_for_tail(r: Radix, sup_psi: f64, target: f64) -> usize {
    let rf = r.get() as f64;
    let mut j = 1usize;
    while tail_bound(r, sup_psi, j) > target {
        j += 1;
        if j > 4096 || rf.powi(j as i32).is_infinite() {
            break;
        }
    }
    j
}

/// `sup * r^(1 - J) / (r - 1)`, rounded up.
pub fn tail_bound(r: Radix, sup_psi: f64, terms: usize) -> f64 {
    let rf = r.get() as f64;
    (sup_psi * rf.powi(1 - terms as i32) / (rf - 1.0)).next_up().next_up()
}

/// Truncated `U_psi` at a floating point argument, error bound including the tail.
pub(crate) fn u_value_approx(r: Radix, psi: &FuncExpr, x: Approx, terms: Option<usize>) -> Approx {
    let sup = psi.sup_abs();
    let terms = terms.unwrap_or_else(|| terms_for_tail(r, sup, DEFAULT_TAIL));
    let rf = Approx::exact(r.get() as f64);
    let mut y = x.frac();
    let mut w = Approx::exact(1.0);
    let mut acc = Approx::exact(0.0);
    for _ in 0..terms {
        acc = acc + w * psi.eval_approx(y);
        y = y.scale_int(r.get()).frac();
        w = w / rf;
    }
    acc.widen(tail_bound(r, sup, terms))
}

/// Modulus of continuity of `U_psi` from that of `psi`.
pub(crate) fn u_modulus(r: Radix, psi: &FuncExpr, delta: f64) -> f64 {
    let osc = psi.oscillation();
    let rf = r.get() as f64;
    let mut acc = 0.0f64;
    let mut w = 1.0f64;
    let mut scaled = delta;
    for _ in 0..64 {
        acc += w * psi.modulus(scaled).min(osc);
        w /= rf;
        scaled *= rf;
    }
    // Remaining terms each move by at most osc.
    (acc * (1.0 + 1e-12) + osc * w * rf / (rf - 1.0)).next_up()
}

/// `U_psi` for a fixed radix and generator.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesFunc {
    r: Radix,
    psi: FuncExpr,
    sup_psi: f64,
}

impl SeriesFunc {
    pub fn new(r: Radix, psi: FuncExpr) -> Self {
        let sup_psi = psi.sup_abs();
        SeriesFunc { r, psi, sup_psi }
    }

    pub fn radix(&self) -> Radix {
        self.r
    }

    pub fn psi(&self) -> &FuncExpr {
        &self.psi
    }

    /// Certified upper bound on `sup |psi|`.
    pub fn sup_psi(&self) -> f64 {
        self.sup_psi
    }

    /// The same function as a [`FuncExpr`] node.
    pub fn to_func(&self) -> FuncExpr {
        FuncExpr::USeries(self.r, Box::new(self.psi.clone()))
    }

    /// Default term count: smallest with tail bound below the default target.
    pub fn default_terms(&self) -> usize {
        terms_for_tail(self.r, self.sup_psi, DEFAULT_TAIL)
    }

    /// Exact finite sum at a radix rational `j / r^N`: only the first `N` terms are nonzero.
    pub fn u_eval_exact(&self, p: &RadixPoint) -> Result<Rational> {
        self.psi.require_exact()?;
        if p.r != self.r {
            return Err(Error::invalid(format!("point has radix {}, series has radix {}", p.r, self.r)));
        }
        let x = p.value();
        let depth = self
            .r
            .depth_of(&x)
            .ok_or_else(|| Error::invalid(format!("{} is not a radix-{} rational", format_rational(&x), self.r)))?;
        let rr = self.r.as_rational();
        let mut acc = Rational::zero();
        let mut w = Rational::one();
        let mut y = crate::arith::frac(&x);
        for _ in 0..depth {
            acc += &w * self.psi.eval_exact(&y)?;
            y = crate::arith::frac(&(&y * &rr));
            w /= &rr;
        }
        Ok(acc)
    }

    /// Exact value at any rational (orbit method).
    pub fn eval_exact(&self, x: &Rational) -> Result<Rational> {
        u_value_exact(self.r, &self.psi, &crate::arith::frac(x))
    }

    /// `sum_{j<terms} r^-j psi(r^j x)` with the tail bound folded into the error.
    pub fn u_eval_approx(&self, x: f64, terms: usize) -> Result<Approx> {
        if terms == 0 {
            return Err(Error::invalid("term count must be >= 1"));
        }
        Ok(u_value_approx(self.r, &self.psi, Approx::exact(x), Some(terms)))
    }

    /// Residual `LHS - RHS` of the second-difference identity for `U_psi` at `t`.
    pub fn u_delta_identity_residual(&self, t: &Triplet) -> Result<Rational> {
        identity_residual(self, &self.psi, self.r, t)
    }

    /// Sufficient-condition check for membership of `U_psi`.
    pub fn check_sufficient_conditions(
        &self,
        m: &Rational,
        alpha: &Rational,
        scan: &ScanParams,
    ) -> Result<SufficientVerdict> {
        check_sufficient_conditions(self, m, alpha, scan)
    }
}

impl PeriodicFn for SeriesFunc {
    fn value(&self, x: &Rational, mode: Mode) -> Result<Scalar> {
        match mode {
            Mode::Exact => Ok(Scalar::Exact(self.eval_exact(x)?)),
            Mode::Float { .. } => {
                Ok(Scalar::Float(u_value_approx(self.r, &self.psi, Approx::from_rational(x), None)))
            }
        }
    }
}

/// `Delta_{n,k}(y; U) - [sum_{j<n} r^j Delta_{n-j,k}(y; psi) - 2 r^n U(y) / (y (1 - y))]`.
///
/// `u` is evaluated independently of `psi`; the residual vanishes when `u` really is
/// `U_psi`.
pub fn identity_residual<U, P>(u: &U, psi: &P, r: Radix, t: &Triplet) -> Result<Rational>
where
    U: PeriodicFn + ?Sized,
    P: PeriodicFn + ?Sized,
{
    let lhs = differences::differences(u, r, t, Mode::Exact)?.second;
    let mut sum = Rational::zero();
    for j in 0..t.n {
        // k may exceed r^(n-j) here; the differences are taken on the periodic extension.
        let sub = Triplet { n: t.n - j, k: t.k, y: t.y.clone() };
        let d = differences::differences(psi, r, &sub, Mode::Exact)?.second;
        sum += r.pow_rational(j) * exact(d);
    }
    let u_y = exact(u.value(&t.y, Mode::Exact)?);
    let one_minus = Rational::one() - &t.y;
    let rhs = sum - int(2) * r.pow_rational(t.n) * u_y / (&t.y * one_minus);
    Ok(exact(lhs) - rhs)
}

/// Outcome of checking the identity over a triplet family.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub verdict: Verdict,
    pub checked: u64,
    /// Lexicographically smallest triplet with a nonzero residual.
    pub offending: Option<Triplet>,
    #[serde(serialize_with = "serialize_opt_rational")]
    pub residual: Option<Rational>,
}

fn serialize_opt_rational<S: serde::Serializer>(q: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match q {
        Some(q) => s.serialize_str(&format_rational(q)),
        None => s.serialize_none(),
    }
}

/// Residuals of the identity at every triplet with `n <= n_max` and `y` in `y_set`.
pub fn identity_scan<U, P>(u: &U, psi: &P, r: Radix, n_max: u32, y_set: &[Rational], cap: u64) -> Result<IdentityReport>
where
    U: PeriodicFn + ?Sized,
    P: PeriodicFn + ?Sized,
{
    use rayon::prelude::*;
    let total = crate::radix::triplet_count(r, n_max, y_set.len());
    if total > cap as u128 {
        return Err(Error::ResourceLimit { needed: total, cap });
    }
    let triplets: Vec<Triplet> = crate::radix::enumerate_triplets(r, n_max, y_set)?.collect();
    let residuals = triplets
        .par_iter()
        .map(|t| identity_residual(u, psi, r, t))
        .collect::<Result<Vec<_>>>()?;
    let bad = triplets.iter().zip(residuals).find(|(_, res)| !res.is_zero());
    Ok(IdentityReport {
        verdict: if bad.is_some() { Verdict::Fail } else { Verdict::Pass },
        checked: triplets.len() as u64,
        offending: bad.as_ref().map(|(t, _)| (*t).clone()),
        residual: bad.map(|(_, res)| res),
    })
}

fn exact(s: Scalar) -> Rational {
    match s {
        Scalar::Exact(q) => q,
        Scalar::Float(_) => unreachable!("exact mode produced a float"),
    }
}

/// Finite scan parameters shared by the sufficient-condition and membership checks.
#[derive(Debug, Clone)]
pub struct ScanParams {
    pub n_max: u32,
    pub y_set: Vec<Rational>,
    /// Sample points for the pointwise lower bound `m d <= psi`.
    pub x_samples: Vec<Rational>,
    pub mode: Mode,
    pub cap: u64,
}

impl ScanParams {
    /// `y` in `{j / r^ydepth}`, `x` in `{j / r^8}`.
    pub fn defaults(r: Radix, n_max: u32, ydepth: u32) -> Self {
        ScanParams {
            n_max,
            y_set: r.interior_grid(ydepth),
            x_samples: r.grid(8),
            mode: Mode::Exact,
            cap: differences::DEFAULT_CAP,
        }
    }
}

/// How the lower bound `m d <= psi` was established.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LowerBoundMode {
    /// Exact sign analysis of the piecewise polynomial `psi - m d` plus exact samples.
    ExactPiecewise,
    SampledExact,
    SampledFloat,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "condition", rename_all = "kebab-case")]
pub enum Witness {
    /// `m d(x) > psi(x)`
    LowerBound {
        #[serde(serialize_with = "crate::arith::serialize_rational")]
        x: Rational,
        m_d: Scalar,
        psi: Scalar,
    },
    /// `Delta_{n,k}(y; psi) > alpha`
    Semiconcavity { triplet: Triplet, delta: Scalar },
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum SufficientVerdict {
    Pass {
        #[serde(serialize_with = "crate::arith::serialize_rational")]
        c: Rational,
        lower_bound_mode: LowerBoundMode,
        semiconcavity: ScanReport,
    },
    Fail {
        witness: Witness,
        lower_bound_mode: LowerBoundMode,
    },
    Inconclusive {
        reason: String,
        lower_bound_mode: LowerBoundMode,
    },
}

impl SufficientVerdict {
    pub fn verdict(&self) -> Verdict {
        match self {
            SufficientVerdict::Pass { .. } => Verdict::Pass,
            SufficientVerdict::Fail { .. } => Verdict::Fail,
            SufficientVerdict::Inconclusive { .. } => Verdict::Inconclusive,
        }
    }

    pub fn implied_c(&self) -> Option<&Rational> {
        match self {
            SufficientVerdict::Pass { c, .. } => Some(c),
            _ => None,
        }
    }
}

/// `c = (2 m r - alpha) / (2 (r - 1))`
pub fn implied_c(r: Radix, m: &Rational, alpha: &Rational) -> Rational {
    let rr = r.as_rational();
    (int(2) * m * &rr - alpha) / (int(2) * (rr - int(1)))
}

pub fn check_sufficient_conditions(
    s: &SeriesFunc,
    m: &Rational,
    alpha: &Rational,
    scan: &ScanParams,
) -> Result<SufficientVerdict> {
    let r = s.r;
    if !m.is_positive() {
        return Err(Error::invalid("m must be positive"));
    }
    if alpha.is_negative() {
        return Err(Error::invalid("alpha must be nonnegative"));
    }
    if int(2) * m * r.as_rational() <= *alpha {
        return Err(Error::Hypothesis(format!(
            "2 m r = {} does not exceed alpha = {}",
            format_rational(&(int(2) * m * r.as_rational())),
            format_rational(alpha)
        )));
    }
    let psi = &s.psi;
    let mode = if psi.supports_exact() { scan.mode } else { Mode::float() };

    // (i) m d <= psi
    let mut lb_mode = match mode {
        Mode::Exact => LowerBoundMode::SampledExact,
        Mode::Float { .. } => LowerBoundMode::SampledFloat,
    };
    let exact_pw = psi.piecewise();
    if exact_pw.is_some() {
        lb_mode = LowerBoundMode::ExactPiecewise;
    }
    let mut ambiguous = None;
    for x in &scan.x_samples {
        let m_d = Scalar::Exact(m * distance(&crate::arith::frac(x)));
        let v = psi.value(x, mode)?;
        match m_d.certified_cmp(&v) {
            Some(std::cmp::Ordering::Greater) => {
                return Ok(SufficientVerdict::Fail {
                    witness: Witness::LowerBound { x: x.clone(), m_d, psi: v },
                    lower_bound_mode: lb_mode,
                });
            }
            None if ambiguous.is_none() => ambiguous = Some(x.clone()),
            _ => {}
        }
    }

    if let Some(pw) = exact_pw {
        let md = FuncExpr::Distance.piecewise().unwrap().scale(m);
        let gap = pw.add(&md.scale(&-Rational::one()));
        if let Some(x) = gap.negative_witness() {
            let m_d = Scalar::Exact(m * distance(&crate::arith::frac(&x)));
            let psi_x = Scalar::Exact(psi.eval_exact(&x)?);
            return Ok(SufficientVerdict::Fail {
                witness: Witness::LowerBound { x, m_d, psi: psi_x },
                lower_bound_mode: lb_mode,
            });
        }
    }

    // (ii) Delta(psi) <= alpha
    let report = differences::semiconcavity_scan(psi, alpha, r, scan.n_max, &scan.y_set, mode, scan.cap)?;
    match report.verdict {
        Verdict::Fail => {
            return Ok(SufficientVerdict::Fail {
                witness: Witness::Semiconcavity {
                    triplet: report.worst_triplet.clone(),
                    delta: &report.worst_margin + &Scalar::Exact(alpha.clone()),
                },
                lower_bound_mode: lb_mode,
            })
        }
        Verdict::Inconclusive => {
            return Ok(SufficientVerdict::Inconclusive {
                reason: "second differences within float error of alpha".into(),
                lower_bound_mode: lb_mode,
            })
        }
        Verdict::Pass => {}
    }
    if let Some(x) = ambiguous {
        return Ok(SufficientVerdict::Inconclusive {
            reason: format!("m d(x) <= psi(x) undecided in float mode at x = {}", format_rational(&x)),
            lower_bound_mode: lb_mode,
        });
    }
    Ok(SufficientVerdict::Pass { c: implied_c(r, m, alpha), lower_bound_mode: lb_mode, semiconcavity: report })
}

/// Worst slack of the chain `(m r / (r-1)) x (1-x) <= m tau_r(x) <= U_psi(x)` over `xs`.
#[derive(Debug, Clone, Serialize)]
pub struct ChainReport {
    pub verdict: Verdict,
    pub checked: usize,
    /// First point where a link failed (or was undecided), with the link name.
    pub witness: Option<(String, &'static str)>,
}

pub fn bounds_chain(s: &SeriesFunc, m: &Rational, xs: &[Rational], mode: Mode) -> Result<ChainReport> {
    let r = s.r;
    let tau = FuncExpr::Takagi(r);
    let mode = if s.psi.supports_exact() { mode } else { Mode::float() };
    let rr = r.as_rational();
    let factor = m * &rr / (&rr - int(1));
    let mut inconclusive = None;
    for x in xs {
        let parabola = Scalar::Exact(&factor * x * (Rational::one() - x));
        let m_tau = &Scalar::Exact(m.clone()) * &tau.value(x, Mode::Exact)?;
        let u = s.value(x, mode)?;
        for (lo, hi, name) in [(&parabola, &m_tau, "parabola<=m*tau"), (&m_tau, &u, "m*tau<=U_psi")] {
            match lo.certified_cmp(hi) {
                Some(std::cmp::Ordering::Greater) => {
                    return Ok(ChainReport {
                        verdict: Verdict::Fail,
                        checked: xs.len(),
                        witness: Some((format_rational(x), name)),
                    })
                }
                None if inconclusive.is_none() => inconclusive = Some((format_rational(x), name)),
                _ => {}
            }
        }
    }
    let verdict = if inconclusive.is_some() { Verdict::Inconclusive } else { Verdict::Pass };
    Ok(ChainReport { verdict, checked: xs.len(), witness: inconclusive })
}

/// Float value of the exact series at a radix rational, for cross-checks.
pub fn exact_as_f64(s: &SeriesFunc, x: &Rational) -> Result<f64> {
    Ok(rational_to_f64(&s.eval_exact(x)?))
}
