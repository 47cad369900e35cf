//! The inf-convolution flow `H_t f(x) = inf_z q_f(t, x; z)` with parabolas
//! `q_f(t, x; z) = f(z) + (x - z)^2 / (2t)`.
//!
//! For `f` in the class with constant `c` and `t >= 1 / (2 c r^n)`, the infimum is attained
//! on the grid `k / r^n`, so `H_t f` is the lower envelope of `r^n + 1` parabolas.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use serde_json::Value;

use crate::arith::{format_rational, int, parse_rational, rational_to_f64, Approx, Mode, Rational, Scalar};
use crate::differences::{classify_margin, differences, PeriodicFn, Verdict};
use crate::error::{Error, Result};
use crate::func::FuncExpr;
use crate::radix::{Radix, Triplet};

fn check_time(t: &Rational) -> Result<()> {
    if t.is_positive() {
        Ok(())
    } else {
        Err(Error::invalid(format!("t must be positive, got {}", format_rational(t))))
    }
}

fn quad(t: &Rational, x: &Rational, z: &Rational, mode: Mode) -> Scalar {
    let dx = x - z;
    mode.lift(&(&dx * &dx / (int(2) * t)))
}

/// `q_f(t, x; z)`.
pub fn parabola_eval<F: PeriodicFn + ?Sized>(f: &F, t: &Rational, x: &Rational, z: &Rational, mode: Mode) -> Result<Scalar> {
    check_time(t)?;
    Ok(&f.value(z, mode)? + &quad(t, x, z, mode))
}

/// Where the middle parabola meets its left (`x1`) and right (`x2`) neighbours.
#[derive(Debug, Clone, Serialize)]
pub struct CrossingPoints {
    pub x1: Scalar,
    pub x2: Scalar,
    /// `Delta_{n,k}(y; f)`
    pub delta: Scalar,
}

/// `x1 = k/r^n + y/(2 r^n) + t delta-` and `x2 = k/r^n + (1+y)/(2 r^n) + t delta+`.
/// In exact mode both parabola equalities are checked before returning.
pub fn crossing_points<F: PeriodicFn + ?Sized>(f: &F, r: Radix, tr: &Triplet, t: &Rational, mode: Mode) -> Result<CrossingPoints> {
    check_time(t)?;
    let d = differences(f, r, tr, mode)?;
    let rn = r.pow_rational(tr.n);
    let left = tr.left(r);
    let base1 = &left + &tr.y / (int(2) * &rn);
    let base2 = &left + (Rational::one() + &tr.y) / (int(2) * &rn);
    let tt = mode.lift(t);
    let x1 = &mode.lift(&base1) + &(&tt * &d.backward);
    let x2 = &mode.lift(&base2) + &(&tt * &d.forward);
    if let (Scalar::Exact(a), Scalar::Exact(b)) = (&x1, &x2) {
        let (zl, zm, zr) = (left, tr.mid(r), tr.right(r));
        let q = |x: &Rational, z: &Rational| parabola_eval(f, t, x, z, Mode::Exact);
        if q(a, &zm)? != q(a, &zl)? || q(b, &zm)? != q(b, &zr)? {
            return Err(Error::invalid(format!("crossing-point postcondition failed at {tr}")));
        }
    }
    Ok(CrossingPoints { x1, x2, delta: d.second })
}

/// Sampled dominance test against the second-difference criterion `Delta <= -1/t`.
#[derive(Debug, Clone, Serialize)]
pub struct DominanceReport {
    /// Whether `q(mid) >= min(q(left), q(right))` held at every sample.
    pub sampled: bool,
    /// Whether `Delta_{n,k}(y; f) <= -1/t`.
    pub criterion: bool,
    pub agree: bool,
    /// First sample where the middle parabola lies strictly below both neighbours.
    #[serde(serialize_with = "serialize_opt")]
    pub violation: Option<Rational>,
    pub samples: usize,
}

fn serialize_opt<S: serde::Serializer>(q: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match q {
        Some(q) => s.serialize_str(&format_rational(q)),
        None => s.serialize_none(),
    }
}

/// Evaluates the dominance inequality at each of `x_samples`, and the criterion.
/// Needs exact-capable `f`.
pub fn dominance_check<F: PeriodicFn + ?Sized>(f: &F, r: Radix, tr: &Triplet, t: &Rational, x_samples: &[Rational]) -> Result<DominanceReport> {
    check_time(t)?;
    let mode = Mode::Exact;
    let (zl, zm, zr) = (tr.left(r), tr.mid(r), tr.right(r));
    let fl = f.value(&zl, mode)?;
    let fm = f.value(&zm, mode)?;
    let fr = f.value(&zr, mode)?;
    let mut violation = None;
    for x in x_samples {
        let ql = &fl + &quad(t, x, &zl, mode);
        let qm = &fm + &quad(t, x, &zm, mode);
        let qr = &fr + &quad(t, x, &zr, mode);
        let lo = if ql.value_cmp(&qr) == Ordering::Less { ql } else { qr };
        if qm.value_cmp(&lo) == Ordering::Less {
            violation = Some(x.clone());
            break;
        }
    }
    let d = differences(f, r, tr, mode)?;
    let criterion = classify_margin(&(&d.second + &Scalar::Exact(t.recip())), mode) == Verdict::Pass;
    let sampled = violation.is_none();
    Ok(DominanceReport { sampled, criterion, agree: sampled == criterion, violation, samples: x_samples.len() })
}

/// `count` evenly spaced midpoints on a window around `[min(x1, x2), max(x1, x2)]`,
/// padded on both sides; the cell itself when `x1 = x2`.
pub fn dominance_samples(cp: &CrossingPoints, r: Radix, tr: &Triplet, count: usize) -> Result<Vec<Rational>> {
    let (x1, x2) = match (&cp.x1, &cp.x2) {
        (Scalar::Exact(a), Scalar::Exact(b)) => (a.clone(), b.clone()),
        _ => return Err(Error::invalid("dominance samples need exact crossing points")),
    };
    let (mut lo, mut hi) = if x1 <= x2 { (x1, x2) } else { (x2, x1) };
    if lo == hi {
        lo = tr.left(r);
        hi = tr.right(r);
    }
    let pad = &hi - &lo;
    let a = &lo - &pad;
    let width = &hi + &pad - &a;
    let n = count.max(1);
    let den = int(2 * n as i64);
    Ok((0..n)
        .map(|j| &a + &width * Rational::from_integer(BigInt::from(2 * j + 1)) / &den)
        .collect())
}

/// Parameters of a grid-formula flow computation.
#[derive(Debug, Clone)]
pub struct FlowQuery {
    pub t: Rational,
    pub r: Radix,
    pub c: Rational,
    pub n: Option<u32>,
    pub mode: Mode,
}

impl FlowQuery {
    pub fn new(t: Rational, r: Radix, c: Rational) -> Result<Self> {
        check_time(&t)?;
        if !c.is_positive() {
            return Err(Error::invalid("c must be positive"));
        }
        Ok(FlowQuery { t, r, c, n: None, mode: Mode::Exact })
    }

    pub fn with_n(mut self, n: u32) -> Self {
        self.n = Some(n);
        self
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    /// Smallest `n` with `1 / (2 c r^n) <= t`.
    pub fn default_n(&self) -> u32 {
        let mut n = 0;
        while int(2) * &self.c * self.r.pow_rational(n) * &self.t < Rational::one() {
            n += 1;
        }
        n
    }

    /// The requested depth, checked against `t >= 1 / (2 c r^n)`.
    pub fn depth(&self) -> Result<u32> {
        let n = self.n.unwrap_or_else(|| self.default_n());
        let need = (int(2) * &self.c * self.r.pow_rational(n)).recip();
        if self.t < need {
            return Err(Error::Hypothesis(format!(
                "t = {} is below 1/(2 c r^n) = {} at n = {n}",
                format_rational(&self.t),
                format_rational(&need)
            )));
        }
        Ok(n)
    }
}

/// One envelope piece: on `[x_lo, x_hi]` the value is `fz + (x - z)^2 / (2t)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Piece {
    pub x_lo: Scalar,
    pub x_hi: Scalar,
    #[serde(serialize_with = "crate::arith::serialize_rational")]
    pub z: Rational,
    pub fz: Scalar,
}

/// Lower envelope of equal-curvature parabolas on `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PiecewiseQuadratic {
    #[serde(serialize_with = "crate::arith::serialize_rational")]
    pub t: Rational,
    pub pieces: Vec<Piece>,
}

fn ambiguous(what: &str) -> Error {
    Error::Ambiguous(format!("{what} is not separated by the float error bounds; use exact mode"))
}

fn certified(a: &Scalar, b: &Scalar, what: &str) -> Result<Ordering> {
    a.certified_cmp(b).ok_or_else(|| ambiguous(what))
}

/// Lower envelope of `fz_i + (x - z_i)^2 / (2t)` over `x` in `[0, 1]`, for strictly
/// increasing `z_i`. Zero-width pieces are dropped.
pub fn lower_envelope(t: &Rational, vertices: &[(Rational, Scalar)], mode: Mode) -> Result<PiecewiseQuadratic> {
    check_time(t)?;
    if vertices.is_empty() {
        return Err(Error::invalid("envelope needs at least one parabola"));
    }
    if vertices.windows(2).any(|w| w[0].0 >= w[1].0) {
        return Err(Error::invalid("parabola vertices must be strictly increasing"));
    }
    let tt = mode.lift(t);
    let meet = |p: &(Rational, Scalar), q: &(Rational, Scalar)| -> Scalar {
        let mid = mode.lift(&((&p.0 + &q.0) / int(2)));
        let gap = mode.lift(&(&q.0 - &p.0));
        &mid + &(&(&tt * &(&q.1 - &p.1)) / &gap)
    };
    // (vertex index, start of its region; None is -infinity)
    let mut stack: Vec<(usize, Option<Scalar>)> = Vec::with_capacity(vertices.len());
    for (j, v) in vertices.iter().enumerate() {
        loop {
            let Some((top, start)) = stack.last() else {
                stack.push((j, None));
                break;
            };
            let s = meet(&vertices[*top], v);
            let covers = match start {
                None => false,
                Some(st) => certified(&s, st, "envelope breakpoint")? != Ordering::Greater,
            };
            if covers {
                stack.pop();
            } else {
                stack.push((j, Some(s)));
                break;
            }
        }
    }
    let zero = Scalar::zero();
    let one = Scalar::Exact(Rational::one());
    let mut pieces = Vec::new();
    for (i, (idx, start)) in stack.iter().enumerate() {
        let lo = match start {
            Some(s) if certified(s, &zero, "envelope breakpoint")? == Ordering::Greater => s.clone(),
            _ => zero.clone(),
        };
        let hi = match stack.get(i + 1) {
            Some((_, Some(s))) if certified(s, &one, "envelope breakpoint")? == Ordering::Less => s.clone(),
            _ => one.clone(),
        };
        if certified(&lo, &hi, "envelope piece")? == Ordering::Less {
            let (z, fz) = &vertices[*idx];
            pieces.push(Piece { x_lo: lo, x_hi: hi, z: z.clone(), fz: fz.clone() });
        }
    }
    Ok(PiecewiseQuadratic { t: t.clone(), pieces })
}

/// `H_t f` on `[0, 1]` as the lower envelope of the parabolas with vertices `k / r^n`.
/// Also checks `c y (1 - y) <= f(y)` at the interior vertices.
pub fn flow_grid<F: PeriodicFn + ?Sized>(f: &F, q: &FlowQuery) -> Result<PiecewiseQuadratic> {
    let n = q.depth()?;
    let den = q.r.pow(n);
    let count = den.to_u64().ok_or(Error::ResourceLimit { needed: u128::MAX, cap: u64::MAX })?;
    let mut vertices = Vec::with_capacity(count as usize + 1);
    for k in 0..=count {
        let z = Rational::new(BigInt::from(k), den.clone());
        let fz = f.value(&z, q.mode)?;
        if k > 0 && k < count {
            let lower = Scalar::Exact(&q.c * &z * (Rational::one() - &z));
            if classify_margin(&(&lower - &fz), q.mode) == Verdict::Fail {
                return Err(Error::Hypothesis(format!(
                    "c y (1 - y) <= f(y) fails at y = {}",
                    format_rational(&z)
                )));
            }
        }
        vertices.push((z, fz));
    }
    lower_envelope(&q.t, &vertices, q.mode)
}

impl PiecewiseQuadratic {
    /// Index of the piece containing `x`; breakpoints belong to the left piece.
    pub fn locate(&self, x: &Rational) -> Result<usize> {
        let xs = Scalar::Exact(x.clone());
        let first = &self.pieces[0].x_lo;
        let last = &self.pieces[self.pieces.len() - 1].x_hi;
        if xs.value_cmp(first) == Ordering::Less || xs.value_cmp(last) == Ordering::Greater {
            return Err(Error::invalid(format!("x = {} outside [0, 1]", format_rational(x))));
        }
        Ok(self.pieces.partition_point(|p| p.x_hi.value_cmp(&xs) == Ordering::Less).min(self.pieces.len() - 1))
    }

    pub fn eval(&self, x: &Rational) -> Result<Scalar> {
        let p = &self.pieces[self.locate(x)?];
        let mode = if p.fz.is_exact() { Mode::Exact } else { Mode::float() };
        Ok(&p.fz + &quad(&self.t, x, &p.z, mode))
    }

    /// Interior breakpoints.
    pub fn breakpoints(&self) -> Vec<Scalar> {
        self.pieces.iter().skip(1).map(|p| p.x_lo.clone()).collect()
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("serializable")
    }

    /// Reads back the JSON form; exact pieces only.
    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |m: &str| Error::Semantic { path: "$".into(), msg: m.into() };
        let rat_at = |v: &Value, what: &str| -> Result<Rational> {
            v.as_str().ok_or_else(|| bad(&format!("{what} must be a \"p/q\" string"))).and_then(parse_rational)
        };
        let t = rat_at(&v["t"], "t")?;
        let arr = v["pieces"].as_array().ok_or_else(|| bad("pieces must be an array"))?;
        let pieces = arr
            .iter()
            .map(|p| {
                Ok(Piece {
                    x_lo: Scalar::Exact(rat_at(&p["x_lo"], "x_lo")?),
                    x_hi: Scalar::Exact(rat_at(&p["x_hi"], "x_hi")?),
                    z: rat_at(&p["z"], "z")?,
                    fz: Scalar::Exact(rat_at(&p["fz"], "fz")?),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if pieces.is_empty() {
            return Err(bad("pieces is empty"));
        }
        Ok(PiecewiseQuadratic { t, pieces })
    }

    /// `x,value` rows at `x = j / samples`.
    pub fn to_csv(&self, samples: u32) -> Result<String> {
        if samples == 0 {
            return Err(Error::invalid("samples must be >= 1"));
        }
        let mut out = String::from("x,value\n");
        for j in 0..=samples {
            let x = Rational::new(BigInt::from(j), BigInt::from(samples));
            let v = self.eval(&x)?;
            let value = match &v {
                Scalar::Exact(q) => format_rational(q),
                Scalar::Float(a) => format!("{}", a.value),
            };
            out.push_str(&format!("{},{}\n", format_rational(&x), value));
        }
        Ok(out)
    }
}

/// Candidate grid for the brute-force infimum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ZGrid {
    /// `z = j / r^N`
    Radix(Radix, u32),
    /// `z = j / M` with `M = ceil(1 / h)`
    Step(f64),
}

/// `f` tabulated on one period of a `z` grid, for repeated brute-force minimization.
pub struct BruteForceGrid {
    t: Rational,
    den: u64,
    values: Vec<Scalar>,
    /// Half-width of the `z` window around `x`; `None` searches `[0, 1]`.
    window: Option<Rational>,
    mode: Mode,
}

impl BruteForceGrid {
    /// Uses `[0, 1]` when `f` is certified nonnegative there, otherwise
    /// `[x - L, x + L]` with `L = sqrt(2 t osc f) + 1`.
    pub fn new(f: &FuncExpr, t: &Rational, grid: ZGrid, mode: Mode) -> Result<Self> {
        check_time(t)?;
        let den = match grid {
            ZGrid::Radix(r, n) => r.pow_u64(n).ok_or(Error::ResourceLimit { needed: u128::MAX, cap: u64::MAX })?,
            ZGrid::Step(h) => {
                if !(h > 0.0 && h <= 1.0) {
                    return Err(Error::invalid(format!("step must lie in (0, 1], got {h}")));
                }
                (1.0 / h).ceil() as u64
            }
        };
        let values = (0..den)
            .map(|j| f.value(&Rational::new(BigInt::from(j), BigInt::from(den)), mode))
            .collect::<Result<Vec<_>>>()?;
        let (lo, _) = f.range_enclosure();
        let window = if lo >= 0.0 {
            None
        } else {
            let l = (2.0 * rational_to_f64(t) * f.oscillation()).sqrt() + 1.0;
            Some(Rational::from_float(l.ceil()).expect("finite"))
        };
        Ok(BruteForceGrid { t: t.clone(), den, values, window, mode })
    }

    /// `min_z q_f(t, x; z)` over the grid.
    pub fn min_at(&self, x: &Rational) -> Result<Scalar> {
        let d = Rational::from_integer(BigInt::from(self.den));
        let (j0, j1): (BigInt, BigInt) = match &self.window {
            None => (BigInt::zero(), BigInt::from(self.den)),
            Some(l) => (((x - l) * &d).ceil().to_integer(), ((x + l) * &d).floor().to_integer()),
        };
        if let Mode::Float { .. } = self.mode {
            return self.min_at_float(x, j0, j1);
        }
        let den = BigInt::from(self.den);
        let mut best: Option<Scalar> = None;
        let mut j = j0;
        while j <= j1 {
            let idx = j.mod_floor(&den).to_usize().expect("index");
            let z = Rational::new(j.clone(), den.clone());
            let q = &self.values[idx] + &quad(&self.t, x, &z, self.mode);
            best = Some(match best {
                Some(b) if b.value_cmp(&q) != Ordering::Greater => b,
                Some(b) => widen_min(b, q),
                None => q,
            });
            j += 1;
        }
        best.ok_or_else(|| Error::invalid("empty z window"))
    }
}

impl BruteForceGrid {
    fn min_at_float(&self, x: &Rational, j0: BigInt, j1: BigInt) -> Result<Scalar> {
        let (j0, j1) = match (j0.to_i64(), j1.to_i64()) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(Error::invalid("z window too large")),
        };
        let xa = Approx::from_rational(x);
        let two_t = Approx::from_rational(&(int(2) * &self.t));
        let den = self.den as i64;
        let mut best: Option<Approx> = None;
        for j in j0..=j1 {
            let fz = self.values[j.rem_euclid(den) as usize].to_approx();
            let z = Approx::exact(j as f64) / Approx::exact(den as f64);
            let dx = xa - z;
            let q = fz + dx * dx / two_t;
            best = Some(match best {
                Some(b) if b.value <= q.value => Approx::new(b.value, b.err.max(q.err)),
                Some(b) => Approx::new(q.value, b.err.max(q.err)),
                None => q,
            });
        }
        best.map(Scalar::Float).ok_or_else(|| Error::invalid("empty z window"))
    }
}

// The minimum of enclosures is enclosed by the smallest centre with the largest error.
fn widen_min(old: Scalar, new: Scalar) -> Scalar {
    match (old, new) {
        (Scalar::Float(a), Scalar::Float(b)) => Scalar::Float(Approx::new(b.value, a.err.max(b.err))),
        (_, n) => n,
    }
}


/// Brute-force `H_t f(x)` over a `z` grid.
pub fn flow_bruteforce(f: &FuncExpr, t: &Rational, x: &Rational, grid: ZGrid, mode: Mode) -> Result<Scalar> {
    BruteForceGrid::new(f, t, grid, mode)?.min_at(x)
}

/// `u_t + u_x^2 / 2` of the envelope at an interior point of a piece.
pub fn pde_residual(pq: &PiecewiseQuadratic, x: &Rational) -> Result<Scalar> {
    let xs = Scalar::Exact(x.clone());
    let i = pq.locate(x)?;
    let p = &pq.pieces[i];
    let at_edge = |b: &Scalar| matches!(b.certified_cmp(&xs), Some(Ordering::Equal) | None);
    if (i > 0 && at_edge(&p.x_lo)) || (i + 1 < pq.pieces.len() && at_edge(&p.x_hi)) {
        return Err(Error::invalid(format!("x = {} is a breakpoint of the envelope", format_rational(x))));
    }
    let mode = if p.fz.is_exact() { Mode::Exact } else { Mode::float() };
    let dx = mode.lift(&(x - &p.z));
    let t = mode.lift(&pq.t);
    let two = mode.lift(&int(2));
    let u_t = -(&(&dx * &dx) / &(&two * &(&t * &t)));
    let u_x = &dx / &t;
    Ok(&u_t + &(&(&u_x * &u_x) / &two))
}

/// Slopes `(x - z) / t` for `x` in one envelope piece; all lie in the subdifferential of `f` at `z`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubdiffWitness {
    #[serde(serialize_with = "crate::arith::serialize_rational")]
    pub z: Rational,
    pub p_lo: Scalar,
    pub p_hi: Scalar,
}

impl SubdiffWitness {
    pub fn width(&self) -> Scalar {
        &self.p_hi - &self.p_lo
    }
}

pub fn subdiff_witnesses(pq: &PiecewiseQuadratic) -> Vec<SubdiffWitness> {
    pq.pieces
        .iter()
        .filter(|p| p.x_lo.value_cmp(&p.x_hi) == Ordering::Less)
        .map(|p| {
            let mode = if p.fz.is_exact() { Mode::Exact } else { Mode::float() };
            let z = mode.lift(&p.z);
            let t = mode.lift(&pq.t);
            SubdiffWitness { z: p.z.clone(), p_lo: &(&p.x_lo - &z) / &t, p_hi: &(&p.x_hi - &z) / &t }
        })
        .collect()
}

/// Re-verification of one witness on a sample grid.
#[derive(Debug, Clone, Serialize)]
pub struct WitnessCheck {
    /// `f(x) >= f(z) + p (x - z) - (x - z)^2 / (2t)` for every sample and both endpoint slopes.
    pub minorant: bool,
    /// `f(x) >= f(z) + p (x - z)` on the local samples.
    pub local_linear: bool,
    #[serde(serialize_with = "serialize_opt")]
    pub counterexample: Option<Rational>,
    pub samples: usize,
}

/// Checks a witness at `x = z + j / r^depth` for `|j| <= r^(depth - local)`, that is within
/// `r^-local` of `z`, plus the quadratic minorant on the whole period around `z`.
pub fn verify_witness<F: PeriodicFn + ?Sized>(
    f: &F,
    w: &SubdiffWitness,
    t: &Rational,
    r: Radix,
    local: u32,
    depth: u32,
) -> Result<WitnessCheck> {
    let (Scalar::Exact(p_lo), Scalar::Exact(p_hi)) = (&w.p_lo, &w.p_hi) else {
        return Err(Error::invalid("witness verification needs exact slopes"));
    };
    if depth < local {
        return Err(Error::invalid("sample depth must be at least the local radius depth"));
    }
    let mode = Mode::Exact;
    let fz = f.value(&w.z, mode)?.as_exact().cloned().expect("exact");
    let den = r.pow(depth);
    let local_reach = r.pow(depth - local);
    let reach = den.clone();
    let mut minorant = true;
    let mut local_linear = true;
    let mut counterexample = None;
    let mut samples = 0;
    let mut j = -reach.clone();
    while j <= reach {
        if !j.is_zero() {
            let h = Rational::new(j.clone(), den.clone());
            let x = &w.z + &h;
            let fx = f.value(&x, mode)?.as_exact().cloned().expect("exact");
            let curv = &h * &h / (int(2) * t);
            for p in [p_lo, p_hi] {
                let lin = &fz + p * &h;
                if fx < &lin - &curv {
                    minorant = false;
                    counterexample.get_or_insert(x.clone());
                }
                if j.abs() <= local_reach && fx < lin {
                    local_linear = false;
                    counterexample.get_or_insert(x.clone());
                }
            }
            samples += 1;
        }
        j += 1;
    }
    Ok(WitnessCheck { minorant, local_linear, counterexample, samples })
}
