//! Symbolic periodic functions: period 1, value 0 at the integers.
//!
//! A [`FuncExpr`] is a small expression tree over built-in generators (distance to the
//! integers, its powers, splines, the spliced parabola, trigonometric examples) closed
//! under scaling, sums, integer dilation and the series operator
//! `U_psi(x) = sum_j r^-j psi(r^j x)`.

use std::f64::consts::PI;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::arith::{frac, int, rat, rational_to_f64, Approx, Rational};
use crate::error::{Error, Result};
use crate::poly::{PiecewisePoly, Poly};
use crate::radix::Radix;
use crate::series;

mod spec;

pub use spec::parse_func_spec;

const EPS: f64 = f64::EPSILON;

/// Periodic spline on `[0, 1]` with coefficients local to each knot:
/// piece `i` is `sum_j coeffs[i][j] (x - knots[i])^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spline {
    knots: Vec<Rational>,
    coeffs: Vec<Vec<Rational>>,
    slope: f64,
    range: (f64, f64),
}

impl Spline {
    pub fn new(knots: Vec<Rational>, coeffs: Vec<Vec<Rational>>) -> Result<Self> {
        let bad = |msg: String| Err(Error::invalid(msg));
        if knots.len() < 2 {
            return bad("spline needs at least two knots".into());
        }
        if !knots[0].is_zero() || !knots.last().unwrap().is_one() {
            return bad("spline knots must start at 0 and end at 1".into());
        }
        if knots.windows(2).any(|w| w[0] >= w[1]) {
            return bad("spline knots must be strictly increasing".into());
        }
        if coeffs.len() != knots.len() - 1 {
            return bad(format!("{} knots need {} coefficient lists, got {}", knots.len(), knots.len() - 1, coeffs.len()));
        }
        let local: Vec<Poly> = coeffs.iter().map(|c| Poly::new(c.clone())).collect();
        if !local[0].eval(&Rational::zero()).is_zero() {
            return bad("spline must vanish at 0".into());
        }
        for i in 0..local.len() {
            let h = &knots[i + 1] - &knots[i];
            let end = local[i].eval(&h);
            let next = if i + 1 < local.len() { local[i + 1].eval(&Rational::zero()) } else { Rational::zero() };
            if end != next {
                let at = crate::arith::format_rational(&knots[i + 1]);
                return bad(format!("spline is discontinuous at x = {at} (periodic wrap included)"));
            }
        }
        let mut s = Spline { knots, coeffs, slope: 0.0, range: (0.0, 0.0) };
        let pw = s.piecewise();
        s.slope = rational_to_f64(&pw.slope_bound()).next_up();
        let (lo, hi) = pw.range_enclosure();
        s.range = (rational_to_f64(&lo).next_down(), rational_to_f64(&hi).next_up());
        Ok(s)
    }

    pub fn knots(&self) -> &[Rational] {
        &self.knots
    }

    pub fn coeffs(&self) -> &[Vec<Rational>] {
        &self.coeffs
    }

    fn piece(&self, x: &Rational) -> usize {
        match self.knots[1..self.knots.len() - 1].binary_search(x) {
            Ok(i) => i + 1,
            Err(i) => i,
        }
    }

    /// Exact value at `x` in `[0, 1)`.
    fn eval(&self, x: &Rational) -> Rational {
        let i = self.piece(x);
        let s = x - &self.knots[i];
        Poly::new(self.coeffs[i].clone()).eval(&s)
    }

    fn eval_approx(&self, x: Approx) -> Approx {
        let xv = x.value;
        let i = self
            .knots
            .iter()
            .skip(1)
            .position(|k| xv < rational_to_f64(k))
            .unwrap_or(self.knots.len() - 2);
        let knot = rational_to_f64(&self.knots[i]);
        let s = xv - knot;
        let (mut acc, mut mag) = (0.0f64, 0.0f64);
        for c in self.coeffs[i].iter().rev() {
            let cf = rational_to_f64(c);
            acc = acc * s + cf;
            mag = mag * s.abs() + cf.abs();
        }
        let deg = self.coeffs[i].len() as f64;
        let rounding = ((2.0 * deg + 3.0) * EPS * mag).next_up();
        // Knot conversion and the subtraction perturb the local coordinate.
        let input = x.err + ulp_sum(knot, s);
        Approx::new(acc, rounding + self.slope * input)
    }

    /// Global-variable piecewise form.
    pub fn piecewise(&self) -> PiecewisePoly {
        let pieces = self
            .coeffs
            .iter()
            .zip(&self.knots)
            .map(|(c, k)| Poly::new(c.clone()).compose_affine(&Rational::one(), &-k.clone()))
            .collect();
        PiecewisePoly::new(self.knots.clone(), pieces)
    }
}

fn ulp_sum(a: f64, b: f64) -> f64 {
    crate::arith::ulp(a) + crate::arith::ulp(b)
}

/// `x^2` on `[0, 1/r]` continued to `[1/r, 1]` by the quintic matching value, slope and
/// curvature at both ends (`1/r^2, 2/r, 2` at `1/r` and `0, 0, 2` at `1`), which makes the
/// periodic extension `C^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaSplice {
    r: Radix,
    spline: Spline,
}

impl ThetaSplice {
    pub fn new(r: Radix) -> Result<Self> {
        let a = Rational::new(1.into(), r.as_big());
        let h = Rational::one() - &a;
        // p(s) = a^2 + 2a s + s^2 + c3 s^3 + c4 s^4 + c5 s^5, s = x - a.
        // Conditions at s = h: p = 0, p' = 0, p'' = 2.
        let (c3, c4, c5) = {
            let rhs0 = -(&a * &a + int(2) * &a * &h + &h * &h);
            let rhs1 = -(int(2) * &a + int(2) * &h);
            let rhs2 = int(0);
            // [h^3 h^4 h^5; 3h^2 4h^3 5h^4; 6h 12h^2 20h^3] c = rhs
            let m = [
                [h.pow(3), h.pow(4), h.pow(5)],
                [int(3) * h.pow(2), int(4) * h.pow(3), int(5) * h.pow(4)],
                [int(6) * &h, int(12) * h.pow(2), int(20) * h.pow(3)],
            ];
            let sol = solve3(m, [rhs0, rhs1, rhs2]);
            (sol[0].clone(), sol[1].clone(), sol[2].clone())
        };
        let tail = vec![&a * &a, int(2) * &a, int(1), c3, c4, c5];
        let head = vec![int(0), int(0), int(1)];
        let spline = Spline::new(vec![int(0), a.clone(), int(1)], vec![head, tail])?;
        // Positivity on (0, 1): x^2 > 0 on (0, 1/r]; the quintic must have no root in (1/r, 1).
        let q = spline.piecewise().pieces[1].clone();
        if q.count_roots_open(&a, &int(1)) != 0 || !q.eval(&((&a + int(1)) / int(2))).is_positive() {
            return Err(Error::invalid(format!("theta splice for r = {r} is not positive on (0, 1)")));
        }
        Ok(ThetaSplice { r, spline })
    }

    pub fn radix(&self) -> Radix {
        self.r
    }

    pub fn spline(&self) -> &Spline {
        &self.spline
    }
}

fn solve3(mut m: [[Rational; 3]; 3], mut b: [Rational; 3]) -> [Rational; 3] {
    for col in 0..3 {
        let piv = (col..3).find(|&i| !m[i][col].is_zero()).expect("singular system");
        m.swap(col, piv);
        b.swap(col, piv);
        for i in 0..3 {
            if i != col {
                let f = &m[i][col] / &m[col][col];
                for j in 0..3 {
                    let v = &m[col][j] * &f;
                    m[i][j] -= v;
                }
                let v = &b[col] * &f;
                b[i] -= v;
            }
        }
    }
    [&b[0] / &m[0][0], &b[1] / &m[1][1], &b[2] / &m[2][2]]
}

/// A continuous 1-periodic function vanishing at 0, as an expression tree.
#[derive(Debug, Clone, PartialEq)]
pub enum FuncExpr {
    /// Distance to the nearest integer.
    Distance,
    /// `d(x)^p`, `p >= 1`.
    DistancePower(u32),
    /// Generalized Takagi function, `U` applied to `Distance` with radix `r`.
    Takagi(Radix),
    PolySpline(Spline),
    /// `|sin(pi x)|`
    AbsSin,
    /// `sin(2 pi x)`
    Sin2Pi,
    ThetaSplice(ThetaSplice),
    Scale(Rational, Box<FuncExpr>),
    Sum(Vec<FuncExpr>),
    /// `x -> child(m x)` for an integer `m >= 1`.
    Dilate(u32, Box<FuncExpr>),
    USeries(Radix, Box<FuncExpr>),
}

impl FuncExpr {
    pub fn distance_power(p: u32) -> Result<Self> {
        if p == 0 {
            return Err(Error::invalid("distance power must be >= 1"));
        }
        Ok(FuncExpr::DistancePower(p))
    }

    pub fn takagi(r: u32) -> Result<Self> {
        Ok(FuncExpr::Takagi(Radix::new(r)?))
    }

    pub fn theta(r: u32) -> Result<Self> {
        Ok(FuncExpr::ThetaSplice(ThetaSplice::new(Radix::new(r)?)?))
    }

    pub fn scale(a: Rational, child: FuncExpr) -> Self {
        FuncExpr::Scale(a, Box::new(child))
    }

    pub fn dilate(m: u32, child: FuncExpr) -> Result<Self> {
        if m == 0 {
            return Err(Error::invalid("dilation factor must be >= 1"));
        }
        Ok(FuncExpr::Dilate(m, Box::new(child)))
    }

    pub fn u_series(r: u32, psi: FuncExpr) -> Result<Self> {
        Ok(FuncExpr::USeries(Radix::new(r)?, Box::new(psi)))
    }

    /// `a d + b d^2`
    pub fn psi0(a: Rational, b: Rational) -> Self {
        FuncExpr::Sum(vec![
            FuncExpr::scale(a, FuncExpr::Distance),
            FuncExpr::scale(b, FuncExpr::DistancePower(2)),
        ])
    }

    /// `|sin(pi x)| - (1/r) |sin(pi r x)|`, whose `U`-series telescopes to `|sin(pi x)|`.
    pub fn sine_cancellation(r: u32) -> Result<Self> {
        Ok(FuncExpr::Sum(vec![
            FuncExpr::AbsSin,
            FuncExpr::scale(rat(-1, r as i64), FuncExpr::dilate(r, FuncExpr::AbsSin)?),
        ]))
    }

    /// Whether every node admits exact evaluation at rational points.
    pub fn supports_exact(&self) -> bool {
        match self {
            FuncExpr::AbsSin | FuncExpr::Sin2Pi => false,
            FuncExpr::Distance
            | FuncExpr::DistancePower(_)
            | FuncExpr::Takagi(_)
            | FuncExpr::PolySpline(_)
            | FuncExpr::ThetaSplice(_) => true,
            FuncExpr::Scale(_, c) | FuncExpr::Dilate(_, c) | FuncExpr::USeries(_, c) => c.supports_exact(),
            FuncExpr::Sum(cs) => cs.iter().all(FuncExpr::supports_exact),
        }
    }

    pub(crate) fn require_exact(&self) -> Result<()> {
        if self.supports_exact() {
            Ok(())
        } else {
            Err(Error::UnsupportedExact(format!("{self} contains a trigonometric term")))
        }
    }

    /// Exact value at a rational point of any sign.
    pub fn eval_exact(&self, x: &Rational) -> Result<Rational> {
        let x = frac(x);
        self.eval_reduced(&x)
    }

    // `x` in [0, 1).
    fn eval_reduced(&self, x: &Rational) -> Result<Rational> {
        Ok(match self {
            FuncExpr::Distance => distance(x),
            FuncExpr::DistancePower(p) => distance(x).pow(*p as i32),
            FuncExpr::Takagi(r) => series::u_value_exact(*r, &FuncExpr::Distance, x)?,
            FuncExpr::PolySpline(s) => s.eval(x),
            FuncExpr::ThetaSplice(t) => t.spline.eval(x),
            FuncExpr::AbsSin | FuncExpr::Sin2Pi => return Err(self.require_exact().unwrap_err()),
            FuncExpr::Scale(a, c) => a * c.eval_reduced(x)?,
            FuncExpr::Sum(cs) => {
                let mut acc = Rational::zero();
                for c in cs {
                    acc += c.eval_reduced(x)?;
                }
                acc
            }
            FuncExpr::Dilate(m, c) => c.eval_exact(&(x * int(*m as i64)))?,
            FuncExpr::USeries(r, psi) => series::u_value_exact(*r, psi, x)?,
        })
    }

    /// Floating-point value at `x` (with its own uncertainty) and a certified error bound.
    pub fn eval_approx(&self, x: Approx) -> Approx {
        let x = x.frac();
        let out = self.eval_approx_reduced(x);
        let (lo, hi) = self.range_enclosure();
        // Never report more uncertainty than the range allows.
        if out.err > hi - lo {
            Approx::new(out.value, (hi - lo).next_up())
        } else {
            out
        }
    }

    pub fn eval_f64(&self, x: f64) -> Approx {
        self.eval_approx(Approx::exact(x))
    }

    fn eval_approx_reduced(&self, x: Approx) -> Approx {
        let v = x.value;
        match self {
            FuncExpr::Distance => Approx::new(v.min(1.0 - v), x.err),
            FuncExpr::DistancePower(p) => {
                let d = v.min(1.0 - v);
                let val = d.powi(*p as i32);
                let lip = *p as f64 * 0.5f64.powi(*p as i32 - 1);
                let rounding = ((*p as f64 + 1.0) * EPS * val.abs()).next_up();
                Approx::new(val, rounding + lip * x.err)
            }
            FuncExpr::Takagi(r) => series::u_value_approx(*r, &FuncExpr::Distance, x, None),
            FuncExpr::PolySpline(s) => s.eval_approx(x),
            FuncExpr::ThetaSplice(t) => t.spline.eval_approx(x),
            FuncExpr::AbsSin => {
                let val = (PI * v).sin().abs();
                Approx::new(val, 2.0 * EPS + PI * x.err)
            }
            FuncExpr::Sin2Pi => {
                let val = (2.0 * PI * v).sin();
                Approx::new(val, 4.0 * EPS + 2.0 * PI * x.err)
            }
            FuncExpr::Scale(a, c) => Approx::from_rational(a) * c.eval_approx_reduced(x),
            FuncExpr::Sum(cs) => cs
                .iter()
                .map(|c| c.eval_approx_reduced(x))
                .fold(Approx::exact(0.0), |a, b| a + b),
            FuncExpr::Dilate(m, c) => c.eval_approx(x.scale_int(*m)),
            FuncExpr::USeries(r, psi) => series::u_value_approx(*r, psi, x, None),
        }
    }

    /// Certified enclosure `[lo, hi]` of the values on `[0, 1]`.
    pub fn range_enclosure(&self) -> (f64, f64) {
        match self {
            FuncExpr::Distance => (0.0, 0.5),
            FuncExpr::DistancePower(p) => (0.0, 0.5f64.powi(*p as i32)),
            FuncExpr::Takagi(r) => (0.0, (0.5 * series::geometric_factor(*r)).next_up()),
            FuncExpr::PolySpline(s) => s.range,
            FuncExpr::ThetaSplice(t) => t.spline.range,
            FuncExpr::AbsSin => (0.0, 1.0),
            FuncExpr::Sin2Pi => (-1.0, 1.0),
            FuncExpr::Scale(a, c) => {
                let (lo, hi) = c.range_enclosure();
                let af = rational_to_f64(a);
                let (p, q) = (af * lo, af * hi);
                let slack = crate::arith::ulp(af) * lo.abs().max(hi.abs());
                ((p.min(q) - slack).next_down(), (p.max(q) + slack).next_up())
            }
            FuncExpr::Sum(cs) => cs.iter().map(FuncExpr::range_enclosure).fold((0.0, 0.0), |(a, b), (c, d)| {
                ((a + c).next_down(), (b + d).next_up())
            }),
            FuncExpr::Dilate(_, c) => c.range_enclosure(),
            FuncExpr::USeries(r, psi) => {
                let (lo, hi) = psi.range_enclosure();
                let g = series::geometric_factor(*r);
                ((lo * g).next_down().min(0.0), (hi * g).next_up().max(0.0))
            }
        }
    }

    /// Upper bound on `sup |f|`.
    pub fn sup_abs(&self) -> f64 {
        let (lo, hi) = self.range_enclosure();
        lo.abs().max(hi.abs())
    }

    /// Upper bound on the oscillation `sup f - inf f`.
    pub fn oscillation(&self) -> f64 {
        let (lo, hi) = self.range_enclosure();
        (hi - lo).next_up()
    }

    /// Modulus of continuity: `|f(x) - f(x')| <= modulus(delta)` whenever `|x - x'| <= delta`.
    pub fn modulus(&self, delta: f64) -> f64 {
        let raw = match self {
            FuncExpr::Distance => delta,
            FuncExpr::DistancePower(p) => *p as f64 * 0.5f64.powi(*p as i32 - 1) * delta,
            FuncExpr::Takagi(r) => series::u_modulus(*r, &FuncExpr::Distance, delta),
            FuncExpr::PolySpline(s) => s.slope * delta,
            FuncExpr::ThetaSplice(t) => t.spline.slope * delta,
            FuncExpr::AbsSin => PI * delta,
            FuncExpr::Sin2Pi => 2.0 * PI * delta,
            FuncExpr::Scale(a, c) => rational_to_f64(&a.abs()).next_up() * c.modulus(delta),
            FuncExpr::Sum(cs) => cs.iter().map(|c| c.modulus(delta)).sum(),
            FuncExpr::Dilate(m, c) => c.modulus(*m as f64 * delta),
            FuncExpr::USeries(r, psi) => series::u_modulus(*r, psi, delta),
        };
        raw.next_up().min(self.oscillation())
    }

    /// Exact piecewise-polynomial form on `[0, 1]`, when the tree has one.
    pub fn piecewise(&self) -> Option<PiecewisePoly> {
        let d = || {
            PiecewisePoly::new(
                vec![int(0), rat(1, 2), int(1)],
                vec![Poly::linear(int(0), int(1)), Poly::linear(int(1), int(-1))],
            )
        };
        match self {
            FuncExpr::Distance => Some(d()),
            FuncExpr::DistancePower(p) => {
                let base = d();
                Some(PiecewisePoly::new(base.knots.clone(), base.pieces.iter().map(|q| q.pow(*p)).collect()))
            }
            FuncExpr::PolySpline(s) => Some(s.piecewise()),
            FuncExpr::ThetaSplice(t) => Some(t.spline.piecewise()),
            FuncExpr::Scale(a, c) => c.piecewise().map(|p| p.scale(a)),
            FuncExpr::Sum(cs) => {
                let mut acc = PiecewisePoly::single(Poly::zero());
                for c in cs {
                    acc = acc.add(&c.piecewise()?);
                }
                Some(acc)
            }
            FuncExpr::Dilate(m, c) => c.piecewise().map(|p| p.dilate(*m)),
            FuncExpr::Takagi(_) | FuncExpr::USeries(..) | FuncExpr::AbsSin | FuncExpr::Sin2Pi => None,
        }
    }

    /// Short human-readable name.
    pub fn label(&self) -> String {
        self.to_string()
    }
}

/// Distance from `x` in `[0, 1)` to the nearest integer.
pub(crate) fn distance(x: &Rational) -> Rational {
    let other = Rational::one() - x;
    if *x <= other {
        x.clone()
    } else {
        other
    }
}

impl fmt::Display for FuncExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FuncExpr::Distance => write!(f, "d"),
            FuncExpr::DistancePower(p) => write!(f, "d^{p}"),
            FuncExpr::Takagi(r) => write!(f, "tau_{r}"),
            FuncExpr::PolySpline(s) => write!(f, "spline[{} pieces]", s.coeffs.len()),
            FuncExpr::AbsSin => write!(f, "|sin(pi x)|"),
            FuncExpr::Sin2Pi => write!(f, "sin(2 pi x)"),
            FuncExpr::ThetaSplice(t) => write!(f, "theta_{}", t.r),
            FuncExpr::Scale(a, c) => write!(f, "{}*{c}", crate::arith::format_rational(a)),
            FuncExpr::Sum(cs) => {
                write!(f, "(")?;
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        write!(f, " + ")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, ")")
            }
            FuncExpr::Dilate(m, c) => write!(f, "{c}∘({m}x)"),
            FuncExpr::USeries(r, psi) => write!(f, "U_{r}[{psi}]"),
        }
    }
}
