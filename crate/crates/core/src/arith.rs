//! Arithmetic modes: exact rationals and floats carrying a certified error bound.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"p/q"`, `"p"` or a finite decimal such as `"-0.125"`, exactly.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::invalid(format!("not a rational literal: {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(Error::invalid(format!("zero denominator in {s:?}")));
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((ip, fp)) = s.split_once('.') {
        if fp.is_empty() || !fp.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = ip.starts_with('-');
        let ip = ip.trim_start_matches(['-', '+']);
        if !ip.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let digits: BigInt = format!("{ip}{fp}").parse().map_err(|_| bad())?;
        let den = num_traits::pow(BigInt::from(10), fp.len());
        let q = Rational::new(digits, den);
        return Ok(if neg { -q } else { q });
    }
    let p: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(p))
}

/// `"p/q"` in lowest terms, or `"p"` for integers.
pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// `x - floor(x)`, in `[0, 1)`.
pub fn frac(x: &Rational) -> Rational {
    x - x.floor()
}

/// Nearest `f64` to `q` (saturating for huge magnitudes).
pub fn rational_to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        if q.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// One ulp of slack at `v`.
#[inline]
pub(crate) fn ulp(v: f64) -> f64 {
    let a = v.abs();
    a.next_up() - a
}

/// `a + b` rounded towards `+inf`, for accumulating error bounds.
#[inline]
pub(crate) fn add_up(a: f64, b: f64) -> f64 {
    (a + b).next_up()
}

#[inline]
pub(crate) fn mul_up(a: f64, b: f64) -> f64 {
    (a * b).next_up()
}

/// A 64-bit value `value` and a bound `err >= 0` with `|true - value| <= err`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Approx {
    pub value: f64,
    pub err: f64,
}

impl Approx {
    pub fn new(value: f64, err: f64) -> Self {
        debug_assert!(err >= 0.0 || err.is_nan());
        Approx { value, err }
    }

    /// A value known exactly.
    pub fn exact(value: f64) -> Self {
        Approx { value, err: 0.0 }
    }

    pub fn from_rational(q: &Rational) -> Self {
        let v = rational_to_f64(q);
        Approx { value: v, err: ulp(v) }
    }

    pub fn lo(&self) -> f64 {
        (self.value - self.err).next_down()
    }

    pub fn hi(&self) -> f64 {
        (self.value + self.err).next_up()
    }

    /// Whether the exact value `q` lies within the enclosure.
    pub fn contains(&self, q: &Rational) -> bool {
        let v = rational_to_f64(q);
        self.lo() <= v && v <= self.hi()
    }

    pub fn abs(self) -> Self {
        Approx { value: self.value.abs(), err: self.err }
    }

    /// Adds `extra` to the error bound.
    pub fn widen(self, extra: f64) -> Self {
        Approx { value: self.value, err: add_up(self.err, extra) }
    }

    /// Reduces modulo 1 into `[0, 1)`. The subtraction is exact in binary floating point.
    pub fn frac(self) -> Self {
        let f = self.value - self.value.floor();
        // `floor` can round x - floor(x) up to 1.0 for tiny negative x.
        let f = if f >= 1.0 { 0.0 } else { f };
        Approx { value: f, err: self.err }
    }

    pub fn scale_int(self, m: u32) -> Self {
        let v = self.value * m as f64;
        Approx { value: v, err: add_up(mul_up(self.err, m as f64), ulp(v)) }
    }
}

impl Add for Approx {
    type Output = Approx;
    fn add(self, o: Approx) -> Approx {
        let v = self.value + o.value;
        Approx { value: v, err: add_up(add_up(self.err, o.err), ulp(v)) }
    }
}

impl Sub for Approx {
    type Output = Approx;
    fn sub(self, o: Approx) -> Approx {
        let v = self.value - o.value;
        Approx { value: v, err: add_up(add_up(self.err, o.err), ulp(v)) }
    }
}

impl Neg for Approx {
    type Output = Approx;
    fn neg(self) -> Approx {
        Approx { value: -self.value, err: self.err }
    }
}

impl Mul for Approx {
    type Output = Approx;
    fn mul(self, o: Approx) -> Approx {
        let v = self.value * o.value;
        let prop = add_up(
            add_up(mul_up(self.value.abs(), o.err), mul_up(o.value.abs(), self.err)),
            mul_up(self.err, o.err),
        );
        Approx { value: v, err: add_up(prop, ulp(v)) }
    }
}

impl Div for Approx {
    type Output = Approx;
    fn div(self, o: Approx) -> Approx {
        let v = self.value / o.value;
        let b = o.value.abs();
        if b <= o.err {
            return Approx { value: v, err: f64::INFINITY };
        }
        // |a/b - (a+da)/(b+db)| <= (|a| eb + |b| ea) / (|b| (|b| - eb))
        let num = add_up(mul_up(self.value.abs(), o.err), mul_up(b, self.err));
        let den = (b * (b - o.err).next_down()).next_down();
        let prop = (num / den).next_up();
        Approx { value: v, err: add_up(prop, ulp(v)) }
    }
}

impl fmt::Display for Approx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ± {:.3e}", self.value, self.err)
    }
}

/// Evaluation mode requested by a query.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum Mode {
    Exact,
    Float { tol: f64 },
}

impl Mode {
    pub const DEFAULT_TOL: f64 = 1e-8;

    pub fn float() -> Self {
        Mode::Float { tol: Self::DEFAULT_TOL }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Float { .. } => "float",
        }
    }

    /// Lifts an exact rational into this mode.
    pub fn lift(&self, q: &Rational) -> Scalar {
        match self {
            Mode::Exact => Scalar::Exact(q.clone()),
            Mode::Float { .. } => Scalar::Float(Approx::from_rational(q)),
        }
    }
}

/// A number in either arithmetic mode. Mixed operations promote to float.
#[derive(Debug, Clone, PartialEq)]
pub enum Scalar {
    Exact(Rational),
    Float(Approx),
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Exact(Rational::zero())
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&Rational> {
        match self {
            Scalar::Exact(q) => Some(q),
            Scalar::Float(_) => None,
        }
    }

    pub fn to_approx(&self) -> Approx {
        match self {
            Scalar::Exact(q) => Approx::from_rational(q),
            Scalar::Float(a) => *a,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(q) => rational_to_f64(q),
            Scalar::Float(a) => a.value,
        }
    }

    pub fn error_bound(&self) -> f64 {
        match self {
            Scalar::Exact(_) => 0.0,
            Scalar::Float(a) => a.err,
        }
    }

    /// Certified comparison: `None` when the enclosures overlap.
    pub fn certified_cmp(&self, other: &Scalar) -> Option<Ordering> {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Some(a.cmp(b)),
            _ => {
                let a = self.to_approx();
                let b = other.to_approx();
                if a.hi() < b.lo() {
                    Some(Ordering::Less)
                } else if a.lo() > b.hi() {
                    Some(Ordering::Greater)
                } else if a.err == 0.0 && b.err == 0.0 && a.value == b.value {
                    Some(Ordering::Equal)
                } else {
                    None
                }
            }
        }
    }

    /// Ordering by central value only, exact where both sides are exact.
    pub fn value_cmp(&self, other: &Scalar) -> Ordering {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a.cmp(b),
            _ => self.to_f64().total_cmp(&other.to_f64()),
        }
    }

    pub fn abs(&self) -> Scalar {
        match self {
            Scalar::Exact(q) => Scalar::Exact(q.abs()),
            Scalar::Float(a) => Scalar::Float(a.abs()),
        }
    }
}

impl From<Rational> for Scalar {
    fn from(q: Rational) -> Self {
        Scalar::Exact(q)
    }
}

impl From<Approx> for Scalar {
    fn from(a: Approx) -> Self {
        Scalar::Float(a)
    }
}

macro_rules! scalar_binop {
    ($trait:ident, $method:ident) => {
        impl<'a> $trait<&'a Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $method(self, o: &'a Scalar) -> Scalar {
                match (self, o) {
                    (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a.$method(b)),
                    _ => Scalar::Float(self.to_approx().$method(o.to_approx())),
                }
            }
        }
        impl $trait for Scalar {
            type Output = Scalar;
            fn $method(self, o: Scalar) -> Scalar {
                (&self).$method(&o)
            }
        }
    };
}

scalar_binop!(Add, add);
scalar_binop!(Sub, sub);
scalar_binop!(Mul, mul);
scalar_binop!(Div, div);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(q) => Scalar::Exact(-q),
            Scalar::Float(a) => Scalar::Float(-a),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(q) => f.write_str(&format_rational(q)),
            Scalar::Float(a) => write!(f, "{a}"),
        }
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        match self {
            Scalar::Exact(q) => s.serialize_str(&format_rational(q)),
            Scalar::Float(a) => {
                let mut st = s.serialize_struct("Approx", 2)?;
                st.serialize_field("value", &a.value)?;
                st.serialize_field("error_bound", &a.err)?;
                st.end()
            }
        }
    }
}

/// Serializes a rational as a `"p/q"` string.
pub fn serialize_rational<S: Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(q))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_literals() {
        assert_eq!(parse_rational("1/4").unwrap(), rat(1, 4));
        assert_eq!(parse_rational("-6/8").unwrap(), rat(-3, 4));
        assert_eq!(parse_rational("7").unwrap(), int(7));
        assert_eq!(parse_rational("0.125").unwrap(), rat(1, 8));
        assert_eq!(parse_rational("-1.5").unwrap(), rat(-3, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1.").is_err());
    }

    #[test]
    fn formats_lowest_terms() {
        assert_eq!(format_rational(&rat(2, 4)), "1/2");
        assert_eq!(format_rational(&rat(0, 5)), "0");
        assert_eq!(format_rational(&rat(-6, 3)), "-2");
    }

    #[test]
    fn frac_of_negative() {
        assert_eq!(frac(&rat(-1, 4)), rat(3, 4));
        assert_eq!(frac(&rat(9, 4)), rat(1, 4));
    }

    #[test]
    fn approx_division_by_uncertain_zero_is_unbounded() {
        let a = Approx::exact(1.0);
        let b = Approx::new(1e-20, 1e-19);
        assert!((a / b).err.is_infinite());
    }

    #[test]
    fn approx_ops_enclose_rational_result() {
        let x = rat(1, 3);
        let y = rat(2, 7);
        let ax = Approx::from_rational(&x);
        let ay = Approx::from_rational(&y);
        assert!((ax + ay).contains(&(&x + &y)));
        assert!((ax - ay).contains(&(&x - &y)));
        assert!((ax * ay).contains(&(&x * &y)));
        assert!((ax / ay).contains(&(&x / &y)));
    }

    #[test]
    fn certified_cmp_reports_overlap() {
        let a = Scalar::Float(Approx::new(1.0, 0.1));
        let b = Scalar::Float(Approx::new(1.05, 0.1));
        assert_eq!(a.certified_cmp(&b), None);
        let c = Scalar::Exact(int(2));
        assert_eq!(a.certified_cmp(&c), Some(Ordering::Less));
    }

    #[test]
    fn scalar_serializes_by_mode() {
        let e = serde_json::to_string(&Scalar::Exact(rat(3, 8))).unwrap();
        assert_eq!(e, "\"3/8\"");
        let f = serde_json::to_string(&Scalar::Float(Approx::new(0.5, 0.0))).unwrap();
        assert_eq!(f, r#"{"value":0.5,"error_bound":0.0}"#);
    }
}
