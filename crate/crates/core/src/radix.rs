//! Radix-r grids: the radix itself, points `(k + y) / r^n`, and admissible triplets.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::{format_rational, Rational};
use crate::error::{Error, Result};

/// An integer radix `r >= 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Radix(u32);

impl Radix {
    pub fn new(r: u32) -> Result<Self> {
        if r < 2 {
            return Err(Error::invalid(format!("radix must be >= 2, got {r}")));
        }
        Ok(Radix(r))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn as_big(self) -> BigInt {
        BigInt::from(self.0)
    }

    pub fn as_rational(self) -> Rational {
        Rational::from_integer(self.as_big())
    }

    pub fn pow(self, n: u32) -> BigInt {
        num_traits::pow(self.as_big(), n as usize)
    }

    pub fn pow_rational(self, n: u32) -> Rational {
        Rational::from_integer(self.pow(n))
    }

    /// `r^n` when it fits in a `u64`.
    pub fn pow_u64(self, n: u32) -> Option<u64> {
        (self.0 as u64).checked_pow(n)
    }

    /// `j / r^depth` for `j = 0..=r^depth`.
    pub fn grid(self, depth: u32) -> Vec<Rational> {
        let den = self.pow(depth);
        let count = den.to_u64().expect("grid too large");
        (0..=count)
            .map(|j| Rational::new(BigInt::from(j), den.clone()))
            .collect()
    }

    /// `j / r^depth` for `0 < j < r^depth`: the default interior sample set.
    pub fn interior_grid(self, depth: u32) -> Vec<Rational> {
        let mut g = self.grid(depth);
        g.pop();
        if !g.is_empty() {
            g.remove(0);
        }
        g
    }

    /// Whether `q` can be written as `j / r^N` for some `N >= 0`.
    pub fn is_radix_rational(self, q: &Rational) -> bool {
        self.depth_of(q).is_some()
    }

    /// Smallest `N` with `q * r^N` an integer, if any.
    pub fn depth_of(self, q: &Rational) -> Option<u32> {
        // Each round strips min(v_p(den), v_p(r)) from every prime p, so the
        // number of rounds is max_p ceil(v_p(den) / v_p(r)).
        let r = self.as_big();
        let mut den = q.denom().clone();
        let mut n = 0u32;
        while !den.is_one() {
            let g = den.gcd(&r);
            if g.is_one() {
                return None;
            }
            den /= &g;
            n += 1;
        }
        Some(n)
    }
}

impl fmt::Display for Radix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// The point `(k + y) / r^n` with its radix decomposition kept alongside.
#[derive(Debug, Clone)]
pub struct RadixPoint {
    pub r: Radix,
    pub n: u32,
    pub k: BigInt,
    pub y: Rational,
}

impl RadixPoint {
    pub fn new(r: Radix, n: u32, k: BigInt, y: Rational) -> Result<Self> {
        if k.is_negative() || k >= r.pow(n) {
            return Err(Error::invalid(format!("k = {k} outside [0, {r}^{n} - 1]")));
        }
        if y.is_negative() || y > Rational::one() {
            return Err(Error::invalid(format!("y = {} outside [0, 1]", format_rational(&y))));
        }
        Ok(RadixPoint { r, n, k, y })
    }

    /// Decomposes a radix rational `x` in `[0, 1]` as `(k + 0) / r^N` at its minimal depth.
    /// The right endpoint 1 is stored as `(0 + 1) / r^0`.
    pub fn from_rational(r: Radix, x: &Rational) -> Result<Self> {
        if x.is_negative() || *x > Rational::one() {
            return Err(Error::invalid(format!("{} outside [0, 1]", format_rational(x))));
        }
        if x.is_one() {
            return Ok(RadixPoint { r, n: 0, k: BigInt::zero(), y: Rational::one() });
        }
        let n = r
            .depth_of(x)
            .ok_or_else(|| Error::invalid(format!("{} is not a radix-{r} rational", format_rational(x))))?;
        let k = (x * r.pow_rational(n)).to_integer();
        Ok(RadixPoint { r, n, k, y: Rational::zero() })
    }

    pub fn value(&self) -> Rational {
        (Rational::from_integer(self.k.clone()) + &self.y) / self.r.pow_rational(self.n)
    }

    /// Depth `N` at which the value is `j / r^N`, if radix-rational.
    pub fn radix_depth(&self) -> Option<u32> {
        self.r.depth_of(&self.value())
    }
}

impl PartialEq for RadixPoint {
    fn eq(&self, other: &Self) -> bool {
        self.value() == other.value()
    }
}

impl Eq for RadixPoint {}

/// An admissible triplet `(n, k, y)`: `k` in `0..r^n`, `y` strictly inside `(0, 1)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triplet {
    pub n: u32,
    pub k: u64,
    pub y: Rational,
}

impl Triplet {
    pub fn new(r: Radix, n: u32, k: u64, y: Rational) -> Result<Self> {
        check_open_unit(&y)?;
        match r.pow_u64(n) {
            Some(rn) if k < rn => Ok(Triplet { n, k, y }),
            _ => Err(Error::invalid(format!("k = {k} outside [0, {r}^{n} - 1]"))),
        }
    }

    pub fn left(&self, r: Radix) -> Rational {
        Rational::new(BigInt::from(self.k), r.pow(self.n))
    }

    pub fn mid(&self, r: Radix) -> Rational {
        (Rational::from_integer(BigInt::from(self.k)) + &self.y) / r.pow_rational(self.n)
    }

    pub fn right(&self, r: Radix) -> Rational {
        Rational::new(BigInt::from(self.k + 1), r.pow(self.n))
    }
}

impl fmt::Display for Triplet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.n, self.k, format_rational(&self.y))
    }
}

impl Serialize for Triplet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Triplet", 3)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("k", &self.k)?;
        st.serialize_field("y", &format_rational(&self.y))?;
        st.end()
    }
}

pub(crate) fn check_open_unit(y: &Rational) -> Result<()> {
    if y.is_positive() && *y < Rational::one() {
        Ok(())
    } else {
        Err(Error::invalid(format!("y = {} must lie strictly inside (0, 1)", format_rational(y))))
    }
}

/// Number of triplets `enumerate_triplets` would yield.
pub fn triplet_count(r: Radix, n_max: u32, y_count: usize) -> u128 {
    let mut total: u128 = 0;
    let mut rn: u128 = 1;
    for _ in 0..=n_max {
        total = total.saturating_add(rn.saturating_mul(y_count as u128));
        rn = rn.saturating_mul(r.get() as u128);
    }
    total
}

/// All triplets with `n <= n_max`, `k < r^n`, `y` from `y_set`, in lexicographic `(n, k, y)` order.
pub fn enumerate_triplets(r: Radix, n_max: u32, y_set: &[Rational]) -> Result<impl Iterator<Item = Triplet>> {
    for y in y_set {
        check_open_unit(y)?;
    }
    if r.pow_u64(n_max).is_none() {
        return Err(Error::ResourceLimit { needed: u128::MAX, cap: u64::MAX });
    }
    let mut ys = y_set.to_vec();
    ys.sort();
    ys.dedup();
    Ok((0..=n_max).flat_map(move |n| {
        let rn = r.pow_u64(n).unwrap();
        let ys = ys.clone();
        (0..rn).flat_map(move |k| {
            ys.clone().into_iter().map(move |y| Triplet { n, k, y })
        })
    }))
}
