//! Univariate polynomials over the rationals and piecewise polynomials on `[0, 1]`.
//!
//! Sign questions (nonnegativity on an interval, concavity) are decided exactly
//! with Sturm sequences; range enclosures come from Bernstein coefficients.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::arith::{int, Rational};

/// Coefficients in ascending powers of `x`, without trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Poly::new(vec![c])
    }

    /// `a + b x`
    pub fn linear(a: Rational, b: Rational) -> Self {
        Poly::new(vec![a, b])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reported as 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    fn lead(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + crate::arith::rational_to_f64(c);
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * int(i as i64))
                .collect(),
        )
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        let zero = Rational::zero();
        Poly::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&zero) + o.coeffs.get(i).unwrap_or(&zero))
                .collect(),
        )
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.scale(&-Rational::one()))
    }

    pub fn scale(&self, a: &Rational) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c * a).collect())
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    pub fn pow(&self, p: u32) -> Poly {
        let mut acc = Poly::constant(Rational::one());
        for _ in 0..p {
            acc = acc.mul(self);
        }
        acc
    }

    /// `x -> self(a x + b)`
    pub fn compose_affine(&self, a: &Rational, b: &Rational) -> Poly {
        let inner = Poly::linear(b.clone(), a.clone());
        let mut acc = Poly::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(&inner).add(&Poly::constant(c.clone()));
        }
        acc
    }

    /// Remainder of Euclidean division by nonzero `d`.
    pub fn rem(&self, d: &Poly) -> Poly {
        assert!(!d.is_zero(), "division by zero polynomial");
        let mut r = self.clone();
        let dl = d.lead();
        while !r.is_zero() && r.degree() >= d.degree() {
            let shift = r.degree() - d.degree();
            let f = r.lead() / &dl;
            let mut sub = vec![Rational::zero(); shift];
            sub.extend(d.coeffs.iter().map(|c| c * &f));
            r = r.sub(&Poly::new(sub));
        }
        r
    }

    /// Exact quotient; `d` must divide `self`.
    fn div_exact(&self, d: &Poly) -> Poly {
        let mut r = self.clone();
        let dl = d.lead();
        let mut q = vec![Rational::zero(); self.degree().saturating_sub(d.degree()) + 1];
        while !r.is_zero() && r.degree() >= d.degree() {
            let shift = r.degree() - d.degree();
            let f = r.lead() / &dl;
            q[shift] = f.clone();
            let mut sub = vec![Rational::zero(); shift];
            sub.extend(d.coeffs.iter().map(|c| c * &f));
            r = r.sub(&Poly::new(sub));
        }
        debug_assert!(r.is_zero());
        Poly::new(q)
    }

    fn gcd(&self, o: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a
    }

    fn square_free(&self) -> Poly {
        let d = self.derivative();
        if d.is_zero() {
            return self.clone();
        }
        let g = self.gcd(&d);
        if g.degree() == 0 {
            self.clone()
        } else {
            self.div_exact(&g)
        }
    }

    /// Certified enclosure `[lo, hi]` of the range on `[a, b]` from Bernstein coefficients
    /// over `splits` equal subintervals.
    pub fn range_enclosure(&self, a: &Rational, b: &Rational, splits: u32) -> (Rational, Rational) {
        if self.is_zero() {
            return (Rational::zero(), Rational::zero());
        }
        let mut lo: Option<Rational> = None;
        let mut hi: Option<Rational> = None;
        let h = (b - a) / int(splits as i64);
        for s in 0..splits {
            let left = a + &h * int(s as i64);
            let local = self.compose_affine(&h, &left);
            for bc in bernstein(&local) {
                if lo.as_ref().is_none_or(|l| bc < *l) {
                    lo = Some(bc.clone());
                }
                if hi.as_ref().is_none_or(|u| bc > *u) {
                    hi = Some(bc);
                }
            }
        }
        (lo.unwrap(), hi.unwrap())
    }

    /// Returns a point of `[a, b]` where the polynomial is negative, or `None` if it is
    /// nonnegative on the whole closed interval. Exact.
    pub fn negative_witness(&self, a: &Rational, b: &Rational) -> Option<Rational> {
        if self.is_zero() {
            return None;
        }
        if self.eval(a).is_negative() {
            return Some(a.clone());
        }
        if self.eval(b).is_negative() {
            return Some(b.clone());
        }
        if a >= b {
            return None;
        }
        let sturm = SturmChain::new(&self.square_free());
        self.witness_in(&sturm, a, b)
    }

    // Assumes p(lo) >= 0 and p(hi) >= 0.
    fn witness_in(&self, sturm: &SturmChain, lo: &Rational, hi: &Rational) -> Option<Rational> {
        let open_roots = sturm.roots_open(lo, hi);
        let mid = (lo + hi) / int(2);
        if open_roots == 0 {
            return if self.eval(&mid).is_negative() { Some(mid) } else { None };
        }
        let (plo, phi) = (self.eval(lo), self.eval(hi));
        if open_roots == 1 && plo.is_positive() && phi.is_positive() {
            // A single distinct root with equal signs on both sides: even multiplicity.
            return None;
        }
        if self.eval(&mid).is_negative() {
            return Some(mid);
        }
        self.witness_in(sturm, lo, &mid)
            .or_else(|| self.witness_in(sturm, &mid, hi))
    }

    /// Distinct real roots in the open interval `(a, b)`.
    pub fn count_roots_open(&self, a: &Rational, b: &Rational) -> usize {
        if self.is_zero() {
            return usize::MAX;
        }
        SturmChain::new(&self.square_free()).roots_open(a, b)
    }
}

fn binomial(n: usize, k: usize) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Bernstein coefficients on `[0, 1]`.
fn bernstein(p: &Poly) -> Vec<Rational> {
    let d = p.degree();
    (0..=d)
        .map(|j| {
            (0..=j)
                .map(|i| {
                    let c = p.coeffs.get(i).cloned().unwrap_or_else(Rational::zero);
                    c * Rational::new(binomial(j, i), binomial(d, i))
                })
                .fold(Rational::zero(), |a, b| a + b)
        })
        .collect()
}

struct SturmChain {
    chain: Vec<Poly>,
}

impl SturmChain {
    // `p` must be square-free.
    fn new(p: &Poly) -> Self {
        let mut chain = vec![p.clone(), p.derivative()];
        while !chain.last().unwrap().is_zero() {
            let n = chain.len();
            let r = chain[n - 2].rem(&chain[n - 1]).scale(&-Rational::one());
            chain.push(r);
        }
        chain.pop();
        SturmChain { chain }
    }

    fn variations(&self, x: &Rational) -> usize {
        let mut last: Option<Ordering> = None;
        let mut count = 0;
        for p in &self.chain {
            let s = p.eval(x).cmp(&Rational::zero());
            if s == Ordering::Equal {
                continue;
            }
            if last.is_some_and(|l| l != s) {
                count += 1;
            }
            last = Some(s);
        }
        count
    }

    /// Roots in `(a, b)`. For square-free input `V(a) - V(b)` counts roots in `(a, b]`.
    fn roots_open(&self, a: &Rational, b: &Rational) -> usize {
        let half_open = self.variations(a) - self.variations(b);
        if self.chain[0].eval(b).is_zero() {
            half_open - 1
        } else {
            half_open
        }
    }
}

/// A continuous-or-not piecewise polynomial on `[0, 1]`; pieces are in the global variable.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewisePoly {
    /// `0 = knots[0] < ... < knots[m] = 1`
    pub knots: Vec<Rational>,
    pub pieces: Vec<Poly>,
}

impl PiecewisePoly {
    pub fn new(knots: Vec<Rational>, pieces: Vec<Poly>) -> Self {
        debug_assert_eq!(knots.len(), pieces.len() + 1);
        PiecewisePoly { knots, pieces }
    }

    pub fn single(p: Poly) -> Self {
        PiecewisePoly { knots: vec![Rational::zero(), Rational::one()], pieces: vec![p] }
    }

    /// Index of the piece containing `x` in `[0, 1]`; interior knots belong to the right piece.
    fn piece_index(&self, x: &Rational) -> usize {
        match self.knots[1..self.knots.len() - 1].binary_search(x) {
            Ok(i) => i + 1,
            Err(i) => i,
        }
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.pieces[self.piece_index(x)].eval(x)
    }

    pub fn scale(&self, a: &Rational) -> Self {
        PiecewisePoly { knots: self.knots.clone(), pieces: self.pieces.iter().map(|p| p.scale(a)).collect() }
    }

    fn refine(&self, knots: &[Rational]) -> Vec<Poly> {
        knots
            .windows(2)
            .map(|w| {
                let mid = (&w[0] + &w[1]) / int(2);
                self.pieces[self.piece_index(&mid)].clone()
            })
            .collect()
    }

    pub fn add(&self, o: &PiecewisePoly) -> Self {
        let mut knots: Vec<Rational> = self.knots.iter().chain(o.knots.iter()).cloned().collect();
        knots.sort();
        knots.dedup();
        let a = self.refine(&knots);
        let b = o.refine(&knots);
        let pieces = a.iter().zip(&b).map(|(p, q)| p.add(q)).collect();
        PiecewisePoly { knots, pieces }
    }

    /// `x -> self(m x mod 1)` on `[0, 1]`.
    pub fn dilate(&self, m: u32) -> Self {
        let mr = int(m as i64);
        let mut knots = vec![Rational::zero()];
        let mut pieces = Vec::new();
        for s in 0..m {
            let shift = int(s as i64);
            for (i, p) in self.pieces.iter().enumerate() {
                knots.push((&shift + &self.knots[i + 1]) / &mr);
                pieces.push(p.compose_affine(&mr, &-shift.clone()));
            }
        }
        PiecewisePoly { knots, pieces }
    }

    /// Certified range enclosure over `[0, 1]`.
    pub fn range_enclosure(&self) -> (Rational, Rational) {
        let mut lo: Option<Rational> = None;
        let mut hi: Option<Rational> = None;
        for (i, p) in self.pieces.iter().enumerate() {
            let (l, h) = p.range_enclosure(&self.knots[i], &self.knots[i + 1], 16);
            if lo.as_ref().is_none_or(|x| l < *x) {
                lo = Some(l);
            }
            if hi.as_ref().is_none_or(|x| h > *x) {
                hi = Some(h);
            }
        }
        (lo.unwrap(), hi.unwrap())
    }

    /// Largest `|p'|` bound over all pieces (certified, from Bernstein enclosures).
    pub fn slope_bound(&self) -> Rational {
        self.pieces
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let (l, h) = p.derivative().range_enclosure(&self.knots[i], &self.knots[i + 1], 16);
                l.abs().max(h.abs())
            })
            .max()
            .unwrap_or_else(Rational::zero)
    }

    /// A point of `[0, 1]` where the function is negative, if any. Exact.
    pub fn negative_witness(&self) -> Option<Rational> {
        self.pieces
            .iter()
            .enumerate()
            .find_map(|(i, p)| p.negative_witness(&self.knots[i], &self.knots[i + 1]))
    }

    /// Exact concavity test on `[0, 1]`: continuous, `p'' <= 0` on every piece and
    /// one-sided slopes non-increasing across each interior knot.
    pub fn is_concave(&self) -> bool {
        for (i, p) in self.pieces.iter().enumerate() {
            let neg_second = p.derivative().derivative().scale(&-Rational::one());
            if neg_second.negative_witness(&self.knots[i], &self.knots[i + 1]).is_some() {
                return false;
            }
        }
        for i in 1..self.pieces.len() {
            let k = &self.knots[i];
            let (left, right) = (&self.pieces[i - 1], &self.pieces[i]);
            if left.eval(k) != right.eval(k) {
                return false;
            }
            if right.derivative().eval(k) > left.derivative().eval(k) {
                return false;
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn p(cs: &[i64]) -> Poly {
        Poly::new(cs.iter().map(|&c| int(c)).collect())
    }

    #[test]
    fn eval_and_compose() {
        let q = p(&[1, 2, 3]); // 1 + 2x + 3x^2
        assert_eq!(q.eval(&rat(1, 2)), rat(11, 4));
        let shifted = q.compose_affine(&int(2), &int(-1)); // q(2x - 1)
        assert_eq!(shifted.eval(&rat(3, 4)), q.eval(&rat(1, 2)));
    }

    #[test]
    fn rem_and_gcd() {
        let a = p(&[-1, 0, 1]); // (x-1)(x+1)
        let b = p(&[-1, 1]);
        assert!(a.rem(&b).is_zero());
        let sq = p(&[1, -2, 1]).mul(&p(&[2, 1])); // (x-1)^2 (x+2)
        assert_eq!(sq.square_free().degree(), 2);
    }

    #[test]
    fn sturm_counts_roots() {
        // (x - 1/4)(x - 1/2)(x - 3/4)
        let q = Poly::linear(rat(-1, 4), int(1))
            .mul(&Poly::linear(rat(-1, 2), int(1)))
            .mul(&Poly::linear(rat(-3, 4), int(1)));
        assert_eq!(q.count_roots_open(&int(0), &int(1)), 3);
        assert_eq!(q.count_roots_open(&int(0), &rat(1, 2)), 1);
        assert_eq!(q.count_roots_open(&rat(1, 4), &rat(3, 4)), 1);
        // x^2 - 2 has one root in (1, 2)
        assert_eq!(p(&[-2, 0, 1]).count_roots_open(&int(1), &int(2)), 1);
    }

    #[test]
    fn nonnegativity_is_exact() {
        // (x - 1/3)^2 touches zero at an interior point.
        let touch = Poly::linear(rat(-1, 3), int(1)).pow(2);
        assert_eq!(touch.negative_witness(&int(0), &int(1)), None);
        // x^2 - 2 is negative on [0, 1].
        assert!(p(&[-2, 0, 1]).negative_witness(&int(0), &int(1)).is_some());
        // x^2 - x < 0 strictly inside (0, 1) but zero at the ends.
        let w = p(&[0, -1, 1]).negative_witness(&int(0), &int(1)).unwrap();
        assert!(p(&[0, -1, 1]).eval(&w) < int(0));
        // x^2 - 2x + 1 - 1/10^6 dips just below zero around 1.
        let dip = p(&[1, -2, 1]).sub(&Poly::constant(rat(1, 1_000_000)));
        assert!(dip.negative_witness(&rat(1, 2), &int(2)).is_some());
    }

    #[test]
    fn bernstein_enclosure_contains_range() {
        let q = p(&[0, 4, -4]); // 4x(1 - x), max 1 at 1/2
        let (lo, hi) = q.range_enclosure(&int(0), &int(1), 16);
        assert!(lo <= int(0));
        assert!(hi >= int(1));
        assert!(hi <= rat(11, 10));
    }

    #[test]
    fn piecewise_dilate_and_concavity() {
        let tent = PiecewisePoly::new(
            vec![int(0), rat(1, 2), int(1)],
            vec![p(&[0, 1]), p(&[1, -1])],
        );
        assert!(tent.is_concave());
        let d2 = tent.dilate(2);
        assert_eq!(d2.eval(&rat(1, 4)), rat(1, 2));
        assert_eq!(d2.eval(&rat(1, 2)), int(0));
        assert!(!d2.is_concave());
        let sum = tent.add(&d2.scale(&rat(1, 2)));
        assert_eq!(sum.eval(&rat(1, 4)), rat(1, 2));
        assert_eq!(sum.eval(&rat(1, 2)), rat(1, 2));
    }
}
