//! Independent oracles for integration tests: literal finite sums and difference formulas
//! written without the library's evaluation paths.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_traits::{One, Zero};
use pathfn::arith::{frac, int};
use pathfn::Rational;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Distance to the nearest integer.
pub fn dist(x: &Rational) -> Rational {
    let f = frac(x);
    let g = Rational::one() - &f;
    if f < g {
        f
    } else {
        g
    }
}

/// `sum_j r^-j psi(r^j x)` for a radix rational `x`, stopping once `r^j x` is an integer.
pub fn u_finite(r: u32, psi: &dyn Fn(&Rational) -> Rational, x: &Rational) -> Rational {
    let rr = int(r as i64);
    let mut y = frac(x);
    let mut w = Rational::one();
    let mut sum = Rational::zero();
    let mut guard = 0;
    while !y.is_zero() {
        sum += &w * psi(&y);
        y = frac(&(&y * &rr));
        w /= &rr;
        guard += 1;
        assert!(guard < 10_000, "not a radix rational");
    }
    sum
}

pub fn takagi(r: u32, x: &Rational) -> Rational {
    u_finite(r, &dist, x)
}

/// `2 r^(2n) [ (f_R - f_M) / (1 - y) - (f_M - f_L) / y ]`, expanded from the one-sided
/// difference quotients.
pub fn second_diff(f: &dyn Fn(&Rational) -> Rational, r: u32, n: u32, k: u64, y: &Rational) -> Rational {
    let rn = Rational::from_integer(num_traits::pow(BigInt::from(r), n as usize));
    let l = Rational::from_integer(BigInt::from(k)) / &rn;
    let m = (Rational::from_integer(BigInt::from(k)) + y) / &rn;
    let rt = Rational::from_integer(BigInt::from(k + 1)) / &rn;
    let (fl, fm, fr) = (f(&l), f(&m), f(&rt));
    int(2) * &rn * &rn * ((&fr - &fm) / (Rational::one() - y) - (&fm - &fl) / y)
}

/// `j / r^d` with `d` uniform in `0..=max_depth`, `j` uniform in `0..=r^d`.
pub fn radix_point(g: &mut ChaCha8Rng, r: u32, max_depth: u32) -> Rational {
    let d = g.gen_range(0..=max_depth);
    let den = (r as u64).pow(d);
    let j = g.gen_range(0..=den);
    Rational::new(BigInt::from(j), BigInt::from(den))
}

/// `p / q` strictly inside `(0, 1)` with `q <= max_den`.
pub fn open_unit(g: &mut ChaCha8Rng, max_den: i64) -> Rational {
    let q = g.gen_range(2..=max_den);
    let p = g.gen_range(1..q);
    Rational::new(BigInt::from(p), BigInt::from(q))
}
