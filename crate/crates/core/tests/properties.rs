mod common;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use rand::Rng;
use rayon::prelude::*;

use pathfn::arith::{int, rat, Approx};
use pathfn::differences::{
    central_second_diff, differences, fundamental_bound_check, membership_scan, MembershipQuery, PeriodicFn, Verdict,
};
use pathfn::flow::{flow_grid, parabola_eval, FlowQuery, PiecewiseQuadratic};
use pathfn::series::{identity_residual, SeriesFunc};
use pathfn::{parse_func_spec, FuncExpr, Mode, Radix, Rational, Scalar, Triplet};

fn rx(r: u32) -> Radix {
    Radix::new(r).unwrap()
}

fn exact_builtins() -> Vec<FuncExpr> {
    vec![
        FuncExpr::Distance,
        FuncExpr::DistancePower(2),
        FuncExpr::DistancePower(3),
        FuncExpr::takagi(2).unwrap(),
        FuncExpr::takagi(3).unwrap(),
        FuncExpr::theta(2).unwrap(),
        FuncExpr::theta(3).unwrap(),
        FuncExpr::psi0(int(1), int(1)),
        FuncExpr::u_series(2, FuncExpr::psi0(int(1), int(1))).unwrap(),
    ]
}

fn any_rational(max_den: i64) -> impl Strategy<Value = Rational> {
    (-3 * max_den..=3 * max_den, 1..=max_den).prop_map(|(p, q)| rat(p, q))
}

fn radix_rational(r: u32, depth: u32) -> impl Strategy<Value = Rational> {
    (0..=depth).prop_flat_map(move |d| {
        let den = (r as i64).pow(d);
        (0..=den).prop_map(move |j| rat(j, den))
    })
}

fn triplet(r: u32, n_max: u32, y_depth: u32) -> impl Strategy<Value = Triplet> {
    (0..=n_max, 1..=y_depth).prop_flat_map(move |(n, m)| {
        let rn = (r as u64).pow(n);
        let den = (r as i64).pow(m);
        (0..rn, 1..den).prop_map(move |(k, j)| Triplet::new(rx(r), n, k, rat(j, den)).unwrap())
    })
}

fn exact(s: Scalar) -> Rational {
    s.as_exact().expect("exact").clone()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn periodic_and_vanishing_at_zero(x in any_rational(64), i in 0usize..9) {
        let f = &exact_builtins()[i];
        prop_assert_eq!(f.eval_exact(&x).unwrap(), f.eval_exact(&(&x + int(1))).unwrap());
        prop_assert!(f.eval_exact(&int(0)).unwrap().is_zero());
        prop_assert!(f.eval_f64(0.0).contains(&Rational::zero()));
    }

    #[test]
    fn distance_is_symmetric(x in any_rational(1000)) {
        let f = FuncExpr::Distance;
        prop_assert_eq!(f.eval_exact(&x).unwrap(), f.eval_exact(&(int(1) - &x)).unwrap());
    }

    #[test]
    fn series_approx_is_coherent(x in radix_rational(2, 20), terms in 1usize..50, i in 0usize..3) {
        let psi = [FuncExpr::Distance, FuncExpr::psi0(int(1), int(1)), FuncExpr::theta(2).unwrap()][i].clone();
        let s = SeriesFunc::new(rx(2), psi);
        let a = s.u_eval_approx(pathfn::arith::rational_to_f64(&x), terms).unwrap();
        prop_assert!(a.contains(&s.eval_exact(&x).unwrap()), "{} at {}", a, x);
    }

    #[test]
    fn identity_residual_vanishes(t in triplet(3, 4, 3), i in 0usize..4) {
        let psi = [
            FuncExpr::Distance,
            FuncExpr::DistancePower(2),
            FuncExpr::psi0(rat(1, 2), int(3)),
            FuncExpr::theta(3).unwrap(),
        ][i].clone();
        let s = SeriesFunc::new(rx(3), psi);
        prop_assert!(s.u_delta_identity_residual(&t).unwrap().is_zero());
    }

    #[test]
    fn second_diff_matches_literal_formula(t in triplet(2, 6, 5)) {
        let d = exact(central_second_diff(&FuncExpr::takagi(2).unwrap(), rx(2), &t, Mode::Exact).unwrap());
        let oracle = common::second_diff(&|x| common::takagi(2, x), 2, t.n, t.k, &t.y);
        prop_assert_eq!(d, oracle);
    }

    #[test]
    fn consistency_and_closed_form(t in triplet(3, 3, 3), i in 0usize..9) {
        let f = &exact_builtins()[i];
        let d = differences(f, rx(3), &t, Mode::Exact).unwrap();
        let rn = rx(3).pow_rational(t.n);
        prop_assert_eq!(exact(d.second.clone()), int(2) * rn * (exact(d.forward) - exact(d.backward)));
        let zero = Triplet::new(rx(3), 0, 0, t.y.clone()).unwrap();
        let d0 = exact(central_second_diff(f, rx(3), &zero, Mode::Exact).unwrap());
        let fy = f.eval_exact(&t.y).unwrap();
        prop_assert!((d0 * &t.y * (Rational::one() - &t.y) + int(2) * fy).is_zero());
    }

    #[test]
    fn scale_equivariance(t in triplet(2, 5, 4), p in -20i64..20, q in 1i64..20) {
        let a = rat(p, q);
        let tau = FuncExpr::takagi(2).unwrap();
        let scaled = FuncExpr::scale(a.clone(), tau.clone());
        let lhs = exact(central_second_diff(&scaled, rx(2), &t, Mode::Exact).unwrap());
        let rhs = a * exact(central_second_diff(&tau, rx(2), &t, Mode::Exact).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn concave_functions_have_nonpositive_differences(t in triplet(2, 6, 5)) {
        let cap = parse_func_spec(r#"{"kind":"spline","knots":["0","1"],"coeffs":[["0","1","-1"]]}"#).unwrap();
        prop_assert!(cap.piecewise().unwrap().is_concave());
        for f in [FuncExpr::Distance, cap] {
            let d = exact(central_second_diff(&f, rx(2), &t, Mode::Exact).unwrap());
            prop_assert!(!d.is_positive());
        }
    }

    #[test]
    fn envelope_is_pointwise_minimum(x in radix_rational(2, 10), tp in 1i64..40, tq in 1i64..16) {
        let t = rat(tp, tq);
        let tau = FuncExpr::takagi(2).unwrap();
        let q = FlowQuery::new(t.clone(), rx(2), int(2)).unwrap();
        let n = q.depth().unwrap();
        let pq = flow_grid(&tau, &q).unwrap();
        let den = 1i64 << n;
        let direct = (0..=den)
            .map(|k| exact(parabola_eval(&tau, &t, &x, &rat(k, den), Mode::Exact).unwrap()))
            .min()
            .unwrap();
        let h = exact(pq.eval(&x).unwrap());
        prop_assert_eq!(&h, &direct);
        prop_assert!(h <= tau.eval_exact(&x).unwrap());
    }

    #[test]
    fn flow_is_nonincreasing_in_t(x in radix_rational(2, 10), a in 1i64..20, b in 1i64..20) {
        let (t1, t2) = if a <= b { (rat(a, 8), rat(b, 8)) } else { (rat(b, 8), rat(a, 8)) };
        let f = FuncExpr::u_series(2, FuncExpr::psi0(int(1), int(1))).unwrap();
        let n = 6;
        let h = |t: &Rational| {
            let pq = flow_grid(&f, &FlowQuery::new(t.clone(), rx(2), int(1)).unwrap().with_n(n)).unwrap();
            exact(pq.eval(&x).unwrap())
        };
        prop_assert!(h(&t2) <= h(&t1));
    }

    #[test]
    fn shifted_envelope_is_concave_and_piecewise_affine(tp in 1i64..40, tq in 1i64..16) {
        let t = rat(tp, tq);
        let tau = FuncExpr::takagi(2).unwrap();
        let pq = flow_grid(&tau, &FlowQuery::new(t.clone(), rx(2), int(2)).unwrap()).unwrap();
        let g = |x: &Rational| exact(pq.eval(x).unwrap()) - x * x / (int(2) * &t);
        let grid: Vec<Rational> = rx(2).grid(7);
        for w in grid.windows(3) {
            prop_assert!(!(g(&w[0]) - int(2) * g(&w[1]) + g(&w[2])).is_positive());
        }
        for p in &pq.pieces {
            let (lo, hi) = (exact(p.x_lo.clone()), exact(p.x_hi.clone()));
            let mid = (&lo + &hi) / int(2);
            prop_assert_eq!(g(&mid) * int(2), g(&lo) + g(&hi));
        }
    }

    #[test]
    fn envelope_json_round_trips(tp in 1i64..40, tq in 1i64..16) {
        let tau = FuncExpr::takagi(2).unwrap();
        let pq = flow_grid(&tau, &FlowQuery::new(rat(tp, tq), rx(2), int(2)).unwrap()).unwrap();
        let text = serde_json::to_string(&pq.to_json()).unwrap();
        let back = PiecewiseQuadratic::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        prop_assert_eq!(back, pq);
    }
}

fn func_tree() -> impl Strategy<Value = FuncExpr> {
    let leaf = prop_oneof![
        Just(FuncExpr::Distance),
        (1u32..5).prop_map(FuncExpr::DistancePower),
        (2u32..6).prop_map(|r| FuncExpr::takagi(r).unwrap()),
        (2u32..5).prop_map(|r| FuncExpr::theta(r).unwrap()),
        Just(FuncExpr::AbsSin),
        Just(FuncExpr::Sin2Pi),
    ];
    leaf.prop_recursive(3, 12, 3, |inner| {
        prop_oneof![
            (-9i64..9, 1i64..9, inner.clone()).prop_map(|(p, q, c)| FuncExpr::scale(rat(p, q), c)),
            proptest::collection::vec(inner.clone(), 1..3).prop_map(FuncExpr::Sum),
            (1u32..4, inner.clone()).prop_map(|(m, c)| FuncExpr::dilate(m, c).unwrap()),
            (2u32..4, inner).prop_map(|(r, c)| FuncExpr::u_series(r, c).unwrap()),
        ]
    })
}

proptest! {
    #[test]
    fn func_spec_round_trips(f in func_tree()) {
        let text = serde_json::to_string_pretty(&f.to_json()).unwrap();
        prop_assert_eq!(parse_func_spec(&text).unwrap(), f);
    }
}

#[test]
fn float_enclosures_contain_exact_values() {
    let fs = exact_builtins();
    let mut g = common::rng(11);
    let points: Vec<Rational> = (0..100_000)
        .map(|_| {
            let q: i64 = g.gen_range(1..=2000);
            let p: i64 = g.gen_range(0..=q);
            rat(p, q)
        })
        .collect();
    let checked: usize = points
        .par_iter()
        .enumerate()
        .map(|(i, x)| {
            let f = &fs[i % fs.len()];
            let a = f.eval_approx(Approx::from_rational(x));
            let v = f.eval_exact(x).unwrap();
            assert!(a.contains(&v), "{f} at {x}: {a} misses {}", pathfn::arith::format_rational(&v));
            1
        })
        .sum();
    assert_eq!(checked, 100_000);
}

#[test]
fn series_coherence_over_many_radix_points() {
    let mut g = common::rng(12);
    for r in [2u32, 3] {
        let s = SeriesFunc::new(rx(r), FuncExpr::Distance);
        for _ in 0..5_000 {
            let x = common::radix_point(&mut g, r, 20);
            let terms = g.gen_range(1..=45);
            let a = s.u_eval_approx(pathfn::arith::rational_to_f64(&x), terms).unwrap();
            assert!(a.contains(&s.eval_exact(&x).unwrap()), "r={r}, x={x}, J={terms}: {a}");
        }
    }
}

#[test]
fn lower_bound_chain_and_shortcuts() {
    for r in [2u32, 3, 4] {
        let tau = FuncExpr::takagi(r).unwrap();
        let rr = r as i64;
        let c = rat(2 * rr, rr - 1) * rat(1, 2);
        let ys = rx(r).interior_grid(3);
        let q = MembershipQuery::new(c.clone(), rx(r), 3, ys.clone()).unwrap();
        let rep = membership_scan(&tau, &q).unwrap();
        assert_eq!(rep.verdict, Verdict::Pass, "r={r}");
        let fb = fundamental_bound_check(&tau, &c, &ys, Mode::Exact).unwrap();
        assert_eq!(fb.verdict, Verdict::Pass);
        for x in rx(r).grid(5) {
            assert!(&c * &x * (Rational::one() - &x) <= tau.eval_exact(&x).unwrap());
        }
    }
}

#[test]
fn series_of_a_class_member_stays_in_the_class() {
    // tau_2 has c = 2, which only yields m = c/2 = 1 in the lower bound m d <= psi,
    // hence U_{tau_2} in P with c' = c r / (2 (r - 1)) = 2.
    let u_tau = FuncExpr::u_series(2, FuncExpr::takagi(2).unwrap()).unwrap();
    let q = MembershipQuery::new(int(2), rx(2), 5, rx(2).interior_grid(4)).unwrap();
    assert_eq!(membership_scan(&u_tau, &q).unwrap().verdict, Verdict::Pass);
    // c' = c r / (r - 1) = 4 fails already at n = 0: U_{tau_2}(1/2) = 1/2 < 4 / 4.
    assert_eq!(u_tau.eval_exact(&rat(1, 2)).unwrap(), rat(1, 2));
    let q = MembershipQuery::new(int(4), rx(2), 5, rx(2).interior_grid(4)).unwrap();
    let rep = membership_scan(&u_tau, &q).unwrap();
    assert_eq!(rep.verdict, Verdict::Fail);
    assert_eq!(rep.first_violation.unwrap().n, 0);
    let tau = FuncExpr::takagi(2).unwrap();
    assert!(int(2) * tau.eval_exact(&rat(1, 2)).unwrap() > tau.eval_exact(&rat(1, 2)).unwrap());
}

struct Corrupted(SeriesFunc);

impl PeriodicFn for Corrupted {
    fn value(&self, x: &Rational, mode: Mode) -> pathfn::Result<Scalar> {
        let v = self.0.value(x, mode)?;
        if *x == rat(3, 8) {
            Ok(&v + &Scalar::Exact(rat(1, 1024)))
        } else {
            Ok(v)
        }
    }
}

#[test]
fn identity_detects_a_corrupted_evaluator() {
    let s = SeriesFunc::new(rx(2), FuncExpr::Distance);
    let bad = Corrupted(s.clone());
    let rep = pathfn::series::identity_scan(&bad, s.psi(), rx(2), 4, &rx(2).interior_grid(3), u64::MAX).unwrap();
    assert_eq!(rep.verdict, Verdict::Fail);
    let t = rep.offending.unwrap();
    assert!(!identity_residual(&bad, s.psi(), rx(2), &t).unwrap().is_zero());
    let _ = BigInt::zero();
}
