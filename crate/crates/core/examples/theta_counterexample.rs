//! The theta splice is C^2, so its second differences are bounded above, but it vanishes
//! to second order at 0: `m d <= theta` fails for every `m > 0` and `U_theta` is in no class.
//!
//! ```bash
//! cargo run --example theta_counterexample
//! ```

use pathfn::arith::{format_rational, rat};
use pathfn::differences::{central_second_diff, membership_scan, semiconcavity_scan, MembershipQuery, DEFAULT_CAP};
use pathfn::series::{check_sufficient_conditions, ScanParams, SeriesFunc, SufficientVerdict};
use pathfn::radix::Triplet;
use pathfn::{FuncExpr, Mode, Radix};

fn main() -> pathfn::Result<()> {
    let r = Radix::new(2)?;
    let theta = FuncExpr::theta(2)?;
    let rep = semiconcavity_scan(&theta, &rat(0, 1), r, 6, &r.interior_grid(3), Mode::Exact, DEFAULT_CAP)?;
    println!("largest Delta(theta) over {} triplets: {}", rep.scanned, rep.worst_margin);

    for x in [rat(1, 4), rat(1, 16), rat(1, 256)] {
        let v = theta.eval_exact(&x)?;
        println!("theta({}) = {}  vs  d = {}", format_rational(&x), format_rational(&v), format_rational(&x));
    }

    let s = SeriesFunc::new(r, theta.clone());
    match check_sufficient_conditions(&s, &rat(1, 1), &rat(2, 1), &ScanParams::defaults(r, 5, 3))? {
        SufficientVerdict::Fail { witness, .. } => println!("sufficient conditions fail: {}", serde_json::to_string(&witness).expect("json")),
        other => println!("unexpected: {:?}", other.verdict()),
    }

    // Delta_{n,0}(1/2; U_theta) = -2 for every n, while the class bound is -2 c 2^n.
    let u = s.to_func();
    for n in 0..=6 {
        let t = Triplet::new(r, n, 0, rat(1, 2))?;
        print!("{} ", central_second_diff(&u, r, &t, Mode::Exact)?);
    }
    println!();
    let q = MembershipQuery::new(rat(1, 10), r, 5, vec![rat(1, 2)])?;
    let rep = membership_scan(&u, &q)?;
    println!(
        "U_theta, c = 1/10: {:?}, first violation {}, worst {}",
        rep.verdict,
        rep.first_violation.expect("violated"),
        rep.worst_triplet
    );
    Ok(())
}
