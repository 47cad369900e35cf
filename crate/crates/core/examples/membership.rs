//! Scanning second differences for membership in the class with constant `c`.
//!
//! ```bash
//! cargo run --example membership
//! ```

use pathfn::arith::{format_rational, rat};
use pathfn::differences::{membership_scan, MembershipQuery};
use pathfn::{FuncExpr, Radix};

fn main() -> pathfn::Result<()> {
    for (r, c) in [(2u32, rat(2, 1)), (3, rat(3, 2)), (4, rat(4, 3))] {
        let radix = Radix::new(r)?;
        let tau = FuncExpr::takagi(r)?;
        let q = MembershipQuery::new(c.clone(), radix, 5, radix.interior_grid(3))?;
        let rep = membership_scan(&tau, &q)?;
        println!(
            "tau_{r}, c = {}: {:?} over {} triplets, worst margin {} at {}",
            format_rational(&c),
            rep.verdict,
            rep.scanned,
            rep.worst_margin,
            rep.worst_triplet
        );
    }

    // A slightly larger c is already violated.
    let radix = Radix::new(2)?;
    let q = MembershipQuery::new(rat(201, 100), radix, 5, radix.interior_grid(3))?;
    let rep = membership_scan(&FuncExpr::takagi(2)?, &q)?;
    println!("tau_2, c = 2.01: {:?}, first violation {:?}", rep.verdict, rep.first_violation.map(|t| t.to_string()));

    // d itself is piecewise linear and belongs to no class.
    let q = MembershipQuery::new(rat(1, 1), radix, 1, vec![rat(1, 2)])?;
    println!("d, c = 1: {:?}", membership_scan(&FuncExpr::Distance, &q)?.verdict);
    Ok(())
}
