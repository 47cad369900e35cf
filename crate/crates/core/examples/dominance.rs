//! When does the middle parabola of three neighbours drop out of the envelope?
//! Sampled comparison against the criterion `Delta <= -1/t`.
//!
//! ```bash
//! cargo run --example dominance
//! ```

use pathfn::arith::{format_rational, rat};
use pathfn::flow::{crossing_points, dominance_check, dominance_samples};
use pathfn::radix::Triplet;
use pathfn::{FuncExpr, Mode, Radix};

fn main() -> pathfn::Result<()> {
    let r = Radix::new(2)?;
    let f = FuncExpr::u_series(2, FuncExpr::psi0(rat(1, 1), rat(1, 1)))?;
    for (n, k, t) in [(2u32, 1u64, rat(1, 4)), (2, 1, rat(1, 64)), (4, 3, rat(1, 16)), (5, 7, rat(1, 1024))] {
        let tr = Triplet::new(r, n, k, rat(1, 2))?;
        let cp = crossing_points(&f, r, &tr, &t, Mode::Exact)?;
        let xs = dominance_samples(&cp, r, &tr, 64)?;
        let rep = dominance_check(&f, r, &tr, &t, &xs)?;
        println!(
            "{tr} t={:<7} Delta={:<10} x1={} x2={}  sampled={} criterion={} agree={}",
            format_rational(&t),
            cp.delta,
            cp.x1,
            cp.x2,
            rep.sampled,
            rep.criterion,
            rep.agree
        );
    }
    Ok(())
}
