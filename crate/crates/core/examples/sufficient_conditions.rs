//! From `m d <= psi` and bounded second differences of `psi` to a class constant for `U_psi`.
//!
//! ```bash
//! cargo run --example sufficient_conditions
//! ```

use pathfn::arith::{format_rational, rat};
use pathfn::differences::{membership_scan, MembershipQuery};
use pathfn::series::{bounds_chain, check_sufficient_conditions, ScanParams, SeriesFunc};
use pathfn::{FuncExpr, Mode, Radix};

fn main() -> pathfn::Result<()> {
    let r = Radix::new(2)?;
    let scan = ScanParams::defaults(r, 5, 3);
    for (psi, m, alpha) in [
        (FuncExpr::Distance, rat(1, 1), rat(0, 1)),
        (FuncExpr::psi0(rat(1, 1), rat(1, 1)), rat(1, 1), rat(2, 1)),
    ] {
        let s = SeriesFunc::new(r, psi.clone());
        let v = check_sufficient_conditions(&s, &m, &alpha, &scan)?;
        let c = v.implied_c().cloned().expect("conditions hold");
        println!("psi = {psi}: implied c = {}", format_rational(&c));

        let chain = bounds_chain(&s, &m, &r.grid(8), Mode::Exact)?;
        println!("  lower-bound chain on 257 points: {:?}", chain.verdict);

        let q = MembershipQuery::new(c, r, 6, r.interior_grid(4))?;
        println!("  direct scan of U_psi: {:?}", membership_scan(&s.to_func(), &q)?.verdict);
    }
    Ok(())
}
