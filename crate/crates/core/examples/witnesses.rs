//! Subgradient witnesses read off the envelope, and the Hamilton-Jacobi residual.
//!
//! ```bash
//! cargo run --example witnesses
//! ```

use pathfn::arith::{format_rational, rat};
use pathfn::flow::{flow_grid, pde_residual, subdiff_witnesses, verify_witness, FlowQuery};
use pathfn::{FuncExpr, Radix};

fn main() -> pathfn::Result<()> {
    let r = Radix::new(2)?;
    let tau = FuncExpr::takagi(2)?;
    let t = rat(1, 32);
    let pq = flow_grid(&tau, &FlowQuery::new(t.clone(), r, rat(2, 1))?)?;

    for w in subdiff_witnesses(&pq) {
        let check = verify_witness(&tau, &w, &t, r, 6, 9)?;
        println!(
            "z = {:<6} slopes [{}, {}]  minorant {}  local {}",
            format_rational(&w.z),
            w.p_lo,
            w.p_hi,
            check.minorant,
            check.local_linear
        );
    }

    // Off the breakpoints each piece solves u_t + u_x^2 / 2 = 0.
    for x in [rat(1, 7), rat(3, 11), rat(5, 9)] {
        println!("residual at {}: {}", format_rational(&x), pde_residual(&pq, &x)?);
    }
    Ok(())
}
