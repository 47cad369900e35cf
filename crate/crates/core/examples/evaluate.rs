//! Exact and certified float evaluation of the built-in functions.
//!
//! ```bash
//! cargo run --example evaluate
//! ```

use pathfn::arith::{format_rational, rat, Approx};
use pathfn::FuncExpr;

fn main() -> pathfn::Result<()> {
    let funcs = [
        FuncExpr::Distance,
        FuncExpr::takagi(2)?,
        FuncExpr::takagi(3)?,
        FuncExpr::theta(2)?,
        FuncExpr::u_series(2, FuncExpr::psi0(rat(1, 1), rat(1, 1)))?,
    ];
    let xs = [rat(1, 4), rat(1, 3), rat(5, 7)];
    for f in &funcs {
        for x in &xs {
            let exact = f.eval_exact(x)?;
            let approx = f.eval_approx(Approx::from_rational(x));
            println!("{f:<24} x={:<4} exact={:<16} float={approx}", format_rational(x), format_rational(&exact));
        }
    }

    // Float-only: no exact value exists.
    let weier = FuncExpr::u_series(2, FuncExpr::Sin2Pi)?;
    assert!(!weier.supports_exact());
    println!("{weier} at 0.5 = {}", weier.eval_f64(0.5));
    Ok(())
}
