//! The second-difference identity for the series operator, checked exactly.
//!
//! ```bash
//! cargo run --example series_identity
//! ```

use pathfn::arith::{format_rational, rat};
use pathfn::radix::Triplet;
use pathfn::series::{identity_scan, SeriesFunc};
use pathfn::{FuncExpr, Radix};

fn main() -> pathfn::Result<()> {
    let cases = [
        (2u32, FuncExpr::Distance),
        (3, FuncExpr::psi0(rat(1, 1), rat(1, 1))),
        (2, FuncExpr::theta(2)?),
    ];
    for (r, psi) in cases {
        let radix = Radix::new(r)?;
        let u = SeriesFunc::new(radix, psi.clone());
        let rep = identity_scan(&u, &psi, radix, 4, &radix.interior_grid(2), pathfn::differences::DEFAULT_CAP)?;
        println!("U[{psi}] r={r}: {:?} on {} triplets", rep.verdict, rep.checked);
    }

    let u = SeriesFunc::new(Radix::new(2)?, FuncExpr::Distance);
    let t = Triplet::new(Radix::new(2)?, 3, 5, rat(1, 3))?;
    println!("residual at {t}: {}", format_rational(&u.u_delta_identity_residual(&t)?));
    // U_d at a non-radix rational, through its periodic orbit.
    println!("U_d(1/3) = {}", format_rational(&u.eval_exact(&rat(1, 3))?));
    Ok(())
}
