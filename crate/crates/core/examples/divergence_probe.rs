//! Forward and backward difference quotients along `k_n = floor(r^n x)`: their gap
//! stays below `-c`, so no derivative exists at `x`.
//!
//! ```bash
//! cargo run --example divergence_probe
//! ```

use pathfn::arith::{format_rational, rat};
use pathfn::differences::{divergence_probe, probe_verdict};
use pathfn::{FuncExpr, Mode, Radix};

fn main() -> pathfn::Result<()> {
    let r = Radix::new(2)?;
    let tau = FuncExpr::takagi(2)?;
    let rows = divergence_probe(&tau, r, &rat(1, 3), 12, &rat(1, 2), Mode::Exact)?;
    for row in &rows {
        println!("n={:<3} k={:<5} y={:<4} gap={}", row.n, row.k, format_rational(&row.y), row.gap);
    }
    println!("gap <= -2 at 1/3: {:?}", probe_verdict(&rows, &rat(2, 1)));

    // sqrt(2) - 1 to 11 decimal places, float mode.
    let x = rat(41_421_356_237, 100_000_000_000);
    let rows = divergence_probe(&tau, r, &x, 20, &rat(1, 2), Mode::float())?;
    let worst = rows.iter().map(|row| row.gap.to_f64()).fold(f64::MIN, f64::max);
    println!("largest gap near sqrt(2) - 1: {worst:.6}, verdict {:?}", probe_verdict(&rows, &rat(2, 1)));

    let rows = divergence_probe(&FuncExpr::Distance, r, &rat(1, 4), 5, &rat(1, 2), Mode::Exact)?;
    println!("d at 1/4: gaps {:?}", rows.iter().map(|row| row.gap.to_string()).collect::<Vec<_>>());
    Ok(())
}
