//! Lower envelope of parabolas `f(z) + (x - z)^2 / (2t)` over a radix grid, compared
//! with brute-force minimization.
//!
//! ```bash
//! cargo run --example flow_envelope
//! ```

use pathfn::arith::{format_rational, rat};
use pathfn::flow::{flow_grid, BruteForceGrid, FlowQuery, ZGrid};
use pathfn::{FuncExpr, Mode, Radix};

fn main() -> pathfn::Result<()> {
    let r = Radix::new(2)?;
    let tau = FuncExpr::takagi(2)?;
    for t in [rat(1, 4), rat(1, 16), rat(1, 64)] {
        let q = FlowQuery::new(t.clone(), r, rat(2, 1))?;
        let pq = flow_grid(&tau, &q)?;
        println!("t = {}: n = {}, {} pieces", format_rational(&t), q.depth()?, pq.pieces.len());

        let brute = BruteForceGrid::new(&tau, &t, ZGrid::Radix(r, 8), Mode::Exact)?;
        let mismatches = r
            .grid(8)
            .iter()
            .filter(|x| pq.eval(x).unwrap() != brute.min_at(x).unwrap())
            .count();
        println!("  brute force over z = j/256: {mismatches} mismatches");
    }

    let pq = flow_grid(&tau, &FlowQuery::new(rat(1, 8), r, rat(2, 1))?)?;
    println!("{}", serde_json::to_string_pretty(&pq.to_json()).expect("json"));
    print!("{}", pq.to_csv(8)?);
    Ok(())
}
