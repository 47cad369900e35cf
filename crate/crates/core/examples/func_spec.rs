//! Function-spec JSON documents: parsing, error reporting and round trips.
//!
//! ```bash
//! cargo run --example func_spec
//! ```

use pathfn::arith::{format_rational, rat};
use pathfn::parse_func_spec;

fn main() -> pathfn::Result<()> {
    let text = r#"{
        "kind": "u_series",
        "r": 2,
        "psi": {
            "kind": "sum",
            "terms": [
                {"kind": "distance"},
                {"kind": "scale", "a": "1/2", "child": {"kind": "distance_power", "p": 2}}
            ]
        }
    }"#;
    let f = parse_func_spec(text)?;
    println!("{f}");
    println!("value at 1/4: {}", format_rational(&f.eval_exact(&rat(1, 4))?));
    let back = parse_func_spec(&f.to_json().to_string())?;
    assert_eq!(back, f);

    let tent = r#"{"kind":"spline","knots":["0","1/2","1"],"coeffs":[["0","1"],["1/2","-1"]]}"#;
    println!("tent at 3/8: {}", format_rational(&parse_func_spec(tent)?.eval_exact(&rat(3, 8))?));

    for bad in [r#"{"kind":"takagi","r":1}"#, r#"{"kind":"sum","terms":[{"kind":"nope"}]}"#, "{\"kind\":"] {
        println!("{bad:<45} -> {}", parse_func_spec(bad).unwrap_err());
    }
    Ok(())
}
