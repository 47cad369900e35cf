//! Nowhere-differentiable periodic functions through second-order radix differences.
//!
//! Exact rational checks of the class `P_c` (`Delta_{n,k}(y; f) <= -2 c r^n`), the series
//! operator `U_psi`, and the inf-convolution flow `H_t f` of such functions.

pub mod arith;
pub mod cli;
pub mod differences;
pub mod error;
pub mod flow;
pub mod func;
pub mod poly;
pub mod radix;
pub mod series;

pub use arith::{Approx, Mode, Rational, Scalar};
pub use error::{Error, Result};
pub use func::{parse_func_spec, FuncExpr};
pub use radix::{Radix, Triplet};
