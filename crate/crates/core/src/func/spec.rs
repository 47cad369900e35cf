//! JSON function-spec documents.
//!
//! Each node is an object with a `"kind"` field; rationals are `"p/q"` strings or
//! integers. See `docs/func-spec-schema.md`.

use serde_json::{json, Map, Value};

use super::{FuncExpr, Spline, ThetaSplice};
use crate::arith::{format_rational, parse_rational, Rational};
use crate::error::{Error, Result};
use crate::radix::Radix;

/// Parses a function-spec document.
pub fn parse_func_spec(text: &str) -> Result<FuncExpr> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Syntax {
        line: e.line(),
        column: e.column(),
        msg: e.to_string(),
    })?;
    parse_node(&value, "$")
}

fn semantic(path: &str, msg: impl Into<String>) -> Error {
    Error::Semantic { path: path.to_string(), msg: msg.into() }
}

fn with_path(path: &str, e: Error) -> Error {
    match e {
        Error::InvalidArgument(msg) => semantic(path, msg),
        other => other,
    }
}

struct Node<'a> {
    obj: &'a Map<String, Value>,
    path: &'a str,
}

impl<'a> Node<'a> {
    fn allow(&self, fields: &[&str]) -> Result<()> {
        for key in self.obj.keys() {
            if key != "kind" && !fields.contains(&key.as_str()) {
                return Err(semantic(self.path, format!("unknown field \"{key}\"")));
            }
        }
        Ok(())
    }

    fn field(&self, name: &str) -> Result<(&'a Value, String)> {
        let p = format!("{}.{name}", self.path);
        match self.obj.get(name) {
            Some(v) => Ok((v, p)),
            None => Err(semantic(self.path, format!("missing field \"{name}\""))),
        }
    }

    fn uint(&self, name: &str) -> Result<u32> {
        let (v, p) = self.field(name)?;
        v.as_u64()
            .and_then(|n| u32::try_from(n).ok())
            .ok_or_else(|| semantic(&p, "expected a nonnegative integer"))
    }

    fn radix(&self) -> Result<Radix> {
        let r = self.uint("r")?;
        Radix::new(r).map_err(|_| semantic(&format!("{}.r", self.path), format!("r must be >= 2, got {r}")))
    }

    fn rational(&self, name: &str) -> Result<Rational> {
        let (v, p) = self.field(name)?;
        rational_value(v, &p)
    }

    fn child(&self, name: &str) -> Result<FuncExpr> {
        let (v, p) = self.field(name)?;
        parse_node(v, &p)
    }

    fn array(&self, name: &str) -> Result<(&'a Vec<Value>, String)> {
        let (v, p) = self.field(name)?;
        v.as_array().map(|a| (a, p.clone())).ok_or_else(|| semantic(&p, "expected an array"))
    }
}

fn rational_value(v: &Value, path: &str) -> Result<Rational> {
    match v {
        Value::String(s) => parse_rational(s).map_err(|e| with_path(path, e)),
        Value::Number(n) if n.is_i64() || n.is_u64() => parse_rational(&n.to_string()).map_err(|e| with_path(path, e)),
        _ => Err(semantic(path, "expected a rational as a \"p/q\" string or an integer")),
    }
}

fn parse_node(v: &Value, path: &str) -> Result<FuncExpr> {
    let obj = v.as_object().ok_or_else(|| semantic(path, "expected an object"))?;
    let node = Node { obj, path };
    let kind = match obj.get("kind") {
        Some(Value::String(k)) => k.as_str(),
        Some(_) => return Err(semantic(&format!("{path}.kind"), "expected a string")),
        None => return Err(semantic(path, "missing field \"kind\"")),
    };
    match kind {
        "distance" => {
            node.allow(&[])?;
            Ok(FuncExpr::Distance)
        }
        "abs_sin" => {
            node.allow(&[])?;
            Ok(FuncExpr::AbsSin)
        }
        "sin_2pi" => {
            node.allow(&[])?;
            Ok(FuncExpr::Sin2Pi)
        }
        "distance_power" => {
            node.allow(&["p"])?;
            let p = node.uint("p")?;
            FuncExpr::distance_power(p).map_err(|e| with_path(&format!("{path}.p"), e))
        }
        "takagi" => {
            node.allow(&["r"])?;
            Ok(FuncExpr::Takagi(node.radix()?))
        }
        "theta_splice" => {
            node.allow(&["r"])?;
            let r = node.radix()?;
            Ok(FuncExpr::ThetaSplice(ThetaSplice::new(r).map_err(|e| with_path(path, e))?))
        }
        "spline" => {
            node.allow(&["knots", "coeffs"])?;
            let (ks, kp) = node.array("knots")?;
            let knots = ks
                .iter()
                .enumerate()
                .map(|(i, k)| rational_value(k, &format!("{kp}[{i}]")))
                .collect::<Result<Vec<_>>>()?;
            let (cs, cp) = node.array("coeffs")?;
            let coeffs = cs
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    let p = format!("{cp}[{i}]");
                    let arr = c.as_array().ok_or_else(|| semantic(&p, "expected an array"))?;
                    arr.iter()
                        .enumerate()
                        .map(|(j, x)| rational_value(x, &format!("{p}[{j}]")))
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(FuncExpr::PolySpline(Spline::new(knots, coeffs).map_err(|e| with_path(path, e))?))
        }
        "scale" => {
            node.allow(&["a", "child"])?;
            Ok(FuncExpr::scale(node.rational("a")?, node.child("child")?))
        }
        "sum" => {
            node.allow(&["terms"])?;
            let (ts, tp) = node.array("terms")?;
            if ts.is_empty() {
                return Err(semantic(&tp, "sum needs at least one term"));
            }
            let terms = ts
                .iter()
                .enumerate()
                .map(|(i, t)| parse_node(t, &format!("{tp}[{i}]")))
                .collect::<Result<Vec<_>>>()?;
            Ok(FuncExpr::Sum(terms))
        }
        "dilate" => {
            node.allow(&["m", "child"])?;
            let m = node.uint("m")?;
            let child = node.child("child")?;
            FuncExpr::dilate(m, child).map_err(|e| with_path(&format!("{path}.m"), e))
        }
        "u_series" => {
            node.allow(&["r", "psi"])?;
            Ok(FuncExpr::USeries(node.radix()?, Box::new(node.child("psi")?)))
        }
        other => Err(semantic(&format!("{path}.kind"), format!("unknown kind \"{other}\""))),
    }
}

fn rat_json(q: &Rational) -> Value {
    Value::String(format_rational(q))
}

impl FuncExpr {
    /// The spec document denoting this expression.
    pub fn to_json(&self) -> Value {
        match self {
            FuncExpr::Distance => json!({"kind": "distance"}),
            FuncExpr::DistancePower(p) => json!({"kind": "distance_power", "p": p}),
            FuncExpr::Takagi(r) => json!({"kind": "takagi", "r": r.get()}),
            FuncExpr::PolySpline(s) => json!({
                "kind": "spline",
                "knots": s.knots().iter().map(rat_json).collect::<Vec<_>>(),
                "coeffs": s.coeffs().iter().map(|c| c.iter().map(rat_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
            }),
            FuncExpr::AbsSin => json!({"kind": "abs_sin"}),
            FuncExpr::Sin2Pi => json!({"kind": "sin_2pi"}),
            FuncExpr::ThetaSplice(t) => json!({"kind": "theta_splice", "r": t.radix().get()}),
            FuncExpr::Scale(a, c) => json!({"kind": "scale", "a": rat_json(a), "child": c.to_json()}),
            FuncExpr::Sum(cs) => json!({"kind": "sum", "terms": cs.iter().map(FuncExpr::to_json).collect::<Vec<_>>()}),
            FuncExpr::Dilate(m, c) => json!({"kind": "dilate", "m": m, "child": c.to_json()}),
            FuncExpr::USeries(r, p) => json!({"kind": "u_series", "r": r.get(), "psi": p.to_json()}),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};

    #[test]
    fn parses_takagi() {
        assert_eq!(parse_func_spec(r#"{"kind":"takagi","r":2}"#).unwrap(), FuncExpr::takagi(2).unwrap());
    }

    #[test]
    fn parses_psi0() {
        let text = r#"{"kind":"sum","terms":[{"kind":"distance"},{"kind":"scale","a":"1","child":{"kind":"distance_power","p":2}}]}"#;
        let f = parse_func_spec(text).unwrap();
        let expect = FuncExpr::Sum(vec![FuncExpr::Distance, FuncExpr::scale(int(1), FuncExpr::DistancePower(2))]);
        assert_eq!(f, expect);
        assert_eq!(f.eval_exact(&rat(1, 4)).unwrap(), rat(5, 16));
    }

    #[test]
    fn rejects_radix_one() {
        let err = parse_func_spec(r#"{"kind":"takagi","r":1}"#).unwrap_err();
        match err {
            Error::Semantic { path, msg } => {
                assert_eq!(path, "$.r");
                assert!(msg.contains(">= 2"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn syntax_errors_carry_position() {
        let err = parse_func_spec("{\n  \"kind\": \"takagi\",\n  \"r\": }").unwrap_err();
        assert!(matches!(err, Error::Syntax { line: 3, .. }), "{err:?}");
    }

    #[test]
    fn nested_paths() {
        let err = parse_func_spec(r#"{"kind":"sum","terms":[{"kind":"distance"},{"kind":"takagi","r":0}]}"#).unwrap_err();
        assert_eq!(err, Error::Semantic { path: "$.terms[1].r".into(), msg: "r must be >= 2, got 0".into() });
        let err = parse_func_spec(r#"{"kind":"distance","r":2}"#).unwrap_err();
        assert!(matches!(err, Error::Semantic { .. }));
        let err = parse_func_spec(r#"{"kind":"sum","terms":[]}"#).unwrap_err();
        assert!(matches!(err, Error::Semantic { .. }));
    }

    #[test]
    fn spline_validation_is_semantic() {
        let bad = r#"{"kind":"spline","knots":["0","1/2","1"],"coeffs":[["1","1"],["3/2","-1"]]}"#;
        assert!(matches!(parse_func_spec(bad), Err(Error::Semantic { .. })));
        let tent = r#"{"kind":"spline","knots":["0","1/2","1"],"coeffs":[["0","1"],["1/2","-1"]]}"#;
        let f = parse_func_spec(tent).unwrap();
        assert_eq!(f.eval_exact(&rat(3, 4)).unwrap(), rat(1, 4));
    }

    #[test]
    fn round_trips() {
        let fs = vec![
            FuncExpr::psi0(rat(1, 3), int(2)),
            FuncExpr::u_series(3, FuncExpr::theta(3).unwrap()).unwrap(),
            FuncExpr::sine_cancellation(2).unwrap(),
            FuncExpr::Sin2Pi,
        ];
        for f in fs {
            let text = f.to_json().to_string();
            assert_eq!(parse_func_spec(&text).unwrap(), f);
        }
    }
}
