//! JSON form `{"val": "a/e", "digits": [...], "prec": N}`.
//!
//! `digits` are the `π`-adic digits of the unit part `x / π^v`, each a residue
//! class (an integer when `f = 1`, else a list of `f` integers); `prec` is the
//! relative precision in `π`-units.

use serde_json::{json, Value};

use super::element::PadicElement;
use super::field::LocalField;
use super::fq::FqElem;
use crate::error::{Error, Result};

pub fn element_to_json(x: &PadicElement) -> Value {
    let field = x.field();
    let e = field.e() as i64;
    let Some(v) = x.valuation_pi() else {
        let abs = x.abs_prec_pi();
        return json!({
            "val": "inf",
            "digits": [],
            "prec": abs.map(|a| Value::from(a)).unwrap_or(Value::Null),
        });
    };
    let n = x.rel_prec_pi();
    let pi = field.uniformizer();
    let mut u = x * &pi.pow(-v);
    let mut digits = Vec::with_capacity(n as usize);
    for _ in 0..n {
        let d = u.residue();
        digits.push(if field.f() == 1 {
            Value::from(d[0])
        } else {
            Value::from(d.clone())
        });
        let lift = field.lift_residue(&d);
        u = &(&u - &lift) * &pi.pow(-1);
        if !u.is_integral() {
            break;
        }
    }
    json!({
        "val": format!("{}/{}", v, e),
        "digits": digits,
        "prec": n,
    })
}

fn parse_val(s: &str, e: i64) -> Result<i64> {
    let bad = || Error::Parse(format!("bad valuation {s:?}"));
    let (a, b) = match s.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (s.trim(), "1"),
    };
    let a: i64 = a.parse().map_err(|_| bad())?;
    let b: i64 = b.parse().map_err(|_| bad())?;
    if b <= 0 || (a * e) % b != 0 {
        return Err(bad());
    }
    Ok(a * e / b)
}

pub fn element_from_json(field: &LocalField, v: &Value) -> Result<PadicElement> {
    let bad = |m: &str| Error::Parse(m.to_string());
    let val = v.get("val").and_then(Value::as_str).ok_or_else(|| bad("missing val"))?;
    let prec = v.get("prec").and_then(Value::as_i64);
    if val == "inf" {
        return Ok(match prec {
            Some(a) => field.zero_to(a.div_euclid(field.e() as i64)),
            None => field.zero(),
        });
    }
    let vpi = parse_val(val, field.e() as i64)?;
    let prec = prec.ok_or_else(|| bad("missing prec"))?;
    let digits = v.get("digits").and_then(Value::as_array).ok_or_else(|| bad("missing digits"))?;
    let pi = field.uniformizer();
    let mut acc = field.zero();
    let mut pk = field.one();
    for d in digits {
        let r: FqElem = match d {
            Value::Number(n) => vec![n.as_u64().ok_or_else(|| bad("digit"))?],
            Value::Array(a) => a
                .iter()
                .map(|c| c.as_u64().ok_or_else(|| bad("digit")))
                .collect::<Result<_>>()?,
            _ => return Err(bad("digit")),
        };
        acc = acc + field.lift_residue(&r) * &pk;
        pk = &pk * &pi;
    }
    let x = acc * pi.pow(vpi);
    Ok(x.truncate_abs_pi(vpi + prec))
}
