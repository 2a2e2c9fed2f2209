//! Symbolic scalar tokens: sums of rationals and rational multiples of
//! `log(r)`, e.g. `"-log(2)"`, `"3/2*log(2) - 1"`, `"0"`.

use num_rational::BigRational;

use super::element::{LogBranch, PadicElement};
use super::field::LocalField;
use crate::error::{Error, Result};

fn rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let t = s.strip_prefix('(').and_then(|x| x.strip_suffix(')')).unwrap_or(s);
    t.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational {s:?}")))
}

fn term(field: &LocalField, s: &str, branch: &LogBranch) -> Result<PadicElement> {
    let s = s.trim();
    if let Some(i) = s.find("log(") {
        let inner = s[i + 4..]
            .strip_suffix(')')
            .ok_or_else(|| Error::Parse(format!("unclosed log in {s:?}")))?;
        let coef = s[..i].trim().trim_end_matches('*').trim();
        let c = if coef.is_empty() { field.one() } else { field.from_ratio(&rational(coef)?) };
        let x = field.from_ratio(&rational(inner)?);
        return Ok(c * x.log(branch)?);
    }
    Ok(field.from_ratio(&rational(s)?))
}

/// Evaluates a token in `field` using `branch` for logarithms.
pub fn parse_scalar(field: &LocalField, s: &str, branch: &LogBranch) -> Result<PadicElement> {
    let mut acc = field.zero();
    let mut start = 0;
    let mut sign = 1;
    let mut depth = 0i32;
    let bytes = s.as_bytes();
    let mut seen = false;
    for i in 0..=bytes.len() {
        let c = bytes.get(i).copied();
        match c {
            Some(b'(') => depth += 1,
            Some(b')') => depth -= 1,
            _ => {}
        }
        let split = c.is_none() || (depth == 0 && matches!(c, Some(b'+') | Some(b'-')) && {
            // a sign directly after '*' or '/' belongs to the number
            let prev = s[..i].trim_end().chars().last();
            !matches!(prev, Some('*') | Some('/'))
        });
        if split {
            let piece = s[start..i].trim();
            if piece.is_empty() {
                if seen && c.is_some() {
                    return Err(Error::Parse(format!("dangling sign in {s:?}")));
                }
            } else {
                let v = term(field, piece, branch)?;
                acc = if sign > 0 { acc + v } else { acc - v };
                seen = true;
            }
            if c.is_none() {
                break;
            }
            sign = if c == Some(b'-') { -1 } else { 1 };
            start = i + 1;
        }
    }
    if !seen {
        return Err(Error::Parse(format!("empty token {s:?}")));
    }
    Ok(acc)
}
