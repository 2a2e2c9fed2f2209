//! Truncated Laurent series with a formal logarithm `L = log z`, and the
//! double index on `M + K·L`.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::padic::serial::{element_from_json, element_to_json};
use crate::padic::{LocalField, LogBranch, PadicElement};

pub const DEFAULT_WINDOW: usize = 64;
/// Terms of `f·dg` beyond `z^{-1}` that must be known for a double index.
pub const MIN_OVERLAP: i64 = 8;

/// `Σ_{low ≤ k < high} a_k z^k + O(z^high)`.
#[derive(Clone, Debug)]
pub struct LaurentTrunc {
    field: LocalField,
    low: i64,
    coeffs: Vec<PadicElement>,
}

impl LaurentTrunc {
    pub fn new(field: &LocalField, low: i64, coeffs: Vec<PadicElement>) -> Self {
        LaurentTrunc {
            field: field.clone(),
            low,
            coeffs,
        }
    }

    /// Zero known up to `z^high`.
    pub fn zero(field: &LocalField, high: i64) -> Self {
        LaurentTrunc::new(field, high, vec![])
    }

    /// `c·z^k` known up to `z^high`.
    pub fn monomial(c: PadicElement, k: i64, high: i64) -> Self {
        let field = c.field().clone();
        let mut s = LaurentTrunc::zero(&field, high.min(k));
        s.low = k.min(high);
        if k < high {
            s.coeffs = vec![field.zero(); (high - k) as usize];
            s.coeffs[0] = c;
        }
        s
    }

    pub fn from_ints(field: &LocalField, low: i64, c: &[i64], high: i64) -> Self {
        let mut s = LaurentTrunc::zero(field, high);
        for (i, &x) in c.iter().enumerate() {
            if x != 0 {
                s = s.add(&LaurentTrunc::monomial(field.from_int(x), low + i as i64, high));
            }
        }
        s
    }

    pub fn field(&self) -> &LocalField {
        &self.field
    }

    pub fn low(&self) -> i64 {
        self.low
    }

    /// Exclusive bound of the known terms.
    pub fn high(&self) -> i64 {
        self.low + self.coeffs.len() as i64
    }

    pub fn coeffs(&self) -> &[PadicElement] {
        &self.coeffs
    }

    /// Coefficient of `z^k`.
    pub fn coeff(&self, k: i64) -> Result<PadicElement> {
        if k >= self.high() {
            return Err(Error::WindowUnderflow(format!(
                "coefficient of z^{k} beyond window ending at z^{}",
                self.high()
            )));
        }
        if k < self.low {
            return Ok(self.field.zero());
        }
        Ok(self.coeffs[(k - self.low) as usize].clone())
    }

    fn get(&self, k: i64) -> Option<&PadicElement> {
        if k < self.low || k >= self.high() {
            None
        } else {
            Some(&self.coeffs[(k - self.low) as usize])
        }
    }

    /// Lowest exponent with a nonzero coefficient.
    pub fn valuation(&self) -> Option<i64> {
        self.coeffs
            .iter()
            .position(|c| !c.is_zero())
            .map(|i| self.low + i as i64)
    }

    pub fn is_zero(&self) -> bool {
        self.valuation().is_none()
    }

    /// Drops leading zero coefficients.
    pub fn normalized(&self) -> Self {
        match self.valuation() {
            None => LaurentTrunc::zero(&self.field, self.high()),
            Some(v) => LaurentTrunc::new(
                &self.field,
                v,
                self.coeffs[(v - self.low) as usize..].to_vec(),
            ),
        }
    }

    /// Restricts the window to `z^high`.
    pub fn truncate(&self, high: i64) -> Self {
        if high >= self.high() {
            return self.clone();
        }
        if high <= self.low {
            return LaurentTrunc::zero(&self.field, high);
        }
        LaurentTrunc::new(
            &self.field,
            self.low,
            self.coeffs[..(high - self.low) as usize].to_vec(),
        )
    }

    pub fn add(&self, o: &Self) -> Self {
        let high = self.high().min(o.high());
        let low = self.low.min(o.low).min(high);
        let coeffs = (low..high)
            .map(|k| match (self.get(k), o.get(k)) {
                (Some(a), Some(b)) => a + b,
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => self.field.zero(),
            })
            .collect();
        LaurentTrunc::new(&self.field, low, coeffs)
    }

    pub fn neg(&self) -> Self {
        LaurentTrunc::new(&self.field, self.low, self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &PadicElement) -> Self {
        LaurentTrunc::new(&self.field, self.low, self.coeffs.iter().map(|x| x * c).collect())
    }

    /// Multiplication by `z^k`.
    pub fn shift(&self, k: i64) -> Self {
        LaurentTrunc::new(&self.field, self.low + k, self.coeffs.clone())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let a = self.normalized();
        let b = o.normalized();
        let (va, vb) = (a.low, b.low);
        let high = (va + b.high()).min(vb + a.high());
        let low = (va + vb).min(high);
        let n = (high - low).max(0) as usize;
        let mut out = vec![self.field.zero(); n];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_exact_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                let k = i + j;
                if k >= n {
                    break;
                }
                if y.is_exact_zero() {
                    continue;
                }
                out[k] = &out[k] + &(x * y);
            }
        }
        LaurentTrunc::new(&self.field, low, out)
    }

    /// `d/dz`.
    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c.scale_int(self.low + i as i64))
            .collect();
        LaurentTrunc::new(&self.field, self.low - 1, coeffs)
    }

    /// Multiplicative inverse; the leading coefficient must be a nonzero element.
    pub fn inverse(&self) -> Result<Self> {
        let a = self.normalized();
        let v = a.valuation().ok_or(Error::DivisionByZero)?;
        let n = a.coeffs.len();
        let c0inv = a.coeffs[0].inv()?;
        let mut b: Vec<PadicElement> = Vec::with_capacity(n);
        b.push(c0inv.clone());
        for k in 1..n {
            let mut s = self.field.zero();
            for j in 1..=k {
                s = s + &a.coeffs[j] * &b[k - j];
            }
            b.push(-(s * &c0inv));
        }
        Ok(LaurentTrunc::new(&self.field, -v, b))
    }

    pub fn pow(&self, k: i64) -> Result<Self> {
        if k < 0 {
            return self.inverse()?.pow(-k);
        }
        let base = self.normalized();
        if k == 0 {
            return Ok(LaurentTrunc::monomial(self.field.one(), 0, base.coeffs.len() as i64));
        }
        let mut acc = base.clone();
        for _ in 1..k {
            acc = acc.mul(&base);
        }
        Ok(acc)
    }

    /// `self(α(w))` for `α` of positive order.
    pub fn compose(&self, alpha: &LaurentTrunc) -> Result<Self> {
        let al = alpha.normalized();
        let n = al.valuation().unwrap_or(0);
        if n < 1 {
            return Err(Error::BadSubstitution);
        }
        let s = self.normalized();
        let high_from_trunc = n * s.high();
        let mut acc: Option<LaurentTrunc> = None;
        let mut pk = al.pow(s.low)?;
        for c in s.coeffs.iter() {
            if !c.is_exact_zero() {
                let t = pk.scale(c);
                acc = Some(match acc {
                    None => t,
                    Some(a) => a.add(&t),
                });
            }
            pk = pk.mul(&al);
        }
        let res = acc.unwrap_or_else(|| LaurentTrunc::zero(&self.field, high_from_trunc));
        Ok(res.truncate(high_from_trunc))
    }

    pub fn to_json(&self) -> Value {
        json!([self.low, self.coeffs.iter().map(element_to_json).collect::<Vec<_>>()])
    }

    pub fn from_json(field: &LocalField, v: &Value) -> Result<Self> {
        let bad = || Error::Parse("Laurent series must be [low, [coeffs]]".into());
        let arr = v.as_array().ok_or_else(bad)?;
        if arr.len() != 2 {
            return Err(bad());
        }
        let low = arr[0].as_i64().ok_or_else(bad)?;
        let coeffs = arr[1]
            .as_array()
            .ok_or_else(bad)?
            .iter()
            .map(|c| element_from_json(field, c))
            .collect::<Result<Vec<_>>>()?;
        Ok(LaurentTrunc::new(field, low, coeffs))
    }
}

/// `Σ_m c_m(z) L^m`.
#[derive(Clone, Debug)]
pub struct LogPoly {
    pub terms: Vec<LaurentTrunc>,
}

/// The form `body · dz`.
#[derive(Clone, Debug)]
pub struct LogForm {
    pub body: LogPoly,
}

impl LogPoly {
    pub fn new(terms: Vec<LaurentTrunc>) -> Self {
        let mut p = LogPoly { terms };
        while p.terms.len() > 1 && p.terms.last().unwrap().is_zero() {
            p.terms.pop();
        }
        p
    }

    pub fn from_laurent(f: LaurentTrunc) -> Self {
        LogPoly::new(vec![f])
    }

    /// `c · z^k · L^m`.
    pub fn term(c: PadicElement, k: i64, m: usize, high: i64) -> Self {
        let field = c.field().clone();
        let mut terms = vec![LaurentTrunc::zero(&field, high); m + 1];
        terms[m] = LaurentTrunc::monomial(c, k, high);
        LogPoly::new(terms)
    }

    /// Degree in `L`.
    pub fn l_degree(&self) -> usize {
        self.terms.len().saturating_sub(1)
    }

    pub fn field(&self) -> &LocalField {
        self.terms[0].field()
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.terms.len().max(o.terms.len());
        let field = self.field();
        let get = |p: &LogPoly, m: usize, h: i64| {
            p.terms
                .get(m)
                .cloned()
                .unwrap_or_else(|| LaurentTrunc::zero(field, h))
        };
        let h = self.high().min(o.high());
        LogPoly::new((0..n).map(|m| get(self, m, h).add(&get(o, m, h))).collect())
    }

    pub fn scale(&self, c: &PadicElement) -> Self {
        LogPoly::new(self.terms.iter().map(|t| t.scale(c)).collect())
    }

    pub fn high(&self) -> i64 {
        self.terms.iter().map(|t| t.high()).min().unwrap_or(0)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "L_deg": self.l_degree(),
            "coeffs": self.terms.iter().map(|t| t.to_json()).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(field: &LocalField, v: &Value) -> Result<Self> {
        let coeffs = v
            .get("coeffs")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("missing coeffs".into()))?;
        let terms = coeffs
            .iter()
            .map(|c| LaurentTrunc::from_json(field, c))
            .collect::<Result<Vec<_>>>()?;
        if terms.is_empty() {
            return Err(Error::Parse("empty LogPoly".into()));
        }
        let p = LogPoly::new(terms);
        if let Some(m) = v.get("L_deg").and_then(Value::as_u64) {
            if m as usize != p.l_degree() {
                return Err(Error::Parse("L_deg does not match coefficients".into()));
            }
        }
        Ok(p)
    }
}

/// `d(z^k L^m) = (k z^{k-1} L^m + m z^{k-1} L^{m-1}) dz`.
pub fn differentiate(f: &LogPoly) -> Result<LogForm> {
    let field = f.field().clone();
    let m_max = f.terms.len();
    let mut out: Vec<LaurentTrunc> = Vec::with_capacity(m_max);
    for m in 0..m_max {
        let mut t = f.terms[m].derivative();
        if m + 1 < m_max {
            let from_log = f.terms[m + 1]
                .shift(-1)
                .scale(&field.from_int((m + 1) as i64));
            t = t.add(&from_log);
        }
        out.push(t);
    }
    Ok(LogForm {
        body: LogPoly::new(out),
    })
}

/// Primitive with vanishing `z^0 L^0` coefficient.
pub fn integrate(w: &LogForm) -> Result<LogPoly> {
    let field = w.body.field().clone();
    let big_m = w.body.terms.len();
    let high = w.body.high();
    // pending[m] collects what still has to be integrated against L^m
    let mut pending: Vec<LaurentTrunc> = w.body.terms.iter().map(|t| t.truncate(high)).collect();
    let mut res: Vec<LaurentTrunc> = vec![LaurentTrunc::zero(&field, high + 1); big_m + 1];
    for m in (0..big_m).rev() {
        let cur = pending[m].clone();
        for (i, b) in cur.coeffs().iter().enumerate() {
            if b.is_exact_zero() {
                continue;
            }
            let k = cur.low() + i as i64;
            if k == -1 {
                let c = b.try_div(&field.from_int(m as i64 + 1))?;
                res[m + 1] = res[m + 1].add(&LaurentTrunc::monomial(c, 0, high + 1));
            } else {
                let c = b.try_div(&field.from_int(k + 1))?;
                res[m] = res[m].add(&LaurentTrunc::monomial(c.clone(), k + 1, high + 1));
                if m > 0 {
                    let back = -(c.scale_int(m as i64));
                    pending[m - 1] = pending[m - 1].add(&LaurentTrunc::monomial(back, k, high));
                }
            }
        }
    }
    // pin the constant
    let r0 = &res[0];
    if r0.low() <= 0 && r0.high() > 0 {
        let mut c = r0.coeffs().to_vec();
        c[(0 - r0.low()) as usize] = field.zero();
        res[0] = LaurentTrunc::new(&field, r0.low(), c);
    }
    Ok(LogPoly::new(res))
}

/// Coefficient of `z^{-1} dz`; forms with `L` terms are rejected.
pub fn residue(w: &LogForm) -> Result<PadicElement> {
    if w.body.terms.iter().skip(1).any(|t| !t.is_zero()) {
        return Err(Error::LogTermPresent);
    }
    w.body.terms[0].coeff(-1)
}

/// `f + a·L`.
#[derive(Clone, Debug)]
pub struct A1Element {
    pub f: LaurentTrunc,
    pub a: PadicElement,
}

impl A1Element {
    pub fn new(f: LaurentTrunc, a: PadicElement) -> Self {
        A1Element { f, a }
    }

    /// `L` itself, known up to `z^high`.
    pub fn log_z(field: &LocalField, high: i64) -> Self {
        A1Element::new(LaurentTrunc::zero(field, high), field.one())
    }

    pub fn field(&self) -> &LocalField {
        self.f.field()
    }

    pub fn add(&self, o: &Self) -> Self {
        A1Element::new(self.f.add(&o.f), &self.a + &o.a)
    }

    pub fn scale(&self, c: &PadicElement) -> Self {
        A1Element::new(self.f.scale(c), &self.a * c)
    }

    pub fn to_logpoly(&self) -> LogPoly {
        let h = self.f.high();
        LogPoly::new(vec![
            self.f.clone(),
            LaurentTrunc::monomial(self.a.clone(), 0, h),
        ])
    }
}

/// `Res dF`, which only sees the coefficient of `L`.
pub fn res_df(f: &A1Element) -> PadicElement {
    f.a.clone()
}

/// `Res(f·dg) + b·f₀ − a·g₀` for `F = f + aL`, `G = g + bL`.
pub fn double_index(f: &A1Element, g: &A1Element) -> Result<PadicElement> {
    let dg = g.f.derivative();
    let (fl, gl) = (f.f.normalized(), dg.normalized());
    let high = (fl.low() + gl.high()).min(gl.low() + fl.high());
    if high < -1 + MIN_OVERLAP {
        return Err(Error::WindowUnderflow(format!(
            "f·dg known only below z^{high}, need {MIN_OVERLAP} terms past z^-1"
        )));
    }
    // coefficient of z^-1 in f·dg
    let mut r = f.field().zero();
    for (i, c) in fl.coeffs().iter().enumerate() {
        let k = fl.low() + i as i64;
        if let Some(d) = gl.get(-1 - k) {
            if !c.is_exact_zero() && !d.is_exact_zero() {
                r = r + c * d;
            }
        }
    }
    let f0 = f.f.coeff(0)?;
    let g0 = g.f.coeff(0)?;
    Ok(r + &g.a * &f0 - &f.a * &g0)
}

/// `log(1 + t)` for a power series `t` without constant term.
pub fn log_one_plus_series(t: &LaurentTrunc) -> Result<LaurentTrunc> {
    let field = t.field().clone();
    let high = t.high();
    let v = match t.valuation() {
        None => return Ok(LaurentTrunc::zero(&field, high.max(0))),
        Some(v) => v,
    };
    if v < 1 {
        return Err(Error::BadSubstitution);
    }
    let mut acc = LaurentTrunc::zero(&field, high);
    let mut tk = t.clone();
    let mut k = 1i64;
    while k * v < high {
        let sign = if k % 2 == 1 { k } else { -k };
        acc = acc.add(&tk.scale(&field.from_int(sign).inv()?));
        tk = tk.mul(t);
        k += 1;
    }
    Ok(acc)
}

/// Pullback of `F = f + a·log z` along `z = α(w)`.
pub fn substitute(f: &A1Element, alpha: &LaurentTrunc, branch: &LogBranch) -> Result<A1Element> {
    let al = alpha.normalized();
    let n = match al.valuation() {
        Some(n) if n >= 1 => n,
        _ => return Err(Error::BadSubstitution),
    };
    let field = f.field().clone();
    let fa = f.f.compose(&al)?;
    if f.a.is_exact_zero() {
        return Ok(A1Element::new(fa, field.zero()));
    }
    let an = al.coeffs()[0].clone();
    // α = a_n w^n (1 + t)
    let t = al
        .shift(-n)
        .scale(&an.inv()?)
        .sub(&LaurentTrunc::monomial(field.one(), 0, al.high() - n));
    let log_tail = log_one_plus_series(&t.normalized_or_zero())?;
    let log_an = an.log(branch)?;
    let log_part = log_tail.add(&LaurentTrunc::monomial(log_an, 0, log_tail.high()));
    let body = fa.add(&log_part.scale(&f.a));
    Ok(A1Element::new(body, f.a.scale_int(n)))
}

impl LaurentTrunc {
    fn normalized_or_zero(&self) -> Self {
        match self.valuation() {
            None => LaurentTrunc::zero(&self.field, self.high()),
            Some(_) => self.normalized(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::{assert_equal, PrimeConfig};

    fn k5() -> LocalField {
        LocalField::qp(PrimeConfig::new(5, 32).unwrap())
    }

    #[test]
    fn differentiate_examples() {
        let k = k5();
        let l = LogPoly::term(k.one(), 0, 1, 20);
        let d = differentiate(&l).unwrap();
        assert_eq!(d.body.l_degree(), 0);
        assert!(assert_equal(&d.body.terms[0].coeff(-1).unwrap(), &k.one(), 28));
        let z2 = LogPoly::term(k.one(), 2, 0, 20);
        let d = differentiate(&z2).unwrap();
        assert!(assert_equal(&d.body.terms[0].coeff(1).unwrap(), &k.from_int(2), 28));
        let l2 = LogPoly::term(k.from_ratio_i64(1, 2), 0, 2, 20);
        let d = differentiate(&l2).unwrap();
        assert_eq!(d.body.l_degree(), 1);
        assert!(assert_equal(&d.body.terms[1].coeff(-1).unwrap(), &k.one(), 28));
        assert!(d.body.terms[0].is_zero());
    }

    #[test]
    fn integrate_examples() {
        let k = k5();
        let w = LogForm {
            body: LogPoly::term(k.one(), -1, 0, 20),
        };
        let f = integrate(&w).unwrap();
        assert_eq!(f.l_degree(), 1);
        assert!(assert_equal(&f.terms[1].coeff(0).unwrap(), &k.one(), 28));
        let w = LogForm {
            body: LogPoly::term(k.one(), -1, 1, 20),
        };
        let f = integrate(&w).unwrap();
        assert_eq!(f.l_degree(), 2);
        assert!(assert_equal(&f.terms[2].coeff(0).unwrap(), &k.from_ratio_i64(1, 2), 28));
        // round trip on z^3 L^2 dz
        let w = LogForm {
            body: LogPoly::term(k.one(), 3, 2, 20),
        };
        let back = differentiate(&integrate(&w).unwrap()).unwrap();
        for m in 0..3 {
            for e in -2..10 {
                let want = if m == 2 && e == 3 { k.one() } else { k.zero() };
                let got = back.body.terms.get(m).map(|t| t.coeff(e).unwrap()).unwrap_or(k.zero());
                assert!(assert_equal(&got, &want, 20), "m={m} e={e}");
            }
        }
    }

    #[test]
    fn residues() {
        let k = k5();
        let w = LogForm {
            body: LogPoly::term(k.one(), -1, 0, 20),
        };
        assert!(assert_equal(&residue(&w).unwrap(), &k.one(), 28));
        let w = LogForm {
            body: LogPoly::term(k.one(), -1, 1, 20),
        };
        assert_eq!(residue(&w).unwrap_err(), Error::LogTermPresent);
        let f = A1Element::new(LaurentTrunc::from_ints(&k, -3, &[1], 20), k.from_int(7));
        assert!(assert_equal(&res_df(&f), &k.from_int(7), 28));
    }

    #[test]
    fn substitution_examples() {
        let k = k5();
        let br = LogBranch::iwasawa(&k);
        let w2 = LaurentTrunc::from_ints(&k, 2, &[1], 40);
        let l = A1Element::log_z(&k, 20);
        let s = substitute(&l, &w2, &br).unwrap();
        assert!(assert_equal(&s.a, &k.from_int(2), 28));
        assert!(s.f.is_zero());
        let z = A1Element::new(LaurentTrunc::from_ints(&k, 1, &[1], 20), k.zero());
        let s = substitute(&z, &w2, &br).unwrap();
        assert!(assert_equal(&s.f.coeff(2).unwrap(), &k.one(), 28));
        assert_eq!(
            substitute(&z, &LaurentTrunc::from_ints(&k, 0, &[1], 20), &br).unwrap_err(),
            Error::BadSubstitution
        );
    }

    #[test]
    fn json_round_trip() {
        let k = k5();
        let p = LogPoly::new(vec![
            LaurentTrunc::from_ints(&k, -2, &[1, 0, 3], 4),
            LaurentTrunc::from_ints(&k, 0, &[2], 4),
        ]);
        let j = p.to_json();
        assert_eq!(j["L_deg"], 1);
        let q = LogPoly::from_json(&k, &j).unwrap();
        assert!(assert_equal(&q.terms[0].coeff(0).unwrap(), &k.from_int(3), 28));
        assert_eq!(q.terms[0].high(), 4);
    }
}
