//! Coleman integration on `P¹`: primitives of meromorphic forms as a
//! rational part plus logarithms of linear factors, local expansions at every
//! point, and the global double index.

use std::fmt;

use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::laurent::{double_index, A1Element, LaurentTrunc, MIN_OVERLAP};
use crate::padic::serial::element_to_json;
use crate::padic::{descend, splitting_field, trace, LocalField, LogBranch, PadicElement, Poly, PrimeConfig, SplittingField};
use crate::qpoly::{inverse, mat_mul, to_padic, QMat, QPoly, Q};

/// Largest splitting field, as a degree over the base, built on demand.
pub const MAX_SPLIT_DEGREE: usize = 8;

/// `num/den` with `den` monic and the two coprime.
#[derive(Clone, Debug)]
pub struct RationalFn {
    num: Poly,
    den: Poly,
}

impl RationalFn {
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let field = den.field().clone();
        let num = num.coerce(&field)?;
        if num.is_zero() {
            return Ok(RationalFn {
                num,
                den: Poly::constant(field.one()),
            });
        }
        let (mut num, mut den) = (num, den);
        if den.degree() > 0 && num.degree() > 0 {
            let g = num.gcd(&den)?;
            if g.degree() > 0 {
                num = num.divrem(&g)?.0;
                den = den.divrem(&g)?.0;
            }
        }
        let lc = den.lead().unwrap().inv()?;
        Ok(RationalFn {
            num: num.scale(&lc),
            den: den.monic()?,
        })
    }

    /// From exact rational data, reduced over `Q` before entering `field`.
    pub fn from_q(field: &LocalField, num: &QPoly, den: &QPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let (mut n, mut d) = (num.clone(), den.clone());
        if !n.is_zero() {
            let g = n.gcd(&d);
            n = n.divrem(&g)?.0;
            d = d.divrem(&g)?.0;
        } else {
            d = QPoly::one();
        }
        let lc = d.lead().unwrap().clone();
        let inv = Q::from_integer(1.into()) / lc;
        Ok(RationalFn {
            num: n.scale(&inv).to_poly(field),
            den: d.monic().to_poly(field),
        })
    }

    pub fn polynomial(p: Poly) -> Self {
        let f = p.field().clone();
        RationalFn {
            num: p,
            den: Poly::constant(f.one()),
        }
    }

    pub fn field(&self) -> &LocalField {
        self.den.field()
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn eval(&self, x: &PadicElement) -> Result<PadicElement> {
        let x = self.field().coerce(x).or_else(|_| Ok::<_, Error>(x.clone()))?;
        let (n, d) = if x.field() == self.field() {
            (self.num.eval(&x), self.den.eval(&x))
        } else {
            let t = x.field().clone();
            (self.num.coerce(&t)?.eval(&x), self.den.coerce(&t)?.eval(&x))
        };
        n.try_div(&d)
    }

    pub fn coerce(&self, target: &LocalField) -> Result<Self> {
        Ok(RationalFn {
            num: self.num.coerce(target)?,
            den: self.den.coerce(target)?,
        })
    }
}

/// `body·dt`.
#[derive(Clone, Debug)]
pub struct MeromorphicForm {
    pub body: RationalFn,
    /// Rational numerator and denominator when built from exact data.
    source: Option<(QPoly, QPoly)>,
}

impl MeromorphicForm {
    pub fn new(body: RationalFn) -> Self {
        MeromorphicForm { body, source: None }
    }

    pub fn from_q(field: &LocalField, num: &QPoly, den: &QPoly) -> Result<Self> {
        Ok(MeromorphicForm {
            body: RationalFn::from_q(field, num, den)?,
            source: Some((num.clone(), den.clone())),
        })
    }

    /// Rebuild over `Q_p` at relative precision `prec`, when the form came
    /// from rational data over `Q_p`.
    fn at_precision(&self, prec: u32) -> Option<Result<Self>> {
        let f = self.field();
        let (num, den) = self.source.as_ref()?;
        if f.degree() != 1 || f.base().is_some() {
            return None;
        }
        Some(PrimeConfig::new(f.p(), prec).and_then(|c| MeromorphicForm::from_q(&LocalField::qp(c), num, den)))
    }

    pub fn from_ints(field: &LocalField, num: &[i64], den: &[i64]) -> Result<Self> {
        MeromorphicForm::from_q(field, &QPoly::from_ints(num), &QPoly::from_ints(den))
    }

    /// `dlog(f) = f'/f · dt`.
    pub fn dlog(field: &LocalField, f: &QPoly) -> Result<Self> {
        MeromorphicForm::from_q(field, &f.derivative(), f)
    }

    pub fn field(&self) -> &LocalField {
        self.body.field()
    }

    /// Pullback along `t ↦ (αt+β)/(γt+δ)`.
    pub fn pullback_mobius(&self, m: [&PadicElement; 4]) -> Result<Self> {
        let field = self.field().clone();
        let [a, b, c, d] = m.map(|x| field.coerce(x));
        let (a, b, c, d) = (a?, b?, c?, d?);
        let det = &(&a * &d) - &(&b * &c);
        if det.is_zero() {
            return Err(Error::InvalidInput("degenerate Möbius map".into()));
        }
        let num_l = Poly::new(&field, vec![b.clone(), a.clone()]);
        let den_l = Poly::new(&field, vec![d.clone(), c.clone()]);
        let k = self.body.num.degree().max(self.body.den.degree()).max(0) as usize;
        let hom = |p: &Poly| -> Poly {
            let mut acc = Poly::zero(&field);
            for (i, ci) in p.coeffs().iter().enumerate() {
                acc = acc.add(&num_l.pow(i).mul(&den_l.pow(k - i)).scale(ci));
            }
            acc
        };
        let n = hom(&self.body.num).scale(&det);
        let dd = hom(&self.body.den).mul(&den_l.pow(2));
        Ok(MeromorphicForm::new(RationalFn::new(n, dd)?))
    }

    /// Pullback along a rational Möbius map, computed over `Q` when the
    /// form came from rational data.
    pub fn pullback_mobius_q(&self, m: [&Q; 4]) -> Result<Self> {
        let Some((num, den)) = &self.source else {
            let f = self.field().clone();
            let [a, b, c, d] = m.map(|x| to_padic(&f, x));
            return self.pullback_mobius([&a, &b, &c, &d]);
        };
        let [a, b, c, d] = m;
        let det = a * d - b * c;
        if det == Q::from_integer(0.into()) {
            return Err(Error::InvalidInput("degenerate Möbius map".into()));
        }
        let num_l = QPoly::new(vec![b.clone(), a.clone()]);
        let den_l = QPoly::new(vec![d.clone(), c.clone()]);
        let k = num.degree().max(den.degree()).max(0) as u32;
        let hom = |p: &QPoly| -> QPoly {
            let mut acc = QPoly::zero();
            for (i, ci) in p.coeffs().iter().enumerate() {
                acc = acc.add(&num_l.pow(i as u32).mul(&den_l.pow(k - i as u32)).scale(ci));
            }
            acc
        };
        let n = hom(num).scale(&det);
        let dd = hom(den).mul(&den_l.pow(2));
        MeromorphicForm::from_q(self.field(), &n, &dd)
    }

    pub fn to_json(&self) -> Value {
        let render = |p: &Poly| -> Value { p.coeffs().iter().map(element_to_json).collect() };
        json!({"num": render(&self.body.num), "den": render(&self.body.den)})
    }
}

/// A point of `P¹`.
#[derive(Clone, Debug)]
pub enum PointP1 {
    Finite(PadicElement),
    Infinity,
}

impl fmt::Display for PointP1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PointP1::Infinity => write!(f, "inf"),
            PointP1::Finite(a) => match a.to_small_rational(10_000) {
                Some(r) => write!(f, "{r}"),
                None => write!(f, "{}", a.describe()),
            },
        }
    }
}

impl PointP1 {
    pub fn to_json(&self) -> Value {
        match self {
            PointP1::Infinity => json!("inf"),
            PointP1::Finite(a) => element_to_json(a),
        }
    }
}

/// Principal part `Σ_k c_k (t−a)^{-k}` at a finite pole.
#[derive(Clone, Debug)]
pub struct Pole {
    pub point: PadicElement,
    /// `c_1, .., c_m`.
    pub coeffs: Vec<PadicElement>,
}

impl Pole {
    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn residue(&self) -> PadicElement {
        self.coeffs[0].clone()
    }
}

/// `ω = (poly_part + Σ principal parts)·dt` over a field splitting the denominator.
#[derive(Clone, Debug)]
pub struct PartialFractions {
    pub field: LocalField,
    pub base: LocalField,
    pub poly_part: Poly,
    pub poles: Vec<Pole>,
}

impl PartialFractions {
    pub fn residue_at_infinity(&self) -> PadicElement {
        -self.poles.iter().map(Pole::residue).sum::<PadicElement>()
    }

    /// Order of the pole at `∞` (`deg poly_part + 2`), or 0.
    pub fn order_at_infinity(&self) -> usize {
        let d = self.poly_part.degree();
        if d >= 0 {
            d as usize + 2
        } else if self.poles.iter().any(|p| !p.residue().is_zero()) {
            1
        } else {
            0
        }
    }
}

fn is_small(x: &PadicElement, threshold: i64) -> bool {
    x.is_zero() || x.valuation_pi().is_some_and(|v| v >= threshold)
}

/// `Σ_{j<n} a_j w^j / Σ_{j<n} b_j w^j` to `n` terms, `b_0` a unit of the field.
fn series_div(a: &[PadicElement], b: &[PadicElement], n: usize, field: &LocalField) -> Result<Vec<PadicElement>> {
    let inv = b[0].inv()?;
    let mut q: Vec<PadicElement> = Vec::with_capacity(n);
    for j in 0..n {
        let mut acc = a.get(j).cloned().unwrap_or_else(|| field.zero());
        for i in 1..=j.min(b.len().saturating_sub(1)) {
            acc = &acc - &(&b[i] * &q[j - i]);
        }
        q.push(&acc * &inv);
    }
    Ok(q)
}

fn split(base: &LocalField, den: &Poly) -> Result<SplittingField> {
    if den.degree() <= 0 {
        return Ok(SplittingField {
            field: base.clone(),
            roots: vec![],
        });
    }
    splitting_field(base, den, MAX_SPLIT_DEGREE)
}

/// Partial fractions over the splitting field of the denominator.
pub fn partial_fractions(w: &MeromorphicForm) -> Result<PartialFractions> {
    let sf = split(w.field(), w.body.den())?;
    partial_fractions_in(w, &sf)
}

/// Partial fractions using the roots of a field that splits the denominator.
pub fn partial_fractions_in(w: &MeromorphicForm, sf: &SplittingField) -> Result<PartialFractions> {
    let l = sf.field.clone();
    let body = w.body.coerce(&l)?;
    let (num, den) = (body.num(), body.den());
    let (poly_part, _) = num.divrem(den)?;
    // Roots are accurate to roughly the working precision; Taylor coefficients
    // of the denominator below half of it are taken to vanish.
    let threshold = (l.e() * l.prec() as usize / 2) as i64;
    let mut poles = Vec::new();
    let mut total = 0usize;
    for a in &sf.roots {
        let d_a = den.compose_linear(a, &l.one());
        let m = d_a.coeffs().iter().take_while(|c| is_small(c, threshold)).count();
        if m == 0 {
            continue;
        }
        total += m;
        let n_a = num.compose_linear(a, &l.one());
        let e_coeffs = &d_a.coeffs()[m..];
        let q = series_div(n_a.coeffs(), e_coeffs, m, &l)?;
        // q_j is the coefficient of w^{j-m}, so c_k = q_{m-k}.
        let coeffs = (1..=m).map(|k| q[m - k].clone()).collect();
        poles.push(Pole {
            point: a.clone(),
            coeffs,
        });
    }
    if total as isize != den.degree() {
        return Err(Error::PrecisionExhausted(format!(
            "located {total} of {} poles",
            den.degree()
        )));
    }
    Ok(PartialFractions {
        field: l,
        base: w.field().clone(),
        poly_part,
        poles,
    })
}

/// Exact primitive: `poly + Σ c (t−a)^{-k} + Σ c log(t−a) + c_const`.
#[derive(Clone, Debug)]
pub struct ColemanPrimitiveG0 {
    pub field: LocalField,
    pub poly: Poly,
    /// `(a, k, c)` for `c (t−a)^{-k}`, `k ≥ 1`.
    pub polar: Vec<(PadicElement, usize, PadicElement)>,
    /// `(c, a)` for `c log(t−a)`.
    pub logterms: Vec<(PadicElement, PadicElement)>,
    pub c_const: PadicElement,
    pub branch: LogBranch,
}

fn primitive_of(pf: &PartialFractions, branch: &LogBranch) -> Result<ColemanPrimitiveG0> {
    let l = &pf.field;
    let poly = Poly::new(
        l,
        std::iter::once(l.zero())
            .chain(
                pf.poly_part
                    .coeffs()
                    .iter()
                    .enumerate()
                    .map(|(i, c)| c * &l.from_ratio_i64(1, i as i64 + 1)),
            )
            .collect(),
    );
    let mut polar = Vec::new();
    let mut logterms = Vec::new();
    for pole in &pf.poles {
        if !pole.coeffs[0].is_exact_zero() {
            logterms.push((pole.coeffs[0].clone(), pole.point.clone()));
        }
        for (i, c) in pole.coeffs.iter().enumerate().skip(1) {
            // ∫ c (t−a)^{-(i+1)} = c/(−i) (t−a)^{-i}
            polar.push((pole.point.clone(), i, c * &l.from_ratio_i64(-1, i as i64)));
        }
    }
    Ok(ColemanPrimitiveG0 {
        field: l.clone(),
        poly,
        polar,
        logterms,
        c_const: l.zero(),
        branch: LogBranch::new(branch.lambda.clone()),
    })
}

/// Primitive of `ω` under the given branch, with zero constant.
pub fn primitive(w: &MeromorphicForm, branch: &LogBranch) -> Result<ColemanPrimitiveG0> {
    primitive_of(&partial_fractions(w)?, branch)
}

fn binom_big(n: u64, k: u64) -> BigInt {
    let mut acc = BigInt::from(1);
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// `Σ_{0 ≤ j < n} C(k+j−1, j) r^j`, the expansion of `(1 − r w)^{-k}`.
fn neg_binomial(field: &LocalField, k: usize, r: &PadicElement, n: usize) -> Vec<PadicElement> {
    let mut out = Vec::with_capacity(n);
    let mut rj = field.one();
    for j in 0..n {
        let c = field.from_bigint(&binom_big((k + j - 1) as u64, j as u64));
        out.push(&c * &rj);
        rj = &rj * r;
    }
    out
}

/// `Σ_{1 ≤ j < n} r^j / j`, the expansion of `−log(1 − r w)`.
fn neg_log_one_minus(field: &LocalField, r: &PadicElement, n: usize) -> Vec<PadicElement> {
    let mut out = vec![field.zero()];
    let mut rj = r.clone();
    for j in 1..n {
        out.push(&rj * &field.from_ratio_i64(1, j as i64));
        rj = &rj * r;
    }
    out
}

fn series(field: &LocalField, low: i64, c: Vec<PadicElement>) -> LaurentTrunc {
    LaurentTrunc::new(field, low, c)
}

/// Finitely many terms, known to all orders below `high`.
fn exact_series(field: &LocalField, low: i64, mut c: Vec<PadicElement>, high: i64) -> LaurentTrunc {
    let n = (high - low).max(0) as usize;
    c.resize(n.max(c.len()), field.zero());
    LaurentTrunc::new(field, low, c).truncate(high)
}

impl ColemanPrimitiveG0 {
    /// `dF` as a form over the primitive's field.
    pub fn differential(&self) -> Result<MeromorphicForm> {
        let l = &self.field;
        let mut num = self.poly.derivative();
        let mut den = Poly::constant(l.one());
        let mut add = |n: Poly, d: Poly| {
            num = num.mul(&d).add(&n.mul(&den));
            den = den.mul(&d);
        };
        for (a, k, c) in &self.polar {
            let lin = Poly::linear(a);
            add(Poly::constant(c.scale_int(-(*k as i64))), lin.pow(k + 1));
        }
        for (c, a) in &self.logterms {
            add(Poly::constant(c.clone()), Poly::linear(a));
        }
        Ok(MeromorphicForm::new(RationalFn::new(num, den)?))
    }

    /// Value at a point that is not a singularity.
    pub fn eval(&self, x: &PadicElement) -> Result<PadicElement> {
        let x = self.field.coerce(x)?;
        let mut acc = &self.poly.eval(&x) + &self.c_const;
        for (a, k, c) in &self.polar {
            acc = acc + c * &(&x - a).inv()?.pow(*k as i64);
        }
        for (c, a) in &self.logterms {
            acc = acc + c * &(&x - a).log(&self.branch)?;
        }
        Ok(acc)
    }

    pub fn with_constant(&self, c: &PadicElement) -> Result<Self> {
        let mut out = self.clone();
        out.c_const = self.field.coerce(c)?;
        Ok(out)
    }

    /// Expansion in `w = t − x`, or in `u = 1/t` at `∞`, known below `w^high`.
    pub fn expand_at(&self, x: &PointP1, high: i64) -> Result<A1Element> {
        let l = &self.field;
        if high < 1 {
            return Err(Error::WindowUnderflow(format!("window {high}")));
        }
        let n = high as usize;
        let mut f = LaurentTrunc::monomial(self.c_const.clone(), 0, high);
        let mut la = l.zero();
        match x {
            PointP1::Finite(x) => {
                let x = l.coerce(x)?;
                let shifted = self.poly.compose_linear(&x, &l.one());
                f = f.add(&exact_series(l, 0, shifted.coeffs().to_vec(), high));
                for (a, k, c) in &self.polar {
                    let d = &x - a;
                    let k = *k as i64;
                    if d.is_zero() {
                        f = f.add(&LaurentTrunc::monomial(c.clone(), -k, high));
                    } else {
                        // (d + w)^{-k} = d^{-k} (1 − (−1/d) w)^{-k}
                        let r = -&d.inv()?;
                        let s = neg_binomial(l, k as usize, &r, n);
                        let s = series(l, 0, s).scale(&(c * &d.inv()?.pow(k)));
                        f = f.add(&s);
                    }
                }
                for (c, a) in &self.logterms {
                    let d = &x - a;
                    if d.is_zero() {
                        la = la + c;
                    } else {
                        // log(d + w) = log d − (−log(1 − (−1/d) w))
                        let r = -&d.inv()?;
                        let mut s = neg_log_one_minus(l, &r, n);
                        for t in s.iter_mut() {
                            *t = -&*t;
                        }
                        s[0] = d.log(&self.branch)?;
                        f = f.add(&series(l, 0, s).scale(c));
                    }
                }
            }
            PointP1::Infinity => {
                let deg = self.poly.degree();
                if deg >= 0 {
                    let c: Vec<_> = self.poly.coeffs().iter().rev().cloned().collect();
                    f = f.add(&exact_series(l, -deg as i64, c, high));
                }
                for (a, k, c) in &self.polar {
                    // (t − a)^{-k} = u^k (1 − a u)^{-k}
                    let k = *k as i64;
                    if k < high {
                        let s = neg_binomial(l, k as usize, a, (high - k) as usize);
                        f = f.add(&series(l, k, s).scale(c));
                    }
                }
                for (c, a) in &self.logterms {
                    // log(t − a) = −L + log(1 − a u)
                    la = la - c;
                    if !a.is_zero() {
                        let s = neg_log_one_minus(l, a, n);
                        f = f.sub(&series(l, 0, s).scale(c));
                    }
                }
            }
        }
        Ok(A1Element::new(f.truncate(high), la))
    }

    /// Pole order of the rational part at a point, used to size windows.
    fn order_at(&self, x: &PointP1) -> usize {
        match x {
            PointP1::Infinity => self.poly.degree().max(0) as usize,
            PointP1::Finite(x) => self
                .polar
                .iter()
                .filter(|(a, _, _)| (x - a).is_zero())
                .map(|(_, k, _)| *k)
                .max()
                .unwrap_or(0),
        }
    }
}

/// Per-point local indices together with their sum.
#[derive(Clone, Debug)]
pub struct GlobalIndex {
    pub field: LocalField,
    pub base: LocalField,
    pub locals: Vec<(PointP1, PadicElement)>,
    /// Sum of the local indices, in the splitting field.
    pub total_local: PadicElement,
    /// The same sum in the base field.
    pub total: PadicElement,
}

impl GlobalIndex {
    /// Smallest valuation among the local indices (0 if all vanish).
    pub fn scale(&self) -> i64 {
        self.locals
            .iter()
            .filter_map(|(_, v)| v.valuation_pi())
            .min()
            .unwrap_or(0)
            .min(0)
    }

    /// The sum is either visibly nonzero or known to `target` digits beyond
    /// the size of the local terms.
    fn conclusive(&self, target: i64) -> bool {
        let t = &self.total_local;
        match (t.valuation_pi(), t.abs_prec_pi()) {
            (Some(v), Some(a)) => v < a,
            (_, a) => a.is_none_or(|a| a >= self.scale() + target),
        }
    }

    /// The sum vanishes to `target` `π`-digits beyond the size of the local terms.
    pub fn vanishes(&self, target: i64) -> bool {
        let need = self.scale() + target;
        let t = &self.total_local;
        match t.valuation_pi() {
            Some(v) => v >= need,
            None => t.abs_prec_pi().is_none_or(|a| a >= need),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "points": self.locals.iter().map(|(x, v)| json!({
                "point": x.to_string(),
                "local_index": element_to_json(v),
            })).collect::<Vec<_>>(),
            "global": element_to_json(&self.total),
        })
    }
}

/// Sum of the local double indices of the primitives of `ω` and `η` over
/// every singular point of either form, including `∞`.
///
/// Forms built from rational data over `Q_p` are recomputed at 2, 4 and 8
/// times the field precision when close poles eat the digits needed to
/// decide vanishing at `prec − 4`; the local terms then live in the wider
/// field and `total` is brought back to the input field.
pub fn global_double_index(w: &MeromorphicForm, eta: &MeromorphicForm, branch: &LogBranch) -> Result<GlobalIndex> {
    let base = w.field().clone();
    let prec = base.prec();
    let target = prec as i64 * base.e() as i64 - 4;
    // distinct finite poles over an algebraic closure, known exactly for rational data
    let expected = match (&w.source, &eta.source) {
        (Some((na, a)), Some((nb, b))) => {
            let p = reduced_den(na, a)?.mul(&reduced_den(nb, b)?);
            let rad = p.divrem(&p.gcd(&p.derivative()))?.0;
            Some(rad.degree().max(0) as usize)
        }
        _ => None,
    };
    let settled = |g: &GlobalIndex| g.conclusive(target) && expected.is_none_or(|n| g.locals.len() == n + 1);
    let mut res = global_double_index_at(w, eta, branch);
    for k in [2, 4, 8] {
        match &res {
            Ok(g) if settled(g) => break,
            Ok(_) | Err(Error::PrecisionExhausted(_)) => {}
            Err(_) => break,
        }
        let (Some(w2), Some(e2)) = (w.at_precision(prec * k), eta.at_precision(prec * k)) else {
            break;
        };
        let (w2, e2) = (w2?, e2?);
        let br = LogBranch::new(w2.field().coerce(&branch.lambda)?);
        if let Ok(mut g) = global_double_index_at(&w2, &e2, &br) {
            g.total = base.coerce(&g.total)?;
            g.base = base.clone();
            res = Ok(g);
        }
    }
    match res {
        Ok(g) if !expected.is_none_or(|n| g.locals.len() == n + 1) => Err(Error::PrecisionExhausted(format!(
            "poles merge at this precision: found {} of {}",
            g.locals.len() - 1,
            expected.unwrap()
        ))),
        r => r,
    }
}

fn reduced_den(num: &QPoly, den: &QPoly) -> Result<QPoly> {
    if num.is_zero() {
        return Ok(QPoly::one());
    }
    Ok(den.divrem(&num.gcd(den))?.0)
}

fn global_double_index_at(w: &MeromorphicForm, eta: &MeromorphicForm, branch: &LogBranch) -> Result<GlobalIndex> {
    let base = w.field().clone();
    let eta_b = MeromorphicForm::new(eta.body.coerce(&base)?);
    let p = w.body.den().mul(eta_b.body.den());
    let sf = split(&base, &p)?;
    let pw = partial_fractions_in(w, &sf)?;
    let pe = partial_fractions_in(&eta_b, &sf)?;
    let fw = primitive_of(&pw, branch)?;
    let fe = primitive_of(&pe, branch)?;
    let mut points: Vec<PointP1> = sf.roots.iter().cloned().map(PointP1::Finite).collect();
    points.push(PointP1::Infinity);
    let l = sf.field.clone();
    let mut locals = Vec::with_capacity(points.len());
    let mut total = l.zero();
    for x in points {
        let ord = fw.order_at(&x).max(fe.order_at(&x)) as i64;
        let high = ord + MIN_OVERLAP + 4;
        let a = fw.expand_at(&x, high)?;
        let b = fe.expand_at(&x, high)?;
        let v = double_index(&a, &b)?;
        total = &total + &v;
        locals.push((x, v));
    }
    let total_base = if l == base {
        total.clone()
    } else {
        match descend(&total) {
            Ok(t) => t,
            Err(_) => {
                let n = base.from_int((l.degree() / base.degree()) as i64);
                trace(&total, &base)?.try_div(&n)?
            }
        }
    };
    Ok(GlobalIndex {
        field: l,
        base,
        locals,
        total_local: total,
        total: total_base,
    })
}

/// Nonzero residues, finite points first, then `∞`.
pub fn residue_divisor(w: &MeromorphicForm) -> Result<Vec<(PointP1, PadicElement)>> {
    let pf = partial_fractions(w)?;
    let mut out: Vec<(PointP1, PadicElement)> = pf
        .poles
        .iter()
        .filter(|p| !p.residue().is_zero())
        .map(|p| (PointP1::Finite(p.point.clone()), p.residue()))
        .collect();
    let inf = pf.residue_at_infinity();
    if !inf.is_zero() {
        out.push((PointP1::Infinity, inf));
    }
    Ok(out)
}

/// All residues vanish.
pub fn is_second_kind(w: &MeromorphicForm) -> Result<bool> {
    Ok(residue_divisor(w)?.is_empty())
}

/// Poles are simple everywhere, including `∞`.
pub fn is_third_kind(w: &MeromorphicForm) -> Result<bool> {
    if w.body.num().degree() - w.body.den().degree() > -1 {
        return Ok(false);
    }
    let pf = partial_fractions(w)?;
    Ok(pf.poles.iter().all(|p| p.order() == 1))
}

/// Polynomial in `t` and `s`: `coeffs[i]` multiplies `s^i`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BiPoly(pub Vec<QPoly>);

impl BiPoly {
    pub fn from_t(p: QPoly) -> Self {
        BiPoly(vec![p])
    }

    /// `s` itself.
    pub fn s() -> Self {
        BiPoly(vec![QPoly::zero(), QPoly::one()])
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.0.len().max(o.0.len());
        let z = QPoly::zero();
        BiPoly((0..n).map(|i| self.0.get(i).unwrap_or(&z).add(o.0.get(i).unwrap_or(&z))).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&BiPoly(o.0.iter().map(QPoly::neg).collect()))
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.0.is_empty() || o.0.is_empty() {
            return BiPoly::default();
        }
        let mut out = vec![QPoly::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        BiPoly(out)
    }

    pub fn eval_s(&self, s: &Q) -> QPoly {
        self.0
            .iter()
            .rev()
            .fold(QPoly::zero(), |acc, c| acc.scale(s).add(c))
    }

    pub fn d_ds(&self) -> Self {
        BiPoly(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.scale(&Q::from_integer((i as i64).into())))
                .collect(),
        )
    }
}

/// `num(t,s)/den(t,s)·dt`.
#[derive(Clone, Debug)]
pub struct FamilyForm {
    pub num: BiPoly,
    pub den: BiPoly,
}

fn qpoly_at_matrix(p: &QPoly, c: &QMat) -> QMat {
    let n = c.len();
    let mut acc: QMat = vec![vec![Q::from_integer(0.into()); n]; n];
    for coef in p.coeffs().iter().rev() {
        acc = mat_mul(&acc, c);
        for i in 0..n {
            acc[i][i] += coef;
        }
    }
    acc
}

/// Power sums `Σ r^k`, `k = 1..n`, of the residues of a form with simple
/// finite poles, computed without leaving `Q`.
pub fn residue_power_sums(num: &QPoly, den: &QPoly) -> Option<Vec<Q>> {
    let n = den.degree();
    if n < 1 {
        return Some(vec![]);
    }
    let n = n as usize;
    let lc = den.lead()?.clone();
    let d = den.monic();
    let nm = num.scale(&(Q::from_integer(1.into()) / lc));
    // companion matrix of d
    let mut c: QMat = vec![vec![Q::from_integer(0.into()); n]; n];
    for i in 1..n {
        c[i][i - 1] = Q::from_integer(1.into());
    }
    for i in 0..n {
        c[i][n - 1] = -d.coeff(i);
    }
    let dp = qpoly_at_matrix(&d.derivative(), &c);
    let r = mat_mul(&qpoly_at_matrix(&nm, &c), &inverse(&dp)?);
    let mut out = Vec::with_capacity(n);
    let mut rk = r.clone();
    for _ in 0..n {
        out.push((0..n).map(|i| rk[i][i].clone()).sum());
        rk = mat_mul(&rk, &r);
    }
    Some(out)
}

/// Number of parameter values at which the family's residues are compared.
pub const FAMILY_SAMPLES: i64 = 5;

/// `∂ω_s/∂s` at `s0` for a family of third-kind forms with constant residues.
pub fn family_derivative(field: &LocalField, fam: &FamilyForm, s0: &Q) -> Result<MeromorphicForm> {
    let mut reference: Option<(isize, Vec<Q>)> = None;
    for i in 0..FAMILY_SAMPLES {
        let s = s0 + Q::from_integer(i.into());
        let (n, d) = (fam.num.eval_s(&s), fam.den.eval_s(&s));
        if d.is_zero() || !d.is_squarefree() || n.degree() >= d.degree() {
            return Err(Error::NotThirdKindFamily);
        }
        let ps = residue_power_sums(&n, &d).ok_or(Error::NotThirdKindFamily)?;
        match &reference {
            None => reference = Some((d.degree(), ps)),
            Some((deg, r)) => {
                if *deg != d.degree() || *r != ps {
                    return Err(Error::NotThirdKindFamily);
                }
            }
        }
    }
    let (n, d) = (&fam.num, &fam.den);
    let top = n.d_ds().mul(d).sub(&n.mul(&d.d_ds()));
    let bottom = d.mul(d);
    MeromorphicForm::from_q(field, &top.eval_s(s0), &bottom.eval_s(s0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::{assert_equal, PrimeConfig};
    use crate::qpoly::{q, qr};

    fn k(p: u32) -> LocalField {
        LocalField::qp(PrimeConfig::new(p, 32).unwrap())
    }

    #[test]
    fn partial_fraction_examples() {
        let k = k(5);
        // dt/(t(t−1)) = −dlog t + dlog(t−1)
        let w = MeromorphicForm::from_ints(&k, &[1], &[0, -1, 1]).unwrap();
        let pf = partial_fractions(&w).unwrap();
        assert_eq!(pf.poles.len(), 2);
        for pole in &pf.poles {
            let want = if pole.point.is_zero() { -1 } else { 1 };
            assert!(assert_equal(&pole.residue(), &k.from_int(want), 28));
        }
        assert!(pf.residue_at_infinity().is_zero());
        // dt/t^2: no residue, primitive −1/t
        let w = MeromorphicForm::from_ints(&k, &[1], &[0, 0, 1]).unwrap();
        let pf = partial_fractions(&w).unwrap();
        assert_eq!(pf.poles[0].order(), 2);
        assert!(pf.poles[0].residue().is_zero());
        let f = primitive(&w, &LogBranch::iwasawa(&k)).unwrap();
        assert_eq!(f.polar.len(), 1);
        assert!(assert_equal(&f.polar[0].2, &k.from_int(-1), 28));
        // dt/(t^2−2) over Q_5 needs sqrt 2, residues ±1/(2√2)
        let w = MeromorphicForm::from_ints(&k, &[1], &[-2, 0, 1]).unwrap();
        let pf = partial_fractions(&w).unwrap();
        assert_eq!(pf.field.degree(), 2);
        for pole in &pf.poles {
            let r = pole.residue();
            let want = pole.point.scale_int(2).inv().unwrap();
            assert!(assert_equal(&r, &want, 28));
            assert!(assert_equal(&(&r * &r), &pf.field.from_ratio_i64(1, 8), 28));
        }
    }

    #[test]
    fn primitive_differentiates_back() {
        let k = k(7);
        let br = LogBranch::iwasawa(&k);
        // (3t^3 + 1)/((t−2)^2 (t+1))
        let den = QPoly::from_ints(&[-2, 1]).pow(2).mul(&QPoly::from_ints(&[1, 1]));
        let w = MeromorphicForm::from_q(&k, &QPoly::from_ints(&[1, 0, 0, 3]), &den).unwrap();
        let f = primitive(&w, &br).unwrap();
        let dw = f.differential().unwrap();
        for x in [3, 5, 11, -4] {
            let xx = k.from_int(x);
            assert!(assert_equal(&dw.body.eval(&xx).unwrap(), &w.body.eval(&xx).unwrap(), 26));
        }
        let t = primitive(&MeromorphicForm::from_ints(&k, &[1], &[1]).unwrap(), &br).unwrap();
        assert!(assert_equal(&t.poly.coeff(1), &k.one(), 28));
        let l = primitive(&MeromorphicForm::from_ints(&k, &[1], &[0, 1]).unwrap(), &br).unwrap();
        assert_eq!(l.logterms.len(), 1);
        assert!(l.logterms[0].1.is_zero());
    }

    #[test]
    fn expansions() {
        let k = k(5);
        let br = LogBranch::iwasawa(&k);
        let a = k.from_int(3);
        // log(t − 3)
        let f = primitive(&MeromorphicForm::from_ints(&k, &[1], &[-3, 1]).unwrap(), &br).unwrap();
        let at_a = f.expand_at(&PointP1::Finite(a.clone()), 10).unwrap();
        assert!(assert_equal(&at_a.a, &k.one(), 28));
        assert!(at_a.f.is_zero());
        let at0 = f.expand_at(&PointP1::Finite(k.zero()), 10).unwrap();
        assert!(at0.a.is_zero());
        assert!(assert_equal(&at0.f.coeff(0).unwrap(), &k.from_int(-3).log(&br).unwrap(), 26));
        // log(−3 + w) = log(−3) + log(1 − w/3): w coefficient −1/3, w^2 coefficient −1/18
        assert!(assert_equal(&at0.f.coeff(1).unwrap(), &k.from_ratio_i64(-1, 3), 28));
        assert!(assert_equal(&at0.f.coeff(2).unwrap(), &k.from_ratio_i64(-1, 18), 28));
        let inf = f.expand_at(&PointP1::Infinity, 10).unwrap();
        assert!(assert_equal(&inf.a, &k.from_int(-1), 28));
        assert!(assert_equal(&inf.f.coeff(1).unwrap(), &k.from_int(-3), 28));
        assert!(assert_equal(&inf.f.coeff(2).unwrap(), &k.from_ratio_i64(-9, 2), 28));
    }

    #[test]
    fn base_index_locals() {
        let k = k(7);
        let br = LogBranch::iwasawa(&k);
        let a = 10;
        let w = MeromorphicForm::from_ints(&k, &[1], &[0, 1]).unwrap();
        let eta = MeromorphicForm::from_ints(&k, &[1], &[-a, 1]).unwrap();
        let g = global_double_index(&w, &eta, &br).unwrap();
        assert_eq!(g.locals.len(), 3);
        for (x, v) in &g.locals {
            let want = match x {
                PointP1::Infinity => k.zero(),
                PointP1::Finite(t) if t.is_zero() => -k.from_int(-a).log(&br).unwrap(),
                PointP1::Finite(_) => k.from_int(a).log(&br).unwrap(),
            };
            assert!(assert_equal(v, &want, 26), "{x}");
        }
        assert!(g.vanishes(28));
    }

    #[test]
    fn second_kind_against_dlog() {
        let k = k(5);
        let br = LogBranch::iwasawa(&k);
        let w = MeromorphicForm::from_ints(&k, &[1], &[0, 0, 1]).unwrap();
        let eta = MeromorphicForm::from_ints(&k, &[1], &[-1, 1]).unwrap();
        let g = global_double_index(&w, &eta, &br).unwrap();
        for (x, v) in &g.locals {
            let want = match x {
                PointP1::Infinity => 0,
                PointP1::Finite(t) if t.is_zero() => 1,
                PointP1::Finite(_) => -1,
            };
            assert!(assert_equal(v, &k.from_int(want), 28), "{x}");
        }
        assert!(g.vanishes(28));
    }

    #[test]
    fn cancelled_factor_is_not_a_pole() {
        let k = k(2);
        let br = LogBranch::iwasawa(&k);
        // (t−4) dt / ((t−4)(t−8)) has a single finite pole
        let w = MeromorphicForm::from_ints(&k, &[-4, 1], &[32, -12, 1]).unwrap();
        let eta = MeromorphicForm::from_ints(&k, &[1], &[0, 0, 1]).unwrap();
        let g = global_double_index(&w, &eta, &br).unwrap();
        assert_eq!(g.locals.len(), 3);
        assert!(g.vanishes(28));
    }

    #[test]
    fn antisymmetric_and_ramified() {
        let k = k(5);
        let br = LogBranch::iwasawa(&k);
        let w = MeromorphicForm::from_ints(&k, &[1, 2], &[-5, 0, 1]).unwrap();
        let eta = MeromorphicForm::from_ints(&k, &[3], &[-2, 0, 1]).unwrap();
        let a = global_double_index(&w, &eta, &br).unwrap();
        let b = global_double_index(&eta, &w, &br).unwrap();
        assert!(a.vanishes(28), "{:?}", a.total_local);
        assert!(assert_equal(&a.total_local, &-&b.total_local, 28) || (a.vanishes(28) && b.vanishes(28)));
        assert_eq!(a.field.degree(), 4);
    }

    #[test]
    fn residue_divisor_examples() {
        let k = k(5);
        let w = MeromorphicForm::dlog(&k, &QPoly::from_ints(&[0, -1, 1])).unwrap();
        let rd = residue_divisor(&w).unwrap();
        assert_eq!(rd.len(), 3);
        assert!(rd.iter().any(|(x, r)| matches!(x, PointP1::Infinity) && assert_equal(r, &k.from_int(-2), 28)));
        assert!(is_third_kind(&w).unwrap());
        let w2 = MeromorphicForm::from_ints(&k, &[1], &[0, 0, 1]).unwrap();
        assert!(is_second_kind(&w2).unwrap());
        assert!(!is_third_kind(&w2).unwrap());
        // dlog(t − a) has residue −1 at ∞
        let rd = residue_divisor(&MeromorphicForm::dlog(&k, &QPoly::from_ints(&[-4, 1])).unwrap()).unwrap();
        assert!(assert_equal(&rd[1].1, &k.from_int(-1), 28));
    }

    #[test]
    fn family_examples() {
        let k = k(5);
        // dlog(t − s)
        let fam = FamilyForm {
            num: BiPoly::from_t(QPoly::one()),
            den: BiPoly::from_t(QPoly::x()).sub(&BiPoly::s()),
        };
        let d = family_derivative(&k, &fam, &qr(1, 3)).unwrap();
        let want = MeromorphicForm::from_q(&k, &QPoly::one(), &QPoly::new(vec![qr(-1, 3), q(1)]).pow(2)).unwrap();
        for x in [2, 7] {
            let xx = k.from_int(x);
            assert!(assert_equal(&d.body.eval(&xx).unwrap(), &want.body.eval(&xx).unwrap(), 28));
        }
        assert!(is_second_kind(&d).unwrap());
        // constant family
        let c = FamilyForm {
            num: BiPoly::from_t(QPoly::one()),
            den: BiPoly::from_t(QPoly::x()),
        };
        assert!(family_derivative(&k, &c, &q(0)).unwrap().body.num().is_zero());
        // s·dlog t
        let bad = FamilyForm {
            num: BiPoly::s(),
            den: BiPoly::from_t(QPoly::x()),
        };
        assert_eq!(family_derivative(&k, &bad, &q(2)).unwrap_err(), Error::NotThirdKindFamily);
    }

    #[test]
    fn power_sums_of_residues() {
        // dlog(t(t−1)(t+2)) has residues 1, 1, 1
        let f = QPoly::from_ints(&[0, -2, 1, 1]);
        let ps = residue_power_sums(&f.derivative(), &f).unwrap();
        assert_eq!(ps, vec![q(3), q(3), q(3)]);
        // dt/(t^2 − 2): residues ±1/(2√2)
        let ps = residue_power_sums(&QPoly::one(), &QPoly::from_ints(&[-2, 0, 1])).unwrap();
        assert_eq!(ps, vec![q(0), qr(1, 4)]);
    }

    #[test]
    fn mobius_pullback_of_dlog() {
        let k = k(7);
        let w = MeromorphicForm::from_ints(&k, &[1], &[0, 1]).unwrap();
        // t ↦ 1/t sends dt/t to −dt/t
        let (z, o) = (k.zero(), k.one());
        let p = w.pullback_mobius([&z, &o, &o, &z]).unwrap();
        let x = k.from_int(3);
        assert!(assert_equal(&p.body.eval(&x).unwrap(), &k.from_ratio_i64(-1, 3), 28));
    }
}
