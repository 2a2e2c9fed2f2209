//! Global bookkeeping over `F = Q` with one place above `p`: idele class
//! characters, Arakelov divisors and their intersection pairing, degrees of
//! metrized lines, determinant-line log functions, and the adjunction and
//! Riemann-Roch identity checks.
//!
//! Finite intersection numbers are input data. Place labels are `"q=<prime>"`
//! for finite places and the curve's place label (usually `"p"`) above `p`.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::green::{pairing_from_green, random_element, DivisorFormal, GreenTable};
use crate::padic::fq::prime_factors;
use crate::padic::linalg;
use crate::padic::serial::element_to_json;
use crate::padic::{descend, embeddings, norm, parse_scalar, trace, LocalField, LogBranch, PadicElement, PrimeConfig};
use crate::qpoly::{q, rat_valuation, Q};

fn el(x: &PadicElement) -> Value {
    element_to_json(x)
}

fn target_of(field: &LocalField) -> i64 {
    field.e() as i64 * (field.prec() as i64 - 4)
}

fn is_small_zero(x: &PadicElement, target: i64) -> bool {
    x.eq_to(&x.field().zero(), target)
}

/// Exponents of the primes dividing a nonzero rational.
pub fn factor(x: &Q) -> Result<BTreeMap<u64, i64>> {
    if x.is_zero() {
        return Err(Error::ZeroArgument);
    }
    let small = |n: &BigInt| {
        n.abs()
            .to_u64()
            .ok_or_else(|| Error::InvalidInput(format!("{n} is too large to factor")))
    };
    let mut out = BTreeMap::new();
    for n in [x.numer(), x.denom()] {
        for pr in prime_factors(small(n)?) {
            out.insert(pr, rat_valuation(x, pr as u32));
        }
    }
    Ok(out)
}

/// Idele class character of `Q` with values in `Q_p`: `ℓ_q(q)` at primes
/// `q ≠ p` and `ℓ_p = t·log_λ` above `p`.
#[derive(Clone, Debug)]
pub struct IdeleCharacter {
    field: LocalField,
    pub t: PadicElement,
    pub lambda: PadicElement,
    pub finite: BTreeMap<u64, PadicElement>,
}

impl IdeleCharacter {
    pub fn new(field: &LocalField, t: PadicElement, lambda: PadicElement) -> Self {
        IdeleCharacter {
            field: field.clone(),
            t,
            lambda,
            finite: BTreeMap::new(),
        }
    }

    /// `t = 1`, `λ = 0` and `ℓ_q(q) = −log q` for the listed primes.
    pub fn standard(field: &LocalField, primes: &[u64]) -> Result<Self> {
        let mut c = IdeleCharacter::new(field, field.one(), field.zero());
        let br = c.branch();
        for &pr in primes {
            if pr != field.p() as u64 {
                c.finite.insert(pr, -field.from_int(pr as i64).log(&br)?);
            }
        }
        Ok(c)
    }

    pub fn zero(field: &LocalField, primes: &[u64]) -> Self {
        let mut c = IdeleCharacter::new(field, field.zero(), field.zero());
        for &pr in primes {
            if pr != field.p() as u64 {
                c.finite.insert(pr, field.zero());
            }
        }
        c
    }

    pub fn field(&self) -> &LocalField {
        &self.field
    }

    pub fn p(&self) -> u64 {
        self.field.p() as u64
    }

    pub fn branch(&self) -> LogBranch {
        LogBranch::new(self.lambda.clone())
    }

    /// Whether `t ∘ log` is nonzero on units.
    pub fn is_ramified(&self) -> bool {
        !self.t.is_zero()
    }

    pub fn ell_prime(&self, pr: u64) -> Result<&PadicElement> {
        self.finite
            .get(&pr)
            .ok_or_else(|| Error::UnknownPlace(format!("q={pr}")))
    }

    /// `t·log_λ(x)` at the place above `p`.
    pub fn ell_p(&self, x: &Q) -> Result<PadicElement> {
        Ok(&self.t * &self.field.from_ratio(x).log(&self.branch())?)
    }

    /// Per-place values `ℓ_v(x)` for `x ∈ Q^×`.
    pub fn contributions(&self, x: &Q) -> Result<Vec<(String, PadicElement)>> {
        let mut out = Vec::new();
        for (pr, k) in factor(x)? {
            if pr == self.p() {
                continue;
            }
            out.push((format!("q={pr}"), self.ell_prime(pr)?.scale_int(k)));
        }
        out.push((format!("p={}", self.p()), self.ell_p(x)?));
        Ok(out)
    }

    /// Reads `[character]` with keys `p`, `lambda`, optional `t` and
    /// `precision`, plus a `[character.finite]` table of tokens.
    pub fn from_toml(text: &str, default_prec: u32) -> Result<Self> {
        let bad = |m: String| Error::Parse(m);
        let doc: toml::Table = text.parse().map_err(|e| bad(format!("{e}")))?;
        let ch = doc
            .get("character")
            .and_then(|v| v.as_table())
            .ok_or_else(|| bad("missing [character]".into()))?;
        let p = ch
            .get("p")
            .and_then(|v| v.as_integer())
            .ok_or_else(|| bad("missing character.p".into()))?;
        let prec = ch
            .get("precision")
            .and_then(|v| v.as_integer())
            .map_or(default_prec, |x| x as u32);
        let field = LocalField::qp(PrimeConfig::new(p as u32, prec)?);
        let token = |key: &str, default: &str| -> Result<String> {
            match ch.get(key) {
                None => Ok(default.to_string()),
                Some(toml::Value::String(s)) => Ok(s.clone()),
                Some(toml::Value::Integer(i)) => Ok(i.to_string()),
                Some(_) => Err(bad(format!("character.{key} must be a string token"))),
            }
        };
        let iw = LogBranch::iwasawa(&field);
        let lambda = parse_scalar(&field, &token("lambda", "0")?, &iw)?;
        let t = parse_scalar(&field, &token("t", "1")?, &iw)?;
        let mut c = IdeleCharacter::new(&field, t, lambda);
        let br = c.branch();
        if let Some(fin) = ch.get("finite").and_then(|v| v.as_table()) {
            for (k, v) in fin {
                let pr: u64 = k.parse().map_err(|_| bad(format!("bad prime {k:?}")))?;
                let s = match v {
                    toml::Value::String(s) => s.clone(),
                    toml::Value::Integer(i) => i.to_string(),
                    _ => return Err(bad(format!("bad value for prime {pr}"))),
                };
                c.finite.insert(pr, parse_scalar(&field, &s, &br)?);
            }
        }
        Ok(c)
    }
}

#[derive(Clone, Debug)]
pub struct CharacterRow {
    pub generator: Q,
    pub contributions: Vec<(String, PadicElement)>,
    pub residual: PadicElement,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct CharacterReport {
    pub p: u64,
    pub target: i64,
    pub ramified: bool,
    pub rows: Vec<CharacterRow>,
}

impl CharacterReport {
    pub fn pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let contrib: serde_json::Map<String, Value> =
                    r.contributions.iter().map(|(k, v)| (k.clone(), el(v))).collect();
                json!({
                    "generator": r.generator.to_string(),
                    "contributions": contrib,
                    "residual": el(&r.residual),
                    "pass": r.pass,
                })
            })
            .collect();
        json!({
            "p": self.p,
            "target": self.target,
            "ramified": self.ramified,
            "generators": rows,
            "pass": self.pass(),
        })
    }
}

/// Checks `Σ_v ℓ_v(f) = 0` for each generator.
pub fn validate_character(ell: &IdeleCharacter, generators: &[Q]) -> Result<CharacterReport> {
    let target = target_of(&ell.field);
    let mut rows = Vec::new();
    for f in generators {
        let contributions = ell.contributions(f)?;
        let residual: PadicElement = contributions.iter().map(|(_, v)| v.clone()).sum();
        let pass = is_small_zero(&residual, target);
        rows.push(CharacterRow {
            generator: f.clone(),
            contributions,
            residual,
            pass,
        });
    }
    Ok(CharacterReport {
        p: ell.p(),
        target,
        ramified: ell.is_ramified(),
        rows,
    })
}

/// Finite components with multiplicities plus `λ_v X_v` at places above `p`.
#[derive(Clone, Debug, Default)]
pub struct ArakelovDivisor {
    pub components: BTreeMap<String, i64>,
    pub infinite: BTreeMap<String, PadicElement>,
}

impl ArakelovDivisor {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn component(mut self, label: &str, n: i64) -> Self {
        *self.components.entry(label.to_string()).or_insert(0) += n;
        self.components.retain(|_, m| *m != 0);
        self
    }

    pub fn fiber(mut self, place: &str, lambda: PadicElement) -> Self {
        let v = match self.infinite.remove(place) {
            Some(old) => old + lambda,
            None => lambda,
        };
        self.infinite.insert(place.to_string(), v);
        self
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (c, n) in &o.components {
            out = out.component(c, *n);
        }
        for (v, l) in &o.infinite {
            out = out.fiber(v, l.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        ArakelovDivisor {
            components: self.components.iter().map(|(c, n)| (c.clone(), -n)).collect(),
            infinite: self.infinite.iter().map(|(v, l)| (v.clone(), -l)).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    /// Restriction to the generic fiber.
    pub fn generic(&self, curve: &CurveData) -> DivisorFormal {
        let mut d = DivisorFormal::zero();
        for (c, n) in &self.components {
            if curve.horizontal.contains(c) {
                d.add_point(c, *n);
            }
        }
        d
    }

    pub fn generic_degree(&self, curve: &CurveData) -> i64 {
        self.generic(curve).degree()
    }

    fn lambda_at(&self, place: &str, field: &LocalField) -> PadicElement {
        self.infinite.get(place).cloned().unwrap_or_else(|| field.zero())
    }

    pub fn to_json(&self) -> Value {
        let comps: Vec<Value> = self.components.iter().map(|(c, n)| json!([c, n])).collect();
        let inf: serde_json::Map<String, Value> = self.infinite.iter().map(|(v, l)| (v.clone(), el(l))).collect();
        json!({ "finite": comps, "infinite": inf })
    }
}

/// Arithmetic surface data: genus, Green tables at places above `p`, which
/// components are horizontal, and finite intersection numbers.
#[derive(Clone, Debug)]
pub struct CurveData {
    pub genus: u32,
    pub field: LocalField,
    pub tables: BTreeMap<String, Option<GreenTable>>,
    pub horizontal: BTreeSet<String>,
    pub finite: BTreeMap<(String, String), BTreeMap<u64, i64>>,
}

fn pair_key(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

impl CurveData {
    pub fn new(field: &LocalField, genus: u32, place: &str, table: Option<GreenTable>) -> Result<Self> {
        if let Some(t) = &table {
            if t.genus() != genus {
                return Err(Error::InvalidInput(format!(
                    "table genus {} differs from curve genus {genus}",
                    t.genus()
                )));
            }
        }
        Ok(CurveData {
            genus,
            field: field.clone(),
            tables: BTreeMap::from([(place.to_string(), table)]),
            horizontal: BTreeSet::new(),
            finite: BTreeMap::new(),
        })
    }

    pub fn places(&self) -> impl Iterator<Item = &str> {
        self.tables.keys().map(String::as_str)
    }

    pub fn add_horizontal(&mut self, label: &str) {
        self.horizontal.insert(label.to_string());
    }

    /// Records `⟨A, B⟩_q = n`.
    pub fn set_finite(&mut self, a: &str, b: &str, pr: u64, n: i64) {
        self.finite.entry(pair_key(a, b)).or_default().insert(pr, n);
    }

    pub fn finite_numbers(&self, a: &str, b: &str) -> Option<&BTreeMap<u64, i64>> {
        self.finite.get(&pair_key(a, b))
    }

    pub fn table(&self, place: &str) -> Result<&GreenTable> {
        match self.tables.get(place) {
            None => Err(Error::UnknownPlace(place.to_string())),
            Some(None) => Err(Error::MissingOracle(place.to_string())),
            Some(Some(t)) => Ok(t),
        }
    }

    pub fn table_mut(&mut self, place: &str) -> Result<&mut GreenTable> {
        match self.tables.get_mut(place) {
            None => Err(Error::UnknownPlace(place.to_string())),
            Some(None) => Err(Error::MissingOracle(place.to_string())),
            Some(Some(t)) => Ok(t),
        }
    }
}

/// Intersection numbers of two sections `(x0 : x1)`, `(y0 : y1)` of `P¹` over
/// `Z` given by coprime integers: `v_q(x0 y1 − x1 y0)` for each prime `q`.
pub fn section_intersections(x: (i64, i64), y: (i64, i64)) -> Result<BTreeMap<u64, i64>> {
    let det = x.0 as i128 * y.1 as i128 - x.1 as i128 * y.0 as i128;
    if det == 0 {
        return Err(Error::OverlappingSupport(format!("({}:{})", x.0, x.1)));
    }
    let d = Q::from_integer(BigInt::from(det));
    factor(&d)
}

#[derive(Clone, Debug)]
pub struct IntersectionReport {
    pub per_place: Vec<(String, PadicElement)>,
    pub total: PadicElement,
}

impl IntersectionReport {
    pub fn to_json(&self) -> Value {
        let per: serde_json::Map<String, Value> = self.per_place.iter().map(|(k, v)| (k.clone(), el(v))).collect();
        json!({ "per_place": per, "total": el(&self.total) })
    }
}

/// `D·E = Σ_{q} ℓ_q(q)⟨D,E⟩_q + Σ_{v|p} t(⟨D,E⟩_v)`.
pub fn intersect(
    d: &ArakelovDivisor,
    e: &ArakelovDivisor,
    curve: &CurveData,
    ell: &IdeleCharacter,
) -> Result<IntersectionReport> {
    let field = &curve.field;
    let mut counts: BTreeMap<u64, i64> = BTreeMap::new();
    for (a, m) in &d.components {
        for (b, n) in &e.components {
            if let Some(nums) = curve.finite_numbers(a, b) {
                for (pr, k) in nums {
                    *counts.entry(*pr).or_insert(0) += k * m * n;
                }
            }
        }
    }
    let mut per_place = Vec::new();
    for (pr, k) in counts {
        if k != 0 {
            per_place.push((format!("q={pr}"), ell.ell_prime(pr)?.scale_int(k)));
        }
    }
    let df = d.generic(curve);
    let ef = e.generic(curve);
    for v in curve.places() {
        let mut local = d.lambda_at(v, field).scale_int(ef.degree()) + e.lambda_at(v, field).scale_int(df.degree());
        if !df.is_zero() && !ef.is_zero() {
            local = local + pairing_from_green(curve.table(v)?, &df, &ef)?;
        }
        per_place.push((v.to_string(), &ell.t * &local));
    }
    let total = per_place.iter().map(|(_, x)| x.clone()).sum();
    Ok(IntersectionReport { per_place, total })
}

/// Data for `D·(f)` with `D` finite and disjoint from `div f`.
#[derive(Clone, Debug)]
pub struct PrincipalCase {
    /// `f(D) ∈ Q^×`.
    pub f_value: Q,
    pub deg_d: i64,
    /// `ι_log(f)` at the place above `p`.
    pub iota: PadicElement,
    /// `G_(f)(D)`.
    pub green_at_d: PadicElement,
    /// `⟨D, (f)_fin⟩_q`.
    pub finite: BTreeMap<u64, i64>,
}

#[derive(Clone, Debug)]
pub struct PrincipalReport {
    pub ledger: PadicElement,
    pub character: PadicElement,
    pub target: i64,
}

impl PrincipalReport {
    pub fn pass(&self) -> bool {
        is_small_zero(&self.ledger, self.target)
            && is_small_zero(&self.character, self.target)
            && self.ledger.eq_to(&self.character, self.target)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "ledger": el(&self.ledger),
            "character": el(&self.character),
            "pass": self.pass(),
        })
    }
}

/// `D·(f)` assembled from the ledger (with `ι_log(f) X_v` as the part at
/// infinity) and from the character sum over `f(D)`.
pub fn principal_check(case: &PrincipalCase, ell: &IdeleCharacter) -> Result<PrincipalReport> {
    let mut ledger = &ell.t * &(&case.green_at_d + &case.iota.scale_int(case.deg_d));
    for (pr, k) in &case.finite {
        if *k != 0 {
            ledger = ledger + ell.ell_prime(*pr)?.scale_int(*k);
        }
    }
    let character = ell.contributions(&case.f_value)?.into_iter().map(|(_, v)| v).sum();
    Ok(PrincipalReport {
        ledger,
        character,
        target: target_of(&ell.field),
    })
}

/// Consistent case: `G_(f)(D) = log f(D) − deg D · ι` and `⟨D,(f)_fin⟩_q = v_q(f(D))`.
pub fn synthetic_principal_case<R: Rng>(ell: &IdeleCharacter, rng: &mut R) -> Result<PrincipalCase> {
    let mut primes: Vec<u64> = ell.finite.keys().copied().collect();
    primes.push(ell.p());
    let mut f_value = q(if rng.gen_bool(0.5) { 1 } else { -1 });
    for pr in primes {
        let k: i32 = rng.gen_range(-2..=2);
        let base = q(pr as i64);
        f_value *= if k >= 0 { num_traits::pow(base, k as usize) } else { num_traits::pow(base.recip(), (-k) as usize) };
    }
    let deg_d = rng.gen_range(1..=4);
    let iota = random_element(&ell.field, rng);
    let log_fd = ell.field.from_ratio(&f_value).log(&ell.branch())?;
    let green_at_d = log_fd - iota.scale_int(deg_d);
    let finite = factor(&f_value)?.into_iter().filter(|(pr, _)| *pr != ell.p()).collect();
    Ok(PrincipalCase {
        f_value,
        deg_d,
        iota,
        green_at_d,
        finite,
    })
}

/// Rank-one projective `Z`-module `N = n·Z` with trivialization `θ(1) = theta`
/// and log function `log_N(x) = log x + log_offset` above `p`.
#[derive(Clone, Debug)]
pub struct MetrizedOFLine {
    pub generator: Q,
    pub theta: Q,
    pub log_offset: PadicElement,
}

impl MetrizedOFLine {
    /// `N = n·Z ⊂ Q` with the inclusion metric and `θ = id`.
    pub fn inclusion(field: &LocalField, generator: Q) -> Self {
        MetrizedOFLine {
            generator,
            theta: q(1),
            log_offset: field.zero(),
        }
    }

    pub fn rebase(&self, f: &Q) -> Self {
        MetrizedOFLine {
            theta: &self.theta * f,
            ..self.clone()
        }
    }
}

/// `t(log θ(1)) − Σ_q ℓ_q(θ_q^{-1} N_q)`.
pub fn deg_metrized_line(n: &MetrizedOFLine, ell: &IdeleCharacter) -> Result<PadicElement> {
    let field = &ell.field;
    let mut acc = &ell.t * &(field.from_ratio(&n.theta).log(&ell.branch())? + n.log_offset.clone());
    for (pr, k) in factor(&(&n.generator / &n.theta))? {
        if pr != ell.p() {
            acc = acc - ell.ell_prime(pr)?.scale_int(k);
        }
    }
    Ok(acc)
}

/// A `K'`-line with basis `e` and `log(x·e) = log x + offset`.
#[derive(Clone, Debug)]
pub struct MetrizedLine {
    pub offset: PadicElement,
}

/// Log function on `(U:V) = det U ⊗ det V^{-1}` evaluated at the element
/// built from the bases of `U` and `V`.
#[derive(Clone, Debug)]
pub struct DeterminantLine {
    pub base: LocalField,
    /// `β` at the reference element: `N_{K'/K}(α)`.
    pub beta: PadicElement,
    /// `tr_{K'/K} c`.
    pub shift: PadicElement,
    pub value: PadicElement,
}

/// `log∘β − tr c` for `α(e_U) = alpha·e_V`.
pub fn det_quotient_log(
    u: &MetrizedLine,
    v: &MetrizedLine,
    alpha: &PadicElement,
    base: &LocalField,
    branch: &LogBranch,
) -> Result<DeterminantLine> {
    let c = alpha.log(branch)? + v.offset.clone() - u.offset.clone();
    let beta = norm(alpha, base)?;
    let shift = trace(&c, base)?;
    let value = beta.log(branch)? - shift.clone();
    Ok(DeterminantLine {
        base: base.clone(),
        beta,
        shift,
        value,
    })
}

/// `log(∧ᵢ βᵢ x) = log det(σ_j(βᵢ)) + tr log x`, returned as an element of `K`.
pub fn det_k_log(
    x_log: &PadicElement,
    beta: &[PadicElement],
    base: &LocalField,
    branch: &LogBranch,
) -> Result<PadicElement> {
    let ext = beta
        .first()
        .ok_or_else(|| Error::InvalidInput("empty basis".into()))?
        .field()
        .clone();
    let n = ext.degree() / base.degree();
    if beta.len() != n {
        return Err(Error::InvalidInput(format!("basis has {} elements, need {n}", beta.len())));
    }
    let tr_x = trace(&ext.coerce(x_log)?, base)?;
    if &ext == base {
        return Ok(beta[0].log(branch)? + tr_x);
    }
    let sigmas = embeddings(&ext, &ext)?;
    if sigmas.len() < n {
        return Err(Error::NoSplitting);
    }
    let m: linalg::Matrix = beta
        .iter()
        .map(|b| sigmas.iter().map(|s| s.apply(b)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let det = linalg::det(&m)?;
    let lam = ext.coerce(&branch.lambda)?;
    let l = det.log(&LogBranch::new(lam))?;
    let down = if ext.base() == Some(base) {
        descend(&l)?
    } else {
        return Err(Error::Unsupported("only one-step extensions".into()));
    };
    Ok(down + tr_x)
}

/// Basis dual to `beta` under the trace form.
pub fn trace_dual_basis(beta: &[PadicElement], base: &LocalField) -> Result<Vec<PadicElement>> {
    let ext = beta[0].field().clone();
    let gram: linalg::Matrix = beta
        .iter()
        .map(|a| beta.iter().map(|b| trace(&(a * b), base)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let inv = linalg::inverse(&gram)?;
    inv.iter()
        .map(|row| {
            let mut acc = ext.zero();
            for (c, b) in row.iter().zip(beta) {
                acc = acc + ext.coerce(c)? * b.clone();
            }
            Ok(acc)
        })
        .collect()
}

/// `log ∧β + log ∧β'` for `β'` the trace-dual basis.
pub fn trace_dual_check(beta: &[PadicElement], base: &LocalField, branch: &LogBranch) -> Result<PadicElement> {
    let dual = trace_dual_basis(beta, base)?;
    let z = base.zero();
    Ok(det_k_log(&z, beta, base, branch)? + det_k_log(&z, &dual, base, branch)?)
}

#[derive(Clone, Debug)]
pub struct CodifferentReport {
    pub disc: i64,
    pub deg_w: PadicElement,
    /// Same degree through the determinant of the inverse trace-Gram matrix.
    pub deg_w_gram: PadicElement,
    pub d_e: PadicElement,
    pub chi: PadicElement,
}

impl CodifferentReport {
    pub fn consistent(&self) -> bool {
        self.deg_w.eq_to(&self.deg_w_gram, target_of(self.deg_w.field()))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "disc": self.disc,
            "deg_W": el(&self.deg_w),
            "deg_W_gram": el(&self.deg_w_gram),
            "d_E": el(&self.d_e),
            "chi": el(&self.chi),
            "consistent": self.consistent(),
        })
    }
}

fn squarefree(d: i64) -> bool {
    prime_factors(d.unsigned_abs())
        .iter()
        .all(|&pr| d.unsigned_abs() % (pr * pr) != 0)
}

/// Codifferent of `O_L` for `L = Q(√d)` (`d = 1` meaning `L = Q`), its degree
/// `d(E)` and `χ(O_L) = −½ deg W`.
pub fn codifferent_and_chi(d: i64, ell: &IdeleCharacter) -> Result<CodifferentReport> {
    let field = &ell.field;
    if d == 1 {
        let z = field.zero();
        return Ok(CodifferentReport {
            disc: 1,
            deg_w: z.clone(),
            deg_w_gram: z.clone(),
            d_e: z.clone(),
            chi: z,
        });
    }
    if d == 0 || !squarefree(d) {
        return Err(Error::InvalidInput(format!("{d} is not a squarefree integer ≠ 0, 1")));
    }
    // Integral basis {1, w} and the trace Gram matrix.
    let (gram, delta_norm) = if d.rem_euclid(4) == 1 {
        // w = (1 + √d)/2, different generated by √d
        ([[q(2), q(1)], [q(1), Q::new(BigInt::from(1 + d), BigInt::from(2))]], q(-d))
    } else {
        // w = √d, different generated by 2√d
        ([[q(2), q(0)], [q(0), q(2 * d)]], q(-4 * d))
    };
    let disc_q = &gram[0][0] * &gram[1][1] - &gram[0][1] * &gram[1][0];
    let disc = disc_q.to_integer().to_i64().unwrap();
    if disc.unsigned_abs() % ell.p() == 0 {
        return Err(Error::NonSupported(format!("Q(√{d}) is ramified at p = {}", ell.p())));
    }
    let via_norm = MetrizedOFLine::inclusion(field, delta_norm.recip());
    let deg_w = deg_metrized_line(&via_norm, ell)?;
    let inv = crate::qpoly::inverse(&gram.iter().map(|r| r.to_vec()).collect()).ok_or(Error::SingularDuality)?;
    let det_inv = &inv[0][0] * &inv[1][1] - &inv[0][1] * &inv[1][0];
    let deg_w_gram = deg_metrized_line(&MetrizedOFLine::inclusion(field, det_inv), ell)?;
    let chi = deg_w.try_div(&field.from_int(-2))?;
    Ok(CodifferentReport {
        disc,
        d_e: deg_w.clone(),
        deg_w,
        deg_w_gram,
        chi,
    })
}

/// `log` of the determinant of cohomology of a line bundle `L`, with `χ(L)`
/// and the generic degree.
#[derive(Clone, Debug)]
pub struct ChiState {
    pub euler: i64,
    pub degree: i64,
    pub log: PadicElement,
}

impl ChiState {
    /// `O_X` on a genus-`g` curve with reference value `log`.
    pub fn structure_sheaf(g: u32, log: PadicElement) -> Self {
        ChiState {
            euler: 1 - g as i64,
            degree: 0,
            log,
        }
    }

    /// Log function of `L` replaced by `log_L + α`.
    pub fn scale(&self, alpha: &PadicElement) -> Self {
        ChiState {
            log: &self.log + &alpha.scale_int(self.euler),
            ..self.clone()
        }
    }

    /// `O(D) → O(D+P)`; `fiber_log` is the log of the fiber `O(D+P)[P]`.
    pub fn add_point(&self, fiber_log: &PadicElement) -> Self {
        ChiState {
            euler: self.euler + 1,
            degree: self.degree + 1,
            log: &self.log + fiber_log,
        }
    }

    /// `O(D) → O(D−P)`; `fiber_log` is the log of the fiber `O(D)[P]`.
    pub fn remove_point(&self, fiber_log: &PadicElement) -> Self {
        ChiState {
            euler: self.euler - 1,
            degree: self.degree - 1,
            log: &self.log - fiber_log,
        }
    }
}

/// `d_v(E) = Σ_{i≠j} G(Pᵢ, P_j)` with multiplicities.
pub fn d_infinity(e: &DivisorFormal, table: &GreenTable) -> Result<PadicElement> {
    let pts: Vec<(&str, i64)> = e.terms().collect();
    let mut acc = table.field().zero();
    for (i, (a, m)) in pts.iter().enumerate() {
        for (j, (b, n)) in pts.iter().enumerate() {
            if i != j {
                acc = acc + table.get(a, b)?.scale_int(m * n);
            }
        }
    }
    Ok(acc)
}

/// `χ(O(D+E)) − χ(O(D))` for reduced horizontal `E = P_1 + … + P_k` in two
/// ways: adding the points one at a time, and as `χ(O(D+E)|_E) − ½ d_∞(E)`.
/// `fibers[j]` is the log of `O(D+E)[P_j]`.
pub fn restriction_two_paths(
    start: &ChiState,
    fibers: &[(String, PadicElement)],
    table: &GreenTable,
) -> Result<(PadicElement, PadicElement)> {
    let mut st = start.clone();
    for (j, (pj, x)) in fibers.iter().enumerate() {
        let mut f = x.clone();
        for (pi, _) in &fibers[j + 1..] {
            f = f - table.get(pi, pj)?.clone();
        }
        st = st.add_point(&f);
    }
    let seq = &st.log - &start.log;
    let mut e = DivisorFormal::zero();
    for (pj, _) in fibers {
        e.add_point(pj, 1);
    }
    let restricted: PadicElement = fibers.iter().map(|(_, x)| x.clone()).sum();
    let direct = restricted - d_infinity(&e, table)?.try_div(&table.field().from_int(2))?;
    Ok((seq, direct))
}

/// Everything the adjunction and Riemann-Roch checks read.
#[derive(Clone, Debug)]
pub struct SurfaceState {
    pub curve: CurveData,
    pub ell: IdeleCharacter,
    pub omega: ArakelovDivisor,
    pub e: ArakelovDivisor,
    /// `E·E`.
    pub e_self: Option<PadicElement>,
    /// `d(E)`.
    pub d_e: Option<PadicElement>,
}

impl SurfaceState {
    /// `Σ_{v|p} t(d_v(E))`.
    pub fn d_inf(&self) -> Result<PadicElement> {
        let ef = self.e.generic(&self.curve);
        let mut acc = self.curve.field.zero();
        for v in self.curve.places() {
            acc = acc + &self.ell.t * &d_infinity(&ef, self.curve.table(v)?)?;
        }
        Ok(acc)
    }

    fn need(x: &Option<PadicElement>, what: &str) -> Result<PadicElement> {
        x.clone().ok_or_else(|| Error::MissingIngredient(what.to_string()))
    }
}

#[derive(Clone, Debug)]
pub struct AdjunctionReport {
    pub omega_e: PadicElement,
    pub e_e: PadicElement,
    pub d_e: PadicElement,
    pub d_inf: PadicElement,
    pub residual: PadicElement,
}

impl AdjunctionReport {
    pub fn to_json(&self) -> Value {
        json!({
            "omega.E": el(&self.omega_e),
            "E.E": el(&self.e_e),
            "d(E)": el(&self.d_e),
            "d_inf(E)": el(&self.d_inf),
            "residual": el(&self.residual),
        })
    }
}

/// `ω·E + E·E − d(E) − d_∞(E)`.
pub fn adjunction_check(st: &SurfaceState) -> Result<AdjunctionReport> {
    let e_e = SurfaceState::need(&st.e_self, "E.E")?;
    let d_e = SurfaceState::need(&st.d_e, "d(E)")?;
    let omega_e = intersect(&st.omega, &st.e, &st.curve, &st.ell)?.total;
    let d_inf = st.d_inf()?;
    let residual = &omega_e + &e_e - d_e.clone() - d_inf.clone();
    Ok(AdjunctionReport {
        omega_e,
        e_e,
        d_e,
        d_inf,
        residual,
    })
}

#[derive(Clone, Debug)]
pub struct RrDeltaReport {
    pub lhs: PadicElement,
    pub rhs: PadicElement,
    pub residual: PadicElement,
}

impl RrDeltaReport {
    pub fn to_json(&self) -> Value {
        json!({ "delta_lhs": el(&self.lhs), "delta_rhs": el(&self.rhs), "residual": el(&self.residual) })
    }
}

/// Change of both sides of Riemann-Roch when the horizontal `E` is added to `D`.
///
/// Left: `χ(O(D+E)|_E) − ½ d_∞(E)` with `χ(O(D+E)|_E) = (D+E)·E − ½ d(E)`.
/// Right: `½((D+E)·(D+E−ω) − D·(D−ω))` expanded bilinearly.
pub fn rr_delta_check(d: &ArakelovDivisor, st: &SurfaceState) -> Result<RrDeltaReport> {
    let e_e = SurfaceState::need(&st.e_self, "E.E")?;
    let d_e = SurfaceState::need(&st.d_e, "d(E)")?;
    let field = &st.curve.field;
    let two = field.from_int(2);
    let d_dot_e = intersect(d, &st.e, &st.curve, &st.ell)?.total;
    let w_dot_e = intersect(&st.omega, &st.e, &st.curve, &st.ell)?.total;
    let restricted = &d_dot_e + &e_e - d_e.try_div(&two)?;
    let lhs = restricted - st.d_inf()?.try_div(&two)?;
    let rhs = d_dot_e + (e_e - w_dot_e).try_div(&two)?;
    Ok(RrDeltaReport {
        residual: &lhs - &rhs,
        lhs,
        rhs,
    })
}

/// A state whose Green tables, finite numbers and `ι` data are random while
/// `E·E` is fixed by adjunction.
pub fn synthetic_surface<R: Rng>(field: &LocalField, genus: u32, rng: &mut R) -> Result<(SurfaceState, ArakelovDivisor)> {
    let ell = IdeleCharacter::standard(field, &[2, 3, 5, 7, 11])?;
    let labels: Vec<String> = (0..8).map(|i| format!("H{i}")).collect();
    let table = crate::green::random_table(field, genus, &labels, rng);
    let mut curve = CurveData::new(field, genus, "p", Some(table))?;
    for l in &labels {
        curve.add_horizontal(l);
    }
    let primes: Vec<u64> = ell.finite.keys().copied().collect();
    let verticals = ["V0", "V1"];
    for (i, a) in labels.iter().map(String::as_str).chain(verticals).enumerate() {
        for b in labels.iter().map(String::as_str).chain(verticals).skip(i + 1) {
            if rng.gen_bool(0.5) {
                let pr = primes[rng.gen_range(0..primes.len())];
                curve.set_finite(a, b, pr, rng.gen_range(1..=3));
            }
        }
    }
    // E = H0 + H1 (+ H2), ω on H3..H5, D on H6, H7 and a vertical piece.
    let k = rng.gen_range(2..=3);
    let mut e = ArakelovDivisor::new();
    for l in &labels[..k] {
        e = e.component(l, 1);
    }
    let mut omega = ArakelovDivisor::new().fiber("p", random_element(field, rng));
    let canon = 2 * genus as i64 - 2;
    for i in 0..canon {
        omega = omega.component(&labels[3 + (i as usize % 3)], 1);
    }
    if canon == 0 {
        omega = omega.component("H3", 1).component("H4", -1);
    }
    let d = ArakelovDivisor::new()
        .component("H6", rng.gen_range(-2..=3))
        .component("H7", rng.gen_range(1..=2))
        .component("V0", rng.gen_range(-1..=1))
        .fiber("p", random_element(field, rng));
    let mut st = SurfaceState {
        curve,
        ell,
        omega,
        e,
        e_self: None,
        d_e: Some(random_element(field, rng)),
    };
    let w_e = intersect(&st.omega, &st.e, &st.curve, &st.ell)?.total;
    st.e_self = Some(st.d_e.clone().unwrap() + st.d_inf()? - w_e);
    Ok((st, d))
}

/// Class `a·c₁(L) + b·c₁(ω) + x·X_v` for the rescaling bookkeeping.
#[derive(Clone, Debug)]
struct SymClass {
    l: i64,
    w: i64,
    xv: PadicElement,
}

/// Base pairings `⟨c₁L, c₁L⟩, ⟨c₁L, c₁ω⟩, ⟨c₁ω, c₁ω⟩` under `G₁`.
#[derive(Clone, Debug)]
pub struct RescaleState {
    pub field: LocalField,
    pub place: String,
    pub ll: PadicElement,
    pub lw: PadicElement,
    pub ww: PadicElement,
}

#[derive(Clone, Debug)]
pub struct RescaleReport {
    pub delta_lhs: PadicElement,
    pub delta_rhs: PadicElement,
    pub residual: PadicElement,
}

impl RescaleState {
    fn pair(&self, a: &SymClass, b: &SymClass, d: i64, g: i64, c: &PadicElement) -> PadicElement {
        let deg = |s: &SymClass| s.l * d + s.w * (2 * g - 2);
        let base = self.ll.scale_int(a.l * b.l) + self.lw.scale_int(a.l * b.w + a.w * b.l) + self.ww.scale_int(a.w * b.w);
        base + a.xv.scale_int(deg(b)) + b.xv.scale_int(deg(a)) + c.scale_int(deg(a) * deg(b))
    }

    /// `χ(L) − χ(O)` through the chain `O → O(D)` by points, then the
    /// isometry `L ≅ O(D)`, with every Green value shifted by `c`.
    fn lhs(&self, c: &PadicElement, d: i64, g: u32, fibers: &[PadicElement]) -> PadicElement {
        let mut st = ChiState::structure_sheaf(g, self.field.zero());
        for (k, f) in fibers.iter().enumerate() {
            let shifted = |deg: i64| f + &c.scale_int(deg);
            st = if d >= 0 {
                st.add_point(&shifted(k as i64 + 1))
            } else {
                st.remove_point(&shifted(-(k as i64)))
            };
        }
        // log_{O(D)} moves by c·d; χ(L) − χ(O(D)) absorbs it with the opposite sign.
        let od = st.scale(&c.scale_int(d));
        let moved = &od.log - &st.log;
        st.log - moved
    }
}

/// Replays the normalization change `G → G + c` on both sides of
/// Riemann-Roch and compares the deltas.
pub fn rr_rescale_invariance(st: &RescaleState, v: &str, c: &PadicElement, d: i64, g: u32) -> Result<RescaleReport> {
    if v != st.place {
        return Err(Error::UnknownPlace(v.to_string()));
    }
    let field = &st.field;
    let gi = g as i64;
    let zero = field.zero();
    let fibers: Vec<PadicElement> = (0..d.unsigned_abs()).map(|k| field.from_int(3 * k as i64 + 1)).collect();
    let delta_lhs = st.lhs(c, d, g, &fibers) - st.lhs(&zero, d, g, &fibers);

    let l1 = SymClass { l: 1, w: 0, xv: zero.clone() };
    let lw1 = SymClass { l: 1, w: -1, xv: zero.clone() };
    let before = st.pair(&l1, &lw1, d, gi, &zero);
    let l2 = SymClass { l: 1, w: 0, xv: -c.scale_int(d) };
    let lw2 = SymClass {
        l: 1,
        w: -1,
        xv: &l2.xv + &c.scale_int(2 * gi - 1),
    };
    let after = st.pair(&l2, &lw2, d, gi, c);
    let delta_rhs = (after - before).try_div(&field.from_int(2))?;
    Ok(RescaleReport {
        residual: &delta_lhs - &delta_rhs,
        delta_lhs,
        delta_rhs,
    })
}

impl RescaleReport {
    pub fn to_json(&self) -> Value {
        json!({
            "delta_lhs": el(&self.delta_lhs),
            "delta_rhs": el(&self.delta_rhs),
            "residual": el(&self.residual),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::make_extension_int;
    use crate::qpoly::qr;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn qp(p: u32) -> LocalField {
        LocalField::qp(PrimeConfig::new(p, 32).unwrap())
    }

    fn close(x: &PadicElement, y: &PadicElement) {
        assert!(x.eq_to(y, 26), "{x:?} != {y:?}");
    }

    fn log_int(f: &LocalField, n: i64) -> PadicElement {
        f.from_int(n).log(&LogBranch::iwasawa(f)).unwrap()
    }

    #[test]
    fn standard_character_validates() {
        let f = qp(5);
        let ell = IdeleCharacter::standard(&f, &[2, 3]).unwrap();
        let gens = [q(2), q(3), qr(1, 2), q(-1), q(5)];
        assert!(validate_character(&ell, &gens).unwrap().pass());
        let z = IdeleCharacter::zero(&f, &[2, 3]);
        assert!(validate_character(&z, &gens).unwrap().pass());
        let mut bad = ell.clone();
        let v = bad.finite[&2].clone() + f.one();
        bad.finite.insert(2, v);
        let rep = validate_character(&bad, &[q(2)]).unwrap();
        assert!(!rep.pass());
        close(&rep.rows[0].residual, &f.one());
        assert_eq!(
            validate_character(&ell, &[q(7)]).unwrap_err(),
            Error::UnknownPlace("q=7".into())
        );
    }

    #[test]
    fn character_from_toml() {
        let text = "[character]\np = 5\nlambda = \"0\"\n[character.finite]\n2 = \"-log(2)\"\n3 = \"-log(3)\"\n";
        let ell = IdeleCharacter::from_toml(text, 32).unwrap();
        assert_eq!(ell.p(), 5);
        assert!(ell.is_ramified());
        assert!(validate_character(&ell, &[q(6), qr(5, 3)]).unwrap().pass());
        assert!(IdeleCharacter::from_toml("[character]\nlambda = \"0\"", 32).is_err());
    }

    #[test]
    fn intersection_examples() {
        let f = qp(5);
        let ell = IdeleCharacter::standard(&f, &[2, 3]).unwrap();
        let mut curve = CurveData::new(&f, 1, "p", None).unwrap();
        for l in ["A", "B", "C"] {
            curve.add_horizontal(l);
        }
        let lam1 = f.from_int(4);
        let lam2 = f.from_int(9);
        let x1 = ArakelovDivisor::new().fiber("p", lam1.clone());
        let x2 = ArakelovDivisor::new().fiber("p", lam2.clone());
        close(&intersect(&x1, &x2, &curve, &ell).unwrap().total, &f.zero());
        let d = ArakelovDivisor::new().component("A", 2).component("B", 1);
        close(&intersect(&d, &x2, &curve, &ell).unwrap().total, &lam2.scale_int(3));
        // Two horizontal divisors need the Green table.
        let e = ArakelovDivisor::new().component("C", 1);
        assert_eq!(
            intersect(&d, &e, &curve, &ell).unwrap_err(),
            Error::MissingOracle("p".into())
        );
    }

    #[test]
    fn intersection_against_hand_sum() {
        let f = qp(7);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (st, d) = synthetic_surface(&f, 2, &mut rng).unwrap();
        let curve = &st.curve;
        let ell = &st.ell;
        let got = intersect(&d, &st.e, curve, ell).unwrap().total;
        let sym = intersect(&st.e, &d, curve, ell).unwrap().total;
        close(&got, &sym);
        // Independent summation: every (component, component, prime) triple,
        // then the Green double sum and the fiber terms.
        let mut want = f.zero();
        for (a, m) in &d.components {
            for (b, n) in &st.e.components {
                let key = if a <= b { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) };
                if let Some(nums) = curve.finite.get(&key) {
                    for (pr, k) in nums {
                        want = want + ell.finite[pr].scale_int(k * m * n);
                    }
                }
                if curve.horizontal.contains(a) && curve.horizontal.contains(b) {
                    let t = curve.table("p").unwrap();
                    want = want + t.get(a, b).unwrap().scale_int(m * n);
                }
            }
        }
        let ef = st.e.generic(curve).degree();
        let df = d.generic(curve).degree();
        want = want + d.infinite["p"].scale_int(ef);
        if let Some(l) = st.e.infinite.get("p") {
            want = want + l.scale_int(df);
        }
        close(&got, &want);
    }

    #[test]
    fn sections_of_the_line() {
        let m = section_intersections((1, 0), (1, 12)).unwrap();
        assert_eq!(m, BTreeMap::from([(2, 2), (3, 1)]));
        assert!(section_intersections((2, 3), (4, 6)).is_err());
    }

    #[test]
    fn principal_examples() {
        let f = qp(5);
        let ell = IdeleCharacter::standard(&f, &[2, 3, 7]).unwrap();
        let one = PrincipalCase {
            f_value: q(1),
            deg_d: 2,
            iota: f.from_int(3),
            green_at_d: f.from_int(-6),
            finite: BTreeMap::new(),
        };
        assert!(principal_check(&one, &ell).unwrap().pass());
        let ten = PrincipalCase {
            f_value: q(10),
            deg_d: 1,
            iota: f.zero(),
            green_at_d: log_int(&f, 10),
            finite: BTreeMap::from([(2, 1)]),
        };
        let rep = principal_check(&ten, &ell).unwrap();
        assert!(rep.pass(), "{rep:?}");
        let mut broken = ten.clone();
        broken.iota = f.one();
        assert!(!principal_check(&broken, &ell).unwrap().pass());
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..5 {
            let c = synthetic_principal_case(&ell, &mut rng).unwrap();
            assert!(principal_check(&c, &ell).unwrap().pass());
        }
    }

    #[test]
    fn metrized_line_degrees() {
        let f = qp(5);
        let ell = IdeleCharacter::standard(&f, &[2, 3, 7]).unwrap();
        let triv = MetrizedOFLine::inclusion(&f, q(1));
        close(&deg_metrized_line(&triv, &ell).unwrap(), &f.zero());
        let two = MetrizedOFLine::inclusion(&f, q(2));
        let d = deg_metrized_line(&two, &ell).unwrap();
        close(&d, &log_int(&f, 2));
        close(&deg_metrized_line(&two.rebase(&q(3)), &ell).unwrap(), &d);
        close(&deg_metrized_line(&two.rebase(&qr(-14, 15)), &ell).unwrap(), &d);
    }

    fn q5_sqrt2() -> (LocalField, LocalField, PadicElement) {
        let f = qp(5);
        let k = make_extension_int(&f, &[-2, 0, 1]).unwrap();
        let s = k.generator().unwrap();
        (f, k, s)
    }

    #[test]
    fn determinant_logs() {
        let (f, k, s) = q5_sqrt2();
        let br = LogBranch::iwasawa(&f);
        let l2 = log_int(&f, 2);
        // (3/2) log 2 for the basis {1, √2}
        let v = det_k_log(&f.zero(), &[k.one(), s.clone()], &f, &br).unwrap();
        close(&v, &(l2.clone() * f.from_ratio_i64(3, 2)));
        // K' = K
        let x = f.from_int(6);
        close(&det_k_log(&f.zero(), &[x.clone()], &f, &br).unwrap(), &x.log(&br).unwrap());
        // a K-matrix M shifts by log det M
        let m = [[2, 1], [1, 3]];
        let b2 = [k.from_int(m[0][0]) + s.clone() * k.from_int(m[0][1]), k.from_int(m[1][0]) + s.clone() * k.from_int(m[1][1])];
        let w = det_k_log(&f.zero(), &b2, &f, &br).unwrap();
        close(&w, &(v.clone() + f.from_int(5).log(&br).unwrap()));

        let u = MetrizedLine { offset: k.zero() };
        let same = det_quotient_log(&u, &u, &k.one(), &f, &br).unwrap();
        close(&same.value, &f.zero());
        let alpha = k.from_int(3) + s.clone();
        let a = det_quotient_log(&u, &u, &alpha, &f, &br).unwrap();
        close(&a.value, &f.zero());
        let scaled = MetrizedLine { offset: k.coerce(&l2).unwrap() };
        let b = det_quotient_log(&scaled, &u, &alpha, &f, &br).unwrap();
        close(&b.value, &l2.scale_int(2));
    }

    #[test]
    fn trace_duals() {
        let (f, k, s) = q5_sqrt2();
        let br = LogBranch::iwasawa(&f);
        let basis = [k.one(), s.clone()];
        let dual = trace_dual_basis(&basis, &f).unwrap();
        close(&dual[0], &k.from_ratio_i64(1, 2));
        close(&dual[1], &(s.clone() * k.from_ratio_i64(1, 4)));
        close(&trace_dual_check(&basis, &f, &br).unwrap(), &f.zero());
        close(&trace_dual_check(&[f.one()], &f, &br).unwrap(), &f.zero());
        let b = [k.from_int(7) - s.clone(), k.from_int(2) + s.clone() * k.from_int(5)];
        close(&trace_dual_check(&b, &f, &br).unwrap(), &f.zero());
    }

    #[test]
    fn codifferents() {
        let f = qp(5);
        let ell = IdeleCharacter::standard(&f, &[2, 3]).unwrap();
        let r = codifferent_and_chi(-1, &ell).unwrap();
        let l2 = log_int(&f, 2);
        close(&r.deg_w, &l2.scale_int(-2));
        close(&r.chi, &l2);
        assert!(r.consistent());
        assert!(matches!(codifferent_and_chi(5, &ell), Err(Error::NonSupported(_))));
        let z = codifferent_and_chi(1, &ell).unwrap();
        close(&z.chi, &f.zero());
    }

    #[test]
    fn chi_rules_and_d_infinity() {
        let f = qp(3);
        let st = ChiState::structure_sheaf(2, f.zero());
        let a = f.from_int(5);
        close(&st.scale(&a).log, &a.scale_int(-1));
        let fib = f.from_int(7);
        let up = st.add_point(&fib);
        close(&up.remove_point(&fib).log, &st.log);
        assert_eq!(up.euler, 0);

        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let labels: Vec<String> = (0..4).map(|i| format!("P{i}")).collect();
        let t = crate::green::random_table(&f, 2, &labels, &mut rng);
        close(&d_infinity(&DivisorFormal::point("P0"), &t).unwrap(), &f.zero());
        let two = DivisorFormal::new(&[("P0", 1), ("P1", 1)]);
        close(&d_infinity(&two, &t).unwrap(), &t.get("P0", "P1").unwrap().scale_int(2));
        let fibers: Vec<(String, PadicElement)> =
            labels.iter().map(|l| (l.clone(), random_element(&f, &mut rng))).collect();
        let (x, y) = restriction_two_paths(&st, &fibers, &t).unwrap();
        close(&x, &y);
    }

    #[test]
    fn adjunction_and_rr() {
        let f = qp(5);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (st, d) = synthetic_surface(&f, 2, &mut rng).unwrap();
        let adj = adjunction_check(&st).unwrap();
        close(&adj.residual, &f.zero());
        let rr = rr_delta_check(&d, &st).unwrap();
        close(&rr.residual, &f.zero());

        // Perturbing G(H0, H1) by c moves only d_∞.
        let c = f.from_int(11);
        let mut pert = st.clone();
        let t = pert.curve.table_mut("p").unwrap();
        let old = t.get("H0", "H1").unwrap().clone();
        t.set("H0", "H1", old + c.clone());
        let r2 = adjunction_check(&pert).unwrap();
        close(&r2.residual, &(-c.scale_int(2)));

        let mut missing = st.clone();
        missing.d_e = None;
        assert_eq!(adjunction_check(&missing).unwrap_err(), Error::MissingIngredient("d(E)".into()));
    }

    #[test]
    fn rescale_grid() {
        let f = qp(7);
        let st = RescaleState {
            field: f.clone(),
            place: "p".into(),
            ll: f.from_int(3),
            lw: f.from_int(-2),
            ww: f.from_int(5),
        };
        for g in 1..=5u32 {
            for d in -5..=5i64 {
                let c = f.one();
                let r = rr_rescale_invariance(&st, "p", &c, d, g).unwrap();
                close(&r.residual, &f.zero());
                let closed = f.from_ratio_i64(-d * (d - 2 * g as i64 + 1), 2);
                close(&r.delta_rhs, &closed);
                let z = rr_rescale_invariance(&st, "p", &f.zero(), d, g).unwrap();
                close(&z.delta_lhs, &f.zero());
                close(&z.delta_rhs, &f.zero());
            }
        }
    }
}
