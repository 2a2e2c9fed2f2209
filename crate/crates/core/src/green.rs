//! Green functions as tables of values, the pairing they induce, and the
//! formula recovering `G(P, Q)` from integrals of third-kind forms.
//!
//! Diagonal entries `G(P, P)` are allowed. A [`TableOracle`] uses them as the
//! regularized self-values needed when an integration divisor meets the
//! support of the form; [`pairing_from_green`] never reads them.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use rand::Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::padic::serial::{element_from_json, element_to_json};
use crate::padic::{LocalField, PadicElement};
use crate::qpoly::Q;

/// Formal sum of labelled points.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DivisorFormal {
    terms: BTreeMap<String, i64>,
}

impl DivisorFormal {
    pub fn new<S: AsRef<str>>(terms: &[(S, i64)]) -> Self {
        let mut d = DivisorFormal::default();
        for (p, n) in terms {
            d.add_point(p.as_ref(), *n);
        }
        d
    }

    pub fn point(p: &str) -> Self {
        DivisorFormal::new(&[(p, 1)])
    }

    pub fn zero() -> Self {
        DivisorFormal::default()
    }

    pub fn add_point(&mut self, p: &str, n: i64) {
        let e = self.terms.entry(p.to_string()).or_insert(0);
        *e += n;
        if *e == 0 {
            self.terms.remove(p);
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut d = self.clone();
        for (p, n) in &o.terms {
            d.add_point(p, *n);
        }
        d
    }

    pub fn scale(&self, k: i64) -> Self {
        let mut d = DivisorFormal::zero();
        for (p, n) in &self.terms {
            d.add_point(p, n * k);
        }
        d
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(-1))
    }

    pub fn degree(&self) -> i64 {
        self.terms.values().sum()
    }

    pub fn is_degree_zero(&self) -> bool {
        self.degree() == 0
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn multiplicity(&self, p: &str) -> i64 {
        self.terms.get(p).copied().unwrap_or(0)
    }

    pub fn support(&self) -> BTreeSet<String> {
        self.terms.keys().cloned().collect()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&str, i64)> {
        self.terms.iter().map(|(p, n)| (p.as_str(), *n))
    }

    pub fn to_json(&self) -> Value {
        Value::Array(self.terms().map(|(p, n)| json!([p, n])).collect())
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = || Error::Parse("divisor must be a list of [label, multiplicity]".into());
        let mut d = DivisorFormal::zero();
        for t in v.as_array().ok_or_else(bad)? {
            let p = t.get(0).and_then(Value::as_str).ok_or_else(bad)?;
            let n = t.get(1).and_then(Value::as_i64).ok_or_else(bad)?;
            d.add_point(p, n);
        }
        Ok(d)
    }
}

fn key(p: &str, q: &str) -> (String, String) {
    if p <= q {
        (p.to_string(), q.to_string())
    } else {
        (q.to_string(), p.to_string())
    }
}

/// Symmetric table of Green values on a finite point set.
#[derive(Clone, Debug)]
pub struct GreenTable {
    field: LocalField,
    genus: u32,
    entries: BTreeMap<(String, String), PadicElement>,
    anchor: Option<(String, String)>,
}

impl GreenTable {
    pub fn new(field: &LocalField, genus: u32) -> Self {
        GreenTable {
            field: field.clone(),
            genus,
            entries: BTreeMap::new(),
            anchor: None,
        }
    }

    pub fn field(&self) -> &LocalField {
        &self.field
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn anchor(&self) -> Option<(&str, &str)> {
        self.anchor.as_ref().map(|(a, b)| (a.as_str(), b.as_str()))
    }

    /// Inserts `G(p, q) = G(q, p) = v`; a conflicting earlier value is an error.
    pub fn insert(&mut self, p: &str, q: &str, v: PadicElement) -> Result<()> {
        let k = key(p, q);
        if let Some(old) = self.entries.get(&k) {
            if !old.eq_to(&v, self.field.prec() as i64) {
                return Err(Error::InvalidInput(format!("asymmetric entries for ({p}, {q})")));
            }
        }
        self.entries.insert(k, v);
        Ok(())
    }

    pub fn set(&mut self, p: &str, q: &str, v: PadicElement) {
        self.entries.insert(key(p, q), v);
    }

    pub fn get(&self, p: &str, q: &str) -> Result<&PadicElement> {
        self.entries
            .get(&key(p, q))
            .ok_or_else(|| Error::MissingTableEntry(p.to_string(), q.to_string()))
    }

    pub fn labels(&self) -> BTreeSet<String> {
        self.entries
            .keys()
            .flat_map(|(a, b)| [a.clone(), b.clone()])
            .collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, &str, &PadicElement)> {
        self.entries.iter().map(|((a, b), v)| (a.as_str(), b.as_str(), v))
    }

    /// Sets the anchor and subtracts `G(a, b)` from every entry.
    pub fn normalize(&mut self, a: &str, b: &str) -> Result<()> {
        let c = self.get(a, b)?.clone();
        for v in self.entries.values_mut() {
            *v = &*v - &c;
        }
        self.anchor = Some((a.to_string(), b.to_string()));
        Ok(())
    }

    /// Adds `c` to every entry, diagonal included.
    pub fn shifted(&self, c: &PadicElement) -> GreenTable {
        let mut t = self.clone();
        for v in t.entries.values_mut() {
            *v = &*v + c;
        }
        t.anchor = None;
        t
    }

    pub fn to_json(&self) -> Value {
        let entries: Vec<Value> = self
            .entries
            .iter()
            .map(|((a, b), v)| json!([a, b, element_to_json(v)]))
            .collect();
        let mut out = json!({ "genus": self.genus, "entries": entries });
        if let Some((a, b)) = &self.anchor {
            out["anchor"] = json!([a, b]);
        }
        out
    }

    /// Reads the JSON table format. Values are rational strings or element
    /// objects; an anchor is checked to have value zero.
    pub fn from_json(field: &LocalField, v: &Value) -> Result<Self> {
        let bad = |m: &str| Error::Parse(m.to_string());
        let genus = v.get("genus").and_then(Value::as_u64).ok_or_else(|| bad("missing genus"))?;
        if genus == 0 {
            return Err(bad("genus must be at least 1"));
        }
        let mut t = GreenTable::new(field, genus as u32);
        let entries = v.get("entries").and_then(Value::as_array).ok_or_else(|| bad("missing entries"))?;
        for e in entries {
            let a = e.get(0).and_then(Value::as_str).ok_or_else(|| bad("entry label"))?;
            let b = e.get(1).and_then(Value::as_str).ok_or_else(|| bad("entry label"))?;
            let val = e.get(2).ok_or_else(|| bad("entry value"))?;
            let x = match val {
                Value::String(s) => {
                    let r: Q = s.trim().parse().map_err(|_| bad("entry value is not a rational"))?;
                    field.from_ratio(&r)
                }
                Value::Number(n) => field.from_int(n.as_i64().ok_or_else(|| bad("entry value"))?),
                other => element_from_json(field, other)?,
            };
            t.insert(a, b, x)?;
        }
        if let Some(anc) = v.get("anchor") {
            let a = anc.get(0).and_then(Value::as_str).ok_or_else(|| bad("anchor"))?;
            let b = anc.get(1).and_then(Value::as_str).ok_or_else(|| bad("anchor"))?;
            if !t.get(a, b)?.eq_to(&field.zero(), field.prec() as i64) {
                return Err(Error::InvalidInput(format!("anchor ({a}, {b}) is not normalized")));
            }
            t.anchor = Some((a.to_string(), b.to_string()));
        }
        Ok(t)
    }
}

/// Source of the integrals `∫_E ω_D` for degree-zero `D`.
pub trait HeightOracle {
    fn field(&self) -> &LocalField;
    fn integrate(&self, d_res: &DivisorFormal, e: &DivisorFormal) -> Result<PadicElement>;
}

/// Oracle reading integrals off a [`GreenTable`], diagonal entries included.
pub struct TableOracle<'a> {
    pub table: &'a GreenTable,
}

impl HeightOracle for TableOracle<'_> {
    fn field(&self) -> &LocalField {
        &self.table.field
    }

    fn integrate(&self, d_res: &DivisorFormal, e: &DivisorFormal) -> Result<PadicElement> {
        if !d_res.is_degree_zero() {
            return Err(Error::DegreeMismatch {
                expected: 0,
                found: d_res.degree(),
            });
        }
        double_sum(self.table, d_res, e)
    }
}

fn double_sum(table: &GreenTable, d: &DivisorFormal, e: &DivisorFormal) -> Result<PadicElement> {
    let mut acc = table.field.zero();
    for (p, n) in d.terms() {
        for (q, m) in e.terms() {
            acc = acc + table.get(p, q)?.scale_int(n * m);
        }
    }
    Ok(acc)
}

/// `Σ nᵢ m_j G(Pᵢ, Q_j)` for divisors with disjoint support.
pub fn pairing_from_green(table: &GreenTable, d: &DivisorFormal, e: &DivisorFormal) -> Result<PadicElement> {
    if let Some(p) = d.support().intersection(&e.support()).next() {
        return Err(Error::OverlappingSupport(p.clone()));
    }
    double_sum(table, d, e)
}

/// Recovers `G(P, Q)` from integrals of `ω_{Q−b}` and `ω_{P−a}`; `div_w1` and
/// `div_w2` are canonical divisors with the residue condition at `(P, a)` and
/// `(Q, b)` respectively.
#[allow(clippy::too_many_arguments)]
pub fn green_from_formula(
    oracle: &dyn HeightOracle,
    g: u32,
    a: &str,
    b: &str,
    p: &str,
    q: &str,
    div_w1: &DivisorFormal,
    div_w2: &DivisorFormal,
) -> Result<PadicElement> {
    let canon = 2 * g as i64 - 2;
    for w in [div_w1, div_w2] {
        if w.degree() != canon {
            return Err(Error::DegreeMismatch {
                expected: canon,
                found: w.degree(),
            });
        }
    }
    let two_g = 2 * g as i64;
    let e1 = DivisorFormal::new(&[(p, two_g), (q, -1), (b, -1)]).sub(div_w2);
    let e2 = DivisorFormal::new(&[(b, two_g), (p, -1), (a, -1)]).sub(div_w1);
    let d1 = DivisorFormal::new(&[(q, 1), (b, -1)]);
    let d2 = DivisorFormal::new(&[(p, 1), (a, -1)]);
    for e in [&e1, &e2] {
        if !e.is_degree_zero() {
            return Err(Error::DegreeMismatch {
                expected: 0,
                found: e.degree(),
            });
        }
    }
    let s = oracle.integrate(&d1, &e1)? + oracle.integrate(&d2, &e2)?;
    s.try_div(&oracle.field().from_int(two_g))
}

/// `ι_log(f) = log f − G_(f)`.
pub fn iota_log(log_f: &PadicElement, g_principal: &PadicElement) -> PadicElement {
    log_f - g_principal
}

/// A Green table at one place together with the `ι` constants of metrized lines.
#[derive(Clone, Debug)]
pub struct GreenState {
    pub place: String,
    pub table: GreenTable,
    /// line label → (degree, ι constant)
    pub lines: BTreeMap<String, (i64, PadicElement)>,
    /// Multiple of `X_v` accumulated by the canonical class under rescaling.
    pub canonical_shift: PadicElement,
}

impl GreenState {
    pub fn new(place: &str, table: GreenTable) -> Self {
        let z = table.field.zero();
        GreenState {
            place: place.to_string(),
            table,
            lines: BTreeMap::new(),
            canonical_shift: z,
        }
    }

    pub fn pairing(&self, d: &DivisorFormal, e: &DivisorFormal) -> Result<PadicElement> {
        pairing_from_green(&self.table, d, e)
    }
}

/// Replaces `G` by `G + c` at place `v`.
pub fn rescale_green(state: &GreenState, v: &str, c: &PadicElement) -> Result<GreenState> {
    if v != state.place {
        return Err(Error::UnknownPlace(v.to_string()));
    }
    let mut out = state.clone();
    out.table = state.table.shifted(c);
    for (deg, iota) in out.lines.values_mut() {
        *iota = &*iota - &c.scale_int(*deg);
    }
    let g = state.table.genus as i64;
    out.canonical_shift = &state.canonical_shift - &c.scale_int(2 * g - 1);
    Ok(out)
}

/// Random element of `Z_p` (an integer below `p^prec`), embedded in `field`.
pub fn random_element<R: Rng>(field: &LocalField, rng: &mut R) -> PadicElement {
    let p = BigInt::from(field.p());
    let n = field.prec().min(24);
    let mut x = BigInt::from(0);
    for _ in 0..n {
        x = x * &p + BigInt::from(rng.gen_range(0..field.p()));
    }
    if rng.gen_bool(0.5) {
        x = -x;
    }
    field.from_bigint(&x)
}

/// Random symmetric table on `labels`, every pair and diagonal filled.
pub fn random_table<R: Rng>(field: &LocalField, genus: u32, labels: &[String], rng: &mut R) -> GreenTable {
    let mut t = GreenTable::new(field, genus);
    for (i, a) in labels.iter().enumerate() {
        for b in &labels[i..] {
            t.set(a, b, random_element(field, rng));
        }
    }
    t
}

/// Inputs for [`green_from_formula`] built so that a table oracle satisfies
/// the residue condition.
#[derive(Clone, Debug)]
pub struct FormulaCase {
    pub table: GreenTable,
    pub a: String,
    pub b: String,
    pub p: String,
    pub q: String,
    pub div_w1: DivisorFormal,
    pub div_w2: DivisorFormal,
}

impl FormulaCase {
    pub fn evaluate(&self) -> Result<PadicElement> {
        green_from_formula(
            &TableOracle { table: &self.table },
            self.table.genus,
            &self.a,
            &self.b,
            &self.p,
            &self.q,
            &self.div_w1,
            &self.div_w2,
        )
    }

    pub fn expected(&self) -> Result<PadicElement> {
        self.table.get(&self.p, &self.q).cloned()
    }

    /// The table JSON with a `"formula"` object naming the points and the
    /// two canonical divisors.
    pub fn to_json(&self) -> Value {
        let mut v = self.table.to_json();
        v["formula"] = json!({
            "a": self.a,
            "b": self.b,
            "P": self.p,
            "Q": self.q,
            "div_w1": self.div_w1.to_json(),
            "div_w2": self.div_w2.to_json(),
        });
        v
    }

    pub fn from_json(field: &LocalField, v: &Value) -> Result<Self> {
        let table = GreenTable::from_json(field, v)?;
        let f = v
            .get("formula")
            .ok_or_else(|| Error::Parse("missing \"formula\" object".into()))?;
        let label = |k: &str| -> Result<String> {
            f.get(k)
                .and_then(Value::as_str)
                .map(str::to_string)
                .ok_or_else(|| Error::Parse(format!("formula.{k} must be a label")))
        };
        let div = |k: &str| -> Result<DivisorFormal> {
            DivisorFormal::from_json(f.get(k).ok_or_else(|| Error::Parse(format!("missing formula.{k}")))?)
        };
        Ok(FormulaCase {
            table,
            a: label("a")?,
            b: label("b")?,
            p: label("P")?,
            q: label("Q")?,
            div_w1: div("div_w1")?,
            div_w2: div("div_w2")?,
        })
    }
}

/// Random table normalized at `(a, b)` with canonical divisors of degree
/// `2g − 2`; `G(P, P)` and `G(Q, Q)` are solved so the self-values match the
/// residue condition.
pub fn synthetic_formula_case<R: Rng>(field: &LocalField, genus: u32, rng: &mut R) -> Result<FormulaCase> {
    let canon = 2 * genus as usize - 2;
    let n_w = canon.max(1);
    let mut labels: Vec<String> = ["a", "b", "P", "Q"].iter().map(|s| s.to_string()).collect();
    labels.extend((0..2 * n_w).map(|i| format!("R{i}")));
    let mut table = random_table(field, genus, &labels, rng);
    table.normalize("a", "b")?;
    let mut canonical = |offset: usize| {
        let mut d = DivisorFormal::zero();
        let pool: Vec<&String> = labels[4 + offset * n_w..4 + (offset + 1) * n_w].iter().collect();
        for _ in 0..canon {
            d.add_point(pool[rng.gen_range(0..pool.len())], 1);
        }
        d
    };
    let div_w1 = canonical(0);
    let div_w2 = canonical(1);
    // Σ_x [G(Q,x) − G(b,x)] + G(Q,Q) − G(b,b) = 0, likewise P against a.
    for (pt, anchor, w) in [("Q", "b", &div_w2), ("P", "a", &div_w1)] {
        let mut s = table.get(anchor, anchor)?.clone();
        for (x, m) in w.terms() {
            s = s - (table.get(pt, x)? - table.get(anchor, x)?).scale_int(m);
        }
        table.set(pt, pt, s);
    }
    Ok(FormulaCase {
        table,
        a: "a".into(),
        b: "b".into(),
        p: "P".into(),
        q: "Q".into(),
        div_w1,
        div_w2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::PrimeConfig;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn close(x: &PadicElement, y: &PadicElement) {
        assert!(x.eq_to(y, 28), "{x:?} != {y:?}");
    }

    fn qp(p: u32) -> LocalField {
        LocalField::qp(PrimeConfig::new(p, 32).unwrap())
    }

    fn small_table(f: &LocalField) -> GreenTable {
        let v = json!({
            "genus": 1,
            "entries": [["P","Q","3"],["P","R","1/2"],["P","S","-4"],["Q","R","7"],["Q","S","5"],["R","S","2"]],
        });
        GreenTable::from_json(f, &v).unwrap()
    }

    #[test]
    fn pairing_examples() {
        let f = qp(5);
        let t = small_table(&f);
        let p = DivisorFormal::point("P");
        let qd = DivisorFormal::point("Q");
        close(&pairing_from_green(&t, &p, &qd).unwrap(), &f.from_int(3));
        let d = DivisorFormal::new(&[("P", 1), ("Q", -1)]);
        let e = DivisorFormal::new(&[("R", 1), ("S", -1)]);
        // G(P,R) − G(P,S) − G(Q,R) + G(Q,S) = 1/2 + 4 − 7 + 5
        close(&pairing_from_green(&t, &d, &e).unwrap(), &f.from_ratio_i64(5, 2));
        close(&pairing_from_green(&t, &e, &d).unwrap(), &f.from_ratio_i64(5, 2));
        assert_eq!(
            pairing_from_green(&t, &d, &p),
            Err(Error::OverlappingSupport("P".into()))
        );
        let x = DivisorFormal::point("X");
        assert!(matches!(pairing_from_green(&t, &x, &p), Err(Error::MissingTableEntry(..))));
    }

    #[test]
    fn table_json_round_trip_and_symmetry() {
        let f = qp(7);
        let t = small_table(&f);
        let back = GreenTable::from_json(&f, &t.to_json()).unwrap();
        close(back.get("S", "R").unwrap(), &f.from_int(2));
        let bad = json!({"genus": 1, "entries": [["P","Q","1"],["Q","P","2"]]});
        assert!(GreenTable::from_json(&f, &bad).is_err());
        let unnormalized = json!({"genus": 1, "entries": [["a","b","1"]], "anchor": ["a","b"]});
        assert!(GreenTable::from_json(&f, &unnormalized).is_err());
    }

    #[test]
    fn formula_reproduces_table() {
        let f = qp(3);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for g in 1..=3 {
            for _ in 0..4 {
                let case = synthetic_formula_case(&f, g, &mut rng).unwrap();
                let got = case.evaluate().unwrap();
                assert!(got.eq_to(&case.expected().unwrap(), 28), "g = {g}");
            }
        }
    }

    #[test]
    fn formula_at_anchor_and_degree_checks() {
        let f = qp(5);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let case = synthetic_formula_case(&f, 2, &mut rng).unwrap();
        let o = TableOracle { table: &case.table };
        let z = green_from_formula(&o, 2, "a", "b", "a", "b", &case.div_w1, &case.div_w2).unwrap();
        assert!(z.eq_to(&f.zero(), 28));
        let short = DivisorFormal::point("R0");
        assert_eq!(
            green_from_formula(&o, 2, "a", "b", "P", "Q", &short, &case.div_w2),
            Err(Error::DegreeMismatch { expected: 2, found: 1 })
        );
    }

    #[test]
    fn iota_and_rescale() {
        let f = qp(5);
        let lf = f.from_int(17);
        assert!(iota_log(&lf, &lf).is_zero());
        let c = f.from_int(4);
        assert_eq!(iota_log(&lf, &(&lf - &c)), c);

        let mut st = GreenState::new("p", small_table(&f));
        st.lines.insert("L".into(), (3, f.from_int(2)));
        let one = f.one();
        let r = rescale_green(&st, "p", &one).unwrap();
        let d = DivisorFormal::point("P");
        let e = DivisorFormal::point("Q");
        close(&r.pairing(&d, &e).unwrap(), &(st.pairing(&d, &e).unwrap() + one.clone()));
        close(&r.lines["L"].1, &f.from_int(-1));
        close(&r.canonical_shift, &f.from_int(-1));
        let id = rescale_green(&st, "p", &f.zero()).unwrap();
        close(&id.pairing(&d, &e).unwrap(), &st.pairing(&d, &e).unwrap());
        assert!(matches!(rescale_green(&st, "q", &one), Err(Error::UnknownPlace(_))));
    }
    #[test]
    fn formula_case_json_roundtrip() {
        let k = LocalField::qp(PrimeConfig::new(7, 32).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let c = synthetic_formula_case(&k, 2, &mut rng).unwrap();
        let back = FormulaCase::from_json(&k, &c.to_json()).unwrap();
        assert_eq!(back.div_w1, c.div_w1);
        assert!(back.evaluate().unwrap().eq_to(&c.expected().unwrap(), 28));
    }
}
