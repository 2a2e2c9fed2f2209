//! Difference operators `Dⁿ = Σ_I (−1)^{n−|I|} m_I^*` on functions over a
//! free module `Z^r` (or `Q^r`).

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Zero};
use rand::Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::padic::PadicElement;
use crate::qpoly::{q, Q};

pub type Point = Vec<Q>;

/// Values a [`GroupFunction`] may take.
pub trait Scalar: Clone {
    fn add(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }
}

impl Scalar for Q {
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
}

impl Scalar for PadicElement {
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        let f = self.field();
        self.eq_to(&f.zero(), f.e() as i64 * (f.prec() as i64 - 4))
    }
}

/// The group `Z^r` with componentwise addition.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AbelianModel {
    pub rank: usize,
}

impl AbelianModel {
    pub fn add(&self, a: &[Q], b: &[Q]) -> Point {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }

    pub fn zero(&self) -> Point {
        vec![Q::zero(); self.rank]
    }

    pub fn random_point<R: Rng>(&self, rng: &mut R, bound: i64) -> Point {
        (0..self.rank).map(|_| q(rng.gen_range(-bound..=bound))).collect()
    }
}

/// Polynomial in `r` variables over `Q`: exponent vector → coefficient.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MPoly {
    pub rank: usize,
    pub terms: BTreeMap<Vec<u32>, Q>,
}

impl MPoly {
    pub fn zero(rank: usize) -> Self {
        MPoly {
            rank,
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(exps: &[u32], c: Q) -> Self {
        let mut m = MPoly::zero(exps.len());
        if !Zero::is_zero(&c) {
            m.terms.insert(exps.to_vec(), c);
        }
        m
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &o.terms {
            let v = out.terms.remove(e).unwrap_or_else(Q::zero) + c;
            if !Zero::is_zero(&v) {
                out.terms.insert(e.clone(), v);
            }
        }
        out
    }

    /// Total degree; `-1` for the zero polynomial.
    pub fn degree(&self) -> i64 {
        self.terms
            .keys()
            .map(|e| e.iter().map(|&k| k as i64).sum())
            .max()
            .unwrap_or(-1)
    }

    pub fn eval(&self, x: &[Q]) -> Q {
        let mut acc = Q::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (xi, &k) in x.iter().zip(e) {
                t *= num_traits::pow(xi.clone(), k as usize);
            }
            acc += t;
        }
        acc
    }

    /// All exponent vectors of total degree exactly `d`.
    pub fn exponents(rank: usize, d: u32) -> Vec<Vec<u32>> {
        if rank == 0 {
            return if d == 0 { vec![vec![]] } else { vec![] };
        }
        let mut out = Vec::new();
        for k in 0..=d {
            for mut rest in MPoly::exponents(rank - 1, d - k) {
                rest.insert(0, k);
                out.push(rest);
            }
        }
        out
    }

    /// Random polynomial of total degree at most `d` with every degree-`d`
    /// monomial allowed.
    pub fn random<R: Rng>(rank: usize, d: u32, rng: &mut R) -> Self {
        let mut m = MPoly::zero(rank);
        for k in 0..=d {
            for e in MPoly::exponents(rank, k) {
                let c = rng.gen_range(-9..=9);
                m = m.add(&MPoly::monomial(&e, q(c)));
            }
        }
        // Force exact degree d.
        let lead = vec![d].into_iter().chain(std::iter::repeat_n(0, rank - 1)).collect::<Vec<_>>();
        if m.degree() < d as i64 {
            m = m.add(&MPoly::monomial(&lead, Q::one()));
        }
        m
    }

    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        self.terms
            .iter()
            .map(|(e, c)| {
                let mono: Vec<String> = e
                    .iter()
                    .enumerate()
                    .filter(|(_, &k)| k > 0)
                    .map(|(i, &k)| if k == 1 { format!("x{i}") } else { format!("x{i}^{k}") })
                    .collect();
                if mono.is_empty() {
                    c.to_string()
                } else {
                    format!("{}*{}", c, mono.join("*"))
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// A function on `Z^r`, optionally with a polynomial representation.
#[derive(Clone)]
pub struct GroupFunction<V> {
    pub model: AbelianModel,
    eval: Arc<dyn Fn(&[Q]) -> V + Send + Sync>,
    pub poly: Option<MPoly>,
}

impl<V> std::fmt::Debug for GroupFunction<V> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GroupFunction")
            .field("model", &self.model)
            .field("poly", &self.poly)
            .finish()
    }
}

impl<V: Scalar> GroupFunction<V> {
    pub fn from_fn(model: AbelianModel, f: impl Fn(&[Q]) -> V + Send + Sync + 'static) -> Self {
        GroupFunction {
            model,
            eval: Arc::new(f),
            poly: None,
        }
    }

    pub fn eval(&self, x: &[Q]) -> V {
        (self.eval)(x)
    }

    /// `self + other`.
    pub fn plus(&self, other: &GroupFunction<V>) -> Self
    where
        V: 'static,
    {
        let (a, b) = (self.eval.clone(), other.eval.clone());
        GroupFunction {
            model: self.model,
            eval: Arc::new(move |x| a(x).add(&b(x))),
            poly: match (&self.poly, &other.poly) {
                (Some(p), Some(r)) => Some(p.add(r)),
                _ => None,
            },
        }
    }
}

impl GroupFunction<Q> {
    pub fn polynomial(p: MPoly) -> Self {
        let model = AbelianModel { rank: p.rank };
        let pc = p.clone();
        GroupFunction {
            model,
            eval: Arc::new(move |x| pc.eval(x)),
            poly: Some(p),
        }
    }
}

/// `Σ_{I ⊂ {1..n}} (−1)^{n−|I|} f(x + Σ_{i∈I} hᵢ)`.
pub fn dd_n<V: Scalar>(f: &GroupFunction<V>, x: &[Q], h: &[Point]) -> V {
    let n = h.len();
    let mut acc: Option<V> = None;
    for mask in 0u64..(1u64 << n) {
        let mut pt = x.to_vec();
        for (i, hi) in h.iter().enumerate() {
            if mask >> i & 1 == 1 {
                pt = f.model.add(&pt, hi);
            }
        }
        let v = f.eval(&pt);
        let v = if (n - mask.count_ones() as usize) % 2 == 1 { v.neg() } else { v };
        acc = Some(match acc {
            None => v,
            Some(a) => a.add(&v),
        });
    }
    acc.expect("at least one subset")
}

/// `Dⁿ` through `D⁰ = id` and `Dⁿ = (m_n^* − π_n^*) ∘ Dⁿ⁻¹`, where
/// `m_n(x, h₁..h_n) = (x + h_n, h₁..h_{n−1})` and `π_n` forgets `h_n`.
pub fn dd_recursive<V: Scalar>(f: &GroupFunction<V>, x: &[Q], h: &[Point]) -> V {
    match h.split_last() {
        None => f.eval(x),
        Some((hn, rest)) => {
            let moved = f.model.add(x, hn);
            dd_recursive(f, &moved, rest).sub(&dd_recursive(f, x, rest))
        }
    }
}

/// Number of sampled points where a check failed, and the first witness.
#[derive(Clone, Debug)]
pub struct Residual<V> {
    pub samples: usize,
    pub failures: usize,
    pub witness: Option<V>,
}

impl<V> Residual<V> {
    pub fn pass(&self) -> bool {
        self.failures == 0
    }
}

impl Residual<Q> {
    pub fn to_json(&self) -> Value {
        json!({
            "samples": self.samples,
            "failures": self.failures,
            "witness": self.witness.as_ref().map(|w| w.to_string()),
            "pass": self.pass(),
        })
    }
}

fn tally<V: Scalar>(values: impl Iterator<Item = V>) -> Residual<V> {
    let mut r = Residual {
        samples: 0,
        failures: 0,
        witness: None,
    };
    for v in values {
        r.samples += 1;
        if !v.is_zero() {
            r.failures += 1;
            r.witness.get_or_insert(v);
        }
    }
    r
}

/// A base point with `n` steps.
pub type Sample = (Point, Vec<Point>);

pub fn random_samples<R: Rng>(model: AbelianModel, n: usize, count: usize, rng: &mut R) -> Vec<Sample> {
    (0..count)
        .map(|_| {
            let x = model.random_point(rng, 6);
            let h = (0..n).map(|_| model.random_point(rng, 6)).collect();
            (x, h)
        })
        .collect()
}

/// Subset-sum definition against the recursion at every sample.
pub fn recursion_check<V: Scalar>(f: &GroupFunction<V>, samples: &[Sample]) -> Residual<V> {
    tally(samples.iter().map(|(x, h)| dd_n(f, x, h).sub(&dd_recursive(f, x, h))))
}

/// `Dⁿ f` with `hᵢ = 0` at every sample (`i` is 0-based).
pub fn restriction_vanishing<V: Scalar>(f: &GroupFunction<V>, i: usize, samples: &[Sample]) -> Result<Residual<V>> {
    if samples.iter().any(|(_, h)| i >= h.len()) {
        return Err(Error::InvalidInput(format!("step index {i} out of range")));
    }
    Ok(tally(samples.iter().map(|(x, h)| {
        let mut h = h.clone();
        h[i] = f.model.zero();
        dd_n(f, x, &h)
    })))
}

/// `D³G = D³G'` at every sample, given that `G' − G` is the polynomial
/// `certificate` of degree at most 2.
pub fn green_determinacy_demo<V: Scalar>(
    g: &GroupFunction<V>,
    g2: &GroupFunction<V>,
    certificate: &MPoly,
    samples: &[Sample],
    lift: impl Fn(&Q) -> V,
) -> Result<Residual<V>> {
    if certificate.degree() > 2 {
        return Err(Error::InvalidInput(format!(
            "certificate has degree {}",
            certificate.degree()
        )));
    }
    for (x, _) in samples {
        if !g2.eval(x).sub(&g.eval(x)).sub(&lift(&certificate.eval(x))).is_zero() {
            return Err(Error::InvalidInput("G' − G does not match the certificate".into()));
        }
    }
    Ok(tally(samples.iter().map(|(x, h)| dd_n(g, x, &h[..3]).sub(&dd_n(g2, x, &h[..3])))))
}

/// `Dⁿ` applied to every monomial of degree `< n` in `rank` variables.
pub fn annihilation_table<R: Rng>(rank: usize, max_n: usize, samples: usize, rng: &mut R) -> Vec<(usize, u32, Residual<Q>)> {
    let model = AbelianModel { rank };
    let mut out = Vec::new();
    for n in 1..=max_n {
        let pts = random_samples(model, n, samples, rng);
        for d in 0..n as u32 {
            let mut agg = Residual {
                samples: 0,
                failures: 0,
                witness: None,
            };
            for e in MPoly::exponents(rank, d) {
                let f = GroupFunction::polynomial(MPoly::monomial(&e, Q::one()));
                let r = tally(pts.iter().map(|(x, h)| dd_n(&f, x, h)));
                agg.samples += r.samples;
                agg.failures += r.failures;
                if agg.witness.is_none() {
                    agg.witness = r.witness;
                }
            }
            out.push((n, d, agg));
        }
    }
    out
}
