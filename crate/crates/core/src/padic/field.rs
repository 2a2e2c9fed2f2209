//! Local fields in canonical form `Q_q(π)`: an unramified part `Z_p[y]/(h)`
//! followed by an Eisenstein polynomial `E(π)` over it.

use std::fmt;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};

use super::element::{PadicElement, Repr};
use super::fq::{canonical_irreducible, is_prime, Fq, FqElem};
use crate::error::{Error, Result};

/// Prime and default precision shared by a tower of fields.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeConfig {
    pub p: u32,
    /// Default relative precision in base-`p` digits.
    pub default_rel_prec: u32,
}

impl PrimeConfig {
    pub fn new(p: u32, default_rel_prec: u32) -> Result<Self> {
        if !is_prime(p as u64) {
            return Err(Error::InvalidInput(format!("{p} is not prime")));
        }
        if default_rel_prec < 4 {
            return Err(Error::InvalidInput("precision must be at least 4".into()));
        }
        Ok(PrimeConfig { p, default_rel_prec })
    }
}

/// Extra digits carried by structure constants beyond the element precision.
pub(crate) const GUARD: u32 = 8;

pub(crate) struct Tower {
    pub(crate) base: LocalField,
    /// Monic defining polynomial over `base`, low degree first.
    pub(crate) poly: Vec<Repr>,
    /// A root of `poly` in this field.
    pub(crate) generator: Repr,
    /// Images of the base monomials `π_b^i y_b^j`, index `i*f_b + j`.
    pub(crate) base_images: Vec<Repr>,
    pub(crate) coord_solver: OnceLock<Result<Vec<Vec<PadicElement>>>>,
}

pub(crate) struct FieldInner {
    pub(crate) config: PrimeConfig,
    pub(crate) p: BigInt,
    pub(crate) f: usize,
    pub(crate) e: usize,
    /// Monic lift of the residue modulus, length `f + 1`.
    pub(crate) h: Vec<BigInt>,
    /// `E_0 .. E_{e-1}` as `Z_q` coordinate vectors; `E` is monic of degree `e`.
    pub(crate) eis: Vec<Vec<BigInt>>,
    /// Precision of freshly created elements.
    pub(crate) prec: u32,
    pub(crate) residue: Fq,
    pows: Vec<BigInt>,
    pub(crate) tower: Option<Tower>,
}

/// Shared handle to a local field.
#[derive(Clone)]
pub struct LocalField(pub(crate) Arc<FieldInner>);

impl PartialEq for LocalField {
    fn eq(&self, other: &Self) -> bool {
        if Arc::ptr_eq(&self.0, &other.0) {
            return true;
        }
        let (a, b) = (&self.0, &other.0);
        a.config == b.config
            && a.f == b.f
            && a.e == b.e
            && a.h == b.h
            && a.eis == b.eis
            && match (&a.tower, &b.tower) {
                (None, None) => true,
                (Some(s), Some(t)) => {
                    s.base == t.base && s.poly == t.poly && s.generator == t.generator
                }
                _ => false,
            }
    }
}

impl Eq for LocalField {}

impl fmt::Debug for LocalField {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            fm,
            "LocalField(p={}, e={}, f={}, degree {})",
            self.0.config.p,
            self.0.e,
            self.0.f,
            self.degree()
        )
    }
}

pub(crate) fn big(n: i64) -> BigInt {
    BigInt::from(n)
}

impl FieldInner {
    pub(crate) fn build(
        config: PrimeConfig,
        h_small: Vec<u64>,
        eis: Vec<Vec<BigInt>>,
        prec: u32,
        tower: Option<Tower>,
    ) -> FieldInner {
        let p = BigInt::from(config.p);
        let f = h_small.len() - 1;
        let e = eis.len();
        let cap = config.default_rel_prec + GUARD;
        let mut pows = Vec::with_capacity(2 * cap as usize + 8);
        let mut acc = BigInt::one();
        for _ in 0..(2 * cap as usize + 8) {
            pows.push(acc.clone());
            acc *= &p;
        }
        let m = &pows[cap as usize];
        let eis = eis
            .into_iter()
            .map(|c| c.into_iter().map(|x| x.mod_floor(m)).collect())
            .collect();
        FieldInner {
            config,
            residue: Fq::new(config.p as u64, h_small.clone()),
            h: h_small.iter().map(|&c| BigInt::from(c)).collect(),
            p,
            f,
            e,
            eis,
            prec,
            pows,
            tower,
        }
    }

    pub(crate) fn cap(&self) -> u32 {
        self.config.default_rel_prec + GUARD
    }

    pub(crate) fn ppow(&self, k: u32) -> BigInt {
        match self.pows.get(k as usize) {
            Some(v) => v.clone(),
            None => num_traits::pow(self.p.clone(), k as usize),
        }
    }

    pub(crate) fn n(&self) -> usize {
        self.e * self.f
    }

    /// Product in `Z[y]/(h)`, without reduction modulo a power of `p`.
    pub(crate) fn zq_mul(&self, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        let f = self.f;
        if f == 1 {
            return vec![&a[0] * &b[0]];
        }
        let mut t = vec![BigInt::zero(); 2 * f - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if !y.is_zero() {
                    t[i + j] += x * y;
                }
            }
        }
        for k in (f..t.len()).rev() {
            let c = std::mem::take(&mut t[k]);
            if c.is_zero() {
                continue;
            }
            for j in 0..f {
                if !self.h[j].is_zero() {
                    t[k - f + j] -= &c * &self.h[j];
                }
            }
        }
        t.truncate(f);
        t
    }

    /// Product of coordinate vectors modulo `m`.
    pub(crate) fn raw_mul(&self, a: &[BigInt], b: &[BigInt], m: &BigInt) -> Vec<BigInt> {
        let (e, f) = (self.e, self.f);
        if e == 1 {
            return self
                .zq_mul(a, b)
                .into_iter()
                .map(|c| c.mod_floor(m))
                .collect();
        }
        let mut t: Vec<Vec<BigInt>> = vec![vec![BigInt::zero(); f]; 2 * e - 1];
        for i in 0..e {
            let ai = &a[i * f..(i + 1) * f];
            if ai.iter().all(|c| c.is_zero()) {
                continue;
            }
            for j in 0..e {
                let bj = &b[j * f..(j + 1) * f];
                if bj.iter().all(|c| c.is_zero()) {
                    continue;
                }
                let pr = self.zq_mul(ai, bj);
                for (s, c) in t[i + j].iter_mut().zip(pr) {
                    *s += c;
                }
            }
        }
        for k in (e..2 * e - 1).rev() {
            let c: Vec<BigInt> = std::mem::take(&mut t[k])
                .into_iter()
                .map(|x| x.mod_floor(m))
                .collect();
            if c.iter().all(|x| x.is_zero()) {
                continue;
            }
            for i in 0..e {
                let pr = self.zq_mul(&c, &self.eis[i]);
                for (s, x) in t[k - e + i].iter_mut().zip(pr) {
                    *s -= x;
                }
            }
        }
        t.truncate(e);
        t.into_iter()
            .flatten()
            .map(|c| c.mod_floor(m))
            .collect()
    }

    /// Multiplication by `π` on coordinates.
    pub(crate) fn raw_mul_pi(&self, a: &[BigInt], m: &BigInt) -> Vec<BigInt> {
        let (e, f) = (self.e, self.f);
        if e == 1 {
            return a.iter().map(|c| (c * &self.p).mod_floor(m)).collect();
        }
        let mut out = vec![BigInt::zero(); e * f];
        for i in 0..e - 1 {
            for j in 0..f {
                out[(i + 1) * f + j] = a[i * f + j].clone();
            }
        }
        let top = &a[(e - 1) * f..];
        for i in 0..e {
            let pr = self.zq_mul(top, &self.eis[i]);
            for j in 0..f {
                out[i * f + j] -= &pr[j];
            }
        }
        out.into_iter().map(|c| c.mod_floor(m)).collect()
    }

    pub(crate) fn vp(&self, c: &BigInt, cap: u32) -> u32 {
        if c.is_zero() {
            return cap;
        }
        let mut k = 0;
        let mut c = c.clone();
        while k < cap {
            let (q, r) = c.div_rem(&self.p);
            if !r.is_zero() {
                break;
            }
            c = q;
            k += 1;
        }
        k
    }

    /// Brings `p^shift · coeffs (mod p^prec)` to normal form.
    pub(crate) fn normalize(&self, shift: i64, coeffs: Vec<BigInt>, prec: i64) -> Repr {
        if prec <= 0 {
            return Repr::zero(shift + prec.max(0));
        }
        let prec = prec as u32;
        let m = self.ppow(prec);
        let coeffs: Vec<BigInt> = coeffs.into_iter().map(|c| c.mod_floor(&m)).collect();
        let k = coeffs.iter().map(|c| self.vp(c, prec)).min().unwrap_or(prec);
        if k >= prec {
            return Repr::zero(shift + prec as i64);
        }
        if k == 0 {
            return Repr {
                shift,
                coeffs,
                prec,
            };
        }
        let d = self.ppow(k);
        Repr {
            shift: shift + k as i64,
            coeffs: coeffs.into_iter().map(|c| c / &d).collect(),
            prec: prec - k,
        }
    }

    /// Index of the first `π`-chunk containing a unit.
    pub(crate) fn lead_index(&self, r: &Repr) -> usize {
        let f = self.f;
        (0..self.e)
            .find(|&i| {
                r.coeffs[i * f..(i + 1) * f]
                    .iter()
                    .any(|c| !c.is_multiple_of(&self.p))
            })
            .unwrap_or(0)
    }

    /// Valuation in `π`-units; `None` for zero.
    pub(crate) fn val(&self, r: &Repr) -> Option<i64> {
        if r.is_zero() {
            None
        } else {
            Some(self.e as i64 * r.shift + self.lead_index(r) as i64)
        }
    }

    /// Absolute precision in `π`-units (`None` for exact zero).
    pub(crate) fn abs_prec(&self, r: &Repr) -> Option<i64> {
        if r.is_exact_zero() {
            None
        } else if r.is_zero() {
            Some(self.e as i64 * r.shift)
        } else {
            Some(self.e as i64 * (r.shift + r.prec as i64))
        }
    }

    fn abs_p(&self, r: &Repr) -> i64 {
        if r.is_zero() {
            r.shift
        } else {
            r.shift + r.prec as i64
        }
    }

    pub(crate) fn add(&self, x: &Repr, y: &Repr) -> Repr {
        if x.is_exact_zero() {
            return y.clone();
        }
        if y.is_exact_zero() {
            return x.clone();
        }
        let a = self.abs_p(x).min(self.abs_p(y));
        match (x.is_zero(), y.is_zero()) {
            (true, true) => Repr::zero(a),
            (true, false) => self.normalize(y.shift, y.coeffs.clone(), a - y.shift),
            (false, true) => self.normalize(x.shift, x.coeffs.clone(), a - x.shift),
            (false, false) => {
                let s = x.shift.min(y.shift);
                let m = a - s;
                if m <= 0 {
                    return Repr::zero(a);
                }
                let px = self.ppow((x.shift - s) as u32);
                let py = self.ppow((y.shift - s) as u32);
                let coeffs = x
                    .coeffs
                    .iter()
                    .zip(&y.coeffs)
                    .map(|(c, d)| c * &px + d * &py)
                    .collect();
                self.normalize(s, coeffs, m)
            }
        }
    }

    pub(crate) fn neg(&self, x: &Repr) -> Repr {
        if x.is_zero() {
            return x.clone();
        }
        let m = self.ppow(x.prec);
        Repr {
            shift: x.shift,
            coeffs: x.coeffs.iter().map(|c| (-c).mod_floor(&m)).collect(),
            prec: x.prec,
        }
    }

    pub(crate) fn mul(&self, x: &Repr, y: &Repr) -> Repr {
        if x.is_exact_zero() || y.is_exact_zero() {
            return Repr::exact_zero();
        }
        match (x.is_zero(), y.is_zero()) {
            (true, true) => Repr::zero(x.shift + y.shift),
            (true, false) => Repr::zero(x.shift + y.shift),
            (false, true) => Repr::zero(x.shift + y.shift),
            (false, false) => {
                let m = x.prec.min(y.prec);
                let coeffs = self.raw_mul(&x.coeffs, &y.coeffs, &self.ppow(m));
                self.normalize(x.shift + y.shift, coeffs, m as i64)
            }
        }
    }

    /// Inverse of a unit coordinate vector (first chunk a unit) modulo `p^m`.
    fn unit_inverse(&self, u: &[BigInt], m: u32) -> Vec<BigInt> {
        let modulus = self.ppow(m);
        let k = &self.residue;
        let c0: FqElem = u[..self.f]
            .iter()
            .map(|c| c.mod_floor(&self.p).to_u64_digits().1.first().copied().unwrap_or(0))
            .collect();
        let inv0 = k.inv(&c0).expect("unit");
        let mut z = vec![BigInt::zero(); self.n()];
        for (j, c) in inv0.iter().enumerate() {
            z[j] = BigInt::from(*c);
        }
        let target = self.e as u64 * m as u64;
        let mut reached = 1u64;
        let mut two = vec![BigInt::zero(); self.n()];
        two[0] = BigInt::from(2);
        while reached < target {
            let uz = self.raw_mul(u, &z, &modulus);
            let t: Vec<BigInt> = two.iter().zip(&uz).map(|(a, b)| a - b).collect();
            z = self.raw_mul(&z, &t, &modulus);
            reached *= 2;
        }
        z
    }

    pub(crate) fn inv(&self, x: &Repr) -> Option<Repr> {
        if x.is_zero() {
            return None;
        }
        let i0 = self.lead_index(x);
        if i0 == 0 {
            let z = self.unit_inverse(&x.coeffs, x.prec);
            return Some(self.normalize(-x.shift, z, x.prec as i64));
        }
        // w·π^(e-i0) is divisible by p exactly once.
        let m = self.ppow(x.prec);
        let mut w = x.coeffs.clone();
        for _ in 0..(self.e - i0) {
            w = self.raw_mul_pi(&w, &m);
        }
        let u: Vec<BigInt> = w.into_iter().map(|c| c / &self.p).collect();
        let up = x.prec - 1;
        if up == 0 {
            return Some(Repr::zero(-x.shift - 1));
        }
        let z = self.unit_inverse(&u, up);
        let mm = self.ppow(up);
        let mut r = z;
        for _ in 0..(self.e - i0) {
            r = self.raw_mul_pi(&r, &mm);
        }
        Some(self.normalize(-x.shift - 1, r, up as i64))
    }
}

impl LocalField {
    /// The field `Q_p`.
    pub fn qp(config: PrimeConfig) -> LocalField {
        LocalField::canonical(config, 1, vec![vec![-big(config.p as i64)]], None)
    }

    /// The unramified extension of `Q_p` of degree `f`, standalone.
    pub fn unramified(config: PrimeConfig, f: usize) -> LocalField {
        LocalField::canonical(config, f, vec![vec![-big(config.p as i64)]], None)
    }

    /// Builds `Z_p[y]/(h_f)[π]/(E)` from canonical data.
    pub(crate) fn canonical(
        config: PrimeConfig,
        f: usize,
        eis: Vec<Vec<BigInt>>,
        tower: Option<Tower>,
    ) -> LocalField {
        let h = canonical_irreducible(config.p as u64, f);
        let eis = eis
            .into_iter()
            .map(|mut c| {
                c.resize(f, BigInt::zero());
                c
            })
            .collect();
        LocalField(Arc::new(FieldInner::build(
            config,
            h,
            eis,
            config.default_rel_prec,
            tower,
        )))
    }

    pub(crate) fn inner(&self) -> &FieldInner {
        &self.0
    }

    pub fn config(&self) -> PrimeConfig {
        self.0.config
    }

    pub fn p(&self) -> u32 {
        self.0.config.p
    }

    pub fn prec(&self) -> u32 {
        self.0.prec
    }

    /// Ramification index over `Q_p`.
    pub fn e(&self) -> usize {
        self.0.e
    }

    /// Residue degree over `Q_p`.
    pub fn f(&self) -> usize {
        self.0.f
    }

    /// Absolute degree over `Q_p`.
    pub fn degree(&self) -> usize {
        self.0.e * self.0.f
    }

    /// Residue field size.
    pub fn q(&self) -> u64 {
        self.0.residue.order()
    }

    pub fn residue_field(&self) -> &Fq {
        &self.0.residue
    }

    pub fn base(&self) -> Option<&LocalField> {
        self.0.tower.as_ref().map(|t| &t.base)
    }

    /// Degree over the immediate base (or over `Q_p` at the root).
    pub fn relative_degree(&self) -> usize {
        match self.base() {
            Some(b) => self.degree() / b.degree(),
            None => self.degree(),
        }
    }

    /// Ramification index over the immediate base.
    pub fn relative_e(&self) -> usize {
        match self.base() {
            Some(b) => self.e() / b.e(),
            None => self.e(),
        }
    }

    /// Residue degree over the immediate base.
    pub fn relative_f(&self) -> usize {
        match self.base() {
            Some(b) => self.f() / b.f(),
            None => self.f(),
        }
    }

    /// Depth of the tower above the root field.
    pub fn depth(&self) -> usize {
        match self.base() {
            Some(b) => 1 + b.depth(),
            None => 0,
        }
    }

    /// The root of the tower (normally `Q_p`).
    pub fn root(&self) -> LocalField {
        match self.base() {
            Some(b) => b.root(),
            None => self.clone(),
        }
    }

    /// Coefficients of `E` as `Z_q` coordinate vectors (monic part implied).
    pub fn eisenstein_coeffs(&self) -> &[Vec<BigInt>] {
        &self.0.eis
    }

    /// Coefficients of the residue modulus lift.
    pub fn unramified_modulus(&self) -> &[BigInt] {
        &self.0.h
    }

    pub(crate) fn elem(&self, r: Repr) -> PadicElement {
        PadicElement::from_repr(self.clone(), r)
    }

    pub fn zero(&self) -> PadicElement {
        self.elem(Repr::exact_zero())
    }

    /// Zero known to absolute precision `abs` in `p`-digits.
    pub fn zero_to(&self, abs: i64) -> PadicElement {
        self.elem(Repr::zero(abs))
    }

    pub fn one(&self) -> PadicElement {
        self.from_int(1)
    }

    pub fn from_int(&self, n: i64) -> PadicElement {
        self.from_bigint(&big(n))
    }

    pub fn from_bigint(&self, n: &BigInt) -> PadicElement {
        self.from_bigint_prec(n, self.0.cap())
    }

    fn from_bigint_prec(&self, n: &BigInt, prec: u32) -> PadicElement {
        if n.is_zero() {
            return self.zero();
        }
        let inner = &self.0;
        let mut coeffs = vec![BigInt::zero(); inner.n()];
        let v = inner.vp(n, u32::MAX);
        coeffs[0] = n / inner.ppow(v);
        self.elem(inner.normalize(v as i64, coeffs, prec as i64))
    }

    /// Integer known modulo `p^abs`.
    pub fn from_bigint_mod(&self, n: &BigInt, abs: i64) -> PadicElement {
        let inner = &self.0;
        let mut coeffs = vec![BigInt::zero(); inner.n()];
        coeffs[0] = n.clone();
        self.elem(inner.normalize(0, coeffs, abs))
    }

    pub fn from_ratio(&self, r: &Ratio<BigInt>) -> PadicElement {
        let num = self.from_bigint(r.numer());
        let den = self.from_bigint(r.denom());
        &num / &den
    }

    pub fn from_ratio_i64(&self, n: i64, d: i64) -> PadicElement {
        self.from_ratio(&Ratio::new(big(n), big(d)))
    }

    /// Element `p^shift · Σ c_{ij} π^i y^j` with coordinates known mod `p^prec`.
    pub fn from_coords(&self, shift: i64, coeffs: Vec<BigInt>, prec: u32) -> Result<PadicElement> {
        if coeffs.len() != self.0.n() {
            return Err(Error::InvalidInput("coordinate vector has wrong length".into()));
        }
        Ok(self.elem(self.0.normalize(shift, coeffs, prec as i64)))
    }

    /// The uniformizer `π` (equal to `p` when unramified).
    pub fn uniformizer(&self) -> PadicElement {
        let inner = &self.0;
        if inner.e == 1 {
            return self.from_int(inner.config.p as i64);
        }
        let mut c = vec![BigInt::zero(); inner.n()];
        c[inner.f] = BigInt::one();
        self.elem(inner.normalize(0, c, inner.cap() as i64))
    }

    /// The class `y` generating the unramified part.
    pub fn unramified_generator(&self) -> PadicElement {
        let inner = &self.0;
        let mut c = vec![BigInt::zero(); inner.n()];
        if inner.f == 1 {
            c[0] = -inner.h[0].clone();
        } else {
            c[1] = BigInt::one();
        }
        self.elem(inner.normalize(0, c, inner.cap() as i64))
    }

    /// The element `π^i y^j`.
    pub fn monomial(&self, i: usize, j: usize) -> PadicElement {
        self.uniformizer().pow(i as i64) * self.unramified_generator().pow(j as i64)
    }

    /// Root of the defining polynomial over the immediate base.
    pub fn generator(&self) -> Option<PadicElement> {
        self.0
            .tower
            .as_ref()
            .map(|t| self.elem(t.generator.clone()))
    }

    /// Defining polynomial over the immediate base, low degree first.
    pub fn defining_poly(&self) -> Option<Vec<PadicElement>> {
        self.0.tower.as_ref().map(|t| {
            t.poly
                .iter()
                .map(|r| t.base.elem(r.clone()))
                .collect()
        })
    }

    /// Teichmüller lift of a residue class.
    pub fn teichmuller(&self, a: &FqElem) -> PadicElement {
        let inner = &self.0;
        if inner.residue.is_zero(a) {
            return self.zero();
        }
        let mut c = vec![BigInt::zero(); inner.n()];
        for (j, x) in a.iter().enumerate() {
            c[j] = BigInt::from(*x);
        }
        let mut z = self.elem(inner.normalize(0, c, inner.cap() as i64));
        let q = inner.residue.order() as i64;
        for _ in 0..(inner.cap() + 1) {
            let next = z.pow(q);
            if next == z {
                break;
            }
            z = next;
        }
        z
    }

    /// Lift of a residue class with digits in `[0, p)`.
    pub fn lift_residue(&self, a: &FqElem) -> PadicElement {
        let inner = &self.0;
        let mut c = vec![BigInt::zero(); inner.n()];
        for (j, x) in a.iter().enumerate() {
            c[j] = BigInt::from(*x);
        }
        self.elem(inner.normalize(0, c, inner.cap() as i64))
    }

    /// Maps `x` from a field lower in the tower (or the same field).
    pub fn coerce(&self, x: &PadicElement) -> Result<PadicElement> {
        if x.field() == self {
            return Ok(x.clone());
        }
        match &self.0.tower {
            Some(t) => {
                let below = t.base.coerce(x)?;
                Ok(self.embed_from_base(&below))
            }
            None => {
                // Elements of Q_p enter any root field through the scalar coordinate.
                if x.field().degree() == 1 && x.field().p() == self.p() && x.field().base().is_none() {
                    let r = x.repr();
                    if r.is_zero() {
                        return Ok(self.elem(r.clone()));
                    }
                    let mut c = vec![BigInt::zero(); self.0.n()];
                    c[0] = r.coeffs[0].clone();
                    return Ok(self.elem(self.0.normalize(r.shift, c, r.prec as i64)));
                }
                Err(Error::FieldMismatch)
            }
        }
    }

    /// Whether `other` lies below (or equals) `self` in the tower.
    pub fn contains_field(&self, other: &LocalField) -> bool {
        if self == other {
            return true;
        }
        match self.base() {
            Some(b) => b.contains_field(other),
            None => other.degree() == 1 && other.base().is_none() && other.p() == self.p(),
        }
    }

    /// Structural embedding of the immediate base.
    pub(crate) fn embed_from_base(&self, x: &PadicElement) -> PadicElement {
        let t = self.0.tower.as_ref().expect("tower");
        let r = x.repr();
        if r.is_zero() {
            return self.elem(r.clone());
        }
        let mut acc = self.zero();
        for (k, c) in r.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let img = self.elem(t.base_images[k].clone());
            let cc = self.from_bigint_mod(c, r.prec as i64);
            acc = acc + cc * img;
        }
        let scale = self.elem(Repr {
            shift: r.shift,
            coeffs: {
                let mut v = vec![BigInt::zero(); self.0.n()];
                v[0] = BigInt::one();
                v
            },
            prec: self.0.cap(),
        });
        let out = acc * scale;
        // The coordinates were known mod p^prec: cap the absolute precision accordingly.
        out.truncate_abs_p(r.shift + r.prec as i64)
    }
}

pub(crate) fn ratio_to_string(v: &Ratio<i64>) -> String {
    if v.denom().is_one() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

pub(crate) fn abs_u64(x: &BigInt) -> u64 {
    x.abs().to_u64_digits().1.first().copied().unwrap_or(0)
}
