//! Capped relative precision elements.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};

use super::field::{FieldInner, LocalField};
use super::fq::FqElem;
use crate::error::{Error, Result};

/// Shift marking an exact zero.
pub(crate) const EXACT: i64 = i64::MAX / 4;

/// `p^shift · Σ c_{ij} π^i y^j` with coordinates known modulo `p^prec`.
///
/// Zeros carry no coordinates; their `shift` is the absolute precision in
/// `p`-digits (or [`EXACT`]).
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Repr {
    pub(crate) shift: i64,
    pub(crate) coeffs: Vec<BigInt>,
    pub(crate) prec: u32,
}

impl Repr {
    pub(crate) fn zero(abs: i64) -> Repr {
        Repr {
            shift: abs,
            coeffs: Vec::new(),
            prec: 0,
        }
    }

    pub(crate) fn exact_zero() -> Repr {
        Repr::zero(EXACT)
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub(crate) fn is_exact_zero(&self) -> bool {
        self.coeffs.is_empty() && self.shift >= EXACT
    }
}

/// Branch of the logarithm: the value assigned to `log p`.
#[derive(Clone, Debug)]
pub struct LogBranch {
    pub lambda: PadicElement,
}

impl LogBranch {
    pub fn new(lambda: PadicElement) -> Self {
        LogBranch { lambda }
    }

    /// The Iwasawa branch `log p = 0`.
    pub fn iwasawa(field: &LocalField) -> Self {
        LogBranch {
            lambda: field.root().zero(),
        }
    }
}

/// An element of a [`LocalField`].
#[derive(Clone)]
pub struct PadicElement {
    field: LocalField,
    repr: Repr,
}

impl PadicElement {
    pub(crate) fn from_repr(field: LocalField, repr: Repr) -> Self {
        PadicElement { field, repr }
    }

    pub(crate) fn repr(&self) -> &Repr {
        &self.repr
    }

    pub(crate) fn inner(&self) -> &FieldInner {
        self.field.inner()
    }

    pub fn field(&self) -> &LocalField {
        &self.field
    }

    /// True when indistinguishable from zero at the tracked precision.
    pub fn is_zero(&self) -> bool {
        self.repr.is_zero()
    }

    pub fn is_exact_zero(&self) -> bool {
        self.repr.is_exact_zero()
    }

    /// Valuation in `π`-units (`v(π) = 1`).
    pub fn valuation_pi(&self) -> Option<i64> {
        self.inner().val(&self.repr)
    }

    /// Valuation normalized by `v(p) = 1`.
    pub fn valuation(&self) -> Option<Ratio<i64>> {
        self.valuation_pi()
            .map(|v| Ratio::new(v, self.field.e() as i64))
    }

    /// Absolute precision in `π`-units, `None` for exact zero.
    pub fn abs_prec_pi(&self) -> Option<i64> {
        self.inner().abs_prec(&self.repr)
    }

    /// Relative precision in `π`-units (0 for zero).
    pub fn rel_prec_pi(&self) -> i64 {
        match (self.abs_prec_pi(), self.valuation_pi()) {
            (Some(a), Some(v)) => a - v,
            _ => 0,
        }
    }

    /// Precision of the coordinate vector in `p`-digits.
    pub fn coord_prec(&self) -> u32 {
        self.repr.prec
    }

    pub fn shift(&self) -> i64 {
        self.repr.shift
    }

    /// Coordinates `c_{ij}` (index `i*f + j`) of the unit part.
    pub fn coords(&self) -> &[BigInt] {
        &self.repr.coeffs
    }

    /// Drops digits beyond absolute precision `abs` (in `p`-digits).
    pub fn truncate_abs_p(&self, abs: i64) -> PadicElement {
        let inner = self.inner();
        let r = &self.repr;
        if r.is_exact_zero() {
            return self.clone();
        }
        if r.is_zero() {
            return self.with(Repr::zero(r.shift.min(abs)));
        }
        let cur = r.shift + r.prec as i64;
        if abs >= cur {
            return self.clone();
        }
        self.with(inner.normalize(r.shift, r.coeffs.clone(), abs - r.shift))
    }

    /// Drops digits beyond absolute precision `abs` in `π`-units (rounded down to whole `p`-digits).
    pub fn truncate_abs_pi(&self, abs: i64) -> PadicElement {
        self.truncate_abs_p(Integer::div_floor(&abs, &(self.field.e() as i64)))
    }

    fn with(&self, repr: Repr) -> PadicElement {
        PadicElement {
            field: self.field.clone(),
            repr,
        }
    }

    fn check(&self, other: &PadicElement) {
        assert!(
            self.field == other.field,
            "arithmetic between elements of different fields"
        );
    }

    pub fn inv(&self) -> Result<PadicElement> {
        self.inner()
            .inv(&self.repr)
            .map(|r| self.with(r))
            .ok_or(Error::DivisionByZero)
    }

    pub fn try_div(&self, other: &PadicElement) -> Result<PadicElement> {
        Ok(self * &other.inv()?)
    }

    pub fn pow(&self, n: i64) -> PadicElement {
        if n < 0 {
            return self.inv().expect("negative power of zero").pow(-n);
        }
        let mut acc = self.field.one();
        let mut base = self.clone();
        let mut n = n as u64;
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Multiplication by `p^k`.
    pub fn mul_p_pow(&self, k: i64) -> PadicElement {
        let mut r = self.repr.clone();
        if !r.is_exact_zero() {
            r.shift += k;
        }
        self.with(r)
    }

    pub fn scale_int(&self, n: i64) -> PadicElement {
        self * &self.field.from_int(n)
    }

    /// Residue class of a unit (or of an integral element).
    pub fn residue(&self) -> FqElem {
        let k = self.field.residue_field();
        match self.valuation_pi() {
            None => k.zero(),
            Some(v) if v > 0 => k.zero(),
            Some(v) => {
                assert!(v == 0, "residue of a non-integral element");
                let p = self.inner().p.clone();
                self.repr.coeffs[..self.field.f()]
                    .iter()
                    .map(|c| super::field::abs_u64(&c.mod_floor(&p)))
                    .collect()
            }
        }
    }

    pub fn is_integral(&self) -> bool {
        self.valuation_pi().is_none_or(|v| v >= 0)
    }

    /// Equality at `target` `π`-digits beyond the smaller valuation.
    pub fn eq_to(&self, other: &PadicElement, target: i64) -> bool {
        assert_equal(self, other, target)
    }

    /// Teichmüller representative of the residue of a unit.
    pub fn teichmuller(&self) -> PadicElement {
        self.field.teichmuller(&self.residue())
    }

    /// Branch-dependent `p`-adic logarithm.
    pub fn log(&self, branch: &LogBranch) -> Result<PadicElement> {
        if self.is_zero() {
            return Err(Error::ZeroArgument);
        }
        let field = &self.field;
        let e = field.e() as i64;
        let v = self.valuation_pi().unwrap();
        let p = field.p() as i64;
        let mut m = e * (field.q() as i64 - 1);
        if p == 2 {
            m *= 2;
        }
        // y = x^m p^{-v m / e} is a principal unit.
        let y = self.pow(m).mul_p_pow(-(v * m / e));
        let z = &y - &field.one();
        let series = log_one_plus(&z)?;
        let mut out = series.try_div(&field.from_int(m))?;
        if v != 0 {
            let lam = field.coerce(&branch.lambda)?;
            out = out + lam * field.from_ratio_i64(v, e);
        }
        Ok(out)
    }

    /// Renders with valuation and precision for diagnostics.
    pub fn describe(&self) -> String {
        match self.valuation() {
            None => match self.abs_prec_pi() {
                None => "0".to_string(),
                Some(a) => format!("O(pi^{a})"),
            },
            Some(v) => format!(
                "val {} prec {} coords {:?}",
                super::field::ratio_to_string(&v),
                self.rel_prec_pi(),
                self.repr
                    .coeffs
                    .iter()
                    .map(|c| c.to_string())
                    .collect::<Vec<_>>()
            ),
        }
    }

    /// Rational value when the element lies in `Q_p` and is a `p`-adic integer
    /// times a power of `p` that is small enough to be recognised as a fraction
    /// with numerator and denominator below `bound`.
    pub fn to_small_rational(&self, bound: i64) -> Option<Ratio<i64>> {
        if self.field.degree() != 1 {
            return None;
        }
        if self.is_zero() {
            return Some(Ratio::from_integer(0));
        }
        let r = &self.repr;
        let m = self.inner().ppow(r.prec);
        let u = &r.coeffs[0];
        // Rational reconstruction of u modulo p^prec.
        let (mut r0, mut r1) = (m.clone(), u.clone());
        let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
        let b = BigInt::from(bound);
        while r1 >= b {
            let q = &r0 / &r1;
            let r2 = &r0 - &q * &r1;
            let t2 = &t0 - &q * &t1;
            r0 = r1;
            r1 = r2;
            t0 = t1;
            t1 = t2;
        }
        if t1.is_zero() || t1.abs() >= b {
            return None;
        }
        let num: i64 = r1.try_into().ok()?;
        let den: i64 = t1.try_into().ok()?;
        let pk = (self.field.p() as i64).checked_pow(r.shift.unsigned_abs() as u32)?;
        let val = Ratio::new(num, den);
        Some(if r.shift >= 0 {
            val * pk
        } else {
            val / pk
        })
    }
}

/// `log(1+z)` for `v(z) > 0`, summing until the tail drops below the known digits.
pub(crate) fn log_one_plus(z: &PadicElement) -> Result<PadicElement> {
    let field = z.field().clone();
    if z.is_zero() {
        return Ok(z.clone());
    }
    let vz = z.valuation_pi().unwrap();
    if vz <= 0 {
        return Err(Error::PrecisionExhausted(
            "log series argument is not a principal unit".into(),
        ));
    }
    let e = field.e() as i64;
    let p = field.p() as i64;
    let target = z.abs_prec_pi().unwrap();
    let ilog = |k: i64| -> i64 {
        let mut c = 0;
        let mut t = k;
        while t % p == 0 {
            t /= p;
            c += 1;
        }
        c
    };
    let floor_logp = |k: i64| -> i64 {
        let mut c = 0;
        let mut t = k;
        while t >= p {
            t /= p;
            c += 1;
        }
        c
    };
    let mut acc = field.zero();
    let mut term = z.clone();
    let mut k = 1i64;
    loop {
        let vk = k * vz - e * ilog(k);
        if vk < target {
            let t = term.try_div(&field.from_int(if k % 2 == 1 { k } else { -k }))?;
            acc = acc + t;
        }
        // all later terms vanish at this precision
        if k * vz >= target + e * (floor_logp(k + 1) + 2) {
            break;
        }
        if k > 100_000 {
            return Err(Error::PrecisionExhausted("log series did not converge".into()));
        }
        term = &term * z;
        k += 1;
    }
    Ok(acc.truncate_abs_pi(target))
}

/// `v(x−y) ≥ base + target/e`, where `base` is the smaller valuation of the nonzero inputs.
pub fn assert_equal(x: &PadicElement, y: &PadicElement, target: i64) -> bool {
    let base = match (x.valuation_pi(), y.valuation_pi()) {
        (Some(a), Some(b)) => a.min(b),
        (Some(a), None) | (None, Some(a)) => a,
        (None, None) => 0,
    };
    let d = if x.field == y.field {
        x - y
    } else if let Ok(yy) = x.field.coerce(y) {
        x - &yy
    } else if let Ok(xx) = y.field.coerce(x) {
        &xx - y
    } else {
        return false;
    };
    let need = base + target;
    match d.valuation_pi() {
        Some(v) => v >= need,
        None => d.abs_prec_pi().is_none_or(|a| a >= need),
    }
}

impl PartialEq for PadicElement {
    /// Digit-level equality of the stored representation.
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.repr == other.repr
    }
}

impl fmt::Debug for PadicElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PadicElement({})", self.describe())
    }
}

impl fmt::Display for PadicElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(r) = self.to_small_rational(1 << 20) {
            return write!(f, "{r} + O(p^{})", self.repr.shift + self.repr.prec as i64);
        }
        write!(f, "{}", self.describe())
    }
}

impl<'a> Add<&'a PadicElement> for &'a PadicElement {
    type Output = PadicElement;
    fn add(self, rhs: &PadicElement) -> PadicElement {
        self.check(rhs);
        self.with(self.inner().add(&self.repr, &rhs.repr))
    }
}

impl<'a> Sub<&'a PadicElement> for &'a PadicElement {
    type Output = PadicElement;
    fn sub(self, rhs: &PadicElement) -> PadicElement {
        self.check(rhs);
        let n = self.inner().neg(&rhs.repr);
        self.with(self.inner().add(&self.repr, &n))
    }
}

impl<'a> Mul<&'a PadicElement> for &'a PadicElement {
    type Output = PadicElement;
    fn mul(self, rhs: &PadicElement) -> PadicElement {
        self.check(rhs);
        self.with(self.inner().mul(&self.repr, &rhs.repr))
    }
}

impl<'a> Div<&'a PadicElement> for &'a PadicElement {
    type Output = PadicElement;
    fn div(self, rhs: &PadicElement) -> PadicElement {
        self.try_div(rhs).expect("division by zero")
    }
}

impl Neg for &PadicElement {
    type Output = PadicElement;
    fn neg(self) -> PadicElement {
        self.with(self.inner().neg(&self.repr))
    }
}

impl Neg for PadicElement {
    type Output = PadicElement;
    fn neg(self) -> PadicElement {
        -&self
    }
}

macro_rules! owned_ops {
    ($tr:ident, $m:ident) => {
        impl $tr<PadicElement> for PadicElement {
            type Output = PadicElement;
            fn $m(self, rhs: PadicElement) -> PadicElement {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a PadicElement> for PadicElement {
            type Output = PadicElement;
            fn $m(self, rhs: &PadicElement) -> PadicElement {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<PadicElement> for &'a PadicElement {
            type Output = PadicElement;
            fn $m(self, rhs: PadicElement) -> PadicElement {
                self.$m(&rhs)
            }
        }
    };
}

owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);
owned_ops!(Div, div);

impl std::iter::Sum for PadicElement {
    fn sum<I: Iterator<Item = PadicElement>>(mut iter: I) -> PadicElement {
        let first = iter.next().expect("sum of an empty iterator needs a field");
        iter.fold(first, |a, b| a + b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::field::PrimeConfig;

    fn q5() -> LocalField {
        LocalField::qp(PrimeConfig::new(5, 32).unwrap())
    }

    #[test]
    fn integer_arithmetic() {
        let k = q5();
        let a = k.from_int(7);
        let b = k.from_int(-3);
        assert_eq!((&a + &b).to_small_rational(1000), Some(Ratio::from_integer(4)));
        assert_eq!((&a * &b).to_small_rational(1000), Some(Ratio::from_integer(-21)));
        let c = &a / &k.from_int(25);
        assert_eq!(c.valuation(), Some(Ratio::from_integer(-2)));
        assert_eq!(c.to_small_rational(1000), Some(Ratio::new(7, 25)));
    }

    #[test]
    fn zero_at_precision() {
        let k = q5();
        let x = k.from_int(1) + k.from_int(5).pow(31);
        let d = &x - &k.one();
        assert_eq!(d.valuation_pi(), Some(31));
        let x = k.from_int(1) + k.from_int(5).pow(48);
        let d = &x - &k.one();
        assert!(d.is_zero());
        assert_eq!(d.abs_prec_pi(), Some(40));
    }

    #[test]
    fn assert_equal_examples() {
        let k = q5();
        let a = k.one() + k.from_int(5).pow(30);
        assert!(assert_equal(&a, &k.one(), 20));
        let b = k.one() + k.from_int(5).pow(3);
        assert!(!assert_equal(&b, &k.one(), 20));
        let br = LogBranch::iwasawa(&k);
        let l4 = k.from_int(4).log(&br).unwrap();
        let l2 = k.from_int(2).log(&br).unwrap();
        assert!(assert_equal(&l4, &l2.scale_int(2), 20));
    }

    #[test]
    fn log_examples() {
        let k = q5();
        let br = LogBranch::iwasawa(&k);
        assert!(k.one().log(&br).unwrap().is_zero());
        assert!(k.from_int(-1).log(&br).unwrap().is_zero());
        let lam = k.from_int(3);
        let br3 = LogBranch::new(lam.clone());
        assert!(assert_equal(&k.from_int(5).log(&br3).unwrap(), &lam, 28));
        // log 6 = Σ (-1)^{k+1} 5^k / k evaluated independently.
        let mut s = k.zero();
        let mut pw = k.one();
        for j in 1..80 {
            pw = &pw * &k.from_int(5);
            let t = &pw / &k.from_int(j);
            s = if j % 2 == 1 { s + t } else { s - t };
        }
        assert!(assert_equal(&k.from_int(6).log(&br).unwrap(), &s, 28));
    }

    #[test]
    fn inverse_in_ramified_field() {
        use num_bigint::BigInt;
        let c = PrimeConfig::new(5, 32).unwrap();
        // Q_5(π) with π^2 = 5.
        let k = LocalField::canonical(c, 1, vec![vec![BigInt::from(-5)], vec![BigInt::from(0)]], None);
        let pi = k.uniformizer();
        assert_eq!(pi.valuation(), Some(Ratio::new(1, 2)));
        let sq = &pi * &pi;
        assert!(assert_equal(&sq, &k.from_int(5), 60));
        let x = &pi + &k.from_int(3) * &sq;
        let y = x.inv().unwrap();
        assert!(assert_equal(&(&x * &y), &k.one(), 60));
        assert_eq!(y.valuation(), Some(Ratio::new(-1, 2)));
    }
}
