//! Dense univariate polynomials over a [`LocalField`].

use super::element::PadicElement;
use super::field::LocalField;
use crate::error::{Error, Result};

/// Polynomial with coefficients low degree first; trailing coefficients that
/// vanish at their precision are dropped.
#[derive(Clone, Debug)]
pub struct Poly {
    field: LocalField,
    coeffs: Vec<PadicElement>,
}

impl Poly {
    pub fn new(field: &LocalField, coeffs: Vec<PadicElement>) -> Poly {
        let mut coeffs = coeffs;
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly {
            field: field.clone(),
            coeffs,
        }
    }

    pub fn from_ints(field: &LocalField, c: &[i64]) -> Poly {
        Poly::new(field, c.iter().map(|&x| field.from_int(x)).collect())
    }

    pub fn zero(field: &LocalField) -> Poly {
        Poly::new(field, vec![])
    }

    pub fn constant(c: PadicElement) -> Poly {
        let f = c.field().clone();
        Poly::new(&f, vec![c])
    }

    /// The polynomial `x`.
    pub fn x(field: &LocalField) -> Poly {
        Poly::new(field, vec![field.zero(), field.one()])
    }

    /// `x - a`.
    pub fn linear(a: &PadicElement) -> Poly {
        let f = a.field().clone();
        Poly::new(&f, vec![-a, f.one()])
    }

    pub fn field(&self) -> &LocalField {
        &self.field
    }

    pub fn coeffs(&self) -> &[PadicElement] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> PadicElement {
        self.coeffs.get(i).cloned().unwrap_or_else(|| self.field.zero())
    }

    /// Degree, `-1` for the zero polynomial.
    pub fn degree(&self) -> isize {
        self.coeffs.len() as isize - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn lead(&self) -> Option<&PadicElement> {
        self.coeffs.last()
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new(
            &self.field,
            (0..n).map(|i| self.coeff(i) + o.coeff(i)).collect(),
        )
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new(
            &self.field,
            (0..n).map(|i| self.coeff(i) - o.coeff(i)).collect(),
        )
    }

    pub fn neg(&self) -> Poly {
        Poly::new(&self.field, self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero(&self.field);
        }
        let mut r = vec![self.field.zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_exact_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if b.is_exact_zero() {
                    continue;
                }
                r[i + j] = &r[i + j] + &(a * b);
            }
        }
        Poly::new(&self.field, r)
    }

    pub fn scale(&self, c: &PadicElement) -> Poly {
        Poly::new(&self.field, self.coeffs.iter().map(|x| x * c).collect())
    }

    /// Multiplication by `x^k`.
    pub fn shift(&self, k: usize) -> Poly {
        let mut c = vec![self.field.zero(); k];
        c.extend(self.coeffs.iter().cloned());
        Poly::new(&self.field, c)
    }

    pub fn pow(&self, n: usize) -> Poly {
        let mut acc = Poly::constant(self.field.one());
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn monic(&self) -> Result<Poly> {
        let lc = self.lead().ok_or(Error::DivisionByZero)?;
        let inv = lc.inv()?;
        let mut c: Vec<PadicElement> = self.coeffs.iter().map(|x| x * &inv).collect();
        let n = c.len();
        c[n - 1] = self.field.one();
        Ok(Poly::new(&self.field, c))
    }

    /// Division with remainder by a polynomial with invertible leading coefficient.
    pub fn divrem(&self, d: &Poly) -> Result<(Poly, Poly)> {
        let dd = d.degree();
        if dd < 0 {
            return Err(Error::DivisionByZero);
        }
        let dd = dd as usize;
        let inv = d.lead().unwrap().inv()?;
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return Ok((Poly::zero(&self.field), self.clone()));
        }
        let mut q = vec![self.field.zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = &r[k + dd] * &inv;
            if !c.is_exact_zero() {
                for (j, dj) in d.coeffs.iter().enumerate() {
                    r[k + j] = &r[k + j] - &(&c * dj);
                }
            }
            r[k + dd] = self.field.zero();
            q[k] = c;
        }
        r.truncate(dd);
        Ok((Poly::new(&self.field, q), Poly::new(&self.field, r)))
    }

    pub fn rem(&self, d: &Poly) -> Result<Poly> {
        Ok(self.divrem(d)?.1)
    }

    pub fn eval(&self, x: &PadicElement) -> PadicElement {
        let mut acc = self.field.zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            &self.field,
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.scale_int(i as i64))
                .collect(),
        )
    }

    /// `self(g(x))`.
    pub fn compose(&self, g: &Poly) -> Poly {
        let mut acc = Poly::zero(&self.field);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(g).add(&Poly::constant(c.clone()));
        }
        acc
    }

    /// `self(a + b x)`.
    pub fn compose_linear(&self, a: &PadicElement, b: &PadicElement) -> Poly {
        self.compose(&Poly::new(&self.field, vec![a.clone(), b.clone()]))
    }

    /// Image under a coefficient map.
    pub fn map(&self, target: &LocalField, f: impl Fn(&PadicElement) -> Result<PadicElement>) -> Result<Poly> {
        Ok(Poly::new(
            target,
            self.coeffs.iter().map(f).collect::<Result<Vec<_>>>()?,
        ))
    }

    /// Coefficients coerced into a field above in the tower.
    pub fn coerce(&self, target: &LocalField) -> Result<Poly> {
        self.map(target, |c| target.coerce(c))
    }

    /// Monic gcd via the Euclidean algorithm with precision-aware zero tests.
    pub fn gcd(&self, o: &Poly) -> Result<Poly> {
        let (mut a, mut b) = (self.clone(), o.clone());
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let r = a.rem(&b)?;
            a = b;
            b = r;
        }
        if a.is_zero() {
            return Ok(a);
        }
        a.monic()
    }

    /// Product of the distinct irreducible factors (characteristic zero).
    pub fn squarefree_part(&self) -> Result<Poly> {
        if self.degree() <= 0 {
            return Ok(self.clone());
        }
        let g = self.gcd(&self.derivative())?;
        if g.degree() <= 0 {
            return self.monic();
        }
        self.divrem(&g)?.0.monic()
    }
}
