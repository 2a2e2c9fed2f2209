//! Coordinates over a base field, trace, norm, descent and embeddings.

use num_bigint::BigInt;
use num_traits::Zero;

use super::element::PadicElement;
use super::field::LocalField;
use super::linalg::{self, Matrix};
use super::poly::Poly;
use super::roots;
use crate::error::{Error, Result};

/// `Q_p`-coordinates of `x` on the monomials `π^i y^j`.
pub fn qp_coords(x: &PadicElement) -> Vec<PadicElement> {
    let field = x.field();
    let qp = LocalField::qp(field.config());
    let n = field.degree();
    let r = x.repr();
    if r.is_zero() {
        return vec![qp.elem(r.clone()); n];
    }
    r.coeffs
        .iter()
        .map(|c| qp.from_bigint_mod(c, r.prec as i64).mul_p_pow(r.shift))
        .collect()
}

/// Element with the given `Q_p`-coordinates.
pub fn from_qp_coords(field: &LocalField, c: &[PadicElement]) -> PadicElement {
    let mut acc = field.zero();
    for (k, ck) in c.iter().enumerate() {
        if ck.is_exact_zero() {
            continue;
        }
        let r = ck.repr();
        if r.is_zero() {
            acc = acc + field.zero_to(r.shift);
            continue;
        }
        let mut v = vec![BigInt::from(0); field.degree()];
        v[k] = r.coeffs[0].clone();
        acc = acc + field.elem(field.inner().normalize(r.shift, v, r.prec as i64));
    }
    acc
}

/// Image of `x` under the map sending the monomials of its field to `images`.
pub(crate) fn apply_images(target: &LocalField, images: &[PadicElement], x: &PadicElement) -> PadicElement {
    let r = x.repr();
    if r.is_zero() {
        return target.elem(r.clone());
    }
    let mut acc = target.zero();
    for (k, c) in r.coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let cc = target.from_bigint_mod(c, r.prec as i64);
        acc = acc + cc * &images[k];
    }
    acc.mul_p_pow(r.shift).truncate_abs_p(r.shift + r.prec as i64)
}

/// Field homomorphism given by the images of the source monomials.
#[derive(Clone, Debug)]
pub struct FieldMap {
    pub source: LocalField,
    pub target: LocalField,
    pub images: Vec<PadicElement>,
}

impl FieldMap {
    pub fn identity(field: &LocalField) -> FieldMap {
        FieldMap::inclusion(field, field).expect("identity")
    }

    /// The structural inclusion of a field lower in the tower.
    pub fn inclusion(source: &LocalField, target: &LocalField) -> Result<FieldMap> {
        let images = monomials(source)
            .iter()
            .map(|m| target.coerce(m))
            .collect::<Result<Vec<_>>>()?;
        Ok(FieldMap {
            source: source.clone(),
            target: target.clone(),
            images,
        })
    }

    pub fn apply(&self, x: &PadicElement) -> Result<PadicElement> {
        let x = self.source.coerce(x)?;
        Ok(apply_images(&self.target, &self.images, &x))
    }

    pub fn apply_poly(&self, p: &Poly) -> Result<Poly> {
        p.map(&self.target, |c| self.apply(c))
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &FieldMap) -> Result<FieldMap> {
        Ok(FieldMap {
            source: self.source.clone(),
            target: next.target.clone(),
            images: self
                .images
                .iter()
                .map(|x| next.apply(x))
                .collect::<Result<Vec<_>>>()?,
        })
    }
}

pub(crate) fn monomials(field: &LocalField) -> Vec<PadicElement> {
    let (e, f) = (field.e(), field.f());
    let mut out = Vec::with_capacity(e * f);
    for i in 0..e {
        for j in 0..f {
            let mut c = vec![BigInt::from(0); e * f];
            c[i * f + j] = BigInt::from(1);
            out.push(field.elem(field.inner().normalize(0, c, field.inner().cap() as i64)));
        }
    }
    out
}

/// Matrix with columns the `Q_p`-coordinates of `ι(κ_l) g^k`, column index `k*m + l`.
pub(crate) fn basis_matrix(images: &[PadicElement], g: &PadicElement, n: usize) -> Matrix {
    let m = images.len();
    let big_n = m * n;
    let mut cols: Vec<Vec<PadicElement>> = Vec::with_capacity(big_n);
    let mut gk = g.field().one();
    for _ in 0..n {
        for im in images {
            cols.push(qp_coords(&(im * &gk)));
        }
        gk = &gk * g;
    }
    (0..big_n)
        .map(|r| (0..big_n).map(|c| cols[c][r].clone()).collect())
        .collect()
}

fn tower_parts(field: &LocalField) -> Result<(LocalField, Vec<PadicElement>, PadicElement)> {
    let t = field.inner().tower.as_ref().ok_or(Error::FieldMismatch)?;
    let images = t.base_images.iter().map(|r| field.elem(r.clone())).collect();
    Ok((t.base.clone(), images, field.elem(t.generator.clone())))
}

fn solver(field: &LocalField) -> Result<&Matrix> {
    let t = field.inner().tower.as_ref().ok_or(Error::FieldMismatch)?;
    let res = t.coord_solver.get_or_init(|| {
        let (_, images, g) = tower_parts(field)?;
        linalg::inverse(&basis_matrix(&images, &g, field.relative_degree()))
    });
    res.as_ref().map_err(|e| e.clone())
}

/// Coefficients of `x` on the basis `1, g, .., g^{n-1}` over the immediate base.
pub fn base_coords(x: &PadicElement) -> Result<Vec<PadicElement>> {
    let field = x.field();
    let (base, _, _) = tower_parts(field)?;
    let binv = solver(field)?;
    let c = linalg::mat_vec(binv, &qp_coords(x));
    let m = base.degree();
    Ok(c.chunks(m).map(|ch| from_qp_coords(&base, ch)).collect())
}

/// Element of the base field equal to `x`, if `x` lies there to precision.
pub fn descend(x: &PadicElement) -> Result<PadicElement> {
    let c = base_coords(x)?;
    let base = x.field().base().unwrap();
    let slack = base.e() as i64 * (base.prec() as i64 - 8);
    let v0 = c[0].valuation_pi();
    for ck in &c[1..] {
        if ck.is_zero() {
            continue;
        }
        match (v0, ck.valuation_pi()) {
            (Some(a), Some(b)) if b >= a + slack => {}
            _ => return Err(Error::NotInSubfield),
        }
    }
    Ok(c[0].clone())
}

/// Matrix of multiplication by `x` on the power basis over the immediate base.
fn mult_matrix(x: &PadicElement) -> Result<Matrix> {
    let field = x.field();
    let (_, _, g) = tower_parts(field)?;
    let n = field.relative_degree();
    let mut cols = Vec::with_capacity(n);
    let mut gk = field.one();
    for _ in 0..n {
        cols.push(base_coords(&(x * &gk))?);
        gk = &gk * &g;
    }
    Ok((0..n).map(|r| (0..n).map(|c| cols[c][r].clone()).collect()).collect())
}

fn walk(x: &PadicElement, base: &LocalField, step: fn(&PadicElement) -> Result<PadicElement>) -> Result<PadicElement> {
    let mut cur = x.clone();
    loop {
        if cur.field() == base {
            return Ok(cur);
        }
        if cur.field().base().is_none() {
            return Err(Error::FieldMismatch);
        }
        cur = step(&cur)?;
    }
}

fn rel_trace(x: &PadicElement) -> Result<PadicElement> {
    let m = mult_matrix(x)?;
    Ok((0..m.len()).map(|i| m[i][i].clone()).sum())
}

fn rel_norm(x: &PadicElement) -> Result<PadicElement> {
    linalg::det(&mult_matrix(x)?)
}

/// `tr_{K'/K}(x)` for `K` below the field of `x` in its tower.
pub fn trace(x: &PadicElement, base: &LocalField) -> Result<PadicElement> {
    walk(x, base, rel_trace)
}

/// `N_{K'/K}(x)`.
pub fn norm(x: &PadicElement, base: &LocalField) -> Result<PadicElement> {
    walk(x, base, rel_norm)
}

/// The `[K':K]` embeddings of `ext` over its base into `target`.
pub fn embeddings(ext: &LocalField, target: &LocalField) -> Result<Vec<FieldMap>> {
    let Some(t) = ext.inner().tower.as_ref() else {
        if target.contains_field(ext) {
            return Ok(vec![FieldMap::inclusion(ext, target)?]);
        }
        return Err(Error::NoSplitting);
    };
    if !target.contains_field(&t.base) {
        return Err(Error::NoSplitting);
    }
    let phi = FieldMap::inclusion(&t.base, target)?;
    let poly = Poly::new(
        &t.base,
        t.poly.iter().map(|r| t.base.elem(r.clone())).collect(),
    );
    let poly_t = phi.apply_poly(&poly)?;
    let rts = roots::roots(&poly_t)?;
    let n = ext.relative_degree();
    if rts.len() < n {
        return Err(Error::NoSplitting);
    }
    // Each source monomial as Σ_k c_k(κ) g^k, with c_k in the base.
    let expansions: Vec<Vec<PadicElement>> = monomials(ext)
        .iter()
        .map(base_coords)
        .collect::<Result<_>>()?;
    let mut out = Vec::with_capacity(n);
    for rho in rts.iter().take(n) {
        let images = expansions
            .iter()
            .map(|cs| -> Result<PadicElement> {
                let mut acc = target.zero();
                let mut rk = target.one();
                for c in cs {
                    acc = acc + phi.apply(c)? * &rk;
                    rk = &rk * rho;
                }
                Ok(acc)
            })
            .collect::<Result<Vec<_>>>()?;
        out.push(FieldMap {
            source: ext.clone(),
            target: target.clone(),
            images,
        });
    }
    Ok(out)
}
