//! Finite extensions: certified construction, splitting fields, primitive elements.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::Zero;

use super::element::PadicElement;
use super::field::{LocalField, PrimeConfig, Tower, GUARD};
use super::fq::FqElem;
use super::linalg;
use super::poly::Poly;
use super::roots::{certify, explore, Hint};
use super::tower::{basis_matrix, from_qp_coords, monomials, qp_coords, FieldMap};
use crate::error::{Error, Result};

fn hi_config(c: PrimeConfig) -> PrimeConfig {
    PrimeConfig {
        p: c.p,
        default_rel_prec: c.default_rel_prec + GUARD,
    }
}

/// Integral coordinate vector of `x`, padded to `len`.
fn int_coords(x: &PadicElement, len: usize) -> Result<Vec<BigInt>> {
    let r = x.repr();
    if r.is_zero() {
        return Ok(vec![BigInt::zero(); len]);
    }
    if r.shift < 0 {
        return Err(Error::PrecisionExhausted("non-integral structure constant".into()));
    }
    let s = num_traits::pow(BigInt::from(x.field().p()), r.shift as usize);
    let mut v: Vec<BigInt> = r.coeffs.iter().map(|c| c * &s).collect();
    v.resize(len, BigInt::zero());
    Ok(v)
}

/// Same canonical data as `field`, no tower, given precision settings.
fn bare(field: &LocalField, config: PrimeConfig) -> LocalField {
    LocalField::canonical(config, field.f(), field.eisenstein_coeffs().to_vec(), None)
}

/// Moves an element between fields with identical canonical data.
fn transfer(target: &LocalField, x: &PadicElement) -> PadicElement {
    let r = x.repr();
    if r.is_zero() {
        return target.elem(r.clone());
    }
    let prec = (r.prec as i64).min(target.prec() as i64 + GUARD as i64);
    target.elem(target.inner().normalize(r.shift, r.coeffs.clone(), prec))
}

fn bare_copy(field: &LocalField) -> (LocalField, FieldMap) {
    let f0 = bare(field, field.config());
    let map = FieldMap {
        source: field.clone(),
        target: f0.clone(),
        images: monomials(&f0),
    };
    (f0, map)
}

fn map_residue(m: &FieldMap, a: &FqElem) -> Result<FqElem> {
    Ok(m.apply(&m.source.lift_residue(a))?.residue())
}

/// Unramified extension of degree `d` of `base` (bare), with the base map.
fn unramified_over(base: &LocalField, d: usize) -> Result<(LocalField, FieldMap)> {
    let cfg = base.config();
    let (f, f1) = (base.f(), base.f() * d);
    let u = LocalField::unramified(hi_config(cfg), f1);
    let rho = if f == 1 {
        None
    } else {
        let h = Poly::new(
            &u,
            base.unramified_modulus()
                .iter()
                .map(|c| u.from_bigint(c))
                .collect(),
        );
        let r = super::roots::roots(&h)?;
        Some(
            r.into_iter()
                .next()
                .ok_or_else(|| Error::PrecisionExhausted("no root of the residue modulus".into()))?,
        )
    };
    let iota = |a: &[BigInt]| -> Result<Vec<BigInt>> {
        match &rho {
            None => {
                let mut v = vec![BigInt::zero(); f1];
                v[0] = a[0].clone();
                Ok(v)
            }
            Some(r) => {
                let mut acc = u.zero();
                let mut rj = u.one();
                for c in a {
                    acc = acc + u.from_bigint(c) * &rj;
                    rj = &rj * r;
                }
                int_coords(&acc, f1)
            }
        }
    };
    let eis = base
        .eisenstein_coeffs()
        .iter()
        .map(|a| iota(a))
        .collect::<Result<Vec<_>>>()?;
    let l0 = LocalField::canonical(cfg, f1, eis, None);
    let rho_l = match &rho {
        None => l0.one(),
        Some(r) => {
            let mut c = int_coords(r, f1)?;
            c.resize(l0.degree(), BigInt::zero());
            l0.from_coords(0, c, l0.inner().cap())?
        }
    };
    let pi = l0.uniformizer();
    let mut images = Vec::with_capacity(base.degree());
    for i in 0..base.e() {
        for j in 0..f {
            images.push(pi.pow(i as i64) * rho_l.pow(j as i64));
        }
    }
    Ok((
        l0.clone(),
        FieldMap {
            source: base.clone(),
            target: l0,
            images,
        },
    ))
}

/// `base((ζ π)^{1/b})` for the Teichmüller lift `ζ` of `zeta`, `p ∤ b`.
fn tame_over(base: &LocalField, b: usize, zeta: &FqElem) -> Result<(LocalField, FieldMap)> {
    let cfg = base.config();
    let (e, f) = (base.e(), base.f());
    let u = LocalField::unramified(hi_config(cfg), f);
    let z = u.teichmuller(zeta);
    let coef = |i: usize| -> Result<PadicElement> {
        if i == e {
            return Ok(u.one());
        }
        u.from_coords(0, base.eisenstein_coeffs()[i].clone(), u.inner().cap())
    };
    let mut eis = vec![vec![BigInt::zero(); f]; b * e];
    for (i, slot) in (0..e).map(|i| (i, b * i)) {
        eis[slot] = int_coords(&(coef(i)? * z.pow((e - i) as i64)), f)?;
    }
    let l0 = LocalField::canonical(cfg, f, eis, None);
    let zl = l0.teichmuller(zeta);
    let pi_img = l0.uniformizer().pow(b as i64) * zl.inv()?;
    let ys = monomials(&l0);
    let mut images = Vec::with_capacity(base.degree());
    for i in 0..e {
        for y in ys.iter().take(f) {
            images.push(pi_img.pow(i as i64) * y);
        }
    }
    Ok((
        l0.clone(),
        FieldMap {
            source: base.clone(),
            target: l0,
            images,
        },
    ))
}

fn egcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        return if a < 0 { (-a, -1, 0) } else { (a, 1, 0) };
    }
    let (g, x, y) = egcd(b, a.rem_euclid(b));
    (g, y, x - a.div_euclid(b) * y)
}

/// `s` with `s a ≡ 1 (mod b)`.
fn bezout_s(a: i64, b: i64) -> i64 {
    egcd(a, b).1
}

/// Minimal polynomial of `x^s π^t` in `K[x]/(q)`, `K` unramified and `q` of
/// root valuation `a/n`: an Eisenstein polynomial.
fn eisenstein_via_krylov(k: &LocalField, q: &Poly, a: i64) -> Result<Vec<Vec<BigInt>>> {
    let n = q.degree() as usize;
    let s = bezout_s(a, n as i64);
    let t = (1 - s * a) / n as i64;
    let modulus = q.clone();
    let xinv = || -> Result<Poly> {
        let c0 = q.coeff(0);
        let tail = Poly::new(k, q.coeffs()[1..].to_vec());
        Ok(tail.scale(&(-c0.inv()?)))
    };
    let gen = if s >= 0 {
        Poly::x(k).pow(s as usize).rem(&modulus)?
    } else {
        xinv()?.pow((-s) as usize).rem(&modulus)?
    };
    let gen = gen.scale(&k.uniformizer().pow(t));
    let mut cols = Vec::with_capacity(n + 1);
    let mut cur = Poly::constant(k.one());
    for _ in 0..=n {
        cols.push((0..n).map(|i| cur.coeff(i)).collect::<Vec<_>>());
        cur = cur.mul(&gen).rem(&modulus)?;
    }
    let m: linalg::Matrix = (0..n).map(|r| (0..n).map(|c| cols[c][r].clone()).collect()).collect();
    let a_k = linalg::solve(&m, &cols[n])?;
    let f = k.f();
    let mut eis = Vec::with_capacity(n);
    for (i, c) in a_k.iter().enumerate() {
        let v = c.valuation_pi();
        let ok = if i == 0 { v == Some(1) } else { v.is_none_or(|v| v >= 1) };
        if !ok {
            return Err(Error::PrecisionExhausted(
                "uniformizer polynomial is not Eisenstein".into(),
            ));
        }
        eis.push(int_coords(&(-c), f)?);
    }
    Ok(eis)
}

/// Bare field `L0 ⊇ base` containing a root of the irreducible `p`, with the base map.
fn build_over(base: &LocalField, p: &Poly) -> Result<(LocalField, FieldMap)> {
    let cfg = base.config();
    let prime = cfg.p as i64;
    if p.degree() == 1 {
        return Ok(bare_copy(base));
    }
    let cert = certify(p)?;
    let (a, b) = (cert.a, cert.b);
    let r = cert.relative_f();
    if b == 1 {
        return unramified_over(base, r);
    }
    if b % prime != 0 {
        let (u, m1) = if r > 1 {
            unramified_over(base, r)?
        } else {
            bare_copy(base)
        };
        let k = u.residue_field().clone();
        let res = cert
            .residual
            .iter()
            .map(|c| map_residue(&m1, c))
            .collect::<Result<Vec<_>>>()?;
        let (c, _) = k
            .roots(&res)
            .into_iter()
            .next()
            .ok_or_else(|| Error::PrecisionExhausted("residual polynomial has no root".into()))?;
        let s = bezout_s(a, b);
        let cs = if s >= 0 {
            k.pow(&c, s as u128)
        } else {
            k.pow(&k.inv(&c).ok_or(Error::DivisionByZero)?, (-s) as u128)
        };
        let (l0, m2) = tame_over(&u, b as usize, &cs)?;
        return Ok((l0, m1.then(&m2)?));
    }
    if base.e() == 1 && r == 1 {
        let khi = bare(base, hi_config(cfg));
        let q = cert.poly.map(&khi, |c| Ok(transfer(&khi, c)))?;
        let eis = eisenstein_via_krylov(&khi, &q, a)?;
        let l0 = LocalField::canonical(cfg, base.f(), eis, None);
        let images = monomials(&l0).into_iter().take(base.f()).collect();
        return Ok((
            l0.clone(),
            FieldMap {
                source: base.clone(),
                target: l0,
                images,
            },
        ));
    }
    Err(Error::Unsupported(
        "wild extension over a ramified base or with residue extension".into(),
    ))
}

fn finalize(base: &LocalField, l0: &LocalField, map: &FieldMap, poly: &Poly, gen: &PadicElement) -> LocalField {
    let tower = Tower {
        base: base.clone(),
        poly: poly.coeffs().iter().map(|c| c.repr().clone()).collect(),
        generator: gen.repr().clone(),
        base_images: map.images.iter().map(|c| c.repr().clone()).collect(),
        coord_solver: OnceLock::new(),
    };
    LocalField::canonical(l0.config(), l0.f(), l0.eisenstein_coeffs().to_vec(), Some(tower))
}

/// `base[x]/(poly)` after certifying irreducibility; the generator is a root of `poly`.
pub fn make_extension(base: &LocalField, poly: &Poly) -> Result<LocalField> {
    let p = poly.coerce(base)?;
    if p.degree() < 1 {
        return Err(Error::InvalidInput("extension polynomial must have degree ≥ 1".into()));
    }
    let p = p.monic()?;
    if !p.coeffs().iter().all(|c| c.is_integral()) {
        return Err(Error::InvalidInput("coefficients must be integral".into()));
    }
    let (l0, map) = build_over(base, &p)?;
    let pl = map.apply_poly(&p)?;
    let gen = super::roots::roots(&pl)?
        .into_iter()
        .next()
        .ok_or_else(|| Error::PrecisionExhausted("no root found in the constructed field".into()))?;
    if base.depth() >= 2 {
        // Flatten: re-express over the base of `base` through a primitive element.
        let lower = base.base().unwrap().clone();
        let down = FieldMap::inclusion(&lower, base)?.then(&map)?;
        return Ok(with_primitive(&lower, &l0, &down)?.0);
    }
    Ok(finalize(base, &l0, &map, &p, &gen))
}

/// Integer-coefficient convenience wrapper.
pub fn make_extension_int(base: &LocalField, coeffs: &[i64]) -> Result<LocalField> {
    make_extension(base, &Poly::from_ints(base, coeffs))
}

/// A generator of `l0` over the image of `base` together with its minimal polynomial.
fn find_primitive(base: &LocalField, l0: &LocalField, map: &FieldMap) -> Result<(PadicElement, Poly)> {
    let n = l0.degree() / base.degree();
    let (pi, y) = (l0.uniformizer(), l0.unramified_generator());
    let one = l0.one();
    let cands = vec![
        &pi + &y,
        &pi + &y.scale_int(2),
        &(&pi + &y) + &(&y * &y),
        &(&pi * &y) + &(&pi + &one),
        pi.clone(),
        y.clone(),
        &y + &(&pi * &pi),
    ];
    let mut best: Option<(i64, PadicElement, linalg::Matrix)> = None;
    for g in cands {
        let bm = basis_matrix(&map.images, &g, n);
        let d = linalg::det(&bm)?;
        if let Some(v) = d.valuation_pi() {
            if best.as_ref().is_none_or(|(bv, _, _)| v < *bv) {
                best = Some((v, g, bm));
            }
            if v == 0 {
                break;
            }
        }
    }
    let (_, g, bm) = best.ok_or_else(|| Error::PrecisionExhausted("no primitive element found".into()))?;
    let c = linalg::solve(&bm, &qp_coords(&g.pow(n as i64)))?;
    let m = base.degree();
    let mut coeffs: Vec<PadicElement> = c.chunks(m).map(|ch| -from_qp_coords(base, ch)).collect();
    coeffs.push(base.one());
    Ok((g, Poly::new(base, coeffs)))
}

fn with_primitive(base: &LocalField, l0: &LocalField, map: &FieldMap) -> Result<(LocalField, FieldMap)> {
    let (g, poly) = find_primitive(base, l0, map)?;
    let l = finalize(base, l0, map, &poly, &g);
    let images = map.images.iter().map(|x| transfer(&l, x)).collect();
    Ok((
        l.clone(),
        FieldMap {
            source: base.clone(),
            target: l,
            images,
        },
    ))
}

/// Splitting field of a polynomial together with all of its distinct roots.
#[derive(Clone, Debug)]
pub struct SplittingField {
    pub field: LocalField,
    pub roots: Vec<PadicElement>,
}

/// Builds a field over `base` in which `poly` splits, of degree at most
/// `max_degree` over `base`. The result is `base` itself or a single extension
/// step over it.
pub fn splitting_field(base: &LocalField, poly: &Poly, max_degree: usize) -> Result<SplittingField> {
    let p = poly.coerce(base)?.squarefree_part()?;
    let n = p.degree().max(0) as usize;
    let prime = base.p() as i64;
    let (mut f, mut map) = bare_copy(base);
    let mut extended = false;
    let found = loop {
        let pf = map.apply_poly(&p)?;
        let ex = explore(&pf)?;
        if ex.roots.len() >= n {
            break ex.roots;
        }
        let hint = ex.hints.first().cloned().ok_or_else(|| {
            Error::PrecisionExhausted("roots missing but no extension hint".into())
        })?;
        let (f1, m1) = match hint {
            Hint::Unramified(d) => unramified_over(&f, d)?,
            Hint::Ramified { a, b, c } => {
                if b % prime == 0 {
                    return Err(Error::Unsupported("wildly ramified splitting field".into()));
                }
                let k = f.residue_field().clone();
                let s = bezout_s(a, b);
                let cs = if s >= 0 {
                    k.pow(&c, s as u128)
                } else {
                    k.pow(&k.inv(&c).ok_or(Error::DivisionByZero)?, (-s) as u128)
                };
                tame_over(&f, b as usize, &cs)?
            }
        };
        let deg = f1.degree() / base.degree();
        if deg > max_degree {
            return Err(Error::SplittingFieldTooLarge(deg));
        }
        map = map.then(&m1)?;
        f = f1;
        extended = true;
    };
    if !extended {
        return Ok(SplittingField {
            field: base.clone(),
            roots: found.iter().map(|r| transfer(base, r)).collect(),
        });
    }
    let (l, _) = with_primitive(base, &f, &map)?;
    Ok(SplittingField {
        roots: found.iter().map(|r| transfer(&l, r)).collect(),
        field: l,
    })
}
