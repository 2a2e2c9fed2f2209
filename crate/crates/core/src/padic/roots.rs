//! Newton polygons, residual polynomials and root finding over `O_K`.

use num_rational::Ratio;

use super::element::PadicElement;
use super::fq::{FqElem, FqPoly};
use super::poly::Poly;
use crate::error::{Error, Result};

/// Edge of the lower convex hull of `(i, v(c_i))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segment {
    pub start: usize,
    pub end: usize,
    pub v_start: i64,
    pub v_end: i64,
}

impl Segment {
    /// Common valuation (in `π`-units) of the roots belonging to this edge.
    pub fn slope(&self) -> Ratio<i64> {
        Ratio::new(self.v_start - self.v_end, (self.end - self.start) as i64)
    }
}

pub fn newton_polygon(p: &Poly) -> Vec<Segment> {
    let pts: Vec<(i64, i64)> = p
        .coeffs()
        .iter()
        .enumerate()
        .filter_map(|(i, c)| c.valuation_pi().map(|v| (i as i64, v)))
        .collect();
    let mut hull: Vec<(i64, i64)> = Vec::new();
    for &pt in &pts {
        while hull.len() >= 2 {
            let o = hull[hull.len() - 2];
            let a = hull[hull.len() - 1];
            let cross = (a.0 - o.0) * (pt.1 - o.1) - (a.1 - o.1) * (pt.0 - o.0);
            if cross <= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    hull.windows(2)
        .map(|w| Segment {
            start: w[0].0 as usize,
            end: w[1].0 as usize,
            v_start: w[0].1,
            v_end: w[1].1,
        })
        .collect()
}

pub(crate) fn pi_pow(field: &super::LocalField, k: i64) -> PadicElement {
    field.uniformizer().pow(k)
}

/// Residual polynomial of an edge in the variable `x^b / π^a`.
pub fn residual(p: &Poly, s: &Segment) -> FqPoly {
    let field = p.field();
    let k = field.residue_field();
    let rho = s.slope();
    let (a, b) = (*rho.numer(), *rho.denom());
    let len = (s.end - s.start) as i64 / b;
    let mut out = Vec::with_capacity(len as usize + 1);
    for j in 0..=len {
        let i = s.start + (j * b) as usize;
        let c = p.coeff(i);
        let line = s.v_start - j * a;
        match c.valuation_pi() {
            Some(v) if v == line => {
                let u = &c * &pi_pow(field, -line);
                out.push(u.residue());
            }
            _ => out.push(k.zero()),
        }
    }
    k.poly_trim(out)
}

/// Why some roots are missing from the coefficient field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Hint {
    /// A residual factor of this degree needs a larger residue field.
    Unramified(usize),
    /// Roots of valuation `a/b` with `x^b/π^a` reducing to `c`.
    Ramified { a: i64, b: i64, c: FqElem },
}

#[derive(Clone, Debug)]
pub struct Exploration {
    pub roots: Vec<PadicElement>,
    pub hints: Vec<Hint>,
}

/// Reinterprets the known digits as exact, up to the structure-constant precision.
fn exactify(x: &PadicElement) -> PadicElement {
    let r = x.repr();
    if r.is_zero() {
        return x.clone();
    }
    let inner = x.field().inner();
    x.field()
        .elem(inner.normalize(r.shift, r.coeffs.clone(), inner.cap() as i64))
}

/// Hensel iteration. Errors in the iterates do not propagate, so each iterate
/// is treated as exact and the final precision is read off the last residual.
fn newton(p: &Poly, x0: PadicElement) -> Result<PadicElement> {
    let dp = p.derivative();
    let field = p.field();
    let steps = 4 + (64 - ((field.e() as u64) * (field.prec() as u64 + 8)).leading_zeros()) as usize;
    let mut x = exactify(&x0);
    for _ in 0..steps * 2 {
        let v = p.eval(&x);
        let d = dp.eval(&x);
        let vd = d.valuation_pi().ok_or_else(|| {
            Error::PrecisionExhausted("derivative vanished during Hensel lifting".into())
        })?;
        if v.is_zero() {
            return Ok(match v.abs_prec_pi() {
                Some(a) => x.truncate_abs_pi(a - vd),
                None => x,
            });
        }
        let step = v.try_div(&d)?;
        let next = &x - &step;
        if step.valuation_pi().unwrap() >= field.e() as i64 * (field.prec() as i64 + 4) + vd {
            return Ok(next.truncate_abs_pi(v.abs_prec_pi().unwrap() - vd));
        }
        x = exactify(&next);
    }
    Ok(x)
}

fn explore_rec(p: &Poly, only_integral: bool, depth: usize, out: &mut Exploration) -> Result<()> {
    let field = p.field().clone();
    if depth > (field.e() * (field.prec() as usize + 8)) {
        return Err(Error::PrecisionExhausted(
            "roots cannot be separated at this precision".into(),
        ));
    }
    let mut p = p.clone();
    while p.degree() >= 1 && p.coeff(0).is_zero() {
        out.roots.push(field.zero());
        p = Poly::new(&field, p.coeffs()[1..].to_vec());
    }
    if p.degree() <= 0 {
        return Ok(());
    }
    let k = field.residue_field().clone();
    for s in newton_polygon(&p) {
        let rho = s.slope();
        if only_integral && rho < Ratio::from_integer(0) {
            continue;
        }
        let (a, b) = (*rho.numer(), *rho.denom());
        let r = residual(&p, &s);
        if b > 1 {
            match k.roots(&r).first() {
                Some((c, _)) => out.hints.push(Hint::Ramified { a, b, c: c.clone() }),
                None => out
                    .hints
                    .push(Hint::Unramified(k.min_factor_degree(&r).unwrap_or(1))),
            }
            continue;
        }
        let rts = k.roots(&r);
        let total: usize = rts.iter().map(|(_, m)| m).sum();
        if (total as isize) < k.poly_deg(&r) {
            out.hints.push(Hint::Unramified(
                k.min_nonlinear_factor_degree(&r).unwrap_or(1),
            ));
        }
        for (c, m) in rts {
            let x0 = &pi_pow(&field, a) * &field.lift_residue(&c);
            if m == 1 {
                out.roots.push(newton(&p, x0)?);
            } else {
                let step = pi_pow(&field, a + 1);
                let q = p.compose_linear(&x0, &step);
                let mut sub = Exploration {
                    roots: vec![],
                    hints: vec![],
                };
                explore_rec(&q, true, depth + 1, &mut sub)?;
                for w in sub.roots {
                    out.roots.push(&x0 + &(&step * &w));
                }
                out.hints.extend(sub.hints);
            }
        }
    }
    Ok(())
}

/// Roots in the coefficient field, plus hints describing the missing ones.
pub fn explore(p: &Poly) -> Result<Exploration> {
    let mut out = Exploration {
        roots: vec![],
        hints: vec![],
    };
    explore_rec(p, false, 0, &mut out)?;
    Ok(out)
}

/// All roots lying in the coefficient field (input should be squarefree).
pub fn roots(p: &Poly) -> Result<Vec<PadicElement>> {
    Ok(explore(p)?.roots)
}

/// Irreducibility certificate from a single-edge Newton polygon with an
/// irreducible residual polynomial, after translating away repeated residues.
#[derive(Clone, Debug)]
pub struct Certificate {
    /// `P(x + shift)`, whose polygon has one edge.
    pub poly: Poly,
    pub shift: PadicElement,
    /// Root valuation of `poly` is `a/b` in `π`-units of the base.
    pub a: i64,
    pub b: i64,
    /// Irreducible residual polynomial of degree `deg / b`.
    pub residual: FqPoly,
}

impl Certificate {
    pub fn relative_e(&self) -> usize {
        self.b as usize
    }

    pub fn relative_f(&self) -> usize {
        self.residual.len() - 1
    }
}

pub fn certify(p: &Poly) -> Result<Certificate> {
    let field = p.field().clone();
    let k = field.residue_field().clone();
    let mut q = p.monic()?;
    let mut shift = field.zero();
    let limit = field.e() * (field.prec() as usize + 8);
    for _ in 0..limit {
        if q.coeff(0).is_zero() {
            if q.degree() == 1 {
                break;
            }
            return Err(Error::PrecisionExhausted(
                "polynomial has a root to the working precision".into(),
            ));
        }
        let segs = newton_polygon(&q);
        if segs.len() != 1 {
            return Err(Error::ReduciblePolynomial);
        }
        let s = &segs[0];
        let rho = s.slope();
        let (a, b) = (*rho.numer(), *rho.denom());
        let r = residual(&q, s);
        if k.is_irreducible(&r) {
            return Ok(Certificate {
                poly: q,
                shift,
                a,
                b,
                residual: k.poly_monic(&r),
            });
        }
        match k.prime_power(&r) {
            None => return Err(Error::ReduciblePolynomial),
            Some((phi, _)) if b == 1 && phi.len() == 2 => {
                let c = k.neg(&phi[0]);
                let t = &pi_pow(&field, a) * &field.lift_residue(&c);
                q = q.compose_linear(&t, &field.one());
                shift = &shift + &t;
            }
            Some(_) => {
                return Err(Error::Unsupported(
                    "residual polynomial is a proper power of a non-linear factor".into(),
                ))
            }
        }
    }
    if q.degree() == 1 {
        let r = vec![k.zero(), k.one()];
        return Ok(Certificate {
            poly: q,
            shift,
            a: 0,
            b: 1,
            residual: r,
        });
    }
    Err(Error::PrecisionExhausted(
        "irreducibility could not be decided".into(),
    ))
}
