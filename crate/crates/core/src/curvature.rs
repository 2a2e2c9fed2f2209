//! Coordinate model of `H¹_dR(X)` with its `W`-splitting, the Künneth algebra
//! of `X×X`, and the curvature classes `μ` and `Φ`.
//!
//! Basis of `H¹`: `ω_1..ω_g` (indices `0..g`) then `ω̄_1..ω̄_g` (indices
//! `g..2g`). The trace of a product of two classes is `cup[a][b]` with
//! `tr(ω̄_i ∪ ω_j) = δ_ij`, so the cup matrix is `[[0, −I], [I, 0]]`.
//! `tr` on `H²(X)` sends the class of a point to 1.

use num_traits::{One, Zero};


use crate::error::{Error, Result};
use crate::padic::{LocalField, PadicElement};
use crate::qpoly::{q, solve, zeros, QMat, Q};

fn scale_mat(a: &QMat, c: &Q) -> QMat {
    a.iter().map(|r| r.iter().map(|x| x * c).collect()).collect()
}

fn add_mat(a: &QMat, b: &QMat) -> QMat {
    a.iter()
        .zip(b)
        .map(|(r, s)| r.iter().zip(s).map(|(x, y)| x + y).collect())
        .collect()
}

/// `H¹_dR(X)` of a curve of genus `g` with its cup pairing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeRhamSpace {
    pub g: usize,
    pub cup: QMat,
}

impl DeRhamSpace {
    pub fn new(g: usize) -> Result<Self> {
        if g == 0 {
            return Err(Error::InvalidInput("genus must be at least 1".into()));
        }
        let mut cup = zeros(2 * g, 2 * g);
        for i in 0..g {
            cup[g + i][i] = q(1);
            cup[i][g + i] = q(-1);
        }
        Ok(DeRhamSpace { g, cup })
    }

    pub fn dim(&self) -> usize {
        2 * self.g
    }

    /// `ω_i` (0-based).
    pub fn omega(&self, i: usize) -> H1Class {
        self.basis(i)
    }

    /// `ω̄_i` (0-based).
    pub fn omega_bar(&self, i: usize) -> H1Class {
        self.basis(self.g + i)
    }

    fn basis(&self, k: usize) -> H1Class {
        let mut c = vec![Q::zero(); self.dim()];
        c[k] = Q::one();
        H1Class { coords: c }
    }

    /// `tr(a ∪ b)`.
    pub fn pair(&self, a: &H1Class, b: &H1Class) -> Q {
        let mut acc = Q::zero();
        for (i, x) in a.coords.iter().enumerate() {
            for (j, y) in b.coords.iter().enumerate() {
                acc += x * y * &self.cup[i][j];
            }
        }
        acc
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct H1Class {
    pub coords: Vec<Q>,
}

/// Element of `H¹ ⊗ Ω¹`: `coords[a][j]` multiplies `e_a ⊗ ω_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HTensorClass {
    pub coords: QMat,
}

impl HTensorClass {
    pub fn zero(s: &DeRhamSpace) -> Self {
        HTensorClass {
            coords: zeros(s.dim(), s.g),
        }
    }

    pub fn scale(&self, c: &Q) -> Self {
        HTensorClass {
            coords: scale_mat(&self.coords, c),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        HTensorClass {
            coords: add_mat(&self.coords, &o.coords),
        }
    }

    /// `tr` of the cup product of the two legs, with `ω_j` read as a class.
    pub fn cup_trace(&self, s: &DeRhamSpace) -> Q {
        let mut acc = Q::zero();
        for (a, row) in self.coords.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                acc += x * &s.cup[a][j];
            }
        }
        acc
    }

    pub fn to_padic(&self, field: &LocalField) -> Vec<Vec<PadicElement>> {
        self.coords
            .iter()
            .map(|r| r.iter().map(|x| field.from_ratio(x)).collect())
            .collect()
    }
}

/// Element of `H¹(X×X) ⊗ Ω¹(X×X)`. Rows: `π₁*e_a` (`0..2g`), `π₂*e_a`
/// (`2g..4g`). Columns: `π₁*ω_j` (`0..g`), `π₂*ω_j` (`g..2g`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KunnethHTensor {
    pub coords: QMat,
}

impl KunnethHTensor {
    pub fn zero(s: &DeRhamSpace) -> Self {
        KunnethHTensor {
            coords: zeros(2 * s.dim(), 2 * s.g),
        }
    }

    pub fn pi1(s: &DeRhamSpace, t: &HTensorClass) -> Self {
        let mut k = KunnethHTensor::zero(s);
        for a in 0..s.dim() {
            for j in 0..s.g {
                k.coords[a][j] = t.coords[a][j].clone();
            }
        }
        k
    }

    pub fn pi2(s: &DeRhamSpace, t: &HTensorClass) -> Self {
        let mut k = KunnethHTensor::zero(s);
        for a in 0..s.dim() {
            for j in 0..s.g {
                k.coords[s.dim() + a][s.g + j] = t.coords[a][j].clone();
            }
        }
        k
    }

    pub fn add(&self, o: &Self) -> Self {
        KunnethHTensor {
            coords: add_mat(&self.coords, &o.coords),
        }
    }

    pub fn scale(&self, c: &Q) -> Self {
        KunnethHTensor {
            coords: scale_mat(&self.coords, c),
        }
    }

    pub fn nonzero_entries(&self) -> usize {
        self.coords.iter().flatten().filter(|x| !x.is_zero()).count()
    }
}

/// `H²(X×X) = π₁*H² ⊕ π₂*H² ⊕ π₁*H¹ ∪ π₂*H¹`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct H2Kunneth {
    pub top1: Q,
    pub top2: Q,
    /// `mixed[a][b]` multiplies `π₁*e_a ∪ π₂*e_b`.
    pub mixed: QMat,
}

/// `μ = (1/g) Σ ω̄_i ⊗ ω_i`.
pub fn mu(s: &DeRhamSpace) -> HTensorClass {
    let mut t = HTensorClass::zero(s);
    let c = Q::new(1.into(), (s.g as i64).into());
    for i in 0..s.g {
        t.coords[s.g + i][i] = c.clone();
    }
    t
}

/// `Φ = π₁*μ + π₂*μ − Σ (π₁*ω̄_i ⊗ π₂*ω_i + π₂*ω̄_i ⊗ π₁*ω_i)`.
pub fn phi(s: &DeRhamSpace) -> KunnethHTensor {
    let m = mu(s);
    let mut k = KunnethHTensor::pi1(s, &m).add(&KunnethHTensor::pi2(s, &m));
    let g = s.g;
    for i in 0..g {
        k.coords[g + i][g + i] -= q(1);
        k.coords[2 * g + g + i][i] -= q(1);
    }
    k
}

/// `Δ*`: both projections become the identity.
pub fn diagonal_pullback(s: &DeRhamSpace, t: &KunnethHTensor) -> HTensorClass {
    let (n, g) = (s.dim(), s.g);
    let mut out = HTensorClass::zero(s);
    for a in 0..n {
        for j in 0..g {
            out.coords[a][j] = &t.coords[a][j] + &t.coords[a][g + j] + &t.coords[n + a][j] + &t.coords[n + a][g + j];
        }
    }
    out
}

/// `i_P*` for `i_P(x) = (P, x)`: `π₁*` classes die, `π₂*` becomes the identity.
pub fn section_pullback(s: &DeRhamSpace, t: &KunnethHTensor) -> HTensorClass {
    let (n, g) = (s.dim(), s.g);
    let mut out = HTensorClass::zero(s);
    for a in 0..n {
        for j in 0..g {
            out.coords[a][j] = t.coords[n + a][g + j].clone();
        }
    }
    out
}

/// Cup product of the `H¹` leg with the `Ω¹` leg.
pub fn cup_of_htensor(s: &DeRhamSpace, t: &KunnethHTensor) -> H2Kunneth {
    let (n, g) = (s.dim(), s.g);
    let mut out = H2Kunneth {
        top1: Q::zero(),
        top2: Q::zero(),
        mixed: zeros(n, n),
    };
    for (row, r) in t.coords.iter().enumerate() {
        for (col, x) in r.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            let (left2, a) = (row >= n, row % n);
            let (right2, b) = (col >= g, col % g);
            match (left2, right2) {
                (false, false) => out.top1 += x * &s.cup[a][b],
                (true, true) => out.top2 += x * &s.cup[a][b],
                (false, true) => out.mixed[a][b] += x,
                // π₂*e_a ∪ π₁*e_b = −π₁*e_b ∪ π₂*e_a
                (true, false) => out.mixed[b][a] -= x,
            }
        }
    }
    out
}

/// The class `c` with `tr(c ∪ φ) = tr(Δ*φ)` for every `φ` in the Künneth basis.
pub fn diagonal_class(s: &DeRhamSpace) -> Result<H2Kunneth> {
    let n = s.dim();
    // unknowns: top1, top2, mixed[a][b] at 2 + a*n + b
    let m = 2 + n * n;
    let mut rows: QMat = Vec::with_capacity(m);
    let mut rhs: Vec<Q> = Vec::with_capacity(m);
    // φ = π₁*[pt]: pairs with the π₂* top class
    let mut r = vec![Q::zero(); m];
    r[1] = q(1);
    rows.push(r);
    rhs.push(q(1));
    let mut r = vec![Q::zero(); m];
    r[0] = q(1);
    rows.push(r);
    rhs.push(q(1));
    // φ = π₁*e_c ∪ π₂*e_d: tr((π₁*e_a ∪ π₂*e_b) ∪ φ) = −cup[a][c]·cup[b][d]
    for c in 0..n {
        for d in 0..n {
            let mut r = vec![Q::zero(); m];
            for a in 0..n {
                for b in 0..n {
                    r[2 + a * n + b] = -(&s.cup[a][c] * &s.cup[b][d]);
                }
            }
            rows.push(r);
            rhs.push(s.cup[c][d].clone());
        }
    }
    let x = solve(&rows, &rhs).ok_or(Error::SingularDuality)?;
    Ok(H2Kunneth {
        top1: x[0].clone(),
        top2: x[1].clone(),
        mixed: (0..n).map(|a| x[2 + a * n..2 + (a + 1) * n].to_vec()).collect(),
    })
}

/// `deg(L)·μ`.
pub fn curvature_admissible(deg: i64, s: &DeRhamSpace) -> HTensorClass {
    mu(s).scale(&q(deg))
}

/// Projection onto `W` along `Ω¹`.
pub fn w_projection(s: &DeRhamSpace, h: &H1Class) -> H1Class {
    let mut c = h.coords.clone();
    for x in c.iter_mut().take(s.g) {
        *x = Q::zero();
    }
    H1Class { coords: c }
}

/// Outcome of the three curvature identities at one genus.
#[derive(Clone, Debug)]
pub struct CurvatureReport {
    pub g: usize,
    pub diagonal: bool,
    pub section: bool,
    pub cup_is_diagonal: bool,
}

impl CurvatureReport {
    pub fn all(&self) -> bool {
        self.diagonal && self.section && self.cup_is_diagonal
    }
}

pub fn check_identities(g: usize) -> Result<CurvatureReport> {
    let s = DeRhamSpace::new(g)?;
    let p = phi(&s);
    let m = mu(&s);
    Ok(CurvatureReport {
        g,
        diagonal: diagonal_pullback(&s, &p) == m.scale(&q(2 - 2 * g as i64)),
        section: section_pullback(&s, &p) == m,
        cup_is_diagonal: cup_of_htensor(&s, &p) == diagonal_class(&s)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qpoly::{inverse, qr};

    #[test]
    fn mu_examples() {
        let s1 = DeRhamSpace::new(1).unwrap();
        assert_eq!(mu(&s1).coords, vec![vec![q(0)], vec![q(1)]]);
        let s2 = DeRhamSpace::new(2).unwrap();
        let m = mu(&s2);
        assert_eq!(m.coords[2][0], qr(1, 2));
        assert_eq!(m.coords[3][1], qr(1, 2));
        assert_eq!(m.coords.iter().flatten().filter(|x| !x.is_zero()).count(), 2);
        for g in 1..5 {
            let s = DeRhamSpace::new(g).unwrap();
            assert_eq!(mu(&s).cup_trace(&s), q(1));
        }
    }

    #[test]
    fn phi_and_pullbacks() {
        let s = DeRhamSpace::new(1).unwrap();
        let p = phi(&s);
        assert_eq!(p.nonzero_entries(), 4);
        for g in 1..=5 {
            let r = check_identities(g).unwrap();
            assert!(r.all(), "{r:?}");
        }
        let s = DeRhamSpace::new(3).unwrap();
        let m = mu(&s);
        assert_eq!(diagonal_pullback(&s, &KunnethHTensor::pi1(&s, &m)), m);
        assert_eq!(section_pullback(&s, &KunnethHTensor::pi1(&s, &m)), HTensorClass::zero(&s));
        assert_eq!(section_pullback(&s, &KunnethHTensor::pi2(&s, &m)), m);
        let mixed = KunnethHTensor::pi1(&s, &m)
            .add(&KunnethHTensor::pi2(&s, &m))
            .add(&phi(&s).scale(&q(-1)));
        assert_eq!(diagonal_pullback(&s, &mixed), m.scale(&q(2 * 3)));
    }

    #[test]
    fn diagonal_class_shape() {
        let s = DeRhamSpace::new(2).unwrap();
        let d = diagonal_class(&s).unwrap();
        assert_eq!((d.top1.clone(), d.top2.clone()), (q(1), q(1)));
        assert_eq!(d.mixed, inverse(&s.cup).unwrap());
        let z = cup_of_htensor(&s, &KunnethHTensor::zero(&s));
        assert!(z.top1.is_zero() && z.mixed.iter().flatten().all(|x| x.is_zero()));
    }

    #[test]
    fn admissible_and_projection() {
        let s = DeRhamSpace::new(3).unwrap();
        assert_eq!(curvature_admissible(0, &s), HTensorClass::zero(&s));
        assert_eq!(curvature_admissible(1, &s), mu(&s));
        let canon = diagonal_pullback(&s, &phi(&s)).scale(&q(-1));
        assert_eq!(curvature_admissible(4, &s), canon);
        assert_eq!(w_projection(&s, &s.omega_bar(0)), s.omega_bar(0));
        assert!(w_projection(&s, &s.omega(1)).coords.iter().all(|x| x.is_zero()));
        for a in 0..6 {
            for b in 0..6 {
                assert_eq!(s.cup[a][b], -s.cup[b][a].clone());
            }
        }
    }
}
