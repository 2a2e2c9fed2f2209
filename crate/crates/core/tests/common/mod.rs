//! Random generators shared by the acceptance and property targets.
#![allow(dead_code)]

use pak_core::coleman::{BiPoly, FamilyForm, MeromorphicForm};
use pak_core::laurent::{A1Element, LaurentTrunc};
use pak_core::padic::{LocalField, PadicElement, PrimeConfig};
use pak_core::qpoly::{q, QPoly};
use rand::Rng;

pub const N: u32 = 32;
pub const TARGET: i64 = N as i64 - 4;

pub fn qp(p: u32) -> LocalField {
    LocalField::qp(PrimeConfig::new(p, N).unwrap())
}

pub fn rand_int<R: Rng>(rng: &mut R, bound: i64) -> i64 {
    rng.gen_range(-bound..=bound)
}

/// `Σ c_k z^k` for `low ≤ k < high` with small random integer coefficients.
pub fn rand_laurent<R: Rng>(field: &LocalField, rng: &mut R, low: i64, high: i64) -> LaurentTrunc {
    let c: Vec<i64> = (low..high).map(|_| rand_int(rng, 50)).collect();
    LaurentTrunc::from_ints(field, low, &c, high)
}

/// `f + a·log z` with `f` of order at least `-4`.
pub fn rand_a1<R: Rng>(field: &LocalField, rng: &mut R, high: i64, with_log: bool) -> A1Element {
    let low = rng.gen_range(-4..=0);
    let a = if with_log { field.from_int(rand_int(rng, 20)) } else { field.zero() };
    A1Element::new(rand_laurent(field, rng, low, high), a)
}

/// A rational-integer element of the field.
pub fn rand_elem<R: Rng>(field: &LocalField, rng: &mut R) -> PadicElement {
    field.from_int(rand_int(rng, 1000))
}

/// Product of distinct linear factors `t − r` and at most one quadratic
/// `t² − d`; total degree at most `max_deg`.
pub fn rand_den<R: Rng>(rng: &mut R, max_deg: usize, quad: Option<i64>) -> QPoly {
    let mut roots: Vec<i64> = Vec::new();
    let mut den = QPoly::one();
    let mut deg = 0;
    if let Some(d) = quad {
        den = QPoly::from_ints(&[-d, 0, 1]);
        deg = 2;
    }
    let target = rng.gen_range(deg.max(1)..=max_deg);
    while deg < target {
        let r = rand_int(rng, 12);
        let mult = if rng.gen_bool(0.25) && deg + 2 <= target { 2 } else { 1 };
        if roots.contains(&r) {
            continue;
        }
        roots.push(r);
        den = den.mul(&QPoly::from_ints(&[-r, 1]).pow(mult));
        deg += mult as usize;
    }
    den
}

pub fn rand_num<R: Rng>(rng: &mut R, max_deg: usize) -> QPoly {
    loop {
        let d = rng.gen_range(0..=max_deg);
        let c: Vec<i64> = (0..=d).map(|_| rand_int(rng, 9)).collect();
        let p = QPoly::from_ints(&c);
        if !p.is_zero() {
            return p;
        }
    }
}

/// Quadratic `d` whose square root generates an extension of `Q_p` the
/// toolkit can build (non-squares, tame when `p` is odd).
pub fn quadratic_choices(p: u32) -> Vec<i64> {
    match p {
        2 => vec![-3],
        3 => vec![2, -1, 3, 6],
        5 => vec![2, 3, 5, 10],
        7 => vec![3, 5, 7, 14],
        _ => vec![],
    }
}

/// A pair of forms whose joint splitting field has degree at most 4.
pub fn rand_form_pair<R: Rng>(field: &LocalField, rng: &mut R) -> (MeromorphicForm, MeromorphicForm) {
    let qs = quadratic_choices(field.p());
    let pick = |rng: &mut R| -> Option<i64> {
        if rng.gen_bool(0.5) {
            Some(qs[rng.gen_range(0..qs.len())])
        } else {
            None
        }
    };
    let q1 = pick(rng);
    let mut q2 = pick(rng);
    if field.p() == 2 {
        // a second wild step is out of scope; keep one quadratic at p = 2
        if q1.is_some() {
            q2 = None;
        }
    }
    let w = MeromorphicForm::from_q(field, &rand_num(rng, 6), &rand_den(rng, 6, q1)).unwrap();
    let e = MeromorphicForm::from_q(field, &rand_num(rng, 6), &rand_den(rng, 6, q2)).unwrap();
    (w, e)
}

/// `Σ cᵢ dlog(t − aᵢ − bᵢ s)` with constant `cᵢ`, denominators squarefree on
/// the sampled parameter window starting at `s0`.
pub fn rand_third_kind_family<R: Rng>(rng: &mut R, s0: i64) -> FamilyForm {
    'outer: loop {
        let k = rng.gen_range(1..=4);
        let lin: Vec<(i64, i64)> = (0..k).map(|_| (rand_int(rng, 9), rand_int(rng, 3))).collect();
        for s in s0..s0 + 6 {
            let mut vals: Vec<i64> = lin.iter().map(|(a, b)| a + b * s).collect();
            vals.sort();
            vals.dedup();
            if vals.len() < k {
                continue 'outer;
            }
        }
        let factor = |(a, b): (i64, i64)| {
            // t − a − b s
            BiPoly::from_t(QPoly::from_ints(&[-a, 1])).sub(&BiPoly::s().mul(&BiPoly::from_t(QPoly::constant(q(b)))))
        };
        let mut den = BiPoly::from_t(QPoly::one());
        for &l in &lin {
            den = den.mul(&factor(l));
        }
        let mut num = BiPoly::from_t(QPoly::zero());
        for i in 0..k {
            let c = loop {
                let c = rand_int(rng, 5);
                if c != 0 {
                    break c;
                }
            };
            let mut term = BiPoly::from_t(QPoly::constant(q(c)));
            for (j, &l) in lin.iter().enumerate() {
                if j != i {
                    term = term.mul(&factor(l));
                }
            }
            num = num.add(&term);
        }
        return FamilyForm { num, den };
    }
}
