//! Residue fields `F_q = F_p[y]/(h)` and dense polynomials over them.

/// Element of `F_q` as coefficients of `1, y, .., y^(f-1)`.
pub type FqElem = Vec<u64>;

/// Polynomial over `F_q`, low degree first, no trailing zeros.
pub type FqPoly = Vec<FqElem>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fq {
    p: u64,
    f: usize,
    q: u64,
    /// Monic modulus of degree `f`, low degree first.
    h: Vec<u64>,
}

fn pow_u64(p: u64, k: usize) -> u64 {
    (0..k).fold(1u64, |acc, _| acc * p)
}

impl Fq {
    /// `F_p[y]/(h)`; `h` must be monic and irreducible mod `p`.
    pub fn new(p: u64, h: Vec<u64>) -> Self {
        let f = h.len() - 1;
        Fq {
            p,
            f,
            q: pow_u64(p, f),
            h: h.into_iter().map(|c| c % p).collect(),
        }
    }

    pub fn prime(p: u64) -> Self {
        Fq::new(p, vec![0, 1])
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.f
    }

    pub fn order(&self) -> u64 {
        self.q
    }

    pub fn modulus(&self) -> &[u64] {
        &self.h
    }

    pub fn zero(&self) -> FqElem {
        vec![0; self.f]
    }

    pub fn one(&self) -> FqElem {
        self.from_int(1)
    }

    pub fn from_int(&self, n: i64) -> FqElem {
        let mut v = self.zero();
        v[0] = n.rem_euclid(self.p as i64) as u64;
        v
    }

    pub fn is_zero(&self, a: &[u64]) -> bool {
        a.iter().all(|&c| c == 0)
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> FqElem {
        a.iter().zip(b).map(|(x, y)| (x + y) % self.p).collect()
    }

    pub fn sub(&self, a: &[u64], b: &[u64]) -> FqElem {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x + self.p - y) % self.p)
            .collect()
    }

    pub fn neg(&self, a: &[u64]) -> FqElem {
        a.iter().map(|x| (self.p - x) % self.p).collect()
    }

    pub fn mul(&self, a: &[u64], b: &[u64]) -> FqElem {
        let p = self.p;
        let f = self.f;
        let mut t = vec![0u64; 2 * f - 1];
        for (i, x) in a.iter().enumerate() {
            if *x == 0 {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                t[i + j] = (t[i + j] + x * y) % p;
            }
        }
        for k in (f..t.len()).rev() {
            let c = t[k];
            if c == 0 {
                continue;
            }
            t[k] = 0;
            for j in 0..f {
                t[k - f + j] = (t[k - f + j] + (p - c) * self.h[j]) % p;
            }
        }
        t.truncate(f);
        t
    }

    pub fn pow(&self, a: &[u64], mut n: u128) -> FqElem {
        let mut base = a.to_vec();
        let mut acc = self.one();
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            n >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: &[u64]) -> Option<FqElem> {
        if self.is_zero(a) {
            None
        } else {
            Some(self.pow(a, self.q as u128 - 2))
        }
    }

    /// Integer index `Σ a_j p^j`.
    pub fn index(&self, a: &[u64]) -> u64 {
        a.iter().rev().fold(0, |acc, &c| acc * self.p + c)
    }

    pub fn from_index(&self, mut n: u64) -> FqElem {
        let mut v = self.zero();
        for c in v.iter_mut() {
            *c = n % self.p;
            n /= self.p;
        }
        v
    }

    /// Element of `F_q` given by the class of `y`.
    pub fn gen(&self) -> FqElem {
        if self.f == 1 {
            vec![(self.p - self.h[0]) % self.p]
        } else {
            let mut v = self.zero();
            v[1] = 1;
            v
        }
    }

    /// A generator of the multiplicative group (smallest index).
    pub fn primitive_element(&self) -> FqElem {
        let n = self.q - 1;
        let primes = prime_factors(n);
        for idx in 1..self.q {
            let a = self.from_index(idx);
            if primes
                .iter()
                .all(|r| self.pow(&a, (n / r) as u128) != self.one())
            {
                return a;
            }
        }
        self.one()
    }

    // ---- polynomials ----

    pub fn poly_trim(&self, mut a: FqPoly) -> FqPoly {
        while a.last().is_some_and(|c| self.is_zero(c)) {
            a.pop();
        }
        a
    }

    pub fn poly_deg(&self, a: &FqPoly) -> isize {
        a.len() as isize - 1
    }

    pub fn poly_x(&self) -> FqPoly {
        vec![self.zero(), self.one()]
    }

    pub fn poly_add(&self, a: &FqPoly, b: &FqPoly) -> FqPoly {
        let n = a.len().max(b.len());
        let z = self.zero();
        let r = (0..n)
            .map(|i| self.add(a.get(i).unwrap_or(&z), b.get(i).unwrap_or(&z)))
            .collect();
        self.poly_trim(r)
    }

    pub fn poly_sub(&self, a: &FqPoly, b: &FqPoly) -> FqPoly {
        let n = a.len().max(b.len());
        let z = self.zero();
        let r = (0..n)
            .map(|i| self.sub(a.get(i).unwrap_or(&z), b.get(i).unwrap_or(&z)))
            .collect();
        self.poly_trim(r)
    }

    pub fn poly_mul(&self, a: &FqPoly, b: &FqPoly) -> FqPoly {
        if a.is_empty() || b.is_empty() {
            return vec![];
        }
        let mut r = vec![self.zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if self.is_zero(x) {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                r[i + j] = self.add(&r[i + j], &self.mul(x, y));
            }
        }
        self.poly_trim(r)
    }

    pub fn poly_scale(&self, a: &FqPoly, c: &[u64]) -> FqPoly {
        self.poly_trim(a.iter().map(|x| self.mul(x, c)).collect())
    }

    pub fn poly_monic(&self, a: &FqPoly) -> FqPoly {
        match a.last() {
            None => vec![],
            Some(lc) => self.poly_scale(a, &self.inv(lc).expect("nonzero")),
        }
    }

    /// Division with remainder; `b` must be nonzero.
    pub fn poly_divrem(&self, a: &FqPoly, b: &FqPoly) -> (FqPoly, FqPoly) {
        let db = b.len() - 1;
        let inv = self.inv(&b[db]).expect("nonzero divisor");
        let mut r = a.clone();
        if r.len() < b.len() {
            return (vec![], r);
        }
        let mut q = vec![self.zero(); r.len() - db];
        while r.len() >= b.len() {
            let k = r.len() - 1 - db;
            let c = self.mul(&r[r.len() - 1], &inv);
            for (j, bj) in b.iter().enumerate() {
                r[k + j] = self.sub(&r[k + j], &self.mul(&c, bj));
            }
            q[k] = c;
            r = self.poly_trim(r);
        }
        (self.poly_trim(q), r)
    }

    pub fn poly_rem(&self, a: &FqPoly, b: &FqPoly) -> FqPoly {
        self.poly_divrem(a, b).1
    }

    /// Monic gcd.
    pub fn poly_gcd(&self, a: &FqPoly, b: &FqPoly) -> FqPoly {
        let mut a = a.clone();
        let mut b = b.clone();
        while !b.is_empty() {
            let r = self.poly_rem(&a, &b);
            a = b;
            b = r;
        }
        self.poly_monic(&a)
    }

    /// Extended gcd: returns `(g, s, t)` with `s a + t b = g`, `g` monic.
    pub fn poly_xgcd(&self, a: &FqPoly, b: &FqPoly) -> (FqPoly, FqPoly, FqPoly) {
        let (mut r0, mut r1) = (a.clone(), b.clone());
        let (mut s0, mut s1) = (vec![self.one()], vec![]);
        let (mut t0, mut t1) = (vec![], vec![self.one()]);
        while !r1.is_empty() {
            let (q, r) = self.poly_divrem(&r0, &r1);
            let s2 = self.poly_sub(&s0, &self.poly_mul(&q, &s1));
            let t2 = self.poly_sub(&t0, &self.poly_mul(&q, &t1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s2;
            t0 = t1;
            t1 = t2;
        }
        let lc = match r0.last() {
            Some(c) => self.inv(c).expect("nonzero"),
            None => return (vec![], s0, t0),
        };
        (
            self.poly_scale(&r0, &lc),
            self.poly_scale(&s0, &lc),
            self.poly_scale(&t0, &lc),
        )
    }

    pub fn poly_mulmod(&self, a: &FqPoly, b: &FqPoly, m: &FqPoly) -> FqPoly {
        self.poly_rem(&self.poly_mul(a, b), m)
    }

    pub fn poly_powmod(&self, a: &FqPoly, mut n: u128, m: &FqPoly) -> FqPoly {
        let mut base = self.poly_rem(a, m);
        let mut acc = self.poly_rem(&vec![self.one()], m);
        while n > 0 {
            if n & 1 == 1 {
                acc = self.poly_mulmod(&acc, &base, m);
            }
            base = self.poly_mulmod(&base, &base, m);
            n >>= 1;
        }
        acc
    }

    pub fn poly_eval(&self, a: &FqPoly, x: &[u64]) -> FqElem {
        a.iter()
            .rev()
            .fold(self.zero(), |acc, c| self.add(&self.mul(&acc, x), c))
    }

    /// `x^(q^d) mod m`.
    fn frobenius_power(&self, d: usize, m: &FqPoly) -> FqPoly {
        let mut r = self.poly_rem(&self.poly_x(), m);
        for _ in 0..d {
            r = self.poly_powmod(&r, self.q as u128, m);
        }
        r
    }

    /// Rabin's irreducibility test.
    pub fn is_irreducible(&self, g: &FqPoly) -> bool {
        let n = g.len() as isize - 1;
        if n <= 0 {
            return false;
        }
        if n == 1 {
            return true;
        }
        let n = n as usize;
        let x = self.poly_rem(&self.poly_x(), g);
        if self.frobenius_power(n, g) != x {
            return false;
        }
        for r in prime_factors(n as u64) {
            let t = self.poly_sub(&self.frobenius_power(n / r as usize, g), &x);
            if self.poly_deg(&self.poly_gcd(&t, g)) > 0 {
                return false;
            }
        }
        true
    }

    /// Roots in `F_q` with multiplicities, ordered by index.
    pub fn roots(&self, g: &FqPoly) -> Vec<(FqElem, usize)> {
        if g.len() < 2 {
            return vec![];
        }
        let x = self.poly_x();
        let xq = self.frobenius_power(1, g);
        let lin = self.poly_gcd(&self.poly_sub(&xq, &self.poly_rem(&x, g)), g);
        let mut found = Vec::new();
        self.split_linear(&lin, &mut found);
        found.sort_by_key(|r| self.index(r));
        found
            .into_iter()
            .map(|r| {
                let lin = vec![self.neg(&r), self.one()];
                let mut m = 0;
                let mut cur = g.clone();
                loop {
                    let (q, rem) = self.poly_divrem(&cur, &lin);
                    if !rem.is_empty() {
                        break;
                    }
                    m += 1;
                    cur = q;
                }
                (r, m)
            })
            .collect()
    }

    /// Splits a monic product of distinct linear factors.
    fn split_linear(&self, r: &FqPoly, out: &mut Vec<FqElem>) {
        let d = r.len() as isize - 1;
        if d <= 0 {
            return;
        }
        if d == 1 {
            out.push(self.neg(&self.poly_monic(r)[0]));
            return;
        }
        for idx in 0..self.q {
            let delta = self.from_index(idx);
            let w = if self.p == 2 {
                if idx == 0 {
                    continue;
                }
                let mut term = self.poly_rem(&vec![self.zero(), delta.clone()], r);
                let mut acc = term.clone();
                let k = self.f;
                for _ in 1..k {
                    term = self.poly_mulmod(&term, &term, r);
                    acc = self.poly_add(&acc, &term);
                }
                acc
            } else {
                let base = vec![delta, self.one()];
                let pw = self.poly_powmod(&base, (self.q as u128 - 1) / 2, r);
                self.poly_sub(&pw, &vec![self.one()])
            };
            let g = self.poly_gcd(&w, r);
            let dg = self.poly_deg(&g);
            if dg > 0 && dg < d {
                let (other, _) = self.poly_divrem(r, &g);
                self.split_linear(&g, out);
                self.split_linear(&self.poly_monic(&other), out);
                return;
            }
        }
        // Fallback for tiny fields: exhaustive search.
        for idx in 0..self.q {
            let a = self.from_index(idx);
            if self.is_zero(&self.poly_eval(r, &a)) {
                out.push(a);
            }
        }
    }

    /// Smallest degree of an irreducible factor, or `None` for constants.
    pub fn min_factor_degree(&self, g: &FqPoly) -> Option<usize> {
        let n = g.len() as isize - 1;
        if n <= 0 {
            return None;
        }
        let x = self.poly_x();
        let mut fr = self.poly_rem(&x, g);
        for d in 1..=n as usize {
            fr = self.poly_powmod(&fr, self.q as u128, g);
            let t = self.poly_sub(&fr, &self.poly_rem(&x, g));
            if self.poly_deg(&self.poly_gcd(&t, g)) > 0 {
                return Some(d);
            }
        }
        Some(n as usize)
    }

    /// Smallest degree of a non-linear irreducible factor.
    pub fn min_nonlinear_factor_degree(&self, g: &FqPoly) -> Option<usize> {
        let mut cur = self.poly_monic(g);
        for (r, m) in self.roots(g) {
            let lin = vec![self.neg(&r), self.one()];
            for _ in 0..m {
                cur = self.poly_divrem(&cur, &lin).0;
            }
        }
        self.min_factor_degree(&cur)
    }

    /// If `g = c·φ^m` with `φ` monic irreducible, returns `(φ, m)`.
    pub fn prime_power(&self, g: &FqPoly) -> Option<(FqPoly, usize)> {
        let d = self.min_factor_degree(g)?;
        let x = self.poly_x();
        let t = self.poly_sub(&self.frobenius_power(d, g), &self.poly_rem(&x, g));
        let phi = self.poly_gcd(&t, g);
        if self.poly_deg(&phi) != d as isize {
            return None;
        }
        let mut cur = self.poly_monic(g);
        let mut m = 0;
        while cur.len() > 1 {
            let (q, r) = self.poly_divrem(&cur, &phi);
            if !r.is_empty() {
                return None;
            }
            cur = q;
            m += 1;
        }
        Some((phi, m))
    }
}

/// Distinct prime factors by trial division.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && prime_factors(n) == vec![n]
}

/// Lexicographically first monic irreducible polynomial of degree `f` over `F_p`.
pub fn canonical_irreducible(p: u64, f: usize) -> Vec<u64> {
    let fp = Fq::prime(p);
    let total = pow_u64(p, f);
    for idx in 0..total {
        let mut coeffs = Vec::with_capacity(f + 1);
        let mut n = idx;
        for _ in 0..f {
            coeffs.push(n % p);
            n /= p;
        }
        coeffs.push(1);
        let g: FqPoly = coeffs.iter().map(|&c| vec![c]).collect();
        if fp.is_irreducible(&g) {
            return coeffs;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}
