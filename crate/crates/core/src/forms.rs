//! Parser for the form mini-language.
//!
//! ```text
//! sum     := ['-'] product (('+' | '-') product)*
//! product := power (('*' | '/') power | power)*
//! power   := atom ['^' ['-'] INT]
//! atom    := INT | 't' | 'dt' | '(' sum ')' | ('dlog' | 'd') power
//! ```
//!
//! Functions and forms are tracked separately: `dt`, `d X` and `dlog X` are
//! forms, a form may be multiplied or divided by a function, and two forms
//! may be added but not multiplied.

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};
use crate::qpoly::{QPoly, Q};

/// `num/den` over `Q`, reduced with `den` monic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QRational {
    pub num: QPoly,
    pub den: QPoly,
}

impl QRational {
    pub fn new(num: QPoly, den: QPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(QRational {
                num,
                den: QPoly::one(),
            });
        }
        let g = num.gcd(&den);
        let (n, d) = (num.divrem(&g)?.0, den.divrem(&g)?.0);
        let lc = Q::one() / d.lead().unwrap().clone();
        Ok(QRational {
            num: n.scale(&lc),
            den: d.scale(&lc),
        })
    }

    pub fn poly(p: QPoly) -> Self {
        QRational {
            num: p,
            den: QPoly::one(),
        }
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        QRational::new(
            self.num.mul(&o.den).add(&o.num.mul(&self.den)),
            self.den.mul(&o.den),
        )
    }

    pub fn neg(&self) -> Self {
        QRational {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        QRational::new(self.num.mul(&o.num), self.den.mul(&o.den))
    }

    pub fn inv(&self) -> Result<Self> {
        QRational::new(self.den.clone(), self.num.clone())
    }

    pub fn derivative(&self) -> Result<Self> {
        QRational::new(
            self.num.derivative().mul(&self.den).sub(&self.num.mul(&self.den.derivative())),
            self.den.mul(&self.den),
        )
    }

    pub fn pow(&self, k: i64) -> Result<Self> {
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let k = k.unsigned_abs() as u32;
        QRational::new(base.num.pow(k), base.den.pow(k))
    }
}

/// A parsed expression.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Fn(QRational),
    /// `r·dt`.
    Form(QRational),
}

impl Expr {
    fn add(self, o: Expr) -> Result<Expr> {
        match (self, o) {
            (Expr::Fn(a), Expr::Fn(b)) => Ok(Expr::Fn(a.add(&b)?)),
            (Expr::Form(a), Expr::Form(b)) => Ok(Expr::Form(a.add(&b)?)),
            _ => Err(Error::Parse("cannot add a function and a form".into())),
        }
    }

    fn neg(self) -> Expr {
        match self {
            Expr::Fn(a) => Expr::Fn(a.neg()),
            Expr::Form(a) => Expr::Form(a.neg()),
        }
    }

    fn mul(self, o: Expr) -> Result<Expr> {
        match (self, o) {
            (Expr::Fn(a), Expr::Fn(b)) => Ok(Expr::Fn(a.mul(&b)?)),
            (Expr::Fn(a), Expr::Form(b)) | (Expr::Form(b), Expr::Fn(a)) => Ok(Expr::Form(a.mul(&b)?)),
            _ => Err(Error::Parse("product of two forms".into())),
        }
    }

    fn div(self, o: Expr) -> Result<Expr> {
        let b = match o {
            Expr::Fn(b) => b,
            Expr::Form(_) => return Err(Error::Parse("division by a form".into())),
        };
        if b.num.is_zero() {
            return Err(Error::Parse("division by zero".into()));
        }
        let inv = b.inv()?;
        match self {
            Expr::Fn(a) => Ok(Expr::Fn(a.mul(&inv)?)),
            Expr::Form(a) => Ok(Expr::Form(a.mul(&inv)?)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(char),
}

fn lex(s: &str) -> Result<Vec<Tok>> {
    let cs: Vec<char> = s.chars().collect();
    let mut i = 0;
    let mut out = Vec::new();
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let st = i;
            while i < cs.len() && cs[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = cs[st..i].iter().collect();
            out.push(Tok::Int(digits.parse().unwrap()));
        } else if c.is_ascii_alphabetic() {
            let st = i;
            while i < cs.len() && cs[i].is_ascii_alphabetic() {
                i += 1;
            }
            let w: String = cs[st..i].iter().collect();
            match w.as_str() {
                "t" | "dt" | "d" | "dlog" => out.push(Tok::Ident(w)),
                _ => return Err(Error::Parse(format!("unknown word {w:?}"))),
            }
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Sym(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character {c:?}")));
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn sum(&mut self) -> Result<Expr> {
        let neg = self.eat('-');
        let mut acc = self.product()?;
        if neg {
            acc = acc.neg();
        }
        loop {
            if self.eat('+') {
                acc = acc.add(self.product()?)?;
            } else if self.eat('-') {
                acc = acc.add(self.product()?.neg())?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn starts_atom(&self) -> bool {
        matches!(self.peek(), Some(Tok::Int(_)) | Some(Tok::Ident(_)) | Some(Tok::Sym('(')))
    }

    fn product(&mut self) -> Result<Expr> {
        let mut acc = self.power()?;
        loop {
            if self.eat('*') {
                acc = acc.mul(self.power()?)?;
            } else if self.eat('/') {
                acc = acc.div(self.power()?)?;
            } else if self.starts_atom() {
                acc = acc.mul(self.power()?)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let neg = self.eat('-');
        let k = match self.peek() {
            Some(Tok::Int(n)) => {
                let n: i64 = n.try_into().map_err(|_| Error::Parse("exponent too large".into()))?;
                self.pos += 1;
                if neg {
                    -n
                } else {
                    n
                }
            }
            _ => return Err(Error::Parse("expected integer exponent".into())),
        };
        match base {
            Expr::Fn(a) => {
                if k < 0 && a.num.is_zero() {
                    return Err(Error::Parse("division by zero".into()));
                }
                Ok(Expr::Fn(a.pow(k)?))
            }
            Expr::Form(a) if k == 1 => Ok(Expr::Form(a)),
            Expr::Form(_) => Err(Error::Parse("power of a form".into())),
        }
    }

    fn function_arg(&mut self) -> Result<QRational> {
        match self.power()? {
            Expr::Fn(a) => Ok(a),
            Expr::Form(_) => Err(Error::Parse("d of a form".into())),
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        let tok = self
            .peek()
            .cloned()
            .ok_or_else(|| Error::Parse("unexpected end of input".into()))?;
        self.pos += 1;
        match tok {
            Tok::Int(n) => Ok(Expr::Fn(QRational::poly(QPoly::constant(Q::from_integer(n))))),
            Tok::Ident(w) => match w.as_str() {
                "t" => Ok(Expr::Fn(QRational::poly(QPoly::x()))),
                "dt" => Ok(Expr::Form(QRational::poly(QPoly::one()))),
                "d" => Ok(Expr::Form(self.function_arg()?.derivative()?)),
                _ => {
                    let f = self.function_arg()?;
                    if f.num.is_zero() {
                        return Err(Error::Parse("dlog of zero".into()));
                    }
                    Ok(Expr::Form(f.derivative()?.mul(&f.inv()?)?))
                }
            },
            Tok::Sym('(') => {
                let e = self.sum()?;
                if !self.eat(')') {
                    return Err(Error::Parse("expected ')'".into()));
                }
                Ok(e)
            }
            Tok::Sym(c) => Err(Error::Parse(format!("unexpected {c:?}"))),
        }
    }
}

pub fn parse(s: &str) -> Result<Expr> {
    let toks = lex(s)?;
    if toks.is_empty() {
        return Err(Error::Parse("empty expression".into()));
    }
    let mut p = Parser { toks, pos: 0 };
    let e = p.sum()?;
    if p.pos != p.toks.len() {
        return Err(Error::Parse(format!("trailing input at token {}", p.pos)));
    }
    Ok(e)
}

/// Parses a differential form, returning its coefficient of `dt`.
pub fn parse_form(s: &str) -> Result<QRational> {
    match parse(s)? {
        Expr::Form(r) => Ok(r),
        Expr::Fn(r) if r.num.is_zero() => Ok(r),
        Expr::Fn(_) => Err(Error::Parse(format!("{s:?} is a function, not a form"))),
    }
}

pub fn parse_function(s: &str) -> Result<QRational> {
    match parse(s)? {
        Expr::Fn(r) => Ok(r),
        Expr::Form(_) => Err(Error::Parse(format!("{s:?} is a form, not a function"))),
    }
}

impl QRational {
    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den == QPoly::one() && self.num == QPoly::one()
    }

    pub fn render(&self) -> String {
        if self.den == QPoly::one() {
            return self.num.render("t");
        }
        format!("({})/({})", self.num.render("t"), self.den.render("t"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qpoly::qr;

    fn form(s: &str) -> (QPoly, QPoly) {
        let r = parse_form(s).unwrap();
        (r.num, r.den)
    }

    #[test]
    fn basic_forms() {
        assert_eq!(form("dlog t"), (QPoly::one(), QPoly::x()));
        assert_eq!(form("dlog (t-2)"), (QPoly::one(), QPoly::from_ints(&[-2, 1])));
        assert_eq!(form("dt/t^2"), (QPoly::one(), QPoly::from_ints(&[0, 0, 1])));
        assert_eq!(form("dt"), (QPoly::one(), QPoly::one()));
        assert_eq!(form("d(t^3)"), (QPoly::from_ints(&[0, 0, 3]), QPoly::one()));
        // dt/(t(t-1)) = dlog(t-1) - dlog t
        assert_eq!(form("dt/(t(t-1))"), form("dlog(t-1) - dlog t"));
        assert_eq!(form("dlog(t(t-1))"), (QPoly::from_ints(&[-1, 2]), QPoly::from_ints(&[0, -1, 1])));
        assert_eq!(form("-3 t^-2 dt"), (QPoly::from_ints(&[-3]), QPoly::from_ints(&[0, 0, 1])));
        let r = parse_form("dt/2").unwrap();
        assert_eq!(r.num, QPoly::constant(qr(1, 2)));
        assert_eq!(form("dt - dt"), (QPoly::zero(), QPoly::one()));
    }

    #[test]
    fn rejects_malformed() {
        for bad in ["", "dt*dt", "t +", "(t", "dlog", "x dt", "dt^2", "1/(t-t)", "t", "dt + t", "3 $"] {
            assert!(matches!(parse_form(bad), Err(Error::Parse(_))), "{bad}");
        }
        assert_eq!(parse_function("t^2 + 1").unwrap().num, QPoly::from_ints(&[1, 0, 1]));
    }
}
