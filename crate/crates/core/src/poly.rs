//! Polynomials in A = F_q[X].

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::field::{Elem, Field};

/// Degree of a polynomial; the zero polynomial has degree [`Degree::MINUS_INFINITY`].
///
/// Sums absorb the sentinel: `MINUS_INFINITY + d = MINUS_INFINITY`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Degree(i64);

impl Degree {
    pub const MINUS_INFINITY: Degree = Degree(i64::MIN);

    pub fn new(d: usize) -> Degree {
        Degree(d as i64)
    }

    pub fn is_finite(self) -> bool {
        self != Self::MINUS_INFINITY
    }

    /// The degree as a natural number, `None` for the zero polynomial.
    pub fn finite(self) -> Option<usize> {
        self.is_finite().then_some(self.0 as usize)
    }
}

impl Add for Degree {
    type Output = Degree;
    fn add(self, rhs: Degree) -> Degree {
        if self.is_finite() && rhs.is_finite() {
            Degree(self.0 + rhs.0)
        } else {
            Self::MINUS_INFINITY
        }
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.finite() {
            Some(d) => write!(f, "{d}"),
            None => f.write_str("-inf"),
        }
    }
}

/// A polynomial over F_q with ascending coefficients and no trailing zeros.
#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    field: Field,
    coeffs: Vec<Elem>,
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self} over {})", self.field)
    }
}

impl std::hash::Hash for Poly {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.field.q().hash(state);
        self.coeffs.hash(state);
    }
}

/// Orders by degree first, then by coefficients from the top down.
impl PartialOrd for Poly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Poly {
    fn cmp(&self, other: &Self) -> Ordering {
        self.coeffs
            .len()
            .cmp(&other.coeffs.len())
            .then_with(|| self.coeffs.iter().rev().cmp(other.coeffs.iter().rev()))
    }
}

impl Poly {
    /// Builds a polynomial from ascending coefficients, trimming trailing zeros.
    pub fn new(field: &Field, mut coeffs: Vec<Elem>) -> Poly {
        debug_assert!(coeffs.iter().all(|&c| (c as u32) < field.q()));
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Poly { field: field.clone(), coeffs }
    }

    /// Like [`Poly::new`] but validates every coefficient against the field order.
    pub fn from_values(field: &Field, values: &[u64]) -> Result<Poly> {
        let coeffs = values.iter().map(|&v| field.check(v)).collect::<Result<Vec<_>>>()?;
        Ok(Poly::new(field, coeffs))
    }

    pub fn zero(field: &Field) -> Poly {
        Poly { field: field.clone(), coeffs: Vec::new() }
    }

    pub fn one(field: &Field) -> Poly {
        Poly::constant(field, 1)
    }

    pub fn constant(field: &Field, c: Elem) -> Poly {
        Poly::new(field, vec![c])
    }

    pub fn x(field: &Field) -> Poly {
        Poly::monomial(field, 1, 1)
    }

    pub fn monomial(field: &Field, c: Elem, d: usize) -> Poly {
        let mut coeffs = vec![0; d + 1];
        coeffs[d] = c;
        Poly::new(field, coeffs)
    }

    /// The polynomial whose coefficients are the base-q digits of `index`,
    /// least significant first. Bijective between `0..q^d` and polynomials of
    /// degree below `d`.
    pub fn from_index(field: &Field, mut index: u64) -> Poly {
        let q = field.q() as u64;
        let mut coeffs = Vec::new();
        while index > 0 {
            coeffs.push((index % q) as Elem);
            index /= q;
        }
        Poly { field: field.clone(), coeffs }
    }

    /// Inverse of [`Poly::from_index`].
    pub fn index(&self) -> u64 {
        let q = self.field.q() as u64;
        self.coeffs.iter().rev().fold(0, |acc, &c| acc * q + c as u64)
    }

    /// All monic polynomials of degree exactly `d`.
    pub fn monics(field: &Field, d: usize) -> impl Iterator<Item = Poly> + '_ {
        let count = (field.q() as u64).pow(d as u32);
        (0..count).map(move |k| {
            let mut p = Poly::from_index(field, k);
            p.coeffs.resize(d, 0);
            p.coeffs.push(1);
            p
        })
    }

    /// All polynomials of degree below `d` (including zero).
    pub fn below_degree(field: &Field, d: usize) -> impl Iterator<Item = Poly> + '_ {
        let count = (field.q() as u64).pow(d as u32);
        (0..count).map(move |k| Poly::from_index(field, k))
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coeffs(&self) -> &[Elem] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Elem> {
        self.coeffs
    }

    /// Coefficient of `X^i` (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> Elem {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn degree(&self) -> Degree {
        match self.coeffs.len() {
            0 => Degree::MINUS_INFINITY,
            n => Degree::new(n - 1),
        }
    }

    /// Degree as `usize`, treating the zero polynomial as degree 0.
    pub fn deg(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    /// Nonzero constant.
    pub fn is_unit(&self) -> bool {
        self.coeffs.len() == 1
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last() == Some(&1)
    }

    pub fn leading(&self) -> Elem {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn scale(&self, c: Elem) -> Poly {
        let f = &self.field;
        Poly::new(f, self.coeffs.iter().map(|&a| f.mul(a, c)).collect())
    }

    /// Unit multiple with leading coefficient 1; zero stays zero.
    pub fn monic(&self) -> Poly {
        match self.field.inv(self.leading()) {
            Some(inv) => self.scale(inv),
            None => self.clone(),
        }
    }

    /// Multiplication by `X^k`.
    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![0; k];
        coeffs.extend_from_slice(&self.coeffs);
        Poly { field: self.field.clone(), coeffs }
    }

    fn assert_same_field(&self, other: &Poly) {
        assert!(self.field == other.field, "polynomials over different fields");
    }

    pub fn divmod(&self, divisor: &Poly) -> Result<(Poly, Poly)> {
        self.assert_same_field(divisor);
        if divisor.is_zero() {
            return Err(Error::DivisionByZeroPoly);
        }
        let f = &self.field;
        let db = divisor.deg();
        if self.is_zero() || self.deg() < db {
            return Ok((Poly::zero(f), self.clone()));
        }
        let lead_inv = f.inv(divisor.leading()).expect("nonzero leading coefficient");
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0; self.deg() - db + 1];
        for i in (0..quot.len()).rev() {
            let c = rem[i + db];
            if c == 0 {
                continue;
            }
            let t = f.mul(c, lead_inv);
            quot[i] = t;
            f.axpy(&mut rem[i..i + db + 1], f.neg(t), &divisor.coeffs);
        }
        rem.truncate(db);
        Ok((Poly::new(f, quot), Poly::new(f, rem)))
    }

    pub fn rem(&self, divisor: &Poly) -> Result<Poly> {
        self.divmod(divisor).map(|(_, r)| r)
    }

    /// `divisor | self`. Zero divides only zero.
    pub fn divisible_by(&self, divisor: &Poly) -> bool {
        if divisor.is_zero() {
            return self.is_zero();
        }
        self.rem(divisor).map(|r| r.is_zero()).unwrap_or(false)
    }

    /// Exact quotient if `divisor | self`.
    pub fn exact_div(&self, divisor: &Poly) -> Option<Poly> {
        match self.divmod(divisor) {
            Ok((quot, rem)) if rem.is_zero() => Some(quot),
            _ => None,
        }
    }

    /// Returns `(g, u, v)` with `g` monic, `u·self + v·other = g = gcd(self, other)`.
    pub fn gcd_ext(&self, other: &Poly) -> Result<(Poly, Poly, Poly)> {
        self.assert_same_field(other);
        let f = &self.field;
        if self.is_zero() && other.is_zero() {
            return Err(Error::BothZero);
        }
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (Poly::one(f), Poly::zero(f));
        let (mut t0, mut t1) = (Poly::zero(f), Poly::one(f));
        while !r1.is_zero() {
            let (quot, rem) = r0.divmod(&r1)?;
            let s2 = &s0 - &(&quot * &s1);
            let t2 = &t0 - &(&quot * &t1);
            r0 = std::mem::replace(&mut r1, rem);
            s0 = std::mem::replace(&mut s1, s2);
            t0 = std::mem::replace(&mut t1, t2);
        }
        let inv = f.inv(r0.leading()).expect("gcd is nonzero");
        Ok((r0.scale(inv), s0.scale(inv), t0.scale(inv)))
    }

    pub fn gcd(&self, other: &Poly) -> Result<Poly> {
        self.gcd_ext(other).map(|(g, _, _)| g)
    }

    pub fn coprime(&self, other: &Poly) -> bool {
        self.gcd(other).map(|g| g.is_one()).unwrap_or(false)
    }

    /// Parses the human grammar (`"X^2+X+1"`, `"2*X^3-X"`) or the list grammar
    /// (`"1,1,1"`, ascending coefficients). A bare integer is a constant.
    pub fn parse(field: &Field, text: &str) -> Result<Poly> {
        let text: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if text.is_empty() {
            return Err(Error::SyntaxError("empty polynomial".into()));
        }
        if text.chars().all(|c| c.is_ascii_digit() || c == ',') {
            let values = text
                .split(',')
                .map(|t| {
                    t.parse::<u64>()
                        .map_err(|_| Error::SyntaxError(format!("bad coefficient {t:?} in {text:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            return Poly::from_values(field, &values);
        }
        parse_human(field, &text)
    }
}

fn parse_human(field: &Field, text: &str) -> Result<Poly> {
    let syntax = |msg: &str| Error::SyntaxError(format!("{msg} in {text:?}"));
    let bytes = text.as_bytes();
    let mut pos = 0;
    let mut acc = Poly::zero(field);
    let mut first = true;
    while pos < bytes.len() {
        let mut negative = false;
        match bytes[pos] {
            b'+' => pos += 1,
            b'-' => {
                negative = true;
                pos += 1
            }
            _ if first => {}
            _ => return Err(syntax("expected '+' or '-'")),
        }
        first = false;
        let start = pos;
        while pos < bytes.len() && bytes[pos].is_ascii_digit() {
            pos += 1;
        }
        let coeff = if pos > start {
            let v: u64 = text[start..pos].parse().map_err(|_| syntax("coefficient overflow"))?;
            Some(field.check(v)?)
        } else {
            None
        };
        if coeff.is_some() && pos < bytes.len() && bytes[pos] == b'*' {
            pos += 1;
            if pos >= bytes.len() || !matches!(bytes[pos], b'X' | b'x') {
                return Err(syntax("expected X after '*'"));
            }
        }
        let mut exponent = 0usize;
        if pos < bytes.len() && matches!(bytes[pos], b'X' | b'x') {
            pos += 1;
            exponent = 1;
            if pos < bytes.len() && bytes[pos] == b'^' {
                pos += 1;
                let s = pos;
                while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                    pos += 1;
                }
                if s == pos {
                    return Err(syntax("expected exponent after '^'"));
                }
                exponent = text[s..pos].parse().map_err(|_| syntax("exponent overflow"))?;
                if exponent > 1 << 20 {
                    return Err(syntax("exponent too large"));
                }
            }
        } else if coeff.is_none() {
            return Err(syntax("expected a term"));
        }
        let c = coeff.unwrap_or(1);
        let c = if negative { field.neg(c) } else { c };
        acc = &acc + &Poly::monomial(field, c, exponent);
    }
    Ok(acc)
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                f.write_str("+")?;
            }
            first = false;
            match (i, c) {
                (0, c) => write!(f, "{c}")?,
                (1, 1) => f.write_str("X")?,
                (1, c) => write!(f, "{c}*X")?,
                (i, 1) => write!(f, "X^{i}")?,
                (i, c) => write!(f, "{c}*X^{i}")?,
            }
        }
        Ok(())
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        self.assert_same_field(rhs);
        let (long, short) = if self.coeffs.len() >= rhs.coeffs.len() { (self, rhs) } else { (rhs, self) };
        let mut coeffs = long.coeffs.clone();
        for (c, &s) in coeffs.iter_mut().zip(&short.coeffs) {
            *c = self.field.add(*c, s);
        }
        Poly::new(&self.field, coeffs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        let f = &self.field;
        Poly::new(f, self.coeffs.iter().map(|&c| f.neg(c)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.assert_same_field(rhs);
        let f = &self.field;
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero(f);
        }
        let mut coeffs = vec![0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            f.axpy(&mut coeffs[i..], a, &rhs.coeffs);
        }
        Poly::new(f, coeffs)
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly {
                (&self).$m(&rhs)
            }
        }
    )*};
}

forward_owned!(Add add, Sub sub, Mul mul);
