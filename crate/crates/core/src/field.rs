//! Finite fields F_q, q = p^e, with elements encoded as integers in `[0, q)`.
//!
//! An element of F_{p^e} = F_p[α]/(m(α)) is written in the polynomial basis
//! `d_0 + d_1 α + … + d_{e-1} α^{e-1}` and encoded as `Σ d_i p^i`. The text
//! format of polynomials over extension fields relies on this encoding.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Field element, encoded in `[0, q)`.
pub type Elem = u16;

const MAX_ORDER: u64 = 1 << 16;
const TABLE_ORDER: u32 = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kernel {
    /// p = 2: addition is XOR.
    Char2,
    /// e = 1, p odd.
    Prime,
    /// p odd, e > 1.
    Extension,
}

/// Immutable description of F_q together with its arithmetic tables.
pub struct FieldSpec {
    p: u32,
    e: u32,
    q: u32,
    /// Monic modulus, ascending coefficients, length e + 1. `None` for prime fields.
    modulus: Option<Vec<u32>>,
    kernel: Kernel,
    mul_table: Vec<Elem>,
    add_table: Vec<Elem>,
    inv_table: Vec<Elem>,
    neg_table: Vec<Elem>,
}

/// Shared handle to a [`FieldSpec`]. Cloning is cheap.
#[derive(Clone)]
pub struct Field(Arc<FieldSpec>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p && self.0.e == other.0.e && self.0.modulus == other.0.modulus)
    }
}

impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0.modulus {
            None => write!(f, "F_{}", self.0.q),
            Some(m) => write!(f, "F_{} (p={}, modulus {:?})", self.0.q, self.0.p, m),
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.0.q)
    }
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits `q` as `p^e` with `p` prime, if possible.
pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while !q.is_multiple_of(p) {
        p += 1;
    }
    let (mut rest, mut e) = (q, 0);
    while rest % p == 0 {
        rest /= p;
        e += 1;
    }
    (rest == 1).then_some((p, e))
}

// Dense polynomial helpers over F_p, ascending coefficients, used only while
// building the field.
fn fp_trim(a: &mut Vec<u32>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn fp_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    fp_trim(&mut r);
    let dm = m.len() - 1;
    let lead_inv = fp_pow(m[dm], p - 2, p);
    while r.len() > dm {
        let top = r.len() - 1;
        let c = (r[top] as u64 * lead_inv as u64 % p as u64) as u32;
        let shift = top - dm;
        for (i, &mi) in m.iter().enumerate() {
            let sub = (c as u64 * mi as u64 % p as u64) as u32;
            r[shift + i] = (r[shift + i] + p - sub) % p;
        }
        fp_trim(&mut r);
    }
    r
}

fn fp_pow(mut b: u32, mut ex: u32, p: u32) -> u32 {
    let mut acc = 1u64;
    let mut base = b as u64 % p as u64;
    while ex > 0 {
        if ex & 1 == 1 {
            acc = acc * base % p as u64;
        }
        base = base * base % p as u64;
        ex >>= 1;
    }
    b = acc as u32;
    b
}

/// Irreducibility over F_p by exhaustive search for a monic factor of degree
/// at most `deg / 2`.
fn is_irreducible(m: &[u32], p: u32) -> bool {
    let deg = m.len() - 1;
    if deg == 0 {
        return false;
    }
    for fd in 1..=deg / 2 {
        let count = (p as u64).pow(fd as u32);
        for k in 0..count {
            let mut g = Vec::with_capacity(fd + 1);
            let mut rest = k;
            for _ in 0..fd {
                g.push((rest % p as u64) as u32);
                rest /= p as u64;
            }
            g.push(1);
            if fp_rem(m, &g, p).is_empty() {
                return false;
            }
        }
    }
    true
}

impl Field {
    /// Builds F_{p^e}. With `modulus = None` and `e > 1`, the smallest monic
    /// irreducible polynomial of degree `e` is chosen, ordering candidates by
    /// their coefficients read from `X^{e-1}` down to `X^0`.
    pub fn new(p: u32, e: u32, modulus: Option<&[u32]>) -> Result<Field> {
        if !is_prime(p) {
            return Err(Error::NonPrimeP(p));
        }
        if !(1..=8).contains(&e) {
            return Err(Error::ExtensionDegreeOutOfRange(e));
        }
        let q64 = (p as u64).checked_pow(e).unwrap_or(u64::MAX);
        if q64 > MAX_ORDER {
            return Err(Error::FieldTooLarge(q64));
        }
        let q = q64 as u32;
        let modulus = match modulus {
            Some(m) => {
                if m.iter().any(|&c| c >= p) {
                    return Err(Error::ReducibleModulus);
                }
                let mut m = m.to_vec();
                fp_trim(&mut m);
                if m.len() != e as usize + 1 || !is_irreducible(&m, p) {
                    return Err(Error::ReducibleModulus);
                }
                let inv = fp_pow(m[e as usize], p - 2, p);
                let m: Vec<u32> = m.iter().map(|&c| (c as u64 * inv as u64 % p as u64) as u32).collect();
                if e == 1 {
                    None
                } else {
                    Some(m)
                }
            }
            None if e == 1 => None,
            None => {
                let lower = (p as u64).pow(e);
                let found = (0..lower).find_map(|k| {
                    let mut m = Vec::with_capacity(e as usize + 1);
                    let mut rest = k;
                    for _ in 0..e {
                        m.push((rest % p as u64) as u32);
                        rest /= p as u64;
                    }
                    m.push(1);
                    is_irreducible(&m, p).then_some(m)
                });
                Some(found.expect("an irreducible polynomial exists in every degree"))
            }
        };
        let kernel = if p == 2 {
            Kernel::Char2
        } else if e == 1 {
            Kernel::Prime
        } else {
            Kernel::Extension
        };
        let mut spec = FieldSpec {
            p,
            e,
            q,
            modulus,
            kernel,
            mul_table: Vec::new(),
            add_table: Vec::new(),
            inv_table: Vec::new(),
            neg_table: Vec::new(),
        };
        if q <= TABLE_ORDER {
            let n = q as usize;
            spec.mul_table = (0..n * n)
                .map(|i| spec.slow_mul((i / n) as Elem, (i % n) as Elem))
                .collect();
            if kernel == Kernel::Extension {
                spec.add_table = (0..n * n)
                    .map(|i| spec.slow_add((i / n) as Elem, (i % n) as Elem))
                    .collect();
            }
            spec.neg_table = (0..n).map(|a| spec.slow_neg(a as Elem)).collect();
            spec.inv_table = vec![0; n];
            for a in 1..n {
                for b in 1..n {
                    if spec.mul_table[a * n + b] == 1 {
                        spec.inv_table[a] = b as Elem;
                        break;
                    }
                }
            }
        }
        Ok(Field(Arc::new(spec)))
    }

    /// F_q from its order, with the default modulus.
    pub fn with_order(q: u32) -> Result<Field> {
        match prime_power(q) {
            Some((p, e)) => Field::new(p, e, None),
            None if q < 2 => Err(Error::NonPrimeP(q)),
            None => {
                let mut p = 2;
                while !q.is_multiple_of(p) {
                    p += 1;
                }
                if q == p {
                    Err(Error::NonPrimeP(q))
                } else {
                    Err(Error::InvalidParameter(format!("{q} is not a prime power")))
                }
            }
        }
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.0
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.0.q
    }

    pub fn p(&self) -> u32 {
        self.0.p
    }

    pub fn e(&self) -> u32 {
        self.0.e
    }

    pub fn modulus(&self) -> Option<&[u32]> {
        self.0.modulus.as_deref()
    }

    pub fn check(&self, value: u64) -> Result<Elem> {
        if value < self.0.q as u64 {
            Ok(value as Elem)
        } else {
            Err(Error::CoefficientOutOfRange { value, q: self.0.q })
        }
    }

    /// Every element, in encoding order.
    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        (0..self.0.q).map(|a| a as Elem)
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        let s = &*self.0;
        match s.kernel {
            Kernel::Char2 => a ^ b,
            Kernel::Prime => ((a as u32 + b as u32) % s.p) as Elem,
            Kernel::Extension if !s.add_table.is_empty() => s.add_table[a as usize * s.q as usize + b as usize],
            Kernel::Extension => s.slow_add(a, b),
        }
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        let s = &*self.0;
        match s.kernel {
            Kernel::Char2 => a,
            Kernel::Prime => {
                if a == 0 {
                    0
                } else {
                    (s.p - a as u32) as Elem
                }
            }
            Kernel::Extension if !s.neg_table.is_empty() => s.neg_table[a as usize],
            Kernel::Extension => s.slow_neg(a),
        }
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        let s = &*self.0;
        if !s.mul_table.is_empty() {
            s.mul_table[a as usize * s.q as usize + b as usize]
        } else if s.kernel == Kernel::Prime {
            ((a as u64 * b as u64) % s.p as u64) as Elem
        } else {
            s.slow_mul(a, b)
        }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: Elem) -> Option<Elem> {
        if a == 0 {
            return None;
        }
        let s = &*self.0;
        if !s.inv_table.is_empty() {
            return Some(s.inv_table[a as usize]);
        }
        // a^(q-2)
        let mut ex = s.q - 2;
        let mut base = a;
        let mut acc: Elem = 1;
        while ex > 0 {
            if ex & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            ex >>= 1;
        }
        Some(acc)
    }

    /// `dst[i] += c * src[i]` for every `i < src.len()`.
    #[inline]
    pub fn axpy(&self, dst: &mut [Elem], c: Elem, src: &[Elem]) {
        if c == 0 {
            return;
        }
        let dst = &mut dst[..src.len()];
        let s = &*self.0;
        match s.kernel {
            Kernel::Char2 if c == 1 => {
                for (d, &x) in dst.iter_mut().zip(src) {
                    *d ^= x;
                }
            }
            Kernel::Char2 => {
                let row = &s.mul_table[c as usize * s.q as usize..(c as usize + 1) * s.q as usize];
                for (d, &x) in dst.iter_mut().zip(src) {
                    *d ^= row[x as usize];
                }
            }
            Kernel::Prime => {
                let p = s.p;
                let c = c as u32;
                for (d, &x) in dst.iter_mut().zip(src) {
                    *d = ((*d as u32 + c * x as u32) % p) as Elem;
                }
            }
            Kernel::Extension => {
                for (d, &x) in dst.iter_mut().zip(src) {
                    *d = self.add(*d, self.mul(c, x));
                }
            }
        }
    }
}

impl FieldSpec {
    fn digits(&self, a: Elem) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.e as usize);
        let mut rest = a as u32;
        for _ in 0..self.e {
            out.push(rest % self.p);
            rest /= self.p;
        }
        out
    }

    fn elem_from_digits(&self, d: &[u32]) -> Elem {
        d.iter().rev().fold(0u32, |acc, &x| acc * self.p + x) as Elem
    }

    fn slow_add(&self, a: Elem, b: Elem) -> Elem {
        let (da, db) = (self.digits(a), self.digits(b));
        let s: Vec<u32> = da.iter().zip(&db).map(|(&x, &y)| (x + y) % self.p).collect();
        self.elem_from_digits(&s)
    }

    fn slow_neg(&self, a: Elem) -> Elem {
        let d: Vec<u32> = self.digits(a).iter().map(|&x| (self.p - x) % self.p).collect();
        self.elem_from_digits(&d)
    }

    fn slow_mul(&self, a: Elem, b: Elem) -> Elem {
        match &self.modulus {
            None => ((a as u64 * b as u64) % self.p as u64) as Elem,
            Some(m) => {
                let (da, db) = (self.digits(a), self.digits(b));
                let mut prod = vec![0u32; 2 * self.e as usize];
                for (i, &x) in da.iter().enumerate() {
                    for (j, &y) in db.iter().enumerate() {
                        prod[i + j] = ((prod[i + j] as u64 + x as u64 * y as u64) % self.p as u64) as u32;
                    }
                }
                let mut r = fp_rem(&prod, m, self.p);
                r.resize(self.e as usize, 0);
                self.elem_from_digits(&r)
            }
        }
    }
}
