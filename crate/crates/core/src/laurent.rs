//! Truncated Laurent series in `X^{-1}` with exact precision bookkeeping, and
//! extendable series sources.
//!
//! A [`LaurentSeries`] with precision `prec` stands for every series that
//! agrees with it on the coefficients of `X^{-i}`, `i < prec`. Arithmetic
//! returns the largest precision valid for all such representatives.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::{Elem, Field};
use crate::poly::Poly;

/// Valuation ν(f); the zero series has [`Valuation::INFINITY`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Valuation(i64);

impl Valuation {
    pub const INFINITY: Valuation = Valuation(i64::MAX);

    pub fn new(v: i64) -> Valuation {
        debug_assert!(v != i64::MAX);
        Valuation(v)
    }

    pub fn is_infinite(self) -> bool {
        self == Self::INFINITY
    }

    pub fn finite(self) -> Option<i64> {
        (!self.is_infinite()).then_some(self.0)
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.finite() {
            Some(v) => write!(f, "{v}"),
            None => f.write_str("inf"),
        }
    }
}

/// `f ≡ Σ_{ν ≤ i < prec} c_i X^{-i}`, certified below index `prec`.
#[derive(Clone, PartialEq, Eq)]
pub struct LaurentSeries {
    field: Field,
    nu: Valuation,
    coeffs: Vec<Elem>,
    prec: i64,
}

impl fmt::Debug for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentSeries(nu={}, prec={}, coeffs={:?})", self.nu, self.prec, self.coeffs)
    }
}

impl LaurentSeries {
    /// Series with coefficients `c_start, c_{start+1}, …`, certified up to
    /// `start + coeffs.len()`. Leading zeros are stripped.
    pub fn from_coeffs(field: &Field, start: i64, coeffs: &[Elem]) -> LaurentSeries {
        let prec = start + coeffs.len() as i64;
        match coeffs.iter().position(|&c| c != 0) {
            Some(k) => LaurentSeries {
                field: field.clone(),
                nu: Valuation::new(start + k as i64),
                coeffs: coeffs[k..].to_vec(),
                prec,
            },
            None => LaurentSeries::zero(field, prec),
        }
    }

    /// The zero series known to precision `prec`.
    pub fn zero(field: &Field, prec: i64) -> LaurentSeries {
        LaurentSeries { field: field.clone(), nu: Valuation::INFINITY, coeffs: Vec::new(), prec }
    }

    /// A polynomial viewed as a series, truncated at `prec`.
    pub fn from_poly(p: &Poly, prec: i64) -> LaurentSeries {
        let field = p.field();
        if p.is_zero() {
            return LaurentSeries::zero(field, prec);
        }
        let start = -(p.deg() as i64);
        let coeffs: Vec<Elem> = (start..prec.max(start))
            .map(|i| if i <= 0 { p.coeff((-i) as usize) } else { 0 })
            .collect();
        LaurentSeries::from_coeffs(field, start, &coeffs)
    }

    /// Expansion of `P/Q` certified below `prec`.
    pub fn from_rational(p: &Poly, q: &Poly, prec: i64) -> Result<LaurentSeries> {
        if q.is_zero() {
            return Err(Error::DivisionByZeroPoly);
        }
        if p.field() != q.field() {
            return Err(Error::FieldMismatch);
        }
        if p.is_zero() {
            return Ok(LaurentSeries::zero(p.field(), prec));
        }
        let nu = q.deg() as i64 - p.deg() as i64;
        if prec <= nu {
            return Err(Error::PrecisionTooSmall { prec, nu });
        }
        let mut source = SeriesSource::rational(p, q)?;
        source.series(prec)
    }

    /// Haar-random element of O, coefficients `c_0 … c_{prec-1}` drawn from `rng`.
    pub fn random<R: Rng>(field: &Field, prec: i64, rng: &mut R) -> LaurentSeries {
        let q = field.q();
        let coeffs: Vec<Elem> = (0..prec.max(0)).map(|_| rng.gen_range(0..q) as Elem).collect();
        LaurentSeries::from_coeffs(field, 0, &coeffs)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn valuation(&self) -> Valuation {
        self.nu
    }

    pub fn prec(&self) -> i64 {
        self.prec
    }

    pub fn is_zero(&self) -> bool {
        self.nu.is_infinite()
    }

    /// Coefficients `c_ν, …, c_{prec-1}`.
    pub fn coeffs(&self) -> &[Elem] {
        &self.coeffs
    }

    /// Coefficient of `X^{-i}`; `None` beyond the certified precision.
    pub fn coeff(&self, i: i64) -> Option<Elem> {
        if i >= self.prec {
            return None;
        }
        match self.nu.finite() {
            Some(nu) if i >= nu => Some(self.coeffs[(i - nu) as usize]),
            _ => Some(0),
        }
    }

    /// Drops every coefficient at index `prec` and beyond.
    pub fn truncate(&self, prec: i64) -> LaurentSeries {
        if prec >= self.prec {
            return self.clone();
        }
        match self.nu.finite() {
            Some(nu) if nu < prec => {
                LaurentSeries::from_coeffs(&self.field, nu, &self.coeffs[..(prec - nu) as usize])
            }
            _ => LaurentSeries::zero(&self.field, prec),
        }
    }

    fn check_field(&self, other: &LaurentSeries) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    pub fn add(&self, other: &LaurentSeries) -> Result<LaurentSeries> {
        self.check_field(other)?;
        let prec = self.prec.min(other.prec);
        let start = match (self.nu.finite(), other.nu.finite()) {
            (None, None) => return Ok(LaurentSeries::zero(&self.field, prec)),
            (Some(a), None) | (None, Some(a)) => a,
            (Some(a), Some(b)) => a.min(b),
        };
        if start >= prec {
            return Ok(LaurentSeries::zero(&self.field, prec));
        }
        let mut out = vec![0; (prec - start) as usize];
        for s in [self, other] {
            if let Some(nu) = s.nu.finite().filter(|&nu| nu < prec) {
                let len = ((prec - nu).max(0) as usize).min(s.coeffs.len());
                let off = (nu - start) as usize;
                for (o, &c) in out[off..off + len].iter_mut().zip(&s.coeffs) {
                    *o = self.field.add(*o, c);
                }
            }
        }
        Ok(LaurentSeries::from_coeffs(&self.field, start, &out))
    }

    pub fn neg(&self) -> LaurentSeries {
        let f = &self.field;
        LaurentSeries {
            field: f.clone(),
            nu: self.nu,
            coeffs: self.coeffs.iter().map(|&c| f.neg(c)).collect(),
            prec: self.prec,
        }
    }

    pub fn sub(&self, other: &LaurentSeries) -> Result<LaurentSeries> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &LaurentSeries) -> Result<LaurentSeries> {
        self.check_field(other)?;
        let f = &self.field;
        match (self.nu.finite(), other.nu.finite()) {
            (None, None) => Ok(LaurentSeries::zero(f, self.prec + other.prec)),
            (None, Some(nu)) => Ok(LaurentSeries::zero(f, self.prec + nu)),
            (Some(nu), None) => Ok(LaurentSeries::zero(f, other.prec + nu)),
            (Some(a), Some(b)) => {
                let rel = self.coeffs.len().min(other.coeffs.len());
                let mut out = vec![0; rel];
                for (i, &x) in self.coeffs[..rel].iter().enumerate() {
                    f.axpy(&mut out[i..], x, &other.coeffs[..rel - i]);
                }
                Ok(LaurentSeries::from_coeffs(f, a + b, &out))
            }
        }
    }

    /// Multiplicative inverse; the relative precision is preserved.
    pub fn inv(&self) -> Result<LaurentSeries> {
        let nu = self.nu.finite().ok_or(Error::ZeroInverse)?;
        let f = &self.field;
        let a = &self.coeffs;
        let n = a.len();
        let b0 = f.inv(a[0]).expect("leading coefficient is nonzero");
        let mut b = Vec::with_capacity(n);
        b.push(b0);
        for k in 1..n {
            let mut s: Elem = 0;
            for i in 1..=k {
                s = f.add(s, f.mul(a[i], b[k - i]));
            }
            b.push(f.neg(f.mul(b0, s)));
        }
        Ok(LaurentSeries::from_coeffs(f, -nu, &b))
    }

    /// Splits `f = ipart + frac` with `ipart ∈ F_q[X]` and `ν(frac) ≥ 1`.
    pub fn polynomial_part(&self) -> Result<(Poly, LaurentSeries)> {
        if self.prec < 1 {
            return Err(Error::PrecisionExhausted { prec: self.prec });
        }
        let f = &self.field;
        match self.nu.finite() {
            Some(nu) if nu <= 0 => {
                let split = (1 - nu) as usize;
                let ipart: Vec<Elem> = self.coeffs[..split].iter().rev().copied().collect();
                let frac = LaurentSeries::from_coeffs(f, 1, &self.coeffs[split..]);
                Ok((Poly::new(f, ipart), frac))
            }
            _ => Ok((Poly::zero(f), self.clone())),
        }
    }

    /// Renders as `"nu:c_nu,c_nu+1,…"`.
    pub fn to_coeff_string(&self) -> String {
        let body: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        format!("{}:{}", self.nu, body.join(","))
    }
}

#[derive(Debug, Clone)]
enum Kind {
    Rational { p: Poly, q: Poly, lead_inv: Elem },
    Random { seed: u64, stream: u64, rng: Box<ChaCha8Rng> },
    Fixed(LaurentSeries),
}

/// A series whose precision can be extended on demand. Emitted coefficients
/// never change when the precision grows.
#[derive(Debug, Clone)]
pub struct SeriesSource {
    field: Field,
    kind: Kind,
    /// Index of `cache[0]`.
    start: i64,
    cache: Vec<Elem>,
}

impl SeriesSource {
    pub fn rational(p: &Poly, q: &Poly) -> Result<SeriesSource> {
        if q.is_zero() {
            return Err(Error::DivisionByZeroPoly);
        }
        if p.field() != q.field() {
            return Err(Error::FieldMismatch);
        }
        let field = p.field().clone();
        let start = if p.is_zero() { 0 } else { q.deg() as i64 - p.deg() as i64 };
        let lead_inv = field.inv(q.leading()).expect("nonzero leading coefficient");
        Ok(SeriesSource {
            field,
            kind: Kind::Rational { p: p.clone(), q: q.clone(), lead_inv },
            start,
            cache: Vec::new(),
        })
    }

    /// Haar-random element of O; stream `stream` of the generator seeded by `seed`.
    pub fn random(field: &Field, seed: u64, stream: u64) -> SeriesSource {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        SeriesSource {
            field: field.clone(),
            kind: Kind::Random { seed, stream, rng: Box::new(rng) },
            start: 0,
            cache: Vec::new(),
        }
    }

    pub fn fixed(series: LaurentSeries) -> SeriesSource {
        let start = series.valuation().finite().unwrap_or(series.prec()).min(series.prec());
        let cache: Vec<Elem> = (start..series.prec()).map(|i| series.coeff(i).unwrap_or(0)).collect();
        SeriesSource { field: series.field().clone(), kind: Kind::Fixed(series), start, cache }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    /// `(P, Q)` for rational-backed sources.
    pub fn as_rational(&self) -> Option<(&Poly, &Poly)> {
        match &self.kind {
            Kind::Rational { p, q, .. } => Some((p, q)),
            _ => None,
        }
    }

    /// `(seed, stream)` for random sources.
    pub fn stream_id(&self) -> Option<(u64, u64)> {
        match &self.kind {
            Kind::Random { seed, stream, .. } => Some((*seed, *stream)),
            _ => None,
        }
    }

    /// Largest precision the source can ever reach; `None` if unbounded.
    pub fn max_prec(&self) -> Option<i64> {
        match &self.kind {
            Kind::Fixed(s) => Some(s.prec()),
            _ => None,
        }
    }

    /// Lowest index that may carry a nonzero coefficient.
    pub fn start(&self) -> i64 {
        self.start
    }

    /// Currently materialized precision.
    pub fn prec(&self) -> i64 {
        self.start + self.cache.len() as i64
    }

    /// Materializes coefficients below `prec`.
    pub fn ensure(&mut self, prec: i64) -> Result<()> {
        let need = prec - self.start;
        if need <= self.cache.len() as i64 {
            return Ok(());
        }
        let need = need as usize;
        match &mut self.kind {
            Kind::Fixed(s) => return Err(Error::PrecisionExhausted { prec: s.prec() }),
            Kind::Random { rng, .. } => {
                let q = self.field.q();
                self.cache.reserve(need - self.cache.len());
                while self.cache.len() < need {
                    self.cache.push(rng.gen_range(0..q) as Elem);
                }
            }
            Kind::Rational { p, q, lead_inv } => {
                // Q·f = P read off at X^m gives c_i for i = deg Q - m.
                let f = &self.field;
                let n = q.deg() as i64;
                if p.is_zero() {
                    self.cache.resize(need, 0);
                    return Ok(());
                }
                while self.cache.len() < need {
                    let i = self.start + self.cache.len() as i64;
                    let m = n - i;
                    let mut acc = if (0..=p.deg() as i64).contains(&m) { p.coeff(m as usize) } else { 0 };
                    for j in 0..n {
                        let idx = j - n + i;
                        if idx >= self.start {
                            let c = self.cache[(idx - self.start) as usize];
                            acc = f.sub(acc, f.mul(q.coeff(j as usize), c));
                        }
                    }
                    self.cache.push(f.mul(acc, *lead_inv));
                }
            }
        }
        Ok(())
    }

    /// Coefficient of `X^{-i}`, extending the source if needed.
    pub fn coeff(&mut self, i: i64) -> Result<Elem> {
        if i < self.start {
            return Ok(0);
        }
        self.ensure(i + 1)?;
        Ok(self.cache[(i - self.start) as usize])
    }

    /// Materialized coefficients for indices `start()..prec()`.
    pub fn cached(&self) -> &[Elem] {
        &self.cache
    }

    /// Truncation of the source at `prec`.
    pub fn series(&mut self, prec: i64) -> Result<LaurentSeries> {
        if let Kind::Fixed(s) = &self.kind {
            if prec >= s.prec() {
                return Ok(s.clone());
            }
        }
        if prec <= self.start {
            return Ok(LaurentSeries::zero(&self.field, prec));
        }
        self.ensure(prec)?;
        Ok(LaurentSeries::from_coeffs(&self.field, self.start, &self.cache[..(prec - self.start) as usize]))
    }
}
