//! Continued fractions over A = F_q[X].
//!
//! A series known below index `N` is expanded by running Euclid on its
//! truncation `f_N = G / X^{N-1}`. The partial quotient `a_n` of `f_N` is a
//! partial quotient of `f` as soon as `2 deg Q_n < N`: then
//! `ν(f - P_n/Q_n) ≥ min(N, ν(f_N - P_n/Q_n)) > 2 deg Q_n` and the Legendre
//! criterion applies. No earlier emission is sound; a digit of degree `k`
//! right after `Q_n` depends on the coefficient of index `2 deg Q_n + 2k`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::field::{Elem, Field};
use crate::laurent::{LaurentSeries, SeriesSource};
use crate::poly::Poly;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CfStatus {
    /// The source is rational and its final convergent has been emitted.
    TerminatedRational,
    /// The next digit is not certified by the available precision.
    PrecisionExhausted,
    /// The digit budget was used up.
    MaxDigitsReached,
}

/// Certified partial quotients `a_0; a_1, a_2, …` and their convergents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CFExpansion {
    pub digits: Vec<Poly>,
    /// `(P_n, Q_n)` for `n = 0..digits.len()`, un-normalized.
    pub convergents: Vec<(Poly, Poly)>,
    pub status: CfStatus,
    /// Precision (exclusive index bound) the expansion was certified against.
    pub prec: i64,
}

impl CFExpansion {
    fn from_digits(digits: Vec<Poly>, status: CfStatus, prec: i64) -> CFExpansion {
        let convergents = convergents_of(&digits);
        CFExpansion { digits, convergents, status, prec }
    }

    /// Number of digits after `a_0`.
    pub fn len(&self) -> usize {
        self.digits.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `deg a_i` for `i ≥ 1`.
    pub fn digit_degrees(&self) -> Vec<u32> {
        self.digits.iter().skip(1).map(|a| a.deg() as u32).collect()
    }

    /// `deg Q_n` for every emitted convergent.
    pub fn q_degrees(&self) -> Vec<usize> {
        self.convergents.iter().map(|(_, q)| q.deg()).collect()
    }

    /// The last convergent.
    pub fn last(&self) -> (&Poly, &Poly) {
        let (p, q) = self.convergents.last().expect("a_0 is always present");
        (p, q)
    }
}

fn convergents_of(digits: &[Poly]) -> Vec<(Poly, Poly)> {
    let Some(a0) = digits.first() else {
        return Vec::new();
    };
    let field = a0.field();
    let mut out = Vec::with_capacity(digits.len());
    let (mut p_prev, mut q_prev) = (Poly::one(field), Poly::zero(field));
    let (mut p, mut q) = (a0.clone(), Poly::one(field));
    out.push((p.clone(), q.clone()));
    for a in &digits[1..] {
        let p_next = &(a * &p) + &p_prev;
        let q_next = &(a * &q) + &q_prev;
        p_prev = std::mem::replace(&mut p, p_next);
        q_prev = std::mem::replace(&mut q, q_next);
        out.push((p.clone(), q.clone()));
    }
    out
}

/// Outcome of the truncated Euclid run.
struct Run {
    stopped_by_budget: bool,
}

/// Runs Euclid on the truncation of a series with coefficients
/// `coeffs[i - start]` for `start ≤ i < prec`, calling `emit(deg, quotient)`
/// for each certified digit (quotient ascending, only when `want_quotients`).
fn truncated_euclid(
    field: &Field,
    start: i64,
    coeffs: &[Elem],
    prec: i64,
    max_digits: usize,
    want_quotients: bool,
    mut emit: impl FnMut(usize, &[Elem]),
) -> Run {
    if prec < 1 {
        return Run { stopped_by_budget: false };
    }
    let top = (prec - 1) as usize; // f_N = G / X^top
    // G has coefficient c_i at X^{top - i}.
    let lo = start.min(prec);
    let len = (prec - lo) as usize;
    let mut g: Vec<Elem> = vec![0; len];
    for (j, slot) in g.iter_mut().enumerate() {
        let i = prec - 1 - j as i64;
        if i >= start {
            *slot = coeffs[(i - start) as usize];
        }
    }
    trim(&mut g);
    let mut den = vec![0; top + 1];
    den[top] = 1;

    // a_0 = G div X^top
    let mut quot = Vec::new();
    let a0_deg = g.len().saturating_sub(top + 1);
    if g.len() > top {
        quot.extend_from_slice(&g[top..]);
        g.truncate(top);
        trim(&mut g);
    }
    emit(a0_deg, &quot);
    let (mut r_prev, mut r_cur) = (den, g);
    let mut deg_q = 0usize;
    let mut emitted = 0usize;
    while !r_cur.is_empty() {
        let k = r_prev.len() - r_cur.len();
        if 2 * (deg_q + k) >= prec as usize {
            return Run { stopped_by_budget: false };
        }
        if emitted == max_digits {
            return Run { stopped_by_budget: true };
        }
        divide_in_place(field, &mut r_prev, &r_cur, want_quotients.then_some(&mut quot));
        emit(k, &quot);
        deg_q += k;
        emitted += 1;
        std::mem::swap(&mut r_prev, &mut r_cur);
    }
    Run { stopped_by_budget: false }
}

fn trim(v: &mut Vec<Elem>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

/// Replaces `num` by `num mod den`; writes the quotient into `quot` if given.
fn divide_in_place(field: &Field, num: &mut Vec<Elem>, den: &[Elem], quot: Option<&mut Vec<Elem>>) {
    let db = den.len() - 1;
    let k = num.len() - 1 - db;
    let lead_inv = field.inv(den[db]).expect("nonzero leading coefficient");
    let mut q = vec![0; if quot.is_some() { k + 1 } else { 0 }];
    for i in (0..=k).rev() {
        let c = num[i + db];
        if c == 0 {
            continue;
        }
        let t = field.mul(c, lead_inv);
        if let Some(slot) = q.get_mut(i) {
            *slot = t;
        }
        field.axpy(&mut num[i..=i + db], field.neg(t), den);
    }
    num.truncate(db);
    trim(num);
    if let Some(out) = quot {
        *out = q;
    }
}

/// Expands the source with its current precision. Rational sources are first
/// extended far enough for the expansion to terminate.
pub fn cf_expand(source: &mut SeriesSource, max_digits: usize) -> CFExpansion {
    let rational = source.as_rational().map(|(p, q)| (p.clone(), q.clone()));
    if let Some((_, q)) = &rational {
        let need = 2 * q.deg() as i64 + 2;
        source.ensure(need).expect("rational sources extend without limit");
    }
    let field = source.field().clone();
    let prec = source.prec();
    let mut digits = Vec::new();
    let run = truncated_euclid(&field, source.start(), source.cached(), prec, max_digits, true, |_, quot| {
        digits.push(Poly::new(&field, quot.to_vec()));
    });
    if digits.is_empty() {
        return CFExpansion::from_digits(digits, CfStatus::PrecisionExhausted, prec);
    }
    let mut status = if run.stopped_by_budget { CfStatus::MaxDigitsReached } else { CfStatus::PrecisionExhausted };
    let exp = CFExpansion::from_digits(digits, status, prec);
    if let Some((p, q)) = rational {
        let (pn, qn) = exp.last();
        if pn * &q == &p * qn {
            status = CfStatus::TerminatedRational;
        }
    }
    CFExpansion { status, ..exp }
}

/// Ensures precision `prec` on the source, then expands.
pub fn cf_expand_to(source: &mut SeriesSource, prec: i64, max_digits: usize) -> Result<CFExpansion> {
    source.ensure(prec)?;
    Ok(cf_expand(source, max_digits))
}

/// Expansion of a truncated series.
pub fn cf_expand_series(f: &LaurentSeries, max_digits: usize) -> CFExpansion {
    cf_expand(&mut SeriesSource::fixed(f.clone()), max_digits)
}

/// Digit degrees only, without convergents; the fast path for long random expansions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigitDegrees {
    /// `deg a_i` for `i ≥ 1`.
    pub degrees: Vec<u32>,
    pub status: CfStatus,
}

pub fn digit_degrees(source: &mut SeriesSource, max_digits: usize) -> DigitDegrees {
    if source.as_rational().is_some() {
        let exp = cf_expand(source, max_digits);
        return DigitDegrees { degrees: exp.digit_degrees(), status: exp.status };
    }
    let field = source.field().clone();
    let mut degrees = Vec::new();
    let mut first = true;
    let run = truncated_euclid(&field, source.start(), source.cached(), source.prec(), max_digits, false, |k, _| {
        if first {
            first = false;
        } else {
            degrees.push(k as u32);
        }
    });
    let status = if run.stopped_by_budget { CfStatus::MaxDigitsReached } else { CfStatus::PrecisionExhausted };
    DigitDegrees { degrees, status }
}

/// Euclid on `P/Q` directly.
pub fn cf_expand_rational(p: &Poly, q: &Poly) -> Result<CFExpansion> {
    if q.is_zero() {
        return Err(Error::DivisionByZeroPoly);
    }
    let (mut num, mut den) = (p.clone(), q.clone());
    let mut digits = Vec::new();
    loop {
        let (a, r) = num.divmod(&den)?;
        digits.push(a);
        if r.is_zero() {
            break;
        }
        num = std::mem::replace(&mut den, r);
    }
    Ok(CFExpansion::from_digits(digits, CfStatus::TerminatedRational, i64::MAX))
}

/// Expansion by repeated polynomial part and inversion with tracked
/// precision; an independent route to [`cf_expand`].
pub fn cf_expand_by_quotients(f: &LaurentSeries, max_digits: usize) -> CFExpansion {
    let mut x = f.clone();
    let mut digits = Vec::new();
    let status = loop {
        let Ok((a, frac)) = x.polynomial_part() else {
            break CfStatus::PrecisionExhausted;
        };
        if digits.len() == max_digits.saturating_add(1) {
            break CfStatus::MaxDigitsReached;
        }
        digits.push(a);
        match frac.inv() {
            Ok(inv) => x = inv,
            Err(_) => break CfStatus::PrecisionExhausted,
        }
    };
    CFExpansion::from_digits(digits, status, f.prec())
}

/// Final convergent of `a_0; a_1, …, a_n`.
pub fn cf_eval(digits: &[Poly]) -> Result<(Poly, Poly)> {
    if digits.is_empty() {
        return Err(Error::MalformedDigits { index: 0 });
    }
    if let Some(i) = digits.iter().skip(1).position(|a| a.is_zero() || a.deg() == 0) {
        return Err(Error::MalformedDigits { index: i + 1 });
    }
    let (p, q) = convergents_of(digits).pop().expect("nonempty");
    Ok((p, q))
}

/// `ν(f - P/Q)` as far as it can be decided.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Separation {
    Exact(i64),
    /// `f = P/Q` (rational sources only).
    Equal,
    /// All known coefficients agree; the valuation is at least this.
    AtLeast(i64),
}

/// `ν(f - P/Q)`, exact for rational sources, otherwise read off at precision `prec`.
pub fn separation(source: &mut SeriesSource, p: &Poly, q: &Poly, prec: i64) -> Result<Separation> {
    if q.is_zero() {
        return Err(Error::DivisionByZeroPoly);
    }
    if let Some((a, b)) = source.as_rational() {
        let num = &(a * q) - &(p * b);
        if num.is_zero() {
            return Ok(Separation::Equal);
        }
        return Ok(Separation::Exact((b.deg() + q.deg()) as i64 - num.deg() as i64));
    }
    let f = source.series(prec)?;
    let r = match LaurentSeries::from_rational(p, q, prec) {
        Ok(r) => r,
        Err(Error::PrecisionTooSmall { .. }) => LaurentSeries::zero(source.field(), prec),
        Err(e) => return Err(e),
    };
    let d = f.sub(&r)?;
    Ok(match d.valuation().finite() {
        Some(v) => Separation::Exact(v),
        None => Separation::AtLeast(d.prec()),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvergentCertificate {
    /// `(P, Q)` is a unit multiple of `(P_n, Q_n)`.
    Convergent { index: usize },
    /// Not a convergent; `ν(f - P/Q)` is recorded.
    Separated { nu: Separation },
}

impl ConvergentCertificate {
    pub fn is_convergent(&self) -> bool {
        matches!(self, ConvergentCertificate::Convergent { .. })
    }
}

/// Whether `P/Q` (reduced) is a convergent of `f`, by matching against the
/// certified expansion.
pub fn is_convergent(p: &Poly, q: &Poly, source: &mut SeriesSource) -> Result<ConvergentCertificate> {
    if q.is_zero() {
        return Err(Error::DivisionByZeroPoly);
    }
    if !p.coprime(q) {
        return Err(Error::NotReduced);
    }
    let need = 2 * q.deg() as i64 + 1;
    source.ensure(need)?;
    // every convergent with deg Q_n ≤ deg Q is certified at this precision
    let exp = cf_expand(source, usize::MAX);
    let inv = source.field().inv(q.leading()).expect("Q is nonzero");
    let (pm, qm) = (p.scale(inv), q.scale(inv));
    for (n, (pn, qn)) in exp.convergents.iter().enumerate() {
        if qn.deg() == q.deg() {
            let u = source.field().inv(qn.leading()).expect("Q_n is nonzero");
            if qn.scale(u) == qm && pn.scale(u) == pm {
                return Ok(ConvergentCertificate::Convergent { index: n });
            }
        }
    }
    let nu = separation(source, p, q, need)?;
    Ok(ConvergentCertificate::Separated { nu })
}

/// Histogram of digit degrees `deg a_i`, `i ≥ 1`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DigitHistogram {
    pub counts: BTreeMap<u32, u64>,
}

impl DigitHistogram {
    pub fn add(&mut self, degrees: &[u32]) {
        for &d in degrees {
            *self.counts.entry(d).or_insert(0) += 1;
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn count(&self, k: u32) -> u64 {
        self.counts.get(&k).copied().unwrap_or(0)
    }

    pub fn merge(&mut self, other: &DigitHistogram) {
        for (&k, &c) in &other.counts {
            *self.counts.entry(k).or_insert(0) += c;
        }
    }
}

pub fn digit_degree_stats<'a>(expansions: impl IntoIterator<Item = &'a [u32]>) -> DigitHistogram {
    let mut h = DigitHistogram::default();
    for e in expansions {
        h.add(e);
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn f2() -> Field {
        Field::with_order(2).unwrap()
    }

    fn p(field: &Field, s: &str) -> Poly {
        Poly::parse(field, s).unwrap()
    }

    fn strs(digits: &[Poly]) -> Vec<String> {
        digits.iter().map(|d| d.to_string()).collect()
    }

    #[test]
    fn expansion_examples() {
        let f = f2();
        let mut s = SeriesSource::rational(&p(&f, "X^2+X+1"), &p(&f, "X")).unwrap();
        let e = cf_expand(&mut s, 100);
        assert_eq!(strs(&e.digits), ["X+1", "X"]);
        assert_eq!(e.status, CfStatus::TerminatedRational);
        let mut s = SeriesSource::rational(&p(&f, "1"), &p(&f, "X")).unwrap();
        assert_eq!(strs(&cf_expand(&mut s, 100).digits), ["0", "X"]);
        assert_eq!(strs(&cf_expand_rational(&p(&f, "1"), &p(&f, "X+1")).unwrap().digits), ["0", "X+1"]);
        assert_eq!(strs(&cf_expand_rational(&p(&f, "X"), &p(&f, "1")).unwrap().digits), ["X"]);
        let mut r = SeriesSource::random(&f, 3, 0);
        r.ensure(10).unwrap();
        let e = cf_expand(&mut r, 100);
        assert_eq!(e.status, CfStatus::PrecisionExhausted);
        let qd = e.q_degrees();
        assert!(2 * qd.last().unwrap() < 10);
    }

    #[test]
    fn eval_examples() {
        let f = f2();
        assert_eq!(cf_eval(&[p(&f, "0"), p(&f, "X")]).unwrap(), (p(&f, "1"), p(&f, "X")));
        assert_eq!(cf_eval(&[p(&f, "X+1"), p(&f, "X")]).unwrap(), (p(&f, "X^2+X+1"), p(&f, "X")));
        assert_eq!(cf_eval(&[p(&f, "0"), p(&f, "1")]).err(), Some(Error::MalformedDigits { index: 1 }));
    }

    #[test]
    fn certification_is_tight_for_high_degree_digits() {
        // f = X^-2 + c X^-4: a_1 = X^2 + c' depends on c_4, so prec 5 is needed.
        let f = f2();
        let a = LaurentSeries::from_coeffs(&f, 0, &[0, 0, 1, 0]);
        assert_eq!(cf_expand_series(&a, 10).digits.len(), 1);
        let b = LaurentSeries::from_coeffs(&f, 0, &[0, 0, 1, 0, 1]);
        let e = cf_expand_series(&b, 10);
        assert_eq!(strs(&e.digits), ["0", "X^2+1"]);
        let c = LaurentSeries::from_coeffs(&f, 0, &[0, 0, 1, 0, 0]);
        assert_eq!(strs(&cf_expand_series(&c, 10).digits), ["0", "X^2"]);
    }

    #[test]
    fn is_convergent_examples() {
        let f = f2();
        let mut s = SeriesSource::rational(&p(&f, "1"), &p(&f, "X^2+X")).unwrap();
        assert!(is_convergent(&p(&f, "1"), &p(&f, "X^2+X"), &mut s).unwrap().is_convergent());
        let cert = is_convergent(&p(&f, "1"), &p(&f, "X^2"), &mut s).unwrap();
        match cert {
            ConvergentCertificate::Separated { nu: Separation::Exact(v) } => assert!(v <= 4),
            other => panic!("unexpected {other:?}"),
        }
        // exhaustive: no other Q of degree 2 gives ν > 4 except X^2+X itself
        for qq in Poly::monics(&f, 2) {
            for pp in Poly::below_degree(&f, 2) {
                if !pp.coprime(&qq) {
                    continue;
                }
                let sep = separation(&mut s, &pp, &qq, 40).unwrap();
                let strict = match sep {
                    Separation::Exact(v) => v > 4,
                    _ => true,
                };
                assert_eq!(strict, pp == p(&f, "1") && qq == p(&f, "X^2+X"));
            }
        }
    }

    #[test]
    fn approximation_identity_on_random_series() {
        let f = Field::with_order(3).unwrap();
        for seed in 0..20 {
            let mut s = SeriesSource::random(&f, seed, 0);
            s.ensure(120).unwrap();
            let e = cf_expand(&mut s, usize::MAX);
            let qd = e.q_degrees();
            for n in 0..e.convergents.len() - 1 {
                let (pn, qn) = &e.convergents[n];
                let sep = separation(&mut s, pn, qn, 120).unwrap();
                assert_eq!(sep, Separation::Exact((qd[n] + qd[n + 1]) as i64));
            }
        }
    }

    #[test]
    fn quotient_route_agrees_with_euclid_route() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for q in [2u32, 3, 4] {
            let f = Field::with_order(q).unwrap();
            for _ in 0..200 {
                let prec = rng.gen_range(1..40);
                let start = rng.gen_range(-3..3);
                let coeffs: Vec<Elem> = (start..prec).map(|_| rng.gen_range(0..q) as Elem).collect();
                let s = LaurentSeries::from_coeffs(&f, start, &coeffs);
                let a = cf_expand_series(&s, usize::MAX);
                let b = cf_expand_by_quotients(&s, usize::MAX);
                assert_eq!(a.digits, b.digits, "series {s:?}");
            }
        }
    }

    #[test]
    fn degree_only_mode_matches_full_mode() {
        let f = f2();
        let mut a = SeriesSource::random(&f, 5, 2);
        a.ensure(500).unwrap();
        let full = cf_expand(&mut a.clone(), 50);
        let fast = digit_degrees(&mut a, 50);
        assert_eq!(full.digit_degrees(), fast.degrees);
        assert_eq!(fast.status, CfStatus::MaxDigitsReached);
    }

    #[test]
    fn histogram_examples() {
        let h = digit_degree_stats([&[1u32, 1, 1][..]]);
        assert_eq!(h.counts, BTreeMap::from([(1, 3)]));
        assert_eq!(digit_degree_stats(std::iter::empty::<&[u32]>()).total(), 0);
    }

    #[test]
    fn digit_law_matches_prefix_enumeration() {
        // P(deg a_1 = k) = P(ν(f) = k) for f uniform in X^{-1}O, counted over all prefixes.
        for q in [2u32, 3] {
            let f = Field::with_order(q).unwrap();
            for k in 1..=3usize {
                let len = 2 * k + 1;
                let total = (q as u64).pow(len as u32);
                let hits = (0..total)
                    .filter(|&idx| {
                        let c = Poly::from_index(&f, idx);
                        let coeffs: Vec<Elem> = (0..len).map(|i| c.coeff(i)).collect();
                        let s = LaurentSeries::from_coeffs(&f, 1, &coeffs[..len - 1]);
                        let s = if s.is_zero() { return false } else { s };
                        let e = cf_expand_series(&s, 1);
                        e.digits.len() > 1 && e.digits[1].deg() == k
                    })
                    .count() as u64;
                // exact: (q-1) q^{-k} of the prefixes
                assert_eq!(hits * (q as u64).pow(k as u32), total * (q as u64 - 1));
            }
        }
    }

    fn reduced_pair(q: u32, rng: &mut ChaCha8Rng, f: &Field) -> (Poly, Poly) {
        loop {
            let dq = rng.gen_range(0..=12);
            let qq = Poly::new(f, (0..=dq).map(|_| rng.gen_range(0..q) as Elem).collect());
            let pp = Poly::new(f, (0..=rng.gen_range(0..=14)).map(|_| rng.gen_range(0..q) as Elem).collect());
            if !qq.is_zero() && (pp.is_zero() && qq.is_unit() || pp.coprime(&qq)) {
                return (pp, qq);
            }
        }
    }

    #[test]
    fn rational_sources_match_direct_euclid() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for q in [2u32, 3] {
            let f = Field::with_order(q).unwrap();
            for _ in 0..300 {
                let (pp, qq) = reduced_pair(q, &mut rng, &f);
                let mut s = SeriesSource::rational(&pp, &qq).unwrap();
                let a = cf_expand(&mut s, usize::MAX);
                let b = cf_expand_rational(&pp, &qq).unwrap();
                assert_eq!(a.digits, b.digits);
                assert_eq!(a.status, CfStatus::TerminatedRational);
                let (pn, qn) = cf_eval(&b.digits).unwrap();
                assert_eq!(&pn * &qq, &pp * &qn);
            }
        }
    }

    proptest! {
        #[test]
        fn convergent_invariants(seed in 0u64..1000, q in prop::sample::select(vec![2u32, 3, 5])) {
            let f = Field::with_order(q).unwrap();
            let mut s = SeriesSource::random(&f, seed, 1);
            s.ensure(60).unwrap();
            let e = cf_expand(&mut s, usize::MAX);
            for a in &e.digits[1..] {
                prop_assert!(a.deg() >= 1);
            }
            for n in 1..e.convergents.len() {
                let (p1, q1) = &e.convergents[n];
                let (p0, q0) = &e.convergents[n - 1];
                let det = &(p1 * q0) - &(p0 * q1);
                prop_assert!(det.is_unit());
                prop_assert!(p1.coprime(q1));
                prop_assert!(q1.deg() > q0.deg());
            }
        }
    }
}
