//! The orbit of ∞ under the congruence subgroups
//! `Γ_0(Q_0) = {γ ∈ SL_2(F_q[X]) : Q_0 | c}`, growth counts, and the
//! congruence-constrained solution search.
//!
//! The orbit of ∞ is the set of reduced `P/Q` with `Q_0 | Q`. Inside the unit
//! ball the canonical representatives are `P/Q` with `Q` monic of degree
//! `d ≥ 1` and `deg P < d`, together with the constants at depth 0 when `Q_0`
//! is a unit.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::contfrac::{cf_expand, separation, CfStatus, Separation};
use crate::error::{Error, Result};
use crate::field::{Elem, Field};
use crate::laurent::{SeriesSource, Valuation};
use crate::poly::Poly;
use crate::testfn::TestFunction;
use crate::tree::{translation_distance, SL2Elt};

/// Default cap on enumerated items.
pub const DEFAULT_BUDGET: u128 = 1 << 26;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitSpec {
    field: Field,
    q0: Poly,
}

impl OrbitSpec {
    pub fn new(q0: &Poly) -> Result<OrbitSpec> {
        if q0.is_zero() {
            return Err(Error::InvalidParameter("the congruence modulus Q0 must be nonzero".into()));
        }
        Ok(OrbitSpec { field: q0.field().clone(), q0: q0.monic() })
    }

    /// The full group, `Q_0 = 1`.
    pub fn full(field: &Field) -> OrbitSpec {
        OrbitSpec { field: field.clone(), q0: Poly::one(field) }
    }

    pub fn parse(field: &Field, q0: &str) -> Result<OrbitSpec> {
        OrbitSpec::new(&Poly::parse(field, q0)?)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn q0(&self) -> &Poly {
        &self.q0
    }

    fn q0_deg(&self) -> usize {
        self.q0.deg()
    }
}

fn check_budget(needed: u128, budget: u128) -> Result<()> {
    if needed > budget {
        Err(Error::BudgetExceeded { needed, budget })
    } else {
        Ok(())
    }
}

fn qpow(q: u32, e: usize) -> u128 {
    (q as u128).checked_pow(e as u32).unwrap_or(u128::MAX)
}

/// Whether `P/Q` is in the orbit: `gcd(P, Q) = 1` and `Q_0 | Q`.
pub fn orbit_contains(p: &Poly, q: &Poly, spec: &OrbitSpec) -> Result<bool> {
    if q.is_zero() {
        return Err(Error::DivisionByZeroPoly);
    }
    Ok(p.coprime(q) && q.divisible_by(&spec.q0))
}

/// Whether `P/Q` is the canonical representative of an orbit point in the
/// unit ball (monic `Q`, `deg P < deg Q`, or a constant over `Q = 1`).
pub fn is_canonical(p: &Poly, q: &Poly, spec: &OrbitSpec) -> bool {
    if !q.is_monic() || !orbit_contains(p, q, spec).unwrap_or(false) {
        return false;
    }
    q.deg() == 0 || p.is_zero() || p.deg() < q.deg()
}

/// Canonical orbit points `P/Q` with `deg Q = d`.
pub fn orbit_enumerate(spec: &OrbitSpec, d: usize, budget: u128) -> Result<Vec<(Poly, Poly)>> {
    let f = &spec.field;
    if d == 0 {
        if !spec.q0.is_unit() {
            return Ok(Vec::new());
        }
        return Ok(f.elements().map(|c| (Poly::constant(f, c), Poly::one(f))).collect());
    }
    if d < spec.q0_deg() {
        return Ok(Vec::new());
    }
    let m = d - spec.q0_deg();
    check_budget(qpow(f.q(), m).saturating_mul(qpow(f.q(), d)), budget)?;
    let mut out = Vec::new();
    for cofactor in Poly::monics(f, m) {
        let q = &spec.q0 * &cofactor;
        for p in Poly::below_degree(f, d) {
            if p.coprime(&q) {
                out.push((p, q.clone()));
            }
        }
    }
    Ok(out)
}

/// Degrees of the distinct monic irreducible factors of `q0`, by trial division.
pub fn distinct_factor_degrees(q0: &Poly, budget: u128) -> Result<Vec<usize>> {
    let f = q0.field();
    let mut rest = q0.monic();
    let mut degrees = Vec::new();
    let mut k = 1;
    while rest.deg() >= 2 * k {
        check_budget(qpow(f.q(), k), budget)?;
        for cand in Poly::monics(f, k) {
            if rest.divisible_by(&cand) {
                degrees.push(k);
                while let Some(quot) = rest.exact_div(&cand) {
                    rest = quot;
                }
            }
        }
        k += 1;
    }
    if rest.deg() >= 1 {
        degrees.push(rest.deg());
    }
    degrees.sort_unstable();
    Ok(degrees)
}

/// Number of canonical orbit points with `deg Q = d`, in closed form.
///
/// Summing Euler's totient over the multiples of `Q_0` by Möbius inversion
/// gives `q^{deg Q_0 - s} Π (q^{e_i} - 1) Σ_{k ≤ K} M_k q^{2(K-k)}` with
/// `K = d - deg Q_0`, `e_i` the degrees of the distinct irreducible factors of
/// `Q_0`, `s = Σ e_i`, and `Σ M_k u^k = (1 - q u) / Π (1 - u^{e_i})`.
pub fn orbit_count_degree(spec: &OrbitSpec, d: usize) -> Result<BigUint> {
    let q = spec.field.q();
    if d == 0 {
        return Ok(if spec.q0.is_unit() { BigUint::from(q) } else { BigUint::zero() });
    }
    let d0 = spec.q0_deg();
    if d < d0 {
        return Ok(BigUint::zero());
    }
    let big_k = d - d0;
    let degrees = distinct_factor_degrees(&spec.q0, DEFAULT_BUDGET)?;
    // N(u) = Π 1/(1 - u^e), truncated at u^K
    let mut n = vec![BigInt::zero(); big_k + 1];
    n[0] = BigInt::one();
    for &e in &degrees {
        for k in e..=big_k {
            let add = n[k - e].clone();
            n[k] += add;
        }
    }
    let qb = BigInt::from(q);
    let mut sum = BigInt::zero();
    for k in 0..=big_k {
        let mut m_k = n[k].clone();
        if k >= 1 {
            m_k -= &qb * &n[k - 1];
        }
        sum += m_k * qb.pow(2 * (big_k - k) as u32);
    }
    let s: usize = degrees.iter().sum();
    let mut total = sum * qb.pow((d0 - s) as u32);
    for &e in &degrees {
        total *= qb.pow(e as u32) - 1;
    }
    debug_assert!(!total.is_negative());
    Ok(total.to_biguint().expect("counts are nonnegative"))
}

/// Degrees `d` with `n ≤ 2d < n + width`.
pub fn window_degrees(n: u64, width: u64) -> std::ops::Range<usize> {
    let lo = n.div_ceil(2) as usize;
    let hi = (n + width).div_ceil(2) as usize;
    lo..hi.max(lo)
}

/// `𝒩(n)`: canonical orbit points with `n ≤ D(r) < n + width`.
pub fn orbit_count_window(spec: &OrbitSpec, n: u64, width: u64) -> Result<BigUint> {
    if width < 2 {
        return Err(Error::InvalidParameter(format!("window width {width} must be at least 2")));
    }
    window_degrees(n, width).map(|d| orbit_count_degree(spec, d)).sum()
}

/// Enumeration route to [`orbit_count_window`].
pub fn orbit_count_window_enumerated(spec: &OrbitSpec, n: u64, width: u64, budget: u128) -> Result<BigUint> {
    if width < 2 {
        return Err(Error::InvalidParameter(format!("window width {width} must be at least 2")));
    }
    let mut total = BigUint::zero();
    for d in window_degrees(n, width) {
        total += orbit_enumerate(spec, d, budget)?.len();
    }
    Ok(total)
}

/// `#{γ ∈ SL_2(F_q[X]) : d(x_0, γ x_0) ≤ n}` by exhaustive enumeration.
pub fn group_ball_count(field: &Field, n: u64, budget: u128) -> Result<BigUint> {
    let h = (n / 2) as usize;
    let per = qpow(field.q(), h + 1);
    check_budget(per.saturating_mul(per).saturating_mul(per), budget)?;
    let one = Poly::one(field);
    let all: Vec<Poly> = Poly::below_degree(field, h + 1).collect();
    let mut count = 0u64;
    for a in &all {
        for b in &all {
            for c in &all {
                // solve a d - b c = 1 for d
                let rhs = &one + &(b * c);
                let ds: Vec<Poly> = if a.is_zero() {
                    if rhs.is_zero() {
                        all.clone()
                    } else {
                        Vec::new()
                    }
                } else {
                    rhs.exact_div(a).into_iter().collect()
                };
                for d in ds {
                    let Ok(g) = SL2Elt::new(a.clone(), b.clone(), c.clone(), d) else {
                        continue;
                    };
                    if translation_distance(&g) <= n {
                        count += 1;
                    }
                }
            }
        }
    }
    Ok(BigUint::from(count))
}

/// `#{γ ∈ Γ_∞ : d(x_0, γ x_0) ≤ n} = (q - 1) q^{⌊n/2⌋ + 1}` for the upper
/// triangular subgroup of SL_2(F_q[X]).
pub fn parabolic_ball_count(field: &Field, n: u64) -> BigUint {
    let q = BigUint::from(field.q());
    (&q - 1u32) * q.pow((n / 2 + 1) as u32)
}

/// Enumeration route to [`parabolic_ball_count`]: scans `[[u, b], [0, u^{-1}]]`
/// one degree past the bound and filters by distance.
pub fn parabolic_ball_count_enumerated(field: &Field, n: u64, budget: u128) -> Result<BigUint> {
    let h = (n / 2) as usize + 1;
    let count = qpow(field.q(), h + 1);
    check_budget(count.saturating_mul(field.q() as u128), budget)?;
    let mut total = 0u64;
    for u in 1..field.q() {
        let u = u as Elem;
        let ui = field.inv(u).expect("nonzero");
        for b in Poly::below_degree(field, h + 1) {
            let g = SL2Elt::new(Poly::constant(field, u), b, Poly::zero(field), Poly::constant(field, ui))?;
            if translation_distance(&g) <= n {
                total += 1;
            }
        }
    }
    Ok(BigUint::from(total))
}

/// A pair with `ν(f - P/Q) ≥` the threshold of its degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub p: Poly,
    pub q: Poly,
    /// `ν(f - P/Q)`, infinite when `f = P/Q`.
    pub nu: Valuation,
}

impl Solution {
    pub fn degree(&self) -> usize {
        self.q.deg()
    }
}

fn thresholds(phi: &TestFunction, d_max: usize) -> Result<Vec<u32>> {
    (0..=d_max as u32).map(|d| phi.radius(d)).collect()
}

fn sort_solutions(sols: &mut [Solution]) {
    sols.sort_by(|x, y| (x.q.deg(), &x.q, &x.p).cmp(&(y.q.deg(), &y.q, &y.p)));
}

fn precision_cap(d_max: usize) -> i64 {
    16 * (2 * d_max as i64 + 3) + 1024
}

/// Solutions among the convergents, restricted to degrees accepted by `keep`.
fn convergent_solutions(
    source: &mut SeriesSource,
    spec: &OrbitSpec,
    radii: &[u32],
    keep: impl Fn(usize) -> bool,
) -> Result<Vec<Solution>> {
    let d_max = radii.len() - 1;
    let cap = precision_cap(d_max);
    let mut prec = 2 * d_max as i64 + 3;
    let exp = loop {
        if source.as_rational().is_none() {
            source.ensure(source.max_prec().map_or(prec, |m| m.min(prec)))?;
        }
        let exp = cf_expand(source, usize::MAX);
        let done = exp.status == CfStatus::TerminatedRational || exp.last().1.deg() > d_max;
        if done {
            break exp;
        }
        if prec >= cap || source.max_prec().is_some_and(|m| m <= prec) {
            return Err(Error::PrecisionExhausted { prec: source.prec() });
        }
        prec = (2 * prec).min(cap);
    };
    let f = spec.field();
    let mut out = Vec::new();
    for (n, (pn, qn)) in exp.convergents.iter().enumerate() {
        let d = qn.deg();
        if d > d_max {
            break;
        }
        if !keep(d) {
            continue;
        }
        let nu = match exp.convergents.get(n + 1) {
            Some((_, q1)) => Valuation::new((d + q1.deg()) as i64),
            None => Valuation::INFINITY,
        };
        if nu < Valuation::new(radii[d] as i64) {
            continue;
        }
        let u = f.inv(qn.leading()).expect("Q_n is nonzero");
        let (p, q) = (pn.scale(u), qn.scale(u));
        if is_canonical(&p, &q, spec) {
            out.push(Solution { p, q, nu });
        }
    }
    Ok(out)
}

/// Exhaustive scan of the canonical pairs of degree `d`.
fn brute_solutions(
    source: &mut SeriesSource,
    spec: &OrbitSpec,
    d: usize,
    radius: u32,
    cap: i64,
    budget: u128,
) -> Result<Vec<Solution>> {
    let mut out = Vec::new();
    for (p, q) in orbit_enumerate(spec, d, budget)? {
        let mut prec = (radius as i64).max(2 * d as i64 + 1);
        let nu = loop {
            match separation(source, &p, &q, prec)? {
                Separation::Exact(v) => break Valuation::new(v),
                Separation::Equal => break Valuation::INFINITY,
                // agreement up to prec already decides membership; refine for the report
                Separation::AtLeast(_) if prec < cap && source.max_prec().is_none_or(|m| m > prec) => {
                    prec = (2 * prec).min(cap);
                }
                Separation::AtLeast(v) => return Err(Error::PrecisionExhausted { prec: v }),
            }
        };
        if nu >= Valuation::new(radius as i64) {
            out.push(Solution { p, q, nu });
        }
    }
    Ok(out)
}

/// Canonical orbit pairs with `deg Q ≤ d_max` and `ν(f - P/Q) ≥ 2 deg Q - log_q φ(q^{deg Q})`,
/// found among the convergents. Every degree must be in the strict regime.
pub fn solutions(source: &mut SeriesSource, spec: &OrbitSpec, phi: &TestFunction, d_max: usize) -> Result<Vec<Solution>> {
    let radii = thresholds(phi, d_max)?;
    if let Some(d) = (0..=d_max).find(|&d| radii[d] <= 2 * d as u32) {
        return Err(Error::PhiOutOfRegime { degree: d as u32 });
    }
    let mut sols = convergent_solutions(source, spec, &radii, |_| true)?;
    sort_solutions(&mut sols);
    Ok(sols)
}

/// Same contract as [`solutions`] by exhaustive search; valid in every regime.
pub fn solutions_bruteforce(
    source: &mut SeriesSource,
    spec: &OrbitSpec,
    phi: &TestFunction,
    d_max: usize,
    budget: u128,
) -> Result<Vec<Solution>> {
    let radii = thresholds(phi, d_max)?;
    let total: u128 = (0..=d_max).map(|d| qpow(spec.field.q(), 2 * d)).fold(0, u128::saturating_add);
    check_budget(total, budget)?;
    let cap = precision_cap(d_max);
    let mut sols = Vec::new();
    for (d, &r) in radii.iter().enumerate() {
        sols.extend(brute_solutions(source, spec, d, r, cap, budget)?);
    }
    sort_solutions(&mut sols);
    Ok(sols)
}

/// Convergent filtering on strict degrees and exhaustive search on the rest.
pub fn solutions_hybrid(
    source: &mut SeriesSource,
    spec: &OrbitSpec,
    phi: &TestFunction,
    d_max: usize,
    budget: u128,
) -> Result<Vec<Solution>> {
    let radii = thresholds(phi, d_max)?;
    let strict: Vec<bool> = radii.iter().enumerate().map(|(d, &r)| r > 2 * d as u32).collect();
    let cap = precision_cap(d_max);
    let mut sols = convergent_solutions(source, spec, &radii, |d| strict[d])?;
    for (d, &r) in radii.iter().enumerate() {
        if !strict[d] {
            sols.extend(brute_solutions(source, spec, d, r, cap, budget)?);
        }
    }
    sort_solutions(&mut sols);
    Ok(sols)
}

/// Least-squares slope of `ln y` against `x`.
pub fn log_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points.iter().filter(|(_, y)| *y > 0.0).map(|&(x, y)| (x, y.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// `BigUint` to `f64`, saturating.
pub fn to_f64(x: &BigUint) -> f64 {
    x.to_f64().unwrap_or(f64::INFINITY)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contfrac::is_convergent;
    use crate::laurent::LaurentSeries;

    fn f2() -> Field {
        Field::with_order(2).unwrap()
    }

    fn p(field: &Field, s: &str) -> Poly {
        Poly::parse(field, s).unwrap()
    }

    #[test]
    fn contains_examples() {
        let f = f2();
        let x = OrbitSpec::parse(&f, "X").unwrap();
        assert!(orbit_contains(&p(&f, "1"), &p(&f, "X"), &x).unwrap());
        assert!(!orbit_contains(&p(&f, "1"), &p(&f, "X+1"), &x).unwrap());
        let full = OrbitSpec::full(&f);
        assert!(!orbit_contains(&p(&f, "X"), &p(&f, "X^2"), &full).unwrap());
        assert_eq!(orbit_contains(&p(&f, "1"), &Poly::zero(&f), &full).err(), Some(Error::DivisionByZeroPoly));
    }

    #[test]
    fn enumerate_examples() {
        let f = f2();
        let full = OrbitSpec::full(&f);
        let d1 = orbit_enumerate(&full, 1, DEFAULT_BUDGET).unwrap();
        assert_eq!(d1, vec![(p(&f, "1"), p(&f, "X")), (p(&f, "1"), p(&f, "X+1"))]);
        assert_eq!(orbit_enumerate(&full, 2, DEFAULT_BUDGET).unwrap().len(), 8);
        let x = OrbitSpec::parse(&f, "X").unwrap();
        let d2 = orbit_enumerate(&x, 2, DEFAULT_BUDGET).unwrap();
        assert_eq!(d2.len(), 3);
        assert!(d2.iter().all(|(_, q)| q == &p(&f, "X^2") || q == &p(&f, "X^2+X")));
        assert_eq!(orbit_enumerate(&x, 0, DEFAULT_BUDGET).unwrap().len(), 0);
        assert!(matches!(orbit_enumerate(&full, 20, 1000), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn window_count_examples() {
        let f2 = f2();
        let f3 = Field::with_order(3).unwrap();
        assert_eq!(orbit_count_window(&OrbitSpec::full(&f2), 2, 2).unwrap(), BigUint::from(2u32));
        assert_eq!(orbit_count_window(&OrbitSpec::full(&f2), 4, 2).unwrap(), BigUint::from(8u32));
        assert_eq!(orbit_count_window(&OrbitSpec::full(&f3), 2, 2).unwrap(), BigUint::from(6u32));
        let x = OrbitSpec::parse(&f2, "X").unwrap();
        let counts: Vec<u64> = (1..=5).map(|d| orbit_count_degree(&x, d).unwrap().to_u64().unwrap()).collect();
        assert_eq!(counts, [1, 3, 11, 43, 171]);
        assert!(orbit_count_window(&x, 2, 1).is_err());
    }

    #[test]
    fn closed_form_matches_enumeration() {
        for q in [2u32, 3, 4] {
            let f = Field::with_order(q).unwrap();
            for q0 in ["1", "X", "X+1", "X^2", "X^2+X", "X^3+X", "X^2+X+1"] {
                let spec = OrbitSpec::parse(&f, q0).unwrap();
                for d in 0..=5usize {
                    if qpow(q, 2 * d) > 1 << 16 {
                        continue;
                    }
                    let enumerated = orbit_enumerate(&spec, d, DEFAULT_BUDGET).unwrap().len();
                    assert_eq!(orbit_count_degree(&spec, d).unwrap(), BigUint::from(enumerated), "q={q} Q0={q0} d={d}");
                }
            }
        }
    }

    #[test]
    fn factor_degrees() {
        let f = f2();
        assert_eq!(distinct_factor_degrees(&p(&f, "X^3+X"), 100).unwrap(), [1, 1]);
        assert_eq!(distinct_factor_degrees(&p(&f, "X^5+X^4+X^3+X^2+X+1"), 100).unwrap(), [1, 2]);
        assert_eq!(distinct_factor_degrees(&p(&f, "1"), 100).unwrap(), Vec::<usize>::new());
    }

    #[test]
    fn growth_examples() {
        let f = f2();
        assert_eq!(group_ball_count(&f, 0, DEFAULT_BUDGET).unwrap(), BigUint::from(6u32));
        assert_eq!(group_ball_count(&f, 2, DEFAULT_BUDGET).unwrap(), BigUint::from(24u32));
        assert_eq!(group_ball_count(&f, 4, DEFAULT_BUDGET).unwrap(), BigUint::from(96u32));
        assert_eq!(parabolic_ball_count(&f, 0), BigUint::from(2u32));
        assert_eq!(parabolic_ball_count(&f, 2), BigUint::from(4u32));
        assert_eq!(parabolic_ball_count(&Field::with_order(3).unwrap(), 0), BigUint::from(6u32));
        for q in [2u32, 3] {
            let f = Field::with_order(q).unwrap();
            for n in (0..=8).step_by(2) {
                assert_eq!(parabolic_ball_count_enumerated(&f, n, DEFAULT_BUDGET).unwrap(), parabolic_ball_count(&f, n));
            }
        }
    }

    /// Series with digits `[0; X, X, …]`.
    fn all_x_source(f: &Field, depth: usize) -> SeriesSource {
        let digits: Vec<Poly> = std::iter::once(Poly::zero(f)).chain(std::iter::repeat_n(Poly::x(f), depth)).collect();
        let (pp, qq) = crate::contfrac::cf_eval(&digits).unwrap();
        SeriesSource::rational(&pp, &qq).unwrap()
    }

    #[test]
    fn solution_examples() {
        let f = f2();
        let half = TestFunction::preset("const-half", 2).unwrap();
        let full = OrbitSpec::full(&f);
        let mut s = all_x_source(&f, 30);
        let sols = solutions(&mut s, &full, &half, 4).unwrap();
        let degs: Vec<usize> = sols.iter().map(|x| x.degree()).collect();
        // a_0 = 0 is also a solution at depth 0: ν(f) = 1 ≥ 1
        assert_eq!(degs, [0, 1, 2, 3, 4]);
        for s in &sols[1..] {
            assert_eq!(s.nu, Valuation::new(2 * s.degree() as i64 + 1));
        }
        let x = OrbitSpec::parse(&f, "X").unwrap();
        let sols = solutions(&mut s, &x, &half, 4).unwrap();
        assert_eq!(sols.iter().map(|s| s.q.to_string()).collect::<Vec<_>>(), ["X", "X^3"]);
        let mut r = SeriesSource::rational(&p(&f, "1"), &p(&f, "X^2+X+1")).unwrap();
        let sols = solutions(&mut r, &full, &half, 10).unwrap();
        assert_eq!(sols.last().unwrap().nu, Valuation::INFINITY);
        let div = TestFunction::preset("divlog", 2).unwrap();
        assert_eq!(solutions(&mut r, &full, &div, 3).err(), Some(Error::PhiOutOfRegime { degree: 0 }));
        let sols = solutions_bruteforce(&mut r, &full, &div, 0, DEFAULT_BUDGET).unwrap();
        assert_eq!(sols.len(), 2);
    }

    #[test]
    fn bruteforce_agrees_in_strict_regime() {
        let f = f2();
        let half = TestFunction::preset("const-half", 2).unwrap();
        for spec in [OrbitSpec::full(&f), OrbitSpec::parse(&f, "X").unwrap()] {
            for seed in 0..200 {
                let mut s = SeriesSource::random(&f, seed, 0);
                let a = solutions(&mut s, &spec, &half, 4).unwrap();
                let b = solutions_bruteforce(&mut s, &spec, &half, 4, DEFAULT_BUDGET).unwrap();
                assert_eq!(a, b, "seed {seed}");
                for sol in &a {
                    assert!(orbit_contains(&sol.p, &sol.q, &spec).unwrap());
                    assert!(is_convergent(&sol.p, &sol.q, &mut s).unwrap().is_convergent() || sol.degree() == 0);
                }
            }
        }
    }

    #[test]
    fn hybrid_agrees_with_bruteforce_everywhere() {
        let f = f2();
        for name in ["divlog", "convlog2"] {
            let phi = TestFunction::preset(name, 2).unwrap();
            for seed in 0..100 {
                let mut s = SeriesSource::random(&f, seed, 3);
                let spec = OrbitSpec::full(&f);
                let a = solutions_hybrid(&mut s, &spec, &phi, 5, DEFAULT_BUDGET).unwrap();
                let b = solutions_bruteforce(&mut s, &spec, &phi, 5, DEFAULT_BUDGET).unwrap();
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn fixed_sources_report_exhaustion() {
        let f = f2();
        let half = TestFunction::preset("const-half", 2).unwrap();
        let short = LaurentSeries::from_coeffs(&f, 0, &[0, 1, 0, 1]);
        let mut s = SeriesSource::fixed(short);
        assert!(matches!(
            solutions(&mut s, &OrbitSpec::full(&f), &half, 4),
            Err(Error::PrecisionExhausted { .. })
        ));
    }

    #[test]
    fn slope_fit() {
        let pts: Vec<(f64, f64)> = (0..5).map(|n| (n as f64, 3.0 * (0.7 * n as f64).exp())).collect();
        assert!((log_slope(&pts).unwrap() - 0.7).abs() < 1e-12);
    }
}
