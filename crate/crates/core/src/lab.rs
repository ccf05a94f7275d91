//! The approximation sets `A_n` as exact ball unions, and the exact checks
//! built on them: shadow measures, quasi-independence ratios and
//! Borel–Cantelli partial sums.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::field::{Elem, Field};
use crate::measure::{independence_ratio, Ball, BallSet, QMeasure};
use crate::orbit::{orbit_count_degree, orbit_enumerate, window_degrees, OrbitSpec};
use crate::poly::Poly;
use crate::testfn::TestFunction;
use crate::tree::{cusp_depth_by_matrix, shadow, Fraction, Vertex};

/// Default window width `N`.
pub const WINDOW: u64 = 2;

fn require_cap(f: &TestFunction) -> Result<()> {
    if f.is_capped() {
        Ok(())
    } else {
        Err(Error::UncappedTestFunction)
    }
}

/// `A_n`: balls of radius `ceil(D - ln ψ(D))` around the canonical orbit points
/// with `nN ≤ D < (n+1)N`.
pub fn build_a_n(spec: &OrbitSpec, psi: &TestFunction, n: u64, width: u64, budget: u128) -> Result<BallSet> {
    require_cap(psi)?;
    let mut set = BallSet::new(spec.field());
    for d in window_degrees(n * width, width) {
        let radius = psi.radius(d as u32)?;
        for (p, q) in orbit_enumerate(spec, d, budget)? {
            set.insert(&Ball::around_rational(&p, &q, radius)?);
        }
    }
    Ok(set)
}

/// Whether the balls of a window are pairwise disjoint by construction: a
/// single degree whose threshold exceeds the depth.
fn window_is_disjoint(psi: &TestFunction, n: u64, width: u64) -> Result<bool> {
    let degrees = window_degrees(n * width, width);
    if degrees.len() > 1 {
        return Ok(false);
    }
    match degrees.clone().next() {
        None => Ok(true),
        Some(d) => psi.is_strict(d as u32),
    }
}

/// Sum of the ball measures in window `n`, which is the expected number of
/// solutions in the window for a Haar-random point.
pub fn window_expected_count(spec: &OrbitSpec, psi: &TestFunction, n: u64, width: u64) -> Result<QMeasure> {
    let q = spec.field().q();
    let mut total = QMeasure::zero(q);
    for d in window_degrees(n * width, width) {
        let count = orbit_count_degree(spec, d)?;
        total = total.add(&QMeasure::ball(q, psi.radius(d as u32)?).times(&count));
    }
    Ok(total)
}

/// `μ(A_n)`; closed form when the window's balls are disjoint, otherwise
/// through [`build_a_n`].
pub fn window_measure(spec: &OrbitSpec, psi: &TestFunction, n: u64, width: u64, budget: u128) -> Result<QMeasure> {
    require_cap(psi)?;
    if window_is_disjoint(psi, n, width)? {
        window_expected_count(spec, psi, n, width)
    } else {
        Ok(build_a_n(spec, psi, n, width, budget)?.measure())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShadowViolation {
    pub p: Poly,
    pub q: Poly,
    pub t: u32,
    pub measure: QMeasure,
    pub expected: QMeasure,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ShadowReport {
    pub checked: u64,
    pub violations: Vec<ShadowViolation>,
}

/// Measure of the set of `ξ ∈ O` whose geodesic from ∞ reaches horosphere
/// level `target` at the cusp `r`, by descending through the cylinders of O.
pub fn shadow_measure_by_descent(field: &Field, r: &Fraction, target: i64) -> QMeasure {
    shadow_measures_by_descent(field, r, &[target]).pop().expect("one target")
}

/// [`shadow_measure_by_descent`] for several targets in one pass.
pub fn shadow_measures_by_descent(field: &Field, r: &Fraction, targets: &[i64]) -> Vec<QMeasure> {
    let q = field.q();
    let mut totals = vec![QMeasure::zero(q); targets.len()];
    // cylinder centers c_0 … c_{k-1}, with the targets still undecided there
    let mut stack: Vec<(Vec<Elem>, Vec<usize>)> = vec![(Vec::new(), (0..targets.len()).collect())];
    while let Some((center, open)) = stack.pop() {
        let k = center.len();
        let vertex = cylinder_vertex(field, &center);
        let level = vertex.horo_level(r);
        let (reached, open): (Vec<usize>, Vec<usize>) = open.into_iter().partition(|&i| level >= targets[i]);
        for i in reached {
            totals[i] = totals[i].add(&QMeasure::ball(q, k as u32));
        }
        // below level k the vertex is off the ray to r (ν(c - r) < k); geodesics
        // leaving it downward only lose height
        if open.is_empty() || level < k as i64 {
            continue;
        }
        for a in field.elements() {
            let mut child = center.clone();
            child.push(a);
            stack.push((child, open.clone()));
        }
    }
    totals
}

/// The vertex `B(c, k)` for the cylinder with center `c_0 + c_1 X^{-1} + …`.
fn cylinder_vertex(field: &Field, center: &[Elem]) -> Vertex {
    let k = center.len();
    let top = k.saturating_sub(1);
    let num = Poly::new(field, (0..k).map(|j| center[top - j]).collect());
    Vertex { center: Fraction { num, den: Poly::monomial(field, 1, top) }, level: k as i64 }
}

/// Exact shadow measures `μ(shadow(P/Q, t))` for all reduced `P/Q` in O with
/// monic `Q`, `deg Q ≤ d_max` and `t ≤ t_max`, compared with `q^{-(2 deg Q + t)}`. Each
/// shadow is measured twice: as the ball of [`shadow`] and by cylinder descent.
pub fn shadow_measure_check(field: &Field, d_max: usize, t_max: u32, budget: u128) -> Result<ShadowReport> {
    let spec = OrbitSpec::full(field);
    let q = field.q();
    let mut report = ShadowReport::default();
    for d in 0..=d_max {
        let reps = orbit_enumerate(&spec, d, budget)?;
        // the translates c + P/Q with deg P = deg Q are in O as well
        let translates = reps.iter().flat_map(|(p, qq)| {
            let shifts: Vec<_> = if d == 0 { vec![0] } else { field.elements().collect() };
            shifts.into_iter().map(move |c| (p + &(&Poly::constant(field, c) * qq), qq.clone()))
        });
        for (p, qq) in translates {
            let depth = cusp_depth_by_matrix(&p, &qq, &Poly::zero(field))?;
            let r = Fraction { num: p.clone(), den: qq.clone() };
            let targets: Vec<i64> = (0..=t_max).map(|t| depth + t as i64).collect();
            let by_descent = shadow_measures_by_descent(field, &r, &targets);
            for (t, descended) in (0..=t_max).zip(by_descent) {
                let expected = QMeasure::ball(q, 2 * d as u32 + t);
                let by_ball = BallSet::from_balls(q, [&shadow(&p, &qq, t)?]).measure();
                report.checked += 1;
                for measure in [by_ball, descended] {
                    if measure != expected {
                        report.violations.push(ShadowViolation {
                            p: p.clone(),
                            q: qq.clone(),
                            t,
                            measure,
                            expected: expected.clone(),
                        });
                    }
                }
            }
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairRatio {
    pub n: u64,
    pub m: u64,
    pub joint: QMeasure,
    pub ratio: BigRational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuasiIndependenceReport {
    pub measures: Vec<(u64, QMeasure)>,
    /// Windows with `μ(A_n) = 0`, left out of the ratio table.
    pub empty: Vec<u64>,
    pub pairs: Vec<PairRatio>,
}

impl QuasiIndependenceReport {
    /// The largest ratio and its pair; ties go to the first pair in order.
    pub fn max(&self) -> Option<&PairRatio> {
        self.pairs.iter().fold(None, |best: Option<&PairRatio>, p| match best {
            Some(b) if b.ratio >= p.ratio => Some(b),
            _ => Some(p),
        })
    }
}

/// `μ(A_n ∩ A_m) / (μ(A_n) μ(A_m))` for all `lo ≤ n < m ≤ hi`.
pub fn quasi_independence_report(
    spec: &OrbitSpec,
    psi: &TestFunction,
    lo: u64,
    hi: u64,
    width: u64,
    budget: u128,
) -> Result<QuasiIndependenceReport> {
    let mut sets = Vec::new();
    let mut measures = Vec::new();
    let mut empty = Vec::new();
    for n in lo..=hi {
        let set = build_a_n(spec, psi, n, width, budget)?;
        let mu = set.measure();
        if mu.is_zero() {
            empty.push(n);
        } else {
            sets.push((n, set));
        }
        measures.push((n, mu));
    }
    let mut pairs = Vec::new();
    for (i, (n, a)) in sets.iter().enumerate() {
        for (m, b) in &sets[i + 1..] {
            let joint = a.intersect(b).measure();
            let ratio = independence_ratio(&joint, &a.measure(), &b.measure()).expect("nonempty windows");
            pairs.push(PairRatio { n: *n, m: *m, joint, ratio });
        }
    }
    Ok(QuasiIndependenceReport { measures, empty, pairs })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BorelCantelliRow {
    pub n: u64,
    pub measure: QMeasure,
    pub cumulative: QMeasure,
    /// `∫_1^{(n+1)N} ψ^δ dt`.
    pub integral: f64,
}

impl BorelCantelliRow {
    pub fn ratio(&self) -> f64 {
        self.cumulative.to_f64() / self.integral
    }
}

/// Partial sums `Σ_{k ≤ n} μ(A_k)` next to the partial integrals of `ψ^δ`.
pub fn borel_cantelli_sums(
    spec: &OrbitSpec,
    psi: &TestFunction,
    n_max: u64,
    width: u64,
    budget: u128,
) -> Result<Vec<BorelCantelliRow>> {
    let q = spec.field().q();
    let mut cumulative = QMeasure::zero(q);
    let mut rows = Vec::new();
    for n in 0..=n_max {
        let measure = window_measure(spec, psi, n, width, budget)?;
        cumulative = cumulative.add(&measure);
        let integral = psi.partial_integral(1.0, ((n + 1) * width) as f64);
        rows.push(BorelCantelliRow { n, measure, cumulative: cumulative.clone(), integral });
    }
    Ok(rows)
}

/// Ratio as a float, for reports.
pub fn ratio_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Exact count of orbit points in window `n`, for reports.
pub fn window_count(spec: &OrbitSpec, n: u64, width: u64) -> Result<BigUint> {
    let mut total = BigUint::zero();
    for d in window_degrees(n * width, width) {
        total += orbit_count_degree(spec, d)?;
    }
    Ok(total)
}
