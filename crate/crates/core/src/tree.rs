//! Geometry of the Bruhat–Tits tree of SL_2 over F_q((X^{-1})) seen from the
//! cusp at ∞.
//!
//! Vertices are the balls `B(c, k) = {x : ν(x - c) ≥ k}`, `k ∈ ℤ`; the base
//! vertex is `O = B(0, 0)`. With the normalizations fixed in [`Conventions`]
//! the boundary distance is `e^{-ν(f - f')}` and the horoball at a reduced
//! `P/Q` sits at depth `2 deg Q` below the standard horoball at ∞.

use std::fmt::Write as _;

use crate::contfrac::{CFExpansion, CfStatus};
use crate::error::{Error, Result};
use crate::laurent::{LaurentSeries, SeriesSource};
use crate::measure::Ball;
use crate::poly::Poly;

/// Normalization constants: multiplicative constant of the boundary distance
/// (`1`) and additive constant of the depth (`0`). The critical exponent is
/// `log q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Conventions;

impl Conventions {
    pub const DISTANCE_CONSTANT: i64 = 1;
    pub const DEPTH_SHIFT: i64 = 0;

    /// `δ = log q`, for rendering only.
    pub fn delta(q: u32) -> f64 {
        (q as f64).ln()
    }
}

/// `ν(f - g)` for truncated series.
pub fn hamenstadt_val(f: &LaurentSeries, g: &LaurentSeries) -> Result<i64> {
    let d = f.sub(g)?;
    d.valuation().finite().ok_or(Error::PrecisionExhausted { prec: d.prec() })
}

/// `ν(f - g)` for sources, extending both up to `max_prec` if needed.
pub fn hamenstadt_val_sources(f: &mut SeriesSource, g: &mut SeriesSource, max_prec: i64) -> Result<i64> {
    if let (Some((a, b)), Some((c, d))) = (f.as_rational(), g.as_rational()) {
        let num = &(a * d) - &(c * b);
        if num.is_zero() {
            return Err(Error::EqualSeries);
        }
        return Ok((b.deg() + d.deg()) as i64 - num.deg() as i64);
    }
    let mut prec = 16.min(max_prec).max(1);
    loop {
        let x = f.series(prec.min(f.max_prec().unwrap_or(i64::MAX)))?;
        let y = g.series(prec.min(g.max_prec().unwrap_or(i64::MAX)))?;
        match hamenstadt_val(&x, &y) {
            Ok(v) => return Ok(v),
            Err(Error::PrecisionExhausted { prec: reached }) if prec < max_prec && reached == prec => {
                prec = (2 * prec).min(max_prec);
            }
            Err(e) => return Err(e),
        }
    }
}

/// Depth `D(P/Q) = 2 deg Q` of the horoball at a reduced fraction.
pub fn cusp_depth(p: &Poly, q: &Poly) -> Result<u64> {
    if q.is_zero() {
        return Err(Error::DivisionByZeroPoly);
    }
    if !p.coprime(q) {
        return Err(Error::NotReduced);
    }
    Ok(2 * q.deg() as u64)
}

/// `[[a, b], [c, d]]` over F_q[X] with determinant 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SL2Elt {
    a: Poly,
    b: Poly,
    c: Poly,
    d: Poly,
}

impl SL2Elt {
    pub fn new(a: Poly, b: Poly, c: Poly, d: Poly) -> Result<SL2Elt> {
        let det = &(&a * &d) - &(&b * &c);
        if !det.is_one() {
            return Err(Error::NotUnimodular);
        }
        Ok(SL2Elt { a, b, c, d })
    }

    pub fn identity(field: &crate::field::Field) -> SL2Elt {
        SL2Elt {
            a: Poly::one(field),
            b: Poly::zero(field),
            c: Poly::zero(field),
            d: Poly::one(field),
        }
    }

    pub fn entries(&self) -> [&Poly; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn inverse(&self) -> SL2Elt {
        SL2Elt { a: self.d.clone(), b: -&self.b, c: -&self.c, d: self.a.clone() }
    }

    pub fn mul(&self, o: &SL2Elt) -> SL2Elt {
        SL2Elt {
            a: &(&self.a * &o.a) + &(&self.b * &o.c),
            b: &(&self.a * &o.b) + &(&self.b * &o.d),
            c: &(&self.c * &o.a) + &(&self.d * &o.c),
            d: &(&self.c * &o.b) + &(&self.d * &o.d),
        }
    }

    /// A matrix `[[P, b], [Q, d]]` sending ∞ to the reduced fraction `P/Q`.
    pub fn sending_infinity_to(p: &Poly, q: &Poly) -> Result<SL2Elt> {
        let (g, u, v) = p.gcd_ext(q)?;
        if !g.is_one() {
            return Err(Error::NotReduced);
        }
        // u P + v Q = 1, so P u - (-v) Q = 1
        SL2Elt::new(p.clone(), -&v, q.clone(), u)
    }
}

/// `d(x_0, γ x_0) = 2 max(0, max deg of the entries)`.
pub fn translation_distance(g: &SL2Elt) -> u64 {
    2 * g.entries().iter().filter(|e| !e.is_zero()).map(|e| e.deg() as u64).max().unwrap_or(0)
}

/// A reduced fraction viewed as a point of the boundary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fraction {
    pub num: Poly,
    pub den: Poly,
}

impl Fraction {
    /// `ν(self - other)`, `None` when the two are equal.
    pub fn nu_diff(&self, other: &Fraction) -> Option<i64> {
        let num = &(&self.num * &other.den) - &(&other.num * &self.den);
        (!num.is_zero()).then(|| (self.den.deg() + other.den.deg()) as i64 - num.deg() as i64)
    }
}

/// The vertex `B(center, level)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertex {
    pub center: Fraction,
    pub level: i64,
}

impl Vertex {
    pub fn base(field: &crate::field::Field) -> Vertex {
        Vertex { center: Fraction { num: Poly::zero(field), den: Poly::one(field) }, level: 0 }
    }

    /// Tree distance: both balls climb to their join `B(c, min(k, k', ν(c - c')))`.
    pub fn distance(&self, other: &Vertex) -> u64 {
        let nu = self.center.nu_diff(&other.center).unwrap_or(i64::MAX);
        let m = self.level.min(other.level).min(nu);
        ((self.level - m) + (other.level - m)) as u64
    }

    /// Busemann depth of the vertex toward a boundary point `r`: the level of
    /// the horosphere at `r` through this vertex.
    pub fn horo_level(&self, r: &Fraction) -> i64 {
        match self.center.nu_diff(r) {
            Some(m) if m < self.level => 2 * m - self.level,
            _ => self.level,
        }
    }
}

/// `γ x_0` computed by the action of `γ` on the ball `O`.
pub fn base_vertex_image(g: &SL2Elt) -> Vertex {
    let pole_outside = g.c.is_zero() || (!g.d.is_zero() && g.d.deg() > g.c.deg());
    if pole_outside {
        Vertex { center: Fraction { num: g.b.clone(), den: g.d.clone() }, level: 2 * g.d.deg() as i64 }
    } else {
        Vertex { center: Fraction { num: g.a.clone(), den: g.c.clone() }, level: 2 * g.c.deg() as i64 }
    }
}

/// `D(P/Q)` read off from the horoball `γ H_∞` for some `γ` with `γ∞ = P/Q`,
/// independent of the closed form.
pub fn cusp_depth_by_matrix(p: &Poly, q: &Poly, twist: &Poly) -> Result<i64> {
    let g = SL2Elt::sending_infinity_to(p, q)?;
    // right translation by [[1, t], [0, 1]] fixes γ∞ and moves γ x_0 along the horosphere
    let t = SL2Elt::new(Poly::one(p.field()), twist.clone(), Poly::zero(p.field()), Poly::one(p.field()))?;
    let v = base_vertex_image(&g.mul(&t));
    Ok(v.horo_level(&Fraction { num: p.clone(), den: q.clone() }))
}

/// One excursion of the geodesic from ∞ to `f` into the horoball at `P_n/Q_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tent {
    pub p: Poly,
    pub q: Poly,
    pub t_enter: u64,
    /// `deg a_{n+1}`; `None` for the final tent of a rational point.
    pub peak: Option<u64>,
    pub t_exit: Option<u64>,
}

impl Tent {
    pub fn q_degree(&self) -> u64 {
        self.t_enter / 2
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeightProfile {
    pub tents: Vec<Tent>,
}

pub fn height_profile(exp: &CFExpansion) -> Result<HeightProfile> {
    let terminated = exp.status == CfStatus::TerminatedRational;
    if exp.is_empty() && !terminated {
        return Err(Error::NoCertifiedDigits);
    }
    let mut tents = Vec::with_capacity(exp.convergents.len());
    for (n, (p, q)) in exp.convergents.iter().enumerate() {
        let t_enter = 2 * q.deg() as u64;
        let next = exp.convergents.get(n + 1).map(|(_, q1)| 2 * q1.deg() as u64);
        if next.is_none() && !terminated {
            break;
        }
        tents.push(Tent {
            p: p.clone(),
            q: q.clone(),
            t_enter,
            peak: next.map(|t| (t - t_enter) / 2),
            t_exit: next,
        });
    }
    Ok(HeightProfile { tents })
}

impl HeightProfile {
    /// Height `h(t)` at time `t` along the geodesic.
    pub fn height(&self, t: u64) -> Option<u64> {
        let tent = self.tents.iter().find(|x| x.t_enter <= t && x.t_exit.is_none_or(|e| t <= e))?;
        let up = t - tent.t_enter;
        Some(match tent.t_exit {
            Some(e) => up.min(e - t),
            None => up,
        })
    }

    /// Rows `t_enter,peak,t_exit,q_degree`; unbounded values print as `inf`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t_enter,peak,t_exit,q_degree\n");
        let opt = |v: Option<u64>| v.map_or("inf".to_string(), |x| x.to_string());
        for t in &self.tents {
            let _ = writeln!(out, "{},{},{},{}", t.t_enter, opt(t.peak), opt(t.t_exit), t.q_degree());
        }
        out
    }
}

/// `max peak_n / ln t_enter_n` over the first `n_max` tents with `t_enter ≥ 2`,
/// computed from digit degrees `deg a_1, deg a_2, …`.
pub fn log_ratio_max(degrees: &[u32], n_max: usize) -> Option<f64> {
    let mut deg_q = 0u64;
    let mut best: Option<f64> = None;
    for (n, &k) in degrees.iter().enumerate().take(n_max) {
        // tent n enters at 2 deg Q_n and peaks at deg a_{n+1}
        if n > 0 && deg_q >= 1 {
            let r = k as f64 / ((2 * deg_q) as f64).ln();
            best = Some(best.map_or(r, |b| b.max(r)));
        }
        deg_q += k as u64;
    }
    best
}

/// The shadow of the horoball at `P/Q` shrunk by `t`: the ball of radius `D + t`.
pub fn shadow(p: &Poly, q: &Poly, t: u32) -> Result<Ball> {
    let depth = cusp_depth(p, q)?;
    Ball::around_rational(p, q, depth as u32 + t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contfrac::{cf_expand, cf_expand_rational, separation, Separation};
    use crate::field::{Elem, Field};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn f2() -> Field {
        Field::with_order(2).unwrap()
    }

    fn p(field: &Field, s: &str) -> Poly {
        Poly::parse(field, s).unwrap()
    }

    #[test]
    fn hamenstadt_examples() {
        let f = f2();
        let zero = LaurentSeries::zero(&f, 10);
        let a = LaurentSeries::from_coeffs(&f, 0, &[0, 1, 0, 0, 0, 0]);
        let b = LaurentSeries::from_coeffs(&f, 0, &[0, 1, 0, 1, 0, 0]);
        assert_eq!(hamenstadt_val(&zero, &a).unwrap(), 1);
        assert_eq!(hamenstadt_val(&a, &b).unwrap(), 3);
        assert_eq!(hamenstadt_val(&zero, &b).unwrap(), 1);
        assert!(matches!(hamenstadt_val(&a, &a), Err(Error::PrecisionExhausted { .. })));
        let mut r = SeriesSource::rational(&p(&f, "1"), &p(&f, "X")).unwrap();
        let mut s = SeriesSource::rational(&p(&f, "X"), &p(&f, "X^2")).unwrap();
        assert_eq!(hamenstadt_val_sources(&mut r, &mut s, 100).err(), Some(Error::EqualSeries));
        let mut x = SeriesSource::random(&f, 1, 1);
        let mut y = SeriesSource::random(&f, 1, 1);
        assert!(matches!(hamenstadt_val_sources(&mut x, &mut y, 64), Err(Error::PrecisionExhausted { .. })));
    }

    #[test]
    fn cusp_depth_examples() {
        let f = f2();
        assert_eq!(cusp_depth(&p(&f, "1"), &p(&f, "X")).unwrap(), 2);
        assert_eq!(cusp_depth(&p(&f, "1"), &p(&f, "1")).unwrap(), 0);
        assert_eq!(cusp_depth(&p(&f, "1"), &p(&f, "X^2+X")).unwrap(), 4);
        assert_eq!(cusp_depth(&p(&f, "X"), &p(&f, "X^2")).err(), Some(Error::NotReduced));
        for (num, den) in [("1", "X"), ("1", "X^2+X"), ("X", "X^3+X+1")] {
            for twist in ["X", "X^2+1", "X^5"] {
                let d = cusp_depth_by_matrix(&p(&f, num), &p(&f, den), &p(&f, twist)).unwrap();
                assert_eq!(d as u64, cusp_depth(&p(&f, num), &p(&f, den)).unwrap());
            }
        }
    }

    fn random_poly(f: &Field, rng: &mut ChaCha8Rng, max_deg: usize) -> Poly {
        let d = rng.gen_range(0..=max_deg);
        Poly::new(f, (0..=d).map(|_| rng.gen_range(0..f.q()) as Elem).collect())
    }

    fn random_sl2(f: &Field, rng: &mut ChaCha8Rng) -> SL2Elt {
        let mut g = SL2Elt::identity(f);
        for _ in 0..rng.gen_range(0..4) {
            let t = random_poly(f, rng, 2);
            let (one, zero) = (Poly::one(f), Poly::zero(f));
            let e = if rng.gen_bool(0.5) {
                SL2Elt::new(one.clone(), t, zero, one).unwrap()
            } else {
                SL2Elt::new(one.clone(), zero, t, one).unwrap()
            };
            g = g.mul(&e);
        }
        let u = rng.gen_range(1..f.q()) as Elem;
        let diag = SL2Elt::new(Poly::constant(f, u), Poly::zero(f), Poly::zero(f), Poly::constant(f, f.inv(u).unwrap()));
        g.mul(&diag.unwrap())
    }

    #[test]
    fn translation_distance_examples() {
        let f = f2();
        assert_eq!(translation_distance(&SL2Elt::identity(&f)), 0);
        let g = SL2Elt::new(p(&f, "1"), p(&f, "X^2"), p(&f, "0"), p(&f, "1")).unwrap();
        assert_eq!(translation_distance(&g), 4);
        let f3 = Field::with_order(3).unwrap();
        let d = SL2Elt::new(p(&f3, "2"), p(&f3, "0"), p(&f3, "0"), p(&f3, "2")).unwrap();
        assert_eq!(translation_distance(&d), 0);
        assert_eq!(SL2Elt::new(p(&f, "X"), p(&f, "0"), p(&f, "0"), p(&f, "1")).err(), Some(Error::NotUnimodular));
    }

    #[test]
    fn translation_distance_matches_ball_geometry() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for q in [2u32, 3, 4] {
            let f = Field::with_order(q).unwrap();
            let base = Vertex::base(&f);
            for _ in 0..300 {
                let g = random_sl2(&f, &mut rng);
                let h = random_sl2(&f, &mut rng);
                let d = translation_distance(&g);
                assert_eq!(d, base.distance(&base_vertex_image(&g)), "{g:?}");
                assert_eq!(d, translation_distance(&g.inverse()));
                assert!(translation_distance(&g.mul(&h)) <= d + translation_distance(&h));
            }
        }
    }

    #[test]
    fn height_profile_examples() {
        let f = f2();
        let mut s = SeriesSource::rational(&p(&f, "X"), &p(&f, "X^2+1")).unwrap();
        let exp = cf_expand(&mut s, 10);
        assert_eq!(exp.digits.iter().map(|d| d.to_string()).collect::<Vec<_>>(), ["0", "X", "X"]);
        let prof = height_profile(&exp).unwrap();
        let peaks: Vec<_> = prof.tents.iter().map(|t| t.peak).collect();
        let exits: Vec<_> = prof.tents.iter().map(|t| t.t_exit).collect();
        assert_eq!(peaks, [Some(1), Some(1), None]);
        assert_eq!(exits, [Some(2), Some(4), None]);
        assert_eq!(prof.tents[0].t_enter, 0);
        assert_eq!(prof.to_csv(), "t_enter,peak,t_exit,q_degree\n0,1,2,0\n2,1,4,1\n4,inf,inf,2\n");
        let e = cf_expand_rational(&p(&f, "1"), &p(&f, "1")).unwrap();
        assert_eq!(height_profile(&e).unwrap().tents.len(), 1);
        let fixed = LaurentSeries::from_coeffs(&f, 0, &[0]);
        let e = crate::contfrac::cf_expand_series(&fixed, 5);
        assert_eq!(height_profile(&e).err(), Some(Error::NoCertifiedDigits));
    }

    #[test]
    fn excursion_identity_and_concatenation() {
        for q in [2u32, 3] {
            let f = Field::with_order(q).unwrap();
            for seed in 0..30 {
                let mut s = SeriesSource::random(&f, seed, 7);
                s.ensure(80).unwrap();
                let exp = cf_expand(&mut s, usize::MAX);
                let prof = height_profile(&exp).unwrap();
                for w in prof.tents.windows(2) {
                    assert_eq!(w[0].t_exit, Some(w[1].t_enter));
                }
                for t in &prof.tents {
                    let (enter, exit) = (t.t_enter, t.t_exit.unwrap());
                    assert_eq!(t.peak.unwrap() * 2, exit - enter);
                    assert_eq!(prof.height(enter), Some(0));
                    assert_eq!(prof.height(enter + t.peak.unwrap()), Some(t.peak.unwrap()));
                    let nu = separation(&mut s, &t.p, &t.q, 80).unwrap();
                    let depth = cusp_depth(&t.p, &t.q).unwrap();
                    assert_eq!(nu, Separation::Exact((depth + t.peak.unwrap()) as i64));
                }
            }
        }
    }

    #[test]
    fn log_ratio_uses_tents_past_the_first() {
        // degrees 1, 3: tent 1 enters at 2 and peaks at 3
        let r = log_ratio_max(&[1, 3], 10).unwrap();
        assert!((r - 3.0 / 2f64.ln()).abs() < 1e-12);
        assert_eq!(log_ratio_max(&[5], 10), None);
    }

    #[test]
    fn shadow_examples() {
        let f = f2();
        let b = shadow(&p(&f, "1"), &p(&f, "X"), 0).unwrap();
        assert_eq!((b.radius(), b.center()), (2, &[0, 1][..]));
        assert_eq!(shadow(&p(&f, "1"), &p(&f, "1"), 0).unwrap().radius(), 0);
        assert_eq!(shadow(&p(&f, "1"), &p(&f, "X"), 3).unwrap().radius(), 5);
        assert_eq!(shadow(&p(&f, "X"), &p(&f, "X"), 0).err(), Some(Error::NotReduced));
        let a = shadow(&p(&f, "1"), &p(&f, "X^2+X+1"), 1).unwrap();
        assert_eq!(a.measure().to_string(), "1/2^5");
    }
}
