//! Test functions `F(x) = C e^{-λx} x^{-a} (ln x)^{-b}`, optionally capped at 1.
//!
//! On the φ side the argument is `|Q|_∞ = q^{deg Q}` and a pair `P/Q` is a
//! solution when `|f - P/Q|_∞ ≤ φ(|Q|) / |Q|^2`. On the ψ side the argument is
//! the depth `D = 2 deg Q` and the condition reads `ν(f - P/Q) ≥ D - ln ψ(D)`.
//! Both give the same integer threshold, see [`TestFunction::radius`].

use crate::error::{Error, Result};

/// Which argument a test function takes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    /// Argument `|Q|_∞`.
    Phi,
    /// Argument `D = 2 deg Q`.
    Psi,
}

const GUARD: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntegralClass {
    Converges,
    Diverges,
}

/// `log_q φ(q^d)`, exact when it is an integer by construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LogValue {
    Exact(i64),
    Approx(f64),
}

impl LogValue {
    pub fn as_f64(self) -> f64 {
        match self {
            LogValue::Exact(v) => v as f64,
            LogValue::Approx(v) => v,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestFunction {
    side: Side,
    q: u32,
    c: f64,
    lambda: f64,
    a: f64,
    b: f64,
    t0: f64,
    cap: bool,
    /// The φ this ψ was translated from, kept for exact thresholds.
    origin: Option<Box<TestFunction>>,
}

impl TestFunction {
    #[allow(clippy::too_many_arguments)]
    pub fn new(side: Side, q: u32, c: f64, lambda: f64, a: f64, b: f64, t0: f64, cap: bool) -> Result<TestFunction> {
        let params = [c, lambda, a, b, t0];
        if params.iter().any(|x| !x.is_finite()) {
            return Err(Error::UnsupportedFamily("parameters must be finite".into()));
        }
        if c <= 0.0 {
            return Err(Error::UnsupportedFamily(format!("C = {c} must be positive")));
        }
        if t0 <= 1.0 {
            return Err(Error::UnsupportedFamily(format!("t0 = {t0} must exceed 1")));
        }
        if q < 2 {
            return Err(Error::InvalidParameter(format!("q = {q}")));
        }
        Ok(TestFunction { side, q, c, lambda, a, b, t0, cap, origin: None })
    }

    /// Capped φ with `λ = 0` and `t0 = q`.
    pub fn phi(q: u32, c: f64, a: f64, b: f64) -> Result<TestFunction> {
        TestFunction::new(Side::Phi, q, c, 0.0, a, b, q as f64, true)
    }

    /// Named φ presets: `divlog`, `convlog2`, `power`, `const-half`.
    pub fn preset(name: &str, q: u32) -> Result<TestFunction> {
        match name {
            "divlog" => TestFunction::phi(q, 1.0, 0.0, 1.0),
            "convlog2" => TestFunction::phi(q, 1.0, 0.0, 2.0),
            "power" => TestFunction::phi(q, 1.0, 1.0, 0.0),
            "const-half" => TestFunction::phi(q, 0.5, 0.0, 0.0),
            other => Err(Error::UnsupportedFamily(format!("unknown preset {other:?}"))),
        }
    }

    pub const PRESETS: [&'static str; 4] = ["divlog", "convlog2", "power", "const-half"];

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn is_capped(&self) -> bool {
        self.cap
    }

    /// `(C, λ, a, b, t0)`.
    pub fn params(&self) -> (f64, f64, f64, f64, f64) {
        (self.c, self.lambda, self.a, self.b, self.t0)
    }

    pub fn with_cap(mut self, cap: bool) -> TestFunction {
        self.cap = cap;
        if let Some(o) = self.origin.as_mut() {
            o.cap = cap;
        }
        self
    }

    fn raw_ln(&self, x: f64) -> f64 {
        let x = x.max(self.t0);
        let mut v = self.c.ln() - self.lambda * x - self.a * x.ln();
        if self.b != 0.0 {
            v -= self.b * x.ln().ln();
        }
        v
    }

    /// `ln F(x)`; arguments below `t0` are evaluated at `t0`.
    pub fn ln_value(&self, x: f64) -> f64 {
        let v = self.raw_ln(x);
        if self.cap {
            v.min(0.0)
        } else {
            v
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        self.ln_value(x).exp()
    }

    /// `log_q φ(q^d)` for a φ-side function.
    fn log_q_at_power(&self, d: u32) -> LogValue {
        debug_assert_eq!(self.side, Side::Phi);
        let lnq = (self.q as f64).ln();
        let x = (self.q as f64).powi(d as i32);
        let raw = self.raw_ln(x);
        if self.cap && raw >= 0.0 {
            return LogValue::Exact(0);
        }
        let x_exp = if x >= self.t0 { Some(d as i64) } else { exact_log(self.t0, self.q) };
        if self.lambda == 0.0 && self.b == 0.0 && self.a.fract() == 0.0 {
            if let (Some(j), Some(e)) = (exact_log(self.c, self.q), x_exp) {
                return LogValue::Exact(j - self.a as i64 * e);
            }
        }
        LogValue::Approx(raw / lnq)
    }

    /// The integer threshold for degree `d`: `ν(f - P/Q) ≥ radius` defines a
    /// solution with `deg Q = d`. It equals `ceil(2d - log_q φ(q^d))` and
    /// `ceil(D - ln ψ(D))` at `D = 2d`, floored at 0.
    pub fn radius(&self, d: u32) -> Result<u32> {
        let depth = 2 * d as i64;
        let log = match (self.side, &self.origin) {
            (Side::Phi, _) => self.log_q_at_power(d),
            (Side::Psi, Some(phi)) => phi.log_q_at_power(d),
            (Side::Psi, None) => {
                let raw = self.raw_ln(depth as f64);
                if self.cap && raw >= 0.0 {
                    LogValue::Exact(0)
                } else {
                    LogValue::Approx(raw)
                }
            }
        };
        let r = match log {
            LogValue::Exact(l) => depth - l,
            LogValue::Approx(l) => {
                let v = depth as f64 - l;
                if (v - v.round()).abs() < GUARD {
                    return Err(Error::ThresholdOnBoundary { argument: depth as f64, value: v });
                }
                v.ceil() as i64
            }
        };
        Ok(r.max(0) as u32)
    }

    /// Whether degree `d` is in the strict regime `φ(q^d) < 1`, i.e. the
    /// threshold exceeds `2d`.
    pub fn is_strict(&self, d: u32) -> Result<bool> {
        Ok(self.radius(d)? > 2 * d)
    }

    /// `ψ(t) = φ(q^{t/2})^{1/ln q}` in closed form.
    pub fn psi_from_phi(&self) -> Result<TestFunction> {
        if self.side != Side::Phi {
            return Err(Error::UnsupportedFamily("expected a function on the φ side".into()));
        }
        if self.lambda != 0.0 {
            return Err(Error::UnsupportedFamily("φ with an exponential factor has no closed-form ψ in the family".into()));
        }
        let lnq = (self.q as f64).ln();
        let c = (self.c.ln() / lnq - self.b / lnq * (lnq / 2.0).ln()).exp();
        let t0 = 2.0 * self.t0.ln() / lnq;
        let mut psi = TestFunction::new(Side::Psi, self.q, c, self.a / 2.0, self.b / lnq, 0.0, t0.max(1.0 + 1e-12), self.cap)?;
        psi.origin = Some(Box::new(self.clone()));
        Ok(psi)
    }

    /// Convergence of `∫ φ(t)/t dt` (φ side) or `∫ ψ(t)^δ dt`, `δ = ln q` (ψ side).
    pub fn classify(&self) -> Result<IntegralClass> {
        use IntegralClass::*;
        let (lambda, a_eff, b_eff) = match self.side {
            // t^{-a-1} (ln t)^{-b}: compare with the borderline 1/t
            Side::Phi => (self.lambda, self.a + 1.0, self.b),
            Side::Psi => {
                let delta = (self.q as f64).ln();
                (self.lambda * delta, self.a * delta, self.b * delta)
            }
        };
        if lambda.abs() > GUARD {
            return Ok(if lambda > 0.0 { Converges } else { Diverges });
        }
        if (a_eff - 1.0).abs() > GUARD {
            return Ok(if a_eff > 1.0 { Converges } else { Diverges });
        }
        Ok(if b_eff > 1.0 + GUARD { Converges } else { Diverges })
    }

    /// `∫_lo^hi ψ(t)^δ dt` for ψ-side functions, `∫_lo^hi φ(t)/t dt` for φ-side.
    pub fn partial_integral(&self, lo: f64, hi: f64) -> f64 {
        let delta = (self.q as f64).ln();
        let integrand = |t: f64| match self.side {
            Side::Psi => (delta * self.ln_value(t)).exp(),
            Side::Phi => self.value(t) / t,
        };
        adaptive_simpson(&integrand, lo, hi, 1e-10, 40)
    }

    /// Compact description such as `phi: C=1 lambda=0 a=0 b=1 t0=2 capped`.
    pub fn describe(&self) -> String {
        let side = match self.side {
            Side::Phi => "phi",
            Side::Psi => "psi",
        };
        format!(
            "{side}: C={} lambda={} a={} b={} t0={}{}",
            self.c,
            self.lambda,
            self.a,
            self.b,
            self.t0,
            if self.cap { " capped" } else { "" }
        )
    }
}

/// `j` with `c = q^j` exactly, for small `|j|`.
fn exact_log(c: f64, q: u32) -> Option<i64> {
    (-64i32..=64).find(|&j| (q as f64).powi(j) == c).map(|j| j as i64)
}

fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, eps: f64, depth: u32) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn go(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, eps: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * eps {
            return left + right + (left + right - whole) / 15.0;
        }
        go(f, a, m, fa, flm, fm, left, eps / 2.0, depth - 1) + go(f, m, b, fm, frm, fb, right, eps / 2.0, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    go(f, a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), eps, depth)
}
