//! Exact Haar measure on O = F_q[[X^{-1}]] for finite unions of balls.
//!
//! A ball `{g ∈ O : ν(g - c) ≥ k}` is a cylinder fixed by its first `k`
//! coefficients and has measure `q^{-k}`. Unions are kept as a prefix tree in
//! which every full node stands for one canonical ball.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::field::{Elem, Field};
use crate::laurent::{LaurentSeries, SeriesSource};
use crate::poly::Poly;

/// Nonnegative rational `num / q^exp`, normalized so that `q ∤ num` unless `exp = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QMeasure {
    num: BigUint,
    q: u32,
    exp: u32,
}

impl QMeasure {
    pub fn new(num: BigUint, q: u32, exp: u32) -> QMeasure {
        let mut m = QMeasure { num, q, exp };
        m.normalize();
        m
    }

    pub fn zero(q: u32) -> QMeasure {
        QMeasure { num: BigUint::zero(), q, exp: 0 }
    }

    pub fn one(q: u32) -> QMeasure {
        QMeasure { num: BigUint::one(), q, exp: 0 }
    }

    /// `q^{-k}`.
    pub fn ball(q: u32, k: u32) -> QMeasure {
        QMeasure { num: BigUint::one(), q, exp: k }
    }

    fn normalize(&mut self) {
        if self.num.is_zero() {
            self.exp = 0;
            return;
        }
        let q = BigUint::from(self.q);
        while self.exp > 0 && (&self.num % &q).is_zero() {
            self.num /= &q;
            self.exp -= 1;
        }
    }

    pub fn numerator(&self) -> &BigUint {
        &self.num
    }

    pub fn exponent(&self) -> u32 {
        self.exp
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn scaled_to(&self, exp: u32) -> BigUint {
        &self.num * BigUint::from(self.q).pow(exp - self.exp)
    }

    pub fn add(&self, other: &QMeasure) -> QMeasure {
        assert_eq!(self.q, other.q, "measures over different fields");
        let exp = self.exp.max(other.exp);
        QMeasure::new(self.scaled_to(exp) + other.scaled_to(exp), self.q, exp)
    }

    pub fn mul(&self, other: &QMeasure) -> QMeasure {
        assert_eq!(self.q, other.q, "measures over different fields");
        QMeasure::new(&self.num * &other.num, self.q, self.exp + other.exp)
    }

    /// Multiplication by a natural number.
    pub fn times(&self, n: &BigUint) -> QMeasure {
        QMeasure::new(&self.num * n, self.q, self.exp)
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(self.num.clone().into(), BigUint::from(self.q).pow(self.exp).into())
    }

    pub fn to_f64(&self) -> f64 {
        let num = self.num.to_f64().unwrap_or(f64::INFINITY);
        num / (self.q as f64).powi(self.exp as i32)
    }
}

impl PartialOrd for QMeasure {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        if self.q != other.q {
            return None;
        }
        let exp = self.exp.max(other.exp);
        Some(self.scaled_to(exp).cmp(&other.scaled_to(exp)))
    }
}

/// Renders as `"num/q^exp"`.
impl fmt::Display for QMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}^{}", self.num, self.q, self.exp)
    }
}

/// Exact ratio `a / (b c)` of measures, `None` if the denominator vanishes.
pub fn independence_ratio(joint: &QMeasure, a: &QMeasure, b: &QMeasure) -> Option<BigRational> {
    let den = a.mul(b);
    if den.is_zero() {
        return None;
    }
    Some(joint.to_rational() / den.to_rational())
}

/// The ball `{g ∈ O : ν(g - center) ≥ k}` with `k = center.len()`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ball {
    q: u32,
    center: Vec<Elem>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    First,
    Second,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BallRelation {
    Equal,
    /// The named ball is strictly inside the other one.
    Nested(Which),
    Disjoint,
}

impl Ball {
    pub fn new(field: &Field, center: Vec<Elem>) -> Ball {
        debug_assert!(center.iter().all(|&c| (c as u32) < field.q()));
        Ball { q: field.q(), center }
    }

    /// The whole unit ball O.
    pub fn unit(field: &Field) -> Ball {
        Ball { q: field.q(), center: Vec::new() }
    }

    /// Ball of radius `k` around `P/Q`, which must lie in O.
    pub fn around_rational(p: &Poly, q: &Poly, k: u32) -> Result<Ball> {
        if q.is_zero() {
            return Err(Error::DivisionByZeroPoly);
        }
        if !p.is_zero() && p.deg() > q.deg() {
            return Err(Error::OutsideUnitBall);
        }
        let mut source = SeriesSource::rational(p, q)?;
        let center = (0..k as i64).map(|i| source.coeff(i)).collect::<Result<Vec<_>>>()?;
        Ok(Ball { q: p.field().q(), center })
    }

    /// Ball of radius `k` around a series in O known to precision at least `k`.
    pub fn around_series(f: &LaurentSeries, k: u32) -> Result<Ball> {
        if f.valuation().finite().is_some_and(|v| v < 0) {
            return Err(Error::OutsideUnitBall);
        }
        let center = (0..k as i64)
            .map(|i| f.coeff(i).ok_or(Error::PrecisionExhausted { prec: f.prec() }))
            .collect::<Result<Vec<_>>>()?;
        Ok(Ball { q: f.field().q(), center })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn radius(&self) -> u32 {
        self.center.len() as u32
    }

    pub fn center(&self) -> &[Elem] {
        &self.center
    }

    pub fn measure(&self) -> QMeasure {
        QMeasure::ball(self.q, self.radius())
    }

    pub fn relation(&self, other: &Ball) -> Result<BallRelation> {
        if self.q != other.q {
            return Err(Error::FieldMismatch);
        }
        let n = self.center.len().min(other.center.len());
        if self.center[..n] != other.center[..n] {
            return Ok(BallRelation::Disjoint);
        }
        Ok(match self.center.len().cmp(&other.center.len()) {
            Ordering::Equal => BallRelation::Equal,
            Ordering::Less => BallRelation::Nested(Which::Second),
            Ordering::Greater => BallRelation::Nested(Which::First),
        })
    }

    /// Membership of a series, `None` if it is not known to enough precision.
    pub fn contains(&self, f: &LaurentSeries) -> Option<bool> {
        for (i, &c) in self.center.iter().enumerate() {
            if f.coeff(i as i64)? != c {
                return Some(false);
            }
        }
        Some(f.valuation().finite().is_none_or(|v| v >= 0))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Node {
    Empty,
    Full,
    Split(Vec<Node>),
}

impl Node {
    fn canonical(children: Vec<Node>) -> Node {
        if children.iter().all(|c| *c == Node::Empty) {
            Node::Empty
        } else if children.iter().all(|c| *c == Node::Full) {
            Node::Full
        } else {
            Node::Split(children)
        }
    }
}

/// Finite union of balls in canonical disjoint form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BallSet {
    q: u32,
    root: Node,
}

impl BallSet {
    pub fn new(field: &Field) -> BallSet {
        BallSet { q: field.q(), root: Node::Empty }
    }

    pub fn with_order(q: u32) -> BallSet {
        BallSet { q, root: Node::Empty }
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn is_empty(&self) -> bool {
        self.root == Node::Empty
    }

    pub fn insert(&mut self, ball: &Ball) {
        assert_eq!(ball.q, self.q, "ball over a different field");
        fn go(node: &mut Node, center: &[Elem], q: usize) {
            match node {
                Node::Full => {}
                _ if center.is_empty() => *node = Node::Full,
                Node::Empty => {
                    let mut children = vec![Node::Empty; q];
                    go(&mut children[center[0] as usize], &center[1..], q);
                    *node = Node::Split(children);
                }
                Node::Split(children) => {
                    go(&mut children[center[0] as usize], &center[1..], q);
                    if children.iter().all(|c| *c == Node::Full) {
                        *node = Node::Full;
                    }
                }
            }
        }
        go(&mut self.root, &ball.center, self.q as usize);
    }

    pub fn from_balls<'a>(q: u32, balls: impl IntoIterator<Item = &'a Ball>) -> BallSet {
        let mut set = BallSet::with_order(q);
        for b in balls {
            set.insert(b);
        }
        set
    }

    /// The canonical balls, in lexicographic order of centers.
    pub fn balls(&self) -> Vec<Ball> {
        fn go(node: &Node, prefix: &mut Vec<Elem>, q: u32, out: &mut Vec<Ball>) {
            match node {
                Node::Empty => {}
                Node::Full => out.push(Ball { q, center: prefix.clone() }),
                Node::Split(children) => {
                    for (i, c) in children.iter().enumerate() {
                        prefix.push(i as Elem);
                        go(c, prefix, q, out);
                        prefix.pop();
                    }
                }
            }
        }
        let mut out = Vec::new();
        go(&self.root, &mut Vec::new(), self.q, &mut out);
        out
    }

    pub fn len(&self) -> usize {
        fn go(node: &Node) -> usize {
            match node {
                Node::Empty => 0,
                Node::Full => 1,
                Node::Split(children) => children.iter().map(go).sum(),
            }
        }
        go(&self.root)
    }

    fn depth(node: &Node) -> u32 {
        match node {
            Node::Split(children) => 1 + children.iter().map(BallSet::depth).max().unwrap_or(0),
            _ => 0,
        }
    }

    pub fn measure(&self) -> QMeasure {
        let depth = BallSet::depth(&self.root);
        fn go(node: &Node, level: u32, depth: u32, q: &BigUint) -> BigUint {
            match node {
                Node::Empty => BigUint::zero(),
                Node::Full => q.pow(depth - level),
                Node::Split(children) => children.iter().map(|c| go(c, level + 1, depth, q)).sum(),
            }
        }
        let num = go(&self.root, 0, depth, &BigUint::from(self.q));
        QMeasure::new(num, self.q, depth)
    }

    pub fn intersect(&self, other: &BallSet) -> BallSet {
        assert_eq!(self.q, other.q, "ball sets over different fields");
        fn go(a: &Node, b: &Node) -> Node {
            match (a, b) {
                (Node::Empty, _) | (_, Node::Empty) => Node::Empty,
                (Node::Full, x) | (x, Node::Full) => x.clone(),
                (Node::Split(x), Node::Split(y)) => {
                    Node::canonical(x.iter().zip(y).map(|(u, v)| go(u, v)).collect())
                }
            }
        }
        BallSet { q: self.q, root: go(&self.root, &other.root) }
    }

    pub fn union(&self, other: &BallSet) -> BallSet {
        assert_eq!(self.q, other.q, "ball sets over different fields");
        fn go(a: &Node, b: &Node) -> Node {
            match (a, b) {
                (Node::Full, _) | (_, Node::Full) => Node::Full,
                (Node::Empty, x) | (x, Node::Empty) => x.clone(),
                (Node::Split(x), Node::Split(y)) => {
                    Node::canonical(x.iter().zip(y).map(|(u, v)| go(u, v)).collect())
                }
            }
        }
        BallSet { q: self.q, root: go(&self.root, &other.root) }
    }

    /// Membership of a series, `None` if it is not known to enough precision.
    pub fn contains(&self, f: &LaurentSeries) -> Option<bool> {
        if f.valuation().finite().is_some_and(|v| v < 0) {
            return Some(false);
        }
        let mut node = &self.root;
        let mut i = 0;
        loop {
            match node {
                Node::Empty => return Some(false),
                Node::Full => return Some(true),
                Node::Split(children) => {
                    node = &children[f.coeff(i)? as usize];
                    i += 1;
                }
            }
        }
    }
}
