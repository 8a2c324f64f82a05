//! Exact rational plane geometry for axis-aligned cells.
//!
//! All predicates used by partitions are decided here with `Ratio<i128>`
//! arithmetic; no floating point enters any geometric decision. Depth caps on
//! the built-in families keep every intermediate product far away from i128
//! overflow (coordinates carry denominators up to 3^16, comparisons cross
//! multiply two squared values, which stays below 2^110).

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use std::fmt;

/// Exact rational scalar.
pub type Q = Ratio<i128>;

pub fn q(n: i128, d: i128) -> Q {
    Q::new(n, d)
}

pub fn q0() -> Q {
    Q::zero()
}

pub fn q1() -> Q {
    Q::one()
}

/// Renders a rational as `num/den` (or `num` when integral).
pub fn q_str(v: &Q) -> String {
    if v.denom() == &1 {
        format!("{}", v.numer())
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

pub fn q_to_f64(v: &Q) -> f64 {
    *v.numer() as f64 / *v.denom() as f64
}

/// Parses `num`, `num/den` or a plain decimal like `0.25`.
pub fn q_parse(s: &str) -> Option<Q> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: i128 = n.trim().parse().ok()?;
        let d: i128 = d.trim().parse().ok()?;
        if d == 0 {
            return None;
        }
        return Some(Q::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.trim_start().starts_with('-');
        let i: i128 = if int.is_empty() || int == "-" { 0 } else { int.parse().ok()? };
        let fd: u32 = frac.len() as u32;
        if fd > 30 {
            return None;
        }
        let f: i128 = if frac.is_empty() { 0 } else { frac.parse().ok()? };
        let den = 10_i128.checked_pow(fd)?;
        let mag = i.abs() * den + f;
        return Some(Q::new(if neg { -mag } else { mag }, den));
    }
    let n: i128 = s.parse().ok()?;
    Some(Q::from_integer(n))
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub x: Q,
    pub y: Q,
}

impl Point {
    pub fn new(x: Q, y: Q) -> Self {
        Point { x, y }
    }

    /// Squared Euclidean distance, exact.
    pub fn dist2(&self, other: &Point) -> Q {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", q_str(&self.x), q_str(&self.y))
    }
}

/// Closed axis-aligned rectangle; degenerate (segment, point) allowed.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Rect {
    pub x0: Q,
    pub x1: Q,
    pub y0: Q,
    pub y1: Q,
}

impl fmt::Debug for Rect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{},{}]x[{},{}]",
            q_str(&self.x0),
            q_str(&self.x1),
            q_str(&self.y0),
            q_str(&self.y1)
        )
    }
}

impl Rect {
    pub fn new(x0: Q, x1: Q, y0: Q, y1: Q) -> Self {
        debug_assert!(x0 <= x1 && y0 <= y1);
        Rect { x0, x1, y0, y1 }
    }

    pub fn unit() -> Self {
        Rect::new(q0(), q1(), q0(), q1())
    }

    pub fn is_empty_marker(&self) -> bool {
        self.x0 > self.x1 || self.y0 > self.y1
    }

    pub fn contains_point(&self, p: &Point) -> bool {
        self.x0 <= p.x && p.x <= self.x1 && self.y0 <= p.y && p.y <= self.y1
    }

    pub fn contains_rect(&self, other: &Rect) -> bool {
        self.x0 <= other.x0 && other.x1 <= self.x1 && self.y0 <= other.y0 && other.y1 <= self.y1
    }

    /// Closed intersection; `None` when disjoint.
    pub fn intersect(&self, other: &Rect) -> Option<Rect> {
        let x0 = self.x0.max(other.x0);
        let x1 = self.x1.min(other.x1);
        let y0 = self.y0.max(other.y0);
        let y1 = self.y1.min(other.y1);
        if x0 <= x1 && y0 <= y1 {
            Some(Rect { x0, x1, y0, y1 })
        } else {
            None
        }
    }

    pub fn touches(&self, other: &Rect) -> bool {
        self.intersect(other).is_some()
    }

    /// Dimension of the rectangle as a set: 0 point, 1 segment, 2 full.
    pub fn dim(&self) -> u8 {
        let dx = self.x0 < self.x1;
        let dy = self.y0 < self.y1;
        match (dx, dy) {
            (true, true) => 2,
            (false, false) => 0,
            _ => 1,
        }
    }

    pub fn width(&self) -> Q {
        self.x1 - self.x0
    }

    pub fn height(&self) -> Q {
        self.y1 - self.y0
    }

    /// Squared diameter (diagonal), exact.
    pub fn diam2(&self) -> Q {
        let w = self.width();
        let h = self.height();
        w * w + h * h
    }

    pub fn corners(&self) -> [Point; 4] {
        [
            Point::new(self.x0, self.y0),
            Point::new(self.x1, self.y0),
            Point::new(self.x1, self.y1),
            Point::new(self.x0, self.y1),
        ]
    }

    pub fn center(&self) -> Point {
        let two = Q::from_integer(2);
        Point::new((self.x0 + self.x1) / two, (self.y0 + self.y1) / two)
    }
}

/// Minimum squared Euclidean distance between two closed rectangles.
pub fn rect_dist2(a: &Rect, b: &Rect) -> Q {
    let dx = if a.x1 < b.x0 {
        b.x0 - a.x1
    } else if b.x1 < a.x0 {
        a.x0 - b.x1
    } else {
        q0()
    };
    let dy = if a.y1 < b.y0 {
        b.y0 - a.y1
    } else if b.y1 < a.y0 {
        a.y0 - b.y1
    } else {
        q0()
    };
    dx * dx + dy * dy
}

/// A removed rectangle: the closed rectangle together with the semantics of
/// its interior *relative to the ambient unit square*. Where a side lies on
/// the boundary of the unit square, the relative interior reaches that side.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Hole {
    pub rect: Rect,
}

impl Hole {
    pub fn new(rect: Rect) -> Self {
        Hole { rect }
    }

    fn x_lo_open(&self) -> bool {
        self.rect.x0 > q0()
    }
    fn x_hi_open(&self) -> bool {
        self.rect.x1 < q1()
    }
    // A y-degenerate hole lives on the 1-dimensional ambient segment, where
    // the y-coordinate carries no interior/boundary distinction.
    fn y_degenerate(&self) -> bool {
        self.rect.y0 == self.rect.y1
    }
    fn y_lo_open(&self) -> bool {
        !self.y_degenerate() && self.rect.y0 > q0()
    }
    fn y_hi_open(&self) -> bool {
        !self.y_degenerate() && self.rect.y1 < q1()
    }

    /// Is `p` in the relative interior?
    pub fn interior_contains_point(&self, p: &Point) -> bool {
        let r = &self.rect;
        let x_ok = (p.x > r.x0 || (!self.x_lo_open() && p.x >= r.x0))
            && (p.x < r.x1 || (!self.x_hi_open() && p.x <= r.x1));
        let y_ok = (p.y > r.y0 || (!self.y_lo_open() && p.y >= r.y0))
            && (p.y < r.y1 || (!self.y_hi_open() && p.y <= r.y1));
        x_ok && y_ok
    }

    /// Is the whole closed rectangle `s` inside the relative interior?
    pub fn interior_contains_rect(&self, s: &Rect) -> bool {
        let r = &self.rect;
        let x_ok = (s.x0 > r.x0 || (!self.x_lo_open() && s.x0 >= r.x0))
            && (s.x1 < r.x1 || (!self.x_hi_open() && s.x1 <= r.x1));
        let y_ok = (s.y0 > r.y0 || (!self.y_lo_open() && s.y0 >= r.y0))
            && (s.y1 < r.y1 || (!self.y_hi_open() && s.y1 <= r.y1));
        x_ok && y_ok
    }
}

/// Finite union of closed rectangles with exact set predicates, used for the
/// explicitly tabulated families and for minimality checks on them.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Region {
    pub rects: Vec<Rect>,
}

impl Region {
    pub fn new(rects: Vec<Rect>) -> Self {
        Region { rects }
    }

    pub fn contains_point(&self, p: &Point) -> bool {
        self.rects.iter().any(|r| r.contains_point(p))
    }

    fn breakpoints(regions: &[&Region]) -> (Vec<Q>, Vec<Q>) {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for reg in regions {
            for r in &reg.rects {
                xs.push(r.x0);
                xs.push(r.x1);
                ys.push(r.y0);
                ys.push(r.y1);
            }
        }
        xs.sort();
        xs.dedup();
        ys.sort();
        ys.dedup();
        (xs, ys)
    }

    /// Representative points of the elementary grid pieces (vertices, open
    /// edge midpoints, open cell centers) induced by the breakpoints.
    fn piece_reps(xs: &[Q], ys: &[Q]) -> Vec<Point> {
        let two = Q::from_integer(2);
        let mut xr = Vec::new();
        for i in 0..xs.len() {
            xr.push(xs[i]);
            if i + 1 < xs.len() {
                xr.push((xs[i] + xs[i + 1]) / two);
            }
        }
        let mut yr = Vec::new();
        for j in 0..ys.len() {
            yr.push(ys[j]);
            if j + 1 < ys.len() {
                yr.push((ys[j] + ys[j + 1]) / two);
            }
        }
        let mut out = Vec::with_capacity(xr.len() * yr.len());
        for x in &xr {
            for y in &yr {
                out.push(Point::new(*x, *y));
            }
        }
        out
    }

    /// Exact test of `self \ other = empty` for closed rectangle unions.
    ///
    /// Both sides are unions of closed elementary pieces of the common grid,
    /// so membership of each piece representative decides containment.
    pub fn subset_of(&self, other: &Region) -> bool {
        let (xs, ys) = Region::breakpoints(&[self, other]);
        for p in Region::piece_reps(&xs, &ys) {
            if self.contains_point(&p) && !other.contains_point(&p) {
                return false;
            }
        }
        true
    }

    pub fn set_eq(&self, other: &Region) -> bool {
        self.subset_of(other) && other.subset_of(self)
    }

    pub fn is_empty(&self) -> bool {
        self.rects.iter().all(|r| r.is_empty_marker())
    }

    /// Does `self \ other` contain at least one point?
    pub fn difference_nonempty(&self, other: &Region) -> bool {
        !self.subset_of(other)
    }

    pub fn union(mut self, other: Region) -> Region {
        self.rects.extend(other.rects);
        self
    }

    pub fn intersects_region(&self, other: &Region) -> bool {
        self.rects
            .iter()
            .any(|a| other.rects.iter().any(|b| a.touches(b)))
    }

    /// Exact squared diameter of the union (attained at piece corners).
    pub fn diam2(&self) -> Q {
        let mut best = q0();
        let mut corners = Vec::new();
        for r in &self.rects {
            corners.extend_from_slice(&r.corners());
        }
        for i in 0..corners.len() {
            for j in (i + 1)..corners.len() {
                let d = corners[i].dist2(&corners[j]);
                if d > best {
                    best = d;
                }
            }
        }
        best
    }
}

/// Exact value of the form `q * sqrt(surd)` with `q >= 0`, used for weight
/// values so that Euclidean diameter weights compare exactly.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Surd {
    pub q: Q,
    pub surd: u32,
}

impl Surd {
    pub fn rational(v: Q) -> Self {
        debug_assert!(!v.is_negative());
        Surd { q: v, surd: 1 }
    }

    pub fn sqrt_of(v: Q) -> Self {
        // Only `sqrt(2) * rational` is needed; normalize squares out.
        debug_assert!(!v.is_negative());
        Surd { q: v, surd: 0 }.normalized_sqrt(v)
    }

    fn normalized_sqrt(self, v: Q) -> Surd {
        // v = n/d; sqrt(v) = sqrt(n*d)/d. Factor square part of n*d.
        let n = *v.numer();
        let d = *v.denom();
        let m = n * d;
        let mut sq: i128 = 1;
        let mut rest = m;
        let mut f: i128 = 2;
        while f * f <= rest {
            while rest % (f * f) == 0 {
                rest /= f * f;
                sq *= f;
            }
            f += 1;
        }
        debug_assert!(rest <= u32::MAX as i128);
        Surd {
            q: Q::new(sq, d),
            surd: rest as u32,
        }
    }

    pub fn zero() -> Self {
        Surd::rational(q0())
    }

    pub fn one() -> Self {
        Surd::rational(q1())
    }

    pub fn is_zero(&self) -> bool {
        self.q.is_zero()
    }

    /// Exact square of the value, always rational.
    pub fn square(&self) -> Q {
        self.q * self.q * Q::from_integer(self.surd as i128)
    }

    pub fn mul_rational(&self, r: Q) -> Surd {
        Surd {
            q: self.q * r,
            surd: if (self.q * r).is_zero() { 1 } else { self.surd },
        }
    }

    pub fn mul(&self, other: &Surd) -> Surd {
        if self.surd == other.surd {
            Surd::rational(self.q * other.q * Q::from_integer(self.surd as i128))
        } else if self.surd == 1 {
            Surd {
                q: self.q * other.q,
                surd: other.surd,
            }
        } else if other.surd == 1 {
            Surd {
                q: self.q * other.q,
                surd: self.surd,
            }
        } else {
            Surd::sqrt_of(self.square() * other.square())
        }
    }

    /// Exact addition; only defined within one surd class (or with zero).
    pub fn add(&self, other: &Surd) -> Surd {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        assert_eq!(
            self.surd, other.surd,
            "sum of incompatible surd classes is not exactly representable"
        );
        Surd {
            q: self.q + other.q,
            surd: self.surd,
        }
    }

    /// Exact ratio self/other as a rational, defined within one surd class.
    pub fn ratio(&self, other: &Surd) -> Q {
        if self.is_zero() {
            return q0();
        }
        assert_eq!(self.surd, other.surd, "ratio across surd classes");
        self.q / other.q
    }

    pub fn to_f64(&self) -> f64 {
        q_to_f64(&self.q) * (self.surd as f64).sqrt()
    }

    pub fn display(&self) -> String {
        if self.surd == 1 {
            q_str(&self.q)
        } else {
            format!("{}*sqrt({})", q_str(&self.q), self.surd)
        }
    }
}

impl PartialOrd for Surd {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Surd {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // Both values are nonnegative, so squares compare the same way.
        self.square()
            .cmp(&other.square())
            .then_with(|| self.q.cmp(&other.q))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rect_predicates() {
        let a = Rect::new(q(0, 1), q(1, 3), q(0, 1), q(1, 3));
        let b = Rect::new(q(1, 3), q(2, 3), q(0, 1), q(1, 3));
        let c = Rect::new(q(2, 3), q(1, 1), q(0, 1), q(1, 3));
        assert!(a.touches(&b));
        assert!(!a.touches(&c));
        let shared = a.intersect(&b).unwrap();
        assert_eq!(shared.dim(), 1);
        assert_eq!(rect_dist2(&a, &c), q(1, 9));
    }

    #[test]
    fn hole_relative_interior() {
        // Strip spanning the full height: relative interior keeps y closed.
        let h = Hole::new(Rect::new(q(2, 9), q(4, 9), q0(), q1()));
        assert!(h.interior_contains_point(&Point::new(q(1, 3), q0())));
        assert!(!h.interior_contains_point(&Point::new(q(2, 9), q(1, 2))));
        let seg = Rect::new(q(1, 3), q(1, 3), q0(), q1());
        assert!(h.interior_contains_rect(&seg));
    }

    #[test]
    fn region_equality_by_pieces() {
        let whole = Region::new(vec![Rect::new(q0(), q1(), q0(), q1())]);
        let split = Region::new(vec![
            Rect::new(q0(), q(1, 2), q0(), q1()),
            Rect::new(q(1, 2), q1(), q0(), q1()),
        ]);
        assert!(whole.set_eq(&split));
        let missing = Region::new(vec![Rect::new(q0(), q(1, 2), q0(), q1())]);
        assert!(!whole.set_eq(&missing));
        assert!(whole.difference_nonempty(&missing));
    }

    #[test]
    fn surd_arithmetic() {
        let a = Surd::sqrt_of(q(2, 9)); // sqrt(2)/3
        assert_eq!(a.q, q(1, 3));
        assert_eq!(a.surd, 2);
        let b = a.mul_rational(q(1, 3));
        assert_eq!(b.square(), q(2, 81));
        let s = a.add(&b);
        assert_eq!(s.q, q(4, 9));
        let r = Surd::rational(q(1, 2));
        assert!(r > a); // 1/4 > 2/9 once squared
        assert_eq!(a.ratio(&b), Q::from_integer(3));
    }

    #[test]
    fn q_parsing() {
        assert_eq!(q_parse("3/4"), Some(q(3, 4)));
        assert_eq!(q_parse("0.25"), Some(q(1, 4)));
        assert_eq!(q_parse("2"), Some(Q::from_integer(2)));
        assert_eq!(q_parse("1/0"), None);
    }
}
