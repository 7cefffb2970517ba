use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::geom::{cross, left_normal, wrap_angle, P2};

/// Circular arc traversed from `theta0` to `theta1` (counter-clockwise around the
/// centre when `theta1 > theta0`).
#[derive(Debug, Clone, PartialEq)]
pub struct CircularArc {
    pub center: P2,
    pub radius: f64,
    pub theta0: f64,
    pub theta1: f64,
}

impl CircularArc {
    fn sign(&self) -> f64 {
        (self.theta1 - self.theta0).signum()
    }

    fn angle_at(&self, s: f64) -> f64 {
        self.theta0 + self.sign() * s / self.radius
    }
}

/// Polyline with cached cumulative arclength.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    points: Vec<P2>,
    cum: Vec<f64>,
}

impl Polyline {
    pub fn points(&self) -> &[P2] {
        &self.points
    }

    fn locate(&self, s: f64) -> (usize, f64) {
        let n = self.points.len();
        let i = match self.cum.binary_search_by(|c| c.partial_cmp(&s).unwrap()) {
            Ok(i) => i.min(n - 2),
            Err(i) => i.saturating_sub(1).min(n - 2),
        };
        let seg = self.cum[i + 1] - self.cum[i];
        let t = if seg > 0.0 { (s - self.cum[i]) / seg } else { 0.0 };
        (i, t)
    }
}

/// Geometry of one boundary arc or polygon edge.
#[derive(Debug, Clone, PartialEq)]
pub enum ArcGeometry {
    Circular(CircularArc),
    Segment { start: P2, end: P2 },
    Polyline(Polyline),
}

impl ArcGeometry {
    pub fn circular(center: P2, radius: f64, theta0: f64, theta1: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidArc(format!("radius must be positive, got {radius}")));
        }
        let span = (theta1 - theta0).abs();
        if !(span > 0.0 && span < TAU + 1e-12) || !theta0.is_finite() || !theta1.is_finite() {
            return Err(Error::InvalidArc(format!("angle span {span} outside (0, 2pi)")));
        }
        Ok(Self::Circular(CircularArc { center, radius, theta0, theta1 }))
    }

    pub fn segment(start: P2, end: P2) -> Result<Self> {
        if (end - start).norm() == 0.0 {
            return Err(Error::InvalidArc("zero-length segment".into()));
        }
        Ok(Self::Segment { start, end })
    }

    pub fn polyline(points: Vec<P2>) -> Result<Self> {
        if points.len() < 3 {
            return Err(Error::InvalidArc("polyline arcs need at least 3 samples".into()));
        }
        let mut cum = Vec::with_capacity(points.len());
        cum.push(0.0);
        for w in points.windows(2) {
            let l = (w[1] - w[0]).norm();
            if l == 0.0 {
                return Err(Error::InvalidArc("repeated polyline sample".into()));
            }
            cum.push(cum.last().unwrap() + l);
        }
        Ok(Self::Polyline(Polyline { points, cum }))
    }

    /// Arc of the circle of radius `radius` from `p` to `q`. `center_left` picks the
    /// centre on the left of the chord `p -> q`; `major` picks the longer arc.
    pub fn circular_through(p: P2, q: P2, radius: f64, center_left: bool, major: bool) -> Option<Self> {
        let chord = q - p;
        let c = chord.norm();
        if c == 0.0 || c > 2.0 * radius * (1.0 + 1e-12) {
            return None;
        }
        let half = 0.5 * c;
        let d = (radius * radius - half * half).max(0.0).sqrt();
        let n = left_normal(&chord) / c;
        let center = (p + q) * 0.5 + n * if center_left { d } else { -d };
        let a0 = (p - center).y.atan2((p - center).x);
        let a1 = (q - center).y.atan2((q - center).x);
        // counter-clockwise sweep from p to q
        let mut ccw = a1 - a0;
        while ccw <= 0.0 {
            ccw += TAU;
        }
        let cw = ccw - TAU;
        let minor_is_ccw = ccw <= -cw;
        let span = match (major, minor_is_ccw) {
            (false, true) | (true, false) => ccw,
            _ => cw,
        };
        Some(Self::Circular(CircularArc { center, radius, theta0: a0, theta1: a0 + span }))
    }

    pub fn length(&self) -> f64 {
        match self {
            Self::Circular(c) => c.radius * (c.theta1 - c.theta0).abs(),
            Self::Segment { start, end } => (end - start).norm(),
            Self::Polyline(p) => *p.cum.last().unwrap(),
        }
    }

    pub fn is_curved(&self) -> bool {
        !matches!(self, Self::Segment { .. })
    }

    pub fn point_at(&self, s: f64) -> P2 {
        match self {
            Self::Circular(c) => {
                let a = c.angle_at(s);
                c.center + P2::new(a.cos(), a.sin()) * c.radius
            }
            Self::Segment { start, end } => start + (end - start) * (s / (end - start).norm()),
            Self::Polyline(p) => {
                let (i, t) = p.locate(s);
                p.points[i] + (p.points[i + 1] - p.points[i]) * t
            }
        }
    }

    pub fn start(&self) -> P2 {
        match self {
            Self::Segment { start, .. } => *start,
            Self::Polyline(p) => p.points[0],
            _ => self.point_at(0.0),
        }
    }

    pub fn end(&self) -> P2 {
        match self {
            Self::Segment { end, .. } => *end,
            Self::Polyline(p) => *p.points.last().unwrap(),
            _ => self.point_at(self.length()),
        }
    }

    /// Unit tangent in the direction of travel.
    pub fn tangent_at(&self, s: f64) -> P2 {
        match self {
            Self::Circular(c) => {
                let a = c.angle_at(s);
                P2::new(-a.sin(), a.cos()) * c.sign()
            }
            Self::Segment { start, end } => (end - start).normalize(),
            Self::Polyline(p) => {
                let (i, _) = p.locate(s);
                (p.points[i + 1] - p.points[i]).normalize()
            }
        }
    }

    /// Signed curvature, positive when the curve turns left. For a positively
    /// oriented boundary this is the geodesic curvature with respect to the
    /// inner normal.
    pub fn curvature_at(&self, s: f64) -> f64 {
        match self {
            Self::Circular(c) => c.sign() / c.radius,
            Self::Segment { .. } => 0.0,
            Self::Polyline(p) => {
                let n = p.points.len();
                let (i, t) = p.locate(s);
                let mid = if t < 0.5 { i } else { i + 1 };
                let mid = mid.clamp(1, n - 2);
                menger_curvature(&p.points[mid - 1], &p.points[mid], &p.points[mid + 1])
            }
        }
    }

    /// Curvature values a pointwise check has to look at.
    pub fn curvature_samples(&self) -> Vec<f64> {
        match self {
            Self::Polyline(p) => p
                .points
                .windows(3)
                .map(|w| menger_curvature(&w[0], &w[1], &w[2]))
                .collect(),
            _ => vec![self.curvature_at(0.0)],
        }
    }

    /// `n + 1` points equally spaced in arclength, endpoints included.
    pub fn sample(&self, n: usize) -> Vec<P2> {
        let l = self.length();
        (0..=n).map(|k| self.point_at(l * k as f64 / n as f64)).collect()
    }

    /// Arclength parameter of the point of the arc closest to `p`.
    pub fn closest_param(&self, p: &P2) -> f64 {
        match self {
            Self::Circular(c) => {
                let d = p - c.center;
                let phi = d.y.atan2(d.x);
                let mut delta = (phi - c.theta0) * c.sign();
                delta = delta.rem_euclid(TAU);
                let len = self.length();
                let s = delta * c.radius;
                if s <= len {
                    s
                } else {
                    let to_end = (s - len).abs();
                    let to_start = (TAU * c.radius - s).abs();
                    if to_end < to_start {
                        len
                    } else {
                        0.0
                    }
                }
            }
            Self::Segment { start, end } => {
                let ab = end - start;
                let l = ab.norm();
                ((p - start).dot(&ab) / l).clamp(0.0, l)
            }
            Self::Polyline(pl) => {
                let mut best = (f64::INFINITY, 0.0);
                for i in 0..pl.points.len() - 1 {
                    let a = pl.points[i];
                    let ab = pl.points[i + 1] - a;
                    let l = ab.norm();
                    let t = ((p - a).dot(&ab) / (l * l)).clamp(0.0, 1.0);
                    let d = (p - (a + ab * t)).norm();
                    if d < best.0 {
                        best = (d, pl.cum[i] + t * l);
                    }
                }
                best.1
            }
        }
    }

    pub fn distance_to(&self, p: &P2) -> f64 {
        (self.point_at(self.closest_param(p)) - p).norm()
    }

    /// `1/2 * integral of (x dy - y dx)` along the arc, exact for every variant.
    pub fn area_term(&self) -> f64 {
        match self {
            Self::Circular(c) => {
                let (r, cx, cy) = (c.radius, c.center.x, c.center.y);
                let (t0, t1) = (c.theta0, c.theta1);
                0.5 * (r * r * (t1 - t0) + cx * r * (t1.sin() - t0.sin()) + cy * r * (t0.cos() - t1.cos()))
            }
            Self::Segment { start, end } => 0.5 * cross(start, end),
            Self::Polyline(p) => 0.5 * p.points.windows(2).map(|w| cross(&w[0], &w[1])).sum::<f64>(),
        }
    }

    pub fn reversed(&self) -> Self {
        match self {
            Self::Circular(c) => Self::Circular(CircularArc { theta0: c.theta1, theta1: c.theta0, ..c.clone() }),
            Self::Segment { start, end } => Self::Segment { start: *end, end: *start },
            Self::Polyline(p) => {
                let mut pts = p.points.clone();
                pts.reverse();
                Self::polyline(pts).expect("reversed polyline stays valid")
            }
        }
    }

    /// Mirror image across the chord joining the endpoints; keeps the endpoints
    /// and the direction of travel.
    pub fn reflect_across_chord(&self) -> Self {
        let (a, b) = (self.start(), self.end());
        let u = (b - a).normalize();
        let mirror = |p: &P2| {
            let d = p - a;
            let along = u * d.dot(&u);
            a + along * 2.0 - d
        };
        match self {
            Self::Circular(c) => {
                let center = mirror(&c.center);
                let span = c.theta1 - c.theta0;
                let t0 = (a - center).y.atan2((a - center).x);
                Self::Circular(CircularArc { center, radius: c.radius, theta0: t0, theta1: t0 - span })
            }
            Self::Segment { .. } => self.clone(),
            Self::Polyline(p) => Self::polyline(p.points.iter().map(mirror).collect()).expect("mirror of valid polyline"),
        }
    }

    /// Angular span for circular arcs.
    pub fn span(&self) -> Option<f64> {
        match self {
            Self::Circular(c) => Some(c.theta1 - c.theta0),
            _ => None,
        }
    }

    pub fn as_circular(&self) -> Option<&CircularArc> {
        match self {
            Self::Circular(c) => Some(c),
            _ => None,
        }
    }

    /// Geometric coincidence of two arcs (same direction of travel).
    pub fn coincides_with(&self, other: &Self, tol: f64) -> bool {
        if (self.length() - other.length()).abs() > tol {
            return false;
        }
        let n = 16;
        let l1 = self.length();
        let l2 = other.length();
        (0..=n).all(|k| {
            let t = k as f64 / n as f64;
            (self.point_at(t * l1) - other.point_at(t * l2)).norm() <= tol.max(1e-9)
        })
    }
}

/// Angle swept by the direction from `p` to a point travelling along `arc`.
pub fn swept_angle(arc: &ArcGeometry, p: &P2) -> f64 {
    let chord = |a: &P2, b: &P2| {
        let (u, v) = (a - p, b - p);
        cross(&u, &v).atan2(u.dot(&v))
    };
    match arc {
        ArcGeometry::Segment { start, end } => chord(start, end),
        ArcGeometry::Polyline(pl) => pl.points.windows(2).map(|w| chord(&w[0], &w[1])).sum(),
        ArcGeometry::Circular(c) => {
            let (a, b) = (arc.start(), arc.end());
            let base = chord(&a, &b);
            // arc + chord back encloses the circular segment on the side of the arc midpoint
            let m = arc.point_at(0.5 * arc.length());
            let inside_disk = (p - c.center).norm() < c.radius;
            let same_side = cross(&(b - a), &(p - a)) * cross(&(b - a), &(m - a)) > 0.0;
            if inside_disk && same_side {
                base + TAU * c.sign()
            } else {
                base
            }
        }
    }
}

/// Winding number of a closed chain of arcs around `p` (not on the chain).
pub fn winding_number<'a>(arcs: impl IntoIterator<Item = &'a ArcGeometry>, p: &P2) -> f64 {
    arcs.into_iter().map(|a| swept_angle(a, p)).sum::<f64>() / TAU
}

/// Signed curvature of the circle through three points (positive for a left turn).
pub fn menger_curvature(a: &P2, b: &P2, c: &P2) -> f64 {
    let area2 = cross(&(b - a), &(c - b));
    let denom = (b - a).norm() * (c - b).norm() * (c - a).norm();
    if denom == 0.0 {
        0.0
    } else {
        2.0 * area2 / denom
    }
}

/// A chain of arcs joined end to start.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pieces: Vec<ArcGeometry>,
}

impl Curve {
    pub const JOIN_TOL: f64 = 1e-9;

    pub fn new(pieces: Vec<ArcGeometry>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::InvalidArc("empty curve".into()));
        }
        for (i, w) in pieces.windows(2).enumerate() {
            let gap = (w[0].end() - w[1].start()).norm();
            if gap > Self::JOIN_TOL {
                return Err(Error::OpenBoundary { arc: i, next: i + 1, gap });
            }
        }
        Ok(Self { pieces })
    }

    pub fn single(arc: ArcGeometry) -> Self {
        Self { pieces: vec![arc] }
    }

    pub fn pieces(&self) -> &[ArcGeometry] {
        &self.pieces
    }

    pub fn length(&self) -> f64 {
        self.pieces.iter().map(ArcGeometry::length).sum()
    }

    pub fn start(&self) -> P2 {
        self.pieces[0].start()
    }

    pub fn end(&self) -> P2 {
        self.pieces.last().unwrap().end()
    }

    pub fn is_closed(&self) -> bool {
        (self.start() - self.end()).norm() <= Self::JOIN_TOL
    }

    /// Exact `1/2 * integral of (x dy - y dx)`; the signed area when closed.
    pub fn area_term(&self) -> f64 {
        self.pieces.iter().map(ArcGeometry::area_term).sum()
    }

    pub fn reversed(&self) -> Self {
        Self { pieces: self.pieces.iter().rev().map(ArcGeometry::reversed).collect() }
    }

    pub fn then(&self, other: &Curve) -> Result<Self> {
        let mut pieces = self.pieces.clone();
        pieces.extend(other.pieces.iter().cloned());
        Self::new(pieces)
    }

    /// Sample points with spacing at most `ds`, endpoints of each piece included.
    pub fn polyline(&self, ds: f64) -> Vec<P2> {
        let mut pts = Vec::new();
        for p in &self.pieces {
            let n = ((p.length() / ds).ceil() as usize).max(if p.is_curved() { 8 } else { 1 });
            let s = p.sample(n);
            if pts.is_empty() {
                pts.extend(s);
            } else {
                pts.extend(s.into_iter().skip(1));
            }
        }
        pts
    }
}

/// Angle helper for callers building arcs from endpoints.
pub fn angle_of(p: &P2, center: &P2) -> f64 {
    wrap_angle((p - center).y.atan2((p - center).x))
}
