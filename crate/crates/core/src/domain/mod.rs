//! Curvilinear planar domains with labelled boundary arcs.
//!
//! A [`DomainSpec`] is a positively oriented (counter-clockwise) Jordan curve made
//! of [`ArcSpec`]s. Curvature is signed so that a circle traversed
//! counter-clockwise has curvature `+1/R`; on a positively oriented boundary this
//! is the geodesic curvature with respect to the inner normal.

mod arc;
mod data;
mod json;
mod polygon;

use serde::{Deserialize, Serialize};

pub use arc::{angle_of, menger_curvature, swept_angle, winding_number, ArcGeometry, CircularArc, Curve, Polyline};
pub use data::{BoundaryData, BuiltinExpr, DataFn};
pub use json::{ArcFile, DataFile, DomainFile, GeometryFile};
pub use polygon::{
    check_solvability, enumerate_polygons, lens_closed_form, lens_polygon, polygon_measures, EdgeProvenance,
    PolygonEdge, PolygonMargins, PolygonMeasures, PolygonSpec, SolvabilityReport,
};

use crate::ambient::AmbientParams;
use crate::error::{Error, Result};
use crate::geom::{closed_polyline_is_simple, P2};

/// Absolute tolerance for geometric coincidence.
pub const GEOM_TOL: f64 = 1e-9;
/// Tolerance of the curvature label checks.
pub const CURVATURE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ArcLabel {
    A,
    B,
    C,
}

#[derive(Debug, Clone)]
pub struct ArcSpec {
    pub geometry: ArcGeometry,
    pub label: ArcLabel,
    pub data: Option<BoundaryData>,
}

impl ArcSpec {
    pub fn new(geometry: ArcGeometry, label: ArcLabel) -> Self {
        Self { geometry, label, data: None }
    }

    pub fn with_data(mut self, data: BoundaryData) -> Self {
        self.data = Some(data);
        self
    }
}

/// Signed geodesic curvature of `arc` at arclength `s`.
pub fn geodesic_curvature(arc: &ArcSpec, s: f64) -> Result<f64> {
    let length = arc.geometry.length();
    if !(s >= -GEOM_TOL && s <= length + GEOM_TOL) {
        return Err(Error::OutOfRange { s, length });
    }
    Ok(arc.geometry.curvature_at(s.clamp(0.0, length)))
}

/// Validated domain: closed, simple, positively oriented.
#[derive(Debug, Clone)]
pub struct DomainSpec {
    arcs: Vec<ArcSpec>,
    params: AmbientParams,
    area: f64,
    scale: f64,
}

impl DomainSpec {
    pub fn new(arcs: Vec<ArcSpec>, params: AmbientParams) -> Result<Self> {
        if arcs.is_empty() {
            return Err(Error::InvalidArc("a domain needs at least one arc".into()));
        }
        let n = arcs.len();
        for i in 0..n {
            let j = (i + 1) % n;
            let gap = (arcs[i].geometry.end() - arcs[j].geometry.start()).norm();
            if gap > GEOM_TOL {
                return Err(Error::OpenBoundary { arc: i, next: j, gap });
            }
        }
        let area: f64 = arcs.iter().map(|a| a.geometry.area_term()).sum();
        let outline = outline(&arcs, 64);
        let (lo, hi) = bbox(&outline);
        let scale = (hi - lo).norm();
        if !closed_polyline_is_simple(&outline, 1e-12 * scale) {
            return Err(Error::SelfIntersecting("boundary arcs cross".into()));
        }
        if area <= 0.0 {
            return Err(Error::NotPositivelyOriented);
        }
        Ok(Self { arcs, params, area, scale })
    }

    pub fn arcs(&self) -> &[ArcSpec] {
        &self.arcs
    }

    pub fn arc(&self, i: usize) -> &ArcSpec {
        &self.arcs[i]
    }

    pub fn params(&self) -> &AmbientParams {
        &self.params
    }

    pub fn with_params(&self, params: AmbientParams) -> Self {
        Self { params, ..self.clone() }
    }

    /// Replaces the boundary data of arc `i`.
    pub fn with_data(&self, i: usize, data: Option<BoundaryData>) -> Self {
        let mut out = self.clone();
        out.arcs[i].data = data;
        out
    }

    /// Exact enclosed area.
    pub fn area(&self) -> f64 {
        self.area
    }

    pub fn perimeter(&self) -> f64 {
        self.arcs.iter().map(|a| a.geometry.length()).sum()
    }

    /// Diagonal of the bounding box.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Arc start points; arc `i` runs from vertex `i` to vertex `i + 1`.
    pub fn vertices(&self) -> Vec<P2> {
        self.arcs.iter().map(|a| a.geometry.start()).collect()
    }

    pub fn has_label(&self, label: ArcLabel) -> bool {
        self.arcs.iter().any(|a| a.label == label)
    }

    pub fn total_length(&self, label: ArcLabel) -> f64 {
        self.arcs.iter().filter(|a| a.label == label).map(|a| a.geometry.length()).sum()
    }

    /// Winding number of the boundary around `p`.
    pub fn winding(&self, p: &P2) -> f64 {
        winding_number(self.arcs.iter().map(|a| &a.geometry), p)
    }

    pub fn contains(&self, p: &P2) -> bool {
        self.winding(p) > 0.5
    }

    pub fn distance_to_boundary(&self, p: &P2) -> f64 {
        self.arcs.iter().map(|a| a.geometry.distance_to(p)).fold(f64::INFINITY, f64::min)
    }

    /// Closest boundary point as `(arc, s, distance)`.
    pub fn project_to_boundary(&self, p: &P2) -> (usize, f64, f64) {
        let mut best = (0, 0.0, f64::INFINITY);
        for (i, a) in self.arcs.iter().enumerate() {
            let s = a.geometry.closest_param(p);
            let d = (a.geometry.point_at(s) - p).norm();
            if d < best.2 {
                best = (i, s, d);
            }
        }
        best
    }

    /// Polyline through the boundary with at least `per_arc` segments on curved arcs.
    pub fn outline(&self, per_arc: usize) -> Vec<P2> {
        outline(&self.arcs, per_arc)
    }

    /// Area centroid.
    pub fn centroid(&self) -> P2 {
        let pts = self.outline(256);
        let n = pts.len();
        let (mut a, mut c) = (0.0, P2::zeros());
        for i in 0..n {
            let (p, q) = (pts[i], pts[(i + 1) % n]);
            let w = p.x * q.y - q.x * p.y;
            a += w;
            c += (p + q) * w;
        }
        c / (3.0 * a)
    }

    /// Boundary value at arclength `s` of arc `i`.
    pub fn data_at(&self, i: usize, s: f64) -> Result<f64> {
        let arc = &self.arcs[i];
        let d = arc.data.as_ref().ok_or(Error::MissingData(i))?;
        Ok(d.eval(&arc.geometry, s))
    }

    pub fn curve(&self) -> Curve {
        Curve::new(self.arcs.iter().map(|a| a.geometry.clone()).collect()).expect("validated chain")
    }
}

fn outline(arcs: &[ArcSpec], per_arc: usize) -> Vec<P2> {
    let mut pts = Vec::new();
    for a in arcs {
        let n = match &a.geometry {
            ArcGeometry::Segment { .. } => 1,
            ArcGeometry::Polyline(p) => p.points().len() - 1,
            ArcGeometry::Circular(_) => per_arc,
        };
        let s = match &a.geometry {
            ArcGeometry::Polyline(p) => p.points().to_vec(),
            g => g.sample(n),
        };
        pts.extend_from_slice(&s[..s.len() - 1]);
    }
    pts
}

fn bbox(pts: &[P2]) -> (P2, P2) {
    let mut lo = P2::repeat(f64::INFINITY);
    let mut hi = P2::repeat(f64::NEG_INFINITY);
    for p in pts {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    (lo, hi)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvatureViolation {
    pub arc: usize,
    pub label: ArcLabel,
    /// Largest deviation from the label's curvature rule.
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdmissibilityReport {
    pub passed: bool,
    pub curvature_violations: Vec<CurvatureViolation>,
    /// Pairs of arcs with the same A or B label meeting at a vertex.
    pub shared_endpoints: Vec<(usize, usize)>,
    /// C arcs whose curvature equals `2H` identically (allowed, reported).
    pub flagged_c_arcs: Vec<usize>,
}

/// Label rules `k(A) = 2H`, `k(B) = -2H`, `k(C) >= 2H` and the endpoint rule.
pub fn check_admissible(dom: &DomainSpec) -> AdmissibilityReport {
    let two_h = 2.0 * dom.params.h;
    let mut curvature_violations = Vec::new();
    let mut flagged_c_arcs = Vec::new();
    for (i, a) in dom.arcs.iter().enumerate() {
        let ks = a.geometry.curvature_samples();
        let deviation = match a.label {
            ArcLabel::A => ks.iter().map(|k| (k - two_h).abs()).fold(0.0, f64::max),
            ArcLabel::B => ks.iter().map(|k| (k + two_h).abs()).fold(0.0, f64::max),
            ArcLabel::C => ks.iter().map(|k| (two_h - k).max(0.0)).fold(0.0, f64::max),
        };
        if deviation > CURVATURE_TOL {
            curvature_violations.push(CurvatureViolation { arc: i, label: a.label, deviation });
        } else if a.label == ArcLabel::C && ks.iter().all(|k| (k - two_h).abs() <= CURVATURE_TOL) {
            flagged_c_arcs.push(i);
        }
    }
    let n = dom.arcs.len();
    let mut shared_endpoints = Vec::new();
    // a two-arc boundary shares both endpoints between the same pair
    let pairs = if n == 2 { 1 } else if n > 2 { n } else { 0 };
    for i in 0..pairs {
        let j = (i + 1) % n;
        let (li, lj) = (dom.arcs[i].label, dom.arcs[j].label);
        if li == lj && li != ArcLabel::C {
            shared_endpoints.push((i, j));
        }
    }
    AdmissibilityReport {
        passed: curvature_violations.is_empty() && shared_endpoints.is_empty(),
        curvature_violations,
        shared_endpoints,
        flagged_c_arcs,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirichletReport {
    pub passed: bool,
    /// `inf k - 2H`; negative when the curvature condition fails.
    pub curvature_margin: f64,
    /// `inf (k/2)^2 - tau^2`; negative when the Ricci condition fails.
    pub ricci_margin: f64,
    /// Arc attaining the curvature infimum.
    pub worst_arc: usize,
}

/// Hypotheses of the classical Dirichlet existence result: `2H <= k` on the
/// boundary and `tau^2 <= inf (k/2)^2`.
pub fn check_dirichlet_conditions(dom: &DomainSpec) -> DirichletReport {
    let (mut kmin, mut worst) = (f64::INFINITY, 0);
    let mut half_sq_min = f64::INFINITY;
    for (i, a) in dom.arcs.iter().enumerate() {
        for k in a.geometry.curvature_samples() {
            if k < kmin {
                kmin = k;
                worst = i;
            }
            half_sq_min = half_sq_min.min((0.5 * k).powi(2));
        }
    }
    let p = dom.params;
    let curvature_margin = kmin - 2.0 * p.h;
    let ricci_margin = half_sq_min - p.tau * p.tau;
    DirichletReport {
        passed: curvature_margin >= -CURVATURE_TOL && ricci_margin >= -CURVATURE_TOL,
        curvature_margin,
        ricci_margin,
        worst_arc: worst,
    }
}
