use std::collections::BTreeSet;

use serde::Serialize;

use super::arc::{winding_number, ArcGeometry};
use super::{ArcLabel, DomainSpec, GEOM_TOL};
use crate::error::{Error, Result};
use crate::geom::{closed_polyline_is_simple, P2};

const EDGE_SAMPLES: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EdgeProvenance {
    Boundary { arc: usize, label: ArcLabel },
    Interior,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolygonEdge {
    pub geometry: ArcGeometry,
    pub provenance: EdgeProvenance,
}

impl PolygonEdge {
    /// Curvature with respect to the polygon's inner normal (constant along the edge).
    pub fn curvature(&self) -> f64 {
        self.geometry.curvature_at(0.0)
    }
}

/// Closed chain of circular arcs (or segments when `H = 0`), stored counter-clockwise.
#[derive(Debug, Clone, PartialEq)]
pub struct PolygonSpec {
    edges: Vec<PolygonEdge>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PolygonMeasures {
    /// Total length of edges that are A arcs of the domain.
    pub alpha: f64,
    /// Total length of edges that are B arcs of the domain.
    pub beta: f64,
    /// Perimeter.
    pub ell: f64,
    pub area: f64,
}

impl PolygonSpec {
    /// Builds a polygon from a closed chain; reorients it counter-clockwise.
    pub fn new(edges: Vec<PolygonEdge>) -> Result<Self> {
        if edges.is_empty() {
            return Err(Error::NotClosed("polygon without edges".into()));
        }
        let n = edges.len();
        for i in 0..n {
            let j = (i + 1) % n;
            let gap = (edges[i].geometry.end() - edges[j].geometry.start()).norm();
            if gap > GEOM_TOL {
                return Err(Error::OpenBoundary { arc: i, next: j, gap });
            }
        }
        let signed: f64 = edges.iter().map(|e| e.geometry.area_term()).sum();
        let edges = if signed < 0.0 {
            edges
                .into_iter()
                .rev()
                .map(|e| PolygonEdge { geometry: e.geometry.reversed(), provenance: e.provenance })
                .collect()
        } else {
            edges
        };
        Ok(Self { edges })
    }

    pub fn edges(&self) -> &[PolygonEdge] {
        &self.edges
    }

    pub fn vertices(&self) -> Vec<P2> {
        self.edges.iter().map(|e| e.geometry.start()).collect()
    }

    pub fn sampled(&self) -> Vec<P2> {
        let mut pts = Vec::new();
        for e in &self.edges {
            let n = if e.geometry.is_curved() { EDGE_SAMPLES } else { 1 };
            let s = e.geometry.sample(n);
            pts.extend_from_slice(&s[..n]);
        }
        pts
    }

    pub fn is_simple(&self) -> bool {
        let pts = self.sampled();
        if pts.len() < 3 {
            return false;
        }
        let scale = pts.iter().map(|p| p.norm()).fold(1.0, f64::max);
        closed_polyline_is_simple(&pts, 1e-10 * scale)
    }

    pub fn contains(&self, p: &P2) -> bool {
        winding_number(self.edges.iter().map(|e| &e.geometry), p) > 0.5
    }

    /// True when the polygon is the whole boundary of `dom`.
    pub fn is_domain_boundary(&self, dom: &DomainSpec) -> bool {
        let arcs: BTreeSet<usize> = self
            .edges
            .iter()
            .filter_map(|e| match e.provenance {
                EdgeProvenance::Boundary { arc, .. } => Some(arc),
                EdgeProvenance::Interior => None,
            })
            .collect();
        arcs.len() == self.edges.len() && arcs.len() == dom.arcs().len()
    }

    pub fn measures(&self) -> Result<PolygonMeasures> {
        polygon_measures(self)
    }
}

/// Lengths and exact area of a simple polygon.
pub fn polygon_measures(poly: &PolygonSpec) -> Result<PolygonMeasures> {
    if !poly.is_simple() {
        return Err(Error::SelfIntersecting("polygon edges cross".into()));
    }
    let mut m = PolygonMeasures { alpha: 0.0, beta: 0.0, ell: 0.0, area: 0.0 };
    let mut signed = 0.0;
    for e in &poly.edges {
        let l = e.geometry.length();
        m.ell += l;
        signed += e.geometry.area_term();
        match e.provenance {
            EdgeProvenance::Boundary { label: ArcLabel::A, .. } => m.alpha += l,
            EdgeProvenance::Boundary { label: ArcLabel::B, .. } => m.beta += l,
            _ => {}
        }
    }
    m.area = signed.abs();
    Ok(m)
}

/// Lens bounded by `arc` and its reflection across the chord.
pub fn lens_polygon(arc: &ArcGeometry, provenance: EdgeProvenance) -> Result<PolygonSpec> {
    let back = arc.reflect_across_chord().reversed();
    PolygonSpec::new(vec![
        PolygonEdge { geometry: arc.clone(), provenance },
        PolygonEdge { geometry: back, provenance: EdgeProvenance::Interior },
    ])
}

/// Closed form for the lens of two arcs of radius `r` subtending `2 theta` each:
/// returns `(arc length, lens area)`.
pub fn lens_closed_form(r: f64, theta: f64) -> (f64, f64) {
    (2.0 * r * theta, 2.0 * r * r * (theta - theta.sin() * theta.cos()))
}

#[derive(Debug, Clone)]
struct Candidate {
    u: usize,
    v: usize,
    geometry: ArcGeometry,
    provenance: EdgeProvenance,
}

/// All simple polygons with at most `max_vertices` vertices, vertices at arc
/// endpoints of `dom`, edges being boundary arcs or interior arcs of curvature
/// `+-2H` (straight segments when `H = 0`).
pub fn enumerate_polygons(dom: &DomainSpec, max_vertices: usize) -> Result<Vec<PolygonSpec>> {
    if max_vertices < 2 {
        return Err(Error::InvalidParams("max_vertices must be at least 2".into()));
    }
    let verts = dom.vertices();
    let m = verts.len();
    let tol = GEOM_TOL * dom.scale().max(1.0);
    let mut cands: Vec<Candidate> = dom
        .arcs()
        .iter()
        .enumerate()
        .map(|(i, a)| Candidate {
            u: i,
            v: (i + 1) % m,
            geometry: a.geometry.clone(),
            provenance: EdgeProvenance::Boundary { arc: i, label: a.label },
        })
        .collect();
    let h = dom.params().h;
    for u in 0..m {
        for v in (u + 1)..m {
            let (p, q) = (verts[u], verts[v]);
            let options: Vec<ArcGeometry> = if h == 0.0 {
                ArcGeometry::segment(p, q).into_iter().collect()
            } else {
                let r = 1.0 / (2.0 * h);
                [(true, false), (true, true), (false, false), (false, true)]
                    .iter()
                    .filter_map(|&(left, major)| ArcGeometry::circular_through(p, q, r, left, major))
                    .collect()
            };
            for g in options {
                let dup = cands.iter().any(|c| {
                    (c.u == u && c.v == v && c.geometry.coincides_with(&g, tol))
                        || (c.u == v && c.v == u && c.geometry.coincides_with(&g.reversed(), tol))
                });
                if dup || !inside_closure(dom, &g, tol) {
                    continue;
                }
                cands.push(Candidate { u, v, geometry: g, provenance: EdgeProvenance::Interior });
            }
        }
    }

    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); m];
    for (e, c) in cands.iter().enumerate() {
        adj[c.u].push((e, c.v));
        if c.u != c.v {
            adj[c.v].push((e, c.u));
        }
    }

    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut out = Vec::new();
    for s in 0..m {
        let mut path: Vec<(usize, usize)> = Vec::new();
        let mut on_path = vec![false; m];
        on_path[s] = true;
        dfs(s, s, &adj, &mut path, &mut on_path, max_vertices, &mut |cycle: &[(usize, usize)]| {
            let mut key: Vec<usize> = cycle.iter().map(|&(e, _)| e).collect();
            key.sort_unstable();
            if !seen.insert(key) {
                return;
            }
            let mut from = s;
            let mut edges = Vec::with_capacity(cycle.len());
            for &(e, to) in cycle {
                let c = &cands[e];
                let geometry = if c.u == from && c.v == to { c.geometry.clone() } else { c.geometry.reversed() };
                edges.push(PolygonEdge { geometry, provenance: c.provenance });
                from = to;
            }
            if let Ok(poly) = PolygonSpec::new(edges) {
                if let Ok(meas) = polygon_measures(&poly) {
                    if meas.area > tol {
                        out.push(poly);
                    }
                }
            }
        });
    }
    Ok(out)
}

fn dfs(
    start: usize,
    at: usize,
    adj: &[Vec<(usize, usize)>],
    path: &mut Vec<(usize, usize)>,
    on_path: &mut [bool],
    max_len: usize,
    emit: &mut dyn FnMut(&[(usize, usize)]),
) {
    for &(e, w) in &adj[at] {
        if path.iter().any(|&(pe, _)| pe == e) {
            continue;
        }
        if w == start {
            path.push((e, w));
            emit(path);
            path.pop();
        } else if w > start && !on_path[w] && path.len() + 1 < max_len {
            on_path[w] = true;
            path.push((e, w));
            dfs(start, w, adj, path, on_path, max_len, emit);
            path.pop();
            on_path[w] = false;
        }
    }
}

fn inside_closure(dom: &DomainSpec, g: &ArcGeometry, tol: f64) -> bool {
    let l = g.length();
    (1..EDGE_SAMPLES).all(|k| {
        let p = g.point_at(l * k as f64 / EDGE_SAMPLES as f64);
        dom.distance_to_boundary(&p) <= tol || dom.contains(&p)
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolygonMargins {
    pub measures: PolygonMeasures,
    /// `l + 2HA - 2 alpha`
    pub alpha_margin: f64,
    /// `l - 2HA - 2 beta`
    pub beta_margin: f64,
    /// The whole boundary when no C arcs exist; its inequalities are replaced by the balance identity.
    pub excluded: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolvabilityReport {
    pub passed: bool,
    pub c_empty: bool,
    /// `(alpha - beta - 2HA) / (alpha + beta + 2HA)` over the whole boundary when no C arcs exist.
    pub balance_residual: Option<f64>,
    pub polygons: Vec<PolygonMargins>,
    /// Smallest inequality margin over the polygons that count.
    pub worst_margin: f64,
}

/// Evaluates the flux-type solvability conditions for each polygon.
pub fn check_solvability(dom: &DomainSpec, polys: &[PolygonSpec]) -> Result<SolvabilityReport> {
    let two_h = 2.0 * dom.params().h;
    let c_empty = !dom.has_label(ArcLabel::C);
    let balance_residual = c_empty.then(|| {
        let alpha = dom.total_length(ArcLabel::A);
        let beta = dom.total_length(ArcLabel::B);
        let rhs = two_h * dom.area();
        (alpha - beta - rhs) / (alpha + beta + rhs).max(f64::MIN_POSITIVE)
    });
    let mut passed = balance_residual.map_or(true, |r| r.abs() <= 1e-8);
    let mut worst_margin = f64::INFINITY;
    let mut polygons = Vec::with_capacity(polys.len());
    for poly in polys {
        let measures = polygon_measures(poly)?;
        let alpha_margin = measures.ell + two_h * measures.area - 2.0 * measures.alpha;
        let beta_margin = measures.ell - two_h * measures.area - 2.0 * measures.beta;
        let excluded = c_empty && poly.is_domain_boundary(dom);
        if !excluded {
            let worst = alpha_margin.min(beta_margin);
            worst_margin = worst_margin.min(worst);
            if worst <= 1e-12 * (1.0 + measures.ell) {
                passed = false;
            }
        }
        polygons.push(PolygonMargins { measures, alpha_margin, beta_margin, excluded });
    }
    Ok(SolvabilityReport { passed, c_empty, balance_residual, polygons, worst_margin })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambient::AmbientParams;
    use crate::domain::ArcSpec;
    use crate::geom::{p2, polygon_signed_area};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{PI, TAU};

    fn square(h: f64) -> DomainSpec {
        let c = [p2(0.0, 0.0), p2(1.0, 0.0), p2(1.0, 1.0), p2(0.0, 1.0)];
        let arcs = (0..4)
            .map(|i| ArcSpec::new(ArcGeometry::segment(c[i], c[(i + 1) % 4]).unwrap(), ArcLabel::C))
            .collect();
        DomainSpec::new(arcs, AmbientParams::new(0.0, h).unwrap()).unwrap()
    }

    #[test]
    fn full_circle_measures() {
        let r = 0.7;
        let a = ArcGeometry::circular(p2(1.0, 2.0), r, 0.0, PI).unwrap();
        let b = ArcGeometry::circular(p2(1.0, 2.0), r, PI, TAU).unwrap();
        let poly = PolygonSpec::new(vec![
            PolygonEdge { geometry: a, provenance: EdgeProvenance::Interior },
            PolygonEdge { geometry: b, provenance: EdgeProvenance::Interior },
        ])
        .unwrap();
        let m = polygon_measures(&poly).unwrap();
        assert_abs_diff_eq!(m.ell, TAU * r, epsilon = 1e-14);
        assert_abs_diff_eq!(m.area, PI * r * r, epsilon = 1e-14);
    }

    #[test]
    fn lens_matches_closed_form() {
        let (r, th) = (2.0, 0.6);
        let arc = ArcGeometry::circular(p2(0.0, 0.0), r, -th, th).unwrap();
        let lens = lens_polygon(&arc, EdgeProvenance::Boundary { arc: 0, label: ArcLabel::B }).unwrap();
        let m = polygon_measures(&lens).unwrap();
        let (len, area) = lens_closed_form(r, th);
        assert_abs_diff_eq!(m.beta, len, epsilon = 1e-12);
        assert_abs_diff_eq!(m.ell, 2.0 * len, epsilon = 1e-12);
        assert_abs_diff_eq!(m.area, area, epsilon = 1e-12);
    }

    #[test]
    fn square_enumeration_by_hand() {
        // the square itself plus the four triangles cut off by the two diagonals
        let polys = enumerate_polygons(&square(0.0), 4).unwrap();
        assert_eq!(polys.len(), 5);
        let mut areas: Vec<f64> = polys.iter().map(|p| polygon_measures(p).unwrap().area).collect();
        areas.sort_by(f64::total_cmp);
        for a in &areas[..4] {
            assert_abs_diff_eq!(*a, 0.5, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(areas[4], 1.0, epsilon = 1e-12);
        for p in &polys {
            let shoelace = polygon_signed_area(&p.vertices());
            assert_abs_diff_eq!(polygon_measures(p).unwrap().area, shoelace, epsilon = 1e-12);
        }
        let rep = check_solvability(&square(0.0), &polys).unwrap();
        assert!(rep.passed);
    }

    #[test]
    fn long_chords_have_no_interior_arcs() {
        // H = 0.6: radius 1/1.2 < half the diagonal of the unit square
        let polys = enumerate_polygons(&square(0.6), 4).unwrap();
        for p in &polys {
            for e in p.edges() {
                if e.provenance == EdgeProvenance::Interior {
                    let chord = (e.geometry.end() - e.geometry.start()).norm();
                    assert!(chord <= 2.0 / 1.2 + 1e-12);
                }
            }
        }
        assert!(polys.iter().any(|p| p.is_domain_boundary(&square(0.6))));
    }

    #[test]
    fn two_vertex_domain_gives_lens_type_polygons() {
        let h = 0.5;
        let a = ArcGeometry::circular(p2(0.0, 0.0), 1.0, 0.0, TAU - 2.0).unwrap();
        let c = ArcGeometry::circular(p2(0.0, 0.0), 1.0, TAU - 2.0, TAU).unwrap();
        let dom = DomainSpec::new(
            vec![ArcSpec::new(a, ArcLabel::A), ArcSpec::new(c, ArcLabel::C)],
            AmbientParams::new(0.0, h).unwrap(),
        )
        .unwrap();
        let polys = enumerate_polygons(&dom, 8).unwrap();
        assert!(polys.iter().all(|p| p.edges().len() == 2));
        // the boundary plus A closed by the reflection of C, and C closed by its reflection
        assert_eq!(polys.len(), 3, "{polys:#?}");
        let rep = check_solvability(&dom, &polys).unwrap();
        assert!(!rep.passed);
        assert!(rep.worst_margin < 0.0);
    }

    #[test]
    fn self_intersecting_polygon_rejected() {
        let bow = [p2(0.0, 0.0), p2(1.0, 1.0), p2(1.0, 0.0), p2(0.0, 1.0)];
        let edges = (0..4)
            .map(|i| PolygonEdge {
                geometry: ArcGeometry::segment(bow[i], bow[(i + 1) % 4]).unwrap(),
                provenance: EdgeProvenance::Interior,
            })
            .collect();
        let poly = PolygonSpec::new(edges).unwrap();
        assert!(matches!(polygon_measures(&poly), Err(Error::SelfIntersecting(_))));
    }
}
