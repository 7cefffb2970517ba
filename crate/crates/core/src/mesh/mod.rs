//! Triangulations of curvilinear domains and nodal fields on them.
//!
//! Boundary nodes are placed on the arcs (uniform in arclength, spacing at most
//! `h`), interior nodes on a hexagonal lattice. The triangulation is a
//! constrained Delaunay triangulation followed by Laplacian smoothing. Curved
//! boundaries are represented by their chords; nested refinement snaps new
//! boundary nodes back onto the arcs.

mod field;
mod trace;

use std::collections::HashMap;
use std::io::Write;
use std::path::Path;

use spade::{ConstrainedDelaunayTriangulation, Point2, Triangulation};

pub use field::ScalarField;
pub use trace::{interior_curve_trace, Side, TraceSegment};

use crate::domain::{ArcGeometry, DomainSpec};
use crate::error::{Error, Result};
use crate::geom::{cross, p2, point_in_polygon, P2};

/// Minimum triangle area accepted.
pub const MIN_AREA: f64 = 1e-14;

/// Position of a boundary node: arc index and arclength along it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryTag {
    pub arc: usize,
    pub s: f64,
}

/// Boundary edge oriented counter-clockwise along the boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryEdge {
    pub nodes: [usize; 2],
    pub arc: usize,
    /// The one triangle containing the edge.
    pub triangle: usize,
}

#[derive(Debug, Clone)]
pub struct Mesh {
    nodes: Vec<P2>,
    triangles: Vec<[usize; 3]>,
    boundary: Vec<Option<BoundaryTag>>,
    boundary_edges: Vec<BoundaryEdge>,
    arcs: Vec<ArcGeometry>,
    h: f64,
    areas: Vec<f64>,
    /// Gradients of the three barycentric basis functions per triangle.
    grads: Vec<[P2; 3]>,
    locator: Locator,
}

impl Mesh {
    /// Assembles a mesh from raw parts; triangles are reoriented counter-clockwise.
    pub fn from_parts(
        nodes: Vec<P2>,
        mut triangles: Vec<[usize; 3]>,
        boundary: Vec<Option<BoundaryTag>>,
        arcs: Vec<ArcGeometry>,
        h: f64,
    ) -> Result<Self> {
        if boundary.len() != nodes.len() {
            return Err(Error::MeshGeneration("boundary tags do not match nodes".into()));
        }
        let mut areas = Vec::with_capacity(triangles.len());
        let mut grads = Vec::with_capacity(triangles.len());
        for (t, tri) in triangles.iter_mut().enumerate() {
            if tri.iter().any(|&i| i >= nodes.len()) {
                return Err(Error::MeshGeneration(format!("triangle {t} references a missing node")));
            }
            let [a, b, c] = tri.map(|i| nodes[i]);
            let mut area2 = cross(&(b - a), &(c - a));
            if area2 < 0.0 {
                tri.swap(1, 2);
                area2 = -area2;
            }
            if 0.5 * area2 <= MIN_AREA {
                return Err(Error::DegenerateTriangle(t));
            }
            let [a, b, c] = tri.map(|i| nodes[i]);
            // grad phi_a is the inward normal of the opposite edge over twice the area
            let g = |p: P2, q: P2| p2(p.y - q.y, q.x - p.x) / area2;
            grads.push([g(b, c), g(c, a), g(a, b)]);
            areas.push(0.5 * area2);
        }
        let boundary_edges = collect_boundary_edges(&triangles, &boundary)?;
        let locator = Locator::new(&nodes, &triangles, h);
        Ok(Self { nodes, triangles, boundary, boundary_edges, arcs, h, areas, grads, locator })
    }

    pub fn nodes(&self) -> &[P2] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> P2 {
        self.nodes[i]
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    /// Target edge length.
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn arcs(&self) -> &[ArcGeometry] {
        &self.arcs
    }

    pub fn boundary_tag(&self, i: usize) -> Option<BoundaryTag> {
        self.boundary[i]
    }

    pub fn is_boundary(&self, i: usize) -> bool {
        self.boundary[i].is_some()
    }

    /// Boundary nodes with their tags, in counter-clockwise order.
    pub fn boundary_nodes(&self) -> impl Iterator<Item = (usize, BoundaryTag)> + '_ {
        self.boundary_edges.iter().map(|e| (e.nodes[0], self.boundary[e.nodes[0]].expect("boundary node")))
    }

    pub fn boundary_node_count(&self) -> usize {
        self.boundary_edges.len()
    }

    pub fn boundary_edges(&self) -> &[BoundaryEdge] {
        &self.boundary_edges
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        self.areas[t]
    }

    pub fn basis_gradients(&self, t: usize) -> &[P2; 3] {
        &self.grads[t]
    }

    pub fn centroid(&self, t: usize) -> P2 {
        let [a, b, c] = self.triangles[t];
        (self.nodes[a] + self.nodes[b] + self.nodes[c]) / 3.0
    }

    pub fn area(&self) -> f64 {
        self.areas.iter().sum()
    }

    /// Smallest interior angle over all triangles, in degrees.
    pub fn min_angle(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.triangle_min_angle(t)).fold(180.0, f64::min)
    }

    pub fn triangle_min_angle(&self, t: usize) -> f64 {
        let p = self.triangles[t].map(|i| self.nodes[i]);
        (0..3)
            .map(|k| {
                let (a, b, c) = (p[k], p[(k + 1) % 3], p[(k + 2) % 3]);
                let (u, v) = (b - a, c - a);
                cross(&u, &v).abs().atan2(u.dot(&v)).to_degrees()
            })
            .fold(180.0, f64::min)
    }

    /// Triangle containing `p` and the barycentric coordinates of `p` in it.
    pub fn locate(&self, p: &P2) -> Option<(usize, [f64; 3])> {
        self.locator.locate(p, self)
    }

    /// Triangle containing `p`, or the nearest one when `p` lies within `tol` of the mesh.
    pub fn locate_near(&self, p: &P2, tol: f64) -> Option<usize> {
        if let Some((t, _)) = self.locate(p) {
            return Some(t);
        }
        self.locator.nearest(p, tol, self)
    }

    pub fn barycentric(&self, t: usize, p: &P2) -> [f64; 3] {
        let [a, b, c] = self.triangles[t].map(|i| self.nodes[i]);
        let area2 = 2.0 * self.areas[t];
        [cross(&(b - p), &(c - p)) / area2, cross(&(c - p), &(a - p)) / area2, cross(&(a - p), &(b - p)) / area2]
    }

    /// Uniform red refinement; new boundary nodes are placed on their arcs.
    pub fn refine(&self) -> Result<Self> {
        let mut nodes = self.nodes.clone();
        let mut boundary = self.boundary.clone();
        let mut mid: HashMap<(usize, usize), usize> = HashMap::new();
        let bedge: HashMap<(usize, usize), usize> =
            self.boundary_edges.iter().map(|e| (key(e.nodes[0], e.nodes[1]), e.arc)).collect();
        let mut tris = Vec::with_capacity(4 * self.triangles.len());
        for tri in &self.triangles {
            let mut m = [0usize; 3];
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                let kk = key(a, b);
                m[k] = *mid.entry(kk).or_insert_with(|| {
                    let idx = nodes.len();
                    if let Some(&arc) = bedge.get(&kk) {
                        let (ta, tb) = (self.boundary[a].unwrap(), self.boundary[b].unwrap());
                        let geom = &self.arcs[arc];
                        let s_of = |t: BoundaryTag| if t.arc == arc { t.s } else { geom.length() };
                        // the edge end on the next arc sits at s = 0 there and at s = L here
                        let (sa, sb) = if ta.arc == arc && tb.arc == arc {
                            (ta.s, tb.s)
                        } else if ta.arc == arc {
                            (ta.s, s_of(tb))
                        } else {
                            (tb.s, s_of(ta))
                        };
                        let s = 0.5 * (sa + sb);
                        nodes.push(geom.point_at(s));
                        boundary.push(Some(BoundaryTag { arc, s }));
                    } else {
                        nodes.push((self.nodes[a] + self.nodes[b]) * 0.5);
                        boundary.push(None);
                    }
                    idx
                });
            }
            let [a, b, c] = *tri;
            tris.push([a, m[0], m[2]]);
            tris.push([m[0], b, m[1]]);
            tris.push([m[2], m[1], c]);
            tris.push([m[0], m[1], m[2]]);
        }
        Self::from_parts(nodes, tris, boundary, self.arcs.clone(), 0.5 * self.h)
    }

    /// Node table `id,x,y,arc,s` (arc and s empty for interior nodes).
    pub fn write_nodes_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["id", "x", "y", "arc", "s"])?;
        for (i, p) in self.nodes.iter().enumerate() {
            let (arc, s) = match self.boundary[i] {
                Some(t) => (t.arc.to_string(), format!("{:.17e}", t.s)),
                None => (String::new(), String::new()),
            };
            w.write_record([i.to_string(), format!("{:.17e}", p.x), format!("{:.17e}", p.y), arc, s])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Triangle table `id,a,b,c`.
    pub fn write_triangles_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(f, "id,a,b,c")?;
        for (t, [a, b, c]) in self.triangles.iter().enumerate() {
            writeln!(f, "{t},{a},{b},{c}")?;
        }
        f.flush()?;
        Ok(())
    }
}

fn key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

fn collect_boundary_edges(
    triangles: &[[usize; 3]],
    boundary: &[Option<BoundaryTag>],
) -> Result<Vec<BoundaryEdge>> {
    let mut count: HashMap<(usize, usize), (usize, usize, usize)> = HashMap::new();
    for (t, tri) in triangles.iter().enumerate() {
        for k in 0..3 {
            let (a, b) = (tri[k], tri[(k + 1) % 3]);
            let e = count.entry(key(a, b)).or_insert((0, 0, 0));
            e.0 += 1;
            // keep the orientation seen from the owning triangle (counter-clockwise)
            e.1 = t;
            e.2 = a;
        }
    }
    let mut next: HashMap<usize, (usize, usize)> = HashMap::new();
    for (&(a, b), &(n, t, from)) in &count {
        if n == 1 {
            let to = if from == a { b } else { a };
            if next.insert(from, (to, t)).is_some() {
                return Err(Error::MeshGeneration(format!("boundary is not a single loop at node {from}")));
            }
        }
    }
    if next.is_empty() {
        return Ok(Vec::new());
    }
    for &n in next.keys() {
        if boundary[n].is_none() {
            return Err(Error::MeshGeneration(format!("untagged node {n} on the mesh boundary")));
        }
    }
    // start at the node with the smallest (arc, s) so the loop order follows the arcs
    let start = *next
        .keys()
        .min_by(|&&x, &&y| {
            let (tx, ty) = (boundary[x].unwrap(), boundary[y].unwrap());
            (tx.arc, tx.s).partial_cmp(&(ty.arc, ty.s)).unwrap()
        })
        .unwrap();
    let mut edges = Vec::with_capacity(next.len());
    let mut at = start;
    loop {
        let (to, t) = next[&at];
        // nodes are tagged with the arc they start, so the edge belongs to its first node's arc
        let arc = boundary[at].unwrap().arc;
        edges.push(BoundaryEdge { nodes: [at, to], arc, triangle: t });
        at = to;
        if at == start {
            break;
        }
        if edges.len() > next.len() {
            return Err(Error::MeshGeneration("boundary loop does not close".into()));
        }
    }
    if edges.len() != next.len() {
        return Err(Error::MeshGeneration("mesh boundary has several components".into()));
    }
    Ok(edges)
}

/// Builds a triangulation of `dom` with target edge length `h`.
pub fn build_mesh(dom: &DomainSpec, h: f64) -> Result<Mesh> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::InvalidParams(format!("mesh size must be positive, got {h}")));
    }
    let mut nodes: Vec<P2> = Vec::new();
    let mut boundary: Vec<Option<BoundaryTag>> = Vec::new();
    for (i, a) in dom.arcs().iter().enumerate() {
        let g = &a.geometry;
        let l = g.length();
        let n = (l / h).ceil().max(1.0) as usize;
        if g.is_curved() && n + 1 < 4 {
            return Err(Error::MeshResolution { arc: i, h, samples: n + 1 });
        }
        for k in 0..n {
            let s = l * k as f64 / n as f64;
            nodes.push(g.point_at(s));
            boundary.push(Some(BoundaryTag { arc: i, s }));
        }
    }
    let nb = nodes.len();
    let poly: Vec<P2> = nodes.clone();

    // interior lattice
    let (mut lo, mut hi) = (P2::repeat(f64::INFINITY), P2::repeat(f64::NEG_INFINITY));
    for p in dom.outline(128) {
        lo = lo.inf(&p);
        hi = hi.sup(&p);
    }
    let dy = h * 3f64.sqrt() / 2.0;
    let rows = ((hi.y - lo.y) / dy).floor() as usize + 1;
    let cols = ((hi.x - lo.x) / h).floor() as usize + 2;
    // centre the lattice in the bounding box
    let y0 = lo.y + 0.5 * ((hi.y - lo.y) - (rows - 1) as f64 * dy);
    let x0 = lo.x + 0.5 * ((hi.x - lo.x) - (cols - 1) as f64 * h);
    for j in 0..rows {
        let y = y0 + j as f64 * dy;
        let shift = if j % 2 == 1 { 0.5 * h } else { 0.0 };
        for i in 0..cols {
            let p = p2(x0 + i as f64 * h + shift - 0.25 * h, y);
            if point_in_polygon(&p, &poly) && dom.contains(&p) && dom.distance_to_boundary(&p) >= 0.6 * h {
                nodes.push(p);
                boundary.push(None);
            }
        }
    }

    let mut tris = triangulate(&nodes, nb, &poly)?;
    for _ in 0..3 {
        smooth(&mut nodes, &tris, nb, &poly, 4);
        tris = triangulate(&nodes, nb, &poly)?;
    }
    let arcs = dom.arcs().iter().map(|a| a.geometry.clone()).collect();
    Mesh::from_parts(nodes, tris, boundary, arcs, h)
}

fn triangulate(nodes: &[P2], nb: usize, poly: &[P2]) -> Result<Vec<[usize; 3]>> {
    let verts: Vec<Point2<f64>> = nodes.iter().map(|p| Point2::new(p.x, p.y)).collect();
    let edges: Vec<[usize; 2]> = (0..nb).map(|i| [i, (i + 1) % nb]).collect();
    let mut conflict = false;
    let cdt: ConstrainedDelaunayTriangulation<Point2<f64>> =
        ConstrainedDelaunayTriangulation::try_bulk_load_cdt(verts, edges, |_| conflict = true)
            .map_err(|e| Error::MeshGeneration(format!("{e:?}")))?;
    if conflict {
        return Err(Error::MeshGeneration("boundary constraints intersect".into()));
    }
    if cdt.num_vertices() != nodes.len() {
        return Err(Error::MeshGeneration("duplicate mesh nodes".into()));
    }
    let mut tris = Vec::new();
    for f in cdt.inner_faces() {
        let v = f.vertices().map(|v| v.fix().index());
        let c = (nodes[v[0]] + nodes[v[1]] + nodes[v[2]]) / 3.0;
        if point_in_polygon(&c, poly) {
            tris.push(v);
        }
    }
    Ok(tris)
}

fn smooth(nodes: &mut [P2], tris: &[[usize; 3]], nb: usize, poly: &[P2], sweeps: usize) {
    let n = nodes.len();
    let mut nbrs: Vec<Vec<usize>> = vec![Vec::new(); n];
    for t in tris {
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            nbrs[a].push(b);
            nbrs[b].push(a);
        }
    }
    for l in &mut nbrs {
        l.sort_unstable();
        l.dedup();
    }
    for _ in 0..sweeps {
        for i in nb..n {
            if nbrs[i].is_empty() {
                continue;
            }
            let avg = nbrs[i].iter().fold(P2::zeros(), |acc, &j| acc + nodes[j]) / nbrs[i].len() as f64;
            if point_in_polygon(&avg, poly) {
                nodes[i] = avg;
            }
        }
    }
}

/// Uniform bucket grid over triangle bounding boxes.
#[derive(Debug, Clone)]
struct Locator {
    lo: P2,
    cell: f64,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<u32>>,
}

impl Locator {
    fn new(nodes: &[P2], tris: &[[usize; 3]], h: f64) -> Self {
        let (mut lo, mut hi) = (P2::repeat(f64::INFINITY), P2::repeat(f64::NEG_INFINITY));
        for p in nodes {
            lo = lo.inf(p);
            hi = hi.sup(p);
        }
        if nodes.is_empty() {
            lo = P2::zeros();
            hi = P2::zeros();
        }
        let cell = if h > 0.0 { 2.0 * h } else { 1.0 };
        let nx = ((hi.x - lo.x) / cell).floor() as usize + 1;
        let ny = ((hi.y - lo.y) / cell).floor() as usize + 1;
        let mut buckets = vec![Vec::new(); nx * ny];
        for (t, tri) in tris.iter().enumerate() {
            let p = tri.map(|i| nodes[i]);
            let (tlo, thi) = (p[0].inf(&p[1]).inf(&p[2]), p[0].sup(&p[1]).sup(&p[2]));
            let (i0, j0) = cell_of(&tlo, &lo, cell, nx, ny);
            let (i1, j1) = cell_of(&thi, &lo, cell, nx, ny);
            for j in j0..=j1 {
                for i in i0..=i1 {
                    buckets[j * nx + i].push(t as u32);
                }
            }
        }
        Self { lo, cell, nx, ny, buckets }
    }

    fn locate(&self, p: &P2, mesh: &Mesh) -> Option<(usize, [f64; 3])> {
        if !p.x.is_finite() || !p.y.is_finite() {
            return None;
        }
        let (i, j) = cell_of(p, &self.lo, self.cell, self.nx, self.ny);
        let mut best: Option<(usize, [f64; 3], f64)> = None;
        for &t in &self.buckets[j * self.nx + i] {
            let b = mesh.barycentric(t as usize, p);
            let worst = b[0].min(b[1]).min(b[2]);
            if worst >= -1e-12 && best.map_or(true, |(_, _, w)| worst > w) {
                best = Some((t as usize, b, worst));
            }
        }
        best.map(|(t, b, _)| (t, b))
    }

    fn nearest(&self, p: &P2, tol: f64, mesh: &Mesh) -> Option<usize> {
        let r = (tol / self.cell).ceil() as isize;
        let (ci, cj) = cell_of(p, &self.lo, self.cell, self.nx, self.ny);
        let mut best: Option<(usize, f64)> = None;
        for dj in -r..=r {
            for di in -r..=r {
                let (i, j) = (ci as isize + di, cj as isize + dj);
                if i < 0 || j < 0 || i >= self.nx as isize || j >= self.ny as isize {
                    continue;
                }
                for &t in &self.buckets[j as usize * self.nx + i as usize] {
                    let d = dist_to_triangle(p, mesh, t as usize);
                    if d <= tol && best.map_or(true, |(_, bd)| d < bd) {
                        best = Some((t as usize, d));
                    }
                }
            }
        }
        best.map(|(t, _)| t)
    }
}

fn cell_of(p: &P2, lo: &P2, cell: f64, nx: usize, ny: usize) -> (usize, usize) {
    let i = ((p.x - lo.x) / cell).floor().clamp(0.0, (nx - 1) as f64) as usize;
    let j = ((p.y - lo.y) / cell).floor().clamp(0.0, (ny - 1) as f64) as usize;
    (i, j)
}

fn dist_to_triangle(p: &P2, mesh: &Mesh, t: usize) -> f64 {
    let b = mesh.barycentric(t, p);
    if b.iter().all(|&x| x >= 0.0) {
        return 0.0;
    }
    let v = mesh.triangles[t].map(|i| mesh.nodes[i]);
    (0..3)
        .map(|k| crate::geom::dist_point_segment(p, &v[k], &v[(k + 1) % 3]))
        .fold(f64::INFINITY, f64::min)
}
