//! Flux of a solution across curves: `F_u(gamma) = int_gamma <X_u, nu> ds`.
//!
//! Boundary arcs are integrated edge by edge with the gradient of the one
//! adjacent triangle (first order accurate); interior curves are traced through
//! the mesh and integrated with the midpoint rule. Every integral also reports a
//! quadrature tolerance: the same integral of `|<X_tri - X_rec, nu>|`, where
//! `X_rec` uses area-weighted recovered nodal gradients.

use serde::Serialize;

use crate::ambient::AmbientParams;
use crate::domain::{Curve, GEOM_TOL};
use crate::error::{Error, Result};
use crate::geom::{p2, P2};
use crate::mesh::{interior_curve_trace, Mesh, ScalarField, Side};
use crate::solver::Solution;

/// Gauss-Legendre nodes on `[0, 1]` and weights.
const GAUSS3: [(f64, f64); 3] = [
    (0.112_701_665_379_258_31, 5.0 / 18.0),
    (0.5, 8.0 / 18.0),
    (0.887_298_334_620_741_7, 5.0 / 18.0),
];

#[inline]
fn x_of(q: &P2, g: &P2, tau: f64) -> P2 {
    let p = p2(tau * q.y + g.x, -tau * q.x + g.y);
    p / (1.0 + p.norm_squared()).sqrt()
}

/// Area-weighted average of the triangle gradients around each node.
pub fn recovered_gradients(field: &ScalarField) -> Vec<P2> {
    let mesh = field.mesh();
    let mut acc = vec![P2::zeros(); mesh.node_count()];
    let mut wsum = vec![0.0; mesh.node_count()];
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let a = mesh.triangle_area(t);
        let g = field.gradient(t) * a;
        for &i in tri {
            acc[i] += g;
            wsum[i] += a;
        }
    }
    acc.iter().zip(&wsum).map(|(g, w)| if *w > 0.0 { g / *w } else { *g }).collect()
}

fn recovered_at(mesh: &Mesh, rec: &[P2], t: usize, q: &P2) -> P2 {
    let b = mesh.barycentric(t, q);
    let tri = mesh.triangles()[t];
    rec[tri[0]] * b[0] + rec[tri[1]] * b[1] + rec[tri[2]] * b[2]
}

/// A flux value with the length it was integrated over and its quadrature tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LineFlux {
    pub flux: f64,
    pub length: f64,
    pub quad_tol: f64,
}

/// Flux across boundary arc `arc` with the outward normal.
pub fn flux_boundary_arc(field: &ScalarField, params: &AmbientParams, arc: usize) -> Result<LineFlux> {
    let mesh = field.mesh();
    if arc >= mesh.arcs().len() {
        return Err(Error::InvalidParams(format!("no boundary arc {arc}")));
    }
    let rec = recovered_gradients(field);
    let mut out = LineFlux { flux: 0.0, length: 0.0, quad_tol: 0.0 };
    for e in mesh.boundary_edges().iter().filter(|e| e.arc == arc) {
        let (a, b) = (mesh.node(e.nodes[0]), mesh.node(e.nodes[1]));
        let d = b - a;
        let len = d.norm();
        let nu = p2(d.y, -d.x) / len;
        let g = field.gradient(e.triangle);
        for (s, w) in GAUSS3 {
            let q = a + d * s;
            let x = x_of(&q, &g, params.tau);
            let xr = x_of(&q, &recovered_at(mesh, &rec, e.triangle, &q), params.tau);
            out.flux += w * len * x.dot(&nu);
            out.quad_tol += w * len * (x - xr).dot(&nu).abs();
        }
        out.length += len;
    }
    Ok(out)
}

/// Flux across an interior curve with the normal on `side` of the direction of travel.
pub fn flux_line(field: &ScalarField, params: &AmbientParams, gamma: &Curve, side: Side) -> Result<LineFlux> {
    let mesh = field.mesh();
    let trace = interior_curve_trace(mesh, gamma, side)?;
    if trace.is_empty() {
        return Err(Error::CurveExitsDomain { x: gamma.start().x, y: gamma.start().y });
    }
    let rec = recovered_gradients(field);
    let mut out = LineFlux { flux: 0.0, length: 0.0, quad_tol: 0.0 };
    for seg in &trace {
        let g = field.gradient(seg.triangle);
        let x = x_of(&seg.midpoint, &g, params.tau);
        let xr = x_of(&seg.midpoint, &recovered_at(mesh, &rec, seg.triangle, &seg.midpoint), params.tau);
        out.flux += seg.weight * x.dot(&seg.normal);
        out.quad_tol += seg.weight * (x - xr).dot(&seg.normal).abs();
        out.length += seg.weight;
    }
    Ok(out)
}

/// Flux of `gamma` through the region `Delta` bounded by `gamma` and `zeta`:
/// `2H A(Delta) - int_zeta <X_u, nu>`, `nu` pointing out of `Delta`.
///
/// Either `zeta` runs inside the domain from the end of `gamma` back to its
/// start (so `gamma` then `zeta` is counter-clockwise), or both curves are
/// closed, counter-clockwise, and `zeta` lies inside `gamma`.
pub fn flux_area_form(field: &ScalarField, params: &AmbientParams, gamma: &Curve, zeta: &Curve) -> Result<AreaFlux> {
    let tol = 1e-7 * (1.0 + gamma.length());
    let (area, side) = if gamma.is_closed() && zeta.is_closed() {
        let (ga, za) = (gamma.area_term(), zeta.area_term());
        if !(ga > 0.0 && za > 0.0 && za < ga) {
            return Err(Error::NotClosed("closed curves must be counter-clockwise and nested".into()));
        }
        (ga - za, Side::Left)
    } else {
        let g1 = (zeta.start() - gamma.end()).norm();
        let g2 = (zeta.end() - gamma.start()).norm();
        if g1 > tol || g2 > tol {
            return Err(Error::NotClosed(format!("endpoint gaps {g1:.3e} and {g2:.3e}")));
        }
        let a = gamma.area_term() + zeta.area_term();
        if !(a > GEOM_TOL) {
            return Err(Error::NotClosed("gamma followed by zeta is not counter-clockwise".into()));
        }
        (a, Side::Right)
    };
    let line = flux_line(field, params, zeta, side)?;
    Ok(AreaFlux { flux: 2.0 * params.h * area - line.flux, area, zeta: line })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AreaFlux {
    pub flux: f64,
    /// Area of the region between the two curves.
    pub area: f64,
    pub zeta: LineFlux,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArcFluxEntry {
    pub id: usize,
    /// Exact arc length.
    pub length: f64,
    pub flux: f64,
    /// `length - |flux|`
    pub margin: f64,
    pub quad_tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FluxReport {
    pub arcs: Vec<ArcFluxEntry>,
    pub area: f64,
    pub total: f64,
    /// `total - 2H area`
    pub balance_residual: f64,
    /// `|balance_residual| / (2H area)`, or relative to the perimeter when `H = 0`.
    pub relative_residual: f64,
}

/// Boundary fluxes of every arc and the balance `sum F = 2H A(Omega)`.
pub fn flux_balance(field: &ScalarField, params: &AmbientParams) -> Result<FluxReport> {
    let mesh = field.mesh();
    let mut arcs = Vec::with_capacity(mesh.arcs().len());
    for (id, g) in mesh.arcs().iter().enumerate() {
        let f = flux_boundary_arc(field, params, id)?;
        let length = g.length();
        arcs.push(ArcFluxEntry { id, length, flux: f.flux, margin: length - f.flux.abs(), quad_tol: f.quad_tol });
    }
    let area: f64 = mesh.arcs().iter().map(|a| a.area_term()).sum();
    let total: f64 = arcs.iter().map(|a| a.flux).sum();
    let balance_residual = total - 2.0 * params.h * area;
    let perimeter: f64 = arcs.iter().map(|a| a.length).sum();
    let scale = if params.h > 0.0 { 2.0 * params.h * area } else { perimeter };
    Ok(FluxReport { arcs, area, total, balance_residual, relative_residual: balance_residual.abs() / scale })
}

/// `|gamma| - |F_u(gamma)|` for a boundary arc; positive for fields continuous up to the arc.
pub fn strict_interior_bound_check(sol: &Solution, params: &AmbientParams, arc: usize) -> Result<f64> {
    if sol.flagged_blowup {
        return Err(Error::NotApplicable("field is flagged for gradient blow-up".into()));
    }
    let f = flux_boundary_arc(&sol.field, params, arc)?;
    Ok(sol.field.mesh().arcs()[arc].length() - f.flux.abs())
}
