use std::collections::BTreeMap;

use serde::Serialize;

use super::SequenceRun;
use crate::domain::ArcLabel;
use crate::error::{Error, Result};
use crate::geom::{p2, P2};
use crate::mesh::ScalarField;

#[derive(Debug, Clone)]
pub struct DivergenceThresholds {
    /// Gradient above which the discrete graph is treated as vertical; `1/(2h)` when `None`.
    pub grad_cap: Option<f64>,
    /// Triangles with `|X_u| > locus_x` form the locus a line is fitted to.
    pub locus_x: f64,
    /// A node is still moving if its last increment exceeds this fraction of the level step.
    pub growth_ratio: f64,
    /// A triangle diverges when its gradient grows by at least this fraction of the level ratio
    /// `n_k / n_{k-1}` over each of the last two steps.
    pub gradient_growth: f64,
    /// Clusters with fewer triangles are ignored.
    pub min_cluster: usize,
    /// Loci whose bounding box diagonal is below this many `h` are corner singularities, not lines.
    pub min_extent: f64,
    /// Triangles within this many `h` of an A or B arc belong to the boundary layer, not to a line.
    pub boundary_band: f64,
    /// Farther out, a triangle still belongs to the layer of the nearest A or B arc when
    /// `|cos|` of the angle between its gradient and that arc's normal exceeds this.
    pub layer_alignment: f64,
    /// Fitted lines with an RMS residual above this many `h` are reported as not arc-like.
    pub arc_like_residual: f64,
    /// Anchor of the normalised sequence `u_n - u_n(p)`; the domain centroid when `None`.
    pub anchor: Option<P2>,
}

impl Default for DivergenceThresholds {
    fn default() -> Self {
        Self {
            grad_cap: None,
            locus_x: 0.99,
            growth_ratio: 0.1,
            gradient_growth: 0.75,
            min_cluster: 3,
            min_extent: 6.0,
            boundary_band: 2.0,
            layer_alignment: 0.9,
            arc_like_residual: 2.0,
            anchor: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivergenceLine {
    /// Centre of the circle of radius `1/(2H)` fitted to the locus.
    pub center: [f64; 2],
    pub radius: f64,
    /// Curvature of the unconstrained fit.
    pub curvature: f64,
    /// `+1` when `u` is larger on the side of the centre, `-1` otherwise.
    pub curvature_sign: i8,
    /// RMS distance of the locus to the constrained circle.
    pub fit_residual: f64,
    pub endpoints: [[f64; 2]; 2],
    /// Mean of `|<N, xi>| = 1/W` over the locus.
    pub vertical_normal: f64,
    pub locus_size: usize,
    pub arc_like: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct DivergenceReport {
    pub lines: Vec<DivergenceLine>,
    pub converged_fraction: f64,
    pub flux_trends: BTreeMap<usize, Vec<f64>>,
    #[serde(skip)]
    pub converged_mask: Vec<bool>,
    /// `u_n(p) - u_{n_0}(p)` at the anchor over the members.
    pub anchor_trend: Vec<f64>,
    pub grad_cap: f64,
}

impl DivergenceReport {
    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }
}

/// Weighted algebraic circle fit (Taubin), returning centre and radius.
pub fn fit_circle_taubin(pts: &[P2], weights: &[f64]) -> Option<(P2, f64)> {
    if pts.len() < 3 || weights.len() != pts.len() {
        return None;
    }
    let n: f64 = weights.iter().sum();
    let m = pts.iter().zip(weights).map(|(p, w)| p * *w).sum::<P2>() / n;
    let (mut mxx, mut myy, mut mxy, mut mxz, mut myz, mut mzz) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    for (p, w) in pts.iter().zip(weights) {
        let (x, y) = (p.x - m.x, p.y - m.y);
        let z = x * x + y * y;
        mxx += w * x * x;
        myy += w * y * y;
        mxy += w * x * y;
        mxz += w * x * z;
        myz += w * y * z;
        mzz += w * z * z;
    }
    let (mxx, myy, mxy, mxz, myz, mzz) = (mxx / n, myy / n, mxy / n, mxz / n, myz / n, mzz / n);
    let mz = mxx + myy;
    let cov_xy = mxx * myy - mxy * mxy;
    let var_z = mzz - mz * mz;
    let a3 = 4.0 * mz;
    let a2 = -3.0 * mz * mz - mzz;
    let a1 = var_z * mz + 4.0 * cov_xy * mz - mxz * mxz - myz * myz;
    let a0 = mxz * (mxz * myy - myz * mxy) + myz * (myz * mxx - mxz * mxy) - var_z * cov_xy;
    let (mut x, mut y) = (0.0, a0);
    for _ in 0..100 {
        let dy = a1 + x * (2.0 * a2 + 3.0 * a3 * x);
        let xn = x - y / dy;
        if xn == x || !xn.is_finite() {
            break;
        }
        let yn = a0 + xn * (a1 + xn * (a2 + xn * a3));
        if yn.abs() >= y.abs() {
            break;
        }
        x = xn;
        y = yn;
    }
    let det = x * x - x * mz + cov_xy;
    let cx = (mxz * (myy - x) - myz * mxy) / det / 2.0;
    let cy = (myz * (mxx - x) - mxz * mxy) / det / 2.0;
    let r = (cx * cx + cy * cy + mz).sqrt();
    (r.is_finite()).then(|| (p2(cx + m.x, cy + m.y), r))
}

/// Weighted least-squares centre of a circle of the given radius, by Gauss-Newton from `start`.
pub fn fit_circle_fixed_radius(pts: &[P2], weights: &[f64], radius: f64, start: P2) -> P2 {
    let mut c = start;
    for _ in 0..100 {
        let (mut jtj, mut jtr) = (nalgebra::Matrix2::<f64>::zeros(), P2::zeros());
        for (p, w) in pts.iter().zip(weights) {
            let d = p - c;
            let len = d.norm().max(1e-300);
            let jrow = -d / len;
            jtj += jrow * jrow.transpose() * *w;
            jtr += jrow * (len - radius) * *w;
        }
        let Some(step) = jtj.lu().solve(&(-jtr)) else { break };
        c += step;
        if step.norm() < 1e-14 * radius {
            break;
        }
    }
    c
}

fn x_norm(field: &ScalarField, t: usize, tau: f64) -> (f64, f64) {
    let q = field.mesh().centroid(t);
    let g = field.gradient(t);
    let p = p2(tau * q.y + g.x, -tau * q.x + g.y);
    let w = (1.0 + p.norm_squared()).sqrt();
    (p.norm() / w, 1.0 / w)
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn find(&mut self, i: usize) -> usize {
        let mut r = i;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut i = i;
        while self.0[i] != r {
            let next = self.0[i];
            self.0[i] = r;
            i = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Divergence set and divergence lines of a sequence, read off its last three members.
pub fn detect_divergence(run: &SequenceRun, th: &DivergenceThresholds) -> Result<DivergenceReport> {
    let k = run.len();
    if k < 3 {
        return Err(Error::InvalidParams(format!("divergence detection needs 3 members, got {k}")));
    }
    let mesh = run.mesh().clone();
    let dom = &run.domain;
    let params = dom.params();
    let h = mesh.h();
    let grad_cap = th.grad_cap.unwrap_or(1.0 / (2.0 * h));
    let g = |m: usize, t: usize| run.diagnostics[m].triangle_gradients[t];
    let level = |m: usize| run.n_values[m] as f64 / run.n_values[m - 1] as f64;
    let last = run.last();

    let band = th.boundary_band * h;
    let infinite: Vec<_> = dom.arcs().iter().filter(|a| a.label != ArcLabel::C).map(|a| &a.geometry).collect();
    let boundary_layer = |t: usize| {
        let q = mesh.centroid(t);
        let Some((arc, s, d)) = infinite
            .iter()
            .map(|a| {
                let s = a.closest_param(&q);
                (a, s, (a.point_at(s) - q).norm())
            })
            .min_by(|a, b| a.2.total_cmp(&b.2))
        else {
            return false;
        };
        if d < band {
            return true;
        }
        let grad = last.gradient(t);
        grad.norm() > 0.0 && arc.tangent_at(s).perp(&grad).abs() > th.layer_alignment * grad.norm()
    };
    let divergent: Vec<bool> = (0..mesh.triangle_count())
        .map(|t| {
            g(k - 1, t) > grad_cap
                && g(k - 1, t) >= th.gradient_growth * level(k - 1) * g(k - 2, t)
                && g(k - 2, t) >= th.gradient_growth * level(k - 2) * g(k - 3, t)
        })
        .collect();

    let mut node_divergent = vec![false; mesh.node_count()];
    for (t, tri) in mesh.triangles().iter().enumerate() {
        if divergent[t] {
            tri.iter().for_each(|&i| node_divergent[i] = true);
        }
    }
    let step = (run.n_values[k - 1] - run.n_values[k - 2]) as f64;
    let (prev, cur) = (run.fields[k - 2].values(), last.values());
    let converged_mask: Vec<bool> = (0..mesh.node_count())
        .map(|i| !node_divergent[i] && (cur[i] - prev[i]).abs() <= th.growth_ratio * step)
        .collect();
    let converged_fraction = converged_mask.iter().filter(|&&c| c).count() as f64 / mesh.node_count() as f64;

    // clusters of interior divergent triangles joined through shared nodes
    let line_tris: Vec<usize> =
        (0..mesh.triangle_count()).filter(|&t| divergent[t] && !boundary_layer(t)).collect();
    let mut dsu = Dsu((0..mesh.node_count()).collect());
    for &t in &line_tris {
        let tri = mesh.triangles()[t];
        dsu.union(tri[0], tri[1]);
        dsu.union(tri[1], tri[2]);
    }
    let mut clusters: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &t in &line_tris {
        let root = dsu.find(mesh.triangles()[t][0]);
        clusters.entry(root).or_default().push(t);
    }

    let mut lines = Vec::new();
    for tris in clusters.values().filter(|c| c.len() >= th.min_cluster) {
        let locus: Vec<(usize, f64)> = tris
            .iter()
            .filter_map(|&t| {
                let (x, nz) = x_norm(last, t, params.tau);
                (x > th.locus_x).then_some((t, nz))
            })
            .collect();
        let pts: Vec<P2> = locus.iter().map(|&(t, _)| mesh.centroid(t)).collect();
        let (lo, hi) = pts.iter().fold((P2::repeat(f64::INFINITY), P2::repeat(f64::NEG_INFINITY)), |(lo, hi), p| {
            (lo.inf(p), hi.sup(p))
        });
        if pts.is_empty() || (hi - lo).norm() < th.min_extent * h {
            continue;
        }
        let weights: Vec<f64> = locus.iter().map(|&(t, _)| g(k - 1, t).powi(2)).collect();
        if let Some(line) = fit_line(&pts, &weights, &locus, last, params.h, h, th) {
            lines.push(line);
        }
    }

    let anchor = th.anchor.unwrap_or_else(|| dom.centroid());
    let anchor_values: Vec<f64> = run.fields.iter().map(|f| f.eval(&anchor).unwrap_or(f64::NAN)).collect();
    let anchor_trend = anchor_values.iter().map(|v| v - anchor_values[0]).collect();
    let flux_trends = (0..dom.arcs().len()).map(|a| (a, run.flux_trend(a))).collect();
    Ok(DivergenceReport { lines, converged_fraction, flux_trends, converged_mask, anchor_trend, grad_cap })
}

fn fit_line(
    pts: &[P2],
    weights: &[f64],
    locus: &[(usize, f64)],
    field: &ScalarField,
    mean_h: f64,
    h: f64,
    th: &DivergenceThresholds,
) -> Option<DivergenceLine> {
    let (c0, r0) = fit_circle_taubin(pts, weights)?;
    let radius = if mean_h > 0.0 { 1.0 / (2.0 * mean_h) } else { r0 };
    let m = pts.iter().zip(weights).map(|(p, w)| p * *w).sum::<P2>() / weights.iter().sum::<f64>();
    let start = if (r0 - radius).abs() < 0.5 * radius {
        c0
    } else {
        let d = c0 - m;
        m + d / d.norm().max(1e-300) * radius
    };
    let c = fit_circle_fixed_radius(pts, weights, radius, start);
    let fit_residual = (pts.iter().zip(weights).map(|(p, w)| w * ((p - c).norm() - radius).powi(2)).sum::<f64>()
        / weights.iter().sum::<f64>())
    .sqrt();

    let mut side = 0.0;
    for &(t, _) in locus {
        let q = field.mesh().centroid(t);
        side += field.gradient(t).dot(&(c - q)).signum();
    }
    let curvature_sign = if side >= 0.0 { 1 } else { -1 };

    // the locus covers an angular range of the circle; its ends bound the widest gap
    let mut angles: Vec<f64> = pts.iter().map(|p| (p.y - c.y).atan2(p.x - c.x)).collect();
    angles.sort_by(f64::total_cmp);
    let n = angles.len();
    let (mut gap, mut at) = (angles[0] + std::f64::consts::TAU - angles[n - 1], 0);
    for i in 1..n {
        if angles[i] - angles[i - 1] > gap {
            gap = angles[i] - angles[i - 1];
            at = i;
        }
    }
    let (a0, a1) = (angles[at], angles[(at + n - 1) % n]);
    let on = |a: f64| [c.x + radius * a.cos(), c.y + radius * a.sin()];

    Some(DivergenceLine {
        center: [c.x, c.y],
        radius,
        curvature: 1.0 / r0,
        curvature_sign,
        fit_residual,
        endpoints: [on(a0), on(a1)],
        vertical_normal: locus.iter().map(|&(_, nz)| nz).sum::<f64>() / locus.len() as f64,
        locus_size: locus.len(),
        arc_like: fit_residual <= th.arc_like_residual * h,
    })
}

/// Last member restricted to the converged nodes whose last increment is below `seq_tol`,
/// with an Aitken correction where the increments shrink geometrically.
#[derive(Debug, Clone)]
pub struct LimitField {
    /// `NaN` outside `mask`.
    pub field: ScalarField,
    pub mask: Vec<bool>,
    pub max_increment: f64,
}

pub fn limit_solution(run: &SequenceRun, report: &DivergenceReport, seq_tol: f64) -> Result<LimitField> {
    let k = run.len();
    let cur = run.last().values();
    let prev = if k >= 2 { Some(run.fields[k - 2].values()) } else { None };
    let prev2 = if k >= 3 { Some(run.fields[k - 3].values()) } else { None };
    let mut values = vec![f64::NAN; cur.len()];
    let mut mask = vec![false; cur.len()];
    let mut max_increment: f64 = 0.0;
    for i in 0..cur.len() {
        let d2 = prev.map_or(0.0, |p| cur[i] - p[i]);
        if !report.converged_mask[i] || d2.abs() > seq_tol {
            continue;
        }
        mask[i] = true;
        max_increment = max_increment.max(d2.abs());
        let d1 = match (prev, prev2) {
            (Some(p), Some(q)) => p[i] - q[i],
            _ => 0.0,
        };
        values[i] = if d1 * d2 > 0.0 && d2.abs() < d1.abs() { cur[i] - d2 * d2 / (d2 - d1) } else { cur[i] };
    }
    if !mask.iter().any(|&m| m) {
        return Err(Error::NoConvergenceRegion);
    }
    Ok(LimitField { field: ScalarField::new(run.mesh().clone(), values)?, mask, max_increment })
}
