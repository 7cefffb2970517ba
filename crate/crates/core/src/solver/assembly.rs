//! Element kernels of the weak form `int X_u . grad phi + 2H int phi`.
//!
//! The weak residual is the gradient of the convex energy
//! `E(u) = int W + 2H int u`, so the Jacobian is symmetric positive definite.

use rayon::prelude::*;

use crate::geom::P2;
use crate::mesh::Mesh;

/// Barycentric coordinates of the degree-2 three-point rule (weights 1/3).
pub const QUAD: [[f64; 3]; 3] = [[2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0], [1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0], [1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0]];

/// Per-element contributions.
#[derive(Debug, Clone, Copy, Default)]
pub struct Element {
    pub res: [f64; 3],
    /// Lower local Jacobian entries in the order 00, 11, 22, 10, 21, 20.
    pub jac: [f64; 6],
    pub energy: f64,
    pub grad_norm: f64,
    pub w_max: f64,
}

pub const LOCAL_PAIRS: [(usize, usize); 6] = [(0, 0), (1, 1), (2, 2), (1, 0), (2, 1), (2, 0)];

/// Quadrature points of triangle `t`.
pub fn quad_points(mesh: &Mesh, t: usize) -> [P2; 3] {
    let v = mesh.triangles()[t].map(|i| mesh.node(i));
    QUAD.map(|b| v[0] * b[0] + v[1] * b[1] + v[2] * b[2])
}

/// `(alpha, beta)` of the horizontal gradient at `q` for a triangle gradient `g`.
#[inline]
pub fn horizontal(q: &P2, g: &P2, tau: f64) -> P2 {
    P2::new(tau * q.y + g.x, -tau * q.x + g.y)
}

pub fn element(mesh: &Mesh, t: usize, u: &[f64], tau: f64, two_h: f64, with_jac: bool) -> Element {
    let tri = mesh.triangles()[t];
    let gphi = mesh.basis_gradients(t);
    let area = mesh.triangle_area(t);
    let g = gphi[0] * u[tri[0]] + gphi[1] * u[tri[1]] + gphi[2] * u[tri[2]];
    let wq = area / 3.0;
    let mut e = Element { grad_norm: g.norm(), ..Default::default() };
    for q in quad_points(mesh, t) {
        let p = horizontal(&q, &g, tau);
        let w = (1.0 + p.norm_squared()).sqrt();
        e.w_max = e.w_max.max(w);
        e.energy += wq * w;
        let x = p / w;
        for a in 0..3 {
            e.res[a] += wq * x.dot(&gphi[a]);
        }
        if with_jac {
            let w3 = w * w * w;
            for (k, &(a, b)) in LOCAL_PAIRS.iter().enumerate() {
                let ga = &gphi[a];
                let gb = &gphi[b];
                e.jac[k] += wq * (ga.dot(gb) / w - ga.dot(&p) * gb.dot(&p) / w3);
            }
        }
    }
    let load = two_h * area / 3.0;
    for a in 0..3 {
        e.res[a] += load;
        e.energy += load * u[tri[a]];
    }
    e
}

/// All element contributions, computed in parallel and returned in triangle order.
pub fn elements(mesh: &Mesh, u: &[f64], tau: f64, two_h: f64, with_jac: bool) -> Vec<Element> {
    (0..mesh.triangle_count())
        .into_par_iter()
        .with_min_len(256)
        .map(|t| element(mesh, t, u, tau, two_h, with_jac))
        .collect()
}

/// Nodal weak residual (all nodes, boundary rows included).
pub fn nodal_residual(mesh: &Mesh, els: &[Element]) -> Vec<f64> {
    let mut r = vec![0.0; mesh.node_count()];
    for (tri, e) in mesh.triangles().iter().zip(els) {
        for a in 0..3 {
            r[tri[a]] += e.res[a];
        }
    }
    r
}

pub fn energy(els: &[Element]) -> f64 {
    els.iter().map(|e| e.energy).sum()
}
