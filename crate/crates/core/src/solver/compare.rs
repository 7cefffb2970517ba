use serde::Serialize;

use super::assembly::{horizontal, quad_points};
use crate::ambient::AmbientParams;
use crate::error::Result;
use crate::mesh::ScalarField;

/// Per-triangle `<grad u - grad v, X_u - X_v>`, averaged over the quadrature points.
/// Nonnegative, and zero only where the gradients agree.
pub fn monotonicity_pairing(u: &ScalarField, v: &ScalarField, params: &AmbientParams) -> Result<Vec<f64>> {
    u.check_same_mesh(v)?;
    let mesh = u.mesh();
    Ok((0..mesh.triangle_count())
        .map(|t| {
            let (gu, gv) = (u.gradient(t), v.gradient(t));
            let d = gu - gv;
            quad_points(mesh, t)
                .iter()
                .map(|q| {
                    let pu = horizontal(q, &gu, params.tau);
                    let pv = horizontal(q, &gv, params.tau);
                    let xu = pu / (1.0 + pu.norm_squared()).sqrt();
                    let xv = pv / (1.0 + pv.norm_squared()).sqrt();
                    d.dot(&(xu - xv))
                })
                .sum::<f64>()
                / 3.0
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    /// `u >= v - tol` holds on the boundary, so the check was run.
    pub applicable: bool,
    pub passed: bool,
    /// Smallest `u - v` over interior nodes.
    pub interior_min: f64,
    /// Smallest `u - v` over boundary nodes.
    pub boundary_min: f64,
    pub tol: f64,
}

/// Discrete maximum principle: `u >= v` on the boundary implies `u >= v` inside.
pub fn verify_comparison(u: &ScalarField, v: &ScalarField, tol: f64) -> Result<ComparisonReport> {
    u.check_same_mesh(v)?;
    let mesh = u.mesh();
    let (mut interior_min, mut boundary_min) = (f64::INFINITY, f64::INFINITY);
    for i in 0..mesh.node_count() {
        let d = u.value(i) - v.value(i);
        if mesh.is_boundary(i) {
            boundary_min = boundary_min.min(d);
        } else {
            interior_min = interior_min.min(d);
        }
    }
    let applicable = boundary_min >= -tol;
    Ok(ComparisonReport { applicable, passed: applicable && interior_min >= -tol, interior_min, boundary_min, tol })
}
