//! Geometry of `Nil3(tau) = (R^3, dx^2 + dy^2 + (tau (y dx - x dy) + dz)^2)`.
//!
//! The Riemannian submersion `(x, y, z) -> (x, y)` onto the Euclidean plane has
//! bundle curvature `tau`; the fibres are generated by the unit Killing field
//! `xi = d/dz`. Everything here works in the left-invariant orthonormal frame
//!
//! ```text
//! E1 = dx - tau*y dz,   E2 = dy + tau*x dz,   E3 = xi = dz
//! ```
//!
//! whose brackets are `[E1, E2] = 2 tau E3` and `[E1, E3] = [E2, E3] = 0`.
//! The isometry group is four dimensional: translations generated by the Killing
//! fields `F1 = dx + tau*y dz`, `F2 = dy - tau*x dz`, `F3 = dz` and rotations
//! about the z-axis generated by `F4 = -y dx + x dy`.
//!
//! Curvature convention: `R(X, Y) Z = D_X D_Y Z - D_Y D_X Z - D_[X,Y] Z`, so the
//! sectional curvature of a plane spanned by orthonormal `X, Y` is
//! `<R(X, Y) Y, X>`.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Bundle curvature `tau` and the prescribed mean curvature `h` (upward normal).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmbientParams {
    pub tau: f64,
    pub h: f64,
}

impl AmbientParams {
    pub fn new(tau: f64, h: f64) -> Result<Self> {
        if !tau.is_finite() || !h.is_finite() {
            return Err(Error::InvalidParams(format!("non-finite tau={tau} or H={h}")));
        }
        if h < 0.0 {
            return Err(Error::InvalidParams(format!("mean curvature must be >= 0, got {h}")));
        }
        Ok(Self { tau, h })
    }

    /// Radius of the planar circles of geodesic curvature `2H`; infinite when `H = 0`.
    pub fn arc_radius(&self) -> f64 {
        if self.h == 0.0 {
            f64::INFINITY
        } else {
            1.0 / (2.0 * self.h)
        }
    }
}

/// Components of a tangent vector in the frame `{E1, E2, E3}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameVector {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl FrameVector {
    pub fn new(c1: f64, c2: f64, c3: f64) -> Self {
        Self { c1, c2, c3 }
    }

    pub fn as_vector(&self) -> Vector3<f64> {
        Vector3::new(self.c1, self.c2, self.c3)
    }

    pub fn from_vector(v: &Vector3<f64>) -> Self {
        Self::new(v.x, v.y, v.z)
    }

    /// The frame is orthonormal, so this is the Nil norm.
    pub fn norm(&self) -> f64 {
        self.as_vector().norm()
    }
}

/// First and second order data of `u` at a base point.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GraphJet {
    pub x: f64,
    pub y: f64,
    pub u: f64,
    pub ux: f64,
    pub uy: f64,
    pub uxx: f64,
    pub uxy: f64,
    pub uyy: f64,
}

impl GraphJet {
    pub fn first_order(x: f64, y: f64, ux: f64, uy: f64) -> Self {
        Self { x, y, ux, uy, ..Default::default() }
    }
}

/// `g(v, w)` at `p` for coordinate vectors `v`, `w`.
pub fn metric_eval(p: &Vector3<f64>, v: &Vector3<f64>, w: &Vector3<f64>, params: &AmbientParams) -> f64 {
    let tau = params.tau;
    let vert = |a: &Vector3<f64>| tau * (p.y * a.x - p.x * a.y) + a.z;
    v.x * w.x + v.y * w.y + vert(v) * vert(w)
}

/// Coordinate expressions of `E1`, `E2`, `xi` at `p`.
pub fn frame_at(p: &Vector3<f64>, params: &AmbientParams) -> [Vector3<f64>; 3] {
    let tau = params.tau;
    [
        Vector3::new(1.0, 0.0, -tau * p.y),
        Vector3::new(0.0, 1.0, tau * p.x),
        Vector3::new(0.0, 0.0, 1.0),
    ]
}

/// Connection operators: column `j` of `connection_matrices(tau)[i]` holds the
/// frame components of `D_{E_i} E_j`.
///
/// ```text
/// D_E1 E1 = 0        D_E1 E2 =  tau E3   D_E1 E3 = -tau E2
/// D_E2 E1 = -tau E3  D_E2 E2 = 0         D_E2 E3 =  tau E1
/// D_E3 E1 = -tau E2  D_E3 E2 =  tau E1   D_E3 E3 = 0
/// ```
pub fn connection_matrices(tau: f64) -> [Matrix3<f64>; 3] {
    let t = tau;
    [
        Matrix3::new(
            0.0, 0.0, 0.0, //
            0.0, 0.0, -t, //
            0.0, t, 0.0,
        ),
        Matrix3::new(
            0.0, 0.0, t, //
            0.0, 0.0, 0.0, //
            -t, 0.0, 0.0,
        ),
        Matrix3::new(
            0.0, t, 0.0, //
            -t, 0.0, 0.0, //
            0.0, 0.0, 0.0,
        ),
    ]
}

/// Frame components of `D_{E_i} E_j` read off the hard-coded table.
pub fn connection(i: usize, j: usize, tau: f64) -> Vector3<f64> {
    connection_matrices(tau)[i].column(j).into_owned()
}

fn bracket(a: &Vector3<f64>, b: &Vector3<f64>, tau: f64) -> Vector3<f64> {
    // only [E1, E2] = 2 tau E3 survives
    Vector3::new(0.0, 0.0, 2.0 * tau * (a.x * b.y - a.y * b.x))
}

/// Curvature tensor on constant-coefficient (left-invariant) vector fields.
pub fn curvature(x: &Vector3<f64>, y: &Vector3<f64>, z: &Vector3<f64>, tau: f64) -> Vector3<f64> {
    let c = connection_matrices(tau);
    let nabla = |a: &Vector3<f64>| c[0] * a.x + c[1] * a.y + c[2] * a.z;
    let (nx, ny) = (nabla(x), nabla(y));
    let nb = nabla(&bracket(x, y, tau));
    nx * (ny * z) - ny * (nx * z) - nb * z
}

/// Completes a unit vector to an orthonormal basis `{w1, w2, v}`.
fn complete_basis(v: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let first = Vector3::new(1.0, 0.0, 0.0);
    let cand = if v.dot(&first).abs() > 0.5 { Vector3::new(0.0, 1.0, 0.0) } else { first };
    let w1 = (cand - v * cand.dot(v)).normalize();
    let w2 = v.cross(&w1);
    (w1, w2)
}

/// `Ric(v) = sum_i <R(w_i, v) v, w_i>` for a unit frame vector `v`.
pub fn ricci(v: &FrameVector, params: &AmbientParams) -> Result<f64> {
    let vv = v.as_vector();
    let n = vv.norm();
    if (n - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidParams(format!("ricci needs a unit vector, |v| = {n}")));
    }
    let (w1, w2) = complete_basis(&vv);
    let tau = params.tau;
    Ok([w1, w2]
        .iter()
        .map(|w| curvature(w, &vv, &vv, tau).dot(w))
        .sum())
}

/// `alpha = tau*y + u_x`, `beta = -tau*x + u_y`.
#[inline]
pub fn horizontal_gradient(x: f64, y: f64, ux: f64, uy: f64, tau: f64) -> (f64, f64) {
    (tau * y + ux, -tau * x + uy)
}

/// Upward unit normal of the graph in frame components together with `W`.
pub fn graph_normal(jet: &GraphJet, params: &AmbientParams) -> (FrameVector, f64) {
    let (a, b) = horizontal_gradient(jet.x, jet.y, jet.ux, jet.uy, params.tau);
    let w = (1.0 + a * a + b * b).sqrt();
    (FrameVector::new(-a / w, -b / w, 1.0 / w), w)
}
