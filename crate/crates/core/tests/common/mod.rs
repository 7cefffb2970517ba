//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use nalgebra::{Matrix3, Vector3};
use nil3::ambient::{frame_at, metric_eval};
use nil3::AmbientParams;

fn basis(k: usize) -> Vector3<f64> {
    let mut e = Vector3::zeros();
    e[k] = 1.0;
    e
}

/// Coordinate metric matrix at `p`.
pub fn metric_matrix(p: &Vector3<f64>, params: &AmbientParams) -> Matrix3<f64> {
    Matrix3::from_fn(|i, j| metric_eval(p, &basis(i), &basis(j), params))
}

/// `d g_ij / d x_l` by central differences.
fn metric_derivative(p: &Vector3<f64>, l: usize, params: &AmbientParams) -> Matrix3<f64> {
    let eps = 1e-3;
    let d = basis(l) * eps;
    (metric_matrix(&(p + d), params) - metric_matrix(&(p - d), params)) / (2.0 * eps)
}

/// Christoffel symbols `gamma[k][(i, j)]` of the coordinate metric at `p`.
pub fn christoffel(p: &Vector3<f64>, params: &AmbientParams) -> [Matrix3<f64>; 3] {
    let ginv = metric_matrix(p, params).try_inverse().expect("metric is invertible");
    let dg = [0, 1, 2].map(|l| metric_derivative(p, l, params));
    let mut gamma = [Matrix3::zeros(); 3];
    for (k, gk) in gamma.iter_mut().enumerate() {
        for i in 0..3 {
            for j in 0..3 {
                let mut s = 0.0;
                for l in 0..3 {
                    s += 0.5 * ginv[(k, l)] * (dg[i][(j, l)] + dg[j][(i, l)] - dg[l][(i, j)]);
                }
                gk[(i, j)] = s;
            }
        }
    }
    gamma
}

/// Frame components of `D_{E_i} E_j` at `p`, from the Christoffel symbols and
/// finite differences of the frame.
pub fn brute_connection(p: &Vector3<f64>, i: usize, j: usize, params: &AmbientParams) -> Vector3<f64> {
    let frame = frame_at(p, params);
    let gamma = christoffel(p, params);
    let eps = 1e-3;
    let (ei, ej) = (frame[i], frame[j]);
    let mut v = Vector3::zeros();
    for a in 0..3 {
        let d = basis(a) * eps;
        let dej = (frame_at(&(p + d), params)[j] - frame_at(&(p - d), params)[j]) / (2.0 * eps);
        v += dej * ei[a];
    }
    for b in 0..3 {
        for a in 0..3 {
            for c in 0..3 {
                v[b] += ei[a] * ej[c] * gamma[b][(a, c)];
            }
        }
    }
    let f = Matrix3::from_columns(&frame);
    f.lu().solve(&v).expect("frame is a basis")
}

/// `Ric(v)` for a unit frame vector: `-2 tau^2` on horizontal and `2 tau^2` on vertical directions.
pub fn ricci_closed_form(v: &Vector3<f64>, tau: f64) -> f64 {
    2.0 * tau * tau * (v.z * v.z - v.x * v.x - v.y * v.y)
}

/// L-infinity nodal distance of a field from a function.
pub fn max_error(field: &nil3::ScalarField, f: impl Fn(f64, f64) -> f64) -> f64 {
    let mesh = field.mesh();
    (0..mesh.node_count())
        .map(|i| {
            let p = mesh.node(i);
            (field.value(i) - f(p.x, p.y)).abs()
        })
        .fold(0.0, f64::max)
}
