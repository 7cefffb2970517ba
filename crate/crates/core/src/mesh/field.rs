use std::path::Path;
use std::sync::Arc;

use super::Mesh;
use crate::error::{Error, Result};
use crate::geom::P2;

/// Piecewise linear function given by its nodal values.
#[derive(Debug, Clone)]
pub struct ScalarField {
    mesh: Arc<Mesh>,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(mesh: Arc<Mesh>, values: Vec<f64>) -> Result<Self> {
        if values.len() != mesh.node_count() {
            return Err(Error::InvalidParams(format!(
                "{} values for a mesh with {} nodes",
                values.len(),
                mesh.node_count()
            )));
        }
        Ok(Self { mesh, values })
    }

    pub fn zeros(mesh: Arc<Mesh>) -> Self {
        let n = mesh.node_count();
        Self { mesh, values: vec![0.0; n] }
    }

    /// Nodal interpolant of `f(x, y)`.
    pub fn from_fn(mesh: Arc<Mesh>, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = mesh.nodes().iter().map(|p| f(p.x, p.y)).collect();
        Self { mesh, values }
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn value(&self, i: usize) -> f64 {
        self.values[i]
    }

    pub fn same_mesh(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.mesh, &other.mesh)
    }

    pub fn check_same_mesh(&self, other: &Self) -> Result<()> {
        if self.same_mesh(other) {
            Ok(())
        } else {
            Err(Error::MeshMismatch)
        }
    }

    /// Constant gradient on triangle `t`.
    pub fn gradient(&self, t: usize) -> P2 {
        let tri = self.mesh.triangles()[t];
        let g = self.mesh.basis_gradients(t);
        g[0] * self.values[tri[0]] + g[1] * self.values[tri[1]] + g[2] * self.values[tri[2]]
    }

    /// Value at an arbitrary point of the mesh.
    pub fn eval(&self, p: &P2) -> Option<f64> {
        let (t, b) = self.mesh.locate(p)?;
        let tri = self.mesh.triangles()[t];
        Some(b[0] * self.values[tri[0]] + b[1] * self.values[tri[1]] + b[2] * self.values[tri[2]])
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { mesh: self.mesh.clone(), values: self.values.iter().map(|&v| f(v)).collect() }
    }

    /// Largest nodal difference.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_same_mesh(other)?;
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Writes `x,y,u` rows.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["x", "y", "u"])?;
        for (p, v) in self.mesh.nodes().iter().zip(&self.values) {
            w.write_record([format!("{:.17e}", p.x), format!("{:.17e}", p.y), format!("{:.17e}", v)])?;
        }
        w.flush()?;
        Ok(())
    }
}
