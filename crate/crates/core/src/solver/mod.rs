//! The prescribed mean curvature operator and a Newton solver for its Dirichlet
//! problem.
//!
//! With `alpha = tau y + u_x`, `beta = -tau x + u_y` and
//! `W = sqrt(1 + alpha^2 + beta^2)`, a graph `z = u(x, y)` has mean curvature `H`
//! with respect to the upward normal iff `div X_u = 2H`, `X_u = (alpha, beta) / W`.
//! The discretisation uses piecewise linear elements on the weak form
//! `int X_u . grad phi + 2H int phi = 0`. For `tau = 0` the solution with zero
//! data on a disk of radius `R <= 1/H` is the lower spherical cap
//! `u = sqrt(1/H^2 - R^2) - sqrt(1/H^2 - r^2)`.

pub mod assembly;
mod compare;
pub mod linalg;

use std::sync::Arc;

use serde::Serialize;

pub use compare::{monotonicity_pairing, verify_comparison, ComparisonReport};

use crate::ambient::{AmbientParams, GraphJet};
use crate::domain::{check_dirichlet_conditions, DomainSpec};
use crate::error::{Error, NonConvergence, Result};
use crate::geom::P2;
use crate::mesh::{Mesh, ScalarField};
use assembly::{elements, energy, nodal_residual, Element, LOCAL_PAIRS};
use linalg::{rcm, Skyline};

/// `alpha`, `beta` and `W` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientJet {
    pub alpha: f64,
    pub beta: f64,
    pub w: f64,
}

pub fn coefficients(jet: &GraphJet, params: &AmbientParams) -> CoefficientJet {
    let alpha = params.tau * jet.y + jet.ux;
    let beta = -params.tau * jet.x + jet.uy;
    CoefficientJet { alpha, beta, w: (1.0 + alpha * alpha + beta * beta).sqrt() }
}

/// Expanded form of `div X_u - 2H`:
/// `[(1 + beta^2) u_xx + (1 + alpha^2) u_yy - 2 alpha beta u_xy] / W^3 - 2H`.
pub fn residual_nondiv(jet: &GraphJet, params: &AmbientParams) -> f64 {
    let c = coefficients(jet, params);
    let bracket = (1.0 + c.beta * c.beta) * jet.uxx + (1.0 + c.alpha * c.alpha) * jet.uyy
        - 2.0 * c.alpha * c.beta * jet.uxy;
    bracket / (c.w * c.w * c.w) - 2.0 * params.h
}

/// `X_u = (alpha, beta) / W`; always shorter than 1.
pub fn flux_vector(jet: &GraphJet, params: &AmbientParams) -> P2 {
    let c = coefficients(jet, params);
    P2::new(c.alpha / c.w, c.beta / c.w)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolveOptions {
    pub max_newton_iters: usize,
    /// Tolerance on the interior weak residual, infinity norm.
    pub newton_tol: f64,
    /// Backtracking factor of the line search.
    pub damping: f64,
    /// Number of continuation stages in the boundary data amplitude.
    pub continuation_steps: usize,
    /// Boundary data are clipped to `[-data_cap, data_cap]`.
    pub data_cap: f64,
    /// Proceed with a warning when the Dirichlet hypotheses fail.
    pub warn_only: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            max_newton_iters: 50,
            newton_tol: 1e-10,
            damping: 0.5,
            continuation_steps: 1,
            data_cap: 1e6,
            warn_only: false,
        }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> Result<()> {
        let ok = self.max_newton_iters > 0
            && self.newton_tol > 0.0
            && self.damping > 0.0
            && self.damping < 1.0
            && self.continuation_steps > 0
            && self.data_cap > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParams(format!("invalid solver options {self:?}")))
        }
    }
}

/// Converged discrete solution and its Newton history.
#[derive(Debug, Clone)]
pub struct Solution {
    pub field: ScalarField,
    pub iterations: usize,
    pub residual_history: Vec<f64>,
    /// Largest triangle gradient exceeds `1/h`.
    pub flagged_blowup: bool,
    pub max_gradient: f64,
}

impl Solution {
    pub fn residual_norm(&self) -> f64 {
        self.residual_history.last().copied().unwrap_or(f64::NAN)
    }

    /// `{iters, residual_history, flagged_blowup}`.
    pub fn residual_report(&self) -> ResidualReport {
        ResidualReport {
            iters: self.iterations,
            residual_history: self.residual_history.clone(),
            flagged_blowup: self.flagged_blowup,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub iters: usize,
    pub residual_history: Vec<f64>,
    pub flagged_blowup: bool,
}

/// Newton solver bound to one mesh; the sparsity structure and ordering are
/// computed once and reused across solves.
#[derive(Debug, Clone)]
pub struct Solver {
    mesh: Arc<Mesh>,
    params: AmbientParams,
    opts: SolveOptions,
    /// Node to unknown index (`usize::MAX` on the boundary).
    dof: Vec<usize>,
    template: Skyline,
    /// Skyline positions of the six local pairs (`usize::MAX` when a node is fixed).
    positions: Vec<[usize; 6]>,
}

impl Solver {
    pub fn new(mesh: Arc<Mesh>, params: AmbientParams, opts: SolveOptions) -> Result<Self> {
        opts.validate()?;
        let n = mesh.node_count();
        let interior: Vec<usize> = (0..n).filter(|&i| !mesh.is_boundary(i)).collect();
        let mut local = vec![usize::MAX; n];
        for (k, &i) in interior.iter().enumerate() {
            local[i] = k;
        }
        let mut adj = vec![Vec::new(); interior.len()];
        for tri in mesh.triangles() {
            for &(a, b) in &[(0, 1), (1, 2), (2, 0)] {
                let (i, j) = (local[tri[a]], local[tri[b]]);
                if i != usize::MAX && j != usize::MAX {
                    adj[i].push(j);
                    adj[j].push(i);
                }
            }
        }
        for l in &mut adj {
            l.sort_unstable();
            l.dedup();
        }
        let perm = rcm(&adj);
        let mut dof = vec![usize::MAX; n];
        for (new, &old) in perm.iter().enumerate() {
            dof[interior[old]] = new;
        }
        let mut first: Vec<usize> = (0..interior.len()).collect();
        for tri in mesh.triangles() {
            for &(a, b) in &LOCAL_PAIRS {
                let (i, j) = (dof[tri[a]], dof[tri[b]]);
                if i != usize::MAX && j != usize::MAX {
                    let (r, c) = (i.max(j), i.min(j));
                    first[r] = first[r].min(c);
                }
            }
        }
        let template = Skyline::new(first);
        let positions = mesh
            .triangles()
            .iter()
            .map(|tri| {
                LOCAL_PAIRS.map(|(a, b)| {
                    let (i, j) = (dof[tri[a]], dof[tri[b]]);
                    if i == usize::MAX || j == usize::MAX {
                        usize::MAX
                    } else {
                        template.position(i.max(j), i.min(j))
                    }
                })
            })
            .collect();
        Ok(Self { mesh, params, opts, dof, template, positions })
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn params(&self) -> &AmbientParams {
        &self.params
    }

    pub fn options(&self) -> &SolveOptions {
        &self.opts
    }

    pub fn unknowns(&self) -> usize {
        self.template.dim()
    }

    /// Unknown index of `node`, `None` on the boundary.
    pub fn dof(&self, node: usize) -> Option<usize> {
        let d = self.dof[node];
        (d != usize::MAX).then_some(d)
    }

    fn elements(&self, u: &[f64], with_jac: bool) -> Vec<Element> {
        elements(&self.mesh, u, self.params.tau, 2.0 * self.params.h, with_jac)
    }

    /// Weak residual at every node; boundary rows are zero.
    pub fn residual(&self, u: &[f64]) -> Vec<f64> {
        let mut r = nodal_residual(&self.mesh, &self.elements(u, false));
        for (i, v) in r.iter_mut().enumerate() {
            if self.dof[i] == usize::MAX {
                *v = 0.0;
            }
        }
        r
    }

    /// Discrete energy `int W + 2H int u`.
    pub fn energy(&self, u: &[f64]) -> f64 {
        energy(&self.elements(u, false))
    }

    /// Assembled interior Jacobian in unknown ordering (not factorised).
    pub fn jacobian(&self, u: &[f64]) -> Skyline {
        self.assemble(&self.elements(u, true))
    }

    fn assemble(&self, els: &[Element]) -> Skyline {
        let mut k = self.template.clone();
        let vals = k.values_mut();
        for (e, pos) in els.iter().zip(&self.positions) {
            for (m, &p) in pos.iter().enumerate() {
                if p != usize::MAX {
                    vals[p] += e.jac[m];
                }
            }
        }
        k
    }

    /// Solves with the given nodal boundary values (interior entries ignored),
    /// starting from `initial` when given.
    pub fn solve(&self, boundary: &[f64], initial: Option<&[f64]>) -> Result<Solution> {
        let n = self.mesh.node_count();
        if boundary.len() != n || initial.is_some_and(|u| u.len() != n) {
            return Err(Error::InvalidParams("boundary or initial vector has the wrong length".into()));
        }
        let cap = self.opts.data_cap;
        let mut clipped = 0usize;
        let target: Vec<f64> = boundary
            .iter()
            .map(|&b| {
                if b.abs() > cap || b.is_nan() {
                    clipped += 1;
                }
                if b.is_nan() {
                    0.0
                } else {
                    b.clamp(-cap, cap)
                }
            })
            .collect();
        if clipped > 0 {
            log::warn!("{clipped} boundary values clipped to +-{cap:e}");
        }
        let mut u: Vec<f64> = match initial {
            Some(u0) => u0.to_vec(),
            None => vec![0.0; n],
        };
        let start = u.clone();
        let mut history = Vec::new();
        let mut iterations = 0;
        let stages = self.opts.continuation_steps;
        for k in 1..=stages {
            let t = k as f64 / stages as f64;
            for i in 0..n {
                if self.dof[i] == usize::MAX {
                    u[i] = start[i] + t * (target[i] - start[i]);
                }
            }
            self.newton(&mut u, &mut history, &mut iterations)?;
        }
        let field = ScalarField::new(self.mesh.clone(), u)?;
        let max_gradient = (0..self.mesh.triangle_count()).map(|t| field.gradient(t).norm()).fold(0.0, f64::max);
        Ok(Solution {
            field,
            iterations,
            residual_history: history,
            flagged_blowup: max_gradient > 1.0 / self.mesh.h(),
            max_gradient,
        })
    }

    fn interior_norm(&self, r: &[f64]) -> f64 {
        r.iter()
            .zip(&self.dof)
            .filter(|(_, &d)| d != usize::MAX)
            .fold(0.0, |m, (v, _)| if v.is_nan() { f64::NAN } else { m.max(v.abs()) })
    }

    fn fail(&self, u: &[f64], history: &[f64]) -> Error {
        let max_grad = (0..self.mesh.triangle_count())
            .map(|t| {
                let tri = self.mesh.triangles()[t];
                let g = self.mesh.basis_gradients(t);
                (g[0] * u[tri[0]] + g[1] * u[tri[1]] + g[2] * u[tri[2]]).norm()
            })
            .fold(0.0, f64::max);
        Error::NonConvergence(Box::new(NonConvergence {
            last_iterate: u.to_vec(),
            residual_history: history.to_vec(),
            flagged_blowup: !(max_grad <= 1.0 / self.mesh.h()),
        }))
    }

    fn newton(&self, u: &mut Vec<f64>, history: &mut Vec<f64>, iterations: &mut usize) -> Result<()> {
        let m = self.unknowns();
        let mut els = self.elements(u, true);
        for _ in 0..self.opts.max_newton_iters {
            let r = nodal_residual(&self.mesh, &els);
            let rn = self.interior_norm(&r);
            history.push(rn);
            if !rn.is_finite() {
                return Err(self.fail(u, history));
            }
            if rn <= self.opts.newton_tol || m == 0 {
                return Ok(());
            }
            let mut k = self.assemble(&els);
            if k.factor().is_err() {
                return Err(self.fail(u, history));
            }
            let mut delta = vec![0.0; m];
            for (i, &d) in self.dof.iter().enumerate() {
                if d != usize::MAX {
                    delta[d] = -r[i];
                }
            }
            k.solve_in_place(&mut delta);
            let slope: f64 = self
                .dof
                .iter()
                .enumerate()
                .filter(|(_, &d)| d != usize::MAX)
                .map(|(i, &d)| r[i] * delta[d])
                .sum();
            let e0 = energy(&els);
            let mut lambda = 1.0;
            let mut trial = u.clone();
            let accepted = loop {
                for (i, &d) in self.dof.iter().enumerate() {
                    if d != usize::MAX {
                        trial[i] = u[i] + lambda * delta[d];
                    }
                }
                let tel = self.elements(&trial, true);
                let e1 = energy(&tel);
                let armijo = e1 <= e0 + 1e-4 * lambda * slope;
                // below roundoff of the energy fall back to residual decrease
                let flat = (e1 - e0).abs() <= 1e-13 * (1.0 + e0.abs())
                    && self.interior_norm(&nodal_residual(&self.mesh, &tel)) < rn;
                if e1.is_finite() && (armijo || flat) {
                    break Some(tel);
                }
                lambda *= self.opts.damping;
                if lambda < 1e-12 {
                    break None;
                }
            };
            *iterations += 1;
            match accepted {
                Some(tel) => {
                    std::mem::swap(u, &mut trial);
                    els = tel;
                }
                None => return Err(self.fail(u, history)),
            }
        }
        let r = nodal_residual(&self.mesh, &els);
        let rn = self.interior_norm(&r);
        history.push(rn);
        if rn <= self.opts.newton_tol {
            Ok(())
        } else {
            Err(self.fail(u, history))
        }
    }
}

/// Boundary data of `dom` at the boundary nodes of `mesh` (zero at interior nodes).
pub fn boundary_values(dom: &DomainSpec, mesh: &Mesh) -> Result<Vec<f64>> {
    let mut b = vec![0.0; mesh.node_count()];
    for (i, tag) in mesh.boundary_nodes() {
        b[i] = dom.data_at(tag.arc, tag.s)?;
    }
    Ok(b)
}

/// Weak residual of a field, zero at boundary nodes.
pub fn residual_div(field: &ScalarField, params: &AmbientParams) -> Result<ScalarField> {
    let solver = Solver::new(field.mesh().clone(), *params, SolveOptions::default())?;
    ScalarField::new(field.mesh().clone(), solver.residual(field.values()))
}

/// Solves the Dirichlet problem with the boundary data stored on `dom`.
pub fn solve_dirichlet(dom: &DomainSpec, mesh: &Arc<Mesh>, opts: &SolveOptions) -> Result<Solution> {
    let rep = check_dirichlet_conditions(dom);
    if !rep.passed {
        let msg = format!(
            "curvature margin {:.3e}, Ricci margin {:.3e}",
            rep.curvature_margin, rep.ricci_margin
        );
        if opts.warn_only {
            log::warn!("Dirichlet hypotheses fail ({msg}); solving anyway");
        } else {
            return Err(Error::Hypotheses(msg));
        }
    }
    let b = boundary_values(dom, mesh)?;
    Solver::new(mesh.clone(), *dom.params(), *opts)?.solve(&b, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{ArcGeometry, ArcLabel, ArcSpec, BoundaryData};
    use crate::geom::p2;
    use crate::mesh::build_mesh;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{PI, TAU};

    fn disk(r: f64, tau: f64, h: f64, data: f64) -> DomainSpec {
        let a = ArcGeometry::circular(p2(0.0, 0.0), r, 0.0, PI).unwrap();
        let b = ArcGeometry::circular(p2(0.0, 0.0), r, PI, TAU).unwrap();
        DomainSpec::new(
            vec![
                ArcSpec::new(a, ArcLabel::C).with_data(BoundaryData::Const(data)),
                ArcSpec::new(b, ArcLabel::C).with_data(BoundaryData::Const(data)),
            ],
            AmbientParams::new(tau, h).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn coefficient_examples() {
        let p0 = AmbientParams::new(0.0, 0.0).unwrap();
        let c = coefficients(&GraphJet::first_order(0.0, 0.0, 3.0, 4.0), &p0);
        assert_eq!((c.alpha, c.beta), (3.0, 4.0));
        assert_abs_diff_eq!(c.w, 26f64.sqrt());
        let p1 = AmbientParams::new(1.0, 0.0).unwrap();
        let c = coefficients(&GraphJet::first_order(2.0, 0.0, 0.0, 2.0), &p1);
        assert_eq!((c.alpha, c.beta, c.w), (0.0, 0.0, 1.0));
        let x = flux_vector(&GraphJet::first_order(0.0, 1.0, 0.0, 0.0), &p1);
        assert_abs_diff_eq!(x, p2(0.5f64.sqrt(), 0.0), epsilon = 1e-15);
        let x = flux_vector(&GraphJet::first_order(0.0, 0.0, 1e6, 0.0), &p0);
        assert!(x.norm() < 1.0 && x.x > 1.0 - 1e-11);
    }

    #[test]
    fn zero_data_flat_disk() {
        let d = disk(1.0, 0.0, 0.0, 0.0);
        let mesh = Arc::new(build_mesh(&d, 0.2).unwrap());
        let s = solve_dirichlet(&d, &mesh, &SolveOptions::default()).unwrap();
        assert_eq!(s.field.max_abs(), 0.0);
        let r = residual_div(&s.field, d.params()).unwrap();
        assert_eq!(r.max_abs(), 0.0);
    }

    #[test]
    fn cap_solution_close_to_sphere() {
        let h = 0.3;
        let d = disk(1.0, 0.0, h, 0.0);
        let mesh = Arc::new(build_mesh(&d, 0.1).unwrap());
        let s = solve_dirichlet(&d, &mesh, &SolveOptions::default()).unwrap();
        assert!(s.residual_norm() <= 1e-10);
        let rho: f64 = 1.0 / h;
        let exact = |p: &P2| (rho * rho - 1.0).sqrt() - (rho * rho - p.norm_squared()).sqrt();
        let err = mesh.nodes().iter().zip(s.field.values()).map(|(p, u)| (u - exact(p)).abs()).fold(0.0, f64::max);
        assert!(err < 2e-3, "cap error {err}");
        assert!(!s.flagged_blowup);
    }

    #[test]
    fn translation_along_fibres() {
        let d = disk(1.0, 0.2, 0.3, 0.0);
        let mesh = Arc::new(build_mesh(&d, 0.15).unwrap());
        let a = solve_dirichlet(&d, &mesh, &SolveOptions::default()).unwrap();
        let shifted = disk(1.0, 0.2, 0.3, 1.7);
        let b = solve_dirichlet(&shifted, &mesh, &SolveOptions::default()).unwrap();
        let diff = a.field.values().iter().zip(b.field.values()).map(|(x, y)| (y - x - 1.7).abs()).fold(0.0, f64::max);
        assert!(diff < 1e-9, "{diff}");
    }

    #[test]
    fn hypotheses_enforced() {
        let d = disk(1.0, 0.0, 0.7, 0.0);
        let mesh = Arc::new(build_mesh(&d, 0.2).unwrap());
        assert!(matches!(solve_dirichlet(&d, &mesh, &SolveOptions::default()), Err(Error::Hypotheses(_))));
    }
}
