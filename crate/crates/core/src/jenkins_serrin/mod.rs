//! Truncated-data solution sequences `u_n` and what can be read off them:
//! convergence and divergence sets, divergence lines, and the limit solution.
//!
//! Member `n` takes the value `n` on A arcs, `-n` on B arcs and the data `f`
//! truncated to `[-n, n]` on C arcs (only from above when there are no B arcs,
//! only from below when there are no A arcs).

mod divergence;

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

pub use divergence::{
    detect_divergence, fit_circle_fixed_radius, fit_circle_taubin, limit_solution, DivergenceLine,
    DivergenceReport, DivergenceThresholds, LimitField,
};

use crate::domain::{check_admissible, ArcLabel, DomainSpec};
use crate::error::{Error, Result};
use crate::flux::flux_boundary_arc;
use crate::mesh::{Mesh, ScalarField};
use crate::solver::{SolveOptions, Solver};

/// How the C data are cut off at level `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Truncation {
    /// `min(n, f)`: no B arcs, data increase with `n`.
    Above,
    /// `max(-n, f)`: no A arcs, data decrease with `n`.
    Below,
    /// `f` clamped to `[-n, n]`.
    Both,
}

impl Truncation {
    pub fn of(dom: &DomainSpec) -> Self {
        match (dom.has_label(ArcLabel::A), dom.has_label(ArcLabel::B)) {
            (_, false) => Truncation::Above,
            (false, true) => Truncation::Below,
            (true, true) => Truncation::Both,
        }
    }

    pub fn apply(self, f: f64, n: f64) -> f64 {
        match self {
            Truncation::Above => f.min(n),
            Truncation::Below => f.max(-n),
            Truncation::Both => f.clamp(-n, n),
        }
    }

    /// Sign of the change of the data with `n`, if monotone.
    pub fn direction(self) -> Option<f64> {
        match self {
            Truncation::Above => Some(1.0),
            Truncation::Below => Some(-1.0),
            Truncation::Both => None,
        }
    }
}

/// Nodal boundary values of member `n`.
pub fn sequence_data(dom: &DomainSpec, mesh: &Mesh, n: f64) -> Result<Vec<f64>> {
    let trunc = Truncation::of(dom);
    let mut b = vec![0.0; mesh.node_count()];
    for (i, tag) in mesh.boundary_nodes() {
        b[i] = match dom.arc(tag.arc).label {
            ArcLabel::A => n,
            ArcLabel::B => -n,
            ArcLabel::C => trunc.apply(dom.data_at(tag.arc, tag.s)?, n),
        };
    }
    Ok(b)
}

#[derive(Debug, Clone, Serialize)]
pub struct MemberDiagnostics {
    pub n: u64,
    pub iterations: usize,
    pub max_gradient: f64,
    /// `|grad u_n|` per triangle.
    #[serde(skip)]
    pub triangle_gradients: Vec<f64>,
    /// Flux across each boundary arc.
    pub arc_flux: Vec<f64>,
    /// Largest and smallest value over nodes at least `interior_margin` from the boundary.
    pub interior_max: f64,
    pub interior_min: f64,
    pub flagged_blowup: bool,
}

#[derive(Debug, Clone)]
pub struct SequenceOptions {
    pub solve: SolveOptions,
    /// Warm start each member from the previous one.
    pub warm_start: bool,
    /// Nodes closer than this to the boundary are left out of the interior extrema.
    pub interior_margin: f64,
}

impl Default for SequenceOptions {
    fn default() -> Self {
        Self {
            solve: SolveOptions { max_newton_iters: 200, continuation_steps: 4, ..SolveOptions::default() },
            warm_start: true,
            interior_margin: 0.1,
        }
    }
}

/// Geometric levels `1, 2, 4, ..., n_max`.
pub fn geometric_levels(n_max: u64) -> Vec<u64> {
    let mut v = vec![1];
    while *v.last().unwrap() * 2 <= n_max {
        v.push(v.last().unwrap() * 2);
    }
    v
}

#[derive(Debug, Clone)]
pub struct SequenceRun {
    pub domain: DomainSpec,
    pub n_values: Vec<u64>,
    pub fields: Vec<ScalarField>,
    pub diagnostics: Vec<MemberDiagnostics>,
    pub truncation: Truncation,
    /// Largest violation of `u_{n'} >= u_n` (or `<=` for decreasing data); zero when monotone.
    pub monotonicity_defect: Option<f64>,
    /// Level at which the solver gave up, if any; members up to it are kept.
    pub stopped_at: Option<(u64, String)>,
}

impl SequenceRun {
    pub fn mesh(&self) -> &Arc<Mesh> {
        self.fields[0].mesh()
    }

    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }

    pub fn last(&self) -> &ScalarField {
        self.fields.last().expect("run has at least one member")
    }

    /// `F_{u_n}(arc)` over the members.
    pub fn flux_trend(&self, arc: usize) -> Vec<f64> {
        self.diagnostics.iter().map(|d| d.arc_flux[arc]).collect()
    }
}

/// Solves the truncated problems for every level in `n_values`.
pub fn run_sequence(dom: &DomainSpec, mesh: &Arc<Mesh>, n_values: &[u64], opts: &SequenceOptions) -> Result<SequenceRun> {
    let adm = check_admissible(dom);
    if !adm.passed {
        return Err(Error::NotAdmissible(format!(
            "{} curvature violations, {} shared A/A or B/B endpoints",
            adm.curvature_violations.len(),
            adm.shared_endpoints.len()
        )));
    }
    if n_values.is_empty() || n_values[0] == 0 || n_values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParams("levels must be positive and strictly increasing".into()));
    }
    let solver = Solver::new(mesh.clone(), *dom.params(), opts.solve)?;
    let interior: Vec<bool> =
        mesh.nodes().iter().map(|p| dom.distance_to_boundary(p) >= opts.interior_margin).collect();
    let truncation = Truncation::of(dom);
    let mut run = SequenceRun {
        domain: dom.clone(),
        n_values: Vec::new(),
        fields: Vec::new(),
        diagnostics: Vec::new(),
        truncation,
        monotonicity_defect: truncation.direction().map(|_| 0.0),
        stopped_at: None,
    };
    for &n in n_values {
        let b = sequence_data(dom, mesh, n as f64)?;
        let init = if opts.warm_start { run.fields.last().map(|f| f.values()) } else { None };
        let sol = match solver.solve(&b, init) {
            Ok(s) => s,
            Err(Error::NonConvergence(nc)) => {
                let r = nc.residual_history.last().copied().unwrap_or(f64::NAN);
                log::warn!("sequence stopped at n = {n}: residual {r:.3e}");
                run.stopped_at = Some((n, format!("no convergence (residual {r:.3e})")));
                break;
            }
            Err(e) => return Err(e),
        };
        let field = sol.field;
        let triangle_gradients: Vec<f64> =
            (0..mesh.triangle_count()).into_par_iter().map(|t| field.gradient(t).norm()).collect();
        let arc_flux = (0..dom.arcs().len())
            .into_par_iter()
            .map(|a| flux_boundary_arc(&field, dom.params(), a).map(|f| f.flux))
            .collect::<Result<Vec<_>>>()?;
        let (mut interior_max, mut interior_min) = (f64::NEG_INFINITY, f64::INFINITY);
        for (v, _) in field.values().iter().zip(&interior).filter(|(_, &i)| i) {
            interior_max = interior_max.max(*v);
            interior_min = interior_min.min(*v);
        }
        if let (Some(dir), Some(prev)) = (truncation.direction(), run.fields.last()) {
            let defect = prev
                .values()
                .iter()
                .zip(field.values())
                .map(|(a, b)| dir * (a - b))
                .fold(0.0, f64::max);
            run.monotonicity_defect = run.monotonicity_defect.map(|d| d.max(defect));
        }
        run.diagnostics.push(MemberDiagnostics {
            n,
            iterations: sol.iterations,
            max_gradient: sol.max_gradient,
            triangle_gradients,
            arc_flux,
            interior_max,
            interior_min,
            flagged_blowup: sol.flagged_blowup,
        });
        run.n_values.push(n);
        run.fields.push(field);
    }
    if run.fields.is_empty() {
        let msg = run.stopped_at.as_ref().map(|s| s.1.clone()).unwrap_or_default();
        return Err(Error::InvalidParams(format!("first member failed: {msg}")));
    }
    Ok(run)
}

#[derive(Debug, Clone, Serialize)]
pub struct UniquenessReport {
    pub seeds: Vec<u64>,
    /// Largest pairwise L-infinity distance between the solutions.
    pub max_distance: f64,
    pub tol: f64,
    pub passed: bool,
}

/// Solves with the same boundary values from random initial iterates and compares the results.
pub fn uniqueness_probe(
    mesh: &Arc<Mesh>,
    dom: &DomainSpec,
    boundary: &[f64],
    seeds: &[u64],
    opts: &SolveOptions,
) -> Result<UniquenessReport> {
    if !dom.has_label(ArcLabel::C) {
        return Err(Error::NotApplicable("uniqueness needs at least one C arc".into()));
    }
    let solver = Solver::new(mesh.clone(), *dom.params(), *opts)?;
    let amp = 1.0 + boundary.iter().fold(0.0f64, |m, b| m.max(b.abs()));
    let sols = seeds
        .iter()
        .map(|&seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let init: Vec<f64> = (0..mesh.node_count()).map(|_| rng.gen_range(-amp..amp)).collect();
            solver.solve(boundary, Some(&init)).map(|s| s.field)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut max_distance: f64 = 0.0;
    for i in 0..sols.len() {
        for j in i + 1..sols.len() {
            max_distance = max_distance.max(sols[i].max_abs_diff(&sols[j])?);
        }
    }
    let tol = 10.0 * opts.newton_tol;
    Ok(UniquenessReport { seeds: seeds.to_vec(), max_distance, tol, passed: max_distance <= tol })
}
