//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so that the lines are always printed. The
//! criteria run one after another so that the timings are meaningful; the
//! process exits non-zero when any criterion fails or exceeds its time budget.

mod common;

use std::f64::consts::{PI, TAU};
use std::sync::Arc;
use std::time::{Duration, Instant};

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nil3::ambient::{connection, ricci};
use nil3::domain::{lens_closed_form, lens_polygon, polygon_measures, ArcLabel, EdgeProvenance};
use nil3::fixtures;
use nil3::flux::{flux_area_form, flux_balance, flux_boundary_arc, flux_line};
use nil3::geom::p2;
use nil3::jenkins_serrin::{detect_divergence, geometric_levels, run_sequence, DivergenceThresholds, SequenceOptions};
use nil3::mesh::{build_mesh, Side};
use nil3::solver::{residual_nondiv, solve_dirichlet, Solver};
use nil3::{AmbientParams, ArcGeometry, Curve, FrameVector, GraphJet, SolveOptions};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn lib<T>(r: nil3::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn ambient() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut conn_err: f64 = 0.0;
    for tau in [-1.0, 0.5, 2.0] {
        let params = lib(AmbientParams::new(tau, 0.0))?;
        for _ in 0..20 {
            let p = Vector3::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            for i in 0..3 {
                for j in 0..3 {
                    let d = (common::brute_connection(&p, i, j, &params) - connection(i, j, tau)).amax();
                    conn_err = conn_err.max(d);
                }
            }
        }
    }
    let mut ric_viol: f64 = 0.0;
    let mut ric_err: f64 = 0.0;
    for tau in [-1.0, 0.5, 0.7, 2.0] {
        let params = lib(AmbientParams::new(tau, 0.0))?;
        let bound = 2.0 * tau * tau;
        for _ in 0..10_000 {
            let v = Vector3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            if v.norm() < 1e-3 {
                continue;
            }
            let v = v.normalize();
            let r = lib(ricci(&FrameVector::from_vector(&v), &params))?;
            ric_viol = ric_viol.max(r.abs() - bound);
            ric_err = ric_err.max((r - common::ricci_closed_form(&v, tau)).abs());
        }
    }
    check(
        conn_err <= 1e-10 && ric_viol <= 1e-12 && ric_err <= 1e-12,
        format!("connection error {conn_err:.2e}, Ricci bound excess {ric_viol:.2e}, Ricci closed form error {ric_err:.2e}"),
    )
}

fn operator_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = [0.0f64; 3];
    for _ in 0..1000 {
        let (x, y) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let tau = rng.gen_range(-2.0..2.0);
        let params = lib(AmbientParams::new(tau, 0.0))?;
        let constant = GraphJet { x, y, u: rng.gen_range(-5.0..5.0), ..Default::default() };
        worst[0] = worst[0].max(residual_nondiv(&constant, &params).abs());
        let saddle = GraphJet { x, y, u: tau * x * y, ux: tau * y, uy: tau * x, uxy: tau, ..Default::default() };
        worst[1] = worst[1].max(residual_nondiv(&saddle, &params).abs());
        let (sx, sy) = (rng.gen_range(-1.45..1.45), rng.gen_range(-1.45..1.45));
        let scherk = GraphJet {
            x: sx,
            y: sy,
            u: fixtures::scherk_exact(sx, sy),
            ux: -sx.tan(),
            uy: sy.tan(),
            uxx: -1.0 / sx.cos().powi(2),
            uxy: 0.0,
            uyy: 1.0 / sy.cos().powi(2),
        };
        worst[2] = worst[2].max(residual_nondiv(&scherk, &lib(AmbientParams::new(0.0, 0.0))?).abs());
    }
    check(
        worst.iter().all(|w| *w <= 1e-9),
        format!("constants {:.2e}, tau x y {:.2e}, Scherk {:.2e}", worst[0], worst[1], worst[2]),
    )
}

fn solver_convergence() -> Outcome {
    let dom = lib(fixtures::cap(0.0))?;
    let mut errors = Vec::new();
    for h in [0.1, 0.05, 0.025] {
        let mesh = Arc::new(lib(build_mesh(&dom, h))?);
        let sol = lib(solve_dirichlet(&dom, &mesh, &SolveOptions::default()))?;
        errors.push(common::max_error(&sol.field, |x, y| fixtures::cap_exact(1.0, 0.3, x, y)));
    }
    let ratios = [errors[0] / errors[1], errors[1] / errors[2]];
    let rates_ok = ratios.iter().all(|r| (3.2..=4.8).contains(r));

    let tilted = lib(fixtures::cap(0.4))?;
    let mesh = Arc::new(lib(build_mesh(&tilted, 0.1))?);
    let solver = lib(Solver::new(mesh.clone(), *tilted.params(), SolveOptions::default()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let u: Vec<f64> = mesh.nodes().iter().map(|p| 0.3 * (2.0 * p.x).sin() + p.y * p.y - 0.5 * p.x * p.y).collect();
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let dir: Vec<f64> =
            (0..mesh.node_count()).map(|i| if mesh.is_boundary(i) { 0.0 } else { rng.gen_range(-1.0..1.0) }).collect();
        let mut packed = vec![0.0; solver.unknowns()];
        for (i, d) in dir.iter().enumerate() {
            if let Some(k) = solver.dof(i) {
                packed[k] = *d;
            }
        }
        let jv = solver.jacobian(&u).mul_vec(&packed);
        let eps = 1e-6;
        let shift = |s: f64| -> Vec<f64> { u.iter().zip(&dir).map(|(a, d)| a + s * d).collect() };
        let (rp, rm) = (solver.residual(&shift(eps)), solver.residual(&shift(-eps)));
        let mut diff: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for i in 0..mesh.node_count() {
            if let Some(k) = solver.dof(i) {
                let fd = (rp[i] - rm[i]) / (2.0 * eps);
                diff = diff.max((fd - jv[k]).abs());
                scale = scale.max(jv[k].abs());
            }
        }
        worst = worst.max(diff / scale);
    }
    check(
        rates_ok && worst <= 1e-5,
        format!(
            "L-inf errors {:.3e} {:.3e} {:.3e}, ratios {:.2} {:.2}; Jacobian relative error {worst:.2e}",
            errors[0], errors[1], errors[2], ratios[0], ratios[1]
        ),
    )
}

fn flux_identities() -> Outcome {
    let dom = lib(fixtures::cap(0.1))?;
    let params = *dom.params();
    let mesh = Arc::new(lib(build_mesh(&dom, 0.025))?);
    let sol = lib(solve_dirichlet(&dom, &mesh, &SolveOptions::default()))?;
    let bal = lib(flux_balance(&sol.field, &params))?;
    let balance_ok = bal.relative_residual <= 0.01;

    // Upper half circle, closed up by five different curves from (-1, 0) to (1, 0).
    let gamma = Curve::single(dom.arc(0).geometry.clone());
    let (a, b) = (p2(-1.0, 0.0), p2(1.0, 0.0));
    let mut zetas = vec![Curve::single(lib(ArcGeometry::segment(a, b))?)];
    for (r, left, major) in [(1.6, true, false), (2.5, false, false), (1.2, true, false), (3.0, true, false)] {
        let arc = ArcGeometry::circular_through(a, b, r, left, major).ok_or("no arc through the chord")?;
        zetas.push(Curve::single(arc));
    }
    let mut values = Vec::new();
    let mut bound_excess: f64 = f64::NEG_INFINITY;
    for z in &zetas {
        let af = lib(flux_area_form(&sol.field, &params, &gamma, z))?;
        values.push(af);
        let line = lib(flux_line(&sol.field, &params, z, Side::Right))?;
        bound_excess = bound_excess.max(line.flux.abs() - line.length);
    }
    let reference = values[0];
    let mut indep_ok = true;
    let mut spread: f64 = 0.0;
    for v in &values[1..] {
        let d = (v.flux - reference.flux).abs();
        spread = spread.max(d);
        indep_ok &= d <= 2.0 * (v.zeta.quad_tol + reference.zeta.quad_tol);
    }
    for i in 0..dom.arcs().len() {
        let f = lib(flux_boundary_arc(&sol.field, &params, i))?;
        bound_excess = bound_excess.max(f.flux.abs() - f.length);
    }
    bound_excess = bound_excess.max(reference.flux.abs() - gamma.length());
    check(
        balance_ok && indep_ok && bound_excess < 0.0,
        format!(
            "balance residual {:.2}%, zeta spread {spread:.2e} (quad tol {:.2e}), max |F| - |gamma| {bound_excess:.3}",
            100.0 * bal.relative_residual,
            reference.zeta.quad_tol
        ),
    )
}

fn comparison_principle() -> Outcome {
    let dom = lib(fixtures::cap(0.1))?;
    let mesh = Arc::new(lib(build_mesh(&dom, 0.1))?);
    let opts = SolveOptions::default();
    let solver = lib(Solver::new(mesh.clone(), *dom.params(), opts))?;
    let tol = 10.0 * opts.newton_tol;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = f64::INFINITY;
    for _ in 0..50 {
        let lower: Vec<(f64, f64)> = (0..4).map(|_| (rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5))).collect();
        let base = rng.gen_range(-1.0..1.0);
        let lift = rng.gen_range(0.0..0.3);
        let (bump, phase) = (rng.gen_range(0.0..1.0), rng.gen_range(0.0..TAU));
        let g2 = |t: f64| base + lower.iter().enumerate().map(|(k, (c, s))| c * (k as f64 * t).cos() + s * (k as f64 * t).sin()).sum::<f64>();
        let (mut b1, mut b2) = (vec![0.0; mesh.node_count()], vec![0.0; mesh.node_count()]);
        for (i, _) in mesh.boundary_nodes() {
            let p = mesh.node(i);
            let t = p.y.atan2(p.x);
            b2[i] = g2(t);
            b1[i] = g2(t) + lift + bump * (1.0 + (t - phase).cos()).powi(2);
        }
        let u1 = lib(solver.solve(&b1, None))?;
        let u2 = lib(solver.solve(&b2, None))?;
        let rep = lib(nil3::solver::verify_comparison(&u1.field, &u2.field, tol))?;
        if !rep.applicable {
            return Err("boundary data are not ordered".into());
        }
        worst = worst.min(rep.interior_min);
    }
    check(worst >= -tol, format!("50 pairs, smallest interior u1 - u2 = {worst:.3e} (tolerance {tol:.0e})"))
}

fn jenkins_serrin_trend() -> Outcome {
    let dom = lib(fixtures::half_disk_js(0.3, 0.25))?;
    let mesh = Arc::new(lib(build_mesh(&dom, 0.05))?);
    let run = lib(run_sequence(&dom, &mesh, &geometric_levels(64), &SequenceOptions::default()))?;
    if run.n_values.last() != Some(&64) {
        return Err(format!("sequence stopped at {:?}", run.stopped_at));
    }
    let a_idx = dom.arcs().iter().position(|a| a.label == ArcLabel::A).ok_or("no A arc")?;
    let a_len = dom.arc(a_idx).geometry.length();
    let trend = run.flux_trend(a_idx);
    let increasing = trend.windows(2).all(|w| w[1] > w[0]);
    let reached = *trend.last().unwrap() >= 0.9 * a_len;
    let mut c_dev: f64 = 0.0;
    for field in &run.fields {
        for (i, tag) in mesh.boundary_nodes() {
            if dom.arc(tag.arc).label == ArcLabel::C {
                c_dev = c_dev.max((field.value(i) - lib(dom.data_at(tag.arc, tag.s))?).abs());
            }
        }
    }
    check(
        increasing && reached && c_dev <= 1e-9,
        format!(
            "F(A) {}; |A| = {a_len:.4}, final ratio {:.3}; C deviation {c_dev:.1e}",
            trend.iter().map(|f| format!("{f:.3}")).collect::<Vec<_>>().join(" < "),
            trend.last().unwrap() / a_len
        ),
    )
}

fn divergence_detection() -> Outcome {
    let dom = lib(fixtures::lens_failing(0.0, 0.5, 2.0))?;
    let mesh = Arc::new(lib(build_mesh(&dom, 0.05))?);
    let run = lib(run_sequence(&dom, &mesh, &geometric_levels(64), &SequenceOptions::default()))?;
    if run.n_values.last() != Some(&64) {
        return Err(format!("sequence stopped at {:?}", run.stopped_at));
    }
    let rep = lib(detect_divergence(&run, &DivergenceThresholds::default()))?;
    let target = 2.0 * dom.params().h;
    let good: Vec<_> = rep
        .lines
        .iter()
        .filter(|l| (l.curvature - target).abs() <= 0.05 * target && l.vertical_normal < 0.1)
        .collect();
    let summary = rep
        .lines
        .iter()
        .map(|l| format!("curvature {:.4}, |<N, xi>| {:.3}", l.curvature, l.vertical_normal))
        .collect::<Vec<_>>()
        .join("; ");
    check(!good.is_empty(), format!("{} line(s): {summary}", rep.lines.len()))
}

fn lens_geometry() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut worst, mut ineq_ok) = (0.0f64, true);
    for _ in 0..20 {
        let h = rng.gen_range(0.1..3.0);
        let theta = rng.gen_range(0.05..PI / 2.0);
        let r = 1.0 / (2.0 * h);
        let phi = rng.gen_range(0.0..TAU);
        let c = p2(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let arc = lib(ArcGeometry::circular(c, r, phi - theta, phi + theta))?;
        let poly = lib(lens_polygon(&arc, EdgeProvenance::Boundary { arc: 0, label: ArcLabel::B }))?;
        let m = lib(polygon_measures(&poly))?;
        let (len, area) = lens_closed_form(r, theta);
        worst = worst.max((m.area - area).abs()).max((m.beta - len).abs()).max((m.ell - 2.0 * len).abs());
        ineq_ok &= 2.0 * h * area < 2.0 * len && 2.0 * h * m.area < 2.0 * m.beta;
    }
    check(worst <= 1e-9 && ineq_ok, format!("20 lenses, closed form mismatch {worst:.2e}, 2HA(L) < 2|B| holds: {ineq_ok}"))
}

struct Criterion {
    name: &'static str,
    run: fn() -> Outcome,
    budget: Duration,
}

fn main() {
    let criteria = [
        Criterion { name: "1 ambient connection and Ricci bounds", run: ambient, budget: Duration::from_secs(1) },
        Criterion { name: "2 non-divergence operator oracles", run: operator_oracles, budget: Duration::from_secs(1) },
        Criterion { name: "3 cap convergence and Jacobian", run: solver_convergence, budget: Duration::from_secs(120) },
        Criterion { name: "4 flux identities", run: flux_identities, budget: Duration::from_secs(60) },
        Criterion { name: "5 comparison principle", run: comparison_principle, budget: Duration::from_secs(300) },
        Criterion { name: "6 truncated sequence flux trend", run: jenkins_serrin_trend, budget: Duration::from_secs(600) },
        Criterion { name: "7 divergence line detection", run: divergence_detection, budget: Duration::from_secs(600) },
        Criterion { name: "8 lens inequality", run: lens_geometry, budget: Duration::from_secs(1) },
    ];
    let results: Vec<(Outcome, Duration)> = criteria
        .iter()
        .map(|c| {
            let t = Instant::now();
            let out = std::panic::catch_unwind(c.run).unwrap_or_else(|_| Err("panicked".into()));
            (out, t.elapsed())
        })
        .collect();
    let mut failed = 0;
    for (c, (out, took)) in criteria.iter().zip(results) {
        let (ok, detail) = match out {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        let ok = ok && took <= c.budget;
        if !ok {
            failed += 1;
        }
        let timing = if took <= c.budget { String::new() } else { format!(" (over the {:?} budget)", c.budget) };
        println!("{} AC{} [{:.2?}]{timing}: {detail}", if ok { "PASS" } else { "FAIL" }, c.name, took);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
