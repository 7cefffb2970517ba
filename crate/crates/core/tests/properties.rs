mod common;

use std::f64::consts::{PI, TAU};
use std::sync::{Arc, OnceLock};

use nalgebra::Vector3;
use proptest::prelude::*;

use nil3::ambient::ricci;
use nil3::domain::{check_admissible, BoundaryData};
use nil3::fixtures;
use nil3::flux::{flux_area_form, flux_line};
use nil3::geom::{orient, p2};
use nil3::jenkins_serrin::Truncation;
use nil3::mesh::{build_mesh, Side};
use nil3::solver::{flux_vector, solve_dirichlet, Solver};
use nil3::{AmbientParams, ArcGeometry, Curve, DomainSpec, FrameVector, GraphJet, ScalarField, SolveOptions};

fn cap_solution() -> &'static (DomainSpec, ScalarField) {
    static SOL: OnceLock<(DomainSpec, ScalarField)> = OnceLock::new();
    SOL.get_or_init(|| {
        let dom = fixtures::cap(0.1).unwrap();
        let mesh = Arc::new(build_mesh(&dom, 0.05).unwrap());
        let sol = solve_dirichlet(&dom, &mesh, &SolveOptions::default()).unwrap();
        (dom, sol.field)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ricci_within_bounds(tau in -3.0..3.0f64, x in -1.0..1.0f64, y in -1.0..1.0f64, z in -1.0..1.0f64) {
        let v = Vector3::new(x, y, z);
        prop_assume!(v.norm() > 1e-3);
        let v = v.normalize();
        let r = ricci(&FrameVector::from_vector(&v), &AmbientParams::new(tau, 0.0).unwrap()).unwrap();
        prop_assert!(r.abs() <= 2.0 * tau * tau + 1e-12);
        prop_assert!((r - common::ricci_closed_form(&v, tau)).abs() < 1e-12);
    }

    #[test]
    fn flux_vector_shorter_than_one(tau in -2.0..2.0f64, x in -3.0..3.0f64, y in -3.0..3.0f64,
                                    ux in -50.0..50.0f64, uy in -50.0..50.0f64) {
        let x_u = flux_vector(&GraphJet::first_order(x, y, ux, uy), &AmbientParams::new(tau, 0.0).unwrap());
        prop_assert!(x_u.norm() < 1.0);
    }

    #[test]
    fn truncation_is_monotone_in_n(f in -10.0..10.0f64, n in 0.0..20.0f64, dn in 0.0..5.0f64) {
        for t in [Truncation::Above, Truncation::Below, Truncation::Both] {
            let (a, b) = (t.apply(f, n), t.apply(f, n + dn));
            match t {
                Truncation::Above => prop_assert!(b >= a),
                Truncation::Below => prop_assert!(b <= a),
                Truncation::Both => prop_assert!((b - f).abs() <= (a - f).abs() + 1e-15 || (a - f).abs() >= n),
            }
        }
    }

    #[test]
    fn flux_is_additive_along_chains(t in 0.1..0.9f64, y0 in -0.5..0.5f64, y1 in -0.5..0.5f64, bend in 0.5..3.0f64) {
        let (dom, field) = cap_solution();
        let p = dom.params();
        let flux = |c: Curve| flux_line(field, p, &c, Side::Left).unwrap().flux;
        let (a, b) = (p2(-0.7, y0), p2(0.7, y1));
        let m = a + (b - a) * t;
        let whole = flux(Curve::single(ArcGeometry::segment(a, b).unwrap()));
        let parts = flux(Curve::single(ArcGeometry::segment(a, m).unwrap()))
            + flux(Curve::single(ArcGeometry::segment(m, b).unwrap()));
        prop_assert!((whole - parts).abs() < 1e-7, "{whole} vs {parts}");

        let Some(first) = ArcGeometry::circular_through(a, m, bend, true, false) else { return Ok(()) };
        let Some(second) = ArcGeometry::circular_through(m, b, bend, false, false) else { return Ok(()) };
        prop_assume!(first.sample(16).iter().chain(second.sample(16).iter()).all(|q| q.norm() < 0.95));
        let chain = flux(Curve::new(vec![first.clone(), second.clone()]).unwrap());
        let sum = flux(Curve::single(first)) + flux(Curve::single(second));
        prop_assert!((chain - sum).abs() < 1e-12, "{chain} vs {sum}");
    }

    #[test]
    fn area_form_independent_of_zeta(r in 1.05..6.0f64, below in proptest::bool::ANY) {
        let (dom, field) = cap_solution();
        let p = dom.params();
        let gamma = Curve::single(dom.arc(0).geometry.clone());
        let (a, b) = (p2(-1.0, 0.0), p2(1.0, 0.0));
        let reference = flux_area_form(field, p, &gamma, &Curve::single(ArcGeometry::segment(a, b).unwrap())).unwrap();
        let zeta = Curve::single(ArcGeometry::circular_through(a, b, r, below, false).unwrap());
        let other = flux_area_form(field, p, &gamma, &zeta).unwrap();
        let tol = 2.0 * (reference.zeta.quad_tol + other.zeta.quad_tol);
        prop_assert!((other.flux - reference.flux).abs() <= tol, "{} vs {} (tol {tol})", other.flux, reference.flux);
        prop_assert!(other.flux.abs() < gamma.length());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn mesh_invariants(r in 0.5..2.0f64, h in 0.08..0.25f64, tau in -1.0..1.0f64) {
        let dom = fixtures::disk(r, tau, 0.0).unwrap();
        let h = h * r;
        let mesh = build_mesh(&dom, h).unwrap();
        for tri in mesh.triangles() {
            let [a, b, c] = tri.map(|i| mesh.node(i));
            prop_assert!(orient(&a, &b, &c) > 0.0);
        }
        for (i, _) in mesh.boundary_nodes() {
            prop_assert!(dom.distance_to_boundary(&mesh.node(i)) < 1e-9);
        }
        let area = PI * r * r;
        prop_assert!((mesh.area() - area).abs() < 0.5 * h * h * TAU * r / h, "{} vs {area}", mesh.area());
        prop_assert!(mesh.area() <= area);
        prop_assert!(mesh.min_angle() > 15.0, "min angle {}", mesh.min_angle());
    }

    #[test]
    fn json_round_trip(x0 in -2.0..0.0f64, y0 in -2.0..0.0f64, w in 0.5..3.0f64, hgt in 0.5..3.0f64, c in -1.0..1.0f64) {
        let dom = fixtures::rectangle(x0, y0, x0 + w, y0 + hgt, BoundaryData::Const(c), AmbientParams::new(0.2, 0.0).unwrap()).unwrap();
        prop_assert!(check_admissible(&dom).passed);
        let back = DomainSpec::from_json(&dom.to_json().unwrap()).unwrap();
        prop_assert!((back.area() - w * hgt).abs() < 1e-12);
        prop_assert_eq!(back.arcs().len(), 4);
        prop_assert!((back.data_at(2, 0.1).unwrap() - c).abs() < 1e-15);
    }

    #[test]
    fn vertical_translation_commutes_with_solving(c in -3.0..3.0f64, tau in -0.4..0.4f64) {
        let dom = fixtures::disk(1.0, tau, 0.2).unwrap();
        let mesh = Arc::new(build_mesh(&dom, 0.15).unwrap());
        let solver = Solver::new(mesh.clone(), *dom.params(), SolveOptions::default()).unwrap();
        let b: Vec<f64> = mesh.nodes().iter().map(|q| 0.3 * q.x * q.y).collect();
        let shifted: Vec<f64> = b.iter().map(|v| v + c).collect();
        let u = solver.solve(&b, None).unwrap();
        let v = solver.solve(&shifted, None).unwrap();
        let d = u.field.values().iter().zip(v.field.values()).map(|(a, b)| (b - a - c).abs()).fold(0.0, f64::max);
        prop_assert!(d < 1e-8, "{d}");
    }
}
