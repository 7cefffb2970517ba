// Boundary fluxes of a solution, the balance 2H A = sum of fluxes, and the flux of
// a boundary arc computed through different interior curves.

use std::sync::Arc;

use nil3::flux::{flux_area_form, flux_balance};
use nil3::geom::p2;
use nil3::mesh::build_mesh;
use nil3::solver::solve_dirichlet;
use nil3::{fixtures, ArcGeometry, Curve, SolveOptions};

fn main() -> nil3::Result<()> {
    let dom = fixtures::cap(0.1)?;
    let mesh = Arc::new(build_mesh(&dom, 0.025)?);
    let sol = solve_dirichlet(&dom, &mesh, &SolveOptions::default())?;
    let rep = flux_balance(&sol.field, dom.params())?;
    for a in &rep.arcs {
        println!("arc {}: length {:.4}, flux {:.4}, |gamma| - |F| = {:.4}", a.id, a.length, a.flux, a.margin);
    }
    println!("2H A = {:.4}, total flux {:.4}, relative residual {:.2e}", 2.0 * dom.params().h * rep.area, rep.total, rep.relative_residual);

    let gamma = Curve::single(dom.arc(0).geometry.clone());
    let (a, b) = (p2(-1.0, 0.0), p2(1.0, 0.0));
    let mut zetas = vec![("diameter".to_string(), Curve::single(ArcGeometry::segment(a, b)?))];
    for r in [1.2, 2.0, 4.0] {
        for below in [true, false] {
            if let Some(arc) = ArcGeometry::circular_through(a, b, r, below, false) {
                zetas.push((format!("arc r = {r}, {}", if below { "below" } else { "above" }), Curve::single(arc)));
            }
        }
    }
    for (name, z) in &zetas {
        let f = flux_area_form(&sol.field, dom.params(), &gamma, z)?;
        println!("upper arc through {name}: F = {:.5} (area {:.4}, quadrature tolerance {:.1e})", f.flux, f.area, f.zeta.quad_tol);
    }
    Ok(())
}
