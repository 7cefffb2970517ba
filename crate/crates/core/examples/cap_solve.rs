// Dirichlet problem on the unit disk with zero data: for tau = 0 the solution is a
// spherical cap, and the nodal error decreases like h^2.

use std::sync::Arc;

use nil3::fixtures;
use nil3::mesh::build_mesh;
use nil3::solver::solve_dirichlet;
use nil3::SolveOptions;

fn main() -> nil3::Result<()> {
    let dom = fixtures::cap(0.0)?;
    let mut last: Option<f64> = None;
    for h in [0.1, 0.05, 0.025] {
        let mesh = Arc::new(build_mesh(&dom, h)?);
        let sol = solve_dirichlet(&dom, &mesh, &SolveOptions::default())?;
        let err = (0..mesh.node_count())
            .map(|i| {
                let p = mesh.node(i);
                (sol.field.value(i) - fixtures::cap_exact(1.0, 0.3, p.x, p.y)).abs()
            })
            .fold(0.0, f64::max);
        let ratio = last.map_or(String::new(), |e| format!(", ratio {:.2}", e / err));
        println!("h = {h}: {} nodes, {} Newton steps, max error {err:.3e}{ratio}", mesh.node_count(), sol.iterations);
        last = Some(err);
    }

    let tilted = fixtures::cap(0.4)?;
    let mesh = Arc::new(build_mesh(&tilted, 0.05)?);
    let sol = solve_dirichlet(&tilted, &mesh, &SolveOptions::default())?;
    println!("tau = 0.4: centre height {:.5}, residual history {:?}", sol.field.eval(&nil3::geom::p2(0.0, 0.0)).unwrap(), sol.residual_history);
    Ok(())
}
