// Scherk's minimal graph log(cos x / cos y) recovered from its boundary values.

use std::sync::Arc;

use nil3::fixtures;
use nil3::mesh::build_mesh;
use nil3::solver::solve_dirichlet;
use nil3::SolveOptions;

fn main() -> nil3::Result<()> {
    for a in [0.8, 1.2] {
        let dom = fixtures::scherk_rectangle(a)?;
        for h in [0.1, 0.05] {
            let mesh = Arc::new(build_mesh(&dom, h)?);
            let sol = solve_dirichlet(&dom, &mesh, &SolveOptions::default())?;
            let err = (0..mesh.node_count())
                .map(|i| {
                    let p = mesh.node(i);
                    (sol.field.value(i) - fixtures::scherk_exact(p.x, p.y)).abs()
                })
                .fold(0.0, f64::max);
            println!("square (-{a}, {a})^2, h = {h}: max error {err:.3e}, max |grad u| {:.2}", sol.max_gradient);
        }
    }
    Ok(())
}
