// A domain violating a polygon inequality: the truncated sequence diverges along an
// interior arc of curvature 2H, which is located and fitted.

use std::sync::Arc;

use nil3::jenkins_serrin::{detect_divergence, geometric_levels, limit_solution, run_sequence, DivergenceThresholds, SequenceOptions};
use nil3::mesh::build_mesh;
use nil3::fixtures;

fn main() -> nil3::Result<()> {
    for (name, dom) in [
        ("lens", fixtures::lens_failing(0.0, 0.5, 2.0)?),
        ("twin lens", fixtures::twin_lens_failing(0.0, 0.5, 1.2)?),
    ] {
        let mesh = Arc::new(build_mesh(&dom, 0.05)?);
        let run = run_sequence(&dom, &mesh, &geometric_levels(64), &SequenceOptions::default())?;
        let rep = detect_divergence(&run, &DivergenceThresholds::default())?;
        println!("{name}: {} line(s), converged fraction {:.3}", rep.lines.len(), rep.converged_fraction);
        for l in &rep.lines {
            println!(
                "  curvature {:.4} (2H = {}), centre ({:.3}, {:.3}), |<N, xi>| {:.3}, endpoints {:?}",
                l.curvature,
                2.0 * dom.params().h,
                l.center[0],
                l.center[1],
                l.vertical_normal,
                l.endpoints
            );
        }
        let limit = limit_solution(&run, &rep, 1e-3)?;
        println!("  limit defined at {} of {} nodes", limit.mask.iter().filter(|&&m| m).count(), mesh.node_count());
    }
    Ok(())
}
