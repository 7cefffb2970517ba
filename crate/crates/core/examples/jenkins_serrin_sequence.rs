// Truncated-data sequence on a half disk whose upper half carries infinite data:
// the flux across the A arc increases towards its length.

use std::sync::Arc;

use nil3::jenkins_serrin::{geometric_levels, run_sequence, SequenceOptions};
use nil3::mesh::build_mesh;
use nil3::{fixtures, ArcLabel};

fn main() -> nil3::Result<()> {
    let dom = fixtures::half_disk_js(0.3, 0.25)?;
    let mesh = Arc::new(build_mesh(&dom, 0.05)?);
    let run = run_sequence(&dom, &mesh, &geometric_levels(64), &SequenceOptions::default())?;
    let a = dom.arcs().iter().position(|a| a.label == ArcLabel::A).expect("A arc");
    let len = dom.arc(a).geometry.length();
    println!("truncation {:?}, |A| = {len:.4}", run.truncation);
    for (d, f) in run.diagnostics.iter().zip(run.flux_trend(a)) {
        println!(
            "n = {:2}: F(A) = {f:.4} ({:.3} |A|), interior range [{:.3}, {:.3}], max |grad u| {:.1}",
            d.n,
            f / len,
            d.interior_min,
            d.interior_max,
            d.max_gradient
        );
    }
    if let Some(defect) = run.monotonicity_defect {
        println!("largest decrease between members: {defect:.2e}");
    }
    Ok(())
}
