// Metric, frame, connection and Ricci curvature of Nil3(tau), and the normal of a graph.

use nalgebra::Vector3;
use nil3::ambient::{connection, frame_at, graph_normal, metric_eval, ricci};
use nil3::{AmbientParams, FrameVector, GraphJet};

fn main() -> nil3::Result<()> {
    let params = AmbientParams::new(0.5, 0.0)?;
    let p = Vector3::new(1.0, -2.0, 0.3);
    let frame = frame_at(&p, &params);
    println!("frame at {p:?}:");
    for (i, e) in frame.iter().enumerate() {
        println!("  E{} = ({:.3}, {:.3}, {:.3})", i + 1, e.x, e.y, e.z);
    }
    for i in 0..3 {
        for j in 0..3 {
            let g = metric_eval(&p, &frame[i], &frame[j], &params);
            print!("{g:6.3}");
        }
        println!();
    }
    for i in 0..3 {
        for j in 0..3 {
            let c = connection(i, j, params.tau);
            println!("D_E{} E{} = {:+.2} E1 {:+.2} E2 {:+.2} E3", i + 1, j + 1, c.x, c.y, c.z);
        }
    }
    for v in [FrameVector::new(1.0, 0.0, 0.0), FrameVector::new(0.0, 0.0, 1.0), FrameVector::new(0.6, 0.0, 0.8)] {
        println!("Ric({:.1}, {:.1}, {:.1}) = {:+.4}", v.c1, v.c2, v.c3, ricci(&v, &params)?);
    }
    let (n, w) = graph_normal(&GraphJet::first_order(0.2, 0.4, 1.0, -0.5), &params);
    println!("upward normal ({:.4}, {:.4}, {:.4}), W = {w:.4}", n.c1, n.c2, n.c3);
    Ok(())
}
