// Ordered boundary data give ordered discrete solutions, and the monotonicity pairing
// of two solutions is nonnegative.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nil3::mesh::build_mesh;
use nil3::solver::{monotonicity_pairing, verify_comparison, Solver};
use nil3::{fixtures, SolveOptions};

fn main() -> nil3::Result<()> {
    let dom = fixtures::cap(0.2)?;
    let mesh = Arc::new(build_mesh(&dom, 0.1)?);
    let opts = SolveOptions::default();
    let solver = Solver::new(mesh.clone(), *dom.params(), opts)?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for trial in 0..5 {
        let (c, s, lift) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(0.0..0.5));
        let mut lo = vec![0.0; mesh.node_count()];
        let mut hi = vec![0.0; mesh.node_count()];
        for (i, _) in mesh.boundary_nodes() {
            let p = mesh.node(i);
            lo[i] = c * p.x + s * p.y * p.y;
            hi[i] = lo[i] + lift * (1.0 + p.x);
        }
        let u = solver.solve(&hi, None)?;
        let v = solver.solve(&lo, None)?;
        let rep = verify_comparison(&u.field, &v.field, 10.0 * opts.newton_tol)?;
        let pairing = monotonicity_pairing(&u.field, &v.field, dom.params())?;
        let min_pairing = pairing.iter().copied().fold(f64::INFINITY, f64::min);
        println!(
            "trial {trial}: u >= v holds {}, min interior u - v = {:.4}, min pairing {min_pairing:.2e}",
            rep.passed, rep.interior_min
        );
    }
    Ok(())
}
