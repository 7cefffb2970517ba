// Admissibility, Dirichlet hypotheses and polygon solvability conditions of a few domains.

use nil3::domain::{check_admissible, check_dirichlet_conditions, check_solvability, enumerate_polygons};
use nil3::{fixtures, DomainSpec};

fn report(name: &str, dom: &DomainSpec) -> nil3::Result<()> {
    let adm = check_admissible(dom);
    let dir = check_dirichlet_conditions(dom);
    println!("{name}: admissible {}, Dirichlet hypotheses {}", adm.passed, dir.passed);
    if adm.passed {
        let polys = enumerate_polygons(dom, 6)?;
        let sol = check_solvability(dom, &polys)?;
        println!("  {} polygons, solvable {}, worst margin {:.4}", polys.len(), sol.passed, sol.worst_margin);
        for p in sol.polygons.iter().filter(|p| !p.excluded) {
            let m = p.measures;
            println!(
                "    alpha {:.3} beta {:.3} l {:.3} A {:.3}: l + 2HA - 2alpha = {:+.4}, l - 2HA - 2beta = {:+.4}",
                m.alpha, m.beta, m.ell, m.area, p.alpha_margin, p.beta_margin
            );
        }
    }
    Ok(())
}

fn main() -> nil3::Result<()> {
    report("cap", &fixtures::cap(0.1)?)?;
    report("half disk", &fixtures::half_disk_js(0.0, 0.25)?)?;
    report("failing lens", &fixtures::lens_failing(0.0, 0.5, 2.0)?)?;
    let text = include_str!("../data/lens_aa.json");
    report("two A arcs", &DomainSpec::from_json(text)?)?;
    Ok(())
}
