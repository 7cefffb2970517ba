//! The `nil3` command line: `check`, `solve`, `flux` and `sequence` over a JSON domain file.
//!
//! Exit codes: 0 success, 1 internal failure, 2 domain not admissible, 3 solvability
//! conditions fail, 4 Newton did not converge, 5 no convergence region, 64 usage or input error.
//! A divergent sequence is a result and exits with 0.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::domain::{
    check_admissible, check_dirichlet_conditions, check_solvability, enumerate_polygons, AdmissibilityReport,
    ArcLabel, DirichletReport, DomainSpec, SolvabilityReport,
};
use crate::error::{Error, Result};
use crate::flux::{flux_balance, FluxReport};
use crate::jenkins_serrin::{
    detect_divergence, geometric_levels, limit_solution, run_sequence, DivergenceReport, DivergenceThresholds,
    SequenceOptions,
};
use crate::mesh::build_mesh;
use crate::solver::{solve_dirichlet, ResidualReport, SolveOptions, Solution};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_ADMISSIBILITY: i32 = 2;
pub const EXIT_SOLVABILITY: i32 = 3;
pub const EXIT_NONCONVERGENCE: i32 = 4;
pub const EXIT_NO_CONVERGENCE_REGION: i32 = 5;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(name = "nil3", version, about = "Prescribed mean curvature graphs in Nil3(tau)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Admissibility, Dirichlet and polygon solvability conditions.
    Check {
        #[command(flatten)]
        common: Common,
        /// Largest number of vertices of an enumerated polygon.
        #[arg(long, default_value_t = 6)]
        max_vertices: usize,
    },
    /// Solve the Dirichlet problem and dump the field.
    Solve {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        solve: SolveArgs,
        /// Target mesh size.
        #[arg(long, default_value_t = 0.025)]
        h: f64,
    },
    /// Solve and report boundary fluxes and the flux balance.
    Flux {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        solve: SolveArgs,
        /// Target mesh size.
        #[arg(long, default_value_t = 0.025)]
        h: f64,
    },
    /// Truncated-data sequence with divergence detection and the limit field.
    Sequence {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        solve: SolveArgs,
        /// Target mesh size.
        #[arg(long, default_value_t = 0.05)]
        h: f64,
        /// Largest level; levels are 1, 2, 4, ... up to it.
        #[arg(long, default_value_t = 64)]
        nmax: u64,
        /// Largest last increment of a node counted in the limit field.
        #[arg(long, default_value_t = 1e-4)]
        seq_tol: f64,
    },
}

#[derive(Debug, Args)]
pub struct Common {
    /// Domain file (JSON).
    #[arg(long)]
    pub input: PathBuf,
    /// Directory for reports and field dumps.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Ordered reductions; reports are byte-identical across runs and thread counts.
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    pub deterministic: bool,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Newton tolerance on the weak residual.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Solve even when the Dirichlet hypotheses fail.
    #[arg(long)]
    pub force: bool,
}

impl SolveArgs {
    fn options(&self) -> SolveOptions {
        SolveOptions { newton_tol: self.tol, warn_only: self.force, ..SolveOptions::default() }
    }
}

/// Exit code for a library error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::NotAdmissible(_) => EXIT_ADMISSIBILITY,
        Error::Hypotheses(_) => EXIT_SOLVABILITY,
        Error::NonConvergence(_) => EXIT_NONCONVERGENCE,
        Error::NoConvergenceRegion => EXIT_NO_CONVERGENCE_REGION,
        Error::InvalidParams(_)
        | Error::InvalidArc(_)
        | Error::OpenBoundary { .. }
        | Error::SelfIntersecting(_)
        | Error::NotPositivelyOriented
        | Error::UnknownExpression(_)
        | Error::MissingData(_)
        | Error::MeshResolution { .. }
        | Error::Json(_) => EXIT_USAGE,
        _ => EXIT_INTERNAL,
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("nil3: {e}");
            exit_code(&e)
        }
    }
}

fn load(path: &Path) -> Result<DomainSpec> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::InvalidParams(format!("cannot read {}: {e}", path.display())))?;
    DomainSpec::from_json(&text)
}

fn emit<T: Serialize>(out: Option<&Path>, name: &str, report: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(report)?;
    // a closed pipe on stdout is not an error of the run
    let _ = writeln!(std::io::stdout().lock(), "{text}");
    if let Some(dir) = out {
        fs::create_dir_all(dir)?;
        fs::write(dir.join(name), text + "\n")?;
    }
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct CheckReport {
    pub passed: bool,
    pub admissibility: AdmissibilityReport,
    /// Hypotheses of the Dirichlet problem, decisive when every arc is a C arc.
    pub dirichlet: DirichletReport,
    pub solvability: Option<SolvabilityReport>,
}

#[derive(Debug, Serialize)]
struct SolveReport {
    nodes: usize,
    triangles: usize,
    h: f64,
    max_gradient: f64,
    residual: ResidualReport,
}

#[derive(Debug, Serialize)]
struct SequenceReport {
    n_values: Vec<u64>,
    stopped_at: Option<(u64, String)>,
    monotonicity_defect: Option<f64>,
    divergence: Option<DivergenceReport>,
    limit_nodes: usize,
}

fn execute(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Check { common, max_vertices } => {
            let dom = load(&common.input)?;
            let admissibility = check_admissible(&dom);
            let dirichlet = check_dirichlet_conditions(&dom);
            let solvability = if admissibility.passed {
                Some(check_solvability(&dom, &enumerate_polygons(&dom, *max_vertices)?)?)
            } else {
                None
            };
            let all_c = dom.arcs().iter().all(|a| a.label == ArcLabel::C);
            let code = if !admissibility.passed {
                EXIT_ADMISSIBILITY
            } else if !solvability.as_ref().is_some_and(|s| s.passed) || (all_c && !dirichlet.passed) {
                EXIT_SOLVABILITY
            } else {
                EXIT_OK
            };
            let report = CheckReport { passed: code == EXIT_OK, admissibility, dirichlet, solvability };
            emit(common.out.as_deref(), "check.json", &report)?;
            Ok(code)
        }
        Command::Solve { common, solve, h } => {
            let (sol, _) = solve_field(common, solve, *h)?;
            let mesh = sol.field.mesh();
            if let Some(dir) = &common.out {
                fs::create_dir_all(dir)?;
                sol.field.write_csv(dir.join("field.csv"))?;
                mesh.write_nodes_csv(dir.join("nodes.csv"))?;
                mesh.write_triangles_csv(dir.join("triangles.csv"))?;
            }
            let report = SolveReport {
                nodes: mesh.node_count(),
                triangles: mesh.triangle_count(),
                h: mesh.h(),
                max_gradient: sol.max_gradient,
                residual: sol.residual_report(),
            };
            emit(common.out.as_deref(), "residual.json", &report)?;
            Ok(EXIT_OK)
        }
        Command::Flux { common, solve, h } => {
            let (sol, dom) = solve_field(common, solve, *h)?;
            let report: FluxReport = flux_balance(&sol.field, dom.params())?;
            emit(common.out.as_deref(), "flux.json", &report)?;
            Ok(EXIT_OK)
        }
        Command::Sequence { common, solve, h, nmax, seq_tol } => {
            let dom = load(&common.input)?;
            let mesh = Arc::new(build_mesh(&dom, *h)?);
            let opts = SequenceOptions {
                solve: SolveOptions { newton_tol: solve.tol, ..SequenceOptions::default().solve },
                ..SequenceOptions::default()
            };
            let run = run_sequence(&dom, &mesh, &geometric_levels(*nmax), &opts)?;
            let divergence =
                if run.len() >= 3 { Some(detect_divergence(&run, &DivergenceThresholds::default())?) } else { None };
            let limit = divergence.as_ref().map(|d| limit_solution(&run, d, *seq_tol)).transpose();
            let (limit, code) = match limit {
                Ok(l) => (l, EXIT_OK),
                Err(Error::NoConvergenceRegion) => (None, EXIT_NO_CONVERGENCE_REGION),
                Err(e) => return Err(e),
            };
            if let Some(dir) = &common.out {
                fs::create_dir_all(dir)?;
                run.last().write_csv(dir.join("field_last.csv"))?;
                if let Some(l) = &limit {
                    l.field.write_csv(dir.join("limit.csv"))?;
                }
                if let Some(d) = &divergence {
                    fs::write(dir.join("divergence.json"), serde_json::to_string_pretty(d)? + "\n")?;
                }
            }
            let report = SequenceReport {
                n_values: run.n_values.clone(),
                stopped_at: run.stopped_at.clone(),
                monotonicity_defect: run.monotonicity_defect,
                divergence,
                limit_nodes: limit.as_ref().map_or(0, |l| l.mask.iter().filter(|&&m| m).count()),
            };
            emit(common.out.as_deref(), "sequence.json", &report)?;
            Ok(code)
        }
    }
}

fn solve_field(common: &Common, solve: &SolveArgs, h: f64) -> Result<(Solution, DomainSpec)> {
    let dom = load(&common.input)?;
    let adm = check_admissible(&dom);
    if !adm.passed {
        return Err(Error::NotAdmissible(format!("{} label violations", adm.curvature_violations.len())));
    }
    if let Some(i) = dom.arcs().iter().position(|a| a.label != ArcLabel::C) {
        return Err(Error::InvalidParams(format!("arc {i} has infinite data; use `sequence`")));
    }
    let mesh = Arc::new(build_mesh(&dom, h)?);
    let sol = solve_dirichlet(&dom, &mesh, &solve.options())?;
    Ok((sol, dom))
}
