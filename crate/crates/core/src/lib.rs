//! Constant mean curvature graphs over planar domains in the Heisenberg space
//! `Nil3(tau)`.
//!
//! The crate is organised bottom-up:
//!
//! * [`ambient`]: metric, orthonormal frame, connection, Ricci curvature and the
//!   upward normal of a graph `z = u(x, y)`.
//! * [`domain`]: curvilinear domains bounded by labelled circular arcs,
//!   admissibility checks, admissible polygons and the solvability inequalities.
//! * [`mesh`]: triangulation of curvilinear domains with boundary nodes on the arcs.
//! * [`solver`]: the prescribed mean curvature operator and a damped Newton
//!   Dirichlet solver for the weak form `div X_u = 2H`.
//! * [`flux`]: flux of a solution across boundary arcs and interior curves.
//! * [`jenkins_serrin`]: truncated-data solution sequences, divergence-line
//!   detection and limit solutions.
//! * [`fixtures`]: ready-made domains with known behaviour.
//! * [`cli`]: the `nil3` command line front end.
//!
//! Worked examples for each capability live in the crate's `examples/` directory.

pub mod ambient;
pub mod cli;
pub mod domain;
pub mod error;
pub mod fixtures;
pub mod flux;
pub mod geom;
pub mod jenkins_serrin;
pub mod mesh;
pub mod solver;

pub use ambient::{AmbientParams, FrameVector, GraphJet};
pub use domain::{ArcGeometry, ArcLabel, ArcSpec, BoundaryData, Curve, DomainSpec, PolygonSpec};
pub use error::{Error, Result};
pub use mesh::{Mesh, ScalarField};
pub use solver::{SolveOptions, Solution};
