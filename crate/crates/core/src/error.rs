use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Outcome of a Newton solve that did not reach the residual tolerance.
#[derive(Debug, Clone)]
pub struct NonConvergence {
    pub last_iterate: Vec<f64>,
    pub residual_history: Vec<f64>,
    pub flagged_blowup: bool,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid arc: {0}")]
    InvalidArc(String),

    #[error("boundary chain is open between arc {arc} and arc {next} (gap {gap:.3e})")]
    OpenBoundary { arc: usize, next: usize, gap: f64 },

    #[error("boundary is not a simple closed curve: {0}")]
    SelfIntersecting(String),

    #[error("boundary must be positively oriented (counter-clockwise)")]
    NotPositivelyOriented,

    #[error("arclength {s} outside [0, {length}]")]
    OutOfRange { s: f64, length: f64 },

    #[error("unknown boundary expression `{0}`")]
    UnknownExpression(String),

    #[error("arc {0} carries no boundary data")]
    MissingData(usize),

    #[error("mesh size {h} cannot resolve arc {arc}: {samples} samples (need at least 4)")]
    MeshResolution { arc: usize, h: f64, samples: usize },

    #[error("mesh generation failed: {0}")]
    MeshGeneration(String),

    #[error("degenerate triangle {0}")]
    DegenerateTriangle(usize),

    #[error("curve leaves the meshed domain near ({x:.4}, {y:.4})")]
    CurveExitsDomain { x: f64, y: f64 },

    #[error("curves do not bound a region: {0}")]
    NotClosed(String),

    #[error("fields live on different meshes")]
    MeshMismatch,

    #[error("domain is not admissible: {0}")]
    NotAdmissible(String),

    #[error("Dirichlet solvability hypotheses fail: {0}")]
    Hypotheses(String),

    #[error("Newton iteration did not converge (last residual {:.3e})", .0.residual_history.last().copied().unwrap_or(f64::NAN))]
    NonConvergence(Box<NonConvergence>),

    #[error("linear solve failed: {0}")]
    LinearSolve(String),

    #[error("no node of the sequence converged")]
    NoConvergenceRegion,

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
