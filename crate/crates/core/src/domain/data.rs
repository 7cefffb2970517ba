use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

use super::arc::ArcGeometry;

/// Built-in boundary functions addressable from JSON by id.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuiltinExpr {
    Zero,
    LinearX,
    LinearY,
    /// `x * y`
    Saddle,
    /// `ln cos x - ln cos y`
    Scherk,
    /// `-ln(4 s (L - s) / L^2)`: zero at the midpoint, `+inf` at both endpoints
    LogBarrier,
}

impl BuiltinExpr {
    pub const ALL: [BuiltinExpr; 6] =
        [Self::Zero, Self::LinearX, Self::LinearY, Self::Saddle, Self::Scherk, Self::LogBarrier];

    pub fn id(self) -> &'static str {
        match self {
            Self::Zero => "zero",
            Self::LinearX => "linear-x",
            Self::LinearY => "linear-y",
            Self::Saddle => "xy",
            Self::Scherk => "scherk",
            Self::LogBarrier => "log-barrier",
        }
    }

    pub fn from_id(id: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|e| e.id() == id)
            .ok_or_else(|| Error::UnknownExpression(id.to_string()))
    }
}

pub type DataFn = dyn Fn(f64, f64) -> f64 + Send + Sync;

/// Boundary values on a C arc. Values may diverge at arc endpoints.
#[derive(Clone)]
pub enum BoundaryData {
    Const(f64),
    Expr(BuiltinExpr),
    /// Function of the point `(x, y)`.
    Custom(Arc<DataFn>),
}

impl fmt::Debug for BoundaryData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Const(c) => f.debug_tuple("Const").field(c).finish(),
            Self::Expr(e) => f.debug_tuple("Expr").field(&e.id()).finish(),
            Self::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl BoundaryData {
    pub fn custom(f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::Custom(Arc::new(f))
    }

    /// Value at arclength `s` along `arc`.
    pub fn eval(&self, arc: &ArcGeometry, s: f64) -> f64 {
        let p = arc.point_at(s);
        match self {
            Self::Const(c) => *c,
            Self::Expr(e) => match e {
                BuiltinExpr::Zero => 0.0,
                BuiltinExpr::LinearX => p.x,
                BuiltinExpr::LinearY => p.y,
                BuiltinExpr::Saddle => p.x * p.y,
                BuiltinExpr::Scherk => p.x.cos().ln() - p.y.cos().ln(),
                BuiltinExpr::LogBarrier => {
                    let l = arc.length();
                    -(4.0 * s * (l - s) / (l * l)).ln()
                }
            },
            Self::Custom(f) => f(p.x, p.y),
        }
    }
}
