//! JSON schema for domain files.
//!
//! ```json
//! { "tau": 0.1, "H": 0.3,
//!   "arcs": [ { "kind": "circular", "center": [0, 0], "radius": 1,
//!               "theta0": 0, "theta1": 3.14159, "label": "C", "data": {"const": 0} } ] }
//! ```

use serde::{Deserialize, Serialize};

use super::arc::ArcGeometry;
use super::data::{BoundaryData, BuiltinExpr};
use super::{ArcLabel, ArcSpec, DomainSpec};
use crate::ambient::AmbientParams;
use crate::error::{Error, Result};
use crate::geom::{p2, P2};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainFile {
    pub tau: f64,
    #[serde(rename = "H")]
    pub h: f64,
    pub arcs: Vec<ArcFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArcFile {
    #[serde(flatten)]
    pub geometry: GeometryFile,
    pub label: ArcLabel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<DataFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GeometryFile {
    Circular { center: [f64; 2], radius: f64, theta0: f64, theta1: f64 },
    Segment { start: [f64; 2], end: [f64; 2] },
    Polyline { points: Vec<[f64; 2]> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DataFile {
    Const {
        #[serde(rename = "const")]
        value: f64,
    },
    Expr {
        #[serde(rename = "expr-id")]
        id: String,
    },
}

fn pt(a: [f64; 2]) -> P2 {
    p2(a[0], a[1])
}

fn arr(p: P2) -> [f64; 2] {
    [p.x, p.y]
}

impl GeometryFile {
    fn build(&self) -> Result<ArcGeometry> {
        match self {
            Self::Circular { center, radius, theta0, theta1 } => {
                ArcGeometry::circular(pt(*center), *radius, *theta0, *theta1)
            }
            Self::Segment { start, end } => ArcGeometry::segment(pt(*start), pt(*end)),
            Self::Polyline { points } => ArcGeometry::polyline(points.iter().copied().map(pt).collect()),
        }
    }

    fn from_geometry(g: &ArcGeometry) -> Self {
        match g {
            ArcGeometry::Circular(c) => Self::Circular {
                center: arr(c.center),
                radius: c.radius,
                theta0: c.theta0,
                theta1: c.theta1,
            },
            ArcGeometry::Segment { start, end } => Self::Segment { start: arr(*start), end: arr(*end) },
            ArcGeometry::Polyline(p) => Self::Polyline { points: p.points().iter().copied().map(arr).collect() },
        }
    }
}

impl DomainFile {
    pub fn build(&self) -> Result<DomainSpec> {
        let params = AmbientParams::new(self.tau, self.h)?;
        let arcs = self
            .arcs
            .iter()
            .map(|a| {
                let data = match &a.data {
                    None => None,
                    Some(DataFile::Const { value }) => Some(BoundaryData::Const(*value)),
                    Some(DataFile::Expr { id }) => Some(BoundaryData::Expr(BuiltinExpr::from_id(id)?)),
                };
                Ok(ArcSpec { geometry: a.geometry.build()?, label: a.label, data })
            })
            .collect::<Result<Vec<_>>>()?;
        DomainSpec::new(arcs, params)
    }

    /// Fails on arcs carrying closures, which have no JSON form.
    pub fn from_domain(dom: &DomainSpec) -> Result<Self> {
        let arcs = dom
            .arcs()
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let data = match &a.data {
                    None => None,
                    Some(BoundaryData::Const(c)) => Some(DataFile::Const { value: *c }),
                    Some(BoundaryData::Expr(e)) => Some(DataFile::Expr { id: e.id().to_string() }),
                    Some(BoundaryData::Custom(_)) => {
                        return Err(Error::InvalidArc(format!("arc {i} has data without a JSON form")))
                    }
                };
                Ok(ArcFile { geometry: GeometryFile::from_geometry(&a.geometry), label: a.label, data })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { tau: dom.params().tau, h: dom.params().h, arcs })
    }
}

impl DomainSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let file: DomainFile = serde_json::from_str(text)?;
        file.build()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&DomainFile::from_domain(self)?)?)
    }
}
