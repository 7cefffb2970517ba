use super::Mesh;
use crate::domain::Curve;
use crate::error::{Error, Result};
use crate::geom::{left_normal, P2};

/// Which side of the direction of travel the normal points to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Piece of a curve inside one triangle, with midpoint-rule data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceSegment {
    pub start: P2,
    pub end: P2,
    pub midpoint: P2,
    pub triangle: usize,
    /// Unit normal at the midpoint, on the requested side.
    pub normal: P2,
    /// Arclength of the piece.
    pub weight: f64,
}

/// Pieces of a curve cut at the triangle edges. Curved pieces are first replaced
/// by chords at most `h / 8` long; straight pieces are clipped exactly.
pub fn interior_curve_trace(mesh: &Mesh, curve: &Curve, side: Side) -> Result<Vec<TraceSegment>> {
    let h = mesh.h();
    let tol = 0.1 * h;
    let mut out = Vec::new();
    let mut outside: Option<P2> = None;
    for piece in curve.pieces() {
        let l = piece.length();
        let n = if piece.is_curved() { ((8.0 * l / h).ceil() as usize).max(8) } else { 1 };
        let ds = l / n as f64;
        for k in 0..n {
            let s0 = ds * k as f64;
            let (a, b) = (piece.point_at(s0), piece.point_at(s0 + ds));
            let len = (b - a).norm();
            if len == 0.0 {
                continue;
            }
            let nudge = 1e-6 * h / len;
            let step = h / (64.0 * len);
            let mut f0 = 0.0;
            while f0 < 1.0 - 1e-12 {
                let fp = f0 + nudge.min(0.5 * (1.0 - f0));
                let probe = a + (b - a) * fp;
                let (triangle, f1) = match mesh.locate(&probe) {
                    Some((t, _)) => (Some(t), exit_fraction(mesh, t, &a, &b).max(fp).min(1.0)),
                    None => (mesh.locate_near(&probe, tol), (f0 + step).min(1.0)),
                };
                let sm = s0 + ds * 0.5 * (f0 + f1);
                let mid = piece.point_at(sm);
                match triangle {
                    Some(triangle) => {
                        let t = piece.tangent_at(sm);
                        let normal = match side {
                            Side::Left => left_normal(&t),
                            Side::Right => -left_normal(&t),
                        };
                        out.push(TraceSegment {
                            start: a + (b - a) * f0,
                            end: a + (b - a) * f1,
                            midpoint: mid,
                            triangle,
                            normal,
                            weight: ds * (f1 - f0),
                        });
                    }
                    None => {
                        outside.get_or_insert(mid);
                    }
                }
                f0 = f1;
            }
        }
    }
    match outside {
        Some(p) if !out.is_empty() => Err(Error::CurveExitsDomain { x: p.x, y: p.y }),
        Some(_) => Ok(Vec::new()),
        None => Ok(out),
    }
}

/// Fraction along `a -> b` at which the segment leaves triangle `t`.
fn exit_fraction(mesh: &Mesh, t: usize, a: &P2, b: &P2) -> f64 {
    let (la, lb) = (mesh.barycentric(t, a), mesh.barycentric(t, b));
    (0..3)
        .filter(|&i| lb[i] < la[i])
        .map(|i| la[i] / (la[i] - lb[i]))
        .fold(f64::INFINITY, f64::min)
}
