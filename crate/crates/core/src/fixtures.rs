//! Ready-made domains used by the examples, the CLI tests and the acceptance suite.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::ambient::AmbientParams;
use crate::domain::{ArcGeometry, ArcLabel, ArcSpec, BoundaryData, BuiltinExpr, DomainSpec};
use crate::error::Result;
use crate::geom::p2;

/// Circle of radius `r` about the origin as two C half-circles with zero data.
pub fn disk(r: f64, tau: f64, h: f64) -> Result<DomainSpec> {
    let o = p2(0.0, 0.0);
    DomainSpec::new(
        vec![
            ArcSpec::new(ArcGeometry::circular(o, r, 0.0, PI)?, ArcLabel::C).with_data(BoundaryData::Const(0.0)),
            ArcSpec::new(ArcGeometry::circular(o, r, PI, TAU)?, ArcLabel::C).with_data(BoundaryData::Const(0.0)),
        ],
        AmbientParams::new(tau, h)?,
    )
}

/// Unit disk with `H = 0.3` and zero data; for `tau = 0` the solution is a spherical cap.
pub fn cap(tau: f64) -> Result<DomainSpec> {
    disk(1.0, tau, 0.3)
}

/// Exact cap over the disk of radius `r` for `tau = 0`: the lower part of a sphere
/// of radius `1/H` through the boundary circle at height zero.
pub fn cap_exact(r: f64, h: f64, x: f64, y: f64) -> f64 {
    let rho = 1.0 / h;
    (rho * rho - r * r).sqrt() - (rho * rho - x * x - y * y).sqrt()
}

/// Disk of radius `1/(2H)` with the upper half an A arc and the lower half a C arc with zero data.
pub fn half_disk_js(tau: f64, h: f64) -> Result<DomainSpec> {
    let r = 1.0 / (2.0 * h);
    let o = p2(0.0, 0.0);
    DomainSpec::new(
        vec![
            ArcSpec::new(ArcGeometry::circular(o, r, 0.0, PI)?, ArcLabel::A),
            ArcSpec::new(ArcGeometry::circular(o, r, PI, TAU)?, ArcLabel::C).with_data(BoundaryData::Const(0.0)),
        ],
        AmbientParams::new(tau, h)?,
    )
}

/// Disk of radius `1/(2H)` cut into an A arc of opening `TAU - opening` and a C arc
/// of opening `opening` centred at the bottom, with zero data.
///
/// For `opening = 2` the polygon bounded by the A arc and the reflection of the C
/// arc across its chord violates `2 alpha < l + 2H A`, so the sequence diverges
/// along the reflected arc.
pub fn lens_failing(tau: f64, h: f64, opening: f64) -> Result<DomainSpec> {
    let r = 1.0 / (2.0 * h);
    let o = p2(0.0, 0.0);
    let (c0, c1) = (-FRAC_PI_2 - opening / 2.0, -FRAC_PI_2 + opening / 2.0);
    DomainSpec::new(
        vec![
            ArcSpec::new(ArcGeometry::circular(o, r, c1, c0 + TAU)?, ArcLabel::A),
            ArcSpec::new(ArcGeometry::circular(o, r, c0, c1)?, ArcLabel::C).with_data(BoundaryData::Const(0.0)),
        ],
        AmbientParams::new(tau, h)?,
    )
}

/// Two circles of radius `1/(2H)` centred at `(-c, 0)` and `(c, 0)`, each contributing an
/// A arc of opening `TAU - 2`, joined by a bridge whose top and bottom are C arcs of
/// radius `1/(2H)` with zero data.
///
/// Each A arc with the reflection of its missing arc bounds a failing polygon, so the
/// sequence diverges along two disjoint arcs.
pub fn twin_lens_failing(tau: f64, h: f64, c: f64) -> Result<DomainSpec> {
    let r = 1.0 / (2.0 * h);
    let (left, right) = (p2(-c, 0.0), p2(c, 0.0));
    let (half, y) = (c - r * 1f64.cos(), r * 1f64.sin());
    if !(half > 0.0 && half < r) {
        return Err(crate::error::Error::InvalidParams(format!("bridge half-width {half} must be below {r}")));
    }
    let rise = (r * r - half * half).sqrt();
    let (bt, bb) = (p2(0.0, y - rise), p2(0.0, -y + rise));
    let a = (half / r).asin();
    let arcs = vec![
        ArcSpec::new(ArcGeometry::circular(bt, r, FRAC_PI_2 - a, FRAC_PI_2 + a)?, ArcLabel::C)
            .with_data(BoundaryData::Const(0.0)),
        ArcSpec::new(ArcGeometry::circular(left, r, 1.0, TAU - 1.0)?, ArcLabel::A),
        ArcSpec::new(ArcGeometry::circular(bb, r, -FRAC_PI_2 - a, -FRAC_PI_2 + a)?, ArcLabel::C)
            .with_data(BoundaryData::Const(0.0)),
        ArcSpec::new(ArcGeometry::circular(right, r, PI + 1.0, 3.0 * PI - 1.0)?, ArcLabel::A),
    ];
    DomainSpec::new(arcs, AmbientParams::new(tau, h)?)
}

/// Axis-aligned rectangle `[x0, x1] x [y0, y1]` as four C segments carrying `data`.
pub fn rectangle(x0: f64, y0: f64, x1: f64, y1: f64, data: BoundaryData, params: AmbientParams) -> Result<DomainSpec> {
    let v = [p2(x0, y0), p2(x1, y0), p2(x1, y1), p2(x0, y1)];
    let arcs = (0..4)
        .map(|i| Ok(ArcSpec::new(ArcGeometry::segment(v[i], v[(i + 1) % 4])?, ArcLabel::C).with_data(data.clone())))
        .collect::<Result<Vec<_>>>()?;
    DomainSpec::new(arcs, params)
}

/// Unit square with zero data and the given parameters.
pub fn square(tau: f64, h: f64) -> Result<DomainSpec> {
    rectangle(0.0, 0.0, 1.0, 1.0, BoundaryData::Const(0.0), AmbientParams::new(tau, h)?)
}

/// `(-a, a)^2` with Scherk data `log(cos x / cos y)` for `tau = H = 0`.
pub fn scherk_rectangle(a: f64) -> Result<DomainSpec> {
    rectangle(-a, -a, a, a, BoundaryData::Expr(BuiltinExpr::Scherk), AmbientParams::new(0.0, 0.0)?)
}

/// Scherk's surface `log(cos x / cos y)`, a minimal graph over `(-pi/2, pi/2)^2`.
pub fn scherk_exact(x: f64, y: f64) -> f64 {
    (x.cos() / y.cos()).ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::check_admissible;
    use approx::assert_abs_diff_eq;

    #[test]
    fn fixtures_are_admissible() {
        for d in [
            cap(0.1).unwrap(),
            half_disk_js(0.0, 0.25).unwrap(),
            lens_failing(0.0, 0.5, 2.0).unwrap(),
            twin_lens_failing(0.0, 0.5, 1.2).unwrap(),
        ] {
            assert!(check_admissible(&d).passed);
        }
        let l = lens_failing(0.0, 0.5, 2.0).unwrap();
        assert_abs_diff_eq!(l.arc(1).geometry.length(), 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(l.area(), PI, epsilon = 1e-12);
    }

    #[test]
    fn cap_exact_vanishes_on_boundary() {
        assert_abs_diff_eq!(cap_exact(1.0, 0.3, 0.6, 0.8), 0.0, epsilon = 1e-14);
        assert!(cap_exact(1.0, 0.3, 0.0, 0.0) < 0.0);
    }
}
