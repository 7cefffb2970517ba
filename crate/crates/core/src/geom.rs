//! Small planar helpers shared by the domain and mesh modules.

use nalgebra::Vector2;

pub type P2 = Vector2<f64>;

#[inline]
pub fn p2(x: f64, y: f64) -> P2 {
    P2::new(x, y)
}

#[inline]
pub fn cross(a: &P2, b: &P2) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Left normal of a direction vector.
#[inline]
pub fn left_normal(t: &P2) -> P2 {
    P2::new(-t.y, t.x)
}

pub fn orient(a: &P2, b: &P2, c: &P2) -> f64 {
    cross(&(b - a), &(c - a))
}

/// Shoelace signed area of a closed polyline (last point joins the first).
pub fn polygon_signed_area(pts: &[P2]) -> f64 {
    let n = pts.len();
    let mut acc = 0.0;
    for i in 0..n {
        let a = &pts[i];
        let b = &pts[(i + 1) % n];
        acc += cross(a, b);
    }
    0.5 * acc
}

/// Even-odd point-in-polygon test.
pub fn point_in_polygon(p: &P2, pts: &[P2]) -> bool {
    let n = pts.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (&pts[i], &pts[j]);
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if p.x < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

pub fn dist_point_segment(p: &P2, a: &P2, b: &P2) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a).dot(&ab) / len2).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

pub fn dist_point_polyline_closed(p: &P2, pts: &[P2]) -> f64 {
    let n = pts.len();
    (0..n)
        .map(|i| dist_point_segment(p, &pts[i], &pts[(i + 1) % n]))
        .fold(f64::INFINITY, f64::min)
}

/// Proper or touching intersection of closed segments `ab` and `cd`.
pub fn segments_intersect(a: &P2, b: &P2, c: &P2, d: &P2, eps: f64) -> bool {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    if ((d1 > eps && d2 < -eps) || (d1 < -eps && d2 > eps))
        && ((d3 > eps && d4 < -eps) || (d3 < -eps && d4 > eps))
    {
        return true;
    }
    let on = |p: &P2, q: &P2, r: &P2, o: f64| -> bool {
        o.abs() <= eps
            && r.x >= p.x.min(q.x) - eps
            && r.x <= p.x.max(q.x) + eps
            && r.y >= p.y.min(q.y) - eps
            && r.y <= p.y.max(q.y) + eps
    };
    on(c, d, a, d1) || on(c, d, b, d2) || on(a, b, c, d3) || on(a, b, d, d4)
}

/// Checks that a closed polyline has no intersections between non-adjacent segments.
pub fn closed_polyline_is_simple(pts: &[P2], eps: f64) -> bool {
    let n = pts.len();
    if n < 3 {
        return false;
    }
    // bounding boxes first; quadratic but polylines here are a few thousand points at most
    let bbox: Vec<[f64; 4]> = (0..n)
        .map(|i| {
            let a = &pts[i];
            let b = &pts[(i + 1) % n];
            [a.x.min(b.x), a.x.max(b.x), a.y.min(b.y), a.y.max(b.y)]
        })
        .collect();
    for i in 0..n {
        for j in (i + 2)..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (bi, bj) = (&bbox[i], &bbox[j]);
            if bi[1] + eps < bj[0] || bj[1] + eps < bi[0] || bi[3] + eps < bj[2] || bj[3] + eps < bi[2] {
                continue;
            }
            if segments_intersect(&pts[i], &pts[(i + 1) % n], &pts[j], &pts[(j + 1) % n], eps) {
                return false;
            }
        }
    }
    true
}

/// Angle normalised to `(-pi, pi]`.
pub fn wrap_angle(a: f64) -> f64 {
    let two_pi = std::f64::consts::TAU;
    let mut r = a % two_pi;
    if r <= -std::f64::consts::PI {
        r += two_pi;
    } else if r > std::f64::consts::PI {
        r -= two_pi;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_square_area_and_containment() {
        let sq = [p2(0.0, 0.0), p2(1.0, 0.0), p2(1.0, 1.0), p2(0.0, 1.0)];
        assert!((polygon_signed_area(&sq) - 1.0).abs() < 1e-15);
        assert!(point_in_polygon(&p2(0.5, 0.5), &sq));
        assert!(!point_in_polygon(&p2(1.5, 0.5), &sq));
        assert!(closed_polyline_is_simple(&sq, 1e-12));
    }

    #[test]
    fn bowtie_is_not_simple() {
        let bt = [p2(0.0, 0.0), p2(1.0, 1.0), p2(1.0, 0.0), p2(0.0, 1.0)];
        assert!(!closed_polyline_is_simple(&bt, 1e-12));
    }
}
