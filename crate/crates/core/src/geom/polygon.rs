//! 2D convex regions: hulls, membership tests, canonical forms.

use crate::geom::direction::Dir;
use crate::geom::point::Point;
use crate::geom::predicates::orient2d;
use crate::scalar::Rat;

/// Classification of a point against a closed convex set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    Inside,
    Boundary,
    Outside,
}

/// A (possibly degenerate or unbounded) convex region of the plane.
///
/// `Polygon` vertices are in strictly convex CCW order. `Unbounded` regions
/// carry a CCW chain of vertices plus the two boundary rays leaving the first
/// and last chain vertex; the region lies to the left of the directed
/// boundary (ray_in arrives at the first vertex, ray_out leaves the last).
#[derive(Debug, Clone)]
pub enum ConvexRegion {
    Empty,
    Point(Point),
    Segment(Point, Point),
    Polygon(Vec<Point>),
    Unbounded {
        vertices: Vec<Point>,
        ray_in: Dir,
        ray_out: Dir,
    },
    HalfplaneLike {
        // Intersection that is a halfplane, strip, line or ray: kept as the
        // defining constraint list since it has no useful vertex chain.
        halfplanes: Vec<crate::geom::halfplane::Halfplane>,
    },
    WholePlane,
}

impl ConvexRegion {
    pub fn is_empty(&self) -> bool {
        matches!(self, ConvexRegion::Empty)
    }

    pub fn is_bounded_polygon(&self) -> bool {
        matches!(self, ConvexRegion::Polygon(_))
    }

    /// Vertices for the bounded cases (empty for the others).
    pub fn vertices(&self) -> &[Point] {
        match self {
            ConvexRegion::Point(p) => std::slice::from_ref(p),
            ConvexRegion::Segment(a, _b) => std::slice::from_ref(a),
            ConvexRegion::Polygon(v) => v,
            ConvexRegion::Unbounded { vertices, .. } => vertices,
            _ => &[],
        }
    }

    /// Exact point classification for the bounded cases.
    pub fn locate(&self, q: &Point) -> Location {
        match self {
            ConvexRegion::Empty => Location::Outside,
            ConvexRegion::WholePlane => Location::Inside,
            ConvexRegion::Point(p) => {
                if p == q {
                    Location::Boundary
                } else {
                    Location::Outside
                }
            }
            ConvexRegion::Segment(a, b) => {
                if point_on_segment(q, a, b) {
                    Location::Boundary
                } else {
                    Location::Outside
                }
            }
            ConvexRegion::Polygon(v) => locate_in_convex_polygon(q, v),
            ConvexRegion::HalfplaneLike { halfplanes } => {
                let mut on_boundary = false;
                for h in halfplanes {
                    match h.eval_sign(q) {
                        s if s < 0 => return Location::Outside,
                        0 => on_boundary = true,
                        _ => {}
                    }
                }
                if on_boundary {
                    Location::Boundary
                } else {
                    Location::Inside
                }
            }
            ConvexRegion::Unbounded {
                vertices,
                ray_in,
                ray_out,
            } => {
                // The region is the intersection of the supporting halfplanes
                // of its boundary edges (two rays plus the chain segments).
                use crate::geom::halfplane::Halfplane;
                let shift = |p: &Point, d: &Dir| {
                    Point::new(vec![
                        p.x() + Rat::from_integer(d.x.clone()),
                        p.y() + Rat::from_integer(d.y.clone()),
                    ])
                };
                let first = &vertices[0];
                let last = vertices.last().unwrap();
                let mut hs: Vec<Halfplane> =
                    vec![Halfplane::left_of(first, &shift(first, ray_in))];
                for w in vertices.windows(2) {
                    hs.push(Halfplane::left_of(&w[0], &w[1]));
                }
                hs.push(Halfplane::left_of(last, &shift(last, ray_out)));
                let mut on_boundary = false;
                for h in &hs {
                    match h.eval_sign(q) {
                        s if s < 0 => return Location::Outside,
                        0 => on_boundary = true,
                        _ => {}
                    }
                }
                if on_boundary {
                    Location::Boundary
                } else {
                    Location::Inside
                }
            }
        }
    }

    /// Canonical vertex list for equality comparison of bounded regions:
    /// rotation-normalized CCW order (lexicographically smallest vertex
    /// first). Returns None for unbounded/whole-plane regions.
    pub fn canonical_vertices(&self) -> Option<Vec<Point>> {
        match self {
            ConvexRegion::Empty => Some(vec![]),
            ConvexRegion::Point(p) => Some(vec![p.clone()]),
            ConvexRegion::Segment(a, b) => {
                let mut v = vec![a.clone(), b.clone()];
                v.sort_by(|p, q| lex_cmp(p, q));
                Some(v)
            }
            ConvexRegion::Polygon(verts) => {
                let start = verts
                    .iter()
                    .enumerate()
                    .min_by(|(_, a), (_, b)| lex_cmp(a, b))
                    .map(|(i, _)| i)
                    .unwrap();
                let mut out = Vec::with_capacity(verts.len());
                for k in 0..verts.len() {
                    out.push(verts[(start + k) % verts.len()].clone());
                }
                Some(out)
            }
            _ => None,
        }
    }
}

pub fn lex_cmp(a: &Point, b: &Point) -> std::cmp::Ordering {
    a.x().cmp(b.x()).then_with(|| a.y().cmp(b.y()))
}

/// Closed-segment membership (all exact).
pub fn point_on_segment(q: &Point, a: &Point, b: &Point) -> bool {
    if a == b {
        return q == a;
    }
    if orient2d(a, b, q) != 0 {
        return false;
    }
    let within = |lo: &Rat, hi: &Rat, v: &Rat| {
        let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
        lo <= v && v <= hi
    };
    within(a.x(), b.x(), q.x()) && within(a.y(), b.y(), q.y())
}

/// Convex hull of 2D points (monotone chain), CCW, strictly convex.
/// Degenerate inputs collapse to Empty / Point / Segment.
pub fn convex_hull_2d(points: &[Point]) -> ConvexRegion {
    let mut pts: Vec<Point> = points.to_vec();
    pts.sort_by(lex_cmp);
    pts.dedup();
    match pts.len() {
        0 => return ConvexRegion::Empty,
        1 => return ConvexRegion::Point(pts.pop().unwrap()),
        _ => {}
    }
    // Collinear set check while building handles the segment case.
    let mut lower: Vec<Point> = Vec::new();
    for p in &pts {
        while lower.len() >= 2
            && orient2d(&lower[lower.len() - 2], &lower[lower.len() - 1], p) <= 0
        {
            lower.pop();
        }
        lower.push(p.clone());
    }
    let mut upper: Vec<Point> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2
            && orient2d(&upper[upper.len() - 2], &upper[upper.len() - 1], p) <= 0
        {
            upper.pop();
        }
        upper.push(p.clone());
    }
    if lower.len() == 2 && upper.len() == 2 {
        return ConvexRegion::Segment(lower[0].clone(), lower[1].clone());
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    ConvexRegion::Polygon(lower)
}

/// Classifies `q` against a strictly convex CCW polygon in O(log n) via
/// fan binary search from vertex 0.
pub fn locate_in_convex_polygon(q: &Point, verts: &[Point]) -> Location {
    let n = verts.len();
    debug_assert!(n >= 3);
    let v0 = &verts[0];
    // Orientation of q against the fan edges from v0.
    let s1 = orient2d(v0, &verts[1], q);
    let s2 = orient2d(v0, &verts[n - 1], q);
    if s1 < 0 || s2 > 0 {
        return Location::Outside;
    }
    if s1 == 0 {
        return if point_on_segment(q, v0, &verts[1]) {
            Location::Boundary
        } else {
            Location::Outside
        };
    }
    if s2 == 0 {
        return if point_on_segment(q, v0, &verts[n - 1]) {
            Location::Boundary
        } else {
            Location::Outside
        };
    }
    // Binary search for the wedge v0-v[i]-v[i+1] containing q.
    let (mut lo, mut hi) = (1usize, n - 1);
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if orient2d(v0, &verts[mid], q) >= 0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    match orient2d(&verts[lo], &verts[lo + 1], q) {
        s if s > 0 => Location::Inside,
        0 => Location::Boundary,
        _ => Location::Outside,
    }
}

/// Closed point-in-hull test for 2D point sets (hull built on the fly).
pub fn point_in_hull_2d(q: &Point, sites: &[Point]) -> Location {
    match convex_hull_2d(sites) {
        ConvexRegion::Empty => Location::Outside,
        ConvexRegion::Point(p) => {
            if &p == q {
                Location::Boundary
            } else {
                Location::Outside
            }
        }
        ConvexRegion::Segment(a, b) => {
            if point_on_segment(q, &a, &b) {
                Location::Boundary
            } else {
                Location::Outside
            }
        }
        ConvexRegion::Polygon(v) => locate_in_convex_polygon(q, &v),
        _ => unreachable!("hull of finitely many points is bounded"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(x: i64, y: i64) -> Point {
        Point::from_i64(&[x, y])
    }

    #[test]
    fn hull_of_nothing_is_empty() {
        assert!(convex_hull_2d(&[]).is_empty());
    }

    #[test]
    fn hull_two_points_is_segment() {
        match convex_hull_2d(&[p(0, 0), p(1, 1)]) {
            ConvexRegion::Segment(a, b) => {
                assert_eq!(a, p(0, 0));
                assert_eq!(b, p(1, 1));
            }
            other => panic!("expected segment, got {other:?}"),
        }
    }

    #[test]
    fn hull_drops_interior_points() {
        // Brute-force extreme-point check fixed the expected hull:
        // (1, 0.5) and (1, 0.5)-style interior points must vanish.
        let interior = Point::from_decimals(&["1", "0.5"]).unwrap();
        let pts = vec![p(0, 0), p(2, 0), p(1, 1), interior];
        match convex_hull_2d(&pts) {
            ConvexRegion::Polygon(v) => {
                assert_eq!(v, vec![p(0, 0), p(2, 0), p(1, 1)]);
            }
            other => panic!("expected polygon, got {other:?}"),
        }
    }

    #[test]
    fn hull_collinear_is_segment() {
        match convex_hull_2d(&[p(0, 0), p(1, 1), p(2, 2), p(3, 3)]) {
            ConvexRegion::Segment(a, b) => {
                assert_eq!(a, p(0, 0));
                assert_eq!(b, p(3, 3));
            }
            other => panic!("expected segment, got {other:?}"),
        }
    }

    #[test]
    fn point_in_triangle_classifications() {
        let tri = [p(0, 0), p(2, 0), p(1, 1)];
        let inside = Point::from_decimals(&["1", "0.2"]).unwrap();
        assert_eq!(point_in_hull_2d(&inside, &tri), Location::Inside);
        assert_eq!(point_in_hull_2d(&p(5, 5), &tri), Location::Outside);
        assert_eq!(point_in_hull_2d(&p(1, 0), &tri), Location::Boundary);
        assert_eq!(point_in_hull_2d(&p(0, 0), &tri), Location::Boundary);
    }

    proptest! {
        /// Hull vertices are exactly the extreme points (brute-force check
        /// against a per-point "outside some supporting line" test).
        #[test]
        fn hull_matches_bruteforce_extremes(
            coords in proptest::collection::vec((-12i64..12, -12i64..12), 0..9)
        ) {
            let pts: Vec<Point> = coords.iter().map(|&(x, y)| p(x, y)).collect();
            let hull = convex_hull_2d(&pts);
            let hull_set: Vec<Point> = hull.vertices().to_vec();
            let verts: Vec<Point> = match &hull {
                ConvexRegion::Segment(a, b) => vec![a.clone(), b.clone()],
                _ => hull_set,
            };
            // Every input point must be inside/on the hull.
            for q in &pts {
                let loc = point_in_hull_2d(q, &pts);
                prop_assert!(loc != Location::Outside);
                if verts.contains(q) {
                    prop_assert_eq!(loc, Location::Boundary);
                }
            }
            // Every vertex must be a point of the input.
            for v in &verts {
                prop_assert!(pts.contains(v));
            }
        }

        /// Locate agrees with an O(n) sign scan for polygons.
        #[test]
        fn locate_agrees_with_linear_scan(
            coords in proptest::collection::vec((-10i64..10, -10i64..10), 3..9),
            qx in -15i64..15, qy in -15i64..15
        ) {
            let pts: Vec<Point> = coords.iter().map(|&(x, y)| p(x, y)).collect();
            if let ConvexRegion::Polygon(v) = convex_hull_2d(&pts) {
                let q = p(qx, qy);
                let fast = locate_in_convex_polygon(&q, &v);
                let mut signs = Vec::new();
                for i in 0..v.len() {
                    signs.push(orient2d(&v[i], &v[(i + 1) % v.len()], &q));
                }
                let slow = if signs.iter().any(|&s| s < 0) {
                    Location::Outside
                } else if signs.iter().any(|&s| s == 0) {
                    Location::Boundary
                } else {
                    Location::Inside
                };
                prop_assert_eq!(fast, slow);
            }
        }
    }
}
