//! Halfplanes and exact halfplane intersection.
//!
//! A halfplane is `{(x, y) : a*x + b*y <= c}` with integer coefficients
//! (rational inputs are scaled at construction; positive scaling changes
//! nothing). Intersection sorts by normal angle and runs the classic deque
//! pass inside an exact bounding box: with integer coefficients any corner of
//! two boundaries has |coordinate| <= 2*maxC*maxB, so a box beyond that bound
//! cannot clip a bounded result. The box is stripped afterwards to recover
//! unbounded regions, and a witness check against the inputs turns infeasible
//! leftovers into `Empty`.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::geom::direction::Dir;
use crate::geom::point::Point;
use crate::geom::polygon::ConvexRegion;
use crate::scalar::{clear_denominators, Rat};

#[derive(Debug, Clone)]
pub struct Halfplane {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
}

impl Halfplane {
    /// `{ a x + b y <= c }` from rational coefficients; (a, b) != (0, 0).
    pub fn new(a: Rat, b: Rat, c: Rat) -> Halfplane {
        assert!(
            !(a.is_zero() && b.is_zero()),
            "halfplane normal must be nonzero"
        );
        let (scaled, _) = clear_denominators(&[a, b, c]);
        Halfplane {
            a: scaled[0].clone(),
            b: scaled[1].clone(),
            c: scaled[2].clone(),
        }
    }

    pub fn from_ints(a: i64, b: i64, c: i64) -> Halfplane {
        assert!(a != 0 || b != 0);
        Halfplane {
            a: a.into(),
            b: b.into(),
            c: c.into(),
        }
    }

    /// Closed halfplane left of the directed line `from -> to`.
    pub fn left_of(from: &Point, to: &Point) -> Halfplane {
        // left of (from->to): cross(to-from, p-from) >= 0
        // => (dy)x - (dx)y <= dy*fx - dx*fy  ... with flipped sign:
        // -(dy)x + (dx)y >= -(dy*fx - dx*fy); normalize to <= form.
        let dx = to.x() - from.x();
        let dy = to.y() - from.y();
        let c = &dy * from.x() - &dx * from.y();
        Halfplane::new(dy, -dx, c)
    }

    /// Boundary direction with the region on the left (normal rotated +90).
    pub fn boundary_dir(&self) -> Dir {
        Dir::from_big(-self.b.clone(), self.a.clone())
    }

    pub fn normal_dir(&self) -> Dir {
        Dir::from_big(self.a.clone(), self.b.clone())
    }

    /// Sign of `c - (a x + b y)`: positive strictly inside, zero on the
    /// boundary, negative outside.
    pub fn eval_sign(&self, p: &Point) -> i32 {
        let (nums, den) = clear_denominators(&[p.x().clone(), p.y().clone()]);
        let v = &self.c * &den - (&self.a * &nums[0] + &self.b * &nums[1]);
        crate::scalar::bigint_sign(&v)
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.eval_sign(p) >= 0
    }

    /// Intersection point of the two boundary lines, if not parallel.
    pub fn boundary_intersection(&self, other: &Halfplane) -> Option<Point> {
        let det = &self.a * &other.b - &self.b * &other.a;
        if det.is_zero() {
            return None;
        }
        let x = Rat::new(&self.c * &other.b - &self.b * &other.c, det.clone());
        let y = Rat::new(&self.a * &other.c - &self.c * &other.a, det);
        Some(Point::new(vec![x, y]))
    }

    /// A point on the boundary line.
    pub fn boundary_point(&self) -> Point {
        let den = &self.a * &self.a + &self.b * &self.b;
        Point::new(vec![
            Rat::new(&self.a * &self.c, den.clone()),
            Rat::new(&self.b * &self.c, den),
        ])
    }
}

/// Exact intersection of a set of closed halfplanes.
pub fn halfplane_intersection(hs: &[Halfplane]) -> ConvexRegion {
    if hs.is_empty() {
        return ConvexRegion::WholePlane;
    }

    // Sort by outward-normal angle; among equal directions keep the tightest.
    let mut sorted: Vec<&Halfplane> = hs.iter().collect();
    sorted.sort_by(|p, q| p.normal_dir().angle_cmp(&q.normal_dir()));
    let mut uniq: Vec<Halfplane> = Vec::new();
    for h in sorted {
        if let Some(last) = uniq.last_mut() {
            if last.normal_dir().same_ray(&h.normal_dir()) {
                if tighter(h, last) {
                    *last = h.clone();
                }
                continue;
            }
        }
        uniq.push(h.clone());
    }

    // Antiparallel pairs: strict infeasibility ends it, a coincident pair
    // collapses the region onto a line (1-D problem).
    let dirs: Vec<Dir> = uniq.iter().map(|h| h.normal_dir()).collect();
    for (i, h) in uniq.iter().enumerate() {
        let neg = dirs[i].negate();
        if let Ok(j) = dirs.binary_search_by(|d| d.angle_cmp(&neg)) {
            match slab_state(h, &uniq[j]) {
                SlabState::Empty => return ConvexRegion::Empty,
                SlabState::Line => return intersect_on_line(h, &uniq),
                SlabState::Proper => {}
            }
        }
    }

    // Exact box beyond any boundary-pair corner.
    let mut max_b = BigInt::one();
    let mut max_c = BigInt::one();
    for h in &uniq {
        max_b = max_b.max(h.a.magnitude().to_owned().into());
        max_b = max_b.max(h.b.magnitude().to_owned().into());
        max_c = max_c.max(h.c.magnitude().to_owned().into());
    }
    let m: BigInt = BigInt::from(2) * &max_b * &max_c + 1;
    let boxed = [
        Halfplane {
            a: BigInt::one(),
            b: BigInt::zero(),
            c: m.clone(),
        },
        Halfplane {
            a: BigInt::zero(),
            b: BigInt::one(),
            c: m.clone(),
        },
        Halfplane {
            a: -BigInt::one(),
            b: BigInt::zero(),
            c: m.clone(),
        },
        Halfplane {
            a: BigInt::zero(),
            b: -BigInt::one(),
            c: m.clone(),
        },
    ];

    #[derive(Clone)]
    struct Entry {
        h: Halfplane,
        is_box: bool,
    }
    let mut entries: Vec<Entry> = uniq
        .iter()
        .map(|h| Entry {
            h: h.clone(),
            is_box: false,
        })
        .collect();
    for bh in &boxed {
        // Insert keeping the sorted order; merge with an existing parallel
        // constraint (an input at least as tight makes the box edge moot).
        let nd = bh.normal_dir();
        match entries.binary_search_by(|e| e.h.normal_dir().angle_cmp(&nd)) {
            Ok(_) => {
                // Existing constraint in this exact direction is tighter than
                // the box by construction of m; skip the box edge.
            }
            Err(pos) => entries.insert(
                pos,
                Entry {
                    h: bh.clone(),
                    is_box: true,
                },
            ),
        }
    }

    // Classic deque pass.
    let mut dq: std::collections::VecDeque<Entry> = std::collections::VecDeque::new();
    for e in &entries {
        while dq.len() >= 2 {
            let last = &dq[dq.len() - 1].h;
            let prev = &dq[dq.len() - 2].h;
            if corner_survives(prev, last, &e.h) {
                break;
            }
            dq.pop_back();
        }
        while dq.len() >= 2 {
            let first = dq[0].h.clone();
            let second = dq[1].h.clone();
            if corner_survives(&second, &first, &e.h) {
                break;
            }
            dq.pop_front();
        }
        dq.push_back(e.clone());
    }
    loop {
        let n = dq.len();
        if n < 3 {
            break;
        }
        let back_corner_bad = !corner_survives(&dq[n - 2].h, &dq[n - 1].h, &dq[0].h);
        if back_corner_bad {
            dq.pop_back();
            continue;
        }
        let front_corner_bad = !corner_survives(&dq[1].h, &dq[0].h, &dq[dq.len() - 1].h);
        if front_corner_bad {
            dq.pop_front();
            continue;
        }
        break;
    }

    if dq.len() < 3 {
        return ConvexRegion::Empty;
    }

    // Corners of consecutive survivors (cyclic).
    let k = dq.len();
    let mut corners: Vec<Point> = Vec::with_capacity(k);
    for i in 0..k {
        let j = (i + 1) % k;
        match dq[i].h.boundary_intersection(&dq[j].h) {
            Some(p) => corners.push(p),
            None => {
                // Adjacent parallel survivors: unreachable with the box in
                // place; bail out conservatively.
                return ConvexRegion::HalfplaneLike {
                    halfplanes: dq.into_iter().map(|e| e.h).collect(),
                };
            }
        }
    }

    // Witness feasibility: with a feasible input the deque region is exact,
    // so its first corner satisfies everything; otherwise the input was
    // infeasible.
    if corners.iter().any(|p| uniq.iter().any(|h| !h.contains(p))) {
        return ConvexRegion::Empty;
    }

    let any_box = dq.iter().any(|e| e.is_box);
    if !any_box {
        let mut verts = corners;
        dedup_cyclic(&mut verts);
        return match verts.len() {
            0 => ConvexRegion::Empty,
            1 => ConvexRegion::Point(verts.swap_remove(0)),
            2 => ConvexRegion::Segment(verts.swap_remove(0), verts.swap_remove(0)),
            _ => ConvexRegion::Polygon(verts),
        };
    }

    // Unbounded region: keep only corners between consecutive REAL entries.
    // The real entries form one contiguous cyclic run (single recession
    // cone); walk it.
    let real_idx: Vec<usize> = (0..k).filter(|&i| !dq[i].is_box).collect();
    if real_idx.is_empty() {
        return ConvexRegion::WholePlane;
    }
    // Find the start of the contiguous run in cyclic order.
    let mut start = real_idx[0];
    if real_idx.len() < k {
        // rotate: start = a real entry whose predecessor is a box entry
        start = (0..k)
            .find(|&i| !dq[i].is_box && dq[(i + k - 1) % k].is_box)
            .unwrap_or(real_idx[0]);
    }
    let mut run: Vec<usize> = Vec::new();
    let mut i = start;
    while !dq[i].is_box {
        run.push(i);
        i = (i + 1) % k;
        if i == start {
            break;
        }
    }
    if run.len() != real_idx.len() {
        // Non-contiguous real entries: not a single convex opening; give the
        // constraint form rather than a wrong chain.
        return ConvexRegion::HalfplaneLike {
            halfplanes: dq.into_iter().filter(|e| !e.is_box).map(|e| e.h).collect(),
        };
    }
    if run.len() == 1 {
        return ConvexRegion::HalfplaneLike {
            halfplanes: vec![dq[run[0]].h.clone()],
        };
    }
    let mut verts: Vec<Point> = Vec::new();
    for w in run.windows(2) {
        verts.push(corners[w[0]].clone());
        debug_assert_eq!((w[0] + 1) % k, w[1]);
    }
    verts.dedup();
    let ray_in = dq[run[0]].h.boundary_dir();
    let ray_out = dq[*run.last().unwrap()].h.boundary_dir();
    ConvexRegion::Unbounded {
        vertices: verts,
        ray_in,
        ray_out,
    }
}

/// True if `b` is at least as restrictive as `a`; both normals on one ray.
fn tighter(b: &Halfplane, a: &Halfplane) -> bool {
    // b tighter iff c_b * s_a < c_a * s_b with s_* the shared-sign nonzero
    // normal component magnitudes.
    let (sa, sb) = if !a.a.is_zero() {
        (a.a.magnitude().to_owned(), b.a.magnitude().to_owned())
    } else {
        (a.b.magnitude().to_owned(), b.b.magnitude().to_owned())
    };
    &b.c * BigInt::from(sa) < &a.c * BigInt::from(sb)
}

enum SlabState {
    Empty,
    Line,
    Proper,
}

/// State of two antiparallel halfplanes.
fn slab_state(h1: &Halfplane, h2: &Halfplane) -> SlabState {
    // h1: n.x <= c1; h2: (-t n).x <= c2, t > 0  =>  n.x >= -c2/t.
    // Infeasible iff -c2/t > c1  iff  -c2 * s1 > c1 * s2.
    let (s1, s2) = if !h1.a.is_zero() {
        (h1.a.magnitude().to_owned(), h2.a.magnitude().to_owned())
    } else {
        (h1.b.magnitude().to_owned(), h2.b.magnitude().to_owned())
    };
    let lhs = -(&h2.c) * BigInt::from(s1);
    let rhs = &h1.c * BigInt::from(s2);
    if lhs > rhs {
        SlabState::Empty
    } else if lhs == rhs {
        SlabState::Line
    } else {
        SlabState::Proper
    }
}

/// Whether the corner of boundaries `prev` and `last` satisfies `h`.
fn corner_survives(prev: &Halfplane, last: &Halfplane, h: &Halfplane) -> bool {
    match last.boundary_intersection(prev) {
        Some(p) => h.contains(&p),
        // Parallel boundaries inside the deque: keep and let later passes
        // resolve; unreachable once the box separates antiparallel normals.
        None => true,
    }
}

fn dedup_cyclic(verts: &mut Vec<Point>) {
    verts.dedup();
    while verts.len() > 1 && verts.first() == verts.last() {
        verts.pop();
    }
}

/// The feasible region collapsed onto the boundary line of `line_h`.
fn intersect_on_line(line_h: &Halfplane, all: &[Halfplane]) -> ConvexRegion {
    let (a, b) = (&line_h.a, &line_h.b);
    let p0 = line_h.boundary_point();
    // Parameterize p0 + t * (-b, a); each halfplane becomes alpha*t <= beta.
    let mut lo: Option<Rat> = None;
    let mut hi: Option<Rat> = None;
    for h in all {
        let alpha = Rat::from_integer(&h.b * a - &h.a * b);
        let beta = Rat::from_integer(h.c.clone())
            - (Rat::from_integer(h.a.clone()) * p0.x() + Rat::from_integer(h.b.clone()) * p0.y());
        if alpha.is_zero() {
            if beta < Rat::zero() {
                return ConvexRegion::Empty;
            }
            continue;
        }
        let bound = &beta / &alpha;
        if alpha > Rat::zero() {
            hi = Some(match hi {
                Some(h0) if h0 <= bound => h0,
                _ => bound,
            });
        } else {
            lo = Some(match lo {
                Some(l0) if l0 >= bound => l0,
                _ => bound,
            });
        }
    }
    let at = |t: &Rat| {
        Point::new(vec![
            p0.x() + Rat::from_integer(-b.clone()) * t,
            p0.y() + Rat::from_integer(a.clone()) * t,
        ])
    };
    match (lo, hi) {
        (Some(l), Some(h)) => {
            if l > h {
                ConvexRegion::Empty
            } else if l == h {
                ConvexRegion::Point(at(&l))
            } else {
                ConvexRegion::Segment(at(&l), at(&h))
            }
        }
        // Rays and full lines have no finite vertex chain.
        _ => ConvexRegion::HalfplaneLike {
            halfplanes: all.to_vec(),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::polygon::Location;
    use proptest::prelude::*;

    fn hp(a: i64, b: i64, c: i64) -> Halfplane {
        Halfplane::from_ints(a, b, c)
    }

    #[test]
    fn empty_input_gives_whole_plane() {
        assert!(matches!(
            halfplane_intersection(&[]),
            ConvexRegion::WholePlane
        ));
    }

    #[test]
    fn unit_triangle() {
        // x >= 0, y >= 0, x + y <= 1.
        let hs = vec![hp(-1, 0, 0), hp(0, -1, 0), hp(1, 1, 1)];
        let r = halfplane_intersection(&hs);
        let canon = r.canonical_vertices().expect("bounded");
        assert_eq!(
            canon,
            vec![
                Point::from_i64(&[0, 0]),
                Point::from_i64(&[1, 0]),
                Point::from_i64(&[0, 1]),
            ]
        );
    }

    #[test]
    fn infeasible_slab_is_empty() {
        // x <= 0 and x >= 1.
        let hs = vec![hp(1, 0, 0), hp(-1, 0, -1)];
        assert!(halfplane_intersection(&hs).is_empty());
    }

    #[test]
    fn infeasible_triangle_is_empty() {
        // x <= -1, y <= -1, x + y >= 3: no antiparallel pair.
        let hs = vec![hp(1, 0, -1), hp(0, 1, -1), hp(-1, -1, -3)];
        assert!(halfplane_intersection(&hs).is_empty());
    }

    #[test]
    fn tight_slab_collapses_to_segment() {
        // x <= 0, x >= 0, 0 <= y <= 1.
        let hs = vec![hp(1, 0, 0), hp(-1, 0, 0), hp(0, -1, 0), hp(0, 1, 1)];
        match halfplane_intersection(&hs) {
            ConvexRegion::Segment(a, b) => {
                let mut got = vec![a, b];
                got.sort_by(crate::geom::polygon::lex_cmp);
                assert_eq!(got[0], Point::from_i64(&[0, 0]));
                assert_eq!(got[1], Point::from_i64(&[0, 1]));
            }
            other => panic!("expected segment, got {other:?}"),
        }
    }

    #[test]
    fn single_point_intersection() {
        let hs = vec![hp(1, 0, 0), hp(-1, 0, 0), hp(0, 1, 0), hp(0, -1, 0)];
        match halfplane_intersection(&hs) {
            ConvexRegion::Point(p) => assert_eq!(p, Point::from_i64(&[0, 0])),
            other => panic!("expected point, got {other:?}"),
        }
    }

    #[test]
    fn corner_point_from_three_lines() {
        // x >= 0, y >= 0, x + y <= 0 pinches to the origin.
        let hs = vec![hp(-1, 0, 0), hp(0, -1, 0), hp(1, 1, 0)];
        match halfplane_intersection(&hs) {
            ConvexRegion::Point(p) => assert_eq!(p, Point::from_i64(&[0, 0])),
            other => panic!("expected point, got {other:?}"),
        }
    }

    #[test]
    fn unbounded_quadrant() {
        let hs = vec![hp(-1, 0, 0), hp(0, -1, 0)];
        match halfplane_intersection(&hs) {
            ConvexRegion::Unbounded {
                vertices,
                ray_in,
                ray_out,
            } => {
                assert_eq!(vertices, vec![Point::from_i64(&[0, 0])]);
                // Region x >= 0, y >= 0: boundary arrives down the y-axis and
                // leaves along the x-axis.
                assert!(ray_in.same_ray(&Dir::from_big(0.into(), (-1).into())));
                assert!(ray_out.same_ray(&Dir::from_big(1.into(), 0.into())));
            }
            other => panic!("expected unbounded, got {other:?}"),
        }
    }

    #[test]
    fn single_halfplane_is_halfplane_like() {
        match halfplane_intersection(&[hp(1, 0, 0)]) {
            ConvexRegion::HalfplaneLike { halfplanes } => assert_eq!(halfplanes.len(), 1),
            other => panic!("expected halfplane-like, got {other:?}"),
        }
    }

    #[test]
    fn redundant_halfplanes_are_dropped() {
        let hs = vec![
            hp(-1, 0, 0),
            hp(0, -1, 0),
            hp(1, 1, 1),
            hp(1, 1, 5),
            hp(1, 0, 10),
        ];
        let r = halfplane_intersection(&hs);
        assert_eq!(r.canonical_vertices().unwrap().len(), 3);
    }

    proptest! {
        /// Containment in every input halfplane; each vertex on >= 2
        /// boundaries; membership agrees with direct constraint evaluation
        /// on a grid.
        #[test]
        fn result_consistent(seed in proptest::collection::vec((-6i64..=6, -6i64..=6, -8i64..=8), 3..10)) {
            let hs: Vec<Halfplane> = seed
                .iter()
                .filter(|&&(a, b, _)| a != 0 || b != 0)
                .map(|&(a, b, c)| hp(a, b, c))
                .collect();
            prop_assume!(hs.len() >= 3);
            let region = halfplane_intersection(&hs);
            for v in region.vertices() {
                for h in &hs {
                    prop_assert!(h.contains(v), "vertex {v} violates {h:?}");
                }
                let on = hs.iter().filter(|h| h.eval_sign(v) == 0).count();
                prop_assert!(on >= 2, "vertex {v} on {on} boundaries");
            }
            for x in -9..=9i64 {
                for y in -9..=9i64 {
                    let q = Point::from_i64(&[x, y]);
                    let inside_all = hs.iter().all(|h| h.contains(&q));
                    let loc = region.locate(&q);
                    prop_assert_eq!(
                        loc != Location::Outside,
                        inside_all,
                        "mismatch at {} for {:?}",
                        q,
                        region
                    );
                }
            }
        }
    }
}
