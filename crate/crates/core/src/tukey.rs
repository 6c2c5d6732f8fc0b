//! Tukey depth, Caratheodory decomposition, depth-vs-probability bounds and
//! the 2D approximation structure.
//!
//! The structure fixes t0 = (c / gamma) ln n, computes the depth region
//! T = { x : tukey_depth(x) >= t0 } as an intersection of halfplanes bounded
//! by lines through site pairs whose open side holds fewer than t0 sites, and
//! answers queries by returning 1 inside T, and otherwise by running the
//! witness sweep over the few sites outside the two tangent lines plus the
//! tangent contact points treated as certain sites.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::geom::direction::Dir;
use crate::geom::halfplane::{halfplane_intersection, Halfplane};
use crate::geom::point::Point;
use crate::geom::polygon::{convex_hull_2d, ConvexRegion, Location};
use crate::geom::simplex::locate_in_simplex;
use crate::model::{ModelKind, UncertainPointSet};
use crate::scalar::{rat_pow, rat_to_f64, Rat};

/// Weighted 2D points for depth computations.
#[derive(Debug, Clone)]
pub struct WeightedPointSet {
    pub points: Vec<(Point, Rat)>,
}

impl WeightedPointSet {
    pub fn unweighted(points: &[Point]) -> Self {
        WeightedPointSet {
            points: points.iter().map(|p| (p.clone(), Rat::one())).collect(),
        }
    }
}

/// Exact weighted Tukey depth of `q`: the minimum total weight in a closed
/// halfplane containing `q`, by a rotational sweep over the critical
/// directions (each point contributes one entering and one leaving normal).
pub fn tukey_depth_2d(q: &Point, wps: &WeightedPointSet) -> Result<Rat> {
    q.check_dim(2)?;
    let mut base = Rat::zero();
    let mut dirs: Vec<(Dir, Rat)> = Vec::new();
    for (p, w) in &wps.points {
        p.check_dim(2)?;
        if w.is_negative() {
            return Err(Error::InvalidParameter("negative weight".into()));
        }
        match Dir::from_rat(&(p.x() - q.x()), &(p.y() - q.y())) {
            None => base += w, // points at q lie in every closed halfplane
            Some(d) => dirs.push((d, w.clone())),
        }
    }
    if dirs.is_empty() {
        return Ok(base);
    }

    // Events: point i is inside the halfplane with inner normal v exactly
    // when <delta_i, v> >= 0; it enters at v = delta_i rotated -90 degrees
    // and leaves at +90 degrees.
    struct Event {
        dir: Dir,
        delta: Rat,
    }
    let mut events: Vec<Event> = Vec::with_capacity(2 * dirs.len());
    for (d, w) in &dirs {
        events.push(Event {
            dir: Dir::from_big(d.y.clone(), -&d.x),
            delta: w.clone(),
        });
        events.push(Event {
            dir: d.rot90(),
            delta: -w.clone(),
        });
    }
    events.sort_by(|a, b| a.dir.angle_cmp(&b.dir));

    // Distinct event directions, each with its net delta.
    let mut merged: Vec<(Dir, Rat)> = Vec::new();
    for e in events {
        match merged.last_mut() {
            Some((d, delta)) if d.same_ray(&e.dir) => *delta += e.delta,
            _ => merged.push((e.dir, e.delta)),
        }
    }

    // A representative direction strictly inside the arc before merged[0]:
    // the bisector of the last and first event directions; if they are
    // antipodal (all points on one line through q), any perpendicular works.
    let first = &merged[0].0;
    let last = &merged.last().unwrap().0;
    let v0 = if merged.len() == 1 || first.opposite_ray(last) {
        first.rot90().negate()
    } else {
        Dir::from_big(&first.x + &last.x, &first.y + &last.y)
    };
    let mut s = Rat::zero();
    for (d, w) in &dirs {
        if d.dot_sign(&v0) >= 0 {
            s += w;
        }
    }
    let mut best = s.clone();
    for (_, delta) in &merged {
        s += delta;
        if s < best {
            best = s.clone();
        }
    }
    debug_assert_eq!(
        s,
        {
            let mut check = Rat::zero();
            for (d, w) in &dirs {
                if d.dot_sign(&v0) >= 0 {
                    check += w;
                }
            }
            check
        },
        "full sweep must return to the initial halfplane weight"
    );
    Ok(base + best)
}

/// Greedy Caratheodory peeling: repeatedly extract a d-simplex of `points`
/// strictly containing `p` and remove its vertices. The returned simplices
/// are vertex-disjoint and number at least ceil(depth / d).
pub fn caratheodory_decomposition(
    p: &Point,
    points: &[Point],
    d: usize,
) -> Result<Vec<Vec<Point>>> {
    use itertools::Itertools;
    p.check_dim(d)?;
    for q in points {
        q.check_dim(d)?;
    }
    let mut remaining: Vec<Point> = points.to_vec();
    let mut simplices = Vec::new();
    'peel: loop {
        if remaining.len() < d + 1 {
            break;
        }
        let found = remaining
            .iter()
            .cloned()
            .combinations(d + 1)
            .find(|combo| locate_in_simplex(p, combo) == Location::Inside);
        match found {
            Some(simplex) => {
                remaining.retain(|q| !simplex.contains(q));
                simplices.push(simplex);
            }
            None => break 'peel,
        }
    }
    Ok(simplices)
}

/// Diagnostic report for the depth-vs-probability inequalities at uniform
/// existence probability gamma.
#[derive(Debug, Clone)]
pub struct DepthBoundReport {
    pub tau: u64,
    pub gamma: Rat,
    /// `(1 - gamma)^tau <= 1 - pi`, evaluated exactly; the theorem guarantees
    /// this side.
    pub lower_holds: bool,
    /// `1 - pi <= d * exp(-gamma * tau / (c d^2))` at the configured c;
    /// diagnostic only since the paper's constant is unspecified.
    pub upper_holds: bool,
    pub upper_rhs: f64,
}

fn uniform_gamma(model: &UncertainPointSet) -> Result<Rat> {
    if model.kind != ModelKind::Unipoint {
        return Err(Error::NonUniform("model must be unipoint".into()));
    }
    let mut gamma: Option<Rat> = None;
    for g in &model.groups {
        let p = &g.sites[0].prob;
        match &gamma {
            None => gamma = Some(p.clone()),
            Some(g0) if g0 == p => {}
            Some(g0) => {
                return Err(Error::NonUniform(format!(
                    "probabilities {} and {} differ",
                    crate::scalar::format_rat(g0),
                    crate::scalar::format_rat(p)
                )))
            }
        }
    }
    gamma.ok_or_else(|| Error::InvalidParameter("empty model".into()))
}

/// Verifies Theorem-style depth bounds for an exact membership value `pi`.
pub fn check_depth_bounds(
    q: &Point,
    model: &UncertainPointSet,
    pi: &Rat,
    c: f64,
) -> Result<DepthBoundReport> {
    let gamma = uniform_gamma(model)?;
    let d = model.dimension;
    let pts = model.all_points();
    let tau_rat = tukey_depth_2d(q, &WeightedPointSet::unweighted(&pts))?;
    let tau = tau_rat
        .to_integer()
        .to_u64()
        .ok_or_else(|| Error::InvalidParameter("depth out of range".into()))?;
    let one_minus_pi = Rat::one() - pi;
    let lower_lhs = rat_pow(&(Rat::one() - &gamma), tau);
    let lower_holds = lower_lhs <= one_minus_pi;
    let gamma_f = rat_to_f64(&gamma);
    let upper_rhs = d as f64 * (-(gamma_f * tau as f64) / (c * (d * d) as f64)).exp();
    let upper_holds = rat_to_f64(&one_minus_pi) <= upper_rhs;
    Ok(DepthBoundReport {
        tau,
        gamma,
        lower_holds,
        upper_holds,
        upper_rhs,
    })
}

/// Integer weights emulating per-point probabilities gamma_i by multiplicity
/// at a common small probability eta = delta / (10 n):
/// `w_i = ceil(ln(1 - gamma_i) / ln(1 - eta))`. Probability-1 sites diverge
/// and map to the documented cap; their indices are reported back.
pub fn weights_from_probabilities(
    model: &UncertainPointSet,
    delta: f64,
) -> Result<(WeightedPointSet, Vec<usize>)> {
    if model.kind != ModelKind::Unipoint {
        return Err(Error::NonUniform("model must be unipoint".into()));
    }
    if !(0.0 < delta && delta < 1.0) {
        return Err(Error::InvalidParameter("delta must be in (0,1)".into()));
    }
    let n = model.groups.len();
    let eta = delta / (10.0 * n as f64);
    let ln_one_minus_eta = (1.0 - eta).ln();
    let cap = {
        let r = 10.0 * n as f64 / delta;
        (r.ln() * r).ceil()
    };
    let mut capped = Vec::new();
    let mut points = Vec::with_capacity(n);
    for (i, g) in model.groups.iter().enumerate() {
        let s = &g.sites[0];
        let w = if s.prob == Rat::one() {
            capped.push(i);
            cap
        } else {
            let g_f = rat_to_f64(&s.prob);
            ((1.0 - g_f).ln() / ln_one_minus_eta).ceil().max(1.0)
        };
        let w_int = BigInt::from(w as u64);
        points.push((s.point.clone(), Rat::from_integer(w_int)));
    }
    Ok((WeightedPointSet { points }, capped))
}

/// The depth-region structure for uniform-probability unipoint models.
pub struct TukeyStructure {
    pub gamma: Rat,
    pub c: f64,
    /// Real-valued threshold `(c / gamma) ln n`.
    pub t0: f64,
    /// Integer depth threshold actually used: ceil(t0).
    pub t0_threshold: u64,
    pub region: ConvexRegion,
}

pub const DEFAULT_TUKEY_C: f64 = 8.0;

pub fn build_tukey_structure(model: &UncertainPointSet, c: f64) -> Result<TukeyStructure> {
    let gamma = uniform_gamma(model)?;
    let n = model.groups.len();
    if n < 2 {
        return Err(Error::InvalidParameter("need at least two sites".into()));
    }
    let t0 = c / rat_to_f64(&gamma) * (n as f64).ln();
    let threshold = t0.ceil().max(1.0) as u64;
    let region = depth_region(&model.all_points(), threshold)?;
    Ok(TukeyStructure {
        gamma,
        c,
        t0,
        t0_threshold: threshold,
        region,
    })
}

/// Builder with an explicit integer threshold, for calibration and tests.
pub fn build_tukey_structure_with_threshold(
    model: &UncertainPointSet,
    threshold: u64,
) -> Result<TukeyStructure> {
    let gamma = uniform_gamma(model)?;
    let region = depth_region(&model.all_points(), threshold)?;
    Ok(TukeyStructure {
        gamma,
        c: 0.0,
        t0: threshold as f64,
        t0_threshold: threshold,
        region,
    })
}

/// `{ x : tukey_depth(x) >= t0 }` as the intersection of the closed-left
/// halfplanes of every directed site pair whose open right side holds fewer
/// than t0 sites. O(n^2 log n).
pub fn depth_region(pts: &[Point], t0: u64) -> Result<ConvexRegion> {
    let n = pts.len();
    let mut halfplanes: Vec<Halfplane> = Vec::new();
    for i in 0..n {
        // Sort the other points radially around pts[i]; the open right count
        // of the directed line i -> j is the size of the half-turn window
        // just behind j, maintained by the usual two pointers.
        let mut others: Vec<(usize, Dir)> = Vec::with_capacity(n - 1);
        for (j, p) in pts.iter().enumerate() {
            if j == i {
                continue;
            }
            let d = Dir::from_rat(&(p.x() - pts[i].x()), &(p.y() - pts[i].y())).ok_or_else(
                || Error::DegenerateSites(format!("sites {i} and {j} coincide")),
            )?;
            others.push((j, d));
        }
        others.sort_by(|a, b| a.1.angle_cmp(&b.1));
        for w in others.windows(2) {
            if w[0].1.same_ray(&w[1].1) {
                return Err(Error::Degenerate(format!(
                    "sites {}, {} and {} are collinear",
                    i, w[0].0, w[1].0
                )));
            }
        }
        let m = others.len();
        // Initial window: points strictly right of the ray i -> others[0].
        let mut in_right = vec![false; m];
        for (pos, (_, d)) in others.iter().enumerate().skip(1) {
            if others[0].1.cross_sign(d) < 0 {
                in_right[pos] = true;
            }
        }
        let mut window = 0usize;
        let mut arc_len = 0usize;
        for pos in (1..m).rev() {
            if in_right[pos] {
                window = pos;
                arc_len += 1;
            } else {
                break;
            }
        }
        for pos in 0..m {
            if pos > 0 {
                if arc_len == 0 {
                    window = pos - 1;
                }
                arc_len += 1;
                while arc_len > 0 {
                    let wd = &others[window].1;
                    if others[pos].1.cross_sign(wd) < 0 {
                        break;
                    }
                    window = (window + 1) % m;
                    arc_len -= 1;
                }
            }
            // Points exactly opposite j would sit on the line; collinearity
            // through pts[i] was rejected above.
            if (arc_len as u64) < t0 {
                let j = others[pos].0;
                halfplanes.push(Halfplane::left_of(&pts[i], &pts[j]));
            }
        }
    }
    Ok(halfplane_intersection(&halfplanes))
}

/// Result of a Tukey-structure query.
#[derive(Debug, Clone)]
pub struct TukeyQuery {
    pub estimate: Rat,
    /// Number of sites outside the tangent wedge (0 for interior queries).
    pub n_q: usize,
    pub inside_region: bool,
}

/// Approximate membership probability: 1 inside T, otherwise the witness
/// sweep over the sites beyond the tangent lines with the two tangent
/// contact points as certain sites.
pub fn query_tukey(
    ts: &TukeyStructure,
    model: &UncertainPointSet,
    q: &Point,
) -> Result<TukeyQuery> {
    q.check_dim(2)?;
    let gamma = uniform_gamma(model)?;
    debug_assert_eq!(gamma, ts.gamma);
    if ts.region.is_empty() {
        return Err(Error::EmptyRegion);
    }
    if ts.region.locate(q) != Location::Outside {
        return Ok(TukeyQuery {
            estimate: Rat::one(),
            n_q: 0,
            inside_region: true,
        });
    }

    // Tangent contact vertices: the angular extremes of the region's
    // vertices as seen from q.
    let verts = ts.region.vertices();
    if verts.is_empty() {
        return Err(Error::EmptyRegion);
    }
    let dirs: Vec<Dir> = verts
        .iter()
        .map(|v| {
            Dir::from_rat(&(v.x() - q.x()), &(v.y() - q.y()))
                .ok_or_else(|| Error::Degenerate("query on a region vertex".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut left = 0usize; // all other vertices clockwise of this one
    let mut right = 0usize;
    for k in 1..verts.len() {
        if dirs[left].cross_sign(&dirs[k]) > 0 {
            left = k;
        }
        if dirs[right].cross_sign(&dirs[k]) < 0 {
            right = k;
        }
    }
    let xi1 = &verts[left];
    let xi2 = &verts[right];

    // Sites strictly beyond either tangent line (the side away from T), plus
    // boundary sites, form P_q.
    let mut kept: Vec<(Point, Rat)> = Vec::new();
    let side_of = |contact: usize, s: &Point| -> i32 {
        let ds = Dir::from_rat(&(s.x() - q.x()), &(s.y() - q.y()));
        match ds {
            None => 0,
            Some(d) => dirs[contact].cross_sign(&d),
        }
    };
    // The region lies between the tangent rays: on the clockwise side of
    // the left tangent and the counter-clockwise side of the right one.
    // Sites coinciding with a contact vertex are absorbed by the certain
    // contact site below.
    for g in &model.groups {
        let s = &g.sites[0];
        if s.point == *xi1 || s.point == *xi2 {
            continue;
        }
        let sl = side_of(left, &s.point);
        let sr = side_of(right, &s.point);
        // Outside the wedge: counter-clockwise of the left tangent or
        // clockwise of the right tangent (boundary counts as outside).
        if sl >= 0 || sr <= 0 {
            kept.push((s.point.clone(), s.prob.clone()));
        }
    }
    let n_q = kept.len();

    // Witness sweep over P_q plus the tangent contacts as certain sites.
    let mut sites = kept;
    sites.push((xi1.clone(), Rat::one()));
    if xi2 != xi1 {
        sites.push((xi2.clone(), Rat::one()));
    }
    let sub = UncertainPointSet::unipoint(2, sites);
    let estimate: Rat = crate::membership::membership_2d(q, &sub)?;
    Ok(TukeyQuery {
        estimate,
        n_q,
        inside_region: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::parse_decimal;

    fn p(x: i64, y: i64) -> Point {
        Point::from_i64(&[x, y])
    }

    #[test]
    fn depth_of_triangle_points() {
        let pts = vec![p(0, 10), p(-10, -5), p(10, -5)];
        let wps = WeightedPointSet::unweighted(&pts);
        let inside = p(0, 0);
        assert_eq!(tukey_depth_2d(&inside, &wps).unwrap(), Rat::one());
        let outside = p(100, 100);
        assert_eq!(tukey_depth_2d(&outside, &wps).unwrap(), Rat::zero());
        // A vertex has depth 1 (the halfplane grazing it).
        assert_eq!(tukey_depth_2d(&p(0, 10), &wps).unwrap(), Rat::one());
    }

    #[test]
    fn depth_weights_equal_multiplicity() {
        let spots = [p(3, 1), p(-2, 4), p(1, -5), p(-4, -2), p(5, 3)];
        let weights = [2i64, 3, 5, 1, 4];
        let weighted = WeightedPointSet {
            points: spots
                .iter()
                .zip(weights.iter())
                .map(|(pt, &w)| (pt.clone(), Rat::from_integer(w.into())))
                .collect(),
        };
        let mut copies = Vec::new();
        for (pt, &w) in spots.iter().zip(weights.iter()) {
            for _ in 0..w {
                copies.push((pt.clone(), Rat::one()));
            }
        }
        let copied = WeightedPointSet { points: copies };
        for q in [p(0, 0), p(2, 2), p(-3, 1), p(10, 10)] {
            assert_eq!(
                tukey_depth_2d(&q, &weighted).unwrap(),
                tukey_depth_2d(&q, &copied).unwrap()
            );
        }
    }

    #[test]
    fn depth_grid_matches_bruteforce() {
        // Brute-force oracle: for every pair direction and each grid query,
        // the minimal closed halfplane through q bounded by a line through q
        // parallel to nothing in particular -- enumerate all directions
        // spanned by q->p_i and perpendiculars.
        let pts = vec![p(0, 0), p(4, 1), p(1, 5), p(-3, 2), p(2, -4), p(-1, -3)];
        let wps = WeightedPointSet::unweighted(&pts);
        for qx in -3..=3 {
            for qy in -3..=3 {
                let q = p(qx, qy);
                let fast = tukey_depth_2d(&q, &wps).unwrap();
                let slow = bruteforce_depth(&q, &pts);
                assert_eq!(fast, slow, "depth mismatch at ({qx},{qy})");
            }
        }
    }

    /// Independent oracle: the closed-halfplane count S(v) is piecewise
    /// constant in the inner normal v with breakpoints at the 2n critical
    /// normals; the minimum sits just off a breakpoint, so evaluate S at
    /// every breakpoint perturbed to either side. Points exactly on the
    /// boundary count only while the dot product stays nonnegative, i.e. at
    /// perturbation side s when cross(v, delta) has sign s.
    fn bruteforce_depth(q: &Point, pts: &[Point]) -> Rat {
        let at: i64 = pts.iter().filter(|p| *p == q).count() as i64;
        let dirs: Vec<Dir> = pts
            .iter()
            .filter(|p| *p != q)
            .map(|p| Dir::from_rat(&(p.x() - q.x()), &(p.y() - q.y())).unwrap())
            .collect();
        if dirs.is_empty() {
            return Rat::from_integer(at.into());
        }
        let mut best: Option<i64> = None;
        for d in &dirs {
            for normal in [d.rot90(), d.rot90().negate()] {
                for side in [1i32, -1] {
                    let count = dirs
                        .iter()
                        .filter(|e| {
                            let dot = normal.dot_sign(e);
                            dot > 0 || (dot == 0 && normal.cross_sign(e) == side)
                        })
                        .count() as i64;
                    best = Some(best.map_or(count, |b| b.min(count)));
                }
            }
        }
        Rat::from_integer((at + best.unwrap()).into())
    }

    #[test]
    fn caratheodory_single_triangle() {
        let pts = vec![p(0, 10), p(-10, -5), p(10, -5)];
        let simplices = caratheodory_decomposition(&p(0, 0), &pts, 2).unwrap();
        assert_eq!(simplices.len(), 1);
    }

    #[test]
    fn caratheodory_outside_is_empty() {
        let pts = vec![p(0, 10), p(-10, -5), p(10, -5)];
        let simplices = caratheodory_decomposition(&p(50, 50), &pts, 2).unwrap();
        assert!(simplices.is_empty());
    }

    #[test]
    fn caratheodory_bound_on_random_points() {
        let mut rng = 0xABCDEF9876543210u64;
        let mut next = move || {
            rng ^= rng << 13;
            rng ^= rng >> 7;
            rng ^= rng << 17;
            rng
        };
        for _ in 0..10 {
            let pts: Vec<Point> = (0..14)
                .map(|_| {
                    p(
                        (next() % 41) as i64 - 20,
                        (next() % 41) as i64 - 20,
                    )
                })
                .collect();
            let q = p(0, 0);
            let tau = tukey_depth_2d(&q, &WeightedPointSet::unweighted(&pts)).unwrap();
            let tau = tau.to_integer().to_u64().unwrap();
            let simplices = caratheodory_decomposition(&q, &pts, 2).unwrap();
            // Count bound.
            assert!(
                simplices.len() as u64 >= tau.div_ceil(2),
                "got {} simplices for depth {tau}",
                simplices.len()
            );
            // Strict containment and vertex-disjointness.
            let mut seen: Vec<Point> = Vec::new();
            for s in &simplices {
                assert_eq!(locate_in_simplex(&q, s), Location::Inside);
                for v in s {
                    assert!(!seen.contains(v), "shared vertex");
                    seen.push(v.clone());
                }
            }
        }
    }

    #[test]
    fn depth_bound_lower_side_on_triangle() {
        let half = parse_decimal("0.5").unwrap();
        let m = UncertainPointSet::unipoint(
            2,
            vec![
                (p(0, 10), half.clone()),
                (p(-10, -5), half.clone()),
                (p(10, -5), half),
            ],
        );
        let q = p(0, 0);
        let pi = Rat::new(1.into(), 8.into());
        let report = check_depth_bounds(&q, &m, &pi, 8.0).unwrap();
        assert_eq!(report.tau, 1);
        assert!(report.lower_holds); // 1/2 <= 7/8
    }

    #[test]
    fn zero_depth_bound_is_trivial() {
        let half = parse_decimal("0.5").unwrap();
        let m = UncertainPointSet::unipoint(
            2,
            vec![
                (p(0, 10), half.clone()),
                (p(-10, -5), half.clone()),
                (p(10, -5), half),
            ],
        );
        let far = p(500, 0);
        let report = check_depth_bounds(&far, &m, &Rat::zero(), 8.0).unwrap();
        assert_eq!(report.tau, 0);
        assert!(report.lower_holds); // 1 <= 1
    }

    #[test]
    fn weight_formula_fixed_values() {
        // gamma = 0.5, n = 10, delta = 0.1: eta = delta/(10 n) = 0.001 and
        // ceil(ln 0.5 / ln 0.999) = 693.
        let sites: Vec<(Point, Rat)> = (0..10)
            .map(|i| (p(i, i * i % 7 + 13 * i), parse_decimal("0.5").unwrap()))
            .collect();
        let m = UncertainPointSet::unipoint(2, sites);
        let (wps, capped) = weights_from_probabilities(&m, 0.1).unwrap();
        assert!(capped.is_empty());
        for (_, w) in &wps.points {
            assert_eq!(w, &Rat::from_integer(693.into()));
        }
        // gamma equal to eta gives weight exactly 1, and so does any smaller
        // probability.
        let tiny: Vec<(Point, Rat)> = (0..10)
            .map(|i| {
                (
                    p(i, 2 * i * i % 11 + 5 * i),
                    parse_decimal("0.001").unwrap(),
                )
            })
            .collect();
        let m2 = UncertainPointSet::unipoint(2, tiny);
        let (wps2, _) = weights_from_probabilities(&m2, 0.1).unwrap();
        for (_, w) in &wps2.points {
            assert_eq!(w, &Rat::one());
        }
    }

    #[test]
    fn certain_sites_get_capped_weight() {
        let m = UncertainPointSet::unipoint(
            2,
            vec![(p(0, 0), Rat::one()), (p(5, 3), parse_decimal("0.5").unwrap())],
        );
        let (wps, capped) = weights_from_probabilities(&m, 0.1).unwrap();
        assert_eq!(capped, vec![0]);
        assert!(wps.points[0].1 > wps.points[1].1);
    }

    #[test]
    fn depth_one_region_is_the_hull() {
        let pts = vec![p(0, 10), p(-10, -5), p(10, -5), p(1, 2), p(-3, 1)];
        let region = depth_region(&pts, 1).unwrap();
        let hull = convex_hull_2d(&pts);
        assert_eq!(
            region.canonical_vertices().unwrap(),
            hull.canonical_vertices().unwrap()
        );
    }

    #[test]
    fn region_vertices_have_threshold_depth() {
        let mut rng = 0x13579BDF2468ACE0u64;
        let mut next = move || {
            rng ^= rng << 13;
            rng ^= rng >> 7;
            rng ^= rng << 17;
            rng
        };
        let pts: Vec<Point> = (0..40)
            .map(|_| {
                p(
                    (next() % 2001) as i64 - 1000,
                    (next() % 2001) as i64 - 1000,
                )
            })
            .collect();
        let t0 = 6u64;
        let region = depth_region(&pts, t0).unwrap();
        let wps = WeightedPointSet::unweighted(&pts);
        for v in region.vertices() {
            let depth = tukey_depth_2d(v, &wps).unwrap();
            assert!(
                depth >= Rat::from_integer((t0 as i64).into()),
                "vertex depth {depth} below threshold {t0}"
            );
        }
        // Deep threshold empties the region (depth never exceeds n/2-ish).
        let empty = depth_region(&pts, 21).unwrap();
        assert!(empty.is_empty() || !empty.is_bounded_polygon());
    }

    #[test]
    fn query_inside_region_returns_one() {
        let sites: Vec<(Point, Rat)> = [
            p(0, 10),
            p(-10, -5),
            p(10, -5),
            p(0, 2),
            p(3, 1),
            p(-3, 1),
            p(1, -2),
        ]
        .iter()
        .map(|pt| (pt.clone(), parse_decimal("0.5").unwrap()))
        .collect();
        let m = UncertainPointSet::unipoint(2, sites);
        let ts = build_tukey_structure_with_threshold(&m, 1).unwrap();
        // T is the hull of all sites; the origin is inside.
        let out = query_tukey(&ts, &m, &p(0, 0)).unwrap();
        assert!(out.inside_region);
        assert_eq!(out.estimate, Rat::one());
        // A faraway query sees no sites beyond the tangents on the hull...
        let far = query_tukey(&ts, &m, &p(300, 3)).unwrap();
        assert!(!far.inside_region);
    }

    #[test]
    fn query_upper_bounds_exact_membership() {
        // Treating the depth region as a certain obstacle can only raise the
        // membership estimate, and the excess is controlled by the chance
        // that every site of some t0-deep halfplane vanishes. At threshold
        // t0 and gamma = 1/2 the slack is about 2n * 2^-t0.
        let mut rng = 0xFEDCBA0987654321u64;
        let mut next = move || {
            rng ^= rng << 13;
            rng ^= rng >> 7;
            rng ^= rng << 17;
            rng
        };
        let n = 60usize;
        let mut checked = 0;
        'inst: for _ in 0..20 {
            let mut sites: Vec<(Point, Rat)> = Vec::new();
            while sites.len() < n {
                let x = (next() % 20001) as i64 - 10000;
                let y = (next() % 20001) as i64 - 10000;
                if x * x + y * y <= 10000 * 10000 {
                    sites.push((p(x, y), parse_decimal("0.5").unwrap()));
                }
            }
            let m = UncertainPointSet::unipoint(2, sites);
            if m.validate().is_err() {
                continue;
            }
            let ts = match build_tukey_structure_with_threshold(&m, 10) {
                Ok(ts) => ts,
                Err(Error::Degenerate(_)) => continue,
                Err(e) => panic!("unexpected {e}"),
            };
            if ts.region.is_empty() {
                continue;
            }
            for _ in 0..30 {
                let q = p(
                    (next() % 24001) as i64 - 12000,
                    (next() % 24001) as i64 - 12000,
                );
                let out = match query_tukey(&ts, &m, &q) {
                    Ok(o) => o,
                    Err(Error::Degenerate(_)) => continue,
                    Err(e) => panic!("unexpected {e}"),
                };
                if out.inside_region {
                    continue;
                }
                let exact: Rat = match crate::membership::membership_2d(&q, &m) {
                    Ok(v) => v,
                    Err(Error::Degenerate(_)) => continue,
                    Err(e) => panic!("unexpected {e}"),
                };
                assert!(
                    out.estimate >= exact,
                    "obstacle estimate {} fell below exact {}",
                    out.estimate,
                    exact
                );
                assert!(out.estimate <= Rat::one());
                checked += 1;
            }
            if checked > 10 {
                break 'inst;
            }
        }
        assert!(checked > 10, "only {checked} usable queries");
    }

    #[test]
    fn empty_region_query_errors() {
        let sites: Vec<(Point, Rat)> = (0..5)
            .map(|i| (p(i, i * i + 1), parse_decimal("0.5").unwrap()))
            .collect();
        let m = UncertainPointSet::unipoint(2, sites);
        let ts = build_tukey_structure_with_threshold(&m, 50).unwrap();
        assert!(ts.region.is_empty());
        assert!(matches!(
            query_tukey(&ts, &m, &p(0, 0)),
            Err(Error::EmptyRegion)
        ));
    }
}
