//! Beta-hulls of multipoint models in 2D.
//!
//! A convex set is beta-dense when it holds at least a beta fraction of every
//! uncertain point's mass; the beta-hull is the intersection of all such
//! sets, equivalently of all beta-dense halfplanes. Lower halfplanes are
//! handled in the dual plane: a halfplane `y <= m x + c` is dense iff its
//! dual point lies on or below every group's beta-level (the upper boundary
//! of the region where the closed mass above is at least beta). The primal
//! constraints are therefore `q below the dual line of v` for every vertex v
//! of the levels' lower envelope, plus the two vertical clamps given by the
//! envelope's end slopes. Upper halfplanes reuse the same machinery on the
//! y-flipped input, and an exact halfplane intersection assembles the hull.
//!
//! The oracle route enumerates both closed halfplanes of every ordered site
//! pair, keeps the dense ones and intersects; under general position with at
//! least three groups the two routes agree exactly.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::geom::dual::DualLine;
use crate::geom::halfplane::{halfplane_intersection, Halfplane};
use crate::geom::point::Point;
use crate::geom::polygon::ConvexRegion;
use crate::model::{Group, ModelKind, UncertainPointSet};
use crate::scalar::Rat;

/// An x-monotone polygonal chain composed of dual-line pieces; piece `i`
/// spans `breaks[i-1] .. breaks[i]` (unbounded at the ends).
#[derive(Debug, Clone)]
pub struct MonotoneChain {
    pub lines: Vec<DualLine>,
    pub breaks: Vec<Rat>,
}

impl MonotoneChain {
    pub fn single(line: DualLine) -> Self {
        MonotoneChain {
            lines: vec![line],
            breaks: vec![],
        }
    }

    pub fn y_at(&self, x: &Rat) -> Rat {
        self.line_at(x).y_at(x)
    }

    pub fn line_at(&self, x: &Rat) -> &DualLine {
        let idx = self.breaks.partition_point(|b| b < x);
        &self.lines[idx]
    }

    /// Chain vertices (breakpoints with their y-values).
    pub fn vertices(&self) -> Vec<Point> {
        self.breaks
            .iter()
            .enumerate()
            .map(|(i, x)| {
                let y = self.lines[i].y_at(x);
                debug_assert_eq!(y, self.lines[i + 1].y_at(x), "chain must be continuous");
                Point::new(vec![x.clone(), y])
            })
            .collect()
    }

    /// Drops zero-width pieces and merges equal neighbors.
    fn normalized(mut self) -> Self {
        let mut lines: Vec<DualLine> = Vec::new();
        let mut breaks: Vec<Rat> = Vec::new();
        lines.push(self.lines.remove(0));
        for (line, brk) in self.lines.into_iter().zip(self.breaks.into_iter()) {
            if *lines.last().unwrap() == line {
                continue;
            }
            lines.push(line);
            breaks.push(brk);
        }
        MonotoneChain { lines, breaks }
    }
}

/// The closed beta-level of one group's dual lines: the graph of the
/// smallest y at each x whose weakly-above mass reaches beta.
pub fn beta_level(group: &Group, beta: &Rat) -> Result<MonotoneChain> {
    if beta <= &Rat::zero() {
        return Err(Error::InvalidParameter("beta must be positive".into()));
    }
    if &group.mass() < beta {
        return Err(Error::NoLevel(format!(
            "group mass {} below beta {}",
            crate::scalar::format_rat(&group.mass()),
            crate::scalar::format_rat(beta)
        )));
    }
    let duals: Vec<(DualLine, Rat)> = group
        .sites
        .iter()
        .map(|s| (DualLine::of_point(&s.point), s.prob.clone()))
        .collect();

    // Candidate break x's: all pairwise crossings.
    let mut xs: Vec<Rat> = Vec::new();
    for i in 0..duals.len() {
        for j in i + 1..duals.len() {
            if let Some(x) = duals[i].0.intersect_x(&duals[j].0) {
                xs.push(x);
            }
        }
    }
    xs.sort();
    xs.dedup();

    // Pick the level line per slab at an interior sample x.
    let sample_xs: Vec<Rat> = slab_samples(&xs);
    let mut lines: Vec<DualLine> = Vec::new();
    for sx in &sample_xs {
        lines.push(level_line_at(&duals, beta, sx)?);
    }
    let chain = MonotoneChain { lines, breaks: xs };
    Ok(chain.normalized())
}

/// One interior sample per slab induced by sorted breakpoints.
fn slab_samples(xs: &[Rat]) -> Vec<Rat> {
    if xs.is_empty() {
        return vec![Rat::zero()];
    }
    let mut out = Vec::with_capacity(xs.len() + 1);
    out.push(xs.first().unwrap() - Rat::one());
    for w in xs.windows(2) {
        out.push((&w[0] + &w[1]) / Rat::from_integer(2.into()));
    }
    out.push(xs.last().unwrap() + Rat::one());
    out
}

/// The line achieving the closed level at x: order lines by y descending and
/// take the first whose cumulative mass reaches beta.
fn level_line_at(duals: &[(DualLine, Rat)], beta: &Rat, x: &Rat) -> Result<DualLine> {
    let mut vals: Vec<(Rat, usize)> = duals
        .iter()
        .enumerate()
        .map(|(i, (d, _))| (d.y_at(x), i))
        .collect();
    vals.sort_by(|a, b| b.0.cmp(&a.0));
    let mut acc = Rat::zero();
    for (_, i) in vals {
        acc += &duals[i].1;
        if &acc >= beta {
            return Ok(duals[i].0.clone());
        }
    }
    Err(Error::NoLevel("insufficient mass".into()))
}

/// Pointwise minimum of monotone chains.
pub fn lower_envelope(chains: &[MonotoneChain]) -> Result<MonotoneChain> {
    let mut iter = chains.iter();
    let first = iter
        .next()
        .ok_or_else(|| Error::InvalidParameter("no chains".into()))?;
    let mut acc = first.clone();
    for c in iter {
        acc = merge_two(&acc, c);
    }
    Ok(acc.normalized())
}

fn merge_two(a: &MonotoneChain, b: &MonotoneChain) -> MonotoneChain {
    // Cells: union of breakpoints plus crossings inside cells.
    let mut xs: Vec<Rat> = a.breaks.iter().chain(b.breaks.iter()).cloned().collect();
    xs.sort();
    xs.dedup();
    // Insert crossings of the active line pairs.
    let mut all_breaks = xs.clone();
    for sx in slab_samples(&xs) {
        let la = a.line_at(&sx);
        let lb = b.line_at(&sx);
        if let Some(cx) = la.intersect_x(lb) {
            all_breaks.push(cx);
        }
    }
    all_breaks.sort();
    all_breaks.dedup();
    let mut lines = Vec::new();
    for sx in slab_samples(&all_breaks) {
        let la = a.line_at(&sx);
        let lb = b.line_at(&sx);
        let pick = if la.y_at(&sx) <= lb.y_at(&sx) { la } else { lb };
        lines.push(pick.clone());
    }
    MonotoneChain {
        lines,
        breaks: all_breaks,
    }
    .normalized()
}

/// Exact crossing points of a non-vertical dual-plane line with the levels'
/// lower envelope, walking the sorted intersections with all dual lines and
/// maintaining per-group weakly-above masses in O(1) per step.
pub fn line_stab_envelope(
    line: &DualLine,
    model: &UncertainPointSet,
    beta: &Rat,
) -> Result<Vec<Point>> {
    if model.dimension != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: model.dimension,
        });
    }
    if model.groups.iter().any(|g| &g.mass() < beta) {
        // No envelope exists at all.
        return Err(Error::NoLevel("a group lacks beta mass".into()));
    }
    let m = model.groups.len();
    struct Crossing {
        x: Rat,
        group: usize,
        /// Mass delta applied to the weakly-above count when passing x
        /// left-to-right.
        delta: Rat,
    }
    // Initial weakly-above mass per group at x = -infinity, plus crossings.
    let mut above = vec![Rat::zero(); m];
    let mut on_line = vec![Rat::zero(); m];
    let mut crossings: Vec<Crossing> = Vec::new();
    for (gi, g) in model.groups.iter().enumerate() {
        for s in &g.sites {
            let d = DualLine::of_point(&s.point);
            match d.intersect_x(line) {
                Some(x) => {
                    // Above at -infinity iff smaller slope.
                    let above_start = d.slope < line.slope;
                    if above_start {
                        above[gi] += &s.prob;
                        crossings.push(Crossing {
                            x,
                            group: gi,
                            delta: -s.prob.clone(),
                        });
                    } else {
                        crossings.push(Crossing {
                            x,
                            group: gi,
                            delta: s.prob.clone(),
                        });
                    }
                }
                None => {
                    // Parallel: above everywhere, below everywhere, or equal.
                    if d.shift < line.shift {
                        above[gi] += &s.prob;
                    } else if d.shift == line.shift {
                        on_line[gi] += &s.prob;
                    }
                }
            }
        }
    }
    crossings.sort_by(|p, q| p.x.cmp(&q.x));

    // State per open segment: the line is weakly below the envelope iff
    // every group's weakly-above mass reaches beta.
    let below = |above: &[Rat], on_line: &[Rat]| -> bool {
        above
            .iter()
            .zip(on_line)
            .all(|(a, o)| &(a + o) >= beta)
    };
    let mut out = Vec::new();
    let mut state = below(&above, &on_line);
    let mut i = 0usize;
    while i < crossings.len() {
        let x = crossings[i].x.clone();
        while i < crossings.len() && crossings[i].x == x {
            let c = &crossings[i];
            above[c.group] += &c.delta;
            i += 1;
        }
        let new_state = below(&above, &on_line);
        if new_state != state {
            out.push(Point::new(vec![x.clone(), line.y_at(&x)]));
            state = new_state;
        }
    }
    Ok(out)
}

/// A beta-hull: the region plus the parameter it was built for.
#[derive(Debug, Clone)]
pub struct BetaHull {
    pub beta: Rat,
    pub region: ConvexRegion,
}

/// Primal constraints of the "lower halfplanes" side: one halfplane per
/// envelope vertex (q weakly below the vertex's dual line) plus the two
/// vertical clamps from the envelope's end slopes.
fn upper_boundary_constraints(model: &UncertainPointSet, beta: &Rat) -> Result<Vec<Halfplane>> {
    let mut chains = Vec::with_capacity(model.groups.len());
    for g in &model.groups {
        chains.push(beta_level(g, beta)?);
    }
    let env = lower_envelope(&chains)?;
    let mut out: Vec<Halfplane> = Vec::new();
    let verts = env.vertices();
    if verts.is_empty() {
        // A single full line: synthesize one touching constraint.
        let l = &env.lines[0];
        let zero = Rat::zero();
        let v = Point::new(vec![zero.clone(), l.y_at(&zero)]);
        out.push(vertex_constraint(&v));
    } else {
        for v in &verts {
            out.push(vertex_constraint(v));
        }
    }
    // Clamps: a_R <= x <= a_L with the end-ray slopes.
    let a_l = env.lines.first().unwrap().slope.clone();
    let a_r = env.lines.last().unwrap().slope.clone();
    out.push(Halfplane::new(Rat::one(), Rat::zero(), a_l));
    out.push(Halfplane::new(-Rat::one(), Rat::zero(), -a_r));
    Ok(out)
}

/// `q` weakly below the primal line dual to the envelope vertex `v`:
/// `y <= v_x * x - v_y`.
fn vertex_constraint(v: &Point) -> Halfplane {
    Halfplane::new(-v.x().clone(), Rat::one(), -v.y().clone())
}

fn flipped_model(model: &UncertainPointSet) -> UncertainPointSet {
    let groups = model
        .groups
        .iter()
        .map(|g| Group {
            sites: g
                .sites
                .iter()
                .map(|s| crate::model::Site {
                    point: Point::new(vec![s.point.x().clone(), -s.point.y()]),
                    prob: s.prob.clone(),
                })
                .collect(),
        })
        .collect();
    UncertainPointSet::new(2, ModelKind::Multipoint, groups)
}

/// The beta-hull via dual beta-levels, their lower envelope and exact
/// halfplane intersection.
pub fn beta_hull_2d(model: &UncertainPointSet, beta: &Rat) -> Result<BetaHull> {
    if model.dimension != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: model.dimension,
        });
    }
    if beta > &Rat::one() || beta < &Rat::zero() {
        return Err(Error::InvalidParameter("beta must be in [0, 1]".into()));
    }
    if beta.is_zero() {
        // The empty set is 0-dense, so the intersection is empty.
        return Ok(BetaHull {
            beta: beta.clone(),
            region: ConvexRegion::Empty,
        });
    }
    if model.groups.iter().any(|g| &g.mass() < beta) {
        // No beta-dense set exists; the empty intersection is the plane.
        return Ok(BetaHull {
            beta: beta.clone(),
            region: ConvexRegion::WholePlane,
        });
    }
    let mut constraints = upper_boundary_constraints(model, beta)?;
    let flipped = flipped_model(model);
    for h in upper_boundary_constraints(&flipped, beta)? {
        // Map {a x + b y <= c} on flipped coordinates back to the primal.
        constraints.push(Halfplane {
            a: h.a.clone(),
            b: -h.b.clone(),
            c: h.c.clone(),
        });
    }
    Ok(BetaHull {
        beta: beta.clone(),
        region: halfplane_intersection(&constraints),
    })
}

/// Brute-force reference: intersect every beta-dense closed halfplane whose
/// boundary passes through an ordered pair of sites.
pub fn beta_hull_oracle(model: &UncertainPointSet, beta: &Rat) -> Result<BetaHull> {
    if model.dimension != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: model.dimension,
        });
    }
    if beta.is_zero() {
        return Ok(BetaHull {
            beta: beta.clone(),
            region: ConvexRegion::Empty,
        });
    }
    let pts = model.all_points();
    let mut dense: Vec<Halfplane> = Vec::new();
    for i in 0..pts.len() {
        for j in 0..pts.len() {
            if i == j {
                continue;
            }
            let h = Halfplane::left_of(&pts[i], &pts[j]);
            let is_dense = model.groups.iter().all(|g| {
                let mass: Rat = g
                    .sites
                    .iter()
                    .filter(|s| h.contains(&s.point))
                    .map(|s| s.prob.clone())
                    .sum();
                &mass >= beta
            });
            if is_dense {
                dense.push(h);
            }
        }
    }
    let region = if dense.is_empty() {
        ConvexRegion::WholePlane
    } else {
        halfplane_intersection(&dense)
    };
    Ok(BetaHull {
        beta: beta.clone(),
        region,
    })
}

/// Checks the tangency property of a hull edge: the supporting line must be
/// beta-tangent at two or more sites (their groups have open-side mass below
/// beta and closed-side mass at least beta on a common side).
pub fn edge_is_beta_tangent(
    model: &UncertainPointSet,
    beta: &Rat,
    a: &Point,
    b: &Point,
) -> bool {
    use crate::geom::predicates::orient2d;
    let mut tangent_sites = 0usize;
    for g in &model.groups {
        let on_edge_line: Vec<&crate::model::Site> = g
            .sites
            .iter()
            .filter(|s| orient2d(a, b, &s.point) == 0)
            .collect();
        if on_edge_line.is_empty() {
            continue;
        }
        let mut left = Rat::zero();
        let mut right = Rat::zero();
        let mut on = Rat::zero();
        for s in &g.sites {
            match orient2d(a, b, &s.point) {
                1 => left += &s.prob,
                -1 => right += &s.prob,
                _ => on += &s.prob,
            }
        }
        let tangent = (left < *beta && &left + &on >= *beta)
            || (right < *beta && &right + &on >= *beta);
        if tangent {
            tangent_sites += on_edge_line.len();
        }
    }
    tangent_sites >= 2
}
