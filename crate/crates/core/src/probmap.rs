//! The 2D probability map: the arrangement of all site-pair lines with one
//! membership probability per full-dimensional face.
//!
//! Construction sweeps the arrangement left to right. A crossing point where
//! k lines meet (every site is such a point, with n-1 pair lines through it)
//! reverses a block of k rank-consecutive lines: k-1 faces end there and k-1
//! new faces start. Faces, adjacencies and per-rank face timelines fall out
//! of the sweep. One seed face gets its probability from the witness
//! decomposition at a representative point; every other face follows by a
//! depth-first walk over the face graph, updating the two witness terms
//! affected by each crossed pair line in O(1) exact operations per step
//! (with exact undo on backtrack).
//!
//! Queries locate the containing face through binary search on slabs plus a
//! replay of the line order from sparse checkpoints. Points exactly on an
//! arrangement line report `OnSkeleton`; callers fall back to the direct
//! query.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::geom::point::Point;
use crate::geom::predicates::orient2d;
use crate::model::UncertainPointSet;
use crate::scalar::Rat;

pub const DEFAULT_SITE_CAP: usize = 40;
const CHECKPOINT_EVERY: usize = 512;

/// A non-vertical pair line `y = m x + c` through two sites.
#[derive(Debug, Clone)]
pub struct PairLine {
    pub m: Rat,
    pub c: Rat,
    /// Flat site indices of the defining pair.
    pub si: usize,
    pub sj: usize,
}

impl PairLine {
    pub fn y_at(&self, x: &Rat) -> Rat {
        &self.m * x + &self.c
    }
}

/// An arrangement vertex: `k >= 2` lines crossing at one point. The block of
/// lines reverses its vertical order there.
#[derive(Debug, Clone)]
struct EventGroup {
    x: Rat,
    y: Rat,
    /// Lines through the vertex (unordered; ranks resolve at process time).
    lines: Vec<usize>,
}

#[derive(Debug, Clone)]
struct FaceSeed {
    /// Lines bounding the face at creation (None at the extremes).
    below: Option<usize>,
    above: Option<usize>,
    /// Creation event-group index; None for the leftmost slab's faces.
    created_at: Option<usize>,
    /// Event group that closed the face, when bounded.
    closed_at: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LocateResult {
    Face { face: usize },
    OnSkeleton,
}

#[derive(Debug, Clone, Copy)]
pub struct MapStats {
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
}

pub struct ProbabilityMap {
    lines: Vec<PairLine>,
    groups: Vec<EventGroup>,
    /// Distinct event x-coordinates, ascending.
    distinct_xs: Vec<Rat>,
    /// Initial bottom-to-top line order (left of everything).
    initial_order: Vec<usize>,
    /// Sparse order checkpoints every CHECKPOINT_EVERY event groups.
    checkpoints: Vec<Vec<u32>>,
    /// Per rank: (first slab, face id); slab g+1 starts after group g.
    timelines: Vec<Vec<(usize, usize)>>,
    face_probs: Vec<Rat>,
    face_seeds: Vec<FaceSeed>,
    /// Arrangement vertices incident to each face, collected in the sweep.
    face_vertices: Vec<Vec<Point>>,
    site_points: Vec<Point>,
}

/// Witness-term state for one site, tracked during propagation.
struct TermState {
    prob: Rat,
    group: usize,
    /// Outside mass per group (own group unused).
    outside: Vec<Rat>,
    prod_nonzero: Rat,
    zero_count: usize,
    witness: Rat,
}

impl TermState {
    fn witness_value(&self) -> Rat {
        if self.zero_count == 0 {
            &self.prob * &self.prod_nonzero
        } else {
            Rat::zero()
        }
    }

    /// Applies a mass delta to one foreign group's outside mass.
    fn apply(&mut self, group: usize, delta: &Rat) {
        debug_assert_ne!(group, self.group);
        let old = Rat::one() - &self.outside[group];
        self.outside[group] += delta;
        let new = Rat::one() - &self.outside[group];
        match (old.is_zero(), new.is_zero()) {
            (false, false) => {
                self.prod_nonzero = &self.prod_nonzero * &new / &old;
            }
            (false, true) => {
                self.prod_nonzero = &self.prod_nonzero / &old;
                self.zero_count += 1;
            }
            (true, false) => {
                self.prod_nonzero = &self.prod_nonzero * &new;
                self.zero_count -= 1;
            }
            (true, true) => {}
        }
        self.witness = self.witness_value();
    }
}

struct Propagator {
    terms: Vec<TermState>,
    /// `empty_prob + sum of witnesses`; face probability is 1 minus this.
    outside_sum: Rat,
}

impl Propagator {
    /// Crossing the line through flat sites (si, sj): moving upward across
    /// it, the partner leaves the witness set of the left site and enters
    /// the witness set of the right site.
    fn cross(&mut self, line: &PairLine, upward: bool, sites: &[(Point, Rat, usize)]) {
        for (me, other) in [(line.si, line.sj), (line.sj, line.si)] {
            let og = sites[other].2;
            if og == self.terms[me].group {
                continue;
            }
            let me_left = sites[me].0.x() < sites[other].0.x();
            let leaves = me_left == upward;
            let delta = if leaves {
                -sites[other].1.clone()
            } else {
                sites[other].1.clone()
            };
            let old_w = self.terms[me].witness.clone();
            self.terms[me].apply(og, &delta);
            self.outside_sum = &self.outside_sum - old_w + self.terms[me].witness.clone();
        }
    }

    fn face_probability(&self) -> Rat {
        Rat::one() - &self.outside_sum
    }
}

/// Builder options; the propagation-order knob lets tests verify that the
/// propagated probabilities do not depend on the spanning tree.
#[derive(Debug, Clone, Copy, Default)]
pub struct BuildOptions {
    pub site_cap: Option<usize>,
    pub reverse_propagation: bool,
}

pub fn build_probability_map(model: &UncertainPointSet) -> Result<ProbabilityMap> {
    build_probability_map_with(model, BuildOptions::default())
}

pub fn build_probability_map_with(
    model: &UncertainPointSet,
    opts: BuildOptions,
) -> Result<ProbabilityMap> {
    if model.dimension != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: model.dimension,
        });
    }
    model.validate()?;
    let cap = opts.site_cap.unwrap_or(DEFAULT_SITE_CAP);
    let n = model.total_sites();
    if n > cap {
        return Err(Error::CapExceeded {
            needed: n as u128,
            cap: cap as u128,
        });
    }

    // Flat sites: (point, prob, group).
    let mut sites: Vec<(Point, Rat, usize)> = Vec::with_capacity(n);
    for (gi, g) in model.groups.iter().enumerate() {
        for s in &g.sites {
            sites.push((s.point.clone(), s.prob.clone(), gi));
        }
    }

    // No three collinear sites (their pair lines would coincide).
    let pts: Vec<Point> = sites.iter().map(|s| s.0.clone()).collect();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                if orient2d(&pts[i], &pts[j], &pts[k]) == 0 {
                    return Err(Error::Degenerate(format!(
                        "sites {i}, {j}, {k} are collinear"
                    )));
                }
            }
        }
    }

    // Pair lines; vertical pairs are rejected (shared x-coordinate).
    let mut lines: Vec<PairLine> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let dx = pts[j].x() - pts[i].x();
            if dx.is_zero() {
                return Err(Error::Degenerate(format!(
                    "sites {i} and {j} share an x-coordinate (vertical pair line)"
                )));
            }
            let m = (pts[j].y() - pts[i].y()) / dx;
            let c = pts[i].y() - &m * pts[i].x();
            lines.push(PairLine { m, c, si: i, sj: j });
        }
    }
    let l = lines.len();

    // Pairwise crossings, then grouped by identical crossing point.
    let mut crossings: Vec<(Rat, Rat, usize, usize)> = Vec::new();
    for a in 0..l {
        for b in a + 1..l {
            let dm = &lines[a].m - &lines[b].m;
            if dm.is_zero() {
                continue;
            }
            let x = (&lines[b].c - &lines[a].c) / &dm;
            let y = lines[a].y_at(&x);
            crossings.push((x, y, a, b));
        }
    }
    crossings.sort_by(|p, q| p.0.cmp(&q.0).then_with(|| p.1.cmp(&q.1)));
    let mut groups: Vec<EventGroup> = Vec::new();
    let mut i = 0usize;
    while i < crossings.len() {
        let mut j = i + 1;
        while j < crossings.len() && crossings[j].0 == crossings[i].0 && crossings[j].1 == crossings[i].1
        {
            j += 1;
        }
        let mut ls: Vec<usize> = Vec::new();
        for c in &crossings[i..j] {
            if !ls.contains(&c.2) {
                ls.push(c.2);
            }
            if !ls.contains(&c.3) {
                ls.push(c.3);
            }
        }
        let k = ls.len();
        if (j - i) != k * (k - 1) / 2 {
            return Err(Error::Degenerate(format!(
                "inconsistent concurrency at ({}, {})",
                crate::scalar::format_rat(&crossings[i].0),
                crate::scalar::format_rat(&crossings[i].1)
            )));
        }
        groups.push(EventGroup {
            x: crossings[i].0.clone(),
            y: crossings[i].1.clone(),
            lines: ls,
        });
        i = j;
    }

    // Same-x vertices must not share a line, or the rank replay below would
    // interleave two reversals of one line ambiguously.
    for w in groups.windows(2) {
        if w[0].x == w[1].x && w[0].lines.iter().any(|l0| w[1].lines.contains(l0)) {
            return Err(Error::Degenerate(
                "two crossings on one line share an x-coordinate".into(),
            ));
        }
    }
    let mut distinct_xs: Vec<Rat> = groups.iter().map(|g| g.x.clone()).collect();
    distinct_xs.dedup();

    // Initial order, left of all events.
    let x_left = distinct_xs
        .first()
        .map(|x| x - Rat::one())
        .unwrap_or_else(Rat::zero);
    let mut initial_order: Vec<usize> = (0..l).collect();
    initial_order.sort_by(|&a, &b| {
        lines[a]
            .y_at(&x_left)
            .cmp(&lines[b].y_at(&x_left))
            .then_with(|| lines[b].m.cmp(&lines[a].m))
    });

    // Sweep.
    let e = groups.len();
    let num_faces = l + 1 + groups.iter().map(|g| g.lines.len() - 1).sum::<usize>();
    let mut face_seeds: Vec<FaceSeed> = Vec::with_capacity(num_faces);
    let mut face_vertices: Vec<Vec<Point>> = vec![Vec::new(); num_faces];
    let mut timelines: Vec<Vec<(usize, usize)>> = Vec::with_capacity(l + 1);
    let mut face_at_rank: Vec<usize> = Vec::with_capacity(l + 1);
    for r in 0..=l {
        face_at_rank.push(r);
        timelines.push(vec![(0, r)]);
        face_seeds.push(FaceSeed {
            below: if r > 0 {
                Some(initial_order[r - 1])
            } else {
                None
            },
            above: if r < l {
                Some(initial_order[r])
            } else {
                None
            },
            created_at: None,
            closed_at: None,
        });
    }
    // Face adjacency: (neighbor, line id, neighbor_is_above).
    let mut adj: Vec<Vec<(usize, usize, bool)>> = vec![Vec::new(); num_faces];
    let add_edge =
        |adj: &mut Vec<Vec<(usize, usize, bool)>>, lo: usize, hi: usize, line: usize| {
            adj[lo].push((hi, line, true));
            adj[hi].push((lo, line, false));
        };
    for r in 0..l {
        add_edge(&mut adj, r, r + 1, initial_order[r]);
    }

    let mut order = initial_order.clone();
    let mut rank_of: Vec<usize> = vec![0; l];
    for (r, &ln) in order.iter().enumerate() {
        rank_of[ln] = r;
    }
    let mut checkpoints: Vec<Vec<u32>> = Vec::new();
    let mut next_face = l + 1;
    for (g_idx, group) in groups.iter().enumerate() {
        if g_idx % CHECKPOINT_EVERY == 0 {
            checkpoints.push(order.iter().map(|&x| x as u32).collect());
        }
        let k = group.lines.len();
        let mut ranks: Vec<usize> = group.lines.iter().map(|&ln| rank_of[ln]).collect();
        ranks.sort_unstable();
        let t = ranks[0];
        if ranks.windows(2).any(|w| w[1] != w[0] + 1) {
            return Err(Error::Degenerate(
                "crossing lines are not rank-consecutive (unexpected degeneracy)".into(),
            ));
        }
        let f_bottom = face_at_rank[t];
        let f_top = face_at_rank[t + k];
        let v = Point::new(vec![group.x.clone(), group.y.clone()]);
        face_vertices[f_bottom].push(v.clone());
        face_vertices[f_top].push(v.clone());
        // Faces strictly inside the block end here.
        for r in t + 1..t + k {
            let f_end = face_at_rank[r];
            face_seeds[f_end].closed_at = Some(g_idx);
            face_vertices[f_end].push(v.clone());
        }
        // Reverse the block.
        order[t..t + k].reverse();
        for (off, &ln) in order[t..t + k].iter().enumerate() {
            rank_of[ln] = t + off;
        }
        // New faces inside the block, bottom to top.
        for r in t + 1..t + k {
            let f_new = next_face;
            next_face += 1;
            face_seeds.push(FaceSeed {
                below: Some(order[r - 1]),
                above: Some(order[r]),
                created_at: Some(g_idx),
                closed_at: None,
            });
            face_at_rank[r] = f_new;
            timelines[r].push((g_idx + 1, f_new));
            face_vertices[f_new].push(v.clone());
        }
        // Edges along the new boundary segments right of the vertex.
        add_edge(&mut adj, f_bottom, face_at_rank[t + 1], order[t]);
        for r in t + 1..t + k - 1 {
            add_edge(&mut adj, face_at_rank[r], face_at_rank[r + 1], order[r]);
        }
        add_edge(&mut adj, face_at_rank[t + k - 1], f_top, order[t + k - 1]);
    }
    debug_assert_eq!(next_face, num_faces);

    let mut map = ProbabilityMap {
        lines,
        groups,
        distinct_xs,
        initial_order,
        checkpoints,
        timelines,
        face_probs: vec![Rat::zero(); num_faces],
        face_seeds,
        face_vertices,
        site_points: pts,
    };

    // Seed: the bottom face of the leftmost slab.
    let seed_face = 0usize;
    let rep = map.face_representative(seed_face);
    let m_groups = model.groups.len();
    let mut outside_sum = {
        let mut empty = Rat::one();
        for g in &model.groups {
            empty *= g.residual();
        }
        empty
    };
    let mut terms: Vec<TermState> = Vec::with_capacity(n);
    for (i, (pt, prob, group)) in sites.iter().enumerate() {
        let mut outside = vec![Rat::zero(); m_groups];
        for (j, (opt, oprob, ogroup)) in sites.iter().enumerate() {
            if j == i || ogroup == group {
                continue;
            }
            // Strictly right of the ray rep -> site.
            if orient2d(&rep, pt, opt) < 0 {
                outside[*ogroup] += oprob;
            }
        }
        let mut prod_nonzero = Rat::one();
        let mut zero_count = 0usize;
        for (k, mass) in outside.iter().enumerate() {
            if k == *group {
                continue;
            }
            let f = Rat::one() - mass;
            if f.is_zero() {
                zero_count += 1;
            } else {
                prod_nonzero *= f;
            }
        }
        let mut term = TermState {
            prob: prob.clone(),
            group: *group,
            outside,
            prod_nonzero,
            zero_count,
            witness: Rat::zero(),
        };
        term.witness = term.witness_value();
        outside_sum += &term.witness;
        terms.push(term);
    }
    let mut prop = Propagator { terms, outside_sum };

    #[cfg(debug_assertions)]
    {
        let direct: Rat = crate::membership::membership_2d(&rep, model)?;
        debug_assert_eq!(prop.face_probability(), direct, "seed state mismatch");
    }

    // Depth-first propagation with exact undo on backtrack.
    enum Task {
        Enter {
            face: usize,
            via: Option<(usize, bool)>,
        },
        Exit {
            via: Option<(usize, bool)>,
        },
    }
    let mut visited = vec![false; num_faces];
    visited[seed_face] = true;
    let mut stack = vec![Task::Enter {
        face: seed_face,
        via: None,
    }];
    while let Some(task) = stack.pop() {
        match task {
            Task::Enter { face, via } => {
                if let Some((line, upward)) = via {
                    let line = map.lines[line].clone();
                    prop.cross(&line, upward, &sites);
                }
                map.face_probs[face] = prop.face_probability();
                stack.push(Task::Exit { via });
                let mut neighbors: Vec<(usize, usize, bool)> = adj[face].clone();
                if opts.reverse_propagation {
                    neighbors.reverse();
                }
                for (nb, line, upward) in neighbors {
                    if !visited[nb] {
                        visited[nb] = true;
                        stack.push(Task::Enter {
                            face: nb,
                            via: Some((line, upward)),
                        });
                    }
                }
            }
            Task::Exit { via } => {
                if let Some((line, upward)) = via {
                    let line = map.lines[line].clone();
                    prop.cross(&line, !upward, &sites);
                }
            }
        }
    }
    debug_assert!(visited.iter().all(|&v| v));

    let _ = e;
    Ok(map)
}

impl ProbabilityMap {
    pub fn stats(&self) -> MapStats {
        // Each line is split into (vertices on it) + 1 edges.
        let vertex_line_incidences: usize = self.groups.iter().map(|g| g.lines.len()).sum();
        MapStats {
            vertices: self.groups.len(),
            edges: vertex_line_incidences + self.lines.len(),
            faces: self.face_probs.len(),
        }
    }

    pub fn num_faces(&self) -> usize {
        self.face_probs.len()
    }

    pub fn face_probability(&self, face: usize) -> &Rat {
        &self.face_probs[face]
    }

    pub fn lines(&self) -> &[PairLine] {
        &self.lines
    }

    pub fn site_points(&self) -> &[Point] {
        &self.site_points
    }

    /// An interior point of the face: the x-midpoint of the face's creation
    /// wedge, halfway between its two bounding lines. Exact.
    pub fn face_representative(&self, face: usize) -> Point {
        let seed = &self.face_seeds[face];
        let (x1, x2) = match seed.created_at {
            None => {
                let left = self
                    .distinct_xs
                    .first()
                    .map(|x| x - Rat::one())
                    .unwrap_or_else(Rat::zero);
                (left.clone() - Rat::one(), left)
            }
            Some(g) => {
                let ex = &self.groups[g].x;
                let idx = self.distinct_xs.partition_point(|x| x <= ex);
                let next = if idx < self.distinct_xs.len() {
                    self.distinct_xs[idx].clone()
                } else {
                    ex + Rat::from_integer(2.into())
                };
                (ex.clone(), next)
            }
        };
        let rx = (x1 + x2) / Rat::from_integer(2.into());
        let ry = match (&seed.below, &seed.above) {
            (Some(b), Some(a)) => {
                (self.lines[*b].y_at(&rx) + self.lines[*a].y_at(&rx))
                    / Rat::from_integer(2.into())
            }
            (Some(b), None) => self.lines[*b].y_at(&rx) + Rat::one(),
            (None, Some(a)) => self.lines[*a].y_at(&rx) - Rat::one(),
            (None, None) => Rat::zero(),
        };
        Point::new(vec![rx, ry])
    }

    /// Line order (bottom to top) immediately after `group_count` event
    /// groups.
    fn order_at(&self, group_count: usize) -> Vec<usize> {
        if self.checkpoints.is_empty() {
            debug_assert_eq!(group_count, 0);
            return self.initial_order.clone();
        }
        let cp_idx = (group_count / CHECKPOINT_EVERY).min(self.checkpoints.len() - 1);
        let mut order: Vec<usize> = self.checkpoints[cp_idx]
            .iter()
            .map(|&x| x as usize)
            .collect();
        let start = cp_idx * CHECKPOINT_EVERY;
        let mut rank_of = vec![0usize; self.lines.len()];
        for (r, &ln) in order.iter().enumerate() {
            rank_of[ln] = r;
        }
        for group in &self.groups[start..group_count] {
            let k = group.lines.len();
            let t = group.lines.iter().map(|&ln| rank_of[ln]).min().unwrap();
            order[t..t + k].reverse();
            for (off, &ln) in order[t..t + k].iter().enumerate() {
                rank_of[ln] = t + off;
            }
        }
        order
    }

    /// Locates the full-dimensional face containing `q`, or reports that `q`
    /// lies exactly on the arrangement skeleton.
    pub fn locate(&self, q: &Point) -> Result<LocateResult> {
        q.check_dim(2)?;
        if self.lines.is_empty() {
            return Ok(LocateResult::Face { face: 0 });
        }
        // Event groups strictly left of q.x; for q off the skeleton both
        // sides of an exactly-hit wall give the same face.
        let group_count = self.groups.partition_point(|g| g.x < *q.x());
        let order = self.order_at(group_count);

        // Binary search the rank of q among the lines' y-values at q.x.
        let mut lo = 0usize; // lines [0, lo) strictly below q
        let mut hi = order.len();
        while lo < hi {
            let mid = (lo + hi) / 2;
            let y = self.lines[order[mid]].y_at(q.x());
            match y.cmp(q.y()) {
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Equal => return Ok(LocateResult::OnSkeleton),
                std::cmp::Ordering::Greater => hi = mid,
            }
        }
        let rank = lo;
        // The search can skip the true neighbors; verify both bounds.
        if rank > 0 && self.lines[order[rank - 1]].y_at(q.x()) == *q.y() {
            return Ok(LocateResult::OnSkeleton);
        }
        if rank < order.len() && self.lines[order[rank]].y_at(q.x()) == *q.y() {
            return Ok(LocateResult::OnSkeleton);
        }
        let timeline = &self.timelines[rank];
        let pos = timeline.partition_point(|(start, _)| *start <= group_count);
        let face = timeline[pos - 1].1;
        Ok(LocateResult::Face { face })
    }

    /// A face is bounded iff it was both created and closed by events.
    pub fn is_bounded_face(&self, face: usize) -> bool {
        let seed = &self.face_seeds[face];
        seed.created_at.is_some() && seed.closed_at.is_some()
    }

    /// CCW polygons of the bounded faces, for rendering.
    pub fn bounded_face_polygons(&self) -> Vec<(usize, Vec<Point>)> {
        use crate::geom::polygon::{convex_hull_2d, ConvexRegion};
        let mut out = Vec::new();
        for f in 0..self.num_faces() {
            if !self.is_bounded_face(f) {
                continue;
            }
            if let ConvexRegion::Polygon(poly) = convex_hull_2d(&self.face_vertices[f]) {
                out.push((f, poly));
            }
        }
        out
    }

    pub(crate) fn export_file(&self) -> crate::io::ProbMapFile {
        use crate::io::{point_to_strings, ProbMapEvent, ProbMapFaceSeed, ProbMapFile, ProbMapLine};
        use crate::scalar::format_rat;
        ProbMapFile {
            format_version: crate::io::PROB_MAP_FORMAT_VERSION,
            lines: self
                .lines
                .iter()
                .map(|l| ProbMapLine {
                    m: format_rat(&l.m),
                    c: format_rat(&l.c),
                    si: l.si,
                    sj: l.sj,
                })
                .collect(),
            events: self
                .groups
                .iter()
                .map(|g| ProbMapEvent {
                    x: format_rat(&g.x),
                    y: format_rat(&g.y),
                    lines: g.lines.clone(),
                })
                .collect(),
            initial_order: self.initial_order.clone(),
            timelines: self.timelines.clone(),
            face_probs: self.face_probs.iter().map(format_rat).collect(),
            face_seeds: self
                .face_seeds
                .iter()
                .map(|s| ProbMapFaceSeed {
                    below: s.below,
                    above: s.above,
                    created_at: s.created_at,
                    closed_at: s.closed_at,
                })
                .collect(),
            face_vertices: self
                .face_vertices
                .iter()
                .map(|vs| vs.iter().map(point_to_strings).collect())
                .collect(),
            site_points: self.site_points.iter().map(point_to_strings).collect(),
        }
    }

    pub(crate) fn import_file(file: crate::io::ProbMapFile) -> Result<ProbabilityMap> {
        use crate::io::point_from_strings;
        use crate::scalar::parse_decimal;
        let lines: Vec<PairLine> = file
            .lines
            .iter()
            .map(|l| {
                Ok(PairLine {
                    m: parse_decimal(&l.m)?,
                    c: parse_decimal(&l.c)?,
                    si: l.si,
                    sj: l.sj,
                })
            })
            .collect::<Result<_>>()?;
        let groups: Vec<EventGroup> = file
            .events
            .iter()
            .map(|e| {
                Ok(EventGroup {
                    x: parse_decimal(&e.x)?,
                    y: parse_decimal(&e.y)?,
                    lines: e.lines.clone(),
                })
            })
            .collect::<Result<_>>()?;
        let mut distinct_xs: Vec<Rat> = groups.iter().map(|g| g.x.clone()).collect();
        distinct_xs.dedup();
        // Rebuild the order checkpoints by replaying the reversals.
        let mut checkpoints: Vec<Vec<u32>> = Vec::new();
        let mut order = file.initial_order.clone();
        let mut rank_of = vec![0usize; lines.len()];
        for (r, &ln) in order.iter().enumerate() {
            rank_of[ln] = r;
        }
        for (g_idx, group) in groups.iter().enumerate() {
            if g_idx % CHECKPOINT_EVERY == 0 {
                checkpoints.push(order.iter().map(|&x| x as u32).collect());
            }
            let k = group.lines.len();
            let t = group
                .lines
                .iter()
                .map(|&ln| rank_of[ln])
                .min()
                .ok_or_else(|| Error::Serde("empty event group".into()))?;
            if t + k > order.len() {
                return Err(Error::Serde("corrupt event group".into()));
            }
            order[t..t + k].reverse();
            for (off, &ln) in order[t..t + k].iter().enumerate() {
                rank_of[ln] = t + off;
            }
        }
        let face_probs = file
            .face_probs
            .iter()
            .map(|s| parse_decimal(s))
            .collect::<Result<Vec<Rat>>>()?;
        let face_seeds = file
            .face_seeds
            .iter()
            .map(|s| FaceSeed {
                below: s.below,
                above: s.above,
                created_at: s.created_at,
                closed_at: s.closed_at,
            })
            .collect();
        let face_vertices = file
            .face_vertices
            .iter()
            .map(|vs| vs.iter().map(|v| point_from_strings(v)).collect::<Result<Vec<Point>>>())
            .collect::<Result<Vec<_>>>()?;
        let site_points = file
            .site_points
            .iter()
            .map(|v| point_from_strings(v))
            .collect::<Result<Vec<Point>>>()?;
        Ok(ProbabilityMap {
            lines,
            groups,
            distinct_xs,
            initial_order: file.initial_order,
            checkpoints,
            timelines: file.timelines,
            face_probs,
            face_seeds,
            face_vertices,
            site_points,
        })
    }
}
