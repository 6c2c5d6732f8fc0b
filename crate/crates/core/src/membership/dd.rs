//! Membership probability in dimension d >= 3.
//!
//! Decomposition over the lowest point lambda of B + q along the last axis:
//!
//!   Pr(q in V) = Pr(q = lambda) + sum_i Pr(s_i = lambda and q in V)
//!
//! and per anchor s_i the term splits into a recursive (d-1)-dimensional
//! problem (projection dropping the last coordinate, conditioned on the
//! anchor existing and everything below it not existing) plus a sum over
//! escaping facets. The recursion bottoms out in the 2D radial sweep on the
//! accumulated conditional model.
//!
//! The naive variant enumerates facet candidate sets directly; the radial
//! variant fixes all but one facet site and sweeps the last one radially in
//! the 2D orthogonal complement of the fixed flat, updating the far-side
//! group masses incrementally. Both produce identical exact rationals.

use itertools::Itertools;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::geom::direction::Dir;
use crate::geom::point::Point;
use crate::membership::facet::{escaping_facet_test, facet_probability};
use crate::membership::sweep;
use crate::model::{Group, ModelKind, Site, SiteRef, UncertainPointSet};
use crate::scalar::{ProbField, Rat};

/// Top-level decomposition of `1 - pi(q)` for the d-dimensional algorithm.
#[derive(Debug, Clone)]
pub struct DdDecomposition<P> {
    /// `Pr(q = lambda(B + q))`.
    pub lambda_q_term: P,
    /// Per anchor site, `Pr(s = lambda and q in V)`.
    pub anchor_terms: Vec<(SiteRef, P)>,
    pub membership: P,
}

/// Membership probability in `R^d`, d >= 2 (d = 2 delegates to the sweep).
pub fn membership_dd<P: ProbField>(
    q: &Point,
    model: &UncertainPointSet,
    radial: bool,
) -> Result<P> {
    Ok(membership_dd_decomposed::<P>(q, model, radial)?.membership)
}

pub fn membership_dd_decomposed<P: ProbField>(
    q: &Point,
    model: &UncertainPointSet,
    radial: bool,
) -> Result<DdDecomposition<P>> {
    let d = model.dimension;
    q.check_dim(d)?;
    if d == 2 {
        let dec = sweep::membership_decomposed::<P>(q, model)?;
        let anchor_terms = dec.witness;
        return Ok(DdDecomposition {
            lambda_q_term: dec.empty_prob,
            anchor_terms,
            membership: dec.membership,
        });
    }
    check_last_coordinate_distinct(q, model, d)?;

    let lambda_q_term = prob_q_is_lowest::<P>(q, model, d);
    let mut anchor_terms = Vec::new();
    let mut total = lambda_q_term.clone();
    for anchor in model.site_refs() {
        let term = anchor_term::<P>(q, model, anchor, d, radial)?;
        total = total + term.clone();
        anchor_terms.push((anchor, term));
    }
    Ok(DdDecomposition {
        lambda_q_term,
        anchor_terms,
        membership: P::one() - total,
    })
}

/// Lowest-point ties along the current last axis make the lambda
/// decomposition ambiguous; reject them.
fn check_last_coordinate_distinct(q: &Point, model: &UncertainPointSet, d: usize) -> Result<()> {
    let xd = d - 1;
    let mut coords: Vec<Rat> = model
        .all_points()
        .iter()
        .map(|p| p.coord(xd).clone())
        .collect();
    coords.push(q.coord(xd).clone());
    coords.sort();
    for w in coords.windows(2) {
        if w[0] == w[1] {
            return Err(Error::DegenerateProjection {
                level: d,
                detail: "two points share the last coordinate".into(),
            });
        }
    }
    Ok(())
}

/// `Pr(q = lambda)`: every site strictly below q along the last axis absent.
fn prob_q_is_lowest<P: ProbField>(q: &Point, model: &UncertainPointSet, d: usize) -> P {
    let xd = d - 1;
    let mut result = P::one();
    for g in &model.groups {
        let mut below = Rat::zero();
        for s in &g.sites {
            if s.point.coord(xd) < q.coord(xd) {
                below += &s.prob;
            }
        }
        result = result * P::from_rat(&(Rat::one() - below));
    }
    result
}

/// `Pr(anchor = lambda and q in V)`.
fn anchor_term<P: ProbField>(
    q: &Point,
    model: &UncertainPointSet,
    anchor: SiteRef,
    d: usize,
    radial: bool,
) -> Result<P> {
    let xd = d - 1;
    let anchor_site = model.site(anchor);
    if anchor_site.point.coord(xd) >= q.coord(xd) {
        // The anchor cannot be the lowest point with q escaping upward; ties
        // were rejected already.
        return Ok(P::zero());
    }

    // Pr(anchor = lambda) with per-group below-anchor masses; the same
    // masses renormalize the conditional model.
    let mut lambda_weight = P::from_rat(&anchor_site.prob);
    let mut survive: Vec<Rat> = Vec::with_capacity(model.groups.len());
    for (gi, g) in model.groups.iter().enumerate() {
        let mut below = Rat::zero();
        for s in &g.sites {
            if s.point.coord(xd) < anchor_site.point.coord(xd) {
                below += &s.prob;
            }
        }
        let keep = Rat::one() - &below;
        if gi != anchor.0 {
            lambda_weight = lambda_weight * P::from_rat(&keep);
        }
        survive.push(keep);
    }

    // Recursive projected term, skipped when the conditioning event is
    // impossible.
    let mut term = P::zero();
    if survive
        .iter()
        .enumerate()
        .all(|(gi, k)| gi == anchor.0 || !k.is_zero())
    {
        let cond = conditional_projected_model(model, anchor, &survive, d)?;
        let q_proj = q.project_drop_last();
        let sub = membership_dd_decomposed::<P>(&q_proj, &cond, radial)?;
        let prob_vertex_sub = P::one() - sub.membership;
        term = lambda_weight * prob_vertex_sub;
    }

    let facet_sum = if radial {
        facet_sum_radial::<P>(q, model, anchor, d)?
    } else {
        facet_sum_naive::<P>(q, model, anchor, d)?
    };
    Ok(term + facet_sum)
}

/// The conditional model of `anchor = lambda`, projected one dimension down:
/// the anchor group collapses to the anchor with probability 1, sites below
/// the anchor disappear and their groups renormalize by the surviving mass.
fn conditional_projected_model(
    model: &UncertainPointSet,
    anchor: SiteRef,
    survive: &[Rat],
    d: usize,
) -> Result<UncertainPointSet> {
    let xd = d - 1;
    let anchor_site = model.site(anchor);
    let mut groups = Vec::with_capacity(model.groups.len());
    for (gi, g) in model.groups.iter().enumerate() {
        if gi == anchor.0 {
            groups.push(Group {
                sites: vec![Site {
                    point: anchor_site.point.project_drop_last(),
                    prob: Rat::one(),
                }],
            });
            continue;
        }
        let sites: Vec<Site> = g
            .sites
            .iter()
            .filter(|s| s.point.coord(xd) > anchor_site.point.coord(xd))
            .map(|s| Site {
                point: s.point.project_drop_last(),
                prob: &s.prob / &survive[gi],
            })
            .collect();
        if !sites.is_empty() {
            groups.push(Group { sites });
        }
    }
    Ok(UncertainPointSet::new(d - 1, ModelKind::Multipoint, groups))
}

/// Direct enumeration of facet candidate sets.
fn facet_sum_naive<P: ProbField>(
    q: &Point,
    model: &UncertainPointSet,
    anchor: SiteRef,
    d: usize,
) -> Result<P> {
    let refs: Vec<SiteRef> = model
        .site_refs()
        .into_iter()
        .filter(|r| *r != anchor)
        .collect();
    let anchor_pt = &model.site(anchor).point;
    let mut sum = P::zero();
    for combo in refs.iter().combinations(d - 1) {
        let pa: Vec<SiteRef> = combo.into_iter().copied().collect();
        let prob: P = facet_probability(q, &pa, anchor, model, d)?;
        if prob.is_zero() {
            continue;
        }
        let pts: Vec<Point> = pa.iter().map(|r| model.site(*r).point.clone()).collect();
        if escaping_facet_test(q, &pts, anchor_pt, d)? {
            sum = sum + prob;
        }
    }
    Ok(sum)
}

/// Radial-order facet enumeration: fix d-2 facet sites, project everything
/// into the 2D orthogonal complement of their flat through q, and sweep the
/// remaining facet site in angular order while updating the far-side masses
/// incrementally. Every facet set splits (d-1) ways into (fixed, swept), so
/// the accumulated total divides by d-1.
fn facet_sum_radial<P: ProbField>(
    q: &Point,
    model: &UncertainPointSet,
    anchor: SiteRef,
    d: usize,
) -> Result<P> {
    let xd = d - 1;
    let anchor_site = model.site(anchor);
    let anchor_pt = &anchor_site.point;
    let refs: Vec<SiteRef> = model
        .site_refs()
        .into_iter()
        .filter(|r| *r != anchor)
        .collect();

    let mut total = P::zero();
    for lbeta in refs.iter().combinations(d - 2) {
        let lbeta: Vec<SiteRef> = lbeta.into_iter().copied().collect();
        // Zero conditions that do not depend on the swept site.
        let mut lbeta_groups: Vec<usize> = Vec::with_capacity(lbeta.len());
        let mut ok = true;
        for r in &lbeta {
            let s = model.site(*r);
            if r.0 == anchor.0
                || lbeta_groups.contains(&r.0)
                || s.point.coord(xd) < anchor_pt.coord(xd)
            {
                ok = false;
                break;
            }
            lbeta_groups.push(r.0);
        }
        if !ok {
            continue;
        }
        let sub = sweep_complement_plane::<P>(q, model, anchor, &lbeta, &lbeta_groups, d)?;
        total = total + sub;
    }
    let divisor = Rat::from_integer(((d - 1) as i64).into());
    Ok(total / P::from_rat(&divisor))
}

struct CircleSite {
    site: SiteRef,
    group: usize,
    prob: Rat,
    dir: Dir,
    in_g2: bool,
    group_excluded: bool,
}

fn sweep_complement_plane<P: ProbField>(
    q: &Point,
    model: &UncertainPointSet,
    anchor: SiteRef,
    lbeta: &[SiteRef],
    lbeta_groups: &[usize],
    d: usize,
) -> Result<P> {
    let xd = d - 1;
    let anchor_site = model.site(anchor);
    let anchor_pt = &anchor_site.point;

    // Basis of the 2D orthogonal complement of span{l - q : l in lbeta}.
    let flat_dirs: Vec<Vec<Rat>> = lbeta
        .iter()
        .map(|r| {
            let p = &model.site(*r).point;
            (0..d).map(|j| p.coord(j) - q.coord(j)).collect()
        })
        .collect();
    let basis = null_space_basis(&flat_dirs, d)?;
    let image = |p: &Point| -> (Rat, Rat) {
        let diff: Vec<Rat> = (0..d).map(|j| p.coord(j) - q.coord(j)).collect();
        let u = dot(&basis[0], &diff);
        let v = dot(&basis[1], &diff);
        (u, v)
    };

    let (ux, uy) = image(anchor_pt);
    let anchor_dir = Dir::from_rat(&ux, &uy).ok_or_else(|| {
        Error::Degenerate("anchor projects onto the query in the complement plane".into())
    })?;

    let excluded = |g: usize| g == anchor.0 || lbeta_groups.contains(&g);

    // Fixed below-anchor masses per group (G2 side of the factors).
    let mut g2_mass: Vec<Rat> = vec![Rat::zero(); model.groups.len()];
    let mut circle: Vec<CircleSite> = Vec::new();
    for r in model.site_refs() {
        if r == anchor || lbeta.contains(&r) {
            continue;
        }
        let s = model.site(r);
        let in_g2 = s.point.coord(xd) < anchor_pt.coord(xd);
        let group_excluded = excluded(r.0);
        if in_g2 && !group_excluded {
            g2_mass[r.0] += &s.prob;
        }
        let (ix, iy) = image(&s.point);
        let dir = Dir::from_rat(&ix, &iy).ok_or_else(|| {
            Error::Degenerate(format!(
                "site {} lies in the fixed facet flat",
                s.point
            ))
        })?;
        circle.push(CircleSite {
            site: r,
            group: r.0,
            prob: s.prob.clone(),
            dir,
            in_g2,
            group_excluded,
        });
    }

    let n = circle.len();
    if n == 0 {
        return Ok(P::zero());
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| circle[a].dir.angle_cmp(&circle[b].dir));
    for w in order.windows(2) {
        if circle[w[0]].dir.same_ray(&circle[w[1]].dir) {
            return Err(Error::Degenerate(
                "two sites project onto one ray in the complement plane".into(),
            ));
        }
    }
    for &i in &order {
        let neg = circle[i].dir.negate();
        if order
            .binary_search_by(|&j| circle[j].dir.angle_cmp(&neg))
            .is_ok()
        {
            return Err(Error::Degenerate(
                "two sites project antipodally in the complement plane".into(),
            ));
        }
    }

    // Per-group toggleable masses (sites that can sit on either side).
    let mut var_total: Vec<Rat> = vec![Rat::zero(); model.groups.len()];
    for c in &circle {
        if !c.in_g2 && !c.group_excluded {
            var_total[c.group] += &c.prob;
        }
    }

    // gamma_anchor * prod_{lbeta} gamma.
    let mut base = P::from_rat(&anchor_site.prob);
    for r in lbeta {
        base = base * P::from_rat(&model.site(*r).prob);
    }

    // Sweep state, rebuilt whenever the anchor side flips. The right set is
    // the contiguous arc [window, pos) of size arc_len; length is tracked
    // explicitly because the arc can transiently cover all other sites.
    let mut right_mass: Vec<Rat> = vec![Rat::zero(); model.groups.len()];
    let rebuild = |pos: usize,
                   right_mass: &mut Vec<Rat>,
                   order: &[usize],
                   circle: &[CircleSite]|
     -> (usize, usize) {
        for m in right_mass.iter_mut() {
            *m = Rat::zero();
        }
        let cur = &circle[order[pos]];
        let mut window = pos;
        let mut arc_len = 0usize;
        for off in 1..n {
            let p = (pos + n - off) % n;
            let s = &circle[order[p]];
            if cur.dir.cross_sign(&s.dir) < 0 {
                if !s.in_g2 && !s.group_excluded {
                    right_mass[s.group] += &s.prob;
                }
                window = p;
                arc_len += 1;
            } else {
                break;
            }
        }
        (window, arc_len)
    };

    let mut total = P::zero();
    let mut prev_side: i32 = 0;
    let mut window = 0usize;
    let mut arc_len = 0usize;
    for pos in 0..n {
        let cur = &circle[order[pos]];
        let side = cur.dir.cross_sign(&anchor_dir);
        if side == 0 {
            return Err(Error::Degenerate(
                "anchor projects onto a facet ray in the complement plane".into(),
            ));
        }
        if pos == 0 || side != prev_side {
            (window, arc_len) = rebuild(pos, &mut right_mass, &order, &circle);
            prev_side = side;
        } else {
            // Previous site enters the right set at the arc's back end.
            let prev = &circle[order[pos - 1]];
            if !prev.in_g2 && !prev.group_excluded {
                right_mass[prev.group] += &prev.prob;
            }
            if arc_len == 0 {
                window = pos - 1;
            }
            arc_len += 1;
            while arc_len > 0 {
                let w = &circle[order[window]];
                if cur.dir.cross_sign(&w.dir) < 0 {
                    break;
                }
                if !w.in_g2 && !w.group_excluded {
                    right_mass[w.group] -= &w.prob;
                }
                window = (window + 1) % n;
                arc_len -= 1;
            }
        }

        // Facet-site eligibility.
        if cur.in_g2 || cur.group_excluded {
            continue;
        }
        // anchor strictly below q is a precondition checked by the caller;
        // the escaping test is exact and per-facet.
        let pa_pts: Vec<Point> = lbeta
            .iter()
            .map(|r| model.site(*r).point.clone())
            .chain(std::iter::once(model.site(cur.site).point.clone()))
            .collect();
        if !escaping_facet_test(q, &pa_pts, anchor_pt, d)? {
            continue;
        }

        // Product of group factors, excluding the swept site's group.
        // side > 0: anchor left of the ray => G1 is the right set.
        let mut prod = P::one();
        let mut zero = false;
        for (gi, _) in model.groups.iter().enumerate() {
            if excluded(gi) || gi == cur.group {
                continue;
            }
            let g1 = if side > 0 {
                right_mass[gi].clone()
            } else {
                &var_total[gi] - &right_mass[gi]
            };
            let f = Rat::one() - (&g2_mass[gi] + g1);
            if f.is_zero() {
                zero = true;
                break;
            }
            prod = prod * P::from_rat(&f);
        }
        if zero {
            continue;
        }
        let term = base.clone() * P::from_rat(&cur.prob) * prod;
        total = total + term.clone();
    }
    Ok(total)
}

fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Basis (2 vectors) of the null space of the row span of `rows` in `R^d`.
fn null_space_basis(rows: &[Vec<Rat>], d: usize) -> Result<Vec<Vec<Rat>>> {
    // Row-reduce the matrix, track pivot columns, back-substitute the free
    // columns.
    let mut m: Vec<Vec<Rat>> = rows.to_vec();
    let mut pivots: Vec<usize> = Vec::new();
    let mut row = 0usize;
    for col in 0..d {
        let pr = (row..m.len()).find(|&r| !m[r][col].is_zero());
        let Some(pr) = pr else { continue };
        m.swap(row, pr);
        let p = m[row][col].clone();
        for j in 0..d {
            m[row][j] = &m[row][j] / &p;
        }
        for r in 0..m.len() {
            if r != row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for j in 0..d {
                    m[r][j] = &m[r][j] - &f * &m[row][j];
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == m.len() {
            break;
        }
    }
    let free: Vec<usize> = (0..d).filter(|c| !pivots.contains(c)).collect();
    if free.len() != 2 {
        return Err(Error::Degenerate(format!(
            "facet flat has codimension {} instead of 2",
            free.len()
        )));
    }
    let mut basis = Vec::with_capacity(2);
    for &fc in &free {
        let mut v = vec![Rat::zero(); d];
        v[fc] = Rat::one();
        for (ri, &pc) in pivots.iter().enumerate() {
            v[pc] = -m[ri][fc].clone();
        }
        basis.push(v);
    }
    Ok(basis)
}
