//! Escaping facets and their probabilities.
//!
//! For an outcome B with lowest point s_i, the query q is a non-silhouette
//! vertex of CH(B + q) iff exactly one facet f(P_alpha) = CH(P_alpha + q)
//! incident to q "escapes": its projection onto the first d-1 coordinates
//! meets the open ray from q' moving away from s_i'. The probability that
//! f(P_alpha) is a facet while s_i is the lowest point is a product over the
//! sites forced present and the groups forced absent.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::geom::point::Point;
use crate::geom::predicates::orient_d;
use crate::geom::simplex::solve_linear;
use crate::model::{SiteRef, UncertainPointSet};
use crate::scalar::{ProbField, Rat};

/// Exact test: does the projection of `CH(p_alpha + q)` onto the first d-1
/// coordinates intersect the open ray from q' away from anchor'?
///
/// Equivalent formulation: the projected ray direction (q' - anchor') lies in
/// the closed cone spanned by the projected edge vectors (p_j' - q').
pub fn escaping_facet_test(
    q: &Point,
    p_alpha: &[Point],
    anchor: &Point,
    d: usize,
) -> Result<bool> {
    if p_alpha.len() != d - 1 {
        return Err(Error::InvalidParameter(format!(
            "facet needs {} sites, got {}",
            d - 1,
            p_alpha.len()
        )));
    }
    q.check_dim(d)?;
    anchor.check_dim(d)?;
    for p in p_alpha {
        p.check_dim(d)?;
        if p == anchor {
            return Err(Error::InvalidParameter(
                "anchor site cannot be part of the facet".into(),
            ));
        }
    }
    let k = d - 1;
    let dir: Vec<Rat> = (0..k).map(|j| q.coord(j) - anchor.coord(j)).collect();
    if dir.iter().all(|v| v.is_zero()) {
        return Err(Error::Degenerate(
            "query and anchor coincide in projection".into(),
        ));
    }
    // Solve dir = sum mu_j (p_j' - q') exactly; nonsingular under general
    // position.
    let a: Vec<Vec<Rat>> = (0..k)
        .map(|row| {
            (0..k)
                .map(|col| p_alpha[col].coord(row) - q.coord(row))
                .collect()
        })
        .collect();
    let mu = solve_linear(&a, &dir).ok_or_else(|| {
        Error::Degenerate("projected facet directions are linearly dependent".into())
    })?;
    Ok(mu.iter().all(|m| !m.is_negative()))
}

/// Probability that `f(p_alpha)` is a facet of CH(B + q) with `anchor` the
/// lowest point of B + q. Returns an exact zero for each of the structural
/// zero conditions; degenerate coordinate ties are errors.
pub fn facet_probability<P: ProbField>(
    q: &Point,
    p_alpha: &[SiteRef],
    anchor: SiteRef,
    model: &UncertainPointSet,
    d: usize,
) -> Result<P> {
    let anchor_site = model.site(anchor);
    let xd = d - 1;

    // Anchor strictly below q along the last axis.
    match anchor_site.point.coord(xd).cmp(q.coord(xd)) {
        std::cmp::Ordering::Less => {}
        std::cmp::Ordering::Equal => {
            return Err(Error::Degenerate(
                "anchor and query share the last coordinate".into(),
            ))
        }
        std::cmp::Ordering::Greater => return Ok(P::zero()),
    }

    // Group-level zero conditions.
    let mut seen_groups = Vec::with_capacity(p_alpha.len());
    for r in p_alpha {
        if r.0 == anchor.0 {
            return Ok(P::zero());
        }
        if seen_groups.contains(&r.0) {
            return Ok(P::zero());
        }
        seen_groups.push(r.0);
        // P_alpha disjoint from G2 (sites strictly below the anchor).
        let c = model.site(*r).point.coord(xd).cmp(anchor_site.point.coord(xd));
        match c {
            std::cmp::Ordering::Less => return Ok(P::zero()),
            std::cmp::Ordering::Equal => {
                return Err(Error::Degenerate(
                    "facet site and anchor share the last coordinate".into(),
                ))
            }
            std::cmp::Ordering::Greater => {}
        }
    }

    // Hyperplane through p_alpha + q; anchor fixes the inner side.
    let mut flat: Vec<Point> = p_alpha.iter().map(|r| model.site(*r).point.clone()).collect();
    flat.push(q.clone());
    let mut with_anchor = flat.clone();
    with_anchor.push(anchor_site.point.clone());
    let anchor_side = orient_d(&with_anchor)?;
    if anchor_side == 0 {
        return Err(Error::Degenerate(
            "anchor lies on the facet hyperplane".into(),
        ));
    }

    let mut result = P::from_rat(&anchor_site.prob);
    for r in p_alpha {
        result = result * P::from_rat(&model.site(*r).prob);
    }

    for (gi, g) in model.groups.iter().enumerate() {
        if gi == anchor.0 || seen_groups.contains(&gi) {
            continue;
        }
        let mut absent_mass = Rat::zero();
        for (si, s) in g.sites.iter().enumerate() {
            debug_assert!(!p_alpha.contains(&(gi, si)));
            // G2: strictly below the anchor.
            let below = match s.point.coord(xd).cmp(anchor_site.point.coord(xd)) {
                std::cmp::Ordering::Less => true,
                std::cmp::Ordering::Equal => {
                    return Err(Error::Degenerate(
                        "two sites share the last coordinate".into(),
                    ))
                }
                std::cmp::Ordering::Greater => false,
            };
            if below {
                absent_mass += &s.prob;
                continue;
            }
            // G1: strictly on the other side of the facet hyperplane.
            let mut with_s = flat.clone();
            with_s.push(s.point.clone());
            let side = orient_d(&with_s)?;
            if side == 0 {
                return Err(Error::Degenerate(format!(
                    "site {} lies on a facet hyperplane",
                    s.point
                )));
            }
            if side != anchor_side {
                absent_mass += &s.prob;
            }
        }
        result = result * P::from_rat(&(Rat::one() - absent_mass));
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ModelKind, UncertainPointSet};
    use crate::scalar::parse_decimal;

    fn p(v: &[i64]) -> Point {
        Point::from_i64(v)
    }

    #[test]
    fn escaping_in_2d_reduces_to_interval_check() {
        // d=2: facet is a single edge q-p; projecting drops y. The ray from
        // q' away from anchor' hits the edge's projection iff p' is on the
        // opposite side of q' from anchor'.
        let q = p(&[0, 5]);
        let anchor = p(&[-3, 1]);
        let right = p(&[4, 9]);
        let left = p(&[-7, 8]);
        assert!(escaping_facet_test(&q, &[right.clone()], &anchor, 2).unwrap());
        assert!(!escaping_facet_test(&q, &[left.clone()], &anchor, 2).unwrap());
    }

    #[test]
    fn anchor_in_facet_is_rejected() {
        let q = p(&[0, 5]);
        let anchor = p(&[-3, 1]);
        assert!(escaping_facet_test(&q, &[anchor.clone()], &anchor, 2).is_err());
    }

    #[test]
    fn exactly_one_escaping_facet_in_3d() {
        // Fixed outcome: tetrahedron around the vertical axis with q a
        // non-silhouette vertex of the joint hull; among the candidate
        // facets at q with the anchor fixed, exactly one escapes.
        let q = p(&[0, 0, 3]);
        let anchor = p(&[1, 1, -5]); // lowest point
        let others = [p(&[6, 2, 1]), p(&[-5, 3, 1]), p(&[1, -7, 1])];
        let mut escaping = 0;
        for i in 0..others.len() {
            for j in i + 1..others.len() {
                let pa = [others[i].clone(), others[j].clone()];
                if escaping_facet_test(&q, &pa, &anchor, 3).unwrap() {
                    escaping += 1;
                }
            }
        }
        assert_eq!(escaping, 1);
    }

    #[test]
    fn facet_probability_zero_conditions() {
        use crate::model::{Group, Site};
        let site = |pt: [i64; 3], pr: &str| Site {
            point: p(&pt),
            prob: parse_decimal(pr).unwrap(),
        };
        let m = UncertainPointSet::new(
            3,
            ModelKind::Multipoint,
            vec![
                Group {
                    sites: vec![site([1, 1, -5], "0.5"), site([8, 0, 2], "0.25")],
                },
                Group {
                    sites: vec![site([6, 2, 1], "0.5"), site([-4, 1, 6], "0.25")],
                },
                Group {
                    sites: vec![site([-5, 3, 2], "0.5")],
                },
                Group {
                    sites: vec![site([1, -7, -8], "0.5")],
                },
            ],
        );
        let q = p(&[0, 0, 3]);
        let anchor = (0, 0);
        // Sibling of the anchor inside P_alpha.
        let z: Rat = facet_probability(&q, &[(0, 1), (1, 0)], anchor, &m, 3).unwrap();
        assert_eq!(z, Rat::zero());
        // Two sites of one group inside P_alpha.
        let z: Rat = facet_probability(&q, &[(1, 0), (1, 1)], anchor, &m, 3).unwrap();
        assert_eq!(z, Rat::zero());
        // P_alpha meets G2 (site (3,0) is below the anchor).
        let z: Rat = facet_probability(&q, &[(3, 0), (1, 0)], anchor, &m, 3).unwrap();
        assert_eq!(z, Rat::zero());
        // Anchor above the query.
        let z: Rat = facet_probability(&q, &[(1, 0), (2, 0)], (1, 1), &m, 3).unwrap();
        assert_eq!(z, Rat::zero());
    }

    #[test]
    fn facet_probability_matches_enumeration() {
        // Unipoint 3D instance: the probability that f(P_alpha) is a facet
        // with the anchor lowest must equal the enumerated event mass.
        use crate::model::enumerate_outcomes;
        let m = UncertainPointSet::unipoint(
            3,
            vec![
                (p(&[1, 1, -5]), parse_decimal("0.5").unwrap()),
                (p(&[6, 2, 1]), parse_decimal("0.3").unwrap()),
                (p(&[-5, 3, 2]), parse_decimal("0.7").unwrap()),
                (p(&[1, -7, -2]), parse_decimal("0.4").unwrap()),
                (p(&[2, 8, 4]), parse_decimal("0.6").unwrap()),
            ],
        );
        let q = p(&[0, 0, 3]);
        let anchor: SiteRef = (0, 0);
        let pa = [(1usize, 0usize), (3usize, 0usize)];
        let got: Rat = facet_probability(&q, &pa, anchor, &m, 3).unwrap();

        // Event: anchor and both facet sites present, every site strictly
        // below the anchor absent, every site strictly on the far side of
        // the facet hyperplane absent.
        let mut expect = Rat::zero();
        let flat = vec![m.site(pa[0]).point.clone(), m.site(pa[1]).point.clone(), q.clone()];
        let mut wa = flat.clone();
        wa.push(m.site(anchor).point.clone());
        let aside = orient_d(&wa).unwrap();
        'outer: for o in enumerate_outcomes(&m, 1 << 20).unwrap() {
            for need in [anchor, pa[0], pa[1]] {
                if o.chosen[need.0] != Some(need.1) {
                    continue 'outer;
                }
            }
            for (gi, c) in o.chosen.iter().enumerate() {
                if let Some(si) = c {
                    let s = m.site((gi, *si));
                    if s.point.coord(2) < m.site(anchor).point.coord(2) {
                        continue 'outer;
                    }
                    if [anchor, pa[0], pa[1]].contains(&(gi, *si)) {
                        continue;
                    }
                    let mut ws = flat.clone();
                    ws.push(s.point.clone());
                    if orient_d(&ws).unwrap() != aside {
                        continue 'outer;
                    }
                }
            }
            expect += &o.probability;
        }
        assert_eq!(got, expect);
    }
}
