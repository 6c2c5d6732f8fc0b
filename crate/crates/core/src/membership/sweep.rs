//! 2D membership probability by radial sweep.
//!
//! For an outcome B, the query q lies outside CH(B) exactly when q is a
//! vertex of CH(B + q), which happens iff B is empty or some directed edge
//! q->s is the first hull edge after q in CCW order (the witness edge). The
//! witness probability of site s is gamma_s times, per other group, one minus
//! the group mass strictly right of the ray q->s. Sweeping sites in CCW order
//! around q updates those group factors incrementally: each site enters the
//! right set once and leaves it once per full turn.
//!
//! Group factors can hit exact zero (probability-1 sites, full group mass on
//! the wrong side), so the running product tracks nonzero factors plus a zero
//! count instead of dividing by zero. Factor values are kept as exact
//! rationals even in the fast profile; only the accumulated products live in
//! the probability field `P`.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::geom::direction::Dir;
use crate::geom::point::Point;
use crate::model::{SiteRef, UncertainPointSet};
use crate::scalar::{ProbField, Rat};

/// Witness-edge decomposition of `1 - pi(q)`.
#[derive(Debug, Clone)]
pub struct WitnessDecomposition<P> {
    pub empty_prob: P,
    /// Witness-edge probability per site.
    pub witness: Vec<(SiteRef, P)>,
    /// `pi(q) = 1 - empty_prob - sum(witness)`.
    pub membership: P,
}

struct FactorState<P: ProbField> {
    /// Exact per-group mass currently strictly right of the sweep ray.
    outside_mass: Vec<Rat>,
    /// 1 - outside_mass per group, exact.
    factor: Vec<Rat>,
    /// Product of the nonzero factors, in the probability field.
    prod_nonzero: P,
    zero_count: usize,
}

impl<P: ProbField> FactorState<P> {
    fn new(groups: usize) -> Self {
        FactorState {
            outside_mass: vec![Rat::zero(); groups],
            factor: vec![Rat::one(); groups],
            prod_nonzero: P::one(),
            zero_count: 0,
        }
    }

    fn apply(&mut self, group: usize, delta: &Rat) {
        let old = self.factor[group].clone();
        self.outside_mass[group] += delta;
        let new = Rat::one() - &self.outside_mass[group];
        self.factor[group] = new.clone();
        match (old.is_zero(), new.is_zero()) {
            (false, false) => {
                self.prod_nonzero =
                    self.prod_nonzero.clone() * P::from_rat(&new) / P::from_rat(&old);
            }
            (false, true) => {
                self.prod_nonzero = self.prod_nonzero.clone() / P::from_rat(&old);
                self.zero_count += 1;
            }
            (true, false) => {
                self.prod_nonzero = self.prod_nonzero.clone() * P::from_rat(&new);
                self.zero_count -= 1;
            }
            (true, true) => {}
        }
    }

    /// `prod_{k != skip} factor_k`.
    fn product_excluding(&self, skip: usize) -> P {
        let f = &self.factor[skip];
        if f.is_zero() {
            if self.zero_count == 1 {
                self.prod_nonzero.clone()
            } else {
                P::zero()
            }
        } else if self.zero_count == 0 {
            self.prod_nonzero.clone() / P::from_rat(f)
        } else {
            P::zero()
        }
    }
}

struct SweepSite {
    site: SiteRef,
    group: usize,
    prob: Rat,
    dir: Dir,
}

fn build_sweep_sites(q: &Point, model: &UncertainPointSet) -> Result<Vec<SweepSite>> {
    let mut sites = Vec::with_capacity(model.total_sites());
    for (gi, g) in model.groups.iter().enumerate() {
        for (si, s) in g.sites.iter().enumerate() {
            let dx = s.point.x() - q.x();
            let dy = s.point.y() - q.y();
            let dir = Dir::from_rat(&dx, &dy).ok_or_else(|| {
                Error::Degenerate(format!("query point coincides with site {}", s.point))
            })?;
            sites.push(SweepSite {
                site: (gi, si),
                group: gi,
                prob: s.prob.clone(),
                dir,
            });
        }
    }
    Ok(sites)
}

/// Sorts sites CCW around q and rejects radial ties (same or opposite
/// direction), which violate general position.
fn radial_order(sites: &[SweepSite]) -> Result<Vec<usize>> {
    let mut order: Vec<usize> = (0..sites.len()).collect();
    order.sort_by(|&a, &b| sites[a].dir.angle_cmp(&sites[b].dir));
    for w in order.windows(2) {
        if sites[w[0]].dir.same_ray(&sites[w[1]].dir) {
            return Err(Error::Degenerate(format!(
                "sites {:?} and {:?} are collinear with the query",
                sites[w[0]].site, sites[w[1]].site
            )));
        }
    }
    // Opposite-direction ties: binary search each negated direction.
    for &i in &order {
        let neg = sites[i].dir.negate();
        if order
            .binary_search_by(|&j| sites[j].dir.angle_cmp(&neg))
            .is_ok()
        {
            return Err(Error::Degenerate(format!(
                "site {:?} is antipodal to another site around the query",
                sites[i].site
            )));
        }
    }
    Ok(order)
}

/// Full witness-edge decomposition of the membership probability at `q`.
pub fn membership_decomposed<P: ProbField>(
    q: &Point,
    model: &UncertainPointSet,
) -> Result<WitnessDecomposition<P>> {
    q.check_dim(2)?;
    if model.dimension != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: model.dimension,
        });
    }
    let m = model.groups.len();

    let mut empty_prob = P::one();
    for g in &model.groups {
        empty_prob = empty_prob * P::from_rat(&g.residual());
    }

    let sites = build_sweep_sites(q, model)?;
    let n = sites.len();
    if n == 0 {
        return Ok(WitnessDecomposition {
            empty_prob: P::one(),
            witness: vec![],
            membership: P::zero(),
        });
    }
    let order = radial_order(&sites)?;

    // Initial right set for the first ray.
    let mut state: FactorState<P> = FactorState::new(m);
    let first = &sites[order[0]];
    let mut in_right = vec![false; n];
    for (pos, &idx) in order.iter().enumerate() {
        if pos == 0 {
            continue;
        }
        let s = &sites[idx];
        if first.dir.cross_sign(&s.dir) < 0 {
            in_right[pos] = true;
            state.apply(s.group, &s.prob.clone());
        }
    }
    // The right set of the first ray is a contiguous suffix of the sorted
    // order (the half-turn just behind the anchor); `window` marks its start
    // and `arc_len` its size. The arc can transiently cover every other site
    // (including a not-yet-removed future anchor), so emptiness is tracked
    // by length, not by pointer equality.
    let mut window = 0usize;
    let mut arc_len = 0usize;
    for pos in (1..n).rev() {
        if in_right[pos] {
            window = pos;
            arc_len += 1;
        } else {
            break;
        }
    }
    debug_assert_eq!(
        (1..n).filter(|&p| in_right[p]).count(),
        arc_len,
        "right set must be a suffix arc"
    );

    let mut witness: Vec<(SiteRef, P)> = Vec::with_capacity(n);
    let mut witness_sum = P::zero();
    for pos in 0..n {
        let idx = order[pos];
        let anchor = &sites[idx];
        if pos > 0 {
            // Previous anchor enters the right set at the arc's back end.
            let prev = &sites[order[pos - 1]];
            state.apply(prev.group, &prev.prob.clone());
            if arc_len == 0 {
                window = pos - 1;
            }
            arc_len += 1;
            // Drop members that are no longer strictly right of the new ray;
            // they sit at the front (oldest angles) of the arc.
            while arc_len > 0 {
                let w = &sites[order[window]];
                if anchor.dir.cross_sign(&w.dir) < 0 {
                    break;
                }
                state.apply(w.group, &(-w.prob.clone()));
                window = (window + 1) % n;
                arc_len -= 1;
            }
        }
        let factors = state.product_excluding(anchor.group);
        let w_u = P::from_rat(&anchor.prob) * factors;
        witness_sum = witness_sum + w_u.clone();
        witness.push((anchor.site, w_u));
    }

    let membership = P::one() - empty_prob.clone() - witness_sum;
    Ok(WitnessDecomposition {
        empty_prob,
        witness,
        membership,
    })
}

/// Exact membership probability `pi(q)` for a 2D model.
pub fn membership_2d<P: ProbField>(q: &Point, model: &UncertainPointSet) -> Result<P> {
    Ok(membership_decomposed::<P>(q, model)?.membership)
}

/// Witness-edge probability of a single site, computed directly in O(n).
pub fn witness_edge_probability<P: ProbField>(
    q: &Point,
    site: SiteRef,
    model: &UncertainPointSet,
) -> Result<P> {
    q.check_dim(2)?;
    let s = model.site(site);
    let dir = Dir::from_rat(&(s.point.x() - q.x()), &(s.point.y() - q.y()))
        .ok_or_else(|| Error::Degenerate("query coincides with the witness site".into()))?;
    let mut result = P::from_rat(&s.prob);
    for (gi, g) in model.groups.iter().enumerate() {
        if gi == site.0 {
            continue;
        }
        let mut outside = Rat::zero();
        for other in &g.sites {
            let od = Dir::from_rat(&(other.point.x() - q.x()), &(other.point.y() - q.y()))
                .ok_or_else(|| Error::Degenerate("query coincides with a site".into()))?;
            match dir.cross_sign(&od) {
                -1 => outside += &other.prob,
                0 => {
                    return Err(Error::Degenerate(format!(
                        "site {} collinear with the query and the witness site",
                        other.point
                    )))
                }
                _ => {}
            }
        }
        result = result * P::from_rat(&(Rat::one() - outside));
    }
    Ok(result)
}

/// Builds the conditional model: `anchor` forced present (its group collapses
/// to that site with probability 1), `excluded` sites removed with their
/// groups renormalized by the surviving mass.
pub fn conditional_model(
    model: &UncertainPointSet,
    anchor: SiteRef,
    excluded: &[SiteRef],
) -> Result<UncertainPointSet> {
    use crate::model::{Group, ModelKind, Site};
    if excluded.contains(&anchor) {
        return Err(Error::InvalidParameter(
            "anchor cannot be excluded".into(),
        ));
    }
    let mut groups = Vec::with_capacity(model.groups.len());
    for (gi, g) in model.groups.iter().enumerate() {
        if gi == anchor.0 {
            groups.push(Group {
                sites: vec![Site {
                    point: g.sites[anchor.1].point.clone(),
                    prob: Rat::one(),
                }],
            });
            continue;
        }
        let excluded_mass: Rat = g
            .sites
            .iter()
            .enumerate()
            .filter(|(si, _)| excluded.contains(&(gi, *si)))
            .map(|(_, s)| s.prob.clone())
            .sum();
        let keep = Rat::one() - &excluded_mass;
        if keep.is_zero() {
            return Err(Error::InvalidParameter(format!(
                "conditioning event has probability zero: group {gi} fully excluded"
            )));
        }
        let sites: Vec<Site> = g
            .sites
            .iter()
            .enumerate()
            .filter(|(si, _)| !excluded.contains(&(gi, *si)))
            .map(|(_, s)| Site {
                point: s.point.clone(),
                prob: &s.prob / &keep,
            })
            .collect();
        if sites.is_empty() {
            // Whole group conditioned away (keep == residual mass): the
            // group contributes nothing; keep an empty marker? Groups must
            // be nonempty, so just drop it.
            continue;
        }
        groups.push(Group { sites });
    }
    Ok(UncertainPointSet::new(
        model.dimension,
        ModelKind::Multipoint,
        groups,
    ))
}

/// Membership probability conditioned on `anchor` existing and every site in
/// `excluded` not existing.
pub fn membership_2d_conditioned<P: ProbField>(
    q: &Point,
    model: &UncertainPointSet,
    anchor: SiteRef,
    excluded: &[SiteRef],
) -> Result<P> {
    let cond = conditional_model(model, anchor, excluded)?;
    membership_2d::<P>(q, &cond)
}
