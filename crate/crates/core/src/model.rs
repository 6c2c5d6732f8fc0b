//! Uncertain point sets, outcome semantics and the exhaustive oracle.
//!
//! A model is a list of groups; each group holds candidate sites with
//! existence probabilities summing to at most one (the residual is the null
//! location). The unipoint model is the special case of all-singleton groups.
//! The brute-force oracle enumerates every outcome exactly and is the ground
//! truth for all membership algorithms.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::geom::{point_in_hull, Location, Point};
use crate::scalar::Rat;

pub const DEFAULT_OUTCOME_CAP: u128 = 1 << 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Unipoint,
    Multipoint,
}

#[derive(Debug, Clone)]
pub struct Site {
    pub point: Point,
    pub prob: Rat,
}

#[derive(Debug, Clone)]
pub struct Group {
    pub sites: Vec<Site>,
}

impl Group {
    pub fn mass(&self) -> Rat {
        self.sites.iter().map(|s| s.prob.clone()).sum()
    }

    /// Probability of the null location.
    pub fn residual(&self) -> Rat {
        Rat::one() - self.mass()
    }
}

/// An uncertain point set: `dimension`, `kind`, and site groups.
#[derive(Debug, Clone)]
pub struct UncertainPointSet {
    pub dimension: usize,
    pub kind: ModelKind,
    pub groups: Vec<Group>,
}

/// Flattened view of one site: (group index, site index within the group).
pub type SiteRef = (usize, usize);

impl UncertainPointSet {
    pub fn new(dimension: usize, kind: ModelKind, groups: Vec<Group>) -> Self {
        UncertainPointSet {
            dimension,
            kind,
            groups,
        }
    }

    /// Unipoint constructor from (point, probability) pairs.
    pub fn unipoint(dimension: usize, sites: Vec<(Point, Rat)>) -> Self {
        let groups = sites
            .into_iter()
            .map(|(point, prob)| Group {
                sites: vec![Site { point, prob }],
            })
            .collect();
        UncertainPointSet::new(dimension, ModelKind::Unipoint, groups)
    }

    pub fn total_sites(&self) -> usize {
        self.groups.iter().map(|g| g.sites.len()).sum()
    }

    pub fn site(&self, r: SiteRef) -> &Site {
        &self.groups[r.0].sites[r.1]
    }

    pub fn site_refs(&self) -> Vec<SiteRef> {
        let mut out = Vec::with_capacity(self.total_sites());
        for (gi, g) in self.groups.iter().enumerate() {
            for si in 0..g.sites.len() {
                out.push((gi, si));
            }
        }
        out
    }

    pub fn all_points(&self) -> Vec<Point> {
        self.site_refs()
            .into_iter()
            .map(|r| self.site(r).point.clone())
            .collect()
    }

    /// Checks probability ranges, group masses, model-tag consistency,
    /// dimensions and site distinctness.
    pub fn validate(&self) -> Result<()> {
        if self.dimension < 2 {
            return Err(Error::InvalidParameter(
                "dimension must be at least 2".into(),
            ));
        }
        for (gi, g) in self.groups.iter().enumerate() {
            if g.sites.is_empty() {
                return Err(Error::InvalidParameter(format!("group {gi} is empty")));
            }
            if self.kind == ModelKind::Unipoint && g.sites.len() != 1 {
                return Err(Error::ModelTagMismatch(format!(
                    "unipoint group {gi} has {} sites",
                    g.sites.len()
                )));
            }
            for s in &g.sites {
                s.point.check_dim(self.dimension)?;
                if s.prob <= Rat::zero() || s.prob > Rat::one() {
                    return Err(Error::ProbabilityOutOfRange(crate::scalar::format_rat(
                        &s.prob,
                    )));
                }
            }
            let mass = g.mass();
            if mass > Rat::one() {
                return Err(Error::GroupMassExceedsOne {
                    group: gi,
                    mass: crate::scalar::format_rat(&mass),
                });
            }
        }
        // Coincident sites break pair lines and sweeps; reject them up front.
        let pts = self.all_points();
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                if pts[i] == pts[j] {
                    return Err(Error::DegenerateSites(format!(
                        "sites {i} and {j} coincide at {}",
                        pts[i]
                    )));
                }
            }
        }
        Ok(())
    }

    /// Validates and additionally requires general position of all sites.
    pub fn validate_general_position(&self) -> Result<()> {
        self.validate()?;
        crate::geom::require_general_position(&self.all_points(), None, self.dimension)
    }

    /// Number of outcomes `prod_i (n_i + 1)`, or an error above `cap`.
    pub fn outcome_count(&self, cap: u128) -> Result<u128> {
        let mut total: u128 = 1;
        for g in &self.groups {
            total = total
                .checked_mul(g.sites.len() as u128 + 1)
                .ok_or(Error::CapExceeded {
                    needed: u128::MAX,
                    cap,
                })?;
            if total > cap {
                return Err(Error::CapExceeded { needed: total, cap });
            }
        }
        Ok(total)
    }
}

/// One realization: per group a chosen site index or None (null), with its
/// exact probability.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub chosen: Vec<Option<usize>>,
    pub probability: Rat,
}

impl Outcome {
    pub fn points<'a>(&self, model: &'a UncertainPointSet) -> Vec<&'a Point> {
        self.chosen
            .iter()
            .enumerate()
            .filter_map(|(gi, c)| c.map(|si| &model.groups[gi].sites[si].point))
            .collect()
    }

    pub fn is_empty(&self) -> bool {
        self.chosen.iter().all(|c| c.is_none())
    }
}

/// Iterator over every outcome of the model, in mixed-radix order.
pub struct OutcomeIter<'a> {
    model: &'a UncertainPointSet,
    state: Vec<usize>, // 0 = null, k = site k-1
    done: bool,
}

impl<'a> Iterator for OutcomeIter<'a> {
    type Item = Outcome;

    fn next(&mut self) -> Option<Outcome> {
        if self.done {
            return None;
        }
        let mut prob = Rat::one();
        let mut chosen = Vec::with_capacity(self.state.len());
        for (gi, &s) in self.state.iter().enumerate() {
            let g = &self.model.groups[gi];
            if s == 0 {
                chosen.push(None);
                prob *= g.residual();
            } else {
                chosen.push(Some(s - 1));
                prob *= &g.sites[s - 1].prob;
            }
        }
        // Advance mixed-radix counter.
        let mut i = 0;
        loop {
            if i == self.state.len() {
                self.done = true;
                break;
            }
            self.state[i] += 1;
            if self.state[i] <= self.model.groups[i].sites.len() {
                break;
            }
            self.state[i] = 0;
            i += 1;
        }
        Some(Outcome {
            chosen,
            probability: prob,
        })
    }
}

/// Enumerates every outcome exactly once; errors above the cap.
pub fn enumerate_outcomes(model: &UncertainPointSet, cap: u128) -> Result<OutcomeIter<'_>> {
    model.outcome_count(cap)?;
    Ok(OutcomeIter {
        model,
        state: vec![0; model.groups.len()],
        done: false,
    })
}

/// Exact membership probability by exhaustive enumeration: the sum of
/// `Pr(B)` over outcomes whose closed hull contains `q`.
pub fn brute_force_membership(q: &Point, model: &UncertainPointSet, cap: u128) -> Result<Rat> {
    q.check_dim(model.dimension)?;
    let d = model.dimension;
    let mut total = Rat::zero();

    // Hull containment is monotone in the outcome's site set; memoize per
    // subset of the flat site list to prune the 2^n direct tests.
    let refs = model.site_refs();
    let index_of = |r: &SiteRef| refs.iter().position(|x| x == r).unwrap();
    let mut memo: std::collections::HashMap<u64, bool> = std::collections::HashMap::new();

    for outcome in enumerate_outcomes(model, cap)? {
        if outcome.probability.is_zero() {
            continue;
        }
        let pts: Vec<Point> = outcome.points(model).into_iter().cloned().collect();
        if pts.len() < d + 1 {
            // Under general position a hull of <= d points cannot contain q,
            // but boundary cases must stay exact: test directly (cheap).
            if pts.is_empty() {
                continue;
            }
        }
        let mask: u64 = outcome
            .chosen
            .iter()
            .enumerate()
            .filter_map(|(gi, c)| c.map(|si| index_of(&(gi, si))))
            .fold(0u64, |m, i| m | (1 << i));
        let contained = match memo.get(&mask) {
            Some(&v) => v,
            None => {
                let v = point_in_hull(q, &pts, d)? != Location::Outside;
                memo.insert(mask, v);
                v
            }
        };
        if contained {
            total += &outcome.probability;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::parse_decimal;

    fn half() -> Rat {
        parse_decimal("0.5").unwrap()
    }

    pub fn triangle_model() -> UncertainPointSet {
        UncertainPointSet::unipoint(
            2,
            vec![
                (Point::from_i64(&[0, 10]), half()),
                (Point::from_i64(&[-10, -5]), half()),
                (Point::from_i64(&[10, -5]), half()),
            ],
        )
    }

    #[test]
    fn validate_accepts_triangle() {
        triangle_model().validate().unwrap();
    }

    #[test]
    fn validate_rejects_bad_probability() {
        let m = UncertainPointSet::unipoint(2, vec![(Point::from_i64(&[0, 0]), Rat::zero())]);
        assert!(matches!(
            m.validate(),
            Err(Error::ProbabilityOutOfRange(_))
        ));
    }

    #[test]
    fn validate_rejects_heavy_group() {
        let g = Group {
            sites: vec![
                Site {
                    point: Point::from_i64(&[0, 0]),
                    prob: parse_decimal("0.7").unwrap(),
                },
                Site {
                    point: Point::from_i64(&[1, 0]),
                    prob: parse_decimal("0.6").unwrap(),
                },
            ],
        };
        let m = UncertainPointSet::new(2, ModelKind::Multipoint, vec![g]);
        assert!(matches!(
            m.validate(),
            Err(Error::GroupMassExceedsOne { group: 0, .. })
        ));
    }

    #[test]
    fn outcome_probabilities_sum_to_one() {
        let m = triangle_model();
        let sum: Rat = enumerate_outcomes(&m, DEFAULT_OUTCOME_CAP)
            .unwrap()
            .map(|o| o.probability)
            .sum();
        assert_eq!(sum, Rat::one());
        assert_eq!(
            enumerate_outcomes(&m, DEFAULT_OUTCOME_CAP).unwrap().count(),
            8
        );
    }

    #[test]
    fn multipoint_enumeration_counts_nulls() {
        let g = |pts: [[i64; 2]; 2]| Group {
            sites: pts
                .iter()
                .map(|p| Site {
                    point: Point::from_i64(p),
                    prob: parse_decimal("0.3").unwrap(),
                })
                .collect(),
        };
        let m = UncertainPointSet::new(
            2,
            ModelKind::Multipoint,
            vec![g([[0, 0], [1, 0]]), g([[0, 1], [1, 1]])],
        );
        let outcomes: Vec<Outcome> = enumerate_outcomes(&m, 1 << 10).unwrap().collect();
        assert_eq!(outcomes.len(), 9);
        let sum: Rat = outcomes.iter().map(|o| o.probability.clone()).sum();
        assert_eq!(sum, Rat::one());
    }

    #[test]
    fn certain_site_still_enumerates_two_outcomes() {
        let m = UncertainPointSet::unipoint(2, vec![(Point::from_i64(&[0, 0]), Rat::one())]);
        let outcomes: Vec<Outcome> = enumerate_outcomes(&m, 4).unwrap().collect();
        assert_eq!(outcomes.len(), 2);
        let probs: Vec<Rat> = outcomes.iter().map(|o| o.probability.clone()).collect();
        assert!(probs.contains(&Rat::one()));
        assert!(probs.contains(&Rat::zero()));
    }

    #[test]
    fn cap_is_enforced() {
        let sites: Vec<(Point, Rat)> = (0..30)
            .map(|i| (Point::from_i64(&[i, i * i]), half()))
            .collect();
        let m = UncertainPointSet::unipoint(2, sites);
        assert!(matches!(
            enumerate_outcomes(&m, DEFAULT_OUTCOME_CAP).err(),
            Some(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn oracle_triangle_is_one_eighth() {
        // Only the all-present outcome (prob 1/8) has a hull containing the
        // origin.
        let m = triangle_model();
        let q = Point::from_i64(&[0, 0]);
        let pi = brute_force_membership(&q, &m, DEFAULT_OUTCOME_CAP).unwrap();
        assert_eq!(pi, Rat::new(1.into(), 8.into()));
    }

    #[test]
    fn oracle_far_point_is_zero() {
        let m = triangle_model();
        let q = Point::from_i64(&[1000, 1000]);
        let pi = brute_force_membership(&q, &m, DEFAULT_OUTCOME_CAP).unwrap();
        assert_eq!(pi, Rat::zero());
    }

    #[test]
    fn oracle_certain_model_inside_is_one() {
        let m = UncertainPointSet::unipoint(
            2,
            vec![
                (Point::from_i64(&[0, 10]), Rat::one()),
                (Point::from_i64(&[-10, -5]), Rat::one()),
                (Point::from_i64(&[10, -5]), Rat::one()),
            ],
        );
        let q = Point::from_i64(&[0, 0]);
        assert_eq!(
            brute_force_membership(&q, &m, DEFAULT_OUTCOME_CAP).unwrap(),
            Rat::one()
        );
    }

    #[test]
    fn oracle_monotone_in_probability() {
        // Raising one site's probability never lowers membership.
        let q = Point::from_i64(&[0, 0]);
        let mut lo = triangle_model();
        let pi_lo = brute_force_membership(&q, &lo, DEFAULT_OUTCOME_CAP).unwrap();
        lo.groups[0].sites[0].prob = parse_decimal("0.9").unwrap();
        let pi_hi = brute_force_membership(&q, &lo, DEFAULT_OUTCOME_CAP).unwrap();
        assert!(pi_hi > pi_lo);
    }
}
