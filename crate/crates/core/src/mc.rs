//! Monte Carlo membership index.
//!
//! Preprocessing draws s outcomes of the model and stores each outcome's
//! hull; a query counts the hulls containing it and returns k/s. The sample
//! count follows a Chernoff-Hoeffding bound union-bounded over the
//! probability-map cells: s = ceil((d^2 ln n + ln(2/delta)) / (2 eps^2)).
//!
//! Sample j draws its randomness from (seed, stream j), so the index is
//! reproducible and order-independent. Site selection compares a uniform
//! 64-bit draw against exact cumulative thresholds scaled by 2^64.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::polygon::{convex_hull_2d, ConvexRegion, Location};
use crate::geom::predicates::orient_d;
use crate::geom::{point_in_hull, Point};
use crate::model::UncertainPointSet;
use crate::scalar::Rat;

/// Precomputed per-sample hull representation.
enum SampleHull {
    /// d = 2: explicit convex polygon (possibly degenerate).
    Planar(ConvexRegion),
    /// d = 3: hull facets (a, b, c) oriented so inside is nonnegative, when
    /// the outcome spans full dimension.
    Spatial(Vec<[Point; 3]>),
    /// Degenerate or d >= 4: the realized points, tested exactly.
    Subset(Vec<Point>),
}

pub struct MCIndex {
    pub dimension: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub seed: u64,
    pub sample_count: usize,
    /// Chosen site index (or None) per group, per sample.
    samples: Vec<Vec<Option<usize>>>,
    hulls: Vec<SampleHull>,
}

/// The pinned sample-count formula.
pub fn sample_count(n: usize, d: usize, epsilon: f64, delta: f64) -> usize {
    let ln_n = (n.max(1) as f64).ln();
    let s = ((d * d) as f64 * ln_n + (2.0 / delta).ln()) / (2.0 * epsilon * epsilon);
    s.ceil() as usize
}

fn draw_outcome(model: &UncertainPointSet, seed: u64, stream: u64) -> Vec<Option<usize>> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let scale = BigInt::one() << 64u32;
    model
        .groups
        .iter()
        .map(|g| {
            let u = rng.next_u64() as u128;
            let mut cum = Rat::zero();
            for (si, s) in g.sites.iter().enumerate() {
                cum += &s.prob;
                // floor(cum * 2^64), exact.
                let thr = (&cum * Rat::from_integer(scale.clone())).floor();
                let thr = thr
                    .to_integer()
                    .to_u128()
                    .unwrap_or(u128::MAX);
                if u < thr {
                    return Some(si);
                }
            }
            None
        })
        .collect()
}

fn build_hull(model: &UncertainPointSet, chosen: &[Option<usize>]) -> SampleHull {
    let pts: Vec<Point> = chosen
        .iter()
        .enumerate()
        .filter_map(|(gi, c)| c.map(|si| model.groups[gi].sites[si].point.clone()))
        .collect();
    match model.dimension {
        2 => SampleHull::Planar(convex_hull_2d(&pts)),
        3 => match hull3d_facets(&pts) {
            Some(facets) => SampleHull::Spatial(facets),
            None => SampleHull::Subset(pts),
        },
        _ => SampleHull::Subset(pts),
    }
}

/// Facets of a full-dimensional 3D hull by exact gift-wrapping over triples;
/// None when the point set is degenerate or too small.
fn hull3d_facets(pts: &[Point]) -> Option<Vec<[Point; 3]>> {
    let n = pts.len();
    if n < 4 {
        return None;
    }
    let mut facets = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let mut pos = false;
                let mut neg = false;
                for (o, p) in pts.iter().enumerate() {
                    if o == i || o == j || o == k {
                        continue;
                    }
                    match orient_d(&[pts[i].clone(), pts[j].clone(), pts[k].clone(), p.clone()])
                        .ok()?
                    {
                        1 => pos = true,
                        -1 => neg = true,
                        _ => return None, // four coplanar points
                    }
                    if pos && neg {
                        break;
                    }
                }
                if pos && neg {
                    continue;
                }
                if !pos && !neg {
                    return None; // all points coplanar
                }
                // Orient the facet so the hull interior is positive.
                if pos {
                    facets.push([pts[i].clone(), pts[j].clone(), pts[k].clone()]);
                } else {
                    facets.push([pts[i].clone(), pts[k].clone(), pts[j].clone()]);
                }
            }
        }
    }
    Some(facets)
}

pub fn build_mc_index(
    model: &UncertainPointSet,
    epsilon: f64,
    delta: f64,
    seed: u64,
) -> Result<MCIndex> {
    if !(0.0 < epsilon && epsilon < 1.0) || !(0.0 < delta && delta < 1.0) {
        return Err(Error::InvalidParameter(
            "epsilon and delta must lie in (0, 1)".into(),
        ));
    }
    model.validate()?;
    let n = model.total_sites();
    let s = sample_count(n, model.dimension, epsilon, delta);
    let mut samples = Vec::with_capacity(s);
    let mut hulls = Vec::with_capacity(s);
    for j in 0..s {
        let chosen = draw_outcome(model, seed, j as u64);
        hulls.push(build_hull(model, &chosen));
        samples.push(chosen);
    }
    Ok(MCIndex {
        dimension: model.dimension,
        epsilon,
        delta,
        seed,
        sample_count: s,
        samples,
        hulls,
    })
}

impl MCIndex {
    /// Number of sampled hulls containing `q` (closed).
    pub fn hits(&self, q: &Point) -> Result<usize> {
        q.check_dim(self.dimension)?;
        let mut k = 0usize;
        for hull in &self.hulls {
            let inside = match hull {
                SampleHull::Planar(region) => region.locate(q) != Location::Outside,
                SampleHull::Spatial(facets) => facets.iter().all(|f| {
                    orient_d(&[f[0].clone(), f[1].clone(), f[2].clone(), q.clone()])
                        .map(|s| s >= 0)
                        .unwrap_or(false)
                }),
                SampleHull::Subset(pts) => {
                    point_in_hull(q, pts, self.dimension)? != Location::Outside
                }
            };
            if inside {
                k += 1;
            }
        }
        Ok(k)
    }

    /// The estimate `k / s`.
    pub fn query(&self, q: &Point) -> Result<f64> {
        Ok(self.hits(q)? as f64 / self.sample_count as f64)
    }

    /// The estimate as an exact rational `k / s`.
    pub fn query_exact(&self, q: &Point) -> Result<Rat> {
        Ok(Rat::new(
            BigInt::from(self.hits(q)?),
            BigInt::from(self.sample_count),
        ))
    }

    pub fn samples(&self) -> &[Vec<Option<usize>>] {
        &self.samples
    }
}

/// Versioned on-disk form: parameters plus the realized site subsets; hulls
/// rebuild deterministically on load.
#[derive(Serialize, Deserialize)]
pub struct MCIndexFile {
    pub format_version: u32,
    pub dimension: usize,
    pub total_sites: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub seed: u64,
    pub samples: Vec<Vec<Option<usize>>>,
}

pub const MC_INDEX_FORMAT_VERSION: u32 = 1;

impl MCIndex {
    pub fn to_file(&self, total_sites: usize) -> MCIndexFile {
        MCIndexFile {
            format_version: MC_INDEX_FORMAT_VERSION,
            dimension: self.dimension,
            total_sites,
            epsilon: self.epsilon,
            delta: self.delta,
            seed: self.seed,
            samples: self.samples.clone(),
        }
    }

    pub fn from_file(file: MCIndexFile, model: &UncertainPointSet) -> Result<MCIndex> {
        if file.format_version != MC_INDEX_FORMAT_VERSION {
            return Err(Error::Serde(format!(
                "unsupported index format version {}",
                file.format_version
            )));
        }
        if file.dimension != model.dimension || file.total_sites != model.total_sites() {
            return Err(Error::Serde(
                "index file does not match the model".into(),
            ));
        }
        let hulls = file
            .samples
            .iter()
            .map(|chosen| build_hull(model, chosen))
            .collect();
        Ok(MCIndex {
            dimension: file.dimension,
            epsilon: file.epsilon,
            delta: file.delta,
            seed: file.seed,
            sample_count: file.samples.len(),
            samples: file.samples,
            hulls,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{brute_force_membership, DEFAULT_OUTCOME_CAP};
    use crate::scalar::parse_decimal;

    fn half() -> Rat {
        parse_decimal("0.5").unwrap()
    }

    fn triangle_model() -> UncertainPointSet {
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
    fn sample_count_matches_pinned_formula() {
        // (4 ln 3 + ln 4) / (2 * 0.25) = 11.56 -> 12.
        assert_eq!(sample_count(3, 2, 0.5, 0.5), 12);
        // Criterion-scale check: n=20, eps=0.1, delta=0.05.
        assert_eq!(sample_count(20, 2, 0.1, 0.05), 784);
    }

    #[test]
    fn deterministic_across_builds() {
        let m = triangle_model();
        let a = build_mc_index(&m, 0.2, 0.2, 42).unwrap();
        let b = build_mc_index(&m, 0.2, 0.2, 42).unwrap();
        assert_eq!(a.samples(), b.samples());
        let q = Point::from_i64(&[0, 0]);
        assert_eq!(a.hits(&q).unwrap(), b.hits(&q).unwrap());
        let c = build_mc_index(&m, 0.2, 0.2, 43).unwrap();
        assert!(a.samples() != c.samples() || a.seed != c.seed);
    }

    #[test]
    fn certain_model_gives_exact_answers() {
        let m = UncertainPointSet::unipoint(
            2,
            vec![
                (Point::from_i64(&[0, 10]), Rat::one()),
                (Point::from_i64(&[-10, -5]), Rat::one()),
                (Point::from_i64(&[10, -5]), Rat::one()),
            ],
        );
        let idx = build_mc_index(&m, 0.3, 0.3, 7).unwrap();
        assert_eq!(idx.query(&Point::from_i64(&[0, 0])).unwrap(), 1.0);
        assert_eq!(idx.query(&Point::from_i64(&[100, 100])).unwrap(), 0.0);
    }

    #[test]
    fn estimate_close_to_exact_on_triangle() {
        let m = triangle_model();
        let idx = build_mc_index(&m, 0.05, 0.01, 1234).unwrap();
        let q = Point::from_i64(&[0, 0]);
        let exact = brute_force_membership(&q, &m, DEFAULT_OUTCOME_CAP).unwrap();
        let exact = crate::scalar::rat_to_f64(&exact);
        let est = idx.query(&q).unwrap();
        assert!(
            (est - exact).abs() <= 0.05,
            "estimate {est} too far from {exact}"
        );
    }

    #[test]
    fn estimates_live_on_the_sample_grid() {
        let m = triangle_model();
        let idx = build_mc_index(&m, 0.4, 0.4, 5).unwrap();
        let q = Point::from_i64(&[3, 2]);
        let est = idx.query_exact(&q).unwrap();
        assert!(est >= Rat::zero() && est <= Rat::one());
        assert_eq!(est.denom().to_u128().unwrap() as usize % idx.sample_count, 0);
    }

    #[test]
    fn d3_hulls_agree_with_exact_membership() {
        let m = UncertainPointSet::unipoint(
            3,
            vec![
                (Point::from_i64(&[1, 0, -7]), parse_decimal("0.6").unwrap()),
                (Point::from_i64(&[9, 1, 4]), parse_decimal("0.7").unwrap()),
                (Point::from_i64(&[-6, 7, 3]), parse_decimal("0.8").unwrap()),
                (Point::from_i64(&[-2, -9, 5]), parse_decimal("0.9").unwrap()),
                (Point::from_i64(&[4, -5, 8]), parse_decimal("0.5").unwrap()),
            ],
        );
        let idx = build_mc_index(&m, 0.3, 0.3, 99).unwrap();
        // Spot-check each sampled hull against the exact membership test.
        let queries = [
            Point::from_i64(&[0, 0, 0]),
            Point::from_i64(&[2, 1, 3]),
            Point::from_i64(&[50, 0, 0]),
        ];
        for q in &queries {
            let mut manual = 0usize;
            for chosen in idx.samples() {
                let pts: Vec<Point> = chosen
                    .iter()
                    .enumerate()
                    .filter_map(|(gi, c)| c.map(|si| m.groups[gi].sites[si].point.clone()))
                    .collect();
                if point_in_hull(q, &pts, 3).unwrap() != Location::Outside {
                    manual += 1;
                }
            }
            assert_eq!(idx.hits(q).unwrap(), manual);
        }
    }

    #[test]
    fn file_round_trip_preserves_samples() {
        let m = triangle_model();
        let idx = build_mc_index(&m, 0.2, 0.1, 77).unwrap();
        let file = idx.to_file(m.total_sites());
        let json = serde_json::to_string(&file).unwrap();
        let back: MCIndexFile = serde_json::from_str(&json).unwrap();
        let idx2 = MCIndex::from_file(back, &m).unwrap();
        assert_eq!(idx.samples(), idx2.samples());
        let q = Point::from_i64(&[1, 1]);
        assert_eq!(idx.hits(&q).unwrap(), idx2.hits(&q).unwrap());
    }

    #[test]
    fn invalid_parameters_rejected() {
        let m = triangle_model();
        assert!(build_mc_index(&m, 0.0, 0.5, 1).is_err());
        assert!(build_mc_index(&m, 0.5, 1.0, 1).is_err());
    }
}
