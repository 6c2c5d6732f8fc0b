//! d-dimensional exact hull membership and supporting linear algebra.
//!
//! `point_in_hull` classifies a query against the closed convex hull of a
//! finite point set in any dimension: containment by Caratheodory simplex
//! enumeration, boundary detection by supporting-hyperplane search. Costs are
//! exponential in d by design; this backs oracles and small-d structures.

use itertools::Itertools;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::geom::point::Point;
use crate::geom::polygon::{point_in_hull_2d, Location};
use crate::geom::predicates::orient_d;
use crate::scalar::Rat;

/// Solves the square system `A x = b` by Gaussian elimination over exact
/// rationals. Returns None when singular.
pub fn solve_linear(a: &[Vec<Rat>], b: &[Rat]) -> Option<Vec<Rat>> {
    let n = a.len();
    let mut m: Vec<Vec<Rat>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, pivot);
        let p = m[col][col].clone();
        for j in col..=n {
            m[col][j] = &m[col][j] / &p;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for j in col..=n {
                    m[r][j] = &m[r][j] - &f * &m[col][j];
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[n].clone()).collect())
}

/// Barycentric coordinates of `q` in the simplex spanned by `verts`
/// (affinely independent, |verts| = k+1 spanning a k-flat that contains q).
/// Returns None if the system is singular or q is off the flat.
pub fn barycentric(q: &Point, verts: &[Point]) -> Option<Vec<Rat>> {
    let d = q.dim();
    let k = verts.len() - 1;
    // Solve sum(l_i * v_i) = q, sum(l_i) = 1 in the least-squares-free way:
    // pick k coordinates making the edge matrix invertible, then verify the
    // remaining coordinates exactly.
    let edges: Vec<Vec<Rat>> = verts[1..]
        .iter()
        .map(|v| {
            (0..d)
                .map(|j| v.coord(j) - verts[0].coord(j))
                .collect::<Vec<_>>()
        })
        .collect();
    let rhs_full: Vec<Rat> = (0..d).map(|j| q.coord(j) - verts[0].coord(j)).collect();
    for combo in (0..d).combinations(k) {
        let a: Vec<Vec<Rat>> = (0..k)
            .map(|i| combo.iter().map(|&j| edges[i][j].clone()).collect())
            .collect();
        // Transpose: unknowns are the k multipliers of edge vectors.
        let at: Vec<Vec<Rat>> = (0..k)
            .map(|r| (0..k).map(|c| a[c][r].clone()).collect())
            .collect();
        let b: Vec<Rat> = combo.iter().map(|&j| rhs_full[j].clone()).collect();
        if let Some(mu) = solve_linear(&at, &b) {
            // Verify on all coordinates (q must lie on the flat).
            for j in 0..d {
                let mut acc = Rat::zero();
                for i in 0..k {
                    acc += &mu[i] * &edges[i][j];
                }
                if acc != rhs_full[j] {
                    return None;
                }
            }
            let mut lambda = Vec::with_capacity(k + 1);
            let sum: Rat = mu.iter().sum();
            lambda.push(Rat::one() - sum);
            lambda.extend(mu);
            return Some(lambda);
        }
    }
    None
}

/// Affine rank of a point set (dimension of its affine hull).
pub fn affine_rank(pts: &[Point]) -> usize {
    if pts.is_empty() {
        return 0;
    }
    let d = pts[0].dim();
    let mut basis: Vec<Vec<Rat>> = Vec::new();
    for p in &pts[1..] {
        let mut v: Vec<Rat> = (0..d).map(|j| p.coord(j) - pts[0].coord(j)).collect();
        // Reduce v against the basis.
        for b in &basis {
            let lead = b.iter().position(|x| !x.is_zero()).unwrap();
            if !v[lead].is_zero() {
                let f = &v[lead] / &b[lead];
                for j in 0..d {
                    v[j] = &v[j] - &f * &b[j];
                }
            }
        }
        if v.iter().any(|x| !x.is_zero()) {
            basis.push(v);
        }
    }
    basis.len()
}

/// Closed membership of `q` in the simplex `verts` (affinely independent).
/// Inside means strictly positive barycentrics; any zero coordinate with the
/// rest nonnegative is Boundary.
pub fn locate_in_simplex(q: &Point, verts: &[Point]) -> Location {
    match barycentric(q, verts) {
        None => Location::Outside,
        Some(l) => {
            if l.iter().any(|x| x.is_negative()) {
                Location::Outside
            } else if l.iter().any(|x| x.is_zero()) {
                Location::Boundary
            } else {
                Location::Inside
            }
        }
    }
}

/// Exact classification of `q` against the closed hull of `sites` in `R^d`.
///
/// d = 2 routes to the polygon test. For d >= 3: containment via
/// Caratheodory (some affinely independent subset of <= d+1 sites spans a
/// simplex containing q), then boundary via supporting hyperplanes. The
/// boundary search over (d-1)-subsets is complete under general position.
pub fn point_in_hull(q: &Point, sites: &[Point], d: usize) -> Result<Location> {
    q.check_dim(d)?;
    for s in sites {
        s.check_dim(d)?;
    }
    if d == 2 {
        return Ok(point_in_hull_2d(q, sites));
    }
    if sites.is_empty() {
        return Ok(Location::Outside);
    }

    let mut contained = false;
    'outer: for size in 1..=(d + 1).min(sites.len()) {
        for combo in sites.iter().combinations(size) {
            let verts: Vec<Point> = combo.into_iter().cloned().collect();
            if affine_rank(&verts) != size - 1 {
                continue;
            }
            if locate_in_simplex(q, &verts) != Location::Outside {
                contained = true;
                break 'outer;
            }
        }
    }
    if !contained {
        return Ok(Location::Outside);
    }

    // q is in the hull; decide boundary vs interior.
    if affine_rank(sites) < d {
        // Flat hull: no interior in R^d.
        return Ok(Location::Boundary);
    }
    // Supporting hyperplane through q and d-1 sites with all sites weakly on
    // one side => q lies on a face.
    for combo in sites.iter().combinations(d - 1) {
        let mut flat: Vec<Point> = combo.into_iter().cloned().collect();
        flat.push(q.clone());
        if affine_rank(&flat) != d - 1 {
            continue;
        }
        let mut pos = false;
        let mut neg = false;
        for s in sites {
            let mut simplex = flat.clone();
            simplex.push(s.clone());
            // Complete the hyperplane test: sign of the homogeneous det of
            // flat + s. flat has d points spanning a (d-1)-flat.
            match orient_sign_vs_flat(&flat, s)? {
                1 => pos = true,
                -1 => neg = true,
                _ => {}
            }
            if pos && neg {
                break;
            }
        }
        if !(pos && neg) {
            return Ok(Location::Boundary);
        }
    }
    Ok(Location::Inside)
}

/// Sign of `s` against the hyperplane spanned by `flat` (d affinely
/// independent points in R^d).
fn orient_sign_vs_flat(flat: &[Point], s: &Point) -> Result<i32> {
    let mut simplex: Vec<Point> = flat.to_vec();
    simplex.push(s.clone());
    orient_d(&simplex)
}

/// General-position report: the offending tuple and projection, if any.
#[derive(Debug, Clone)]
pub struct PositionViolation {
    /// 1-based into sites, or 0 for the query point.
    pub point_indices: Vec<usize>,
    /// Number of leading coordinates in the projection.
    pub projection_k: usize,
}

/// Checks that no k+1 of `sites (+ q)` are affinely degenerate when
/// projected onto the first k coordinates, for every k in 2..=d.
/// Exhaustive, so only suitable for small inputs.
pub fn general_position_check(
    sites: &[Point],
    q: Option<&Point>,
    d: usize,
) -> Result<Option<PositionViolation>> {
    let mut pts: Vec<(usize, Point)> = Vec::new();
    if let Some(q) = q {
        q.check_dim(d)?;
        pts.push((0, q.clone()));
    }
    for (i, s) in sites.iter().enumerate() {
        s.check_dim(d)?;
        pts.push((i + 1, s.clone()));
    }
    for k in 2..=d {
        let projected: Vec<(usize, Point)> = pts
            .iter()
            .map(|(i, p)| (*i, p.project_prefix(k)))
            .collect();
        for combo in projected.iter().combinations(k + 1) {
            let simplex: Vec<Point> = combo.iter().map(|(_, p)| p.clone()).collect();
            if orient_d(&simplex)? == 0 {
                return Ok(Some(PositionViolation {
                    point_indices: combo.iter().map(|(i, _)| *i).collect(),
                    projection_k: k,
                }));
            }
        }
    }
    Ok(None)
}

/// Convenience wrapper that turns a violation into a `Degenerate` error.
pub fn require_general_position(sites: &[Point], q: Option<&Point>, d: usize) -> Result<()> {
    match general_position_check(sites, q, d)? {
        None => Ok(()),
        Some(v) => Err(Error::Degenerate(format!(
            "points {:?} degenerate under first-{} projection",
            v.point_indices, v.projection_k
        ))),
    }
}
