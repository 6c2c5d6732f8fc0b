//! Exact orientation predicates.
//!
//! Signs come from integer determinants after clearing denominators per
//! point; an `i128` path handles small inputs and overflows fall back to
//! big-integer arithmetic. No epsilons anywhere.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::geom::point::Point;
use crate::scalar::bigint_sign;

/// Sign of the 2x2 determinant of (b-a, c-a): +1 for counter-clockwise,
/// -1 for clockwise, 0 for collinear.
pub fn orient2d(a: &Point, b: &Point, c: &Point) -> i32 {
    debug_assert!(a.dim() == 2 && b.dim() == 2 && c.dim() == 2);
    if let (Some(ra), Some(rb), Some(rc)) =
        (a.hom_row_small(), b.hom_row_small(), c.hom_row_small())
    {
        if let Some(s) = det3_sign_i64(ra, rb, rc) {
            return s;
        }
    }
    let rows = [a.hom_row_big(), b.hom_row_big(), c.hom_row_big()];
    bigint_sign(&det_big(&rows))
}

/// Determinant sign of the homogeneous 3x3 built from i64 rows, via i128.
/// Returns None on potential overflow.
fn det3_sign_i64(a: &[i64], b: &[i64], c: &[i64]) -> Option<i32> {
    // |x| up to 2^40 keeps every 3-term product inside i128 comfortably.
    const LIM: i64 = 1 << 40;
    for r in [a, b, c] {
        if r.iter().any(|v| v.abs() >= LIM) {
            return None;
        }
    }
    let (a0, a1, a2) = (a[0] as i128, a[1] as i128, a[2] as i128);
    let (b0, b1, b2) = (b[0] as i128, b[1] as i128, b[2] as i128);
    let (c0, c1, c2) = (c[0] as i128, c[1] as i128, c[2] as i128);
    let det = a0 * (b1 * c2 - b2 * c1) - a1 * (b0 * c2 - b2 * c0) + a2 * (b0 * c1 - b1 * c0);
    Some(det.signum() as i32)
}

/// Sign of the (d+1)x(d+1) homogeneous determinant of a (d+1)-point simplex
/// in `R^d`. Positive simplexes are the counter-clockwise generalization
/// (unit simplex e.g. (0,0,0),(1,0,0),(0,1,0),(0,0,1) gives +1).
pub fn orient_d(simplex: &[Point]) -> Result<i32> {
    let d = simplex
        .first()
        .ok_or_else(|| Error::InvalidParameter("empty simplex".into()))?
        .dim();
    if simplex.len() != d + 1 {
        return Err(Error::InvalidParameter(format!(
            "orient_d needs {} points in R^{d}, got {}",
            d + 1,
            simplex.len()
        )));
    }
    for p in simplex {
        p.check_dim(d)?;
    }
    if d == 2 {
        return Ok(orient2d(&simplex[0], &simplex[1], &simplex[2]));
    }
    // The homogeneous rows carry the scale in the LAST column; moving it to
    // the front (the orientation convention) costs a factor (-1)^d.
    let flip = if d % 2 == 1 { -1 } else { 1 };
    if let Some(s) = orient_d_small(simplex, d) {
        return Ok(s * flip);
    }
    let rows: Vec<Vec<BigInt>> = simplex.iter().map(|p| p.hom_row_big()).collect();
    Ok(bigint_sign(&det_big(&rows)) * flip)
}

fn orient_d_small(simplex: &[Point], d: usize) -> Option<i32> {
    if d > 4 {
        return None;
    }
    // 5-term products must stay inside i128: cap entries at 2^24.
    const LIM: i64 = 1 << 24;
    let mut rows: Vec<&[i64]> = Vec::with_capacity(d + 1);
    for p in simplex {
        let r = p.hom_row_small()?;
        if r.iter().any(|v| v.abs() >= LIM) {
            return None;
        }
        rows.push(r);
    }
    let m: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&v| v as i128).collect())
        .collect();
    Some(det_i128(m).signum() as i32)
}

/// Cofactor-expansion determinant over i128; only used for tiny matrices.
fn det_i128(m: Vec<Vec<i128>>) -> i128 {
    let n = m.len();
    if n == 1 {
        return m[0][0];
    }
    if n == 2 {
        return m[0][0] * m[1][1] - m[0][1] * m[1][0];
    }
    let mut det = 0i128;
    for j in 0..n {
        if m[0][j] == 0 {
            continue;
        }
        let minor: Vec<Vec<i128>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(k, _)| *k != j)
                    .map(|(_, &v)| v)
                    .collect()
            })
            .collect();
        let term = m[0][j] * det_i128(minor);
        if j % 2 == 0 {
            det += term;
        } else {
            det -= term;
        }
    }
    det
}

/// Exact determinant over BigInt (Bareiss fraction-free elimination).
pub fn det_big(rows: &[Vec<BigInt>]) -> BigInt {
    let n = rows.len();
    let mut m: Vec<Vec<BigInt>> = rows.to_vec();
    let mut sign = 1i32;
    let mut prev = BigInt::from(1);
    for k in 0..n {
        if m[k][k].is_zero() {
            let swap = (k + 1..n).find(|&r| !m[r][k].is_zero());
            match swap {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = num / &prev;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    if sign < 0 {
        -m[n - 1][n - 1].clone()
    } else {
        m[n - 1][n - 1].clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p2(x: i64, y: i64) -> Point {
        Point::from_i64(&[x, y])
    }

    #[test]
    fn orient2d_fixed_cases() {
        assert_eq!(orient2d(&p2(0, 0), &p2(1, 0), &p2(0, 1)), 1);
        assert_eq!(orient2d(&p2(0, 0), &p2(1, 1), &p2(2, 2)), 0);
        assert_eq!(orient2d(&p2(0, 0), &p2(0, 1), &p2(1, 0)), -1);
    }

    #[test]
    fn orient2d_rational_inputs() {
        let a = Point::from_decimals(&["0.1", "0.1"]).unwrap();
        let b = Point::from_decimals(&["0.3", "0.3"]).unwrap();
        let c = Point::from_decimals(&["0.2", "0.2"]).unwrap();
        assert_eq!(orient2d(&a, &b, &c), 0);
    }

    #[test]
    fn orient3d_unit_tetrahedron() {
        let t = [
            Point::from_i64(&[0, 0, 0]),
            Point::from_i64(&[1, 0, 0]),
            Point::from_i64(&[0, 1, 0]),
            Point::from_i64(&[0, 0, 1]),
        ];
        assert_eq!(orient_d(&t).unwrap(), 1);
        let mut swapped = t.clone();
        swapped.swap(0, 1);
        assert_eq!(orient_d(&swapped).unwrap(), -1);
    }

    #[test]
    fn orient3d_coplanar() {
        let t = [
            Point::from_i64(&[0, 0, 0]),
            Point::from_i64(&[1, 0, 0]),
            Point::from_i64(&[0, 1, 0]),
            Point::from_i64(&[1, 1, 0]),
        ];
        assert_eq!(orient_d(&t).unwrap(), 0);
    }

    #[test]
    fn orient_d_dimension_mismatch() {
        let t = [
            Point::from_i64(&[0, 0, 0]),
            Point::from_i64(&[1, 0]),
            Point::from_i64(&[0, 1, 0]),
            Point::from_i64(&[0, 0, 1]),
        ];
        assert!(orient_d(&t).is_err());
    }

    #[test]
    fn big_fallback_matches_small_path() {
        // Values beyond the i64 cache force the BigInt route.
        let big = "123456789123456789123.5";
        let a = Point::from_decimals(&[big, "0"]).unwrap();
        assert!(a.hom_row_small().is_none());
        let b = Point::from_i64(&[0, 1]);
        let c = Point::from_i64(&[0, 2]);
        assert_eq!(orient2d(&a, &b, &c), orient2d(&p2(1, 0), &b, &c));
    }

    proptest! {
        #[test]
        fn orient2d_antisymmetric(ax in -50i64..50, ay in -50i64..50,
                                  bx in -50i64..50, by in -50i64..50,
                                  cx in -50i64..50, cy in -50i64..50) {
            let (a, b, c) = (p2(ax, ay), p2(bx, by), p2(cx, cy));
            prop_assert_eq!(orient2d(&a, &b, &c), -orient2d(&b, &a, &c));
            prop_assert_eq!(orient2d(&a, &b, &c), orient2d(&b, &c, &a));
        }

        #[test]
        fn orient3d_antisymmetric(coords in proptest::collection::vec(-20i64..20, 12)) {
            let pts: Vec<Point> = coords.chunks(3).map(Point::from_i64).collect();
            let s = orient_d(&pts).unwrap();
            let mut swapped = pts.clone();
            swapped.swap(1, 2);
            prop_assert_eq!(s, -orient_d(&swapped).unwrap());
        }

        #[test]
        fn det_zero_iff_degenerate_2d(ax in -8i64..8, ay in -8i64..8,
                                      bx in -8i64..8, by in -8i64..8,
                                      t in -4i64..4) {
            // c on line ab => collinear.
            let a = p2(ax, ay);
            let b = p2(bx, by);
            let c = p2(ax + t * (bx - ax), ay + t * (by - ay));
            prop_assert_eq!(orient2d(&a, &b, &c), 0);
        }
    }
}
