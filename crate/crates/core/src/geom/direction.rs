//! Exact angular comparison of direction vectors.
//!
//! A direction is a nonzero vector stored as scaled integers (sign-preserving
//! positive scaling), compared counter-clockwise starting from the positive
//! x-axis. Small vectors get an i64 fast path.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::scalar::{clear_denominators, Rat};

#[derive(Debug, Clone)]
pub struct Dir {
    pub x: BigInt,
    pub y: BigInt,
    small: Option<(i64, i64)>,
}

impl Dir {
    /// Builds a direction from exact rational components, clearing
    /// denominators. Returns `None` for the zero vector.
    pub fn from_rat(dx: &Rat, dy: &Rat) -> Option<Dir> {
        if dx.is_zero() && dy.is_zero() {
            return None;
        }
        let (scaled, _) = clear_denominators(&[dx.clone(), dy.clone()]);
        Some(Dir::from_big(scaled[0].clone(), scaled[1].clone()))
    }

    pub fn from_big(x: BigInt, y: BigInt) -> Dir {
        use num_traits::ToPrimitive;
        const LIM: i64 = 1 << 62;
        let small = match (x.to_i64(), y.to_i64()) {
            (Some(a), Some(b)) if a.abs() < LIM && b.abs() < LIM => Some((a, b)),
            _ => None,
        };
        Dir { x, y, small }
    }

    /// Half-plane class: 0 for angle in [0, pi), 1 for [pi, 2pi).
    /// The positive x-axis is in class 0; the negative x-axis in class 1.
    pub fn half(&self) -> u8 {
        let ys = sign_big(&self.y);
        if ys > 0 || (ys == 0 && self.x.is_positive()) {
            0
        } else {
            1
        }
    }

    /// Sign of the cross product `self x other`.
    pub fn cross_sign(&self, other: &Dir) -> i32 {
        if let (Some((ax, ay)), Some((bx, by))) = (self.small, other.small) {
            let c = (ax as i128) * (by as i128) - (ay as i128) * (bx as i128);
            return c.signum() as i32;
        }
        let c = &self.x * &other.y - &self.y * &other.x;
        sign_big(&c)
    }

    /// Sign of the dot product.
    pub fn dot_sign(&self, other: &Dir) -> i32 {
        if let (Some((ax, ay)), Some((bx, by))) = (self.small, other.small) {
            let d = (ax as i128) * (bx as i128) + (ay as i128) * (by as i128);
            return d.signum() as i32;
        }
        let d = &self.x * &other.x + &self.y * &other.y;
        sign_big(&d)
    }

    /// CCW angular order from the positive x-axis; directions that differ by
    /// a positive scale compare equal.
    pub fn angle_cmp(&self, other: &Dir) -> Ordering {
        match self.half().cmp(&other.half()) {
            Ordering::Equal => match self.cross_sign(other) {
                1 => Ordering::Less,
                -1 => Ordering::Greater,
                _ => {
                    // Same or opposite direction; same half-plane means same.
                    Ordering::Equal
                }
            },
            ord => ord,
        }
    }

    /// True if the two directions are positive multiples of each other.
    pub fn same_ray(&self, other: &Dir) -> bool {
        self.cross_sign(other) == 0 && self.dot_sign(other) > 0
    }

    /// True if exactly opposite.
    pub fn opposite_ray(&self, other: &Dir) -> bool {
        self.cross_sign(other) == 0 && self.dot_sign(other) < 0
    }

    pub fn negate(&self) -> Dir {
        Dir::from_big(-&self.x, -&self.y)
    }

    /// Rotation by +90 degrees.
    pub fn rot90(&self) -> Dir {
        Dir::from_big(-&self.y, self.x.clone())
    }
}

fn sign_big(v: &BigInt) -> i32 {
    if v.is_zero() {
        0
    } else if v.is_positive() {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(x: i64, y: i64) -> Dir {
        Dir::from_big(x.into(), y.into())
    }

    #[test]
    fn ccw_order_around_circle() {
        let dirs = [
            d(1, 0),
            d(1, 1),
            d(0, 1),
            d(-1, 1),
            d(-1, 0),
            d(-1, -1),
            d(0, -1),
            d(1, -1),
        ];
        for w in dirs.windows(2) {
            assert_eq!(w[0].angle_cmp(&w[1]), Ordering::Less);
        }
    }

    #[test]
    fn scale_invariance() {
        assert_eq!(d(2, 3).angle_cmp(&d(4, 6)), Ordering::Equal);
        assert!(d(2, 3).same_ray(&d(4, 6)));
        assert!(d(2, 3).opposite_ray(&d(-4, -6)));
    }

    #[test]
    fn rational_directions() {
        let a = Dir::from_rat(
            &crate::scalar::parse_decimal("0.5").unwrap(),
            &crate::scalar::parse_decimal("0.25").unwrap(),
        )
        .unwrap();
        assert!(a.same_ray(&d(2, 1)));
        assert!(Dir::from_rat(&Rat::zero(), &Rat::zero()).is_none());
    }
}
