//! The standard point-line duality: the dual of a point `p = (a, b)` is the
//! line `p*: y = a x - b`, and the dual of a line `y = m x + c` is the point
//! `(m, -c)`. Above/below/on relations are preserved both ways.

use crate::geom::point::Point;
use crate::scalar::Rat;

/// A non-vertical line `y = m x - c` in the dual plane.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualLine {
    pub slope: Rat,
    /// The line is `y = slope * x - shift`.
    pub shift: Rat,
}

impl DualLine {
    /// Dual of a primal point.
    pub fn of_point(p: &Point) -> DualLine {
        DualLine {
            slope: p.x().clone(),
            shift: p.y().clone(),
        }
    }

    /// Primal line `y = m x + c` as a dual point `(m, -c)`.
    pub fn line_to_point(m: &Rat, c: &Rat) -> Point {
        Point::new(vec![m.clone(), -c.clone()])
    }

    /// This dual line, as a primal point again (involution).
    pub fn to_point(&self) -> Point {
        Point::new(vec![self.slope.clone(), self.shift.clone()])
    }

    pub fn y_at(&self, x: &Rat) -> Rat {
        &self.slope * x - &self.shift
    }

    /// Sign of `q_y - y_at(q_x)`: +1 above, 0 on, -1 below.
    pub fn side_of(&self, q: &Point) -> i32 {
        let diff = q.y() - self.y_at(q.x());
        if diff.is_zero() {
            0
        } else if diff > Rat::zero() {
            1
        } else {
            -1
        }
    }

    /// x-coordinate of the crossing with another dual line (None if
    /// parallel).
    pub fn intersect_x(&self, other: &DualLine) -> Option<Rat> {
        let dm = &self.slope - &other.slope;
        if dm.is_zero() {
            return None;
        }
        Some((&self.shift - &other.shift) / dm)
    }
}

use num_traits::Zero;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::parse_decimal;

    #[test]
    fn duality_preserves_sidedness() {
        // p above line l iff l* above p*.
        let p = Point::from_i64(&[2, 5]);
        let (m, c) = (parse_decimal("1").unwrap(), parse_decimal("2").unwrap());
        // l: y = x + 2; p = (2,5): y_l(2) = 4 < 5, p above.
        let l_star = DualLine::line_to_point(&m, &c); // (1, -2)
        let p_star = DualLine::of_point(&p); // y = 2x - 5
        // l* above p*: p_star.side_of(l_star) should be +1.
        assert_eq!(p_star.side_of(&l_star), 1);
    }

    #[test]
    fn crossing_x_is_exact() {
        let a = DualLine::of_point(&Point::from_i64(&[1, 0])); // y = x
        let b = DualLine::of_point(&Point::from_i64(&[3, 1])); // y = 3x - 1
        assert_eq!(a.intersect_x(&b).unwrap(), parse_decimal("0.5").unwrap());
        assert!(a.intersect_x(&a).is_none());
    }
}
