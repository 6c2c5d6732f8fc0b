//! Points with exact rational coordinates.

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::scalar::{clear_denominators, parse_decimal, Rat};

/// A point in `R^d` with exact rational coordinates.
///
/// Alongside the rationals we cache a homogeneous integer row
/// `(x_1*s, ..., x_d*s, s)` with `s > 0` the common denominator, when every
/// entry fits in `i64`. Determinant-sign predicates scale each point's row
/// independently, so the per-point scaling never affects a sign.
#[derive(Debug, Clone)]
pub struct Point {
    coords: Vec<Rat>,
    hom: Option<Vec<i64>>,
}

impl PartialEq for Point {
    fn eq(&self, other: &Self) -> bool {
        self.coords == other.coords
    }
}
impl Eq for Point {}

impl Point {
    pub fn new(coords: Vec<Rat>) -> Self {
        let hom = Self::integer_row(&coords);
        Point { coords, hom }
    }

    pub fn from_decimals(strs: &[&str]) -> Result<Self> {
        let coords = strs
            .iter()
            .map(|s| parse_decimal(s))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(coords))
    }

    pub fn from_i64(vals: &[i64]) -> Self {
        Self::new(vals.iter().map(|&v| crate::scalar::rat_from_i64(v)).collect())
    }

    fn integer_row(coords: &[Rat]) -> Option<Vec<i64>> {
        let (nums, lcm) = clear_denominators(coords);
        let mut row = Vec::with_capacity(coords.len() + 1);
        for n in &nums {
            row.push(n.to_i64()?);
        }
        row.push(lcm.to_i64()?);
        Some(row)
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Rat] {
        &self.coords
    }

    pub fn coord(&self, i: usize) -> &Rat {
        &self.coords[i]
    }

    pub fn x(&self) -> &Rat {
        &self.coords[0]
    }

    pub fn y(&self) -> &Rat {
        &self.coords[1]
    }

    /// Homogeneous row as big integers: `(x_1*s, ..., x_d*s, s)`, `s > 0`.
    pub fn hom_row_big(&self) -> Vec<BigInt> {
        if let Some(h) = &self.hom {
            return h.iter().map(|&v| BigInt::from(v)).collect();
        }
        let (mut nums, lcm) = clear_denominators(&self.coords);
        nums.push(lcm);
        nums
    }

    /// Homogeneous row in `i64` when it fits.
    pub fn hom_row_small(&self) -> Option<&[i64]> {
        self.hom.as_deref()
    }

    /// Drops the last coordinate (projection onto the first `d-1` axes).
    pub fn project_drop_last(&self) -> Point {
        Point::new(self.coords[..self.coords.len() - 1].to_vec())
    }

    /// Keeps the first `k` coordinates.
    pub fn project_prefix(&self, k: usize) -> Point {
        Point::new(self.coords[..k].to_vec())
    }

    pub fn check_dim(&self, expected: usize) -> Result<()> {
        if self.dim() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: self.dim(),
            });
        }
        Ok(())
    }
}

impl std::fmt::Display for Point {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", crate::scalar::format_rat(c))?;
        }
        write!(f, ")")
    }
}
