use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::fiber::Fiber;
use super::track::{Piece, Track, TrackPermuton};
use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::rational::{self, q, qi, Rational};

/// The permuton representation of a finite permutation.
///
/// Two views of the same cells are used. Rectangle masses (and hence all
/// distances) use the uniform band measure `n·λ²` on the cells
/// `[(i-1)/n, i/n) × [(π(i)-1)/n, π(i)/n)`. Fibers and sampling use the
/// increasing diagonal of each cell, a genuine permuton whose fiber is a
/// single atom; at a cell's midpoint that atom sits at the cell's vertical
/// midpoint `(π(i) - 1/2)/n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepPermuton {
    perm: Permutation,
}

impl StepPermuton {
    pub fn new(perm: Permutation) -> Self {
        StepPermuton { perm }
    }

    pub fn perm(&self) -> &Permutation {
        &self.perm
    }

    pub fn order(&self) -> usize {
        self.perm.order()
    }

    /// Column containing `x` (1-based); interior grid lines are boundaries.
    pub fn cell_of(&self, x: &Rational) -> Result<usize> {
        if !rational::in_unit_interval(x) {
            return Err(Error::OutOfUnitInterval(x.clone()));
        }
        let n = self.order();
        let scaled = x * Rational::from_integer(BigInt::from(n));
        let floor = scaled.floor().to_integer().to_usize().unwrap_or(n);
        if scaled.is_integer() && floor > 0 && floor < n {
            return Err(Error::Boundary(x.clone()));
        }
        Ok((floor + 1).min(n))
    }

    pub fn fiber_at(&self, x: &Rational) -> Result<Fiber> {
        let i = self.cell_of(x)?;
        let n = self.order() as i64;
        let y = x + q(self.perm.at(i) as i64 - i as i64, n);
        Fiber::dirac(y)
    }

    /// The diagonal-in-cell view as a track model with `n` pieces.
    pub fn to_tracks(&self) -> TrackPermuton {
        let n = self.order() as i64;
        let pieces = (1..=n)
            .map(|i| Piece {
                x_lo: q(i - 1, n),
                x_hi: q(i, n),
                tracks: vec![Track::new(qi(1), q(self.perm.at(i as usize) as i64 - i, n), qi(1))],
            })
            .collect();
        TrackPermuton::new(pieces).expect("cell diagonals form a valid track model")
    }

    /// Band-measure mass of `[x0,x1] × [y0,y1]`.
    pub fn rect_mass(&self, x0: &Rational, x1: &Rational, y0: &Rational, y1: &Rational) -> Rational {
        let n = self.order() as i64;
        let overlap = |lo: &Rational, hi: &Rational, c: i64| -> Rational {
            let a = lo.max(&q(c - 1, n)).clone();
            let b = hi.min(&q(c, n)).clone();
            if a < b {
                b - a
            } else {
                Rational::zero()
            }
        };
        let mut total = Rational::zero();
        for i in 1..=n {
            let ox = overlap(x0, x1, i);
            if ox.is_zero() {
                continue;
            }
            let oy = overlap(y0, y1, self.perm.at(i as usize) as i64);
            total += ox * oy;
        }
        total * qi(n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn step(v: &[usize]) -> StepPermuton {
        StepPermuton::new(Permutation::new(v.to_vec()).unwrap())
    }

    #[test]
    fn fibers() {
        let s = step(&[1]);
        for x in [q(1, 7), q(1, 2), q(9, 10)] {
            let f = s.fiber_at(&x).unwrap();
            assert_eq!(f.len(), 1);
            assert!(f.is_probability());
        }
        let s = step(&[2, 1]);
        let y = s.fiber_at(&q(1, 4)).unwrap().atoms()[0].y.clone();
        assert!(y >= q(1, 2) && y < qi(1));
        let y = s.fiber_at(&q(9, 10)).unwrap().atoms()[0].y.clone();
        assert!(y >= qi(0) && y < q(1, 2));
        assert_eq!(s.fiber_at(&q(1, 2)), Err(Error::Boundary(q(1, 2))));
    }

    #[test]
    fn midpoint_atoms_sit_at_cell_centres() {
        let s = step(&[3, 1, 4, 2]);
        for i in 1..=4i64 {
            let y = s.fiber_at(&q(2 * i - 1, 8)).unwrap().atoms()[0].y.clone();
            assert_eq!(y, q(2 * s.perm().at(i as usize) as i64 - 1, 8));
        }
    }

    #[test]
    fn tracks_view_is_a_permuton() {
        let s = step(&[3, 1, 4, 2]);
        let t = s.to_tracks();
        assert!(t.validate_marginals().y_ok);
        assert_eq!(t.fiber_at(&q(1, 3)).unwrap(), s.fiber_at(&q(1, 3)).unwrap());
    }

    #[test]
    fn band_masses() {
        let s = step(&[2, 1]);
        assert_eq!(s.rect_mass(&qi(0), &q(1, 2), &qi(0), &q(1, 2)), qi(0));
        assert_eq!(s.rect_mass(&qi(0), &q(1, 2), &q(1, 2), &qi(1)), q(1, 2));
        assert_eq!(s.rect_mass(&qi(0), &q(1, 4), &q(1, 2), &q(3, 4)), q(1, 8));
        assert_eq!(s.rect_mass(&qi(0), &qi(1), &qi(0), &qi(1)), qi(1));
    }
}
