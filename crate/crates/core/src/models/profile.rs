use rayon::prelude::*;
use serde::Serialize;

use super::fiber::{lp_distance, Fiber};
use super::track::TrackPermuton;
use crate::error::{Error, Result};
use crate::rational::{self, q, Rational};

/// Pairwise Lévy–Prokhorov distances of fibers over a grid of midpoints.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LpProfile {
    #[serde(with = "rational::serde_str_vec")]
    pub midpoints: Vec<Rational>,
    pub matrix: Vec<Vec<String>>,
    #[serde(skip)]
    pub distances: Vec<Vec<Rational>>,
    /// Coarsest split of the grid into runs of consecutive cells whose
    /// fibers are pairwise closer than `delta`, as half-open index ranges.
    pub parts: Vec<(usize, usize)>,
}

/// Fibers at the midpoints `(i - 1/2)/grid_count`. A midpoint on a piece
/// boundary takes the fiber of the piece on its left.
pub fn fiber_lp_profile(model: &TrackPermuton, grid_count: usize, delta: &Rational) -> Result<LpProfile> {
    if grid_count < 2 {
        return Err(Error::InvalidParameter("grid_count must be at least 2".into()));
    }
    let g = grid_count as i64;
    let midpoints: Vec<Rational> = (1..=g).map(|i| q(2 * i - 1, 2 * g)).collect();
    let fibers: Vec<Fiber> = midpoints
        .iter()
        .map(|x| model.fiber_at_left(x))
        .collect::<Result<_>>()?;
    let distances: Vec<Vec<Rational>> = (0..grid_count)
        .into_par_iter()
        .map(|i| {
            (0..grid_count)
                .map(|j| lp_distance(&fibers[i], &fibers[j]))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let mut parts = Vec::new();
    let mut start = 0;
    for j in 1..=grid_count {
        let fits = j < grid_count && (start..j).all(|i| distances[i][j] < *delta);
        if !fits {
            parts.push((start, j));
            start = j;
        }
    }
    let matrix = distances
        .iter()
        .map(|row| row.iter().map(rational::format_rational).collect())
        .collect();
    Ok(LpProfile {
        midpoints,
        matrix,
        distances,
        parts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::build_zigzag;
    use crate::perm::Permutation;
    use num_traits::{Signed, Zero};

    #[test]
    fn identity_grid() {
        let p = fiber_lp_profile(&TrackPermuton::identity(), 4, &q(3, 10)).unwrap();
        for i in 0..4 {
            assert!(p.distances[i][i].is_zero());
            for j in 0..4 {
                let expect = (&p.midpoints[i] - &p.midpoints[j]).abs();
                assert_eq!(p.distances[i][j], expect);
            }
        }
        // midpoints 1/8, 3/8, 5/8, 7/8 are 1/4 apart: pairs only
        assert_eq!(p.parts, vec![(0, 2), (2, 4)]);
    }

    #[test]
    fn stripes_shift_by_half_the_step() {
        let t = build_zigzag(&Permutation::identity(3)).unwrap().transpose().unwrap();
        let p = fiber_lp_profile(&t, 8, &q(1, 10)).unwrap();
        for i in 0..7 {
            let dx = &p.midpoints[i + 1] - &p.midpoints[i];
            assert_eq!(p.distances[i][i + 1], dx / Rational::from_integer(2.into()));
        }
    }

    #[test]
    fn boundary_midpoint_uses_left_piece() {
        let z = build_zigzag(&Permutation::identity(3)).unwrap();
        let p = fiber_lp_profile(&z, 3, &q(1, 2)).unwrap();
        assert_eq!(p.midpoints[1], q(1, 2));
        assert!(fiber_lp_profile(&z, 1, &q(1, 2)).is_err());
    }
}
