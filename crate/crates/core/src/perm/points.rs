use std::cmp::Ordering;

use super::Permutation;
use crate::error::{Error, Result};

/// Points with strictly increasing `x` and pairwise distinct `y`.
#[derive(Clone, Debug, PartialEq)]
pub struct PointConfiguration<T = f64> {
    points: Vec<(T, T)>,
}

impl<T: PartialOrd + Clone> PointConfiguration<T> {
    pub fn new(points: Vec<(T, T)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Empty);
        }
        if points
            .windows(2)
            .any(|w| w[0].0.partial_cmp(&w[1].0) != Some(Ordering::Less))
        {
            return Err(Error::InvalidConfiguration(
                "x-coordinates must be strictly increasing".into(),
            ));
        }
        let mut ys: Vec<&T> = points.iter().map(|p| &p.1).collect();
        let mut incomparable = false;
        ys.sort_by(|a, b| {
            a.partial_cmp(b).unwrap_or_else(|| {
                incomparable = true;
                Ordering::Equal
            })
        });
        if incomparable || ys.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidConfiguration(
                "y-coordinates must be pairwise distinct".into(),
            ));
        }
        Ok(PointConfiguration { points })
    }

    pub fn points(&self) -> &[(T, T)] {
        &self.points
    }
}

/// The permutation induced by the configuration: π(i) = #{j : y_j ≤ y_i}.
pub fn pattern_of_points<T: PartialOrd + Clone>(cfg: &PointConfiguration<T>) -> Permutation {
    let pts = cfg.points();
    let mut idx: Vec<usize> = (0..pts.len()).collect();
    idx.sort_by(|&a, &b| pts[a].1.partial_cmp(&pts[b].1).unwrap());
    let mut values = vec![0; pts.len()];
    for (rank, &i) in idx.iter().enumerate() {
        values[i] = rank + 1;
    }
    Permutation::from_values_unchecked(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn induce(pts: &[(f64, f64)]) -> Vec<usize> {
        let cfg = PointConfiguration::new(pts.to_vec()).unwrap();
        pattern_of_points(&cfg).values().to_vec()
    }

    #[test]
    fn examples() {
        assert_eq!(induce(&[(0.1, 0.5), (0.4, 0.2), (0.9, 0.7)]), vec![2, 1, 3]);
        assert_eq!(induce(&[(0.2, 0.9)]), vec![1]);
        assert_eq!(induce(&[(0.1, 0.3), (0.2, 0.2), (0.3, 0.1)]), vec![3, 2, 1]);
    }

    #[test]
    fn rejects_degenerate() {
        assert!(PointConfiguration::new(vec![(0.1, 0.1), (0.1, 0.2)]).is_err());
        assert!(PointConfiguration::new(vec![(0.2, 0.1), (0.1, 0.2)]).is_err());
        assert!(PointConfiguration::new(vec![(0.1, 0.5), (0.2, 0.5)]).is_err());
        assert!(PointConfiguration::new(vec![(0.1, f64::NAN), (0.2, 0.5)]).is_err());
        assert!(PointConfiguration::<f64>::new(vec![]).is_err());
    }

    #[test]
    fn rational_configurations() {
        let cfg = PointConfiguration::new(vec![(q(1, 6), q(5, 12)), (q(1, 2), q(1, 4))]).unwrap();
        assert_eq!(pattern_of_points(&cfg).values(), &[2, 1]);
    }
}
