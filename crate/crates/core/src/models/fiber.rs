//! Atomic fibers and the Lévy–Prokhorov distance between them.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Atom {
    #[serde(with = "rational::serde_str")]
    pub y: Rational,
    #[serde(with = "rational::serde_str")]
    pub weight: Rational,
}

/// A finite atomic measure on `[0,1]`; atoms sorted by position, positions distinct.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Fiber {
    atoms: Vec<Atom>,
}

impl Fiber {
    /// Sorts the atoms and merges coincident positions by adding weights.
    pub fn new(mut atoms: Vec<Atom>) -> Result<Self> {
        for a in &atoms {
            if !a.weight.is_positive() {
                return Err(Error::InvalidModel(format!("non-positive atom weight {}", a.weight)));
            }
            if !rational::in_unit_interval(&a.y) {
                return Err(Error::InvalidModel(format!("atom at {} outside [0,1]", a.y)));
            }
        }
        atoms.sort_by(|a, b| a.y.cmp(&b.y));
        let mut merged: Vec<Atom> = Vec::with_capacity(atoms.len());
        for a in atoms {
            match merged.last_mut() {
                Some(last) if last.y == a.y => last.weight += a.weight,
                _ => merged.push(a),
            }
        }
        let fiber = Fiber { atoms: merged };
        if fiber.total_weight() > Rational::one() {
            return Err(Error::InvalidModel(format!(
                "fiber mass {} exceeds 1",
                fiber.total_weight()
            )));
        }
        Ok(fiber)
    }

    pub fn dirac(y: Rational) -> Result<Self> {
        Fiber::new(vec![Atom {
            y,
            weight: Rational::one(),
        }])
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_weight(&self) -> Rational {
        self.atoms.iter().map(|a| a.weight.clone()).sum()
    }

    pub fn is_probability(&self) -> bool {
        self.total_weight() == Rational::one()
    }

    /// The atom closest to `y`; equidistant atoms resolve to the lower one
    /// unless `prefer_upper`. The flag in the result reports such a tie.
    pub fn nearest_atom(&self, y: &Rational, prefer_upper: bool) -> Option<(&Atom, bool)> {
        let mut best: Option<(&Atom, Rational)> = None;
        let mut tied = false;
        for a in &self.atoms {
            let d = (&a.y - y).abs();
            match &best {
                None => best = Some((a, d)),
                Some((_, bd)) if d < *bd => {
                    best = Some((a, d));
                    tied = false;
                }
                Some((_, bd)) if d == *bd => {
                    tied = true;
                    if prefer_upper {
                        best = Some((a, d));
                    }
                }
                _ => {}
            }
        }
        best.map(|(a, _)| (a, tied))
    }
}

pub const LP_MAX_ATOMS: usize = 20;

/// Masses scaled to integers over a common denominator.
struct Scaled {
    positions: Vec<Rational>,
    masses: Vec<i128>,
}

fn scale(alpha: &Fiber, beta: &Fiber) -> Result<(Scaled, Scaled, BigInt)> {
    let mut denom = BigInt::one();
    for a in alpha.atoms.iter().chain(&beta.atoms) {
        denom = denom.lcm(a.weight.denom());
    }
    let conv = |f: &Fiber| -> Result<Scaled> {
        let masses = f
            .atoms
            .iter()
            .map(|a| {
                (a.weight.numer() * (&denom / a.weight.denom()))
                    .to_i128()
                    .ok_or_else(|| Error::SizeLimit("atom weights too fine".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Scaled {
            positions: f.atoms.iter().map(|a| a.y.clone()).collect(),
            masses,
        })
    };
    Ok((conv(alpha)?, conv(beta)?, denom))
}

/// max over atom subsets S of `from` of from(S) − to(N(S)), where N(S) holds
/// the atoms of `to` within distance ≤ eps of S.
fn worst_excess(from: &Scaled, to: &Scaled, eps: &Rational) -> i128 {
    let m = from.positions.len();
    let near: Vec<u32> = from
        .positions
        .iter()
        .map(|p| {
            to.positions
                .iter()
                .enumerate()
                .filter(|(_, q)| (p - *q).abs() <= *eps)
                .fold(0u32, |acc, (j, _)| acc | (1 << j))
        })
        .collect();
    let to_mass = |mask: u32| -> i128 {
        let mut s = 0;
        let mut bits = mask;
        while bits != 0 {
            let j = bits.trailing_zeros() as usize;
            s += to.masses[j];
            bits &= bits - 1;
        }
        s
    };
    let size = 1usize << m;
    let mut nb = vec![0u32; size];
    let mut mass = vec![0i128; size];
    let mut best = 0i128;
    for s in 1..size {
        let low = s.trailing_zeros() as usize;
        let rest = s & (s - 1);
        nb[s] = nb[rest] | near[low];
        mass[s] = mass[rest] + from.masses[low];
        best = best.max(mass[s] - to_mass(nb[s]));
    }
    best
}

/// Lévy–Prokhorov distance between two atomic probability measures on `[0,1]`.
///
/// Feasibility of ε is monotone, and on every interval between consecutive
/// atom distances the neighbourhoods are constant, so the infimum is either
/// one of those distances or a scaled subset-mass excess. The closed check
/// below (distance ≤ ε) is the right limit of the open-neighbourhood
/// condition, which is what the infimum sees.
pub fn lp_distance(alpha: &Fiber, beta: &Fiber) -> Result<Rational> {
    for f in [alpha, beta] {
        if !f.is_probability() {
            return Err(Error::NotProbability(format!("mass {}", f.total_weight())));
        }
        if f.len() > LP_MAX_ATOMS {
            return Err(Error::SizeLimit(format!(
                "{} atoms, at most {LP_MAX_ATOMS} supported",
                f.len()
            )));
        }
    }
    let (a, b, denom) = scale(alpha, beta)?;
    let mut dists: Vec<Rational> = vec![Rational::zero()];
    for p in &a.positions {
        for q in &b.positions {
            dists.push((p - q).abs());
        }
    }
    dists.sort();
    dists.dedup();

    let excess = |eps: &Rational| worst_excess(&a, &b, eps).max(worst_excess(&b, &a, eps));
    let feasible = |eps: &Rational| {
        let c = excess(eps);
        // c / denom <= eps
        Rational::from_integer(BigInt::from(c)) <= eps * Rational::from_integer(denom.clone())
    };
    let first = dists.partition_point(|d| !feasible(d));
    debug_assert!(first < dists.len());
    if first == 0 {
        return Ok(Rational::zero());
    }
    let prev = &dists[first - 1];
    let mass_term = Rational::new(BigInt::from(excess(prev)), denom);
    Ok(mass_term.min(dists[first].clone()))
}
