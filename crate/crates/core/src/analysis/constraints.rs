//! Exact Fourier–Motzkin elimination for small systems of strict and
//! non-strict rational inequalities.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{self, qi, Rational};

pub const MAX_VARIABLES: usize = 8;

/// `Σ coeffs[i]·x_i + constant < 0` (strict) or `≤ 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub constant: Rational,
    pub strict: bool,
}

impl Constraint {
    pub fn new(coeffs: Vec<Rational>, constant: Rational, strict: bool) -> Self {
        Constraint {
            coeffs,
            constant,
            strict,
        }
    }

    pub fn value_at(&self, point: &[Rational]) -> Rational {
        self.coeffs
            .iter()
            .zip(point)
            .fold(self.constant.clone(), |acc, (c, x)| acc + c * x)
    }

    pub fn holds_at(&self, point: &[Rational]) -> bool {
        let v = self.value_at(point);
        if self.strict {
            v.is_negative()
        } else {
            !v.is_positive()
        }
    }

    fn is_constant(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// A constraint with no variables left that cannot hold.
    fn is_contradiction(&self) -> bool {
        self.constant.is_positive() || (self.strict && self.constant.is_zero())
    }

    /// Scales so that the first non-zero coefficient is ±1.
    fn normalized(mut self) -> Self {
        if let Some(lead) = self.coeffs.iter().find(|c| !c.is_zero()).map(|c| c.abs()) {
            for c in &mut self.coeffs {
                *c /= &lead;
            }
            self.constant /= &lead;
        }
        self
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                terms.push(format!("{}·x{}", rational::format_rational(c), i + 1));
            }
        }
        if !self.constant.is_zero() || terms.is_empty() {
            terms.push(rational::format_rational(&self.constant));
        }
        let op = if self.strict { "<" } else { "<=" };
        write!(f, "{} {} 0", terms.join(" + "), op)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearConstraintSystem {
    vars: usize,
    constraints: Vec<Constraint>,
}

/// How a system was shown infeasible.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Refutation {
    /// variables in elimination order, 1-based
    pub eliminated: Vec<usize>,
    /// constraint count before the first and after every elimination
    pub sizes: Vec<usize>,
    /// constraints produced by combining pairs
    pub derived: usize,
    /// the variable-free inequality that fails
    pub contradiction: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Feasibility {
    Feasible(Vec<Rational>),
    Infeasible(Refutation),
}

impl LinearConstraintSystem {
    pub fn new(vars: usize) -> Result<Self> {
        if vars > MAX_VARIABLES {
            return Err(Error::InvalidParameter(format!(
                "{vars} variables, at most {MAX_VARIABLES} supported"
            )));
        }
        Ok(LinearConstraintSystem {
            vars,
            constraints: Vec::new(),
        })
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn push(&mut self, c: Constraint) -> Result<()> {
        if c.coeffs.len() != self.vars {
            return Err(Error::InvalidParameter(format!(
                "constraint has {} coefficients, system has {} variables",
                c.coeffs.len(),
                self.vars
            )));
        }
        self.constraints.push(c);
        Ok(())
    }

    /// Adds `lhs·x + lc < rhs·x + rc` (or `≤`).
    pub fn push_less(
        &mut self,
        lhs: &[(usize, Rational)],
        lc: Rational,
        rhs: &[(usize, Rational)],
        rc: Rational,
        strict: bool,
    ) -> Result<()> {
        let mut coeffs = vec![Rational::zero(); self.vars];
        for (i, c) in lhs {
            coeffs[*i] += c;
        }
        for (i, c) in rhs {
            coeffs[*i] -= c;
        }
        self.push(Constraint::new(coeffs, lc - rc, strict))
    }

    pub fn is_satisfied_by(&self, point: &[Rational]) -> bool {
        self.constraints.iter().all(|c| c.holds_at(point))
    }

    pub fn solve(&self) -> Feasibility {
        let mut current = match simplify(self.constraints.clone()) {
            Ok(cs) => cs,
            Err(bad) => {
                return Feasibility::Infeasible(Refutation {
                    eliminated: Vec::new(),
                    sizes: vec![self.constraints.len()],
                    derived: 0,
                    contradiction: bad.to_string(),
                })
            }
        };
        let mut remaining: Vec<usize> = (0..self.vars).collect();
        let mut stages: Vec<(usize, Vec<Constraint>)> = Vec::new();
        let mut sizes = vec![current.len()];
        let mut eliminated = Vec::new();
        let mut derived = 0;
        while !remaining.is_empty() {
            let v = pick_variable(&current, &remaining);
            remaining.retain(|&r| r != v);
            eliminated.push(v + 1);
            let (next, made) = eliminate(&current, v);
            derived += made;
            stages.push((v, std::mem::take(&mut current)));
            match simplify(next) {
                Ok(cs) => current = cs,
                Err(bad) => {
                    sizes.push(0);
                    return Feasibility::Infeasible(Refutation {
                        eliminated,
                        sizes,
                        derived,
                        contradiction: bad.to_string(),
                    });
                }
            }
            sizes.push(current.len());
        }
        let mut point = vec![Rational::zero(); self.vars];
        for (v, cs) in stages.iter().rev() {
            point[*v] = choose_value(cs, *v, &point);
        }
        debug_assert!(self.is_satisfied_by(&point));
        Feasibility::Feasible(point)
    }
}

/// Normalises, drops satisfied constant rows, and keeps only the tightest
/// of parallel constraints. Fails with the first contradiction found.
fn simplify(cs: Vec<Constraint>) -> std::result::Result<Vec<Constraint>, Constraint> {
    let mut tightest: BTreeMap<Vec<Rational>, (Rational, bool)> = BTreeMap::new();
    for c in cs {
        if c.is_constant() {
            if c.is_contradiction() {
                return Err(c);
            }
            continue;
        }
        let c = c.normalized();
        let entry = tightest.entry(c.coeffs).or_insert((c.constant.clone(), c.strict));
        if (c.constant.clone(), c.strict) > *entry {
            *entry = (c.constant, c.strict);
        }
    }
    Ok(tightest
        .into_iter()
        .map(|(coeffs, (constant, strict))| Constraint::new(coeffs, constant, strict))
        .collect())
}

/// The variable whose elimination creates the fewest new constraints.
fn pick_variable(cs: &[Constraint], remaining: &[usize]) -> usize {
    *remaining
        .iter()
        .min_by_key(|&&v| {
            let pos = cs.iter().filter(|c| c.coeffs[v].is_positive()).count();
            let neg = cs.iter().filter(|c| c.coeffs[v].is_negative()).count();
            pos * neg
        })
        .expect("at least one variable remains")
}

fn eliminate(cs: &[Constraint], v: usize) -> (Vec<Constraint>, usize) {
    let (mut out, mut pos, mut neg) = (Vec::new(), Vec::new(), Vec::new());
    for c in cs {
        if c.coeffs[v].is_positive() {
            pos.push(c);
        } else if c.coeffs[v].is_negative() {
            neg.push(c);
        } else {
            out.push(c.clone());
        }
    }
    let mut made = 0;
    for p in &pos {
        for n in &neg {
            let (sp, sn) = (-&n.coeffs[v], p.coeffs[v].clone());
            let coeffs = p.coeffs.iter().zip(&n.coeffs).map(|(a, b)| a * &sp + b * &sn).collect();
            let constant = &p.constant * &sp + &n.constant * &sn;
            out.push(Constraint::new(coeffs, constant, p.strict || n.strict));
            made += 1;
        }
    }
    (out, made)
}

/// A value for `v` satisfying every constraint of `cs`, given values for
/// all other variables that appear in it.
fn choose_value(cs: &[Constraint], v: usize, point: &[Rational]) -> Rational {
    let mut lower: Option<(Rational, bool)> = None;
    let mut upper: Option<(Rational, bool)> = None;
    for c in cs {
        let a = &c.coeffs[v];
        if a.is_zero() {
            continue;
        }
        let mut rest = c.constant.clone();
        for (i, (ci, xi)) in c.coeffs.iter().zip(point).enumerate() {
            if i != v {
                rest += ci * xi;
            }
        }
        let bound = -rest / a;
        if a.is_positive() {
            let tighter = match &upper {
                None => true,
                Some((u, s)) => bound < *u || (bound == *u && c.strict && !s),
            };
            if tighter {
                upper = Some((bound, c.strict));
            }
        } else {
            let tighter = match &lower {
                None => true,
                Some((l, s)) => bound > *l || (bound == *l && c.strict && !s),
            };
            if tighter {
                lower = Some((bound, c.strict));
            }
        }
    }
    match (lower, upper) {
        (Some((l, _)), Some((u, _))) => (l + u) / qi(2),
        (Some((l, _)), None) => l + qi(1),
        (None, Some((u, _))) => u - qi(1),
        (None, None) => Rational::zero(),
    }
}
