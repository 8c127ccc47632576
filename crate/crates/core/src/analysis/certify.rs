//! Exact certificates that a track permuton avoids a pattern.
//!
//! `k` points drawn from a track model land on some `(piece, track)` pairs.
//! For each assignment with non-decreasing pieces the points realising the
//! pattern form an open polyhedron in `x_1 < … < x_k`; the pattern has
//! density zero exactly when every such polyhedron is empty.

use rayon::prelude::*;
use serde::Serialize;

use super::constraints::{Feasibility, LinearConstraintSystem, Refutation, MAX_VARIABLES};
use crate::error::{Error, Result};
use crate::models::TrackPermuton;
use crate::perm::{format_pattern, Permutation};
use crate::rational::{self, Rational};

/// A point placed on track `track` of piece `piece`, both 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Slot {
    pub piece: usize,
    pub track: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum Verdict {
    Infeasible(Refutation),
    Feasible {
        #[serde(with = "rational::serde_str_vec")]
        x: Vec<Rational>,
        #[serde(with = "rational::serde_str_vec")]
        y: Vec<Rational>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AssignmentVerdict {
    pub assignment: Vec<Slot>,
    #[serde(flatten)]
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AvoidanceCertificate {
    pub pattern: Permutation,
    pub model: String,
    pub certified: bool,
    pub assignments: Vec<AssignmentVerdict>,
}

impl AvoidanceCertificate {
    /// The first assignment realising the pattern, if any.
    pub fn witness(&self) -> Option<&AssignmentVerdict> {
        self.assignments
            .iter()
            .find(|a| matches!(a.verdict, Verdict::Feasible { .. }))
    }

    /// Summary line followed by one line per assignment.
    pub fn report(&self) -> String {
        let mut out = String::new();
        let pat = format_pattern(&self.pattern);
        if self.certified {
            out.push_str(&format!(
                "CERTIFIED pattern {pat} avoided by {} ({} assignments, all infeasible)\n",
                self.model,
                self.assignments.len()
            ));
        } else {
            out.push_str(&format!(
                "WITNESS pattern {pat} occurs in {} ({} of {} assignments feasible)\n",
                self.model,
                self.assignments
                    .iter()
                    .filter(|a| matches!(a.verdict, Verdict::Feasible { .. }))
                    .count(),
                self.assignments.len()
            ));
        }
        for a in &self.assignments {
            let slots: Vec<String> = a
                .assignment
                .iter()
                .map(|s| format!("{}:{}", s.piece, s.track))
                .collect();
            let slots = format!("({})", slots.join(", "));
            let line = match &a.verdict {
                Verdict::Infeasible(r) => format!(
                    "{slots} infeasible eliminated={:?} sizes={:?} derived={} contradiction: {}",
                    r.eliminated, r.sizes, r.derived, r.contradiction
                ),
                Verdict::Feasible { x, y } => {
                    let pts: Vec<String> = x
                        .iter()
                        .zip(y)
                        .map(|(x, y)| format!("({}, {})", rational::format_rational(x), rational::format_rational(y)))
                        .collect();
                    format!("{slots} feasible points={}", pts.join(" "))
                }
            };
            out.push_str(&line);
            out.push('\n');
        }
        out
    }
}

/// All `k`-tuples of slots with non-decreasing piece index, in lexicographic order.
pub fn enumerate_assignments(model: &TrackPermuton, k: usize) -> Vec<Vec<Slot>> {
    fn rec(model: &TrackPermuton, k: usize, from: usize, cur: &mut Vec<Slot>, out: &mut Vec<Vec<Slot>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for (pi, piece) in model.pieces().iter().enumerate().skip(from) {
            for ti in 0..piece.tracks.len() {
                cur.push(Slot {
                    piece: pi + 1,
                    track: ti + 1,
                });
                rec(model, k, pi, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(model, k, 0, &mut Vec::with_capacity(k), &mut out);
    out
}

/// Constraints on `x_1..x_k` for the points of `slots` to realise `pattern`.
pub fn realisation_system(
    pattern: &Permutation,
    model: &TrackPermuton,
    slots: &[Slot],
) -> Result<LinearConstraintSystem> {
    let k = pattern.order();
    let mut sys = LinearConstraintSystem::new(k)?;
    let one = Rational::from_integer(1.into());
    let zero = Rational::from_integer(0.into());
    let track = |i: usize| &model.pieces()[slots[i].piece - 1].tracks[slots[i].track - 1];
    for (i, s) in slots.iter().enumerate() {
        let piece = &model.pieces()[s.piece - 1];
        sys.push_less(&[], piece.x_lo.clone(), &[(i, one.clone())], zero.clone(), true)?;
        sys.push_less(&[(i, one.clone())], zero.clone(), &[], piece.x_hi.clone(), true)?;
        if i + 1 < k {
            sys.push_less(
                &[(i, one.clone())],
                zero.clone(),
                &[(i + 1, one.clone())],
                zero.clone(),
                true,
            )?;
        }
    }
    let positions = pattern.inverse();
    for r in 1..k {
        let (i, j) = (positions.at(r) - 1, positions.at(r + 1) - 1);
        let (ti, tj) = (track(i), track(j));
        sys.push_less(
            &[(i, ti.slope.clone())],
            ti.intercept.clone(),
            &[(j, tj.slope.clone())],
            tj.intercept.clone(),
            true,
        )?;
    }
    Ok(sys)
}

fn describe(model: &TrackPermuton) -> String {
    let tracks: usize = model.pieces().iter().map(|p| p.tracks.len()).sum();
    format!("tracks model ({} pieces, {} tracks)", model.pieces().len(), tracks)
}

pub fn certify_avoidance(pattern: &Permutation, model: &TrackPermuton) -> Result<AvoidanceCertificate> {
    let k = pattern.order();
    if k > MAX_VARIABLES {
        return Err(Error::PatternTooLong {
            pattern: k,
            perm: MAX_VARIABLES,
        });
    }
    let assignments = enumerate_assignments(model, k)
        .into_par_iter()
        .map(|slots| -> Result<AssignmentVerdict> {
            let sys = realisation_system(pattern, model, &slots)?;
            let verdict = match sys.solve() {
                Feasibility::Infeasible(r) => Verdict::Infeasible(r),
                Feasibility::Feasible(x) => {
                    let y = x
                        .iter()
                        .zip(&slots)
                        .map(|(x, s)| model.pieces()[s.piece - 1].tracks[s.track - 1].eval(x))
                        .collect();
                    Verdict::Feasible { x, y }
                }
            };
            Ok(AssignmentVerdict {
                assignment: slots,
                verdict,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let certified = assignments.iter().all(|a| matches!(a.verdict, Verdict::Infeasible(_)));
    Ok(AvoidanceCertificate {
        pattern: pattern.clone(),
        model: describe(model),
        certified,
        assignments,
    })
}
