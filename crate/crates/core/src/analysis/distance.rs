//! Rectangular discrepancy between two permutons.
//!
//! Both measures are cut into a grid of cells whose lines include every
//! breakpoint of either measure. The interval distance is the largest
//! `|μ(S×T) − ν(S×T)|` over intervals `S`, `T` whose endpoints are grid
//! lines; the brute-force variant allows arbitrary unions of grid columns
//! and rows.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::models::{DigitSwapPermuton, Permuton, StepPermuton, Track, TrackPermuton};
use crate::rational::{self, qi, Rational};

/// Depth at which the digit-swap permuton is replaced by its step approximation.
pub const DIGIT_SWAP_DISTANCE_DEPTH: u32 = 3;

/// Largest grid accepted by [`cut_distance_bruteforce`] in either direction.
pub const CUT_MAX_CELLS: usize = 14;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Interval {
    #[serde(with = "rational::serde_str")]
    pub lo: Rational,
    #[serde(with = "rational::serde_str")]
    pub hi: Rational,
}

impl Interval {
    fn new(lo: &Rational, hi: &Rational) -> Self {
        Interval {
            lo: lo.clone(),
            hi: hi.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    Intervals { s: Interval, t: Interval },
    CellUnions { s: Vec<Interval>, t: Vec<Interval> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DistanceResult {
    #[serde(with = "rational::serde_str")]
    pub value: Rational,
    pub witness: Witness,
}

#[derive(Clone, Debug)]
enum Measure {
    Step(StepPermuton),
    Tracks(TrackPermuton),
    Uniform,
}

struct Segment<'a> {
    lo: &'a Rational,
    hi: &'a Rational,
    track: &'a Track,
}

impl Measure {
    fn from_model(model: &Permuton) -> Result<Self> {
        let m = match model {
            Permuton::Step(s) => Measure::Step(s.clone()),
            Permuton::Tracks(t) => {
                if t.pieces().iter().flat_map(|p| &p.tracks).any(|t| t.slope.is_zero()) {
                    return Err(Error::Unsupported(
                        "horizontal tracks put mass on a horizontal line".into(),
                    ));
                }
                Measure::Tracks(t.clone())
            }
            Permuton::DigitSwap => Measure::Step(DigitSwapPermuton.as_step(DIGIT_SWAP_DISTANCE_DEPTH)),
            Permuton::Uniform => Measure::Uniform,
        };
        Ok(m)
    }

    fn x_breaks(&self) -> Vec<Rational> {
        match self {
            Measure::Step(s) => grid(s.order()),
            Measure::Tracks(t) => t.breakpoints().cloned().collect(),
            Measure::Uniform => vec![qi(0), qi(1)],
        }
    }

    fn y_breaks(&self) -> Vec<Rational> {
        match self {
            Measure::Step(s) => grid(s.order()),
            Measure::Tracks(_) => self
                .segments()
                .iter()
                .flat_map(|s| [s.track.eval(s.lo), s.track.eval(s.hi)])
                .collect(),
            Measure::Uniform => vec![qi(0), qi(1)],
        }
    }

    fn segments(&self) -> Vec<Segment<'_>> {
        match self {
            Measure::Tracks(t) => t
                .pieces()
                .iter()
                .flat_map(|p| {
                    p.tracks.iter().map(move |track| Segment {
                        lo: &p.x_lo,
                        hi: &p.x_hi,
                        track,
                    })
                })
                .collect(),
            _ => Vec::new(),
        }
    }

    fn rect_mass(&self, s: &Interval, t: &Interval) -> Rational {
        match self {
            Measure::Step(m) => m.rect_mass(&s.lo, &s.hi, &t.lo, &t.hi),
            Measure::Tracks(m) => m.rect_mass(&s.lo, &s.hi, &t.lo, &t.hi),
            Measure::Uniform => {
                let w = (&s.hi - &s.lo).max(Rational::zero());
                let h = (&t.hi - &t.lo).max(Rational::zero());
                w * h
            }
        }
    }

    /// Sparse cell masses: for every column, `(row, mass)` with mass > 0.
    fn cell_masses(&self, xs: &[Rational], ys: &[Rational]) -> Vec<Vec<(usize, Rational)>> {
        let cols = xs.len() - 1;
        let rows = ys.len() - 1;
        let mut out = vec![Vec::new(); cols];
        match self {
            Measure::Uniform => {
                for (c, col) in out.iter_mut().enumerate() {
                    let w = &xs[c + 1] - &xs[c];
                    for r in 0..rows {
                        col.push((r, &w * (&ys[r + 1] - &ys[r])));
                    }
                }
            }
            Measure::Step(s) => {
                let n = s.order();
                let nq = qi(n as i64);
                for (c, col) in out.iter_mut().enumerate() {
                    let mid = (&xs[c] + &xs[c + 1]) / qi(2);
                    let i = s.cell_of(&mid).expect("cell midpoints are interior");
                    let band_lo = rational::q(s.perm().at(i) as i64 - 1, n as i64);
                    let band_hi = rational::q(s.perm().at(i) as i64, n as i64);
                    let w = &xs[c + 1] - &xs[c];
                    let first = ys.partition_point(|y| *y < band_lo);
                    let mut r = first;
                    while r < rows && ys[r + 1] <= band_hi {
                        col.push((r, &nq * &w * (&ys[r + 1] - &ys[r])));
                        r += 1;
                    }
                }
            }
            Measure::Tracks(_) => {
                for seg in self.segments() {
                    let c0 = xs.partition_point(|x| x < seg.lo);
                    let mut c = c0;
                    while c < cols && xs[c + 1] <= *seg.hi {
                        add_segment_cell_masses(&mut out[c], seg.track, &xs[c], &xs[c + 1], ys);
                        c += 1;
                    }
                }
                for col in &mut out {
                    col.sort_by_key(|e| e.0);
                    let mut merged: Vec<(usize, Rational)> = Vec::with_capacity(col.len());
                    for (r, m) in col.drain(..) {
                        match merged.last_mut() {
                            Some(last) if last.0 == r => last.1 += m,
                            _ => merged.push((r, m)),
                        }
                    }
                    *col = merged;
                }
            }
        }
        out
    }
}

fn add_segment_cell_masses(
    col: &mut Vec<(usize, Rational)>,
    track: &Track,
    x0: &Rational,
    x1: &Rational,
    ys: &[Rational],
) {
    let (y_lo, y_hi) = {
        let (a, b) = (track.eval(x0), track.eval(x1));
        if a < b {
            (a, b)
        } else {
            (b, a)
        }
    };
    // |dx/dy| along the track
    let stretch = track.slope.abs().recip();
    let rows = ys.len() - 1;
    let mut r = ys.partition_point(|y| *y <= y_lo).saturating_sub(1);
    while r < rows && ys[r] < y_hi {
        let lo = (&ys[r]).max(&y_lo);
        let hi = (&ys[r + 1]).min(&y_hi);
        if lo < hi {
            col.push((r, &track.weight * &stretch * (hi - lo)));
        }
        r += 1;
    }
}

fn grid(n: usize) -> Vec<Rational> {
    (0..=n).map(|i| rational::q(i as i64, n as i64)).collect()
}

fn sorted_unique(mut v: Vec<Rational>) -> Vec<Rational> {
    v.retain(rational::in_unit_interval);
    v.push(qi(0));
    v.push(qi(1));
    v.sort();
    v.dedup();
    v
}

fn image(s: &Segment<'_>, x: &Rational) -> Option<Rational> {
    (s.lo < x && x < s.hi).then(|| s.track.eval(x))
}

fn preimage(s: &Segment<'_>, y: &Rational) -> Option<Rational> {
    let x = (y - &s.track.intercept) / &s.track.slope;
    (s.lo < &x && &x < s.hi).then_some(x)
}

/// Grid lines for the pair: all breakpoints and track crossings, closed
/// under images and preimages along tracks.
///
/// Between two track models the discrepancy is piecewise linear in the four
/// endpoints, so its maximum sits on a vertex of the arrangement. A vertex
/// coordinate is reached from a breakpoint or crossing by at most three
/// image/preimage steps, or closes a cycle x0 → y0 → x1 → y1 → x0. Both are
/// added. When a step or uniform measure is involved one level is used.
fn candidate_grid(mu: &Measure, nu: &Measure) -> (Vec<Rational>, Vec<Rational>) {
    let mut xs = mu.x_breaks();
    xs.extend(nu.x_breaks());
    let mut ys = mu.y_breaks();
    ys.extend(nu.y_breaks());

    let mut segs = mu.segments();
    segs.extend(nu.segments());
    for (i, a) in segs.iter().enumerate() {
        for b in &segs[i + 1..] {
            if a.track.slope == b.track.slope {
                continue;
            }
            let x = (&b.track.intercept - &a.track.intercept) / (&a.track.slope - &b.track.slope);
            if a.lo < &x && &x < a.hi && b.lo < &x && &x < b.hi {
                ys.push(a.track.eval(&x));
                xs.push(x);
            }
        }
    }
    let both_tracks = matches!((mu, nu), (Measure::Tracks(_), Measure::Tracks(_)));
    if both_tracks {
        let (cx, cy) = cycle_points(&segs);
        xs.extend(cx);
        ys.extend(cy);
    }
    let (mut xs, mut ys) = (sorted_unique(xs), sorted_unique(ys));
    for _ in 0..if both_tracks { 3 } else { 1 } {
        let mut nx = xs.clone();
        let mut ny = ys.clone();
        for s in &segs {
            nx.extend(ys.iter().filter_map(|y| preimage(s, y)));
            ny.extend(xs.iter().filter_map(|x| image(s, x)));
        }
        (xs, ys) = (sorted_unique(nx), sorted_unique(ny));
    }
    (xs, ys)
}

/// Solutions of y0 = t1(x0), x1 = t2⁻¹(y0), y1 = t3(x1), x0 = t4⁻¹(y1).
/// The tracks holding x0 share a piece, as do the ones holding x1.
fn cycle_points(segs: &[Segment<'_>]) -> (Vec<Rational>, Vec<Rational>) {
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    let same_piece = |a: &Segment<'_>, b: &Segment<'_>| a.lo == b.lo && a.hi == b.hi;
    for t1 in segs {
        for t4 in segs.iter().filter(|t| same_piece(t, t1)) {
            for t2 in segs {
                for t3 in segs.iter().filter(|t| same_piece(t, t2)) {
                    // x0 ↦ a·x0 + b around the cycle
                    let (s1, s2, s3, s4) = (&t1.track.slope, &t2.track.slope, &t3.track.slope, &t4.track.slope);
                    let a = s1 * s3 / (s2 * s4);
                    if a == qi(1) {
                        continue;
                    }
                    let map = |x: &Rational| {
                        let y0 = t1.track.eval(x);
                        let x1 = (y0 - &t2.track.intercept) / s2;
                        let y1 = t3.track.eval(&x1);
                        (y1 - &t4.track.intercept) / s4
                    };
                    let b = map(&Rational::zero());
                    let x0 = b / (qi(1) - a);
                    let Some(y0) = image(t1, &x0) else { continue };
                    let Some(x1) = preimage(t2, &y0) else { continue };
                    let Some(y1) = image(t3, &x1) else { continue };
                    if preimage(t4, &y1).is_none() {
                        continue;
                    }
                    xs.extend([x0, x1]);
                    ys.extend([y0, y1]);
                }
            }
        }
    }
    (xs, ys)
}

/// Dense integer matrix `L·(μ − ν)` per cell, with the common denominator `L`.
fn scaled_difference(mu: &Measure, nu: &Measure, xs: &[Rational], ys: &[Rational]) -> Result<(Vec<Vec<i128>>, BigInt)> {
    let a = mu.cell_masses(xs, ys);
    let b = nu.cell_masses(xs, ys);
    let mut denom = BigInt::one();
    for (_, m) in a.iter().chain(&b).flatten() {
        denom = denom.lcm(m.denom());
    }
    let rows = ys.len() - 1;
    let scale = |m: &Rational| -> Result<i128> {
        (m.numer() * (&denom / m.denom()))
            .to_i128()
            .ok_or_else(|| Error::SizeLimit("cell masses exceed 128-bit scaling".into()))
    };
    let mut out = Vec::with_capacity(a.len());
    for (ca, cb) in a.iter().zip(&b) {
        let mut col = vec![0i128; rows];
        for (r, m) in ca {
            col[*r] += scale(m)?;
        }
        for (r, m) in cb {
            col[*r] -= scale(m)?;
        }
        out.push(col);
    }
    Ok((out, denom))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Best {
    value: i128,
    // reversed so that larger `Best` prefers the smallest rectangle tuple
    rect: std::cmp::Reverse<(usize, usize, usize, usize)>,
}

fn best_rectangle(d: &[Vec<i128>]) -> Best {
    let cols = d.len();
    let rows = d.first().map_or(0, Vec::len);
    let start = Best {
        value: 0,
        rect: std::cmp::Reverse((0, cols.saturating_sub(1), 0, rows.saturating_sub(1))),
    };
    (0..cols)
        .into_par_iter()
        .map(|c1| {
            let mut acc = vec![0i128; rows];
            let mut best = start;
            for (c2, col) in d.iter().enumerate().skip(c1) {
                let mut changed = c2 == c1;
                for (a, v) in acc.iter_mut().zip(col) {
                    if *v != 0 {
                        *a += v;
                        changed = true;
                    }
                }
                if !changed {
                    continue;
                }
                for sign in [1i128, -1] {
                    // Kadane on sign·acc
                    let mut run = 0i128;
                    let mut run_start = 0;
                    for (r, v) in acc.iter().enumerate() {
                        if run <= 0 {
                            run = 0;
                            run_start = r;
                        }
                        run += sign * v;
                        if run <= 0 {
                            continue;
                        }
                        let cand = Best {
                            value: run,
                            rect: std::cmp::Reverse((c1, c2, run_start, r)),
                        };
                        if cand > best {
                            best = cand;
                        }
                    }
                }
            }
            best
        })
        .reduce(|| start, std::cmp::max)
}

fn to_rational(value: i128, denom: &BigInt) -> Rational {
    Rational::new(BigInt::from(value), denom.clone())
}

/// Largest discrepancy over pairs of intervals with endpoints on the
/// candidate grid. This is the interval supremum for two step (or uniform)
/// measures and for two track models. When a step measure meets a track
/// model the supremum can sit off the grid and the value is a lower bound.
pub fn rect_distance_interval(mu: &Permuton, nu: &Permuton) -> Result<DistanceResult> {
    let (a, b) = (Measure::from_model(mu)?, Measure::from_model(nu)?);
    let (xs, ys) = candidate_grid(&a, &b);
    let (d, denom) = scaled_difference(&a, &b, &xs, &ys)?;
    let best = best_rectangle(&d);
    let (c1, c2, r1, r2) = best.rect.0;
    Ok(DistanceResult {
        value: to_rational(best.value, &denom),
        witness: Witness::Intervals {
            s: Interval::new(&xs[c1], &xs[c2 + 1]),
            t: Interval::new(&ys[r1], &ys[r2 + 1]),
        },
    })
}

/// `|μ(S×T) − ν(S×T)|` for the rectangle described by `s` and `t`.
pub fn rect_discrepancy(mu: &Permuton, nu: &Permuton, s: &Interval, t: &Interval) -> Result<Rational> {
    let (a, b) = (Measure::from_model(mu)?, Measure::from_model(nu)?);
    Ok((a.rect_mass(s, t) - b.rect_mass(s, t)).abs())
}

/// `|μ(S×T) − ν(S×T)|` for any witness.
pub fn witness_discrepancy(mu: &Permuton, nu: &Permuton, witness: &Witness) -> Result<Rational> {
    let (a, b) = (Measure::from_model(mu)?, Measure::from_model(nu)?);
    let (ss, ts) = match witness {
        Witness::Intervals { s, t } => (vec![s.clone()], vec![t.clone()]),
        Witness::CellUnions { s, t } => (s.clone(), t.clone()),
    };
    let mut total = Rational::zero();
    for s in &ss {
        for t in &ts {
            total += a.rect_mass(s, t) - b.rect_mass(s, t);
        }
    }
    Ok(total.abs())
}

fn merge_cells(lines: &[Rational], chosen: impl Iterator<Item = usize>) -> Vec<Interval> {
    let mut out: Vec<Interval> = Vec::new();
    for i in chosen {
        match out.last_mut() {
            Some(last) if last.hi == lines[i] => last.hi = lines[i + 1].clone(),
            _ => out.push(Interval::new(&lines[i], &lines[i + 1])),
        }
    }
    out
}

/// Exact supremum over arbitrary unions of cells of the common refinement
/// grid of two step permutons.
pub fn cut_distance_bruteforce(mu: &StepPermuton, nu: &StepPermuton) -> Result<DistanceResult> {
    let (a, b) = (Measure::Step(mu.clone()), Measure::Step(nu.clone()));
    let (xs, ys) = candidate_grid(&a, &b);
    let (cols, rows) = (xs.len() - 1, ys.len() - 1);
    if cols > CUT_MAX_CELLS || rows > CUT_MAX_CELLS {
        return Err(Error::SizeLimit(format!(
            "common grid is {cols}×{rows}, at most {CUT_MAX_CELLS} per side"
        )));
    }
    let (d, denom) = scaled_difference(&a, &b, &xs, &ys)?;
    let mut best = (0i128, 0u32, 1i128);
    let mut sums = vec![0i128; rows];
    for mask in 0u32..(1 << cols) {
        sums.iter_mut().for_each(|s| *s = 0);
        for (c, col) in d.iter().enumerate() {
            if mask & (1 << c) != 0 {
                for (s, v) in sums.iter_mut().zip(col) {
                    *s += v;
                }
            }
        }
        let pos: i128 = sums.iter().filter(|v| **v > 0).sum();
        let neg: i128 = -sums.iter().filter(|v| **v < 0).sum::<i128>();
        if pos > best.0 {
            best = (pos, mask, 1);
        }
        if neg > best.0 {
            best = (neg, mask, -1);
        }
    }
    let (value, mask, sign) = best;
    let (s, t) = if value == 0 {
        (
            vec![Interval::new(&xs[0], &xs[cols])],
            vec![Interval::new(&ys[0], &ys[rows])],
        )
    } else {
        sums.iter_mut().for_each(|s| *s = 0);
        for (c, col) in d.iter().enumerate() {
            if mask & (1 << c) != 0 {
                for (s, v) in sums.iter_mut().zip(col) {
                    *s += v;
                }
            }
        }
        (
            merge_cells(&xs, (0..cols).filter(|c| mask & (1 << c) != 0)),
            merge_cells(&ys, (0..rows).filter(|r| sign * sums[*r] > 0)),
        )
    };
    Ok(DistanceResult {
        value: to_rational(value, &denom),
        witness: Witness::CellUnions { s, t },
    })
}
