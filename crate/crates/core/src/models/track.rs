//! Piecewise-linear permutons whose fibers are finitely many atoms.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::fiber::{Atom, Fiber};
use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::rational::{self, qi, Rational};

/// The segment `y = slope·x + intercept` carrying `weight` of every fiber in its piece.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Track {
    #[serde(rename = "a", with = "rational::serde_str")]
    pub slope: Rational,
    #[serde(rename = "b", with = "rational::serde_str")]
    pub intercept: Rational,
    #[serde(rename = "w", with = "rational::serde_str")]
    pub weight: Rational,
}

impl Track {
    pub fn new(slope: Rational, intercept: Rational, weight: Rational) -> Self {
        Track {
            slope,
            intercept,
            weight,
        }
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        &self.slope * x + &self.intercept
    }

    fn same_line(&self, other: &Track) -> bool {
        self.slope == other.slope && self.intercept == other.intercept
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Piece {
    #[serde(with = "rational::serde_str")]
    pub x_lo: Rational,
    #[serde(with = "rational::serde_str")]
    pub x_hi: Rational,
    pub tracks: Vec<Track>,
}

impl Piece {
    pub fn width(&self) -> Rational {
        &self.x_hi - &self.x_lo
    }

    pub fn contains_open(&self, x: &Rational) -> bool {
        self.x_lo < *x && *x < self.x_hi
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawTracks")]
pub struct TrackPermuton {
    pieces: Vec<Piece>,
}

#[derive(Deserialize)]
struct RawTracks {
    pieces: Vec<Piece>,
}

impl TryFrom<RawTracks> for TrackPermuton {
    type Error = Error;

    fn try_from(raw: RawTracks) -> Result<Self> {
        TrackPermuton::new(raw.pieces)
    }
}

/// A point strictly inside a piece where two tracks meet; the fiber there
/// has fewer distinct atoms than its neighbours.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Crossing {
    pub piece: usize,
    #[serde(with = "rational::serde_str")]
    pub x: Rational,
    #[serde(with = "rational::serde_str")]
    pub y: Rational,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Vertical,
    Horizontal,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MoleculeProfile {
    pub max_atoms: usize,
    /// atom count → total x-length with that many distinct atoms
    #[serde(serialize_with = "histogram_as_strings")]
    pub histogram: BTreeMap<usize, Rational>,
    /// measure-zero set where crossing tracks merge atoms
    pub crossings: Vec<Crossing>,
}

fn histogram_as_strings<S: serde::Serializer>(
    h: &BTreeMap<usize, Rational>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_map(h.iter().map(|(k, v)| (k, rational::format_rational(v))))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DensityBand {
    #[serde(with = "rational::serde_str")]
    pub lo: Rational,
    #[serde(with = "rational::serde_str")]
    pub hi: Rational,
    #[serde(with = "rational::serde_str")]
    pub density: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MarginalReport {
    pub x_ok: bool,
    pub y_ok: bool,
    #[serde(with = "rational::serde_str")]
    pub max_deviation: Rational,
    /// piecewise-constant density of the y-marginal
    pub y_density: Vec<DensityBand>,
    pub diagnostics: Vec<String>,
}

impl TrackPermuton {
    /// Checks the structural invariants. Uniformity of the y-marginal is
    /// deliberately not required here; see [`TrackPermuton::validate_marginals`].
    pub fn new(pieces: Vec<Piece>) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidModel(m));
        if pieces.is_empty() {
            return bad("no pieces".into());
        }
        if !pieces[0].x_lo.is_zero() || !pieces.last().unwrap().x_hi.is_one() {
            return bad("pieces must cover [0,1]".into());
        }
        for (i, p) in pieces.iter().enumerate() {
            if p.x_lo >= p.x_hi {
                return bad(format!("piece {i} has empty x-range"));
            }
            if i > 0 && pieces[i - 1].x_hi != p.x_lo {
                return bad(format!("gap or overlap before piece {i}"));
            }
            if p.tracks.is_empty() {
                return bad(format!("piece {i} has no tracks"));
            }
            let total: Rational = p.tracks.iter().map(|t| t.weight.clone()).sum();
            if total != Rational::one() {
                return bad(format!("piece {i} weights sum to {total}"));
            }
            for (j, t) in p.tracks.iter().enumerate() {
                if !t.weight.is_positive() {
                    return bad(format!("piece {i} track {j} has non-positive weight"));
                }
                for x in [&p.x_lo, &p.x_hi] {
                    if !rational::in_unit_interval(&t.eval(x)) {
                        return bad(format!("piece {i} track {j} leaves the unit square"));
                    }
                }
                if p.tracks[..j].iter().any(|s| s.same_line(t)) {
                    return bad(format!("piece {i} has duplicate track {j}"));
                }
            }
        }
        Ok(TrackPermuton { pieces })
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    /// The permuton on the diagonal.
    pub fn identity() -> Self {
        TrackPermuton {
            pieces: vec![Piece {
                x_lo: Rational::zero(),
                x_hi: Rational::one(),
                tracks: vec![Track::new(qi(1), qi(0), qi(1))],
            }],
        }
    }

    /// Interior piece boundaries.
    pub fn breakpoints(&self) -> impl Iterator<Item = &Rational> {
        self.pieces[1..].iter().map(|p| &p.x_lo)
    }

    pub fn is_boundary(&self, x: &Rational) -> bool {
        self.breakpoints().any(|b| b == x)
    }

    /// Index of the piece containing `x`; interior boundaries are an error.
    pub fn piece_index(&self, x: &Rational) -> Result<usize> {
        if !rational::in_unit_interval(x) {
            return Err(Error::OutOfUnitInterval(x.clone()));
        }
        let idx = self.pieces.partition_point(|p| p.x_hi < *x);
        let idx = idx.min(self.pieces.len() - 1);
        if idx + 1 < self.pieces.len() && self.pieces[idx].x_hi == *x {
            return Err(Error::Boundary(x.clone()));
        }
        Ok(idx)
    }

    fn fiber_in_piece(&self, idx: usize, x: &Rational) -> Fiber {
        let atoms = self.pieces[idx]
            .tracks
            .iter()
            .map(|t| Atom {
                y: t.eval(x),
                weight: t.weight.clone(),
            })
            .collect();
        Fiber::new(atoms).expect("validated tracks produce valid fibers")
    }

    pub fn fiber_at(&self, x: &Rational) -> Result<Fiber> {
        let idx = self.piece_index(x)?;
        Ok(self.fiber_in_piece(idx, x))
    }

    /// Like [`fiber_at`](Self::fiber_at) but resolves a boundary with the
    /// piece on the left.
    pub fn fiber_at_left(&self, x: &Rational) -> Result<Fiber> {
        match self.piece_index(x) {
            Err(Error::Boundary(_)) => {
                let idx = self.pieces.partition_point(|p| p.x_hi < *x);
                Ok(self.fiber_in_piece(idx, x))
            }
            other => other.map(|idx| self.fiber_in_piece(idx, x)),
        }
    }

    /// Tracks sorted within pieces; adjacent pieces with identical tracks merged.
    pub fn canonical(&self) -> TrackPermuton {
        let mut out: Vec<Piece> = Vec::with_capacity(self.pieces.len());
        for p in &self.pieces {
            let mut tracks = p.tracks.clone();
            tracks.sort_by(|a, b| (&a.slope, &a.intercept).cmp(&(&b.slope, &b.intercept)));
            match out.last_mut() {
                Some(last) if last.tracks == tracks => last.x_hi = p.x_hi.clone(),
                _ => out.push(Piece {
                    x_lo: p.x_lo.clone(),
                    x_hi: p.x_hi.clone(),
                    tracks,
                }),
            }
        }
        TrackPermuton { pieces: out }
    }

    /// Same measure up to re-partitioning of pieces.
    pub fn equivalent(&self, other: &TrackPermuton) -> bool {
        self.canonical() == other.canonical()
    }

    pub fn crossings(&self) -> Vec<Crossing> {
        let mut out = Vec::new();
        for (i, p) in self.pieces.iter().enumerate() {
            for (j, s) in p.tracks.iter().enumerate() {
                for t in &p.tracks[j + 1..] {
                    if s.slope == t.slope {
                        continue;
                    }
                    let x = (&t.intercept - &s.intercept) / (&s.slope - &t.slope);
                    if p.contains_open(&x) {
                        let y = s.eval(&x);
                        out.push(Crossing { piece: i, x, y });
                    }
                }
            }
        }
        out.sort_by(|a, b| a.x.cmp(&b.x).then(a.y.cmp(&b.y)));
        out.dedup_by(|a, b| a.x == b.x && a.y == b.y);
        out
    }

    /// Pushforward under `(x, y) ↦ (y, x)`.
    ///
    /// A segment of slope `a` and weight `w` over an x-interval becomes a
    /// segment of slope `1/a` over its y-image, spreading the same mass over
    /// an interval `|a|` times as long, hence weight `w/|a|`. Fails when a
    /// track is horizontal or the y-marginal is not uniform.
    pub fn transpose(&self) -> Result<TrackPermuton> {
        struct Seg {
            lo: Rational,
            hi: Rational,
            track: Track,
        }
        let mut segs = Vec::new();
        let mut cuts = vec![Rational::zero(), Rational::one()];
        for p in &self.pieces {
            for t in &p.tracks {
                if t.slope.is_zero() {
                    return Err(Error::Unsupported("horizontal track cannot be transposed".into()));
                }
                let (y0, y1) = (t.eval(&p.x_lo), t.eval(&p.x_hi));
                let (lo, hi) = if y0 < y1 { (y0, y1) } else { (y1, y0) };
                cuts.push(lo.clone());
                cuts.push(hi.clone());
                let inv = Rational::one() / &t.slope;
                segs.push(Seg {
                    lo,
                    hi,
                    track: Track::new(inv.clone(), -(&t.intercept * &inv), &t.weight * inv.abs()),
                });
            }
        }
        cuts.sort();
        cuts.dedup();
        let mut pieces = Vec::with_capacity(cuts.len());
        for w in cuts.windows(2) {
            let (u, v) = (&w[0], &w[1]);
            let mut tracks: Vec<Track> = Vec::new();
            for s in segs.iter().filter(|s| s.lo <= *u && s.hi >= *v) {
                match tracks.iter_mut().find(|t| t.same_line(&s.track)) {
                    Some(t) => t.weight += &s.track.weight,
                    None => tracks.push(s.track.clone()),
                }
            }
            let total: Rational = tracks.iter().map(|t| t.weight.clone()).sum();
            if total != Rational::one() {
                return Err(Error::InvalidModel(format!(
                    "y-marginal has density {total} on [{u}, {v}]; not a permuton"
                )));
            }
            pieces.push(Piece {
                x_lo: u.clone(),
                x_hi: v.clone(),
                tracks,
            });
        }
        Ok(TrackPermuton::new(pieces)?.canonical())
    }

    pub fn molecule_profile(&self, direction: Direction) -> Result<MoleculeProfile> {
        let model = match direction {
            Direction::Vertical => self.clone(),
            Direction::Horizontal => self.transpose()?,
        };
        let mut histogram: BTreeMap<usize, Rational> = BTreeMap::new();
        for p in &model.pieces {
            *histogram.entry(p.tracks.len()).or_insert_with(Rational::zero) += p.width();
        }
        Ok(MoleculeProfile {
            max_atoms: histogram.keys().copied().max().unwrap_or(0),
            histogram,
            crossings: model.crossings(),
        })
    }

    /// Exact check of both marginals.
    pub fn validate_marginals(&self) -> MarginalReport {
        let mut diagnostics = Vec::new();
        let mut x_ok = true;
        for (i, p) in self.pieces.iter().enumerate() {
            let total: Rational = p.tracks.iter().map(|t| t.weight.clone()).sum();
            if total != Rational::one() {
                x_ok = false;
                diagnostics.push(format!("piece {i}: x-density {total}"));
            }
        }
        // every non-horizontal segment spreads density w/|a| over its y-image
        let mut cuts = vec![Rational::zero(), Rational::one()];
        let mut segs = Vec::new();
        let mut y_ok = true;
        for (i, p) in self.pieces.iter().enumerate() {
            for t in &p.tracks {
                if t.slope.is_zero() {
                    y_ok = false;
                    diagnostics.push(format!(
                        "piece {i}: horizontal track at y = {} puts an atom of mass {} in the y-marginal",
                        t.intercept,
                        &t.weight * p.width()
                    ));
                    continue;
                }
                let (y0, y1) = (t.eval(&p.x_lo), t.eval(&p.x_hi));
                let (lo, hi) = if y0 < y1 { (y0, y1) } else { (y1, y0) };
                cuts.push(lo.clone());
                cuts.push(hi.clone());
                segs.push((lo, hi, &t.weight / t.slope.abs()));
            }
        }
        cuts.sort();
        cuts.dedup();
        let mut y_density = Vec::new();
        let mut max_deviation = Rational::zero();
        for w in cuts.windows(2) {
            let density: Rational = segs
                .iter()
                .filter(|(lo, hi, _)| *lo <= w[0] && *hi >= w[1])
                .map(|(_, _, d)| d.clone())
                .sum();
            let dev = (&density - Rational::one()).abs();
            if dev > max_deviation {
                max_deviation = dev;
            }
            y_density.push(DensityBand {
                lo: w[0].clone(),
                hi: w[1].clone(),
                density,
            });
        }
        if !max_deviation.is_zero() {
            y_ok = false;
            diagnostics.push(format!("y-density deviates from 1 by up to {max_deviation}"));
        }
        MarginalReport {
            x_ok,
            y_ok,
            max_deviation,
            y_density,
            diagnostics,
        }
    }

    /// Mass of `[x0,x1] × [y0,y1]`.
    pub fn rect_mass(&self, x0: &Rational, x1: &Rational, y0: &Rational, y1: &Rational) -> Rational {
        let mut total = Rational::zero();
        for p in &self.pieces {
            let lo = (&p.x_lo).max(x0);
            let hi = (&p.x_hi).min(x1);
            if lo >= hi {
                continue;
            }
            for t in &p.tracks {
                let (a, b) = if t.slope.is_zero() {
                    if t.intercept >= *y0 && t.intercept <= *y1 {
                        (lo.clone(), hi.clone())
                    } else {
                        continue;
                    }
                } else {
                    let u = (y0 - &t.intercept) / &t.slope;
                    let v = (y1 - &t.intercept) / &t.slope;
                    let (u, v) = if u < v { (u, v) } else { (v, u) };
                    (u.max(lo.clone()), v.min(hi.clone()))
                };
                if a < b {
                    total += &t.weight * (b - a);
                }
            }
        }
        total
    }
}

/// The piecewise-linear permuton supported on the graph of the zigzag map
/// built from `pattern`: `k-1` pieces of slope `±(k-1)`, rising on piece `i`
/// exactly when `pattern(i) > pattern(i+1)`. It avoids `pattern`.
pub fn build_zigzag(pattern: &Permutation) -> Result<TrackPermuton> {
    let k = pattern.order();
    if k < 2 {
        return Err(Error::InvalidParameter(
            "zigzag needs a pattern of order at least 2".into(),
        ));
    }
    let m = (k - 1) as i64;
    let pieces = (1..k)
        .map(|i| {
            let ii = i as i64;
            let track = if pattern.at(i) > pattern.at(i + 1) {
                // 0 at the left end, 1 at the right end
                Track::new(qi(m), qi(-(ii - 1)), qi(1))
            } else {
                Track::new(qi(-m), qi(ii), qi(1))
            };
            Piece {
                x_lo: rational::q(ii - 1, m),
                x_hi: rational::q(ii, m),
                tracks: vec![track],
            }
        })
        .collect();
    TrackPermuton::new(pieces)
}
