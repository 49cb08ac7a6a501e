//! Feasible rectangle, least-squares lines and the candidate points where the
//! augmented correlation attains its extrema.
//!
//! On a horizontal edge the partial derivative in x vanishes only on the
//! y-on-x regression line, and on a vertical edge the partial in y vanishes
//! only on the x-on-y line. The extrema over the rectangle therefore sit at a
//! corner or at one of those (at most four) crossings.

use std::fmt;

use crate::error::{Error, Result};
use crate::moments::{MomentSummary, Point2};
use crate::scalar::Scalar;

/// Axis-aligned rectangle `[lx, ux] x [ly, uy]` of admissible new points.
/// Zero width or height is allowed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibleRegion<T> {
    lx: T,
    ux: T,
    ly: T,
    uy: T,
}

impl<T: Scalar> FeasibleRegion<T> {
    pub fn new(lx: T, ux: T, ly: T, uy: T) -> Result<Self> {
        if [lx, ux, ly, uy].iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidRegion("bounds must be finite".into()));
        }
        if lx > ux || ly > uy {
            return Err(Error::InvalidRegion(format!(
                "need lx <= ux and ly <= uy, got [{lx}, {ux}] x [{ly}, {uy}]"
            )));
        }
        Ok(Self { lx, ux, ly, uy })
    }

    /// Tight bounding box of `points`.
    pub fn bounding<'a, I>(points: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a Point2<T>>,
    {
        let mut it = points.into_iter();
        let first = it
            .next()
            .ok_or_else(|| Error::InvalidInput("bounding box of an empty dataset".into()))?;
        let init = (first.x, first.x, first.y, first.y);
        let (lx, ux, ly, uy) = it.fold(init, |(lx, ux, ly, uy), p| {
            (lx.min(p.x), ux.max(p.x), ly.min(p.y), uy.max(p.y))
        });
        Self::new(lx, ux, ly, uy)
    }

    pub fn lx(&self) -> T {
        self.lx
    }

    pub fn ux(&self) -> T {
        self.ux
    }

    pub fn ly(&self) -> T {
        self.ly
    }

    pub fn uy(&self) -> T {
        self.uy
    }

    pub fn width(&self) -> T {
        self.ux - self.lx
    }

    pub fn height(&self) -> T {
        self.uy - self.ly
    }

    /// Inclusive membership.
    pub fn contains(&self, p: Point2<T>) -> bool {
        self.lx <= p.x && p.x <= self.ux && self.ly <= p.y && p.y <= self.uy
    }
}

/// Where a candidate point came from. The declaration order is the
/// tie-breaking order for witnesses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CandidateLabel {
    /// `(lx, ly)`
    CornerLl,
    /// `(lx, uy)`
    CornerLu,
    /// `(ux, ly)`
    CornerUl,
    /// `(ux, uy)`
    CornerUu,
    /// y-on-x line crossing `y = ly`
    IxLower,
    /// y-on-x line crossing `y = uy`
    IxUpper,
    /// x-on-y line crossing `x = lx`
    IyLeft,
    /// x-on-y line crossing `x = ux`
    IyRight,
}

impl CandidateLabel {
    pub const ALL: [CandidateLabel; 8] = [
        CandidateLabel::CornerLl,
        CandidateLabel::CornerLu,
        CandidateLabel::CornerUl,
        CandidateLabel::CornerUu,
        CandidateLabel::IxLower,
        CandidateLabel::IxUpper,
        CandidateLabel::IyLeft,
        CandidateLabel::IyRight,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            CandidateLabel::CornerLl => "corner-ll",
            CandidateLabel::CornerLu => "corner-lu",
            CandidateLabel::CornerUl => "corner-ul",
            CandidateLabel::CornerUu => "corner-uu",
            CandidateLabel::IxLower => "ix-lower",
            CandidateLabel::IxUpper => "ix-upper",
            CandidateLabel::IyLeft => "iy-left",
            CandidateLabel::IyRight => "iy-right",
        }
    }

    pub fn is_corner(&self) -> bool {
        matches!(
            self,
            CandidateLabel::CornerLl
                | CandidateLabel::CornerLu
                | CandidateLabel::CornerUl
                | CandidateLabel::CornerUu
        )
    }
}

impl fmt::Display for CandidateLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Least-squares lines of a dataset in both directions:
/// `y = alpha_x + beta_x x` and `x = alpha_y + beta_y y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlueLines<T> {
    pub beta_x: T,
    pub alpha_x: T,
    pub beta_y: T,
    pub alpha_y: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate<T> {
    pub point: Point2<T>,
    pub label: CandidateLabel,
}

/// Deduplicated corners and feasible line crossings, in label order.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSet<T> {
    candidates: Vec<Candidate<T>>,
}

impl<T: Scalar> CandidateSet<T> {
    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Candidate<T>> {
        self.candidates.iter()
    }

    pub fn as_slice(&self) -> &[Candidate<T>] {
        &self.candidates
    }

    pub fn points(&self) -> impl Iterator<Item = Point2<T>> + '_ {
        self.candidates.iter().map(|c| c.point)
    }
}

impl<'a, T> IntoIterator for &'a CandidateSet<T> {
    type Item = &'a Candidate<T>;
    type IntoIter = std::slice::Iter<'a, Candidate<T>>;

    fn into_iter(self) -> Self::IntoIter {
        self.candidates.iter()
    }
}

/// `(lx, ly), (lx, uy), (ux, ly), (ux, uy)`.
pub fn corner_points<T: Scalar>(f: &FeasibleRegion<T>) -> [Point2<T>; 4] {
    [
        Point2::new(f.lx, f.ly),
        Point2::new(f.lx, f.uy),
        Point2::new(f.ux, f.ly),
        Point2::new(f.ux, f.uy),
    ]
}

pub fn blue_lines<T: Scalar>(s: &MomentSummary<T>) -> Result<BlueLines<T>> {
    let (vx, vy) = (s.sx() * s.sx(), s.sy() * s.sy());
    if !(vx > T::zero() && vy > T::zero()) {
        return Err(Error::DegenerateVariance);
    }
    let beta_x = s.sxy() / vx;
    let beta_y = s.sxy() / vy;
    Ok(BlueLines {
        beta_x,
        alpha_x: s.mean_y() - beta_x * s.mean_x(),
        beta_y,
        alpha_y: s.mean_x() - beta_y * s.mean_y(),
    })
}

/// Moves `v` onto `[lo, hi]` when it misses by less than the snapping
/// tolerance; otherwise returns it unchanged.
fn snap<T: Scalar>(v: T, lo: T, hi: T) -> T {
    let tol = T::lit(T::SNAP_REL) * (hi - lo);
    if v < lo && lo - v <= tol {
        lo
    } else if v > hi && v - hi <= tol {
        hi
    } else {
        v
    }
}

/// Crossings of the regression lines with the rectangle's edges that lie in
/// the rectangle. Lines parallel to an edge contribute nothing.
pub fn intersection_points<T: Scalar>(
    b: &BlueLines<T>,
    f: &FeasibleRegion<T>,
) -> Vec<Candidate<T>> {
    let parallel = T::lit(T::PARALLEL_SLOPE);
    let mut out = Vec::with_capacity(4);

    if b.beta_x.abs() >= parallel {
        for (y, label) in [(f.ly, CandidateLabel::IxLower), (f.uy, CandidateLabel::IxUpper)] {
            let x = snap((y - b.alpha_x) / b.beta_x, f.lx, f.ux);
            let p = Point2::new(x, y);
            if p.is_finite() && f.contains(p) {
                out.push(Candidate { point: p, label });
            }
        }
    }
    if b.beta_y.abs() >= parallel {
        for (x, label) in [(f.lx, CandidateLabel::IyLeft), (f.ux, CandidateLabel::IyRight)] {
            let y = snap((x - b.alpha_y) / b.beta_y, f.ly, f.uy);
            let p = Point2::new(x, y);
            if p.is_finite() && f.contains(p) {
                out.push(Candidate { point: p, label });
            }
        }
    }
    out
}

/// Corners plus feasible crossings, deduplicated with the first label kept.
pub fn candidate_set<T: Scalar>(
    s: &MomentSummary<T>,
    f: &FeasibleRegion<T>,
) -> Result<CandidateSet<T>> {
    let lines = blue_lines(s)?;
    let corners = corner_points(f)
        .into_iter()
        .zip(CandidateLabel::ALL)
        .map(|(point, label)| Candidate { point, label });
    let all = corners.chain(intersection_points(&lines, f));

    let tol = T::lit(T::SNAP_REL) * f.width().max(f.height());
    let mut candidates: Vec<Candidate<T>> = Vec::with_capacity(8);
    for c in all {
        let dup = candidates
            .iter()
            .any(|k| (k.point.x - c.point.x).abs() <= tol && (k.point.y - c.point.y).abs() <= tol);
        if !dup {
            candidates.push(c);
        }
    }
    Ok(CandidateSet { candidates })
}
