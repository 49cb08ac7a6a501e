//! Worst-case change of the correlation and its p-value under one added point.
//!
//! Everything here consumes a [`MomentSummary`], never raw data, so a report
//! costs the same for ten points as for ten million once the summary exists.

use crate::error::{Error, Result};
use crate::geometry::{candidate_set, CandidateLabel, FeasibleRegion};
use crate::moments::{MomentSummary, OnlineMoments, Point2};
use crate::scalar::Scalar;
use crate::stats::{clamp_unit, p_value, pcc};

/// Correlation of the dataset behind `s` with `p` appended:
///
/// `(N sxy + dx dy) / sqrt((N sx² + dx²)(N sy² + dy²))`, `N = count + 1`,
/// where `dx, dy` are the offsets of `p` from the current means.
pub fn augmented_pcc<T: Scalar>(s: &MomentSummary<T>, p: Point2<T>) -> Result<T> {
    if !p.is_finite() {
        return Err(Error::InvalidInput("augmenting point must be finite".into()));
    }
    let n = T::from_count(s.count() + 1);
    let dx = p.x - s.mean_x();
    let dy = p.y - s.mean_y();
    let num = n * s.sxy() + dx * dy;
    let den = (n * s.sx() * s.sx() + dx * dx).sqrt() * (n * s.sy() * s.sy() + dy * dy).sqrt();
    clamp_unit(num / den)
}

/// Analytic first and second partial derivatives of [`augmented_pcc`] with
/// respect to the coordinates of the added point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PccPartials<T> {
    pub dx: T,
    pub dy: T,
    pub dxx: T,
    pub dyy: T,
    pub dxy: T,
}

pub fn augmented_pcc_partials<T: Scalar>(s: &MomentSummary<T>, p: Point2<T>) -> Result<PccPartials<T>> {
    let r = pcc(s)?;
    let n = T::from_count(s.count() + 1);
    let (sx, sy) = (s.sx(), s.sy());
    let dx = p.x - s.mean_x();
    let dy = p.y - s.mean_y();
    let a = n * sx * sx + dx * dx;
    let b = n * sy * sy + dy * dy;
    let (ra, rb) = (a.sqrt(), b.sqrt());
    let (a3, b3) = (a * ra, b * rb);
    let (a5, b5) = (a3 * a, b3 * b);
    let two = T::lit(2.0);
    let three = T::lit(3.0);

    Ok(PccPartials {
        dx: n * sx * (sx * dy - r * sy * dx) / (a3 * rb),
        dy: n * sy * (sy * dx - r * sx * dy) / (ra * b3),
        dxx: n * sx * (two * r * sy * dx * dx - n * r * sx * sx * sy - three * sx * dx * dy) / (a5 * rb),
        dyy: n * sy * (two * r * sx * dy * dy - n * r * sx * sy * sy - three * sy * dx * dy) / (ra * b5),
        dxy: n * sx * sy * (n * sx * sy + r * dx * dy) / (a3 * b3),
    })
}

/// A candidate point with the statistics of the augmented dataset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CandidateEval<T> {
    pub point: Point2<T>,
    pub label: CandidateLabel,
    pub r_aug: T,
    pub p_aug: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RWitness<T> {
    pub point: Point2<T>,
    pub label: CandidateLabel,
    pub r_aug: T,
}

/// Point attaining the largest p-value change.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PWitness<T> {
    Candidate {
        point: Point2<T>,
        label: CandidateLabel,
        p_aug: T,
    },
    /// The candidate correlations straddle zero, so some feasible point sends
    /// the correlation to zero and the p-value to one. Its location is not
    /// constructed.
    Stationary,
}

impl<T: Scalar> PWitness<T> {
    pub fn p_aug(&self) -> T {
        match self {
            PWitness::Candidate { p_aug, .. } => *p_aug,
            PWitness::Stationary => T::one(),
        }
    }
}

/// Primary sensitivities of a dataset within a region.
#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityReport<T> {
    /// Cardinality of the dataset before augmentation.
    pub count: u64,
    pub r_current: T,
    pub p_current: T,
    pub delta_r: T,
    pub delta_p: T,
    pub witness_r: RWitness<T>,
    pub witness_p: PWitness<T>,
    /// Candidate correlations span zero.
    pub straddle: bool,
    pub candidates: Vec<CandidateEval<T>>,
}

/// Index of the first element within the tie tolerance of the maximum.
fn first_max<T: Scalar>(values: impl Iterator<Item = T> + Clone) -> (usize, T) {
    let best = values.clone().fold(T::neg_infinity(), T::max);
    let tie = T::lit(T::TIE_TOL);
    let idx = values.clone().position(|v| v >= best - tie).unwrap_or(0);
    (idx, best)
}

/// Exact worst-case change of the correlation and of its p-value when one
/// point from `f` is added to the dataset summarized by `s`.
///
/// The p-value of the current dataset uses `df = count - 2`; augmented
/// candidates use `df = count - 1`.
pub fn primary_sensitivities<T: Scalar>(
    s: &MomentSummary<T>,
    f: &FeasibleRegion<T>,
) -> Result<SensitivityReport<T>> {
    if s.count() < 3 {
        return Err(Error::PValueUndefined);
    }
    let r_current = pcc(s)?;
    let p_current = p_value(r_current, s.count())?.p;

    let set = candidate_set(s, f)?;
    let candidates = set
        .iter()
        .map(|c| {
            let r_aug = augmented_pcc(s, c.point)?;
            let p_aug = p_value(r_aug, s.count() + 1)?.p;
            Ok(CandidateEval {
                point: c.point,
                label: c.label,
                r_aug,
                p_aug,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if candidates.is_empty() {
        return Err(Error::Internal("empty candidate set".into()));
    }

    let (ir, delta_r) = first_max(candidates.iter().map(|c| (r_current - c.r_aug).abs()));
    let (ip, candidate_dp) = first_max(candidates.iter().map(|c| (p_current - c.p_aug).abs()));
    if delta_r > T::lit(2.0) {
        return Err(Error::Internal(format!("delta_r = {delta_r} exceeds 2")));
    }

    let r_max = candidates.iter().map(|c| c.r_aug).fold(T::neg_infinity(), T::max);
    let r_min = candidates.iter().map(|c| c.r_aug).fold(T::infinity(), T::min);
    let straddle = r_max >= T::zero() && T::zero() >= r_min;

    let wr = &candidates[ir];
    let wp = &candidates[ip];
    let stationary_gap = T::one() - p_current;
    let (delta_p, witness_p) = if straddle && stationary_gap > candidate_dp {
        (stationary_gap, PWitness::Stationary)
    } else {
        (
            candidate_dp,
            PWitness::Candidate {
                point: wp.point,
                label: wp.label,
                p_aug: wp.p_aug,
            },
        )
    };

    Ok(SensitivityReport {
        count: s.count(),
        r_current,
        p_current,
        delta_r,
        delta_p,
        witness_r: RWitness {
            point: wr.point,
            label: wr.label,
            r_aug: wr.r_aug,
        },
        witness_p,
        straddle,
        candidates,
    })
}

/// One step of online monitoring: the prediction made before `point`
/// arrived, and what adding it actually did.
#[derive(Debug, Clone, PartialEq)]
pub struct StreamRecord<T> {
    pub index: u64,
    pub point: Point2<T>,
    pub report_before: SensitivityReport<T>,
    pub r_after: T,
    pub observed_delta_r: T,
    /// `observed_delta_r <= report_before.delta_r + 1e-9`. Only guaranteed
    /// when `point_in_region`.
    pub within_prediction: bool,
    pub point_in_region: bool,
}

/// Slack allowed between an observed change and its prediction.
pub const PREDICTION_SLACK: f64 = 1e-9;

/// Predicts from `state`, then absorbs `point`. Returns the record and the
/// updated state; `state` itself is not modified.
pub fn stream_step<T: Scalar>(
    state: &OnlineMoments<T>,
    point: Point2<T>,
    f: &FeasibleRegion<T>,
) -> Result<(StreamRecord<T>, OnlineMoments<T>)> {
    let before = state.summarize()?;
    let report_before = primary_sensitivities(&before, f)?;
    let next = state.update(point)?;
    let r_after = pcc(&next.summarize()?)?;
    let observed_delta_r = (r_after - report_before.r_current).abs();
    let within_prediction = observed_delta_r <= report_before.delta_r + T::lit(PREDICTION_SLACK);
    Ok((
        StreamRecord {
            index: state.count(),
            point,
            report_before,
            r_after,
            observed_delta_r,
            within_prediction,
            point_in_region: f.contains(point),
        },
        next,
    ))
}
