//! Exact worst-case sensitivity of the Pearson correlation coefficient, and of
//! its t-test p-value, to one additional observation inside a rectangle.
//!
//! The extrema of the augmented correlation over the rectangle lie among at
//! most eight points: the four corners and the feasible crossings of the two
//! least-squares lines with the edges. [`primary_sensitivities`] evaluates
//! those in constant time from a [`MomentSummary`].
//!
//! The numerical core is generic over [`Scalar`] (`f32`, `f64`); the aliases
//! below fix it to `f64`. The [`oracle`] and [`datagen`] modules work in `f64`.

pub mod datagen;
pub mod engine;
pub mod error;
pub mod geometry;
pub mod moments;
pub mod oracle;
pub mod scalar;
pub mod stats;

pub use engine::{
    augmented_pcc, augmented_pcc_partials, primary_sensitivities, stream_step, CandidateEval,
    PWitness, PccPartials, RWitness, SensitivityReport, StreamRecord,
};
pub use error::{Error, Result};
pub use geometry::{
    blue_lines, candidate_set, corner_points, intersection_points, BlueLines, Candidate,
    CandidateLabel, CandidateSet, FeasibleRegion,
};
pub use moments::{MomentSummary, OnlineMoments, Point2};
pub use scalar::Scalar;
pub use stats::{p_value, pcc, t_cdf, TTestResult};

pub type Point = Point2<f64>;
pub type Moments = OnlineMoments<f64>;
pub type Summary = MomentSummary<f64>;
pub type Region = FeasibleRegion<f64>;
pub type Report = SensitivityReport<f64>;
pub type Record = StreamRecord<f64>;

pub type Point32 = Point2<f32>;
pub type Moments32 = OnlineMoments<f32>;
pub type Summary32 = MomentSummary<f32>;
pub type Region32 = FeasibleRegion<f32>;
pub type Report32 = SensitivityReport<f32>;
