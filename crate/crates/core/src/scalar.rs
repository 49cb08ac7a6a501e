use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating-point type the statistics are computed in.
///
/// The associated tolerances are absolute numbers expressed in `f64` and
/// converted on use. They are tuned per precision: the `f64` values are the
/// reference contract, the `f32` values are loosened to what single precision
/// can resolve.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Sum + Send + Sync + 'static
{
    /// Relative floor under which a second-moment sum counts as zero.
    const VARIANCE_FLOOR: f64;
    /// Largest excess over `|r| = 1` that is clamped instead of reported.
    const CLAMP_SLACK: f64;
    /// Relative distance (of an axis span) within which intersections snap onto a bound.
    const SNAP_REL: f64;
    /// Slopes with smaller magnitude are treated as parallel to an axis.
    const PARALLEL_SLOPE: f64;
    /// Convergence tolerance of the incomplete-beta continued fraction.
    const SERIES_TOL: f64;
    /// Smallest magnitude kept in the Lentz recurrence.
    const TINY: f64;
    /// Values this close to a maximum count as attaining it.
    const TIE_TOL: f64;

    /// Converts an `f64` literal. Panics only for values outside the type's range,
    /// which no literal in this crate is.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal representable in scalar type")
    }

    #[inline]
    fn from_count(n: u64) -> Self {
        Self::from_u64(n).expect("count representable in scalar type")
    }
}

impl Scalar for f64 {
    const VARIANCE_FLOOR: f64 = 1e-24;
    const CLAMP_SLACK: f64 = 1e-9;
    const SNAP_REL: f64 = 1e-12;
    const PARALLEL_SLOPE: f64 = 1e-300;
    const SERIES_TOL: f64 = 1e-15;
    const TINY: f64 = 1e-300;
    const TIE_TOL: f64 = 1e-12;
}

impl Scalar for f32 {
    const VARIANCE_FLOOR: f64 = 1e-12;
    const CLAMP_SLACK: f64 = 1e-4;
    const SNAP_REL: f64 = 1e-5;
    const PARALLEL_SLOPE: f64 = 1e-37;
    const SERIES_TOL: f64 = 1e-7;
    const TINY: f64 = 1e-30;
    const TIE_TOL: f64 = 1e-5;
}
