//! Streaming bivariate moments.
//!
//! [`OnlineMoments`] absorbs points one at a time with Welford's recurrences and
//! keeps co-moment sums rather than variances, so the biased statistics are
//! derived on demand as `sum / count`.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A point in the plane. Coordinates are expected to be finite; use
/// [`Point2::checked`] at input boundaries.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2<T> {
    pub x: T,
    pub y: T,
}

impl<T: Scalar> Point2<T> {
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    /// Builds a point, rejecting NaN and infinities. `index` is reported in the error.
    pub fn checked(x: T, y: T, index: usize) -> Result<Self> {
        let p = Self { x, y };
        if p.is_finite() {
            Ok(p)
        } else {
            Err(Error::NonFinite { index })
        }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl<T: Scalar> From<(T, T)> for Point2<T> {
    fn from((x, y): (T, T)) -> Self {
        Self { x, y }
    }
}

/// Welford accumulator for a bivariate dataset.
///
/// `m2_x`, `m2_y` and `c_xy` are sums of squared / cross deviations from the
/// running means, i.e. `count` times the biased (co)variances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OnlineMoments<T> {
    count: u64,
    mean_x: T,
    mean_y: T,
    m2_x: T,
    m2_y: T,
    c_xy: T,
}

impl<T: Scalar> Default for OnlineMoments<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Scalar> OnlineMoments<T> {
    pub fn new() -> Self {
        let z = T::zero();
        Self {
            count: 0,
            mean_x: z,
            mean_y: z,
            m2_x: z,
            m2_y: z,
            c_xy: z,
        }
    }

    /// Single pass over `points`, equivalent to folding [`update`](Self::update).
    pub fn from_dataset<'a, I>(points: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a Point2<T>>,
    {
        let mut acc = Self::new();
        for (index, p) in points.into_iter().enumerate() {
            if !p.is_finite() {
                return Err(Error::NonFinite { index });
            }
            acc.absorb(*p);
        }
        Ok(acc)
    }

    /// Returns the accumulator of the current multiset plus `p`; `self` is untouched.
    pub fn update(&self, p: Point2<T>) -> Result<Self> {
        let mut next = *self;
        next.push(p)?;
        Ok(next)
    }

    /// In-place form of [`update`](Self::update).
    pub fn push(&mut self, p: Point2<T>) -> Result<()> {
        if !p.is_finite() {
            return Err(Error::NonFinite {
                index: self.count as usize,
            });
        }
        self.absorb(p);
        Ok(())
    }

    #[inline]
    fn absorb(&mut self, p: Point2<T>) {
        self.count += 1;
        let n = T::from_count(self.count);
        let dx = p.x - self.mean_x;
        let dy = p.y - self.mean_y;
        self.mean_x = self.mean_x + dx / n;
        self.mean_y = self.mean_y + dy / n;
        self.m2_x = self.m2_x + dx * (p.x - self.mean_x);
        self.m2_y = self.m2_y + dy * (p.y - self.mean_y);
        self.c_xy = self.c_xy + dx * (p.y - self.mean_y);
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean_x(&self) -> T {
        self.mean_x
    }

    pub fn mean_y(&self) -> T {
        self.mean_y
    }

    pub fn m2_x(&self) -> T {
        self.m2_x
    }

    pub fn m2_y(&self) -> T {
        self.m2_y
    }

    pub fn c_xy(&self) -> T {
        self.c_xy
    }

    /// Biased summary statistics. Needs at least two points and non-zero
    /// spread on both axes.
    pub fn summarize(&self) -> Result<MomentSummary<T>> {
        if self.count < 2 {
            return Err(Error::InsufficientData {
                needed: 2,
                got: self.count,
            });
        }
        let n = T::from_count(self.count);
        if is_degenerate(self.m2_x, self.mean_x, n) || is_degenerate(self.m2_y, self.mean_y, n) {
            return Err(Error::DegenerateVariance);
        }
        Ok(MomentSummary {
            count: self.count,
            mean_x: self.mean_x,
            mean_y: self.mean_y,
            sx: (self.m2_x / n).sqrt(),
            sy: (self.m2_y / n).sqrt(),
            sxy: self.c_xy / n,
        })
    }
}

// m2 <= floor * max(1, mean^2) * count
fn is_degenerate<T: Scalar>(m2: T, mean: T, n: T) -> bool {
    let scale = (mean * mean).max(T::one());
    m2.is_nan() || m2 <= T::lit(T::VARIANCE_FLOOR) * scale * n
}

/// Biased statistics of a dataset with at least two points and non-degenerate spread.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSummary<T> {
    count: u64,
    mean_x: T,
    mean_y: T,
    sx: T,
    sy: T,
    sxy: T,
}

impl<T: Scalar> MomentSummary<T> {
    /// Assembles a summary from precomputed statistics, applying the same
    /// checks as [`OnlineMoments::summarize`]. `sx` and `sy` are biased standard
    /// deviations and `sxy` the biased covariance.
    pub fn from_parts(count: u64, mean_x: T, mean_y: T, sx: T, sy: T, sxy: T) -> Result<Self> {
        if count < 2 {
            return Err(Error::InsufficientData { needed: 2, got: count });
        }
        let all = [mean_x, mean_y, sx, sy, sxy];
        if all.iter().any(|v| !v.is_finite()) || sx < T::zero() || sy < T::zero() {
            return Err(Error::InvalidInput(
                "summary statistics must be finite with non-negative deviations".into(),
            ));
        }
        let n = T::from_count(count);
        if is_degenerate(sx * sx * n, mean_x, n) || is_degenerate(sy * sy * n, mean_y, n) {
            return Err(Error::DegenerateVariance);
        }
        Ok(Self {
            count,
            mean_x,
            mean_y,
            sx,
            sy,
            sxy,
        })
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean_x(&self) -> T {
        self.mean_x
    }

    pub fn mean_y(&self) -> T {
        self.mean_y
    }

    pub fn mean(&self) -> Point2<T> {
        Point2::new(self.mean_x, self.mean_y)
    }

    /// Biased standard deviation of x.
    pub fn sx(&self) -> T {
        self.sx
    }

    /// Biased standard deviation of y.
    pub fn sy(&self) -> T {
        self.sy
    }

    /// Biased covariance.
    pub fn sxy(&self) -> T {
        self.sxy
    }
}
