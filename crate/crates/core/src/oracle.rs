//! Brute-force and finite-difference checks of the closed-form engine.
//!
//! The lattice search recomputes every correlation from raw points with a
//! textbook two-pass sum and never touches [`crate::moments`], so it shares
//! no arithmetic with the path it checks.

use rayon::prelude::*;

use crate::engine::{augmented_pcc, augmented_pcc_partials, primary_sensitivities};
use crate::error::{Error, Result};
use crate::geometry::FeasibleRegion;
use crate::moments::{MomentSummary, OnlineMoments, Point2};
use crate::stats::{p_value, pcc};

type P = Point2<f64>;

const VARIANCE_FLOOR: f64 = 1e-24;

/// Pearson correlation by direct two-pass summation.
pub fn pcc_two_pass(points: &[P]) -> Result<f64> {
    two_pass(points, None)
}

/// Two-pass correlation of `base` with an optional extra point appended.
fn two_pass(base: &[P], extra: Option<P>) -> Result<f64> {
    let n = base.len() + usize::from(extra.is_some());
    if n < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: n as u64,
        });
    }
    let all = || base.iter().copied().chain(extra);
    let nf = n as f64;
    let (sx, sy) = all().fold((0.0, 0.0), |(a, b), p| (a + p.x, b + p.y));
    let (mx, my) = (sx / nf, sy / nf);
    let (mut vxx, mut vyy, mut vxy) = (0.0, 0.0, 0.0);
    for p in all() {
        let (dx, dy) = (p.x - mx, p.y - my);
        vxx += dx * dx;
        vyy += dy * dy;
        vxy += dx * dy;
    }
    let floor = |v: f64, m: f64| v <= VARIANCE_FLOOR * (m * m).max(1.0) * nf;
    if floor(vxx, mx) || floor(vyy, my) {
        return Err(Error::DegenerateVariance);
    }
    Ok((vxy / (vxx * vyy).sqrt()).clamp(-1.0, 1.0))
}

/// The `i`-th of `k` equidistant values on `[lo, hi]`, endpoints exact.
fn lattice_coord(lo: f64, hi: f64, k: usize, i: usize) -> f64 {
    if i == 0 {
        lo
    } else if i + 1 == k {
        hi
    } else {
        lo + (hi - lo) * (i as f64 / (k - 1) as f64)
    }
}

/// Equidistant `k x k` lattice over `f`, row-major in x, corners included.
pub fn lattice(f: &FeasibleRegion<f64>, k: usize) -> Vec<P> {
    let mut out = Vec::with_capacity(k * k);
    for i in 0..k {
        let x = lattice_coord(f.lx(), f.ux(), k, i);
        for j in 0..k {
            out.push(Point2::new(x, lattice_coord(f.ly(), f.uy(), k, j)));
        }
    }
    out
}

/// Grid search against the engine.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub grid_delta_r: f64,
    pub grid_delta_p: f64,
    /// Lattice point attaining `grid_delta_r` (lowest index on ties).
    pub grid_witness: P,
    pub grid_resolution: usize,
    /// Smallest `|r|` of any augmented dataset on the lattice.
    pub grid_min_abs_r: f64,
    /// Lattice correlations span zero.
    pub grid_straddle: bool,
    pub engine_delta_r: f64,
    pub engine_delta_p: f64,
    /// Largest relative gap between the grid and engine values of `delta_r` and `delta_p`.
    pub agree_within: f64,
}

#[derive(Debug, Clone, Copy)]
struct Eval {
    idx: usize,
    dr: f64,
    dp: f64,
    r: f64,
}

#[derive(Debug, Clone, Copy)]
struct Acc {
    best_r: (f64, usize),
    best_p: f64,
    r_min: f64,
    r_max: f64,
    min_abs: f64,
}

impl Acc {
    fn empty() -> Self {
        Acc {
            best_r: (f64::NEG_INFINITY, usize::MAX),
            best_p: f64::NEG_INFINITY,
            r_min: f64::INFINITY,
            r_max: f64::NEG_INFINITY,
            min_abs: f64::INFINITY,
        }
    }

    fn add(mut self, e: Eval) -> Self {
        if e.dr > self.best_r.0 || (e.dr == self.best_r.0 && e.idx < self.best_r.1) {
            self.best_r = (e.dr, e.idx);
        }
        self.best_p = self.best_p.max(e.dp);
        self.r_min = self.r_min.min(e.r);
        self.r_max = self.r_max.max(e.r);
        self.min_abs = self.min_abs.min(e.r.abs());
        self
    }

    fn merge(self, o: Acc) -> Self {
        let best_r = if o.best_r.0 > self.best_r.0 || (o.best_r.0 == self.best_r.0 && o.best_r.1 < self.best_r.1) {
            o.best_r
        } else {
            self.best_r
        };
        Acc {
            best_r,
            best_p: self.best_p.max(o.best_p),
            r_min: self.r_min.min(o.r_min),
            r_max: self.r_max.max(o.r_max),
            min_abs: self.min_abs.min(o.min_abs),
        }
    }
}

fn rel_gap(engine: f64, grid: f64) -> f64 {
    (engine - grid).abs() / engine.abs().max(1e-30)
}

/// Sensitivities over a `resolution x resolution` lattice on `f`, compared
/// with [`primary_sensitivities`].
pub fn grid_sensitivities(points: &[P], f: &FeasibleRegion<f64>, resolution: usize) -> Result<OracleReport> {
    grid_sensitivities_with(points, f, resolution, &[])
}

/// As [`grid_sensitivities`], with `extra` points appended to the lattice.
pub fn grid_sensitivities_with(
    points: &[P],
    f: &FeasibleRegion<f64>,
    resolution: usize,
    extra: &[P],
) -> Result<OracleReport> {
    if resolution < 2 {
        return Err(Error::InvalidInput("grid resolution must be at least 2".into()));
    }
    let m = points.len() as u64;
    let r0 = pcc_two_pass(points)?;
    let p0 = p_value(r0, m)?.p;

    let mut probes = lattice(f, resolution);
    probes.extend_from_slice(extra);

    let acc = probes
        .par_iter()
        .enumerate()
        .map(|(idx, &g)| {
            let r = two_pass(points, Some(g))?;
            let p = p_value(r, m + 1)?.p;
            Ok(Eval {
                idx,
                dr: (r0 - r).abs(),
                dp: (p0 - p).abs(),
                r,
            })
        })
        .try_fold(Acc::empty, |acc, e: Result<Eval>| e.map(|e| acc.add(e)))
        .try_reduce(Acc::empty, |a, b| Ok(a.merge(b)))?;

    let grid_straddle = acc.r_max >= 0.0 && 0.0 >= acc.r_min;
    let grid_delta_p = if grid_straddle {
        acc.best_p.max(1.0 - p0)
    } else {
        acc.best_p
    };

    let summary = OnlineMoments::from_dataset(points)?.summarize()?;
    let engine = primary_sensitivities(&summary, f)?;

    Ok(OracleReport {
        grid_delta_r: acc.best_r.0,
        grid_delta_p,
        grid_witness: probes[acc.best_r.1],
        grid_resolution: resolution,
        grid_min_abs_r: acc.min_abs,
        grid_straddle,
        engine_delta_r: engine.delta_r,
        engine_delta_p: engine.delta_p,
        agree_within: rel_gap(engine.delta_r, acc.best_r.0).max(rel_gap(engine.delta_p, grid_delta_p)),
    })
}

/// Analytic against numeric value of one partial derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartialCheck {
    pub name: &'static str,
    pub analytic: f64,
    pub numeric: f64,
    /// `|analytic - numeric|` over `max(|analytic|, |numeric|, scale)`, where
    /// `scale` is the derivative's characteristic size near the mean.
    pub rel_err: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientCheck {
    pub dx: PartialCheck,
    pub dy: PartialCheck,
    pub dxx: PartialCheck,
    pub dyy: PartialCheck,
    pub dxy: PartialCheck,
}

impl GradientCheck {
    pub fn all(&self) -> [PartialCheck; 5] {
        [self.dx, self.dy, self.dxx, self.dyy, self.dxy]
    }

    pub fn max_first_order_err(&self) -> f64 {
        self.dx.rel_err.max(self.dy.rel_err)
    }

    pub fn max_second_order_err(&self) -> f64 {
        self.dxx.rel_err.max(self.dyy.rel_err).max(self.dxy.rel_err)
    }

    /// Determinant of the numeric Hessian.
    pub fn numeric_hessian_det(&self) -> f64 {
        self.dxx.numeric * self.dyy.numeric - self.dxy.numeric * self.dxy.numeric
    }
}

/// Central differences of [`augmented_pcc`] against the analytic partials.
///
/// The step along each axis is `h` times the length scale of the surface in
/// that direction, `sqrt(N s² + d²)` with `d` the offset of `p` from the mean.
pub fn gradient_check(s: &MomentSummary<f64>, p: P, h: f64) -> Result<GradientCheck> {
    if h.is_nan() || h <= 0.0 {
        return Err(Error::InvalidInput("finite-difference step must be positive".into()));
    }
    let a = augmented_pcc_partials(s, p)?;
    let n = (s.count() + 1) as f64;
    let lx = (n * s.sx() * s.sx() + (p.x - s.mean_x()).powi(2)).sqrt();
    let ly = (n * s.sy() * s.sy() + (p.y - s.mean_y()).powi(2)).sqrt();
    let (hx, hy) = (h * lx, h * ly);

    let r = |dx: f64, dy: f64| augmented_pcc(s, Point2::new(p.x + dx, p.y + dy));
    let f0 = r(0.0, 0.0)?;
    let (fxp, fxm) = (r(hx, 0.0)?, r(-hx, 0.0)?);
    let (fyp, fym) = (r(0.0, hy)?, r(0.0, -hy)?);
    let (fpp, fpm, fmp, fmm) = (r(hx, hy)?, r(hx, -hy)?, r(-hx, hy)?, r(-hx, -hy)?);

    let num_dx = (fxp - fxm) / (2.0 * hx);
    let num_dy = (fyp - fym) / (2.0 * hy);
    let num_dxx = (fxp - 2.0 * f0 + fxm) / (hx * hx);
    let num_dyy = (fyp - 2.0 * f0 + fym) / (hy * hy);
    let num_dxy = (fpp - fpm - fmp + fmm) / (4.0 * hx * hy);

    let sn = n.sqrt();
    let check = |name, analytic: f64, numeric: f64, scale: f64| PartialCheck {
        name,
        analytic,
        numeric,
        rel_err: (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(scale),
    };
    Ok(GradientCheck {
        dx: check("dr/dx", a.dx, num_dx, 1e-3 / (sn * s.sx())),
        dy: check("dr/dy", a.dy, num_dy, 1e-3 / (sn * s.sy())),
        dxx: check("d2r/dx2", a.dxx, num_dxx, 1e-3 / (n * s.sx() * s.sx())),
        dyy: check("d2r/dy2", a.dyy, num_dyy, 1e-3 / (n * s.sy() * s.sy())),
        dxy: check("d2r/dxdy", a.dxy, num_dxy, 1e-3 / (n * s.sx() * s.sy())),
    })
}

/// Determinant of the Hessian of the augmented correlation at the current
/// mean, `(r² - 1) / (N² sx² sy²)`. Negative unless `|r| = 1`: the mean is a
/// saddle point.
pub fn hessian_det_at_mean(s: &MomentSummary<f64>) -> Result<f64> {
    let r = pcc(s)?;
    let n = (s.count() + 1) as f64;
    Ok((r * r - 1.0) / (n * n * s.sx() * s.sx() * s.sy() * s.sy()))
}
