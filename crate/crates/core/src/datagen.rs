//! Synthetic datasets and the engine-versus-grid agreement benchmark.
//!
//! Every stream is a `ChaCha8Rng` seeded from a 64-bit value, so datasets are
//! reproducible across platforms and thread counts. Normals come from the
//! ziggurat sampler in `rand_distr`, gammas from Marsaglia–Tsang.

use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use rayon::prelude::*;

use crate::engine::primary_sensitivities;
use crate::error::{Error, Result};
use crate::geometry::FeasibleRegion;
use crate::moments::{OnlineMoments, Point2};
use crate::oracle::grid_sensitivities_with;

type P = Point2<f64>;

const UNIFORM_HALF_WIDTH: f64 = 10.0;
const OUTLIER_HALF_WIDTH: f64 = 30.0;
const OUTLIER_FRACTION: f64 = 0.1;
const DIRICHLET_ALPHA_MAX: f64 = 10.0;
const SINGULAR_DET: f64 = 1e-12;
const MAX_REDRAWS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DistributionKind {
    /// Independent coordinates, uniform on `[-10, 10]`.
    Uniform,
    /// Zero-mean normal with covariance `AᵀA`, entries of `A` uniform on `[0, 1]`.
    Gaussian,
    /// First two components of a 3-component Dirichlet, `alpha_i` uniform on `(0, 10]`.
    Dirichlet,
    /// `Gaussian` with 10% of the points replaced by uniform draws on `[-30, 30]²`.
    Contaminated,
}

impl DistributionKind {
    pub const ALL: [DistributionKind; 4] = [
        DistributionKind::Uniform,
        DistributionKind::Gaussian,
        DistributionKind::Dirichlet,
        DistributionKind::Contaminated,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            DistributionKind::Uniform => "uniform",
            DistributionKind::Gaussian => "gaussian",
            DistributionKind::Dirichlet => "dirichlet",
            DistributionKind::Contaminated => "contaminated",
        }
    }

    fn tag(&self) -> u64 {
        *self as u64 + 1
    }
}

impl fmt::Display for DistributionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DistributionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DistributionKind::ALL
            .into_iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::InvalidInput(format!("unknown distribution kind '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DistributionSpec {
    pub kind: DistributionKind,
    pub size: usize,
    pub seed: u64,
}

/// SplitMix64 finalizer over a running state; used to derive independent seeds.
pub fn mix_seed(state: u64, value: u64) -> u64 {
    let mut z = state ^ value.wrapping_add(0x9E37_79B9_7F4A_7C15).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Draws `spec.size` points. Deterministic in `spec`.
pub fn sample(spec: &DistributionSpec) -> Result<Vec<P>> {
    Ok(sample_tracked(spec)?.0)
}

/// Like [`sample`], also returning the indices replaced by outliers (empty
/// unless the kind is `Contaminated`).
pub fn sample_tracked(spec: &DistributionSpec) -> Result<(Vec<P>, Vec<usize>)> {
    if spec.size == 0 {
        return Err(Error::InvalidInput("sample size must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    match spec.kind {
        DistributionKind::Uniform => {
            let h = UNIFORM_HALF_WIDTH;
            let pts = (0..spec.size)
                .map(|_| Point2::new(rng.random_range(-h..=h), rng.random_range(-h..=h)))
                .collect();
            Ok((pts, Vec::new()))
        }
        DistributionKind::Gaussian => Ok((gaussian(&mut rng, spec.size)?, Vec::new())),
        DistributionKind::Dirichlet => Ok((dirichlet(&mut rng, spec.size)?, Vec::new())),
        DistributionKind::Contaminated => {
            let mut pts = gaussian(&mut rng, spec.size)?;
            let k = (OUTLIER_FRACTION * spec.size as f64).floor() as usize;
            let mut replaced = index::sample(&mut rng, spec.size, k).into_vec();
            replaced.sort_unstable();
            let h = OUTLIER_HALF_WIDTH;
            for &i in &replaced {
                pts[i] = Point2::new(rng.random_range(-h..=h), rng.random_range(-h..=h));
            }
            Ok((pts, replaced))
        }
    }
}

fn gaussian(rng: &mut ChaCha8Rng, size: usize) -> Result<Vec<P>> {
    // x = Aᵀ z has covariance AᵀA; det(AᵀA) = det(A)²
    let a = (0..MAX_REDRAWS)
        .map(|_| [[rng.random::<f64>(), rng.random::<f64>()], [rng.random::<f64>(), rng.random::<f64>()]])
        .find(|a| {
            let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
            det * det >= SINGULAR_DET
        })
        .ok_or_else(|| Error::Internal("could not draw a non-singular covariance".into()))?;
    Ok((0..size)
        .map(|_| {
            let z0: f64 = StandardNormal.sample(rng);
            let z1: f64 = StandardNormal.sample(rng);
            Point2::new(a[0][0] * z0 + a[1][0] * z1, a[0][1] * z0 + a[1][1] * z1)
        })
        .collect())
}

fn dirichlet(rng: &mut ChaCha8Rng, size: usize) -> Result<Vec<P>> {
    let mut gammas = Vec::with_capacity(3);
    for _ in 0..3 {
        let mut alpha = 0.0;
        while alpha <= 0.0 {
            alpha = rng.random::<f64>() * DIRICHLET_ALPHA_MAX;
        }
        gammas.push(Gamma::new(alpha, 1.0).map_err(|e| Error::Internal(e.to_string()))?);
    }
    let mut out = Vec::with_capacity(size);
    while out.len() < size {
        let g: [f64; 3] = [gammas[0].sample(rng), gammas[1].sample(rng), gammas[2].sample(rng)];
        let total = g[0] + g[1] + g[2];
        // all three underflowing is possible for tiny shapes; redraw
        if total > 0.0 && total.is_finite() {
            out.push(Point2::new(g[0] / total, g[1] / total));
        }
    }
    Ok(out)
}

/// Tight bounding box of a non-empty dataset.
pub fn bounding_box(points: &[P]) -> Result<FeasibleRegion<f64>> {
    FeasibleRegion::bounding(points)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub trials: usize,
    pub sizes: Vec<usize>,
    pub kinds: Vec<DistributionKind>,
    pub grid_resolution: usize,
    pub rel_tol: f64,
    pub seed: u64,
}

impl Default for BenchConfig {
    /// 100 trials of each kind at sizes 10, 50 and 100, a 10 x 10 grid and a
    /// relative tolerance of 1e-5.
    fn default() -> Self {
        BenchConfig {
            trials: 100,
            sizes: vec![10, 50, 100],
            kinds: DistributionKind::ALL.to_vec(),
            grid_resolution: 10,
            rel_tol: 1e-5,
            seed: 0,
        }
    }
}

/// One benchmark trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub kind: DistributionKind,
    pub size: usize,
    pub trial: usize,
    /// Seed of the dataset actually used.
    pub seed: u64,
    /// Redraws caused by degenerate variance.
    pub resamples: usize,
    pub engine_delta_r: f64,
    pub grid_delta_r: f64,
    pub rel_gap: f64,
    pub agrees: bool,
    /// `|engine - grid|` for `delta_r` when the lattice also holds the engine's candidates.
    pub augmented_gap: f64,
    pub straddle: bool,
    pub p_current: f64,
    pub engine_delta_p: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchCell {
    pub kind: DistributionKind,
    pub size: usize,
    pub trials: usize,
    pub agree_count: usize,
    pub agreement_rate: f64,
    pub max_rel_gap: f64,
    pub resamples: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub config: BenchConfig,
    pub cells: Vec<BenchCell>,
    pub records: Vec<TrialRecord>,
}

impl BenchReport {
    pub fn total_trials(&self) -> usize {
        self.records.len()
    }

    pub fn total_agree(&self) -> usize {
        self.records.iter().filter(|r| r.agrees).count()
    }

    pub fn overall_agreement(&self) -> f64 {
        if self.records.is_empty() {
            0.0
        } else {
            self.total_agree() as f64 / self.records.len() as f64
        }
    }

    pub fn total_resamples(&self) -> usize {
        self.records.iter().map(|r| r.resamples).sum()
    }
}

const MAX_RESAMPLES: usize = 100;

fn run_trial(cfg: &BenchConfig, kind: DistributionKind, size: usize, trial: usize) -> Result<TrialRecord> {
    let base = mix_seed(mix_seed(mix_seed(cfg.seed, kind.tag()), size as u64), trial as u64);
    for attempt in 0..=MAX_RESAMPLES {
        let seed = if attempt == 0 { base } else { mix_seed(base, attempt as u64) };
        let points = sample(&DistributionSpec { kind, size, seed })?;
        let summary = match OnlineMoments::from_dataset(&points)?.summarize() {
            Ok(s) => s,
            Err(Error::DegenerateVariance) => continue,
            Err(e) => return Err(e),
        };
        let region = bounding_box(&points)?;
        let engine = primary_sensitivities(&summary, &region)?;
        let plain = grid_sensitivities_with(&points, &region, cfg.grid_resolution, &[])?;
        let extra: Vec<P> = engine.candidates.iter().map(|c| c.point).collect();
        let augmented = grid_sensitivities_with(&points, &region, cfg.grid_resolution, &extra)?;

        let rel_gap = (engine.delta_r - plain.grid_delta_r).abs() / engine.delta_r.abs().max(1e-30);
        return Ok(TrialRecord {
            kind,
            size,
            trial,
            seed,
            resamples: attempt,
            engine_delta_r: engine.delta_r,
            grid_delta_r: plain.grid_delta_r,
            rel_gap,
            agrees: rel_gap <= cfg.rel_tol,
            augmented_gap: (engine.delta_r - augmented.grid_delta_r).abs(),
            straddle: engine.straddle,
            p_current: engine.p_current,
            engine_delta_p: engine.delta_p,
        });
    }
    Err(Error::Internal(format!(
        "{kind} n={size} trial {trial}: degenerate after {MAX_RESAMPLES} resamples"
    )))
}

/// Runs every (kind, size, trial) combination, in parallel, and aggregates
/// per cell. The result depends only on `cfg`.
pub fn run_benchmark(cfg: &BenchConfig) -> Result<BenchReport> {
    if cfg.trials == 0 || cfg.sizes.is_empty() || cfg.kinds.is_empty() {
        return Err(Error::InvalidInput("benchmark needs trials, sizes and kinds".into()));
    }
    if cfg.sizes.iter().any(|&n| n < 3) {
        return Err(Error::InvalidInput("benchmark sizes must be at least 3".into()));
    }
    if cfg.grid_resolution < 2 || cfg.rel_tol.is_nan() || cfg.rel_tol < 0.0 {
        return Err(Error::InvalidInput("grid resolution >= 2 and rel_tol >= 0 required".into()));
    }
    let jobs: Vec<(DistributionKind, usize, usize)> = cfg
        .kinds
        .iter()
        .flat_map(|&k| cfg.sizes.iter().flat_map(move |&n| (0..cfg.trials).map(move |t| (k, n, t))))
        .collect();
    let records = jobs
        .par_iter()
        .map(|&(k, n, t)| run_trial(cfg, k, n, t))
        .collect::<Result<Vec<_>>>()?;

    let cells = records
        .chunks(cfg.trials)
        .map(|chunk| {
            let agree_count = chunk.iter().filter(|r| r.agrees).count();
            BenchCell {
                kind: chunk[0].kind,
                size: chunk[0].size,
                trials: chunk.len(),
                agree_count,
                agreement_rate: agree_count as f64 / chunk.len() as f64,
                max_rel_gap: chunk.iter().map(|r| r.rel_gap).fold(0.0, f64::max),
                resamples: chunk.iter().map(|r| r.resamples).sum(),
            }
        })
        .collect();
    Ok(BenchReport {
        config: cfg.clone(),
        cells,
        records,
    })
}
