//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits non-zero if any failed.

use std::f64::consts::PI;
use std::hint::black_box;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pccsens::datagen::{run_benchmark, BenchConfig, BenchReport};
use pccsens::oracle::{gradient_check, grid_sensitivities, hessian_det_at_mean};
use pccsens::{
    augmented_pcc, p_value, pcc, primary_sensitivities, t_cdf, Moments, PWitness, Point, Region,
    Report, Summary,
};

type Outcome = Result<String, String>;

fn check(cond: bool, ok: String, fail: String) -> Outcome {
    if cond {
        Ok(ok)
    } else {
        Err(fail)
    }
}

fn summary_of(points: &[Point]) -> Summary {
    Moments::from_dataset(points).unwrap().summarize().unwrap()
}

fn pts(v: &[(f64, f64)]) -> Vec<Point> {
    v.iter().map(|&p| p.into()).collect()
}

// --- 1-3: the synthetic benchmark ------------------------------------------

const BENCH_SEED: u64 = 2024;

fn benchmark_agreement(bench: &BenchReport) -> Outcome {
    let rate = bench.overall_agreement();
    let detail = format!(
        "{}/{} trials agree at rel tol 1e-5 on a 10x10 grid ({:.2}%; resampled {})",
        bench.total_agree(),
        bench.total_trials(),
        100.0 * rate,
        bench.total_resamples()
    );
    check(bench.total_trials() == 1200 && rate >= 0.90, detail.clone(), detail)
}

fn dominance_and_convergence(bench: &BenchReport) -> Outcome {
    let dominated = bench
        .records
        .iter()
        .filter(|r| r.grid_delta_r <= r.engine_delta_r + 1e-9)
        .count();
    let exact = bench.records.iter().filter(|r| r.augmented_gap <= 1e-9).count();
    let n = bench.total_trials();
    let worst = bench.records.iter().map(|r| r.augmented_gap).fold(0.0, f64::max);
    let detail = format!(
        "engine >= grid in {dominated}/{n}; candidate-augmented grid equal in {exact}/{n} (worst gap {worst:.1e})"
    );
    check(dominated == n && exact == n, detail.clone(), detail)
}

fn straddle_identity(bench: &BenchReport) -> Outcome {
    use pccsens::datagen::{sample, DistributionSpec};

    let mut straddling = 0;
    let mut dominant = 0;
    let mut failures = Vec::new();
    for rec in bench.records.iter().filter(|r| r.straddle) {
        straddling += 1;
        let points = sample(&DistributionSpec {
            kind: rec.kind,
            size: rec.size,
            seed: rec.seed,
        })
        .unwrap();
        let region = Region::bounding(&points).unwrap();
        let rep = primary_sensitivities(&summary_of(&points), &region).unwrap();
        let gap = 1.0 - rep.p_current;
        let candidate_dp = rep
            .candidates
            .iter()
            .map(|c| (rep.p_current - c.p_aug).abs())
            .fold(0.0, f64::max);
        if rep.delta_p < gap - 1e-12 {
            failures.push(format!("{} n={} trial {}: delta_p below 1 - p", rec.kind, rec.size, rec.trial));
        }
        if gap > candidate_dp {
            dominant += 1;
            if (rep.delta_p - gap).abs() > 1e-12 || rep.witness_p != PWitness::Stationary {
                failures.push(format!("{} n={} trial {}", rec.kind, rec.size, rec.trial));
            }
        }
    }

    // market-like fixture: five closes, lower bounds 0, upper bounds at the week's maxima
    let week = pts(&[(1.0, 1.0), (2.0, 1.0), (3.0, 2.0), (4.0, 1.0), (5.0, 2.0)]);
    let region = Region::new(0.0, 5.0, 0.0, 2.0).unwrap();
    let rep = primary_sensitivities(&summary_of(&week), &region).unwrap();
    let fixture_ok = rep.straddle && (rep.p_current + rep.delta_p - 1.0).abs() <= 1e-12;
    let table_p = p_value(0.58028f64, 5).unwrap().p;
    let table_ok = (table_p - 0.30502).abs() <= 5e-5;

    let detail = format!(
        "{dominant} of {straddling} straddling trials have 1-p dominant, identity held in all; \
         fixture r={:.5} p={:.5} + delta_p={:.5} = {:.12}; p(0.58028, m=5)={table_p:.5}",
        rep.r_current,
        rep.p_current,
        rep.delta_p,
        rep.p_current + rep.delta_p
    );
    if failures.is_empty() && fixture_ok && table_ok && dominant > 0 {
        Ok(detail)
    } else {
        Err(format!("{detail}; failures: {failures:?}"))
    }
}

// --- 4: fixture exactness --------------------------------------------------

fn fixture_exactness() -> Outcome {
    let data = pts(&[(0.0, 0.0), (1.0, 1.0), (2.0, 0.0)]);
    let region = Region::new(0.0, 2.0, 0.0, 1.0).unwrap();
    let want = 1.0 / 11f64.sqrt();
    let rep = primary_sensitivities(&summary_of(&data), &region).unwrap();
    let grid = grid_sensitivities(&data, &region, 1001).unwrap();
    let e_err = (rep.delta_r - want).abs();
    let g_err = (grid.grid_delta_r - want).abs();
    let detail = format!("engine err {e_err:.1e} (<= 1e-12), 1001x1001 grid err {g_err:.1e} (<= 1e-6)");
    check(e_err <= 1e-12 && g_err <= 1e-6, detail.clone(), detail)
}

// --- 5: t CDF ----------------------------------------------------------------

fn t_cdf_accuracy() -> Outcome {
    let mut worst_closed: f64 = 0.0;
    for i in 0..1000 {
        let t = -50.0 + 100.0 * i as f64 / 999.0;
        let cauchy = 0.5 + t.atan() / PI;
        let two = 0.5 + t / (2.0 * (2.0 + t * t).sqrt());
        worst_closed = worst_closed
            .max((t_cdf(t, 1).unwrap() - cauchy).abs())
            .max((t_cdf(t, 2).unwrap() - two).abs());
    }
    let mut worst_sym: f64 = 0.0;
    for df in (1..=1000u64).step_by(37).chain([1000]) {
        for i in 0..200 {
            let t = 0.05 + 0.25 * i as f64;
            worst_sym = worst_sym.max((t_cdf(t, df).unwrap() + t_cdf(-t, df).unwrap() - 1.0).abs());
        }
    }
    let detail = format!("closed forms df=1,2 worst {worst_closed:.1e}; symmetry worst {worst_sym:.1e}");
    check(worst_closed <= 1e-12 && worst_sym <= 1e-12, detail.clone(), detail)
}

// --- 6: derivatives ----------------------------------------------------------

fn random_dataset(rng: &mut ChaCha8Rng, n: usize) -> Vec<Point> {
    let (a, b) = (rng.random_range(-1.0..1.0), rng.random_range(0.1..5.0));
    (0..n)
        .map(|_| {
            let x: f64 = rng.random_range(-10.0..10.0);
            Point::new(x, a * x + b * rng.random_range(-10.0..10.0))
        })
        .collect()
}

fn derivative_verification() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut first, mut second, mut det_err): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for _ in 0..100 {
        let n = rng.random_range(5..120);
        let s = summary_of(&random_dataset(&mut rng, n));
        let p = Point::new(rng.random_range(-15.0..15.0), rng.random_range(-60.0..60.0));
        let g = gradient_check(&s, p, 1e-5).unwrap();
        first = first.max(g.max_first_order_err());
        second = second.max(g.max_second_order_err());
        let at_mean = gradient_check(&s, s.mean(), 1e-5).unwrap();
        let det = hessian_det_at_mean(&s).unwrap();
        det_err = det_err.max((at_mean.numeric_hessian_det() - det).abs() / det.abs());
        second = second.max(at_mean.max_second_order_err());
    }
    let detail = format!(
        "first partials {first:.1e} (<= 1e-6), second partials {second:.1e} (<= 1e-4), mean Hessian det {det_err:.1e} (<= 1e-4)"
    );
    check(first <= 1e-6 && second <= 1e-4 && det_err <= 1e-4, detail.clone(), detail)
}

// --- 7: complexity -----------------------------------------------------------

fn min_time<F: FnMut()>(reps: usize, mut f: F) -> Duration {
    (0..reps)
        .map(|_| {
            let t = Instant::now();
            f();
            t.elapsed()
        })
        .min()
        .unwrap()
}

fn complexity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let big: Vec<Point> = (0..1_000_000)
        .map(|_| Point::new(rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0)))
        .collect();
    let small = &big[..100_000];
    let t_small = min_time(9, || {
        black_box(Moments::from_dataset(black_box(small)).unwrap());
    });
    let t_big = min_time(9, || {
        black_box(Moments::from_dataset(black_box(&big[..])).unwrap());
    });
    let linear = t_big.as_secs_f64() / (10.0 * t_small.as_secs_f64());

    // p-value cost follows |t|, not n. Both sizes get summaries with the same
    // moments, region and t statistics; only the count differs.
    let region = Region::new(-10.0, 10.0, -10.0, 10.0).unwrap();
    let t_stats = [-4.0, -1.5, -0.3, 0.0, 0.7, 2.0, 3.5, 6.0];
    let summaries = |n: u64| -> Vec<Summary> {
        let df = (n - 2) as f64;
        t_stats
            .iter()
            .map(|&t| {
                let r = t / (df + t * t).sqrt();
                Summary::from_parts(n, 0.3, -0.2, 5.0, 6.0, r * 30.0).unwrap()
            })
            .collect()
    };
    let (small_set, big_set) = (summaries(1_000), summaries(1_000_000));
    let calls = 250;
    let per_call = |set: &[Summary]| {
        min_time(15, || {
            for _ in 0..calls {
                for s in set {
                    black_box(primary_sensitivities(black_box(s), black_box(&region)).unwrap());
                }
            }
        })
        .as_secs_f64()
            / (calls * set.len()) as f64
    };
    // interleave to share any frequency drift
    let (mut a, mut b) = (f64::INFINITY, f64::INFINITY);
    for _ in 0..5 {
        a = a.min(per_call(&small_set));
        b = b.min(per_call(&big_set));
    }
    let o1 = (a - b).abs() / a.min(b);
    let detail = format!(
        "from_dataset 1e6/1e5 time ratio / 10 = {linear:.2} (in [0.5, 2]); \
         primary_sensitivities {:.2} us at n=1e3 vs {:.2} us at n=1e6 ({:.1}% apart, < 10%)",
        a * 1e6,
        b * 1e6,
        100.0 * o1
    );
    check((0.5..=2.0).contains(&linear) && o1 < 0.10, detail.clone(), detail)
}

// --- 8: property suites ------------------------------------------------------

fn random_region(rng: &mut ChaCha8Rng, points: &[Point]) -> Region {
    let b = Region::bounding(points).unwrap();
    let (w, h) = (b.width(), b.height());
    let lx = b.lx() + rng.random_range(-0.5..0.5) * w;
    let ly = b.ly() + rng.random_range(-0.5..0.5) * h;
    Region::new(lx, lx + rng.random_range(0.05..2.0) * w, ly, ly + rng.random_range(0.05..2.0) * h).unwrap()
}

fn mean_point_neutrality() -> Result<f64, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    for _ in 0..500 {
        let n = rng.random_range(3..80);
        let s = summary_of(&random_dataset(&mut rng, n));
        let r = pcc(&s).unwrap();
        worst = worst.max((augmented_pcc(&s, s.mean()).unwrap() - r).abs());
    }
    if worst <= 1e-15 {
        Ok(worst)
    } else {
        Err(format!("mean-point drift {worst:.1e} > 1e-15"))
    }
}

fn affine_equivariance() -> Result<f64, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(88);
    let mut worst: f64 = 0.0;
    for case in 0..500 {
        let n = rng.random_range(3..60);
        let data = random_dataset(&mut rng, n);
        let f = random_region(&mut rng, &data);
        let (a, b) = (rng.random_range(0.01..100.0), rng.random_range(-1e3..1e3));
        let (c, d) = (rng.random_range(0.01..100.0), rng.random_range(-1e3..1e3));
        let map = |p: Point| Point::new(a * p.x + b, c * p.y + d);
        let moved: Vec<Point> = data.iter().map(|&p| map(p)).collect();
        let g = Region::new(a * f.lx() + b, a * f.ux() + b, c * f.ly() + d, c * f.uy() + d).unwrap();

        let r1: Report = primary_sensitivities(&summary_of(&data), &f).unwrap();
        let r2: Report = primary_sensitivities(&summary_of(&moved), &g).unwrap();
        let mut diffs = vec![
            (r1.r_current - r2.r_current).abs(),
            (r1.delta_r - r2.delta_r).abs(),
            (r1.delta_p - r2.delta_p).abs(),
        ];
        if r1.candidates.len() != r2.candidates.len() {
            return Err(format!("case {case}: candidate sets differ in size"));
        }
        diffs.extend(r1.candidates.iter().zip(&r2.candidates).map(|(u, v)| (u.r_aug - v.r_aug).abs()));
        let w1 = map(r1.witness_r.point);
        let w2 = r2.witness_r.point;
        let (sx, sy) = (g.width().max(1e-300), g.height().max(1e-300));
        diffs.push((w1.x - w2.x).abs() / sx);
        diffs.push((w1.y - w2.y).abs() / sy);
        let m = diffs.into_iter().fold(0.0, f64::max);
        if m > 1e-9 {
            return Err(format!("case {case}: deviation {m:.1e}"));
        }
        worst = worst.max(m);
    }
    Ok(worst)
}

fn property_suites() -> Outcome {
    match (mean_point_neutrality(), affine_equivariance()) {
        (Ok(a), Ok(b)) => Ok(format!(
            "mean-point neutrality worst {a:.1e} (<= 1e-15); affine equivariance worst {b:.1e} (<= 1e-9); 500 cases each"
        )),
        (a, b) => Err(format!("neutrality: {a:?}; equivariance: {b:?}")),
    }
}

fn main() {
    let started = Instant::now();
    let bench = run_benchmark(&BenchConfig {
        seed: BENCH_SEED,
        ..BenchConfig::default()
    })
    .expect("benchmark runs");
    let bench_secs = started.elapsed().as_secs_f64();

    let results: Vec<(&str, Outcome)> = vec![
        ("1 benchmark agreement", benchmark_agreement(&bench).map(|s| format!("{s}; {bench_secs:.1}s"))),
        ("2 dominance + convergence", dominance_and_convergence(&bench)),
        ("3 straddle identity", straddle_identity(&bench)),
        ("4 fixture exactness", fixture_exactness()),
        ("5 t CDF accuracy", t_cdf_accuracy()),
        ("6 derivative verification", derivative_verification()),
        ("7 complexity", complexity()),
        ("8 neutrality + equivariance", property_suites()),
    ];

    let mut failed = 0;
    for (name, outcome) in &results {
        match outcome {
            Ok(msg) => println!("PASS  criterion {name}: {msg}"),
            Err(msg) => {
                failed += 1;
                println!("FAIL  criterion {name}: {msg}");
            }
        }
    }
    println!("acceptance: {}/{} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
