//! Timing of full evaluation over tiled patterns.

use std::time::{Duration, Instant};

use serde::Serialize;

use crate::error::Result;
use crate::graph::topology;
use crate::pattern::StitchPattern;

/// The mixed Knit/Transfer/Miss/Tuck block used for scaling runs.
pub const MIXED_BLOCK: &str = "K K K K K\nK K TR1 K K\nK M T T K\nK K T K K\nK K K K K\n";

pub const DEFAULT_SIZES: [usize; 8] = [10, 30, 40, 50, 75, 100, 125, 150];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sample {
    pub size: usize,
    pub stitches: usize,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub samples: Vec<Sample>,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Time at the largest size over time at 50×50, when both were run.
    pub ratio_150_50: Option<f64>,
}

/// Best-of-`reps` wall time for one full evaluation of `pattern`.
pub fn time_once(pattern: &StitchPattern, reps: usize) -> Result<Duration> {
    let mut best = Duration::MAX;
    for _ in 0..reps.max(1) {
        let start = Instant::now();
        let out = topology(pattern)?;
        let elapsed = start.elapsed();
        std::hint::black_box(out);
        best = best.min(elapsed);
    }
    Ok(best)
}

/// Tiles `block` to each `size × size` and times it, keeping the best of
/// `reps` rounds. Each round visits every size once, so a slow stretch on a
/// shared machine does not land on one size only.
pub fn run(block: &StitchPattern, sizes: &[usize], reps: usize) -> Result<BenchReport> {
    let patterns: Vec<StitchPattern> = sizes.iter().map(|&n| block.tiled(n, n)).collect();
    let mut best = vec![Duration::MAX; sizes.len()];
    for _ in 0..reps.max(1) {
        for (k, p) in patterns.iter().enumerate() {
            best[k] = best[k].min(time_once(p, 1)?);
        }
    }
    let samples: Vec<Sample> = sizes
        .iter()
        .zip(&best)
        .map(|(&size, t)| Sample { size, stitches: size * size, seconds: t.as_secs_f64() })
        .collect();
    let (slope, intercept, r_squared) =
        linear_fit(&samples.iter().map(|s| (s.stitches as f64, s.seconds)).collect::<Vec<_>>());
    let at = |n: usize| samples.iter().find(|s| s.size == n).map(|s| s.seconds);
    let ratio_150_50 = match (at(150), at(50)) {
        (Some(a), Some(b)) if b > 0.0 => Some(a / b),
        _ => None,
    };
    Ok(BenchReport { samples, slope, intercept, r_squared, ratio_150_50 })
}

/// Least squares `y = slope·x + intercept`, with R².
pub fn linear_fit(points: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = points.len() as f64;
    if points.len() < 2 {
        return (0.0, points.first().map_or(0.0, |p| p.1), 1.0);
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return (0.0, my, 1.0);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, intercept, r2)
}
