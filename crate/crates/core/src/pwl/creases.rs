//! Black-box crease detection along vertical lines `{z0} × R`.
//!
//! Creases show up as concentrated second differences: a slope jump `J` at
//! `y*` inside cell `[y_k, y_{k+1}]` puts `J·(y_{k+1} − y*)` into `s_k` and
//! `J·(y* − y_k)` into `s_{k+1}`, so the pair sums to `J·step` and its
//! `s`-weighted centroid is exactly `y*`. Smooth curvature only contributes
//! `f''·step²` per cell, which the prominence filter separates from creases.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tuning for [`detect_creases`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CreaseConfig {
    /// Threshold on `|s_k|/step` relative to `1 + max |slope|` on the line.
    pub rel_tol: f64,
    /// A cell is a crease candidate only if `|s_k|` exceeds this multiple of
    /// the median `|s|` in its neighbourhood.
    pub prominence: f64,
    /// Half-width, in cells, of the neighbourhood used for the median.
    pub window: usize,
}

impl Default for CreaseConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-6,
            prominence: 10.0,
            window: 16,
        }
    }
}

pub const DEFAULT_RESOLUTION: usize = 2048;

/// `f` sampled on a uniform grid of `{z0} × [lo, hi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LineSamples {
    pub z0: Vec<f64>,
    pub ys: Vec<f64>,
    pub fs: Vec<f64>,
    pub step: f64,
}

impl LineSamples {
    pub fn range(&self) -> (f64, f64) {
        (self.ys[0], self.ys[self.ys.len() - 1])
    }

    /// `s_k = f_{k+1} − 2f_k + f_{k−1}` for interior `k`; zero at the ends.
    pub fn second_differences(&self) -> Vec<f64> {
        let n = self.fs.len();
        let mut s = vec![0.0; n];
        for (k, w) in self.fs.windows(3).enumerate() {
            s[k + 1] = w[2] - 2.0 * w[1] + w[0];
        }
        s
    }

    pub fn max_slope(&self) -> f64 {
        self.fs
            .windows(2)
            .map(|w| ((w[1] - w[0]) / self.step).abs())
            .fold(0.0, f64::max)
    }
}

/// Evaluates `f` at `resolution` evenly spaced heights in `[lo, hi]`.
pub fn sample_line<F>(
    f: F,
    z0: &[f64],
    y_range: (f64, f64),
    resolution: usize,
) -> Result<LineSamples>
where
    F: Fn(&[f64]) -> f64,
{
    let (lo, hi) = y_range;
    if resolution < 3 {
        return Err(Error::InvalidArgument(
            "resolution must be at least 3".into(),
        ));
    }
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidArgument(format!("bad range [{lo}, {hi}]")));
    }
    let step = (hi - lo) / (resolution - 1) as f64;
    let ys: Vec<f64> = (0..resolution)
        .map(|k| {
            if k == resolution - 1 {
                hi
            } else {
                lo + k as f64 * step
            }
        })
        .collect();
    let mut x = z0.to_vec();
    x.push(0.0);
    let last = x.len() - 1;
    let fs = ys
        .iter()
        .map(|&y| {
            x[last] = y;
            f(&x)
        })
        .collect();
    Ok(LineSamples {
        z0: z0.to_vec(),
        ys,
        fs,
        step,
    })
}

/// One row of the per-line CSV trace. `first_diff` is the backward slope
/// `(f_k − f_{k−1})/step`; `second_diff` is `s_k/step`, the slope change across
/// sample `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub y: f64,
    pub f: f64,
    pub first_diff: Option<f64>,
    pub second_diff: Option<f64>,
}

pub fn line_trace(samples: &LineSamples) -> Vec<TraceRow> {
    let n = samples.ys.len();
    let s = samples.second_differences();
    (0..n)
        .map(|k| TraceRow {
            y: samples.ys[k],
            f: samples.fs[k],
            first_diff: (k > 0).then(|| (samples.fs[k] - samples.fs[k - 1]) / samples.step),
            second_diff: (k > 0 && k < n - 1).then(|| s[k] / samples.step),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineCrease {
    /// Estimated crossing height.
    pub y: f64,
    /// Right-minus-left slope of `y ↦ f(z0, y)`.
    pub jump: f64,
    /// Every crossing contributing to this crease lies in `[support.0, support.1]`.
    pub support: (f64, f64),
    /// The crease touches the first or last interior cell, so part of its
    /// jump may be outside the sampled range.
    pub edge: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CreaseReport {
    pub z0: Vec<f64>,
    pub y_range: (f64, f64),
    pub step: f64,
    /// Threshold applied to `|s_k|/step` and to `|jump|`.
    pub threshold: f64,
    /// Sorted by `y`.
    pub creases: Vec<LineCrease>,
}

/// `rel_tol · (1 + max |slope|)`.
pub fn default_crease_tol(samples: &LineSamples, rel_tol: f64) -> f64 {
    rel_tol * (1.0 + samples.max_slope())
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Samples `f` on the line and runs [`detect_creases`] with default
/// prominence.
pub fn detect_creases_on_line<F>(
    f: F,
    z0: &[f64],
    y_range: (f64, f64),
    resolution: usize,
    crease_tol: f64,
) -> Result<CreaseReport>
where
    F: Fn(&[f64]) -> f64,
{
    let samples = sample_line(f, z0, y_range, resolution)?;
    Ok(detect_creases(
        &samples,
        crease_tol,
        &CreaseConfig::default(),
    ))
}

/// Groups prominent second differences above `crease_tol` into creases.
///
/// Contiguous flagged cells form a run, split where the sign of `s` changes.
/// Each run is widened by one unflagged same-sign neighbour on each side
/// before summing, so a crossing sitting almost on a grid point keeps its
/// full jump.
pub fn detect_creases(samples: &LineSamples, crease_tol: f64, cfg: &CreaseConfig) -> CreaseReport {
    let n = samples.fs.len();
    let h = samples.step;
    let s = samples.second_differences();
    let mag: Vec<f64> = s.iter().map(|v| v.abs()).collect();

    let flagged: Vec<bool> = (0..n)
        .map(|k| {
            if k == 0 || k == n - 1 || mag[k] / h <= crease_tol {
                return false;
            }
            let lo = k.saturating_sub(cfg.window).max(1);
            let hi = (k + cfg.window).min(n - 2);
            let background = median(mag[lo..=hi].to_vec());
            mag[k] > cfg.prominence * background
        })
        .collect();

    let mut runs: Vec<(usize, usize)> = Vec::new();
    let mut k = 1;
    while k < n - 1 {
        if !flagged[k] {
            k += 1;
            continue;
        }
        let start = k;
        while k + 1 < n - 1 && flagged[k + 1] && s[k + 1].signum() == s[start].signum() {
            k += 1;
        }
        runs.push((start, k));
        k += 1;
    }

    let mut creases = Vec::with_capacity(runs.len());
    for (i, &(ks, ke)) in runs.iter().enumerate() {
        let sign = s[ks].signum();
        let mut lo = ks;
        let mut hi = ke;
        let prev_end = if i > 0 { runs[i - 1].1 } else { 0 };
        let next_start = runs.get(i + 1).map_or(n - 1, |r| r.0);
        if ks - 1 > prev_end && ks > 1 && s[ks - 1].signum() == sign {
            lo = ks - 1;
        }
        if ke + 1 < next_start && ke < n - 2 && s[ke + 1].signum() == sign {
            hi = ke + 1;
        }
        let total: f64 = s[lo..=hi].iter().sum();
        let jump = total / h;
        if jump.abs() <= crease_tol {
            continue;
        }
        let y = (lo..=hi).map(|j| s[j] * samples.ys[j]).sum::<f64>() / total;
        creases.push(LineCrease {
            y,
            jump,
            support: (samples.ys[ks - 1], samples.ys[ke + 1]),
            edge: ks <= 1 || ke >= n - 2,
        });
    }

    CreaseReport {
        z0: samples.z0.clone(),
        y_range: samples.range(),
        step: h,
        threshold: crease_tol,
        creases,
    }
}

/// Maximum deviation of `f` from its chord on `[x1, x2]` and the scale
/// `1 + |f(x1)| + |f(x2)|` it is judged against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineDeviation {
    pub max_deviation: f64,
    pub scale: f64,
}

impl AffineDeviation {
    pub fn relative(&self) -> f64 {
        self.max_deviation / self.scale
    }
}

pub fn affine_deviation<F>(f: F, x1: &[f64], x2: &[f64], probes: usize) -> AffineDeviation
where
    F: Fn(&[f64]) -> f64,
{
    let probes = probes.max(3);
    let f1 = f(x1);
    let f2 = f(x2);
    let mut x = x1.to_vec();
    let mut worst = 0.0_f64;
    for i in 1..probes - 1 {
        let t = i as f64 / (probes - 1) as f64;
        for (xi, (a, b)) in x.iter_mut().zip(x1.iter().zip(x2)) {
            *xi = (1.0 - t) * a + t * b;
        }
        let chord = (1.0 - t) * f1 + t * f2;
        worst = worst.max((f(&x) - chord).abs());
    }
    AffineDeviation {
        max_deviation: worst,
        scale: 1.0 + f1.abs() + f2.abs(),
    }
}

/// Whether `f` stays within `tol·(1 + |f(x1)| + |f(x2)|)` of its chord at
/// `probes` evenly spaced points (at least 3).
pub fn is_affine_on_segment<F>(f: F, x1: &[f64], x2: &[f64], probes: usize, tol: f64) -> bool
where
    F: Fn(&[f64]) -> f64,
{
    let d = affine_deviation(f, x1, x2, probes);
    d.max_deviation <= tol * d.scale
}
