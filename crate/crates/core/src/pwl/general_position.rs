//! Seeded point sets with no n+1 points on a common hyperplane of R^n.

use itertools::Itertools;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::norm;

/// Relative determinant threshold for the general-position check.
pub const EPS_GP: f64 = 1e-8;

/// Sets up to this size are checked over every (n+1)-subset.
pub const EXHAUSTIVE_LIMIT: usize = 12;

/// Number of random subsets checked for larger sets.
pub const RANDOM_SUBSETS: usize = 10_000;

const MAX_RESAMPLES: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Ball {
    pub fn centered(n: usize, radius: f64) -> Self {
        Self {
            center: vec![0.0; n],
            radius,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneralPositionSet {
    pub points: Vec<Vec<f64>>,
    pub ball: Ball,
    pub seed: u64,
}

impl GeneralPositionSet {
    /// The single empty base point used when the domain is one-dimensional.
    pub fn trivial() -> Self {
        Self {
            points: vec![Vec::new()],
            ball: Ball::centered(0, 0.0),
            seed: 0,
        }
    }

    /// Ambient dimension of the points.
    pub fn n(&self) -> usize {
        self.ball.center.len()
    }
}

/// `|det(z₁−z₀, …, z_n−z₀)| / Π‖zᵢ−z₀‖` for n+1 points in R^n; 0 when two
/// points coincide. Lies in [0, 1] by Hadamard's inequality.
pub fn normalized_displacement_det(points: &[&[f64]]) -> f64 {
    let n = points.len() - 1;
    let base = points[0];
    let mut rows = Vec::with_capacity(n * n);
    let mut scale = 1.0;
    for p in &points[1..] {
        let row: Vec<f64> = p.iter().zip(base).map(|(a, b)| a - b).collect();
        let r = norm(&row);
        if r == 0.0 {
            return 0.0;
        }
        scale *= r;
        rows.extend(row);
    }
    (DMatrix::from_row_slice(n, n, &rows).determinant() / scale).abs()
}

fn subset_ok(points: &[Vec<f64>], idx: &[usize], radius: f64) -> bool {
    let pts: Vec<&[f64]> = idx.iter().map(|&i| points[i].as_slice()).collect();
    // distinct points, then non-degenerate simplex
    let separated = pts.iter().tuple_combinations().all(|(a, b)| {
        norm(&a.iter().zip(*b).map(|(x, y)| x - y).collect::<Vec<_>>()) > EPS_GP * radius
    });
    separated && normalized_displacement_det(&pts) > EPS_GP
}

/// First (n+1)-subset (by index) violating general position, checked
/// exhaustively.
pub fn find_violation(points: &[Vec<f64>], n: usize, radius: f64) -> Option<Vec<usize>> {
    (0..points.len())
        .combinations(n + 1)
        .find(|idx| !subset_ok(points, idx, radius))
}

fn sample_in_ball(rng: &mut ChaCha8Rng, ball: &Ball) -> Vec<f64> {
    let n = ball.center.len();
    loop {
        let g: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        let len = norm(&g);
        if len > 1e-12 {
            let r = ball.radius * rng.random::<f64>().powf(1.0 / n as f64);
            return g
                .iter()
                .zip(&ball.center)
                .map(|(gi, c)| c + gi * r / len)
                .collect();
        }
    }
}

/// Uniform samples in `ball`, resampled until no n+1 of them are numerically
/// co-hyperplanar. Deterministic in `seed`.
pub fn sample_general_position(
    n: usize,
    count: usize,
    ball: &Ball,
    seed: u64,
) -> Result<GeneralPositionSet> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "general position needs n >= 1; use GeneralPositionSet::trivial".into(),
        ));
    }
    if ball.center.len() != n || !(ball.radius > 0.0 && ball.radius.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "ball must live in R^{n} with positive radius"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points: Vec<Vec<f64>> = Vec::with_capacity(count);
    let mut attempts = 0;

    if count <= EXHAUSTIVE_LIMIT {
        while points.len() < count {
            let candidate = sample_in_ball(&mut rng, ball);
            points.push(candidate);
            let last = points.len() - 1;
            let ok = (0..last).combinations(n).all(|mut idx| {
                idx.push(last);
                subset_ok(&points, &idx, ball.radius)
            });
            if !ok {
                points.pop();
                attempts += 1;
                if attempts > MAX_RESAMPLES {
                    return Err(Error::GeneralPositionBudget { seed, attempts });
                }
            }
        }
    } else {
        points.extend((0..count).map(|_| sample_in_ball(&mut rng, ball)));
        'outer: loop {
            for _ in 0..RANDOM_SUBSETS {
                let idx = rand::seq::index::sample(&mut rng, count, n + 1).into_vec();
                if !subset_ok(&points, &idx, ball.radius) {
                    let worst = *idx.iter().max().unwrap();
                    points[worst] = sample_in_ball(&mut rng, ball);
                    attempts += 1;
                    if attempts > MAX_RESAMPLES {
                        return Err(Error::GeneralPositionBudget { seed, attempts });
                    }
                    continue 'outer;
                }
            }
            break;
        }
    }

    Ok(GeneralPositionSet {
        points,
        ball: ball.clone(),
        seed,
    })
}
