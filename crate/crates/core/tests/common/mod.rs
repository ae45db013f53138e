//! Random generators and direct-formula oracles shared by the integration
//! tests. Oracles here use only plain arithmetic, never the library's
//! evaluation code.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use ridgerep::{AffineTail, Direction, EuclideanEntry, RidgeAtom, RidgeMeasure};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn relu(t: f64) -> f64 {
    if t > 0.0 {
        t
    } else {
        0.0
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn gaussian(r: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(r)).collect()
}

pub fn unit(r: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let g = gaussian(r, n);
        let l = norm(&g);
        if l > 1e-3 {
            return g.iter().map(|x| x / l).collect();
        }
    }
}

/// Unit vector whose last coordinate is at least `min_last`.
pub fn upper_unit(r: &mut ChaCha8Rng, n: usize, min_last: f64) -> Vec<f64> {
    loop {
        let mut u = unit(r, n);
        if u[n - 1] < 0.0 {
            u.iter_mut().for_each(|x| *x = -*x);
        }
        if u[n - 1] >= min_last {
            return u;
        }
    }
}

pub fn uniform_point(r: &mut ChaCha8Rng, n: usize, half_width: f64) -> Vec<f64> {
    (0..n)
        .map(|_| r.random_range(-half_width..half_width))
        .collect()
}

/// `Σ w·(σ(a·x − b) − σ(−b))` over raw, possibly non-unit entries.
pub fn raw_eval(entries: &[EuclideanEntry], x: &[f64]) -> f64 {
    entries
        .iter()
        .map(|e| e.w * (relu(dot(&e.a, x) - e.b) - relu(-e.b)))
        .sum()
}

/// `Σ |w|·(|a·x| + 2|b|)`: the magnitude floating-point error in `raw_eval`
/// scales with.
pub fn raw_scale(entries: &[EuclideanEntry], x: &[f64]) -> f64 {
    entries
        .iter()
        .map(|e| e.w.abs() * (dot(&e.a, x).abs() + 2.0 * e.b.abs()))
        .sum()
}

pub fn atom(dir: Vec<f64>, b: f64, w: f64) -> RidgeAtom {
    RidgeAtom::new(Direction::from_canonical(dir).unwrap(), b, w)
}

/// Canonical atomic measure with directions away from the equator.
pub fn random_atomic(r: &mut ChaCha8Rng, dim: usize, max_atoms: usize) -> RidgeMeasure {
    let k = r.random_range(1..=max_atoms);
    let atoms = (0..k)
        .map(|_| {
            atom(
                upper_unit(r, dim, 0.05),
                r.random_range(-3.0..3.0),
                r.random_range(-5.0..5.0),
            )
        })
        .collect();
    RidgeMeasure::new(dim, atoms, vec![]).unwrap()
}

pub fn random_tail(r: &mut ChaCha8Rng, dim: usize) -> AffineTail {
    AffineTail {
        a0: (0..dim).map(|_| r.random_range(-2.0..2.0)).collect(),
        b0: r.random_range(-2.0..2.0),
        c0: r.random_range(-2.0..2.0),
    }
}

/// Atomic measure `f = Σ w·(σ(dir·x − b) − σ(−b))` evaluated directly.
pub fn atomic_eval(m: &RidgeMeasure, tail: &AffineTail, x: &[f64]) -> f64 {
    m.entries()
        .map(|e| e.w * (relu(dot(e.dir.coords(), x) - e.b) - relu(-e.b)))
        .sum::<f64>()
        + dot(&tail.a0, x)
        + tail.b0
        + tail.c0
}

/// `det` by cofactor expansion.
pub fn det(m: &[Vec<f64>]) -> f64 {
    match m.len() {
        0 => 1.0,
        1 => m[0][0],
        n => (0..n)
            .map(|j| {
                let minor: Vec<Vec<f64>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|&(c, _)| c != j)
                            .map(|(_, v)| *v)
                            .collect()
                    })
                    .collect();
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                sign * m[0][j] * det(&minor)
            })
            .sum(),
    }
}

/// Every (n+1)-subset of `points` has a non-degenerate displacement matrix.
pub fn exhaustive_general_position(points: &[Vec<f64>], n: usize, eps: f64) -> bool {
    fn subsets(
        k: usize,
        start: usize,
        total: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..total {
            cur.push(i);
            subsets(k, i + 1, total, cur, out);
            cur.pop();
        }
    }
    let mut all = Vec::new();
    subsets(n + 1, 0, points.len(), &mut Vec::new(), &mut all);
    all.iter().all(|idx| {
        let base = &points[idx[0]];
        let rows: Vec<Vec<f64>> = idx[1..]
            .iter()
            .map(|&i| points[i].iter().zip(base).map(|(p, q)| p - q).collect())
            .collect();
        let scale: f64 = rows.iter().map(|r| norm(r)).product();
        scale > 0.0 && (det(&rows) / scale).abs() > eps
    })
}
