//! Finite-width networks from the atomic part of a canonical representation.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{canonicalize_direction, check_dim, norm, Hyperplane};
use crate::measure::{total_variation, AffineTail, RidgeMeasure, Tolerances};
use crate::network::{eval_network, relu, FiniteNetwork, Unit};

/// `1e-9·TV(m)`, floored at `1e-12`.
pub fn default_residual_tol(m: &RidgeMeasure) -> f64 {
    (1e-9 * total_variation(m)).max(1e-12)
}

/// Rewrites `∫ σ(a·x−b) − σ(−b) dμ + a0·x + b0 + c0` with a purely atomic `μ`
/// as `c0' + Σ cᵢ σ(aᵢ·x − bᵢ)`.
///
/// Atoms become units verbatim. The linear tail becomes
/// `‖a0‖·(σ(â·x) − σ(−â·x))` with `â` canonical, so exactly one of the two
/// tail units has a non-canonical direction. The constant absorbs
/// `b0 + c0 − Σ w·σ(−b)`. Fails if the particle part has total variation above
/// `residual_tol`.
pub fn extract_finite_network(
    m: &RidgeMeasure,
    tail: &AffineTail,
    residual_tol: f64,
) -> Result<FiniteNetwork> {
    extract_with(m, tail, residual_tol, &Tolerances::default())
}

pub fn extract_with(
    m: &RidgeMeasure,
    tail: &AffineTail,
    residual_tol: f64,
    tol: &Tolerances,
) -> Result<FiniteNetwork> {
    check_dim(m.dim(), tail.a0.len())?;
    let residual: f64 = m.particles().iter().map(|p| p.w.abs()).sum();
    if residual > residual_tol {
        return Err(Error::NonzeroResidual {
            tv: residual,
            tol: residual_tol,
        });
    }

    let mut units: Vec<Unit> = m
        .atoms()
        .iter()
        .map(|a| Unit {
            c: a.w,
            a: a.dir.coords().to_vec(),
            b: a.b,
        })
        .collect();

    let scale = norm(&tail.a0);
    if scale > tol.weight {
        let (dir, sign) = canonicalize_direction(&tail.a0)?;
        let c = sign * scale;
        let neg: Vec<f64> = dir.coords().iter().map(|x| 0.0 - x).collect();
        units.push(Unit {
            c,
            a: dir.into_coords(),
            b: 0.0,
        });
        units.push(Unit {
            c: -c,
            a: neg,
            b: 0.0,
        });
    }

    let c0 = tail.b0 + tail.c0 - m.atoms().iter().map(|a| a.w * relu(-a.b)).sum::<f64>();
    FiniteNetwork::new(m.dim(), c0, merge_units(units, tol))
}

fn same_unit(x: &Unit, y: &Unit, eps: f64) -> bool {
    (x.b - y.b).abs() <= eps && x.a.iter().zip(&y.a).all(|(p, q)| (p - q).abs() <= eps)
}

/// Sums units with matching `(a, b)`; drops units whose merged weight is
/// negligible. Keeps first-seen order.
pub fn merge_units(units: Vec<Unit>, tol: &Tolerances) -> Vec<Unit> {
    let mut out: Vec<Unit> = Vec::with_capacity(units.len());
    for u in units {
        match out.iter_mut().find(|o| same_unit(o, &u, tol.merge)) {
            Some(o) => o.c += u.c,
            None => out.push(u),
        }
    }
    out.retain(|u| u.c.abs() >= tol.weight);
    out
}

/// A crease hyperplane together with the slope jump across it (measured along
/// its canonical normal).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Crease {
    pub plane: Hyperplane,
    pub jump: f64,
}

/// Hyperplanes where the network is not affine, with their merged slope jumps.
///
/// `c₁σ(t) + c₂σ(−t)` has slope jump `c₁ + c₂` at `t = 0`, so units on the same
/// hyperplane merge by summing weights regardless of orientation.
pub fn crease_weights(net: &FiniteNetwork, tol: &Tolerances) -> Result<Vec<Crease>> {
    let mut out: Vec<Crease> = Vec::new();
    for u in net.units() {
        let plane = Hyperplane::new(&u.a, u.b)?;
        let hit = out.iter_mut().find(|c| {
            (c.plane.offset - plane.offset).abs() <= tol.merge
                && c.plane
                    .normal
                    .coords()
                    .iter()
                    .zip(plane.normal.coords())
                    .all(|(p, q)| (p - q).abs() <= tol.merge)
        });
        match hit {
            Some(c) => c.jump += u.c,
            None => out.push(Crease { plane, jump: u.c }),
        }
    }
    out.retain(|c| c.jump.abs() >= tol.weight);
    Ok(out)
}

pub fn crease_hyperplanes(net: &FiniteNetwork) -> Result<Vec<Hyperplane>> {
    Ok(crease_weights(net, &Tolerances::default())?
        .into_iter()
        .map(|c| c.plane)
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FarField {
    ZeroFarField,
    NonzeroFarField,
}

impl fmt::Display for FarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FarField::ZeroFarField => write!(f, "identically zero (within tol)"),
            FarField::NonzeroFarField => write!(f, "nonzero far field: not compactly supported"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FarFieldReport {
    pub verdict: FarField,
    pub radius: f64,
    pub rays: usize,
    pub max_abs: f64,
    pub tol: f64,
    /// Sample point attaining `max_abs`.
    pub witness: Option<Vec<f64>>,
}

/// Samples `|f|` at `radius` along `rays` seeded random directions.
///
/// In dimension ≥ 2 a nonzero finite network never has compact support, so a
/// zero far field means the network vanishes. In dimension 1 bump functions
/// such as `σ(x+1) − 2σ(x) + σ(x−1)` do have compact support.
pub fn compact_support_diagnostic(
    net: &FiniteNetwork,
    radius: f64,
    rays: usize,
    seed: u64,
) -> Result<FarFieldReport> {
    if !(radius.is_finite() && radius > 0.0) || rays == 0 {
        return Err(Error::InvalidArgument(
            "radius must be positive and rays nonzero".into(),
        ));
    }
    let scale = net.c0().abs()
        + net
            .units()
            .iter()
            .map(|u| u.c.abs() * (radius + u.b.abs()))
            .sum::<f64>();
    let tol = 1e-12 * scale;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = (0.0_f64, None);
    for _ in 0..rays {
        let x = loop {
            let g: Vec<f64> = (0..net.dim())
                .map(|_| StandardNormal.sample(&mut rng))
                .collect();
            let n = norm(&g);
            if n > 1e-12 {
                break g.into_iter().map(|v| v * radius / n).collect::<Vec<f64>>();
            }
        };
        let v = eval_network(net, &x)?.abs();
        if best.1.is_none() || v > best.0 {
            best = (v, Some(x));
        }
    }
    let verdict = if best.0 > tol {
        FarField::NonzeroFarField
    } else {
        FarField::ZeroFarField
    };
    Ok(FarFieldReport {
        verdict,
        radius,
        rays,
        max_abs: best.0,
        tol,
        witness: best.1,
    })
}
