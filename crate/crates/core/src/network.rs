//! Pointwise evaluation of integral and finite-width representations and the
//! one-sided derivative along the last axis.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{check_dim, check_finite, dot, norm, UNIT_TOL};
use crate::measure::{
    fold_to_half_sphere, AffineTail, EuclideanEntry, Representation, RidgeMeasure, SphereMeasure,
};

/// Default step for forward-difference oracles.
pub const DEFAULT_FD_STEP: f64 = 1e-7;

/// Max-entry deviation of `RᵀR` from the identity accepted as orthogonal.
pub const ORTHOGONALITY_TOL: f64 = 1e-10;

#[inline]
pub fn relu(t: f64) -> f64 {
    t.max(0.0)
}

/// `Σ w·(σ(dir·x − b) − σ(−b)) + a0·x + b0 + c0` over atoms and particles.
pub fn eval_measure(m: &RidgeMeasure, tail: &AffineTail, x: &[f64]) -> Result<f64> {
    check_dim(m.dim(), x.len())?;
    check_dim(m.dim(), tail.a0.len())?;
    let body: f64 = m
        .entries()
        .map(|e| e.w * (relu(e.dir.dot(x) - e.b) - relu(-e.b)))
        .sum();
    Ok(body + tail.eval(x))
}

/// One hidden unit `c·σ(a·x − b)`. `a` is any unit vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Unit {
    pub c: f64,
    pub a: Vec<f64>,
    pub b: f64,
}

/// `c0 + Σ cᵢ σ(aᵢ·x − bᵢ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteNetwork {
    dim: usize,
    c0: f64,
    units: Vec<Unit>,
}

impl FiniteNetwork {
    /// Validates dimensions and unit norms; zero-weight units are dropped.
    pub fn new(dim: usize, c0: f64, units: Vec<Unit>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        if !c0.is_finite() {
            return Err(Error::NonFinite("network constant"));
        }
        for u in &units {
            check_dim(dim, u.a.len())?;
            check_finite(&u.a, "unit direction")?;
            if !u.b.is_finite() || !u.c.is_finite() {
                return Err(Error::NonFinite("unit"));
            }
            let n = norm(&u.a);
            if (n - 1.0).abs() > UNIT_TOL {
                return Err(Error::NotUnit { norm: n });
            }
        }
        let units = units.into_iter().filter(|u| u.c != 0.0).collect();
        Ok(Self { dim, c0, units })
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            c0: 0.0,
            units: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn c0(&self) -> f64 {
        self.c0
    }

    pub fn units(&self) -> &[Unit] {
        &self.units
    }

    pub fn is_zero(&self) -> bool {
        self.units.is_empty() && self.c0 == 0.0
    }

    /// One atom per unit (folded onto the half-sphere), with `Σ c·σ(−b)` moved
    /// into the constant so the two forms agree pointwise.
    pub fn to_representation(&self) -> Result<Representation> {
        let sphere = SphereMeasure {
            dim: self.dim,
            atoms: self
                .units
                .iter()
                .map(|u| EuclideanEntry::new(u.a.clone(), u.b, u.c))
                .collect(),
            particles: Vec::new(),
        };
        let (measure, mut tail) = fold_to_half_sphere(&sphere)?;
        tail.c0 = self.c0 + self.units.iter().map(|u| u.c * relu(-u.b)).sum::<f64>();
        Ok(Representation { measure, tail })
    }
}

pub fn eval_network(net: &FiniteNetwork, x: &[f64]) -> Result<f64> {
    check_dim(net.dim, x.len())?;
    Ok(net.c0
        + net
            .units
            .iter()
            .map(|u| u.c * relu(dot(&u.a, x) - u.b))
            .sum::<f64>())
}

/// Right derivative of the represented function along `e_{n+1}`:
/// `Σ_{dir·x ≥ b} w·(dir·e_{n+1})`, plus the last coordinate of `a0` when a
/// tail is given. Equatorial entries contribute zero.
pub fn directional_derivative(
    m: &RidgeMeasure,
    tail: Option<&AffineTail>,
    x: &[f64],
) -> Result<f64> {
    check_dim(m.dim(), x.len())?;
    let body: f64 = m
        .entries()
        .filter(|e| !e.dir.is_equatorial() && e.dir.dot(x) >= e.b)
        .map(|e| e.w * e.dir.last())
        .sum();
    let lin = match tail {
        Some(t) => {
            check_dim(m.dim(), t.a0.len())?;
            t.a0[m.dim() - 1]
        }
        None => 0.0,
    };
    Ok(body + lin)
}

/// Forward quotient `(f(x + h·d) − f(x))/h`.
pub fn fd_directional_derivative<F>(f: F, x: &[f64], d: &[f64], h: f64) -> f64
where
    F: Fn(&[f64]) -> f64,
{
    let shifted: Vec<f64> = x.iter().zip(d).map(|(xi, di)| xi + h * di).collect();
    (f(&shifted) - f(x)) / h
}

fn check_orthogonal(r: &DMatrix<f64>, dim: usize) -> Result<()> {
    if r.nrows() != dim || r.ncols() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: r.nrows().max(r.ncols()),
        });
    }
    let gram = r.transpose() * r;
    let deviation = (gram - DMatrix::<f64>::identity(dim, dim)).amax();
    if deviation > ORTHOGONALITY_TOL {
        return Err(Error::NotOrthogonal { deviation });
    }
    Ok(())
}

/// Representation of `g(x) = f(Rᵀx)`: every direction `a` becomes `Ra`, which
/// is then folded back onto the half-sphere; `a0` becomes `R·a0` plus the
/// fold corrections.
pub fn rotate_representation(
    m: &RidgeMeasure,
    tail: &AffineTail,
    r: &DMatrix<f64>,
) -> Result<(RidgeMeasure, AffineTail)> {
    let dim = m.dim();
    check_dim(dim, tail.a0.len())?;
    check_orthogonal(r, dim)?;
    let rotate = |v: &[f64]| -> Vec<f64> {
        (r * DVector::from_column_slice(v))
            .iter()
            .copied()
            .collect()
    };
    let map = |entries: &[crate::measure::RidgeAtom]| -> Vec<EuclideanEntry> {
        entries
            .iter()
            .map(|e| EuclideanEntry::new(rotate(e.dir.coords()), e.b, e.w))
            .collect()
    };
    let sphere = SphereMeasure {
        dim,
        atoms: map(m.atoms()),
        particles: map(m.particles()),
    };
    let (rotated, fold_tail) = fold_to_half_sphere(&sphere)?;
    let a0 = rotate(&tail.a0)
        .into_iter()
        .zip(&fold_tail.a0)
        .map(|(x, y)| x + y)
        .collect();
    Ok((
        rotated,
        AffineTail {
            a0,
            b0: tail.b0,
            c0: tail.c0,
        },
    ))
}

/// Householder reflection `H` with `H·d = e_{n+1}` for a unit vector `d`.
pub fn reflection_to_last_axis(d: &[f64]) -> Result<DMatrix<f64>> {
    let n = norm(d);
    if (n - 1.0).abs() > UNIT_TOL {
        return Err(Error::NotUnit { norm: n });
    }
    let dim = d.len();
    let mut v = DVector::from_column_slice(d);
    v[dim - 1] -= 1.0;
    let vv = v.dot(&v);
    let mut h = DMatrix::<f64>::identity(dim, dim);
    if vv > f64::EPSILON {
        h -= (&v * v.transpose()) * (2.0 / vv);
    }
    Ok(h)
}

/// Right derivative along an arbitrary unit direction `d`: reflect `d` onto
/// `e_{n+1}` and use the last-axis formula on the rotated representation.
pub fn directional_derivative_along(
    m: &RidgeMeasure,
    tail: &AffineTail,
    x: &[f64],
    d: &[f64],
) -> Result<f64> {
    check_dim(m.dim(), d.len())?;
    check_dim(m.dim(), x.len())?;
    let h = reflection_to_last_axis(d)?;
    let (rm, rt) = rotate_representation(m, tail, &h)?;
    let hx: Vec<f64> = (&h * DVector::from_column_slice(x))
        .iter()
        .copied()
        .collect();
    directional_derivative(&rm, Some(&rt), &hx)
}
