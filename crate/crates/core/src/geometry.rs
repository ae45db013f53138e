//! Half-sphere directions, hyperplanes, and the dual space of hyperplanes.
//!
//! Every hyperplane `{x : a·x = b}` in R^{n+1} has exactly one description with
//! `a` on the half-sphere: the open upper hemisphere plus, recursively, the
//! half-sphere of the equator. Hyperplanes whose normal is not orthogonal to
//! the last axis (the family "H1") are mapped to the dual space `Ξ × V = R^n × R`
//! by dividing through by the last normal coordinate. In that space a point of
//! the domain becomes a hyperplane and a vertical segment becomes a slab.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coordinates within this absolute tolerance of zero are treated as zero when
/// deciding half-sphere membership. Ties resolve as zero.
pub const EPS_ZERO: f64 = 1e-12;

/// Accepted deviation of `‖a‖` from 1 for inputs that must be unit vectors.
pub const UNIT_TOL: f64 = 1e-10;

/// Vectors whose computed norm is this close to 1 are already normalized to
/// rounding and are left bit-for-bit unchanged.
pub(crate) const FIXED_POINT_TOL: f64 = 16.0 * f64::EPSILON;

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

pub(crate) fn check_finite(v: &[f64], what: &'static str) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

/// Sign of the canonical representative: scans from the last coordinate down and
/// returns the sign of the first one exceeding `eps` in magnitude.
fn canonical_sign(u: &[f64], eps: f64) -> Option<f64> {
    u.iter()
        .rev()
        .find(|c| c.abs() > eps)
        .map(|c| if *c > 0.0 { 1.0 } else { -1.0 })
}

/// A unit vector on the half-sphere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Direction {
    coords: Vec<f64>,
}

impl Direction {
    /// Wraps coordinates that are already unit length and canonical.
    pub fn from_canonical(coords: Vec<f64>) -> Result<Self> {
        check_finite(&coords, "direction")?;
        if in_half_sphere(&coords)? {
            Ok(Self { coords })
        } else {
            Err(Error::InvalidArgument(format!(
                "{coords:?} is not on the canonical half-sphere"
            )))
        }
    }

    /// The last basis vector `e_{n+1}` in R^dim.
    pub fn last_axis(dim: usize) -> Self {
        let mut coords = vec![0.0; dim];
        coords[dim - 1] = 1.0;
        Self { coords }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// `a · e_{n+1}`, which is nonnegative on the half-sphere.
    pub fn last(&self) -> f64 {
        self.coords[self.coords.len() - 1]
    }

    pub fn dot(&self, x: &[f64]) -> f64 {
        dot(&self.coords, x)
    }

    /// Whether the normal is orthogonal to the last axis (within `EPS_ZERO`).
    pub fn is_equatorial(&self) -> bool {
        self.last() <= EPS_ZERO
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }
}

impl TryFrom<Vec<f64>> for Direction {
    type Error = Error;

    fn try_from(coords: Vec<f64>) -> Result<Self> {
        Self::from_canonical(coords)
    }
}

impl From<Direction> for Vec<f64> {
    fn from(d: Direction) -> Self {
        d.coords
    }
}

/// Normalizes `a` and picks the half-sphere representative of `±a/‖a‖`.
///
/// Returns `(d, s)` with `s ∈ {1, -1}` and `s·d = a/‖a‖`.
pub fn canonicalize_direction(a: &[f64]) -> Result<(Direction, f64)> {
    check_finite(a, "direction")?;
    let n = norm(a);
    if a.is_empty() || n == 0.0 {
        return Err(Error::DegenerateDirection);
    }
    // Leave inputs that are unit to rounding untouched so canonical data is a
    // fixed point of this map.
    let unit: Vec<f64> = if (n - 1.0).abs() <= FIXED_POINT_TOL {
        a.to_vec()
    } else {
        a.iter().map(|x| x / n).collect()
    };
    let sign = canonical_sign(&unit, EPS_ZERO).ok_or(Error::DegenerateDirection)?;
    // `+ 0.0` maps −0 to +0 so equal directions serialize identically
    let coords = unit.into_iter().map(|x| sign * x + 0.0).collect();
    Ok((Direction { coords }, sign))
}

/// Whether the unit vector `a` is its own half-sphere representative.
pub fn in_half_sphere(a: &[f64]) -> Result<bool> {
    let n = norm(a);
    if !n.is_finite() || (n - 1.0).abs() > UNIT_TOL {
        return Err(Error::NotUnit { norm: n });
    }
    Ok(canonical_sign(a, EPS_ZERO) == Some(1.0))
}

/// `{x : normal·x = offset}` with a half-sphere normal, so the pair is unique.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperplane {
    pub normal: Direction,
    pub offset: f64,
}

impl Hyperplane {
    /// Builds the hyperplane `{x : a·x = b}` for any nonzero `a`.
    pub fn new(a: &[f64], b: f64) -> Result<Self> {
        if !b.is_finite() {
            return Err(Error::NonFinite("hyperplane offset"));
        }
        let n = norm(a);
        let (normal, sign) = canonicalize_direction(a)?;
        let offset = if (n - 1.0).abs() <= FIXED_POINT_TOL {
            sign * b
        } else {
            sign * b / n
        };
        Ok(Self { normal, offset })
    }

    pub fn dim(&self) -> usize {
        self.normal.dim()
    }

    pub fn signed_distance(&self, x: &[f64]) -> f64 {
        self.normal.dot(x) - self.offset
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.signed_distance(x).abs() <= tol
    }

    /// Membership in H1: the normal is not orthogonal to the last axis.
    pub fn in_h1(&self) -> bool {
        !self.normal.is_equatorial()
    }
}

/// Coordinates `(u, v)` of an H1 hyperplane in the dual space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualPoint {
    pub u: Vec<f64>,
    pub v: f64,
}

/// Maps an H1 hyperplane with normal `a` and offset `b` to
/// `(a_1/a_{n+1}, …, a_n/a_{n+1}, b/a_{n+1})`.
pub fn psi(h: &Hyperplane) -> Result<DualPoint> {
    let last = h.normal.last();
    if last.abs() <= EPS_ZERO {
        return Err(Error::NotInH1 { last });
    }
    let head = &h.normal.coords()[..h.dim() - 1];
    Ok(DualPoint {
        u: head.iter().map(|a| a / last).collect(),
        v: h.offset / last,
    })
}

/// Inverse of [`psi`]: the normal is `(u, 1)/√(1+‖u‖²)`.
pub fn psi_inverse(p: &DualPoint) -> Result<Hyperplane> {
    check_finite(&p.u, "dual point")?;
    if !p.v.is_finite() {
        return Err(Error::NonFinite("dual point"));
    }
    let c = cosine_factor(p);
    let mut coords: Vec<f64> = p.u.iter().map(|u| u * c).collect();
    coords.push(c);
    Ok(Hyperplane {
        normal: Direction { coords },
        offset: p.v * c,
    })
}

/// `1/√(1+‖u‖²)`, the last normal coordinate of `psi_inverse(p)`.
pub fn cosine_factor(p: &DualPoint) -> f64 {
    1.0 / (1.0 + dot(&p.u, &p.u)).sqrt()
}

/// `{(u, v) : v = y0 + u·z0}`, the set of H1 hyperplanes through `(z0, y0)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualHyperplane {
    pub z0: Vec<f64>,
    pub y0: f64,
}

impl DualHyperplane {
    /// `v - y0 - u·z0`; positive above the dual hyperplane.
    pub fn residual(&self, p: &DualPoint) -> f64 {
        p.v - self.y0 - dot(&p.u, &self.z0)
    }

    pub fn contains(&self, p: &DualPoint, tol: f64) -> bool {
        self.residual(p).abs() <= tol
    }
}

pub fn dual_of_point(z0: &[f64], y0: f64) -> DualHyperplane {
    DualHyperplane {
        z0: z0.to_vec(),
        y0,
    }
}

/// `{(u, v) : v − u·z0 ∈ (y1, y2]}`: hyperplanes crossing the vertical segment
/// above `z0` from height `y1` (exclusive) to `y2` (inclusive).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualSlab {
    z0: Vec<f64>,
    y1: f64,
    y2: f64,
}

impl DualSlab {
    /// `y1` may be `-∞` and `y2` may be `+∞`.
    pub fn new(z0: &[f64], y1: f64, y2: f64) -> Result<Self> {
        check_finite(z0, "slab base point")?;
        if y1.is_nan() || y2.is_nan() || y1 > y2 || y1 == f64::INFINITY || y2 == f64::NEG_INFINITY {
            return Err(Error::InvalidSlab { y1, y2 });
        }
        Ok(Self {
            z0: z0.to_vec(),
            y1,
            y2,
        })
    }

    pub fn z0(&self) -> &[f64] {
        &self.z0
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.y1, self.y2)
    }

    pub fn contains(&self, p: &DualPoint) -> bool {
        let t = p.v - dot(&p.u, &self.z0);
        self.y1 < t && t <= self.y2
    }

    /// Primal form of membership: `dir·(z0, y1) < b ≤ dir·(z0, y2)`.
    /// Equatorial normals never cross a vertical segment.
    pub fn crosses(&self, dir: &Direction, b: f64) -> bool {
        if dir.is_equatorial() {
            return false;
        }
        line_height(dir, &self.z0, self.y1) < b && b <= line_height(dir, &self.z0, self.y2)
    }
}

/// `dir · (z0, y)`, summed in the same order as [`Direction::dot`] so that it is
/// bitwise equal to `dir.dot(&[z0.., y])` and monotone in `y`.
pub(crate) fn line_height(dir: &Direction, z0: &[f64], y: f64) -> f64 {
    let c = dir.coords();
    let head: f64 = c.iter().zip(z0).map(|(a, z)| a * z).sum();
    head + c[c.len() - 1] * y
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonicalize_examples() {
        let (d, s) = canonicalize_direction(&[0.0, -1.0]).unwrap();
        assert_eq!(d.coords(), &[0.0, 1.0]);
        assert_eq!(s, -1.0);

        let (d, s) = canonicalize_direction(&[3.0, 4.0]).unwrap();
        assert!((d.coords()[0] - 0.6).abs() < 1e-15);
        assert!((d.coords()[1] - 0.8).abs() < 1e-15);
        assert_eq!(s, 1.0);

        let (d, s) = canonicalize_direction(&[-1.0, 0.0]).unwrap();
        assert_eq!(d.coords(), &[1.0, 0.0]);
        assert_eq!(s, -1.0);
    }

    #[test]
    fn canonicalize_zero_is_degenerate() {
        assert!(matches!(
            canonicalize_direction(&[0.0, 0.0]),
            Err(Error::DegenerateDirection)
        ));
    }

    #[test]
    fn tie_at_eps_zero_recurses() {
        // last coordinate exactly at the tolerance counts as zero
        let a = [1.0, -EPS_ZERO];
        let (d, s) = canonicalize_direction(&a).unwrap();
        assert_eq!(s, 1.0);
        assert_eq!(d.coords()[0], 1.0);
    }

    #[test]
    fn half_sphere_examples() {
        assert!(in_half_sphere(&[0.0, 0.0, 1.0]).unwrap());
        assert!(!in_half_sphere(&[0.0, 0.0, -1.0]).unwrap());
        assert!(in_half_sphere(&[1.0, 0.0, 0.0]).unwrap());
        assert!(in_half_sphere(&[0.0, 2.0]).is_err());
    }

    #[test]
    fn psi_examples() {
        let h = Hyperplane::new(&[0.0, 1.0], 2.0).unwrap();
        let p = psi(&h).unwrap();
        assert_eq!(p.u, vec![0.0]);
        assert_eq!(p.v, 2.0);

        let h = Hyperplane::new(&[0.6, 0.8], 1.0).unwrap();
        let p = psi(&h).unwrap();
        assert!((p.u[0] - 0.75).abs() < 1e-15);
        assert!((p.v - 1.25).abs() < 1e-15);

        let h = Hyperplane::new(&[1.0, 0.0], 0.0).unwrap();
        assert!(matches!(psi(&h), Err(Error::NotInH1 { .. })));
    }

    #[test]
    fn psi_inverse_examples() {
        let h = psi_inverse(&DualPoint {
            u: vec![0.0],
            v: 2.0,
        })
        .unwrap();
        assert_eq!(h.normal.coords(), &[0.0, 1.0]);
        assert_eq!(h.offset, 2.0);

        let h = psi_inverse(&DualPoint {
            u: vec![0.75],
            v: 1.25,
        })
        .unwrap();
        assert!((h.normal.coords()[0] - 0.6).abs() < 1e-15);
        assert!((h.normal.coords()[1] - 0.8).abs() < 1e-15);
        assert!((h.offset - 1.0).abs() < 1e-15);

        assert!(psi_inverse(&DualPoint {
            u: vec![f64::NAN],
            v: 0.0
        })
        .is_err());
    }

    #[test]
    fn hyperplane_offset_follows_normal_flip() {
        let h = Hyperplane::new(&[0.0, -2.0], 4.0).unwrap();
        assert_eq!(h.normal.coords(), &[0.0, 1.0]);
        assert_eq!(h.offset, -2.0);
        assert!(h.contains(&[7.0, -2.0], 1e-15));
    }

    #[test]
    fn dual_of_point_examples() {
        let d = dual_of_point(&[0.0], 3.0);
        assert!(d.contains(
            &DualPoint {
                u: vec![5.0],
                v: 3.0
            },
            0.0
        ));
        let d = dual_of_point(&[1.0], 0.0);
        assert!(d.contains(
            &DualPoint {
                u: vec![2.5],
                v: 2.5
            },
            0.0
        ));
        assert!(!d.contains(
            &DualPoint {
                u: vec![2.5],
                v: 2.0
            },
            1e-9
        ));
    }

    #[test]
    fn cosine_factor_examples() {
        assert_eq!(
            cosine_factor(&DualPoint {
                u: vec![0.0],
                v: 9.0
            }),
            1.0
        );
        let c = cosine_factor(&DualPoint {
            u: vec![1.0],
            v: 0.0,
        });
        assert!((c - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn slab_is_half_open() {
        let s = DualSlab::new(&[0.0], 0.0, 2.0).unwrap();
        let dir = Direction::last_axis(2);
        assert!(s.crosses(&dir, 1.0));
        assert!(s.crosses(&dir, 2.0));
        assert!(!s.crosses(&dir, 0.0));
        assert!(s.contains(&DualPoint {
            u: vec![0.0],
            v: 2.0
        }));
        assert!(!s.contains(&DualPoint {
            u: vec![0.0],
            v: 0.0
        }));

        let all = DualSlab::new(&[0.0], f64::NEG_INFINITY, f64::INFINITY).unwrap();
        assert!(all.crosses(&dir, -1e300));
        assert!(!all.crosses(&Direction::from_canonical(vec![1.0, 0.0]).unwrap(), 0.0));

        assert!(DualSlab::new(&[0.0], 2.0, 1.0).is_err());
        assert!(DualSlab::new(&[0.0], f64::INFINITY, f64::INFINITY).is_err());
    }

    #[test]
    fn line_height_matches_dot() {
        let dir = Direction::from_canonical(vec![0.48, -0.6, 0.64]).unwrap();
        let z0 = [0.3, -1.7];
        let y = 2.25;
        assert_eq!(line_height(&dir, &z0, y), dir.dot(&[0.3, -1.7, 2.25]));
    }
}
