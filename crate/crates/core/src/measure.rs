//! Finite signed measures on half-sphere × R and the maps that bring an
//! arbitrary parameterization into that canonical form.
//!
//! A [`RidgeMeasure`] keeps two lists. `atoms` are genuine point masses.
//! `particles` are a quadrature stand-in for an atomless component: they are
//! point masses numerically, but they are never merged and never become units
//! of an extracted network.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    canonicalize_direction, check_dim, check_finite, line_height, norm, Direction, DualHyperplane,
    DualSlab, EPS_ZERO, FIXED_POINT_TOL, UNIT_TOL,
};

/// Numerical tolerances shared by canonicalization and extraction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Zero test for direction coordinates and for `‖a‖` in normalization.
    pub zero: f64,
    /// Max-norm distance on `(dir, b)` under which two atoms are merged.
    pub merge: f64,
    /// Atoms with `|w|` below this are pruned.
    pub weight: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            zero: EPS_ZERO,
            merge: 1e-9,
            weight: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RidgeAtom {
    pub dir: Direction,
    pub b: f64,
    pub w: f64,
}

impl RidgeAtom {
    pub fn new(dir: Direction, b: f64, w: f64) -> Self {
        Self { dir, b, w }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RidgeMeasure {
    dim: usize,
    atoms: Vec<RidgeAtom>,
    particles: Vec<RidgeAtom>,
}

impl RidgeMeasure {
    pub fn empty(dim: usize) -> Self {
        Self {
            dim,
            atoms: Vec::new(),
            particles: Vec::new(),
        }
    }

    pub fn new(dim: usize, atoms: Vec<RidgeAtom>, particles: Vec<RidgeAtom>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        for e in atoms.iter().chain(&particles) {
            check_dim(dim, e.dir.dim())?;
            if !e.b.is_finite() || !e.w.is_finite() {
                return Err(Error::NonFinite("measure entry"));
            }
        }
        Ok(Self {
            dim,
            atoms,
            particles,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn atoms(&self) -> &[RidgeAtom] {
        &self.atoms
    }

    pub fn particles(&self) -> &[RidgeAtom] {
        &self.particles
    }

    /// Atoms followed by particles, in storage order.
    pub fn entries(&self) -> impl Iterator<Item = &RidgeAtom> {
        self.atoms.iter().chain(&self.particles)
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty() && self.particles.is_empty()
    }

    pub fn len(&self) -> usize {
        self.atoms.len() + self.particles.len()
    }

    pub fn push_atom(&mut self, atom: RidgeAtom) -> Result<()> {
        check_dim(self.dim, atom.dir.dim())?;
        self.atoms.push(atom);
        Ok(())
    }

    pub fn push_particle(&mut self, particle: RidgeAtom) -> Result<()> {
        check_dim(self.dim, particle.dir.dim())?;
        self.particles.push(particle);
        Ok(())
    }
}

/// The affine part `a0·x + b0` plus the representation constant `c0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineTail {
    pub a0: Vec<f64>,
    pub b0: f64,
    pub c0: f64,
}

impl AffineTail {
    pub fn zero(dim: usize) -> Self {
        Self {
            a0: vec![0.0; dim],
            b0: 0.0,
            c0: 0.0,
        }
    }

    pub fn constant(dim: usize, c0: f64) -> Self {
        Self {
            c0,
            ..Self::zero(dim)
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        crate::geometry::dot(&self.a0, x) + self.b0 + self.c0
    }
}

/// A canonical measure together with its affine tail.
#[derive(Debug, Clone, PartialEq)]
pub struct Representation {
    pub measure: RidgeMeasure,
    pub tail: AffineTail,
}

impl Representation {
    pub fn dim(&self) -> usize {
        self.measure.dim()
    }
}

/// A parameter `(a, b, w)` with `a` not necessarily unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EuclideanEntry {
    pub a: Vec<f64>,
    pub b: f64,
    pub w: f64,
}

impl EuclideanEntry {
    pub fn new(a: Vec<f64>, b: f64, w: f64) -> Self {
        Self { a, b, w }
    }
}

/// A finite measure on R^{dim} × R. Finiteness of the lists gives compact support.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EuclideanMeasure {
    pub dim: usize,
    pub atoms: Vec<EuclideanEntry>,
    pub particles: Vec<EuclideanEntry>,
}

impl EuclideanMeasure {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        for e in self.atoms.iter().chain(&self.particles) {
            check_dim(self.dim, e.a.len())?;
            check_finite(&e.a, "measure entry")?;
            if !e.b.is_finite() || !e.w.is_finite() {
                return Err(Error::NonFinite("measure entry"));
            }
        }
        Ok(())
    }
}

/// A measure on the full unit sphere × R, before folding onto the half-sphere.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SphereMeasure {
    pub dim: usize,
    pub atoms: Vec<EuclideanEntry>,
    pub particles: Vec<EuclideanEntry>,
}

/// Rescales each `(a, b, w)` to `(a/‖a‖, b/‖a‖, w‖a‖)`.
///
/// Entries with `‖a‖ ≤ tol.zero` contribute `σ(−b) − σ(−b) = 0` and are dropped
/// (with a warning).
pub fn normalize_from_euclidean(t: &EuclideanMeasure) -> Result<SphereMeasure> {
    normalize_with(t, &Tolerances::default())
}

fn normalize_with(t: &EuclideanMeasure, tol: &Tolerances) -> Result<SphereMeasure> {
    t.validate()?;
    let map = |entries: &[EuclideanEntry], kind: &str| -> Vec<EuclideanEntry> {
        let mut out = Vec::with_capacity(entries.len());
        for (i, e) in entries.iter().enumerate() {
            let n = norm(&e.a);
            if n <= tol.zero {
                log::warn!(
                    "dropping {kind} {i}: zero direction (b = {}, w = {}) contributes nothing",
                    e.b,
                    e.w
                );
                continue;
            }
            if (n - 1.0).abs() <= FIXED_POINT_TOL {
                out.push(e.clone());
            } else {
                out.push(EuclideanEntry {
                    a: e.a.iter().map(|x| x / n).collect(),
                    b: e.b / n,
                    w: e.w * n,
                });
            }
        }
        out
    };
    Ok(SphereMeasure {
        dim: t.dim,
        atoms: map(&t.atoms, "atom"),
        particles: map(&t.particles, "particle"),
    })
}

/// Moves every entry on the lower half-sphere to its antipode.
///
/// Uses `σ(−t) = σ(t) − t`: the entry `(a, b, w)` with `a ∉ 𝒮ⁿ` becomes
/// `(−a, −b, w)` and adds `w·a` to the linear tail. The result satisfies
/// `f_in(x) = f_out(x) + a0·x` pointwise.
pub fn fold_to_half_sphere(s: &SphereMeasure) -> Result<(RidgeMeasure, AffineTail)> {
    if s.dim == 0 {
        return Err(Error::InvalidArgument("dimension must be positive".into()));
    }
    let mut tail = AffineTail::zero(s.dim);
    let mut fold = |entries: &[EuclideanEntry]| -> Result<Vec<RidgeAtom>> {
        let mut out = Vec::with_capacity(entries.len());
        for e in entries {
            check_dim(s.dim, e.a.len())?;
            let n = norm(&e.a);
            if !n.is_finite() || (n - 1.0).abs() > UNIT_TOL {
                return Err(Error::NotUnit { norm: n });
            }
            let (dir, sign) = canonicalize_direction(&e.a)?;
            if sign > 0.0 {
                out.push(RidgeAtom::new(dir, e.b, e.w));
            } else {
                for (t, a) in tail.a0.iter_mut().zip(&e.a) {
                    *t += e.w * a;
                }
                out.push(RidgeAtom::new(dir, -e.b, e.w));
            }
        }
        Ok(out)
    };
    let atoms = fold(&s.atoms)?;
    let particles = fold(&s.particles)?;
    Ok((RidgeMeasure::new(s.dim, atoms, particles)?, tail))
}

/// Normalize, fold, merge duplicate atoms and prune negligible weights.
pub fn canonicalize_full(t: &EuclideanMeasure, c0: f64) -> Result<(RidgeMeasure, AffineTail)> {
    canonicalize_full_with(t, c0, &Tolerances::default())
}

pub fn canonicalize_full_with(
    t: &EuclideanMeasure,
    c0: f64,
    tol: &Tolerances,
) -> Result<(RidgeMeasure, AffineTail)> {
    if !c0.is_finite() {
        return Err(Error::NonFinite("c0"));
    }
    let sphere = normalize_with(t, tol)?;
    let (folded, mut tail) = fold_to_half_sphere(&sphere)?;
    tail.c0 = c0;
    let atoms = merge_atoms(folded.atoms, tol);
    let particles = folded
        .particles
        .into_iter()
        .filter(|p| p.w.abs() >= tol.weight)
        .collect();
    Ok((RidgeMeasure::new(folded.dim, atoms, particles)?, tail))
}

fn lex_cmp(x: &RidgeAtom, y: &RidgeAtom) -> Ordering {
    for (a, b) in x.dir.coords().iter().zip(y.dir.coords()) {
        match a.total_cmp(b) {
            Ordering::Equal => {}
            o => return o,
        }
    }
    x.b.total_cmp(&y.b)
}

fn within(x: &RidgeAtom, y: &RidgeAtom, eps: f64) -> bool {
    (x.b - y.b).abs() <= eps
        && x.dir
            .coords()
            .iter()
            .zip(y.dir.coords())
            .all(|(a, b)| (a - b).abs() <= eps)
}

/// Merges atoms whose `(dir, b)` agree within `tol.merge` (max norm), visiting in
/// lexicographic order and joining each atom to the earliest matching cluster.
/// The cluster keeps the coordinates of its first member. Output is sorted.
pub fn merge_atoms(mut atoms: Vec<RidgeAtom>, tol: &Tolerances) -> Vec<RidgeAtom> {
    atoms.sort_by(lex_cmp);
    let mut clusters: Vec<RidgeAtom> = Vec::with_capacity(atoms.len());
    for atom in atoms {
        let lead = atom.dir.coords()[0];
        // clusters are sorted by first coordinate, so only a trailing window can match
        let start = clusters
            .iter()
            .rposition(|c| c.dir.coords()[0] < lead - tol.merge)
            .map_or(0, |i| i + 1);
        match clusters[start..]
            .iter_mut()
            .find(|c| within(c, &atom, tol.merge))
        {
            Some(c) => c.w += atom.w,
            None => clusters.push(atom),
        }
    }
    clusters.retain(|c| c.w.abs() >= tol.weight);
    clusters
}

/// Structural split into the atomic part and the particle (atomless) part.
pub fn decompose(m: &RidgeMeasure) -> (RidgeMeasure, RidgeMeasure) {
    (
        RidgeMeasure {
            dim: m.dim,
            atoms: m.atoms.clone(),
            particles: Vec::new(),
        },
        RidgeMeasure {
            dim: m.dim,
            atoms: Vec::new(),
            particles: m.particles.clone(),
        },
    )
}

pub fn total_variation(m: &RidgeMeasure) -> f64 {
    m.entries().map(|e| e.w.abs()).sum()
}

/// `∫_L 1/√(1+‖u‖²) d(μ∘φ⁻¹)`, evaluated in primal form as the sum of
/// `w·(dir·e_{n+1})` over entries whose hyperplane crosses the segment
/// `(z0, y1)` (exclusive) to `(z0, y2)` (inclusive).
pub fn slab_integral(m: &RidgeMeasure, s: &DualSlab) -> f64 {
    m.entries()
        .filter(|e| s.crosses(&e.dir, e.b))
        .map(|e| e.w * e.dir.last())
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Above,
    Below,
}

/// Weighted mass `w·(dir·e_{n+1})` of entries whose dual point lies strictly on
/// one side of `v = y0 + u·z0`. Equivalently, the hyperplane crosses the
/// vertical line above `z0` strictly above (or below) height `y0`.
pub fn half_space_integral(m: &RidgeMeasure, boundary: &DualHyperplane, side: Side) -> f64 {
    m.entries()
        .filter(|e| !e.dir.is_equatorial())
        .filter(|e| {
            let h = line_height(&e.dir, &boundary.z0, boundary.y0);
            match side {
                Side::Above => e.b > h,
                Side::Below => e.b < h,
            }
        })
        .map(|e| e.w * e.dir.last())
        .sum()
}

/// Weighted mass on the boundary `v = y0 + u·z0` itself.
pub fn boundary_integral(m: &RidgeMeasure, boundary: &DualHyperplane) -> f64 {
    m.entries()
        .filter(|e| !e.dir.is_equatorial())
        .filter(|e| e.b == line_height(&e.dir, &boundary.z0, boundary.y0))
        .map(|e| e.w * e.dir.last())
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::dual_of_point;

    fn dir(c: &[f64]) -> Direction {
        Direction::from_canonical(c.to_vec()).unwrap()
    }

    #[test]
    fn normalize_examples() {
        let mut t = EuclideanMeasure::new(2);
        t.atoms.push(EuclideanEntry::new(vec![2.0, 0.0], 4.0, 1.0));
        t.atoms.push(EuclideanEntry::new(vec![0.0, 0.0], 5.0, 3.0));
        t.atoms.push(EuclideanEntry::new(vec![0.0, 1.0], 0.0, 1.0));
        let s = normalize_from_euclidean(&t).unwrap();
        assert_eq!(s.atoms.len(), 2);
        assert_eq!(s.atoms[0], EuclideanEntry::new(vec![1.0, 0.0], 2.0, 2.0));
        assert_eq!(s.atoms[1], EuclideanEntry::new(vec![0.0, 1.0], 0.0, 1.0));
    }

    #[test]
    fn normalize_rejects_dimension_mismatch() {
        let mut t = EuclideanMeasure::new(2);
        t.atoms
            .push(EuclideanEntry::new(vec![1.0, 0.0, 0.0], 0.0, 1.0));
        assert!(matches!(
            normalize_from_euclidean(&t),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn fold_worked_example() {
        let s = SphereMeasure {
            dim: 2,
            atoms: vec![EuclideanEntry::new(vec![0.0, -1.0], -3.0, 1.0)],
            particles: vec![],
        };
        let (m, tail) = fold_to_half_sphere(&s).unwrap();
        assert_eq!(m.atoms(), &[RidgeAtom::new(dir(&[0.0, 1.0]), 3.0, 1.0)]);
        assert_eq!(tail.a0, vec![0.0, -1.0]);
        assert_eq!(tail.b0, 0.0);
    }

    #[test]
    fn fold_passes_canonical_and_empty() {
        let s = SphereMeasure {
            dim: 2,
            atoms: vec![EuclideanEntry::new(vec![0.6, 0.8], 1.5, -2.0)],
            particles: vec![],
        };
        let (m, tail) = fold_to_half_sphere(&s).unwrap();
        assert_eq!(m.atoms(), &[RidgeAtom::new(dir(&[0.6, 0.8]), 1.5, -2.0)]);
        assert_eq!(tail, AffineTail::zero(2));

        let (m, tail) = fold_to_half_sphere(&SphereMeasure {
            dim: 3,
            ..Default::default()
        })
        .unwrap();
        assert!(m.is_empty());
        assert_eq!(tail, AffineTail::zero(3));
    }

    #[test]
    fn fold_rejects_non_unit() {
        let s = SphereMeasure {
            dim: 2,
            atoms: vec![EuclideanEntry::new(vec![0.0, 2.0], 0.0, 1.0)],
            particles: vec![],
        };
        assert!(matches!(
            fold_to_half_sphere(&s),
            Err(Error::NotUnit { .. })
        ));
    }

    #[test]
    fn canonicalize_full_examples() {
        let mut t = EuclideanMeasure::new(2);
        t.atoms.push(EuclideanEntry::new(vec![2.0, 0.0], 4.0, 1.0));
        let (m, tail) = canonicalize_full(&t, 0.5).unwrap();
        assert_eq!(m.atoms(), &[RidgeAtom::new(dir(&[1.0, 0.0]), 2.0, 2.0)]);
        assert_eq!(tail, AffineTail::constant(2, 0.5));

        let mut t = EuclideanMeasure::new(2);
        t.atoms.push(EuclideanEntry::new(vec![0.0, 1.0], 1.0, 1.25));
        t.atoms.push(EuclideanEntry::new(vec![0.0, 1.0], 1.0, -0.5));
        let (m, _) = canonicalize_full(&t, 0.0).unwrap();
        assert_eq!(m.atoms(), &[RidgeAtom::new(dir(&[0.0, 1.0]), 1.0, 0.75)]);

        // (a, b, w) and (−a, −b, w): the fold lands both on one atom of weight 2w
        let mut t = EuclideanMeasure::new(2);
        t.atoms.push(EuclideanEntry::new(vec![0.0, 1.0], 3.0, 1.0));
        t.atoms
            .push(EuclideanEntry::new(vec![0.0, -1.0], -3.0, 1.0));
        let (m, tail) = canonicalize_full(&t, 0.0).unwrap();
        assert_eq!(m.atoms(), &[RidgeAtom::new(dir(&[0.0, 1.0]), 3.0, 2.0)]);
        assert_eq!(tail.a0, vec![0.0, -1.0]);
    }

    #[test]
    fn merge_joins_near_duplicates_and_prunes() {
        let tol = Tolerances::default();
        let atoms = vec![
            RidgeAtom::new(dir(&[0.0, 1.0]), 1.0 + 5e-10, 2.0),
            RidgeAtom::new(dir(&[0.0, 1.0]), 1.0, 1.0),
            RidgeAtom::new(dir(&[0.6, 0.8]), 0.0, 1.0),
            RidgeAtom::new(dir(&[0.6, 0.8]), 0.0, -1.0),
        ];
        let merged = merge_atoms(atoms, &tol);
        assert_eq!(merged.len(), 1);
        assert_eq!(merged[0].b, 1.0);
        assert_eq!(merged[0].w, 3.0);
    }

    #[test]
    fn decompose_splits_structurally() {
        let mut m = RidgeMeasure::empty(2);
        m.push_atom(RidgeAtom::new(dir(&[0.0, 1.0]), 0.0, 1.0))
            .unwrap();
        m.push_atom(RidgeAtom::new(dir(&[1.0, 0.0]), 0.0, -2.0))
            .unwrap();
        for i in 0..100 {
            m.push_particle(RidgeAtom::new(dir(&[0.0, 1.0]), i as f64, 0.01))
                .unwrap();
        }
        let (a, r) = decompose(&m);
        assert_eq!(a.atoms().len(), 2);
        assert!(a.particles().is_empty());
        assert_eq!(r.particles().len(), 100);
        assert!(r.atoms().is_empty());

        let (a, r) = decompose(&a);
        assert_eq!(a.atoms().len(), 2);
        assert!(r.is_empty());
    }

    #[test]
    fn slab_examples() {
        let mut m = RidgeMeasure::empty(2);
        m.push_atom(RidgeAtom::new(dir(&[0.0, 1.0]), 1.0, 2.0))
            .unwrap();
        let s = DualSlab::new(&[0.0], 0.0, 2.0).unwrap();
        assert_eq!(slab_integral(&m, &s), 2.0);
        let s = DualSlab::new(&[0.0], 1.0, 2.0).unwrap();
        assert_eq!(slab_integral(&m, &s), 0.0);
        assert_eq!(slab_integral(&RidgeMeasure::empty(2), &s), 0.0);
    }

    #[test]
    fn equatorial_entries_do_not_contribute() {
        let mut m = RidgeMeasure::empty(2);
        m.push_atom(RidgeAtom::new(dir(&[1.0, 0.0]), 0.0, 5.0))
            .unwrap();
        let s = DualSlab::new(&[0.0], f64::NEG_INFINITY, f64::INFINITY).unwrap();
        assert_eq!(slab_integral(&m, &s), 0.0);
        let bd = dual_of_point(&[0.0], 0.0);
        assert_eq!(half_space_integral(&m, &bd, Side::Above), 0.0);
        assert_eq!(half_space_integral(&m, &bd, Side::Below), 0.0);
    }

    #[test]
    fn half_space_examples() {
        let bd = dual_of_point(&[0.0], 0.0);
        assert_eq!(
            half_space_integral(&RidgeMeasure::empty(2), &bd, Side::Above),
            0.0
        );
        // dual point (0, 1): normal (0, 1), offset 1
        let mut m = RidgeMeasure::empty(2);
        m.push_atom(RidgeAtom::new(dir(&[0.0, 1.0]), 1.0, 2.0))
            .unwrap();
        assert_eq!(half_space_integral(&m, &bd, Side::Above), 2.0);
        assert_eq!(half_space_integral(&m, &bd, Side::Below), 0.0);
        // on the boundary: excluded from both open half-spaces
        let on = dual_of_point(&[0.0], 1.0);
        assert_eq!(half_space_integral(&m, &on, Side::Above), 0.0);
        assert_eq!(half_space_integral(&m, &on, Side::Below), 0.0);
        assert_eq!(boundary_integral(&m, &on), 2.0);
    }

    #[test]
    fn total_variation_examples() {
        assert_eq!(total_variation(&RidgeMeasure::empty(2)), 0.0);
        let mut m = RidgeMeasure::empty(2);
        m.push_atom(RidgeAtom::new(dir(&[0.0, 1.0]), 1.0, 1.0))
            .unwrap();
        m.push_atom(RidgeAtom::new(dir(&[1.0, 0.0]), 1.0, -2.0))
            .unwrap();
        assert_eq!(total_variation(&m), 3.0);
    }
}
