//! Integral representations of shallow ReLU networks.
//!
//! A signed measure `μ` on `𝒮ⁿ × R` together with an affine tail defines
//!
//! ```text
//! f(x) = ∫ (σ(a·x − b) − σ(−b)) dμ(a, b) + a0·x + b0 + c0,
//! ```
//!
//! where `𝒮ⁿ` is the half-sphere of unit vectors whose last nonzero
//! coordinate is positive. The crate canonicalizes such measures, evaluates
//! them and their one-sided derivatives, extracts a finite-width network from
//! the atomic part, and checks numerically whether `f` is piecewise linear.
//!
//! Measures carry two lists: `atoms` (genuine point masses) and `particles`
//! (a finite cloud standing in for an atomless part).

pub mod error;
pub mod extract;
pub mod geometry;
pub mod io;
pub mod measure;
pub mod network;
pub mod pwl;

pub use error::{Error, Result};
pub use extract::{
    compact_support_diagnostic, crease_hyperplanes, crease_weights, default_residual_tol,
    extract_finite_network, extract_with, merge_units, Crease, FarField, FarFieldReport,
};
pub use geometry::{
    canonicalize_direction, cosine_factor, dual_of_point, in_half_sphere, psi, psi_inverse,
    Direction, DualHyperplane, DualPoint, DualSlab, Hyperplane, EPS_ZERO,
};
pub use measure::{
    boundary_integral, canonicalize_full, canonicalize_full_with, decompose, fold_to_half_sphere,
    half_space_integral, merge_atoms, normalize_from_euclidean, slab_integral, total_variation,
    AffineTail, EuclideanEntry, EuclideanMeasure, Representation, RidgeAtom, RidgeMeasure, Side,
    SphereMeasure, Tolerances,
};
pub use network::{
    directional_derivative, directional_derivative_along, eval_measure, eval_network,
    fd_directional_derivative, reflection_to_last_axis, relu, rotate_representation, FiniteNetwork,
    Unit,
};
