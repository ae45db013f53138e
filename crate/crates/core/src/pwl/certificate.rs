//! Vanishing-integral certificates for the dichotomy "finite width or not
//! piecewise linear".
//!
//! Along a vertical line the slope jump at each crossing equals the slab
//! integral over a short segment around it, and between crossings the slab
//! integral must vanish. A measure whose function is piecewise linear
//! therefore has all its mass on the hyperplanes that show up as creases.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{check_dim, dual_of_point, DualSlab};
use crate::measure::{
    decompose, half_space_integral, slab_integral, total_variation, AffineTail, RidgeMeasure, Side,
};
use crate::network::eval_measure;

use super::creases::{
    affine_deviation, default_crease_tol, detect_creases, sample_line, CreaseConfig, CreaseReport,
    DEFAULT_RESOLUTION,
};
use super::general_position::GeneralPositionSet;

/// Half-open height interval `(lo, hi]` on the line above `z0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gap {
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapVerdict {
    pub gap: Gap,
    pub value: f64,
    pub pass: bool,
}

/// Maximal crease-free intervals of the sampled range: `(lo + step, hi − step]`
/// with every crease support removed. Empty pieces are dropped.
pub fn crease_free_gaps(report: &CreaseReport) -> Vec<Gap> {
    let (lo, hi) = report.y_range;
    let mut cuts: Vec<(f64, f64)> = report.creases.iter().map(|c| c.support).collect();
    cuts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut gaps = Vec::new();
    let mut start = lo + report.step;
    let end = hi - report.step;
    for (a, b) in cuts {
        if a > start {
            gaps.push(Gap {
                lo: start,
                hi: a.min(end),
            });
        }
        start = start.max(b);
    }
    if end > start {
        gaps.push(Gap { lo: start, hi: end });
    }
    gaps.retain(|g| g.hi > g.lo);
    gaps
}

/// Slab integral of `m` over every crease-free gap of `report`; a gap passes
/// iff `|value| ≤ tol`.
pub fn verify_slab_vanishing(
    m: &RidgeMeasure,
    z0: &[f64],
    report: &CreaseReport,
    tol: f64,
) -> Result<Vec<GapVerdict>> {
    check_dim(m.dim(), z0.len() + 1)?;
    crease_free_gaps(report)
        .into_iter()
        .map(|gap| {
            let value = slab_integral(m, &DualSlab::new(z0, gap.lo, gap.hi)?);
            Ok(GapVerdict {
                gap,
                value,
                pass: value.abs() <= tol,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CramerWoldConfig {
    pub offsets_per_direction: usize,
    /// Offsets `y0` are uniform in `[−y0_range, y0_range]`.
    pub y0_range: f64,
    pub seed: u64,
}

impl Default for CramerWoldConfig {
    fn default() -> Self {
        Self {
            offsets_per_direction: 16,
            y0_range: 3.0,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfSpaceSample {
    pub z0: Vec<f64>,
    pub y0: f64,
    pub above: f64,
    pub below: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CramerWoldReport {
    pub samples: Vec<HalfSpaceSample>,
    pub max_abs: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Half-space integrals on both sides of `v = y0 + u·z0` for every `z0` in
/// `directions` and seeded random `y0`. The seed is taken from `directions`.
pub fn cramer_wold_check(
    m: &RidgeMeasure,
    directions: &GeneralPositionSet,
    offsets_per_direction: usize,
    tol: f64,
) -> Result<CramerWoldReport> {
    let cfg = CramerWoldConfig {
        offsets_per_direction,
        seed: directions.seed,
        ..CramerWoldConfig::default()
    };
    cramer_wold_check_with(m, directions, tol, &cfg)
}

pub fn cramer_wold_check_with(
    m: &RidgeMeasure,
    directions: &GeneralPositionSet,
    tol: f64,
    cfg: &CramerWoldConfig,
) -> Result<CramerWoldReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut samples = Vec::with_capacity(directions.points.len() * cfg.offsets_per_direction);
    for z0 in &directions.points {
        check_dim(m.dim(), z0.len() + 1)?;
        for _ in 0..cfg.offsets_per_direction {
            let y0 = rng.random_range(-cfg.y0_range..=cfg.y0_range);
            let boundary = dual_of_point(z0, y0);
            samples.push(HalfSpaceSample {
                z0: z0.clone(),
                y0,
                above: half_space_integral(m, &boundary, Side::Above),
                below: half_space_integral(m, &boundary, Side::Below),
            });
        }
    }
    let max_abs = samples
        .iter()
        .map(|s| s.above.abs().max(s.below.abs()))
        .fold(0.0, f64::max);
    Ok(CramerWoldReport {
        samples,
        max_abs,
        tol,
        pass: max_abs <= tol,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checks {
    pub creases: bool,
    pub slab: bool,
    pub cramer_wold: bool,
}

impl Default for Checks {
    fn default() -> Self {
        Self {
            creases: true,
            slab: true,
            cramer_wold: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateConfig {
    pub checks: Checks,
    pub y_range: (f64, f64),
    pub resolution: usize,
    pub crease: CreaseConfig,
    /// Absolute crease threshold; `None` uses [`default_crease_tol`].
    pub crease_tol: Option<f64>,
    /// Slab tolerance is `slab_rel_tol · (1 + TV)`.
    pub slab_rel_tol: f64,
    /// Relative tolerance for the affine test on gaps.
    pub affine_tol: f64,
    pub affine_probes: usize,
    pub cramer_wold: CramerWoldConfig,
    /// Cramér–Wold threshold is `cw_factor · TV(residual) / √particles`.
    pub cw_factor: f64,
}

impl Default for CertificateConfig {
    fn default() -> Self {
        Self {
            checks: Checks::default(),
            y_range: (-4.0, 4.0),
            resolution: DEFAULT_RESOLUTION,
            crease: CreaseConfig::default(),
            crease_tol: None,
            slab_rel_tol: 1e-9,
            affine_tol: 1e-6,
            affine_probes: 65,
            cramer_wold: CramerWoldConfig::default(),
            cw_factor: 3.0,
        }
    }
}

/// Detected creases whose supports overlap, compared with the atomic slab
/// mass over the union of those supports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CreaseAlignment {
    pub support: (f64, f64),
    pub detected_jump: f64,
    pub atomic_mass: f64,
    pub edge: bool,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureWitness {
    pub gap: Gap,
    pub max_deviation: f64,
    pub allowed: f64,
    pub affine: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineCertificate {
    pub z0: Vec<f64>,
    pub report: CreaseReport,
    pub alignments: Vec<CreaseAlignment>,
    pub curvature: Vec<CurvatureWitness>,
    pub gaps: Vec<GapVerdict>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub checks: Checks,
    pub lines: Vec<LineCertificate>,
    /// Every crease matches atomic mass and every gap is affine.
    pub creases_match_atoms: bool,
    /// Largest `|slab integral|` over all gaps.
    pub residual_slab_mass: f64,
    pub slab_tol: f64,
    pub cramer_wold: Option<CramerWoldReport>,
    pub pass: bool,
    pub conclusion: String,
    /// Human-readable failures, in line order.
    pub trace: Vec<String>,
}

pub const CONSISTENT: &str = "consistent with finite-width representability";

fn align_creases(
    atomic: &RidgeMeasure,
    z0: &[f64],
    report: &CreaseReport,
) -> Result<Vec<CreaseAlignment>> {
    let mut out: Vec<CreaseAlignment> = Vec::new();
    let mut groups: Vec<(f64, f64, f64, bool)> = Vec::new();
    for c in &report.creases {
        match groups.last_mut() {
            Some(g) if c.support.0 <= g.1 => {
                g.1 = g.1.max(c.support.1);
                g.2 += c.jump;
                g.3 |= c.edge;
            }
            _ => groups.push((c.support.0, c.support.1, c.jump, c.edge)),
        }
    }
    for (lo, hi, jump, edge) in groups {
        let mass = slab_integral(atomic, &DualSlab::new(z0, lo, hi)?);
        let pass = if edge {
            mass.abs() > 0.0
        } else {
            (jump - mass).abs() <= 1e-6 * (1.0 + jump.abs()) + 2.0 * report.threshold
        };
        out.push(CreaseAlignment {
            support: (lo, hi),
            detected_jump: jump,
            atomic_mass: mass,
            edge,
            pass,
        });
    }
    Ok(out)
}

/// Runs the selected checks along `{z0} × y_range` for every `z0` in `gp`.
pub fn pwl_certificate(
    m: &RidgeMeasure,
    tail: &AffineTail,
    gp: &GeneralPositionSet,
    cfg: &CertificateConfig,
) -> Result<Certificate> {
    check_dim(m.dim(), tail.a0.len())?;
    if cfg.resolution < 3 {
        return Err(Error::InvalidArgument(
            "resolution must be at least 3".into(),
        ));
    }
    let (atomic, residual) = decompose(m);
    let slab_tol = cfg.slab_rel_tol * (1.0 + total_variation(m));
    let f = |x: &[f64]| eval_measure(m, tail, x).unwrap_or(f64::NAN);

    let mut lines = Vec::with_capacity(gp.points.len());
    let mut trace = Vec::new();
    let mut creases_ok = true;
    let mut residual_slab_mass = 0.0_f64;

    for z0 in &gp.points {
        check_dim(m.dim(), z0.len() + 1)?;
        let samples = sample_line(f, z0, cfg.y_range, cfg.resolution)?;
        let tol = cfg
            .crease_tol
            .unwrap_or_else(|| default_crease_tol(&samples, cfg.crease.rel_tol));
        let report = detect_creases(&samples, tol, &cfg.crease);
        let mut line_ok = true;

        let mut alignments = Vec::new();
        let mut curvature = Vec::new();
        if cfg.checks.creases {
            alignments = align_creases(&atomic, z0, &report)?;
            for a in alignments.iter().filter(|a| !a.pass) {
                trace.push(format!(
                    "z0={z0:?}: crease on ({}, {}] with jump {} but atomic mass {}",
                    a.support.0, a.support.1, a.detected_jump, a.atomic_mass
                ));
            }
            for gap in crease_free_gaps(&report) {
                let mut x1 = z0.clone();
                x1.push(gap.lo);
                let mut x2 = z0.clone();
                x2.push(gap.hi);
                let d = affine_deviation(f, &x1, &x2, cfg.affine_probes);
                let allowed = cfg.affine_tol * d.scale;
                let affine = d.max_deviation <= allowed;
                if !affine {
                    trace.push(format!(
                        "z0={z0:?}: f is not affine on crease-free ({}, {}], deviation {} > {}",
                        gap.lo, gap.hi, d.max_deviation, allowed
                    ));
                }
                curvature.push(CurvatureWitness {
                    gap,
                    max_deviation: d.max_deviation,
                    allowed,
                    affine,
                });
            }
            let ok = alignments.iter().all(|a| a.pass) && curvature.iter().all(|c| c.affine);
            creases_ok &= ok;
            line_ok &= ok;
        }

        let mut gaps = Vec::new();
        if cfg.checks.slab {
            gaps = verify_slab_vanishing(m, z0, &report, slab_tol)?;
            for g in &gaps {
                residual_slab_mass = residual_slab_mass.max(g.value.abs());
                if !g.pass {
                    trace.push(format!(
                        "z0={z0:?}: slab mass {} on crease-free ({}, {}]",
                        g.value, g.gap.lo, g.gap.hi
                    ));
                }
            }
            line_ok &= gaps.iter().all(|g| g.pass);
        }

        lines.push(LineCertificate {
            z0: z0.clone(),
            report,
            alignments,
            curvature,
            gaps,
            pass: line_ok,
        });
    }

    let cramer_wold = if cfg.checks.cramer_wold {
        let n = residual.particles().len();
        let tol = if n == 0 {
            0.0
        } else {
            cfg.cw_factor * total_variation(&residual) / (n as f64).sqrt()
        };
        let r = cramer_wold_check_with(&residual, gp, tol, &cfg.cramer_wold)?;
        if !r.pass {
            trace.push(format!(
                "residual half-space mass {} exceeds {}",
                r.max_abs, r.tol
            ));
        }
        Some(r)
    } else {
        None
    };

    let pass = lines.iter().all(|l| l.pass) && cramer_wold.as_ref().is_none_or(|r| r.pass);
    let conclusion = if pass {
        CONSISTENT.to_string()
    } else {
        format!(
            "counterexample: {}",
            trace.first().map_or("", String::as_str)
        )
    };
    Ok(Certificate {
        checks: cfg.checks,
        lines,
        creases_match_atoms: creases_ok,
        residual_slab_mass,
        slab_tol,
        cramer_wold,
        pass,
        conclusion,
        trace,
    })
}
