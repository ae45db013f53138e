//! Piecewise-linearity diagnostics: general-position sampling, crease
//! detection along vertical lines, and the vanishing-integral certificates.

pub mod certificate;
pub mod creases;
pub mod general_position;

pub use certificate::{
    cramer_wold_check, cramer_wold_check_with, crease_free_gaps, pwl_certificate,
    verify_slab_vanishing, Certificate, CertificateConfig, Checks, CramerWoldConfig,
    CramerWoldReport, CreaseAlignment, CurvatureWitness, Gap, GapVerdict, HalfSpaceSample,
    LineCertificate, CONSISTENT,
};
pub use creases::{
    affine_deviation, default_crease_tol, detect_creases, detect_creases_on_line,
    is_affine_on_segment, line_trace, sample_line, AffineDeviation, CreaseConfig, CreaseReport,
    LineCrease, LineSamples, TraceRow, DEFAULT_RESOLUTION,
};
pub use general_position::{
    find_violation, normalized_displacement_det, sample_general_position, Ball, GeneralPositionSet,
    EPS_GP,
};
