//! Norm estimators, weight classification, and identity checks.

mod classify;
mod identities;
mod norms;

pub use classify::{
    classify, classify_with, ClassReport, ClassifyOptions, DcheckReport, DhatReport, Exponents,
    RegularReport, COARSE_CUTOFF, FINE_CUTOFF, STABILITY,
};
pub use identities::{
    asymptotic_ratio_probe, frac_lp_residual, lp_identity_residual, lp_shifted_residual,
    moment_lp_skeleton, plus_moment_identity, probe_radii, star_moment_identity, FracLpIdentity,
    LpIdentity, MomentIdentityRows, ProbeCurve, ProbeKind,
};
pub use norms::{
    besov_norm, bloch_seminorm, detect_divergence, lp_lambda_omega_norm, NormKind, NormReport,
    ScanGrid, DIVERGENCE_GROWTH, DIVERGENCE_STREAK, REFINEMENTS,
};
