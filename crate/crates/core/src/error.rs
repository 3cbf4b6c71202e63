//! Error type shared by all modules.

use thiserror::Error;

/// Errors produced by lattice construction, spectral machinery and the
/// higher-level diagnostics built on them.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Invalid construction parameters.
    #[error("validation error: {0}")]
    Validation(String),

    /// Massless periodic lattice: the k=0 mode frequency vanishes and
    /// K^(-1/2) is undefined.
    #[error("zero mode: massless periodic lattice rejected")]
    ZeroMode,

    /// A matrix expected to be positive definite has a non-positive eigenvalue.
    #[error("not positive definite: eigenvalue {eigenvalue}")]
    NotPositiveDefinite { eigenvalue: f64 },

    /// Site index outside the lattice.
    #[error("site {site} out of range (lattice has {sites} sites)")]
    SiteOutOfRange { site: usize, sites: usize },

    /// Vector lengths do not agree.
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    /// Two states built from different lattice specs were combined.
    #[error("spec mismatch: {0}")]
    SpecMismatch(String),

    /// Regions passed to mutual information overlap.
    #[error("regions overlap")]
    OverlappingRegions,

    /// A region (or profile) with no sites.
    #[error("empty region")]
    EmptyRegion,

    /// A one-particle profile that is zero everywhere.
    #[error("all-zero profile")]
    ZeroProfile,

    /// Falloff-fit window problems (too small, outside valid range, ...).
    #[error("fit window: {0}")]
    FitWindow(String),

    /// All samples vanish: the state is exactly localised and no decay
    /// scale exists. Sentinel outcome of the falloff fit.
    #[error("exactly localised: all samples zero")]
    ExactlyLocalised,

    /// Fewer usable sample points than the fit requires.
    #[error("too few points: need {needed}, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    /// ELP input state is not individually L-localised in the region.
    #[error("precondition: input state {index} is not L-localised in the region ({detail})")]
    NotLLocalised { index: usize, detail: String },

    /// Truncated Fock space larger than the configured cap.
    #[error("dimension {dim} exceeds cap {cap}")]
    CapExceeded { dim: usize, cap: usize },

    /// Renormalisation matching grid contains no usable distances.
    #[error("empty matching grid")]
    EmptyMatchingGrid,

    /// The 1D mass search ended on a bracket edge instead of an interior
    /// minimum.
    #[error("search bracket exhausted without interior minimum (at mass {mass})")]
    BracketExhausted { mass: f64 },

    /// Operation requires a translation-invariant (periodic) lattice.
    #[error("requires a periodic (translation-invariant) lattice")]
    NotTranslationInvariant,

    /// Iterative eigensolver failed to converge.
    #[error("eigensolver did not converge: residual {residual}")]
    NoConvergence { residual: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
