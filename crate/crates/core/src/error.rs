use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("pole: {0}")]
    Pole(String),

    #[error("point lies on the anti-diagonal (z = τ(w))")]
    AntiDiagonal,

    #[error("degenerate restriction: the line passes through the center")]
    DegenerateRestriction,

    #[error("chart rotation required: leading coefficient of quadratic {index} vanishes")]
    ChartRotationRequired { index: usize },

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("chart error: {0}")]
    Chart(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("ill-conditioned: {0}")]
    IllConditioned(String),

    #[error("multiplicity error: {0}")]
    Multiplicity(String),

    #[error("finite-difference stencil leaves the domain: {0}")]
    Domain(String),

    #[error("singularity on the integration path at t = {t}")]
    PoleOnGeodesic { t: f64 },

    #[error("ill-posed: no spectral gap ({0})")]
    NoSpectralGap(String),

    #[error("integration failed: {0}")]
    Integration(String),

    #[error("spectral line: decaying solutions are parallel (pairing {pairing:e})")]
    SpectralLine { pairing: f64 },

    #[error("range error: {0}")]
    Range(String),

    #[error("configuration error: {0}")]
    Config(String),
}
