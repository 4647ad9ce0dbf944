use thiserror::Error;

use crate::lattice::SiteIndex;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("lattice must have at least one unit cell in each direction (got {nx}x{ny})")]
    EmptyLattice { nx: usize, ny: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error(
        "periodic {nx}x{ny} torus with gauge phase {theta} rad carries total flux {total_flux} rad, \
         not an integer multiple of 2π"
    )]
    FluxQuantization { nx: usize, ny: usize, theta: f64, total_flux: f64 },

    #[error("site {site} lies outside the {nx}x{ny} lattice")]
    SiteOutOfRange { site: SiteIndex, nx: usize, ny: usize },

    #[error("{what} anchored at {anchor} does not fit inside the {nx}x{ny} lattice")]
    FootprintOutside { what: String, anchor: SiteIndex, nx: usize, ny: usize },

    #[error("plaquette at {anchor} is missing the bond {from} -> {to}")]
    MissingBond { anchor: SiteIndex, from: SiteIndex, to: SiteIndex },

    #[error("ring mode RM3 needs gauge phase π/3, lattice has {theta} rad")]
    GaugeMismatch { theta: f64 },

    #[error("no zero mode found on the ring-mode footprint (smallest singular value {sigma:e})")]
    NoLocalZeroMode { sigma: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix dimension {dim} exceeds the configured cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("steady-state system is singular (κ = {kappa}, Ω_P = {detuning})")]
    SingularSystem { kappa: f64, detuning: f64 },

    #[error("no eigenvalues inside the window ±{window} rad/s at θ index {theta_index}")]
    EmptyWindow { window: f64, theta_index: usize },

    #[error("localization factor undefined: no photons in the pump neighbourhood")]
    ZeroDenominator,

    #[error("failed to bracket the eigenmode of resonator {tlr}: {reason}")]
    RootBracketing { tlr: char, reason: String },

    #[error("degenerate or crossing circuit modes: {0}")]
    DegenerateModes(String),

    #[error("configuration key `{key}`: {reason}")]
    Config { key: String, reason: String },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }
}
