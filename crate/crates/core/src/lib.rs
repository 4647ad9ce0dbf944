//! Simulation library for a circuit-QED Lieb lattice built from
//! transmission-line resonators coupled through grounding SQUIDs.
//!
//! The crate is layered bottom-up:
//!
//! * [`lattice`] assembles the real-space hopping matrix (Peierls phases in
//!   Landau gauge, diagonal next-nearest-neighbour channels) and the compact
//!   ring-mode states of the flat band.
//! * [`bands`] diagonalizes the 3×3 Bloch Hamiltonian over the Brillouin zone.
//! * [`hofstadter`] sweeps the gauge phase on an open flake.
//! * [`steady`] solves the coherently pumped, uniformly damped linear
//!   steady state and the localization factor of the response.
//! * [`circuit`] solves the unit-cell eigenmodes of three resonators sharing a
//!   SQUID and propagates 1/f noise into lattice parameters.
//!
//! Frequencies are angular (rad/s) everywhere inside the library; the
//! [`units`] module converts to and from ordinary MHz/GHz at the I/O boundary.

pub mod bands;
pub mod circuit;
pub mod config;
pub mod error;
pub mod hofstadter;
pub mod lattice;
mod linalg;
pub mod report;
pub mod steady;
pub mod units;

pub use bands::{analytic_bands, band_grid, bloch_hamiltonian, flatness, BandSurface, BlochMatrix, Flatness};
pub use circuit::{
    critical_current_noise_disturbance, dc_mixing, esr, flux_noise_disturbance, fourth_order_ratio,
    noise_variance, parametric_strength, plasma_frequency, solve_eigenmodes, CircuitParams,
    Disturbance, EigenmodeSolution, NoiseBudget, NoiseSpec, ParametricHopping, ParametricPair, Tlr,
};
pub use config::RunConfig;
pub use error::{Error, Result};
pub use hofstadter::{butterfly, butterfly_with_cap, linspace, middle_cluster_width, ButterflySpectrum};
pub use lattice::{
    build_lieb, interference_residual, plaquette_flux, ring_mode, Boundary, HoppingTerm,
    LiebLatticeSpec, RealSpaceHamiltonian, RingModeKind, SiteIndex, StateVector, Sublattice,
};
pub use report::{CircuitReport, NoiseReport, NoiseScenario};
pub use steady::{
    localization_factor, localization_sweep, make_pump, steady_state, PumpConfig, PumpKind,
    SteadyStateResult, SweepPumps, SweepRow,
};
