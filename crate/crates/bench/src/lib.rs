//! Shared fixtures for the benchmarks.

use lieb_core::units::mhz_to_angular;
use lieb_core::{LiebLatticeSpec, SiteIndex, SweepPumps};

/// 12×12 open lattice at `T/2π = 10 MHz` with `t′/2π = 0.6 MHz`.
pub fn default_lattice() -> LiebLatticeSpec {
    LiebLatticeSpec::new(12, 12, mhz_to_angular(10.0)).with_nnn(mhz_to_angular(0.6))
}

pub fn default_pumps() -> SweepPumps {
    SweepPumps {
        anchor: SiteIndex::a(6, 6),
        t_p: mhz_to_angular(1.0),
        kappa: mhz_to_angular(0.1),
        detuning: 0.0,
    }
}
