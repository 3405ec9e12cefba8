//! Exactly solvable quench dynamics of the transverse-field XY chain at finite
//! temperature, and detection of the quantum critical region from the
//! temperature dependence of dynamical responses.
//!
//! The chain `H = 1/2 sum_j [J((1+g)/2 sx sx + (1-g)/2 sy sy) + h sz]` is
//! solved in the thermodynamic limit through its momentum blocks
//! ([`lattice`], [`dynamics`]). From the nearest-neighbour two-site state and
//! the momentum-resolved energy, [`observables`] computes negativity,
//! logarithmic negativity, mutual information and the energy absorbed in a
//! square field pulse. [`qcr`] turns their maximal responses into the
//! constancy-window temperature `T*` and maps the critical cone. [`ed`] is a
//! brute-force exact-diagonalisation oracle for small periodic chains, and
//! [`harness`] drives the dataset commands of the `xy-qcr` binary.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod ed;
pub mod error;
pub mod harness;
pub mod lattice;
pub mod observables;
pub mod qcr;
pub mod quadrature;

pub use dynamics::{
    contractions, evolve_block, mode_expectations, thermal_block_state, two_site_state,
    Contractions, ModeState, SuddenQuench, TwoSiteState,
};
pub use error::{Error, Result};
pub use lattice::{
    block_hamiltonian, bogoliubov_unitary, dispersion, BlockHamiltonian, ModelParams,
    QuenchProtocol, Temperature,
};
pub use observables::{
    assemble_rho, energy_absorbed, log_negativity, mutual_information, negativity, EnergyResponse,
    PulseAbsorption, TwoQubitDensityMatrix,
};
pub use quadrature::{make_grid, MomentumGrid};

/// Version string written into every output file header.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
