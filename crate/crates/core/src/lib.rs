//! Numerical toolkit for the thermodynamic formalism of detailed-balance
//! quantum Markov semigroups on `n x n` matrices.
//!
//! * [`matrix`], [`eigen`], [`expm`], [`density`]: dense complex linear algebra.
//! * [`lindblad`]: σ-detailed-balance generators, modular maps, semigroups.
//! * [`equilibrium`]: Laplacian entropy, pressure, equilibrium densities,
//!   the transfer operator and the rate-functional infimum.
//! * [`classical`]: reduction to a continuous-time Markov chain.

pub mod classical;
pub mod density;
pub mod eigen;
pub mod equilibrium;
pub mod error;
pub mod expm;
pub mod json;
pub mod lindblad;
pub mod matrix;
pub mod random;

pub use classical::{embed_diagonal, evolve_classical, project_diagonal, reduce, ClassicalChain};
pub use density::DensityMatrix;
pub use eigen::{herm_eig, sqrt_psd, SpectralDecomposition};
pub use equilibrium::{
    entropy, entropy_via_generator, equilibrium, equilibrium_generator, pressure_functional,
    rate_functional, solve_kappa, transfer_apply, verify_rate_infimum, EquilibriumResult,
    RateReport,
};
pub use error::{Error, Result};
pub use expm::expm;
pub use lindblad::{build_dbc_generator, build_l0, DbcGenerator, DbcReport, Superoperator};
pub use matrix::CMatrix;
