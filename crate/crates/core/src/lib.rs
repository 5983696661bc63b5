//! Scattering lengths of radial potentials, the positive-temperature energy
//! `e(β)` of the associated quadratic functional, closed-form hard-core
//! results and a Feynman-Kac Monte Carlo estimator of the heat-kernel
//! difference `g(β)`.

pub mod error;
pub mod fk;
pub mod gibbs;
pub mod hardcore;
pub mod mesh;
pub mod ode;
pub mod potential;
pub mod quad;
pub mod scatter;
pub mod tridiag;
pub mod verify;

pub use error::{Error, Result};
pub use fk::{estimate_g, sandwich_check, McConfig, McEstimate, SandwichReport};
pub use gibbs::{
    bounds_report, energy_functional, solve_ebeta, theorem1_bound, trial_state_energy, Beta, BoundsReport, Check,
    GibbsSolution, RadialProfile, TrialEnergy, TrialRadius,
};
pub use hardcore::{bessel_k, ebeta_hardcore, hardcore_profile, HardCoreParams, Order};
pub use mesh::MeshParams;
pub use potential::{
    finiteness_check, log_weighted_tail, volume_integral, Dimension, FinitenessReport, Form,
    RadialPotential, Segment, Shell, Verdict,
};
pub use scatter::{
    lambda_from_a, scattering_length, scattering_length_at, solve_zero_energy, ScatteringLimit, ScatteringResult,
    ZeroEnergyProfile,
};
