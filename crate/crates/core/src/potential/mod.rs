//! Potential families and their symmetry checks.

pub mod families;
pub mod generator;
pub mod sampled;
pub mod soliton;
pub mod susy;

pub use families::{
    build_eta_p, build_partial_pt_2d, build_type1, build_type2, build_type2_with_floor,
    verify_intertwining, DEFAULT_G_FLOOR,
};
pub use generator::GeneratorFunction;
pub use sampled::{check_symmetry, Domain, PotentialSpec, SampledPotential, SymmetryFlags};
pub use soliton::{build_soliton, soliton_profile, SolitonData, SolitonParams};
pub use susy::{
    bessel_seed, build_cannata, build_partner, build_susy_super, exponential_lattice,
    harmonic_ground_state, harmonic_well, lattice_period_grid, CannataPotential, SeedState,
};
