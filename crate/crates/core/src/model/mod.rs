//! Convex integrable Hamiltonians, their domains and constants, and the
//! covering parameters derived from `(eps, K, K0)`.

mod convex;
mod domain;
mod hamiltonian;
mod params;
mod spec;
mod validate;

pub use convex::{assemble_model, build_model, ConvexModel};
pub use domain::{unit_ball_volume, Domain};
pub use hamiltonian::{
    AnisotropicQuadratic, FamilyRegistry, HamiltonianFamily, IntegrableHamiltonian, IsotropicQuadratic,
    ModelConstants, QuadraticQuartic, ShiftedQuadratic,
};
pub use params::{covering_params, covering_params_raw, cutoffs_from_eps, CoveringParams};
pub use spec::{DeclaredSpec, DomainSpec, ModelSpec};
pub use validate::{validate_constants, ConstantViolation, ValidationReport, DEFAULT_SAMPLES};
