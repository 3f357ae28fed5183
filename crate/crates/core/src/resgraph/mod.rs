//! Rotated model around a simple resonance, the graph of its slow-frequency
//! level sets over the base cubes, the contraction estimates behind the graph,
//! and the non-resonance check on the normal set.

mod certify;
mod graph;
mod nonres;
mod root;
mod rotated;
mod tilted;

pub use certify::{contraction_certificate, ContractionCertificate, EstimateCheck, DEFAULT_GRID};
pub use graph::{
    build_graph, cube_decomposition, eta_bracket, solve_eta, solve_eta_in, solve_eta_with, CubeDecomposition, GraphMargins, ResonanceGraph,
    GRAPH_RADIUS, SLOPE_SLACK, ZERO_SET_RADIUS,
};
pub use nonres::{check_nonresonance, NonresReport, NonresSample};
pub use root::{solve_increasing, Root, TOL_ABS, TOL_REL};
pub use rotated::{build_rotated, check_rotated_invariants, RotatedInvariants, RotatedModel};
pub use tilted::TiltedDomain;
