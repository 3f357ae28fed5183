//! Generator enumeration and unimodular frames.

mod completion;
mod frame;
mod intmat;
mod vector;

pub use completion::{
    certify_bounds, ext_gcd, inverse_bound_squared, CompletionRegistry, CompletionStrategy, EuclidCompletion,
    ExhaustiveCompletion,
};
pub use frame::{unimodular_completion, unimodular_completion_with, FrameConstants, UnimodularFrame};
pub use intmat::IntMatrix;
pub use vector::{enumerate_generators, gcd, gcd_slice, weighted_norm, NormSelector, ResonanceVector};
