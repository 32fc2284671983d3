//! Filtered pairs of cubical complexes.
//!
//! For a grid carrying `dY` (distance to the sample) and `d_x` (distance to a point `x`)
//! at its vertices, the pair `A ⊆ B` consists of the cubes on which `dY ≤ ε`,
//! respectively `dY ≤ 3ε`, holds at every vertex; each cube is filtered by the maximum
//! of `d_x` over its vertices. Since `d_x` is convex, that maximum is its exact
//! maximum over the cube.

mod build;
mod complex;
mod random;

pub use build::{build_pair_complex, PairGrid};
pub use complex::{
    ensure_valid, restrict_to_ball, validate_pair, Cell, ComplexBuilder, FilteredPairComplex,
    Violation,
};
pub use random::{random_distance_pair_complex, random_pair_complex};
