//! Shapes, samples, distance grids and convex baselines.

mod baseline;
mod cloud;
mod grid;
mod shape;

pub use baseline::{exact_intrinsic_volumes, exact_steiner_value};
pub use cloud::{generate_shape, perturb_hausdorff, NoiseRecord, PointCloud, Provenance};
pub use grid::{
    brute_force_distance, distance_field, point_distance_field, GridGeometry, NearestIndex,
    ScalarGrid,
};
pub use shape::{ShapeKind, ShapeSpec, MAX_DIM};
