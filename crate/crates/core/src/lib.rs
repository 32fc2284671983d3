//! Persistent intrinsic volumes.
//!
//! Given a finite sample `Y ⊂ R^d` (d ≤ 3) that lies within Hausdorff distance ε of an
//! unknown compact set `X`, this crate estimates the intrinsic volumes of the offset
//! `X^{2ε}`. For every point `x` the image persistence diagram of the distance function
//! `d_x` on the pair of offsets `Y^ε ⊆ Y^{3ε}` is computed on a cubical grid; the Euler
//! characteristic of that diagram, integrated over `x`, gives a persistent version of the
//! Steiner function whose Legendre projection yields the volume estimates.
//!
//! Module map:
//!
//! * [`geometry`]: shapes, point clouds, distance grids and closed-form convex baselines.
//! * [`cubical`]: the filtered pair complex carrying `Y^ε ⊆ Y^{3ε}` filtered by `d_x`.
//! * [`persistence`]: image persistence, a brute-force rank oracle, bottleneck distance.
//! * [`steiner`]: χ profiles, Legendre projection and extraction of the volumes.
//! * [`montecarlo`]: the sampling estimator with variance propagation.

pub mod cubical;
pub mod error;
pub mod geometry;
pub mod montecarlo;
pub mod persistence;
pub mod steiner;

mod serde_inf;

pub use error::{Error, Result};

/// Version string embedded in every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
