//! Monte-Carlo estimation of persistent intrinsic volumes.
//!
//! Points `x` are drawn uniformly from a box that contains every `x` whose integrand can
//! be non-zero. For each `x` the image diagram of `d_x` on `Y^ε ⊆ Y^{3ε}` is computed
//! and its χ profile is integrated against the Legendre basis; averaging and scaling by
//! the box volume estimates `⟨Q, P^R_j⟩`, which the linear extraction map turns into
//! volumes. Aggregation runs sequentially in sample order, so results do not depend on
//! the number of worker threads.

mod config;
mod estimate;

pub use config::{BoundTerms, EstimatorConfig};
pub use estimate::{
    estimate_volumes, estimate_volumes_with_workers, per_sample, sampling_domain,
    steiner_function_probe, Estimator, ProbePoint, SampleOutcome, SampleRun, SamplingDomain,
    VolumeEstimate,
};
