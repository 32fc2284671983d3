use persivol::geometry::{generate_shape, perturb_hausdorff, PointCloud, ShapeSpec};
use persivol::montecarlo::EstimatorConfig;
use persivol::{Error, Result};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub const SPEC_VERSION: u32 = 1;

/// One experiment: a synthetic shape, its noisy sample, and the estimator settings.
///
/// `estimator.seed` is the only source of randomness; shape sampling and noise use
/// sub-seeds derived from it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ExperimentSpec {
    pub spec_version: u32,
    pub shape: ShapeSpec,
    pub sample_size: usize,
    pub estimator: EstimatorConfig,
    /// Noise levels for `sweep`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub epsilons: Vec<f64>,
}

const SHAPE_STREAM: u64 = 1;
const NOISE_STREAM: u64 = 2;

/// Sub-seed for one consumer of randomness.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Streams below 2^63 are used by the Monte-Carlo sampler; stay clear of them.
    rng.set_stream((1 << 63) | stream);
    rng.next_u64()
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.spec_version != SPEC_VERSION {
            return Err(Error::Config(format!(
                "unsupported specVersion {} (expected {SPEC_VERSION})",
                self.spec_version
            )));
        }
        self.shape.validate()?;
        if self.shape.dim != self.estimator.dim {
            return Err(Error::Config(format!(
                "shape dimension {} differs from estimator dim {}",
                self.shape.dim, self.estimator.dim
            )));
        }
        if self.sample_size == 0 {
            return Err(Error::Config("sampleSize must be at least 1".into()));
        }
        if let Some(e) = self.epsilons.iter().find(|e| !(e.is_finite() && **e > 0.0)) {
            return Err(Error::Config(format!(
                "noise levels must be positive, got {e}"
            )));
        }
        self.estimator.validate()
    }

    /// The noiseless sample of the shape.
    pub fn clean_cloud(&self) -> Result<PointCloud> {
        generate_shape(
            &self.shape,
            self.sample_size,
            derive_seed(self.estimator.seed, SHAPE_STREAM),
        )
    }

    /// The sample perturbed by `epsilon`.
    pub fn noisy_cloud(&self, clean: &PointCloud, epsilon: f64) -> Result<PointCloud> {
        perturb_hausdorff(
            clean,
            epsilon,
            derive_seed(self.estimator.seed, NOISE_STREAM),
        )
    }
}
