use serde::{Deserialize, Serialize};

use crate::geometry::MAX_DIM;
use crate::{Error, Result};

/// Caller-supplied values of `Vol(X^{2ε})` and the R-curvature mass of `X^{2ε}`, used
/// only to annotate estimates with the theoretical error bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BoundTerms {
    pub volume: f64,
    pub curvature_mass: f64,
}

/// Parameters of one Monte-Carlo estimation run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct EstimatorConfig {
    pub epsilon: f64,
    /// Upper end `R` of the radius window `[0, R]`.
    #[serde(default = "default_r_max")]
    pub r_max: f64,
    pub grid_spacing: f64,
    pub mc_samples: usize,
    pub seed: u64,
    pub dim: usize,
    /// Declared μ of the unknown set; metadata for the bound annotation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub declared_mu: Option<f64>,
    /// Declared μ-reach of the unknown set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub declared_reach: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound_terms: Option<BoundTerms>,
    /// Read every χ-profile `h·√d/2` later, compensating for the half-cell lag of the
    /// max-vertex filtration. `false` gives the uncorrected cubical estimator.
    #[serde(default = "default_grid_correction")]
    pub grid_correction: bool,
}

fn default_grid_correction() -> bool {
    true
}

fn default_r_max() -> f64 {
    1.0
}

impl EstimatorConfig {
    /// Config with `R = 1` and no bound metadata.
    pub fn new(epsilon: f64, grid_spacing: f64, mc_samples: usize, seed: u64, dim: usize) -> Self {
        Self {
            epsilon,
            r_max: default_r_max(),
            grid_spacing,
            mc_samples,
            seed,
            dim,
            declared_mu: None,
            declared_reach: None,
            bound_terms: None,
            grid_correction: true,
        }
    }

    /// Radius shift applied to every diagram; zero without grid correction.
    pub fn radius_offset(&self) -> f64 {
        if self.grid_correction {
            0.5 * self.grid_spacing * (self.dim as f64).sqrt()
        } else {
            0.0
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::Config(format!(
                    "{name} must be positive and finite, got {v}"
                )))
            }
        };
        positive("epsilon", self.epsilon)?;
        positive("rMax", self.r_max)?;
        positive("gridSpacing", self.grid_spacing)?;
        if self.mc_samples == 0 {
            return Err(Error::Config("mcSamples must be at least 1".into()));
        }
        if self.dim == 0 || self.dim > MAX_DIM {
            return Err(Error::Config(format!(
                "dim must be in 1..={MAX_DIM}, got {}",
                self.dim
            )));
        }
        if let Some(mu) = self.declared_mu {
            if !(mu > 0.0 && mu <= 1.0) {
                return Err(Error::Config(format!(
                    "declaredMu must lie in (0, 1], got {mu}"
                )));
            }
        }
        if let Some(reach) = self.declared_reach {
            if !(reach > 0.0) {
                return Err(Error::Config(format!(
                    "declaredReach must be positive, got {reach}"
                )));
            }
        }
        if let Some(t) = &self.bound_terms {
            if !(t.volume >= 0.0 && t.curvature_mass >= 0.0) {
                return Err(Error::Config("bound terms must be non-negative".into()));
            }
        }
        Ok(())
    }

    /// Non-fatal issues with the configuration.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let Some(reach) = self.declared_reach {
            if 4.0 * self.epsilon > reach {
                out.push(format!(
                    "4ε = {} exceeds the declared reach {reach}; the linear error bound does not apply",
                    4.0 * self.epsilon
                ));
            }
        }
        out
    }
}
