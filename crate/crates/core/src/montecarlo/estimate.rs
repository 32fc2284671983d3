use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::EstimatorConfig;
use crate::cubical::{FilteredPairComplex, PairGrid};
use crate::geometry::{distance_field, GridGeometry, NearestIndex, PointCloud, MAX_DIM};
use crate::persistence::{count_bars, image_persistence, Bar, Death, PersistenceDiagram};
use crate::steiner::{self, chi_profile, integrate_chi_poly, ChiProfile, PolynomialR};
use crate::{Error, Result, VERSION};

/// Axis-aligned box the sample points are drawn from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplingDomain {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub volume: f64,
}

/// Bounding box of the cloud inflated by `R + 3ε`.
///
/// For `d_Y(x) > R + 3ε` no cell of `Y^{3ε}` comes within `R` of `x`, so the integrand
/// vanishes outside this box.
pub fn sampling_domain(cloud: &PointCloud, epsilon: f64, r_max: f64) -> Result<SamplingDomain> {
    let margin = r_max + 3.0 * epsilon;
    let (lo, hi) = cloud.bounding_box();
    let lower: Vec<f64> = lo.iter().map(|v| v - margin).collect();
    let upper: Vec<f64> = hi.iter().map(|v| v + margin).collect();
    let volume: f64 = lower.iter().zip(&upper).map(|(a, b)| b - a).product();
    if !(volume > 0.0 && volume.is_finite()) {
        return Err(Error::Config(format!(
            "sampling domain has volume {volume}; R must be positive"
        )));
    }
    Ok(SamplingDomain {
        lower,
        upper,
        volume,
    })
}

/// Moves every bar `c` to the left, clipping at 0 and dropping bars that vanish.
fn shift_diagram(diagram: PersistenceDiagram, c: f64) -> PersistenceDiagram {
    if c == 0.0 {
        return diagram;
    }
    let bars = diagram
        .bars
        .into_iter()
        .filter_map(|b| {
            let birth = (b.birth - c).max(0.0);
            let death = match b.death {
                Death::Finite(d) => Death::Finite((d - c).max(0.0)),
                Death::Infinite => Death::Infinite,
            };
            (death.value() > birth).then_some(Bar { birth, death, ..b })
        })
        .collect();
    PersistenceDiagram::new(bars)
}

/// Result of one sample.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleOutcome {
    pub x: Vec<f64>,
    /// `⟨χ(D^x(·)), P^R_j⟩` for `j = 0..d`.
    pub values: Vec<f64>,
    pub profile: ChiProfile,
    /// Bars meeting `[0, R]`.
    pub bars_in_window: usize,
    /// True when `d_Y(x)` exceeds `R + 3ε` plus the radius offset and the sample was set to zero without building a complex.
    pub outside_support: bool,
}

/// Everything that does not depend on the sample point, computed once.
pub struct Estimator {
    config: EstimatorConfig,
    domain: SamplingDomain,
    pairs: PairGrid,
    index: NearestIndex,
    basis: Vec<PolynomialR>,
}

impl Estimator {
    pub fn new(cloud: &PointCloud, config: &EstimatorConfig) -> Result<Self> {
        config.validate()?;
        if cloud.dim() != config.dim {
            return Err(Error::Config(format!(
                "cloud dimension {} differs from configured dim {}",
                cloud.dim(),
                config.dim
            )));
        }
        let (eps, r, h) = (config.epsilon, config.r_max, config.grid_spacing);
        let reach = r + config.radius_offset();
        let domain = sampling_domain(cloud, eps, reach)?;
        let margin = 3.0 * eps + reach + 2.0 * h;
        let (lo, hi) = cloud.bounding_box();
        let geometry = GridGeometry::covering(&lo, &hi, margin, h)?;
        let dy = distance_field(cloud, &geometry, margin)?;
        let pairs = PairGrid::new(&dy, eps)?;
        Ok(Self {
            config: config.clone(),
            domain,
            pairs,
            index: NearestIndex::new(cloud)?,
            basis: steiner::legendre_basis(config.dim, r)?,
        })
    }

    pub fn config(&self) -> &EstimatorConfig {
        &self.config
    }

    pub fn domain(&self) -> &SamplingDomain {
        &self.domain
    }

    pub fn grid(&self) -> &GridGeometry {
        self.pairs.geometry()
    }

    /// Radius up to which local complexes are kept; one grid step beyond the last radius read.
    fn radius(&self) -> f64 {
        self.config.r_max + self.config.radius_offset() + self.config.grid_spacing
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.config.dim || x.iter().any(|c| !c.is_finite()) {
            return Err(Error::Argument(format!(
                "sample point {x:?} has the wrong dimension"
            )));
        }
        Ok(())
    }

    /// Local pair complex around `x`: the cells of `Y^{3ε}` within `R + h` of `x`.
    pub fn local_complex(&self, x: &[f64]) -> Result<FilteredPairComplex> {
        self.check_point(x)?;
        Ok(self.pairs.local_complex(x, self.radius()))
    }

    /// Image diagram at `x` with the radius offset applied, exact on `[0, R + h]`; classes
    /// dying later appear essential.
    pub fn diagram(&self, x: &[f64]) -> Result<PersistenceDiagram> {
        let raw = image_persistence(&self.local_complex(x)?)?;
        Ok(shift_diagram(raw, self.config.radius_offset()))
    }

    pub fn sample(&self, x: &[f64]) -> Result<SampleOutcome> {
        self.sample_inner(x, true)
    }

    /// Same as [`Estimator::sample`] but never uses the support shortcut.
    pub fn sample_without_shortcut(&self, x: &[f64]) -> Result<SampleOutcome> {
        self.sample_inner(x, false)
    }

    fn sample_inner(&self, x: &[f64], shortcut: bool) -> Result<SampleOutcome> {
        self.check_point(x)?;
        let r = self.config.r_max;
        let cutoff = r + self.config.radius_offset() + 3.0 * self.config.epsilon;
        if shortcut && self.index.distance(x) > cutoff {
            return Ok(SampleOutcome {
                x: x.to_vec(),
                values: vec![0.0; self.config.dim + 1],
                profile: ChiProfile::constant(0, r)?,
                bars_in_window: 0,
                outside_support: true,
            });
        }
        let diagram = self.diagram(x)?;
        let profile = chi_profile(&diagram, r)?;
        let values = self
            .basis
            .iter()
            .map(|p| integrate_chi_poly(&profile, p))
            .collect();
        Ok(SampleOutcome {
            x: x.to_vec(),
            values,
            profile,
            bars_in_window: count_bars(&diagram, 0.0, r)?,
            outside_support: false,
        })
    }

    /// Position of sample `i`, from its own random stream.
    pub fn sample_point(&self, i: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed);
        rng.set_stream(i);
        let d = &self.domain;
        (0..self.config.dim)
            .map(|k| d.lower[k] + rng.random::<f64>() * (d.upper[k] - d.lower[k]))
            .collect()
    }

    /// Runs all samples on `workers` threads (`None`: rayon's global pool).
    pub fn run(&self, workers: Option<usize>) -> Result<SampleRun> {
        let n = self.config.mc_samples as u64;
        let go = || -> Result<Vec<SampleOutcome>> {
            (0..n)
                .into_par_iter()
                .map(|i| self.sample(&self.sample_point(i)))
                .collect()
        };
        let outcomes = match workers {
            None => go()?,
            Some(w) => rayon::ThreadPoolBuilder::new()
                .num_threads(w.max(1))
                .build()
                .map_err(|e| Error::Config(format!("cannot start {w} workers: {e}")))?
                .install(go)?,
        };
        Ok(SampleRun {
            config: self.config.clone(),
            domain: self.domain.clone(),
            outcomes,
        })
    }
}

/// Per-sample results of a full run, in sample order.
#[derive(Clone, Debug)]
pub struct SampleRun {
    pub config: EstimatorConfig,
    pub domain: SamplingDomain,
    pub outcomes: Vec<SampleOutcome>,
}

/// `(r, Q̂(r), stderr)` from [`steiner_function_probe`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbePoint {
    pub r: f64,
    pub value: f64,
    #[serde(with = "crate::serde_inf")]
    pub stderr: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
struct InfRow(#[serde(with = "crate::serde_inf::vec")] Vec<f64>);

/// Estimated persistent intrinsic volumes with their uncertainty.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct VolumeEstimate {
    /// `V̂_0..V̂_d`.
    pub values: Vec<f64>,
    /// Standard errors of `values`; `"inf"` when a single sample was drawn.
    #[serde(with = "crate::serde_inf::vec")]
    pub stderr: Vec<f64>,
    /// `â_j = vol · mean(v_j)`.
    pub inner_products: Vec<f64>,
    /// Covariance of the `â_j`.
    inner_product_covariance: Vec<InfRow>,
    pub samples_used: usize,
    /// Samples within `R + 3ε` of the cloud.
    pub samples_in_support: usize,
    pub domain_volume: f64,
    pub domain: SamplingDomain,
    pub config: EstimatorConfig,
    /// Bound on `|V̂_k − V_k(X^{2ε})|` when μ and the bound terms were declared.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theoretical_bound: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    pub version: String,
}

impl VolumeEstimate {
    pub fn inner_product_covariance(&self) -> Vec<Vec<f64>> {
        self.inner_product_covariance
            .iter()
            .map(|r| r.0.clone())
            .collect()
    }
}

impl SampleRun {
    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn volume_estimate(&self) -> Result<VolumeEstimate> {
        let c = &self.config;
        let d = c.dim;
        let n = self.outcomes.len();
        let vol = self.domain.volume;
        let mut mean = vec![0.0; d + 1];
        for o in &self.outcomes {
            for j in 0..=d {
                mean[j] += o.values[j];
            }
        }
        for m in &mut mean {
            *m /= n as f64;
        }
        let mut cov = vec![vec![0.0; d + 1]; d + 1];
        if n > 1 {
            for o in &self.outcomes {
                for a in 0..=d {
                    for b in 0..=d {
                        cov[a][b] += (o.values[a] - mean[a]) * (o.values[b] - mean[b]);
                    }
                }
            }
            // Covariance of â = vol · mean(v).
            let scale = vol * vol / ((n - 1) as f64 * n as f64);
            for row in &mut cov {
                for v in row.iter_mut() {
                    *v *= scale;
                }
            }
        } else {
            cov = vec![vec![f64::INFINITY; d + 1]; d + 1];
        }
        let inner: Vec<f64> = mean.iter().map(|m| vol * m).collect();
        let values = steiner::project_and_extract(&inner, c.r_max, d)?;
        let extraction = steiner::extraction_matrix(c.r_max, d)?;
        let stderr = extraction
            .iter()
            .map(|row| {
                if n < 2 {
                    return f64::INFINITY;
                }
                let mut s = 0.0;
                for a in 0..=d {
                    for b in 0..=d {
                        s += row[a] * cov[a][b] * row[b];
                    }
                }
                s.max(0.0).sqrt()
            })
            .collect();
        let theoretical_bound = match (c.declared_mu, &c.bound_terms) {
            (Some(mu), Some(t)) => Some(
                (0..=d)
                    .map(|k| {
                        steiner::volume_bound(
                            k,
                            d,
                            c.epsilon,
                            mu,
                            c.r_max,
                            t.volume,
                            t.curvature_mass,
                        )
                    })
                    .collect::<Result<Vec<_>>>()?,
            ),
            _ => None,
        };
        Ok(VolumeEstimate {
            values,
            stderr,
            inner_products: inner,
            inner_product_covariance: cov.into_iter().map(InfRow).collect(),
            samples_used: n,
            samples_in_support: self.outcomes.iter().filter(|o| !o.outside_support).count(),
            domain_volume: vol,
            domain: self.domain.clone(),
            config: c.clone(),
            theoretical_bound,
            warnings: c.warnings(),
            version: VERSION.to_string(),
        })
    }

    /// `Q̂(r) = vol · mean χ(D^x(r))` for each requested `r ∈ [0, R]`.
    pub fn probe(&self, r_values: &[f64]) -> Result<Vec<ProbePoint>> {
        let n = self.outcomes.len() as f64;
        let vol = self.domain.volume;
        r_values
            .iter()
            .map(|&r| {
                if !(0.0..=self.config.r_max).contains(&r) {
                    return Err(Error::Argument(format!(
                        "probe radius {r} outside [0, {}]",
                        self.config.r_max
                    )));
                }
                let chis: Vec<f64> = self
                    .outcomes
                    .iter()
                    .map(|o| o.profile.value_at(r) as f64)
                    .collect();
                let mean = chis.iter().sum::<f64>() / n;
                let stderr = if chis.len() < 2 {
                    f64::INFINITY
                } else {
                    let var = chis.iter().map(|c| (c - mean) * (c - mean)).sum::<f64>() / (n - 1.0);
                    vol * (var / n).sqrt()
                };
                Ok(ProbePoint {
                    r,
                    value: vol * mean,
                    stderr,
                })
            })
            .collect()
    }

    /// CSV trace with columns `sample_index, x0.., v0.., bars_in_window`.
    pub fn write_trace<W: Write>(&self, w: W) -> Result<()> {
        let d = self.config.dim;
        let mut out = csv::Writer::from_writer(w);
        let mut header = vec!["sample_index".to_string()];
        header.extend((0..d).map(|k| format!("x{k}")));
        header.extend((0..=d).map(|j| format!("v{j}")));
        header.push("bars_in_window".into());
        out.write_record(&header)?;
        for (i, o) in self.outcomes.iter().enumerate() {
            let mut row = vec![i.to_string()];
            row.extend(o.x.iter().map(f64::to_string));
            row.extend(o.values.iter().map(f64::to_string));
            row.push(o.bars_in_window.to_string());
            out.write_record(&row)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// `⟨χ(D^x(·)), P^R_j⟩` for `j = 0..d` at a single point.
///
/// Builds the full estimator state for one call; use [`Estimator`] for repeated samples.
pub fn per_sample(x: &[f64], cloud: &PointCloud, config: &EstimatorConfig) -> Result<Vec<f64>> {
    Ok(Estimator::new(cloud, config)?.sample(x)?.values)
}

pub fn estimate_volumes(cloud: &PointCloud, config: &EstimatorConfig) -> Result<VolumeEstimate> {
    Estimator::new(cloud, config)?.run(None)?.volume_estimate()
}

pub fn estimate_volumes_with_workers(
    cloud: &PointCloud,
    config: &EstimatorConfig,
    workers: usize,
) -> Result<VolumeEstimate> {
    Estimator::new(cloud, config)?
        .run(Some(workers))?
        .volume_estimate()
}

/// Monte-Carlo estimate of the persistent Steiner function at each `r`.
pub fn steiner_function_probe(
    cloud: &PointCloud,
    config: &EstimatorConfig,
    r_values: &[f64],
) -> Result<Vec<ProbePoint>> {
    Estimator::new(cloud, config)?.run(None)?.probe(r_values)
}

const _: () = assert!(MAX_DIM <= steiner::MAX_LEGENDRE_DEGREE);
