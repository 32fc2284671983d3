use std::io::{Read, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::shape::{ShapeSpec, MAX_DIM};
use crate::{Error, Result};

/// Record of one Hausdorff-bounded perturbation applied to a cloud.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseRecord {
    pub epsilon: f64,
    pub seed: u64,
}

/// Where a cloud came from, when it was synthesized.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Provenance {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shape: Option<ShapeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub noise: Vec<NoiseRecord>,
}

/// A finite sample `Y ⊂ R^dim`, stored as a flat coordinate buffer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CloudRepr", into = "CloudRepr")]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
    provenance: Option<Provenance>,
}

#[derive(Serialize, Deserialize)]
struct CloudRepr {
    dim: usize,
    points: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    provenance: Option<Provenance>,
}

impl TryFrom<CloudRepr> for PointCloud {
    type Error = Error;

    fn try_from(r: CloudRepr) -> Result<Self> {
        let mut cloud = PointCloud::from_points(r.dim, &r.points)?;
        cloud.provenance = r.provenance;
        Ok(cloud)
    }
}

impl From<PointCloud> for CloudRepr {
    fn from(c: PointCloud) -> Self {
        CloudRepr {
            dim: c.dim,
            points: c.iter().map(<[f64]>::to_vec).collect(),
            provenance: c.provenance,
        }
    }
}

impl PointCloud {
    /// Builds a cloud from a flat buffer of `n * dim` coordinates.
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::Config(format!(
                "dimension must be in 1..={MAX_DIM}, got {dim}"
            )));
        }
        if coords.is_empty() || coords.len() % dim != 0 {
            return Err(Error::Config(format!(
                "a cloud needs at least one point and a multiple of {dim} coordinates, got {}",
                coords.len()
            )));
        }
        if let Some(i) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::Config(format!(
                "point {} has a non-finite coordinate",
                i / dim
            )));
        }
        Ok(Self {
            dim,
            coords,
            provenance: None,
        })
    }

    pub fn from_points<P: AsRef<[f64]>>(dim: usize, points: &[P]) -> Result<Self> {
        let mut coords = Vec::with_capacity(points.len() * dim);
        for (i, p) in points.iter().enumerate() {
            let p = p.as_ref();
            if p.len() != dim {
                return Err(Error::Config(format!(
                    "point {i} has {} coordinates, expected {dim}",
                    p.len()
                )));
            }
            coords.extend_from_slice(p);
        }
        Self::new(dim, coords)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> std::slice::ChunksExact<'_, f64> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn provenance(&self) -> Option<&Provenance> {
        self.provenance.as_ref()
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = Some(provenance);
        self
    }

    /// Axis-aligned bounding box `(lower, upper)`.
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        let mut lo = vec![f64::INFINITY; self.dim];
        let mut hi = vec![f64::NEG_INFINITY; self.dim];
        for p in self.iter() {
            for k in 0..self.dim {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        (lo, hi)
    }

    /// One point per row, coordinates separated by commas, no header.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(w);
        for p in self.iter() {
            writer.serialize(p)?;
        }
        writer.flush()?;
        Ok(())
    }

    /// Reads the CSV layout of [`write_csv`](Self::write_csv); a non-numeric first row is
    /// treated as a header and skipped.
    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(r);
        let mut dim = None;
        let mut coords = Vec::new();
        for (row, record) in reader.records().enumerate() {
            let record = record?;
            let parsed: std::result::Result<Vec<f64>, _> =
                record.iter().map(str::parse::<f64>).collect();
            let values = match parsed {
                Ok(v) => v,
                Err(_) if row == 0 => continue,
                Err(e) => return Err(Error::Config(format!("row {row}: {e}"))),
            };
            match dim {
                None => dim = Some(values.len()),
                Some(d) if d != values.len() => {
                    return Err(Error::Config(format!(
                        "row {row} has {} columns, expected {d}",
                        values.len()
                    )))
                }
                _ => {}
            }
            coords.extend(values);
        }
        let dim = dim.ok_or_else(|| Error::Config("point cloud CSV has no rows".into()))?;
        Self::new(dim, coords)
    }
}

/// Draws `n` points from the uniform measure on the shape, deterministically in `seed`.
pub fn generate_shape(spec: &ShapeSpec, n: usize, seed: u64) -> Result<PointCloud> {
    spec.validate()?;
    if n == 0 {
        return Err(Error::Config("sample size must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coords = vec![0.0; n * spec.dim];
    for p in coords.chunks_exact_mut(spec.dim) {
        spec.sample_point(&mut rng, p);
    }
    let cloud = PointCloud::new(spec.dim, coords)?;
    Ok(cloud.with_provenance(Provenance {
        shape: Some(spec.clone()),
        seed: Some(seed),
        noise: vec![],
    }))
}

/// Moves every point by an independent uniform draw from the closed ε-ball, so the output
/// is within Hausdorff distance ε of the input.
pub fn perturb_hausdorff(cloud: &PointCloud, epsilon: f64, seed: u64) -> Result<PointCloud> {
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return Err(Error::Config(format!(
            "perturbation radius must be ≥ 0, got {epsilon}"
        )));
    }
    let mut out = cloud.clone();
    let mut provenance = out.provenance.take().unwrap_or_default();
    provenance.noise.push(NoiseRecord { epsilon, seed });
    out.provenance = Some(provenance);
    if epsilon == 0.0 {
        return Ok(out);
    }
    let dim = cloud.dim;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut offset = [0.0; MAX_DIM];
    for p in out.coords.chunks_exact_mut(dim) {
        loop {
            let mut sq = 0.0;
            for o in offset.iter_mut().take(dim) {
                *o = rng.random_range(-1.0..=1.0);
                sq += *o * *o;
            }
            if sq <= 1.0 {
                break;
            }
        }
        for k in 0..dim {
            p[k] += epsilon * offset[k];
        }
    }
    Ok(out)
}
