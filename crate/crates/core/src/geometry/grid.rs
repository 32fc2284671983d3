use std::io::{Read, Write};

use kiddo::{ImmutableKdTree, SquaredEuclidean};
use serde::{Deserialize, Serialize};

use super::cloud::PointCloud;
use super::shape::MAX_DIM;
use crate::{Error, Result};

/// Geometry of a uniform axis-aligned vertex grid. Vertices are stored row-major: the
/// last axis varies fastest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridGeometry {
    pub dim: usize,
    pub origin: Vec<f64>,
    pub spacing: f64,
    /// Number of vertices along each axis.
    pub extents: Vec<usize>,
}

impl GridGeometry {
    pub fn new(origin: Vec<f64>, spacing: f64, extents: Vec<usize>) -> Result<Self> {
        let dim = origin.len();
        if dim == 0 || dim > MAX_DIM || extents.len() != dim {
            return Err(Error::Config(format!(
                "grid needs 1..={MAX_DIM} axes with one extent each, got origin {dim} / extents {}",
                extents.len()
            )));
        }
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::Config(format!(
                "grid spacing must be positive, got {spacing}"
            )));
        }
        if extents.iter().any(|&n| n < 2) {
            return Err(Error::Config(format!(
                "every axis needs at least 2 vertices, got {extents:?}"
            )));
        }
        if origin.iter().any(|o| !o.is_finite()) {
            return Err(Error::Config("grid origin must be finite".into()));
        }
        Ok(Self {
            dim,
            origin,
            spacing,
            extents,
        })
    }

    /// Smallest grid with the given spacing whose vertices span `[lower − margin, upper + margin]`.
    pub fn covering(lower: &[f64], upper: &[f64], margin: f64, spacing: f64) -> Result<Self> {
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::Config(format!(
                "grid spacing must be positive, got {spacing}"
            )));
        }
        let origin: Vec<f64> = lower.iter().map(|l| l - margin).collect();
        let extents = lower
            .iter()
            .zip(upper)
            .map(|(l, u)| (((u - l + 2.0 * margin) / spacing).ceil() as usize + 1).max(2))
            .collect();
        Self::new(origin, spacing, extents)
    }

    pub fn vertex_count(&self) -> usize {
        self.extents.iter().product()
    }

    /// Row-major strides of the vertex array.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.dim];
        for k in (0..self.dim.saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.extents[k + 1];
        }
        strides
    }

    /// Coordinate of vertex `i` along `axis`. All vertex positions go through here.
    #[inline]
    pub fn coordinate(&self, axis: usize, i: usize) -> f64 {
        self.origin[axis] + i as f64 * self.spacing
    }

    pub fn upper(&self) -> Vec<f64> {
        (0..self.dim)
            .map(|k| self.coordinate(k, self.extents[k] - 1))
            .collect()
    }

    /// Writes the coordinates of vertex `index` into `out`.
    pub fn vertex_position(&self, index: usize, out: &mut [f64]) {
        let mut rest = index;
        for k in (0..self.dim).rev() {
            let i = rest % self.extents[k];
            rest /= self.extents[k];
            out[k] = self.coordinate(k, i);
        }
    }

    /// Checks that the grid spans the cloud's bounding box inflated by `margin`.
    pub fn check_coverage(&self, cloud: &PointCloud, margin: f64) -> Result<()> {
        if cloud.dim() != self.dim {
            return Err(Error::Structural(format!(
                "cloud dimension {} differs from grid dimension {}",
                cloud.dim(),
                self.dim
            )));
        }
        let (lo, hi) = cloud.bounding_box();
        let upper = self.upper();
        let short: Vec<usize> = (0..self.dim)
            .filter(|&k| self.origin[k] > lo[k] - margin || upper[k] < hi[k] + margin)
            .collect();
        if short.is_empty() {
            return Ok(());
        }
        let required = GridGeometry::covering(&lo, &hi, margin, self.spacing)?;
        Err(Error::DomainCoverage(format!(
            "axes {short:?} fall short of the bounding box inflated by {margin}; \
             required origin {:?} and extents {:?}, got origin {:?} and extents {:?}",
            required.origin, required.extents, self.origin, self.extents
        )))
    }
}

/// Real values at the vertices of a [`GridGeometry`].
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarGrid {
    pub geometry: GridGeometry,
    pub values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct GridHeader {
    dim: usize,
    origin: Vec<f64>,
    spacing: f64,
    extents: Vec<usize>,
    order: String,
    dtype: String,
}

impl ScalarGrid {
    pub fn new(geometry: GridGeometry, values: Vec<f64>) -> Result<Self> {
        if values.len() != geometry.vertex_count() {
            return Err(Error::Structural(format!(
                "grid has {} vertices but {} values",
                geometry.vertex_count(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Structural("grid values must be finite".into()));
        }
        Ok(Self { geometry, values })
    }

    /// Binary layout: an 8-byte little-endian header length, the JSON header
    /// (`dim`, `origin`, `spacing`, `extents`, `order`, `dtype`), then the values as
    /// little-endian `f64` in row-major order.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        let g = &self.geometry;
        let header = serde_json::to_vec(&GridHeader {
            dim: g.dim,
            origin: g.origin.clone(),
            spacing: g.spacing,
            extents: g.extents.clone(),
            order: "row-major".into(),
            dtype: "f64-le".into(),
        })?;
        w.write_all(&(header.len() as u64).to_le_bytes())?;
        w.write_all(&header)?;
        for v in &self.values {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let mut len = [0u8; 8];
        r.read_exact(&mut len)?;
        let mut header = vec![0u8; u64::from_le_bytes(len) as usize];
        r.read_exact(&mut header)?;
        let header: GridHeader = serde_json::from_slice(&header)?;
        if header.order != "row-major" || header.dtype != "f64-le" {
            return Err(Error::Structural(format!(
                "unsupported grid layout {} / {}",
                header.order, header.dtype
            )));
        }
        let geometry = GridGeometry::new(header.origin, header.spacing, header.extents)?;
        let mut bytes = vec![0u8; geometry.vertex_count() * 8];
        r.read_exact(&mut bytes)?;
        let values = bytes
            .chunks_exact(8)
            .map(|b| f64::from_le_bytes(b.try_into().unwrap()))
            .collect();
        Self::new(geometry, values)
    }
}

/// Exact nearest-neighbor distances to a point cloud.
///
/// Small clouds are scanned directly; larger ones go through a k-d tree. Both paths
/// return the exact Euclidean distance.
pub struct NearestIndex {
    inner: IndexKind,
}

enum IndexKind {
    Brute(PointCloud),
    D1(ImmutableKdTree<f64, 1>),
    D2(ImmutableKdTree<f64, 2>),
    D3(ImmutableKdTree<f64, 3>),
}

const BRUTE_FORCE_LIMIT: usize = 64;

fn tree<const K: usize>(cloud: &PointCloud) -> Result<ImmutableKdTree<f64, K>> {
    let points: Vec<[f64; K]> = cloud.iter().map(|p| p.try_into().unwrap()).collect();
    ImmutableKdTree::new_from_slice(&points)
        .map_err(|e| Error::Structural(format!("k-d tree construction failed: {e:?}")))
}

impl NearestIndex {
    pub fn new(cloud: &PointCloud) -> Result<Self> {
        let inner = if cloud.len() <= BRUTE_FORCE_LIMIT {
            IndexKind::Brute(cloud.clone())
        } else {
            match cloud.dim() {
                1 => IndexKind::D1(tree(cloud)?),
                2 => IndexKind::D2(tree(cloud)?),
                3 => IndexKind::D3(tree(cloud)?),
                d => return Err(Error::Config(format!("unsupported dimension {d}"))),
            }
        };
        Ok(Self { inner })
    }

    /// Distance from `q` to the nearest cloud point.
    pub fn distance(&self, q: &[f64]) -> f64 {
        let sq = match &self.inner {
            IndexKind::Brute(cloud) => return brute_force_distance(cloud, q),
            IndexKind::D1(t) => {
                t.query(&[q[0]])
                    .nearest_one::<SquaredEuclidean<f64>>()
                    .execute()
                    .distance
            }
            IndexKind::D2(t) => {
                t.query(&[q[0], q[1]])
                    .nearest_one::<SquaredEuclidean<f64>>()
                    .execute()
                    .distance
            }
            IndexKind::D3(t) => {
                t.query(&[q[0], q[1], q[2]])
                    .nearest_one::<SquaredEuclidean<f64>>()
                    .execute()
                    .distance
            }
        };
        sq.sqrt()
    }
}

/// Linear scan; the reference for [`NearestIndex`].
pub fn brute_force_distance(cloud: &PointCloud, q: &[f64]) -> f64 {
    cloud
        .iter()
        .map(|p| p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum::<f64>())
        .fold(f64::INFINITY, f64::min)
        .sqrt()
}

/// Distance to the cloud at every grid vertex. The grid must span the cloud's bounding
/// box inflated by `margin`.
pub fn distance_field(
    cloud: &PointCloud,
    geometry: &GridGeometry,
    margin: f64,
) -> Result<ScalarGrid> {
    geometry.check_coverage(cloud, margin)?;
    let index = NearestIndex::new(cloud)?;
    let mut p = [0.0; MAX_DIM];
    let values = (0..geometry.vertex_count())
        .map(|v| {
            geometry.vertex_position(v, &mut p);
            index.distance(&p[..geometry.dim])
        })
        .collect();
    ScalarGrid::new(geometry.clone(), values)
}

/// `z ↦ ‖z − x‖` sampled at every grid vertex.
pub fn point_distance_field(x: &[f64], geometry: &GridGeometry) -> Result<ScalarGrid> {
    if x.len() != geometry.dim || x.iter().any(|c| !c.is_finite()) {
        return Err(Error::Structural(format!(
            "point {x:?} does not match grid dimension {}",
            geometry.dim
        )));
    }
    let mut p = [0.0; MAX_DIM];
    let values = (0..geometry.vertex_count())
        .map(|v| {
            geometry.vertex_position(v, &mut p);
            let mut sq = 0.0;
            for k in 0..geometry.dim {
                let t = p[k] - x[k];
                sq += t * t;
            }
            sq.sqrt()
        })
        .collect();
    ScalarGrid::new(geometry.clone(), values)
}
