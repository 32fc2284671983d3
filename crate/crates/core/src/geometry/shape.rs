use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Largest ambient dimension supported by the cubical machinery.
pub const MAX_DIM: usize = 3;

/// A synthetic compact set `X ⊂ R^dim`.
///
/// Interiors are sampled for ball, box, annulus and union-of-balls (the set is a body);
/// a segment is one-dimensional, so its points lie on the segment itself.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShapeSpec {
    pub dim: usize,
    #[serde(flatten)]
    pub kind: ShapeKind,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(
    tag = "kind",
    rename_all = "kebab-case",
    rename_all_fields = "camelCase"
)]
pub enum ShapeKind {
    /// Closed ball of the given radius, centered at the origin by default.
    Ball {
        radius: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<Vec<f64>>,
    },
    /// Axis-aligned box `[corner, corner + sides]`, corner at the origin by default.
    Box {
        sides: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        corner: Option<Vec<f64>>,
    },
    /// Points whose distance to the center lies in `[inner_radius, outer_radius]`.
    Annulus {
        inner_radius: f64,
        outer_radius: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<Vec<f64>>,
    },
    /// Segment of the given length along the first axis.
    Segment {
        length: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        start: Option<Vec<f64>>,
    },
    UnionOfBalls {
        centers: Vec<Vec<f64>>,
        radii: Vec<f64>,
    },
}

impl ShapeSpec {
    pub fn ball(dim: usize, radius: f64) -> Self {
        Self {
            dim,
            kind: ShapeKind::Ball {
                radius,
                center: None,
            },
        }
    }

    pub fn cuboid(sides: Vec<f64>) -> Self {
        Self {
            dim: sides.len(),
            kind: ShapeKind::Box {
                sides,
                corner: None,
            },
        }
    }

    pub fn segment(dim: usize, length: f64) -> Self {
        Self {
            dim,
            kind: ShapeKind::Segment {
                length,
                start: None,
            },
        }
    }

    pub fn annulus(dim: usize, inner_radius: f64, outer_radius: f64) -> Self {
        Self {
            dim,
            kind: ShapeKind::Annulus {
                inner_radius,
                outer_radius,
                center: None,
            },
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            ShapeKind::Ball { .. } => "ball",
            ShapeKind::Box { .. } => "box",
            ShapeKind::Annulus { .. } => "annulus",
            ShapeKind::Segment { .. } => "segment",
            ShapeKind::UnionOfBalls { .. } => "union-of-balls",
        }
    }

    /// Ball, box and segment are convex and have closed-form intrinsic volumes.
    pub fn is_convex(&self) -> bool {
        matches!(
            self.kind,
            ShapeKind::Ball { .. } | ShapeKind::Box { .. } | ShapeKind::Segment { .. }
        )
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.dim;
        if d == 0 || d > MAX_DIM {
            return Err(Error::Config(format!(
                "dimension must be in 1..={MAX_DIM}, got {d}"
            )));
        }
        let check_point = |name: &str, p: &Option<Vec<f64>>| -> Result<()> {
            match p {
                Some(p) if p.len() != d => Err(Error::Config(format!(
                    "{name} has {} coordinates but the shape has dimension {d}",
                    p.len()
                ))),
                Some(p) if p.iter().any(|c| !c.is_finite()) => {
                    Err(Error::Config(format!("{name} has non-finite coordinates")))
                }
                _ => Ok(()),
            }
        };
        let positive = |name: &str, v: f64| -> Result<()> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::Config(format!(
                    "{name} must be strictly positive, got {v}"
                )))
            }
        };
        match &self.kind {
            ShapeKind::Ball { radius, center } => {
                positive("radius", *radius)?;
                check_point("center", center)
            }
            ShapeKind::Box { sides, corner } => {
                if sides.len() != d {
                    return Err(Error::Config(format!(
                        "box has {} side lengths but dimension {d}",
                        sides.len()
                    )));
                }
                for s in sides {
                    positive("side length", *s)?;
                }
                check_point("corner", corner)
            }
            ShapeKind::Annulus {
                inner_radius,
                outer_radius,
                center,
            } => {
                if d < 2 {
                    return Err(Error::Config("annulus needs dimension 2 or 3".into()));
                }
                positive("inner radius", *inner_radius)?;
                positive("outer radius", *outer_radius)?;
                if inner_radius >= outer_radius {
                    return Err(Error::Config(format!(
                        "inner radius {inner_radius} must be below outer radius {outer_radius}"
                    )));
                }
                check_point("center", center)
            }
            ShapeKind::Segment { length, start } => {
                positive("length", *length)?;
                check_point("start", start)
            }
            ShapeKind::UnionOfBalls { centers, radii } => {
                if centers.is_empty() || centers.len() != radii.len() {
                    return Err(Error::Config(format!(
                        "union of balls needs matching non-empty centers and radii, got {} and {}",
                        centers.len(),
                        radii.len()
                    )));
                }
                for r in radii {
                    positive("radius", *r)?;
                }
                for c in centers {
                    check_point("center", &Some(c.clone()))?;
                }
                Ok(())
            }
        }
    }

    fn origin_or(&self, p: &Option<Vec<f64>>) -> Vec<f64> {
        p.clone().unwrap_or_else(|| vec![0.0; self.dim])
    }

    /// Axis-aligned bounding box `(lower, upper)`.
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        match &self.kind {
            ShapeKind::Ball { radius, center } => {
                let c = self.origin_or(center);
                (
                    c.iter().map(|x| x - radius).collect(),
                    c.iter().map(|x| x + radius).collect(),
                )
            }
            ShapeKind::Annulus {
                outer_radius,
                center,
                ..
            } => {
                let c = self.origin_or(center);
                (
                    c.iter().map(|x| x - outer_radius).collect(),
                    c.iter().map(|x| x + outer_radius).collect(),
                )
            }
            ShapeKind::Box { sides, corner } => {
                let c = self.origin_or(corner);
                let hi = c.iter().zip(sides).map(|(x, s)| x + s).collect();
                (c, hi)
            }
            ShapeKind::Segment { length, start } => {
                let c = self.origin_or(start);
                let mut hi = c.clone();
                hi[0] += length;
                (c, hi)
            }
            ShapeKind::UnionOfBalls { centers, radii } => {
                let mut lo = vec![f64::INFINITY; self.dim];
                let mut hi = vec![f64::NEG_INFINITY; self.dim];
                for (c, r) in centers.iter().zip(radii) {
                    for k in 0..self.dim {
                        lo[k] = lo[k].min(c[k] - r);
                        hi[k] = hi[k].max(c[k] + r);
                    }
                }
                (lo, hi)
            }
        }
    }

    /// Euclidean distance from `p` to the set (zero inside).
    pub fn distance(&self, p: &[f64]) -> f64 {
        match &self.kind {
            ShapeKind::Ball { radius, center } => {
                (norm_diff(p, &self.origin_or(center)) - radius).max(0.0)
            }
            ShapeKind::Annulus {
                inner_radius,
                outer_radius,
                center,
            } => {
                let r = norm_diff(p, &self.origin_or(center));
                if r < *inner_radius {
                    inner_radius - r
                } else {
                    (r - outer_radius).max(0.0)
                }
            }
            ShapeKind::Box { sides, corner } => {
                let c = self.origin_or(corner);
                let sq: f64 = (0..self.dim)
                    .map(|k| {
                        let excess = (c[k] - p[k]).max(p[k] - c[k] - sides[k]).max(0.0);
                        excess * excess
                    })
                    .sum();
                sq.sqrt()
            }
            ShapeKind::Segment { length, start } => {
                let s = self.origin_or(start);
                let t = (p[0] - s[0]).clamp(0.0, *length);
                let sq: f64 = (0..self.dim)
                    .map(|k| {
                        let q = if k == 0 { s[0] + t } else { s[k] };
                        (p[k] - q) * (p[k] - q)
                    })
                    .sum();
                sq.sqrt()
            }
            ShapeKind::UnionOfBalls { centers, radii } => centers
                .iter()
                .zip(radii)
                .map(|(c, r)| (norm_diff(p, c) - r).max(0.0))
                .fold(f64::INFINITY, f64::min),
        }
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        self.distance(p) == 0.0
    }

    /// One point drawn from the uniform measure on the set.
    pub(crate) fn sample_point<R: Rng>(&self, rng: &mut R, out: &mut [f64]) {
        match &self.kind {
            ShapeKind::Box { sides, corner } => {
                let c = self.origin_or(corner);
                for k in 0..self.dim {
                    out[k] = c[k] + rng.random::<f64>() * sides[k];
                }
            }
            ShapeKind::Segment { length, start } => {
                let s = self.origin_or(start);
                out.copy_from_slice(&s);
                out[0] += rng.random::<f64>() * length;
            }
            ShapeKind::Ball { .. } | ShapeKind::Annulus { .. } | ShapeKind::UnionOfBalls { .. } => {
                // Rejection from the bounding box; acceptance is at least ω_3/8 ≈ 0.52 for a
                // ball and never degenerate for the other bodies.
                let (lo, hi) = self.bounding_box();
                loop {
                    for k in 0..self.dim {
                        out[k] = lo[k] + rng.random::<f64>() * (hi[k] - lo[k]);
                    }
                    if self.contains(out) {
                        return;
                    }
                }
            }
        }
    }
}

fn norm_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}
