use super::complex::FilteredPairComplex;
use crate::geometry::{GridGeometry, ScalarGrid, MAX_DIM};
use crate::{Error, Result};

/// Index arithmetic on the doubled grid: a cell is a point with coordinates in
/// `0..2n_k − 1`, odd coordinates marking the axes along which it extends.
#[derive(Clone, Debug)]
pub(crate) struct DoubledGrid {
    pub dim: usize,
    pub extents: [usize; MAX_DIM],
    pub strides: [usize; MAX_DIM],
    pub vertex_strides: [usize; MAX_DIM],
    pub total: usize,
}

impl DoubledGrid {
    pub fn new(g: &GridGeometry) -> Self {
        let dim = g.dim;
        let mut extents = [1; MAX_DIM];
        let mut strides = [0; MAX_DIM];
        let mut vertex_strides = [0; MAX_DIM];
        let vs = g.strides();
        for k in 0..dim {
            extents[k] = 2 * g.extents[k] - 1;
            vertex_strides[k] = vs[k];
        }
        let mut s = 1;
        for k in (0..dim).rev() {
            strides[k] = s;
            s *= extents[k];
        }
        Self {
            dim,
            extents,
            strides,
            vertex_strides,
            total: s,
        }
    }

    #[inline]
    pub fn coords(&self, mut c: usize) -> [usize; MAX_DIM] {
        let mut out = [0; MAX_DIM];
        for k in (0..self.dim).rev() {
            out[k] = c % self.extents[k];
            c /= self.extents[k];
        }
        out
    }

    /// Faces of the cell at `c` with coordinates `q`, as doubled indices, ascending axis,
    /// lower face first.
    #[inline]
    pub fn faces(&self, c: usize, q: &[usize; MAX_DIM], out: &mut Vec<usize>) {
        out.clear();
        for k in 0..self.dim {
            if q[k] % 2 == 1 {
                out.push(c - self.strides[k]);
                out.push(c + self.strides[k]);
            }
        }
    }

    /// Grid vertices of the cell with coordinates `q`, in binary order over its odd axes
    /// (the lowest odd axis toggling fastest).
    #[inline]
    pub fn vertices(&self, q: &[usize; MAX_DIM], out: &mut Vec<u32>) {
        out.clear();
        let mut base = 0;
        let mut odd = [0usize; MAX_DIM];
        let mut n_odd = 0;
        for k in 0..self.dim {
            base += (q[k] / 2) * self.vertex_strides[k];
            if q[k] % 2 == 1 {
                odd[n_odd] = self.vertex_strides[k];
                n_odd += 1;
            }
        }
        for mask in 0..(1usize << n_odd) {
            let mut v = base;
            for (bit, s) in odd[..n_odd].iter().enumerate() {
                if mask >> bit & 1 == 1 {
                    v += s;
                }
            }
            out.push(v as u32);
        }
    }

    pub fn cell_dim(&self, q: &[usize; MAX_DIM]) -> usize {
        q[..self.dim].iter().filter(|&&x| x % 2 == 1).count()
    }

    /// Per-cell maximum of vertex values, computed one axis at a time.
    pub fn cell_max(&self, values: &[f64]) -> Vec<f64> {
        let mut out = vec![f64::NEG_INFINITY; self.total];
        for c in 0..self.total {
            let q = self.coords(c);
            if q[..self.dim].iter().all(|x| x % 2 == 0) {
                let v: usize = (0..self.dim)
                    .map(|k| q[k] / 2 * self.vertex_strides[k])
                    .sum();
                out[c] = values[v];
            }
        }
        for axis in 0..self.dim {
            for c in 0..self.total {
                let q = self.coords(c);
                if q[axis] % 2 == 1 && (axis + 1..self.dim).all(|k| q[k] % 2 == 0) {
                    let s = self.strides[axis];
                    out[c] = out[c - s].max(out[c + s]);
                }
            }
        }
        out
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon.is_finite() && epsilon > 0.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("ε must be positive, got {epsilon}")))
    }
}

/// Pair complex `A ⊆ B` on the grid, with `A` the cells whose vertices all satisfy
/// `dY ≤ ε`, `B` those with `dY ≤ 3ε`, and `f` the maximum of `dx` over the vertices.
///
/// Only the cells of `B` are kept (cells outside `B` play no role in the image
/// diagram); when `dY ≤ 3ε` everywhere this is the full cubical complex of the grid.
/// Ids are dense and follow the row-major order of the doubled grid.
pub fn build_pair_complex(
    dy: &ScalarGrid,
    dx: &ScalarGrid,
    epsilon: f64,
) -> Result<FilteredPairComplex> {
    check_epsilon(epsilon)?;
    if dy.geometry != dx.geometry {
        return Err(Error::Structural(format!(
            "distance grids differ in geometry: {:?} vs {:?}",
            dy.geometry, dx.geometry
        )));
    }
    let grid = DoubledGrid::new(&dy.geometry);
    let max_y = grid.cell_max(&dy.values);
    let max_x = grid.cell_max(&dx.values);
    let (a_level, b_level) = (epsilon, 3.0 * epsilon);

    let mut ids = vec![u32::MAX; grid.total];
    let mut next = 0u32;
    for c in 0..grid.total {
        if max_y[c] <= b_level {
            ids[c] = next;
            next += 1;
        }
    }
    let mut out = FilteredPairComplex::empty(grid.dim);
    let (mut faces, mut face_ids, mut verts) = (Vec::new(), Vec::new(), Vec::new());
    for c in 0..grid.total {
        if ids[c] == u32::MAX {
            continue;
        }
        let q = grid.coords(c);
        grid.faces(c, &q, &mut faces);
        face_ids.clear();
        face_ids.extend(faces.iter().map(|&g| ids[g]));
        grid.vertices(&q, &mut verts);
        out.push(
            grid.cell_dim(&q),
            &face_ids,
            &verts,
            max_y[c] <= a_level,
            true,
            max_x[c],
        );
    }
    Ok(out)
}

/// Membership of every grid cell in `A` and `B`, computed once from `dY` so that local
/// complexes around many points `x` can be cut out cheaply.
#[derive(Clone, Debug)]
pub struct PairGrid {
    geometry: GridGeometry,
    grid: DoubledGrid,
    /// Bit 0: in `A`; bit 1: in `B`.
    flags: Vec<u8>,
}

const IN_A: u8 = 1;
const IN_B: u8 = 2;

impl PairGrid {
    pub fn new(dy: &ScalarGrid, epsilon: f64) -> Result<Self> {
        check_epsilon(epsilon)?;
        let grid = DoubledGrid::new(&dy.geometry);
        let flags = grid
            .cell_max(&dy.values)
            .into_iter()
            .map(|m| {
                if m <= epsilon {
                    IN_A | IN_B
                } else if m <= 3.0 * epsilon {
                    IN_B
                } else {
                    0
                }
            })
            .collect();
        Ok(Self {
            geometry: dy.geometry.clone(),
            grid,
            flags,
        })
    }

    pub fn geometry(&self) -> &GridGeometry {
        &self.geometry
    }

    /// Cells of `B` with `f = max_vertex ‖v − x‖ ≤ radius`.
    ///
    /// Identical, cell for cell, to restricting `build_pair_complex(dY, d_x, ε)` to the
    /// same radius. Only the box of half-width `radius` around `x` is visited.
    pub fn local_complex(&self, x: &[f64], radius: f64) -> FilteredPairComplex {
        let g = &self.geometry;
        let d = g.dim;
        let mut out = FilteredPairComplex::empty(d);
        let mut lo = [0usize; MAX_DIM];
        let mut len = [1usize; MAX_DIM];
        // Squared-distance term per doubled coordinate in the window, per axis.
        let mut terms: [Vec<f64>; MAX_DIM] = Default::default();
        for k in 0..d {
            let n = g.extents[k] as f64;
            let a = ((x[k] - radius - g.origin[k]) / g.spacing).floor() - 1.0;
            let b = ((x[k] + radius - g.origin[k]) / g.spacing).ceil() + 1.0;
            let a = a.max(0.0);
            let b = b.min(n - 1.0);
            if !(a <= b) {
                return out;
            }
            let (a, b) = (a as usize, b as usize);
            lo[k] = 2 * a;
            len[k] = 2 * (b - a) + 1;
            let vertex_term = |i: usize| {
                let t = g.coordinate(k, i) - x[k];
                t * t
            };
            terms[k] = (0..len[k])
                .map(|j| {
                    let q = lo[k] + j;
                    if q % 2 == 0 {
                        vertex_term(q / 2)
                    } else {
                        vertex_term(q / 2).max(vertex_term(q / 2 + 1))
                    }
                })
                .collect();
        }
        let local_total: usize = len[..d].iter().product();
        let mut local_strides = [0usize; MAX_DIM];
        let mut s = 1;
        for k in (0..d).rev() {
            local_strides[k] = s;
            s *= len[k];
        }
        let global_of =
            |q: &[usize; MAX_DIM]| -> usize { (0..d).map(|k| q[k] * self.grid.strides[k]).sum() };
        let local_coords = |mut l: usize| {
            let mut q = [0usize; MAX_DIM];
            for k in (0..d).rev() {
                q[k] = lo[k] + l % len[k];
                l /= len[k];
            }
            q
        };
        let cell_f = |q: &[usize; MAX_DIM]| -> f64 {
            let mut sq = 0.0;
            for k in 0..d {
                sq += terms[k][q[k] - lo[k]];
            }
            sq.sqrt()
        };

        let mut ids = vec![u32::MAX; local_total];
        let mut values = vec![0.0; local_total];
        let mut next = 0u32;
        for l in 0..local_total {
            let q = local_coords(l);
            if self.flags[global_of(&q)] & IN_B == 0 {
                continue;
            }
            let f = cell_f(&q);
            if f <= radius {
                ids[l] = next;
                values[l] = f;
                next += 1;
            }
        }
        let (mut face_ids, mut verts) = (Vec::new(), Vec::new());
        for l in 0..local_total {
            if ids[l] == u32::MAX {
                continue;
            }
            let q = local_coords(l);
            face_ids.clear();
            for k in 0..d {
                if q[k] % 2 == 1 {
                    face_ids.push(ids[l - local_strides[k]]);
                    face_ids.push(ids[l + local_strides[k]]);
                }
            }
            self.grid.vertices(&q, &mut verts);
            let flags = self.flags[global_of(&q)];
            out.push(
                self.grid.cell_dim(&q),
                &face_ids,
                &verts,
                flags & IN_A != 0,
                true,
                values[l],
            );
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::super::{restrict_to_ball, validate_pair};
    use super::*;
    use crate::geometry::{distance_field, generate_shape, point_distance_field, ShapeSpec};
    use proptest::prelude::*;

    fn constant_grid(g: &GridGeometry, v: f64) -> ScalarGrid {
        ScalarGrid::new(g.clone(), vec![v; g.vertex_count()]).unwrap()
    }

    #[test]
    fn three_by_three() {
        let g = GridGeometry::new(vec![0.0, 0.0], 1.0, vec![3, 3]).unwrap();
        let dy = constant_grid(&g, 0.0);
        let dx = point_distance_field(&[0.0, 0.0], &g).unwrap();
        let c = build_pair_complex(&dy, &dx, 0.1).unwrap();
        assert_eq!(c.len(), 25);
        let count = |k| c.cells().filter(|x| x.dim == k).count();
        assert_eq!((count(0), count(1), count(2)), (9, 12, 4));
        assert!(c.cells().all(|x| x.in_a && x.in_b));
        assert_eq!(validate_pair(&c), Ok(()));
        assert_eq!(c.euler_characteristic(), 1);
        // Square with lower-left vertex at (1,1) reaches (2,2).
        let top = c.cells().filter(|x| x.dim == 2).last().unwrap();
        assert_eq!(top.f, 8f64.sqrt());
        assert_eq!(top.vertices, &[4, 7, 5, 8]);
    }

    #[test]
    fn far_cloud_gives_empty_complex() {
        let g = GridGeometry::new(vec![0.0, 0.0], 1.0, vec![3, 3]).unwrap();
        let c = build_pair_complex(&constant_grid(&g, 1.0), &constant_grid(&g, 0.0), 0.1).unwrap();
        assert!(c.is_empty());
    }

    #[test]
    fn mismatched_geometry_rejected() {
        let g = GridGeometry::new(vec![0.0, 0.0], 1.0, vec![3, 3]).unwrap();
        let h = GridGeometry::new(vec![0.0, 0.0], 1.0, vec![3, 4]).unwrap();
        let err =
            build_pair_complex(&constant_grid(&g, 0.0), &constant_grid(&h, 0.0), 0.1).unwrap_err();
        assert!(matches!(err, Error::Structural(_)));
        assert!(build_pair_complex(&constant_grid(&g, 0.0), &constant_grid(&g, 0.0), 0.0).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn full_grid_counts(extents in prop::collection::vec(2usize..6, 1..=3)) {
            let d = extents.len();
            let g = GridGeometry::new(vec![0.0; d], 0.5, extents.clone()).unwrap();
            let c = build_pair_complex(&constant_grid(&g, 0.0), &constant_grid(&g, 0.0), 1.0).unwrap();
            let expect: usize = extents.iter().map(|n| 2 * n - 1).product();
            prop_assert_eq!(c.len(), expect);
            prop_assert_eq!(c.euler_characteristic(), 1);
            prop_assert_eq!(validate_pair(&c), Ok(()));
        }

        #[test]
        fn nested_in_epsilon(seed in 0u64..500, eps in 0.02f64..0.2) {
            let cloud = generate_shape(&ShapeSpec::ball(2, 0.5), 15, seed).unwrap();
            let g = GridGeometry::covering(&[-0.5, -0.5], &[0.5, 0.5], 0.8, 0.1).unwrap();
            let dy = distance_field(&cloud, &g, 0.0).unwrap();
            let dx = point_distance_field(&[0.1, 0.0], &g).unwrap();
            let small = build_pair_complex(&dy, &dx, eps).unwrap();
            let big = build_pair_complex(&dy, &dx, 3.0 * eps).unwrap();
            prop_assert_eq!(validate_pair(&small), Ok(()));
            // B(ε) ⊆ A(3ε): match cells through their vertex lists.
            let a_big: std::collections::HashSet<Vec<u32>> =
                big.cells().filter(|c| c.in_a).map(|c| c.vertices.to_vec()).collect();
            for c in small.cells() {
                prop_assert!(a_big.contains(c.vertices));
            }
        }

        #[test]
        fn local_builder_matches_restriction(
            seed in 0u64..500,
            x0 in -1.5f64..1.5,
            x1 in -1.5f64..1.5,
            radius in 0.05f64..1.2,
        ) {
            let cloud = generate_shape(&ShapeSpec::cuboid(vec![1.0, 0.6]), 30, seed).unwrap();
            let g = GridGeometry::covering(&[0.0, 0.0], &[1.0, 0.6], 0.6, 0.07).unwrap();
            let dy = distance_field(&cloud, &g, 0.0).unwrap();
            let x = [x0, x1];
            let dx = point_distance_field(&x, &g).unwrap();
            let eps = 0.06;
            let expect = restrict_to_ball(&build_pair_complex(&dy, &dx, eps).unwrap(), radius);
            let got = PairGrid::new(&dy, eps).unwrap().local_complex(&x, radius);
            prop_assert_eq!(got, expect);
        }
    }

    #[test]
    fn local_builder_matches_restriction_3d() {
        let cloud = generate_shape(&ShapeSpec::ball(3, 0.5), 20, 5).unwrap();
        let g = GridGeometry::covering(&[-0.5; 3], &[0.5; 3], 0.4, 0.1).unwrap();
        let dy = distance_field(&cloud, &g, 0.0).unwrap();
        let pairs = PairGrid::new(&dy, 0.05).unwrap();
        for x in [[0.0, 0.0, 0.0], [0.3, -0.2, 0.55], [-1.0, 1.0, 0.0]] {
            let dx = point_distance_field(&x, &g).unwrap();
            let expect = restrict_to_ball(&build_pair_complex(&dy, &dx, 0.05).unwrap(), 0.45);
            assert_eq!(pairs.local_complex(&x, 0.45), expect);
        }
    }
}
