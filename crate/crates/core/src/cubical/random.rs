use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::build::build_pair_complex;
use super::complex::{ComplexBuilder, FilteredPairComplex};
use crate::geometry::{GridGeometry, ScalarGrid};
use crate::{Error, Result};

// Small value sets so that ties between cells are common.
const DY_LEVELS: [f64; 8] = [0.0, 0.5, 1.0, 1.0, 2.0, 3.0, 3.0, 4.0];
const DX_LEVELS: [f64; 6] = [0.0, 1.0, 2.0, 3.0, 4.0, 5.0];
const STEPS: [f64; 5] = [0.0, 0.0, 0.5, 1.0, 2.0];

/// Random grid with at most `max_cells` cells in its full cubical complex.
fn random_grid(rng: &mut ChaCha8Rng, max_cells: usize, dim: usize) -> Result<GridGeometry> {
    if !(1..=3).contains(&dim) || 3usize.pow(dim as u32) > max_cells {
        return Err(Error::Argument(format!(
            "a {dim}-dimensional grid needs room for at least {} cells, got {max_cells}",
            3usize.saturating_pow(dim as u32)
        )));
    }
    // Aim for roughly balanced axes, then shuffle the slack.
    let side = (max_cells as f64).powf(1.0 / dim as f64);
    let mut extents = vec![2usize; dim];
    let mut budget = max_cells;
    for k in 0..dim {
        let rest = 3usize.pow((dim - k - 1) as u32);
        let largest = ((budget / rest) + 1) / 2;
        let typical = ((side + 1.0) / 2.0).round() as usize;
        let hi = largest.min(typical + 1).max(2);
        extents[k] = rng.random_range(2..=hi);
        budget /= 2 * extents[k] - 1;
    }
    GridGeometry::new(vec![0.0; dim], 1.0, extents)
}

/// Seeded random pair complex with a general filtration.
///
/// Starting from the full cubical complex of a random grid (at most `max_cells` cells),
/// cells are visited by dimension; each gets `f = max(f of faces) + step` with a random
/// non-negative step, and joins `B` (resp. `A`) with fixed probability when all its
/// faces are already there. Only the cells of `B` are kept.
pub fn random_pair_complex(max_cells: usize, dim: usize, seed: u64) -> Result<FilteredPairComplex> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = random_grid(&mut rng, max_cells, dim)?;
    let zeros = ScalarGrid::new(g.clone(), vec![0.0; g.vertex_count()])?;
    let full = build_pair_complex(&zeros, &zeros, 1.0)?;
    let n = full.len();
    let (mut f, mut in_a, mut in_b) = (vec![0.0; n], vec![false; n], vec![false; n]);
    let (p_b, p_a) = (rng.random_range(0.75..1.0), rng.random_range(0.4..0.95));
    for k in 0..=dim {
        for id in (0..n).filter(|&c| full.dim(c) == k) {
            let faces = full.faces(id);
            let base = faces.iter().map(|&s| f[s as usize]).fold(0.0, f64::max);
            f[id] = base
                + if k == 0 {
                    rng.random_range(0..6) as f64
                } else {
                    *STEPS.choose(&mut rng).unwrap()
                };
            in_b[id] = faces.iter().all(|&s| in_b[s as usize]) && rng.random_bool(p_b);
            in_a[id] = in_b[id] && faces.iter().all(|&s| in_a[s as usize]) && rng.random_bool(p_a);
        }
    }
    let mut map = vec![usize::MAX; n];
    let mut b = ComplexBuilder::new(dim);
    for id in (0..n).filter(|&c| in_b[c]) {
        let faces: Vec<u32> = full
            .faces(id)
            .iter()
            .map(|&s| map[s as usize] as u32)
            .collect();
        map[id] = b.cell_with_vertices(
            full.dim(id),
            &faces,
            full.vertices(id),
            in_a[id],
            true,
            f[id],
        );
    }
    // Faces of grid cells may have larger ids; remap them now that every id is known.
    let mut c = b.build();
    let mut pos = 0;
    for id in (0..n).filter(|&x| in_b[x]) {
        for (slot, &s) in full.faces(id).iter().enumerate() {
            c.faces[pos + slot] = map[s as usize] as u32;
        }
        pos += full.faces(id).len();
    }
    Ok(c)
}

/// Seeded random pair complex built like an estimator sample: vertex values for `dY`
/// and `d_x` are drawn from small discrete sets (`ε = 1`, so thresholds at 1 and 3) and
/// every cell takes the maximum over its vertices.
pub fn random_distance_pair_complex(
    max_cells: usize,
    dim: usize,
    seed: u64,
) -> Result<FilteredPairComplex> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = random_grid(&mut rng, max_cells, dim)?;
    let n = g.vertex_count();
    let dy: Vec<f64> = (0..n)
        .map(|_| *DY_LEVELS.choose(&mut rng).unwrap())
        .collect();
    let dx: Vec<f64> = (0..n)
        .map(|_| *DX_LEVELS.choose(&mut rng).unwrap())
        .collect();
    build_pair_complex(
        &ScalarGrid::new(g.clone(), dy)?,
        &ScalarGrid::new(g, dx)?,
        1.0,
    )
}

#[cfg(test)]
mod tests {
    use super::super::validate_pair;
    use super::*;

    #[test]
    fn respects_size_and_invariants() {
        for seed in 0..200 {
            for (max, dim) in [(100, 2), (9, 2), (3, 1), (30, 1), (300, 3)] {
                for c in [
                    random_pair_complex(max, dim, seed).unwrap(),
                    random_distance_pair_complex(max, dim, seed).unwrap(),
                ] {
                    assert!(c.len() <= max);
                    assert_eq!(validate_pair(&c), Ok(()));
                }
            }
        }
        assert!(random_pair_complex(2, 1, 0).is_err());
        assert!(random_distance_pair_complex(8, 2, 0).is_err());
    }

    #[test]
    fn deterministic() {
        assert_eq!(
            random_pair_complex(100, 2, 4).unwrap(),
            random_pair_complex(100, 2, 4).unwrap()
        );
    }
}
