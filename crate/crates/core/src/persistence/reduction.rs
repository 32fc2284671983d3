use super::diagram::{Bar, PersistenceDiagram};
use crate::cubical::{ensure_valid, FilteredPairComplex};
use crate::Result;

const NONE: u32 = u32::MAX;

/// Switches for the matrix reduction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReductionOptions {
    /// Zero out columns known in advance to reduce to zero. Results are identical
    /// either way.
    pub clearing: bool,
}

impl Default for ReductionOptions {
    fn default() -> Self {
        Self { clearing: true }
    }
}

/// Cells of `B` sorted by `(f, dim, id)`.
fn filtration_order(c: &FilteredPairComplex) -> Vec<u32> {
    let mut order: Vec<u32> = (0..c.len() as u32)
        .filter(|&i| c.in_b(i as usize))
        .collect();
    order.sort_unstable_by(|&x, &y| {
        let (x, y) = (x as usize, y as usize);
        c.f(x)
            .total_cmp(&c.f(y))
            .then(c.dim(x).cmp(&c.dim(y)))
            .then(x.cmp(&y))
    });
    order
}

/// Column reduction over F2 with dimensions processed from the top down.
///
/// Columns are the cells `cols` in order; the boundary of a column is expressed in
/// `row_of` indices. Returns the pivot row of every reduced column (`NONE` for zero).
/// With clearing on, a pivot row `r` for which `clearable(r)` holds marks the column of
/// the same cell as zero.
struct Reduction<'a> {
    complex: &'a FilteredPairComplex,
    cols: &'a [u32],
    row_of: &'a [u32],
    row_cell: &'a [u32],
    col_of: &'a [u32],
}

impl Reduction<'_> {
    fn run(&self, clearing: bool, clearable: impl Fn(u32) -> bool) -> (Vec<u32>, Vec<u32>) {
        let c = self.complex;
        let n_cols = self.cols.len();
        let mut lows = vec![NONE; n_cols];
        let mut pivot = vec![NONE; self.row_cell.len()];
        let mut cleared = vec![false; n_cols];
        let mut stored: Vec<Vec<u32>> = vec![Vec::new(); n_cols];
        let mut col = Vec::new();
        let mut scratch = Vec::new();
        let top = self
            .cols
            .iter()
            .map(|&x| c.dim(x as usize))
            .max()
            .unwrap_or(0);
        for k in (1..=top).rev() {
            for j in 0..n_cols {
                let cell = self.cols[j] as usize;
                if c.dim(cell) != k || cleared[j] {
                    continue;
                }
                col.clear();
                col.extend(c.faces(cell).iter().map(|&g| self.row_of[g as usize]));
                col.sort_unstable();
                while let Some(&low) = col.last() {
                    let other = pivot[low as usize];
                    if other == NONE {
                        break;
                    }
                    add_into(&mut col, &stored[other as usize], &mut scratch);
                }
                if let Some(&low) = col.last() {
                    lows[j] = low;
                    pivot[low as usize] = j as u32;
                    if clearing && clearable(low) {
                        let target = self.col_of[self.row_cell[low as usize] as usize];
                        if target != NONE {
                            cleared[target as usize] = true;
                        }
                    }
                    stored[j] = std::mem::take(&mut col);
                }
            }
        }
        (lows, pivot)
    }
}

/// `col ← col + other` over F2 for ascending index lists.
fn add_into(col: &mut Vec<u32>, other: &[u32], scratch: &mut Vec<u32>) {
    scratch.clear();
    let (mut i, mut j) = (0, 0);
    while i < col.len() && j < other.len() {
        let (a, b) = (col[i], other[j]);
        if a < b {
            scratch.push(a);
            i += 1;
        } else if b < a {
            scratch.push(b);
            j += 1;
        } else {
            i += 1;
            j += 1;
        }
    }
    scratch.extend_from_slice(&col[i..]);
    scratch.extend_from_slice(&other[j..]);
    std::mem::swap(col, scratch);
}

fn index_of(n: usize, cells: &[u32]) -> Vec<u32> {
    let mut map = vec![NONE; n];
    for (i, &x) in cells.iter().enumerate() {
        map[x as usize] = i as u32;
    }
    map
}

/// Image persistence diagram of `H(A_r) → H(B_r)` over F2, all degrees.
///
/// Births are the positive cells of `A` in the reduction of `A` alone. Deaths come from
/// reducing the boundary matrix of `B` with its rows reordered so that every cell of
/// `A` precedes every cell of `B \ A`: a column whose pivot lands in the `A` block kills
/// the image class born at that pivot. Zero-length bars are dropped.
pub fn image_persistence(c: &FilteredPairComplex) -> Result<PersistenceDiagram> {
    image_persistence_with(c, ReductionOptions::default())
}

pub fn image_persistence_with(
    c: &FilteredPairComplex,
    options: ReductionOptions,
) -> Result<PersistenceDiagram> {
    ensure_valid(c)?;
    Ok(image_persistence_unchecked(c, options))
}

fn image_persistence_unchecked(
    c: &FilteredPairComplex,
    options: ReductionOptions,
) -> PersistenceDiagram {
    let n = c.len();
    let order = filtration_order(c);
    let a_order: Vec<u32> = order
        .iter()
        .copied()
        .filter(|&x| c.in_a(x as usize))
        .collect();
    if a_order.is_empty() {
        return PersistenceDiagram::default().with_meta("image");
    }
    let a_index = index_of(n, &a_order);
    let (a_lows, _) = Reduction {
        complex: c,
        cols: &a_order,
        row_of: &a_index,
        row_cell: &a_order,
        col_of: &a_index,
    }
    .run(options.clearing, |_| true);

    // Rows: A in filtration order, then B \ A in filtration order.
    let mut rows = a_order.clone();
    rows.extend(order.iter().copied().filter(|&x| !c.in_a(x as usize)));
    let row_of = index_of(n, &rows);
    let col_of = index_of(n, &order);
    let n_a = a_order.len() as u32;
    let (im_lows, pivot) = Reduction {
        complex: c,
        cols: &order,
        row_of: &row_of,
        row_cell: &rows,
        col_of: &col_of,
    }
    .run(options.clearing, |row| row < n_a);

    let mut bars = Vec::new();
    for (j, &low) in im_lows.iter().enumerate() {
        if low != NONE && low < n_a {
            let sigma = rows[low as usize] as usize;
            let tau = order[j] as usize;
            if c.f(sigma) < c.f(tau) {
                bars.push(Bar::finite(c.dim(sigma), c.f(sigma), c.f(tau)));
            }
        }
    }
    for (i, &sigma) in a_order.iter().enumerate() {
        if a_lows[i] == NONE && pivot[i] == NONE {
            let sigma = sigma as usize;
            bars.push(Bar::infinite(c.dim(sigma), c.f(sigma)));
        }
    }
    PersistenceDiagram::new(bars).sorted().with_meta("image")
}

/// Ordinary sublevel-set persistence of `f` on `B`.
pub fn ordinary_persistence(c: &FilteredPairComplex) -> Result<PersistenceDiagram> {
    ordinary_persistence_with(c, ReductionOptions::default())
}

pub fn ordinary_persistence_with(
    c: &FilteredPairComplex,
    options: ReductionOptions,
) -> Result<PersistenceDiagram> {
    ensure_valid(c)?;
    let order = filtration_order(c);
    let index = index_of(c.len(), &order);
    let (lows, pivot) = Reduction {
        complex: c,
        cols: &order,
        row_of: &index,
        row_cell: &order,
        col_of: &index,
    }
    .run(options.clearing, |_| true);
    let mut bars = Vec::new();
    for (j, &low) in lows.iter().enumerate() {
        if low != NONE {
            let (sigma, tau) = (order[low as usize] as usize, order[j] as usize);
            if c.f(sigma) < c.f(tau) {
                bars.push(Bar::finite(c.dim(sigma), c.f(sigma), c.f(tau)));
            }
        }
    }
    for (i, &sigma) in order.iter().enumerate() {
        if lows[i] == NONE && pivot[i] == NONE {
            let sigma = sigma as usize;
            bars.push(Bar::infinite(c.dim(sigma), c.f(sigma)));
        }
    }
    Ok(PersistenceDiagram::new(bars).sorted().with_meta("ordinary"))
}
