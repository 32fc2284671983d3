//! Brute-force ranks of `H_j(A_s) → H_j(B_t)` by dense Gaussian elimination over F2.

use super::diagram::{Bar, PersistenceDiagram};
use crate::cubical::{ensure_valid, FilteredPairComplex};
use crate::{Error, Result};

/// Largest complex the oracle accepts.
pub const ORACLE_CELL_LIMIT: usize = 2000;

#[derive(Clone)]
struct BitVec(Vec<u64>);

impl BitVec {
    fn zeros(n: usize) -> Self {
        BitVec(vec![0; n.div_ceil(64).max(1)])
    }

    fn flip(&mut self, i: usize) {
        self.0[i / 64] ^= 1 << (i % 64);
    }

    fn xor(&mut self, other: &BitVec) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a ^= b;
        }
    }

    fn leading(&self) -> Option<usize> {
        self.0
            .iter()
            .enumerate()
            .rev()
            .find(|(_, w)| **w != 0)
            .map(|(i, w)| i * 64 + 63 - w.leading_zeros() as usize)
    }
}

/// Echelon basis keyed by leading bit.
struct Basis {
    rows: Vec<Option<BitVec>>,
    rank: usize,
}

impl Basis {
    fn new(n: usize) -> Self {
        Self {
            rows: vec![None; n],
            rank: 0,
        }
    }

    fn insert(&mut self, mut v: BitVec) {
        while let Some(l) = v.leading() {
            match &self.rows[l] {
                Some(b) => v.xor(b),
                None => {
                    self.rows[l] = Some(v);
                    self.rank += 1;
                    return;
                }
            }
        }
    }
}

fn check_scope(c: &FilteredPairComplex) -> Result<()> {
    if c.len() > ORACLE_CELL_LIMIT {
        return Err(Error::OracleScope {
            cells: c.len(),
            limit: ORACLE_CELL_LIMIT,
        });
    }
    ensure_valid(c)
}

/// Rank of `H_j(A_s) → H_j(B_t)`, as `dim(Z_j(A_s) + Bd_j(B_t)) − dim Bd_j(B_t)`.
pub fn rank_oracle(c: &FilteredPairComplex, s: f64, t: f64, j: usize) -> Result<usize> {
    if !(s <= t) {
        return Err(Error::Argument(format!(
            "rank needs s ≤ t, got s = {s}, t = {t}"
        )));
    }
    check_scope(c)?;
    Ok(rank_unchecked(c, s, t, j))
}

fn rank_unchecked(c: &FilteredPairComplex, s: f64, t: f64, j: usize) -> usize {
    let in_bt = |x: usize| c.in_b(x) && c.f(x) <= t;
    let in_as = |x: usize| c.in_a(x) && c.f(x) <= s;
    // Index the j-cells and (j−1)-cells of B_t.
    let mut j_index = vec![usize::MAX; c.len()];
    let mut lower_index = vec![usize::MAX; c.len()];
    let (mut nj, mut nl) = (0, 0);
    for x in 0..c.len() {
        if !in_bt(x) {
            continue;
        }
        if c.dim(x) == j {
            j_index[x] = nj;
            nj += 1;
        } else if j > 0 && c.dim(x) == j - 1 {
            lower_index[x] = nl;
            nl += 1;
        }
    }
    if nj == 0 {
        return 0;
    }

    // Cycles of A_s: eliminate boundaries while tracking the combination of j-cells.
    let mut cycles = Vec::new();
    let mut pivots: Vec<Option<(BitVec, BitVec)>> = vec![None; nl.max(1)];
    for x in 0..c.len() {
        if !(in_as(x) && c.dim(x) == j) {
            continue;
        }
        let mut combo = BitVec::zeros(nj);
        combo.flip(j_index[x]);
        let mut boundary = BitVec::zeros(nl);
        if j > 0 {
            for &g in c.faces(x) {
                boundary.flip(lower_index[g as usize]);
            }
        }
        loop {
            match boundary.leading() {
                None => {
                    cycles.push(combo);
                    break;
                }
                Some(l) => match &pivots[l] {
                    Some((pb, pc)) => {
                        boundary.xor(pb);
                        combo.xor(pc);
                    }
                    None => {
                        pivots[l] = Some((boundary, combo));
                        break;
                    }
                },
            }
        }
    }

    let mut basis = Basis::new(nj);
    for x in 0..c.len() {
        if in_bt(x) && c.dim(x) == j + 1 {
            let mut v = BitVec::zeros(nj);
            for &g in c.faces(x) {
                v.flip(j_index[g as usize]);
            }
            basis.insert(v);
        }
    }
    let boundaries = basis.rank;
    for z in cycles {
        basis.insert(z);
    }
    basis.rank - boundaries
}

/// Image diagram recovered from ranks at consecutive critical values by
/// inclusion–exclusion: `μ(b, d) = r(b, d⁻) − r(b, d) − r(b⁻, d⁻) + r(b⁻, d)`.
pub fn diagram_from_ranks(c: &FilteredPairComplex) -> Result<PersistenceDiagram> {
    check_scope(c)?;
    let mut crit: Vec<f64> = (0..c.len())
        .filter(|&x| c.in_b(x))
        .map(|x| c.f(x))
        .collect();
    crit.sort_by(f64::total_cmp);
    crit.dedup();
    let m = crit.len();
    let top = (0..c.len()).filter(|&x| c.in_a(x)).map(|x| c.dim(x)).max();
    let mut bars = Vec::new();
    let Some(top) = top else {
        return Ok(PersistenceDiagram::default().with_meta("ranks"));
    };
    for j in 0..=top {
        // r[p][q] = rank at (crit[p−1], crit[q−1]); index 0 stands for "below every value".
        let mut r = vec![vec![0i64; m + 1]; m + 1];
        for p in 1..=m {
            for q in p..=m {
                r[p][q] = rank_unchecked(c, crit[p - 1], crit[q - 1], j) as i64;
            }
        }
        for p in 1..=m {
            for q in p + 1..=m {
                let mu = r[p][q - 1] - r[p][q] - r[p - 1][q - 1] + r[p - 1][q];
                push_bars(&mut bars, mu, Bar::finite(j, crit[p - 1], crit[q - 1]))?;
            }
            let mu = r[p][m] - r[p - 1][m];
            push_bars(&mut bars, mu, Bar::infinite(j, crit[p - 1]))?;
        }
    }
    Ok(PersistenceDiagram::new(bars).sorted().with_meta("ranks"))
}

fn push_bars(bars: &mut Vec<Bar>, mu: i64, bar: Bar) -> Result<()> {
    if mu < 0 {
        return Err(Error::Structural(format!(
            "negative multiplicity {mu} for {bar:?}"
        )));
    }
    bars.extend(std::iter::repeat_n(bar, mu as usize));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cubical::ComplexBuilder;

    fn example() -> FilteredPairComplex {
        let mut b = ComplexBuilder::new(1);
        let v1 = b.cell(0, &[], true, true, 0.0);
        let v2 = b.cell(0, &[], true, true, 1.0);
        b.cell(1, &[v1, v2], false, true, 2.0);
        b.build()
    }

    #[test]
    fn example_ranks() {
        let c = example();
        assert_eq!(rank_oracle(&c, 0.0, 0.0, 0).unwrap(), 1);
        assert_eq!(rank_oracle(&c, 1.0, 1.0, 0).unwrap(), 2);
        assert_eq!(rank_oracle(&c, 2.0, 2.0, 0).unwrap(), 1);
        assert_eq!(rank_oracle(&c, -1.0, 2.0, 0).unwrap(), 0);
        assert_eq!(rank_oracle(&c, 2.0, 2.0, 1).unwrap(), 0);
        assert!(rank_oracle(&c, 1.0, 0.0, 0).is_err());
    }

    #[test]
    fn example_diagram() {
        let d = diagram_from_ranks(&example()).unwrap();
        assert!(d.same_bars(&PersistenceDiagram::new(vec![
            Bar::infinite(0, 0.0),
            Bar::finite(0, 1.0, 2.0)
        ])));
    }

    #[test]
    fn scope_guard() {
        let mut b = ComplexBuilder::new(0);
        for _ in 0..=ORACLE_CELL_LIMIT {
            b.cell(0, &[], true, true, 0.0);
        }
        assert!(matches!(
            rank_oracle(&b.build(), 0.0, 0.0, 0),
            Err(Error::OracleScope {
                cells: 2001,
                limit: 2000
            })
        ));
    }
}
