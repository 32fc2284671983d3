use serde::{Deserialize, Serialize};

use super::PolynomialR;
use crate::persistence::{Death, PersistenceDiagram};
use crate::{Error, Result};

/// Step function `r ↦ χ(D(r))` on `[0, R]`.
///
/// `values[k]` is the value on `[breakpoints[k], breakpoints[k + 1])`, the last piece
/// being closed at `R`. Breakpoints start at 0, end at `R`, are strictly increasing, and
/// neighboring pieces always differ.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ChiProfile {
    breakpoints: Vec<f64>,
    values: Vec<i64>,
    r_max: f64,
}

impl ChiProfile {
    /// Builds a canonical profile from arbitrary pieces, merging empty and repeated ones.
    pub fn from_pieces(breakpoints: Vec<f64>, values: Vec<i64>, r_max: f64) -> Result<Self> {
        if !(r_max.is_finite() && r_max > 0.0) {
            return Err(Error::Argument(format!("R must be positive, got {r_max}")));
        }
        if breakpoints.len() != values.len() + 1
            || breakpoints.first() != Some(&0.0)
            || breakpoints.last() != Some(&r_max)
            || breakpoints.windows(2).any(|w| !(w[0] <= w[1]))
        {
            return Err(Error::Argument(format!(
                "breakpoints must run monotonically from 0 to {r_max} with one more entry than values"
            )));
        }
        let mut bp = vec![0.0];
        let mut vals: Vec<i64> = Vec::new();
        for (k, &v) in values.iter().enumerate() {
            let (lo, hi) = (breakpoints[k], breakpoints[k + 1]);
            if lo == hi {
                continue;
            }
            if vals.last() == Some(&v) {
                *bp.last_mut().unwrap() = hi;
            } else {
                vals.push(v);
                bp.push(hi);
            }
        }
        Ok(Self {
            breakpoints: bp,
            values: vals,
            r_max,
        })
    }

    pub fn constant(value: i64, r_max: f64) -> Result<Self> {
        Self::from_pieces(vec![0.0, r_max], vec![value], r_max)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn is_zero(&self) -> bool {
        self.values == [0]
    }

    /// χ at `r ∈ [0, R]`, right-continuous; at `R` itself the last piece applies.
    pub fn value_at(&self, r: f64) -> i64 {
        let k = self.breakpoints[1..].partition_point(|&b| b <= r);
        self.values[k.min(self.values.len() - 1)]
    }

    /// `∫_0^R |χ_self − χ_other|`, for profiles on the same `[0, R]`.
    pub fn l1_distance(&self, other: &Self) -> f64 {
        let mut cuts: Vec<f64> = self
            .breakpoints
            .iter()
            .chain(&other.breakpoints)
            .copied()
            .collect();
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        cuts.windows(2)
            .map(|w| {
                let mid = 0.5 * (w[0] + w[1]);
                (self.value_at(mid) - other.value_at(mid)).abs() as f64 * (w[1] - w[0])
            })
            .sum()
    }
}

/// Exact step function of `r ↦ χ(D(r))` on `[0, R]`, under the half-open convention
/// (a bar counts at `r` iff `birth ≤ r < death`).
pub fn chi_profile(diagram: &PersistenceDiagram, r_max: f64) -> Result<ChiProfile> {
    if !(r_max.is_finite() && r_max > 0.0) {
        return Err(Error::Argument(format!("R must be positive, got {r_max}")));
    }
    let mut events: Vec<(f64, i64)> = Vec::new();
    for bar in &diagram.bars {
        let sign = if bar.degree % 2 == 0 { 1 } else { -1 };
        let start = bar.birth.max(0.0);
        let end = match bar.death {
            Death::Finite(d) => d.min(r_max),
            Death::Infinite => r_max,
        };
        if start < end {
            events.push((start, sign));
            if end < r_max {
                events.push((end, -sign));
            }
        }
    }
    events.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut breakpoints = vec![0.0];
    let mut values = Vec::new();
    let mut current = 0i64;
    let mut k = 0;
    while k < events.len() {
        let at = events[k].0;
        if at > 0.0 {
            values.push(current);
            breakpoints.push(at);
        }
        while k < events.len() && events[k].0 == at {
            current += events[k].1;
            k += 1;
        }
    }
    values.push(current);
    breakpoints.push(r_max);
    ChiProfile::from_pieces(breakpoints, values, r_max)
}

/// `∫_0^R χ(r) S(r) dr`, evaluated exactly from the antiderivative of `S`.
pub fn integrate_chi_poly(profile: &ChiProfile, s: &PolynomialR) -> f64 {
    let mut prev = s.antiderivative_at(0.0);
    let mut total = 0.0;
    for (k, &v) in profile.values.iter().enumerate() {
        let next = s.antiderivative_at(profile.breakpoints[k + 1]);
        if v != 0 {
            total += v as f64 * (next - prev);
        }
        prev = next;
    }
    total
}
