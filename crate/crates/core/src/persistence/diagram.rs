use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

/// Death value of a bar. Essential classes never die; they carry [`Death::Infinite`]
/// rather than a large float.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub enum Death {
    Finite(f64),
    Infinite,
}

impl Death {
    pub fn is_infinite(self) -> bool {
        matches!(self, Death::Infinite)
    }

    /// `+∞` for essential classes.
    pub fn value(self) -> f64 {
        match self {
            Death::Finite(d) => d,
            Death::Infinite => f64::INFINITY,
        }
    }

    fn total_cmp(&self, other: &Self) -> Ordering {
        self.value().total_cmp(&other.value())
    }
}

impl fmt::Display for Death {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Death::Finite(d) => write!(f, "{d}"),
            Death::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Death {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        crate::serde_inf::serialize(&self.value(), s)
    }
}

impl<'de> Deserialize<'de> for Death {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = crate::serde_inf::deserialize(d)?;
        Ok(if v == f64::INFINITY {
            Death::Infinite
        } else {
            Death::Finite(v)
        })
    }
}

/// One interval `[birth, death)` in homology degree `degree`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bar {
    #[serde(rename = "dim")]
    pub degree: usize,
    pub birth: f64,
    pub death: Death,
}

impl Bar {
    pub fn finite(degree: usize, birth: f64, death: f64) -> Self {
        Self {
            degree,
            birth,
            death: Death::Finite(death),
        }
    }

    pub fn infinite(degree: usize, birth: f64) -> Self {
        Self {
            degree,
            birth,
            death: Death::Infinite,
        }
    }

    pub fn persistence(&self) -> f64 {
        self.death.value() - self.birth
    }

    /// Alive at `r` under the half-open convention.
    pub fn alive_at(&self, r: f64) -> bool {
        self.birth <= r && r < self.death.value()
    }

    fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.degree
            .cmp(&other.degree)
            .then(self.birth.total_cmp(&other.birth))
            .then(self.death.total_cmp(&other.death))
    }
}

/// A finite multiset of bars. Serializes as a JSON array of
/// `{"dim": j, "birth": b, "death": d | "inf"}` objects; `meta` is not serialized.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PersistenceDiagram {
    pub bars: Vec<Bar>,
    #[serde(skip)]
    pub meta: String,
}

impl PersistenceDiagram {
    pub fn new(bars: Vec<Bar>) -> Self {
        Self {
            bars,
            meta: String::new(),
        }
    }

    pub fn with_meta(mut self, meta: impl Into<String>) -> Self {
        self.meta = meta.into();
        self
    }

    pub fn len(&self) -> usize {
        self.bars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bars.is_empty()
    }

    /// Sorts bars by (degree, birth, death), the canonical order for comparisons.
    pub fn sort(&mut self) {
        self.bars.sort_by(Bar::canonical_cmp);
    }

    pub fn sorted(mut self) -> Self {
        self.sort();
        self
    }

    /// Multiset equality of the bars.
    pub fn same_bars(&self, other: &Self) -> bool {
        self.clone().sorted().bars == other.clone().sorted().bars
    }

    pub fn degree(&self, j: usize) -> impl Iterator<Item = &Bar> {
        self.bars.iter().filter(move |b| b.degree == j)
    }

    pub fn max_degree(&self) -> Option<usize> {
        self.bars.iter().map(|b| b.degree).max()
    }

    /// Checks `birth ≤ death`, finite births, and degrees at most `max_degree`.
    pub fn check(&self, max_degree: usize) -> Result<()> {
        for b in &self.bars {
            if !b.birth.is_finite() || b.birth > b.death.value() || b.degree > max_degree {
                return Err(Error::Structural(format!("invalid bar {b:?}")));
            }
            if let Death::Finite(d) = b.death {
                if !d.is_finite() {
                    return Err(Error::Structural(format!(
                        "non-finite finite death in {b:?}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        self.bars
            .iter()
            .map(|b| format!("{} {} {}\n", b.degree, b.birth, b.death))
            .collect()
    }

    /// Parses the `j b d` line format; blank lines and `#` comments are skipped.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut bars = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = || {
                Error::Structural(format!(
                    "line {}: expected `dim birth death`, got {line:?}",
                    n + 1
                ))
            };
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(bad());
            }
            let degree = fields[0].parse().map_err(|_| bad())?;
            let birth = fields[1].parse().map_err(|_| bad())?;
            let death = match fields[2] {
                "inf" => Death::Infinite,
                s => Death::Finite(s.parse().map_err(|_| bad())?),
            };
            bars.push(Bar {
                degree,
                birth,
                death,
            });
        }
        Ok(Self::new(bars))
    }
}

/// Number of bars whose closed interval `[birth, death]` meets `[a, b]`.
pub fn count_bars(diagram: &PersistenceDiagram, a: f64, b: f64) -> Result<usize> {
    if !(a < b) {
        return Err(Error::Argument(format!("window [{a}, {b}] is empty")));
    }
    Ok(diagram
        .bars
        .iter()
        .filter(|bar| bar.birth <= b && bar.death.value() >= a)
        .count())
}

/// `Σ_j (−1)^j #{degree-j bars with birth ≤ r < death}`.
pub fn euler_characteristic(diagram: &PersistenceDiagram, r: f64) -> i64 {
    diagram
        .bars
        .iter()
        .filter(|b| b.alive_at(r))
        .map(|b| if b.degree % 2 == 0 { 1 } else { -1 })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> PersistenceDiagram {
        PersistenceDiagram::new(vec![Bar::infinite(0, 0.0), Bar::finite(0, 1.0, 2.0)])
    }

    #[test]
    fn json_format() {
        let json = serde_json::to_string(&example()).unwrap();
        assert_eq!(
            json,
            r#"[{"dim":0,"birth":0.0,"death":"inf"},{"dim":0,"birth":1.0,"death":2.0}]"#
        );
        let back: PersistenceDiagram = serde_json::from_str(&json).unwrap();
        assert_eq!(back, example());
    }

    #[test]
    fn text_format() {
        let text = example().to_text();
        assert_eq!(text, "0 0 inf\n0 1 2\n");
        assert_eq!(PersistenceDiagram::from_text(&text).unwrap(), example());
        assert!(PersistenceDiagram::from_text("0 1").is_err());
    }

    #[test]
    fn counting() {
        let empty = PersistenceDiagram::default();
        assert_eq!(count_bars(&empty, 0.0, 1.0).unwrap(), 0);
        let one = PersistenceDiagram::new(vec![Bar::infinite(0, 0.0)]);
        assert_eq!(count_bars(&one, 5.0, 6.0).unwrap(), 1);
        let two = PersistenceDiagram::new(vec![Bar::finite(0, 0.0, 1.0), Bar::finite(0, 2.0, 3.0)]);
        assert_eq!(count_bars(&two, 1.5, 1.8).unwrap(), 0);
        assert_eq!(count_bars(&two, 1.0, 2.0).unwrap(), 2);
        assert!(count_bars(&two, 1.0, 1.0).is_err());
    }

    #[test]
    fn euler() {
        assert_eq!(euler_characteristic(&example(), 1.5), 2);
        assert_eq!(euler_characteristic(&example(), 2.0), 1);
        assert_eq!(euler_characteristic(&PersistenceDiagram::default(), 0.0), 0);
        let with_loop =
            PersistenceDiagram::new(vec![Bar::infinite(0, 0.0), Bar::finite(1, 0.5, 1.0)]);
        assert_eq!(euler_characteristic(&with_loop, 0.7), 0);
    }

    #[test]
    fn multiset_equality_ignores_order() {
        let mut reversed = example();
        reversed.bars.reverse();
        assert!(reversed.same_bars(&example()));
        assert!(!reversed.same_bars(&PersistenceDiagram::default()));
    }
}
