//! Persistence diagrams of the image of `H(A_r) → H(B_r)` under the filtration `f`.

mod bottleneck;
mod diagram;
mod oracle;
mod reduction;

pub use bottleneck::bottleneck_distance;
pub use diagram::{count_bars, euler_characteristic, Bar, Death, PersistenceDiagram};
pub use oracle::{diagram_from_ranks, rank_oracle, ORACLE_CELL_LIMIT};
pub use reduction::{
    image_persistence, image_persistence_with, ordinary_persistence, ordinary_persistence_with,
    ReductionOptions,
};
