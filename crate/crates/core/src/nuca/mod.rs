//! Linear non-uniform cellular automata: specs, configurations, simulation.

pub mod config;
pub mod lattice;
pub mod rule;
pub mod spec;
pub mod step;
pub mod transform;

pub use config::{pairing, PatternConfig};
pub use lattice::{cube, sumset, symmetrize, Point};
pub use rule::{LocalRule, RuleKind, TABLE_CAP};
pub use spec::{shift_spec, ClusterType, NucaSpec, Placement, SparseSpec, MEMORY_CAP};
pub use step::{apply_step, apply_steps, induced_map, window_matrix, InducedBody, InducedMap};
pub use transform::{compose, dual_spec, power_spec};

/// `(g·x)(h) = x(h − g)`.
pub fn shift_config(x: &PatternConfig, g: &Point) -> PatternConfig {
    x.shift(g)
}
