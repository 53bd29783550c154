//! Named benchmark presets: per-dataset (μ, K) pairs plus the shared
//! default rank, clamped to whatever extents the reshaped tensor has.

use tomd_core::TomdRank;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    /// Adaptive-neighbor count K.
    pub k_neighbors: usize,
    /// Graph-regularization weight μ.
    pub mu: f64,
}

pub const PRESETS: &[Preset] = &[
    Preset { name: "yale", k_neighbors: 10, mu: 1.0 },
    Preset { name: "msrcv1", k_neighbors: 5, mu: 50.0 },
    Preset { name: "extendyaleb", k_neighbors: 15, mu: 50.0 },
    Preset { name: "orl", k_neighbors: 10, mu: 30.0 },
    Preset { name: "reuters", k_neighbors: 20, mu: 50.0 },
    Preset { name: "handwritten", k_neighbors: 20, mu: 40.0 },
];

/// Look up a preset by case-insensitive name.
pub fn preset(name: &str) -> Option<Preset> {
    let lower = name.to_ascii_lowercase();
    PRESETS.iter().copied().find(|p| p.name == lower)
}

/// The default clustering rank (30, 15, 11, V | 4,4,4,4,4,4) for a reshaped
/// self-representation tensor of shape (N₁, N₂, N₃, V), with each Rₙ clamped
/// to its mode extent so the rank stays valid on small datasets.
pub fn default_cluster_rank(shape: [usize; 4]) -> TomdRank {
    let want = [30, 15, 11, shape[3]];
    let r = core::array::from_fn(|n| want[n].min(shape[n]));
    TomdRank::new(r, [4; 6])
}
