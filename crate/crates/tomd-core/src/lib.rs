//! Tucker-O-Minus decomposition (TOMD) and low-rank multi-view clustering.
//!
//! The crate is organised bottom-up:
//!
//! * [`tensor`] — dense N-way tensors, unfoldings, mode products and
//!   tensor-network contraction,
//! * [`linalg`] — the small dense kernels (SVD, least squares, symmetric
//!   eigensolver, SPD solve) every algorithm is built from,
//! * [`tomd`] — the TOMD format, its ALS fitting algorithm and storage
//!   accounting,
//! * [`baselines`] — Tucker-ALS, TuTR-ALS and Ominus-ALS comparison
//!   decompositions,
//! * [`mvc`] — the ADMM solver producing an affinity matrix from multi-view
//!   data,
//! * [`cluster`] — spectral clustering / k-means,
//! * [`metrics`] — the six clustering evaluation measures.
//!
//! Everything is `no_std` + `alloc`; all routines are deterministic given
//! their seeds.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod baselines;
pub mod cluster;
pub mod error;
pub mod linalg;
pub mod metrics;
pub mod mvc;
pub mod network;
pub mod tensor;
pub mod tomd;

pub use baselines::{
    ominus_als, ominus_reconstruct, tucker_als, tucker_reconstruct, tutr_als, tutr_reconstruct,
    BaselineRank, OminusFactors, TuckerFactors, TutrFactors,
};
pub use cluster::{kmeans, spectral_clustering, ClusterAssignment};
pub use error::{Error, Result};
pub use metrics::{evaluate, MetricReport, NmiNorm};
pub use mvc::{admm_solve, affinity_from_z, AdmmConfig, AdmmState, MultiViewDataset};
pub use tensor::{rse, DenseTensor};
pub use tomd::{
    storage_cost, tomd_als, tomd_reconstruct, AlsConfig, TomdFactors, TomdRank,
};
