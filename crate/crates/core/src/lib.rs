//! Dominant-set clustering toolkit.
//!
//! Dominant sets generalize maximal cliques to edge-weighted graphs. A set of
//! vertices is dominant when every member is positively weighted with respect
//! to the rest of the set and every outsider would be negatively weighted if
//! added. Dominant sets correspond one-to-one with strict local maximizers of
//! `x'Ax` over the standard simplex, so clusters are found by running a game
//! dynamics and reading off the support of the fixed point.
//!
//! The crate is organized by capability:
//!
//! * [`types`]: affinity matrices, simplex vectors, index sets and clusters.
//! * [`dynamics`]: replicator and infection-immunization solvers.
//! * [`dsets`]: the combinatorial definition, peel-off enumeration and a
//!   brute-force oracle for small graphs.
//! * [`cdsc`]: constrained dominant sets and the localized fast solver.
//! * [`scod`]: simultaneous clustering and outlier detection.
//! * [`affinity`]: similarity construction (covariance descriptors, kernels,
//!   homogenization, co-association).
//! * [`assoc`]: neighbor selection, grouped track association and refinement.
//! * [`bench`]: synthetic data and clustering quality metrics.
//! * [`io`] and [`cli`]: file formats and the command-line surface.

pub mod affinity;
pub mod assoc;
pub mod bench;
pub mod cdsc;
pub mod cli;
pub mod dsets;
pub mod dynamics;
pub mod error;
pub mod io;
pub mod scod;
pub mod types;

pub use error::{Error, Result};
pub use types::{barycenter, quadratic_value, support, AffinityMatrix, BuildMode, Cluster, IndexSet, SimplexVector};
