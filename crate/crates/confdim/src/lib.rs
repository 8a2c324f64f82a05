//! Combinatorial estimation of Ahlfors regular conformal dimension.
//!
//! The crate builds tree-parametrized cell families on concrete fractal
//! spaces, assigns weight functions to cells, derives visual pre-metrics and
//! resolution graphs from them, and runs convex p-energy / p-modulus sweeps
//! on refined horizontal networks to estimate conformal dimension.

pub mod geom;
pub mod tree;
pub mod partition;
pub mod weight;
pub mod visual;
pub mod resolution;
pub mod network;
pub mod energy;
pub mod dimension;
pub mod config;

pub use geom::{Point, Q, Rect};
pub use partition::{CellGeometry, FamilyKind, HoleModel, PartitionFamily, PointRef};
pub use tree::{Address, TreeShape};
