//! Exact determinants and hyperbolic volume bounds for alternating links.
//!
//! The crate is organised bottom-up:
//!
//! * [`hypvol`]: Lobachevsky function, bipyramid volumes, volume bounds and constants.
//! * [`multigraph`]: loop-and-multi-edge graphs and exact spanning-tree counts.
//! * [`diagram`]: PD codes, faces, checkerboard graphs and twist regions.
//! * [`families`]: 2-bridge links, alternating 3-braids, pretzels and weaving 4-braids.
//! * [`verify`]: compares `2π log det` against the volume bounds, sweeps and enumeration.

pub mod diagram;
pub mod error;
pub mod families;
pub mod hypvol;
pub mod multigraph;
pub mod verify;

pub use error::{Error, Result};
