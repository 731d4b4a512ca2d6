//! Placement of a single aerial access point over a venue with buildings.
//!
//! Pipeline: a [`scenario::Scenario`] gives users, demands and prisms;
//! [`region`] turns demands into coverage spheres and keeps the lattice
//! points covering the largest user subset; [`pso`] searches those points for
//! the highest demand-capped throughput, with line of sight decided by
//! [`geometry`]. [`oracle`] holds brute-force references used for checking.

pub mod bench;
pub mod cli;
pub mod geometry;
pub mod oracle;
pub mod pipeline;
pub mod point;
pub mod pso;
pub mod radio;
pub mod region;
pub mod scenario;

pub use pipeline::{run, Error, PipelineConfig, Run};
pub use point::{Point3, Vec3};
