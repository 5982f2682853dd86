//! Decision support for 2.5D pocket machining.
//!
//! Pockets are classified, split into tool zones by a dichotomy on cutter
//! diameter, and cleared with spiral or zigzag toolpaths whose real cycle
//! time is estimated by a feed-rate planner with acceleration, jerk and
//! per-axis corner limits.

pub mod advisor;
pub mod error;
pub mod geometry;
pub mod kinematics;
pub mod pocket;
pub mod report;
pub mod selection;
pub mod toolpath;

pub use error::{Error, ErrorCategory, Result};
