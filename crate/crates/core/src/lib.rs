//! Close-Enough TSP solver built on the pair-center heuristic.
//!
//! A solve runs in three phases:
//!
//! 1. [`clustering::preprocess`] rotates the instance randomly and drops
//!    circles that contain another circle;
//! 2. [`clustering::build_tree`] merges closest pairs into proxy circles
//!    until a single cluster remains;
//! 3. [`construction::build_tour`] expands the hierarchy back into a closed
//!    tour, with energy-driven reinsertion and scheduled point
//!    reoptimization from [`local_opt`].
//!
//! [`solver::solve`] wires the phases together; [`io`] holds instance and
//! solution formats, generators, validation and SVG output.

pub mod clustering;
pub mod construction;
pub mod geometry;
pub mod io;
pub mod local_opt;
pub mod solver;
pub mod spatial_index;

mod error;

pub use error::Error;
pub use geometry::{Circle, Point2, Segment};
pub use io::{Instance, Solution};
pub use solver::{solve, SolveParams, SolveOutput};
