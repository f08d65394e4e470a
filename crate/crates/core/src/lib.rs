#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod disjoint;
pub mod error;
pub mod extremal;
pub mod geometry;
mod linalg;
pub mod lp;
pub mod robin;
mod search;
pub mod vk;

pub use error::{Error, Result};
pub use geometry::{ConvexBody, Face, FacePair, HPolytope, SupportBody, VPolytope};
pub use lp::{solve_lp, LinearProgram, LpSolution, LpStatus};

pub use nalgebra;
