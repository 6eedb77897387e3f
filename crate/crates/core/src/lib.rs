//! Transposition mirror construction for multi-quasihomogeneous Calabi-Yau
//! complete intersections, carried out in exact rational arithmetic.

pub mod ci_model;
pub mod error;
pub mod horn_system;
pub mod mellin;
pub mod nef_partition;
pub mod pipeline;
pub mod poincare;
pub mod transposition;
pub mod rational_linalg;

pub use error::{Error, Result};
pub use rational_linalg::{PermutationMap, Rational, RationalMatrix};
