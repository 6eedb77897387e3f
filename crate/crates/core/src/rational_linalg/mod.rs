//! Exact rationals, dense rational matrices, permutations and small lattice helpers.

mod lattice;
mod matrix;
mod permutation;
mod rational;

pub use lattice::{gcd_all, integer_kernel, integer_kernel_of_row, lcm_all, primitive_integer_vector};
pub use matrix::{invert, solve, solve_least_pivot, RationalMatrix};
pub use permutation::PermutationMap;
pub use rational::{ParseRationalError, Rational};

use num_bigint::BigInt;

pub fn rank(m: &RationalMatrix) -> usize {
    m.rank()
}

pub fn lcm_of_denominators(m: &RationalMatrix) -> BigInt {
    m.lcm_of_denominators()
}
