//! Congruence filtrations of `GL_n(Z_p)` at finite precision `p^m`.
//!
//! Level `i` is the kernel of reduction mod `p^i`, so `H = ker mod p` is
//! level 1. Its `p^j`-th power subgroup is level `j + 1`.

mod checks;
mod closure;
mod matrix;

pub use checks::{
    abelian_check, abelian_negative_control, base_level, enumerate_group, kernel_order, power_subgroup_check,
    quotient_exponent_check, shift_check, small_groups, CheckReport, Enumeration, PowerSubgroupReport,
};
pub use closure::{closed_subgroup_dimension, gl2_generators, sl2_generators, ClosureReport, DEFAULT_BUDGET};
pub use matrix::{ModMatrix, Precision, MAX_MODULUS};
