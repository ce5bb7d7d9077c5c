#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop, clippy::manual_is_multiple_of)]
//! Poincaré-type inequalities on the discrete cube {-1,1}^n and on the CAR
//! algebra, realized as exact operators plus numerical instance checks.
//!
//! Points of the cube are n-bit masks: bit `j-1` set means `x_j = -1`, so
//! mask 0 is the all-ones point. Subsets `A ⊆ {1..n}` use the same encoding.
//! Operator traces are always the normalized trace `τ_n(Id) = 1`.

pub mod car;
pub mod cube;
pub mod error;
pub mod matrix;
pub mod norms;
pub mod par;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

/// Subsets of `{1..n}` and points of the cube share this bitmask encoding.
pub type Mask = usize;

pub(crate) fn bit(j: usize) -> Mask {
    1 << (j - 1)
}
