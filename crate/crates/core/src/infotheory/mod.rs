//! Exact information measures on explicit probability tables.
//!
//! Everything is in nats. Tables are small by construction (the checks in
//! [`crate::lemma_lab`] enumerate them exhaustively), so every quantity here
//! is computed by direct summation rather than estimated.

mod closed_form;
mod discrepancy;
mod discrete;
mod gaussian;

pub use closed_form::{binary_entropy, entropy_upper_bound, q_alpha};
pub use discrepancy::{discrepancy, discrepancy_with, Discrepancy, FunctionClass, LossKind};
pub use discrete::{
    conditional_entropy, entropy, kl, mutual_info, total_correlation, Divergence, DiscreteJoint,
};
pub use gaussian::{gaussian_block_tc, gaussian_tc, GaussianSummary};

/// `x ln x` with the `0 ln 0 = 0` convention.
pub(crate) fn xlogx(x: f64) -> f64 {
    if x > 0.0 {
        x * x.ln()
    } else {
        0.0
    }
}
