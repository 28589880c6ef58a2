//! The complex-to-real embedding: `Γ`, `Γ̄⁽ⁿ⁾`, the phase representations
//! `I⁽ⁿ⁾`/`J⁽ⁿ⁾`, the R-product and the relocalisation map.
//!
//! Multi-fold images use the interleaved layout `(2_1, d_1, 2_2, d_2, …)`;
//! see [`EmbeddingConvention`] for the gathered view.

mod gamma;
mod phase;
mod special;
pub mod suite;

pub use gamma::{
    data_dims, gamma, gamma_n, local_gamma, pad_phase, phase_projector, phase_unit, relocalise,
    EmbeddingConvention, GammaImage,
};
pub use phase::{
    j_at_slot, phase_rep, phase_rep_closed_form, unit_i, unit_j, PhaseRep, MAX_CLOSED_FORM_FOLDS,
    MAX_FOLDS,
};
pub use special::{inverse_gamma, is_special_symmetric, r_product, SpecialSymmetricCert};

use crate::error::Result;
use crate::matrix::{ComplexOperator, FactorShape, RealOperator};

/// Merges each interleaved `(2, d)` pair into one factor of dimension `2d`,
/// giving one real factor per complex factor.
pub fn merge_pairs(op: &RealOperator, n: usize) -> Result<RealOperator> {
    let merge = |s: &FactorShape| -> Result<FactorShape> {
        let d = data_dims(s, n)?;
        FactorShape::new(d.dims().iter().map(|x| 2 * x).collect())
    };
    op.reshape(merge(op.row_shape())?, merge(op.col_shape())?)
}

/// Splits each factor of dimension `2d` back into the pair `(2, d)`.
pub fn split_pairs(op: &RealOperator) -> Result<RealOperator> {
    let split = |s: &FactorShape| -> Result<FactorShape> {
        let mut dims = Vec::with_capacity(2 * s.len());
        for &x in s.dims() {
            if x % 2 != 0 {
                return Err(crate::Error::FoldMismatch(format!(
                    "factor of dim {x} in {s} cannot carry a phase factor"
                )));
            }
            dims.push(2);
            dims.push(x / 2);
        }
        FactorShape::new(dims)
    };
    op.reshape(split(op.row_shape())?, split(op.col_shape())?)
}

/// `½Γ̄⁽ⁿ⁾(ρ)` with pairs merged: the real image of a complex state.
pub fn embed_state(rho: &ComplexOperator) -> Result<RealOperator> {
    let n = rho.shape().len();
    merge_pairs(&gamma_n(rho, n)?.op.scale_real(0.5), n)
}

/// `τ∘Γ̄⁽ⁿ⁾(A)` with pairs merged: the real image of an effect, Kraus
/// operator or instrument operator.
pub fn embed_operator(a: &ComplexOperator) -> Result<RealOperator> {
    let n = a.row_shape().len();
    merge_pairs(&local_gamma(a)?, n)
}
