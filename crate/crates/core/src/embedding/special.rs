use serde::{Deserialize, Serialize};

use super::gamma::{data_dims, gamma_n, phase_components, phase_projector, EmbeddingConvention};
use crate::error::{Error, Result};
use crate::matrix::{kron, ComplexOperator, RealOperator};

/// `A ⊗_R B = I⁽ʲ⁺ᵏ⁾_{d_A d_B} (A ⊗ B) I⁽ʲ⁺ᵏ⁾_{d_A d_B}` for interleaved
/// operators carrying `j` and `k` phase factors respectively.
pub fn r_product(a: &RealOperator, j: usize, b: &RealOperator, k: usize) -> Result<RealOperator> {
    let rows = data_dims(a.row_shape(), j)?.concat(&data_dims(b.row_shape(), k)?);
    let cols = data_dims(a.col_shape(), j)?.concat(&data_dims(b.col_shape(), k)?);
    let ab = kron(a, b)?;
    let left = phase_projector(j + k, &rows)?;
    let right = if rows == cols {
        left.clone()
    } else {
        phase_projector(j + k, &cols)?
    };
    Ok(&(&left * &ab) * &right)
}

/// Evidence that an operator is (or is not) special symmetric with respect
/// to a reference complex structure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpecialSymmetricCert {
    pub subject: RealOperator,
    pub j_ref: RealOperator,
    /// `‖a − aᵀ‖_F`
    pub symmetry_defect: f64,
    /// `‖j·a − a·j‖_F`
    pub commutation_defect: f64,
    pub tol: f64,
}

impl SpecialSymmetricCert {
    fn bound(&self) -> f64 {
        self.tol * self.subject.frobenius_norm().max(f64::MIN_POSITIVE)
    }

    pub fn symmetric(&self) -> bool {
        self.symmetry_defect <= self.bound()
    }

    pub fn commutes(&self) -> bool {
        self.commutation_defect <= self.bound()
    }

    pub fn is_valid(&self) -> bool {
        self.symmetric() && self.commutes()
    }
}

pub fn is_special_symmetric(
    a: &RealOperator,
    j_ref: &RealOperator,
    tol: f64,
) -> Result<SpecialSymmetricCert> {
    let n = a.nrows();
    if a.ncols() != n || j_ref.nrows() != n || j_ref.ncols() != n {
        return Err(Error::SizeMismatch(format!(
            "operator {}x{} against reference {}x{}",
            a.nrows(),
            a.ncols(),
            j_ref.nrows(),
            j_ref.ncols()
        )));
    }
    let symmetry_defect = a.distance(&a.transpose());
    let ja = j_ref.matrix() * a.matrix();
    let aj = a.matrix() * j_ref.matrix();
    let commutation_defect = (ja - aj).norm();
    Ok(SpecialSymmetricCert {
        subject: a.clone(),
        j_ref: j_ref.clone(),
        symmetry_defect,
        commutation_defect,
        tol,
    })
}

/// Inverse of `Γ̄⁽ⁿ⁾` by orthogonal projection onto the `I⁽ⁿ⁾`/`J⁽ⁿ⁾` blocks.
///
/// Accepts any operator in the image of `Γ̄⁽ⁿ⁾` (Hermitian preimages give
/// special symmetric operators, but `J_d = Γ(i·1)` is in the image too).
/// Errors when `r` lies farther than `tol·‖r‖_F` from that image.
pub fn inverse_gamma(r: &RealOperator, n: usize, tol: f64) -> Result<ComplexOperator> {
    let rows = data_dims(r.row_shape(), n)?;
    let cols = data_dims(r.col_shape(), n)?;
    let gathered = EmbeddingConvention::new(n).gather(r)?;
    let (re, im) = phase_components(&gathered, n, &rows, &cols)?;
    let a = ComplexOperator::from_parts(&re, &im)?;
    let back = gamma_n(&a, n)?.op;
    let residual = back.distance(r);
    if residual > tol * r.frobenius_norm().max(f64::MIN_POSITIVE) {
        return Err(Error::Precondition(format!(
            "operator is {residual:.3e} away from the image of the {n}-fold mapping"
        )));
    }
    Ok(a)
}
