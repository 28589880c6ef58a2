use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::phase::{j_at_slot, phase_rep, unit_i, unit_j};
use crate::error::{Error, Result};
use crate::matrix::{
    inverse_permutation, kron, permute_factors, ComplexOperator, FactorShape, RealOperator,
};

/// Standard mapping `Γ(A) = I⊗Re A + J⊗Im A`. The result gains a leading
/// 2-dimensional phase factor on both row and column sides.
pub fn gamma(a: &ComplexOperator) -> Result<RealOperator> {
    let re = a.real_part();
    let im = a.imag_part();
    Ok(&kron(&unit_i(), &re)? + &kron(&unit_j(), &im)?)
}

/// Factor ordering of an `n`-fold image.
///
/// The canonical layout is interleaved: party `i` occupies the adjacent pair
/// of factors `(2_i, d_i)`. The gathered layout puts all phase factors first,
/// `(2_1, …, 2_n, d_1, …, d_n)`. `to_gathered[k]` is the interleaved factor
/// placed at gathered position `k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingConvention {
    pub folds: usize,
    pub to_gathered: Vec<usize>,
}

impl EmbeddingConvention {
    pub fn new(folds: usize) -> Self {
        let to_gathered = (0..folds)
            .map(|k| 2 * k)
            .chain((0..folds).map(|k| 2 * k + 1))
            .collect();
        EmbeddingConvention { folds, to_gathered }
    }

    pub fn to_interleaved(&self) -> Vec<usize> {
        inverse_permutation(&self.to_gathered)
    }

    /// Reorders an interleaved operator into the gathered layout.
    pub fn gather(&self, op: &RealOperator) -> Result<RealOperator> {
        permute_factors(op, &self.to_gathered)
    }

    /// Reorders a gathered operator into the interleaved layout.
    pub fn interleave(&self, op: &RealOperator) -> Result<RealOperator> {
        permute_factors(op, &self.to_interleaved())
    }
}

/// Result of [`gamma_n`]: the interleaved operator and its convention.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaImage {
    pub op: RealOperator,
    pub convention: EmbeddingConvention,
}

impl GammaImage {
    /// The same operator in the gathered layout.
    pub fn gathered(&self) -> RealOperator {
        self.convention
            .gather(&self.op)
            .expect("convention matches its own image")
    }
}

fn phase_shape(n: usize) -> FactorShape {
    FactorShape::new(vec![2; n]).expect("positive")
}

/// `n`-fold mapping `Γ̄⁽ⁿ⁾(A) ≅ I⁽ⁿ⁾⊗Re A + J⁽ⁿ⁾⊗Im A`, one phase factor per
/// factor of `a`, in the interleaved layout.
pub fn gamma_n(a: &ComplexOperator, n: usize) -> Result<GammaImage> {
    if a.row_shape().len() != n || a.col_shape().len() != n {
        return Err(Error::FactorCount {
            expected: n,
            found: a.row_shape().len(),
        });
    }
    let rep = phase_rep(n)?;
    let gathered = &kron(&rep.i_mat, &a.real_part())? + &kron(&rep.j_mat, &a.imag_part())?;
    let convention = EmbeddingConvention::new(n);
    let op = convention.interleave(&gathered)?;
    Ok(GammaImage { op, convention })
}

/// Data dims of an interleaved shape with `n` folds; errors unless the shape
/// is exactly `(2, d_1, …, 2, d_n)`.
pub fn data_dims(shape: &FactorShape, n: usize) -> Result<FactorShape> {
    let dims = shape.dims();
    if n == 0 || dims.len() != 2 * n {
        return Err(Error::FoldMismatch(format!(
            "{n} folds need {} factors, shape is {shape}",
            2 * n
        )));
    }
    if let Some(k) = (0..n).find(|k| dims[2 * k] != 2) {
        return Err(Error::FoldMismatch(format!(
            "factor {} of {shape} should be a 2-dim phase factor",
            2 * k
        )));
    }
    FactorShape::new((0..n).map(|k| dims[2 * k + 1]).collect())
}

/// `m ⊗ 1_d` for a phase-space operator `m` on `n` factors, interleaved.
pub fn pad_phase(m: &RealOperator, n: usize, data: &FactorShape) -> Result<RealOperator> {
    if data.len() != n {
        return Err(Error::FactorCount {
            expected: n,
            found: data.len(),
        });
    }
    let phase = m.reshape(phase_shape(n), phase_shape(n))?;
    let gathered = kron(&phase, &RealOperator::identity(data.clone())?)?;
    EmbeddingConvention::new(n).interleave(&gathered)
}

/// `I⁽ⁿ⁾_d`: the phase projector padded on the data dims, interleaved.
pub fn phase_projector(n: usize, data: &FactorShape) -> Result<RealOperator> {
    pad_phase(&phase_rep(n)?.i_mat, n, data)
}

/// `J⁽ⁿ⁾_d`: the delocalized complex structure padded on the data dims.
pub fn phase_unit(n: usize, data: &FactorShape) -> Result<RealOperator> {
    pad_phase(&phase_rep(n)?.j_mat, n, data)
}

/// Block projections of a gathered operator with `n` phase factors onto the
/// `I⁽ⁿ⁾` and `J⁽ⁿ⁾` directions: returns `(½Tr₂[(I⁽ⁿ⁾⊗1)X], ½Tr₂[(J⁽ⁿ⁾ᵀ⊗1)X])`.
pub(crate) fn phase_components(
    x: &RealOperator,
    n: usize,
    rows: &FactorShape,
    cols: &FactorShape,
) -> Result<(RealOperator, RealOperator)> {
    let rep = phase_rep(n)?;
    let p = 1usize << n;
    let (dr, dc) = (rows.total(), cols.total());
    let mut re = DMatrix::<f64>::zeros(dr, dc);
    let mut im = DMatrix::<f64>::zeros(dr, dc);
    let xm = x.matrix();
    for a in 0..p {
        for b in 0..p {
            // Tr[(M⊗1) X] picks M[b,a] against block X[a,b]
            let wi = rep.i_mat.get(b, a);
            let wj = rep.j_mat.get(a, b);
            if wi == 0.0 && wj == 0.0 {
                continue;
            }
            for r in 0..dr {
                for c in 0..dc {
                    let v = xm[(a * dr + r, b * dc + c)];
                    re[(r, c)] += 0.5 * wi * v;
                    im[(r, c)] += 0.5 * wj * v;
                }
            }
        }
    }
    Ok((
        RealOperator::rect(rows.clone(), cols.clone(), re)?,
        RealOperator::rect(rows.clone(), cols.clone(), im)?,
    ))
}

/// Relocalisation `τ⁽ⁿ⁾_j`: projects the phase content of `a` onto the
/// `(I⁽ⁿ⁾, J⁽ⁿ⁾)` directions and re-expresses it with the identity on every
/// phase factor and a single `J` at slot `j` (1-based).
///
/// The `J` direction is extracted with the transpose of `J⁽ⁿ⁾` (the
/// Frobenius-dual direction), so that `τ∘Γ̄(A) = 1⊗Re A + J_j⊗Im A`.
pub fn relocalise(a: &RealOperator, n: usize, j: usize) -> Result<RealOperator> {
    if j < 1 || j > n {
        return Err(Error::OutOfRange(format!("slot {j} outside 1..={n}")));
    }
    let rows = data_dims(a.row_shape(), n)?;
    let cols = data_dims(a.col_shape(), n)?;
    let convention = EmbeddingConvention::new(n);
    let x = convention.gather(a)?;
    let (re, im) = phase_components(&x, n, &rows, &cols)?;
    let ident = RealOperator::identity(phase_shape(n))?;
    let gathered = &kron(&ident, &re)? + &kron(&j_at_slot(n, j)?, &im)?;
    convention.interleave(&gathered)
}

/// `τ⁽ⁿ⁾_1 ∘ Γ̄⁽ⁿ⁾`, with `n` the factor count of `a`. This is the lift used
/// for effects, Kraus operators and instrument operators.
pub fn local_gamma(a: &ComplexOperator) -> Result<RealOperator> {
    let n = a.row_shape().len();
    relocalise(&gamma_n(a, n)?.op, n, 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn gamma_of_i_is_j() {
        let i = ComplexOperator::from_row_slice(&[1], &[c(0.0, 1.0)]).unwrap();
        let g = gamma(&i).unwrap();
        assert_eq!(g.matrix(), unit_j().matrix());
        assert_eq!(g.shape().dims(), &[2, 1]);
    }

    #[test]
    fn gamma_of_identity_is_identity() {
        let id = ComplexOperator::identity(FactorShape::new(vec![3]).unwrap()).unwrap();
        let g = gamma(&id).unwrap();
        assert_eq!(g.matrix(), &DMatrix::<f64>::identity(6, 6));
    }

    #[test]
    fn convention_round_trip() {
        for n in 1..6 {
            let cv = EmbeddingConvention::new(n);
            let inv = cv.to_interleaved();
            for (k, &g) in inv.iter().enumerate() {
                assert_eq!(cv.to_gathered[g], k);
            }
        }
        assert_eq!(EmbeddingConvention::new(2).to_gathered, vec![0, 2, 1, 3]);
    }

    #[test]
    fn data_dims_checks() {
        let s = FactorShape::new(vec![2, 3, 2, 5]).unwrap();
        assert_eq!(data_dims(&s, 2).unwrap().dims(), &[3, 5]);
        assert!(data_dims(&s, 1).is_err());
        let bad = FactorShape::new(vec![3, 2]).unwrap();
        assert!(data_dims(&bad, 1).is_err());
    }

    #[test]
    fn relocalise_single_fold_is_identity_map() {
        let a = ComplexOperator::from_row_slice(
            &[2],
            &[c(1.0, 0.0), c(0.5, -0.25), c(0.3, 0.7), c(-1.0, 2.0)],
        )
        .unwrap();
        let g = gamma(&a).unwrap();
        let t = relocalise(&g, 1, 1).unwrap();
        assert!(t.max_abs_diff(&g) < 1e-15);
    }
}
