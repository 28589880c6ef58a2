use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{kron, kron_all, FactorShape, RealOperator};

/// Largest fold count whose phase representation fits the side-length cap.
pub const MAX_FOLDS: usize = 12;

/// Largest fold count accepted by the closed-form oracle.
pub const MAX_CLOSED_FORM_FOLDS: usize = 8;

/// The 2×2 identity on one phase factor.
pub fn unit_i() -> RealOperator {
    RealOperator::from_row_slice(&[2], &[1.0, 0.0, 0.0, 1.0]).expect("2x2")
}

/// The 2×2 complex structure `J = [[0,-1],[1,0]]`.
pub fn unit_j() -> RealOperator {
    RealOperator::from_row_slice(&[2], &[0.0, -1.0, 1.0, 0.0]).expect("2x2")
}

/// Delocalized real representation `(I⁽ⁿ⁾, J⁽ⁿ⁾)` of `(1, i)` over `n`
/// phase factors of dimension 2.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseRep {
    pub n: usize,
    pub i_mat: RealOperator,
    pub j_mat: RealOperator,
}

static CACHE: [OnceLock<Arc<PhaseRep>>; MAX_FOLDS] = [const { OnceLock::new() }; MAX_FOLDS];

fn check_folds(n: usize, max: usize) -> Result<()> {
    if n < 1 || n > max {
        return Err(Error::OutOfRange(format!(
            "fold count {n} outside 1..={max}"
        )));
    }
    Ok(())
}

/// Phase representation for `n` folds via the recursion
/// `I⁽ⁿ⁾ = ½(I⁽ⁿ⁻¹⁾⊗I − J⁽ⁿ⁻¹⁾⊗J)`, `J⁽ⁿ⁾ = ½(J⁽ⁿ⁻¹⁾⊗I + I⁽ⁿ⁻¹⁾⊗J)`.
/// Results are memoized per `n`.
pub fn phase_rep(n: usize) -> Result<Arc<PhaseRep>> {
    check_folds(n, MAX_FOLDS)?;
    if let Some(hit) = CACHE[n - 1].get() {
        return Ok(hit.clone());
    }
    let rep = if n == 1 {
        PhaseRep {
            n,
            i_mat: unit_i(),
            j_mat: unit_j(),
        }
    } else {
        let prev = phase_rep(n - 1)?;
        let (i, j) = (unit_i(), unit_j());
        let i_mat = (&kron(&prev.i_mat, &i)? - &kron(&prev.j_mat, &j)?).scale_real(0.5);
        let j_mat = (&kron(&prev.j_mat, &i)? + &kron(&prev.i_mat, &j)?).scale_real(0.5);
        PhaseRep { n, i_mat, j_mat }
    };
    Ok(CACHE[n - 1].get_or_init(|| Arc::new(rep)).clone())
}

/// Independent oracle: the sum over words `J^{w_1}⊗…⊗J^{w_n}` with weight
/// `|w|`, even words signed by `(−1)^{|w|/2}` building `I⁽ⁿ⁾` and odd words
/// signed by `(−1)^{(|w|−1)/2}` building `J⁽ⁿ⁾`, both scaled by `2^{1−n}`.
pub fn phase_rep_closed_form(n: usize) -> Result<PhaseRep> {
    check_folds(n, MAX_CLOSED_FORM_FOLDS)?;
    let shape = FactorShape::new(vec![2; n])?;
    let mut i_mat = RealOperator::zeros(shape.clone())?;
    let mut j_mat = RealOperator::zeros(shape)?;
    let scale = 0.5f64.powi(n as i32 - 1);
    for word in 0u32..(1 << n) {
        let factors: Vec<RealOperator> = (0..n)
            .map(|k| {
                if word >> (n - 1 - k) & 1 == 1 {
                    unit_j()
                } else {
                    unit_i()
                }
            })
            .collect();
        let term = kron_all(&factors)?;
        let w = word.count_ones() as i32;
        if w % 2 == 0 {
            let sign = if (w / 2) % 2 == 0 { 1.0 } else { -1.0 };
            i_mat = &i_mat + &term.scale_real(sign * scale);
        } else {
            let sign = if ((w - 1) / 2) % 2 == 0 { 1.0 } else { -1.0 };
            j_mat = &j_mat + &term.scale_real(sign * scale);
        }
    }
    Ok(PhaseRep { n, i_mat, j_mat })
}

/// `I^{⊗(j−1)} ⊗ J ⊗ I^{⊗(n−j)}`: a single complex structure at slot `j`
/// (1-based) among `n` phase factors.
pub fn j_at_slot(n: usize, j: usize) -> Result<RealOperator> {
    if j < 1 || j > n {
        return Err(Error::OutOfRange(format!("slot {j} outside 1..={n}")));
    }
    let factors: Vec<RealOperator> = (1..=n)
        .map(|k| if k == j { unit_j() } else { unit_i() })
        .collect();
    kron_all(&factors)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_two_folds_match_definitions() {
        let p1 = phase_rep(1).unwrap();
        assert_eq!(p1.i_mat, unit_i());
        assert_eq!(p1.j_mat, unit_j());

        let p2 = phase_rep(2).unwrap();
        let (i, j) = (unit_i(), unit_j());
        let i2 = (&kron(&i, &i).unwrap() - &kron(&j, &j).unwrap()).scale_real(0.5);
        let j2 = (&kron(&j, &i).unwrap() + &kron(&i, &j).unwrap()).scale_real(0.5);
        assert_eq!(p2.i_mat, i2);
        assert_eq!(p2.j_mat, j2);
    }

    #[test]
    fn recursion_matches_closed_form_up_to_eight() {
        for n in 1..=MAX_CLOSED_FORM_FOLDS {
            let r = phase_rep(n).unwrap();
            let c = phase_rep_closed_form(n).unwrap();
            assert!(r.i_mat.max_abs_diff(&c.i_mat) < 1e-12, "I at n={n}");
            assert!(r.j_mat.max_abs_diff(&c.j_mat) < 1e-12, "J at n={n}");
        }
    }

    #[test]
    fn range_errors() {
        assert!(phase_rep(0).is_err());
        assert!(phase_rep(MAX_FOLDS + 1).is_err());
        assert!(phase_rep_closed_form(9).is_err());
        assert!(j_at_slot(3, 0).is_err());
        assert!(j_at_slot(3, 4).is_err());
    }

    #[test]
    fn four_fold_algebra() {
        let p = phase_rep_closed_form(4).unwrap();
        assert!((&p.i_mat * &p.i_mat).max_abs_diff(&p.i_mat) < 1e-12);
        assert!((&p.j_mat * &p.j_mat).max_abs_diff(&(-&p.i_mat)) < 1e-12);
    }

    #[test]
    fn traces() {
        for n in 1..=6 {
            let p = phase_rep(n).unwrap();
            assert!((p.i_mat.trace() - 2.0).abs() < 1e-12);
            assert!(p.j_mat.trace().abs() < 1e-12);
        }
    }
}
