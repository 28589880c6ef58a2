//! States that real quantum theory can tell apart only globally, and the
//! family of operationally independent but entangled-looking Caves states.
//!
//! `ρ = I/2 ⊗ |0⟩⟨0|` is a real state and also `½Γ(|0⟩⟨0|)`. Two copies can
//! be joined by the Kronecker product (`Ψᴷ`) or by the R-product (`Ψᴿ`).
//! No pair of local measurements separates them, yet the global POVM
//! `E_ω = ½ 1 + ½(−1)^ω (J⊗1)⊗(J⊗1)` gives `(½, ½)` on `Ψᴷ` and `(0, 1)` on
//! `Ψᴿ`. A complex model would have to assign both preparations the same
//! state, so it cannot reproduce that outcome.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::embedding::{merge_pairs, r_product, unit_i, unit_j};
use crate::error::{Error, Result};
use crate::matrix::{
    kron, local_basis, partial_trace, trace_of_product, validate, ComplexOperator, FactorShape,
    Operator, Povm, RealOperator,
};
use crate::network::{check_independence, IndependenceVerdict};
use crate::random;

fn ket0_projector() -> RealOperator {
    Operator::from_row_slice(&[2], &[1.0, 0.0, 0.0, 0.0]).expect("2x2")
}

/// `ρ = I/2 ⊗ |0⟩⟨0|` with factors (phase, data).
fn single() -> RealOperator {
    kron(&unit_i().scale_real(0.5), &ket0_projector()).expect("small")
}

/// `(Ψᴷ, Ψᴿ)`, each on two 4-dimensional parties X and Y.
pub fn build_witness_states() -> Result<(RealOperator, RealOperator)> {
    let rho = single();
    let psi_k = kron(&rho, &rho)?;
    let psi_r = r_product(&rho, 1, &rho, 1)?.scale_real(2.0);
    Ok((merge_pairs(&psi_k, 2)?, merge_pairs(&psi_r, 2)?))
}

/// Two-outcome global POVM `E_ω = ½(1 + (−1)^ω (J⊗1)_X ⊗ (J⊗1)_Y)`.
pub fn global_witness_povm() -> Result<Povm<f64>> {
    let id2 = RealOperator::identity(FactorShape::new(vec![2])?)?;
    let jx = kron(&unit_j(), &id2)?.with_shape(&[4])?;
    let jj = kron(&jx, &jx)?;
    let one = RealOperator::identity(FactorShape::new(vec![4, 4])?)?;
    let effects = [1.0, -1.0]
        .iter()
        .map(|s| (&one + &jj.scale_real(*s)).scale_real(0.5))
        .collect();
    Ok(Povm::new(effects))
}

/// `½|+i,0⟩⟨+i,0|⊗² + ½|−i,0⟩⟨−i,0|⊗²` with `|±i⟩⟨±i| = (I ± iJ)/2`.
pub fn separable_decomposition() -> Result<ComplexOperator> {
    let p0 = ket0_projector().to_complex();
    let i = unit_i().to_complex();
    let j = unit_j().to_complex();
    let mut acc: Option<ComplexOperator> = None;
    for s in [1.0, -1.0] {
        let phase = (&i + &j.scale(Complex64::new(0.0, s))).scale_real(0.5);
        let local = kron(&phase, &p0)?;
        let term = kron(&local, &local)?.scale_real(0.5);
        acc = Some(match acc {
            None => term,
            Some(a) => &a + &term,
        });
    }
    acc.expect("two terms").with_shape(&[4, 4])
}

/// The two states and the global POVM, as stored in witness files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessInstance {
    pub psi_k: RealOperator,
    pub psi_r: RealOperator,
    pub povm: Povm<f64>,
}

impl WitnessInstance {
    pub fn standard() -> Result<Self> {
        let (psi_k, psi_r) = build_witness_states()?;
        Ok(WitnessInstance {
            psi_k,
            psi_r,
            povm: global_witness_povm()?,
        })
    }
}

/// Expected `E_ω` statistics on `Ψᴷ`.
pub const KRONECKER_EXPECTED: [f64; 2] = [0.5, 0.5];
/// Expected `E_ω` statistics on `Ψᴿ`.
pub const R_PRODUCT_EXPECTED: [f64; 2] = [0.0, 1.0];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub tol: f64,
    /// Largest `|Tr[Ψᴷ(S_i⊗S_j)] − Tr[Ψᴿ(S_i⊗S_j)]|` over local basis pairs.
    pub local_max_deviation: f64,
    pub local_pairs: usize,
    /// `[Tr Ψᴷ E_0, Tr Ψᴷ E_1]`
    pub kronecker_probabilities: [f64; 2],
    /// `[Tr Ψᴿ E_0, Tr Ψᴿ E_1]`
    pub r_product_probabilities: [f64; 2],
    /// Largest distance of the global statistics to `(½, ½)` and `(0, 1)`.
    pub global_deviation: f64,
    pub total_variation: f64,
    /// `‖Ψᴷ − Ψᴿ‖_F`
    pub state_distance: f64,
    /// `‖Ψᴿ − Tr_Y Ψᴿ ⊗ Tr_X Ψᴿ‖_F`
    pub r_product_marginal_distance: f64,
    /// Distance of `Ψᴿ`, read as a complex matrix, to its separable form.
    pub separable_decomposition_distance: f64,
    pub locally_indistinguishable: bool,
    pub globally_distinguishable: bool,
    pub passes: bool,
    pub statement: String,
}

/// Runs the local sweep and the global test on the standard instance.
pub fn run_witness(tol: f64) -> Result<WitnessReport> {
    evaluate_witness(&WitnessInstance::standard()?, tol)
}

/// Local sweep over symmetric basis pairs plus the global POVM statistics.
/// Passes iff the local deviation and the distance of the global statistics
/// to their expected values are both `≤ tol`.
pub fn evaluate_witness(w: &WitnessInstance, tol: f64) -> Result<WitnessReport> {
    let (psi_k, psi_r) = (&w.psi_k, &w.psi_r);
    let validity_tol = tol.max(1e-12);
    for (name, s) in [("Ψᴷ", psi_k), ("Ψᴿ", psi_r)] {
        if s.row_shape().dims() != [4, 4] || !s.is_square() {
            return Err(Error::Precondition(format!(
                "{name} must act on two 4-dimensional parties"
            )));
        }
        let r = validate(s, validity_tol);
        if !r.is_valid() {
            return Err(Error::EmbeddingValidation(format!("{name}: {r}")));
        }
    }
    let r = validate(&w.povm, validity_tol);
    if w.povm.effects.len() != 2 || !r.is_valid() {
        return Err(Error::EmbeddingValidation(format!("witness POVM: {r}")));
    }
    let basis = local_basis::<f64>(4);
    let mut local_max_deviation = 0.0f64;
    for s in &basis {
        for t in &basis {
            let st = kron(s, t)?;
            local_max_deviation = local_max_deviation
                .max((trace_of_product(psi_k, &st) - trace_of_product(psi_r, &st)).abs());
        }
    }
    let probs = |state: &RealOperator| {
        [
            trace_of_product(state, &w.povm.effects[0]),
            trace_of_product(state, &w.povm.effects[1]),
        ]
    };
    let pk = probs(psi_k);
    let pr = probs(psi_r);
    let global_deviation = (0..2)
        .map(|o| {
            (pk[o] - KRONECKER_EXPECTED[o])
                .abs()
                .max((pr[o] - R_PRODUCT_EXPECTED[o]).abs())
        })
        .fold(0.0, f64::max);
    let total_variation = 0.5 * ((pk[0] - pr[0]).abs() + (pk[1] - pr[1]).abs());
    let marginals = kron(&partial_trace(psi_r, &[0])?, &partial_trace(psi_r, &[1])?)?;
    let separable_decomposition_distance = separable_decomposition()?.distance(&psi_r.to_complex());
    let locally_indistinguishable = local_max_deviation <= tol;
    let globally_distinguishable = total_variation > tol;
    let passes = locally_indistinguishable && global_deviation <= tol;
    let statement = if locally_indistinguishable && globally_distinguishable {
        format!(
            "Every local measurement gives identical statistics on both states (max deviation {local_max_deviation:.1e}), \
             so any complex-quantum model must describe them by one state; the global POVM separates them with \
             total-variation distance {total_variation:.6}, which no such model can reproduce."
        )
    } else {
        "The witness did not separate local and global statistics at this tolerance.".to_string()
    };
    Ok(WitnessReport {
        tol,
        local_max_deviation,
        local_pairs: basis.len() * basis.len(),
        kronecker_probabilities: pk,
        r_product_probabilities: pr,
        global_deviation,
        total_variation,
        state_distance: psi_k.distance(psi_r),
        r_product_marginal_distance: psi_r.distance(&marginals),
        separable_decomposition_distance,
        locally_indistinguishable,
        globally_distinguishable,
        passes,
        statement,
    })
}

/// `¼(I⊗I − α J⊗J)` on two real qubits, with its independence verdict.
pub fn caves_state(alpha: f64, tol: f64) -> Result<(RealOperator, IndependenceVerdict)> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::OutOfRange(format!(
            "alpha = {alpha} is outside [0, 1]"
        )));
    }
    let state = (&kron(&unit_i(), &unit_i())? - &kron(&unit_j(), &unit_j())?.scale_real(alpha))
        .scale_real(0.25);
    let verdict = check_independence(&state, &[vec![0], vec![1]], tol)?;
    Ok((state, verdict))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CavesReport {
    pub alpha: f64,
    pub verdict: IndependenceVerdict,
    /// Largest `|Tr[state (A⊗B)] − ½Tr[A]·½Tr[B]|` over random real POVM pairs.
    pub formula_deviation: f64,
    pub trials: usize,
}

/// Caves state at `alpha` plus a random-POVM check of the factorized
/// statistics `p(a, b) = ½Tr[A_a]·½Tr[B_b]`.
pub fn caves_report<R: Rng + ?Sized>(
    rng: &mut R,
    alpha: f64,
    trials: usize,
    tol: f64,
) -> Result<CavesReport> {
    let (state, verdict) = caves_state(alpha, tol)?;
    let qubit = FactorShape::new(vec![2])?;
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let a = random::real_povm(rng, &qubit, 2);
        let b = random::real_povm(rng, &qubit, 3);
        for ea in &a.effects {
            for eb in &b.effects {
                let p = trace_of_product(&state, &kron(ea, eb)?);
                worst = worst.max((p - 0.25 * ea.trace() * eb.trace()).abs());
            }
        }
    }
    Ok(CavesReport {
        alpha,
        verdict,
        formula_deviation: worst,
        trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn witness_states_have_unit_trace_and_differ() {
        let (k, r) = build_witness_states().unwrap();
        assert!((k.trace() - 1.0).abs() < 1e-15);
        assert!((r.trace() - 1.0).abs() < 1e-15);
        assert!(k.distance(&r) > 0.1);
    }

    #[test]
    fn r_product_state_has_explicit_form() {
        // (I/2⊗P₀)⊗(I/2⊗P₀) − (J/2⊗P₀)⊗(J/2⊗P₀)
        let p0 = ket0_projector();
        let a = kron(&unit_i().scale_real(0.5), &p0).unwrap();
        let b = kron(&unit_j().scale_real(0.5), &p0).unwrap();
        let explicit = (&kron(&a, &a).unwrap() - &kron(&b, &b).unwrap())
            .with_shape(&[4, 4])
            .unwrap();
        let (_, r) = build_witness_states().unwrap();
        assert!(r.max_abs_diff(&explicit) < 1e-15);
    }

    #[test]
    fn global_povm_is_valid() {
        let p = global_witness_povm().unwrap();
        assert!(validate(&p, 1e-12).is_valid());
        assert!(p.effects.iter().all(|e| e.distance(&e.transpose()) == 0.0));
    }

    #[test]
    fn caves_zero_is_maximally_mixed() {
        let (s, v) = caves_state(0.0, 1e-9).unwrap();
        let id = RealOperator::identity(FactorShape::new(vec![2, 2]).unwrap())
            .unwrap()
            .scale_real(0.25);
        assert_eq!(s, id);
        assert!(v.product_state && v.operational);
        assert!(caves_state(1.5, 1e-9).is_err());
    }
}
