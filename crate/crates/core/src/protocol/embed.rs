use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{
    simulate, ChannelOp, ComplexProtocol, InstrumentOp, Operation, RealProtocol, Step,
    DEGENERATE_EPSILON,
};
use crate::embedding::{embed_operator, embed_state};
use crate::error::{Error, Result};
use crate::matrix::{
    permutation_matrix, validate, FactorShape, KrausSet, RealOperator, ValidityReport,
};

fn embed_blocks(blocks: &[Vec<crate::matrix::ComplexOperator>]) -> Result<Vec<Vec<RealOperator>>> {
    blocks
        .iter()
        .map(|ops| ops.iter().map(embed_operator).collect())
        .collect()
}

/// Real counterpart of one step. Depends on nothing but the step itself:
/// every Kraus and measurement operator goes through `τ∘Γ̄` with one fold
/// per party of its block, routes and conditions are copied.
pub fn embed_step(step: &Step<Complex64>) -> Result<Step<f64>> {
    let op = match &step.op {
        Operation::Channel(c) => Operation::Channel(ChannelOp {
            partition: c.partition.clone(),
            blocks: embed_blocks(&c.blocks)?,
        }),
        Operation::Instrument(m) => Operation::Instrument(InstrumentOp {
            partition: m.partition.clone(),
            route: m.route.clone(),
            blocks: embed_blocks(&m.blocks)?,
        }),
    };
    Ok(Step {
        op,
        conditioned_on: step.conditioned_on.clone(),
    })
}

/// Orthogonal real routing operator for a factor permutation of parties
/// with complex dims `dims`: the permutation of the merged `(2, d)` factors.
/// Conjugating by it maps `½Γ̄⁽ⁿ⁾(ρ)` to `½Γ̄⁽ⁿ⁾(S ρ S†)`.
pub fn embed_route(perm: &[usize], dims: &[usize]) -> Result<RealOperator> {
    let merged = FactorShape::new(dims.iter().map(|d| 2 * d).collect())?;
    permutation_matrix(&merged, perm)
}

/// Validity of every embedded object.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolCertificate {
    pub tol: f64,
    pub validity: BTreeMap<String, ValidityReport>,
}

/// Embeds a complex protocol: `ρ⁽⁰⁾ ↦ ½Γ̄⁽ⁿ⁾(ρ⁽⁰⁾)` and every step through
/// [`embed_step`]. Fails if an embedded channel is not trace preserving or an
/// embedded instrument is not complete.
pub fn embed_protocol(
    qt: &ComplexProtocol,
    tol: f64,
) -> Result<(RealProtocol, ProtocolCertificate)> {
    qt.check(tol)?;
    let real = RealProtocol {
        initial_state: embed_state(&qt.initial_state)?,
        steps: qt.steps.iter().map(embed_step).collect::<Result<_>>()?,
    };
    let mut validity = BTreeMap::new();
    validity.insert(
        "initial state".to_string(),
        validate(&real.initial_state, tol),
    );
    for (i, step) in real.steps.iter().enumerate() {
        let (kind, blocks) = match &step.op {
            Operation::Channel(c) => ("channel", &c.blocks),
            Operation::Instrument(m) => ("instrument", &m.blocks),
        };
        for (b, ops) in blocks.iter().enumerate() {
            validity.insert(
                format!("step {i} {kind} block {b}"),
                validate(&KrausSet::channel(ops.clone()), tol),
            );
        }
    }
    if let Some((name, r)) = validity.iter().find(|(_, r)| !r.is_valid()) {
        return Err(Error::EmbeddingValidation(format!("{name}: {r}")));
    }
    Ok((real, ProtocolCertificate { tol, validity }))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchComparison {
    pub qt: f64,
    pub rqt: f64,
}

/// Branch-by-branch comparison of a protocol and its embedding.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolEquivalenceReport {
    pub tol: f64,
    pub epsilon: f64,
    /// Largest deviation over full outcome strings.
    pub full_string_deviation: f64,
    /// Largest deviation over `p(x_t | x_<t)` at non-degenerate prefixes.
    pub conditional_deviation: f64,
    /// Largest entrywise distance between a real conditional state and the
    /// image `½Γ̄(ρ)` of its complex counterpart.
    pub state_deviation: f64,
    pub max_deviation: f64,
    pub passes: bool,
    pub total_probability: BranchComparison,
    pub full_strings: BTreeMap<String, BranchComparison>,
    pub conditionals: BTreeMap<String, BranchComparison>,
}

/// Simulates both protocols and compares all full-string probabilities and
/// all conditional distributions. Passes iff both deviations are `≤ tol`.
pub fn verify_protocol_equivalence(
    qt: &ComplexProtocol,
    embedded: &RealProtocol,
    tol: f64,
) -> Result<ProtocolEquivalenceReport> {
    let tq = simulate(qt)?;
    let tr = simulate(embedded)?;

    let mut full_strings = BTreeMap::new();
    for key in tq.leaves.keys().chain(tr.leaves.keys()) {
        full_strings.insert(
            key.clone(),
            BranchComparison {
                qt: tq.leaves.get(key).map_or(0.0, |n| n.probability),
                rqt: tr.leaves.get(key).map_or(0.0, |n| n.probability),
            },
        );
    }
    let cq = tq.conditionals();
    let cr = tr.conditionals();
    let mut conditionals = BTreeMap::new();
    for key in cq.keys().chain(cr.keys()) {
        conditionals.insert(
            key.clone(),
            BranchComparison {
                qt: cq.get(key).copied().unwrap_or(0.0),
                rqt: cr.get(key).copied().unwrap_or(0.0),
            },
        );
    }

    let mut state_deviation = 0.0f64;
    for (key, nq) in tq.nodes.iter().chain(tq.leaves.iter()) {
        let nr = tr.nodes.get(key).or_else(|| tr.leaves.get(key));
        if let (Some(sq), Some(sr)) = (&nq.state, nr.and_then(|n| n.state.as_ref())) {
            if nq.probability > DEGENERATE_EPSILON {
                state_deviation = state_deviation.max(embed_state(sq)?.max_abs_diff(sr));
            }
        }
    }

    let dev = |m: &BTreeMap<String, BranchComparison>| {
        m.values().map(|c| (c.qt - c.rqt).abs()).fold(0.0, f64::max)
    };
    let full_string_deviation = dev(&full_strings);
    let conditional_deviation = dev(&conditionals);
    let max_deviation = full_string_deviation.max(conditional_deviation);
    Ok(ProtocolEquivalenceReport {
        tol,
        epsilon: DEGENERATE_EPSILON,
        full_string_deviation,
        conditional_deviation,
        state_deviation,
        max_deviation,
        passes: max_deviation <= tol,
        total_probability: BranchComparison {
            qt: tq.total_probability(),
            rqt: tr.total_probability(),
        },
        full_strings,
        conditionals,
    })
}
