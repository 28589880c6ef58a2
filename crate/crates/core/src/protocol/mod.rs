//! Adaptive sequential protocols: rounds of locality-labelled channels and
//! instruments acting on an `n`-partite system, with later steps optionally
//! conditioned on earlier outcomes.
//!
//! A protocol is a flat list of steps. Each step is a channel or an
//! instrument and may carry a `conditioned_on` pattern over the outcome
//! history; a step whose pattern does not match the current branch is
//! skipped on that branch. Every instrument step appends one entry to the
//! history, rendered as the per-block outcomes joined by `.` (`"0.1"`).
//!
//! Parties keep their index for the whole protocol. A channel may change a
//! party's dimension (down to 1 for a discard) through rectangular Kraus
//! operators.

mod bundled;
mod embed;
mod simulate;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use bundled::{adaptive_example, random_protocol};
pub use embed::{
    embed_protocol, embed_route, embed_step, verify_protocol_equivalence, BranchComparison,
    ProtocolCertificate, ProtocolEquivalenceReport,
};
pub use simulate::{simulate, BranchNode, BranchTree, DEGENERATE_EPSILON};

use crate::error::{Error, Result};
use crate::matrix::{check_permutation, validate, KrausSet, Operator, Scalar, ValidityReport};

/// Partition of the parties into disjoint blocks covering all of them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LocalityLabel {
    pub partition: Vec<Vec<usize>>,
}

impl LocalityLabel {
    pub fn new(partition: Vec<Vec<usize>>, parties: usize) -> Result<Self> {
        let label = LocalityLabel { partition };
        label.check(parties)?;
        Ok(label)
    }

    /// Every party as its own block.
    pub fn local(parties: usize) -> Self {
        LocalityLabel {
            partition: (0..parties).map(|p| vec![p]).collect(),
        }
    }

    /// All parties in one block.
    pub fn global(parties: usize) -> Self {
        LocalityLabel {
            partition: vec![(0..parties).collect()],
        }
    }

    pub fn check(&self, parties: usize) -> Result<()> {
        let mut seen = vec![false; parties];
        for block in &self.partition {
            if block.is_empty() {
                return Err(Error::Protocol("empty block in partition".into()));
            }
            for &p in block {
                if p >= parties || seen[p] {
                    return Err(Error::Protocol(format!(
                        "partition {:?} is not a partition of {parties} parties",
                        self.partition
                    )));
                }
                seen[p] = true;
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Protocol(format!(
                "partition {:?} does not cover all {parties} parties",
                self.partition
            )));
        }
        Ok(())
    }
}

/// Channel factorizing over `label`: block `b` applies the Kraus family
/// `blocks[b]`, whose operators act on the parties of `label.partition[b]`
/// in the listed order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ChannelOp<T: Scalar> {
    pub partition: LocalityLabel,
    pub blocks: Vec<Vec<Operator<T>>>,
}

/// Instrument factorizing over `label` after routing: block `b` has one
/// measurement operator per outcome. When `route` is present the state is
/// first conjugated by the factor permutation (position `k` receives party
/// `route[k]`), the blocks act on routed positions, and the permutation is
/// undone afterwards.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct InstrumentOp<T: Scalar> {
    pub partition: LocalityLabel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub route: Option<Vec<usize>>,
    pub blocks: Vec<Vec<Operator<T>>>,
}

impl<T: Scalar> InstrumentOp<T> {
    /// All joint outcomes, one index per block, lexicographic.
    pub fn outcomes(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = vec![Vec::new()];
        for block in &self.blocks {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    (0..block.len()).map(move |x| {
                        let mut t = prefix.clone();
                        t.push(x);
                        t
                    })
                })
                .collect();
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", bound = "")]
pub enum Operation<T: Scalar> {
    Channel(ChannelOp<T>),
    Instrument(InstrumentOp<T>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Step<T: Scalar> {
    #[serde(flatten)]
    pub op: Operation<T>,
    /// Outcome-history prefix this step requires; entries are `"*"` or a
    /// rendered outcome whose per-block parts may themselves be `*`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conditioned_on: Option<Vec<String>>,
}

impl<T: Scalar> Step<T> {
    pub fn new(op: Operation<T>) -> Self {
        Step {
            op,
            conditioned_on: None,
        }
    }

    pub fn when(mut self, pattern: &[&str]) -> Self {
        self.conditioned_on = Some(pattern.iter().map(|s| s.to_string()).collect());
        self
    }

    /// Whether this step runs after `history`.
    pub fn applies(&self, history: &[String]) -> bool {
        let Some(pattern) = &self.conditioned_on else {
            return true;
        };
        pattern.len() <= history.len()
            && pattern
                .iter()
                .zip(history)
                .all(|(p, h)| entry_matches(p, h))
    }
}

fn entry_matches(pattern: &str, outcome: &str) -> bool {
    if pattern == "*" {
        return true;
    }
    let p: Vec<&str> = pattern.split('.').collect();
    let o: Vec<&str> = outcome.split('.').collect();
    p.len() == o.len() && p.iter().zip(&o).all(|(a, b)| *a == "*" || a == b)
}

/// Renders a joint outcome as `"x1.x2…"`.
pub fn render_outcome(outcome: &[usize]) -> String {
    outcome
        .iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(".")
}

/// Renders an outcome history as `"h1,h2,…"`; the empty history is `""`.
pub fn render_history(history: &[String]) -> String {
    history.join(",")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Protocol<T: Scalar> {
    pub initial_state: Operator<T>,
    #[serde(rename = "rounds")]
    pub steps: Vec<Step<T>>,
}

pub type ComplexProtocol = Protocol<Complex64>;
pub type RealProtocol = Protocol<f64>;

fn check_block_shapes<T: Scalar>(
    step: usize,
    ops: &[Operator<T>],
    parties: usize,
    square: bool,
) -> Result<()> {
    let first = ops
        .first()
        .ok_or_else(|| Error::Protocol(format!("step {step}: block has no operators")))?;
    for op in ops {
        if op.row_shape().len() != parties || op.col_shape().len() != parties {
            return Err(Error::Protocol(format!(
                "step {step}: block of {parties} parties has an operator with shape {}x{}",
                op.row_shape(),
                op.col_shape()
            )));
        }
        if op.row_shape() != first.row_shape() || op.col_shape() != first.col_shape() {
            return Err(Error::Protocol(format!(
                "step {step}: operators of one block differ in shape"
            )));
        }
        if square && !op.is_square() {
            return Err(Error::Protocol(format!(
                "step {step}: measurement operators must be square, found {}x{}",
                op.row_shape(),
                op.col_shape()
            )));
        }
    }
    Ok(())
}

impl<T: Scalar> Protocol<T> {
    pub fn parties(&self) -> usize {
        self.initial_state.shape().len()
    }

    /// Instruments on the longest branch, counted statically.
    pub fn horizon(&self) -> usize {
        self.steps
            .iter()
            .filter(|s| matches!(s.op, Operation::Instrument(_)))
            .count()
    }

    /// Checks structure and validity of every object; returns a validity
    /// report per object. Shape chaining depends on the branch and is
    /// checked during simulation.
    pub fn check(&self, tol: f64) -> Result<Vec<(String, ValidityReport)>> {
        let n = self.parties();
        let mut reports = vec![(
            "initial state".to_string(),
            validate(&self.initial_state, tol),
        )];
        for (i, step) in self.steps.iter().enumerate() {
            match &step.op {
                Operation::Channel(c) => {
                    c.partition.check(n)?;
                    if c.blocks.len() != c.partition.partition.len() {
                        return Err(Error::Protocol(format!(
                            "step {i}: {} blocks for a partition of {}",
                            c.blocks.len(),
                            c.partition.partition.len()
                        )));
                    }
                    for (b, (ops, parties)) in
                        c.blocks.iter().zip(&c.partition.partition).enumerate()
                    {
                        check_block_shapes(i, ops, parties.len(), false)?;
                        reports.push((
                            format!("step {i} channel block {b}"),
                            validate(&KrausSet::channel(ops.clone()), tol),
                        ));
                    }
                }
                Operation::Instrument(m) => {
                    m.partition.check(n)?;
                    if let Some(route) = &m.route {
                        check_permutation(route, n)
                            .map_err(|e| Error::Protocol(format!("step {i}: route: {e}")))?;
                    }
                    if m.blocks.len() != m.partition.partition.len() {
                        return Err(Error::Protocol(format!(
                            "step {i}: {} blocks for a partition of {}",
                            m.blocks.len(),
                            m.partition.partition.len()
                        )));
                    }
                    for (b, (ops, parties)) in
                        m.blocks.iter().zip(&m.partition.partition).enumerate()
                    {
                        check_block_shapes(i, ops, parties.len(), true)?;
                        reports.push((
                            format!("step {i} instrument block {b}"),
                            validate(&KrausSet::channel(ops.clone()), tol),
                        ));
                    }
                }
            }
        }
        if let Some((name, r)) = reports.iter().find(|(_, r)| !r.is_valid()) {
            return Err(Error::Protocol(format!("{name} is invalid: {r}")));
        }
        Ok(reports)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pattern_matching() {
        let step = Step::<f64>::new(Operation::Channel(ChannelOp {
            partition: LocalityLabel::local(1),
            blocks: vec![],
        }));
        let h = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        assert!(step.applies(&h(&[])));
        let s = step.clone().when(&["0.1"]);
        assert!(s.applies(&h(&["0.1"])));
        assert!(s.applies(&h(&["0.1", "2"])));
        assert!(!s.applies(&h(&["0.0"])));
        assert!(!s.applies(&h(&[])));
        let s = step.clone().when(&["*.1"]);
        assert!(s.applies(&h(&["3.1"])));
        assert!(!s.applies(&h(&["3"])));
        let s = step.when(&["*", "1"]);
        assert!(s.applies(&h(&["0.0", "1"])));
        assert!(!s.applies(&h(&["0.0", "0"])));
    }

    #[test]
    fn partitions() {
        assert!(LocalityLabel::new(vec![vec![0, 2], vec![1]], 3).is_ok());
        assert!(LocalityLabel::new(vec![vec![0, 1], vec![1]], 3).is_err());
        assert!(LocalityLabel::new(vec![vec![0]], 2).is_err());
        assert!(LocalityLabel::new(vec![vec![0], vec![]], 1).is_err());
    }

    #[test]
    fn outcome_enumeration() {
        let ops = vec![
            Operator::<f64>::identity(crate::matrix::FactorShape::new(vec![2]).unwrap())
                .unwrap();
            2
        ];
        let m = InstrumentOp {
            partition: LocalityLabel::local(2),
            route: None,
            blocks: vec![ops.clone(), vec![ops[0].clone(); 3]],
        };
        let o = m.outcomes();
        assert_eq!(o.len(), 6);
        assert_eq!(o[0], vec![0, 0]);
        assert_eq!(o[5], vec![1, 2]);
        assert_eq!(render_outcome(&o[5]), "1.2");
    }
}
