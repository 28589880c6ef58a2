use std::collections::BTreeMap;

use rayon::prelude::*;

use super::{render_history, render_outcome, ChannelOp, InstrumentOp, Operation, Protocol};
use crate::error::{Error, Result};
use crate::matrix::{embed_local, inverse_permutation, permute_factors, Operator, Scalar};

/// Branches with probability at or below this carry no conditional state.
pub const DEGENERATE_EPSILON: f64 = 1e-12;

/// One history prefix: its probability and, unless degenerate, the
/// normalized state after the last instrument of the prefix.
#[derive(Clone, Debug, PartialEq)]
pub struct BranchNode<T: Scalar> {
    pub history: Vec<String>,
    pub probability: f64,
    pub state: Option<Operator<T>>,
}

/// Every prefix reached by the protocol plus the full outcome strings.
#[derive(Clone, Debug, PartialEq)]
pub struct BranchTree<T: Scalar> {
    /// Keyed by rendered history; includes the root `""`.
    pub nodes: BTreeMap<String, BranchNode<T>>,
    /// Full outcome strings with the final normalized state.
    pub leaves: BTreeMap<String, BranchNode<T>>,
}

impl<T: Scalar> BranchTree<T> {
    pub fn total_probability(&self) -> f64 {
        self.leaves.values().map(|n| n.probability).sum()
    }

    /// `p(x_t | x_<t)` for every non-root node whose parent is not
    /// degenerate, keyed by the node's rendered history.
    pub fn conditionals(&self) -> BTreeMap<String, f64> {
        self.nodes
            .iter()
            .filter_map(|(key, node)| {
                let (_, prefix) = node.history.split_last()?;
                let parent = self.nodes.get(&render_history(prefix))?;
                (parent.probability > DEGENERATE_EPSILON)
                    .then(|| (key.clone(), node.probability / parent.probability))
            })
            .collect()
    }
}

fn chain_error(step: usize, detail: String) -> Error {
    Error::ShapeChain { step, detail }
}

/// Conjugates `rho` by the block-local operator `k` on `factors`.
fn conjugate_local<T: Scalar>(
    rho: &Operator<T>,
    k: &Operator<T>,
    factors: &[usize],
    step: usize,
) -> Result<Operator<T>> {
    let full =
        embed_local(k, factors, rho.row_shape()).map_err(|e| chain_error(step, e.to_string()))?;
    Ok(&(&full * rho) * &full.adjoint())
}

fn apply_channel<T: Scalar>(
    rho: &Operator<T>,
    c: &ChannelOp<T>,
    step: usize,
) -> Result<Operator<T>> {
    let mut cur = rho.clone();
    for (ops, factors) in c.blocks.iter().zip(&c.partition.partition) {
        let mut acc: Option<Operator<T>> = None;
        for k in ops {
            let term = conjugate_local(&cur, k, factors, step)?;
            acc = Some(match acc {
                None => term,
                Some(a) => &a + &term,
            });
        }
        cur =
            acc.ok_or_else(|| chain_error(step, "channel block without Kraus operators".into()))?;
    }
    Ok(cur)
}

fn apply_outcome<T: Scalar>(
    rho: &Operator<T>,
    m: &InstrumentOp<T>,
    outcome: &[usize],
    step: usize,
) -> Result<Operator<T>> {
    let mut cur = match &m.route {
        Some(r) => permute_factors(rho, r).map_err(|e| chain_error(step, e.to_string()))?,
        None => rho.clone(),
    };
    for ((ops, factors), &x) in m.blocks.iter().zip(&m.partition.partition).zip(outcome) {
        cur = conjugate_local(&cur, &ops[x], factors, step)?;
    }
    match &m.route {
        Some(r) => permute_factors(&cur, &inverse_permutation(r))
            .map_err(|e| chain_error(step, e.to_string())),
        None => Ok(cur),
    }
}

fn node<T: Scalar>(history: &[String], rho: &Operator<T>) -> BranchNode<T> {
    let p = rho.trace().real();
    BranchNode {
        history: history.to_vec(),
        probability: p,
        state: (p > DEGENERATE_EPSILON).then(|| rho.scale_real(1.0 / p)),
    }
}

type Expansion<T> = (Vec<BranchNode<T>>, Vec<BranchNode<T>>);

/// Expands from step `from` with unnormalized state `rho` (trace equal to
/// the probability of `history`).
fn expand<T: Scalar>(
    protocol: &Protocol<T>,
    from: usize,
    rho: Operator<T>,
    history: Vec<String>,
) -> Result<Expansion<T>> {
    let mut rho = rho;
    for (i, step) in protocol.steps.iter().enumerate().skip(from) {
        if !step.applies(&history) {
            continue;
        }
        match &step.op {
            Operation::Channel(c) => rho = apply_channel(&rho, c, i)?,
            Operation::Instrument(m) => {
                let parts: Vec<Expansion<T>> = m
                    .outcomes()
                    .par_iter()
                    .map(|x| {
                        let sigma = apply_outcome(&rho, m, x, i)?;
                        let mut h = history.clone();
                        h.push(render_outcome(x));
                        let here = node(&h, &sigma);
                        let (mut nodes, leaves) = expand(protocol, i + 1, sigma, h)?;
                        nodes.push(here);
                        Ok((nodes, leaves))
                    })
                    .collect::<Result<_>>()?;
                let mut nodes = Vec::new();
                let mut leaves = Vec::new();
                for (n, l) in parts {
                    nodes.extend(n);
                    leaves.extend(l);
                }
                return Ok((nodes, leaves));
            }
        }
    }
    Ok((Vec::new(), vec![node(&history, &rho)]))
}

/// Depth-first expansion of every outcome string. Channels act through their
/// Kraus sums and instrument outcomes through `N ρ N†`, block by block.
pub fn simulate<T: Scalar>(protocol: &Protocol<T>) -> Result<BranchTree<T>> {
    let n = protocol.parties();
    if n == 0 {
        return Err(Error::Protocol("initial state has no parties".into()));
    }
    let rho = protocol.initial_state.clone();
    let root = node(&[], &rho);
    let (nodes, leaves) = expand(protocol, 0, rho, Vec::new())?;
    let mut tree = BranchTree {
        nodes: BTreeMap::from([(String::new(), root)]),
        leaves: BTreeMap::new(),
    };
    for n in nodes {
        tree.nodes.insert(render_history(&n.history), n);
    }
    for l in leaves {
        tree.leaves.insert(render_history(&l.history), l);
    }
    Ok(tree)
}
