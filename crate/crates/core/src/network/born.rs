use std::collections::BTreeMap;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::matrix::{Operator, Scalar};

/// Probabilities keyed by joint outcome tuple (one outcome per block).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct OutcomeDistribution {
    pub probs: BTreeMap<Vec<usize>, f64>,
}

impl OutcomeDistribution {
    pub fn get(&self, outcome: &[usize]) -> f64 {
        self.probs.get(outcome).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.probs.values().sum()
    }

    /// Largest per-outcome absolute difference over the union of outcomes.
    pub fn max_deviation(&self, other: &OutcomeDistribution) -> f64 {
        self.probs
            .keys()
            .chain(other.probs.keys())
            .map(|k| (self.get(k) - other.get(k)).abs())
            .fold(0.0, f64::max)
    }

    /// Distribution with outcome tuples rendered as `"a,b,…"`.
    pub fn labeled(&self) -> BTreeMap<String, f64> {
        self.probs
            .iter()
            .map(|(k, p)| {
                let key: Vec<String> = k.iter().map(|x| x.to_string()).collect();
                (key.join(","), *p)
            })
            .collect()
    }
}

/// `σ[r,c] = Σ_{a,b} E[b,a] ρ[a·rest + r, b·rest + c]`: applies `E` to the
/// leading block and traces it out.
fn contract_leading<T: Scalar>(rho: &DMatrix<T>, side: usize, e: &DMatrix<T>) -> DMatrix<T> {
    let rest = rho.nrows() / side;
    let mut sigma = DMatrix::<T>::zeros(rest, rest);
    for a in 0..side {
        for b in 0..side {
            let w = e[(b, a)];
            if w == T::zero() {
                continue;
            }
            for c in 0..rest {
                let src = rho.column(b * rest + c);
                let src = src.rows(a * rest, rest);
                for (dst, x) in sigma.column_mut(c).iter_mut().zip(src.iter()) {
                    *dst += w * *x;
                }
            }
        }
    }
    sigma
}

fn recurse<T: Scalar>(
    rho: &DMatrix<T>,
    sides: &[usize],
    effects: &[&[Operator<T>]],
    prefix: &mut Vec<usize>,
    out: &mut BTreeMap<Vec<usize>, f64>,
) {
    let Some((&side, rest_sides)) = sides.split_first() else {
        out.insert(prefix.clone(), rho[(0, 0)].real());
        return;
    };
    for (k, e) in effects[0].iter().enumerate() {
        let sigma = contract_leading(rho, side, e.matrix());
        prefix.push(k);
        recurse(&sigma, rest_sides, &effects[1..], prefix, out);
        prefix.pop();
    }
}

/// Born-rule table `Tr[ρ (E¹_{x₁} ⊗ … ⊗ Eᴸ_{x_L})]` for a state whose factors
/// are the blocks, in order, with sides `sides`. Blocks are contracted one at
/// a time, so the joint effect is never formed.
pub fn born_table<T: Scalar>(
    state: &Operator<T>,
    sides: &[usize],
    effects: &[&[Operator<T>]],
) -> Result<OutcomeDistribution> {
    if sides.len() != effects.len() {
        return Err(Error::SizeMismatch(format!(
            "{} blocks but {} effect lists",
            sides.len(),
            effects.len()
        )));
    }
    let total: usize = sides.iter().product();
    if state.nrows() != total || state.ncols() != total {
        return Err(Error::SizeMismatch(format!(
            "state side {} but blocks multiply to {total}",
            state.nrows()
        )));
    }
    for (k, (side, list)) in sides.iter().zip(effects).enumerate() {
        if let Some(e) = list
            .iter()
            .find(|e| e.nrows() != *side || e.ncols() != *side)
        {
            return Err(Error::SizeMismatch(format!(
                "block {k} has side {side} but an effect is {}x{}",
                e.nrows(),
                e.ncols()
            )));
        }
    }
    let mut out = BTreeMap::new();
    recurse(state.matrix(), sides, effects, &mut Vec::new(), &mut out);
    Ok(OutcomeDistribution { probs: out })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{kron, trace_of_product, FactorShape};
    use crate::random;
    use rand::SeedableRng;

    #[test]
    fn matches_full_trace() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(3);
        let shape = FactorShape::new(vec![2, 3]).unwrap();
        let rho = random::density(&mut rng, &shape).with_shape(&[6]).unwrap();
        let p = random::povm(&mut rng, &FactorShape::new(vec![2]).unwrap(), 2);
        let q = random::povm(&mut rng, &FactorShape::new(vec![3]).unwrap(), 3);
        let table = born_table(&rho, &[2, 3], &[&p.effects, &q.effects]).unwrap();
        for a in 0..2 {
            for b in 0..3 {
                let joint = kron(&p.effects[a], &q.effects[b]).unwrap();
                let oracle = trace_of_product(&rho, &joint).re;
                assert!((table.get(&[a, b]) - oracle).abs() < 1e-14);
            }
        }
        assert!((table.total() - 1.0).abs() < 1e-12);
    }
}
