//! Network scenarios: independent sources distribute subsystems to parties,
//! parties are grouped into measurement blocks, and each block measures a
//! POVM chosen by a setting.
//!
//! Subsystems are indexed in source order (source by source, in the order
//! each source lists them). Before effects are applied the joint state is
//! permuted into block order: blocks as listed, parties within a block as
//! listed, and a party's subsystems in source order.

mod born;
mod bundled;
mod embed;
mod independence;

use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use born::{born_table, OutcomeDistribution};
pub use bundled::{bell_chsh, bilocal, chsh_value, triangle};
pub use embed::{
    embed_network, verify_equivalence, EmbeddingCertificate, EquivalenceReport, SettingComparison,
};
pub use independence::{check_independence, IndependenceVerdict};

use crate::error::{Error, Result};
use crate::matrix::{
    kron_all, permute_factors, validate, FactorShape, Operator, Povm, Scalar, ValidityReport,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Party {
    pub name: String,
    pub dim: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Source<T: Scalar> {
    /// Dimension of each emitted subsystem.
    pub subsystems: Vec<usize>,
    pub state: Operator<T>,
    /// Receiving party of each subsystem.
    pub route: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Block<T: Scalar> {
    pub parties: Vec<String>,
    /// POVM per setting label.
    pub povms: BTreeMap<String, Povm<T>>,
}

impl<T: Scalar> Block<T> {
    /// Key used for this block in scenario files.
    pub fn key(&self) -> String {
        self.parties.join(",")
    }
}

/// A network scenario over either field.
///
/// `joint_state`, when present, overrides the Kronecker product of the
/// source states. Embedded scenarios use it to carry the R-product joint
/// state, which is not a Kronecker product of its marginals.
#[derive(Clone, Debug, PartialEq)]
pub struct NetworkScenario<T: Scalar> {
    pub parties: Vec<Party>,
    pub sources: Vec<Source<T>>,
    pub blocks: Vec<Block<T>>,
    pub joint_state: Option<Operator<T>>,
}

pub type ComplexScenario = NetworkScenario<Complex64>;
pub type RealScenario = NetworkScenario<f64>;

/// Index bookkeeping derived from a structurally valid scenario.
#[derive(Clone, Debug, PartialEq)]
pub struct Layout {
    /// Subsystem dims in source order.
    pub subsystem_dims: Vec<usize>,
    /// Subsystem indices emitted by each source.
    pub source_groups: Vec<Vec<usize>>,
    /// `block_order[k]` is the source-order index of the subsystem placed at
    /// position `k` of the block order.
    pub block_order: Vec<usize>,
    /// Subsystem dims of each block, in block order.
    pub block_dims: Vec<Vec<usize>>,
}

impl Layout {
    pub fn block_sides(&self) -> Vec<usize> {
        self.block_dims.iter().map(|d| d.iter().product()).collect()
    }
}

impl<T: Scalar> NetworkScenario<T> {
    /// Checks routing, partition and dimension consistency.
    pub fn layout(&self) -> Result<Layout> {
        let mut index: HashMap<&str, usize> = HashMap::new();
        for (k, p) in self.parties.iter().enumerate() {
            if p.dim == 0 {
                return Err(Error::Scenario(format!("party {} has dimension 0", p.name)));
            }
            if index.insert(p.name.as_str(), k).is_some() {
                return Err(Error::Scenario(format!("duplicate party name {}", p.name)));
            }
        }
        let mut subsystem_dims = Vec::new();
        let mut source_groups = Vec::new();
        let mut owned: Vec<Vec<usize>> = vec![Vec::new(); self.parties.len()];
        for (s, src) in self.sources.iter().enumerate() {
            if src.route.len() != src.subsystems.len() {
                return Err(Error::Scenario(format!(
                    "source {s} routes {} subsystems but emits {}",
                    src.route.len(),
                    src.subsystems.len()
                )));
            }
            if src.subsystems.is_empty() || src.subsystems.contains(&0) {
                return Err(Error::Scenario(format!(
                    "source {s} has an empty or zero-dimensional subsystem"
                )));
            }
            let side: usize = src.subsystems.iter().product();
            if !src.state.is_square() || src.state.nrows() != side {
                return Err(Error::Scenario(format!(
                    "source {s} state is {}x{}, subsystems imply side {side}",
                    src.state.nrows(),
                    src.state.ncols()
                )));
            }
            let mut group = Vec::new();
            for (dim, name) in src.subsystems.iter().zip(&src.route) {
                let p = *index.get(name.as_str()).ok_or_else(|| {
                    Error::Scenario(format!("source {s} routes to unknown party {name}"))
                })?;
                owned[p].push(subsystem_dims.len());
                group.push(subsystem_dims.len());
                subsystem_dims.push(*dim);
            }
            source_groups.push(group);
        }
        for (p, party) in self.parties.iter().enumerate() {
            let got: usize = owned[p].iter().map(|&k| subsystem_dims[k]).product();
            if got != party.dim {
                return Err(Error::Scenario(format!(
                    "party {} has dim {} but receives subsystems of total dim {got}",
                    party.name, party.dim
                )));
            }
        }
        let mut covered = vec![false; self.parties.len()];
        let mut block_order = Vec::new();
        let mut block_dims = Vec::new();
        for block in &self.blocks {
            if block.parties.is_empty() {
                return Err(Error::Scenario("empty measurement block".into()));
            }
            let mut dims = Vec::new();
            for name in &block.parties {
                let p = *index
                    .get(name.as_str())
                    .ok_or_else(|| Error::Scenario(format!("block lists unknown party {name}")))?;
                if covered[p] {
                    return Err(Error::Scenario(format!(
                        "party {name} appears in two blocks"
                    )));
                }
                covered[p] = true;
                for &k in &owned[p] {
                    block_order.push(k);
                    dims.push(subsystem_dims[k]);
                }
            }
            let side: usize = dims.iter().product();
            if block.povms.is_empty() {
                return Err(Error::Scenario(format!(
                    "block {} has no settings",
                    block.key()
                )));
            }
            for (setting, povm) in &block.povms {
                if povm.is_empty() {
                    return Err(Error::Scenario(format!(
                        "block {} setting {setting} has no effects",
                        block.key()
                    )));
                }
                if let Some(e) = povm
                    .effects
                    .iter()
                    .find(|e| !e.is_square() || e.nrows() != side)
                {
                    return Err(Error::Scenario(format!(
                        "block {} setting {setting}: effect is {}x{}, block side is {side}",
                        block.key(),
                        e.nrows(),
                        e.ncols()
                    )));
                }
            }
            block_dims.push(dims);
        }
        if let Some(p) = covered.iter().position(|c| !c) {
            return Err(Error::Scenario(format!(
                "party {} is not in any measurement block",
                self.parties[p].name
            )));
        }
        if let Some(j) = &self.joint_state {
            let side: usize = subsystem_dims.iter().product();
            if j.nrows() != side || !j.is_square() {
                return Err(Error::Scenario(format!(
                    "joint state is {}x{}, subsystems imply side {side}",
                    j.nrows(),
                    j.ncols()
                )));
            }
        }
        Ok(Layout {
            subsystem_dims,
            source_groups,
            block_order,
            block_dims,
        })
    }

    /// Validates every state and POVM within `tol`; returns the reports
    /// keyed by object name and an error naming the first invalid one.
    pub fn check_validity(&self, tol: f64) -> Result<BTreeMap<String, ValidityReport>> {
        self.layout()?;
        let mut reports = BTreeMap::new();
        for (s, src) in self.sources.iter().enumerate() {
            reports.insert(format!("source {s}"), validate(&src.state, tol));
        }
        if let Some(j) = &self.joint_state {
            reports.insert("joint state".to_string(), validate(j, tol));
        }
        for block in &self.blocks {
            for (setting, povm) in &block.povms {
                reports.insert(
                    format!("block {} setting {setting}", block.key()),
                    validate(povm, tol),
                );
            }
        }
        if let Some((name, r)) = reports.iter().find(|(_, r)| !r.is_valid()) {
            return Err(Error::Scenario(format!("{name} is invalid: {r}")));
        }
        Ok(reports)
    }

    /// Joint state in source order, one factor per subsystem.
    pub fn joint_state(&self, layout: &Layout) -> Result<Operator<T>> {
        let op = match &self.joint_state {
            Some(j) => j.clone(),
            None => {
                let states: Vec<Operator<T>> =
                    self.sources.iter().map(|s| s.state.clone()).collect();
                kron_all(&states)?
            }
        };
        op.with_shape(&layout.subsystem_dims)
    }

    /// All setting tuples, one label per block, in lexicographic order.
    pub fn setting_tuples(&self) -> Vec<Vec<String>> {
        let mut out: Vec<Vec<String>> = vec![Vec::new()];
        for block in &self.blocks {
            let mut next = Vec::new();
            for prefix in &out {
                for s in block.povms.keys() {
                    let mut t = prefix.clone();
                    t.push(s.clone());
                    next.push(t);
                }
            }
            out = next;
        }
        out
    }

    /// Joint state routed into block order, ready for repeated evaluation.
    pub fn prepare(&self) -> Result<PreparedScenario<'_, T>> {
        let layout = self.layout()?;
        let joint = self.joint_state(&layout)?;
        let routed = permute_factors(&joint, &layout.block_order)?;
        let sides = layout.block_sides();
        let routed = routed.with_shape(&sides)?;
        Ok(PreparedScenario {
            scenario: self,
            layout,
            routed,
        })
    }
}

/// A scenario with its joint state already routed into block order.
pub struct PreparedScenario<'a, T: Scalar> {
    scenario: &'a NetworkScenario<T>,
    layout: Layout,
    routed: Operator<T>,
}

impl<'a, T: Scalar> PreparedScenario<'a, T> {
    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    /// Block-ordered joint state.
    pub fn routed_state(&self) -> &Operator<T> {
        &self.routed
    }

    pub fn evaluate(&self, settings: &[String]) -> Result<OutcomeDistribution> {
        let blocks = &self.scenario.blocks;
        if settings.len() != blocks.len() {
            return Err(Error::Scenario(format!(
                "{} settings given for {} blocks",
                settings.len(),
                blocks.len()
            )));
        }
        let mut effects = Vec::with_capacity(blocks.len());
        for (block, s) in blocks.iter().zip(settings) {
            let povm = block.povms.get(s).ok_or_else(|| {
                Error::Scenario(format!("block {} has no setting {s}", block.key()))
            })?;
            effects.push(povm.effects.as_slice());
        }
        born_table(&self.routed, &self.layout.block_sides(), &effects)
    }
}

/// Born-rule distribution for one setting per block.
pub fn evaluate<T: Scalar>(
    scenario: &NetworkScenario<T>,
    settings: &[String],
) -> Result<OutcomeDistribution> {
    scenario.prepare()?.evaluate(settings)
}

/// Born-rule evaluation of a complex scenario.
pub fn evaluate_qt(scenario: &ComplexScenario, settings: &[String]) -> Result<OutcomeDistribution> {
    evaluate(scenario, settings)
}

/// Born-rule evaluation of a real scenario.
pub fn evaluate_rqt(scenario: &RealScenario, settings: &[String]) -> Result<OutcomeDistribution> {
    evaluate(scenario, settings)
}

// ---- JSON ----

#[derive(Serialize, Deserialize)]
struct SubsystemJson {
    dim: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(bound = "")]
struct SourceJson<T: Scalar> {
    subsystems: Vec<SubsystemJson>,
    state: Operator<T>,
    route: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(bound = "", deny_unknown_fields)]
struct ScenarioJson<T: Scalar> {
    parties: Vec<Party>,
    sources: Vec<SourceJson<T>>,
    blocks: Vec<Vec<String>>,
    povms: BTreeMap<String, BTreeMap<String, Vec<Operator<T>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    joint_state: Option<Operator<T>>,
}

impl<T: Scalar> Serialize for NetworkScenario<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let j = ScenarioJson {
            parties: self.parties.clone(),
            sources: self
                .sources
                .iter()
                .map(|src| SourceJson {
                    subsystems: src
                        .subsystems
                        .iter()
                        .map(|&dim| SubsystemJson { dim })
                        .collect(),
                    state: src.state.clone(),
                    route: src.route.clone(),
                })
                .collect(),
            blocks: self.blocks.iter().map(|b| b.parties.clone()).collect(),
            povms: self
                .blocks
                .iter()
                .map(|b| {
                    let settings = b
                        .povms
                        .iter()
                        .map(|(k, p)| (k.clone(), p.effects.clone()))
                        .collect();
                    (b.key(), settings)
                })
                .collect(),
            joint_state: self.joint_state.clone(),
        };
        j.serialize(s)
    }
}

impl<'de, T: Scalar> Deserialize<'de> for NetworkScenario<T> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let mut j = ScenarioJson::<T>::deserialize(d)?;
        let mut blocks = Vec::new();
        for parties in j.blocks {
            let key = parties.join(",");
            let settings = j.povms.remove(&key).ok_or_else(|| {
                D::Error::custom(format!("povms has no entry for block \"{key}\""))
            })?;
            let povms = settings
                .into_iter()
                .map(|(k, e)| (k, Povm::new(e)))
                .collect();
            blocks.push(Block { parties, povms });
        }
        if let Some(extra) = j.povms.keys().next() {
            return Err(D::Error::custom(format!(
                "povms entry \"{extra}\" matches no block"
            )));
        }
        let sources = j
            .sources
            .into_iter()
            .map(|s| {
                let dims: Vec<usize> = s.subsystems.iter().map(|x| x.dim).collect();
                let state = if FactorShape::new(dims.clone()).is_ok()
                    && s.state.nrows() == dims.iter().product::<usize>()
                {
                    s.state.with_shape(&dims).map_err(D::Error::custom)?
                } else {
                    s.state
                };
                Ok(Source {
                    subsystems: dims,
                    state,
                    route: s.route,
                })
            })
            .collect::<std::result::Result<Vec<_>, D::Error>>()?;
        let scenario = NetworkScenario {
            parties: j.parties,
            sources,
            blocks,
            joint_state: j.joint_state,
        };
        scenario.layout().map_err(D::Error::custom)?;
        Ok(scenario)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::ComplexOperator;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn single_party() -> ComplexScenario {
        let ket0 =
            ComplexOperator::from_row_slice(&[2], &[c(1.0), c(0.0), c(0.0), c(0.0)]).unwrap();
        let ket1 =
            ComplexOperator::from_row_slice(&[2], &[c(0.0), c(0.0), c(0.0), c(1.0)]).unwrap();
        NetworkScenario {
            parties: vec![Party {
                name: "A".into(),
                dim: 2,
            }],
            sources: vec![Source {
                subsystems: vec![2],
                state: ket0.clone(),
                route: vec!["A".into()],
            }],
            blocks: vec![Block {
                parties: vec!["A".into()],
                povms: BTreeMap::from([("z".to_string(), Povm::new(vec![ket0, ket1]))]),
            }],
            joint_state: None,
        }
    }

    #[test]
    fn computational_measurement_of_zero() {
        let s = single_party();
        let d = evaluate_qt(&s, &["z".to_string()]).unwrap();
        assert_eq!(d.get(&[0]), 1.0);
        assert_eq!(d.get(&[1]), 0.0);
    }

    #[test]
    fn missing_setting_is_an_error() {
        let s = single_party();
        assert!(evaluate_qt(&s, &["x".to_string()]).is_err());
        assert!(evaluate_qt(&s, &[]).is_err());
    }

    #[test]
    fn routing_dim_mismatch_is_an_error() {
        let mut s = single_party();
        s.parties[0].dim = 3;
        assert!(matches!(s.layout(), Err(Error::Scenario(_))));
    }

    #[test]
    fn json_round_trip() {
        let s = bilocal();
        let text = serde_json::to_string(&s).unwrap();
        let back: ComplexScenario = serde_json::from_str(&text).unwrap();
        assert_eq!(back.blocks.len(), 3);
        let settings = vec!["0".to_string(), "1".to_string(), "0".to_string()];
        let a = evaluate_qt(&s, &settings).unwrap();
        let b = evaluate_qt(&back, &settings).unwrap();
        assert!(a.max_deviation(&b) < 1e-15);
    }

    #[test]
    fn setting_tuples_enumerate_product() {
        let s = bilocal();
        assert_eq!(s.setting_tuples().len(), 8);
    }
}
