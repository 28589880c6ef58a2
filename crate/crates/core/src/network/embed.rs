use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    check_independence, Block, ComplexScenario, IndependenceVerdict, Layout, NetworkScenario,
    Party, RealScenario, Source,
};
use crate::embedding::{
    embed_operator, embed_state, gamma_n, inverse_gamma, merge_pairs, r_product, split_pairs,
    EmbeddingConvention,
};
use crate::error::{Error, Result};
use crate::matrix::{
    validate, Povm, RealOperator, Scalar, ValidityReport, Violation, ViolationKind,
};

/// Largest real side for which the R-product fold is recomputed as a cross
/// check of the embedded joint state.
const FOLD_CHECK_MAX_SIDE: usize = 1024;

/// Evidence gathered while embedding a network scenario.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingCertificate {
    pub tol: f64,
    /// Validity of every embedded state and POVM, keyed by object name.
    pub validity: BTreeMap<String, ValidityReport>,
    /// Independence of the embedded joint state across all sources.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub joint_independence: Option<IndependenceVerdict>,
    /// Independence of each source from the rest.
    pub per_source_independence: BTreeMap<String, IndependenceVerdict>,
    /// `max |joint − 2^{L−1}·(s₁ ⊗_R … ⊗_R s_L)|`, when small enough to compute.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_product_fold_deviation: Option<f64>,
    pub convention: EmbeddingConvention,
}

/// Validity of an embedded joint state `½Γ̄⁽ⁿ⁾(ρ)` on `n` merged factors.
///
/// Small states get the full eigenvalue check. Above the fold-check size the
/// state is pulled back to its complex preimage (which fails unless the
/// state lies in the image within `tol`), and PSD is read off the preimage:
/// the nonzero spectrum of `½Γ̄⁽ⁿ⁾(ρ)` is that of `ρ/2`, each eigenvalue twice.
pub(crate) fn validate_embedded_state(
    state: &RealOperator,
    n: usize,
    tol: f64,
) -> Result<ValidityReport> {
    if state.nrows() <= FOLD_CHECK_MAX_SIDE {
        return Ok(validate(state, tol));
    }
    let scale = state.frobenius_norm();
    let mut violations = Vec::new();
    let mut push = |kind, magnitude| {
        violations.push(Violation {
            kind,
            magnitude,
            element: None,
        })
    };
    let herm = state.distance(&state.transpose());
    if herm > tol * scale {
        push(ViolationKind::Hermiticity, herm);
    }
    let trace_defect = (state.trace() - 1.0).abs();
    if trace_defect > tol {
        push(ViolationKind::Trace, trace_defect);
    }
    let preimage = inverse_gamma(&split_pairs(state)?.scale_real(2.0), n, tol)?;
    let min_ev = 0.5
        * preimage
            .hermitian_eigenvalues()
            .first()
            .copied()
            .unwrap_or(0.0);
    if min_ev < -tol * scale {
        push(ViolationKind::Psd, -min_ev);
    }
    Ok(ValidityReport { violations })
}

fn source_partition(layout: &Layout) -> Vec<Vec<usize>> {
    layout.source_groups.clone()
}

/// Interleaved R-product fold of per-source images, `2^{L−1}·(⊗_R ½Γ̄(s))`.
fn r_product_fold(scenario: &ComplexScenario) -> Result<RealOperator> {
    let mut acc: Option<(RealOperator, usize)> = None;
    for src in &scenario.sources {
        let k = src.subsystems.len();
        let img = gamma_n(&src.state.with_shape(&src.subsystems)?, k)?
            .op
            .scale_real(0.5);
        acc = Some(match acc {
            None => (img, k),
            Some((a, j)) => (r_product(&a, j, &img, k)?.scale_real(2.0), j + k),
        });
    }
    let (op, n) = acc.ok_or_else(|| Error::Scenario("scenario has no sources".into()))?;
    merge_pairs(&op, n)
}

fn independence_checks(
    joint: &RealOperator,
    layout: &Layout,
    tol: f64,
) -> Result<(
    Option<IndependenceVerdict>,
    BTreeMap<String, IndependenceVerdict>,
)> {
    let groups = source_partition(layout);
    if groups.len() < 2 {
        return Ok((None, BTreeMap::new()));
    }
    let all = check_independence(joint, &groups, tol)?;
    let mut per = BTreeMap::new();
    if groups.len() == 2 {
        per.insert("source 0".to_string(), all.clone());
        per.insert("source 1".to_string(), all.clone());
    } else {
        for (s, g) in groups.iter().enumerate() {
            let rest: Vec<usize> = groups
                .iter()
                .enumerate()
                .filter(|(t, _)| *t != s)
                .flat_map(|(_, g)| g.clone())
                .collect();
            per.insert(
                format!("source {s}"),
                check_independence(joint, &[g.clone(), rest], tol)?,
            );
        }
    }
    Ok((Some(all), per))
}

/// Embeds a complex network scenario into real quantum theory.
///
/// Each source state `s` on `k` subsystems becomes `½Γ̄⁽ᵏ⁾(s)`; the joint
/// state becomes `½Γ̄⁽ⁿ⁾` of the complex joint state (equal to the R-product
/// of the source images with a factor 2 per join); each block effect `E`
/// becomes `τ∘Γ̄(E)` with one fold per subsystem of the block. Every
/// subsystem of dimension `d` becomes one of dimension `2d`.
pub fn embed_network(
    qt: &ComplexScenario,
    tol: f64,
) -> Result<(RealScenario, EmbeddingCertificate)> {
    let layout = qt.layout()?;
    qt.check_validity(tol)?;

    let mut validity = BTreeMap::new();
    let mut sources = Vec::with_capacity(qt.sources.len());
    for (s, src) in qt.sources.iter().enumerate() {
        let state = embed_state(&src.state.with_shape(&src.subsystems)?)?;
        validity.insert(format!("source {s}"), validate(&state, tol));
        sources.push(Source {
            subsystems: src.subsystems.iter().map(|d| 2 * d).collect(),
            state,
            route: src.route.clone(),
        });
    }

    let real_joint = embed_state(&qt.joint_state(&layout)?)?;
    validity.insert(
        "joint state".to_string(),
        validate_embedded_state(&real_joint, layout.subsystem_dims.len(), tol)?,
    );

    let mut blocks = Vec::with_capacity(qt.blocks.len());
    for (block, dims) in qt.blocks.iter().zip(&layout.block_dims) {
        let mut povms = BTreeMap::new();
        for (setting, povm) in &block.povms {
            let effects = povm
                .effects
                .iter()
                .map(|e| embed_operator(&e.with_shape(dims)?))
                .collect::<Result<Vec<_>>>()?;
            let real = Povm {
                effects,
                labels: povm.labels.clone(),
            };
            validity.insert(
                format!("block {} setting {setting}", block.key()),
                validate(&real, tol),
            );
            povms.insert(setting.clone(), real);
        }
        blocks.push(Block {
            parties: block.parties.clone(),
            povms,
        });
    }

    let parties = qt
        .parties
        .iter()
        .map(|p| {
            let received = qt
                .sources
                .iter()
                .flat_map(|src| src.route.iter())
                .filter(|r| **r == p.name)
                .count();
            Party {
                name: p.name.clone(),
                dim: p.dim << received,
            }
        })
        .collect();

    if let Some((name, r)) = validity.iter().find(|(_, r)| !r.is_valid()) {
        return Err(Error::EmbeddingValidation(format!("{name}: {r}")));
    }

    let (joint_independence, per_source_independence) =
        independence_checks(&real_joint, &layout, tol)?;
    let r_product_fold_deviation =
        if qt.joint_state.is_none() && real_joint.nrows() <= FOLD_CHECK_MAX_SIDE {
            Some(r_product_fold(qt)?.max_abs_diff(&real_joint))
        } else {
            None
        };

    let real = NetworkScenario {
        parties,
        sources,
        blocks,
        joint_state: (qt.sources.len() > 1 || qt.joint_state.is_some()).then_some(real_joint),
    };
    real.layout()?;
    let certificate = EmbeddingCertificate {
        tol,
        validity,
        joint_independence,
        per_source_independence,
        r_product_fold_deviation,
        convention: EmbeddingConvention::new(layout.subsystem_dims.len()),
    };
    Ok((real, certificate))
}

/// Deviation for one setting tuple.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SettingComparison {
    pub max_deviation: f64,
    pub outcomes: usize,
}

/// Statistical comparison of a complex scenario with its embedding.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub tol: f64,
    pub max_deviation: f64,
    pub passes: bool,
    pub per_setting: BTreeMap<String, SettingComparison>,
    /// Independence of the embedded joint state across the sources; absent
    /// for single-source scenarios.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub independence: Option<IndependenceVerdict>,
    pub convention: EmbeddingConvention,
}

fn same_structure<A: Scalar, B: Scalar>(
    a: &NetworkScenario<A>,
    b: &NetworkScenario<B>,
) -> Result<()> {
    let keys = |s: &[Block<A>]| {
        s.iter()
            .map(|b| (b.key(), b.povms.keys().cloned().collect::<Vec<_>>()))
            .collect::<Vec<_>>()
    };
    let keys_b = b
        .blocks
        .iter()
        .map(|b| (b.key(), b.povms.keys().cloned().collect::<Vec<_>>()))
        .collect::<Vec<_>>();
    if keys(&a.blocks) != keys_b || a.sources.len() != b.sources.len() {
        return Err(Error::Scenario(
            "embedded scenario does not match the original's blocks and settings".into(),
        ));
    }
    Ok(())
}

/// Sweeps every setting tuple and compares the two theories' predictions.
pub fn verify_equivalence(
    qt: &ComplexScenario,
    embedded: &RealScenario,
    tol: f64,
) -> Result<EquivalenceReport> {
    same_structure(qt, embedded)?;
    let pq = qt.prepare()?;
    let pr = embedded.prepare()?;
    let tuples = qt.setting_tuples();
    let results: Vec<(String, SettingComparison)> = tuples
        .par_iter()
        .map(|t| {
            let dq = pq.evaluate(t)?;
            let dr = pr.evaluate(t)?;
            Ok((
                t.join(","),
                SettingComparison {
                    max_deviation: dq.max_deviation(&dr),
                    outcomes: dq.probs.len(),
                },
            ))
        })
        .collect::<Result<_>>()?;
    let per_setting: BTreeMap<String, SettingComparison> = results.into_iter().collect();
    let max_deviation = per_setting
        .values()
        .map(|c| c.max_deviation)
        .fold(0.0, f64::max);

    let layout = embedded.layout()?;
    let independence = if layout.source_groups.len() > 1 {
        let joint = embedded.joint_state(&layout)?;
        Some(check_independence(&joint, &layout.source_groups, tol)?)
    } else {
        None
    };
    Ok(EquivalenceReport {
        tol,
        max_deviation,
        passes: max_deviation <= tol,
        per_setting,
        independence,
        convention: EmbeddingConvention::new(layout.subsystem_dims.len()),
    })
}
