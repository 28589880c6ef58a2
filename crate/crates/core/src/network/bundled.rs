//! Reference scenarios: CHSH on a singlet, the bilocal chain and the
//! triangle. Settings are labelled `"0"` and `"1"` throughout.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use super::{Block, ComplexScenario, NetworkScenario, OutcomeDistribution, Party, Source};
use crate::error::{Error, Result};
use crate::matrix::{ComplexOperator, FactorShape, Operator, Povm, Scalar};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn projector(dims: &[usize], ket: &[Complex64]) -> ComplexOperator {
    let shape = FactorShape::new(dims.to_vec()).expect("nonzero dims");
    Operator::from_fn(shape, |r, col| ket[r] * ket[col].conj()).expect("ket length matches dims")
}

fn basis_povm(dims: &[usize], kets: &[Vec<Complex64>]) -> Povm<Complex64> {
    Povm::new(kets.iter().map(|k| projector(dims, k)).collect())
}

/// Two-outcome qubit measurement of `n·σ` with `n = (0, sin θ, cos θ)`,
/// i.e. in the Z–Y plane. Outcome 0 is the `+1` eigenvalue.
fn zy_measurement(theta: f64) -> Povm<Complex64> {
    let (s, co) = theta.sin_cos();
    let plus = [
        c(0.5 * (1.0 + co), 0.0),
        c(0.0, -0.5 * s),
        c(0.0, 0.5 * s),
        c(0.5 * (1.0 - co), 0.0),
    ];
    let minus = [
        c(0.5 * (1.0 - co), 0.0),
        c(0.0, 0.5 * s),
        c(0.0, -0.5 * s),
        c(0.5 * (1.0 + co), 0.0),
    ];
    Povm::new(vec![
        Operator::from_row_slice(&[2], &plus).expect("2x2"),
        Operator::from_row_slice(&[2], &minus).expect("2x2"),
    ])
}

fn settings(povms: Vec<Povm<Complex64>>) -> BTreeMap<String, Povm<Complex64>> {
    povms
        .into_iter()
        .enumerate()
        .map(|(k, p)| (k.to_string(), p))
        .collect()
}

fn singlet() -> ComplexOperator {
    let h = FRAC_1_SQRT_2;
    projector(&[2, 2], &[c(0.0, 0.0), c(h, 0.0), c(-h, 0.0), c(0.0, 0.0)])
}

fn bell_basis() -> Vec<Vec<Complex64>> {
    let h = FRAC_1_SQRT_2;
    let z = c(0.0, 0.0);
    vec![
        vec![c(h, 0.0), z, z, c(h, 0.0)],
        vec![c(h, 0.0), z, z, c(-h, 0.0)],
        vec![z, c(h, 0.0), c(h, 0.0), z],
        vec![z, c(h, 0.0), c(-h, 0.0), z],
    ]
}

/// `(|00⟩ ± i|11⟩)/√2`, `(|01⟩ ± i|10⟩)/√2`.
fn complex_bell_basis() -> Vec<Vec<Complex64>> {
    let h = FRAC_1_SQRT_2;
    let z = c(0.0, 0.0);
    vec![
        vec![c(h, 0.0), z, z, c(0.0, h)],
        vec![c(h, 0.0), z, z, c(0.0, -h)],
        vec![z, c(h, 0.0), c(0.0, h), z],
        vec![z, c(h, 0.0), c(0.0, -h), z],
    ]
}

fn computational_basis(d: usize) -> Vec<Vec<Complex64>> {
    (0..d)
        .map(|k| {
            (0..d)
                .map(|i| c(if i == k { 1.0 } else { 0.0 }, 0.0))
                .collect()
        })
        .collect()
}

fn party(name: &str, dim: usize) -> Party {
    Party {
        name: name.into(),
        dim,
    }
}

fn source(state: ComplexOperator, route: [&str; 2]) -> Source<Complex64> {
    Source {
        subsystems: vec![2, 2],
        state,
        route: route.iter().map(|s| s.to_string()).collect(),
    }
}

fn block(name: &str, povms: Vec<Povm<Complex64>>) -> Block<Complex64> {
    Block {
        parties: vec![name.into()],
        povms: settings(povms),
    }
}

/// CHSH on a singlet: Alice measures Z and Y, Bob measures `(Z ± Y)/√2`.
/// The quantum value is `2√2`.
pub fn bell_chsh() -> ComplexScenario {
    let q = std::f64::consts::FRAC_PI_4;
    NetworkScenario {
        parties: vec![party("A", 2), party("B", 2)],
        sources: vec![source(singlet(), ["A", "B"])],
        blocks: vec![
            block("A", vec![zy_measurement(0.0), zy_measurement(2.0 * q)]),
            block("B", vec![zy_measurement(q), zy_measurement(-q)]),
        ],
        joint_state: None,
    }
}

/// Two singlets in a chain A–B–C. The middle party measures in the Bell
/// basis or in a complex Bell-like basis.
pub fn bilocal() -> ComplexScenario {
    let q = std::f64::consts::FRAC_PI_4;
    NetworkScenario {
        parties: vec![party("A", 2), party("B", 4), party("C", 2)],
        sources: vec![source(singlet(), ["A", "B"]), source(singlet(), ["B", "C"])],
        blocks: vec![
            block("A", vec![zy_measurement(0.0), zy_measurement(2.0 * q)]),
            block(
                "B",
                vec![
                    basis_povm(&[2, 2], &bell_basis()),
                    basis_povm(&[2, 2], &complex_bell_basis()),
                ],
            ),
            block("C", vec![zy_measurement(q), zy_measurement(-q)]),
        ],
        joint_state: None,
    }
}

/// Triangle network: each pair of parties shares a two-qubit source, so
/// every party holds two qubits. The BC source is a noisy complex Bell
/// state with visibility 0.8.
pub fn triangle() -> ComplexScenario {
    let h = FRAC_1_SQRT_2;
    let z = c(0.0, 0.0);
    let phi_i = projector(&[2, 2], &[c(h, 0.0), z, z, c(0.0, h)]);
    let v = 0.8;
    let noisy = Operator::from_fn(FactorShape::new(vec![2, 2]).expect("dims"), |r, col| {
        phi_i.get(r, col) * v + if r == col { c((1.0 - v) / 4.0, 0.0) } else { z }
    })
    .expect("4x4");
    let phi_plus = projector(&[2, 2], &[c(h, 0.0), z, z, c(h, 0.0)]);
    let local = || {
        vec![
            basis_povm(&[2, 2], &computational_basis(4)),
            basis_povm(&[2, 2], &complex_bell_basis()),
        ]
    };
    NetworkScenario {
        parties: vec![party("A", 4), party("B", 4), party("C", 4)],
        sources: vec![
            source(singlet(), ["A", "B"]),
            source(noisy, ["B", "C"]),
            source(phi_plus, ["C", "A"]),
        ],
        blocks: vec![
            block("A", local()),
            block("B", local()),
            block("C", local()),
        ],
        joint_state: None,
    }
}

fn correlator(d: &OutcomeDistribution) -> f64 {
    d.probs
        .iter()
        .map(|(k, p)| {
            if k.iter().sum::<usize>() % 2 == 0 {
                *p
            } else {
                -*p
            }
        })
        .sum()
}

/// `|E₀₀ + E₀₁ + E₁₀ − E₁₁|` for a two-block scenario with binary settings
/// `"0"`, `"1"` and binary outcomes.
pub fn chsh_value<T: Scalar>(scenario: &NetworkScenario<T>) -> Result<f64> {
    if scenario.blocks.len() != 2 {
        return Err(Error::Scenario(format!(
            "CHSH needs 2 blocks, found {}",
            scenario.blocks.len()
        )));
    }
    let prepared = scenario.prepare()?;
    let mut s = 0.0;
    for (x, y, sign) in [
        ("0", "0", 1.0),
        ("0", "1", 1.0),
        ("1", "0", 1.0),
        ("1", "1", -1.0),
    ] {
        let d = prepared.evaluate(&[x.to_string(), y.to_string()])?;
        if d.probs.keys().any(|k| k.iter().any(|&o| o > 1)) {
            return Err(Error::Scenario("CHSH needs binary outcomes".into()));
        }
        s += sign * correlator(&d);
    }
    Ok(s.abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::validate;

    #[test]
    fn bundled_scenarios_are_valid() {
        for s in [bell_chsh(), bilocal(), triangle()] {
            s.check_validity(1e-12).unwrap();
        }
        for p in [
            zy_measurement(0.3),
            basis_povm(&[2, 2], &complex_bell_basis()),
        ] {
            assert!(validate(&p, 1e-12).is_valid());
        }
    }

    #[test]
    fn chsh_reaches_tsirelson() {
        let s = chsh_value(&bell_chsh()).unwrap();
        assert!((s - 2.0 * 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn singlet_correlator_is_minus_cosine() {
        let s = bell_chsh();
        let d = super::super::evaluate(&s, &["0".to_string(), "0".to_string()]).unwrap();
        // angle π/4 between Z and (Z+Y)/√2
        assert!((correlator(&d) + FRAC_1_SQRT_2).abs() < 1e-12);
    }
}
