use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use super::{
    render_outcome, ChannelOp, ComplexProtocol, InstrumentOp, LocalityLabel, Operation, Step,
};
use crate::matrix::{kron, ComplexOperator, FactorShape, Operator};
use crate::random;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn op(rows: &[usize], cols: &[usize], entries: &[Complex64]) -> ComplexOperator {
    let rs = FactorShape::new(rows.to_vec()).expect("dims");
    let cs = FactorShape::new(cols.to_vec()).expect("dims");
    let m = DMatrix::from_row_slice(rs.total(), cs.total(), entries);
    Operator::rect(rs, cs, m).expect("entry count")
}

fn projector(dims: &[usize], ket: &[Complex64]) -> ComplexOperator {
    let shape = FactorShape::new(dims.to_vec()).expect("dims");
    Operator::from_fn(shape, |r, col| ket[r] * ket[col].conj()).expect("ket length")
}

/// Two-qubit adaptive protocol with horizon 2.
///
/// Round 1: party 0 is rotated about X while party 1 gets a Hadamard and
/// dephasing, then a routed product measurement reads party 1 in Z and
/// party 0 in Y. Round 2
/// depends on the Y outcome: on `0` party 0 is discarded (dimension 1) and
/// party 1 is measured in Y; on `1` party 0 is reset to `|0⟩` and both are
/// measured jointly in a complex Bell-like basis.
pub fn adaptive_example() -> ComplexProtocol {
    let h = FRAC_1_SQRT_2;
    let z = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let ket0 = projector(&[2], &[one, z]);
    let initial_state = kron(&ket0, &ket0).expect("small");

    // X rotation by θ = −π/12: Y outcome 0 with probability (1 − sin 2θ)/2 = ¾
    let (sn, cs) = (-std::f64::consts::PI / 12.0).sin_cos();
    let u = op(
        &[2],
        &[2],
        &[c(cs, 0.0), c(0.0, -sn), c(0.0, -sn), c(cs, 0.0)],
    );
    // Hadamard followed by dephasing
    let q: f64 = 0.3;
    let (a, b) = ((1.0 - q).sqrt() * h, q.sqrt() * h);
    let dephase = vec![
        op(&[2], &[2], &[c(a, 0.0), c(a, 0.0), c(a, 0.0), c(-a, 0.0)]),
        op(&[2], &[2], &[c(b, 0.0), c(b, 0.0), c(-b, 0.0), c(b, 0.0)]),
    ];
    let z_meas = vec![projector(&[2], &[one, z]), projector(&[2], &[z, one])];
    let y_meas = vec![
        projector(&[2], &[c(h, 0.0), c(0.0, h)]),
        projector(&[2], &[c(h, 0.0), c(0.0, -h)]),
    ];

    let discard = vec![op(&[1], &[2], &[one, z]), op(&[1], &[2], &[z, one])];
    let reset = vec![
        op(&[2], &[2], &[one, z, z, z]),
        op(&[2], &[2], &[z, one, z, z]),
    ];
    let phase = op(&[2], &[2], &[one, z, z, c(0.0, 1.0)]);
    let identity = op(&[2], &[2], &[one, z, z, one]);

    // Y measurement of party 1 with party 0 of dimension 1, as one block
    let y_after_discard: Vec<ComplexOperator> = y_meas
        .iter()
        .map(|e| op(&[1, 2], &[1, 2], &e.row_major()))
        .collect();
    let bell_like: Vec<ComplexOperator> = [
        [one, z, z, c(0.0, 1.0)],
        [one, z, z, c(0.0, -1.0)],
        [z, one, c(0.0, 1.0), z],
        [z, one, c(0.0, -1.0), z],
    ]
    .iter()
    .map(|k| projector(&[2, 2], &k.map(|x| x * h)))
    .collect();

    ComplexProtocol {
        initial_state,
        steps: vec![
            Step::new(Operation::Channel(ChannelOp {
                partition: LocalityLabel::local(2),
                blocks: vec![vec![u], dephase],
            })),
            Step::new(Operation::Instrument(InstrumentOp {
                partition: LocalityLabel::local(2),
                route: Some(vec![1, 0]),
                blocks: vec![z_meas, y_meas],
            })),
            Step::new(Operation::Channel(ChannelOp {
                partition: LocalityLabel::local(2),
                blocks: vec![discard, vec![phase]],
            }))
            .when(&["*.0"]),
            Step::new(Operation::Instrument(InstrumentOp {
                partition: LocalityLabel::global(2),
                route: None,
                blocks: vec![y_after_discard],
            }))
            .when(&["*.0"]),
            Step::new(Operation::Channel(ChannelOp {
                partition: LocalityLabel::local(2),
                blocks: vec![reset, vec![identity]],
            }))
            .when(&["*.1"]),
            Step::new(Operation::Instrument(InstrumentOp {
                partition: LocalityLabel::global(2),
                route: None,
                blocks: vec![bell_like],
            }))
            .when(&["*.1"]),
        ],
    }
}

/// Random adaptive protocol on `parties` qubits with `rounds` channel and
/// instrument pairs. Partitions, routes, Kraus sets (Haar-derived) and
/// instruments are random; from round 2 on, the channel is chosen per
/// outcome of the previous instrument.
pub fn random_protocol<R: Rng + ?Sized>(
    rng: &mut R,
    parties: usize,
    rounds: usize,
) -> ComplexProtocol {
    let all = FactorShape::new(vec![2; parties]).expect("qubits");
    let initial_state = random::density(rng, &all);
    let mut steps = Vec::new();
    let mut previous: Option<InstrumentOp<Complex64>> = None;

    let channel = |rng: &mut R| {
        let partition = random::partition(rng, parties);
        let blocks = partition
            .iter()
            .map(|b| {
                let shape = FactorShape::new(vec![2; b.len()]).expect("qubits");
                let count = rng.gen_range(1..=3);
                random::kraus(rng, &shape, &shape, count).ops
            })
            .collect();
        ChannelOp {
            partition: LocalityLabel { partition },
            blocks,
        }
    };

    for _ in 0..rounds {
        match &previous {
            None => steps.push(Step::new(Operation::Channel(channel(rng)))),
            Some(m) => {
                for x in m.outcomes() {
                    let mut step = Step::new(Operation::Channel(channel(rng)));
                    let prefix_len = steps
                        .iter()
                        .filter(|s| matches!(s.op, Operation::Instrument(_)))
                        .count();
                    let mut pattern = vec!["*".to_string(); prefix_len - 1];
                    pattern.push(render_outcome(&x));
                    step.conditioned_on = Some(pattern);
                    steps.push(step);
                }
            }
        }
        let partition = random::partition(rng, parties);
        let route = random::permutation(rng, parties);
        let blocks = partition
            .iter()
            .map(|b| {
                let shape = FactorShape::new(vec![2; b.len()]).expect("qubits");
                let outcomes = rng.gen_range(2..=3);
                random::instrument(rng, &shape, outcomes)
            })
            .collect();
        let m = InstrumentOp {
            partition: LocalityLabel { partition },
            route: Some(route),
            blocks,
        };
        steps.push(Step::new(Operation::Instrument(m.clone())));
        previous = Some(m);
    }
    ComplexProtocol {
        initial_state,
        steps,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::simulate;
    use rand::SeedableRng;

    #[test]
    fn adaptive_example_is_valid_and_normalized() {
        let p = adaptive_example();
        p.check(1e-12).unwrap();
        let t = simulate(&p).unwrap();
        assert!((t.total_probability() - 1.0).abs() < 1e-12);
        // each round-1 outcome has two or four continuations
        assert_eq!(t.leaves.len(), 2 * 2 + 2 * 4);
    }

    #[test]
    fn adaptive_example_matches_hand_oracle() {
        // Y on party 0 gives 0 w.p. ¾; Z on party 1 is uniform. On Y = 0 the
        // Y measurement of party 1 (a Z eigenstate) is uniform; on Y = 1 the
        // reset state |0 z⟩ splits evenly over the two Bell-like outcomes
        // that contain |0 z⟩.
        let t = simulate(&adaptive_example()).unwrap();
        let mut oracle = std::collections::BTreeMap::new();
        for z in 0..2 {
            for x in 0..2 {
                oracle.insert(format!("{z}.0,{x}"), 3.0 / 16.0);
            }
            for k in 0..4 {
                let p = if k / 2 == z { 1.0 / 16.0 } else { 0.0 };
                oracle.insert(format!("{z}.1,{k}"), p);
            }
        }
        assert_eq!(t.leaves.len(), oracle.len());
        for (key, p) in oracle {
            assert!((t.leaves[&key].probability - p).abs() < 1e-12, "{key}");
        }
    }

    #[test]
    fn random_protocols_are_valid() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(9);
        for n in 1..=3 {
            let p = random_protocol(&mut rng, n, 2);
            p.check(1e-10).unwrap();
            let t = simulate(&p).unwrap();
            assert!((t.total_probability() - 1.0).abs() < 1e-10);
        }
    }
}
