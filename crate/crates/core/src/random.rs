//! Random operators for tests, property suites and the CLI's randomized
//! checks. Everything draws from a caller-supplied RNG so runs are
//! reproducible from a seed.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::matrix::{ComplexOperator, FactorShape, KrausSet, Operator, Povm, RealOperator};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Ginibre matrix with i.i.d. standard complex Gaussian entries.
pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(gaussian(rng), gaussian(rng)) * std::f64::consts::FRAC_1_SQRT_2
    })
}

pub fn real_gaussian<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Unstructured complex operator.
pub fn complex_operator<R: Rng + ?Sized>(rng: &mut R, shape: &FactorShape) -> ComplexOperator {
    let n = shape.total();
    Operator::new(shape.clone(), ginibre(rng, n, n)).expect("shape total matches")
}

pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, shape: &FactorShape) -> ComplexOperator {
    complex_operator(rng, shape).hermitian_part()
}

/// Density operator `GG†/Tr[GG†]` from a Ginibre matrix (full rank).
pub fn density<R: Rng + ?Sized>(rng: &mut R, shape: &FactorShape) -> ComplexOperator {
    let n = shape.total();
    let g = ginibre(rng, n, n);
    let m = &g * g.adjoint();
    let tr = m.trace();
    Operator::new(shape.clone(), m / tr).expect("shape total matches")
}

/// Haar-random pure state as a rank-one density operator.
pub fn pure_state<R: Rng + ?Sized>(rng: &mut R, shape: &FactorShape) -> ComplexOperator {
    let n = shape.total();
    let v = ginibre(rng, n, 1);
    let v = &v / Complex64::new(v.norm(), 0.0);
    Operator::new(shape.clone(), &v * v.adjoint()).expect("shape total matches")
}

/// Haar-random unitary via QR of a Ginibre matrix with phase correction.
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, d: usize) -> DMatrix<Complex64> {
    let qr = ginibre(rng, d, d).qr();
    let (q, r) = (qr.q(), qr.r());
    let mut q = q;
    for k in 0..d {
        let p = r[(k, k)];
        let phase = if p.norm() > 0.0 {
            p / p.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..d {
            q[(i, k)] *= phase;
        }
    }
    q
}

/// Random isometry `V` (`V†V = 1`) from `d_in` into `d_out ≥ d_in`.
pub fn isometry<R: Rng + ?Sized>(rng: &mut R, d_in: usize, d_out: usize) -> DMatrix<Complex64> {
    assert!(d_out >= d_in, "isometry needs d_out >= d_in");
    unitary(rng, d_out).columns(0, d_in).into_owned()
}

/// Stinespring-derived Kraus family of a random channel with `count`
/// operators mapping `input` to `output`.
pub fn kraus<R: Rng + ?Sized>(
    rng: &mut R,
    input: &FactorShape,
    output: &FactorShape,
    count: usize,
) -> KrausSet<Complex64> {
    let (di, dout) = (input.total(), output.total());
    assert!(
        dout * count >= di,
        "not enough Kraus operators for an isometry"
    );
    let v = isometry(rng, di, dout * count);
    let ops = (0..count)
        .map(|k| {
            Operator::rect(
                output.clone(),
                input.clone(),
                v.rows(k * dout, dout).into_owned(),
            )
            .expect("shapes")
        })
        .collect();
    KrausSet::channel(ops)
}

/// Measurement operators `N_x` with `Σ N_x† N_x = 1`, square on `shape`.
pub fn instrument<R: Rng + ?Sized>(
    rng: &mut R,
    shape: &FactorShape,
    outcomes: usize,
) -> Vec<ComplexOperator> {
    kraus(rng, shape, shape, outcomes).ops
}

/// POVM from the Gram matrices of a random instrument.
pub fn povm<R: Rng + ?Sized>(rng: &mut R, shape: &FactorShape, outcomes: usize) -> Povm<Complex64> {
    let ops = instrument(rng, shape, outcomes);
    Povm::new(ops.iter().map(|n| &n.adjoint() * n).collect())
}

pub fn real_symmetric<R: Rng + ?Sized>(rng: &mut R, shape: &FactorShape) -> RealOperator {
    let n = shape.total();
    let g = real_gaussian(rng, n, n);
    Operator::new(shape.clone(), (&g + g.transpose()) * 0.5).expect("shape total matches")
}

/// Real density operator `GGᵀ/Tr[GGᵀ]`.
pub fn real_density<R: Rng + ?Sized>(rng: &mut R, shape: &FactorShape) -> RealOperator {
    let n = shape.total();
    let g = real_gaussian(rng, n, n);
    let m = &g * g.transpose();
    let tr = m.trace();
    Operator::new(shape.clone(), m / tr).expect("shape total matches")
}

/// Real POVM from a random orthogonal isometry split into blocks.
pub fn real_povm<R: Rng + ?Sized>(rng: &mut R, shape: &FactorShape, outcomes: usize) -> Povm<f64> {
    let d = shape.total();
    let qr = real_gaussian(rng, d * outcomes, d * outcomes).qr();
    let v = qr.q().columns(0, d).into_owned();
    let effects = (0..outcomes)
        .map(|k| {
            let n = v.rows(k * d, d).into_owned();
            Operator::new(shape.clone(), n.transpose() * n).expect("shape")
        })
        .collect();
    Povm::new(effects)
}

pub fn permutation<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

/// Random partition of `0..n` into non-empty blocks, each sorted, blocks
/// ordered by first element.
pub fn partition<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<Vec<usize>> {
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for k in 0..n {
        let choice = rng.gen_range(0..=blocks.len());
        if choice == blocks.len() {
            blocks.push(vec![k]);
        } else {
            blocks[choice].push(k);
        }
    }
    blocks
}
