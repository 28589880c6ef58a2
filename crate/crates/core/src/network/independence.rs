use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{partial_trace, permute_factors, Operator, Scalar};

/// Product-state and operational independence of a state across a partition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndependenceVerdict {
    pub product_state: bool,
    /// `‖ρ − ⊗ marginals‖_F`
    pub product_residual: f64,
    pub operational: bool,
    /// Largest `|Tr[ρ (⊗ S_g)] − Π_g Tr[ρ_g S_g]|` over the local basis.
    pub operational_residual: f64,
    /// Number of basis products checked.
    pub basis_size: usize,
    pub tol: f64,
}

fn check_partition(partition: &[Vec<usize>], n: usize) -> Result<Vec<usize>> {
    let order: Vec<usize> = partition.concat();
    let mut seen = vec![false; n];
    for &f in &order {
        if f >= n || seen[f] {
            return Err(Error::Precondition(format!(
                "partition {partition:?} does not cover the {n} factors exactly once"
            )));
        }
        seen[f] = true;
    }
    if order.len() != n || partition.iter().any(|g| g.is_empty()) {
        return Err(Error::Precondition(format!(
            "partition {partition:?} does not cover the {n} factors exactly once"
        )));
    }
    Ok(order)
}

/// Coefficients of `op` (square, side Π d_g) in the product of the
/// orthonormal local bases of each group. Index order follows the groups,
/// first group most significant.
fn basis_coefficients<T: Scalar>(op: &Operator<T>, group_dims: &[usize]) -> Vec<T> {
    let n = op.nrows();
    let l = group_dims.len();
    // realign ρ[(r_0..r_L), (c_0..c_L)] into v[(r_0 c_0), (r_1 c_1), …]
    let mut strides = vec![1usize; l];
    for g in (0..l.saturating_sub(1)).rev() {
        strides[g] = strides[g + 1] * group_dims[g + 1] * group_dims[g + 1];
    }
    let digits: Vec<Vec<usize>> = (0..n)
        .map(|mut flat| {
            let mut d = vec![0; l];
            for g in (0..l).rev() {
                d[g] = flat % group_dims[g];
                flat /= group_dims[g];
            }
            d
        })
        .collect();
    let mut v = vec![T::zero(); n * n];
    let m = op.matrix();
    for r in 0..n {
        for c in 0..n {
            let mut idx = 0;
            for g in 0..l {
                idx += (digits[r][g] * group_dims[g] + digits[c][g]) * strides[g];
            }
            v[idx] = m[(r, c)];
        }
    }
    // contract each group's pair index against its basis functionals
    let mut cur: Vec<usize> = group_dims.iter().map(|d| d * d).collect();
    for g in 0..l {
        let funcs = T::basis_functionals(group_dims[g]);
        let pre: usize = cur[..g].iter().product();
        let post: usize = cur[g + 1..].iter().product();
        let (old, new) = (cur[g], funcs.len());
        let d = group_dims[g];
        let mut out = vec![T::zero(); pre * new * post];
        for p in 0..pre {
            for (b, f) in funcs.iter().enumerate() {
                let dst = (p * new + b) * post;
                for &(r, c, w) in f {
                    let src = (p * old + r * d + c) * post;
                    for q in 0..post {
                        out[dst + q] += w * v[src + q];
                    }
                }
            }
        }
        v = out;
        cur[g] = new;
    }
    v
}

/// Decides product-state and operational independence of `state` across
/// `partition` (groups of factor indices covering every factor once).
///
/// Operational independence is checked on a spanning local basis per group
/// (symmetric matrices over the reals, Hermitian over the complex numbers);
/// both sides of the factorization identity are multilinear in the local
/// effects, so this is equivalent to checking every local measurement.
pub fn check_independence<T: Scalar>(
    state: &Operator<T>,
    partition: &[Vec<usize>],
    tol: f64,
) -> Result<IndependenceVerdict> {
    if !state.is_square() {
        return Err(Error::NotSquare);
    }
    let dims = state.shape().dims().to_vec();
    let order = check_partition(partition, dims.len())?;
    let grouped = permute_factors(state, &order)?;
    let group_dims: Vec<usize> = partition
        .iter()
        .map(|g| g.iter().map(|&f| dims[f]).product())
        .collect();
    let grouped = grouped.with_shape(&group_dims)?;
    let marginals: Vec<Operator<T>> = (0..group_dims.len())
        .map(|g| partial_trace(&grouped, &[g]))
        .collect::<Result<_>>()?;

    // product residual with the Kronecker product formed entrywise
    let n = grouped.nrows();
    let l = group_dims.len();
    let digits: Vec<Vec<usize>> = (0..n).map(|i| grouped.shape().digits(i)).collect();
    let m = grouped.matrix();
    let mut sq = 0.0;
    for r in 0..n {
        for c in 0..n {
            let mut prod = T::one();
            for g in 0..l {
                prod *= marginals[g].get(digits[r][g], digits[c][g]);
            }
            sq += (m[(r, c)] - prod).modulus_squared();
        }
    }
    let product_residual = sq.sqrt();

    let joint = basis_coefficients(&grouped, &group_dims);
    let local: Vec<Vec<T>> = marginals
        .iter()
        .zip(&group_dims)
        .map(|(mg, &d)| basis_coefficients(mg, &[d]))
        .collect();
    let sizes: Vec<usize> = local.iter().map(|c| c.len()).collect();
    let mut idx = vec![0usize; l];
    let mut worst = 0.0f64;
    for value in &joint {
        let mut prod = T::one();
        for g in 0..l {
            prod *= local[g][idx[g]];
        }
        worst = worst.max((*value - prod).modulus());
        for g in (0..l).rev() {
            idx[g] += 1;
            if idx[g] < sizes[g] {
                break;
            }
            idx[g] = 0;
        }
    }

    let scale = state.frobenius_norm().max(f64::MIN_POSITIVE);
    Ok(IndependenceVerdict {
        product_state: product_residual <= tol * scale,
        product_residual,
        operational: worst <= tol * scale,
        operational_residual: worst,
        basis_size: joint.len(),
        tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{kron, local_basis, trace_of_product, FactorShape, RealOperator};
    use crate::random;
    use num_complex::Complex64;
    use rand::SeedableRng;

    fn shape(d: &[usize]) -> FactorShape {
        FactorShape::new(d.to_vec()).unwrap()
    }

    #[test]
    fn product_of_random_qubits_is_independent() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(1);
        let a = random::density(&mut rng, &shape(&[2]));
        let b = random::density(&mut rng, &shape(&[2]));
        let v = check_independence(&kron(&a, &b).unwrap(), &[vec![0], vec![1]], 1e-9).unwrap();
        assert!(v.product_state && v.operational);
        assert!(v.product_residual <= 1e-12);
    }

    #[test]
    fn caves_state_half() {
        let i = crate::embedding::unit_i();
        let j = crate::embedding::unit_j();
        let state =
            (&kron(&i, &i).unwrap() - &kron(&j, &j).unwrap().scale_real(0.5)).scale_real(0.25);
        let v = check_independence(&state, &[vec![0], vec![1]], 1e-9).unwrap();
        assert!(!v.product_state);
        assert!(v.operational);
        assert_eq!(v.basis_size, 9);
    }

    #[test]
    fn singlet_is_dependent_against_pauli_oracle() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let psi = [0.0, h, -h, 0.0];
        let singlet = Operator::<Complex64>::from_fn(shape(&[2, 2]), |r, c| {
            Complex64::new(psi[r] * psi[c], 0.0)
        })
        .unwrap();
        let v = check_independence(&singlet, &[vec![0], vec![1]], 1e-9).unwrap();
        assert!(!v.product_state && !v.operational);
        // brute force: ⟨Z⊗Z⟩ = −1 while the marginals give 0
        let z = Operator::<Complex64>::from_row_slice(
            &[2],
            &[1.0.into(), 0.0.into(), 0.0.into(), (-1.0).into()],
        )
        .unwrap();
        let zz = kron(&z, &z).unwrap();
        assert!((trace_of_product(&singlet, &zz).re + 1.0).abs() < 1e-12);
    }

    #[test]
    fn coefficients_match_explicit_basis_sweep() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(2);
        let rho = random::real_density(&mut rng, &shape(&[2, 3]));
        let coeffs = basis_coefficients(&rho, &[2, 3]);
        let b2 = local_basis::<f64>(2);
        let b3 = local_basis::<f64>(3);
        let mut k = 0;
        for s in &b2 {
            for t in &b3 {
                let st: RealOperator = kron(s, t).unwrap();
                assert!((coeffs[k] - trace_of_product(&rho, &st)).abs() < 1e-14);
                k += 1;
            }
        }
    }

    #[test]
    fn non_contiguous_partition() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(4);
        let a = random::density(&mut rng, &shape(&[2, 2]));
        let b = random::density(&mut rng, &shape(&[3]));
        // factors: a0, b, a1
        let ab = kron(&a, &b).unwrap();
        let state = permute_factors(&ab, &[0, 2, 1]).unwrap();
        let v = check_independence(&state, &[vec![0, 2], vec![1]], 1e-9).unwrap();
        assert!(v.product_state);
        let w = check_independence(&state, &[vec![0], vec![1, 2]], 1e-9).unwrap();
        assert!(!w.product_state);
    }

    #[test]
    fn invalid_partitions() {
        let rho = RealOperator::identity(shape(&[2, 2])).unwrap();
        assert!(check_independence(&rho, &[vec![0]], 1e-9).is_err());
        assert!(check_independence(&rho, &[vec![0, 1], vec![1]], 1e-9).is_err());
        assert!(check_independence(&rho, &[vec![0], vec![2]], 1e-9).is_err());
    }
}
