//! Dense operators with explicit tensor-factor bookkeeping.
//!
//! An [`Operator`] pairs a dense matrix with the factor shapes of its row and
//! column spaces. Most operators are square with identical row and column
//! shapes; rectangular operators appear as Kraus operators of channels that
//! change dimension. Flat indices are row-major over factors: the first
//! factor is the most significant digit, matching the Kronecker product.

mod json;
mod scalar;
mod validate;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use json::AnyOperator;
pub use scalar::{local_basis, Scalar};
pub use validate::{
    validate, DensityOperator, KrausKind, KrausSet, Povm, Validate, ValidityReport, Violation,
    ViolationKind,
};

use crate::error::{Error, Result};

/// Largest side length accepted for any operator.
pub const MAX_SIDE: usize = 4096;

/// Default relative tolerance.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Number field of an operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Field {
    #[serde(rename = "C")]
    Complex,
    #[serde(rename = "R")]
    Real,
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Complex => f.write_str("C"),
            Field::Real => f.write_str("R"),
        }
    }
}

/// Ordered list of tensor-factor dimensions.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct FactorShape(Vec<usize>);

impl TryFrom<Vec<usize>> for FactorShape {
    type Error = Error;
    fn try_from(dims: Vec<usize>) -> Result<Self> {
        FactorShape::new(dims)
    }
}

impl From<FactorShape> for Vec<usize> {
    fn from(s: FactorShape) -> Self {
        s.0
    }
}

impl FactorShape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.contains(&0) {
            return Err(Error::InvalidShape(dims));
        }
        Ok(FactorShape(dims))
    }

    /// Shape with no factors (side length 1).
    pub fn scalar() -> Self {
        FactorShape(Vec::new())
    }

    pub fn dims(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Product of the factor dimensions.
    pub fn total(&self) -> usize {
        self.0.iter().product()
    }

    pub fn concat(&self, other: &FactorShape) -> FactorShape {
        let mut dims = self.0.clone();
        dims.extend_from_slice(&other.0);
        FactorShape(dims)
    }

    /// Shape whose factor `k` is factor `perm[k]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> FactorShape {
        FactorShape(perm.iter().map(|&p| self.0[p]).collect())
    }

    /// Row-major strides: the flat-index weight of each factor.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.0.len()];
        for k in (0..self.0.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.0[k + 1];
        }
        strides
    }

    /// Multi-index digits of a flat index.
    pub fn digits(&self, mut flat: usize) -> Vec<usize> {
        let mut out = vec![0; self.0.len()];
        for k in (0..self.0.len()).rev() {
            out[k] = flat % self.0[k];
            flat /= self.0[k];
        }
        out
    }
}

impl fmt::Display for FactorShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Checks that `perm` is a permutation of `0..n`.
pub fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(Error::PermutationLength {
            got: perm.len(),
            expected: n,
        });
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return Err(Error::NotBijective(perm.to_vec()));
        }
        seen[p] = true;
    }
    Ok(())
}

/// Inverse of a permutation given as `new[k] = old[perm[k]]`.
pub fn inverse_permutation(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (k, &p) in perm.iter().enumerate() {
        inv[p] = k;
    }
    inv
}

/// Dense operator with row and column factor shapes.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator<T: Scalar> {
    rows: FactorShape,
    cols: FactorShape,
    mat: DMatrix<T>,
}

pub type ComplexOperator = Operator<Complex64>;
pub type RealOperator = Operator<f64>;

impl<T: Scalar> Operator<T> {
    /// Square operator whose row and column spaces share `shape`.
    pub fn new(shape: FactorShape, mat: DMatrix<T>) -> Result<Self> {
        Self::rect(shape.clone(), shape, mat)
    }

    pub fn rect(rows: FactorShape, cols: FactorShape, mat: DMatrix<T>) -> Result<Self> {
        let (r, c) = (rows.total(), cols.total());
        if r > MAX_SIDE || c > MAX_SIDE {
            return Err(Error::TooLarge(r.max(c)));
        }
        if mat.nrows() != r || mat.ncols() != c {
            return Err(Error::ShapeMismatch {
                rows: mat.nrows(),
                cols: mat.ncols(),
                expected_rows: r,
                expected_cols: c,
            });
        }
        Ok(Operator { rows, cols, mat })
    }

    /// Square operator from row-major entries.
    pub fn from_row_slice(dims: &[usize], entries: &[T]) -> Result<Self> {
        let shape = FactorShape::new(dims.to_vec())?;
        let n = shape.total();
        if entries.len() != n * n {
            return Err(Error::SizeMismatch(format!(
                "{} entries for side {}",
                entries.len(),
                n
            )));
        }
        Self::new(shape, DMatrix::from_row_slice(n, n, entries))
    }

    pub fn from_fn(shape: FactorShape, f: impl FnMut(usize, usize) -> T) -> Result<Self> {
        let n = shape.total();
        Self::new(shape, DMatrix::from_fn(n, n, f))
    }

    pub fn identity(shape: FactorShape) -> Result<Self> {
        let n = shape.total();
        Self::new(shape, DMatrix::identity(n, n))
    }

    pub fn zeros(shape: FactorShape) -> Result<Self> {
        let n = shape.total();
        Self::new(shape, DMatrix::zeros(n, n))
    }

    /// Row shape; for square operators this is the shape.
    pub fn shape(&self) -> &FactorShape {
        &self.rows
    }

    pub fn row_shape(&self) -> &FactorShape {
        &self.rows
    }

    pub fn col_shape(&self) -> &FactorShape {
        &self.cols
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<T> {
        self.mat
    }

    pub fn nrows(&self) -> usize {
        self.mat.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.mat.ncols()
    }

    /// True when row and column shapes coincide.
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn field(&self) -> Field {
        T::FIELD
    }

    pub fn get(&self, r: usize, c: usize) -> T {
        self.mat[(r, c)]
    }

    /// Row-major copy of the entries.
    pub fn row_major(&self) -> Vec<T> {
        let mut out = Vec::with_capacity(self.mat.len());
        for r in 0..self.mat.nrows() {
            for c in 0..self.mat.ncols() {
                out.push(self.mat[(r, c)]);
            }
        }
        out
    }

    /// Relabels the factor shapes without touching entries.
    pub fn reshape(&self, rows: FactorShape, cols: FactorShape) -> Result<Self> {
        Self::rect(rows, cols, self.mat.clone())
    }

    /// Square relabel helper.
    pub fn with_shape(&self, dims: &[usize]) -> Result<Self> {
        let s = FactorShape::new(dims.to_vec())?;
        self.reshape(s.clone(), s)
    }

    pub fn trace(&self) -> T {
        self.mat.trace()
    }

    pub fn transpose(&self) -> Self {
        Operator {
            rows: self.cols.clone(),
            cols: self.rows.clone(),
            mat: self.mat.transpose(),
        }
    }

    pub fn adjoint(&self) -> Self {
        Operator {
            rows: self.cols.clone(),
            cols: self.rows.clone(),
            mat: self.mat.adjoint(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.mat
            .iter()
            .map(|z| z.modulus_squared())
            .sum::<f64>()
            .sqrt()
    }

    /// Frobenius distance to `other`, ignoring factor labels.
    pub fn distance(&self, other: &Self) -> f64 {
        assert_eq!(
            self.mat.shape(),
            other.mat.shape(),
            "distance: size mismatch"
        );
        self.mat
            .iter()
            .zip(other.mat.iter())
            .map(|(a, b)| (*a - *b).modulus_squared())
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(
            self.mat.shape(),
            other.mat.shape(),
            "max_abs_diff: size mismatch"
        );
        self.mat
            .iter()
            .zip(other.mat.iter())
            .map(|(a, b)| (*a - *b).modulus())
            .fold(0.0, f64::max)
    }

    pub fn scale(&self, s: T) -> Self {
        Operator {
            rows: self.rows.clone(),
            cols: self.cols.clone(),
            mat: &self.mat * s,
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(T::from_real(s))
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::SizeMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Operator {
            rows: self.rows.clone(),
            cols: self.cols.clone(),
            mat: &self.mat + &other.mat,
        })
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        if self.cols.total() != other.rows.total() {
            return Err(Error::SizeMismatch(format!(
                "cannot multiply {} columns by {} rows",
                self.cols.total(),
                other.rows.total()
            )));
        }
        Ok(Operator {
            rows: self.rows.clone(),
            cols: other.cols.clone(),
            mat: &self.mat * &other.mat,
        })
    }

    /// Lifts entries to complex numbers.
    pub fn to_complex(&self) -> ComplexOperator {
        Operator {
            rows: self.rows.clone(),
            cols: self.cols.clone(),
            mat: self.mat.map(|z| z.to_c64()),
        }
    }

    pub fn real_part(&self) -> RealOperator {
        Operator {
            rows: self.rows.clone(),
            cols: self.cols.clone(),
            mat: self.mat.map(|z| z.real()),
        }
    }

    pub fn imag_part(&self) -> RealOperator {
        Operator {
            rows: self.rows.clone(),
            cols: self.cols.clone(),
            mat: self.mat.map(|z| z.imaginary()),
        }
    }

    /// Hermitian part `(a + a†)/2` of a square operator.
    pub fn hermitian_part(&self) -> Self {
        let m = (&self.mat + self.mat.adjoint()) * T::from_real(0.5);
        Operator {
            rows: self.rows.clone(),
            cols: self.cols.clone(),
            mat: m,
        }
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self
            .hermitian_part()
            .mat
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }
}

impl ComplexOperator {
    /// Assembles `re + i·im` from two real operators of equal shape.
    pub fn from_parts(re: &RealOperator, im: &RealOperator) -> Result<Self> {
        if re.rows != im.rows || re.cols != im.cols {
            return Err(Error::SizeMismatch(
                "real and imaginary parts differ in shape".into(),
            ));
        }
        let mat = DMatrix::from_fn(re.nrows(), re.ncols(), |r, c| {
            Complex64::new(re.mat[(r, c)], im.mat[(r, c)])
        });
        Operator::rect(re.rows.clone(), re.cols.clone(), mat)
    }
}

impl<T: Scalar> Add for &Operator<T> {
    type Output = Operator<T>;
    fn add(self, rhs: Self) -> Operator<T> {
        self.checked_add(rhs).expect("operator addition")
    }
}

impl<T: Scalar> Sub for &Operator<T> {
    type Output = Operator<T>;
    fn sub(self, rhs: Self) -> Operator<T> {
        assert!(
            self.rows == rhs.rows && self.cols == rhs.cols,
            "operator subtraction: shape mismatch"
        );
        Operator {
            rows: self.rows.clone(),
            cols: self.cols.clone(),
            mat: &self.mat - &rhs.mat,
        }
    }
}

impl<T: Scalar> Mul for &Operator<T> {
    type Output = Operator<T>;
    fn mul(self, rhs: Self) -> Operator<T> {
        self.checked_mul(rhs).expect("operator product")
    }
}

impl<T: Scalar> Neg for &Operator<T> {
    type Output = Operator<T>;
    fn neg(self) -> Operator<T> {
        self.scale_real(-1.0)
    }
}

/// Kronecker product; shapes concatenate.
pub fn kron<T: Scalar>(a: &Operator<T>, b: &Operator<T>) -> Result<Operator<T>> {
    let rows = a.rows.concat(&b.rows);
    let cols = a.cols.concat(&b.cols);
    if rows.total() > MAX_SIDE || cols.total() > MAX_SIDE {
        return Err(Error::TooLarge(rows.total().max(cols.total())));
    }
    Operator::rect(rows, cols, a.mat.kronecker(&b.mat))
}

/// Kronecker product of a non-empty list, left to right.
pub fn kron_all<T: Scalar>(ops: &[Operator<T>]) -> Result<Operator<T>> {
    let (first, rest) = ops.split_first().ok_or(Error::EmptyOperator)?;
    rest.iter()
        .try_fold(first.clone(), |acc, op| kron(&acc, op))
}

/// For each flat index of the permuted shape, the flat index it reads from.
fn permuted_index_map(shape: &FactorShape, perm: &[usize]) -> Vec<usize> {
    let old_strides = shape.strides();
    let new_shape = shape.permuted(perm);
    let weights: Vec<usize> = perm.iter().map(|&p| old_strides[p]).collect();
    let n = new_shape.total();
    let mut map = Vec::with_capacity(n);
    let mut digits = vec![0usize; perm.len()];
    let mut flat_old = 0usize;
    for _ in 0..n {
        map.push(flat_old);
        // odometer increment over the new digits
        for k in (0..digits.len()).rev() {
            digits[k] += 1;
            flat_old += weights[k];
            if digits[k] < new_shape.0[k] {
                break;
            }
            flat_old -= weights[k] * digits[k];
            digits[k] = 0;
        }
    }
    map
}

/// Conjugates by the factor swap: factor `k` of the result is factor
/// `perm[k]` of `a`. Row and column factors are permuted alike.
pub fn permute_factors<T: Scalar>(a: &Operator<T>, perm: &[usize]) -> Result<Operator<T>> {
    if a.rows.len() != a.cols.len() {
        return Err(Error::FactorCount {
            expected: a.rows.len(),
            found: a.cols.len(),
        });
    }
    check_permutation(perm, a.rows.len())?;
    if perm.iter().enumerate().all(|(k, &p)| k == p) {
        return Ok(a.clone());
    }
    let rmap = permuted_index_map(&a.rows, perm);
    let cmap = permuted_index_map(&a.cols, perm);
    let mat = DMatrix::from_fn(rmap.len(), cmap.len(), |r, c| a.mat[(rmap[r], cmap[c])]);
    Operator::rect(a.rows.permuted(perm), a.cols.permuted(perm), mat)
}

/// Permutation matrix `S` with `S a S† = permute_factors(a, perm)` for any
/// square `a` of shape `shape`. Rows carry the permuted shape.
pub fn permutation_matrix<T: Scalar>(shape: &FactorShape, perm: &[usize]) -> Result<Operator<T>> {
    check_permutation(perm, shape.len())?;
    let map = permuted_index_map(shape, perm);
    let n = map.len();
    let mut mat = DMatrix::<T>::zeros(n, n);
    for (r, &c) in map.iter().enumerate() {
        mat[(r, c)] = T::one();
    }
    Operator::rect(shape.permuted(perm), shape.clone(), mat)
}

/// Traces out every factor not listed in `keep`; kept factors retain their
/// original relative order.
pub fn partial_trace<T: Scalar>(a: &Operator<T>, keep: &[usize]) -> Result<Operator<T>> {
    if !a.is_square() {
        return Err(Error::NotSquare);
    }
    let n = a.rows.len();
    if n == 0 {
        return Err(Error::EmptyOperator);
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if let Some(&bad) = kept.iter().find(|&&k| k >= n) {
        return Err(Error::FactorIndex {
            index: bad,
            count: n,
        });
    }
    let traced: Vec<usize> = (0..n).filter(|k| !kept.contains(k)).collect();
    let strides = a.rows.strides();
    let offsets = |factors: &[usize]| -> Vec<usize> {
        let sub = FactorShape(factors.iter().map(|&f| a.rows.0[f]).collect());
        (0..sub.total())
            .map(|flat| {
                sub.digits(flat)
                    .iter()
                    .zip(factors)
                    .map(|(d, &f)| d * strides[f])
                    .sum()
            })
            .collect()
    };
    let ko = offsets(&kept);
    let to = offsets(&traced);
    let mat = DMatrix::from_fn(ko.len(), ko.len(), |i, j| {
        let mut acc = T::zero();
        for &t in &to {
            acc += a.mat[(ko[i] + t, ko[j] + t)];
        }
        acc
    });
    let shape = FactorShape(kept.iter().map(|&k| a.rows.0[k]).collect());
    Operator::new(shape, mat)
}

/// Frobenius inner product `Tr[a† b]`.
pub fn frobenius<T: Scalar>(a: &Operator<T>, b: &Operator<T>) -> Result<Complex64> {
    if a.mat.shape() != b.mat.shape() {
        return Err(Error::SizeMismatch(format!(
            "{:?} vs {:?}",
            a.mat.shape(),
            b.mat.shape()
        )));
    }
    Ok(a.mat
        .iter()
        .zip(b.mat.iter())
        .map(|(x, y)| (x.conjugate() * *y).to_c64())
        .sum())
}

/// `Tr[a b]` without forming the product.
pub fn trace_of_product<T: Scalar>(a: &Operator<T>, b: &Operator<T>) -> T {
    assert_eq!(a.ncols(), b.nrows());
    assert_eq!(a.nrows(), b.ncols());
    let mut acc = T::zero();
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            acc += a.mat[(i, j)] * b.mat[(j, i)];
        }
    }
    acc
}

/// Extends `k`, acting on the listed factors of a system with input shape
/// `dims`, by the identity on the remaining factors. The result's row shape
/// replaces the acted-on factors by `k`'s row dims, in place.
pub fn embed_local<T: Scalar>(
    k: &Operator<T>,
    factors: &[usize],
    dims: &FactorShape,
) -> Result<Operator<T>> {
    let n = dims.len();
    if k.rows.len() != factors.len() || k.cols.len() != factors.len() {
        return Err(Error::FactorCount {
            expected: factors.len(),
            found: k.cols.len(),
        });
    }
    let mut used = vec![false; n];
    for (idx, &f) in factors.iter().enumerate() {
        if f >= n {
            return Err(Error::FactorIndex { index: f, count: n });
        }
        if used[f] {
            return Err(Error::NotBijective(factors.to_vec()));
        }
        used[f] = true;
        if dims.0[f] != k.cols.0[idx] {
            return Err(Error::SizeMismatch(format!(
                "factor {f} has dim {} but the local operator expects {}",
                dims.0[f], k.cols.0[idx]
            )));
        }
    }
    let rest: Vec<usize> = (0..n).filter(|f| !used[*f]).collect();
    let rest_shape = FactorShape(rest.iter().map(|&f| dims.0[f]).collect());
    let full = kron(k, &Operator::identity(rest_shape)?)?;
    // position in `full` of each original factor
    let mut perm = vec![0; n];
    for (idx, &f) in factors.iter().enumerate() {
        perm[f] = idx;
    }
    for (idx, &f) in rest.iter().enumerate() {
        perm[f] = factors.len() + idx;
    }
    permute_factors(&full, &perm)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sample(dims: &[usize], seed: u64) -> ComplexOperator {
        let shape = FactorShape::new(dims.to_vec()).unwrap();
        let mut s = seed;
        Operator::from_fn(shape, |_, _| {
            s = s
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            let a = ((s >> 33) as f64 / (1u64 << 31) as f64) - 1.0;
            let b = ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5;
            c(a, b)
        })
        .unwrap()
    }

    #[test]
    fn kron_scalars_and_identities() {
        let a = ComplexOperator::from_row_slice(&[1], &[c(2.0, 0.0)]).unwrap();
        let b = ComplexOperator::from_row_slice(&[1], &[c(3.0, 0.0)]).unwrap();
        let k = kron(&a, &b).unwrap();
        assert_eq!(k.get(0, 0), c(6.0, 0.0));
        assert_eq!(k.shape().dims(), &[1, 1]);

        let i2 = RealOperator::identity(FactorShape::new(vec![2]).unwrap()).unwrap();
        let i4 = kron(&i2, &i2).unwrap();
        assert_eq!(i4.matrix(), &DMatrix::<f64>::identity(4, 4));
    }

    #[test]
    fn kron_of_j_squares_to_identity() {
        let j = RealOperator::from_row_slice(&[2], &[0.0, -1.0, 1.0, 0.0]).unwrap();
        let jj = kron(&j, &j).unwrap();
        // explicit entries of J⊗J
        let expected = [
            [0.0, 0.0, 0.0, 1.0],
            [0.0, 0.0, -1.0, 0.0],
            [0.0, -1.0, 0.0, 0.0],
            [1.0, 0.0, 0.0, 0.0],
        ];
        for (r, row) in expected.iter().enumerate() {
            for (col, v) in row.iter().enumerate() {
                assert_eq!(jj.get(r, col), *v);
            }
        }
        assert_eq!((&jj * &jj).matrix(), &DMatrix::<f64>::identity(4, 4));
    }

    #[test]
    fn permute_swaps_basis_states() {
        let mut e = vec![c(0.0, 0.0); 16];
        e[4 + 1] = c(1.0, 0.0); // |01><01|
        let op = ComplexOperator::from_row_slice(&[2, 2], &e).unwrap();
        let sw = permute_factors(&op, &[1, 0]).unwrap();
        assert_eq!(sw.get(2, 2), c(1.0, 0.0)); // |10><10|
        assert_eq!(sw.get(1, 1), c(0.0, 0.0));
        assert_eq!(permute_factors(&op, &[0, 1]).unwrap(), op);
    }

    #[test]
    fn permute_kron_reverses_order() {
        let a = sample(&[2], 1);
        let b = sample(&[3], 2);
        let ab = kron(&a, &b).unwrap();
        let ba = kron(&b, &a).unwrap();
        let sw = permute_factors(&ab, &[1, 0]).unwrap();
        assert_eq!(sw.shape().dims(), &[3, 2]);
        assert!(sw.distance(&ba) < 1e-15);
    }

    #[test]
    fn permute_rejects_bad_perms() {
        let a = sample(&[2, 2], 3);
        assert!(matches!(
            permute_factors(&a, &[0]),
            Err(Error::PermutationLength { .. })
        ));
        assert!(matches!(
            permute_factors(&a, &[0, 0]),
            Err(Error::NotBijective(_))
        ));
    }

    #[test]
    fn partial_trace_of_product_and_bell_state() {
        let a = sample(&[2], 4);
        let b = sample(&[3], 5);
        let ab = kron(&a, &b).unwrap();
        let kept = partial_trace(&ab, &[0]).unwrap();
        assert!(kept.distance(&a.scale(b.trace())) < 1e-14);

        let all = partial_trace(&ab, &[]).unwrap();
        assert_eq!(all.nrows(), 1);
        assert!((all.get(0, 0) - ab.trace()).norm() < 1e-14);

        let h = 0.5;
        let bell = [
            h, 0.0, 0.0, h, //
            0.0, 0.0, 0.0, 0.0, //
            0.0, 0.0, 0.0, 0.0, //
            h, 0.0, 0.0, h,
        ];
        let rho = RealOperator::from_row_slice(&[2, 2], &bell).unwrap();
        let m = partial_trace(&rho, &[0]).unwrap();
        assert_eq!(m.matrix(), &(DMatrix::<f64>::identity(2, 2) * 0.5));
        assert!(matches!(
            partial_trace(&rho, &[2]),
            Err(Error::FactorIndex { .. })
        ));
    }

    #[test]
    fn partial_trace_middle_factor() {
        let a = sample(&[2], 6);
        let b = sample(&[3], 7);
        let d = sample(&[2], 8);
        let abd = kron_all(&[a.clone(), b.clone(), d.clone()]).unwrap();
        let kept = partial_trace(&abd, &[2, 0]).unwrap();
        let expected = kron(&a, &d).unwrap().scale(b.trace());
        assert!(kept.distance(&expected) < 1e-13);
    }

    #[test]
    fn frobenius_examples() {
        let i2 = RealOperator::identity(FactorShape::new(vec![2]).unwrap()).unwrap();
        assert_eq!(frobenius(&i2, &i2).unwrap(), c(2.0, 0.0));
        let j = RealOperator::from_row_slice(&[2], &[0.0, -1.0, 1.0, 0.0]).unwrap();
        let s = RealOperator::from_row_slice(&[2], &[0.3, 1.7, 1.7, -2.0]).unwrap();
        assert_eq!(frobenius(&j, &s).unwrap(), c(0.0, 0.0));

        let a = sample(&[3], 9);
        let b = sample(&[3], 10);
        let mut oracle = c(0.0, 0.0);
        for r in 0..3 {
            for col in 0..3 {
                oracle += a.get(r, col).conj() * b.get(r, col);
            }
        }
        assert!((frobenius(&a, &b).unwrap() - oracle).norm() < 1e-14);
        assert!(frobenius(&a, &sample(&[2], 1)).is_err());
    }

    #[test]
    fn embed_local_places_operator() {
        let a = sample(&[2], 11);
        let b = sample(&[3], 12);
        let d = sample(&[2], 13);
        let dims = FactorShape::new(vec![2, 3, 2]).unwrap();
        let local = embed_local(&d, &[2], &dims).unwrap();
        let abd = kron_all(&[a.clone(), b.clone(), d.clone()]).unwrap();
        let ab1 = kron_all(&[
            a,
            b,
            ComplexOperator::identity(FactorShape::new(vec![2]).unwrap()).unwrap(),
        ])
        .unwrap();
        assert!((&ab1 * &local).distance(&abd) < 1e-13);
    }

    #[test]
    fn embed_local_rectangular() {
        // discard the first of two qubits via <0| and <1|
        let bra0 = ComplexOperator::rect(
            FactorShape::new(vec![1]).unwrap(),
            FactorShape::new(vec![2]).unwrap(),
            DMatrix::from_row_slice(1, 2, &[c(1.0, 0.0), c(0.0, 0.0)]),
        )
        .unwrap();
        let dims = FactorShape::new(vec![2, 2]).unwrap();
        let k = embed_local(&bra0, &[0], &dims).unwrap();
        assert_eq!(k.row_shape().dims(), &[1, 2]);
        assert_eq!(k.col_shape().dims(), &[2, 2]);
        assert_eq!(k.get(1, 1), c(1.0, 0.0));
        assert_eq!(k.get(1, 3), c(0.0, 0.0));
    }
}
