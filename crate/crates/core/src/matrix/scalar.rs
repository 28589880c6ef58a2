use nalgebra::{ComplexField, DMatrix};
use num_complex::Complex64;

use super::json::Entries;
use super::{FactorShape, Field, Operator};
use crate::error::{Error, Result};

/// Entry type of an [`Operator`]: `f64` or `Complex64`.
pub trait Scalar:
    ComplexField<RealField = f64> + Copy + Send + Sync + std::fmt::Debug + 'static
{
    const FIELD: Field;

    fn to_c64(self) -> Complex64;

    /// Functionals giving the coefficients of an operator in the orthonormal
    /// local basis of this field: symmetric matrices for `f64`, Hermitian
    /// matrices for `Complex64`. Each functional is a list of
    /// `(row, col, weight)` and evaluates `Tr[ρ S] = Σ weight·ρ[row, col]`.
    fn basis_functionals(d: usize) -> Vec<Vec<(usize, usize, Self)>>;

    #[doc(hidden)]
    fn to_entries(values: &[Self]) -> Entries;

    #[doc(hidden)]
    fn from_entries(entries: Entries) -> Result<Vec<Self>>;
}

fn symmetric_functionals<T: Scalar>(d: usize) -> Vec<Vec<(usize, usize, T)>> {
    let h = T::from_real(std::f64::consts::FRAC_1_SQRT_2);
    let mut out = Vec::with_capacity(d * (d + 1) / 2);
    for i in 0..d {
        out.push(vec![(i, i, T::one())]);
    }
    for i in 0..d {
        for j in i + 1..d {
            out.push(vec![(i, j, h), (j, i, h)]);
        }
    }
    out
}

impl Scalar for f64 {
    const FIELD: Field = Field::Real;

    fn to_c64(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }

    fn basis_functionals(d: usize) -> Vec<Vec<(usize, usize, f64)>> {
        symmetric_functionals(d)
    }

    fn to_entries(values: &[f64]) -> Entries {
        Entries::Real(values.to_vec())
    }

    fn from_entries(entries: Entries) -> Result<Vec<f64>> {
        match entries {
            Entries::Real(v) => Ok(v),
            Entries::Complex(_) => Err(Error::FieldMismatch {
                left: Field::Real,
                right: Field::Complex,
            }),
        }
    }
}

impl Scalar for Complex64 {
    const FIELD: Field = Field::Complex;

    fn to_c64(self) -> Complex64 {
        self
    }

    fn basis_functionals(d: usize) -> Vec<Vec<(usize, usize, Complex64)>> {
        let mut out = symmetric_functionals(d);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        for i in 0..d {
            for j in i + 1..d {
                out.push(vec![
                    (i, j, Complex64::new(0.0, -h)),
                    (j, i, Complex64::new(0.0, h)),
                ]);
            }
        }
        out
    }

    fn to_entries(values: &[Complex64]) -> Entries {
        Entries::Complex(values.iter().map(|z| [z.re, z.im]).collect())
    }

    fn from_entries(entries: Entries) -> Result<Vec<Complex64>> {
        Ok(match entries {
            Entries::Complex(v) => v
                .into_iter()
                .map(|[re, im]| Complex64::new(re, im))
                .collect(),
            Entries::Real(v) => v.into_iter().map(|re| Complex64::new(re, 0.0)).collect(),
        })
    }
}

/// The orthonormal local basis matching [`Scalar::basis_functionals`], as
/// matrices: diagonal units and normalized symmetric off-diagonal units, plus
/// the imaginary antisymmetric units in the complex case.
pub fn local_basis<T: Scalar>(d: usize) -> Vec<Operator<T>> {
    let shape = FactorShape::new(vec![d]).expect("positive dimension");
    T::basis_functionals(d)
        .into_iter()
        .map(|f| {
            let mut m = DMatrix::<T>::zeros(d, d);
            for (r, c, w) in f {
                // Tr[ρ S] = Σ ρ[r,c] S[c,r]
                m[(c, r)] = w;
            }
            Operator::new(shape.clone(), m).expect("basis element")
        })
        .collect()
}
