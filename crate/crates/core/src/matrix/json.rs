use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{kron, ComplexOperator, FactorShape, Field, Operator, RealOperator, Scalar};
use crate::error::{Error, Result};

/// Row-major entry list as it appears in JSON.
#[doc(hidden)]
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entries {
    Real(Vec<f64>),
    Complex(Vec<[f64; 2]>),
}

impl Entries {
    fn len(&self) -> usize {
        match self {
            Entries::Real(v) => v.len(),
            Entries::Complex(v) => v.len(),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct OperatorJson {
    dims: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    col_dims: Option<Vec<usize>>,
    field: Field,
    entries: Entries,
}

impl OperatorJson {
    fn from_op<T: Scalar>(op: &Operator<T>) -> Self {
        OperatorJson {
            dims: op.rows.dims().to_vec(),
            col_dims: (op.rows != op.cols).then(|| op.cols.dims().to_vec()),
            field: T::FIELD,
            entries: T::to_entries(&op.row_major()),
        }
    }

    fn shapes(&self) -> Result<(FactorShape, FactorShape)> {
        let rows = FactorShape::new(self.dims.clone())?;
        let cols = match &self.col_dims {
            Some(c) => FactorShape::new(c.clone())?,
            None => rows.clone(),
        };
        let expected = rows.total() * cols.total();
        if self.entries.len() != expected {
            return Err(Error::Parse(format!(
                "operator with dims {:?} needs {} entries, found {}",
                self.dims,
                expected,
                self.entries.len()
            )));
        }
        let declared = match self.entries {
            Entries::Real(_) => Field::Real,
            Entries::Complex(_) => Field::Complex,
        };
        if declared != self.field {
            return Err(Error::Parse(format!(
                "field \"{}\" does not match the entry format",
                self.field
            )));
        }
        Ok((rows, cols))
    }

    fn into_op<T: Scalar>(self) -> Result<Operator<T>> {
        let (rows, cols) = self.shapes()?;
        let values = T::from_entries(self.entries)?;
        let mat = DMatrix::from_row_slice(rows.total(), cols.total(), &values);
        Operator::rect(rows, cols, mat)
    }
}

impl<T: Scalar> Serialize for Operator<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        OperatorJson::from_op(self).serialize(s)
    }
}

impl<'de, T: Scalar> Deserialize<'de> for Operator<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = OperatorJson::deserialize(d)?;
        j.into_op().map_err(serde::de::Error::custom)
    }
}

/// An operator whose field is only known at run time, as read from JSON.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyOperator {
    Complex(ComplexOperator),
    Real(RealOperator),
}

impl AnyOperator {
    pub fn field(&self) -> Field {
        match self {
            AnyOperator::Complex(_) => Field::Complex,
            AnyOperator::Real(_) => Field::Real,
        }
    }

    /// Kronecker product; operands must share a field.
    pub fn kron(&self, other: &AnyOperator) -> Result<AnyOperator> {
        match (self, other) {
            (AnyOperator::Complex(a), AnyOperator::Complex(b)) => {
                Ok(AnyOperator::Complex(kron(a, b)?))
            }
            (AnyOperator::Real(a), AnyOperator::Real(b)) => Ok(AnyOperator::Real(kron(a, b)?)),
            _ => Err(Error::FieldMismatch {
                left: self.field(),
                right: other.field(),
            }),
        }
    }

    pub fn to_complex(&self) -> ComplexOperator {
        match self {
            AnyOperator::Complex(a) => a.clone(),
            AnyOperator::Real(a) => a.to_complex(),
        }
    }
}

impl Serialize for AnyOperator {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            AnyOperator::Complex(a) => a.serialize(s),
            AnyOperator::Real(a) => a.serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for AnyOperator {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = OperatorJson::deserialize(d)?;
        let op = match j.field {
            Field::Complex => {
                AnyOperator::Complex(j.into_op::<Complex64>().map_err(serde::de::Error::custom)?)
            }
            Field::Real => AnyOperator::Real(j.into_op::<f64>().map_err(serde::de::Error::custom)?),
        };
        Ok(op)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_round_trip() {
        let op = ComplexOperator::from_row_slice(
            &[2],
            &[
                Complex64::new(0.1, 0.0),
                Complex64::new(1.0 / 3.0, -2.5e-7),
                Complex64::new(-7.0, 1e-300),
                Complex64::new(0.0, std::f64::consts::PI),
            ],
        )
        .unwrap();
        let s = serde_json::to_string(&op).unwrap();
        assert!(s.contains("\"field\":\"C\""));
        let back: ComplexOperator = serde_json::from_str(&s).unwrap();
        assert!(back.max_abs_diff(&op) <= 1e-15);
    }

    #[test]
    fn real_round_trip_and_field_dispatch() {
        let op = RealOperator::from_row_slice(&[1, 2], &[0.5, -0.25, 0.125, 2.0]).unwrap();
        let s = serde_json::to_string(&op).unwrap();
        let any: AnyOperator = serde_json::from_str(&s).unwrap();
        assert_eq!(any, AnyOperator::Real(op.clone()));
        let back: RealOperator = serde_json::from_str(&s).unwrap();
        assert_eq!(back, op);
    }

    #[test]
    fn rectangular_round_trip() {
        let op = RealOperator::rect(
            FactorShape::new(vec![1]).unwrap(),
            FactorShape::new(vec![2]).unwrap(),
            DMatrix::from_row_slice(1, 2, &[1.0, 0.0]),
        )
        .unwrap();
        let back: RealOperator =
            serde_json::from_str(&serde_json::to_string(&op).unwrap()).unwrap();
        assert_eq!(back, op);
    }

    #[test]
    fn rejects_wrong_entry_count_and_field() {
        let bad = r#"{"dims":[2],"field":"R","entries":[1,0,0]}"#;
        assert!(serde_json::from_str::<RealOperator>(bad).is_err());
        let complex = r#"{"dims":[1],"field":"C","entries":[[1,0]]}"#;
        assert!(serde_json::from_str::<RealOperator>(complex).is_err());
        let mislabeled = r#"{"dims":[1],"field":"C","entries":[1]}"#;
        assert!(serde_json::from_str::<ComplexOperator>(mislabeled).is_err());
    }

    #[test]
    fn kron_field_mismatch() {
        let r = AnyOperator::Real(RealOperator::from_row_slice(&[1], &[1.0]).unwrap());
        let c = AnyOperator::Complex(
            ComplexOperator::from_row_slice(&[1], &[Complex64::new(1.0, 0.0)]).unwrap(),
        );
        assert!(matches!(r.kron(&c), Err(Error::FieldMismatch { .. })));
        assert!(r.kron(&r).is_ok());
    }
}
