use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{Field, Operator, Scalar};
use crate::error::{Error, Result};

/// Category of a failed validity invariant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    Shape,
    Hermiticity,
    Psd,
    Trace,
    Completeness,
    Subnormalization,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ViolationKind::Shape => "shape",
            ViolationKind::Hermiticity => "Hermiticity",
            ViolationKind::Psd => "PSD",
            ViolationKind::Trace => "unit trace",
            ViolationKind::Completeness => "completeness",
            ViolationKind::Subnormalization => "subnormalization",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub magnitude: f64,
    /// Which element of a family violated the invariant, if applicable.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub element: Option<usize>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} violated by {}", self.kind, self.magnitude)?;
        if let Some(e) = self.element {
            write!(f, " (element {e})")?;
        }
        Ok(())
    }
}

/// List of violated invariants; empty means valid within tolerance.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidityReport {
    pub violations: Vec<Violation>,
}

impl ValidityReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    /// Largest violation magnitude, 0 when valid.
    pub fn worst(&self) -> f64 {
        self.violations
            .iter()
            .map(|v| v.magnitude)
            .fold(0.0, f64::max)
    }

    fn push(&mut self, kind: ViolationKind, magnitude: f64, element: Option<usize>) {
        self.violations.push(Violation {
            kind,
            magnitude,
            element,
        });
    }
}

impl fmt::Display for ValidityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("valid");
        }
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        f.write_str(&parts.join("; "))
    }
}

/// Objects that can check their own validity invariants.
pub trait Validate {
    fn validate(&self, tol: f64) -> ValidityReport;
}

/// Free-function form of [`Validate::validate`].
pub fn validate<V: Validate + ?Sized>(v: &V, tol: f64) -> ValidityReport {
    v.validate(tol)
}

fn hermiticity_defect<T: Scalar>(a: &Operator<T>) -> f64 {
    a.distance(&a.adjoint())
}

/// Reports Hermiticity and PSD violations of a square operator.
fn check_effect<T: Scalar>(
    a: &Operator<T>,
    tol: f64,
    element: Option<usize>,
    out: &mut ValidityReport,
) {
    let scale = a.frobenius_norm();
    let herm = hermiticity_defect(a);
    if herm > tol * scale {
        out.push(ViolationKind::Hermiticity, herm, element);
    }
    let min_ev = a.hermitian_eigenvalues().first().copied().unwrap_or(0.0);
    if min_ev < -tol * scale {
        out.push(ViolationKind::Psd, -min_ev, element);
    }
}

/// Density operator over either field.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct DensityOperator<T: Scalar> {
    op: Operator<T>,
}

impl<T: Scalar> DensityOperator<T> {
    /// Accepts `op` only if it is a valid density operator within `tol`.
    pub fn new(op: Operator<T>, tol: f64) -> Result<Self> {
        let d = DensityOperator { op };
        let report = d.validate(tol);
        if report.is_valid() {
            Ok(d)
        } else {
            Err(Error::Precondition(format!(
                "not a density operator: {report}"
            )))
        }
    }

    pub fn new_unchecked(op: Operator<T>) -> Self {
        DensityOperator { op }
    }

    pub fn op(&self) -> &Operator<T> {
        &self.op
    }

    pub fn into_op(self) -> Operator<T> {
        self.op
    }

    pub fn kind(&self) -> Field {
        T::FIELD
    }
}

impl<T: Scalar> Validate for DensityOperator<T> {
    fn validate(&self, tol: f64) -> ValidityReport {
        let mut out = ValidityReport::default();
        if !self.op.is_square() {
            out.push(ViolationKind::Shape, 1.0, None);
            return out;
        }
        check_effect(&self.op, tol, None, &mut out);
        let tr = (self.op.trace().to_c64() - 1.0).norm();
        if tr > tol {
            out.push(ViolationKind::Trace, tr, None);
        }
        out
    }
}

impl<T: Scalar> Validate for Operator<T> {
    /// An operator on its own validates as a density operator.
    fn validate(&self, tol: f64) -> ValidityReport {
        DensityOperator::new_unchecked(self.clone()).validate(tol)
    }
}

/// Positive operator-valued measure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Povm<T: Scalar> {
    pub effects: Vec<Operator<T>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub labels: Vec<String>,
}

impl<T: Scalar> Povm<T> {
    pub fn new(effects: Vec<Operator<T>>) -> Self {
        Povm {
            effects,
            labels: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }

    /// Label of outcome `k`, defaulting to its index.
    pub fn label(&self, k: usize) -> String {
        self.labels.get(k).cloned().unwrap_or_else(|| k.to_string())
    }
}

impl<T: Scalar> Validate for Povm<T> {
    fn validate(&self, tol: f64) -> ValidityReport {
        let mut out = ValidityReport::default();
        let Some(first) = self.effects.first() else {
            out.push(ViolationKind::Completeness, 1.0, None);
            return out;
        };
        let n = first.nrows();
        let mut sum = DMatrix::<T>::zeros(n, n);
        for (k, e) in self.effects.iter().enumerate() {
            if !e.is_square() || e.shape() != first.shape() {
                out.push(ViolationKind::Shape, 1.0, Some(k));
                continue;
            }
            check_effect(e, tol, Some(k), &mut out);
            sum += e.matrix();
        }
        let defect = (sum - DMatrix::<T>::identity(n, n))
            .iter()
            .map(|z| z.modulus_squared())
            .sum::<f64>()
            .sqrt();
        if defect > tol * (n as f64).sqrt() {
            out.push(ViolationKind::Completeness, defect, None);
        }
        out
    }
}

/// Whether a Kraus family must be trace preserving or only non-increasing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KrausKind {
    #[default]
    Channel,
    Subchannel,
}

/// Operator-sum representation of a (sub)channel. Operators may be
/// rectangular when the channel changes dimension.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct KrausSet<T: Scalar> {
    pub ops: Vec<Operator<T>>,
    #[serde(default)]
    pub kind: KrausKind,
}

impl<T: Scalar> KrausSet<T> {
    pub fn channel(ops: Vec<Operator<T>>) -> Self {
        KrausSet {
            ops,
            kind: KrausKind::Channel,
        }
    }

    /// `Σ K† K` accumulated over the family.
    pub fn gram(&self) -> Option<DMatrix<T>> {
        let first = self.ops.first()?;
        let n = first.ncols();
        let mut g = DMatrix::<T>::zeros(n, n);
        for k in &self.ops {
            g += k.matrix().adjoint() * k.matrix();
        }
        Some(g)
    }

    /// Applies the map to a square operator on the input space.
    pub fn apply(&self, rho: &Operator<T>) -> Operator<T> {
        let mut acc: Option<Operator<T>> = None;
        for k in &self.ops {
            let term = &(k * rho) * &k.adjoint();
            acc = Some(match acc {
                None => term,
                Some(a) => &a + &term,
            });
        }
        acc.expect("non-empty Kraus set")
    }
}

impl<T: Scalar> Validate for KrausSet<T> {
    fn validate(&self, tol: f64) -> ValidityReport {
        let mut out = ValidityReport::default();
        let Some(first) = self.ops.first() else {
            out.push(ViolationKind::Completeness, 1.0, None);
            return out;
        };
        for (k, op) in self.ops.iter().enumerate() {
            if op.row_shape() != first.row_shape() || op.col_shape() != first.col_shape() {
                out.push(ViolationKind::Shape, 1.0, Some(k));
            }
        }
        if !out.is_valid() {
            return out;
        }
        let g = self.gram().expect("non-empty");
        let n = g.nrows();
        match self.kind {
            KrausKind::Channel => {
                let defect = (g - DMatrix::<T>::identity(n, n))
                    .iter()
                    .map(|z| z.modulus_squared())
                    .sum::<f64>()
                    .sqrt();
                if defect > tol * (n as f64).sqrt() {
                    out.push(ViolationKind::Completeness, defect, None);
                }
            }
            KrausKind::Subchannel => {
                let herm = (&g + &g.adjoint()) * T::from_real(0.5);
                let max_ev = herm
                    .symmetric_eigenvalues()
                    .iter()
                    .copied()
                    .fold(f64::NEG_INFINITY, f64::max);
                if max_ev > 1.0 + tol {
                    out.push(ViolationKind::Subnormalization, max_ev - 1.0, None);
                }
            }
        }
        out
    }
}
