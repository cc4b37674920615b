//! JSON model files.
//!
//! Complex scalars are `[re, im]`; matrices are row-major arrays of rows.

use std::collections::BTreeMap;

use anyhow::{bail, ensure, Context, Result};
use serde::{Deserialize, Serialize};
use way_core::models::{Expectation, Expected, NamedModel};
use way_core::num_complex::Complex64;
use way_core::{ComplexMatrix, ConservedPair, LawKind, MeasuringProcess, StateVector, Tolerances};

pub const SCHEMA_VERSION: &str = "1";

pub type Complex = [f64; 2];
pub type Matrix = Vec<Vec<Complex>>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KindName {
    Additive,
    Multiplicative,
}

impl From<LawKind> for KindName {
    fn from(k: LawKind) -> Self {
        match k {
            LawKind::Additive => KindName::Additive,
            LawKind::Multiplicative => KindName::Multiplicative,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConservedEntry {
    pub kind: KindName,
    pub l1: Matrix,
    pub l2: Matrix,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub validation: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cluster_gap: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zero_threshold: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetailedExpectation {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flag: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Either a bare boolean or an object with `flag` or `value`/`tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ExpectedEntry {
    Flag(bool),
    Detailed(DetailedExpectation),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub schema_version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub dim_h: usize,
    pub dim_k: usize,
    pub xi: Vec<Complex>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub psi_list: Vec<Vec<Complex>>,
    pub u: Matrix,
    pub m: Matrix,
    pub a: Matrix,
    #[serde(default)]
    pub conserved: Vec<ConservedEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<ToleranceOverrides>,
    /// Declared outcomes; when empty, preciseness, nondisturbance and
    /// conservation of every pair are expected.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub expected: BTreeMap<String, ExpectedEntry>,
}

/// A validated model file.
#[derive(Debug, Clone)]
pub struct LoadedModel {
    pub model: NamedModel,
    /// Explicit ψ-ensemble; empty when the file has none.
    pub states: Vec<StateVector>,
    pub tol: Tolerances,
}

fn to_c(z: &Complex) -> Complex64 {
    Complex64::new(z[0], z[1])
}

fn from_c(z: Complex64) -> Complex {
    [z.re, z.im]
}

fn matrix_from(field: &str, rows: &Matrix, dim: usize) -> Result<ComplexMatrix> {
    ensure!(
        rows.len() == dim,
        "field `{field}`: expected {dim} rows, found {}",
        rows.len()
    );
    let mut entries = Vec::with_capacity(dim * dim);
    for (i, row) in rows.iter().enumerate() {
        ensure!(
            row.len() == dim,
            "field `{field}`: row {i} has {} entries, expected {dim}",
            row.len()
        );
        entries.extend(row.iter().map(to_c));
    }
    ComplexMatrix::from_row_major(dim, &entries).with_context(|| format!("field `{field}`"))
}

fn hermitian_from(
    field: &str,
    rows: &Matrix,
    dim: usize,
    tol: &Tolerances,
) -> Result<ComplexMatrix> {
    let m = matrix_from(field, rows, dim)?;
    m.ensure_hermitian(tol.validation)
        .with_context(|| format!("field `{field}`"))?;
    Ok(m)
}

fn state_from(field: &str, v: &[Complex], dim: usize) -> Result<StateVector> {
    ensure!(
        v.len() == dim,
        "field `{field}`: expected {dim} amplitudes, found {}",
        v.len()
    );
    let amplitudes: Vec<Complex64> = v.iter().map(to_c).collect();
    StateVector::new(amplitudes).with_context(|| format!("field `{field}`"))
}

fn matrix_to(m: &ComplexMatrix) -> Matrix {
    (0..m.dim())
        .map(|i| (0..m.dim()).map(|j| from_c(m.get(i, j))).collect())
        .collect()
}

fn state_to(s: &StateVector) -> Vec<Complex> {
    s.amplitudes().iter().copied().map(from_c).collect()
}

impl ModelFile {
    /// Parses JSON text; errors carry the line and column.
    pub fn parse(text: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(text).context("malformed model file")?;
        ensure!(
            file.schema_version == SCHEMA_VERSION,
            "unsupported schema_version {:?}, expected {SCHEMA_VERSION:?}",
            file.schema_version
        );
        Ok(file)
    }

    pub fn tolerances(&self, tol_override: Option<f64>) -> Result<Tolerances> {
        let mut tol = Tolerances::default();
        if let Some(o) = &self.tolerances {
            if let Some(v) = o.validation {
                tol.validation = v;
            }
            if let Some(v) = o.cluster_gap {
                tol.cluster_gap = v;
            }
            if let Some(v) = o.zero_threshold {
                tol.zero_threshold = v;
            }
        }
        if let Some(v) = tol_override {
            tol.validation = v;
        }
        ensure!(tol.is_valid(), "tolerances must be positive and finite");
        Ok(tol)
    }

    /// Runs every dimensional, Hermiticity and unitarity validation.
    pub fn build(&self, tol_override: Option<f64>) -> Result<LoadedModel> {
        let tol = self.tolerances(tol_override)?;
        let (dh, dk) = (self.dim_h, self.dim_k);
        ensure!(dh >= 1 && dk >= 1, "dim_h and dim_k must be positive");
        let xi = state_from("xi", &self.xi, dk)?;
        let u = matrix_from("u", &self.u, dh * dk)?;
        let m = hermitian_from("m", &self.m, dk, &tol)?;
        let a = hermitian_from("a", &self.a, dh, &tol)?;
        let process =
            MeasuringProcess::new(dh, xi, u, m, tol).context("invalid measuring process")?;
        let states = self
            .psi_list
            .iter()
            .enumerate()
            .map(|(i, v)| state_from(&format!("psi_list[{i}]"), v, dh))
            .collect::<Result<Vec<_>>>()?;
        let conserved = self
            .conserved
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let l1 = hermitian_from(&format!("conserved[{i}].l1"), &c.l1, dh, &tol)?;
                let l2 = hermitian_from(&format!("conserved[{i}].l2"), &c.l2, dk, &tol)?;
                let kind = match c.kind {
                    KindName::Additive => LawKind::Additive,
                    KindName::Multiplicative => LawKind::Multiplicative,
                };
                ConservedPair::new(l1, l2, kind, &tol)
                    .with_context(|| format!("field `conserved[{i}]`"))
            })
            .collect::<Result<Vec<_>>>()?;
        let expected = if self.expected.is_empty() {
            default_expectations(conserved.len())
        } else {
            self.expected
                .iter()
                .map(|(k, e)| expectation_from(k, e))
                .collect::<Result<Vec<_>>>()?
        };
        Ok(LoadedModel {
            model: NamedModel {
                name: self.name.clone().unwrap_or_else(|| "model".to_string()),
                process,
                observable: a,
                conserved,
                expected,
            },
            states,
            tol,
        })
    }

    /// Serializes a named model; the inverse of [`ModelFile::build`].
    pub fn from_named(model: &NamedModel, psi_list: &[StateVector]) -> Self {
        let p = &model.process;
        let expected = model
            .expected
            .iter()
            .map(|e| (e.key.clone(), expectation_to(e)))
            .collect();
        let tol = p.tolerances();
        let defaults = Tolerances::default();
        let tolerances = (*tol != defaults).then_some(ToleranceOverrides {
            validation: Some(tol.validation),
            cluster_gap: Some(tol.cluster_gap),
            zero_threshold: Some(tol.zero_threshold),
        });
        ModelFile {
            schema_version: SCHEMA_VERSION.to_string(),
            name: Some(model.name.clone()),
            dim_h: p.dim_h(),
            dim_k: p.dim_k(),
            xi: state_to(p.xi()),
            psi_list: psi_list.iter().map(state_to).collect(),
            u: matrix_to(p.unitary()),
            m: matrix_to(p.meter()),
            a: matrix_to(&model.observable),
            conserved: model
                .conserved
                .iter()
                .map(|c| ConservedEntry {
                    kind: c.kind().into(),
                    l1: matrix_to(c.l1()),
                    l2: matrix_to(c.l2()),
                })
                .collect(),
            tolerances,
            expected,
        }
    }

    pub fn to_pretty_json(&self) -> String {
        crate::json::to_pretty(self)
    }
}

fn default_expectations(pairs: usize) -> Vec<Expectation> {
    let mut out = vec![
        Expectation::flag("precise", true, ""),
        Expectation::flag("nondisturbing", true, ""),
    ];
    out.extend((0..pairs).map(|i| Expectation::flag(&format!("pair{i}.conserved"), true, "")));
    out
}

fn expectation_from(key: &str, e: &ExpectedEntry) -> Result<Expectation> {
    Ok(match e {
        ExpectedEntry::Flag(b) => Expectation::flag(key, *b, ""),
        ExpectedEntry::Detailed(d) => {
            let note = d.note.as_deref().unwrap_or("");
            match (d.flag, d.value, d.tolerance) {
                (Some(b), None, None) => Expectation::flag(key, b, note),
                (None, Some(v), Some(t)) if t >= 0.0 && v.is_finite() && t.is_finite() => {
                    Expectation::value(key, v, t, note)
                }
                _ => bail!(
                    "expected `{key}`: give either `flag` or both `value` and a non-negative `tolerance`"
                ),
            }
        }
    })
}

fn expectation_to(e: &Expectation) -> ExpectedEntry {
    let note = (!e.note.is_empty()).then(|| e.note.clone());
    match e.expected {
        Expected::Flag(b) if note.is_none() => ExpectedEntry::Flag(b),
        Expected::Flag(b) => ExpectedEntry::Detailed(DetailedExpectation {
            flag: Some(b),
            value: None,
            tolerance: None,
            note,
        }),
        Expected::Value { value, tolerance } => ExpectedEntry::Detailed(DetailedExpectation {
            flag: None,
            value: Some(value),
            tolerance: Some(tolerance),
            note,
        }),
    }
}
