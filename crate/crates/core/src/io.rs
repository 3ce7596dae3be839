//! JSON schemas for inputs and reports.
//!
//! Exact scalars travel as `"p/q"` strings, floats as numbers and complex
//! scalars as `{"re", "im"}`. Output keys keep declaration order and floats
//! are written with 17 significant digits, so identical inputs give
//! byte-identical output.

use std::collections::BTreeSet;
use std::io;

use num_complex::{Complex, Complex64};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::error::Category;
use serde_json::ser::Formatter;

use crate::certify::{CertificateKind, CertificateReport, Method, SignAssignment, Verdict};
use crate::error::{MomentError, Result};
use crate::harmonizable::{Classification, HarmonizableReport, KernelSamples, PsdReport, PsdVerdict};
use crate::index::MultiIndex;
use crate::moment::{DifferenceWitness, MomentTensor, MonotoneVerdict};
use crate::polymeasure::{DiscreteMeasure, DiscretePolymeasure, Semivariation};
use crate::polynomial::Polynomial;
use crate::scalar::{parse_rational, rational_to_string, Field, Rational, Real, ScalarJson, ScalarMode};
use crate::strong::{HankelReport, HankelWitness, Residual, StrongSolution};
use crate::tensor::Tensor;

/// Compact JSON with every `f64` printed as `{:.16e}`.
struct FixedFloat;

impl Formatter for FixedFloat {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }
}

pub fn to_json_string<S: Serialize>(value: &S) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FixedFloat);
    value.serialize(&mut ser).expect("report serialization cannot fail");
    String::from_utf8(out).expect("serde_json writes UTF-8")
}

fn strip_position(message: &str) -> String {
    match message.rfind(" at line ") {
        Some(i) => message[..i].to_string(),
        None => message.to_string(),
    }
}

/// Deserializes `text`, reporting syntax errors with their position and
/// shape errors with the path of the offending field.
pub fn parse_json<D: DeserializeOwned>(text: &str) -> Result<D> {
    let mut de = serde_json::Deserializer::from_str(text);
    let value = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        classify(&inner, Some(path))
    })?;
    de.end().map_err(|e| classify(&e, None))?;
    Ok(value)
}

fn classify(e: &serde_json::Error, path: Option<String>) -> MomentError {
    let message = strip_position(&e.to_string());
    match e.classify() {
        Category::Data => {
            let mut field = path.unwrap_or_else(|| ".".into());
            if let Some(name) = message
                .strip_prefix("missing field `")
                .and_then(|r| r.split('`').next())
            {
                field = if field == "." {
                    name.to_string()
                } else {
                    format!("{field}.{name}")
                };
            }
            MomentError::Schema { field, message }
        }
        _ => MomentError::Parse {
            line: e.line(),
            column: e.column(),
            message,
        },
    }
}

fn scalar<T: Field>(v: &ScalarJson, field: impl FnOnce() -> String) -> Result<T> {
    T::from_json(v).map_err(|m| MomentError::schema(field(), m))
}

// ---------------------------------------------------------------- tensors

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntryJson {
    pub k: Vec<usize>,
    pub v: ScalarJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentTensorJson {
    pub n: usize,
    pub bounds: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<ScalarMode>,
    pub values: Vec<EntryJson>,
}

impl MomentTensorJson {
    pub fn from_tensor<T: Field>(mu: &MomentTensor<T>) -> Self {
        MomentTensorJson {
            n: mu.arity(),
            bounds: mu.bounds().as_slice().to_vec(),
            mode: Some(T::mode()),
            values: mu
                .iter()
                .map(|(k, v)| EntryJson {
                    k: k.into_vec(),
                    v: v.to_json(),
                })
                .collect(),
        }
    }

    /// Requires every index of the bounding box exactly once.
    pub fn to_tensor<T: Field>(&self) -> Result<MomentTensor<T>> {
        if self.n == 0 {
            return Err(MomentError::schema("n", "arity must be at least 1"));
        }
        if self.bounds.len() != self.n {
            return Err(MomentError::schema(
                "bounds",
                format!("has {} entries but n = {}", self.bounds.len(), self.n),
            ));
        }
        if self.values.is_empty() {
            return Err(MomentError::schema("values", "no moments given"));
        }
        let bounds = MultiIndex::new(self.bounds.clone());
        let shape = bounds.box_shape();
        let mut slots: Vec<Option<T>> = vec![None; bounds.box_len()];
        let probe = Tensor::filled(shape.clone(), ());
        for (i, e) in self.values.iter().enumerate() {
            let k = MultiIndex::new(e.k.clone());
            if k.arity() != self.n {
                return Err(MomentError::schema(
                    format!("values[{i}].k"),
                    format!("has {} entries but n = {}", k.arity(), self.n),
                ));
            }
            k.check_within(&bounds)
                .map_err(|err| MomentError::schema(format!("values[{i}].k"), err.to_string()))?;
            let off = probe.offset(k.as_slice());
            if slots[off].is_some() {
                return Err(MomentError::schema(
                    format!("values[{i}].k"),
                    format!("duplicate index {k}"),
                ));
            }
            slots[off] = Some(scalar(&e.v, || format!("values[{i}].v"))?);
        }
        if let Some(off) = slots.iter().position(Option::is_none) {
            let k = MultiIndex::new(probe.unravel(off));
            return Err(MomentError::schema("values", format!("missing moment {k}")));
        }
        Ok(MomentTensor::from_tensor(Tensor::from_vec(
            shape,
            slots.into_iter().map(|v| v.expect("all slots filled")).collect(),
        )))
    }
}

pub fn parse_moment_tensor<T: Field>(text: &str) -> Result<MomentTensor<T>> {
    parse_json::<MomentTensorJson>(text)?.to_tensor()
}

pub fn moment_tensor_to_json<T: Field>(mu: &MomentTensor<T>) -> String {
    to_json_string(&MomentTensorJson::from_tensor(mu))
}

// ---------------------------------------------------------------- polymeasures

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoeffJson {
    pub index: Vec<usize>,
    pub v: ScalarJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolymeasureJson {
    pub n: usize,
    pub atoms: Vec<Vec<String>>,
    pub coeffs: Vec<CoeffJson>,
}

impl PolymeasureJson {
    /// Zero coefficients are omitted.
    pub fn from_polymeasure<T: Field>(g: &DiscretePolymeasure<T>) -> Self {
        let c = g.coeffs();
        PolymeasureJson {
            n: g.arity(),
            atoms: g
                .atoms()
                .iter()
                .map(|a| a.iter().map(rational_to_string).collect())
                .collect(),
            coeffs: c
                .data()
                .iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(off, v)| CoeffJson {
                    index: c.unravel(off),
                    v: v.to_json(),
                })
                .collect(),
        }
    }

    /// Missing coefficients are zero.
    pub fn to_polymeasure<T: Field>(&self) -> Result<DiscretePolymeasure<T>> {
        if self.n == 0 {
            return Err(MomentError::schema("n", "arity must be at least 1"));
        }
        if self.atoms.len() != self.n {
            return Err(MomentError::schema(
                "atoms",
                format!("has {} axes but n = {}", self.atoms.len(), self.n),
            ));
        }
        let mut atoms = Vec::with_capacity(self.n);
        for (axis, list) in self.atoms.iter().enumerate() {
            if list.is_empty() {
                return Err(MomentError::schema(format!("atoms[{axis}]"), "no atoms"));
            }
            let parsed = list
                .iter()
                .enumerate()
                .map(|(j, s)| parse_rational(s).map_err(|m| MomentError::schema(format!("atoms[{axis}][{j}]"), m)))
                .collect::<Result<Vec<Rational>>>()?;
            atoms.push(parsed);
        }
        let shape: Vec<usize> = atoms.iter().map(Vec::len).collect();
        let mut coeffs = Tensor::filled(shape.clone(), T::zero());
        let mut seen = BTreeSet::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            let field = || format!("coeffs[{i}].index");
            if c.index.len() != self.n || c.index.iter().zip(&shape).any(|(j, d)| j >= d) {
                return Err(MomentError::schema(
                    field(),
                    format!("{:?} is outside the atom grid {shape:?}", c.index),
                ));
            }
            if !seen.insert(c.index.clone()) {
                return Err(MomentError::schema(field(), format!("duplicate index {:?}", c.index)));
            }
            coeffs.set(&c.index, scalar(&c.v, || format!("coeffs[{i}].v"))?);
        }
        DiscretePolymeasure::new(atoms, coeffs).map_err(|e| MomentError::schema("atoms", e.to_string()))
    }
}

pub fn parse_polymeasure<T: Field>(text: &str) -> Result<DiscretePolymeasure<T>> {
    parse_json::<PolymeasureJson>(text)?.to_polymeasure()
}

pub fn polymeasure_to_json<T: Field>(g: &DiscretePolymeasure<T>) -> String {
    to_json_string(&PolymeasureJson::from_polymeasure(g))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolysJson {
    pub polys: Vec<Vec<ScalarJson>>,
}

impl PolysJson {
    pub fn to_polys<T: Field>(&self) -> Result<Vec<Polynomial<T>>> {
        self.polys
            .iter()
            .enumerate()
            .map(|(i, p)| {
                p.iter()
                    .enumerate()
                    .map(|(j, c)| scalar(c, || format!("polys[{i}][{j}]")))
                    .collect::<Result<Vec<T>>>()
                    .map(Polynomial::new)
            })
            .collect()
    }
}

// ---------------------------------------------------------------- certificates

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictTag {
    HoldsUpToOrder,
    Violated,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViolationJson {
    pub order: Vec<usize>,
    pub value: ScalarJson,
    pub claimed: ScalarJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateJson {
    pub kind: CertificateKind,
    pub mode: ScalarMode,
    pub scanned_order: Vec<usize>,
    pub constant: ScalarJson,
    pub witness_order: Vec<usize>,
    pub witness_signs: Option<Vec<Vec<i8>>>,
    pub method: Method,
    pub verdict: VerdictTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub violation: Option<ViolationJson>,
    pub extension_norm_bound: ScalarJson,
}

impl CertificateJson {
    pub fn from_report<T: Field>(r: &CertificateReport<T>) -> Self {
        let (verdict, violation) = match &r.verdict {
            Verdict::HoldsUpToOrder => (VerdictTag::HoldsUpToOrder, None),
            Verdict::Inconclusive => (VerdictTag::Inconclusive, None),
            Verdict::Violated { order, value, claimed } => (
                VerdictTag::Violated,
                Some(ViolationJson {
                    order: order.as_slice().to_vec(),
                    value: value.to_json(),
                    claimed: claimed.to_json(),
                }),
            ),
        };
        CertificateJson {
            kind: r.kind,
            mode: r.mode,
            scanned_order: r.scanned_order.as_slice().to_vec(),
            constant: r.constant.to_json(),
            witness_order: r.witness_order.as_slice().to_vec(),
            witness_signs: r.witness_signs.as_ref().map(|s| s.axes().to_vec()),
            method: r.method,
            verdict,
            violation,
            extension_norm_bound: r.extension_norm_bound.to_json(),
        }
    }

    pub fn to_report<T: Field>(&self) -> Result<CertificateReport<T>> {
        let verdict = match (self.verdict, &self.violation) {
            (VerdictTag::HoldsUpToOrder, _) => Verdict::HoldsUpToOrder,
            (VerdictTag::Inconclusive, _) => Verdict::Inconclusive,
            (VerdictTag::Violated, Some(v)) => Verdict::Violated {
                order: MultiIndex::new(v.order.clone()),
                value: scalar(&v.value, || "violation.value".into())?,
                claimed: scalar(&v.claimed, || "violation.claimed".into())?,
            },
            (VerdictTag::Violated, None) => {
                return Err(MomentError::schema(
                    "violation",
                    "a violated verdict needs its violation record",
                ))
            }
        };
        if let Some(signs) = &self.witness_signs {
            if signs.iter().flatten().any(|s| *s != 1 && *s != -1) {
                return Err(MomentError::schema("witness_signs", "entries must be +1 or -1"));
            }
        }
        Ok(CertificateReport {
            kind: self.kind,
            mode: self.mode,
            scanned_order: MultiIndex::new(self.scanned_order.clone()),
            constant: scalar(&self.constant, || "constant".into())?,
            witness_order: MultiIndex::new(self.witness_order.clone()),
            witness_signs: self.witness_signs.clone().map(SignAssignment::new),
            method: self.method,
            verdict,
            extension_norm_bound: scalar(&self.extension_norm_bound, || "extension_norm_bound".into())?,
        })
    }
}

// ---------------------------------------------------------------- monotonicity

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MonotoneTag {
    Holds,
    Violated,
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DifferenceJson {
    pub r: Vec<usize>,
    pub s: Vec<usize>,
    pub value: ScalarJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotoneJson {
    pub verdict: MonotoneTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<DifferenceJson>,
}

impl MonotoneJson {
    pub fn from_verdict<T: Field>(v: &MonotoneVerdict<T>) -> Self {
        let witness = |w: &DifferenceWitness<T>| DifferenceJson {
            r: w.r.as_slice().to_vec(),
            s: w.s.as_slice().to_vec(),
            value: w.value.to_json(),
        };
        match v {
            MonotoneVerdict::Holds { order } => MonotoneJson {
                verdict: MonotoneTag::Holds,
                order: Some(order.as_slice().to_vec()),
                witness: None,
            },
            MonotoneVerdict::Violated(w) => MonotoneJson {
                verdict: MonotoneTag::Violated,
                order: None,
                witness: Some(witness(w)),
            },
            MonotoneVerdict::Indeterminate(w) => MonotoneJson {
                verdict: MonotoneTag::Indeterminate,
                order: None,
                witness: Some(witness(w)),
            },
        }
    }

    pub fn to_verdict<T: Field>(&self) -> Result<MonotoneVerdict<T>> {
        let witness = || -> Result<DifferenceWitness<T>> {
            let w = self
                .witness
                .as_ref()
                .ok_or_else(|| MomentError::schema("witness", "required for this verdict"))?;
            Ok(DifferenceWitness {
                r: MultiIndex::new(w.r.clone()),
                s: MultiIndex::new(w.s.clone()),
                value: scalar(&w.value, || "witness.value".into())?,
            })
        };
        Ok(match self.verdict {
            MonotoneTag::Holds => MonotoneVerdict::Holds {
                order: MultiIndex::new(
                    self.order
                        .clone()
                        .ok_or_else(|| MomentError::schema("order", "required for a holding verdict"))?,
                ),
            },
            MonotoneTag::Violated => MonotoneVerdict::Violated(witness()?),
            MonotoneTag::Indeterminate => MonotoneVerdict::Indeterminate(witness()?),
        })
    }
}

// ---------------------------------------------------------------- Hankel

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HankelTag {
    Hankel,
    Violated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HankelWitnessJson {
    pub k: Vec<usize>,
    pub axis: usize,
    /// `k + 1_axis`
    pub left_index: Vec<usize>,
    pub left: ScalarJson,
    /// `k + 1_{axis+1}`
    pub right_index: Vec<usize>,
    pub right: ScalarJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HankelJson {
    pub verdict: HankelTag,
    pub scanned_order: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<HankelWitnessJson>,
}

impl HankelJson {
    pub fn from_report<T: Field>(r: &HankelReport<T>) -> Self {
        let witness = r.witness.as_ref().map(|w| {
            let n = w.k.arity();
            HankelWitnessJson {
                k: w.k.as_slice().to_vec(),
                axis: w.axis,
                left_index: (&w.k + &MultiIndex::unit(n, w.axis)).into_vec(),
                left: w.left.to_json(),
                right_index: (&w.k + &MultiIndex::unit(n, w.axis + 1)).into_vec(),
                right: w.right.to_json(),
            }
        });
        HankelJson {
            verdict: if witness.is_some() {
                HankelTag::Violated
            } else {
                HankelTag::Hankel
            },
            scanned_order: r.scanned_order.as_slice().to_vec(),
            witness,
        }
    }

    pub fn to_report<T: Field>(&self) -> Result<HankelReport<T>> {
        let witness = match (self.verdict, &self.witness) {
            (HankelTag::Hankel, _) => None,
            (HankelTag::Violated, None) => {
                return Err(MomentError::schema("witness", "required for a violated verdict"))
            }
            (HankelTag::Violated, Some(w)) => Some(HankelWitness {
                k: MultiIndex::new(w.k.clone()),
                axis: w.axis,
                left: scalar(&w.left, || "witness.left".into())?,
                right: scalar(&w.right, || "witness.right".into())?,
            }),
        };
        Ok(HankelReport {
            witness,
            scanned_order: MultiIndex::new(self.scanned_order.clone()),
        })
    }
}

// ---------------------------------------------------------------- measures

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureJson {
    #[serde(rename = "N")]
    pub n_recon: usize,
    pub nodes: Vec<String>,
    pub weights: Vec<ScalarJson>,
    pub mass: ScalarJson,
}

impl MeasureJson {
    pub fn from_measure<T: Field>(m: &DiscreteMeasure<T>, n_recon: usize) -> Self {
        MeasureJson {
            n_recon,
            nodes: m.atoms.iter().map(rational_to_string).collect(),
            weights: m.weights.iter().map(Field::to_json).collect(),
            mass: m.mass().to_json(),
        }
    }
}

fn measure_from_parts<T: Field>(nodes: &[String], weights: &[ScalarJson]) -> Result<DiscreteMeasure<T>> {
    let atoms = nodes
        .iter()
        .enumerate()
        .map(|(i, s)| parse_rational(s).map_err(|m| MomentError::schema(format!("nodes[{i}]"), m)))
        .collect::<Result<Vec<_>>>()?;
    let weights = weights
        .iter()
        .enumerate()
        .map(|(i, w)| scalar(w, || format!("weights[{i}]")))
        .collect::<Result<Vec<T>>>()?;
    DiscreteMeasure::new(atoms, weights).map_err(|e| MomentError::schema("nodes", e.to_string()))
}

impl MeasureJson {
    pub fn to_measure<T: Field>(&self) -> Result<DiscreteMeasure<T>> {
        measure_from_parts(&self.nodes, &self.weights)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualJson {
    pub k: Vec<usize>,
    pub r: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrongSolutionJson {
    #[serde(rename = "N")]
    pub n_recon: usize,
    pub nodes: Vec<String>,
    pub weights: Vec<ScalarJson>,
    pub residuals: Vec<ResidualJson>,
    pub max_residual: f64,
    pub bounded: CertificateJson,
    pub completely_monotone: MonotoneJson,
}

impl StrongSolutionJson {
    pub fn from_solution<T: Field>(s: &StrongSolution<T>) -> Self {
        StrongSolutionJson {
            n_recon: s.n_recon,
            nodes: s.measure.atoms.iter().map(rational_to_string).collect(),
            weights: s.measure.weights.iter().map(Field::to_json).collect(),
            residuals: s
                .residuals
                .iter()
                .map(|r| ResidualJson {
                    k: r.k.as_slice().to_vec(),
                    r: r.r,
                })
                .collect(),
            max_residual: s.max_residual(),
            bounded: CertificateJson::from_report(&s.bounded),
            completely_monotone: MonotoneJson::from_verdict(&s.monotone),
        }
    }

    pub fn to_solution<T: Field>(&self) -> Result<StrongSolution<T>> {
        Ok(StrongSolution {
            measure: measure_from_parts(&self.nodes, &self.weights)?,
            n_recon: self.n_recon,
            residuals: self
                .residuals
                .iter()
                .map(|r| Residual {
                    k: MultiIndex::new(r.k.clone()),
                    r: r.r,
                })
                .collect(),
            bounded: self.bounded.to_report()?,
            monotone: self.completely_monotone.to_verdict()?,
        })
    }
}

// ---------------------------------------------------------------- semivariation

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SemivariationJson {
    pub variation: ScalarJson,
    pub semivariation: ScalarJson,
    pub method: Method,
    pub signs: Vec<Vec<i8>>,
}

impl SemivariationJson {
    pub fn new<T: Field>(variation: &T, s: &Semivariation<T>) -> Self {
        SemivariationJson {
            variation: variation.to_json(),
            semivariation: s.value.to_json(),
            method: s.method,
            signs: s.signs.axes().to_vec(),
        }
    }
}

// ---------------------------------------------------------------- harmonizable

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsdJson {
    pub verdict: PsdVerdict,
    pub min_eigenvalue: Option<f64>,
    pub spectral_norm: f64,
    pub max_asymmetry: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl PsdJson {
    pub fn from_report(r: &PsdReport) -> Self {
        PsdJson {
            verdict: r.verdict,
            min_eigenvalue: r.min_eigenvalue,
            spectral_norm: r.spectral_norm,
            max_asymmetry: r.max_asymmetry,
            note: r.note.clone(),
        }
    }

    pub fn to_report(&self) -> PsdReport {
        PsdReport {
            verdict: self.verdict,
            min_eigenvalue: self.min_eigenvalue,
            spectral_norm: self.spectral_norm,
            max_asymmetry: self.max_asymmetry,
            note: self.note.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarmonizableJson {
    pub classification: Classification,
    pub weak_constant: ScalarJson,
    pub weak_re: CertificateJson,
    pub weak_im: CertificateJson,
    pub psd: PsdJson,
    pub kernel_error_bound: f64,
    pub stationary: HankelJson,
}

impl HarmonizableJson {
    pub fn from_report<R: Real>(r: &HarmonizableReport<R>) -> Self {
        HarmonizableJson {
            classification: r.classification,
            weak_constant: r.weak_constant.to_json(),
            weak_re: CertificateJson::from_report(&r.weak_re),
            weak_im: CertificateJson::from_report(&r.weak_im),
            psd: PsdJson::from_report(&r.psd),
            kernel_error_bound: r.kernel_error_bound,
            stationary: HankelJson::from_report(&r.stationary),
        }
    }

    pub fn to_report<R: Real>(&self) -> Result<HarmonizableReport<R>> {
        Ok(HarmonizableReport {
            weak_re: self.weak_re.to_report()?,
            weak_im: self.weak_im.to_report()?,
            weak_constant: scalar(&self.weak_constant, || "weak_constant".into())?,
            psd: self.psd.to_report(),
            kernel_error_bound: self.kernel_error_bound,
            stationary: self.stationary.to_report::<Complex<R>>()?,
            classification: self.classification,
        })
    }
}

/// `t,t',re,im` rows, one per grid pair, row-major.
pub fn kernel_csv(samples: &KernelSamples) -> String {
    let mut out = String::from("t,t_prime,re,im\n");
    for (l, t) in samples.grid.iter().enumerate() {
        for (k, t2) in samples.grid.iter().enumerate() {
            let v: Complex64 = samples.values[(l, k)];
            out.push_str(&format!("{t:.16e},{t2:.16e},{:.16e},{:.16e}\n", v.re, v.im));
        }
    }
    out
}
