//! Canonical JSON file formats.
//!
//! Objects are written with sorted keys and numbers in shortest round-trip
//! form, so `load(save(x)) == x` bit for bit and identical values produce
//! identical bytes. Matrices are flat column-major arrays except `lambda`,
//! which is `N × d` row-major. Non-finite report values are written as
//! `null`.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::bounds::{BoundReport, GroundTruthModel};
use crate::error::{dim_mismatch, Error};
use crate::harness::{ComponentStudy, SweepReport, TrialOutcome, VerifyReport};
use crate::linalg::{Matrix, OrthogonalFrame};
use crate::tensor::{ComponentMatrix, Tensor3};
use crate::triangularizer::{DescentTrace, MatrixSet};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    File { path: String, source: std::io::Error },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Invalid(#[from] Error),
}

impl IoError {
    pub fn name(&self) -> &'static str {
        match self {
            IoError::File { .. } => "FileError",
            IoError::Json(_) => "MalformedJson",
            IoError::Invalid(e) => e.name(),
        }
    }
}

pub type IoResult<T> = std::result::Result<T, IoError>;

/// Pretty-printed, key-sorted JSON with a trailing newline.
pub fn to_canonical_string<S: Serialize>(value: &S) -> IoResult<String> {
    // `Value` objects are BTreeMaps, so the round trip sorts every key.
    let v = serde_json::to_value(value)?;
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<S: Serialize>(path: &Path, value: &S) -> IoResult<()> {
    let s = to_canonical_string(value)?;
    fs::write(path, s).map_err(|source| IoError::File { path: path.display().to_string(), source })
}

pub fn read_json<D: DeserializeOwned>(path: &Path) -> IoResult<D> {
    let s = fs::read_to_string(path).map_err(|source| IoError::File { path: path.display().to_string(), source })?;
    Ok(serde_json::from_str(&s)?)
}

fn square(d: usize, data: &[f64], what: &str) -> Result<Matrix<f64>, Error> {
    if data.len() != d * d {
        return Err(dim_mismatch(format!("{what}: expected {} entries, got {}", d * d, data.len())));
    }
    Matrix::square(d, data.to_vec())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixSetFile {
    pub d: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub matrices: Vec<Vec<f64>>,
}

impl MatrixSetFile {
    pub fn from_set(set: &MatrixSet<f64>) -> Self {
        Self { d: set.d(), n: set.len(), matrices: set.iter().map(|m| m.as_slice().to_vec()).collect() }
    }

    pub fn to_set(&self) -> Result<MatrixSet<f64>, Error> {
        if self.matrices.len() != self.n {
            return Err(dim_mismatch(format!("N = {} but {} matrices given", self.n, self.matrices.len())));
        }
        let mats = self.matrices.iter().map(|m| square(self.d, m, "matrix")).collect::<Result<Vec<_>, _>>()?;
        MatrixSet::new(mats)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorFile {
    #[serde(rename = "N")]
    pub n: usize,
    pub data: Vec<f64>,
    /// Generating components, `N × d` row-major, when known.
    #[serde(rename = "Z", default, skip_serializing_if = "Option::is_none")]
    pub z: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    /// Norm of the noise tensor.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
}

impl TensorFile {
    pub fn from_tensor(t: &Tensor3<f64>) -> Self {
        Self { n: t.n(), data: t.data().to_vec(), z: None, d: None, sigma: None, eps: None }
    }

    pub fn with_components(mut self, z: &ComponentMatrix<f64>, sigma: f64, eps: f64) -> Self {
        self.z = Some(row_major(z.matrix()));
        self.d = Some(z.d());
        self.sigma = Some(sigma);
        self.eps = Some(eps);
        self
    }

    pub fn to_tensor(&self) -> Result<Tensor3<f64>, Error> {
        Tensor3::new(self.n, self.data.clone())
    }

    pub fn components(&self) -> Result<Option<ComponentMatrix<f64>>, Error> {
        match (&self.z, self.d) {
            (Some(z), Some(d)) => ComponentMatrix::new(from_row_major(self.n, d, z)?).map(Some),
            (None, _) => Ok(None),
            (Some(_), None) => Err(dim_mismatch("Z given without d")),
        }
    }
}

fn row_major(m: &Matrix<f64>) -> Vec<f64> {
    m.transpose().into_vec()
}

fn from_row_major(rows: usize, cols: usize, data: &[f64]) -> Result<Matrix<f64>, Error> {
    if data.len() != rows * cols {
        return Err(dim_mismatch(format!("expected {} entries, got {}", rows * cols, data.len())));
    }
    Ok(Matrix::from_fn(rows, cols, |i, j| data[i * cols + j]))
}

/// A matrix set file extended with the generating model. Loading rebuilds
/// the model from `V`, `lambda`, `W` and `sigma`; `matrices` is informative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruthFile {
    pub d: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub matrices: Vec<Vec<f64>>,
    #[serde(rename = "V")]
    pub v: Vec<f64>,
    pub lambda: Vec<f64>,
    #[serde(rename = "W")]
    pub w: Vec<Vec<f64>>,
    pub sigma: f64,
}

impl GroundTruthFile {
    pub fn from_model(gt: &GroundTruthModel<f64>) -> Self {
        let set = MatrixSetFile::from_set(&gt.observed_set());
        Self {
            d: gt.d(),
            n: gt.n(),
            matrices: set.matrices,
            v: gt.v().as_slice().to_vec(),
            lambda: row_major(gt.lambda()),
            w: gt.noise().iter().map(|w| w.as_slice().to_vec()).collect(),
            sigma: gt.sigma(),
        }
    }

    pub fn to_model(&self) -> Result<GroundTruthModel<f64>, Error> {
        let v = square(self.d, &self.v, "V")?;
        let lambda = from_row_major(self.n, self.d, &self.lambda)?;
        let w = self.w.iter().map(|w| square(self.d, w, "W")).collect::<Result<Vec<_>, _>>()?;
        GroundTruthModel::new(v, lambda, w, self.sigma)
    }
}

/// An orthogonal frame; extra keys (as in a triangularization result) are
/// ignored on load.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameFile {
    pub d: usize,
    #[serde(rename = "U")]
    pub u: Vec<f64>,
}

impl FrameFile {
    pub fn from_frame(u: &OrthogonalFrame<f64>) -> Self {
        Self { d: u.dim(), u: u.matrix().as_slice().to_vec() }
    }

    pub fn to_frame(&self) -> Result<OrthogonalFrame<f64>, Error> {
        OrthogonalFrame::new(square(self.d, &self.u, "U")?)
    }
}

pub fn save_matrix_set(path: &Path, set: &MatrixSet<f64>) -> IoResult<()> {
    write_json(path, &MatrixSetFile::from_set(set))
}

pub fn load_matrix_set(path: &Path) -> IoResult<MatrixSet<f64>> {
    Ok(read_json::<MatrixSetFile>(path)?.to_set()?)
}

pub fn save_tensor(path: &Path, t: &Tensor3<f64>) -> IoResult<()> {
    write_json(path, &TensorFile::from_tensor(t))
}

pub fn load_tensor(path: &Path) -> IoResult<Tensor3<f64>> {
    Ok(read_json::<TensorFile>(path)?.to_tensor()?)
}

pub fn save_ground_truth(path: &Path, gt: &GroundTruthModel<f64>) -> IoResult<()> {
    write_json(path, &GroundTruthFile::from_model(gt))
}

pub fn load_ground_truth(path: &Path) -> IoResult<GroundTruthModel<f64>> {
    Ok(read_json::<GroundTruthFile>(path)?.to_model()?)
}

pub fn save_frame(path: &Path, u: &OrthogonalFrame<f64>) -> IoResult<()> {
    write_json(path, &FrameFile::from_frame(u))
}

pub fn load_frame(path: &Path) -> IoResult<OrthogonalFrame<f64>> {
    Ok(read_json::<FrameFile>(path)?.to_frame()?)
}

pub fn trace_json(trace: &DescentTrace<f64>) -> Value {
    json!({
        "termination": trace.termination.tag(),
        "iterations": trace.iterations(),
        "records": trace.records.iter().map(|r| json!({
            "loss": r.loss,
            "grad_norm": r.grad_norm,
            "step": r.step,
        })).collect::<Vec<_>>(),
    })
}

pub fn bound_report_json(r: &BoundReport<f64>) -> Value {
    let mut map: serde_json::Map<String, Value> = r.scalars().into_iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
    map.insert("predicted_direction".into(), json!(r.predicted_direction.matrix().as_slice()));
    map.insert("observed_alpha".into(), json!(r.observed_alpha));
    Value::Object(map)
}

pub fn trial_outcome_json(o: &TrialOutcome) -> Value {
    json!({
        "trial": o.trial,
        "sigma": o.sigma,
        "final_loss": o.final_loss,
        "iterations": o.iterations,
        "termination": o.termination,
        "frame_index": o.frame_index,
        "observed_alpha": o.observed_alpha,
        "direction_residual": o.direction_residual,
        "alpha_apriori": o.alpha_apriori,
        "alpha_explicit": o.alpha_explicit,
        "alpha_aposteriori": o.alpha_aposteriori,
        "eigenvalue_observed": o.eigenvalue_observed,
        "eigenvalue_bound": o.eigenvalue_bound,
    })
}

pub fn sweep_report_json(r: &SweepReport) -> Value {
    json!({
        "sigmas": r.sigmas,
        "alpha_slope": r.alpha_slope,
        "residual_slope": r.residual_slope,
        "sigma_max": r.sigma_max,
        "warnings": r.warnings,
        "points": r.points.iter().map(|p| json!({
            "sigma": p.sigma,
            "observed_alpha": p.observed_alpha,
            "direction_residual": p.direction_residual,
            "alpha_apriori": p.alpha_apriori,
            "alpha_explicit": p.alpha_explicit,
            "alpha_aposteriori": p.alpha_aposteriori,
            "runs": p.runs.iter().map(trial_outcome_json).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
    })
}

pub fn verify_report_json(r: &VerifyReport) -> Value {
    let c = &r.counts;
    let fractions: serde_json::Map<String, Value> =
        c.fractions().into_iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
    json!({
        "sigma": r.sigma,
        "trials": c.trials,
        "errors": c.errors,
        "fractions": fractions,
        "records": r.records.iter().map(|t| json!({
            "trial": t.trial,
            "error": t.error,
            "apriori": t.apriori,
            "explicit": t.explicit,
            "aposteriori": t.aposteriori,
            "eigenvalue": t.eigenvalue,
            "apriori_le_explicit": t.apriori_le_explicit,
            "outcome": t.outcome.as_ref().map(trial_outcome_json),
        })).collect::<Vec<_>>(),
    })
}

pub fn component_study_json(s: &ComponentStudy) -> Value {
    json!({
        "sigma": s.sigma,
        "eps": s.eps,
        "passed": s.passed,
        "trials": s.records.len(),
        "records": s.records.iter().map(|r| json!({
            "trial": r.trial,
            "observed": r.observed,
            "bound": r.bound,
            "bound_as_stated": r.bound_as_stated,
            "error": r.error,
            "contained": r.contained,
        })).collect::<Vec<_>>(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{gen_ground_truth, GeneratorSpec};
    use proptest::prelude::*;

    fn bits(v: &[f64]) -> Vec<u64> {
        v.iter().map(|x| x.to_bits()).collect()
    }

    proptest! {
        #[test]
        fn matrix_sets_round_trip_bit_exact(
            d in 1usize..4,
            vals in proptest::collection::vec(proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO, 27),
        ) {
            let n = vals.len() / (d * d);
            let mats: Vec<Matrix<f64>> = (0..n)
                .map(|k| Matrix::from_col_major(d, d, vals[k * d * d..(k + 1) * d * d].to_vec()).unwrap())
                .collect();
            let set = MatrixSet::new(mats).unwrap();
            let s = to_canonical_string(&MatrixSetFile::from_set(&set)).unwrap();
            let back = serde_json::from_str::<MatrixSetFile>(&s).unwrap().to_set().unwrap();
            for (a, b) in set.iter().zip(back.iter()) {
                prop_assert_eq!(bits(a.as_slice()), bits(b.as_slice()));
            }
        }
    }

    #[test]
    fn ground_truth_round_trip() {
        let spec = GeneratorSpec { sigma: 1e-3, ..GeneratorSpec::new(3, 4, 2.0, 1.0, 7) };
        let gt = gen_ground_truth(&spec).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("gt.json");
        save_ground_truth(&p, &gt).unwrap();
        let back = load_ground_truth(&p).unwrap();
        assert_eq!(bits(back.v().as_slice()), bits(gt.v().as_slice()));
        assert_eq!(bits(back.lambda().as_slice()), bits(gt.lambda().as_slice()));
        assert_eq!(back.sigma().to_bits(), gt.sigma().to_bits());
        let first = fs::read(&p).unwrap();
        save_ground_truth(&p, &back).unwrap();
        assert_eq!(fs::read(&p).unwrap(), first);
        // a ground-truth file is also a valid matrix-set file
        let set = load_matrix_set(&p).unwrap();
        assert_eq!(set, gt.observed_set());
    }

    #[test]
    fn keys_are_sorted() {
        let s = to_canonical_string(&FrameFile::from_frame(&OrthogonalFrame::identity(2))).unwrap();
        assert!(s.find("\"U\"").unwrap() < s.find("\"d\"").unwrap());
    }

    #[test]
    fn tensor_and_frame_round_trip() {
        let t = Tensor3::from_fn(2, |a, b, c| (a + 2 * b + 4 * c) as f64 / 3.0);
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.json");
        save_tensor(&p, &t).unwrap();
        assert_eq!(bits(load_tensor(&p).unwrap().data()), bits(t.data()));
        let u = OrthogonalFrame::new(Matrix::from_rows(&[[0.6, -0.8], [0.8, 0.6]])).unwrap();
        save_frame(&p, &u).unwrap();
        assert_eq!(load_frame(&p).unwrap(), u);
    }

    #[test]
    fn malformed_inputs() {
        let bad: MatrixSetFile = serde_json::from_str(r#"{"d":2,"N":1,"matrices":[[1,2,3]]}"#).unwrap();
        assert!(matches!(bad.to_set(), Err(Error::DimensionMismatch(_))));
        assert!(serde_json::from_str::<MatrixSetFile>("{\"d\":2}").is_err());
    }
}
