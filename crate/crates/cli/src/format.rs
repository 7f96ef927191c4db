//! JSON problem and MPC spec files.

use std::fs;
use std::path::Path;

use auglag_core::{BoxSet, LtiModel, Matrix, MpcSpec, ProblemInstance};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// `{n, m, H, q, A, b, lb, ub}` with matrices flattened row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemFile {
    pub n: usize,
    pub m: usize,
    #[serde(rename = "H")]
    pub h: Vec<f64>,
    pub q: Vec<f64>,
    #[serde(rename = "A")]
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub lb: Vec<f64>,
    pub ub: Vec<f64>,
}

impl ProblemFile {
    pub fn from_problem(p: &ProblemInstance) -> Self {
        Self {
            n: p.n(),
            m: p.m(),
            h: p.hessian().as_slice().to_vec(),
            q: p.linear().to_vec(),
            a: p.coupling().as_slice().to_vec(),
            b: p.rhs().to_vec(),
            lb: p.bounds().lower().to_vec(),
            ub: p.bounds().upper().to_vec(),
        }
    }

    pub fn to_problem(&self) -> Result<ProblemInstance, CliError> {
        let h = Matrix::from_row_major(self.n, self.n, self.h.clone())?;
        let a = Matrix::from_row_major(self.m, self.n, self.a.clone())?;
        let bounds = BoxSet::new(self.lb.clone(), self.ub.clone())?;
        Ok(ProblemInstance::new(h, self.q.clone(), a, self.b.clone(), bounds)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxFile {
    pub lb: Vec<f64>,
    pub ub: Vec<f64>,
}

impl BoxFile {
    fn from_box(b: &BoxSet) -> Self {
        Self {
            lb: b.lower().to_vec(),
            ub: b.upper().to_vec(),
        }
    }

    fn to_box(&self) -> Result<BoxSet, CliError> {
        Ok(BoxSet::new(self.lb.clone(), self.ub.clone())?)
    }
}

/// Linear MPC spec; `X_f` defaults to `X`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MpcFile {
    pub n_x: usize,
    pub n_u: usize,
    #[serde(rename = "A_x")]
    pub a_x: Vec<f64>,
    #[serde(rename = "B_u")]
    pub b_u: Vec<f64>,
    #[serde(rename = "N")]
    pub horizon: usize,
    #[serde(rename = "Q")]
    pub q: Vec<f64>,
    #[serde(rename = "R")]
    pub r: Vec<f64>,
    #[serde(rename = "P")]
    pub p: Vec<f64>,
    #[serde(rename = "X")]
    pub x: BoxFile,
    #[serde(rename = "X_f", default, skip_serializing_if = "Option::is_none")]
    pub x_f: Option<BoxFile>,
    #[serde(rename = "U")]
    pub u: BoxFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<f64>>,
}

impl MpcFile {
    pub fn from_spec(spec: &MpcSpec, x0: Option<Vec<f64>>) -> Self {
        Self {
            n_x: spec.n_x(),
            n_u: spec.n_u(),
            a_x: spec.model().a_x.as_slice().to_vec(),
            b_u: spec.model().b_u.as_slice().to_vec(),
            horizon: spec.horizon(),
            q: spec.q().as_slice().to_vec(),
            r: spec.r().as_slice().to_vec(),
            p: spec.p().as_slice().to_vec(),
            x: BoxFile::from_box(spec.state_set()),
            x_f: Some(BoxFile::from_box(spec.terminal_set())),
            u: BoxFile::from_box(spec.input_set()),
            x0,
        }
    }

    pub fn to_spec(&self) -> Result<MpcSpec, CliError> {
        self.to_spec_with_horizon(self.horizon)
    }

    pub fn to_spec_with_horizon(&self, horizon: usize) -> Result<MpcSpec, CliError> {
        let (nx, nu) = (self.n_x, self.n_u);
        let model = LtiModel::new(
            Matrix::from_row_major(nx, nx, self.a_x.clone())?,
            Matrix::from_row_major(nx, nu, self.b_u.clone())?,
        )?;
        let xf = match &self.x_f {
            Some(b) => Some(b.to_box()?),
            None => None,
        };
        Ok(MpcSpec::new(
            model,
            horizon,
            Matrix::from_row_major(nx, nx, self.q.clone())?,
            Matrix::from_row_major(nu, nu, self.r.clone())?,
            Matrix::from_row_major(nx, nx, self.p.clone())?,
            self.x.to_box()?,
            xf,
            self.u.to_box()?,
        )?)
    }
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse(path.display().to_string(), e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).expect("serializable");
    fs::write(path, text + "\n").map_err(|e| CliError::Io(path.display().to_string(), e))
}
