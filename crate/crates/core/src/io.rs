//! File formats: JSON for families, contours, EP lists and monodromy results;
//! CSV for trajectories. Everything is serialized in double precision.

use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::locator::ExceptionalPoint;
use crate::matrix::CMatrix;
use crate::model::{
    circle_contour_from, detour_path, segment, two_level_family, Contour, MatrixFamily, TwoLevelParams,
};
use crate::tracer::{BranchTrajectory, MonodromyMatrix, MonodromyResult};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Pair = [f64; 2];

fn pair(z: Complex64) -> Pair {
    [z.re, z.im]
}

fn unpair(p: Pair) -> Complex64 {
    Complex64::new(p[0], p[1])
}

fn matrix_rows(m: &CMatrix<f64>) -> Vec<Vec<Pair>> {
    m.rows().into_iter().map(|r| r.into_iter().map(pair).collect()).collect()
}

fn matrix_from(rows: &[Vec<Pair>]) -> Result<CMatrix<f64>, ModelError> {
    CMatrix::from_rows(rows.iter().map(|r| r.iter().copied().map(unpair).collect()).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoLevelSpec {
    pub eps1: f64,
    pub eps2: f64,
    pub om1: f64,
    pub om2: f64,
    pub phi: f64,
}

impl TwoLevelSpec {
    pub fn params(&self) -> Result<TwoLevelParams<f64>, ModelError> {
        TwoLevelParams::new(self.eps1, self.eps2, self.om1, self.om2, self.phi)
    }
}

impl From<&TwoLevelParams<f64>> for TwoLevelSpec {
    fn from(p: &TwoLevelParams<f64>) -> Self {
        Self { eps1: p.eps1, eps2: p.eps2, om1: p.om1, om2: p.om2, phi: p.phi }
    }
}

/// `{"dim", "h0", "h1"}` with entries as `[re, im]`, or `{"two_level": {...}}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FamilyFile {
    Matrices { dim: usize, h0: Vec<Vec<Pair>>, h1: Vec<Vec<Pair>> },
    TwoLevel { two_level: TwoLevelSpec },
}

impl FamilyFile {
    pub fn from_family(f: &MatrixFamily<f64>) -> Self {
        FamilyFile::Matrices { dim: f.dim(), h0: matrix_rows(f.h0()), h1: matrix_rows(f.h1()) }
    }

    pub fn family(&self) -> Result<MatrixFamily<f64>, ModelError> {
        match self {
            FamilyFile::Matrices { dim, h0, h1 } => {
                let (a, b) = (matrix_from(h0)?, matrix_from(h1)?);
                if a.dim() != *dim || b.dim() != *dim {
                    return Err(ModelError::DimensionMismatch { h0: a.dim(), h1: b.dim() });
                }
                MatrixFamily::new(a, b)
            }
            FamilyFile::TwoLevel { two_level } => two_level_family(&two_level.params()?),
        }
    }

    pub fn two_level_params(&self) -> Option<Result<TwoLevelParams<f64>, ModelError>> {
        match self {
            FamilyFile::TwoLevel { two_level } => Some(two_level.params()),
            FamilyFile::Matrices { .. } => None,
        }
    }

    pub fn parse(text: &str) -> Result<Self, FormatError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("family serializes")
    }
}

fn one() -> i32 {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ContourFile {
    Circle {
        center: Pair,
        radius: f64,
        samples: usize,
        #[serde(default = "one")]
        turns: i32,
        #[serde(default)]
        start_angle: f64,
    },
    Detour { start: f64, end: f64, bulge: Pair, samples: usize },
    Segment { start: Pair, end: Pair, samples: usize },
    Explicit {
        points: Vec<Pair>,
        #[serde(default)]
        closed: bool,
        #[serde(default)]
        turns: Option<i32>,
    },
}

impl ContourFile {
    pub fn contour(&self) -> Result<Contour<f64>, ModelError> {
        match self {
            ContourFile::Circle { center, radius, samples, turns, start_angle } => {
                circle_contour_from(unpair(*center), *radius, *samples, *turns, *start_angle)
            }
            ContourFile::Detour { start, end, bulge, samples } => {
                detour_path(*start, *end, unpair(*bulge), *samples)
            }
            ContourFile::Segment { start, end, samples } => segment(unpair(*start), unpair(*end), *samples),
            ContourFile::Explicit { points, closed, turns } => {
                let c = Contour::new(points.iter().copied().map(unpair).collect(), *closed)?;
                Ok(match turns {
                    Some(k) => c.with_winding_hint(*k),
                    None => c,
                })
            }
        }
    }

    pub fn parse(text: &str) -> Result<Self, FormatError> {
        Ok(serde_json::from_str(text)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpRecord {
    pub lambda_c: Pair,
    pub levels: [usize; 2],
    pub residual: f64,
    pub multiplicity: usize,
}

impl From<&ExceptionalPoint<f64>> for EpRecord {
    fn from(ep: &ExceptionalPoint<f64>) -> Self {
        Self {
            lambda_c: pair(ep.lambda_c),
            levels: [ep.level_pair.0, ep.level_pair.1],
            residual: ep.residual,
            multiplicity: ep.multiplicity,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnclosedRecord {
    pub lambda_c: Pair,
    pub winding: i32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonodromyRecord {
    pub permutation: Vec<usize>,
    pub phases: Vec<Pair>,
    pub loop_winding: i32,
    pub enclosed_eps: Vec<EnclosedRecord>,
    pub phase_defect: f64,
    pub matrix: Vec<Vec<Pair>>,
    pub matrix_squared: Vec<Vec<Pair>>,
    pub matrix_fourth: Vec<Vec<Pair>>,
    /// `max |M² + I|` and `max |M⁴ − I|`.
    pub distance_m2_to_minus_identity: f64,
    pub distance_m4_to_identity: f64,
    pub trajectory_samples: usize,
}

impl From<&MonodromyResult<f64>> for MonodromyRecord {
    fn from(r: &MonodromyResult<f64>) -> Self {
        let m: MonodromyMatrix<f64> = r.matrix();
        let (m2, m4) = (m.pow(2), m.pow(4));
        Self {
            permutation: r.permutation.clone(),
            phases: r.phases.iter().copied().map(pair).collect(),
            loop_winding: r.loop_winding,
            enclosed_eps: r
                .enclosed_eps
                .iter()
                .map(|e| EnclosedRecord { lambda_c: pair(e.ep.lambda_c), winding: e.winding })
                .collect(),
            phase_defect: r.phase_defect,
            matrix: matrix_rows(&m.m),
            matrix_squared: matrix_rows(&m2.m),
            matrix_fourth: matrix_rows(&m4.m),
            distance_m2_to_minus_identity: m2.distance_to_scalar(Complex64::new(-1.0, 0.0)),
            distance_m4_to_identity: m4.distance_to_scalar(Complex64::new(1.0, 0.0)),
            trajectory_samples: r.trajectory.len(),
        }
    }
}

/// Full-precision decimal rendering used in every CSV cell.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// One row per (sample, branch): step, Re λ, Im λ, branch, Re E, Im E, then
/// right-vector components as interleaved Re/Im.
pub fn write_trajectory_csv<W: Write>(traj: &BranchTrajectory<f64>, mut w: W) -> std::io::Result<()> {
    let n = traj.right_vectors.first().and_then(|v| v.first()).map_or(0, Vec::len);
    let mut header = String::from("step,re_lambda,im_lambda,branch,re_e,im_e");
    for k in 0..n {
        header.push_str(&format!(",re_v{k},im_v{k}"));
    }
    writeln!(w, "{header}")?;
    for s in 0..traj.len() {
        let lam = traj.lambda_samples[s];
        for (k, &branch) in traj.branches.iter().enumerate() {
            let e = traj.values[s][k];
            let mut line = format!("{s},{},{},{branch},{},{}", fmt_f64(lam.re), fmt_f64(lam.im), fmt_f64(e.re), fmt_f64(e.im));
            for z in &traj.right_vectors[s][k] {
                line.push(',');
                line.push_str(&fmt_f64(z.re));
                line.push(',');
                line.push_str(&fmt_f64(z.im));
            }
            writeln!(w, "{line}")?;
        }
    }
    Ok(())
}
