//! Result documents written by the commands and read back by `plot`.

use serde::{Deserialize, Serialize};

use systole_core::lab::{CandidateFamily, InequalityReport, LambdaUpper, SandwichReport, Verdict};
use systole_core::surface::CoverKind;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ResultDoc {
    Spectrum(SpectrumDoc),
    Systole(SystoleDoc),
    Candidates(CandidatesDoc),
    Cover(CoverDoc),
    Reports(ReportBundle),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub resolution: usize,
    pub triangles: usize,
    pub mesh_h: f64,
    pub lambda0: f64,
    /// First nonzero eigenvalue of a closed surface.
    pub lambda1: Option<f64>,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumDoc {
    pub scene: String,
    pub closed: bool,
    pub rows: Vec<SpectrumRow>,
    pub extrapolated: Option<f64>,
    pub error_bar: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystoleDoc {
    pub scene: String,
    pub length: f64,
    pub simple: bool,
    pub certificate: String,
    pub loop_vertices: Vec<usize>,
    /// Exact systole when an independent oracle exists for the model.
    pub reference: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateRow {
    pub id: usize,
    pub family: CandidateFamily,
    pub parameter: f64,
    pub anchor: Option<usize>,
    pub topology: String,
    pub area: f64,
    pub boundary_length: f64,
    pub lambda0: f64,
    pub error_bar: f64,
    pub incompressible: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SandwichDoc {
    pub chi: i64,
    pub systole: f64,
    pub collar_width: f64,
    pub lower_value: f64,
    pub upper_value: f64,
    pub lambda_up: f64,
    pub lower_verdict: Verdict,
    pub upper_verdict: Verdict,
}

impl SandwichDoc {
    pub fn new(chi: i64, systole: f64, r: &SandwichReport) -> Self {
        Self {
            chi,
            systole,
            collar_width: r.collar_width,
            lower_value: r.lower_value,
            upper_value: r.upper_value,
            lambda_up: r.lambda_up,
            lower_verdict: r.lower.verdict,
            upper_verdict: r.upper.verdict,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidatesDoc {
    pub scene: String,
    pub lambda_up: f64,
    pub best: usize,
    pub rejected: usize,
    pub candidates: Vec<CandidateRow>,
    pub lower_bound: Option<f64>,
    pub sandwich: Option<SandwichDoc>,
}

impl CandidatesDoc {
    pub fn new(scene: &str, up: &LambdaUpper) -> Self {
        let candidates = up
            .candidates
            .iter()
            .map(|c| CandidateRow {
                id: c.id,
                family: c.family,
                parameter: c.parameter,
                anchor: c.anchor,
                topology: format!("{:?}", c.summary.topo_class),
                area: c.summary.area,
                boundary_length: c.summary.boundary_length,
                lambda0: c.lambda0.lambda0,
                error_bar: c.error_bar,
                incompressible: c.incompressibility.map(|i| format!("{i:?}")),
            })
            .collect();
        Self {
            scene: scene.to_string(),
            lambda_up: up.value,
            best: up.best,
            rejected: up.rejected,
            candidates,
            lower_bound: None,
            sandwich: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverRowDoc {
    pub sheets: usize,
    pub kind: CoverKind,
    pub area: f64,
    pub lambda0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverDoc {
    pub scene: String,
    pub rows: Vec<CoverRowDoc>,
    pub fitted_exponent: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub holds: usize,
    pub violated: Vec<String>,
    pub inconclusive: Vec<String>,
}

impl Summary {
    pub fn of(reports: &[InequalityReport]) -> Self {
        let tag = |r: &InequalityReport| format!("{} [{}]", r.name, r.instance);
        Self {
            holds: reports.iter().filter(|r| r.verdict == Verdict::Holds).count(),
            violated: reports.iter().filter(|r| r.verdict == Verdict::Violated).map(tag).collect(),
            inconclusive: reports.iter().filter(|r| r.verdict == Verdict::Inconclusive).map(tag).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportBundle {
    pub tool_version: String,
    pub seed: u64,
    pub reports: Vec<InequalityReport>,
    pub summary: Summary,
}
