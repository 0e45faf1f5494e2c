//! Serializable report shapes. Every command emits one JSON document
//! {version, config, command, results, summary}; the config echo plus the
//! crate version make a report reproducible from the file alone.

use cyclink_core::exact::Rat;
use cyclink_core::mixedpoly::{ComponentKind, GraphComponent};
use cyclink_core::sampler::LevelProbe;
use cyclink_core::transversal::{CellOutcome, CertSummary, SampleRecord, TracePoint};
use cyclink_core::weights::{WeightError, WeightSystem};
use serde::Serialize;

use crate::config::RunConfig;

#[derive(Serialize)]
pub struct Report<'a, R, S> {
    pub version: &'static str,
    pub config: &'a RunConfig,
    pub command: &'static str,
    pub results: &'a R,
    pub summary: &'a S,
}

/// A weight system or the reason there is none.
#[derive(Serialize)]
pub struct WeightOutcome {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<i64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degree: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl From<Result<WeightSystem, WeightError>> for WeightOutcome {
    fn from(r: Result<WeightSystem, WeightError>) -> Self {
        match r {
            Ok(ws) => WeightOutcome {
                weights: Some(ws.weights),
                degree: Some(ws.degree),
                error: None,
            },
            Err(e) => WeightOutcome {
                weights: None,
                degree: None,
                error: Some(e.to_string()),
            },
        }
    }
}

#[derive(Serialize)]
pub struct WeightsRow {
    pub t: f64,
    pub simplicial: bool,
    pub full: bool,
    pub polar: WeightOutcome,
    /// Only present at the endpoints; interior members have no radial
    /// weight system.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radial: Option<WeightOutcome>,
}

#[derive(Serialize)]
pub struct WeightsSummary {
    pub det_nm: Option<i64>,
    /// Interconnection graph components as "kind[vertices]" labels.
    pub graph: Vec<String>,
    pub violations: Vec<String>,
    pub pass: bool,
}

pub fn component_label(c: &GraphComponent) -> String {
    let kind = match c.kind {
        ComponentKind::Isolated => "isolated",
        ComponentKind::Bamboo => "bamboo",
        ComponentKind::Cycle => "cycle",
        ComponentKind::Other => "other",
    };
    let verts: Vec<String> = c.vertices.iter().map(|v| v.to_string()).collect();
    format!("{kind}[{}]", verts.join(","))
}

#[derive(Serialize)]
pub struct RecordRow {
    pub t: f64,
    pub r: f64,
    pub w_re: Vec<f64>,
    pub w_im: Vec<f64>,
    pub nullity: Vec<usize>,
    pub sigma_min: f64,
    /// null when the germ construction failed.
    pub dr_ds: Option<Vec<f64>>,
    pub radial_derivative: Option<f64>,
    pub pass: bool,
}

impl RecordRow {
    pub fn from_record(rec: &SampleRecord) -> RecordRow {
        RecordRow {
            t: rec.t,
            r: rec.r,
            w_re: rec.w.iter().map(|c| c.re).collect(),
            w_im: rec.w.iter().map(|c| c.im).collect(),
            nullity: rec.nullity.clone(),
            sigma_min: rec.sigma_min,
            dr_ds: rec.dr_ds.clone(),
            radial_derivative: rec.radial_derivative,
            pass: rec.pass,
        }
    }
}

#[derive(Serialize)]
pub struct CellReport {
    pub t: f64,
    pub r: f64,
    pub records: Vec<RecordRow>,
    pub convergence_failures: usize,
    pub infeasible_patterns: Vec<Vec<usize>>,
}

impl CellReport {
    pub fn from_cell(cell: &CellOutcome) -> CellReport {
        CellReport {
            t: cell.t,
            r: cell.r,
            records: cell.records.iter().map(RecordRow::from_record).collect(),
            convergence_failures: cell.convergence_failures,
            infeasible_patterns: cell.infeasible_patterns.clone(),
        }
    }
}

#[derive(Serialize)]
pub struct CertifySummary {
    pub cells: usize,
    pub records: usize,
    pub direct_passes: usize,
    pub constructive_passes: usize,
    pub disagreements: usize,
    pub convergence_failures: usize,
    pub infeasible_patterns: usize,
    pub all_pass: bool,
    pub vacuous: bool,
}

impl CertifySummary {
    pub fn from_summary(s: &CertSummary) -> CertifySummary {
        CertifySummary {
            cells: s.cells,
            records: s.records,
            direct_passes: s.direct_passes,
            constructive_passes: s.constructive_passes,
            disagreements: s.disagreements,
            convergence_failures: s.convergence_failures,
            infeasible_patterns: s.infeasible_patterns,
            all_pass: s.all_pass,
            vacuous: s.vacuous,
        }
    }
}

#[derive(Serialize)]
pub struct TraceRow {
    pub s: f64,
    pub radii: Vec<f64>,
    pub w_re: Vec<f64>,
    pub w_im: Vec<f64>,
    pub residual: f64,
    pub converged: bool,
    pub iterations: usize,
}

impl TraceRow {
    pub fn from_point(p: &TracePoint) -> TraceRow {
        TraceRow {
            s: p.s,
            radii: p.radii.clone(),
            w_re: p.w.iter().map(|c| c.re).collect(),
            w_im: p.w.iter().map(|c| c.im).collect(),
            residual: p.residual,
            converged: p.converged,
            iterations: p.iterations,
        }
    }
}

#[derive(Serialize)]
pub struct TraceSummary {
    pub t: f64,
    pub r: f64,
    /// The sampled base point the curve passes through at s = 0.
    pub w_re: Vec<f64>,
    pub w_im: Vec<f64>,
    pub points: usize,
    pub all_converged: bool,
    pub max_residual: f64,
}

#[derive(Serialize)]
pub struct NegativeEntry {
    pub row: usize,
    pub col: usize,
    pub value: String,
}

#[derive(Serialize)]
pub struct TorusMapRow {
    pub t: f64,
    /// Exact rational exponent matrix E, row by row, as fraction strings.
    pub exponents: Vec<Vec<String>>,
    pub inverse_exponents: Vec<Vec<String>>,
    pub fiber_residual: f64,
    pub verdict: String,
    pub negatives: Vec<NegativeEntry>,
}

#[derive(Serialize)]
pub struct TorusMapSummary {
    pub det_nm: Option<i64>,
    pub max_fiber_residual: f64,
    pub pass: bool,
}

pub fn rat_matrix_strings(rows: &[Vec<Rat>]) -> Vec<Vec<String>> {
    rows.iter().map(|row| row.iter().map(|x| x.to_string()).collect()).collect()
}

#[derive(Serialize)]
pub struct ProbeRow {
    pub eta: f64,
    pub attempted: u64,
    pub converged: u64,
    pub rank_failures: u64,
    pub vacuous: bool,
    pub pass: bool,
}

impl ProbeRow {
    pub fn from_probe(p: &LevelProbe) -> ProbeRow {
        ProbeRow {
            eta: p.eta,
            attempted: p.attempted,
            converged: p.converged,
            rank_failures: p.rank_failures,
            vacuous: p.vacuous,
            pass: p.pass,
        }
    }
}

#[derive(Serialize)]
pub struct TubeRow {
    pub t: f64,
    pub r: f64,
    pub eta0: f64,
    pub probes: Vec<ProbeRow>,
}

#[derive(Serialize)]
pub struct Eta0Summary {
    pub cells: usize,
    pub min_eta0: f64,
    pub all_pass: bool,
}
