use serde::Serialize;

use super::ExperimentSpec;
use crate::error::Result;
use crate::filters::{ideal_filter_output, FilterOutput, FilterReport};
use crate::fock::{BasisConfiguration, PureState};
use crate::measurement::DetectorCount;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TermRecord {
    /// One entry per output mode: `H`, `V`, or a count string such as `0`
    /// or `HV` for other occupancies.
    pub pols: Vec<String>,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentRecord {
    pub weight: f64,
    pub terms: Vec<TermRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchRecord {
    pub pattern: Vec<[u32; 2]>,
    pub probability: f64,
    #[serde(rename = "J")]
    pub j: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lost: Option<Vec<[u32; 2]>>,
}

/// Stable JSON view of a [`FilterReport`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JsonReport {
    pub n: usize,
    pub success_probability: f64,
    pub heralded_probability: f64,
    pub fidelity_vs_ideal: Option<f64>,
    pub sign_corrections_applied: usize,
    pub branches: Vec<BranchRecord>,
    /// Terms of a pure output; empty when the output is mixed or empty.
    pub output_terms: Vec<TermRecord>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub output_components: Vec<ComponentRecord>,
}

fn mode_label(h: u32, v: u32) -> String {
    match (h, v) {
        (0, 0) => "0".to_string(),
        _ => "H".repeat(h as usize) + &"V".repeat(v as usize),
    }
}

fn config_labels(c: &BasisConfiguration) -> Vec<String> {
    c.occupancies()
        .iter()
        .map(|o| mode_label(o.h, o.v))
        .collect()
}

pub(crate) fn term_records(s: &PureState) -> Vec<TermRecord> {
    s.terms()
        .map(|(c, a)| TermRecord {
            pols: config_labels(c),
            re: a.re,
            im: a.im,
        })
        .collect()
}

fn counts(c: &[DetectorCount]) -> Vec<[u32; 2]> {
    c.iter().map(|d| [d.plus, d.minus]).collect()
}

impl JsonReport {
    pub fn from_report(r: &FilterReport) -> Self {
        let branches = r
            .branches
            .iter()
            .map(|b| BranchRecord {
                pattern: counts(&b.pattern),
                probability: b.probability,
                j: b.j,
                lost: b
                    .lost
                    .iter()
                    .any(|c| c.total() > 0)
                    .then(|| counts(&b.lost)),
            })
            .collect();
        let (output_terms, output_components) = match &r.output {
            FilterOutput::Empty => (Vec::new(), Vec::new()),
            FilterOutput::Pure(s) => (term_records(s), Vec::new()),
            FilterOutput::Mixed(e) => (
                Vec::new(),
                e.components()
                    .iter()
                    .map(|(w, s)| ComponentRecord {
                        weight: *w,
                        terms: term_records(s),
                    })
                    .collect(),
            ),
        };
        JsonReport {
            n: r.n,
            success_probability: r.success_probability,
            heralded_probability: r.heralded_probability,
            fidelity_vs_ideal: r.fidelity_vs_ideal,
            sign_corrections_applied: r.sign_corrections_applied,
            branches,
            output_terms,
            output_components,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Simulated run next to the analytic projector `½ P η^N`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub n: usize,
    pub simulated_success: f64,
    /// Ensemble-averaged weight of the input inside `span{|H..H>, |V..V>}`.
    pub ideal_pass_weight: f64,
    /// `½ · ideal_pass_weight · η^N`, valid for a GHZ ancilla.
    pub predicted_success: f64,
    pub success_residual: f64,
    pub fidelity_vs_ideal: Option<f64>,
    /// Projected output per input component.
    pub ideal_components: Vec<ComponentRecord>,
    pub simulated: JsonReport,
}

impl OracleReport {
    pub fn build(spec: &ExperimentSpec, report: &FilterReport) -> Result<Self> {
        let mut pass = 0.0;
        let mut ideal_components = Vec::new();
        for c in &spec.input {
            let s = PureState::from_polarization_terms(spec.n, c.terms.iter().cloned())?;
            let proj = ideal_filter_output(&s, spec.n)?;
            pass += c.weight * proj.pass_weight;
            ideal_components.push(ComponentRecord {
                weight: c.weight,
                terms: proj.output.as_ref().map(term_records).unwrap_or_default(),
            });
        }
        let predicted = 0.5 * pass * spec.eta.powi(spec.n as i32);
        Ok(OracleReport {
            n: spec.n,
            simulated_success: report.success_probability,
            ideal_pass_weight: pass,
            predicted_success: predicted,
            success_residual: report.success_probability - predicted,
            fidelity_vs_ideal: report.fidelity_vs_ideal,
            ideal_components,
            simulated: JsonReport::from_report(report),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
