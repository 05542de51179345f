use std::str::FromStr;

use serde::Serialize;

use super::{run_experiment, AncillaSpec, ExperimentSpec};
use crate::error::{Error, Result};
use crate::filters::{baseline_success, Baseline};
use crate::fock::{Amplitude, Polarization};
use crate::noise::{default_pattern, predicted_fidelity, predicted_pass_probability_deviation};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    /// Detector efficiency.
    Eta,
    /// Real contaminant amplitude of the ancilla.
    Epsilon,
}

impl SweepParam {
    fn name(self) -> &'static str {
        match self {
            SweepParam::Eta => "eta",
            SweepParam::Epsilon => "epsilon",
        }
    }

    fn in_domain(self, x: f64) -> bool {
        match self {
            SweepParam::Eta => (0.0..=1.0).contains(&x),
            SweepParam::Epsilon => x.is_finite() && x.abs() < 1.0,
        }
    }
}

impl FromStr for SweepParam {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "eta" => Ok(SweepParam::Eta),
            "epsilon" => Ok(SweepParam::Epsilon),
            other => Err(format!(
                "unknown sweep parameter '{other}' (expected eta or epsilon)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub success_probability: f64,
    pub heralded_probability: f64,
    pub fidelity_vs_ideal: Option<f64>,
    pub predicted_success: Option<f64>,
    pub predicted_fidelity: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub param: SweepParam,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn to_csv(&self) -> String {
        to_csv(&self.rows)
    }
}

fn to_csv<T: Serialize>(rows: &[T]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("row serializes");
    }
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8 csv")
}

/// Evenly spaced grid from `from` to `to` inclusive.
fn grid(from: f64, to: f64, steps: usize) -> Vec<f64> {
    (0..steps)
        .map(|i| {
            if i + 1 == steps {
                to
            } else {
                from + (to - from) * i as f64 / (steps - 1) as f64
            }
        })
        .collect()
}

/// Amplitude of the term with the given polarizations.
fn amp_of(terms: &[(Vec<Polarization>, Amplitude)], pols: &[Polarization]) -> Amplitude {
    terms
        .iter()
        .find(|(p, _)| p == pols)
        .map(|(_, a)| *a)
        .unwrap_or_default()
}

/// Closed-form success and fidelity for `spec`, where a formula exists.
fn predictions(spec: &ExperimentSpec) -> (Option<f64>, Option<f64>) {
    let all_h = vec![Polarization::H; spec.n];
    let all_v = vec![Polarization::V; spec.n];
    let loss = spec.eta.powi(spec.n as i32);
    let pass = |terms: &[(Vec<Polarization>, Amplitude)]| {
        amp_of(terms, &all_h).norm_sqr() + amp_of(terms, &all_v).norm_sqr()
    };
    match &spec.ancilla {
        AncillaSpec::Ghz => {
            let p: f64 = spec.input.iter().map(|c| c.weight * pass(&c.terms)).sum();
            (Some(0.5 * p * loss), (p > 0.0).then_some(1.0))
        }
        AncillaSpec::Contaminated { epsilon, pattern } => {
            let mut success = 0.0;
            for c in &spec.input {
                let (a, b, g) = (
                    amp_of(&c.terms, &all_h),
                    amp_of(&c.terms, &all_v),
                    amp_of(&c.terms, pattern),
                );
                success += c.weight
                    * (0.5 * pass(&c.terms)
                        + predicted_pass_probability_deviation(a, b, g, *epsilon));
            }
            let fidelity = match spec.input.as_slice() {
                [c] => predicted_fidelity(
                    amp_of(&c.terms, &all_h),
                    amp_of(&c.terms, &all_v),
                    amp_of(&c.terms, pattern),
                    *epsilon,
                )
                .ok(),
                _ => None,
            };
            (Some(success * loss), fidelity)
        }
        AncillaSpec::Explicit(_) => (None, None),
    }
}

/// Re-runs `spec` over a grid of one parameter.
///
/// An `epsilon` sweep contaminates the ancilla with the spec's own pattern,
/// or `H V ... V` when the spec uses a clean GHZ ancilla.
pub fn sweep(
    spec: &ExperimentSpec,
    param: SweepParam,
    from: f64,
    to: f64,
    steps: usize,
) -> Result<SweepTable> {
    if steps < 2 {
        return Err(Error::TooFewSteps(steps));
    }
    if !param.in_domain(from) || !param.in_domain(to) {
        return Err(Error::InvalidRange {
            param: param.name(),
            from,
            to,
        });
    }
    let pattern = match (&spec.ancilla, param) {
        (AncillaSpec::Contaminated { pattern, .. }, _) => Some(pattern.clone()),
        (AncillaSpec::Ghz, SweepParam::Epsilon) => Some(default_pattern(spec.n)),
        (AncillaSpec::Explicit(_), SweepParam::Epsilon) => {
            return Err(Error::Experiment(
                "epsilon sweep needs a GHZ or contaminated ancilla".into(),
            ))
        }
        _ => None,
    };

    let mut rows = Vec::with_capacity(steps);
    for value in grid(from, to, steps) {
        let mut point = spec.clone();
        match param {
            SweepParam::Eta => point.eta = value,
            SweepParam::Epsilon => {
                point.ancilla = AncillaSpec::Contaminated {
                    epsilon: Amplitude::new(value, 0.0),
                    pattern: pattern.clone().expect("pattern set for epsilon sweeps"),
                }
            }
        }
        let report = run_experiment(&point)?;
        let (predicted_success, predicted_fidelity) = predictions(&point);
        rows.push(SweepRow {
            value,
            success_probability: report.success_probability,
            heralded_probability: report.heralded_probability,
            fidelity_vs_ideal: report.fidelity_vs_ideal,
            predicted_success,
            predicted_fidelity,
        });
    }
    Ok(SweepTable { param, rows })
}

/// Success probabilities of competing filter schemes for one `n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareRow {
    pub n: usize,
    pub this_work: f64,
    pub hofmann: f64,
    pub grudka: f64,
    pub zou: f64,
    #[serde(rename = "cnot_p0.5")]
    pub cnot: f64,
}

/// Illustrative CNOT success probability for the compare table.
pub const COMPARE_CNOT_P: f64 = 0.5;

/// One row per `n` in `2..=n_max`.
pub fn compare(n_max: usize) -> Result<Vec<CompareRow>> {
    if n_max < 2 {
        return Err(Error::PhotonCount {
            min: 2,
            found: n_max,
        });
    }
    (2..=n_max)
        .map(|n| {
            Ok(CompareRow {
                n,
                this_work: baseline_success(Baseline::ThisWork, n)?,
                hofmann: baseline_success(Baseline::Hofmann, n)?,
                grudka: baseline_success(Baseline::Grudka, n)?,
                zou: baseline_success(Baseline::Zou, n)?,
                cnot: baseline_success(Baseline::Cnot { p: COMPARE_CNOT_P }, n)?,
            })
        })
        .collect()
}

pub fn compare_csv(rows: &[CompareRow]) -> String {
    to_csv(rows)
}
