//! Experiment descriptions, machine-readable reports, sweeps and baseline
//! tables.

mod parse;
mod report;
mod sweep;

pub use parse::{parse_experiment, ParseError, ParseErrorKind, ParseWarning, Parsed};
pub use report::{BranchRecord, ComponentRecord, JsonReport, OracleReport, TermRecord};
pub use sweep::{
    compare, compare_csv, sweep, CompareRow, SweepParam, SweepRow, SweepTable, COMPARE_CNOT_P,
};

use crate::error::{Error, Result};
use crate::filters::{ghz_state, n_photon_filter, FilterConfig, FilterInput, FilterReport};
use crate::fock::{Amplitude, EnsembleState, FidelityConvention, Polarization, PureState};
use crate::noise::{imperfect_ghz, ContaminatedAncillaSpec};

/// One input or ancilla term: a polarization per mode and its amplitude.
pub type Term = (Vec<Polarization>, Amplitude);

#[derive(Debug, Clone, PartialEq)]
pub struct InputComponent {
    pub weight: f64,
    pub terms: Vec<Term>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum AncillaSpec {
    Ghz,
    Contaminated {
        epsilon: Amplitude,
        pattern: Vec<Polarization>,
    },
    Explicit(Vec<Term>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub n: usize,
    pub input: Vec<InputComponent>,
    pub ancilla: AncillaSpec,
    pub eta: f64,
    pub sign_correct: bool,
    /// Not part of the file grammar; set programmatically or from the CLI.
    pub convention: FidelityConvention,
}

impl ExperimentSpec {
    pub fn input_state(&self) -> Result<FilterInput> {
        let states = self
            .input
            .iter()
            .map(|c| {
                PureState::from_polarization_terms(self.n, c.terms.iter().cloned())
                    .and_then(|s| s.normalized())
                    .map(|s| (c.weight, s))
            })
            .collect::<Result<Vec<_>>>()?;
        if states.len() == 1 {
            Ok(FilterInput::Pure(states.into_iter().next().unwrap().1))
        } else {
            Ok(FilterInput::Mixed(EnsembleState::new(states)?))
        }
    }

    pub fn ancilla_state(&self) -> Result<PureState> {
        match &self.ancilla {
            AncillaSpec::Ghz => ghz_state(self.n),
            AncillaSpec::Contaminated { epsilon, pattern } => imperfect_ghz(
                &ContaminatedAncillaSpec::with_pattern(self.n, *epsilon, pattern.clone()),
            ),
            AncillaSpec::Explicit(terms) => {
                PureState::from_polarization_terms(self.n, terms.iter().cloned())?.normalized()
            }
        }
    }

    pub fn filter_config(&self) -> FilterConfig {
        FilterConfig {
            sign_correct: self.sign_correct,
            efficiency: self.eta,
            convention: self.convention,
        }
    }

    /// True when every input term is all-H or all-V.
    pub fn is_parity_form(&self) -> bool {
        self.input.iter().all(|c| {
            c.terms
                .iter()
                .all(|(p, _)| p.windows(2).all(|w| w[0] == w[1]))
        })
    }
}

/// Runs the filter described by `spec`.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<FilterReport> {
    let input = spec
        .input_state()
        .map_err(|e| context("building input", e))?;
    let ancilla = spec
        .ancilla_state()
        .map_err(|e| context("building ancilla", e))?;
    n_photon_filter(input, &ancilla, &spec.filter_config())
        .map_err(|e| context(&format!("running {}-photon filter", spec.n), e))
}

fn context(what: &str, e: Error) -> Error {
    Error::Experiment(format!("{what}: {e}"))
}
