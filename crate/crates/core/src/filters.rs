//! The GHZ-assisted parity filter and its analytic references.
//!
//! Layout used throughout: an `n`-photon filter runs on `2n` modes. Target
//! photon `k` enters mode `2k`, ancilla photon `k` enters mode `2k + 1`, a
//! polarizing beam splitter couples each such pair, and detectors sit on the
//! odd modes. The filtered state leaves through the even modes.

use crate::elements::{apply_pbs, apply_sigma_z, ModePair};
use crate::error::{Error, Result};
use crate::fock::{
    Amplitude, BasisConfiguration, EnsembleState, FidelityConvention, Polarization, PureState,
};
use crate::measurement::{
    enumerate_outcomes, measure_with_loss, postselect_single_clicks, DetectorCount, DetectorSpec,
    OutcomeBranch,
};

/// Branch outputs closer than this (in squared-overlap infidelity) are merged.
pub const MERGE_TOLERANCE: f64 = 1e-12;

/// `(|H...H> + |V...V>)/√2` over `n` modes.
pub fn ghz_state(n: usize) -> Result<PureState> {
    if n == 0 {
        return Err(Error::PhotonCount { min: 1, found: 0 });
    }
    let a = Amplitude::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    PureState::from_polarization_terms(
        n,
        [(vec![Polarization::H; n], a), (vec![Polarization::V; n], a)],
    )
}

/// Options for [`n_photon_filter`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterConfig {
    /// Apply σ_z to output mode 0 on branches with an odd number of `-` results.
    pub sign_correct: bool,
    /// Detector efficiency η.
    pub efficiency: f64,
    pub convention: FidelityConvention,
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig {
            sign_correct: true,
            efficiency: 1.0,
            convention: FidelityConvention::Squared,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FilterInput {
    Pure(PureState),
    Mixed(EnsembleState),
}

impl From<PureState> for FilterInput {
    fn from(s: PureState) -> Self {
        FilterInput::Pure(s)
    }
}

impl From<EnsembleState> for FilterInput {
    fn from(e: EnsembleState) -> Self {
        FilterInput::Mixed(e)
    }
}

impl FilterInput {
    fn components(&self) -> Result<Vec<(f64, PureState)>> {
        match self {
            FilterInput::Pure(s) => Ok(vec![(1.0, s.normalized()?)]),
            FilterInput::Mixed(e) => Ok(e.renormalized().components().to_vec()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FilterOutput {
    /// Nothing passed the filter.
    Empty,
    Pure(PureState),
    Mixed(EnsembleState),
}

impl FilterOutput {
    pub fn as_pure(&self) -> Option<&PureState> {
        match self {
            FilterOutput::Pure(s) => Some(s),
            _ => None,
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, FilterOutput::Empty)
    }

    pub fn fidelity_with(
        &self,
        target: &PureState,
        convention: FidelityConvention,
    ) -> Result<Option<f64>> {
        match self {
            FilterOutput::Empty => Ok(None),
            FilterOutput::Pure(s) => s.fidelity(target, convention).map(Some),
            FilterOutput::Mixed(e) => e.fidelity_with(target, convention).map(Some),
        }
    }
}

/// A post-selected branch as seen at the filter output.
#[derive(Debug, Clone, PartialEq)]
pub struct AcceptedBranch {
    pub pattern: Vec<DetectorCount>,
    pub lost: Vec<DetectorCount>,
    pub j: u32,
    /// Absolute probability, including the input-ensemble weight.
    pub probability: f64,
    /// Output-mode state before any sign correction.
    pub raw_output: PureState,
    /// Output-mode state after sign correction (equal to `raw_output` when
    /// none was applied).
    pub output: PureState,
    pub sign_corrected: bool,
}

impl AcceptedBranch {
    pub fn photons_lost(&self) -> u32 {
        self.lost.iter().map(|c| c.total()).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilterReport {
    pub n: usize,
    /// Probability of a herald that delivers the filtered `n`-photon state.
    pub success_probability: f64,
    /// Probability of one registered click per detector. Exceeds
    /// `success_probability` only with lossy detectors.
    pub heralded_probability: f64,
    pub output: FilterOutput,
    /// Every detection branch, with absolute probabilities.
    pub branches: Vec<OutcomeBranch>,
    pub accepted: Vec<AcceptedBranch>,
    /// Fidelity of `output` with the ideal projection of the input; `None`
    /// when either is empty.
    pub fidelity_vs_ideal: Option<f64>,
    pub sign_corrections_applied: usize,
}

/// Ideal projection of an `n`-photon input onto `span{|H...H>, |V...V>}`.
#[derive(Debug, Clone, PartialEq)]
pub struct IdealProjection {
    /// Normalized projected state, or `None` if the projection vanishes.
    pub output: Option<PureState>,
    /// Squared norm of the projection relative to the input.
    pub pass_weight: f64,
}

/// Reads the all-H and all-V amplitudes straight off the input.
pub fn ideal_filter_output(input: &PureState, n: usize) -> Result<IdealProjection> {
    if input.mode_count() != n {
        return Err(Error::SizeMismatch {
            role: "input",
            expected: n,
            found: input.mode_count(),
        });
    }
    let total = input.norm_sqr();
    if total == 0.0 {
        return Err(Error::NullState);
    }
    let all_h = BasisConfiguration::from_polarizations(&vec![Polarization::H; n]);
    let all_v = BasisConfiguration::from_polarizations(&vec![Polarization::V; n]);
    let projected = PureState::from_terms(
        n,
        [
            (all_h.clone(), input.amplitude(&all_h)),
            (all_v.clone(), input.amplitude(&all_v)),
        ],
    )?;
    let pass_weight = projected.norm_sqr() / total;
    let output = projected.normalized().ok();
    Ok(IdealProjection {
        output,
        pass_weight,
    })
}

fn check_one_photon_per_mode(s: &PureState, n: usize, role: &'static str) -> Result<()> {
    if s.mode_count() != n {
        return Err(Error::SizeMismatch {
            role,
            expected: n,
            found: s.mode_count(),
        });
    }
    if s.terms().any(|(c, _)| c.polarizations().is_none()) {
        return Err(Error::NotOnePhotonPerMode { role });
    }
    Ok(())
}

struct ComponentRun {
    branches: Vec<OutcomeBranch>,
    accepted: Vec<AcceptedBranch>,
    success: f64,
    heralded: f64,
}

/// Pushes `input ⊗ ancilla` through the beam-splitter network and
/// post-selects one click per detector.
fn run_component(
    input: &PureState,
    ancilla: &PureState,
    weight: f64,
    config: &FilterConfig,
) -> Result<ComponentRun> {
    let n = input.mode_count();
    let order: Vec<usize> = (0..n).flat_map(|k| [k, n + k]).collect();
    let mut state = input.tensor(ancilla).permute_modes(&order)?;
    for k in 0..n {
        state = apply_pbs(&state, ModePair::new(2 * k, 2 * k + 1)?)?;
    }
    let detectors: Vec<usize> = (0..n).map(|k| 2 * k + 1).collect();
    let outputs: Vec<usize> = (0..n).map(|k| 2 * k).collect();
    let spec = DetectorSpec::with_efficiency(detectors, config.efficiency)?;

    let (branches, accepted_raw, success, heralded) = if config.efficiency == 1.0 {
        let branches = enumerate_outcomes(&state, &spec)?;
        let (acc, success) = postselect_single_clicks(&branches);
        (branches, acc, success, success)
    } else {
        let m = measure_with_loss(&state, &spec)?;
        (
            m.branches,
            m.accepted,
            m.success_probability,
            m.heralded_probability,
        )
    };

    let mut accepted = Vec::with_capacity(accepted_raw.len());
    for b in accepted_raw {
        let raw_output = b.remaining.select_modes(&outputs)?;
        let fix = config.sign_correct && b.j % 2 == 1;
        let output = if fix {
            apply_sigma_z(&raw_output, 0)?
        } else {
            raw_output.clone()
        };
        accepted.push(AcceptedBranch {
            pattern: b.pattern,
            lost: b.lost,
            j: b.j,
            probability: weight * b.probability,
            raw_output,
            output,
            sign_corrected: fix,
        });
    }
    let branches = branches
        .into_iter()
        .map(|mut b| {
            b.probability *= weight;
            b
        })
        .collect();
    Ok(ComponentRun {
        branches,
        accepted,
        success: weight * success,
        heralded: weight * heralded,
    })
}

/// Groups branch outputs that agree up to a global phase and returns the
/// resulting pure state or mixture.
fn merge_outputs<'a, I>(items: I) -> Result<FilterOutput>
where
    I: IntoIterator<Item = (f64, &'a PureState)>,
{
    let mut groups: Vec<(f64, PureState)> = Vec::new();
    for (w, s) in items {
        let existing = groups.iter_mut().find(|(_, g)| {
            g.mode_count() == s.mode_count()
                && g.overlap(s).map(|o| 1.0 - o.norm_sqr()).unwrap_or(1.0) <= MERGE_TOLERANCE
        });
        match existing {
            Some((gw, _)) => *gw += w,
            None => groups.push((w, s.clone())),
        }
    }
    let total: f64 = groups.iter().map(|(w, _)| w).sum();
    match groups.len() {
        0 => Ok(FilterOutput::Empty),
        1 => Ok(FilterOutput::Pure(groups.pop().unwrap().1)),
        _ => Ok(FilterOutput::Mixed(EnsembleState::new(
            groups.into_iter().map(|(w, s)| (w / total, s)).collect(),
        )?)),
    }
}

/// Runs the `n`-photon filter on a pure or mixed input with the given
/// ancilla (normally [`ghz_state`]).
///
/// Every input and ancilla term must hold exactly one photon per mode.
/// Mixed inputs are processed component by component; success
/// probabilities add with the ensemble weights.
pub fn n_photon_filter(
    input: impl Into<FilterInput>,
    ancilla: &PureState,
    config: &FilterConfig,
) -> Result<FilterReport> {
    let input = input.into();
    let components = input.components()?;
    let n = components[0].1.mode_count();
    if n == 0 {
        return Err(Error::PhotonCount { min: 1, found: 0 });
    }
    for (_, c) in &components {
        check_one_photon_per_mode(c, n, "input")?;
    }
    check_one_photon_per_mode(ancilla, n, "ancilla")?;
    let ancilla = ancilla.normalized()?;

    let mut branches = Vec::new();
    let mut accepted = Vec::new();
    let mut success = 0.0;
    let mut heralded = 0.0;
    let mut fid_acc = 0.0;
    let mut fid_weight = 0.0;
    let mut fid_defined = true;
    for (w, component) in &components {
        let run = run_component(component, &ancilla, *w, config)?;
        let out = merge_outputs(
            run.accepted
                .iter()
                .filter(|b| b.photons_lost() == 0)
                .map(|b| (b.probability, &b.output)),
        )?;
        if run.success > 0.0 {
            let fid = match ideal_filter_output(component, n)?.output {
                Some(target) => out.fidelity_with(&target, config.convention)?,
                None => None,
            };
            match fid {
                Some(f) => {
                    fid_acc += run.success * f;
                    fid_weight += run.success;
                }
                None => fid_defined = false,
            }
        }
        success += run.success;
        heralded += run.heralded;
        branches.extend(run.branches);
        accepted.extend(run.accepted);
    }

    let output = merge_outputs(
        accepted
            .iter()
            .filter(|b| b.photons_lost() == 0)
            .map(|b| (b.probability, &b.output)),
    )?;
    let fidelity_vs_ideal = (fid_defined && fid_weight > 0.0).then(|| fid_acc / fid_weight);
    let sign_corrections_applied = accepted.iter().filter(|b| b.sign_corrected).count();
    Ok(FilterReport {
        n,
        success_probability: success,
        heralded_probability: heralded,
        output,
        branches,
        accepted,
        fidelity_vs_ideal,
        sign_corrections_applied,
    })
}

/// Projects a one-photon target onto `|mu>` using a single beam splitter and
/// an ancilla photon prepared in `|mu>`.
pub fn single_photon_polarization_filter(
    target: &PureState,
    mu: Polarization,
) -> Result<FilterReport> {
    check_one_photon_per_mode(target, 1, "target")?;
    let target = target.normalized()?;
    let state = target.tensor(&PureState::product(&[mu]));
    let state = apply_pbs(&state, ModePair::new(0, 1)?)?;
    let branches = enumerate_outcomes(&state, &DetectorSpec::ideal(vec![1]))?;
    let (acc, success) = postselect_single_clicks(&branches);
    let mut accepted = Vec::with_capacity(acc.len());
    for b in acc {
        let out = b.remaining.select_modes(&[0])?;
        // the remainder is |mu> up to a global phase; drop the phase
        let single = (out.len() == 1)
            .then(|| out.terms().next().map(|(c, _)| c.clone()))
            .flatten();
        let out = single.map(PureState::basis).unwrap_or(out);
        accepted.push(AcceptedBranch {
            pattern: b.pattern,
            lost: b.lost,
            j: b.j,
            probability: b.probability,
            raw_output: out.clone(),
            output: out,
            sign_corrected: false,
        });
    }
    let output = merge_outputs(accepted.iter().map(|b| (b.probability, &b.output)))?;
    let fidelity_vs_ideal =
        output.fidelity_with(&PureState::product(&[mu]), FidelityConvention::Squared)?;
    Ok(FilterReport {
        n: 1,
        success_probability: success,
        heralded_probability: success,
        output,
        branches,
        accepted,
        fidelity_vs_ideal,
        sign_corrections_applied: 0,
    })
}

/// Success-probability models for parity filters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Baseline {
    /// GHZ-assisted beam-splitter filter: 1/2 for every `n`.
    ThisWork,
    /// Cascade of two-photon filters with `p2 = 1/16`.
    Hofmann,
    /// Cascade of two-photon filters with `p2 = 1/4`.
    Grudka,
    /// Cascade of two-photon filters with `p2 = 1/4`.
    Zou,
    /// `n - 1` two-photon filters of success `p2` each.
    Cascade { p2: f64 },
    /// Beam splitters replaced by CNOT gates of success `p`: `p^n`.
    Cnot { p: f64 },
}

pub fn baseline_success(scheme: Baseline, n: usize) -> Result<f64> {
    let cascade = |p2: f64| -> Result<f64> {
        if !(0.0..=1.0).contains(&p2) {
            return Err(Error::InvalidProbability(p2));
        }
        if n < 2 {
            return Err(Error::PhotonCount { min: 2, found: n });
        }
        Ok(p2.powi(n as i32 - 1))
    };
    match scheme {
        Baseline::ThisWork => {
            if n == 0 {
                return Err(Error::PhotonCount { min: 1, found: 0 });
            }
            Ok(0.5)
        }
        Baseline::Hofmann => cascade(1.0 / 16.0),
        Baseline::Grudka | Baseline::Zou => cascade(0.25),
        Baseline::Cascade { p2 } => cascade(p2),
        Baseline::Cnot { p } => {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidProbability(p));
            }
            if n == 0 {
                return Err(Error::PhotonCount { min: 1, found: 0 });
            }
            Ok(p.powi(n as i32))
        }
    }
}
