//! Imperfect ancillas and lossy detectors: closed-form first-order
//! predictions, to be compared against exact simulation.

use crate::error::{Error, Result};
use crate::filters::ghz_state;
use crate::fock::{Amplitude, Polarization, PureState};

/// A GHZ ancilla with an admixed product component `epsilon |pattern>`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContaminatedAncillaSpec {
    pub n: usize,
    pub epsilon: Amplitude,
    pub pattern: Vec<Polarization>,
}

impl ContaminatedAncillaSpec {
    /// Uses the default contaminant `|H V V ... V>`.
    pub fn new(n: usize, epsilon: Amplitude) -> Self {
        ContaminatedAncillaSpec {
            n,
            epsilon,
            pattern: default_pattern(n),
        }
    }

    pub fn with_pattern(n: usize, epsilon: Amplitude, pattern: Vec<Polarization>) -> Self {
        ContaminatedAncillaSpec {
            n,
            epsilon,
            pattern,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let eps = self.epsilon.norm();
        if eps.is_nan() || eps >= 1.0 {
            return Err(Error::EpsilonOutOfRange(eps));
        }
        if self.pattern.len() != self.n {
            return Err(Error::PatternLength {
                expected: self.n,
                found: self.pattern.len(),
            });
        }
        if self.pattern.windows(2).all(|w| w[0] == w[1]) {
            return Err(Error::UniformPattern);
        }
        Ok(())
    }
}

/// `H` followed by `n - 1` copies of `V`.
pub fn default_pattern(n: usize) -> Vec<Polarization> {
    let mut p = vec![Polarization::V; n];
    if let Some(first) = p.first_mut() {
        *first = Polarization::H;
    }
    p
}

/// `sqrt(1 - |ε|²) |GHZ> + ε |pattern>`.
///
/// The pattern mixes H and V, so it is orthogonal to both GHZ terms and the
/// result has unit norm.
pub fn imperfect_ghz(spec: &ContaminatedAncillaSpec) -> Result<PureState> {
    spec.validate()?;
    let ghz = ghz_state(spec.n)?;
    let keep = (1.0 - spec.epsilon.norm_sqr()).sqrt();
    let mut terms: Vec<_> = ghz.terms().map(|(c, a)| (c.clone(), a * keep)).collect();
    terms.push((
        crate::fock::BasisConfiguration::from_polarizations(&spec.pattern),
        spec.epsilon,
    ));
    PureState::from_terms(spec.n, terms)
}

/// First-order output fidelity with a contaminated ancilla:
/// `1 - |εγ|² / (|α|² + |β|²)`.
///
/// The formula tracks the amplitude overlap `|<ideal|out>|`; the squared
/// overlap drops twice as fast.
pub fn predicted_fidelity(
    alpha: Amplitude,
    beta: Amplitude,
    gamma: Amplitude,
    epsilon: Amplitude,
) -> Result<f64> {
    let pass = alpha.norm_sqr() + beta.norm_sqr();
    if pass == 0.0 {
        return Err(Error::UndefinedPrediction);
    }
    Ok(1.0 - (epsilon * gamma).norm_sqr() / pass)
}

/// Shift in pass probability caused by the contaminant:
/// `|ε|² (|γ|² - |α|²/2 - |β|²/2)`.
pub fn predicted_pass_probability_deviation(
    alpha: Amplitude,
    beta: Amplitude,
    gamma: Amplitude,
    epsilon: Amplitude,
) -> f64 {
    epsilon.norm_sqr() * (gamma.norm_sqr() - 0.5 * alpha.norm_sqr() - 0.5 * beta.norm_sqr())
}

/// `η^n / 2`, the success rate for targets of the form `α|H...H> + β|V...V>`.
pub fn predicted_lossy_success(eta: f64, n: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::InvalidEfficiency(eta));
    }
    if n == 0 {
        return Err(Error::PhotonCount { min: 1, found: 0 });
    }
    Ok(0.5 * eta.powi(n as i32))
}
