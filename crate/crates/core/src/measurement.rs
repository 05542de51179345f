//! Number-resolving detection in the diagonal (±) polarization basis.
//!
//! Outcomes are enumerated exactly: every detector mode is rewritten in the
//! ± basis, terms are grouped by the joint detection pattern, and amplitudes
//! are summed per pattern before squaring.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::elements::{binomial, expand_in_diagonal_basis};
use crate::error::{Error, Result};
use crate::fock::{Amplitude, BasisConfiguration, EnsembleState, Occupancy, PureState};

/// Branches below this probability are discarded.
pub const BRANCH_CUTOFF: f64 = 1e-15;

/// Counts of `+` and `-` photons at one detector.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct DetectorCount {
    pub plus: u32,
    pub minus: u32,
}

impl DetectorCount {
    pub fn new(plus: u32, minus: u32) -> Self {
        DetectorCount { plus, minus }
    }

    pub fn total(self) -> u32 {
        self.plus + self.minus
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectorSpec {
    pub modes: Vec<usize>,
    pub efficiency: f64,
}

impl DetectorSpec {
    pub fn ideal(modes: Vec<usize>) -> Self {
        DetectorSpec {
            modes,
            efficiency: 1.0,
        }
    }

    pub fn with_efficiency(modes: Vec<usize>, efficiency: f64) -> Result<Self> {
        check_efficiency(efficiency)?;
        Ok(DetectorSpec { modes, efficiency })
    }

    fn validate(&self, s: &PureState) -> Result<()> {
        if self.modes.is_empty() {
            return Err(Error::NoDetectors);
        }
        check_efficiency(self.efficiency)?;
        for (i, &m) in self.modes.iter().enumerate() {
            s.check_mode(m)?;
            if self.modes[..i].contains(&m) {
                return Err(Error::DegenerateModePair(m));
            }
        }
        Ok(())
    }
}

fn check_efficiency(eta: f64) -> Result<()> {
    if (0.0..=1.0).contains(&eta) {
        Ok(())
    } else {
        Err(Error::InvalidEfficiency(eta))
    }
}

/// One joint detection pattern and the state it leaves behind.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeBranch {
    /// Registered counts, one entry per detector in [`DetectorSpec::modes`] order.
    pub pattern: Vec<DetectorCount>,
    /// Photons that reached each detector without registering. All zero for
    /// ideal detectors.
    pub lost: Vec<DetectorCount>,
    pub probability: f64,
    /// Normalized post-measurement state; detector modes are empty.
    pub remaining: PureState,
    /// Number of photons found in `|->`.
    pub j: u32,
}

impl OutcomeBranch {
    pub fn is_single_click(&self) -> bool {
        self.pattern.iter().all(|c| c.total() == 1)
    }

    pub fn photons_lost(&self) -> u32 {
        self.lost.iter().map(|c| c.total()).sum()
    }
}

/// Enumerates every ± detection pattern on the detector modes, treating the
/// detectors as ideal (the `efficiency` field is ignored).
///
/// Probabilities are relative to the norm of `s` and sum to one.
pub fn enumerate_outcomes(s: &PureState, d: &DetectorSpec) -> Result<Vec<OutcomeBranch>> {
    let ideal = DetectorSpec::ideal(d.modes.clone());
    enumerate(s, &ideal)
}

/// Keeps branches with exactly one registered photon at every detector.
pub fn postselect_single_clicks(branches: &[OutcomeBranch]) -> (Vec<OutcomeBranch>, f64) {
    let accepted: Vec<OutcomeBranch> = branches
        .iter()
        .filter(|b| b.is_single_click())
        .cloned()
        .collect();
    let success = accepted.iter().map(|b| b.probability).sum();
    (accepted, success)
}

/// Post-selected detection with finite detector efficiency.
#[derive(Debug, Clone, PartialEq)]
pub struct LossyMeasurement {
    /// Full branch table, split by registered and lost counts.
    pub branches: Vec<OutcomeBranch>,
    /// Every branch with exactly one registered photon per detector,
    /// including those where further photons arrived but were not registered.
    pub accepted: Vec<OutcomeBranch>,
    /// Probability of the single-click herald.
    pub heralded_probability: f64,
    /// Probability of the herald with no photon lost at any detector.
    pub success_probability: f64,
}

impl LossyMeasurement {
    /// Accepted branches where no photon went unregistered.
    pub fn lossless_branches(&self) -> impl Iterator<Item = &OutcomeBranch> {
        self.accepted.iter().filter(|b| b.photons_lost() == 0)
    }

    /// Mixed post-measurement state over every heralded branch, weighted by
    /// branch probability (total weight = heralded probability).
    pub fn heralded_remainder(&self) -> Option<EnsembleState> {
        if self.accepted.is_empty() {
            return None;
        }
        EnsembleState::new(
            self.accepted
                .iter()
                .map(|b| (b.probability, b.remaining.clone()))
                .collect(),
        )
        .ok()
    }
}

/// Detection where each arriving photon registers independently with
/// probability `efficiency`.
///
/// A detector reached by `n` photons registers `k` of them with weight
/// `C(n,k) η^k (1-η)^(n-k)`. The unregistered photons are traced out, so
/// branches differing only in `lost` are incoherent.
pub fn measure_with_loss(s: &PureState, d: &DetectorSpec) -> Result<LossyMeasurement> {
    let branches = enumerate(s, d)?;
    let (accepted, heralded) = postselect_single_clicks(&branches);
    let success = accepted
        .iter()
        .filter(|b| b.photons_lost() == 0)
        .map(|b| b.probability)
        .sum();
    Ok(LossyMeasurement {
        branches,
        accepted,
        heralded_probability: heralded,
        success_probability: success,
    })
}

type BranchKey = (Vec<DetectorCount>, Vec<DetectorCount>);

fn enumerate(s: &PureState, d: &DetectorSpec) -> Result<Vec<OutcomeBranch>> {
    d.validate(s)?;
    let (s, _) = s.normalize()?;
    let mut rotated = s;
    for &m in &d.modes {
        rotated = expand_in_diagonal_basis(&rotated, m)?;
    }

    let eta = d.efficiency;
    let mut groups: BTreeMap<BranchKey, PureState> = BTreeMap::new();
    for (config, amp) in rotated.terms() {
        let rest = clear_modes(config, &d.modes);
        let arrivals: Vec<DetectorCount> = d
            .modes
            .iter()
            .map(|&m| {
                let o = config.get(m);
                DetectorCount::new(o.h, o.v)
            })
            .collect();
        for_each_loss_split(&arrivals, eta, &mut |registered, lost, factor| {
            groups
                .entry((registered.to_vec(), lost.to_vec()))
                .or_insert_with(|| PureState::zero(rotated.mode_count()))
                .accumulate(rest.clone(), amp * Amplitude::new(factor, 0.0));
        });
    }

    let mut out = Vec::new();
    for ((pattern, lost), state) in groups {
        let probability = state.norm_sqr();
        if probability < BRANCH_CUTOFF {
            continue;
        }
        let remaining = state.normalized()?;
        let j = pattern.iter().map(|c| c.minus).sum();
        out.push(OutcomeBranch {
            pattern,
            lost,
            probability,
            remaining,
            j,
        });
    }
    Ok(out)
}

/// Calls `f(registered, lost, amplitude_factor)` for every way of losing
/// photons at each detector. With `eta == 1` only the no-loss split exists.
fn for_each_loss_split<F>(arrivals: &[DetectorCount], eta: f64, f: &mut F)
where
    F: FnMut(&[DetectorCount], &[DetectorCount], f64),
{
    let mut registered = vec![DetectorCount::default(); arrivals.len()];
    let mut lost = vec![DetectorCount::default(); arrivals.len()];
    recurse(arrivals, eta, 0, 1.0, &mut registered, &mut lost, f);

    fn recurse<F>(
        arrivals: &[DetectorCount],
        eta: f64,
        idx: usize,
        factor: f64,
        registered: &mut Vec<DetectorCount>,
        lost: &mut Vec<DetectorCount>,
        f: &mut F,
    ) where
        F: FnMut(&[DetectorCount], &[DetectorCount], f64),
    {
        if idx == arrivals.len() {
            f(registered, lost, factor);
            return;
        }
        let a = arrivals[idx];
        for lp in 0..=a.plus {
            for lm in 0..=a.minus {
                let kept = a.total() - lp - lm;
                let weight = (binomial(a.plus, lp) * binomial(a.minus, lm)) as f64
                    * eta.powi(kept as i32)
                    * (1.0 - eta).powi((lp + lm) as i32);
                if weight == 0.0 {
                    continue;
                }
                registered[idx] = DetectorCount::new(a.plus - lp, a.minus - lm);
                lost[idx] = DetectorCount::new(lp, lm);
                recurse(
                    arrivals,
                    eta,
                    idx + 1,
                    factor * weight.sqrt(),
                    registered,
                    lost,
                    f,
                );
            }
        }
    }
}

/// Basis configuration with the listed modes emptied.
pub fn clear_modes(config: &BasisConfiguration, modes: &[usize]) -> BasisConfiguration {
    let mut c = config.clone();
    for &m in modes {
        c.set(m, Occupancy::EMPTY);
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elements::{apply_pbs, ModePair};
    use crate::fock::Polarization::{H, V};

    fn two_photon_network(input: &PureState) -> PureState {
        let a = std::f64::consts::FRAC_1_SQRT_2;
        let ghz = PureState::from_polarization_terms(
            2,
            [
                (vec![H, H], Amplitude::new(a, 0.0)),
                (vec![V, V], Amplitude::new(a, 0.0)),
            ],
        )
        .unwrap();
        // input on modes 0, 2; ancilla on 1, 3
        let s = input.tensor(&ghz).permute_modes(&[0, 2, 1, 3]).unwrap();
        let s = apply_pbs(&s, ModePair::new(0, 1).unwrap()).unwrap();
        apply_pbs(&s, ModePair::new(2, 3).unwrap()).unwrap()
    }

    #[test]
    fn vacuum_detectors_give_one_branch() {
        let s = PureState::product(&[H, V]).tensor(&PureState::vacuum(2));
        let b = enumerate_outcomes(&s, &DetectorSpec::ideal(vec![2, 3])).unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!(b[0].pattern, vec![DetectorCount::default(); 2]);
        assert!((b[0].probability - 1.0).abs() < 1e-15);
    }

    #[test]
    fn parity_eigenstate_branch_structure() {
        let a = Amplitude::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let input =
            PureState::from_polarization_terms(2, [(vec![H, H], a), (vec![V, V], a)]).unwrap();
        let out = two_photon_network(&input);
        let branches = enumerate_outcomes(&out, &DetectorSpec::ideal(vec![1, 3])).unwrap();
        let total: f64 = branches.iter().map(|b| b.probability).sum();
        assert!((total - 1.0).abs() < 1e-12);

        let singles: Vec<_> = branches.iter().filter(|b| b.is_single_click()).collect();
        assert_eq!(singles.len(), 4);
        for b in &singles {
            assert!((b.probability - 0.125).abs() < 1e-12);
        }
        // the rest: both detectors empty, or both holding a photon pair
        for b in branches.iter().filter(|b| !b.is_single_click()) {
            let totals: Vec<u32> = b.pattern.iter().map(|c| c.total()).collect();
            assert!(totals == vec![0, 0] || totals == vec![2, 2], "{totals:?}");
        }
        let (_, success) = postselect_single_clicks(&branches);
        assert!((success - 0.5).abs() < 1e-12);
    }

    #[test]
    fn odd_parity_input_never_clicks_once_each() {
        let out = two_photon_network(&PureState::product(&[H, V]));
        let branches = enumerate_outcomes(&out, &DetectorSpec::ideal(vec![1, 3])).unwrap();
        // |H V> meets |H H> (one detector empty) or |V V> (one detector
        // holding a pair); no branch clicks once at every detector
        assert!(branches
            .iter()
            .all(|b| b.pattern.iter().any(|c| c.total() != 1)));
        assert!(branches
            .iter()
            .any(|b| b.pattern.iter().any(|c| c.total() == 2)));
        let (acc, success) = postselect_single_clicks(&branches);
        assert!(acc.is_empty());
        assert_eq!(success, 0.0);
    }

    #[test]
    fn empty_branch_list() {
        let (acc, success) = postselect_single_clicks(&[]);
        assert!(acc.is_empty());
        assert_eq!(success, 0.0);
    }

    #[test]
    fn remainders_have_empty_detectors() {
        let a = Amplitude::new(0.5, 0.0);
        let input = PureState::from_polarization_terms(
            2,
            [
                (vec![H, H], a),
                (vec![V, V], a),
                (vec![H, V], a),
                (vec![V, H], a),
            ],
        )
        .unwrap();
        let out = two_photon_network(&input);
        for b in enumerate_outcomes(&out, &DetectorSpec::ideal(vec![1, 3])).unwrap() {
            for (c, _) in b.remaining.terms() {
                assert!(c.get(1).is_empty() && c.get(3).is_empty());
            }
            assert!((b.remaining.norm() - 1.0).abs() < 1e-12);
            assert_eq!(b.j, b.pattern.iter().map(|c| c.minus).sum::<u32>());
        }
    }

    #[test]
    fn loss_limits() {
        let a = Amplitude::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let input =
            PureState::from_polarization_terms(2, [(vec![H, H], a), (vec![V, V], a)]).unwrap();
        let out = two_photon_network(&input);

        let lossless = measure_with_loss(&out, &DetectorSpec::ideal(vec![1, 3])).unwrap();
        let (acc, success) = postselect_single_clicks(
            &enumerate_outcomes(&out, &DetectorSpec::ideal(vec![1, 3])).unwrap(),
        );
        assert_eq!(lossless.accepted, acc);
        assert_eq!(lossless.success_probability, success);
        assert_eq!(lossless.heralded_probability, success);

        let dark = DetectorSpec::with_efficiency(vec![1, 3], 0.0).unwrap();
        let m = measure_with_loss(&out, &dark).unwrap();
        assert_eq!(m.success_probability, 0.0);
        assert_eq!(m.heralded_probability, 0.0);

        let half = DetectorSpec::with_efficiency(vec![1, 3], 0.5).unwrap();
        let m = measure_with_loss(&out, &half).unwrap();
        assert!((m.success_probability - 0.125).abs() < 1e-12);
        // pairs reaching both detectors with one photon lost at each
        assert!((m.heralded_probability - (0.125 + 0.0625)).abs() < 1e-12);
        let ens = m.heralded_remainder().unwrap();
        assert!((ens.total_weight() - m.heralded_probability).abs() < 1e-12);
    }

    #[test]
    fn efficiency_bounds() {
        assert_eq!(
            DetectorSpec::with_efficiency(vec![0], 1.5),
            Err(Error::InvalidEfficiency(1.5))
        );
        let bad = DetectorSpec {
            modes: vec![0],
            efficiency: -0.1,
        };
        assert_eq!(
            measure_with_loss(&PureState::product(&[H]), &bad),
            Err(Error::InvalidEfficiency(-0.1))
        );
        assert_eq!(
            enumerate_outcomes(&PureState::product(&[H]), &DetectorSpec::ideal(vec![])),
            Err(Error::NoDetectors)
        );
    }
}
