//! Sparse polarization Fock states.
//!
//! A basis configuration lists, for every spatial mode, how many horizontally
//! and vertically polarized photons it holds. A [`PureState`] maps
//! configurations to complex amplitudes; an [`EnsembleState`] is a weighted
//! list of pure states standing in for a density matrix.
//!
//! Modes are indexed from 0. Terms are kept in a `BTreeMap`, so iteration
//! order (and therefore every printed report) is deterministic.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Complex probability amplitude.
pub type Amplitude = Complex64;

const NORM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarization {
    H,
    V,
}

impl Polarization {
    pub fn flipped(self) -> Self {
        match self {
            Polarization::H => Polarization::V,
            Polarization::V => Polarization::H,
        }
    }
}

impl fmt::Display for Polarization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Polarization::H => "H",
            Polarization::V => "V",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid polarization '{0}'")]
pub struct InvalidPolarization(pub String);

impl FromStr for Polarization {
    type Err = InvalidPolarization;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "H" | "h" => Ok(Polarization::H),
            "V" | "v" => Ok(Polarization::V),
            other => Err(InvalidPolarization(other.to_string())),
        }
    }
}

/// Photon counts in one spatial mode.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Occupancy {
    pub h: u32,
    pub v: u32,
}

impl Occupancy {
    pub const EMPTY: Occupancy = Occupancy { h: 0, v: 0 };

    pub fn new(h: u32, v: u32) -> Self {
        Occupancy { h, v }
    }

    pub fn single(pol: Polarization) -> Self {
        match pol {
            Polarization::H => Occupancy { h: 1, v: 0 },
            Polarization::V => Occupancy { h: 0, v: 1 },
        }
    }

    pub fn total(self) -> u32 {
        self.h + self.v
    }

    pub fn is_empty(self) -> bool {
        self.total() == 0
    }

    /// The polarization of a singly occupied mode.
    pub fn single_polarization(self) -> Option<Polarization> {
        match (self.h, self.v) {
            (1, 0) => Some(Polarization::H),
            (0, 1) => Some(Polarization::V),
            _ => None,
        }
    }
}

/// Occupation-number basis label over a fixed number of modes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisConfiguration(Vec<Occupancy>);

impl BasisConfiguration {
    pub fn vacuum(modes: usize) -> Self {
        BasisConfiguration(vec![Occupancy::EMPTY; modes])
    }

    pub fn from_occupancies(occ: Vec<Occupancy>) -> Self {
        BasisConfiguration(occ)
    }

    /// One photon per mode with the given polarizations.
    pub fn from_polarizations(pols: &[Polarization]) -> Self {
        BasisConfiguration(pols.iter().map(|&p| Occupancy::single(p)).collect())
    }

    pub fn mode_count(&self) -> usize {
        self.0.len()
    }

    pub fn occupancies(&self) -> &[Occupancy] {
        &self.0
    }

    pub fn get(&self, mode: usize) -> Occupancy {
        self.0[mode]
    }

    pub fn set(&mut self, mode: usize, occ: Occupancy) {
        self.0[mode] = occ;
    }

    pub fn photon_number(&self) -> u32 {
        self.0.iter().map(|o| o.total()).sum()
    }

    pub fn h_count(&self) -> u32 {
        self.0.iter().map(|o| o.h).sum()
    }

    pub fn v_count(&self) -> u32 {
        self.0.iter().map(|o| o.v).sum()
    }

    /// Per-mode polarizations when every mode holds exactly one photon.
    pub fn polarizations(&self) -> Option<Vec<Polarization>> {
        self.0.iter().map(|o| o.single_polarization()).collect()
    }

    pub fn concat(&self, other: &BasisConfiguration) -> BasisConfiguration {
        let mut occ = self.0.clone();
        occ.extend_from_slice(&other.0);
        BasisConfiguration(occ)
    }
}

impl fmt::Display for BasisConfiguration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("|")?;
        for (i, o) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            match (o.h, o.v) {
                (0, 0) => f.write_str("0")?,
                (h, 0) => write!(f, "{h}H")?,
                (0, v) => write!(f, "{v}V")?,
                (h, v) => write!(f, "{h}H{v}V")?,
            }
        }
        f.write_str(">")
    }
}

/// Which quantity `fidelity` reports for pure states `a`, `b`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum FidelityConvention {
    /// `|<a|b>|²`
    #[default]
    Squared,
    /// `|<a|b>|`
    Amplitude,
}

impl FromStr for FidelityConvention {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "squared" => Ok(FidelityConvention::Squared),
            "amplitude" => Ok(FidelityConvention::Amplitude),
            other => Err(format!("unknown fidelity convention '{other}'")),
        }
    }
}

impl FidelityConvention {
    /// Converts a squared overlap into this convention.
    pub fn from_overlap_sqr(self, overlap_sqr: f64) -> f64 {
        match self {
            FidelityConvention::Squared => overlap_sqr,
            FidelityConvention::Amplitude => overlap_sqr.max(0.0).sqrt(),
        }
    }
}

/// Sparse superposition of basis configurations.
///
/// Only exact zeros are dropped on construction; [`PureState::pruned`] applies
/// a looser threshold on demand.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    modes: usize,
    terms: BTreeMap<BasisConfiguration, Amplitude>,
}

impl PureState {
    /// The zero vector over `modes` modes.
    pub fn zero(modes: usize) -> Self {
        PureState {
            modes,
            terms: BTreeMap::new(),
        }
    }

    pub fn vacuum(modes: usize) -> Self {
        Self::basis(BasisConfiguration::vacuum(modes))
    }

    pub fn basis(config: BasisConfiguration) -> Self {
        let mut s = Self::zero(config.mode_count());
        s.terms.insert(config, Amplitude::new(1.0, 0.0));
        s
    }

    /// Single-photon-per-mode product state, e.g. `|H V H>`.
    pub fn product(pols: &[Polarization]) -> Self {
        Self::basis(BasisConfiguration::from_polarizations(pols))
    }

    /// Builds a state from `(configuration, amplitude)` pairs, summing repeats.
    pub fn from_terms<I>(modes: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (BasisConfiguration, Amplitude)>,
    {
        let mut s = Self::zero(modes);
        for (config, amp) in terms {
            if config.mode_count() != modes {
                return Err(Error::ConfigurationLength {
                    expected: modes,
                    found: config.mode_count(),
                });
            }
            if !amp.re.is_finite() || !amp.im.is_finite() {
                return Err(Error::NonFiniteAmplitude);
            }
            s.accumulate(config, amp);
        }
        Ok(s)
    }

    /// Builds a state over single-photon-per-mode configurations.
    pub fn from_polarization_terms<I>(modes: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<Polarization>, Amplitude)>,
    {
        Self::from_terms(
            modes,
            terms
                .into_iter()
                .map(|(p, a)| (BasisConfiguration::from_polarizations(&p), a)),
        )
    }

    pub(crate) fn accumulate(&mut self, config: BasisConfiguration, amp: Amplitude) {
        debug_assert_eq!(config.mode_count(), self.modes);
        let zero = Amplitude::new(0.0, 0.0);
        match self.terms.entry(config) {
            Entry::Vacant(e) => {
                if amp != zero {
                    e.insert(amp);
                }
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += amp;
                if *e.get() == zero {
                    e.remove();
                }
            }
        }
    }

    pub fn mode_count(&self) -> usize {
        self.modes
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BasisConfiguration, &Amplitude)> {
        self.terms.iter()
    }

    pub fn amplitude(&self, config: &BasisConfiguration) -> Amplitude {
        self.terms
            .get(config)
            .copied()
            .unwrap_or(Amplitude::new(0.0, 0.0))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.terms.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Returns the unit-norm state and the original norm.
    pub fn normalize(&self) -> Result<(PureState, f64)> {
        let norm = self.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NullState);
        }
        Ok((self.scaled(Amplitude::new(1.0 / norm, 0.0)), norm))
    }

    pub fn normalized(&self) -> Result<PureState> {
        self.normalize().map(|(s, _)| s)
    }

    pub fn scaled(&self, factor: Amplitude) -> PureState {
        let mut out = Self::zero(self.modes);
        for (c, a) in &self.terms {
            let v = a * factor;
            if v != Amplitude::new(0.0, 0.0) {
                out.terms.insert(c.clone(), v);
            }
        }
        out
    }

    /// Drops terms whose squared magnitude is at most `threshold`.
    pub fn pruned(&self, threshold: f64) -> PureState {
        PureState {
            modes: self.modes,
            terms: self
                .terms
                .iter()
                .filter(|(_, a)| a.norm_sqr() > threshold)
                .map(|(c, a)| (c.clone(), *a))
                .collect(),
        }
    }

    /// `self ⊗ other`, with `other`'s modes placed after `self`'s.
    pub fn tensor(&self, other: &PureState) -> PureState {
        let mut out = Self::zero(self.modes + other.modes);
        for (ca, aa) in &self.terms {
            for (cb, ab) in &other.terms {
                out.accumulate(ca.concat(cb), aa * ab);
            }
        }
        out
    }

    /// `<self|other>`.
    pub fn overlap(&self, other: &PureState) -> Result<Amplitude> {
        if self.modes != other.modes {
            return Err(Error::ModeCountMismatch {
                left: self.modes,
                right: other.modes,
            });
        }
        let (small, large, conj_small) = if self.terms.len() <= other.terms.len() {
            (self, other, true)
        } else {
            (other, self, false)
        };
        let mut acc = Amplitude::new(0.0, 0.0);
        for (c, a) in &small.terms {
            if let Some(b) = large.terms.get(c) {
                acc += if conj_small {
                    a.conj() * b
                } else {
                    b.conj() * a
                };
            }
        }
        Ok(acc)
    }

    pub fn fidelity(&self, other: &PureState, convention: FidelityConvention) -> Result<f64> {
        fidelity(self, other, convention)
    }

    /// Total photon number when every term agrees on it.
    pub fn photon_number(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(|c| c.photon_number());
        let first = it.next()?;
        it.all(|n| n == first).then_some(first)
    }

    pub(crate) fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.modes {
            Err(Error::InvalidMode {
                mode,
                modes: self.modes,
            })
        } else {
            Ok(())
        }
    }

    /// Applies a configuration-to-configuration map with a per-term phase.
    pub(crate) fn map_terms<F>(&self, mut f: F) -> PureState
    where
        F: FnMut(&BasisConfiguration) -> (BasisConfiguration, Amplitude),
    {
        let mut out = Self::zero(self.modes);
        for (c, a) in &self.terms {
            let (nc, phase) = f(c);
            out.accumulate(nc, a * phase);
        }
        out
    }

    /// Reorders modes: output mode `i` is input mode `order[i]`.
    pub fn permute_modes(&self, order: &[usize]) -> Result<PureState> {
        let mut seen = vec![false; self.modes];
        if order.len() != self.modes {
            return Err(Error::ModeCountMismatch {
                left: self.modes,
                right: order.len(),
            });
        }
        for &m in order {
            self.check_mode(m)?;
            if std::mem::replace(&mut seen[m], true) {
                return Err(Error::DegenerateModePair(m));
            }
        }
        Ok(self.map_terms(|c| {
            let occ = order.iter().map(|&m| c.get(m)).collect();
            (BasisConfiguration(occ), Amplitude::new(1.0, 0.0))
        }))
    }

    /// Keeps only the listed modes, in the listed order. Every other mode
    /// must be empty in every term.
    pub fn select_modes(&self, keep: &[usize]) -> Result<PureState> {
        for &m in keep {
            self.check_mode(m)?;
        }
        let dropped: Vec<usize> = (0..self.modes).filter(|m| !keep.contains(m)).collect();
        let occupied: Vec<usize> = dropped
            .iter()
            .copied()
            .filter(|&m| self.terms.keys().any(|c| !c.get(m).is_empty()))
            .collect();
        if !occupied.is_empty() {
            return Err(Error::OccupiedModeDropped(occupied));
        }
        let mut out = Self::zero(keep.len());
        for (c, a) in &self.terms {
            let occ = keep.iter().map(|&m| c.get(m)).collect();
            out.accumulate(BasisConfiguration(occ), *a);
        }
        Ok(out)
    }
}

impl fmt::Display for PureState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (c, a)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({:.6}{:+.6}i){}", a.re, a.im, c)?;
        }
        Ok(())
    }
}

pub fn tensor(a: &PureState, b: &PureState) -> PureState {
    a.tensor(b)
}

pub fn normalize(s: &PureState) -> Result<(PureState, f64)> {
    s.normalize()
}

pub fn overlap(a: &PureState, b: &PureState) -> Result<Amplitude> {
    a.overlap(b)
}

pub fn fidelity(a: &PureState, b: &PureState, convention: FidelityConvention) -> Result<f64> {
    let o = a.overlap(b)?;
    Ok(convention.from_overlap_sqr(o.norm_sqr()))
}

/// Weighted mixture of normalized pure states.
///
/// Weights may sum to less than one: post-selected ensembles keep their
/// acceptance probability as the total weight.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleState {
    components: Vec<(f64, PureState)>,
}

impl EnsembleState {
    pub fn new(components: Vec<(f64, PureState)>) -> Result<Self> {
        let first = components.first().ok_or(Error::EmptyEnsemble)?;
        let modes = first.1.mode_count();
        let mut total = 0.0;
        for (w, s) in &components {
            if !(w.is_finite() && *w > 0.0 && *w <= 1.0 + NORM_TOL) {
                return Err(Error::InvalidWeight(*w));
            }
            if s.mode_count() != modes {
                return Err(Error::ModeCountMismatch {
                    left: modes,
                    right: s.mode_count(),
                });
            }
            let n = s.norm_sqr();
            if (n - 1.0).abs() > 1e-9 {
                return Err(Error::UnnormalizedComponent(n));
            }
            total += w;
        }
        if total > 1.0 + NORM_TOL {
            return Err(Error::WeightOverflow(total));
        }
        Ok(EnsembleState { components })
    }

    pub fn pure(state: PureState) -> Result<Self> {
        let state = state.normalized()?;
        Ok(EnsembleState {
            components: vec![(1.0, state)],
        })
    }

    pub fn components(&self) -> &[(f64, PureState)] {
        &self.components
    }

    pub fn total_weight(&self) -> f64 {
        self.components.iter().map(|(w, _)| w).sum()
    }

    pub fn mode_count(&self) -> usize {
        self.components[0].1.mode_count()
    }

    /// Rescales weights to sum to one.
    pub fn renormalized(&self) -> EnsembleState {
        let total = self.total_weight();
        EnsembleState {
            components: self
                .components
                .iter()
                .map(|(w, s)| (w / total, s.clone()))
                .collect(),
        }
    }

    /// `<target|rho|target>` of the renormalized mixture, reported in the
    /// given convention (its square root for [`FidelityConvention::Amplitude`]).
    pub fn fidelity_with(&self, target: &PureState, convention: FidelityConvention) -> Result<f64> {
        let total = self.total_weight();
        let mut acc = 0.0;
        for (w, s) in &self.components {
            acc += w * s.overlap(target)?.norm_sqr();
        }
        Ok(convention.from_overlap_sqr(acc / total))
    }
}
