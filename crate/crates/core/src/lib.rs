//! Exact simulation of a linear-optical parity filter for polarization-encoded
//! photons.
//!
//! An `n`-photon target state is interfered, photon by photon, with an
//! `n`-photon GHZ ancilla on polarizing beam splitters. Detecting one photon
//! per ancilla port in the diagonal polarization basis projects the target
//! onto `span{|H...H>, |V...V>}` with probability 1/2, independent of `n`.
//!
//! Modules, bottom up:
//! - [`fock`]: sparse polarization Fock states and ensembles
//! - [`elements`]: beam splitter, σ_z, diagonal-basis rotation
//! - [`measurement`]: exhaustive ± outcome enumeration, post-selection, loss
//! - [`filters`]: the filter pipelines, the ideal projector, baselines
//! - [`noise`]: imperfect ancillas and closed-form predictions
//! - [`experiment`]: the experiment-file language, reports, sweeps

pub mod elements;
pub mod error;
pub mod experiment;
pub mod filters;
pub mod fock;
pub mod measurement;
pub mod noise;

pub use error::{Error, Result};
pub use fock::{
    Amplitude, BasisConfiguration, EnsembleState, FidelityConvention, Occupancy, Polarization,
    PureState,
};
