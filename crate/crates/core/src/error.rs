use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("cannot normalize null state")]
    NullState,

    #[error("mode count mismatch: {left} vs {right}")]
    ModeCountMismatch { left: usize, right: usize },

    #[error("mode index {mode} out of range for a {modes}-mode state")]
    InvalidMode { mode: usize, modes: usize },

    #[error("beam splitter ports must be distinct modes, got {0} twice")]
    DegenerateModePair(usize),

    #[error("rotation beyond single occupancy unsupported (mode {mode} holds {photons} photons)")]
    RotationOccupancy { mode: usize, photons: u32 },

    #[error("configuration spans {found} modes, expected {expected}")]
    ConfigurationLength { expected: usize, found: usize },

    #[error("amplitude is not finite")]
    NonFiniteAmplitude,

    #[error("ensemble weight {0} outside (0, 1]")]
    InvalidWeight(f64),

    #[error("ensemble weights sum to {0}, above 1")]
    WeightOverflow(f64),

    #[error("ensemble component is not normalized (norm² = {0})")]
    UnnormalizedComponent(f64),

    #[error("ensemble has no components")]
    EmptyEnsemble,

    #[error("detector efficiency {0} outside [0, 1]")]
    InvalidEfficiency(f64),

    #[error("no detector modes given")]
    NoDetectors,

    #[error("modes {0:?} are not empty and cannot be dropped")]
    OccupiedModeDropped(Vec<usize>),

    #[error("photon count must be at least {min}, got {found}")]
    PhotonCount { min: usize, found: usize },

    #[error("{role} must hold exactly one photon per mode in every term")]
    NotOnePhotonPerMode { role: &'static str },

    #[error("{role} spans {found} modes but the filter has {expected}")]
    SizeMismatch {
        role: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("contaminant amplitude |epsilon| = {0} must be below 1")]
    EpsilonOutOfRange(f64),

    #[error("contaminant pattern of length {found} does not match n = {expected}")]
    PatternLength { expected: usize, found: usize },

    #[error("contaminant pattern must mix H and V")]
    UniformPattern,

    #[error("filter-target amplitudes are both zero; prediction undefined")]
    UndefinedPrediction,

    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),

    #[error("sweep needs at least 2 steps, got {0}")]
    TooFewSteps(usize),

    #[error("sweep range [{from}, {to}] outside the legal domain of {param}")]
    InvalidRange {
        param: &'static str,
        from: f64,
        to: f64,
    },

    #[error("experiment: {0}")]
    Experiment(String),
}
