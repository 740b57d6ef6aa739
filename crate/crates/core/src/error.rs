use std::fmt;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Pipeline stage of the FRI recovery chain, attached to propagated errors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FriStage {
    Coefficients,
    AnnihilatingFilter,
    Delays,
    Amplitudes,
}

impl fmt::Display for FriStage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FriStage::Coefficients => "coeffs_from_samples",
            FriStage::AnnihilatingFilter => "annihilating_filter",
            FriStage::Delays => "delays_from_filter",
            FriStage::Amplitudes => "amplitudes_from_delays",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("{what} = {value} is not an integer")]
    NonInteger { what: &'static str, value: f64 },

    #[error("signals live on different grids")]
    GridMismatch,

    #[error("bands {first} and {second} overlap")]
    OverlappingBands { first: usize, second: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("matrix is rank deficient (rank {rank}, need {needed})")]
    RankDeficient { rank: usize, needed: usize },

    #[error("phase violates the PNS invariance condition for alias index {beta}")]
    PnsPhaseDegenerate { beta: i64 },

    #[error("no integer alias index folds {frequency} Hz onto the negative band")]
    NoAliasIndex { frequency: f64 },

    #[error("no candidate phase keeps every alias index invertible")]
    NoValidPhase,

    #[error("annihilating filter is degenerate: leading coefficient {0:e}")]
    DegenerateFilter(f64),

    #[error("data supports only {detected} exponentials, expected {expected}")]
    TooFewComponents { detected: usize, expected: usize },

    #[error("repeated roots: delays are not distinct")]
    RepeatedRoots,

    #[error("eigenvalue iteration failed to converge")]
    NoConvergence,

    #[error("spectral sample |S| = {magnitude:e} vanishes at index {index}")]
    KernelZero { index: i64, magnitude: f64 },

    #[error("pulse spectrum is not finite at index {0}")]
    NonFinitePulse(i64),

    #[error("{stage}: {source}")]
    Stage {
        stage: FriStage,
        #[source]
        source: Box<Error>,
    },

    #[error("csv: {0}")]
    Csv(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn at(self, stage: FriStage) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// Stage tag of a propagated FRI error, if any.
    pub fn stage(&self) -> Option<FriStage> {
        match self {
            Error::Stage { stage, .. } => Some(*stage),
            _ => None,
        }
    }
}
