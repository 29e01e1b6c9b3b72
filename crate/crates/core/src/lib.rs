//! Symbolic melody analysis over Standard MIDI Files.
//!
//! The pipeline runs file bytes through [`smf::parse_smf`], builds a
//! [`notes::NoteMatrix`] for the selected voice, makes it monophonic, and
//! extracts ambitus, pitch-class entropy and interval profiles. The
//! [`corpus`] module drives that per song from a manifest and adds corpus
//! means and feature/play-count correlations.
//!
//! Numeric code is generic over [`Real`] (`f32` or `f64`); the aliases below
//! fix it to `f64`, which is what the corpus runner uses.

pub mod corpus;
pub mod error;
pub mod features;
pub mod notes;
mod real;
pub mod smf;
pub mod stats;

pub use error::AnalysisError;
pub use real::Real;

pub type Note64 = notes::Note<f64>;
pub type NoteMatrix64 = notes::NoteMatrix<f64>;
pub type NoteMatrix32 = notes::NoteMatrix<f32>;
pub type PitchClassDistribution64 = features::PitchClassDistribution<f64>;
pub type EntropyResult64 = features::EntropyResult<f64>;
pub type IntervalDistribution64 = features::IntervalDistribution<f64>;
pub type FoldedIntervalView64 = features::FoldedIntervalView<f64>;
pub type Sample64 = stats::Sample<f64>;
pub type CorrelationResult64 = stats::CorrelationResult<f64>;
