//! Corpus runs: manifest in, per-song features, corpus means, interval
//! aggregate and feature/play-count correlations out.

mod manifest;
mod report;
pub mod svg;

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

pub use manifest::{load_manifest, parse_manifest, ManifestEntry, MANIFEST_COLUMNS};
pub use report::{fixed6, render_report, render_song, write_report, ReportFormat};

use crate::error::AnalysisError;
use crate::features::{
    aggregate_interval_distribution, ambitus, fold_intervals, interval_distribution, pc_distribution,
    pitch_class_entropy, AggregateMode, AmbitusResult, IvWeighting, PcWeighting,
};
use crate::notes::{enforce_monophony, events_to_notes, MonoPolicy};
use crate::smf::parse_smf;
use crate::stats::{correlate, mean, Sample};
use crate::{CorrelationResult64, FoldedIntervalView64, IntervalDistribution64, NoteMatrix64};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CorpusError {
    #[error("manifest line {line}: {message}")]
    ManifestSyntax { line: usize, message: String },
    #[error("manifest line {line}: duplicate id '{id}'")]
    DuplicateId { id: String, line: usize },
    #[error("manifest line {line}: invalid {field}: {message}")]
    InvalidField { line: usize, field: &'static str, message: String },
    #[error("{path}: {message}")]
    IoFailure { path: String, message: String },
    #[error("no song in the corpus could be analyzed")]
    CorpusEmpty,
    #[error("nothing to plot")]
    EmptyInput,
}

impl CorpusError {
    pub(crate) fn io(path: &Path, e: std::io::Error) -> Self {
        CorpusError::IoFailure { path: path.display().to_string(), message: e.to_string() }
    }
}

/// Effective analysis settings, echoed into every report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct AnalysisConfig {
    pub mono_policy: MonoPolicy,
    pub pc_weighting: PcWeighting,
    pub iv_weighting: IvWeighting,
    pub aggregate: AggregateMode,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SongFeatures {
    pub ambitus: AmbitusResult,
    /// Entropy under the configured pitch-class weighting.
    pub entropy: f64,
    pub entropy_duration_weighted: f64,
    pub entropy_count_weighted: f64,
    pub intervals: IntervalDistribution64,
    pub folded: FoldedIntervalView64,
    pub note_count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SongRecord {
    pub entry: ManifestEntry,
    /// Features, or the message of the error that stopped this song.
    pub outcome: Result<SongFeatures, String>,
    pub warnings: Vec<String>,
}

impl SongRecord {
    pub fn features(&self) -> Option<&SongFeatures> {
        self.outcome.as_ref().ok()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Feature {
    Ambitus,
    Entropy,
}

impl Feature {
    pub fn name(self) -> &'static str {
        match self {
            Feature::Ambitus => "ambitus",
            Feature::Entropy => "entropy",
        }
    }

    fn value(self, f: &SongFeatures) -> f64 {
        match self {
            Feature::Ambitus => f64::from(f.ambitus.semitones),
            Feature::Entropy => f.entropy,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureCorrelation {
    pub feature: Feature,
    pub result: CorrelationResult64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusReport {
    pub songs: Vec<SongRecord>,
    pub mean_ambitus: f64,
    pub mean_entropy: f64,
    pub aggregate_intervals: IntervalDistribution64,
    pub aggregate_folded: FoldedIntervalView64,
    pub correlations: Vec<FeatureCorrelation>,
    /// Skipped correlations and similar corpus-level remarks.
    pub notices: Vec<String>,
    pub config: AnalysisConfig,
}

/// Extract features from an already parsed note matrix.
pub fn song_features(nm: &NoteMatrix64, config: &AnalysisConfig) -> Result<SongFeatures, AnalysisError> {
    let mono = enforce_monophony(nm, config.mono_policy)?;
    let by_duration = pitch_class_entropy(&pc_distribution(&mono, PcWeighting::Duration)?).normalized_entropy;
    let by_count = pitch_class_entropy(&pc_distribution(&mono, PcWeighting::Count)?).normalized_entropy;
    let intervals = interval_distribution(&mono, config.iv_weighting)?;
    Ok(SongFeatures {
        ambitus: ambitus(&mono)?,
        entropy: match config.pc_weighting {
            PcWeighting::Duration => by_duration,
            PcWeighting::Count => by_count,
        },
        entropy_duration_weighted: by_duration,
        entropy_count_weighted: by_count,
        folded: fold_intervals(&intervals),
        intervals,
        note_count: mono.len(),
    })
}

/// Parse, select, make monophonic and measure one song. Never fails; errors
/// land in the record.
pub fn analyze_song(entry: &ManifestEntry, config: &AnalysisConfig) -> SongRecord {
    let mut warnings = Vec::new();
    let outcome = (|| {
        let bytes = std::fs::read(&entry.midi_path).map_err(|e| format!("{}: {e}", entry.midi_path.display()))?;
        let doc = parse_smf(&bytes).map_err(|e| e.to_string())?;
        warnings.extend(doc.warnings.iter().map(ToString::to_string));
        let nm: NoteMatrix64 = events_to_notes(&doc, &entry.selector()).map_err(|e| e.to_string())?;
        warnings.extend(nm.warnings().iter().map(ToString::to_string));
        song_features(&nm, config).map_err(|e| e.to_string())
    })();
    SongRecord { entry: entry.clone(), outcome, warnings }
}

pub fn analyze_corpus(entries: &[ManifestEntry], config: &AnalysisConfig) -> Result<CorpusReport, CorpusError> {
    let songs: Vec<SongRecord> = entries.par_iter().map(|e| analyze_song(e, config)).collect();
    build_report(songs, *config)
}

/// Reduce per-song records, in the given order, to a corpus report.
pub fn build_report(songs: Vec<SongRecord>, config: AnalysisConfig) -> Result<CorpusReport, CorpusError> {
    let ok: Vec<&SongFeatures> = songs.iter().filter_map(SongRecord::features).collect();
    if ok.is_empty() {
        return Err(CorpusError::CorpusEmpty);
    }
    let sample = |label: &str, f: Feature| {
        Sample::new(label, ok.iter().map(|s| f.value(s)).collect()).expect("features are finite")
    };
    let mean_ambitus = mean(&sample("ambitus", Feature::Ambitus)).expect("non-empty");
    let mean_entropy = mean(&sample("entropy", Feature::Entropy)).expect("non-empty");
    let per_song: Vec<IntervalDistribution64> = ok.iter().map(|s| s.intervals).collect();
    let aggregate_intervals = aggregate_interval_distribution(&per_song, config.aggregate).expect("non-empty");

    let mut correlations = Vec::new();
    let mut notices = Vec::new();
    for feature in [Feature::Ambitus, Feature::Entropy] {
        match correlate_feature(&songs, feature) {
            Ok(result) => correlations.push(FeatureCorrelation { feature, result }),
            Err(e) => notices.push(format!("{} vs plays: correlation skipped: {e}", feature.name())),
        }
    }

    Ok(CorpusReport {
        mean_ambitus,
        mean_entropy,
        aggregate_folded: fold_intervals(&aggregate_intervals),
        aggregate_intervals,
        correlations,
        notices,
        config,
        songs,
    })
}

/// Pearson correlation of a feature against play counts over songs that have
/// both features and a play count.
pub fn correlate_feature(songs: &[SongRecord], feature: Feature) -> Result<CorrelationResult64, AnalysisError> {
    let (xs, ys): (Vec<f64>, Vec<f64>) =
        songs.iter().filter_map(|s| Some((feature.value(s.features()?), s.entry.plays? as f64))).unzip();
    correlate(&Sample::new(feature.name(), xs)?, &Sample::new("plays", ys)?)
}

/// Write the standard chart set into `dir`, returning the files written.
pub fn write_charts(report: &CorpusReport, dir: &Path) -> Result<Vec<PathBuf>, CorpusError> {
    std::fs::create_dir_all(dir).map_err(|e| CorpusError::io(dir, e))?;
    let ok: Vec<(&SongRecord, &SongFeatures)> = report.songs.iter().filter_map(|s| Some((s, s.features()?))).collect();
    let mut written = Vec::new();

    let ambitus: Vec<(String, f64)> =
        ok.iter().map(|(s, f)| (s.entry.title.clone(), f64::from(f.ambitus.semitones))).collect();
    let path = dir.join("ambitus.svg");
    svg::render_bar_chart(&ambitus, "Ambitus per song", "Song", "Ambitus (semitones)", &path)?;
    written.push(path);

    let entropy: Vec<(String, f64)> = ok.iter().map(|(s, f)| (s.entry.title.clone(), f.entropy)).collect();
    let path = dir.join("entropy.svg");
    svg::render_bar_chart(&entropy, "Pitch-class entropy per song", "Song", "Normalized entropy", &path)?;
    written.push(path);

    let intervals: Vec<(String, f64)> = crate::features::INTERVAL_NAMES
        .iter()
        .zip(report.aggregate_folded.unsigned_bins)
        .map(|(n, v)| (n.to_string(), v))
        .collect();
    let path = dir.join("intervals.svg");
    svg::render_bar_chart(&intervals, "Aggregate interval distribution", "Interval", "Relative frequency", &path)?;
    written.push(path);

    for feature in [Feature::Ambitus, Feature::Entropy] {
        let points: Vec<(f64, f64, String)> = ok
            .iter()
            .filter_map(|(s, f)| Some((s.entry.plays? as f64, feature.value(f), s.entry.title.clone())))
            .collect();
        if points.is_empty() {
            continue;
        }
        let path = dir.join(format!("{}_vs_plays.svg", feature.name()));
        let title = format!("Plays vs {}", feature.name());
        svg::render_scatter(&points, &title, "Plays", feature.name(), &path)?;
        written.push(path);
    }
    Ok(written)
}
