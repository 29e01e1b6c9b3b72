//! Text, JSON and CSV renderings of a corpus report. Every real number is
//! printed with six decimals so output is byte-stable.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

use super::{AnalysisConfig, CorpusError, CorpusReport, FeatureCorrelation, SongRecord};
use crate::features::INTERVAL_NAMES;
use crate::IntervalDistribution64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Json,
    Csv,
}

impl ReportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ReportFormat::Text => "txt",
            ReportFormat::Json => "json",
            ReportFormat::Csv => "csv",
        }
    }
}

/// A real rendered as a JSON number with exactly six decimals.
#[derive(Clone, Copy)]
struct Fixed6(f64);

impl Serialize for Fixed6 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return s.serialize_none();
        }
        let raw = RawValue::from_string(fixed6(self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}

/// Six-decimal rendering used throughout the reports.
pub fn fixed6(v: f64) -> String {
    let s = format!("{v:.6}");
    // avoid "-0.000000"
    if s.trim_start_matches('-').bytes().all(|b| b == b'0' || b == b'.') {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

fn fixed_vec(v: &[f64]) -> Vec<Fixed6> {
    v.iter().copied().map(Fixed6).collect()
}

#[derive(Serialize)]
struct JsonAmbitus {
    semitones: u8,
    lowest: u8,
    highest: u8,
}

#[derive(Serialize)]
struct JsonIntervals {
    signed: Vec<Fixed6>,
    folded: Vec<Fixed6>,
    overflow: usize,
    count: usize,
}

impl JsonIntervals {
    fn new(iv: &IntervalDistribution64) -> Self {
        JsonIntervals {
            signed: fixed_vec(&iv.signed_bins),
            folded: fixed_vec(&crate::features::fold_intervals(iv).unsigned_bins),
            overflow: iv.overflow_count,
            count: iv.interval_count,
        }
    }
}

#[derive(Serialize)]
struct JsonEntropyModes {
    duration: Fixed6,
    count: Fixed6,
}

#[derive(Serialize)]
struct JsonSong<'a> {
    id: &'a str,
    title: &'a str,
    status: &'static str,
    error: Option<&'a str>,
    plays: Option<u64>,
    note_count: Option<usize>,
    ambitus: Option<JsonAmbitus>,
    entropy: Option<Fixed6>,
    entropy_by_weighting: Option<JsonEntropyModes>,
    intervals: Option<JsonIntervals>,
    warnings: &'a [String],
}

impl<'a> JsonSong<'a> {
    fn new(song: &'a SongRecord) -> Self {
        let f = song.features();
        JsonSong {
            id: &song.entry.id,
            title: &song.entry.title,
            status: if f.is_some() { "ok" } else { "error" },
            error: song.outcome.as_ref().err().map(String::as_str),
            plays: song.entry.plays,
            note_count: f.map(|f| f.note_count),
            ambitus: f.map(|f| JsonAmbitus {
                semitones: f.ambitus.semitones,
                lowest: f.ambitus.lowest_pitch,
                highest: f.ambitus.highest_pitch,
            }),
            entropy: f.map(|f| Fixed6(f.entropy)),
            entropy_by_weighting: f.map(|f| JsonEntropyModes {
                duration: Fixed6(f.entropy_duration_weighted),
                count: Fixed6(f.entropy_count_weighted),
            }),
            intervals: f.map(|f| JsonIntervals::new(&f.intervals)),
            warnings: &song.warnings,
        }
    }
}

#[derive(Serialize)]
struct JsonMeans {
    ambitus: Fixed6,
    entropy: Fixed6,
}

#[derive(Serialize)]
struct JsonCorrelation {
    feature: &'static str,
    r: Fixed6,
    n: usize,
    t: Fixed6,
    dof: usize,
    p_two_tailed: Fixed6,
}

impl From<&FeatureCorrelation> for JsonCorrelation {
    fn from(c: &FeatureCorrelation) -> Self {
        JsonCorrelation {
            feature: c.feature.name(),
            r: Fixed6(c.result.r),
            n: c.result.n,
            t: Fixed6(c.result.t_statistic),
            dof: c.result.dof,
            p_two_tailed: Fixed6(c.result.p_two_tailed),
        }
    }
}

#[derive(Serialize)]
struct JsonReport<'a> {
    config: &'a AnalysisConfig,
    songs: Vec<JsonSong<'a>>,
    means: JsonMeans,
    aggregate_intervals: JsonIntervals,
    correlations: Vec<JsonCorrelation>,
    notices: &'a [String],
}

pub fn render_report(report: &CorpusReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => {
            let doc = JsonReport {
                config: &report.config,
                songs: report.songs.iter().map(JsonSong::new).collect(),
                means: JsonMeans { ambitus: Fixed6(report.mean_ambitus), entropy: Fixed6(report.mean_entropy) },
                aggregate_intervals: JsonIntervals::new(&report.aggregate_intervals),
                correlations: report.correlations.iter().map(JsonCorrelation::from).collect(),
                notices: &report.notices,
            };
            let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
            s.push('\n');
            s
        }
        ReportFormat::Csv => csv_rows(&report.songs),
        ReportFormat::Text => text(report),
    }
}

/// A single song in the requested format (JSON gives the per-song fragment of
/// the corpus report).
pub fn render_song(song: &SongRecord, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(&JsonSong::new(song)).expect("song serializes");
            s.push('\n');
            s
        }
        ReportFormat::Csv => csv_rows(std::slice::from_ref(song)),
        ReportFormat::Text => {
            let mut out = String::new();
            song_text(&mut out, song);
            out
        }
    }
}

pub fn write_report(report: &CorpusReport, format: ReportFormat, path: &Path) -> Result<(), CorpusError> {
    std::fs::write(path, render_report(report, format)).map_err(|e| CorpusError::io(path, e))
}

fn csv_rows(songs: &[SongRecord]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["id", "title", "ambitus", "entropy", "note_count", "plays"]).expect("in-memory write");
    for s in songs {
        let f = s.features();
        w.write_record([
            s.entry.id.clone(),
            s.entry.title.clone(),
            f.map(|f| f.ambitus.semitones.to_string()).unwrap_or_default(),
            f.map(|f| fixed6(f.entropy)).unwrap_or_default(),
            f.map(|f| f.note_count.to_string()).unwrap_or_default(),
            s.entry.plays.map(|p| p.to_string()).unwrap_or_default(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush to Vec")).expect("utf-8 input")
}

fn song_text(out: &mut String, song: &SongRecord) {
    let _ = writeln!(out, "{} ({})", song.entry.title, song.entry.id);
    match &song.outcome {
        Err(e) => {
            let _ = writeln!(out, "  error: {e}");
        }
        Ok(f) => {
            let a = &f.ambitus;
            let _ = writeln!(out, "  notes: {}", f.note_count);
            let _ = writeln!(out, "  ambitus: {} semitones ({}..{})", a.semitones, a.lowest_pitch, a.highest_pitch);
            let _ = writeln!(
                out,
                "  entropy: {} (duration-weighted {}, count-weighted {})",
                fixed6(f.entropy),
                fixed6(f.entropy_duration_weighted),
                fixed6(f.entropy_count_weighted)
            );
            let _ = writeln!(
                out,
                "  intervals: {} ({} beyond an octave)",
                f.intervals.interval_count, f.intervals.overflow_count
            );
            for (name, v) in INTERVAL_NAMES.iter().zip(f.folded.unsigned_bins) {
                let _ = writeln!(out, "    {name:<3} {}", fixed6(v));
            }
        }
    }
    for w in &song.warnings {
        let _ = writeln!(out, "  warning: {w}");
    }
}

fn text(report: &CorpusReport) -> String {
    let mut out = String::new();
    let ok = report.songs.iter().filter(|s| s.features().is_some()).count();
    let c = &report.config;
    let _ = writeln!(out, "songs: {} ({} analyzed, {} failed)", report.songs.len(), ok, report.songs.len() - ok);
    let _ = writeln!(
        out,
        "config: mono_policy={} pc_weighting={} iv_weighting={} aggregate={}",
        enum_name(&c.mono_policy),
        enum_name(&c.pc_weighting),
        enum_name(&c.iv_weighting),
        enum_name(&c.aggregate)
    );
    out.push('\n');
    for s in &report.songs {
        song_text(&mut out, s);
    }
    out.push('\n');
    let _ = writeln!(out, "mean ambitus: {}", fixed6(report.mean_ambitus));
    let _ = writeln!(out, "mean entropy: {}", fixed6(report.mean_entropy));
    let _ = writeln!(out, "aggregate intervals (folded):");
    for (name, v) in INTERVAL_NAMES.iter().zip(report.aggregate_folded.unsigned_bins) {
        let _ = writeln!(out, "  {name:<3} {}", fixed6(v));
    }
    let _ = writeln!(out, "correlations:");
    for k in &report.correlations {
        let r = &k.result;
        let _ = writeln!(
            out,
            "  {} vs plays: r={} n={} t={} dof={} p={}",
            k.feature.name(),
            fixed6(r.r),
            r.n,
            fixed6(r.t_statistic),
            r.dof,
            fixed6(r.p_two_tailed)
        );
    }
    for n in &report.notices {
        let _ = writeln!(out, "notice: {n}");
    }
    out
}

fn enum_name<T: Serialize>(v: &T) -> String {
    serde_json::to_value(v).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default()
}
