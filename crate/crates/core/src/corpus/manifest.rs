use std::collections::HashSet;
use std::path::{Path, PathBuf};

use super::CorpusError;
use crate::notes::VoiceSelector;

pub const MANIFEST_COLUMNS: [&str; 7] = ["id", "title", "midi_path", "track", "channel", "name_pattern", "plays"];

/// One song of the corpus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub id: String,
    pub title: String,
    /// Resolved against the manifest's directory when relative.
    pub midi_path: PathBuf,
    pub track: Option<usize>,
    pub channel: Option<u8>,
    pub name_pattern: Option<String>,
    /// Streaming play count, when known.
    pub plays: Option<u64>,
}

impl ManifestEntry {
    pub fn selector(&self) -> VoiceSelector {
        VoiceSelector::new(self.track, self.channel, self.name_pattern.as_deref())
            .unwrap_or_else(|_| VoiceSelector::all())
    }
}

pub fn load_manifest(path: &Path) -> Result<Vec<ManifestEntry>, CorpusError> {
    let text = std::fs::read_to_string(path).map_err(|e| CorpusError::io(path, e))?;
    let base = path.parent().unwrap_or_else(|| Path::new(""));
    parse_manifest(&text, base)
}

/// Parse manifest CSV text. Relative `midi_path`s are joined onto `base_dir`.
pub fn parse_manifest(text: &str, base_dir: &Path) -> Result<Vec<ManifestEntry>, CorpusError> {
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(text.as_bytes());

    let headers = reader.headers().map_err(|e| syntax(&e, 1))?.clone();
    if headers.iter().ne(MANIFEST_COLUMNS.iter().copied()) {
        return Err(CorpusError::ManifestSyntax {
            line: header_line(text),
            message: format!("expected header '{}'", MANIFEST_COLUMNS.join(",")),
        });
    }

    let mut seen = HashSet::new();
    let mut entries = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| syntax(&e, 0))?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let cell = |i: usize| record.get(i).filter(|s| !s.is_empty());
        let invalid = |field: &'static str, message: String| CorpusError::InvalidField { line, field, message };

        let id = cell(0).ok_or_else(|| invalid("id", "must not be empty".into()))?.to_string();
        let midi_path = cell(2).ok_or_else(|| invalid("midi_path", "must not be empty".into()))?;
        let track = cell(3)
            .map(|s| s.parse::<usize>().map_err(|_| invalid("track", format!("'{s}' is not a track index"))))
            .transpose()?;
        let channel = cell(4)
            .map(|s| match s.parse::<u8>() {
                Ok(c) if c <= 15 => Ok(c),
                _ => Err(invalid("channel", format!("'{s}' is not a channel 0-15"))),
            })
            .transpose()?;
        let plays = cell(6)
            .map(|s| s.parse::<u64>().map_err(|_| invalid("plays", format!("'{s}' is not a non-negative integer"))))
            .transpose()?;
        if !seen.insert(id.clone()) {
            return Err(CorpusError::DuplicateId { id, line });
        }
        entries.push(ManifestEntry {
            title: cell(1).unwrap_or(&id).to_string(),
            id,
            midi_path: base_dir.join(midi_path),
            track,
            channel,
            name_pattern: cell(5).map(str::to_string),
            plays,
        });
    }
    Ok(entries)
}

fn syntax(e: &csv::Error, fallback_line: usize) -> CorpusError {
    let line = e.position().map_or(fallback_line, |p| p.line() as usize);
    CorpusError::ManifestSyntax { line, message: e.to_string() }
}

fn header_line(text: &str) -> usize {
    text.lines().position(|l| !l.trim_start().starts_with('#')).map_or(1, |i| i + 1)
}
