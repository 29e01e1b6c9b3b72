//! Note matrices: the seven-column melody table (onset and duration in beats,
//! channel, pitch, velocity, onset and duration in seconds) built from a
//! parsed file, plus voice selection and the monophony pass.

use std::cmp::Ordering;
use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::io::{self, Write};

use crate::error::AnalysisError;
use crate::real::Real;
use crate::smf::{tick_to_beats, tick_to_seconds, EventKind, SmfDocument, TempoMap};

/// Onset coincidence and zero-duration tolerance, in beats.
pub const ONSET_EPSILON: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Note<T> {
    pub onset_beats: T,
    pub duration_beats: T,
    pub channel: u8,
    pub pitch: u8,
    pub velocity: u8,
    pub onset_sec: T,
    pub duration_sec: T,
    /// Position of the note-on in the source; breaks ties for [`MonoPolicy::KeepFirst`].
    pub seq: usize,
}

impl<T: Real> Note<T> {
    pub fn offset_beats(&self) -> T {
        self.onset_beats + self.duration_beats
    }
}

/// Tick resolution and tempo map used to derive the seconds columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Timing {
    pub ticks_per_quarter: u16,
    pub tempo: TempoMap,
}

impl Default for Timing {
    fn default() -> Self {
        Timing { ticks_per_quarter: 480, tempo: TempoMap::default() }
    }
}

impl Timing {
    pub fn seconds_at_beats<T: Real>(&self, beats: T) -> T {
        let tpq = T::of(f64::from(self.ticks_per_quarter));
        self.tempo.seconds_at(beats * tpq, self.ticks_per_quarter)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NoteWarning {
    /// Note-on never released; closed at the track's last tick.
    OrphanNoteOn { track: usize, channel: u8, pitch: u8, tick: u64, closed_at: u64 },
    /// Note-off with nothing sounding on that pitch; dropped.
    OrphanNoteOff { track: usize, channel: u8, pitch: u8, tick: u64 },
    /// Note-on while the same pitch was already sounding; paired first-on/first-off.
    StackedNoteOn { track: usize, channel: u8, pitch: u8, tick: u64 },
}

impl fmt::Display for NoteWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            NoteWarning::OrphanNoteOn { track, channel, pitch, tick, closed_at } => write!(
                f,
                "track {track} ch {channel}: note-on pitch {pitch} at tick {tick} never released, closed at tick {closed_at}"
            ),
            NoteWarning::OrphanNoteOff { track, channel, pitch, tick } => {
                write!(f, "track {track} ch {channel}: orphan note-off pitch {pitch} at tick {tick} dropped")
            }
            NoteWarning::StackedNoteOn { track, channel, pitch, tick } => write!(
                f,
                "track {track} ch {channel}: pitch {pitch} retriggered at tick {tick} while sounding"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoteMatrix<T> {
    notes: Vec<Note<T>>,
    source_id: String,
    monophonic: bool,
    timing: Timing,
    warnings: Vec<NoteWarning>,
}

fn by_onset_then_pitch<T: Real>(a: &Note<T>, b: &Note<T>) -> Ordering {
    a.onset_beats
        .partial_cmp(&b.onset_beats)
        .unwrap_or(Ordering::Equal)
        .then(a.pitch.cmp(&b.pitch))
        .then(a.seq.cmp(&b.seq))
}

impl<T: Real> NoteMatrix<T> {
    /// Sorts the rows and drops notes without positive duration.
    pub fn new(source_id: impl Into<String>, notes: Vec<Note<T>>, timing: Timing) -> Self {
        let mut notes: Vec<Note<T>> =
            notes.into_iter().filter(|n| n.duration_beats > T::zero() && n.duration_sec > T::zero()).collect();
        notes.sort_by(by_onset_then_pitch);
        NoteMatrix { notes, source_id: source_id.into(), monophonic: false, timing, warnings: Vec::new() }
    }

    /// Build from `(onset_beats, duration_beats, pitch)` rows at 120 BPM on channel 0.
    pub fn from_beats(source_id: impl Into<String>, rows: impl IntoIterator<Item = (T, T, u8)>) -> Self {
        let timing = Timing::default();
        let notes = rows
            .into_iter()
            .enumerate()
            .map(|(seq, (onset, dur, pitch))| {
                let onset_sec = timing.seconds_at_beats(onset);
                Note {
                    onset_beats: onset,
                    duration_beats: dur,
                    channel: 0,
                    pitch,
                    velocity: 100,
                    onset_sec,
                    duration_sec: timing.seconds_at_beats(onset + dur) - onset_sec,
                    seq,
                }
            })
            .collect();
        Self::new(source_id, notes, timing)
    }

    /// Consecutive one-beat notes.
    pub fn from_pitches(source_id: impl Into<String>, pitches: &[u8]) -> Self {
        Self::from_beats(source_id, pitches.iter().enumerate().map(|(i, &p)| (T::of(i as f64), T::one(), p)))
    }

    pub fn notes(&self) -> &[Note<T>] {
        &self.notes
    }

    pub fn len(&self) -> usize {
        self.notes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.notes.is_empty()
    }

    pub fn source_id(&self) -> &str {
        &self.source_id
    }

    pub fn is_monophonic(&self) -> bool {
        self.monophonic
    }

    pub fn timing(&self) -> &Timing {
        &self.timing
    }

    pub fn warnings(&self) -> &[NoteWarning] {
        &self.warnings
    }

    /// Mark the matrix monophonic without running the monophony pass.
    /// Callers must already satisfy the non-overlap invariant.
    pub fn assume_monophonic(mut self) -> Self {
        self.monophonic = true;
        self
    }
}

/// Which tracks and channels count as the melody voice.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VoiceSelector {
    track: Option<usize>,
    channel: Option<u8>,
    name_pattern: Option<String>,
}

impl VoiceSelector {
    /// Every track and channel.
    pub fn all() -> Self {
        Self::default()
    }

    pub fn new(track: Option<usize>, channel: Option<u8>, name_pattern: Option<&str>) -> Result<Self, AnalysisError> {
        if track.is_none() && channel.is_none() && name_pattern.is_none() {
            return Err(AnalysisError::InvalidSelector("no criterion given; use VoiceSelector::all()".into()));
        }
        if let Some(ch) = channel {
            if ch > 15 {
                return Err(AnalysisError::InvalidSelector(format!("channel {ch} out of range 0-15")));
            }
        }
        Ok(VoiceSelector { track, channel, name_pattern: name_pattern.map(str::to_lowercase) })
    }

    pub fn is_all(&self) -> bool {
        self.track.is_none() && self.channel.is_none() && self.name_pattern.is_none()
    }

    fn accepts_track(&self, index: usize, name: Option<&str>) -> bool {
        if self.track.is_some_and(|t| t != index) {
            return false;
        }
        match (&self.name_pattern, name) {
            (None, _) => true,
            (Some(p), Some(n)) => n.to_lowercase().contains(p.as_str()),
            (Some(_), None) => false,
        }
    }

    fn accepts_channel(&self, channel: u8) -> bool {
        self.channel.is_none_or(|c| c == channel)
    }
}

/// Sounding notes per (channel, pitch): onset tick, velocity, source order.
type OpenNotes = HashMap<(u8, u8), VecDeque<(u64, u8, usize)>>;

/// Pair note-ons with note-offs and build the note matrix for the selected voice.
///
/// A note-on with velocity 0 is a note-off. Stacked note-ons of one pitch are
/// released first-on/first-off.
pub fn events_to_notes<T: Real>(doc: &SmfDocument, selector: &VoiceSelector) -> Result<NoteMatrix<T>, AnalysisError> {
    let timing = Timing { ticks_per_quarter: doc.ticks_per_quarter, tempo: doc.tempo_map() };
    let tpq = doc.ticks_per_quarter;
    let mut notes = Vec::new();
    let mut warnings = Vec::new();
    let mut seq = 0usize;

    let mut emit = |on_tick: u64, off_tick: u64, channel: u8, pitch: u8, velocity: u8, seq: usize| {
        if off_tick <= on_tick {
            return;
        }
        let onset_sec: T = tick_to_seconds(on_tick, tpq, &timing.tempo);
        let offset_sec: T = tick_to_seconds(off_tick, tpq, &timing.tempo);
        notes.push(Note {
            onset_beats: tick_to_beats(on_tick, tpq),
            duration_beats: tick_to_beats(off_tick - on_tick, tpq),
            channel,
            pitch,
            velocity,
            onset_sec,
            duration_sec: offset_sec - onset_sec,
            seq,
        });
    };

    for track in &doc.tracks {
        if !selector.accepts_track(track.index, track.name.as_deref()) {
            continue;
        }
        let mut open: OpenNotes = HashMap::new();
        for ev in &track.events {
            let (channel, pitch, on_velocity) = match ev.kind {
                EventKind::NoteOn { channel, pitch, velocity } => (channel, pitch, velocity),
                EventKind::NoteOff { channel, pitch, .. } => (channel, pitch, 0),
                _ => continue,
            };
            if !selector.accepts_channel(channel) {
                continue;
            }
            let queue = open.entry((channel, pitch)).or_default();
            if on_velocity > 0 {
                if !queue.is_empty() {
                    warnings.push(NoteWarning::StackedNoteOn { track: track.index, channel, pitch, tick: ev.tick });
                }
                queue.push_back((ev.tick, on_velocity, seq));
                seq += 1;
            } else if let Some((on_tick, velocity, s)) = queue.pop_front() {
                emit(on_tick, ev.tick, channel, pitch, velocity, s);
            } else {
                warnings.push(NoteWarning::OrphanNoteOff { track: track.index, channel, pitch, tick: ev.tick });
            }
        }
        let end = track.end_tick();
        let mut leftovers: Vec<_> = open
            .into_iter()
            .flat_map(|((channel, pitch), q)| q.into_iter().map(move |(tick, vel, s)| (s, tick, channel, pitch, vel)))
            .collect();
        leftovers.sort_unstable();
        for (s, tick, channel, pitch, velocity) in leftovers {
            warnings.push(NoteWarning::OrphanNoteOn { track: track.index, channel, pitch, tick, closed_at: end });
            emit(tick, end, channel, pitch, velocity, s);
        }
    }

    if notes.is_empty() {
        return Err(AnalysisError::EmptyVoice);
    }
    let mut nm = NoteMatrix::new(doc_source_id(doc), notes, timing);
    nm.warnings = warnings;
    Ok(nm)
}

fn doc_source_id(doc: &SmfDocument) -> String {
    doc.tracks.iter().find_map(|t| t.name.clone()).unwrap_or_default()
}

/// How to choose among notes that start together.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MonoPolicy {
    #[default]
    KeepHigher,
    KeepLower,
    /// The note that appears first in the source.
    KeepFirst,
}

/// Reduce every group of notes whose onsets lie within [`ONSET_EPSILON`] of
/// the group's first onset to a single note.
pub fn resolve_simultaneity<T: Real>(notes: &[Note<T>], policy: MonoPolicy) -> Vec<Note<T>> {
    let eps = T::of(ONSET_EPSILON);
    let mut out: Vec<Note<T>> = Vec::new();
    let mut i = 0;
    while i < notes.len() {
        let start = notes[i].onset_beats;
        let mut j = i + 1;
        while j < notes.len() && notes[j].onset_beats - start <= eps {
            j += 1;
        }
        let group = &notes[i..j];
        let keep = match policy {
            // ties go to the earlier row
            MonoPolicy::KeepHigher => group.iter().rev().max_by_key(|n| n.pitch),
            MonoPolicy::KeepLower => group.iter().min_by_key(|n| n.pitch),
            MonoPolicy::KeepFirst => group.iter().min_by_key(|n| n.seq),
        };
        out.push(*keep.expect("group is non-empty"));
        i = j;
    }
    out
}

/// Make the voice strictly monophonic: one note per onset group, then trim
/// each note that runs into its successor (legato adjustment).
pub fn enforce_monophony<T: Real>(nm: &NoteMatrix<T>, policy: MonoPolicy) -> Result<NoteMatrix<T>, AnalysisError> {
    let eps = T::of(ONSET_EPSILON);
    let survivors = resolve_simultaneity(&nm.notes, policy);
    let mut out: Vec<Note<T>> = Vec::with_capacity(survivors.len());
    for note in survivors {
        if let Some(last) = out.last_mut() {
            if last.offset_beats() > note.onset_beats {
                last.duration_beats = note.onset_beats - last.onset_beats;
                let end_sec = nm.timing.seconds_at_beats(last.onset_beats + last.duration_beats);
                last.duration_sec = end_sec - last.onset_sec;
                if last.duration_beats <= eps {
                    out.pop();
                }
            }
        }
        if note.duration_beats > eps {
            out.push(note);
        }
    }
    if out.is_empty() {
        return Err(AnalysisError::EmptyVoice);
    }
    Ok(NoteMatrix {
        notes: out,
        source_id: nm.source_id.clone(),
        monophonic: true,
        timing: nm.timing.clone(),
        warnings: nm.warnings.clone(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatrixSummary<T> {
    pub note_count: usize,
    pub total_duration_beats: T,
    pub pitch_min: u8,
    pub pitch_max: u8,
}

pub fn matrix_summary<T: Real>(nm: &NoteMatrix<T>) -> Result<MatrixSummary<T>, AnalysisError> {
    let first = nm.notes.first().ok_or(AnalysisError::EmptyVoice)?;
    let mut s = MatrixSummary {
        note_count: 0,
        total_duration_beats: T::zero(),
        pitch_min: first.pitch,
        pitch_max: first.pitch,
    };
    for n in &nm.notes {
        s.note_count += 1;
        s.total_duration_beats = s.total_duration_beats + n.duration_beats;
        s.pitch_min = s.pitch_min.min(n.pitch);
        s.pitch_max = s.pitch_max.max(n.pitch);
    }
    Ok(s)
}

/// Dump the matrix as CSV in note-matrix column order.
pub fn write_nmat_csv<T: Real, W: Write>(nm: &NoteMatrix<T>, mut w: W) -> io::Result<()> {
    writeln!(w, "onset_beats,duration_beats,channel,pitch,velocity,onset_sec,duration_sec")?;
    for n in &nm.notes {
        writeln!(
            w,
            "{:.6},{:.6},{},{},{},{:.6},{:.6}",
            n.onset_beats, n.duration_beats, n.channel, n.pitch, n.velocity, n.onset_sec, n.duration_sec
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nm(rows: &[(f64, f64, u8)]) -> NoteMatrix<f64> {
        NoteMatrix::from_beats("t", rows.iter().copied())
    }

    #[test]
    fn construction_sorts_and_drops_zero_length() {
        let m = nm(&[(1.0, 1.0, 64), (0.0, 0.0, 50), (0.0, 1.0, 67), (0.0, 1.0, 60)]);
        let p: Vec<u8> = m.notes().iter().map(|n| n.pitch).collect();
        assert_eq!(p, vec![60, 67, 64]);
    }

    #[test]
    fn selector_requires_a_criterion() {
        assert!(VoiceSelector::new(None, None, None).is_err());
        assert!(VoiceSelector::new(None, Some(16), None).is_err());
        assert!(VoiceSelector::new(None, Some(9), None).is_ok());
        assert!(VoiceSelector::all().is_all());
    }

    #[test]
    fn name_pattern_is_case_insensitive() {
        let s = VoiceSelector::new(None, None, Some("VOC")).unwrap();
        assert!(s.accepts_track(3, Some("Lead Vocal")));
        assert!(!s.accepts_track(3, Some("Bass")));
        assert!(!s.accepts_track(3, None));
    }

    #[test]
    fn already_monophonic_is_unchanged() {
        let m = nm(&[(0.0, 1.0, 60), (1.0, 1.0, 62), (2.0, 0.5, 64)]);
        let out = enforce_monophony(&m, MonoPolicy::KeepHigher).unwrap();
        assert!(out.is_monophonic());
        assert_eq!(out.notes(), m.notes());
    }

    #[test]
    fn legato_trim() {
        let m = nm(&[(0.0, 2.0, 60), (1.0, 1.0, 62)]);
        let out = enforce_monophony(&m, MonoPolicy::KeepHigher).unwrap();
        let n = out.notes();
        assert_eq!(n[0].duration_beats, 1.0);
        assert_eq!(n[0].duration_sec, 0.5);
        assert_eq!(n[1], m.notes()[1]);
    }

    #[test]
    fn contained_note_keeps_both() {
        let m = nm(&[(0.0, 4.0, 60), (1.0, 1.0, 62)]);
        let out = enforce_monophony(&m, MonoPolicy::KeepHigher).unwrap();
        assert_eq!(out.len(), 2);
        assert_eq!(out.notes()[0].duration_beats, 1.0);
    }

    #[test]
    fn chord_policies() {
        let chord = nm(&[(0.0, 1.0, 64), (0.0, 1.0, 60), (0.0, 1.0, 67)]);
        let pick = |p| enforce_monophony(&chord, p).unwrap().notes()[0].pitch;
        assert_eq!(pick(MonoPolicy::KeepHigher), 67);
        assert_eq!(pick(MonoPolicy::KeepLower), 60);
        // seq follows input order: 64 was written first
        assert_eq!(pick(MonoPolicy::KeepFirst), 64);
    }

    #[test]
    fn near_coincident_onsets_group() {
        let m = nm(&[(0.0, 1.0, 60), (0.5e-9, 1.0, 72)]);
        let out = enforce_monophony(&m, MonoPolicy::KeepLower).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out.notes()[0].pitch, 60);
    }

    #[test]
    fn trim_recomputes_seconds_from_tempo() {
        let timing = Timing { ticks_per_quarter: 96, tempo: TempoMap::from_changes([(0, 500_000), (96, 250_000)]) };
        let note = |onset: f64, dur: f64, pitch: u8, seq: usize| {
            let on = timing.seconds_at_beats(onset);
            Note {
                onset_beats: onset,
                duration_beats: dur,
                channel: 0,
                pitch,
                velocity: 80,
                onset_sec: on,
                duration_sec: timing.seconds_at_beats(onset + dur) - on,
                seq,
            }
        };
        let m = NoteMatrix::new("x", vec![note(0.0, 3.0, 60, 0), note(2.0, 1.0, 62, 1)], timing.clone());
        assert!((m.notes()[0].duration_sec - 1.0).abs() < 1e-12);
        let out = enforce_monophony(&m, MonoPolicy::KeepHigher).unwrap();
        // 1 beat at 0.5 s + 1 beat at 0.25 s
        assert!((out.notes()[0].duration_sec - 0.75).abs() < 1e-12);
    }

    #[test]
    fn summaries() {
        let s = matrix_summary(&nm(&[(0.0, 1.0, 60)])).unwrap();
        assert_eq!(s, MatrixSummary { note_count: 1, total_duration_beats: 1.0, pitch_min: 60, pitch_max: 60 });
        let scale = NoteMatrix::<f64>::from_pitches("s", &[60, 62, 64, 65, 67, 69, 71, 72]);
        let s = matrix_summary(&scale).unwrap();
        assert_eq!(s, MatrixSummary { note_count: 8, total_duration_beats: 8.0, pitch_min: 60, pitch_max: 72 });
        let trimmed = enforce_monophony(&nm(&[(0.0, 2.0, 60), (1.0, 1.0, 62)]), MonoPolicy::KeepHigher).unwrap();
        let s = matrix_summary(&trimmed).unwrap();
        assert_eq!(s, MatrixSummary { note_count: 2, total_duration_beats: 2.0, pitch_min: 60, pitch_max: 62 });
        assert_eq!(matrix_summary(&nm(&[])).unwrap_err(), AnalysisError::EmptyVoice);
    }

    #[test]
    fn csv_dump() {
        let mut buf = Vec::new();
        write_nmat_csv(&nm(&[(0.0, 1.0, 60)]), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "onset_beats,duration_beats,channel,pitch,velocity,onset_sec,duration_sec\n\
             0.000000,1.000000,0,60,100,0.000000,0.500000\n"
        );
    }

    #[test]
    fn works_in_f32() {
        let m = NoteMatrix::<f32>::from_beats("f", [(0.0f32, 2.0f32, 60u8), (1.0, 1.0, 62)]);
        let out = enforce_monophony(&m, MonoPolicy::KeepHigher).unwrap();
        assert_eq!(out.notes()[0].duration_beats, 1.0f32);
    }
}
