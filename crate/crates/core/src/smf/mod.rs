//! Standard MIDI File decoding.
//!
//! Only formats 0 and 1 with a ticks-per-quarter time division are accepted.
//! Channel messages honour running status; meta and sysex events cancel it.
//! Unknown meta events, sysex packets and non-note channel messages are kept
//! as [`EventKind::Other`] so nothing in the file is silently lost.

mod tempo;
mod vlq;

pub use tempo::{tick_to_beats, tick_to_beats_exact, tick_to_seconds, TempoMap, DEFAULT_TEMPO};
pub use vlq::{parse_vlq, VLQ_MAX};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SmfError {
    #[error("missing MThd header chunk at byte {offset}")]
    MissingHeader { offset: usize },
    #[error("header chunk at byte {offset} declares length {length}, expected 6")]
    MalformedHeader { offset: usize, length: u32 },
    #[error("unsupported SMF format {format} at byte {offset}")]
    UnsupportedFormat { format: u16, offset: usize },
    #[error("unsupported SMPTE time division 0x{division:04X} at byte {offset}")]
    UnsupportedDivision { division: u16, offset: usize },
    #[error("file truncated at byte {offset}: {context}")]
    TruncatedFile { offset: usize, context: &'static str },
    #[error("malformed variable-length quantity at byte {offset}")]
    MalformedVlq { offset: usize },
    #[error("data byte 0x{byte:02X} at byte {offset} with no running status in effect")]
    RunningStatusWithoutPrior { byte: u8, offset: usize },
    #[error("unexpected status byte 0x{status:02X} at byte {offset}")]
    UnexpectedStatus { status: u8, offset: usize },
    #[error("invalid tempo event at byte {offset}")]
    InvalidTempo { offset: usize },
}

impl SmfError {
    pub fn offset(&self) -> usize {
        match *self {
            SmfError::MissingHeader { offset }
            | SmfError::MalformedHeader { offset, .. }
            | SmfError::UnsupportedFormat { offset, .. }
            | SmfError::UnsupportedDivision { offset, .. }
            | SmfError::TruncatedFile { offset, .. }
            | SmfError::MalformedVlq { offset }
            | SmfError::RunningStatusWithoutPrior { offset, .. }
            | SmfError::UnexpectedStatus { offset, .. }
            | SmfError::InvalidTempo { offset } => offset,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    /// Format 0.
    Single,
    /// Format 1.
    MultiTrack,
}

impl Format {
    pub fn number(self) -> u16 {
        match self {
            Format::Single => 0,
            Format::MultiTrack => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EventKind {
    NoteOn {
        channel: u8,
        pitch: u8,
        velocity: u8,
    },
    NoteOff {
        channel: u8,
        pitch: u8,
        velocity: u8,
    },
    Tempo {
        microseconds_per_quarter: u32,
    },
    TrackName {
        text: String,
    },
    EndOfTrack,
    /// Anything else. `status` is the channel status byte, `0xFF` for meta
    /// events (with `meta_type` set) or `0xF0`/`0xF7` for sysex.
    Other {
        status: u8,
        meta_type: Option<u8>,
        data: Vec<u8>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimedEvent {
    pub tick: u64,
    pub kind: EventKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Track {
    pub index: usize,
    pub name: Option<String>,
    pub events: Vec<TimedEvent>,
}

impl Track {
    /// Tick of the last event, which is always the end-of-track marker.
    pub fn end_tick(&self) -> u64 {
        self.events.last().map_or(0, |e| e.tick)
    }
}

/// Non-fatal irregularities found while decoding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseWarning {
    /// Bytes left in a track chunk after its end-of-track event.
    DataAfterEndOfTrack { track: usize, skipped_bytes: usize },
    /// The chunk ended without an end-of-track event; one was appended.
    MissingEndOfTrack { track: usize },
    /// A non-`MTrk` chunk was skipped.
    UnknownChunk { offset: usize, id: [u8; 4] },
}

impl std::fmt::Display for ParseWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ParseWarning::DataAfterEndOfTrack { track, skipped_bytes } => {
                write!(f, "track {track}: skipped {skipped_bytes} bytes after end-of-track")
            }
            ParseWarning::MissingEndOfTrack { track } => {
                write!(f, "track {track}: no end-of-track event, one was appended")
            }
            ParseWarning::UnknownChunk { offset, id } => {
                write!(f, "skipped unknown chunk {:?} at byte {offset}", String::from_utf8_lossy(id))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmfDocument {
    pub format: Format,
    pub ticks_per_quarter: u16,
    pub tracks: Vec<Track>,
    pub warnings: Vec<ParseWarning>,
}

impl SmfDocument {
    pub fn tempo_map(&self) -> TempoMap {
        TempoMap::from_document(self)
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
    end: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize, context: &'static str) -> Result<&'a [u8], SmfError> {
        if self.end - self.pos < n {
            return Err(SmfError::TruncatedFile { offset: self.pos, context });
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn byte(&mut self, context: &'static str) -> Result<u8, SmfError> {
        Ok(self.take(1, context)?[0])
    }

    fn u16(&mut self, context: &'static str) -> Result<u16, SmfError> {
        let b = self.take(2, context)?;
        Ok(u16::from_be_bytes([b[0], b[1]]))
    }

    fn u32(&mut self, context: &'static str) -> Result<u32, SmfError> {
        let b = self.take(4, context)?;
        Ok(u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
    }

    fn vlq(&mut self) -> Result<u32, SmfError> {
        let (value, used) = parse_vlq(&self.bytes[..self.end], self.pos)?;
        self.pos += used;
        Ok(value)
    }
}

/// Decode a complete Standard MIDI File.
pub fn parse_smf(bytes: &[u8]) -> Result<SmfDocument, SmfError> {
    let mut cur = Cursor { bytes, pos: 0, end: bytes.len() };
    if bytes.len() < 4 || &bytes[..4] != b"MThd" {
        return Err(SmfError::MissingHeader { offset: 0 });
    }
    cur.pos = 4;
    let length = cur.u32("header length")?;
    if length != 6 {
        return Err(SmfError::MalformedHeader { offset: 4, length });
    }
    let format = match cur.u16("header format")? {
        0 => Format::Single,
        1 => Format::MultiTrack,
        other => return Err(SmfError::UnsupportedFormat { format: other, offset: 8 }),
    };
    let declared = cur.u16("header track count")? as usize;
    let division = cur.u16("header division")?;
    if division & 0x8000 != 0 {
        return Err(SmfError::UnsupportedDivision { division, offset: 12 });
    }
    if division == 0 {
        return Err(SmfError::UnsupportedDivision { division, offset: 12 });
    }

    let mut warnings = Vec::new();
    let mut tracks = Vec::with_capacity(declared);
    while tracks.len() < declared {
        let chunk_start = cur.pos;
        let id: [u8; 4] = cur.take(4, "chunk id")?.try_into().expect("4 bytes");
        let len = cur.u32("chunk length")? as usize;
        if cur.end - cur.pos < len {
            return Err(SmfError::TruncatedFile {
                offset: chunk_start,
                context: "chunk length exceeds remaining bytes",
            });
        }
        let body_start = cur.pos;
        cur.pos += len;
        if &id != b"MTrk" {
            warnings.push(ParseWarning::UnknownChunk { offset: chunk_start, id });
            continue;
        }
        let index = tracks.len();
        tracks.push(parse_track(bytes, body_start, body_start + len, index, &mut warnings)?);
    }

    Ok(SmfDocument { format, ticks_per_quarter: division, tracks, warnings })
}

fn parse_track(
    bytes: &[u8],
    start: usize,
    end: usize,
    index: usize,
    warnings: &mut Vec<ParseWarning>,
) -> Result<Track, SmfError> {
    let mut cur = Cursor { bytes, pos: start, end };
    let mut events = Vec::new();
    let mut name = None;
    let mut tick = 0u64;
    let mut running: Option<u8> = None;
    let mut ended = false;

    while cur.pos < cur.end {
        tick += cur.vlq()? as u64;
        let status_offset = cur.pos;
        let first = cur.byte("event status")?;
        let kind = if first < 0x80 {
            let status = running.ok_or(SmfError::RunningStatusWithoutPrior { byte: first, offset: status_offset })?;
            channel_event(&mut cur, status, Some(first))?
        } else if first < 0xF0 {
            running = Some(first);
            channel_event(&mut cur, first, None)?
        } else if first == 0xFF {
            running = None;
            let meta_type = cur.byte("meta type")?;
            let len = cur.vlq()? as usize;
            let data = cur.take(len, "meta payload")?;
            match meta_type {
                0x2F => EventKind::EndOfTrack,
                0x51 => {
                    if data.len() != 3 {
                        return Err(SmfError::InvalidTempo { offset: status_offset });
                    }
                    let us = u32::from_be_bytes([0, data[0], data[1], data[2]]);
                    if us == 0 {
                        return Err(SmfError::InvalidTempo { offset: status_offset });
                    }
                    EventKind::Tempo { microseconds_per_quarter: us }
                }
                0x03 => {
                    let text = String::from_utf8_lossy(data).into_owned();
                    if name.is_none() {
                        name = Some(text.clone());
                    }
                    EventKind::TrackName { text }
                }
                _ => EventKind::Other { status: 0xFF, meta_type: Some(meta_type), data: data.to_vec() },
            }
        } else if first == 0xF0 || first == 0xF7 {
            running = None;
            let len = cur.vlq()? as usize;
            let data = cur.take(len, "sysex payload")?;
            EventKind::Other { status: first, meta_type: None, data: data.to_vec() }
        } else {
            return Err(SmfError::UnexpectedStatus { status: first, offset: status_offset });
        };
        let is_end = kind == EventKind::EndOfTrack;
        events.push(TimedEvent { tick, kind });
        if is_end {
            ended = true;
            break;
        }
    }

    if ended {
        if cur.pos < cur.end {
            warnings.push(ParseWarning::DataAfterEndOfTrack { track: index, skipped_bytes: cur.end - cur.pos });
        }
    } else {
        warnings.push(ParseWarning::MissingEndOfTrack { track: index });
        events.push(TimedEvent { tick, kind: EventKind::EndOfTrack });
    }

    Ok(Track { index, name, events })
}

fn channel_event(cur: &mut Cursor<'_>, status: u8, first_data: Option<u8>) -> Result<EventKind, SmfError> {
    let data_len = match status & 0xF0 {
        0xC0 | 0xD0 => 1,
        _ => 2,
    };
    let mut data = [0u8; 2];
    let mut filled = 0;
    if let Some(b) = first_data {
        data[0] = b;
        filled = 1;
    }
    while filled < data_len {
        let offset = cur.pos;
        let b = cur.byte("channel message data")?;
        if b >= 0x80 {
            return Err(SmfError::UnexpectedStatus { status: b, offset });
        }
        data[filled] = b;
        filled += 1;
    }
    let channel = status & 0x0F;
    Ok(match status & 0xF0 {
        0x90 => EventKind::NoteOn { channel, pitch: data[0], velocity: data[1] },
        0x80 => EventKind::NoteOff { channel, pitch: data[0], velocity: data[1] },
        _ => EventKind::Other { status, meta_type: None, data: data[..data_len].to_vec() },
    })
}
