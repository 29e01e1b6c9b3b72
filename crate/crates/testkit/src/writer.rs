//! Minimal SMF writer. Events are given at absolute ticks and sorted stably
//! before deltas are emitted.

use crate::encode_vlq;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Event {
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
    ControlChange {
        channel: u8,
        controller: u8,
        value: u8,
    },
    ProgramChange {
        channel: u8,
        program: u8,
    },
    Tempo(u32),
    TrackName(String),
    Lyric(String),
    SysEx(Vec<u8>),
    /// Raw bytes written verbatim after the delta time.
    Raw(Vec<u8>),
    EndOfTrack,
}

impl Event {
    fn channel_status(&self) -> Option<u8> {
        match *self {
            Event::NoteOn { channel, .. } => Some(0x90 | channel),
            Event::NoteOff { channel, .. } => Some(0x80 | channel),
            Event::ControlChange { channel, .. } => Some(0xB0 | channel),
            Event::ProgramChange { channel, .. } => Some(0xC0 | channel),
            _ => None,
        }
    }

    fn write(&self, out: &mut Vec<u8>, running: &mut Option<u8>, use_running: bool) {
        if let Some(status) = self.channel_status() {
            if !(use_running && *running == Some(status)) {
                out.push(status);
            }
            *running = Some(status);
            match *self {
                Event::NoteOn { pitch, velocity, .. } | Event::NoteOff { pitch, velocity, .. } => {
                    out.extend([pitch, velocity])
                }
                Event::ControlChange { controller, value, .. } => out.extend([controller, value]),
                Event::ProgramChange { program, .. } => out.push(program),
                _ => unreachable!(),
            }
            return;
        }
        *running = None;
        let meta = |out: &mut Vec<u8>, kind: u8, data: &[u8]| {
            out.extend([0xFF, kind]);
            out.extend(encode_vlq(data.len() as u32));
            out.extend_from_slice(data);
        };
        match self {
            Event::Tempo(us) => meta(out, 0x51, &us.to_be_bytes()[1..]),
            Event::TrackName(s) => meta(out, 0x03, s.as_bytes()),
            Event::Lyric(s) => meta(out, 0x05, s.as_bytes()),
            Event::SysEx(data) => {
                out.push(0xF0);
                out.extend(encode_vlq(data.len() as u32));
                out.extend_from_slice(data);
            }
            Event::Raw(bytes) => out.extend_from_slice(bytes),
            Event::EndOfTrack => meta(out, 0x2F, &[]),
            _ => unreachable!(),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct TrackBuilder {
    events: Vec<(u32, Event)>,
    running_status: bool,
    end_of_track: bool,
    trailing: Vec<u8>,
}

impl TrackBuilder {
    pub fn new() -> Self {
        TrackBuilder { events: Vec::new(), running_status: false, end_of_track: true, trailing: Vec::new() }
    }

    pub fn named(name: &str) -> Self {
        let mut t = Self::new();
        t.at(0, Event::TrackName(name.to_string()));
        t
    }

    pub fn at(&mut self, tick: u32, event: Event) -> &mut Self {
        self.events.push((tick, event));
        self
    }

    pub fn note(&mut self, channel: u8, pitch: u8, start: u32, len: u32) -> &mut Self {
        self.at(start, Event::NoteOn { channel, pitch, velocity: 100 });
        self.at(start + len, Event::NoteOff { channel, pitch, velocity: 0 })
    }

    /// Omit repeated channel status bytes.
    pub fn running_status(&mut self, on: bool) -> &mut Self {
        self.running_status = on;
        self
    }

    /// Leave out the closing end-of-track meta event.
    pub fn without_end_of_track(&mut self) -> &mut Self {
        self.end_of_track = false;
        self
    }

    /// Bytes appended after end-of-track, still inside the chunk.
    pub fn trailing_bytes(&mut self, bytes: &[u8]) -> &mut Self {
        self.trailing.extend_from_slice(bytes);
        self
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut events = self.events.clone();
        events.sort_by_key(|(tick, _)| *tick);
        let mut out = Vec::new();
        let mut last = 0u32;
        let mut running = None;
        for (tick, event) in &events {
            out.extend(encode_vlq(tick - last));
            last = *tick;
            event.write(&mut out, &mut running, self.running_status);
        }
        if self.end_of_track {
            out.extend(encode_vlq(0));
            Event::EndOfTrack.write(&mut out, &mut running, false);
        }
        out.extend_from_slice(&self.trailing);
        out
    }
}

#[derive(Debug, Clone)]
pub struct SmfWriter {
    format: u16,
    division: u16,
    tracks: Vec<TrackBuilder>,
    declared_tracks: Option<u16>,
}

impl SmfWriter {
    pub fn new(format: u16, division: u16) -> Self {
        SmfWriter { format, division, tracks: Vec::new(), declared_tracks: None }
    }

    pub fn track(mut self, track: impl Into<TrackBuilder>) -> Self {
        self.tracks.push(track.into());
        self
    }

    /// Override the header's track count.
    pub fn declare_tracks(mut self, n: u16) -> Self {
        self.declared_tracks = Some(n);
        self
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(b"MThd");
        out.extend(6u32.to_be_bytes());
        out.extend(self.format.to_be_bytes());
        let n = self.declared_tracks.unwrap_or(self.tracks.len() as u16);
        out.extend(n.to_be_bytes());
        out.extend(self.division.to_be_bytes());
        for t in &self.tracks {
            let body = t.encode();
            out.extend_from_slice(b"MTrk");
            out.extend((body.len() as u32).to_be_bytes());
            out.extend(body);
        }
        out
    }
}

impl From<&mut TrackBuilder> for TrackBuilder {
    fn from(t: &mut TrackBuilder) -> Self {
        t.clone()
    }
}
