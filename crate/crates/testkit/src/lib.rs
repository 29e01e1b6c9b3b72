//! Test fixtures for the `nmat` workspace.
//!
//! Nothing in here touches the parser: the VLQ encoder and the SMF writer are
//! written directly against the file-format layout so parser tests have an
//! independent reference to check against.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub mod oracle;
pub mod writer;

pub use writer::{Event, SmfWriter, TrackBuilder};

/// Encode a value as a MIDI variable-length quantity.
///
/// Works by repeated division instead of shifting so it shares no code shape
/// with the decoder under test.
pub fn encode_vlq(value: u32) -> Vec<u8> {
    assert!(value <= 0x0FFF_FFFF, "VLQ values are limited to 28 bits");
    let mut groups = Vec::new();
    let mut rest = value;
    loop {
        groups.push((rest % 128) as u8);
        rest /= 128;
        if rest == 0 {
            break;
        }
    }
    groups.reverse();
    let last = groups.len() - 1;
    groups.iter().enumerate().map(|(i, g)| if i < last { g + 128 } else { *g }).collect()
}

/// Boundary values where the encoded width changes.
pub const VLQ_BOUNDARIES: [u32; 8] = [0, 127, 128, 16_383, 16_384, 2_097_151, 2_097_152, 0x0FFF_FFFF];

/// One melody note in tick units.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TickNote {
    pub pitch: u8,
    pub start: u32,
    pub len: u32,
}

/// A single-track format 0 file holding a monophonic melody on channel 0.
pub fn melody_file(notes: &[TickNote], division: u16, tempo: Option<u32>) -> Vec<u8> {
    let mut track = TrackBuilder::new();
    if let Some(t) = tempo {
        track.at(0, Event::Tempo(t));
    }
    for n in notes {
        track.at(n.start, Event::NoteOn { channel: 0, pitch: n.pitch, velocity: 90 });
        track.at(n.start + n.len, Event::NoteOff { channel: 0, pitch: n.pitch, velocity: 0 });
    }
    SmfWriter::new(0, division).track(track).to_bytes()
}

/// Consecutive quarter notes (one per pitch) at the given division.
pub fn quarter_notes(pitches: &[u8], division: u16) -> Vec<TickNote> {
    pitches
        .iter()
        .enumerate()
        .map(|(i, &pitch)| TickNote { pitch, start: i as u32 * division as u32, len: division as u32 })
        .collect()
}

pub const C_MAJOR_SCALE: [u8; 8] = [60, 62, 64, 65, 67, 69, 71, 72];

/// Stepwise folk-style tune: at least `repeat_share` of the moves are repeated
/// notes, the rest mix scale steps with the thirds and arpeggio leaps common
/// in sung folk tunes.
pub fn folk_melody(seed: u64, len: usize, repeat_share: f64) -> Vec<u8> {
    let mut rng = StdRng::seed_from_u64(seed);
    let scale = [0i32, 2, 4, 5, 7, 9, 11];
    let mut degree: i32 = 7;
    let mut out = Vec::with_capacity(len);
    let pitch_of = |d: i32| -> u8 {
        let oct = d.div_euclid(7);
        (48 + 12 * oct + scale[d.rem_euclid(7) as usize]) as u8
    };
    out.push(pitch_of(degree));
    let repeats_needed = ((len.saturating_sub(1)) as f64 * repeat_share).ceil() as usize;
    let mut repeat_slots: Vec<bool> = (1..len).map(|i| i <= repeats_needed).collect();
    // shuffle so repeats are spread through the tune
    for i in (1..repeat_slots.len()).rev() {
        let j = rng.gen_range(0..=i);
        repeat_slots.swap(i, j);
    }
    for repeat in repeat_slots {
        if !repeat {
            let step = match rng.gen_range(0..10) {
                0..=4 => 1,
                5..=7 => 2,
                8 => 3,
                _ => 4,
            };
            let up = if degree <= 3 {
                true
            } else if degree >= 11 {
                false
            } else {
                rng.gen_bool(0.5)
            };
            degree += if up { step } else { -step };
        }
        out.push(pitch_of(degree));
    }
    out
}
