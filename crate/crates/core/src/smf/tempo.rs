use num_rational::Ratio;

use super::{EventKind, SmfDocument};
use crate::real::Real;

/// MIDI default tempo, 120 BPM.
pub const DEFAULT_TEMPO: u32 = 500_000;

/// Tempo changes in strictly increasing tick order, always starting at tick 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TempoMap {
    changes: Vec<(u64, u32)>,
}

impl Default for TempoMap {
    fn default() -> Self {
        TempoMap { changes: vec![(0, DEFAULT_TEMPO)] }
    }
}

impl TempoMap {
    /// Build a map from `(tick, microseconds_per_quarter)` pairs given in
    /// file order. At equal ticks the later entry wins. Zero tempos are
    /// ignored.
    pub fn from_changes(changes: impl IntoIterator<Item = (u64, u32)>) -> Self {
        let mut all: Vec<(u64, u32)> = changes.into_iter().filter(|&(_, us)| us > 0).collect();
        // stable: file order is preserved inside a tick
        all.sort_by_key(|&(tick, _)| tick);
        let mut out: Vec<(u64, u32)> = Vec::with_capacity(all.len() + 1);
        for (tick, us) in all {
            match out.last_mut() {
                Some(last) if last.0 == tick => last.1 = us,
                _ => out.push((tick, us)),
            }
        }
        if out.first().is_none_or(|&(tick, _)| tick != 0) {
            out.insert(0, (0, DEFAULT_TEMPO));
        }
        TempoMap { changes: out }
    }

    /// Collect tempo events from every track; track order then event order
    /// defines "later in the file".
    pub fn from_document(doc: &SmfDocument) -> Self {
        Self::from_changes(doc.tracks.iter().flat_map(|t| {
            t.events.iter().filter_map(|e| match e.kind {
                EventKind::Tempo { microseconds_per_quarter } => Some((e.tick, microseconds_per_quarter)),
                _ => None,
            })
        }))
    }

    pub fn changes(&self) -> &[(u64, u32)] {
        &self.changes
    }

    /// Seconds elapsed at a (possibly fractional) tick position.
    pub fn seconds_at<T: Real>(&self, tick: T, ticks_per_quarter: u16) -> T {
        let tpq = T::of(f64::from(ticks_per_quarter));
        let million = T::of(1e6);
        let mut acc = T::zero();
        for (i, &(start, us)) in self.changes.iter().enumerate() {
            let start = T::of_u64(start);
            if tick <= start {
                break;
            }
            let stop = match self.changes.get(i + 1) {
                Some(&(next, _)) => tick.min(T::of_u64(next)),
                None => tick,
            };
            acc = acc + (stop - start) / tpq * T::of(f64::from(us)) / million;
        }
        acc
    }
}

pub fn tick_to_beats<T: Real>(tick: u64, ticks_per_quarter: u16) -> T {
    T::of_u64(tick) / T::of(f64::from(ticks_per_quarter))
}

/// Beat position as an exact fraction.
pub fn tick_to_beats_exact(tick: u64, ticks_per_quarter: u16) -> Ratio<u64> {
    Ratio::new(tick, u64::from(ticks_per_quarter))
}

pub fn tick_to_seconds<T: Real>(tick: u64, ticks_per_quarter: u16, map: &TempoMap) -> T {
    map.seconds_at(T::of_u64(tick), ticks_per_quarter)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_map_defaults_to_120_bpm() {
        assert_eq!(TempoMap::from_changes([]).changes(), &[(0, 500_000)]);
    }

    #[test]
    fn ordering_and_dedup() {
        let m = TempoMap::from_changes([(960, 250_000), (0, 500_000)]);
        assert_eq!(m.changes(), &[(0, 500_000), (960, 250_000)]);
        let m = TempoMap::from_changes([(0, 400_000), (0, 600_000)]);
        assert_eq!(m.changes(), &[(0, 600_000)]);
    }

    #[test]
    fn implicit_start_when_first_change_is_late() {
        let m = TempoMap::from_changes([(480, 300_000)]);
        assert_eq!(m.changes(), &[(0, 500_000), (480, 300_000)]);
    }

    #[test]
    fn beats() {
        assert_eq!(tick_to_beats::<f64>(0, 96), 0.0);
        assert_eq!(tick_to_beats::<f64>(96, 96), 1.0);
        assert_eq!(tick_to_beats::<f64>(144, 96), 1.5);
        assert_eq!(tick_to_beats_exact(144, 96), Ratio::new(3, 2));
        assert_eq!(tick_to_beats::<f32>(144, 96), 1.5f32);
    }

    #[test]
    fn seconds() {
        let default = TempoMap::default();
        assert_eq!(tick_to_seconds::<f64>(0, 96, &default), 0.0);
        assert_eq!(tick_to_seconds::<f64>(96, 96, &default), 0.5);
        // 96 ticks at 0.5 s/quarter, then 96 at 0.25 s/quarter
        let two = TempoMap::from_changes([(0, 500_000), (96, 250_000)]);
        assert!((tick_to_seconds::<f64>(192, 96, &two) - 0.75).abs() < 1e-15);
        assert!((tick_to_seconds::<f32>(192, 96, &two) - 0.75).abs() < 1e-6);
    }
}
