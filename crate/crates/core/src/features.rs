//! Melodic features of a monophonic voice: ambitus, normalized pitch-class
//! entropy and the successive-interval distribution.

use serde::Serialize;

use crate::error::AnalysisError;
use crate::notes::NoteMatrix;
use crate::real::Real;

/// Signed interval bins cover -12..=12 semitones.
pub const SIGNED_BINS: usize = 25;
/// Folded bins cover P1..=P8.
pub const FOLDED_BINS: usize = 13;

pub const INTERVAL_NAMES: [&str; FOLDED_BINS] =
    ["P1", "m2", "M2", "m3", "M3", "P4", "TT", "P5", "m6", "M6", "m7", "M7", "P8"];

pub const PITCH_CLASS_NAMES: [&str; 12] = ["C", "C#", "D", "D#", "E", "F", "F#", "G", "G#", "A", "A#", "B"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AmbitusResult {
    pub semitones: u8,
    pub lowest_pitch: u8,
    pub highest_pitch: u8,
}

pub fn ambitus<T: Real>(nm: &NoteMatrix<T>) -> Result<AmbitusResult, AnalysisError> {
    let lowest = nm.notes().iter().map(|n| n.pitch).min().ok_or(AnalysisError::EmptyVoice)?;
    let highest = nm.notes().iter().map(|n| n.pitch).max().ok_or(AnalysisError::EmptyVoice)?;
    Ok(AmbitusResult { semitones: highest - lowest, lowest_pitch: lowest, highest_pitch: highest })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PcWeighting {
    /// Each note adds its duration in beats.
    #[default]
    Duration,
    /// Each note adds one.
    Count,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PitchClassDistribution<T> {
    pub weights: [T; 12],
    pub mode: PcWeighting,
}

pub fn pc_distribution<T: Real>(
    nm: &NoteMatrix<T>,
    mode: PcWeighting,
) -> Result<PitchClassDistribution<T>, AnalysisError> {
    if nm.is_empty() {
        return Err(AnalysisError::EmptyVoice);
    }
    let mut weights = [T::zero(); 12];
    for n in nm.notes() {
        let w = match mode {
            PcWeighting::Duration => n.duration_beats,
            PcWeighting::Count => T::one(),
        };
        let bin = &mut weights[usize::from(n.pitch % 12)];
        *bin = *bin + w;
    }
    normalize(&mut weights);
    Ok(PitchClassDistribution { weights, mode })
}

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct EntropyResult<T> {
    /// Shannon entropy divided by log 12, in [0, 1].
    pub normalized_entropy: T,
}

/// Shannon entropy of the pitch-class weights relative to its 12-class maximum.
pub fn pitch_class_entropy<T: Real>(pcd: &PitchClassDistribution<T>) -> EntropyResult<T> {
    let h = pcd.weights.iter().filter(|&&p| p > T::zero()).fold(T::zero(), |acc, &p| acc - p * p.ln());
    let value = (h / T::of(12.0).ln()).max(T::zero()).min(T::one());
    EntropyResult { normalized_entropy: value }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IvWeighting {
    #[default]
    Count,
    /// Each interval weighs the geometric mean of its two note durations.
    Duration,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalDistribution<T> {
    /// Normalized weights for -12..=12; index `delta + 12`.
    pub signed_bins: [T; SIGNED_BINS],
    /// Unnormalized weights behind `signed_bins`.
    pub raw_bins: [T; SIGNED_BINS],
    /// Intervals wider than an octave, left out of the bins.
    pub overflow_count: usize,
    pub interval_count: usize,
}

impl<T: Real> IntervalDistribution<T> {
    pub fn empty() -> Self {
        IntervalDistribution {
            signed_bins: [T::zero(); SIGNED_BINS],
            raw_bins: [T::zero(); SIGNED_BINS],
            overflow_count: 0,
            interval_count: 0,
        }
    }

    pub fn bin(&self, semitones: i32) -> T {
        self.signed_bins[(semitones + 12) as usize]
    }
}

pub fn interval_distribution<T: Real>(
    nm: &NoteMatrix<T>,
    weighting: IvWeighting,
) -> Result<IntervalDistribution<T>, AnalysisError> {
    if nm.is_empty() {
        return Err(AnalysisError::EmptyVoice);
    }
    if !nm.is_monophonic() {
        return Err(AnalysisError::NotMonophonic);
    }
    let mut out = IntervalDistribution::empty();
    for pair in nm.notes().windows(2) {
        let delta = i32::from(pair[1].pitch) - i32::from(pair[0].pitch);
        out.interval_count += 1;
        if delta.abs() > 12 {
            out.overflow_count += 1;
            continue;
        }
        let w = match weighting {
            IvWeighting::Count => T::one(),
            IvWeighting::Duration => (pair[0].duration_beats * pair[1].duration_beats).sqrt(),
        };
        let bin = &mut out.raw_bins[(delta + 12) as usize];
        *bin = *bin + w;
    }
    out.signed_bins = out.raw_bins;
    normalize(&mut out.signed_bins);
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FoldedIntervalView<T> {
    /// P1 (0) through P8 (12).
    pub unsigned_bins: [T; FOLDED_BINS],
}

impl<T: Real> FoldedIntervalView<T> {
    /// Interval classes sorted by weight, heaviest first; ties keep interval order.
    pub fn ranking(&self) -> Vec<(&'static str, T)> {
        let mut v: Vec<(&'static str, T)> = INTERVAL_NAMES.iter().copied().zip(self.unsigned_bins).collect();
        v.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal));
        v
    }
}

pub fn fold_intervals<T: Real>(iv: &IntervalDistribution<T>) -> FoldedIntervalView<T> {
    let mut unsigned_bins = [T::zero(); FOLDED_BINS];
    unsigned_bins[0] = iv.signed_bins[12];
    for (k, bin) in unsigned_bins.iter_mut().enumerate().skip(1) {
        *bin = iv.signed_bins[12 - k] + iv.signed_bins[12 + k];
    }
    FoldedIntervalView { unsigned_bins }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AggregateMode {
    /// Mean of the per-song normalized profiles.
    #[default]
    EqualSongWeight,
    /// Sum of raw interval weights across songs.
    Pooled,
}

pub fn aggregate_interval_distribution<T: Real>(
    per_song: &[IntervalDistribution<T>],
    mode: AggregateMode,
) -> Result<IntervalDistribution<T>, AnalysisError> {
    if per_song.is_empty() {
        return Err(AnalysisError::EmptyInput);
    }
    let mut out = IntervalDistribution::empty();
    for song in per_song {
        out.overflow_count += song.overflow_count;
        out.interval_count += song.interval_count;
        for i in 0..SIGNED_BINS {
            out.raw_bins[i] = out.raw_bins[i] + song.raw_bins[i];
            let add = match mode {
                AggregateMode::EqualSongWeight => song.signed_bins[i],
                AggregateMode::Pooled => song.raw_bins[i],
            };
            out.signed_bins[i] = out.signed_bins[i] + add;
        }
    }
    // the per-song average differs from the sum only by a constant factor
    normalize(&mut out.signed_bins);
    Ok(out)
}

fn normalize<T: Real>(bins: &mut [T]) {
    let total = bins.iter().fold(T::zero(), |a, &b| a + b);
    if total > T::zero() {
        for b in bins.iter_mut() {
            *b = *b / total;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::notes::{enforce_monophony, MonoPolicy};

    fn mono(pitches: &[u8]) -> NoteMatrix<f64> {
        NoteMatrix::from_pitches("m", pitches).assume_monophonic()
    }

    #[test]
    fn ambitus_cases() {
        assert_eq!(ambitus(&mono(&[60])).unwrap(), AmbitusResult { semitones: 0, lowest_pitch: 60, highest_pitch: 60 });
        assert_eq!(ambitus(&mono(&[72, 60])).unwrap().semitones, 12);
        let wide: Vec<u8> = (55..=82).collect();
        let a = ambitus(&mono(&wide)).unwrap();
        assert_eq!((a.semitones, a.lowest_pitch, a.highest_pitch), (27, 55, 82));
        assert_eq!(ambitus(&mono(&[])).unwrap_err(), AnalysisError::EmptyVoice);
    }

    #[test]
    fn pc_single_and_uniform() {
        let d = pc_distribution(&mono(&[60]), PcWeighting::Duration).unwrap();
        assert_eq!(d.weights[0], 1.0);
        assert!(d.weights[1..].iter().all(|&w| w == 0.0));
        let all: Vec<u8> = (60..72).collect();
        let d = pc_distribution(&mono(&all), PcWeighting::Count).unwrap();
        assert!(d.weights.iter().all(|&w| (w - 1.0 / 12.0).abs() < 1e-15));
    }

    #[test]
    fn pc_duration_weighting() {
        let m = NoteMatrix::from_beats("cg", [(0.0, 3.0, 60), (3.0, 1.0, 67)]);
        let d = pc_distribution(&m, PcWeighting::Duration).unwrap();
        assert_eq!(d.weights[0], 0.75);
        assert_eq!(d.weights[7], 0.25);
        let d = pc_distribution(&m, PcWeighting::Count).unwrap();
        assert_eq!(d.weights[0], 0.5);
    }

    #[test]
    fn entropy_closed_forms() {
        let e = |w: [f64; 12]| pitch_class_entropy(&PitchClassDistribution { weights: w, mode: PcWeighting::Count });
        let mut one = [0.0; 12];
        one[5] = 1.0;
        assert_eq!(e(one).normalized_entropy, 0.0);
        assert!((e([1.0 / 12.0; 12]).normalized_entropy - 1.0).abs() < 1e-12);
        let mut two = [0.0; 12];
        two[0] = 0.5;
        two[7] = 0.5;
        let expected = 2f64.ln() / 12f64.ln();
        assert!((e(two).normalized_entropy - expected).abs() < 1e-12);
        assert!((expected - 0.278943).abs() < 1e-6);
    }

    #[test]
    fn repeated_note_is_prime() {
        let iv = interval_distribution(&mono(&[60, 60, 60]), IvWeighting::Count).unwrap();
        assert_eq!(iv.bin(0), 1.0);
        assert_eq!(iv.interval_count, 2);
    }

    #[test]
    fn scale_intervals() {
        let iv = interval_distribution(&mono(&[60, 62, 64, 65, 67, 69, 71, 72]), IvWeighting::Count).unwrap();
        assert_eq!(iv.bin(2), 5.0 / 7.0);
        assert_eq!(iv.bin(1), 2.0 / 7.0);
        let folded = fold_intervals(&iv);
        assert_eq!(folded.unsigned_bins[2], 5.0 / 7.0);
        assert_eq!(folded.unsigned_bins[1], 2.0 / 7.0);
        assert_eq!(folded.unsigned_bins.iter().filter(|&&v| v != 0.0).count(), 2);
    }

    #[test]
    fn wide_leap_overflows() {
        let iv = interval_distribution(&mono(&[48, 67]), IvWeighting::Count).unwrap();
        assert_eq!(iv.overflow_count, 1);
        assert!(iv.signed_bins.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn single_note_and_flag_errors() {
        let iv = interval_distribution(&mono(&[60]), IvWeighting::Count).unwrap();
        assert_eq!(iv.interval_count, 0);
        assert!(iv.signed_bins.iter().all(|&v| v == 0.0));
        let poly = NoteMatrix::<f64>::from_pitches("p", &[60, 62]);
        assert_eq!(interval_distribution(&poly, IvWeighting::Count).unwrap_err(), AnalysisError::NotMonophonic);
    }

    #[test]
    fn duration_weighted_intervals() {
        let m = NoteMatrix::from_beats("d", [(0.0, 1.0, 60), (1.0, 4.0, 62), (5.0, 1.0, 62)]);
        let m = enforce_monophony(&m, MonoPolicy::KeepHigher).unwrap();
        let iv = interval_distribution(&m, IvWeighting::Duration).unwrap();
        // both pairs weigh sqrt(1 * 4) = 2
        assert_eq!(iv.raw_bins[14], 2.0);
        assert_eq!(iv.raw_bins[12], 2.0);
        assert_eq!(iv.bin(2), 0.5);
    }

    #[test]
    fn folding() {
        let mut iv = IntervalDistribution::<f64>::empty();
        iv.signed_bins[10] = 0.3;
        iv.signed_bins[14] = 0.4;
        iv.signed_bins[12] = 0.3;
        let f = fold_intervals(&iv);
        assert!((f.unsigned_bins[2] - 0.7).abs() < 1e-15);
        assert_eq!(f.unsigned_bins[0], 0.3);
        assert_eq!(f.ranking()[0].0, "M2");
    }

    fn counts(delta: i32, n: usize) -> IntervalDistribution<f64> {
        let mut iv = IntervalDistribution::empty();
        iv.raw_bins[(delta + 12) as usize] = n as f64;
        iv.signed_bins[(delta + 12) as usize] = 1.0;
        iv.interval_count = n;
        iv
    }

    #[test]
    fn aggregation_modes() {
        let p1 = interval_distribution(&mono(&[60; 11]), IvWeighting::Count).unwrap();
        assert_eq!(aggregate_interval_distribution(&[p1], AggregateMode::EqualSongWeight).unwrap(), p1);

        let rising: Vec<u8> = (0..11).map(|i| 40 + 2 * i).collect();
        let steps = interval_distribution(&mono(&rising), IvWeighting::Count).unwrap();
        let eq = aggregate_interval_distribution(&[p1, steps], AggregateMode::EqualSongWeight).unwrap();
        assert_eq!(eq.bin(0), 0.5);
        assert_eq!(eq.bin(2), 0.5);

        let pooled = aggregate_interval_distribution(&[counts(0, 10), counts(2, 90)], AggregateMode::Pooled).unwrap();
        assert_eq!(pooled.bin(0), 0.1);
        assert_eq!(pooled.bin(2), 0.9);
        assert_eq!(pooled.interval_count, 100);
        let eq =
            aggregate_interval_distribution(&[counts(0, 10), counts(2, 90)], AggregateMode::EqualSongWeight).unwrap();
        assert_eq!(eq.bin(0), 0.5);

        let mut wide = counts(0, 3);
        wide.overflow_count = 2;
        let agg = aggregate_interval_distribution(&[wide, wide], AggregateMode::Pooled).unwrap();
        assert_eq!(agg.overflow_count, 4);
        assert_eq!(
            aggregate_interval_distribution::<f64>(&[], AggregateMode::Pooled).unwrap_err(),
            AnalysisError::EmptyInput
        );
    }
}
