use std::path::Path;

use nmat::corpus::{
    analyze_corpus, load_manifest, render_report, render_song, write_charts, write_report, AnalysisConfig, CorpusError,
    Feature, ReportFormat,
};
use nmat_testkit::{melody_file, quarter_notes, C_MAJOR_SCALE};

const HEADER: &str = "id,title,midi_path,track,channel,name_pattern,plays\n";

fn write_song(dir: &Path, name: &str, pitches: &[u8]) {
    std::fs::write(dir.join(name), melody_file(&quarter_notes(pitches, 96), 96, None)).unwrap();
}

fn span_melody(low: u8, span: u8, extra_pc: &[u8]) -> Vec<u8> {
    let mut v = vec![low, low + span];
    v.extend(extra_pc.iter().map(|d| low + d % (span + 1)));
    v
}

#[test]
fn single_song_corpus() {
    let dir = tempfile::tempdir().unwrap();
    write_song(dir.path(), "scale.mid", &C_MAJOR_SCALE);
    std::fs::write(dir.path().join("m.csv"), format!("{HEADER}s,Scale,scale.mid,,,,500\n")).unwrap();
    let entries = load_manifest(&dir.path().join("m.csv")).unwrap();
    let report = analyze_corpus(&entries, &AnalysisConfig::default()).unwrap();
    let f = report.songs[0].features().unwrap();
    assert_eq!(report.mean_ambitus, 12.0);
    assert_eq!(report.mean_entropy, f.entropy);
    assert!(report.correlations.is_empty());
    assert_eq!(report.notices.len(), 2);
    assert!(report.notices[0].contains("degenerate sample"));
    assert_eq!(report.aggregate_folded.unsigned_bins[2], 5.0 / 7.0);
}

#[test]
fn truncated_file_is_isolated() {
    let dir = tempfile::tempdir().unwrap();
    write_song(dir.path(), "a.mid", &[60, 62, 64]);
    write_song(dir.path(), "b.mid", &[60, 60, 67]);
    let mut bytes = melody_file(&quarter_notes(&[60, 64], 96), 96, None);
    bytes.truncate(bytes.len() - 5);
    std::fs::write(dir.path().join("c.mid"), bytes).unwrap();
    std::fs::write(
        dir.path().join("m.csv"),
        format!("{HEADER}a,A,a.mid,,,,1\nc,C,c.mid,,,,2\nb,B,b.mid,,,,3\nmissing,Gone,nope.mid,,,,\n"),
    )
    .unwrap();
    let entries = load_manifest(&dir.path().join("m.csv")).unwrap();
    let report = analyze_corpus(&entries, &AnalysisConfig::default()).unwrap();
    let ids: Vec<&str> = report.songs.iter().map(|s| s.entry.id.as_str()).collect();
    assert_eq!(ids, vec!["a", "c", "b", "missing"]);
    assert!(report.songs[1].outcome.as_ref().unwrap_err().contains("truncated"));
    assert!(report.songs[3].features().is_none());
    assert_eq!(report.songs.iter().filter(|s| s.features().is_some()).count(), 2);
    assert_eq!(report.mean_ambitus, (4.0 + 7.0) / 2.0);
}

#[test]
fn all_failed_is_fatal() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("m.csv"), format!("{HEADER}x,X,none.mid,,,,\n")).unwrap();
    let entries = load_manifest(&dir.path().join("m.csv")).unwrap();
    assert_eq!(analyze_corpus(&entries, &AnalysisConfig::default()).unwrap_err(), CorpusError::CorpusEmpty);
}

#[test]
fn eleven_song_ambitus_corpus() {
    let table = [27u8, 17, 17, 15, 15, 14, 13, 12, 10, 9, 8];
    let dir = tempfile::tempdir().unwrap();
    let mut manifest = HEADER.to_string();
    for (i, &span) in table.iter().enumerate() {
        write_song(dir.path(), &format!("s{i}.mid"), &span_melody(50, span, &[2, 4, 5, 7]));
        manifest.push_str(&format!("s{i},Song {i},s{i}.mid,,,,{}\n", 1000 + 37 * i * i));
    }
    std::fs::write(dir.path().join("m.csv"), &manifest).unwrap();
    let entries = load_manifest(&dir.path().join("m.csv")).unwrap();
    let report = analyze_corpus(&entries, &AnalysisConfig::default()).unwrap();
    assert!((report.mean_ambitus - 14.27).abs() < 0.005);
    assert_eq!(report.correlations.len(), 2);
    assert!(report.correlations.iter().all(|c| c.result.n == 11 && c.result.dof == 9));

    let chart_dir = dir.path().join("charts");
    let written = write_charts(&report, &chart_dir).unwrap();
    assert_eq!(written.len(), 5);
    let ambitus_svg = std::fs::read_to_string(chart_dir.join("ambitus.svg")).unwrap();
    let bars: Vec<&str> = ambitus_svg.lines().filter(|l| l.starts_with("<rect x=") && l.contains("<title>")).collect();
    assert_eq!(bars.len(), 11);
    // the tallest bar carries the widest song
    assert!(bars[0].contains("<title>Song 0: 27.000000</title>"));
}

#[test]
fn correlation_uses_pairwise_complete_rows() {
    let dir = tempfile::tempdir().unwrap();
    let mut manifest = HEADER.to_string();
    let spans = [5u8, 9, 12, 7, 3];
    for (i, span) in spans.iter().enumerate() {
        write_song(dir.path(), &format!("s{i}.mid"), &span_melody(60, *span, &[1, 3]));
        let plays = if i == 2 { String::new() } else { (100 * (i + 1)).to_string() };
        manifest.push_str(&format!("s{i},S{i},s{i}.mid,,,,{plays}\n"));
    }
    std::fs::write(dir.path().join("m.csv"), manifest).unwrap();
    let report =
        analyze_corpus(&load_manifest(&dir.path().join("m.csv")).unwrap(), &AnalysisConfig::default()).unwrap();
    let amb = report.correlations.iter().find(|c| c.feature == Feature::Ambitus).unwrap();
    assert_eq!(amb.result.n, 4);
}

#[test]
fn reordering_preserves_values() {
    let dir = tempfile::tempdir().unwrap();
    let melodies: [&[u8]; 4] =
        [&[60, 62, 64, 62, 60], &[55, 55, 57, 59, 60, 72], &[70, 69, 67, 65], &[60, 61, 60, 61, 66]];
    let mut rows = Vec::new();
    for (i, m) in melodies.iter().enumerate() {
        write_song(dir.path(), &format!("s{i}.mid"), m);
        rows.push(format!("s{i},S{i},s{i}.mid,,,,{}\n", 10 * (i + 3) * (i + 1)));
    }
    let run = |order: &[usize]| {
        let text: String = std::iter::once(HEADER.to_string()).chain(order.iter().map(|&i| rows[i].clone())).collect();
        std::fs::write(dir.path().join("m.csv"), text).unwrap();
        analyze_corpus(&load_manifest(&dir.path().join("m.csv")).unwrap(), &AnalysisConfig::default()).unwrap()
    };
    let a = run(&[0, 1, 2, 3]);
    let b = run(&[3, 1, 0, 2]);
    assert!((a.mean_ambitus - b.mean_ambitus).abs() < 1e-12);
    assert!((a.mean_entropy - b.mean_entropy).abs() < 1e-12);
    for i in 0..25 {
        assert!((a.aggregate_intervals.signed_bins[i] - b.aggregate_intervals.signed_bins[i]).abs() < 1e-12);
    }
    for song in &a.songs {
        let other = b.songs.iter().find(|s| s.entry.id == song.entry.id).unwrap();
        assert_eq!(song.outcome, other.outcome);
    }
    assert_eq!(a.songs[0].entry.id, "s0");
    assert_eq!(b.songs[0].entry.id, "s3");
}

#[test]
fn reports_are_deterministic_and_fixed_precision() {
    let dir = tempfile::tempdir().unwrap();
    write_song(dir.path(), "a.mid", &[60, 62, 64, 65, 67]);
    write_song(dir.path(), "b.mid", &[60, 60, 60, 62]);
    std::fs::write(dir.path().join("m.csv"), format!("{HEADER}a,\"Song, A\",a.mid,,,,10\nb,B,b.mid,,,,\n")).unwrap();
    let entries = load_manifest(&dir.path().join("m.csv")).unwrap();
    let report = analyze_corpus(&entries, &AnalysisConfig::default()).unwrap();
    for format in [ReportFormat::Text, ReportFormat::Json, ReportFormat::Csv] {
        let p1 = dir.path().join(format!("r1.{}", format.extension()));
        let p2 = dir.path().join(format!("r2.{}", format.extension()));
        write_report(&report, format, &p1).unwrap();
        write_report(&report, format, &p2).unwrap();
        assert_eq!(std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
    }

    let json: serde_json::Value = serde_json::from_str(&render_report(&report, ReportFormat::Json)).unwrap();
    assert_eq!(json["correlations"], serde_json::json!([]));
    assert_eq!(json["songs"][0]["ambitus"]["semitones"], 7);
    assert_eq!(json["songs"][0]["intervals"]["signed"].as_array().unwrap().len(), 25);
    assert_eq!(json["songs"][0]["intervals"]["folded"].as_array().unwrap().len(), 13);
    assert_eq!(json["config"]["mono_policy"], "keep_higher");
    for key in ["config", "songs", "means", "aggregate_intervals", "correlations"] {
        assert!(json.get(key).is_some(), "{key}");
    }

    let csv = render_report(&report, ReportFormat::Csv);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("id,title,ambitus,entropy,note_count,plays"));
    let row = lines.next().unwrap();
    assert!(row.starts_with("a,\"Song, A\",7,0."), "{row}");
    assert_eq!(row.split(',').nth(4).unwrap().split('.').nth(1).unwrap().len(), 6);
    assert!(lines.next().unwrap().ends_with(",4,"));

    let frag = render_song(&report.songs[1], ReportFormat::Json);
    let v: serde_json::Value = serde_json::from_str(&frag).unwrap();
    assert_eq!(v["intervals"]["folded"][0].as_f64().unwrap(), 0.666667);
    assert!(frag.contains("0.666667") && !frag.contains("0.6666666"));
}
