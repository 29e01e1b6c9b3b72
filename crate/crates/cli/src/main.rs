use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nmat::corpus::{
    analyze_corpus, analyze_song, correlate_feature, fixed6, load_manifest, render_song, write_charts, write_report,
    AnalysisConfig, Feature, ManifestEntry, ReportFormat,
};
use nmat::features::{AggregateMode, IvWeighting, PcWeighting};
use nmat::notes::MonoPolicy;
use nmat::smf::{parse_smf, EventKind};

#[derive(Parser, Debug)]
#[command(name = "nmat", version, about = "Melody feature extraction and corpus statistics for MIDI files")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Summarize a MIDI file: format, division, tracks and event counts
    Inspect { file: PathBuf },
    /// Extract the melody features of one file
    Extract {
        file: PathBuf,
        #[command(flatten)]
        voice: VoiceArgs,
        #[command(flatten)]
        modes: ModeArgs,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Run a whole corpus and write reports (and optionally charts)
    Analyze {
        #[arg(long)]
        manifest: PathBuf,
        /// Directory receiving report.json, report.csv and report.txt
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        charts: Option<PathBuf>,
        #[command(flatten)]
        modes: ModeArgs,
        #[arg(long, value_enum, default_value_t = Aggregate::Song)]
        aggregate: Aggregate,
    },
    /// Correlate one feature against play counts
    Correlate {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, value_enum)]
        feature: FeatureArg,
        #[command(flatten)]
        modes: ModeArgs,
    },
}

#[derive(Args, Debug)]
struct VoiceArgs {
    #[arg(long)]
    track: Option<usize>,
    #[arg(long, value_parser = clap::value_parser!(u8).range(0..=15))]
    channel: Option<u8>,
    #[arg(long)]
    name_pattern: Option<String>,
}

#[derive(Args, Debug)]
struct ModeArgs {
    #[arg(long, value_enum, default_value_t = Mono::High)]
    mono_policy: Mono,
    #[arg(long, value_enum, default_value_t = PcArg::Duration)]
    pc_weighting: PcArg,
    #[arg(long, value_enum, default_value_t = IvArg::Count)]
    iv_weighting: IvArg,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mono {
    High,
    Low,
    First,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PcArg {
    Duration,
    Count,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum IvArg {
    Count,
    Duration,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Aggregate {
    Song,
    Pooled,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FeatureArg {
    Ambitus,
    Entropy,
}

impl ModeArgs {
    fn config(&self, aggregate: Aggregate) -> AnalysisConfig {
        AnalysisConfig {
            mono_policy: match self.mono_policy {
                Mono::High => MonoPolicy::KeepHigher,
                Mono::Low => MonoPolicy::KeepLower,
                Mono::First => MonoPolicy::KeepFirst,
            },
            pc_weighting: match self.pc_weighting {
                PcArg::Duration => PcWeighting::Duration,
                PcArg::Count => PcWeighting::Count,
            },
            iv_weighting: match self.iv_weighting {
                IvArg::Count => IvWeighting::Count,
                IvArg::Duration => IvWeighting::Duration,
            },
            aggregate: match aggregate {
                Aggregate::Song => AggregateMode::EqualSongWeight,
                Aggregate::Pooled => AggregateMode::Pooled,
            },
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Inspect { file } => inspect(&file),
        Command::Extract { file, voice, modes, format } => {
            extract(&file, voice, &modes.config(Aggregate::Song), format)
        }
        Command::Analyze { manifest, out, charts, modes, aggregate } => {
            analyze(&manifest, &out, charts.as_deref(), &modes.config(aggregate))
        }
        Command::Correlate { manifest, feature, modes } => {
            correlate(&manifest, feature, &modes.config(Aggregate::Song))
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("nmat: {msg}");
            ExitCode::FAILURE
        }
    }
}

fn read(path: &Path) -> Result<Vec<u8>, String> {
    std::fs::read(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn inspect(file: &Path) -> Result<(), String> {
    let doc = parse_smf(&read(file)?).map_err(|e| format!("{}: {e}", file.display()))?;
    let n = doc.tracks.len();
    println!(
        "format {}, division {}, {} track{}",
        doc.format.number(),
        doc.ticks_per_quarter,
        n,
        if n == 1 { "" } else { "s" }
    );
    for t in &doc.tracks {
        let notes =
            t.events.iter().filter(|e| matches!(e.kind, EventKind::NoteOn { velocity, .. } if velocity > 0)).count();
        let tempos = t.events.iter().filter(|e| matches!(e.kind, EventKind::Tempo { .. })).count();
        let name = t.name.as_deref().map(|s| format!(" \"{s}\"")).unwrap_or_default();
        println!("  track {}{name}: {notes} notes, {tempos} tempo events, ends at tick {}", t.index, t.end_tick());
    }
    for w in &doc.warnings {
        println!("  warning: {w}");
    }
    Ok(())
}

fn extract(file: &Path, voice: VoiceArgs, config: &AnalysisConfig, format: Format) -> Result<(), String> {
    let stem = file.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let entry = ManifestEntry {
        id: stem.clone(),
        title: stem,
        midi_path: file.to_path_buf(),
        track: voice.track,
        channel: voice.channel,
        name_pattern: voice.name_pattern,
        plays: None,
    };
    let song = analyze_song(&entry, config);
    if let Err(e) = &song.outcome {
        return Err(e.clone());
    }
    print!("{}", render_song(&song, report_format(format)));
    Ok(())
}

fn report_format(f: Format) -> ReportFormat {
    match f {
        Format::Text => ReportFormat::Text,
        Format::Json => ReportFormat::Json,
        Format::Csv => ReportFormat::Csv,
    }
}

fn analyze(manifest: &Path, out: &Path, charts: Option<&Path>, config: &AnalysisConfig) -> Result<(), String> {
    let entries = load_manifest(manifest).map_err(|e| e.to_string())?;
    let report = analyze_corpus(&entries, config).map_err(|e| e.to_string())?;
    std::fs::create_dir_all(out).map_err(|e| format!("{}: {e}", out.display()))?;
    for format in [ReportFormat::Json, ReportFormat::Csv, ReportFormat::Text] {
        let path = out.join(format!("report.{}", format.extension()));
        write_report(&report, format, &path).map_err(|e| e.to_string())?;
        println!("wrote {}", path.display());
    }
    if let Some(dir) = charts {
        for path in write_charts(&report, dir).map_err(|e| e.to_string())? {
            println!("wrote {}", path.display());
        }
    }
    let failed = report.songs.iter().filter(|s| s.features().is_none()).count();
    println!("{} songs analyzed, {failed} failed", report.songs.len() - failed);
    for s in report.songs.iter().filter(|s| s.features().is_none()) {
        eprintln!("nmat: {}: {}", s.entry.id, s.outcome.as_ref().err().map(String::as_str).unwrap_or_default());
    }
    Ok(())
}

fn correlate(manifest: &Path, feature: FeatureArg, config: &AnalysisConfig) -> Result<(), String> {
    let feature = match feature {
        FeatureArg::Ambitus => Feature::Ambitus,
        FeatureArg::Entropy => Feature::Entropy,
    };
    let entries = load_manifest(manifest).map_err(|e| e.to_string())?;
    let report = analyze_corpus(&entries, config).map_err(|e| e.to_string())?;
    let c = correlate_feature(&report.songs, feature).map_err(|e| e.to_string())?;
    println!("feature {}", feature.name());
    println!("r {}", fixed6(c.r));
    println!("n {}", c.n);
    println!("t {}", fixed6(c.t_statistic));
    println!("dof {}", c.dof);
    println!("p {}", fixed6(c.p_two_tailed));
    Ok(())
}
