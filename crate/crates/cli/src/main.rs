use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qml::io::{self, CertificateReport, OffspringReport, QmlDocument, QmlNrDocument, TuneReport};
use qml::minor::first_hit;
use qml::oracle::{enumerate_periodic_minors_with, DEFAULT_PERIOD_BOUND};
use qml::params::{cardioid_edges, offspring, qml_nr_approx_with};
use qml::pullback::build_lamination_with;
use qml::svg::{render_leaves, GeodesicStyle, RenderConfig, StrokeBy, SvgLeaf};
use qml::tuning::{qml_approx_with, tune_chord, TuningWords};
use qml::{is_stand_alone_minor, Angle, Chord, Execution, MinorRecord, QmlError};

#[derive(Parser)]
#[command(name = "qml", version, about = "Exact quadratic minor lamination generator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write output to FILE instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Run on one thread.
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Finite approximation of the lamination of a minor.
    Lam {
        #[arg(long)]
        minor: Chord,
        #[arg(long)]
        depth: usize,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[command(flatten)]
        svg: SvgArgs,
    },
    /// Non-renormalizable part of QML from cardioid edges and their children.
    Qmlnr {
        #[arg(long)]
        max_q: u64,
        #[arg(long)]
        generations: usize,
        #[arg(long)]
        depth: usize,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[command(flatten)]
        svg: SvgArgs,
    },
    /// The non-renormalizable part plus tuning levels.
    Qml {
        #[arg(long)]
        max_q: u64,
        #[arg(long)]
        generations: usize,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        levels: usize,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[command(flatten)]
        svg: SvgArgs,
    },
    /// Stand-alone minor test; exits 2 on rejection.
    Verify {
        chord: Chord,
        #[arg(long, value_enum, default_value = "text")]
        format: ReportFormat,
    },
    /// Main cardioid edges up to a denominator.
    Cardioid {
        #[arg(long)]
        max_q: u64,
        #[arg(long, value_enum, default_value = "csv")]
        format: TableFormat,
    },
    /// The offspring of a minor through an angle behind it.
    Offspring {
        #[arg(long)]
        minor: Chord,
        #[arg(long)]
        angle: Angle,
        #[arg(long, value_enum, default_value = "text")]
        format: ReportFormat,
    },
    /// Tune a minor by a periodic base minor.
    Tune {
        #[arg(long)]
        base: Chord,
        #[arg(long)]
        chord: Chord,
        #[arg(long, value_enum, default_value = "text")]
        format: ReportFormat,
    },
    /// Exhaustive stand-alone test of all chords with endpoints of period Q.
    Oracle {
        #[arg(long)]
        period: u32,
        #[arg(long, default_value_t = DEFAULT_PERIOD_BOUND)]
        bound: u32,
        #[arg(long, value_enum, default_value = "csv")]
        format: TableFormat,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
    Svg,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableFormat {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
}

#[derive(Args)]
struct SvgArgs {
    #[arg(long, value_enum, default_value = "hyperbolic")]
    style: Style,
    #[arg(long, default_value_t = 800)]
    size: u32,
    #[arg(long, value_enum, default_value = "uniform")]
    stroke_by: Stroke,
    #[arg(long)]
    no_circle: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Style {
    Straight,
    Hyperbolic,
}

#[derive(Clone, Copy, ValueEnum)]
enum Stroke {
    Uniform,
    Period,
    Generation,
}

impl SvgArgs {
    fn config(&self) -> RenderConfig {
        RenderConfig {
            geodesic_style: match self.style {
                Style::Straight => GeodesicStyle::Straight,
                Style::Hyperbolic => GeodesicStyle::Hyperbolic,
            },
            size_px: self.size,
            stroke_by: match self.stroke_by {
                Stroke::Uniform => StrokeBy::Uniform,
                Stroke::Period => StrokeBy::Period,
                Stroke::Generation => StrokeBy::Generation,
            },
            include_circle: !self.no_circle,
        }
    }
}

enum Failure {
    Usage(String),
    Rejected(String),
    Invariant(String),
}

impl From<QmlError> for Failure {
    fn from(e: QmlError) -> Self {
        match e {
            QmlError::Invariant(_) => Failure::Invariant(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

/// Output text plus whether the run ended in a rejection.
type Outcome = Result<(String, bool), Failure>;

fn minor_arg(c: &Chord) -> Result<MinorRecord, Failure> {
    is_stand_alone_minor(c).map_err(|r| Failure::Rejected(r.to_string()))
}

fn run(cli: &Cli) -> Outcome {
    let exec = if cli.sequential { Execution::Sequential } else { Execution::default() };
    let text = match &cli.command {
        Command::Lam { minor, depth, format, svg } => {
            let m = minor_arg(minor)?;
            let lam = build_lamination_with(&m, *depth, exec)?;
            match format {
                Format::Json => io::to_json(&lam)?,
                Format::Csv => io::to_csv(&io::lamination_rows(&lam))?,
                Format::Svg => {
                    let leaves: Vec<SvgLeaf> = lam.leaves().iter().cloned().map(SvgLeaf::from).collect();
                    render_leaves(&leaves, &svg.config())?
                }
            }
        }
        Command::Qmlnr { max_q, generations, depth, format, svg } => {
            let leaves = qml_nr_approx_with(*max_q, *generations, *depth, exec)?;
            let params = io::QmlNrParams { max_q: *max_q, generations: *generations, depth: *depth };
            let doc = QmlNrDocument::new(params, &leaves);
            match format {
                Format::Json => io::to_json(&doc)?,
                Format::Csv => io::to_csv(&doc.leaves)?,
                Format::Svg => {
                    let leaves: Vec<SvgLeaf> = leaves
                        .iter()
                        .map(|l| SvgLeaf {
                            chord: l.minor.chord().clone(),
                            period: Some(l.minor.period()),
                            generation: Some(l.generation),
                        })
                        .collect();
                    render_leaves(&leaves, &svg.config())?
                }
            }
        }
        Command::Qml { max_q, generations, depth, levels, format, svg } => {
            let minors = qml_approx_with(*max_q, *generations, *depth, *levels, exec)?;
            let params =
                io::QmlParams { max_q: *max_q, generations: *generations, depth: *depth, levels: *levels };
            let doc = QmlDocument::new(params, &minors);
            match format {
                Format::Json => io::to_json(&doc)?,
                Format::Csv => io::to_csv(&doc.leaves)?,
                Format::Svg => {
                    let leaves: Vec<SvgLeaf> = minors
                        .iter()
                        .map(|m| SvgLeaf {
                            chord: m.chord().clone(),
                            period: Some(m.period()),
                            generation: None,
                        })
                        .collect();
                    render_leaves(&leaves, &svg.config())?
                }
            }
        }
        Command::Verify { chord, format } => {
            let outcome = is_stand_alone_minor(chord);
            let rejected = outcome.is_err();
            let text = match format {
                ReportFormat::Json => io::to_json(&CertificateReport::new(&outcome))?,
                ReportFormat::Text => match &outcome {
                    Ok(m) => format!(
                        "accepted {} ({}, preperiod {}, period {})\n",
                        m.chord(),
                        serde_json::to_value(m.classification())
                            .ok()
                            .and_then(|v| v.as_str().map(str::to_owned))
                            .unwrap_or_default(),
                        m.preperiod(),
                        m.period()
                    ),
                    Err(r) => format!("{r}\n"),
                },
            };
            return Ok((text, rejected));
        }
        Command::Cardioid { max_q, format } => {
            let rows = io::cardioid_rows(&cardioid_edges(*max_q)?);
            match format {
                TableFormat::Json => io::to_json(&rows)?,
                TableFormat::Csv => io::to_csv(&rows)?,
            }
        }
        Command::Offspring { minor, angle, format } => {
            let m = minor_arg(minor)?;
            let o = offspring(&m, angle)?;
            match format {
                ReportFormat::Text => format!("{}\n", o.chord()),
                ReportFormat::Json => io::to_json(&OffspringReport {
                    minor: m.chord().clone(),
                    angle: angle.clone(),
                    offspring: o.chord().clone(),
                    iterates: first_hit(o.chord(), m.chord()).unwrap_or(0),
                    certificate: o.certificate(),
                })?,
            }
        }
        Command::Tune { base, chord, format } => {
            let words = TuningWords::new(minor_arg(base)?)?;
            minor_arg(chord)?;
            let tuned = tune_chord(&words, chord)?;
            let report = TuneReport::new(&words, chord, &tuned);
            match format {
                ReportFormat::Text => {
                    format!("{}\n{}", tuned.chord(), io::to_json(&report.tuned)?)
                }
                ReportFormat::Json => io::to_json(&report)?,
            }
        }
        Command::Oracle { period, bound, format } => {
            let report = enumerate_periodic_minors_with(*period, *bound, exec)?;
            match format {
                TableFormat::Json => io::to_json(&report)?,
                TableFormat::Csv => io::oracle_csv(&report)?,
            }
        }
    };
    Ok((text, false))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(&cli) {
        Ok((text, rejected)) => {
            let written = match &cli.out {
                Some(path) => std::fs::write(path, &text)
                    .map_err(|e| format!("cannot write {}: {e}", path.display())),
                None => {
                    use std::io::Write;
                    std::io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string())
                }
            };
            if let Err(msg) = written {
                eprintln!("error: {msg}");
                return ExitCode::from(1);
            }
            ExitCode::from(if rejected { 2 } else { 0 })
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Rejected(msg)) => {
            eprintln!("rejected: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Invariant(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(3)
        }
    }
}
