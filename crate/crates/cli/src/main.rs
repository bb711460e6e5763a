//! Command-line front end: validate, draw, simulate, sample, and optimize
//! sequence documents.
//!
//! Exit codes: 0 success, 1 I/O or parse error, 2 validation error,
//! 3 runtime (emulation) error.

mod render;

use clap::{Parser, Subcommand, ValueEnum};
use coldatom::analysis::{g2, mis_cost, neel_score, AnalysisError, LatticeMap, OccupationStats};
use coldatom::device::{Basis, Device, Violation};
use coldatom::document::{DocumentError, SequenceDocument};
use coldatom::emulator::{run, EmulatorError, SimConfig};
use coldatom::optim::{qaoa_loop, EvalRecord, OptimError, QaoaOptions};
use coldatom::sampler::sample_sequence;
use coldatom::sequence::{Sequence, SequenceError};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Environment variable naming a JSON file with extra devices (one object
/// or an array), looked up when a document references a device by name.
const DEVICE_FILE_ENV: &str = "COLDATOM_DEVICE_FILE";

#[derive(Parser)]
#[command(name = "coldatom", version, about = "Pulse-level programs for neutral-atom arrays")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum DrawFormat {
    Text,
    Svg,
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepScore {
    Neel,
    Mis,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a document and run device and register validation.
    Validate { path: PathBuf },
    /// Render the per-channel timeline.
    Draw {
        path: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: DrawFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emulate the sequence and export the recorded states as JSON.
    Simulate {
        path: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        sampling_rate: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emulate and sample measurement outcomes; counts print as a sorted
    /// JSON map.
    Sample {
        path: PathBuf,
        #[arg(short)]
        n: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        basis: Option<Basis>,
        #[arg(long, default_value_t = 1.0)]
        sampling_rate: f64,
    },
    /// Export the flattened per-qubit drive samples as CSV.
    Drives {
        path: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emulate and report lattice correlations: g² CSV plus the staggered
    /// score on stdout.
    Analyze {
        path: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        sampling_rate: f64,
        /// Lattice spacing in µm; defaults to the smallest atom distance.
        #[arg(long)]
        spacing: Option<f64>,
        #[arg(long)]
        basis: Option<Basis>,
        #[arg(long)]
        g2_out: Option<PathBuf>,
    },
    /// Closed-loop QAOA on a parametrized document; emits the evaluation
    /// trace as CSV and the final counts as JSON.
    Optimize {
        path: PathBuf,
        #[arg(long, default_value_t = 2)]
        layers: usize,
        #[arg(long, default_value_t = 100)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 500)]
        samples_per_eval: u64,
        #[arg(long, default_value_t = 10_000)]
        final_samples: u64,
        #[arg(long, default_value_t = 2.0)]
        penalty: f64,
        /// Rabi frequency defining the unit-disk graph radius.
        #[arg(long, default_value_t = 1.0)]
        graph_omega: f64,
        #[arg(long, default_value_t = 1.0)]
        sampling_rate: f64,
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Evaluate a one-variable parametrized document over a grid of
    /// values; emits an (index, value, score) CSV trace.
    Sweep {
        path: PathBuf,
        #[arg(long)]
        var: String,
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
        #[arg(long, value_enum, default_value = "neel")]
        score: SweepScore,
        #[arg(long, default_value_t = 0.02)]
        sampling_rate: f64,
        #[arg(long)]
        spacing: Option<f64>,
        #[arg(long)]
        basis: Option<Basis>,
        #[arg(long, default_value_t = 1.0)]
        graph_omega: f64,
        #[arg(long, default_value_t = 2.0)]
        penalty: f64,
        #[arg(long, default_value_t = 1000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum CliError {
    Io(String),
    Parse(String),
    Validation { message: String, violations: Vec<Violation> },
    Runtime(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Io(_) | CliError::Parse(_) => 1,
            CliError::Validation { .. } => 2,
            CliError::Runtime(_) => 3,
        }
    }

    fn validation(message: impl Into<String>) -> CliError {
        CliError::Validation { message: message.into(), violations: Vec::new() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<DocumentError> for CliError {
    fn from(e: DocumentError) -> Self {
        match e {
            DocumentError::Json(_) | DocumentError::UnsupportedSchemaVersion(_) => {
                CliError::Parse(e.to_string())
            }
            DocumentError::UnknownDevice(_) => CliError::validation(e.to_string()),
            DocumentError::Sequence(seq) => seq.into(),
        }
    }
}

impl From<SequenceError> for CliError {
    fn from(e: SequenceError) -> Self {
        let violations = match &e {
            SequenceError::RegisterInvalid(v) | SequenceError::PulseViolations(v) => v.clone(),
            _ => Vec::new(),
        };
        CliError::Validation { message: e.to_string(), violations }
    }
}

impl From<EmulatorError> for CliError {
    fn from(e: EmulatorError) -> Self {
        match e {
            // a document that cannot even be flattened is a validation
            // problem, not an emulation one
            EmulatorError::Sampler(coldatom::sampler::SamplerError::Sequence(seq)) => seq.into(),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<OptimError> for CliError {
    fn from(e: OptimError) -> Self {
        match e {
            OptimError::NotParametrized | OptimError::WrongVariables(_) => {
                CliError::validation(e.to_string())
            }
            OptimError::Sequence(seq) => seq.into(),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                CliError::Validation { message, violations } => {
                    let payload = serde_json::json!({
                        "error": message,
                        "violations": violations,
                    });
                    eprintln!("{payload}");
                }
                CliError::Io(m) | CliError::Parse(m) | CliError::Runtime(m) => {
                    eprintln!("error: {m}");
                }
            }
            ExitCode::from(e.code())
        }
    }
}

fn load_document(path: &Path) -> Result<SequenceDocument, CliError> {
    let text = std::fs::read_to_string(path)?;
    Ok(SequenceDocument::parse(&text)?)
}

/// Resolve named devices through the optional device file.
fn device_lookup(name: &str) -> Option<Device> {
    let path = std::env::var_os(DEVICE_FILE_ENV)?;
    let text = std::fs::read_to_string(path).ok()?;
    if let Ok(device) = serde_json::from_str::<Device>(&text) {
        return (device.name == name).then_some(device);
    }
    let list: Vec<Device> = serde_json::from_str(&text).ok()?;
    list.into_iter().find(|d| d.name == name)
}

fn rebuild(path: &Path) -> Result<Sequence, CliError> {
    Ok(load_document(path)?.to_sequence(device_lookup)?)
}

fn write_out(out: Option<&Path>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, content)?,
        None => print!("{content}"),
    }
    Ok(())
}

fn min_pair_distance(seq: &Sequence) -> f64 {
    let reg = seq.register();
    let mut best = f64::INFINITY;
    for i in 0..reg.len() {
        for j in i + 1..reg.len() {
            best = best.min(reg.distance(i, j));
        }
    }
    best
}

fn analysis_basis(seq: &Sequence, requested: Option<Basis>) -> Basis {
    requested.or(seq.measurement_basis()).unwrap_or(Basis::GroundRydberg)
}

fn trace_csv(trace: &[EvalRecord], layers: usize) -> String {
    let mut csv = String::from("eval");
    for i in 0..layers {
        write!(csv, ",t{i}").unwrap();
    }
    for i in 0..layers {
        write!(csv, ",s{i}").unwrap();
    }
    csv.push_str(",objective\n");
    for record in trace {
        write!(csv, "{}", record.index).unwrap();
        for p in &record.point {
            write!(csv, ",{p}").unwrap();
        }
        writeln!(csv, ",{}", record.value).unwrap();
    }
    csv
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Validate { path } => {
            let seq = rebuild(&path)?;
            println!(
                "ok: {} atoms, {} channels, {}",
                seq.register().len(),
                seq.declared_channels().count(),
                if seq.is_parametrized() {
                    "parametrized".to_string()
                } else {
                    format!("{} ns", seq.total_duration().expect("concrete"))
                }
            );
            Ok(())
        }
        Command::Draw { path, format, out } => {
            let seq = rebuild(&path)?;
            let data = seq.draw_data().map_err(CliError::from)?;
            let rendered = match format {
                DrawFormat::Text => render::render_text(&data),
                DrawFormat::Svg => render::render_svg(&data),
            };
            write_out(out.as_deref(), &rendered)
        }
        Command::Simulate { path, sampling_rate, out } => {
            let seq = rebuild(&path)?;
            let results = run(&seq, &SimConfig::with_sampling_rate(sampling_rate))?;
            let json = serde_json::to_string_pretty(&results.export_json())
                .expect("results always serialize");
            write_out(out.as_deref(), &json)
        }
        Command::Sample { path, n, seed, basis, sampling_rate } => {
            let seq = rebuild(&path)?;
            let results = run(&seq, &SimConfig::with_sampling_rate(sampling_rate))?;
            let counts = results.sample_final_state(n, basis, Some(seed))?;
            println!("{}", serde_json::to_string_pretty(&counts).expect("counts serialize"));
            Ok(())
        }
        Command::Drives { path, out } => {
            let seq = rebuild(&path)?;
            let samples = sample_sequence(&seq).map_err(|e| CliError::Runtime(e.to_string()))?;
            let mut csv = Vec::new();
            samples.write_csv(&mut csv)?;
            write_out(out.as_deref(), &String::from_utf8(csv).expect("csv is utf-8"))
        }
        Command::Analyze { path, sampling_rate, spacing, basis, g2_out } => {
            let seq = rebuild(&path)?;
            let basis = analysis_basis(&seq, basis);
            let spacing = spacing.unwrap_or_else(|| min_pair_distance(&seq));
            let lattice = LatticeMap::from_register(seq.register(), spacing)?;
            let results = run(&seq, &SimConfig::with_sampling_rate(sampling_rate))?;
            let probs = results.bitstring_probabilities(basis);
            let stats = OccupationStats::from_probabilities(&probs)?;
            let mut csv = String::from("k,l,g2\n");
            for (k, l) in lattice.realized_displacements() {
                writeln!(csv, "{k},{l},{}", g2(&stats, &lattice, k, l)?).unwrap();
            }
            write_out(g2_out.as_deref(), &csv)?;
            println!("neel_score {}", neel_score(&stats, &lattice)?);
            Ok(())
        }
        Command::Optimize {
            path,
            layers,
            budget,
            seed,
            samples_per_eval,
            final_samples,
            penalty,
            graph_omega,
            sampling_rate,
            trace,
        } => {
            let seq = rebuild(&path)?;
            let radius = seq
                .device()
                .rydberg_blockade_radius(graph_omega)
                .map_err(|e| CliError::validation(e.to_string()))?;
            let edges = seq
                .register()
                .blockade_graph(radius)
                .map_err(|e| CliError::validation(e.to_string()))?;
            let options = QaoaOptions {
                samples_per_eval,
                final_samples,
                seed,
                budget,
                penalty,
                sampling_rate,
                ..QaoaOptions::new(layers)
            };
            let outcome = qaoa_loop(&seq, &edges, &options)?;
            write_out(trace.as_deref(), &trace_csv(&outcome.trace, layers))?;
            println!(
                "best_params_us {}",
                outcome
                    .best_params
                    .iter()
                    .map(f64::to_string)
                    .collect::<Vec<_>>()
                    .join(",")
            );
            println!("best_cost {}", outcome.best_cost);
            println!(
                "{}",
                serde_json::to_string_pretty(&outcome.counts).expect("counts serialize")
            );
            Ok(())
        }
        Command::Sweep {
            path,
            var,
            values,
            score,
            sampling_rate,
            spacing,
            basis,
            graph_omega,
            penalty,
            samples,
            seed,
            out,
        } => {
            let blueprint = rebuild(&path)?;
            if !blueprint.is_parametrized() {
                return Err(CliError::validation("sweep needs a parametrized document"));
            }
            if blueprint.variables().get(&var) != Some(&1) {
                return Err(CliError::validation(format!(
                    "sweep variable `{var}` must be declared with size 1"
                )));
            }
            if blueprint.variables().len() != 1 {
                return Err(CliError::validation(
                    "sweep documents must declare exactly one variable",
                ));
            }
            let mut csv = String::from("index,value,score\n");
            for (index, &value) in values.iter().enumerate() {
                let built = blueprint.build(&[(var.as_str(), vec![value])])?;
                let results = run(&built, &SimConfig::with_sampling_rate(sampling_rate))?;
                let basis = analysis_basis(&built, basis);
                let point = match score {
                    SweepScore::Neel => {
                        let spacing = spacing.unwrap_or_else(|| min_pair_distance(&built));
                        let lattice = LatticeMap::from_register(built.register(), spacing)?;
                        let probs = results.bitstring_probabilities(basis);
                        neel_score(&OccupationStats::from_probabilities(&probs)?, &lattice)?
                    }
                    SweepScore::Mis => {
                        let radius = built
                            .device()
                            .rydberg_blockade_radius(graph_omega)
                            .map_err(|e| CliError::validation(e.to_string()))?;
                        let edges = built
                            .register()
                            .blockade_graph(radius)
                            .map_err(|e| CliError::validation(e.to_string()))?;
                        let counts = results.sample_final_state(
                            samples,
                            Some(basis),
                            Some(seed.wrapping_add(index as u64)),
                        )?;
                        mis_cost(&counts, &edges, penalty)?
                    }
                };
                writeln!(csv, "{index},{value},{point}").unwrap();
            }
            write_out(out.as_deref(), &csv)
        }
    }
}
