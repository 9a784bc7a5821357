use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use zkxfer::digest::DigestMode;
use zkxfer::harness::{emit_report, run_with, Registry, ReportFormat, RunConfig};
use zkxfer::transcript::write_jsonl;

const EXIT_CONFIG: u8 = 2;
const EXIT_IO: u8 = 3;

/// Monte Carlo runner for zero-knowledge proof-transfer experiments.
#[derive(Parser, Debug)]
#[command(name = "zkxfer", version)]
struct Cli {
    /// Experiment to run (see --list).
    #[arg(long, required_unless_present = "list")]
    experiment: Option<String>,

    /// List the registered experiments and exit.
    #[arg(long)]
    list: bool,

    #[arg(long, default_value_t = 8)]
    nodes: usize,

    #[arg(long, default_value_t = 8)]
    rounds: usize,

    /// Hash digest width in bits (default 8). Implied by --nodes in bijective mode.
    #[arg(long)]
    digest_width: Option<usize>,

    /// hash or bijective.
    #[arg(long, default_value = "hash")]
    digest_mode: DigestMode,

    /// Secret length for the split-secret experiments.
    #[arg(long, default_value_t = 32)]
    m: usize,

    /// Chunk count for the split-secret experiments.
    #[arg(long, default_value_t = 4)]
    k: usize,

    #[arg(long, default_value_t = 10_000)]
    trials: u64,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Report destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,

    /// json or csv (one row per metric).
    #[arg(long, default_value = "json")]
    format: ReportFormat,

    /// Write the first trial's transcript here as JSON lines.
    #[arg(long)]
    transcript: Option<PathBuf>,

    #[arg(long, default_value_t = 0.5)]
    density: f64,

    /// Digest evaluations allowed per collision search.
    #[arg(long, default_value_t = 100_000)]
    budget: usize,

    #[arg(long, default_value = "zkxfer-digest")]
    digest_key: String,

    #[arg(long, default_value = "zkxfer-f")]
    f_key: String,
}

impl Cli {
    fn config(&self, experiment: String) -> RunConfig {
        RunConfig {
            experiment,
            n_nodes: self.nodes,
            n_rounds: self.rounds,
            digest_width: self.digest_width,
            digest_mode: self.digest_mode,
            m: self.m,
            k: self.k,
            trials: self.trials,
            seed: self.seed,
            output_path: self.out.clone(),
            edge_density: self.density,
            collision_budget: self.budget,
            digest_key: self.digest_key.clone(),
            f_key: self.f_key.clone(),
        }
    }
}

fn write_out(path: Option<&PathBuf>, f: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> io::Result<()> {
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p)?);
            f(&mut w)?;
            w.flush()
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            f(&mut lock)?;
            lock.flush()
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let registry = Registry::with_builtin();

    if cli.list {
        for (name, desc) in registry.list() {
            println!("{name:<22} {desc}");
        }
        return ExitCode::SUCCESS;
    }

    let cfg = cli.config(cli.experiment.clone().unwrap_or_default());
    let mut transcript = Vec::new();
    let sink = cli.transcript.is_some().then_some(&mut transcript);
    let report = match run_with(&registry, &cfg, sink) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("zkxfer: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };

    if let Err(e) = write_out(cli.out.as_ref(), |w| emit_report(&report, cli.format, w)) {
        eprintln!("zkxfer: writing report: {e}");
        return ExitCode::from(EXIT_IO);
    }
    if let Some(path) = &cli.transcript {
        if let Err(e) = write_out(Some(path), |w| write_jsonl(w, &transcript)) {
            eprintln!("zkxfer: writing transcript: {e}");
            return ExitCode::from(EXIT_IO);
        }
    }
    ExitCode::SUCCESS
}
