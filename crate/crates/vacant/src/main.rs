use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use vacant::calibrated;
use vacant::experiments::{self, all_passed, Assertion, ExperimentConfig, ExperimentError};
use vacant::graph;
use vacant::pim::RunConfig;

#[derive(Parser)]
#[command(name = "vacant", version, about = "Vacant sets of random walks on random regular graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a random regular graph as an adjacency list.
    Generate(Common),
    /// Check regularity, local tree-likeness and the spectral gap for each seed.
    CheckAssumptions {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0.2)]
        alpha1: f64,
        #[arg(long, default_value_t = 0.02)]
        alpha2: f64,
    },
    /// Largest and second-largest vacant components over an intensity grid (CSV).
    Sweep(Common),
    /// Local vacant cluster law against the tree bounds (JSON).
    CompareLocal(Common),
    /// Exact hitting rates of a tree-like point (JSON).
    Rates {
        #[command(flatten)]
        common: Common,
        /// Radius of the tree-like ball around the target.
        #[arg(long, default_value_t = calibrated::RATE_RADIUS)]
        s: usize,
    },
    /// Second-largest component fraction per seed (CSV).
    Uniqueness {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = calibrated::UNIQUENESS_KAPPA)]
        kappa: f64,
    },
    /// Branching-process quantities of the tree model (JSON).
    Tree(Common),
    /// Vertex vacancy under the walk against segments joined by bridges (JSON).
    BridgeTest(Common),
    /// Queue drift of the breadth-first exploration (JSON).
    Drift(Common),
    /// Small, proper and bad vertex counts (JSON).
    Classify(Common),
}

#[derive(Args, Clone)]
struct Common {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    /// Comma-separated intensities.
    #[arg(long, value_delimiter = ',')]
    u: Option<Vec<f64>>,
    #[arg(long)]
    seeds: Option<u64>,
    #[arg(long)]
    replicas: Option<usize>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// `key = value` settings file; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write zero in the wall-clock column.
    #[arg(long)]
    no_timing: bool,
}

impl Common {
    fn experiment(&self) -> Result<ExperimentConfig, ExperimentError> {
        let mut cfg = ExperimentConfig::default();
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path)?;
            let file: RunConfig = text.parse().map_err(|e| ExperimentError::Config(format!("{}: {e}", path.display())))?;
            cfg = cfg.apply(&file);
        }
        fn set<T>(slot: &mut T, v: Option<T>) {
            if let Some(v) = v {
                *slot = v;
            }
        }
        set(&mut cfg.n, self.n);
        set(&mut cfg.d, self.d);
        set(&mut cfg.u, self.u.clone());
        set(&mut cfg.seeds, self.seeds);
        set(&mut cfg.replicas, self.replicas);
        set(&mut cfg.delta, self.delta);
        set(&mut cfg.seed, self.seed);
        if self.gamma.is_some() {
            cfg.gamma = self.gamma;
        }
        cfg.timing = !self.no_timing;
        cfg.validated()
    }

    fn output(&self) -> Result<Box<dyn Write>, ExperimentError> {
        Ok(match &self.out {
            Some(p) => Box::new(BufWriter::new(File::create(p)?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }
}

fn write_json<T: Serialize>(common: &Common, value: &T) -> Result<(), ExperimentError> {
    let mut out = common.output()?;
    serde_json::to_writer_pretty(&mut out, value).map_err(io::Error::from)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

fn run(command: &Command) -> Result<Vec<Assertion>, ExperimentError> {
    let common = match command {
        Command::Generate(c) | Command::Sweep(c) | Command::CompareLocal(c) | Command::Tree(c) => c,
        Command::BridgeTest(c) | Command::Drift(c) | Command::Classify(c) => c,
        Command::CheckAssumptions { common, .. } | Command::Rates { common, .. } | Command::Uniqueness { common, .. } => common,
    };
    if let Some(t) = common.threads {
        // Fails only if a pool already exists, which cannot happen this early.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let cfg = common.experiment()?;
    match command {
        Command::Generate(_) => {
            let g = graph::generate_random_regular(cfg.n, cfg.d, cfg.seed)?;
            let mut out = common.output()?;
            graph::write_graph(&g, &mut out)?;
            out.flush()?;
            Ok(Vec::new())
        }
        Command::CheckAssumptions { alpha1, alpha2, .. } => {
            let (checks, assertions) = experiments::cmd_check_assumptions(&cfg, *alpha1, *alpha2)?;
            write_json(common, &checks)?;
            Ok(assertions)
        }
        Command::Sweep(_) => {
            let records = experiments::cmd_sweep(&cfg)?;
            let mut out = common.output()?;
            experiments::write_sweep_csv(&records, &mut out)?;
            out.flush()?;
            experiments::sweep_assertions(&records)
        }
        Command::CompareLocal(_) => {
            let report = experiments::cmd_compare_local(&cfg)?;
            write_json(common, &report)?;
            Ok(report.assertions)
        }
        Command::Rates { s, .. } => {
            let report = experiments::cmd_rates(&cfg, *s)?;
            write_json(common, &report)?;
            Ok(report.assertions)
        }
        Command::Uniqueness { kappa, .. } => {
            let report = experiments::cmd_uniqueness(&cfg, *kappa)?;
            let mut out = common.output()?;
            experiments::write_uniqueness_csv(&report, &mut out)?;
            out.flush()?;
            Ok(report.assertions)
        }
        Command::Tree(_) => {
            write_json(common, &experiments::cmd_tree(&cfg)?)?;
            Ok(Vec::new())
        }
        Command::BridgeTest(_) => {
            let report = experiments::cmd_bridge_test(&cfg)?;
            write_json(common, &report)?;
            Ok(report.assertions)
        }
        Command::Drift(_) => {
            let report = experiments::cmd_drift(&cfg)?;
            write_json(common, &report)?;
            Ok(report.assertions)
        }
        Command::Classify(_) => {
            let reports = (cfg.seed..cfg.seed + cfg.seeds)
                .map(|s| experiments::classify_all(&cfg, s))
                .collect::<Result<Vec<_>, _>>()?;
            write_json(common, &reports)?;
            Ok(Vec::new())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli.command) {
        Ok(assertions) => {
            for a in &assertions {
                eprintln!("{} {}: {}", if a.passed { "ok" } else { "FAILED" }, a.name, a.detail);
            }
            if all_passed(&assertions) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
