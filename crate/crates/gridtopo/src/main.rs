//! Command-line front end: each subcommand wraps one pipeline stage from the
//! library, sharing the same flat config file and flag set.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use gridtopo::config::RunConfig;
use gridtopo::error::{Error, Result};
use gridtopo::experiment::{run_pipeline, simulate_case, sweep};
use gridtopo::graph::{generate_graph, load_case_dir, save_case, GraphKind, GridGraph};
use gridtopo::panel::TimeSeriesPanel;
use gridtopo::spectral::{oracle_wiener_response, FrequencyGrid};
use gridtopo::topology::{read_edges_csv, score_edges};

#[derive(Parser)]
#[command(
    name = "gridtopo",
    version,
    about = "Recover a power grid's operational topology from ambient angle measurements"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags mirroring the run-configuration fields. Precedence: defaults, then
/// the `--config` file, then these flags.
#[derive(Args, Debug)]
struct ConfigArgs {
    /// Flat `key = value` config file applied before any flags.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Sampling interval in seconds.
    #[arg(long)]
    ts: Option<f64>,
    /// Panel length in samples (per-row counts in `sweep` come from --sample-list).
    #[arg(long)]
    samples: Option<usize>,
    /// Leading samples to discard.
    #[arg(long)]
    burn_in: Option<usize>,
    /// Base RNG seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Per-sample driving-noise variance.
    #[arg(long)]
    psd: Option<f64>,
    /// FIR half-order F (taps span lags -F..=F).
    #[arg(long)]
    fir_order: Option<usize>,
    /// Edge-detection threshold on pairwise tap norms.
    #[arg(long)]
    rho: Option<f64>,
    /// Phase tolerance around ±π for pruning, in radians.
    #[arg(long)]
    tau: Option<f64>,
    /// Frequency-grid size on [0, π].
    #[arg(long)]
    omega_points: Option<usize>,
}

impl ConfigArgs {
    fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &self.config {
            cfg.apply_file(path)?;
        }
        if let Some(v) = self.ts {
            cfg.ts = v;
        }
        if let Some(v) = self.samples {
            cfg.samples = v;
        }
        if let Some(v) = self.burn_in {
            cfg.burn_in = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.psd {
            cfg.psd = v;
        }
        if let Some(v) = self.fir_order {
            cfg.fir_order = v;
        }
        if let Some(v) = self.rho {
            cfg.rho = v;
        }
        if let Some(v) = self.tau {
            cfg.tau = v;
        }
        if let Some(v) = self.omega_points {
            cfg.omega_points = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic case directory (edges.csv + nodes.csv).
    GenCase {
        /// Topology family: path, cycle, star, or random_loopy.
        #[arg(long)]
        kind: GraphKind,
        /// Number of nodes.
        #[arg(long)]
        n: usize,
        /// Seed for parameter (and, for random_loopy, shape) sampling.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Line susceptance range LO:HI (or a single value).
        #[arg(long, value_parser = parse_range, default_value = "0.5:2")]
        b_range: (f64, f64),
        /// Node inertia range LO:HI (or a single value).
        #[arg(long, value_parser = parse_range, default_value = "0.5:2")]
        m_range: (f64, f64),
        /// Node damping range LO:HI (or a single value).
        #[arg(long, value_parser = parse_range, default_value = "0.5:2")]
        d_range: (f64, f64),
        /// Directory to create the case in.
        #[arg(long)]
        out: PathBuf,
    },
    /// Simulate ambient angle dynamics for a case and record the panel.
    Simulate {
        /// Case directory holding edges.csv and nodes.csv.
        #[arg(long)]
        case: PathBuf,
        /// Output panel file (binary).
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Estimate the topology from a recorded panel.
    Estimate {
        /// Input panel file (binary).
        #[arg(long)]
        panel: PathBuf,
        /// Case directory with the true topology; adds a scored report line.
        #[arg(long)]
        truth: Option<PathBuf>,
        /// Output edges CSV.
        #[arg(long)]
        out: PathBuf,
        /// Also write the full filter bank as CSV.
        #[arg(long)]
        bank_out: Option<PathBuf>,
        /// Keep every thresholded candidate; skip phase-based pruning.
        #[arg(long)]
        no_prune: bool,
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Evaluate the analytic (infinite-data) filter responses for a case.
    Oracle {
        /// Case directory holding edges.csv and nodes.csv.
        #[arg(long)]
        case: PathBuf,
        /// Output response CSV.
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Score a recovered edge set against a case's true topology.
    Evaluate {
        /// Edges CSV produced by `estimate`.
        #[arg(long)]
        edges: PathBuf,
        /// Case directory with the true topology.
        #[arg(long)]
        truth: PathBuf,
    },
    /// Run the full pipeline at several panel lengths and tabulate the error.
    Sweep {
        /// Case directory holding edges.csv and nodes.csv.
        #[arg(long)]
        case: PathBuf,
        /// Comma-separated ascending panel lengths, e.g. 10000,100000,500000.
        #[arg(long, value_name = "N1,N2,...")]
        sample_list: String,
        /// Output sweep CSV.
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        cfg: ConfigArgs,
    },
}

fn parse_range(s: &str) -> std::result::Result<(f64, f64), String> {
    let parse = |t: &str| -> std::result::Result<f64, String> {
        t.trim()
            .parse::<f64>()
            .map_err(|e| format!("bad number {t:?}: {e}"))
    };
    match s.split_once(':') {
        Some((lo, hi)) => Ok((parse(lo)?, parse(hi)?)),
        None => {
            let v = parse(s)?;
            Ok((v, v))
        }
    }
}

fn load_truth(dir: &Path) -> Result<GridGraph> {
    load_case_dir(dir)
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::GenCase {
            kind,
            n,
            seed,
            b_range,
            m_range,
            d_range,
            out,
        } => {
            let g = generate_graph(kind, n, seed, b_range, m_range, d_range)?;
            save_case(&g, &out)?;
            println!(
                "nodes={} edges={} dir={}",
                g.node_count(),
                g.edges().len(),
                out.display()
            );
            Ok(())
        }
        Command::Simulate { case, out, cfg } => {
            let cfg = cfg.resolve()?;
            let g = load_case_dir(&case)?;
            let panel = simulate_case(&g, &cfg)?;
            panel.write_binary(&out)?;
            println!(
                "nodes={} samples={} ts={} seed={}",
                panel.n_nodes(),
                panel.n_samples(),
                panel.ts(),
                cfg.seed
            );
            Ok(())
        }
        Command::Estimate {
            panel,
            truth,
            out,
            bank_out,
            no_prune,
            cfg,
        } => {
            let cfg = cfg.resolve()?;
            let panel = TimeSeriesPanel::read_binary(&panel)?;
            let truth = truth.map(|dir| load_truth(&dir)).transpose()?;
            let outcome = run_pipeline(&panel, &cfg, !no_prune, truth.as_ref())?;
            outcome.estimate.write_csv(&out)?;
            if let Some(path) = bank_out {
                outcome.bank.write_csv(&path)?;
            }
            if let Some(report) = outcome.report {
                println!("{}", report.report_line());
            }
            Ok(())
        }
        Command::Oracle { case, out, cfg } => {
            let cfg = cfg.resolve()?;
            let g = load_case_dir(&case)?;
            let grid = FrequencyGrid::uniform(cfg.omega_points)?;
            let psd = vec![cfg.psd; g.node_count()];
            let responses = oracle_wiener_response(&g, &psd, cfg.ts, &grid)?;
            responses.write_csv(&out)?;
            println!(
                "nodes={} pairs={} omega_points={}",
                g.node_count(),
                g.node_count() * (g.node_count() - 1),
                grid.len()
            );
            Ok(())
        }
        Command::Evaluate { edges, truth } => {
            let rows = read_edges_csv(&edges)?;
            let g = load_truth(&truth)?;
            let n = g.node_count();
            let mut recovered = std::collections::BTreeSet::new();
            for row in &rows {
                if row.from >= n || row.to >= n {
                    return Err(Error::NodeSetMismatch {
                        expected: n,
                        actual: row.from.max(row.to) + 1,
                    });
                }
                if !row.pruned {
                    let (a, b) = (row.from.min(row.to), row.from.max(row.to));
                    recovered.insert((a, b));
                }
            }
            let report = score_edges(&g, n, &recovered)?;
            println!("{}", report.report_line());
            Ok(())
        }
        Command::Sweep {
            case,
            sample_list,
            out,
            cfg,
        } => {
            let cfg = cfg.resolve()?;
            let g = load_case_dir(&case)?;
            let samples: Vec<usize> = sample_list
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<usize>()
                        .map_err(|e| Error::Validation(format!("bad sample count {t:?}: {e}")))
                })
                .collect::<Result<_>>()?;
            let result = sweep(&g, &cfg, &samples)?;
            for row in result.rows() {
                match &row.outcome {
                    Ok(report) => println!("samples={} {}", row.samples, report.report_line()),
                    Err(message) => eprintln!("samples={} failed: {message}", row.samples),
                }
            }
            result.write_csv(&out)?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error[{}]: {err}", err.category());
            ExitCode::FAILURE
        }
    }
}
