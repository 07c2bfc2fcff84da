//! End-to-end experiment drivers: simulate a case, run the full
//! estimate → threshold → prune pipeline, and sweep the panel length to
//! watch recovery error decay.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use crate::config::RunConfig;
use crate::dynamics::simulate;
use crate::error::{Error, Result};
use crate::estimation::{estimate_bank, FirWienerBank};
use crate::graph::GridGraph;
use crate::noise::NoiseModel;
use crate::panel::TimeSeriesPanel;
use crate::spectral::{fir_frequency_response, FrequencyGrid};
use crate::topology::{detect_edges, prune, score, ErrorReport, TopologyEstimate};

/// Simulates a case under white driving noise with the configured sampling
/// interval, panel length, burn-in, seed, and noise power.
pub fn simulate_case(g: &GridGraph, cfg: &RunConfig) -> Result<TimeSeriesPanel> {
    cfg.validate()?;
    let noise = NoiseModel::white(cfg.psd, cfg.seed)?;
    simulate(g, &noise, cfg.ts, cfg.samples, cfg.burn_in)
}

/// Everything the estimation half of the pipeline produces for one panel.
#[derive(Debug)]
pub struct PipelineOutcome {
    pub bank: FirWienerBank,
    pub estimate: TopologyEstimate,
    /// Present iff a truth graph was supplied.
    pub report: Option<ErrorReport>,
}

/// Runs filter estimation, norm thresholding, and (optionally) phase pruning
/// on a panel; scores against `truth` when given.
pub fn run_pipeline(
    panel: &TimeSeriesPanel,
    cfg: &RunConfig,
    prune_enabled: bool,
    truth: Option<&GridGraph>,
) -> Result<PipelineOutcome> {
    cfg.validate()?;
    let bank = estimate_bank(panel, cfg.fir_order)?;
    let candidates = detect_edges(&bank, cfg.rho);
    let estimate = if prune_enabled {
        let grid = FrequencyGrid::uniform(cfg.omega_points)?;
        let responses = fir_frequency_response(&bank, &grid);
        prune(&candidates, &responses, cfg.tau)?
    } else {
        TopologyEstimate::without_pruning(&candidates)
    };
    let report = truth.map(|t| score(t, &estimate)).transpose()?;
    Ok(PipelineOutcome {
        bank,
        estimate,
        report,
    })
}

/// One sweep entry: a full simulate+estimate cycle at a fixed panel length.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub samples: usize,
    /// Seed this row actually used (base seed + row index).
    pub seed: u64,
    /// Wall-clock duration of the row; kept in memory only, never in the CSV,
    /// so output files stay byte-reproducible.
    pub wall_time_s: f64,
    /// Scored recovery, or the failure message if this row could not run.
    pub outcome: std::result::Result<ErrorReport, String>,
}

/// Rows of a panel-length sweep, ascending in sample count.
#[derive(Debug, Clone)]
pub struct SweepResult {
    rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn rows(&self) -> &[SweepRow] {
        &self.rows
    }

    /// Writes `samples,relative_error,fp,fn,seed` rows for the successful
    /// entries. Failed rows carry no numbers and are omitted here; callers
    /// report them through [`SweepRow::outcome`].
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        let io = |e| Error::io(path, e);
        writeln!(w, "samples,relative_error,fp,fn,seed").map_err(io)?;
        for row in &self.rows {
            if let Ok(report) = &row.outcome {
                writeln!(
                    w,
                    "{},{},{},{},{}",
                    row.samples,
                    report.relative_error,
                    report.false_positives,
                    report.false_negatives,
                    row.seed
                )
                .map_err(io)?;
            }
        }
        w.flush().map_err(io)
    }
}

/// Runs one independent simulate → estimate → prune → score cycle per sample
/// count. Each row draws fresh noise with seed = base seed + row index, so
/// rows are statistically independent experiments rather than prefixes of one
/// run. A failing row records its error message and the sweep continues.
pub fn sweep(g: &GridGraph, cfg: &RunConfig, sample_list: &[usize]) -> Result<SweepResult> {
    if sample_list.is_empty() {
        return Err(Error::Validation("sample list must not be empty".into()));
    }
    if sample_list[0] == 0 {
        return Err(Error::Validation("sample counts must be positive".into()));
    }
    for pair in sample_list.windows(2) {
        if pair[1] <= pair[0] {
            return Err(Error::Validation(format!(
                "sample list must be strictly ascending, got {} after {}",
                pair[1], pair[0]
            )));
        }
    }
    // The configured panel length is superseded row by row, so validate the
    // shared fields against the largest requested count; a row too short for
    // the filter order fails in place rather than aborting the sweep.
    RunConfig {
        samples: *sample_list.last().expect("list checked non-empty"),
        ..*cfg
    }
    .validate()?;
    let mut rows = Vec::with_capacity(sample_list.len());
    for (index, &samples) in sample_list.iter().enumerate() {
        let row_cfg = RunConfig {
            samples,
            seed: cfg.seed + index as u64,
            ..*cfg
        };
        let started = Instant::now();
        let run = simulate_case(g, &row_cfg)
            .and_then(|panel| run_pipeline(&panel, &row_cfg, true, Some(g)));
        let wall_time_s = started.elapsed().as_secs_f64();
        let outcome = match run {
            Ok(outcome) => Ok(outcome
                .report
                .expect("truth graph was passed, so a report is always present")),
            Err(e) => Err(e.to_string()),
        };
        rows.push(SweepRow {
            samples,
            seed: row_cfg.seed,
            wall_time_s,
            outcome,
        });
    }
    Ok(SweepResult { rows })
}
