//! Run configuration shared by the CLI and the experiment drivers.
//!
//! Values resolve in three layers: built-in defaults, then a flat
//! `key = value` config file, then explicit flags — later layers win.

use std::path::Path;

use crate::error::{Error, Result};

/// Knobs for the simulate → estimate → prune pipeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    /// Sampling interval in seconds.
    pub ts: f64,
    /// Panel length (samples kept after burn-in).
    pub samples: usize,
    /// Leading samples discarded so start-up transients wash out.
    pub burn_in: usize,
    /// Base RNG seed for the noise processes.
    pub seed: u64,
    /// Per-sample white-noise variance driving every node.
    pub psd: f64,
    /// FIR half-order F: taps run over lags −F..=F.
    pub fir_order: usize,
    /// Edge-detection threshold on the pairwise tap norms.
    pub rho: f64,
    /// Phase tolerance (radians) around ±π for spurious-edge pruning.
    pub tau: f64,
    /// Number of frequency-grid points on [0, π].
    pub omega_points: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            ts: 0.01,
            samples: 500_000,
            burn_in: 10_000,
            seed: 0,
            psd: 10.0,
            fir_order: 20,
            rho: 1e-3,
            tau: 0.2 * std::f64::consts::PI,
            omega_points: 65,
        }
    }
}

impl RunConfig {
    /// Overlays values from a flat `key = value` file. Blank lines and `#`
    /// comments (whole-line or trailing) are ignored; keys may repeat, the
    /// last occurrence winning. Unknown keys are errors.
    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = match raw.split_once('#') {
                Some((before, _)) => before,
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!(
                    "{}:{}: expected `key = value`, got {:?}",
                    path.display(),
                    lineno + 1,
                    raw.trim()
                ))
            })?;
            let key = key.trim();
            let value = value.trim();
            let bad = |what: &str| {
                Error::Config(format!(
                    "{}:{}: bad value for {key}: {what}",
                    path.display(),
                    lineno + 1
                ))
            };
            match key {
                "ts" => self.ts = value.parse().map_err(|_| bad("expected a number"))?,
                "samples" => {
                    self.samples = value.parse().map_err(|_| bad("expected an integer"))?
                }
                "burn_in" => {
                    self.burn_in = value.parse().map_err(|_| bad("expected an integer"))?
                }
                "seed" => self.seed = value.parse().map_err(|_| bad("expected an integer"))?,
                "psd" => self.psd = value.parse().map_err(|_| bad("expected a number"))?,
                "fir_order" => {
                    self.fir_order = value.parse().map_err(|_| bad("expected an integer"))?
                }
                "rho" => self.rho = value.parse().map_err(|_| bad("expected a number"))?,
                "tau" => self.tau = value.parse().map_err(|_| bad("expected a number"))?,
                "omega_points" => {
                    self.omega_points = value.parse().map_err(|_| bad("expected an integer"))?
                }
                other => {
                    return Err(Error::Config(format!(
                        "{}:{}: unknown key {other:?} (known: ts, samples, burn_in, seed, psd, \
                         fir_order, rho, tau, omega_points)",
                        path.display(),
                        lineno + 1
                    )))
                }
            }
        }
        Ok(())
    }

    /// Rejects values no pipeline stage could accept.
    pub fn validate(&self) -> Result<()> {
        if !(self.ts.is_finite() && self.ts > 0.0) {
            return Err(Error::Config(format!(
                "ts must be a positive finite number, got {}",
                self.ts
            )));
        }
        if self.samples == 0 {
            return Err(Error::Config("samples must be at least 1".into()));
        }
        if !(self.psd.is_finite() && self.psd >= 0.0) {
            return Err(Error::Config(format!(
                "psd must be a nonnegative finite number, got {}",
                self.psd
            )));
        }
        if !(self.rho.is_finite() && self.rho >= 0.0) {
            return Err(Error::Config(format!(
                "rho must be a nonnegative finite number, got {}",
                self.rho
            )));
        }
        if !(self.tau.is_finite() && self.tau > 0.0) {
            return Err(Error::Config(format!(
                "tau must be a positive finite number, got {}",
                self.tau
            )));
        }
        if self.omega_points < 2 {
            return Err(Error::Config(format!(
                "omega_points must be at least 2, got {}",
                self.omega_points
            )));
        }
        if self.samples <= 8 * self.fir_order {
            return Err(Error::Config(format!(
                "samples ({}) too short for fir_order {}: correlation lags out to {} need more \
                 than {} samples",
                self.samples,
                self.fir_order,
                2 * self.fir_order,
                8 * self.fir_order
            )));
        }
        Ok(())
    }
}
