//! Ambient load-fluctuation models driving the swing dynamics.
//!
//! Every node draws from its own counter-based RNG substream of one shared
//! 64-bit seed, so disturbance streams at distinct nodes are independent and
//! a simulation is reproducible regardless of how nodes are scheduled.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseKind {
    WhiteGaussian,
    /// First-order autoregressive Gaussian with the given coefficient.
    Ar1Gaussian {
        coefficient: f64,
    },
}

/// Zero-mean wide-sense-stationary disturbance model, identical at every node
/// up to the node's independent randomness.
///
/// `psd_level` is the stationary variance of each stream (a flat power level
/// on a linear scale). For the AR(1) kind the innovations are scaled so the
/// stationary variance still equals `psd_level`, giving autocorrelation
/// `psd_level * a^|l|` at lag l.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    kind: NoiseKind,
    psd_level: f64,
    seed: u64,
}

impl NoiseModel {
    pub fn white(psd_level: f64, seed: u64) -> Result<Self> {
        if !(psd_level.is_finite() && psd_level >= 0.0) {
            return Err(Error::Validation(format!(
                "noise psd_level must be finite and non-negative, got {psd_level}"
            )));
        }
        Ok(NoiseModel {
            kind: NoiseKind::WhiteGaussian,
            psd_level,
            seed,
        })
    }

    pub fn ar1(psd_level: f64, coefficient: f64, seed: u64) -> Result<Self> {
        if !(psd_level.is_finite() && psd_level >= 0.0) {
            return Err(Error::Validation(format!(
                "noise psd_level must be finite and non-negative, got {psd_level}"
            )));
        }
        if !(coefficient.is_finite() && coefficient.abs() < 1.0) {
            return Err(Error::Validation(format!(
                "AR(1) coefficient must lie in (-1, 1), got {coefficient}"
            )));
        }
        Ok(NoiseModel {
            kind: NoiseKind::Ar1Gaussian { coefficient },
            psd_level,
            seed,
        })
    }

    pub fn kind(&self) -> NoiseKind {
        self.kind
    }

    pub fn psd_level(&self) -> f64 {
        self.psd_level
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Opens node `node`'s disturbance stream at its first sample.
    ///
    /// Streams for distinct nodes are statistically independent; reopening a
    /// stream replays it exactly.
    pub fn stream(&self, node: usize) -> NoiseStream {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(node as u64);
        let sigma = self.psd_level.sqrt();
        let state = match self.kind {
            NoiseKind::WhiteGaussian => Ar1State::None,
            NoiseKind::Ar1Gaussian { coefficient } => {
                // Start from an exact stationary draw so the stream is WSS
                // from its first sample, not merely asymptotically.
                let z: f64 = rng.sample(StandardNormal);
                Ar1State::Pending {
                    coefficient,
                    innovation_sigma: sigma * (1.0 - coefficient * coefficient).sqrt(),
                    value: sigma * z,
                }
            }
        };
        NoiseStream { rng, sigma, state }
    }

    /// Draws the first `count` samples of node `node`'s stream.
    pub fn draw_noise(&self, node: usize, count: usize) -> Vec<f64> {
        let mut stream = self.stream(node);
        (0..count).map(|_| stream.draw()).collect()
    }
}

#[derive(Debug, Clone, Copy)]
enum Ar1State {
    None,
    Pending {
        coefficient: f64,
        innovation_sigma: f64,
        value: f64,
    },
}

/// One node's disturbance sequence, drawn one sample at a time.
#[derive(Debug, Clone)]
pub struct NoiseStream {
    rng: ChaCha8Rng,
    sigma: f64,
    state: Ar1State,
}

impl NoiseStream {
    pub fn draw(&mut self) -> f64 {
        match &mut self.state {
            Ar1State::None => {
                let z: f64 = self.rng.sample(StandardNormal);
                self.sigma * z
            }
            Ar1State::Pending {
                coefficient,
                innovation_sigma,
                value,
            } => {
                let out = *value;
                let z: f64 = self.rng.sample(StandardNormal);
                *value = *coefficient * out + *innovation_sigma * z;
                out
            }
        }
    }
}
