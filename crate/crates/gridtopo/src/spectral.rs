//! Frequency-domain views: responses of estimated FIR filters, and the
//! analytic (infinite-data) Wiener responses computed from the model itself.
//!
//! In the z-domain the swing recursion reads `L(z) Θ(z) = P(z)` with
//! `L(z) = diag(S_j(z)) − [b_ij]` and
//! `S_j(z) = (M_j/ts²)(z−1)² + (D_j/ts)(z−1) + B_j`. On the unit circle the
//! angle spectrum is `Φ_Θ = L⁻¹ Φ_P L⁻ᴴ`, and the non-causal Wiener filter of
//! node j from all others is read off the precision matrix
//! `K = Φ_Θ⁻¹ = Lᴴ Φ_P⁻¹ L` as `W_ji = −K_ji / K_jj` — a form that stays
//! finite even at ω = 0, where the angle spectrum itself diverges along the
//! network-wide reference mode and Φ_Θ cannot be formed.

use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::dynamics::{stability_check, Stability};
use crate::error::{Error, Result};
use crate::estimation::FirWienerBank;
use crate::graph::GridGraph;

/// Relative magnitude below which a grid point's phase is meaningless noise.
pub const INDETERMINATE_RELATIVE_MAGNITUDE: f64 = 1e-6;

/// Ordered evaluation frequencies in radians/sample.
///
/// The default covers [0, π]: real taps and real model coefficients make
/// responses conjugate-symmetric, so negative frequencies add nothing. Custom
/// grids may span [−π, π] where the full interval is wanted.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyGrid {
    points: Vec<f64>,
}

impl FrequencyGrid {
    /// `count` uniform points covering [0, π] endpoints included.
    pub fn uniform(count: usize) -> Result<Self> {
        if count < 2 {
            return Err(Error::Validation(format!(
                "frequency grid needs at least 2 points, got {count}"
            )));
        }
        let step = PI / (count - 1) as f64;
        Ok(FrequencyGrid {
            points: (0..count).map(|k| k as f64 * step).collect(),
        })
    }

    /// Wraps explicit points; must be strictly increasing within [−π, π].
    pub fn from_points(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Validation(
                "frequency grid needs at least 2 points".into(),
            ));
        }
        for w in &points {
            if !w.is_finite() || w.abs() > PI {
                return Err(Error::Validation(format!(
                    "frequency {w} outside [-pi, pi]"
                )));
            }
        }
        if points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Validation(
                "frequency grid must be strictly increasing".into(),
            ));
        }
        Ok(FrequencyGrid { points })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

impl Default for FrequencyGrid {
    fn default() -> Self {
        FrequencyGrid::uniform(65).unwrap()
    }
}

/// Complex response of one ordered pair (target j listening to source i) on a
/// frequency grid, with per-point phase-reliability flags.
#[derive(Debug, Clone)]
pub struct PairResponse {
    pub target: usize,
    pub source: usize,
    values: Vec<Complex64>,
    indeterminate: Vec<bool>,
    peak_magnitude: f64,
}

impl PairResponse {
    pub(crate) fn new(target: usize, source: usize, values: Vec<Complex64>) -> Self {
        let peak_magnitude = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let indeterminate = values
            .iter()
            .map(|v| {
                peak_magnitude == 0.0
                    || v.norm() < INDETERMINATE_RELATIVE_MAGNITUDE * peak_magnitude
            })
            .collect();
        PairResponse {
            target,
            source,
            values,
            indeterminate,
            peak_magnitude,
        }
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn magnitude(&self, point: usize) -> f64 {
        self.values[point].norm()
    }

    /// Principal-value phase in (−π, π]; the negative real axis reports +π.
    /// Meaningless where [`Self::is_indeterminate`] is set (arg of ≈0).
    pub fn phase(&self, point: usize) -> f64 {
        let a = self.values[point].arg();
        if a <= -PI {
            PI
        } else {
            a
        }
    }

    /// True where the magnitude is so far below the pair's peak that the
    /// phase carries no information.
    pub fn is_indeterminate(&self, point: usize) -> bool {
        self.indeterminate[point]
    }

    pub fn peak_magnitude(&self) -> f64 {
        self.peak_magnitude
    }
}

/// Responses of every ordered node pair on one grid.
#[derive(Debug, Clone)]
pub struct FrequencyResponseSet {
    grid: FrequencyGrid,
    n_nodes: usize,
    pairs: Vec<PairResponse>,
}

impl FrequencyResponseSet {
    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    /// Response of target `j` listening to source `i`.
    pub fn response(&self, target: usize, source: usize) -> &PairResponse {
        assert_ne!(target, source);
        let slot = if source < target { source } else { source - 1 };
        &self.pairs[target * (self.n_nodes - 1) + slot]
    }

    pub fn iter(&self) -> impl Iterator<Item = &PairResponse> {
        self.pairs.iter()
    }

    /// Writes `target,source,omega,re,im,magnitude,phase` rows, 1-based ids.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        let io = |e| Error::io(path, e);
        writeln!(w, "target,source,omega,re,im,magnitude,phase").map_err(io)?;
        for pair in &self.pairs {
            for (k, &omega) in self.grid.points().iter().enumerate() {
                let v = pair.values()[k];
                writeln!(
                    w,
                    "{},{},{},{},{},{},{}",
                    pair.target + 1,
                    pair.source + 1,
                    omega,
                    v.re,
                    v.im,
                    pair.magnitude(k),
                    pair.phase(k)
                )
                .map_err(io)?;
            }
        }
        w.flush().map_err(io)
    }
}

fn build_pairs(
    n_nodes: usize,
    mut value: impl FnMut(usize, usize) -> Vec<Complex64>,
) -> Vec<PairResponse> {
    let mut pairs = Vec::with_capacity(n_nodes * (n_nodes - 1));
    for target in 0..n_nodes {
        for source in (0..n_nodes).filter(|&s| s != target) {
            pairs.push(PairResponse::new(target, source, value(target, source)));
        }
    }
    pairs
}

/// Evaluates `S_j(z) = (M_j/ts²)(z−1)² + (D_j/ts)(z−1) + B_j` for node `node`.
pub fn swing_polynomial(g: &GridGraph, node: usize, ts: f64, z: Complex64) -> Complex64 {
    let dz = z - 1.0;
    let m = g.inertia(node);
    let d = g.damping(node);
    dz * dz * (m / (ts * ts)) + dz * (d / ts) + g.weighted_degree(node)
}

/// The structural matrix `L(z)`: diagonal S_j(z), off-diagonal −b_ij on edges.
pub fn model_matrix(g: &GridGraph, ts: f64, z: Complex64) -> DMatrix<Complex64> {
    let n = g.node_count();
    let mut l = DMatrix::zeros(n, n);
    for j in 0..n {
        l[(j, j)] = swing_polynomial(g, j, ts, z);
        for &(i, b) in g.neighbors(j) {
            l[(j, i)] = Complex64::new(-b, 0.0);
        }
    }
    l
}

/// Frequency responses of an estimated bank:
/// `W_ji(e^{jω}) = Σ_{p=−F..F} h_{i,p} e^{jωp}`.
pub fn fir_frequency_response(bank: &FirWienerBank, grid: &FrequencyGrid) -> FrequencyResponseSet {
    let f = bank.fir_order() as isize;
    let pairs = build_pairs(bank.n_nodes(), |target, source| {
        let taps = bank.pair_taps(target, source);
        grid.points()
            .iter()
            .map(|&omega| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (idx, &h) in taps.iter().enumerate() {
                    let p = idx as isize - f;
                    acc += h * Complex64::from_polar(1.0, omega * p as f64);
                }
                acc
            })
            .collect()
    });
    FrequencyResponseSet {
        grid: grid.clone(),
        n_nodes: bank.n_nodes(),
        pairs,
    }
}

/// Model spectra on a grid: the structural matrices L(e^{jω}), the diagonal
/// noise PSD, and the angle spectrum where it exists.
#[derive(Debug, Clone)]
pub struct ModelSpectra {
    grid: FrequencyGrid,
    noise_psd: Vec<f64>,
    l_matrices: Vec<DMatrix<Complex64>>,
}

impl ModelSpectra {
    pub fn build(g: &GridGraph, noise_psd: &[f64], ts: f64, grid: &FrequencyGrid) -> Result<Self> {
        if noise_psd.len() != g.node_count() {
            return Err(Error::DimensionMismatch {
                expected: g.node_count(),
                actual: noise_psd.len(),
            });
        }
        if noise_psd.iter().any(|&p| !(p.is_finite() && p > 0.0)) {
            return Err(Error::Validation(
                "noise PSD levels must be positive and finite".into(),
            ));
        }
        let l_matrices = grid
            .points()
            .iter()
            .map(|&omega| model_matrix(g, ts, Complex64::from_polar(1.0, omega)))
            .collect();
        Ok(ModelSpectra {
            grid: grid.clone(),
            noise_psd: noise_psd.to_vec(),
            l_matrices,
        })
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn noise_psd(&self) -> &[f64] {
        &self.noise_psd
    }

    pub fn l_matrix(&self, point: usize) -> &DMatrix<Complex64> {
        &self.l_matrices[point]
    }

    /// Precision matrix `K = Lᴴ Φ_P⁻¹ L` at one grid point; finite at every
    /// frequency, including ω = 0.
    pub fn precision(&self, point: usize) -> DMatrix<Complex64> {
        let l = &self.l_matrices[point];
        let mut scaled = l.clone();
        for (k, &phi) in self.noise_psd.iter().enumerate() {
            for c in 0..scaled.ncols() {
                scaled[(k, c)] /= phi;
            }
        }
        l.adjoint() * scaled
    }

    /// Angle PSD matrix `Φ_Θ = L⁻¹ Φ_P L⁻ᴴ` at one grid point.
    ///
    /// Fails with a singular-spectrum error where L(e^{jω}) is not invertible;
    /// for every connected network that includes ω = 0, where the shared
    /// reference mode makes the spectrum diverge.
    pub fn phi_theta(&self, point: usize) -> Result<DMatrix<Complex64>> {
        let omega = self.grid.points()[point];
        let l = &self.l_matrices[point];
        let inv = l
            .clone()
            .try_inverse()
            .ok_or(Error::SingularSpectrum { omega })?;
        // Guard against a numerically garbage inverse of a near-singular L.
        let residual = (l * &inv - DMatrix::<Complex64>::identity(l.nrows(), l.ncols()))
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max);
        if !(residual.is_finite() && residual < 1e-6) {
            return Err(Error::SingularSpectrum { omega });
        }
        let mut scaled = inv.clone();
        for (k, &phi) in self.noise_psd.iter().enumerate() {
            for r in 0..scaled.nrows() {
                scaled[(r, k)] *= phi;
            }
        }
        Ok(scaled * inv.adjoint())
    }
}

/// Exact non-causal Wiener responses for every ordered pair, computed from the
/// model rather than from data: `W_ji = −K_ji / K_jj` with `K = Lᴴ Φ_P⁻¹ L`.
///
/// This is the infinite-data ground truth the statistical estimates are judged
/// against. Requires a stable model and positive per-node noise PSD levels.
pub fn oracle_wiener_response(
    g: &GridGraph,
    noise_psd: &[f64],
    ts: f64,
    grid: &FrequencyGrid,
) -> Result<FrequencyResponseSet> {
    if let Stability::Unstable { spectral_radius } = stability_check(g, ts) {
        return Err(Error::Unstable { spectral_radius });
    }
    let spectra = ModelSpectra::build(g, noise_psd, ts, grid)?;
    let n = g.node_count();
    let precisions: Vec<DMatrix<Complex64>> =
        (0..grid.len()).map(|k| spectra.precision(k)).collect();
    for (k, precision) in precisions.iter().enumerate() {
        for j in 0..n {
            if precision[(j, j)].norm() == 0.0 {
                return Err(Error::SingularSpectrum {
                    omega: grid.points()[k],
                });
            }
        }
    }
    let pairs = build_pairs(n, |target, source| {
        precisions
            .iter()
            .map(|k| -k[(target, source)] / k[(target, target)])
            .collect()
    });
    Ok(FrequencyResponseSet {
        grid: grid.clone(),
        n_nodes: n,
        pairs,
    })
}
