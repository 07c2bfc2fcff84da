//! Learn the live topology of a power grid by watching it sway.
//!
//! Small random fluctuations in load continuously excite the electromechanical
//! swing dynamics of a transmission network. The phase angle recorded at each
//! bus is therefore a correlated random process whose cross-spectra encode the
//! grid's edge structure. This crate simulates those ambient dynamics on a
//! known network, estimates a bank of multivariate FIR Wiener filters (each
//! node predicted from all others), and reads the operational edge set back
//! out of the filter coefficients: a sizable filter norm flags a candidate
//! edge, and the phase of its frequency response separates true neighbors
//! from the spurious two-hop links that Wiener filtering is known to invent.
//!
//! The crate is organized as a pipeline:
//!
//! | stage | module | what it does |
//! |-------|--------|--------------|
//! | model | [`graph`] | grid graphs: load/save cases, synthetic generators |
//! | drive | [`noise`] | per-node fluctuation models with independent RNG substreams |
//! | simulate | [`dynamics`] | second-order angle recursion, stability analysis |
//! | record | [`panel`] | time-series panels, binary + CSV persistence |
//! | estimate | [`estimation`] | sample correlations, Wiener normal equations |
//! | analyze | [`spectral`] | frequency responses, analytic model spectra |
//! | decide | [`topology`] | thresholding, phase-based pruning, error scoring |
//! | orchestrate | [`experiment`] | end-to-end runs and sample-size sweeps |
//!
//! # Worked examples
//!
//! The `examples/` directory is the front door; each one is a complete,
//! runnable experiment:
//!
//! - `gen_case` — build a synthetic grid case and store it as CSV.
//! - `simulate_panel` — drive a grid with load noise and record angles.
//! - `estimate_topology` — the full pipeline: simulate, fit Wiener filters,
//!   threshold, prune, and compare against ground truth.
//! - `oracle_phase` — analytic (infinite-data) filter responses, showing the
//!   phase signature that makes two-hop pruning possible.
//! - `sweep_error_decay` — topology error versus sample count.
//! - `ieee39_report` — the bundled 39-bus New England case end to end.
//!
//! A thin command-line front end (`gridtopo`) exposes the same stages as
//! subcommands for scripted use; see the README.

pub mod config;
pub mod dynamics;
pub mod error;
pub mod estimation;
pub mod experiment;
pub mod graph;
pub mod noise;
pub mod panel;
pub mod spectral;
pub mod topology;

pub use config::RunConfig;
pub use error::{Error, Result};
pub use graph::{GridGraph, NeighborSets};
pub use noise::NoiseModel;
pub use panel::TimeSeriesPanel;
