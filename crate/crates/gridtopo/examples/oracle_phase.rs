//! Analytic filter responses and the phase signature behind pruning.
//!
//! For a known grid the infinite-data Wiener filter can be computed in closed
//! form from the model's cross-spectral matrix — no simulation involved. This
//! example evaluates those responses on the bundled three-bus path and prints
//! the two qualitatively different behaviors:
//!
//! - an adjacent pair (1 — 2) has a frequency-dependent response whose phase
//!   moves around,
//! - a two-hop pair (1 — 3, connected only through bus 2) is real and
//!   negative at every frequency: the phase pins to half a turn across the
//!   whole band.
//!
//! The estimation pipeline prunes exactly the candidates that show the second
//! pattern in both directions.
//!
//! ```text
//! cargo run --example oracle_phase
//! ```

use std::path::Path;

use gridtopo::config::RunConfig;
use gridtopo::graph::load_case_dir;
use gridtopo::spectral::{oracle_wiener_response, FrequencyGrid};

fn main() -> gridtopo::Result<()> {
    let case = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../cases/path3");
    let g = load_case_dir(&case)?;
    let cfg = RunConfig::default();
    let grid = FrequencyGrid::uniform(cfg.omega_points)?;
    let psd = vec![cfg.psd; g.node_count()];
    let set = oracle_wiener_response(&g, &psd, cfg.ts, &grid)?;

    let adjacent = set.response(0, 1); // predict bus 1 from its neighbor 2
    let two_hop = set.response(0, 2); // predict bus 1 from two-hop bus 3
    println!("infinite-data filter responses, bus 1 predicted from 2 and from 3:");
    println!("                 adjacent (1<-2)          two-hop (1<-3)");
    println!("  omega/pi    |W|      phase/pi       |W|      phase/pi");
    for k in (0..grid.len()).step_by(8) {
        let omega = grid.points()[k];
        println!(
            "  {:8.3}  {:7.4}  {:9.4}    {:8.5}  {:9.4}",
            omega / std::f64::consts::PI,
            adjacent.magnitude(k),
            adjacent.phase(k) / std::f64::consts::PI,
            two_hop.magnitude(k),
            two_hop.phase(k) / std::f64::consts::PI,
        );
    }

    let flat = (0..grid.len()).all(|k| {
        let v = two_hop.values()[k];
        v.re < 0.0 && v.im.abs() < 1e-9 * v.re.abs()
    });
    println!(
        "\ntwo-hop response real-negative at all {} points: {flat}",
        grid.len()
    );
    println!("the adjacent response starts positive at omega = 0 and disperses;");
    println!("the two-hop response never leaves the half-turn phase line, which");
    println!("is the signature the pruning stage keys on.");
    Ok(())
}
