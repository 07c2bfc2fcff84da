//! Topology error versus record length.
//!
//! Repeats the full simulate → estimate → prune → score cycle on the bundled
//! five-bus book case at increasing panel lengths. Short records leave the
//! estimated phases too noisy for the pruning test, so spurious two-hop edges
//! survive and the relative edge error sits well above zero; once the record
//! is long enough the error drops to exactly zero — the operational edge set
//! is recovered, not approximated.
//!
//! Each row is an independent experiment (fresh seed), not a prefix of one
//! long record, so the trend reflects estimator quality rather than shared
//! noise.
//!
//! ```text
//! cargo run --example sweep_error_decay
//! ```

use std::path::Path;

use gridtopo::config::RunConfig;
use gridtopo::experiment::sweep;
use gridtopo::graph::load_case_dir;

fn main() -> gridtopo::Result<()> {
    let case = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../cases/loopy5");
    let g = load_case_dir(&case)?;
    let cfg = RunConfig {
        seed: 1,
        ..RunConfig::default()
    };
    let sample_list = [10_000, 50_000, 200_000, 500_000];

    println!(
        "sweeping record length on the {}-node book case ({} true edges):",
        g.node_count(),
        g.edges().len()
    );
    let result = sweep(&g, &cfg, &sample_list)?;
    println!("   samples   rel. error   false+   false-   wall time");
    for row in result.rows() {
        match &row.outcome {
            Ok(report) => println!(
                "  {:>8}   {:10.4}   {:>6}   {:>6}   {:7.2} s",
                row.samples,
                report.relative_error,
                report.false_positives,
                report.false_negatives,
                row.wall_time_s
            ),
            Err(message) => println!("  {:>8}   failed: {message}", row.samples),
        }
    }
    println!("\nfalse negatives are rare even on short records — true neighbors");
    println!("carry large filter norms. The tail of the curve is spurious");
    println!("two-hop candidates waiting for enough data to be pruned away.");
    Ok(())
}
