//! Scans the (e, λ) plane for equal bodies and writes the diagram as CSV.
//!
//! Usage: `cargo run --release --example stability_diagram -- [n_e] [n_lambda] [qhat] [out.csv]`

use std::time::Instant;

use spinlock::analysis::{scan_diagram, DiagramRequest, Geometry, NumericStatus};
use spinlock::solver::IntegratorConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n_e = args.first().map_or(Ok(46), |s| s.parse())?;
    let n_l = args.get(1).map_or(Ok(50), |s| s.parse())?;
    let qhat = args.get(2).map_or(Ok(0.0), |s| s.parse())?;
    let req = DiagramRequest::uniform(n_e, 0.9, n_l, 0.5, qhat, Geometry::EqualBodies);
    let start = Instant::now();
    let grid = scan_diagram(&req, &IntegratorConfig::default())?;
    let elapsed = start.elapsed();

    let count = |s: NumericStatus| grid.cells.iter().filter(|c| c.numeric_status == s).count();
    println!(
        "{} cells in {:.1?}: {} stable, {} unstable, {} marginal, {} failed",
        grid.cells.len(),
        elapsed,
        count(NumericStatus::Stable),
        count(NumericStatus::Unstable),
        count(NumericStatus::Marginal),
        count(NumericStatus::Failed),
    );
    println!("soundness violations: {}", grid.soundness_violations().len());
    if let Some(path) = args.get(3) {
        std::fs::write(path, grid.to_csv())?;
        println!("wrote {path}");
    }
    Ok(())
}
