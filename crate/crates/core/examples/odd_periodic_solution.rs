//! Finds the odd 2π-periodic solution Θ* of the conservative spin equations.
//!
//! Usage: `cargo run --release --example odd_periodic_solution -- [e] [lambda]`

use spinlock::potential::presets;
use spinlock::solver::{solve_periodic_conservative, IntegratorConfig, ShootingOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let e = args.first().map_or(Ok(0.1), |s| s.parse())?;
    let lambda = args.get(1).map_or(Ok(0.1), |s| s.parse())?;
    let p = presets::equal_bodies(e, 10.0, lambda, 0.01)?;
    let sol = solve_periodic_conservative(&p, &p.lambda_set(), &ShootingOptions::default(), &IntegratorConfig::default())?;
    println!("e = {e}, lambda = {lambda}");
    println!("v0 = {:?}  ({} Newton steps, residual {:.2e})", sol.v0, sol.iterations, sol.residual);
    println!("amplitude = {:.6}, periodicity defect = {:.2e}", sol.amplitude, sol.periodicity_defect);
    if let Some(s) = sol.symmetry_defect {
        println!("odd symmetry defect = {s:.2e}");
    }
    for s in sol.samples(9) {
        println!("t = {:6.3}  theta = ({:+.8}, {:+.8})", s[0], s[1], s[2]);
    }
    Ok(())
}
