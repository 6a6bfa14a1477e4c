//! Continues Θ* into the tidally damped problem and checks it attracts.

use spinlock::dynamics::DissipationParams;
use spinlock::potential::presets;
use spinlock::solver::{continue_dissipative, monodromy, solve_periodic_conservative, IntegratorConfig, ShootingOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = IntegratorConfig::default();
    let p = presets::pluto_charon();
    let ls = p.lambda_set();
    let seed = solve_periodic_conservative(&p, &ls, &ShootingOptions::default(), &cfg)?;
    let delta = DissipationParams::new([1e-3, 1e-3])?;
    let sol = continue_dissipative(&p, &ls, &delta, &seed, &cfg)?;
    println!("continuation path ({} points):", sol.continuation.len());
    for (d, y) in &sol.continuation {
        println!("  delta = {:.2e}  theta(0) = ({:+.3e}, {:+.3e})", d[0], y[0], y[1]);
    }
    println!("residual = {:.2e}", sol.residual);
    let m = monodromy(&p, &ls, &delta, &sol, &cfg)?;
    println!("max |multiplier| = {:.9} ({})", m.max_modulus, m.classification.as_str());
    Ok(())
}
