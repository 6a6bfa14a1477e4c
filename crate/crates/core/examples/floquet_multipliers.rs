//! Floquet multipliers of Θ* across the first resonance tongue at e = 0.

use spinlock::potential::presets;
use spinlock::solver::{monodromy, solve_periodic_conservative, IntegratorConfig, ShootingOptions};
use spinlock::dynamics::DissipationParams;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = IntegratorConfig::default();
    for lambda in [0.05, 0.1, 0.2, 0.25, 0.3] {
        let p = presets::equal_bodies(0.0, 10.0, lambda, 0.0)?;
        let ls = p.lambda_set();
        let sol = solve_periodic_conservative(&p, &ls, &ShootingOptions::default(), &cfg)?;
        let m = monodromy(&p, &ls, &DissipationParams::NONE, &sol, &cfg)?;
        let z = m.multipliers[0];
        println!(
            "lambda = {lambda:4}  z = {:+.9} {:+.9}i  |z|max = {:.9}  {}",
            z.re,
            z.im,
            m.max_modulus,
            m.classification.as_str()
        );
    }
    Ok(())
}
