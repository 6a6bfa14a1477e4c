//! Uniqueness and linear-stability conditions for two observed binaries.

use spinlock::analysis::{check_linear_stability, check_uniqueness};
use spinlock::potential::{presets, SystemParams};

fn report(name: &str, p: &SystemParams) {
    let ls = p.lambda_set();
    let u = check_uniqueness(p, &ls);
    let r = check_linear_stability(p, &ls);
    println!(
        "{name:>28}: unique {:5} (margin {:+.3e})  lin1 {:5} lin2 {:5} lin3 {:5}  stable {}",
        u.uniqueness_ok, u.margin, r.lin1_ok, r.lin2_ok, r.lin3_ok, r.stable
    );
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    report("Pluto-Charon", &presets::pluto_charon());
    for e in [0.0, 0.02, 0.04, 0.06] {
        report(&format!("Patroclus-Menoetius e={e}"), &presets::patroclus_menoetius(e)?);
    }
    Ok(())
}
