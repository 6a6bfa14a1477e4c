//! Converts Pluto–Charon physical values into model units and back.

use spinlock::bodies::{Quantity, UnitSystem};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Orbital period in days, masses in kg, polar moments in kg m².
    let units = UnitSystem::new(6.387, 1.4622e22, 9.0e32)?;
    for (q, value) in [
        (Quantity::Time, 1.0),
        (Quantity::Mass, 1.303e22),
        (Quantity::Length, 1.9596e7),
        (Quantity::Inertia, 8.7e32),
    ] {
        let model = units.to_model_units(q, value);
        let back = units.from_model_units(q, model);
        println!("{:>8}: {value:.6e} -> {model:.9e} -> {back:.6e}", q.to_string());
    }
    Ok(())
}
