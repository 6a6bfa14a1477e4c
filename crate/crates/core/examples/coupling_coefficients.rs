//! The Λ coupling coefficients of Pluto–Charon and of a triaxial pair.

use spinlock::kepler::Orbit;
use spinlock::bodies::BodyShape;
use spinlock::potential::{presets, SystemParams};

fn show(name: &str, p: &SystemParams) {
    let ls = p.lambda_set();
    println!("{name}");
    println!("  C = {:?}, lambda = {:?}", p.c(), p.lambda());
    println!("  dhat = {:?}, qhat = {:?}", p.dhat(), p.qhat());
    println!("  Lambda0 = {:.6e}, (Lambda1, Lambda2) = ({:.6e}, {:.6e})", ls.lambda0, ls.lambda[0], ls.lambda[1]);
    for c in &ls.coupling {
        println!("  Lambda^{:+}_{:+} = {:.6e}", c.m1, c.m2, c.value);
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    show("Pluto-Charon", &presets::pluto_charon());
    let b1 = BodyShape::from_moments(0.6, 0.3, 0.32, 0.6)?;
    let b2 = BodyShape::from_moments(0.4, 0.2, 0.21, 0.4)?;
    show("triaxial pair", &SystemParams::from_bodies(Orbit::new(10.0, 0.1)?, b1, b2)?);
    Ok(())
}
