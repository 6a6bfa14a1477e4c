//! Solves Kepler's equation along one orbit and prints the anomalies.
//!
//! Usage: `cargo run --example kepler_orbit -- [e]`

use std::f64::consts::TAU;

use spinlock::kepler::{solve_kepler, Orbit};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let e: f64 = std::env::args().nth(1).map_or(Ok(0.3), |s| s.parse())?;
    let orbit = Orbit::new(1.0, e)?;
    println!("{:>8} {:>12} {:>12} {:>12} {:>12}", "t", "u", "f", "r", "f_dot");
    for k in 0..=12 {
        let t = TAU * k as f64 / 12.0;
        let s = orbit.state(t)?;
        println!("{:8.4} {:12.8} {:12.8} {:12.8} {:12.8}", t, s.u, s.f, s.r, s.f_dot);
    }
    let mut worst = 0.0f64;
    for k in 0..1000 {
        let t = -10.0 + 20.0 * k as f64 / 999.0;
        let u = solve_kepler(e, t)?;
        worst = worst.max((u - e * u.sin() - t).abs());
    }
    println!("max |u - e sin u - t| over 1000 times: {worst:.2e}");
    Ok(())
}
