//! Integrates orbit and spins together and reports the conserved quantities.

use std::f64::consts::TAU;

use spinlock::bodies::BodyShape;
use spinlock::dynamics::{FullModel, FullState, OrbitalForcing};
use spinlock::kepler::Orbit;
use spinlock::solver::{integrate_full_model, IntegratorConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let orbit = Orbit::new(10.0, 0.1)?;
    let b1 = BodyShape::from_moments(0.6, 0.3, 0.32, 0.6)?;
    let b2 = BodyShape::from_moments(0.4, 0.2, 0.21, 0.4)?;
    let model = FullModel::new(&b1, &b2, orbit.gravitational_constant(), OrbitalForcing::Full)?;
    let k = orbit.state(0.0)?;
    let s0 = FullState {
        r: k.r,
        r_dot: 0.0,
        f: 0.0,
        f_dot: k.f_dot,
        theta: [0.1, -0.2],
        theta_dot: [1.0, 1.0],
    };
    let periods = 100.0;
    let traj = integrate_full_model(&model, &s0, periods * TAU, &IntegratorConfig::default(), false)?;
    let s1 = FullState::from_slice(&traj.y1);
    let (e0, e1) = (model.energy(&s0)?, model.energy(&s1)?);
    let (l0, l1) = (model.angular_momentum(&s0), model.angular_momentum(&s1));
    println!("{periods} periods, {} steps", traj.accepted);
    println!("energy           {e0:.15} -> {e1:.15}  (rel drift {:.2e})", ((e1 - e0) / e0).abs());
    println!("angular momentum {l0:.15} -> {l1:.15}  (rel drift {:.2e})", ((l1 - l0) / l0).abs());
    Ok(())
}
