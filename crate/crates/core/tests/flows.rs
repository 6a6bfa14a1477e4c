//! Properties of the integrated spin and full flows.

use std::f64::consts::{PI, TAU};

use spinlock::bodies::BodyShape;
use spinlock::dynamics::{
    hamiltonian, rhs_theta_chart, rhs_Theta_chart, DissipationParams, FullModel, FullState, OrbitalForcing,
    SpinState,
};
use spinlock::kepler::Orbit;
use spinlock::potential::SystemParams;
use spinlock::solver::{integrate, integrate_full_model, IntegratorConfig};

fn generic(e: f64) -> SystemParams {
    SystemParams::new(e, 4.0, 0.6, 0.2, 0.15, 0.01, 0.03).unwrap()
}

fn physical_flow(p: &SystemParams, diss: DissipationParams) -> impl Fn(f64, &[f64; 4]) -> [f64; 4] + '_ {
    let ls = p.lambda_set();
    move |t, y| {
        let a = rhs_theta_chart(p, &ls, &diss, t, [y[0], y[1]], [y[2], y[3]]).unwrap();
        [y[2], y[3], a[0], a[1]]
    }
}

fn wrap(x: f64) -> f64 {
    (x + PI).rem_euclid(TAU) - PI
}

#[test]
fn jacobi_integral_is_conserved_on_circular_orbit() {
    let p = generic(0.0);
    let ls = p.lambda_set();
    let cfg = IntegratorConfig::with_tol(1e-13);
    let c = p.c();
    let y0 = [0.3, -0.5, 1.2, 0.8];
    // H − n(p₁ + p₂) with n = 1: the potential turns with the orbit.
    let h = |t: f64, y: &[f64; 4]| {
        let pt = [c[0] * y[2], c[1] * y[3]];
        hamiltonian(&p, &ls, t, [y[0], y[1]], pt).unwrap() - (pt[0] + pt[1])
    };
    let traj = integrate(physical_flow(&p, DissipationParams::NONE), y0, 0.0, 100.0 * TAU, &cfg, true).unwrap();
    let h0 = h(0.0, &y0);
    for k in 1..=100 {
        let t = TAU * k as f64;
        let y = traj.eval(t).unwrap();
        assert!(((h(t, &y) - h0) / h0).abs() < 1e-9, "t = {t}: {} vs {h0}", h(t, &y));
    }
}

#[test]
fn conservative_flow_is_reversible() {
    let p = generic(0.3);
    let cfg = IntegratorConfig::default();
    let y0 = [0.2, 0.1, 1.1, 0.9];
    let f = physical_flow(&p, DissipationParams::NONE);
    let fwd = integrate(&f, y0, 0.0, 3.0 * TAU, &cfg, false).unwrap();
    let back = integrate(&f, fwd.y1, 3.0 * TAU, 0.0, &cfg, false).unwrap();
    for k in 0..4 {
        assert!((back.y1[k] - y0[k]).abs() < 1e-8, "{:?} vs {:?}", back.y1, y0);
    }
}

#[test]
fn both_charts_give_the_same_motion() {
    let p = generic(0.2);
    let ls = p.lambda_set();
    let cfg = IntegratorConfig::default();
    for diss in [DissipationParams::NONE, DissipationParams::new([0.05, 0.02]).unwrap()] {
        let (theta, theta_dot) = ([0.4, -0.3], [1.3, 0.7]);
        let phys = integrate(physical_flow(&p, diss), [theta[0], theta[1], theta_dot[0], theta_dot[1]], 0.0, 3.0 * TAU, &cfg, true)
            .unwrap();
        let st0 = p.orbit().state(0.0).unwrap();
        let s0 = SpinState::from_physical(&st0, theta, theta_dot);
        let chart = |t: f64, y: &[f64; 4]| {
            let s = SpinState { theta: [y[0], y[1]], theta_dot: [y[2], y[3]] };
            let a = rhs_Theta_chart(&p, &ls, &diss, t, &s).unwrap();
            [y[2], y[3], a[0], a[1]]
        };
        let big = integrate(chart, [s0.theta[0], s0.theta[1], s0.theta_dot[0], s0.theta_dot[1]], 0.0, 3.0 * TAU, &cfg, true)
            .unwrap();
        for k in 0..=30 {
            let t = 3.0 * TAU * k as f64 / 30.0;
            let st = p.orbit().state(t).unwrap();
            let y = big.eval(t).unwrap();
            let (th, thd) = SpinState { theta: [y[0], y[1]], theta_dot: [y[2], y[3]] }.to_physical(&st);
            let x = phys.eval(t).unwrap();
            for j in 0..2 {
                assert!(wrap(th[j] - x[j]).abs() < 1e-8, "t = {t}");
                assert!((thd[j] - x[2 + j]).abs() < 1e-8, "t = {t}");
            }
        }
    }
}

fn start(orbit: &Orbit, theta: [f64; 2]) -> FullState {
    let k = orbit.state(0.0).unwrap();
    FullState { r: k.r, r_dot: 0.0, f: 0.0, f_dot: k.f_dot, theta, theta_dot: [1.0, 1.0] }
}

#[test]
fn full_model_conserves_energy_and_angular_momentum() {
    let orbit = Orbit::new(10.0, 0.1).unwrap();
    let b1 = BodyShape::from_moments(0.6, 0.3, 0.32, 0.6).unwrap();
    let b2 = BodyShape::from_moments(0.4, 0.2, 0.21, 0.4).unwrap();
    let model = FullModel::new(&b1, &b2, orbit.gravitational_constant(), OrbitalForcing::Full).unwrap();
    let s0 = start(&orbit, [0.1, -0.2]);
    let traj = integrate_full_model(&model, &s0, 100.0 * TAU, &IntegratorConfig::default(), true).unwrap();
    let (e0, l0) = (model.energy(&s0).unwrap(), model.angular_momentum(&s0));
    for k in 1..=100 {
        let s = FullState::from_slice(&traj.eval(TAU * k as f64).unwrap());
        assert!(((model.energy(&s).unwrap() - e0) / e0).abs() < 1e-8);
        assert!(((model.angular_momentum(&s) - l0) / l0).abs() < 1e-8);
    }
}

#[test]
fn spheres_follow_kepler() {
    let orbit = Orbit::new(3.0, 0.4).unwrap();
    let b1 = BodyShape::sphere(0.7, 0.6).unwrap();
    let b2 = BodyShape::sphere(0.3, 0.4).unwrap();
    let model = FullModel::new(&b1, &b2, orbit.gravitational_constant(), OrbitalForcing::Full).unwrap();
    let cfg = IntegratorConfig::with_tol(1e-13);
    let traj = integrate_full_model(&model, &start(&orbit, [0.0; 2]), 10.0 * TAU, &cfg, true).unwrap();
    for k in 0..=200 {
        let t = 10.0 * TAU * k as f64 / 200.0;
        let y = traj.eval(t).unwrap();
        let kep = orbit.state(t).unwrap();
        assert!((y[0] - kep.r).abs() < 1e-8 * orbit.semi_major_axis(), "r at t = {t}");
        assert!(wrap(y[1] - kep.f).abs() < 1e-8, "f at t = {t}: {} vs {}", y[1], kep.f);
    }
}
