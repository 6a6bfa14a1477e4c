//! Keplerian relative orbit: eccentric, mean and true anomalies.
//!
//! Time is measured as the mean anomaly (the orbital period is `2π`), and
//! periapsis is crossed at `t = 0` where `f = u = 0`.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest eccentricity for which convergence of [`solve_kepler`] is guaranteed.
pub const MAX_GUARANTEED_ECCENTRICITY: f64 = 0.99;

const RESIDUAL_TOL: f64 = 1e-13;
const MAX_NEWTON_ITERS: usize = 50;
const MAX_BISECTION_ITERS: usize = 200;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KeplerError {
    #[error("eccentricity {0} outside [0, 1)")]
    Eccentricity(f64),
    #[error("semi-major axis {0} must be positive and finite")]
    SemiMajorAxis(f64),
    #[error("mean anomaly {0} is not finite")]
    NonFiniteTime(f64),
    #[error("Kepler solver did not converge (e = {e}, t = {t}, residual = {residual:e})")]
    NoConvergence { e: f64, t: f64, residual: f64 },
}

/// Size and shape of the relative Keplerian ellipse, in model units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "OrbitRepr", into = "OrbitRepr")]
pub struct Orbit {
    a: f64,
    e: f64,
}

#[derive(Serialize, Deserialize)]
struct OrbitRepr {
    a: f64,
    e: f64,
}

impl TryFrom<OrbitRepr> for Orbit {
    type Error = KeplerError;
    fn try_from(r: OrbitRepr) -> Result<Self, Self::Error> {
        Orbit::new(r.a, r.e)
    }
}

impl From<Orbit> for OrbitRepr {
    fn from(o: Orbit) -> Self {
        OrbitRepr { a: o.a, e: o.e }
    }
}

impl Orbit {
    pub fn new(a: f64, e: f64) -> Result<Self, KeplerError> {
        if !(a.is_finite() && a > 0.0) {
            return Err(KeplerError::SemiMajorAxis(a));
        }
        check_eccentricity(e)?;
        Ok(Orbit { a, e })
    }

    pub fn semi_major_axis(&self) -> f64 {
        self.a
    }

    pub fn eccentricity(&self) -> f64 {
        self.e
    }

    /// Gravitational constant implied by a `2π` period and unit total mass.
    pub fn gravitational_constant(&self) -> f64 {
        self.a * self.a * self.a
    }

    pub fn state(&self, t: f64) -> Result<OrbitState, KeplerError> {
        orbit_state(self, t)
    }
}

/// Kinematic quantities of the orbit at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitState {
    pub t: f64,
    pub u: f64,
    pub r: f64,
    pub f: f64,
    pub f_dot: f64,
    pub f_ddot: f64,
}

impl OrbitState {
    /// Ratio `a / r`.
    pub fn a_over_r(&self, orbit: &Orbit) -> f64 {
        orbit.a / self.r
    }
}

fn check_eccentricity(e: f64) -> Result<(), KeplerError> {
    if !(e.is_finite() && (0.0..1.0).contains(&e)) {
        return Err(KeplerError::Eccentricity(e));
    }
    Ok(())
}

/// Splits `t` into `t_red + 2πk` with `t_red ∈ [−π, π]`.
fn reduce(t: f64) -> (f64, f64) {
    let k = (t / TAU).round();
    (t - k * TAU, k)
}

/// Solves Kepler's equation `u − e sin u = t` for the eccentric anomaly.
///
/// The mean anomaly is reduced to `[−π, π]` first, so the result satisfies
/// `u(t + 2π) = u(t) + 2π` and `u(−t) = −u(t)` exactly.
pub fn solve_kepler(e: f64, t: f64) -> Result<f64, KeplerError> {
    check_eccentricity(e)?;
    if !t.is_finite() {
        return Err(KeplerError::NonFiniteTime(t));
    }
    let (tr, k) = reduce(t);
    let u = solve_reduced(e, tr)?;
    Ok(u + k * TAU)
}

fn solve_reduced(e: f64, t: f64) -> Result<f64, KeplerError> {
    if e == 0.0 {
        return Ok(t);
    }
    let residual = |u: f64| u - e * u.sin() - t;
    // |u − t| = e |sin u| ≤ e brackets the root.
    let (mut lo, mut hi) = (t - e, t + e);
    let mut u = t + e * t.sin();
    for _ in 0..MAX_NEWTON_ITERS {
        let g = residual(u);
        if g.abs() < RESIDUAL_TOL {
            return Ok(u);
        }
        if g > 0.0 {
            hi = hi.min(u);
        } else {
            lo = lo.max(u);
        }
        let dg = 1.0 - e * u.cos();
        let next = u - g / dg;
        u = if next > lo && next < hi {
            next
        } else {
            0.5 * (lo + hi)
        };
    }
    // Newton stalled; finish by plain bisection on the shrunken bracket.
    for _ in 0..MAX_BISECTION_ITERS {
        let mid = 0.5 * (lo + hi);
        let g = residual(mid);
        if g.abs() < RESIDUAL_TOL || hi - lo < f64::EPSILON * (1.0 + mid.abs()) {
            return if g.abs() < 10.0 * RESIDUAL_TOL {
                Ok(mid)
            } else {
                Err(KeplerError::NoConvergence { e, t, residual: g.abs() })
            };
        }
        if g > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let mid = 0.5 * (lo + hi);
    Err(KeplerError::NoConvergence {
        e,
        t,
        residual: residual(mid).abs(),
    })
}

fn wrap_pi(x: f64) -> f64 {
    let y = x - TAU * (x / TAU).round();
    if y <= -PI {
        y + TAU
    } else {
        y
    }
}

/// Radius, true anomaly and its first two derivatives at mean anomaly `t`.
pub fn orbit_state(orbit: &Orbit, t: f64) -> Result<OrbitState, KeplerError> {
    let e = orbit.e;
    let u = solve_kepler(e, t)?;
    let (s, c) = u.sin_cos();
    let eta = (1.0 - e * e).sqrt();
    let one_m_ecos = 1.0 - e * c;
    let r = orbit.a * one_m_ecos;
    // f − u stays within (−π, π), which fixes the revolution of f from that of u.
    let f = u + wrap_pi((eta * s).atan2(c - e) - u);
    let inv = 1.0 / one_m_ecos;
    let inv2 = inv * inv;
    let f_dot = eta * inv2;
    let f_ddot = -2.0 * e * eta * s * inv2 * inv2;
    Ok(OrbitState {
        t,
        u,
        r,
        f,
        f_dot,
        f_ddot,
    })
}
