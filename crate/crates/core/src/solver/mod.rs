//! Integration, shooting for the odd periodic solution, continuation in the
//! dissipation, and Floquet multipliers.

pub mod continuation;
pub mod floquet;
pub mod integrator;
pub mod shooting;

use std::f64::consts::{PI, TAU};

use thiserror::Error;

use crate::dynamics::{DissipationParams, FullModel, FullState, Mat2, SpinModel};
use crate::potential::PotentialError;

pub use continuation::{continue_dissipative, solve_periodic_dissipative};
pub use floquet::{monodromy, Classification, MonodromyResult};
pub use integrator::{integrate, IntegratorConfig, IntegratorError, Trajectory};
pub use shooting::{
    find_all_periodic, solve_periodic_conservative, solve_periodic_from, Multistart, PeriodicSolution,
    ShootingOptions,
};

#[derive(Debug, Clone, Error)]
pub enum SolverError {
    #[error(transparent)]
    Integrator(#[from] IntegratorError),
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error("Newton did not converge after {iterations} iterations (best residual {best_residual:e} at v0 = {best_v0:?})")]
    NoConvergence {
        iterations: usize,
        best_residual: f64,
        best_v0: [f64; 2],
    },
    #[error("singular Newton matrix (determinant {0:e})")]
    SingularJacobian(f64),
    #[error("continuation blocked: seed has multiplier {re} + {im}i within tolerance of 1")]
    ContinuationBlocked { re: f64, im: f64 },
    #[error("continuation stopped at {reached:?} of target {target:?}: {reason}")]
    Partial {
        reached: [f64; 2],
        target: [f64; 2],
        reason: String,
        last: Box<PeriodicSolution>,
    },
    #[error("precondition violated: {0}")]
    Precondition(String),
}

/// One period of the forcing, in mean anomaly.
pub const PERIOD: f64 = TAU;
pub const HALF_PERIOD: f64 = PI;

/// `[Θ₁, Θ₂, Θ̇₁, Θ̇₂]` of the spin flow.
pub(crate) fn spin_rhs(m: &SpinModel, diss: &DissipationParams, t: f64, y: &[f64; 4]) -> [f64; 4] {
    let st = m.orbit_state(t);
    let s = crate::dynamics::SpinState {
        theta: [y[0], y[1]],
        theta_dot: [y[2], y[3]],
    };
    let a = m.accel(&st, diss, &s);
    [y[2], y[3], a[0], a[1]]
}

/// Linear part of the variational flow at `(t, y)`: `ẍ = −B x − d ẋ`.
pub(crate) fn variational_parts(
    m: &SpinModel,
    diss: &DissipationParams,
    t: f64,
    y: &[f64; 4],
    scaled: bool,
) -> ([f64; 4], Mat2, [f64; 2]) {
    let st = m.orbit_state(t);
    let s = crate::dynamics::SpinState {
        theta: [y[0], y[1]],
        theta_dot: [y[2], y[3]],
    };
    let (acc, cj, d) = m.accel_with_jacobian(&st, diss, &s);
    let b = if scaled {
        let c = m.c();
        let off = cj[0][1] * (c[0] / c[1]).sqrt();
        [[cj[0][0], off], [off, cj[1][1]]]
    } else {
        cj
    };
    let delta = diss.delta();
    ([y[2], y[3], acc[0], acc[1]], b, [delta[0] * d, delta[1] * d])
}

pub(crate) fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Flow of the full Lagrangian system from `s0` over `[0, t1]`, in the
/// ordering of [`FullState::to_vec`]. A singular configuration stops the
/// integration as a non-finite state.
pub fn integrate_full_model(
    model: &FullModel,
    s0: &FullState,
    t1: f64,
    cfg: &IntegratorConfig,
    dense: bool,
) -> Result<Trajectory<8>, IntegratorError> {
    let rhs = |_t: f64, y: &[f64; 8]| {
        let s = FullState::from_slice(y);
        match model.accel(&s) {
            Ok(a) => [y[4], y[5], y[6], y[7], a.r, a.f, a.theta[0], a.theta[1]],
            Err(_) => [f64::NAN; 8],
        }
    };
    integrate(rhs, s0.to_vec(), 0.0, t1, cfg, dense)
}
