//! Newton shooting for the odd 2π-periodic solution `Θ*` of the conservative
//! problem: `Θ(0) = 0`, `Θ(π; v₀) = 0`.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use super::integrator::{integrate, IntegratorConfig, IntegratorError, Trajectory};
use super::{norm_inf, spin_rhs, variational_parts, SolverError};
use crate::analysis::conditions;
use crate::dynamics::{DissipationParams, SpinModel};
use crate::potential::{LambdaSet, SystemParams};

const NEWTON_TOL: f64 = 1e-12;
const STALL_TOL: f64 = 1e-10;
const MAX_HALVINGS: u32 = 8;
const AMPLITUDE_GRID: usize = 2048;
const DISTINCT_ROOTS: f64 = 1e-6;
/// Cap on the half-width of the multistart box when the Brouwer bound is loose.
const MAX_BOX: f64 = TAU;

/// When to probe for further roots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Multistart {
    /// Only when the uniqueness condition fails.
    #[default]
    Auto,
    Always,
    Never,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ShootingOptions {
    pub max_iter: usize,
    pub multistart: Multistart,
    pub guess: Option<[f64; 2]>,
}

impl Default for ShootingOptions {
    fn default() -> Self {
        ShootingOptions {
            max_iter: 30,
            multistart: Multistart::Auto,
            guess: None,
        }
    }
}

/// A converged periodic solution of the spin equations.
#[derive(Debug, Clone)]
pub struct PeriodicSolution {
    /// `Θ(0)`; zero for the odd conservative solution.
    pub theta0: [f64; 2],
    /// `Θ̇(0)`.
    pub v0: [f64; 2],
    pub delta: DissipationParams,
    /// Boundary defect `‖Θ(π)‖∞`, or the period-map defect when dissipative.
    pub residual: f64,
    /// `max_j max_t |Θ_j(t)|`.
    pub amplitude: f64,
    /// `‖y(2π) − y(0)‖∞` of a direct integration over one period.
    pub periodicity_defect: f64,
    /// `max_t ‖Θ(t) + Θ(2π − t)‖∞` of that integration; conservative only.
    pub symmetry_defect: Option<f64>,
    pub iterations: usize,
    pub residual_history: Vec<f64>,
    /// Other roots found by multistart.
    pub alternatives: Vec<[f64; 2]>,
    /// `(δ, y(0))` along the dissipative continuation, if any.
    pub continuation: Vec<([f64; 2], [f64; 4])>,
    base: Trajectory<4>,
    reflected: bool,
}

impl PeriodicSolution {
    pub(crate) fn new_dissipative(
        y0: [f64; 4],
        delta: DissipationParams,
        residual: f64,
        iterations: usize,
        history: Vec<f64>,
        base: Trajectory<4>,
    ) -> Self {
        let mut sol = PeriodicSolution {
            theta0: [y0[0], y0[1]],
            v0: [y0[2], y0[3]],
            delta,
            residual,
            amplitude: 0.0,
            periodicity_defect: 0.0,
            symmetry_defect: None,
            iterations,
            residual_history: history,
            alternatives: Vec::new(),
            continuation: Vec::new(),
            base,
            reflected: false,
        };
        let y1 = sol.base.y1;
        sol.periodicity_defect = norm_inf(&[y1[0] - y0[0], y1[1] - y0[1], y1[2] - y0[2], y1[3] - y0[3]]);
        sol.amplitude = sol.compute_amplitude();
        sol
    }

    /// Initial state `(Θ(0), Θ̇(0))`.
    pub fn initial_state(&self) -> [f64; 4] {
        [self.theta0[0], self.theta0[1], self.v0[0], self.v0[1]]
    }

    pub fn is_conservative(&self) -> bool {
        self.delta.is_zero()
    }

    /// `(Θ(t), Θ̇(t))` for any `t`, using 2π-periodicity.
    pub fn state(&self, t: f64) -> [f64; 4] {
        let tt = t.rem_euclid(TAU);
        if self.reflected && tt > PI {
            let y = self.base.eval(TAU - tt).expect("inside the half period");
            [-y[0], -y[1], y[2], y[3]]
        } else {
            self.base.eval(tt).expect("inside the period")
        }
    }

    /// `n` uniform samples `(t, Θ₁, Θ₂, Θ̇₁, Θ̇₂)` over `[0, 2π]`, endpoints included.
    pub fn samples(&self, n: usize) -> Vec<[f64; 5]> {
        let n = n.max(2);
        (0..n)
            .map(|i| {
                let t = TAU * i as f64 / (n - 1) as f64;
                let y = if i == n - 1 { self.state(0.0) } else { self.state(t) };
                [t, y[0], y[1], y[2], y[3]]
            })
            .collect()
    }

    fn compute_amplitude(&self) -> f64 {
        let end = if self.reflected { PI } else { TAU };
        (0..=AMPLITUDE_GRID)
            .map(|i| {
                let y = self.base.eval(end * i as f64 / AMPLITUDE_GRID as f64).unwrap();
                y[0].abs().max(y[1].abs())
            })
            .fold(0.0, f64::max)
    }
}

/// `Θ(π)` and `∂Θ(π)/∂v₀` for `Θ(0) = 0, Θ̇(0) = v`.
fn half_period_map(
    m: &SpinModel,
    v: [f64; 2],
    cfg: &IntegratorConfig,
) -> Result<([f64; 2], [[f64; 2]; 2]), IntegratorError> {
    let none = DissipationParams::NONE;
    let mut y0 = [0.0; 12];
    y0[2] = v[0];
    y0[3] = v[1];
    // X = ∂Θ/∂v in y[4..8], Ẋ in y[8..12], both row-major.
    y0[8] = 1.0;
    y0[11] = 1.0;
    let rhs = |t: f64, y: &[f64; 12]| {
        let base = [y[0], y[1], y[2], y[3]];
        let (f, b, _) = variational_parts(m, &none, t, &base, false);
        let mut out = [0.0; 12];
        out[..4].copy_from_slice(&f);
        out[4..8].copy_from_slice(&y[8..12]);
        for j in 0..2 {
            out[8 + j] = -(b[0][0] * y[4 + j] + b[0][1] * y[6 + j]);
            out[10 + j] = -(b[1][0] * y[4 + j] + b[1][1] * y[6 + j]);
        }
        out
    };
    let tr = integrate(rhs, y0, 0.0, PI, cfg, false)?;
    let y = tr.y1;
    Ok(([y[0], y[1]], [[y[4], y[5]], [y[6], y[7]]]))
}

struct NewtonOutcome {
    v: [f64; 2],
    residual: f64,
    iterations: usize,
    history: Vec<f64>,
}

fn newton(m: &SpinModel, guess: [f64; 2], max_iter: usize, cfg: &IntegratorConfig) -> Result<NewtonOutcome, SolverError> {
    let mut v = guess;
    let mut best = (f64::INFINITY, guess);
    let mut history = Vec::new();
    let mut prev: Option<([f64; 2], [f64; 2], f64)> = None; // (v, step, residual)
    let mut lam = 1.0;
    for it in 0..max_iter {
        let eval = half_period_map(m, v, cfg);
        let (r, j) = eval.unwrap_or(([f64::INFINITY; 2], [[0.0; 2]; 2]));
        let rn = norm_inf(&r);
        if rn.is_finite() {
            history.push(rn);
        }
        if rn < best.0 {
            best = (rn, v);
        }
        if rn <= NEWTON_TOL {
            return Ok(NewtonOutcome { v, residual: rn, iterations: it, history });
        }
        // Backtrack along the previous direction when the residual did not drop.
        if let Some((pv, step, pr)) = prev {
            if !(rn < pr) && lam > 0.5f64.powi(MAX_HALVINGS as i32) {
                lam *= 0.5;
                v = [pv[0] + lam * step[0], pv[1] + lam * step[1]];
                continue;
            }
        }
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if !(det.abs() > 0.0) || !det.is_finite() {
            break;
        }
        let step = [
            -(j[1][1] * r[0] - j[0][1] * r[1]) / det,
            -(-j[1][0] * r[0] + j[0][0] * r[1]) / det,
        ];
        if rn <= STALL_TOL && norm_inf(&step) <= 1e-14 * (1.0 + norm_inf(&v)) {
            return Ok(NewtonOutcome { v, residual: rn, iterations: it, history });
        }
        prev = Some((v, step, rn));
        lam = 1.0;
        v = [v[0] + step[0], v[1] + step[1]];
    }
    if best.0 <= STALL_TOL {
        return Ok(NewtonOutcome {
            v: best.1,
            residual: best.0,
            iterations: max_iter,
            history,
        });
    }
    Err(SolverError::NoConvergence {
        iterations: max_iter,
        best_residual: best.0,
        best_v0: best.1,
    })
}

/// Builds the solution record for a converged `v₀`.
fn finish(m: &SpinModel, out: NewtonOutcome, cfg: &IntegratorConfig) -> Result<PeriodicSolution, SolverError> {
    let none = DissipationParams::NONE;
    let rhs = |t: f64, y: &[f64; 4]| spin_rhs(m, &none, t, y);
    let y0 = [0.0, 0.0, out.v[0], out.v[1]];
    let half = integrate(rhs, y0, 0.0, PI, cfg, true)?;
    let rest = integrate(rhs, half.y1, PI, TAU, cfg, true)?;
    let y1 = rest.y1;
    let periodicity = norm_inf(&[y1[0], y1[1], y1[2] - y0[2], y1[3] - y0[3]]);
    let mut symmetry: f64 = 0.0;
    for i in 0..=256 {
        let t = PI * i as f64 / 256.0;
        let a = half.eval(t).unwrap();
        let b = rest.eval(TAU - t).unwrap();
        symmetry = symmetry.max((a[0] + b[0]).abs()).max((a[1] + b[1]).abs());
    }
    let mut sol = PeriodicSolution {
        theta0: [0.0; 2],
        v0: out.v,
        delta: DissipationParams::NONE,
        residual: out.residual,
        amplitude: 0.0,
        periodicity_defect: periodicity,
        symmetry_defect: Some(symmetry),
        iterations: out.iterations,
        residual_history: out.history,
        alternatives: Vec::new(),
        continuation: Vec::new(),
        base: half,
        reflected: true,
    };
    sol.amplitude = sol.compute_amplitude();
    Ok(sol)
}

/// Shooting from a given initial velocity.
pub fn solve_periodic_from(
    p: &SystemParams,
    ls: &LambdaSet,
    guess: [f64; 2],
    max_iter: usize,
    cfg: &IntegratorConfig,
) -> Result<PeriodicSolution, SolverError> {
    let m = SpinModel::new(p, ls);
    let out = newton(&m, guess, max_iter, cfg)?;
    finish(&m, out, cfg)
}

fn uncoupled_guess(p: &SystemParams) -> [f64; 2] {
    let e = p.eccentricity();
    let fdot0 = (1.0 + e).powi(2) / (1.0 - e * e).powf(1.5);
    [2.0 * (1.0 - fdot0); 2]
}

fn continuation_in_e(
    p: &SystemParams,
    steps: usize,
    max_iter: usize,
    cfg: &IntegratorConfig,
) -> Result<PeriodicSolution, SolverError> {
    let e = p.eccentricity();
    let mut v = [0.0; 2];
    for k in 1..steps {
        let pk = p.with_eccentricity(e * k as f64 / steps as f64)?;
        let m = SpinModel::new(&pk, &pk.lambda_set());
        v = newton(&m, v, max_iter, cfg)?.v;
    }
    solve_periodic_from(p, &p.lambda_set(), v, max_iter, cfg)
}

/// The odd 2π-periodic solution `Θ*` of the conservative problem.
///
/// Tries the supplied guess (or `v₀ = 0`), then the uncoupled solution, then
/// continuation in `e` from the circular problem. Further roots found by
/// multistart are listed in `alternatives`.
pub fn solve_periodic_conservative(
    p: &SystemParams,
    ls: &LambdaSet,
    opts: &ShootingOptions,
    cfg: &IntegratorConfig,
) -> Result<PeriodicSolution, SolverError> {
    let first = opts.guess.unwrap_or([0.0; 2]);
    let mut sol = solve_periodic_from(p, ls, first, opts.max_iter, cfg)
        .or_else(|err| {
            solve_periodic_from(p, ls, uncoupled_guess(p), opts.max_iter, cfg).map_err(|_| err)
        })
        .or_else(|err| {
            continuation_in_e(p, 8, opts.max_iter, cfg)
                .or_else(|_| continuation_in_e(p, 32, opts.max_iter, cfg))
                .map_err(|_| err)
        })?;
    let probe = match opts.multistart {
        Multistart::Never => false,
        Multistart::Always => true,
        Multistart::Auto => !conditions::check_uniqueness(p, ls).uniqueness_ok,
    };
    if probe {
        sol.alternatives = multistart_roots(p, ls, opts.max_iter, cfg)
            .into_iter()
            .filter(|v| norm_inf(&[v[0] - sol.v0[0], v[1] - sol.v0[1]]) > DISTINCT_ROOTS)
            .collect();
    }
    Ok(sol)
}

/// Half-width of the multistart box, `πM/2` capped at `2π`.
pub fn multistart_box(p: &SystemParams, ls: &LambdaSet) -> f64 {
    let m = conditions::check_linear_stability(p, ls).m_bound;
    (0.5 * PI * m).min(MAX_BOX)
}

fn multistart_roots(p: &SystemParams, ls: &LambdaSet, max_iter: usize, cfg: &IntegratorConfig) -> Vec<[f64; 2]> {
    let m = SpinModel::new(p, ls);
    let w = multistart_box(p, ls);
    let mut roots: Vec<[f64; 2]> = Vec::new();
    for i in 0..5 {
        for j in 0..5 {
            let g = [-w + 0.5 * w * i as f64, -w + 0.5 * w * j as f64];
            if let Ok(out) = newton(&m, g, max_iter, cfg) {
                let v = out.v;
                if roots.iter().all(|r| norm_inf(&[r[0] - v[0], r[1] - v[1]]) > DISTINCT_ROOTS) {
                    roots.push(v);
                }
            }
        }
    }
    roots
}

/// Every distinct odd periodic solution reached from the multistart grid.
pub fn find_all_periodic(
    p: &SystemParams,
    ls: &LambdaSet,
    max_iter: usize,
    cfg: &IntegratorConfig,
) -> Result<Vec<PeriodicSolution>, SolverError> {
    let m = SpinModel::new(p, ls);
    multistart_roots(p, ls, max_iter, cfg)
        .into_iter()
        .map(|v| {
            let out = newton(&m, v, max_iter, cfg)?;
            finish(&m, out, cfg)
        })
        .collect()
}
