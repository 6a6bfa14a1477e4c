//! Continuation of `Θ*` in the dissipation rates to the periodic solution `Ψ*`.

use std::f64::consts::TAU;

use nalgebra::{Matrix4, Vector4};

use super::floquet::{monodromy, UNIT_CIRCLE_TOL};
use super::integrator::{integrate, IntegratorConfig, IntegratorError};
use super::shooting::PeriodicSolution;
use super::{norm_inf, spin_rhs, variational_parts, SolverError};
use crate::dynamics::{DissipationParams, SpinModel};
use crate::potential::{LambdaSet, SystemParams};

const MAX_STEP: f64 = 0.1;
const MIN_STEP: f64 = 1e-6;
const NEWTON_TOL: f64 = 1e-12;
const STALL_TOL: f64 = 1e-10;
const MAX_ITER: usize = 12;

/// `y(2π) − y(0)` and `Φ(2π) − I` for the flow with rates `delta`.
fn period_defect(
    m: &SpinModel,
    delta: &DissipationParams,
    y0: [f64; 4],
    cfg: &IntegratorConfig,
) -> Result<([f64; 4], Matrix4<f64>), IntegratorError> {
    let mut init = [0.0; 20];
    init[..4].copy_from_slice(&y0);
    for i in 0..4 {
        init[4 + 5 * i] = 1.0;
    }
    let rhs = |t: f64, y: &[f64; 20]| {
        let base = [y[0], y[1], y[2], y[3]];
        let (f, b, d) = variational_parts(m, delta, t, &base, false);
        let mut out = [0.0; 20];
        out[..4].copy_from_slice(&f);
        for c in 0..4 {
            let x = [y[4 + c], y[8 + c], y[12 + c], y[16 + c]];
            out[4 + c] = x[2];
            out[8 + c] = x[3];
            out[12 + c] = -b[0][0] * x[0] - b[0][1] * x[1] - d[0] * x[2];
            out[16 + c] = -b[1][0] * x[0] - b[1][1] * x[1] - d[1] * x[3];
        }
        out
    };
    let y = integrate(rhs, init, 0.0, TAU, cfg, false)?.y1;
    let g = [y[0] - y0[0], y[1] - y0[1], y[2] - y0[2], y[3] - y0[3]];
    let j = Matrix4::from_fn(|i, k| y[4 + 4 * i + k]) - Matrix4::identity();
    Ok((g, j))
}

/// Newton on the period map from `guess`.
fn fixed_point(
    m: &SpinModel,
    delta: &DissipationParams,
    guess: [f64; 4],
    cfg: &IntegratorConfig,
) -> Result<([f64; 4], f64, usize, Vec<f64>), String> {
    let mut y = guess;
    let mut history = Vec::new();
    for it in 0..MAX_ITER {
        let (g, j) = period_defect(m, delta, y, cfg).map_err(|e| e.to_string())?;
        let gn = norm_inf(&g);
        history.push(gn);
        if gn <= NEWTON_TOL {
            return Ok((y, gn, it, history));
        }
        let step = j
            .lu()
            .solve(&(-Vector4::from_column_slice(&g)))
            .ok_or_else(|| "singular period-map Jacobian".to_string())?;
        if gn <= STALL_TOL && step.amax() <= 1e-14 * (1.0 + norm_inf(&y)) {
            return Ok((y, gn, it, history));
        }
        if it > 2 && gn > 1e3 * history[0].max(1e-8) {
            return Err(format!("diverging (defect {gn:e})"));
        }
        for k in 0..4 {
            y[k] += step[k];
        }
    }
    let (g, _) = period_defect(m, delta, y, cfg).map_err(|e| e.to_string())?;
    let gn = norm_inf(&g);
    history.push(gn);
    if gn <= STALL_TOL {
        Ok((y, gn, MAX_ITER, history))
    } else {
        Err(format!("no convergence in {MAX_ITER} iterations (defect {gn:e})"))
    }
}

fn package(
    m: &SpinModel,
    delta: DissipationParams,
    y0: [f64; 4],
    residual: f64,
    iterations: usize,
    history: Vec<f64>,
    cfg: &IntegratorConfig,
) -> Result<PeriodicSolution, SolverError> {
    let base = integrate(|t, y: &[f64; 4]| spin_rhs(m, &delta, t, y), y0, 0.0, TAU, cfg, true)?;
    Ok(PeriodicSolution::new_dissipative(y0, delta, residual, iterations, history, base))
}

/// Follows the periodic solution from `δ = 0` (the seed) to `delta`.
pub fn continue_dissipative(
    p: &SystemParams,
    ls: &LambdaSet,
    delta: &DissipationParams,
    seed: &PeriodicSolution,
    cfg: &IntegratorConfig,
) -> Result<PeriodicSolution, SolverError> {
    if delta.is_zero() {
        return Ok(seed.clone());
    }
    if !seed.is_conservative() {
        return Err(SolverError::Precondition("seed must be a conservative solution".into()));
    }
    let mono = monodromy(p, ls, &DissipationParams::NONE, seed, cfg)?;
    if let Some(z) = mono
        .multipliers
        .iter()
        .find(|z| (*z - num_complex::Complex64::new(1.0, 0.0)).norm() < UNIT_CIRCLE_TOL)
    {
        return Err(SolverError::ContinuationBlocked { re: z.re, im: z.im });
    }
    let m = SpinModel::new(p, ls);
    let target = delta.delta();
    let mut s = 0.0;
    let mut ds = MAX_STEP;
    let mut y = seed.initial_state();
    let mut path = vec![([0.0; 2], y)];
    let mut last: Option<PeriodicSolution> = None;
    loop {
        let s_next = if s + ds > 1.0 - 1e-9 { 1.0 } else { s + ds };
        let d = delta.scaled(s_next);
        match fixed_point(&m, &d, y, cfg) {
            Ok((yn, res, it, hist)) => {
                s = s_next;
                y = yn;
                path.push((d.delta(), y));
                if s >= 1.0 {
                    let mut sol = package(&m, *delta, y, res, it, hist, cfg)?;
                    sol.continuation = path;
                    return Ok(sol);
                }
                last = Some(package(&m, d, y, res, it, hist, cfg)?);
                ds = (2.0 * ds).min(MAX_STEP);
            }
            Err(reason) => {
                ds *= 0.5;
                if ds < MIN_STEP {
                    let reached = delta.scaled(s).delta();
                    let mut last = match last {
                        Some(l) => l,
                        None => seed.clone(),
                    };
                    last.continuation = path;
                    return Err(SolverError::Partial {
                        reached,
                        target,
                        reason,
                        last: Box::new(last),
                    });
                }
            }
        }
    }
}

/// Period-map Newton at fixed `delta` from an arbitrary initial state.
pub fn solve_periodic_dissipative(
    p: &SystemParams,
    ls: &LambdaSet,
    delta: &DissipationParams,
    guess: [f64; 4],
    cfg: &IntegratorConfig,
) -> Result<PeriodicSolution, SolverError> {
    let m = SpinModel::new(p, ls);
    let (y, res, it, hist) = fixed_point(&m, delta, guess, cfg).map_err(|reason| {
        SolverError::Precondition(format!("period-map Newton failed: {reason}"))
    })?;
    package(&m, *delta, y, res, it, hist, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::presets;
    use crate::solver::floquet::Classification;
    use crate::solver::shooting::{solve_periodic_conservative, ShootingOptions};

    fn seed(p: &SystemParams) -> PeriodicSolution {
        solve_periodic_conservative(p, &p.lambda_set(), &ShootingOptions::default(), &IntegratorConfig::default()).unwrap()
    }

    #[test]
    fn zero_target_returns_seed() {
        let p = SystemParams::new(0.1, 4.0, 0.6, 0.2, 0.15, 0.01, 0.03).unwrap();
        let s = seed(&p);
        let out = continue_dissipative(&p, &p.lambda_set(), &DissipationParams::NONE, &s, &IntegratorConfig::default()).unwrap();
        assert_eq!(out.v0, s.v0);
        assert!(out.continuation.is_empty());
    }

    #[test]
    fn circular_case_stays_at_rest() {
        let p = presets::equal_bodies(0.0, 5.0, 0.1, 0.01).unwrap();
        let s = seed(&p);
        let d = DissipationParams::new([0.05, 0.02]).unwrap();
        let out = continue_dissipative(&p, &p.lambda_set(), &d, &s, &IntegratorConfig::default()).unwrap();
        assert!(out.amplitude < 1e-14);
        assert!(norm_inf(&out.initial_state()) < 1e-14);
    }

    #[test]
    fn damped_solution_is_attracting() {
        let p = SystemParams::new(0.1, 4.0, 0.6, 0.2, 0.15, 0.01, 0.03).unwrap();
        let ls = p.lambda_set();
        let cfg = IntegratorConfig::default();
        let s = seed(&p);
        let d = DissipationParams::new([0.02, 0.01]).unwrap();
        let out = continue_dissipative(&p, &ls, &d, &s, &cfg).unwrap();
        assert!(out.residual < 1e-9);
        assert!(out.periodicity_defect < 1e-8);
        assert_eq!(out.continuation.len(), 11);
        let mono = monodromy(&p, &ls, &d, &out, &cfg).unwrap();
        assert_eq!(mono.classification, Classification::DissipativeAttracting);
    }

    #[test]
    fn vanishing_dissipation_recovers_seed() {
        let p = SystemParams::new(0.1, 4.0, 0.6, 0.2, 0.15, 0.01, 0.03).unwrap();
        let s = seed(&p);
        let d = DissipationParams::new([1e-12, 1e-12]).unwrap();
        let out = continue_dissipative(&p, &p.lambda_set(), &d, &s, &IntegratorConfig::default()).unwrap();
        for k in 0..=64 {
            let t = TAU * k as f64 / 64.0;
            let (a, b) = (out.state(t), s.state(t));
            assert!(norm_inf(&[a[0] - b[0], a[1] - b[1]]) < 1e-8, "t = {t}");
        }
    }
}
