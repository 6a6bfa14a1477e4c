//! Dormand–Prince 5(4) with Hairer's step control and continuous output.

use serde::{Deserialize, Serialize};
use thiserror::Error;

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

const SAFETY: f64 = 0.9;
const BETA: f64 = 0.04;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

/// Tolerances and step limits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_step: f64,
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            abs_tol: 1e-11,
            rel_tol: 1e-11,
            max_step: 0.5,
            max_steps: 2_000_000,
        }
    }
}

impl IntegratorConfig {
    pub fn with_tol(tol: f64) -> Self {
        IntegratorConfig {
            abs_tol: tol,
            rel_tol: tol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), IntegratorError> {
        let tol_ok = |x: f64| x > 0.0 && x <= 1e-3;
        if !tol_ok(self.abs_tol) || !tol_ok(self.rel_tol) {
            return Err(IntegratorError::Config(format!(
                "tolerances must lie in (0, 1e-3] (abs_tol = {}, rel_tol = {})",
                self.abs_tol, self.rel_tol
            )));
        }
        if !(self.max_step > 0.0) || self.max_steps == 0 {
            return Err(IntegratorError::Config(format!(
                "max_step = {} and max_steps = {} must be positive",
                self.max_step, self.max_steps
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntegratorError {
    #[error("invalid integrator configuration: {0}")]
    Config(String),
    #[error("step size underflow at t = {t} (h = {h:e}); state {state:?}")]
    Stiff { t: f64, h: f64, state: Vec<f64> },
    #[error("non-finite derivative at t = {t}; state {state:?}")]
    NonFinite { t: f64, state: Vec<f64> },
    #[error("step budget of {0} exhausted")]
    TooManySteps(usize),
}

#[derive(Debug, Clone)]
struct Segment<const N: usize> {
    t: f64,
    h: f64,
    cont: [[f64; N]; 5],
}

/// Result of one integration, with optional continuous output.
#[derive(Debug, Clone)]
pub struct Trajectory<const N: usize> {
    pub t0: f64,
    pub t1: f64,
    pub y0: [f64; N],
    pub y1: [f64; N],
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
    segments: Vec<Segment<N>>,
}

impl<const N: usize> Trajectory<N> {
    pub fn has_dense_output(&self) -> bool {
        !self.segments.is_empty() || self.t0 == self.t1
    }

    /// State at `t` inside the integrated interval, from the continuous extension.
    pub fn eval(&self, t: f64) -> Option<[f64; N]> {
        let (lo, hi) = if self.t0 <= self.t1 {
            (self.t0, self.t1)
        } else {
            (self.t1, self.t0)
        };
        if !(t >= lo && t <= hi) {
            return None;
        }
        if t == self.t0 {
            return Some(self.y0);
        }
        if t == self.t1 {
            return Some(self.y1);
        }
        let forward = self.t1 > self.t0;
        let idx = self
            .segments
            .partition_point(|s| if forward { s.t + s.h < t } else { s.t + s.h > t });
        let seg = self.segments.get(idx.min(self.segments.len().checked_sub(1)?))?;
        let s = (t - seg.t) / seg.h;
        let s1 = 1.0 - s;
        let c = &seg.cont;
        let mut y = [0.0; N];
        for i in 0..N {
            y[i] = c[0][i] + s * (c[1][i] + s1 * (c[2][i] + s * (c[3][i] + s1 * c[4][i])));
        }
        Some(y)
    }
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, ks: &[[f64; N]; 7], coef: &[f64], out: &mut [f64; N]) {
    for i in 0..N {
        let mut acc = 0.0;
        for (j, c) in coef.iter().enumerate() {
            if *c != 0.0 {
                acc += c * ks[j][i];
            }
        }
        out[i] = y[i] + h * acc;
    }
}

fn finite<const N: usize>(v: &[f64; N]) -> bool {
    v.iter().all(|x| x.is_finite())
}

fn err_norm<const N: usize>(y0: &[f64; N], y1: &[f64; N], errv: &[f64; N], cfg: &IntegratorConfig) -> f64 {
    let mut sum = 0.0;
    for i in 0..N {
        let sc = cfg.abs_tol + cfg.rel_tol * y0[i].abs().max(y1[i].abs());
        let r = errv[i] / sc;
        sum += r * r;
    }
    (sum / N as f64).sqrt()
}

fn initial_step<const N: usize, F>(
    rhs: &mut F,
    t0: f64,
    y0: &[f64; N],
    f0: &[f64; N],
    dir: f64,
    cfg: &IntegratorConfig,
) -> f64
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    let mut dnf = 0.0;
    let mut dny = 0.0;
    for i in 0..N {
        let sk = cfg.abs_tol + cfg.rel_tol * y0[i].abs();
        dnf += (f0[i] / sk).powi(2);
        dny += (y0[i] / sk).powi(2);
    }
    let mut h = if dnf <= 1e-10 || dny <= 1e-10 {
        1e-6
    } else {
        (dny / dnf).sqrt() * 0.01
    };
    h = h.min(cfg.max_step);
    let mut y1 = [0.0; N];
    for i in 0..N {
        y1[i] = y0[i] + dir * h * f0[i];
    }
    let f1 = rhs(t0 + dir * h, &y1);
    let mut der2 = 0.0;
    for i in 0..N {
        let sk = cfg.abs_tol + cfg.rel_tol * y0[i].abs();
        der2 += ((f1[i] - f0[i]) / sk).powi(2);
    }
    let der2 = der2.sqrt() / h;
    let der12 = der2.max(dnf.sqrt());
    let h1 = if der12 <= 1e-15 {
        (h * 1e-3).max(1e-6)
    } else {
        (0.01 / der12).powf(0.2)
    };
    (100.0 * h).min(h1).min(cfg.max_step)
}

/// Integrates `y' = rhs(t, y)` from `t0` to `t1` (either direction).
pub fn integrate<const N: usize, F>(
    mut rhs: F,
    y0: [f64; N],
    t0: f64,
    t1: f64,
    cfg: &IntegratorConfig,
    dense: bool,
) -> Result<Trajectory<N>, IntegratorError>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    cfg.validate()?;
    let mut traj = Trajectory {
        t0,
        t1,
        y0,
        y1: y0,
        accepted: 0,
        rejected: 0,
        evaluations: 0,
        segments: Vec::new(),
    };
    if t0 == t1 {
        return Ok(traj);
    }
    let dir = if t1 > t0 { 1.0 } else { -1.0 };
    let span = (t1 - t0).abs();
    let mut t = t0;
    let mut y = y0;
    let mut ks = [[0.0; N]; 7];
    ks[0] = rhs(t, &y);
    traj.evaluations += 1;
    if !finite(&ks[0]) {
        return Err(IntegratorError::NonFinite { t, state: y.to_vec() });
    }
    let mut h = initial_step(&mut rhs, t, &y, &ks[0], dir, cfg).min(span);
    traj.evaluations += 1;
    let mut facold: f64 = 1e-4;
    let mut last_rejected = false;
    let mut ystage = [0.0; N];
    let mut ynew = [0.0; N];
    let mut errv = [0.0; N];

    loop {
        if traj.accepted + traj.rejected >= cfg.max_steps {
            return Err(IntegratorError::TooManySteps(cfg.max_steps));
        }
        let remaining = (t1 - t).abs();
        let mut last = false;
        if h >= remaining * (1.0 - 1e-12) {
            h = remaining;
            last = true;
        }
        if h.abs() <= 1e-14 * t.abs().max(1.0) {
            return Err(IntegratorError::Stiff { t, h, state: y.to_vec() });
        }
        let hs = dir * h;
        for s in 1..7 {
            axpy(&y, hs, &ks, &A[s][..s], &mut ystage);
            ks[s] = rhs(t + C[s] * hs, &ystage);
            if s == 6 {
                ynew = ystage;
            }
        }
        traj.evaluations += 6;
        let ok = finite(&ks[6]) && ks[1..6].iter().all(finite);
        let err = if ok {
            for i in 0..N {
                let mut acc = 0.0;
                for j in 0..7 {
                    acc += E[j] * ks[j][i];
                }
                errv[i] = hs * acc;
            }
            err_norm(&y, &ynew, &errv, cfg)
        } else {
            f64::INFINITY
        };

        if err <= 1.0 {
            let fac11 = err.powf(0.2 - BETA * 0.75);
            let fac = (fac11 / facold.powf(BETA) / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
            let mut hnew = h / fac;
            facold = err.max(1e-4);
            if dense {
                let mut cont = [[0.0; N]; 5];
                for i in 0..N {
                    let ydiff = ynew[i] - y[i];
                    let bspl = hs * ks[0][i] - ydiff;
                    cont[0][i] = y[i];
                    cont[1][i] = ydiff;
                    cont[2][i] = bspl;
                    cont[3][i] = ydiff - hs * ks[6][i] - bspl;
                    let mut acc = 0.0;
                    for j in 0..7 {
                        acc += D[j] * ks[j][i];
                    }
                    cont[4][i] = hs * acc;
                }
                traj.segments.push(Segment { t, h: hs, cont });
            }
            traj.accepted += 1;
            y = ynew;
            ks[0] = ks[6];
            if last {
                t = t1;
                break;
            }
            t += hs;
            if last_rejected {
                hnew = hnew.min(h);
            }
            last_rejected = false;
            h = hnew.min(cfg.max_step);
        } else {
            traj.rejected += 1;
            last_rejected = true;
            h = if err.is_finite() {
                h / (err.powf(0.2 - BETA * 0.75) / SAFETY).min(1.0 / FAC_MIN)
            } else {
                h * 0.25
            };
        }
    }
    debug_assert_eq!(t, t1);
    traj.y1 = y;
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    #[test]
    fn harmonic_oscillator_returns_after_one_period() {
        let cfg = IntegratorConfig::default();
        let tr = integrate(|_, y: &[f64; 2]| [y[1], -y[0]], [1.0, 0.0], 0.0, TAU, &cfg, false).unwrap();
        assert!((tr.y1[0] - 1.0).abs() < 1e-9 && tr.y1[1].abs() < 1e-9);
    }

    #[test]
    fn backward_integration_undoes_forward() {
        let cfg = IntegratorConfig::default();
        let f = |t: f64, y: &[f64; 1]| [y[0] * t.cos()];
        let fw = integrate(f, [1.0], 0.0, 3.0, &cfg, false).unwrap();
        assert!((fw.y1[0] - 3f64.sin().exp()).abs() < 1e-9);
        let bw = integrate(f, fw.y1, 3.0, 0.0, &cfg, false).unwrap();
        assert!((bw.y1[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn dense_output_is_accurate() {
        let cfg = IntegratorConfig::with_tol(1e-10);
        let tr = integrate(|_, y: &[f64; 2]| [y[1], -y[0]], [0.0, 1.0], 0.0, 10.0, &cfg, true).unwrap();
        for i in 0..=200 {
            let t = 0.05 * i as f64;
            let y = tr.eval(t).unwrap();
            assert!((y[0] - t.sin()).abs() < 1e-8, "t = {t}");
        }
        assert!(tr.eval(10.5).is_none());
        let bw = integrate(|_, y: &[f64; 2]| [y[1], -y[0]], [0.0, 1.0], 0.0, -4.0, &cfg, true).unwrap();
        assert!((bw.eval(-2.5).unwrap()[0] - (-2.5f64).sin()).abs() < 1e-8);
    }

    #[test]
    fn zero_field_stays_put() {
        let cfg = IntegratorConfig::default();
        let tr = integrate(|_, _: &[f64; 4]| [0.0; 4], [0.0; 4], 0.0, TAU, &cfg, true).unwrap();
        assert_eq!(tr.y1, [0.0; 4]);
        assert_eq!(tr.eval(1.0).unwrap(), [0.0; 4]);
    }

    #[test]
    fn blow_up_is_reported() {
        let cfg = IntegratorConfig::default();
        let r = integrate(|_, y: &[f64; 1]| [y[0] * y[0]], [1.0], 0.0, 2.0, &cfg, false);
        assert!(matches!(
            r,
            Err(IntegratorError::Stiff { .. }) | Err(IntegratorError::NonFinite { .. }) | Err(IntegratorError::TooManySteps(_))
        ));
    }

    #[test]
    fn rejects_bad_tolerances() {
        let cfg = IntegratorConfig::with_tol(0.1);
        assert!(matches!(
            integrate(|_, y: &[f64; 1]| *y, [1.0], 0.0, 1.0, &cfg, false),
            Err(IntegratorError::Config(_))
        ));
    }

    #[test]
    fn pendulum_energy_drift() {
        let cfg = IntegratorConfig::default();
        let energy = |y: &[f64; 2]| 0.5 * y[1] * y[1] - 0.3 * y[0].cos();
        let y0 = [1.0, 0.2];
        let tr = integrate(|_, y: &[f64; 2]| [y[1], -0.3 * y[0].sin()], y0, 0.0, 100.0 * TAU, &cfg, false).unwrap();
        assert!((energy(&tr.y1) - energy(&y0)).abs() < 1e-9);
    }
}
