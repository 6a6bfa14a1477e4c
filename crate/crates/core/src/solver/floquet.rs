//! Monodromy matrix and Floquet multipliers of a periodic solution.

use std::f64::consts::TAU;

use nalgebra::Matrix4;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::integrator::{integrate, IntegratorConfig};
use super::shooting::PeriodicSolution;
use super::{variational_parts, SolverError};
use crate::dynamics::{DissipationParams, SpinModel};
use crate::potential::{LambdaSet, SystemParams};

/// Band around the unit circle, and around `±1`, treated as exact.
pub const UNIT_CIRCLE_TOL: f64 = 1e-6;
/// Margin below 1 required to call a dissipative solution attracting.
pub const ATTRACTING_MARGIN: f64 = 1e-9;
const CONVERGED: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    ConservativeStable,
    ConservativeUnstable,
    DissipativeAttracting,
    DissipativeNonAttracting,
    /// A multiplier on the unit circle within tolerance of `±1`.
    Marginal,
}

impl Classification {
    pub fn as_str(&self) -> &'static str {
        match self {
            Classification::ConservativeStable => "conservative-stable",
            Classification::ConservativeUnstable => "conservative-unstable",
            Classification::DissipativeAttracting => "dissipative-attracting",
            Classification::DissipativeNonAttracting => "dissipative-non-attracting",
            Classification::Marginal => "marginal",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonodromyResult {
    /// Over one period, in `(y, ẏ)` with `y = 𝒞^{1/2}Θ` when conservative
    /// and `y = Θ` otherwise.
    pub monodromy: [[f64; 4]; 4],
    pub multipliers: Vec<Complex64>,
    pub max_modulus: f64,
    pub classification: Classification,
    pub scaled: bool,
}

impl MonodromyResult {
    pub fn matrix(&self) -> Matrix4<f64> {
        Matrix4::from_fn(|i, j| self.monodromy[i][j])
    }

    pub fn determinant(&self) -> f64 {
        self.matrix().determinant()
    }

    /// `‖MᵀJM − J‖_max` for the canonical symplectic form.
    pub fn symplectic_defect(&self) -> f64 {
        let m = self.matrix();
        let j = symplectic_form();
        (m.transpose() * j * m - j).amax()
    }
}

pub fn symplectic_form() -> Matrix4<f64> {
    let mut j = Matrix4::zeros();
    j[(0, 2)] = 1.0;
    j[(1, 3)] = 1.0;
    j[(2, 0)] = -1.0;
    j[(3, 1)] = -1.0;
    j
}

/// Eigenvalues of `[[a, b], [c, d]]`.
fn eig2(a: f64, b: f64, c: f64, d: f64) -> [Complex64; 2] {
    let half_tr = 0.5 * (a + d);
    let disc = 0.25 * (a - d) * (a - d) + b * c;
    if disc >= 0.0 {
        let s = disc.sqrt();
        [Complex64::new(half_tr + s, 0.0), Complex64::new(half_tr - s, 0.0)]
    } else {
        let s = (-disc).sqrt();
        [Complex64::new(half_tr, s), Complex64::new(half_tr, -s)]
    }
}

/// Multipliers, sorted by decreasing modulus then argument.
pub fn multipliers(m: &[[f64; 4]; 4]) -> Vec<Complex64> {
    let cross = [(0, 1), (0, 3), (2, 1), (2, 3), (1, 0), (1, 2), (3, 0), (3, 2)];
    let mut out: Vec<Complex64> = if cross.iter().all(|&(i, j)| m[i][j] == 0.0) {
        let mut v = eig2(m[0][0], m[0][2], m[2][0], m[2][2]).to_vec();
        v.extend(eig2(m[1][1], m[1][3], m[3][1], m[3][3]));
        v
    } else {
        Matrix4::from_fn(|i, j| m[i][j]).complex_eigenvalues().iter().copied().collect()
    };
    out.sort_by(|a, b| b.norm().total_cmp(&a.norm()).then(a.arg().total_cmp(&b.arg())));
    out
}

pub fn classify(mults: &[Complex64], conservative: bool) -> Classification {
    let max = mults.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if conservative {
        if max > 1.0 + UNIT_CIRCLE_TOL {
            Classification::ConservativeUnstable
        } else if mults.iter().any(|z| {
            (z - Complex64::new(1.0, 0.0)).norm() < UNIT_CIRCLE_TOL || (z + Complex64::new(1.0, 0.0)).norm() < UNIT_CIRCLE_TOL
        }) {
            Classification::Marginal
        } else {
            Classification::ConservativeStable
        }
    } else if max < 1.0 - ATTRACTING_MARGIN {
        Classification::DissipativeAttracting
    } else {
        Classification::DissipativeNonAttracting
    }
}

/// Monodromy of the linearisation about `sol` over `[0, 2π]`.
pub fn monodromy(
    p: &SystemParams,
    ls: &LambdaSet,
    delta: &DissipationParams,
    sol: &PeriodicSolution,
    cfg: &IntegratorConfig,
) -> Result<MonodromyResult, SolverError> {
    if !(sol.residual < CONVERGED) {
        return Err(SolverError::Precondition(format!(
            "periodic solution not converged (residual {:e})",
            sol.residual
        )));
    }
    if sol.delta != *delta {
        return Err(SolverError::Precondition(format!(
            "solution computed for δ = {:?}, monodromy requested for δ = {:?}",
            sol.delta.delta(),
            delta.delta()
        )));
    }
    let m = SpinModel::new(p, ls);
    let scaled = delta.is_zero();
    let mut y0 = [0.0; 20];
    y0[..4].copy_from_slice(&sol.initial_state());
    for i in 0..4 {
        y0[4 + 4 * i + i] = 1.0;
    }
    // Φ row-major in y[4..20]; rows 0–1 are positions, 2–3 velocities.
    let rhs = |t: f64, y: &[f64; 20]| {
        let base = [y[0], y[1], y[2], y[3]];
        let (f, b, d) = variational_parts(&m, delta, t, &base, scaled);
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
    let tr = integrate(rhs, y0, 0.0, TAU, cfg, false)?;
    let mut mono = [[0.0; 4]; 4];
    for (i, row) in mono.iter_mut().enumerate() {
        row.copy_from_slice(&tr.y1[4 + 4 * i..8 + 4 * i]);
    }
    let mults = multipliers(&mono);
    let max_modulus = mults.iter().map(|z| z.norm()).fold(0.0, f64::max);
    Ok(MonodromyResult {
        monodromy: mono,
        classification: classify(&mults, scaled),
        multipliers: mults,
        max_modulus,
        scaled,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::presets;
    use crate::solver::shooting::{solve_periodic_conservative, ShootingOptions};

    fn circular(lambda: f64) -> MonodromyResult {
        let p = presets::equal_bodies(0.0, 5.0, lambda, 0.0).unwrap();
        let ls = p.lambda_set();
        let cfg = IntegratorConfig::default();
        let sol = solve_periodic_conservative(&p, &ls, &ShootingOptions::default(), &cfg).unwrap();
        monodromy(&p, &ls, &DissipationParams::NONE, &sol, &cfg).unwrap()
    }

    #[test]
    fn circular_multipliers_are_rotations() {
        let r = circular(0.1);
        let w = std::f64::consts::TAU * 0.1f64.sqrt();
        let expect = Complex64::new(w.cos(), w.sin());
        let hits = r.multipliers.iter().filter(|z| (*z - expect).norm() < 1e-8).count();
        let conj = r.multipliers.iter().filter(|z| (*z - expect.conj()).norm() < 1e-8).count();
        assert_eq!((hits, conj), (2, 2), "{:?}", r.multipliers);
        assert_eq!(r.classification, Classification::ConservativeStable);
    }

    #[test]
    fn resonance_boundary_has_minus_one() {
        let r = circular(0.25);
        assert!(r.multipliers.iter().any(|z| (z + 1.0).norm() < 1e-6));
        assert_eq!(r.classification, Classification::Marginal);
    }

    #[test]
    fn symplectic_in_conservative_case() {
        let p = SystemParams::new(0.1, 4.0, 0.6, 0.2, 0.15, 0.01, 0.03).unwrap();
        let ls = p.lambda_set();
        let cfg = IntegratorConfig::default();
        let sol = solve_periodic_conservative(&p, &ls, &ShootingOptions::default(), &cfg).unwrap();
        let r = monodromy(&p, &ls, &DissipationParams::NONE, &sol, &cfg).unwrap();
        assert!((r.determinant() - 1.0).abs() < 1e-8);
        assert!(r.symplectic_defect() < 1e-8);
        let prod = r.multipliers[0].norm() * r.multipliers[3].norm();
        assert!((prod - 1.0).abs() < 1e-6);
    }

    #[test]
    fn rejects_unconverged_or_mismatched() {
        let p = presets::equal_bodies(0.0, 5.0, 0.1, 0.0).unwrap();
        let ls = p.lambda_set();
        let cfg = IntegratorConfig::default();
        let mut sol = solve_periodic_conservative(&p, &ls, &ShootingOptions::default(), &cfg).unwrap();
        let d = DissipationParams::new([0.1, 0.1]).unwrap();
        assert!(matches!(monodromy(&p, &ls, &d, &sol, &cfg), Err(SolverError::Precondition(_))));
        sol.residual = 1.0;
        assert!(matches!(
            monodromy(&p, &ls, &DissipationParams::NONE, &sol, &cfg),
            Err(SolverError::Precondition(_))
        ));
    }

    #[test]
    fn classification_bands() {
        let on = |a: f64| Complex64::from_polar(1.0, a);
        assert_eq!(classify(&[on(1.0), on(-1.0), on(2.0), on(-2.0)], true), Classification::ConservativeStable);
        assert_eq!(classify(&[Complex64::new(1.1, 0.0), Complex64::new(1.0 / 1.1, 0.0)], true), Classification::ConservativeUnstable);
        assert_eq!(classify(&[Complex64::new(-1.0, 0.0)], true), Classification::Marginal);
        assert_eq!(classify(&[Complex64::new(0.9, 0.0)], false), Classification::DissipativeAttracting);
        assert_eq!(classify(&[Complex64::new(1.0, 0.0)], false), Classification::DissipativeNonAttracting);
    }
}
