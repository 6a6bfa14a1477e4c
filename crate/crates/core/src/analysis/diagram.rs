//! Stability diagrams in the `(e, λ)` plane.

use std::fmt::Write as _;
use std::io;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::conditions::{check_linear_stability, check_uniqueness};
use crate::dynamics::DissipationParams;
use crate::potential::{presets, PotentialError, SystemParams};
use crate::solver::{
    monodromy, solve_periodic_conservative, Classification, IntegratorConfig, Multistart, ShootingOptions,
};

/// How the two bodies relate across the diagram.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Geometry {
    /// `λ_j = λ`, `d̂_j = q̂_j = q̂`.
    #[default]
    EqualBodies,
    /// Body 1 twice the size of body 2: `λ₁ = λ/8`, `q̂₂ = q̂/32`, `λ = λ₂`, `q̂ = q̂₁`.
    TwoToOne,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagramRequest {
    pub e_axis: Vec<f64>,
    pub lambda_axis: Vec<f64>,
    pub qhat: f64,
    #[serde(default)]
    pub geometry: Geometry,
    /// Semi-major axis in model units; the spin equations do not depend on it.
    #[serde(default = "default_a")]
    pub a: f64,
}

fn default_a() -> f64 {
    10.0
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DiagramError {
    #[error("axis {0} must be non-empty and strictly increasing")]
    Axis(&'static str),
    #[error("eccentricities must lie in [0, 0.9] and λ > 0 (offending value {0})")]
    Range(f64),
    #[error(transparent)]
    Potential(#[from] PotentialError),
}

impl DiagramRequest {
    /// `n_e` points on `[0, e_max]` and `n_λ` points on `(0, λ_max]`.
    pub fn uniform(n_e: usize, e_max: f64, n_l: usize, l_max: f64, qhat: f64, geometry: Geometry) -> Self {
        DiagramRequest {
            e_axis: (0..n_e).map(|i| e_max * i as f64 / (n_e.max(2) - 1) as f64).collect(),
            lambda_axis: (1..=n_l).map(|i| l_max * i as f64 / n_l as f64).collect(),
            qhat,
            geometry,
            a: default_a(),
        }
    }

    pub fn validate(&self) -> Result<(), DiagramError> {
        let increasing = |v: &[f64]| !v.is_empty() && v.windows(2).all(|w| w[1] > w[0]);
        if !increasing(&self.e_axis) {
            return Err(DiagramError::Axis("e"));
        }
        if !increasing(&self.lambda_axis) {
            return Err(DiagramError::Axis("lambda"));
        }
        if let Some(&e) = self.e_axis.iter().find(|e| !(0.0..=0.9).contains(*e)) {
            return Err(DiagramError::Range(e));
        }
        if let Some(&l) = self.lambda_axis.iter().find(|l| !(**l > 0.0 && l.is_finite())) {
            return Err(DiagramError::Range(l));
        }
        if !(self.qhat >= 0.0 && self.qhat.is_finite()) {
            return Err(DiagramError::Range(self.qhat));
        }
        Ok(())
    }

    pub fn params(&self, e: f64, lambda: f64) -> Result<SystemParams, PotentialError> {
        match self.geometry {
            Geometry::EqualBodies => presets::equal_bodies(e, self.a, lambda, self.qhat),
            Geometry::TwoToOne => presets::two_to_one(e, self.a, lambda, self.qhat),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NumericStatus {
    Stable,
    Unstable,
    Marginal,
    Failed,
}

impl NumericStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            NumericStatus::Stable => "stable",
            NumericStatus::Unstable => "unstable",
            NumericStatus::Marginal => "marginal",
            NumericStatus::Failed => "failed",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagramCell {
    pub e: f64,
    pub lambda: f64,
    pub analytic_unique: bool,
    pub analytic_stable: bool,
    pub numeric_status: NumericStatus,
    pub max_multiplier_modulus: Option<f64>,
    /// Why the numeric pipeline failed, if it did.
    pub failure: Option<String>,
}

/// Cells in row-major order: one row per `λ`, columns along `e`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagramGrid {
    pub e_axis: Vec<f64>,
    pub lambda_axis: Vec<f64>,
    pub qhat: f64,
    pub geometry: Geometry,
    pub cells: Vec<DiagramCell>,
}

impl DiagramGrid {
    pub fn cell(&self, i_lambda: usize, i_e: usize) -> &DiagramCell {
        &self.cells[i_lambda * self.e_axis.len() + i_e]
    }

    /// Analytically stable cells whose numeric multipliers leave the unit disc.
    pub fn soundness_violations(&self) -> Vec<&DiagramCell> {
        self.cells
            .iter()
            .filter(|c| {
                c.analytic_stable
                    && (c.numeric_status == NumericStatus::Failed
                        || c.max_multiplier_modulus.is_none_or(|m| m > 1.0 + crate::solver::floquet::UNIT_CIRCLE_TOL))
            })
            .collect()
    }

    pub fn write_csv<W: io::Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "e,lambda,qhat,analytic_unique,analytic_stable,numeric_status,max_multiplier_modulus")?;
        for c in &self.cells {
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                fmt_sig(c.e, 9),
                fmt_sig(c.lambda, 9),
                fmt_sig(self.qhat, 9),
                c.analytic_unique,
                c.analytic_stable,
                c.numeric_status.as_str(),
                c.max_multiplier_modulus.map_or(String::new(), |m| fmt_sig(m, 9)),
            )?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii")
    }
}

/// `x` with `digits` significant digits, in the style of C's `%g`.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mant, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if exp < -5 || exp >= digits as i32 {
        let mut out = trim(mant);
        let _ = write!(out, "e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs());
        out
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim(&format!("{:.*}", decimals, x))
    }
}

fn numeric_cell(p: &SystemParams, guess: Option<[f64; 2]>, cfg: &IntegratorConfig) -> (NumericStatus, Option<f64>, Option<String>, Option<[f64; 2]>) {
    let ls = p.lambda_set();
    let opts = ShootingOptions {
        multistart: Multistart::Never,
        guess,
        ..ShootingOptions::default()
    };
    let sol = match solve_periodic_conservative(p, &ls, &opts, cfg) {
        Ok(s) => s,
        Err(e) => return (NumericStatus::Failed, None, Some(e.to_string()), None),
    };
    match monodromy(p, &ls, &DissipationParams::NONE, &sol, cfg) {
        Ok(m) => {
            let status = match m.classification {
                Classification::ConservativeStable => NumericStatus::Stable,
                Classification::Marginal => NumericStatus::Marginal,
                _ => NumericStatus::Unstable,
            };
            (status, Some(m.max_modulus), None, Some(sol.v0))
        }
        Err(e) => (NumericStatus::Failed, None, Some(e.to_string()), Some(sol.v0)),
    }
}

fn scan_row(req: &DiagramRequest, lambda: f64, cfg: &IntegratorConfig) -> Vec<DiagramCell> {
    let mut guess: Option<[f64; 2]> = None;
    req.e_axis
        .iter()
        .map(|&e| {
            let p = match req.params(e, lambda) {
                Ok(p) => p,
                Err(err) => {
                    return DiagramCell {
                        e,
                        lambda,
                        analytic_unique: false,
                        analytic_stable: false,
                        numeric_status: NumericStatus::Failed,
                        max_multiplier_modulus: None,
                        failure: Some(err.to_string()),
                    }
                }
            };
            let ls = p.lambda_set();
            let uniq = check_uniqueness(&p, &ls);
            let stab = check_linear_stability(&p, &ls);
            let (status, modulus, failure, v0) = numeric_cell(&p, guess, cfg);
            if v0.is_some() {
                guess = v0;
            }
            DiagramCell {
                e,
                lambda,
                analytic_unique: uniq.uniqueness_ok,
                analytic_stable: stab.stable,
                numeric_status: status,
                max_multiplier_modulus: modulus,
                failure,
            }
        })
        .collect()
}

/// Evaluates every cell; rows run in parallel on the current rayon pool and
/// each row is swept in `e` with the previous solution as initial guess.
pub fn scan_diagram(req: &DiagramRequest, cfg: &IntegratorConfig) -> Result<DiagramGrid, DiagramError> {
    req.validate()?;
    req.params(req.e_axis[0], req.lambda_axis[0])?;
    let rows: Vec<Vec<DiagramCell>> = req
        .lambda_axis
        .par_iter()
        .map(|&l| scan_row(req, l, cfg))
        .collect();
    Ok(DiagramGrid {
        e_axis: req.e_axis.clone(),
        lambda_axis: req.lambda_axis.clone(),
        qhat: req.qhat,
        geometry: req.geometry,
        cells: rows.into_iter().flatten().collect(),
    })
}
