//! Sufficient conditions for uniqueness and strong linear stability of `Θ*`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::potential::{LambdaSet, SystemParams};

/// Sums of the coupling coefficients over `Ξ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingSums {
    /// `Σ m_j² Λ / 𝒞_j`.
    pub squared: [f64; 2],
    /// `Σ |m₁m₂| Λ / √(𝒞₁𝒞₂)`.
    pub mixed: f64,
    /// `Σ |m_j| Λ / 𝒞_j`.
    pub linear: [f64; 2],
    /// `Σ max(|m₁|/𝒞₁, |m₂|/𝒞₂) Λ`.
    pub max_linear: f64,
}

pub fn coupling_sums(p: &SystemParams, ls: &LambdaSet) -> CouplingSums {
    let c = p.c();
    let root = (c[0] * c[1]).sqrt();
    let mut s = CouplingSums {
        squared: [0.0; 2],
        mixed: 0.0,
        linear: [0.0; 2],
        max_linear: 0.0,
    };
    for t in ls.torque_terms() {
        let m = [t.m1.abs() as f64, t.m2.abs() as f64];
        for j in 0..2 {
            s.squared[j] += m[j] * m[j] / c[j] * t.value;
            s.linear[j] += m[j] / c[j] * t.value;
        }
        s.mixed += m[0] * m[1] / root * t.value;
        s.max_linear += (m[0] / c[0]).max(m[1] / c[1]) * t.value;
    }
    s
}

/// The same sums in terms of `λ_j, d̂_j, q̂_j`.
pub fn coupling_sums_closed_form(p: &SystemParams) -> CouplingSums {
    let l = p.lambda();
    let d = p.dhat();
    let q = p.qhat();
    let c = p.c();
    let squared = [0, 1].map(|j| {
        l[j] * (25.0 / 4.0 * d[j] + 25.0 / 28.0 * q[j] + 19.0 / 4.0 * d[1 - j] + 5.0 / 4.0 * q[1 - j])
    });
    let linear = [0, 1].map(|j| {
        l[j] * (25.0 / 8.0 * d[j] + 25.0 / 28.0 * q[j] + 19.0 / 4.0 * d[1 - j] + 5.0 / 4.0 * q[1 - j])
    });
    let mixed = 19.0 / 4.0 * (c[0] / c[1]).sqrt() * l[0] * d[1];
    // Each (m₁, m₂) term enters max(|m₁|/𝒞₁, |m₂|/𝒞₂) through whichever body dominates.
    let ls = p.lambda_set();
    let max_linear = ls
        .torque_terms()
        .map(|t| (t.m1.abs() as f64 / c[0]).max(t.m2.abs() as f64 / c[1]) * t.value)
        .sum();
    CouplingSums {
        squared,
        mixed,
        linear,
        max_linear,
    }
}

/// `α_j`; `None` when `λ_j = 0` and the ratio is undefined.
pub fn compute_alpha(p: &SystemParams, ls: &LambdaSet) -> [Option<f64>; 2] {
    let s = coupling_sums(p, ls);
    let w = (1.0 - p.eccentricity()).powi(-2);
    let l = p.lambda();
    [0, 1].map(|j| {
        let num = w * (s.squared[j] + s.mixed);
        if l[j] > 0.0 {
            Some(num / l[j])
        } else if num == 0.0 {
            Some(0.0)
        } else {
            None
        }
    })
}

/// `α_j λ_j`, always defined.
fn alpha_lambda(p: &SystemParams, s: &CouplingSums) -> [f64; 2] {
    let w = (1.0 - p.eccentricity()).powi(-2);
    [w * (s.squared[0] + s.mixed), w * (s.squared[1] + s.mixed)]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniquenessReport {
    pub alpha: [Option<f64>; 2],
    pub margin: f64,
    pub uniqueness_ok: bool,
}

/// `1 > (1−e)⁻³ max_j λ_j(1 + α_j)`.
pub fn check_uniqueness(p: &SystemParams, ls: &LambdaSet) -> UniquenessReport {
    let s = coupling_sums(p, ls);
    let al = alpha_lambda(p, &s);
    let l = p.lambda();
    let k = (1.0 - p.eccentricity()).powi(-3);
    let rhs = k * (l[0] + al[0]).max(l[1] + al[1]);
    let margin = 1.0 - rhs;
    UniquenessReport {
        alpha: compute_alpha(p, ls),
        margin,
        uniqueness_ok: margin > 0.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Margins {
    pub uniqueness: f64,
    pub lin1: f64,
    pub lin2: f64,
    /// Not evaluated when the second condition fails.
    pub lin3: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub alpha: [Option<f64>; 2],
    pub m_bound: f64,
    pub uniqueness_ok: bool,
    pub lin1_ok: bool,
    pub lin2_ok: bool,
    pub lin3_ok: bool,
    pub stable: bool,
    pub margins: Margins,
}

/// Forcing bound `4e√(1−e²)/(1−e)⁴ ≥ 2|f̈|`.
pub fn forcing_bound(e: f64) -> f64 {
    4.0 * e * (1.0 - e * e).sqrt() / (1.0 - e).powi(4)
}

/// All uniqueness and stability conditions.
pub fn check_linear_stability(p: &SystemParams, ls: &LambdaSet) -> ConditionReport {
    let e = p.eccentricity();
    let s = coupling_sums(p, ls);
    let l = p.lambda();
    let k3 = (1.0 - e).powi(-3);
    let k5 = (1.0 - e).powi(-5);
    let uniq = check_uniqueness(p, ls);

    let lin1 = 1.0 / (PI * PI) - (k3 * (l[0] + l[1]) + k5 * (s.squared[0] + s.squared[1]));
    let m_bound = k3 * l[0].max(l[1]) + k5 * s.max_linear + forcing_bound(e);
    let lin2 = 1.0 / (4.0 * PI) - m_bound;
    let lin3 = (lin2 > 0.0).then(|| {
        let al = alpha_lambda(p, &s);
        (2.0 * PI * PI * m_bound).cos() * l[0].min(l[1]) - al[0].max(al[1])
    });
    let lin1_ok = lin1 > 0.0;
    let lin2_ok = lin2 > 0.0;
    let lin3_ok = lin3.is_some_and(|m| m > 0.0);
    ConditionReport {
        alpha: uniq.alpha,
        m_bound,
        uniqueness_ok: uniq.uniqueness_ok,
        lin1_ok,
        lin2_ok,
        lin3_ok,
        stable: lin1_ok && lin2_ok && lin3_ok,
        margins: Margins {
            uniqueness: uniq.margin,
            lin1,
            lin2,
            lin3,
        },
    }
}
