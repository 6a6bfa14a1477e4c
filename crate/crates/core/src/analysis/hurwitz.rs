//! Routh–Hurwitz test for the damped circular linearisation
//! `ÿ + diag(δ) ẏ + A y = 0`.

use serde::{Deserialize, Serialize};

use crate::dynamics::Mat2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HurwitzReport {
    /// Coefficients `a₁..a₄` of `ω⁴ + a₁ω³ + a₂ω² + a₃ω + a₄`.
    pub coefficients: [f64; 4],
    /// Hurwitz determinants `D₁..D₄`.
    pub determinants: [f64; 4],
    pub stable: bool,
}

pub fn characteristic_polynomial(a: &Mat2, delta: [f64; 2]) -> [f64; 4] {
    let (x1, x2, s) = (a[0][0], a[1][1], a[0][1]);
    let [d1, d2] = delta;
    [d1 + d2, x1 + x2 + d1 * d2, x1 * d2 + x2 * d1, x1 * x2 - s * s]
}

pub fn routh_hurwitz(a: &Mat2, delta: [f64; 2]) -> HurwitzReport {
    let (x1, x2, s) = (a[0][0], a[1][1], a[0][1]);
    let [d1, d2] = delta;
    let coefficients = characteristic_polynomial(a, delta);
    let det = coefficients[3];
    let dd1 = d1 + d2;
    let dd2 = d1 * d1 * d2 + d2 * d2 * d1 + x1 * d1 + x2 * d2;
    let dd3 = dd1 * dd1 * s * s + d1 * d2 * (dd1 * (x1 * d2 + x2 * d1) + (x1 - x2) * (x1 - x2));
    let determinants = [dd1, dd2, dd3, dd3 * det];
    HurwitzReport {
        coefficients,
        determinants,
        stable: determinants.iter().all(|d| *d > 0.0),
    }
}
