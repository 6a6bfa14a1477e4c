//! Model parameters, the Λ coupling family and the potential energy.
//!
//! The truncated potential `V₀ + V₂ + V₄` is written through the Λ family;
//! the full spherical-harmonic series works straight from two [`BodyShape`]s.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::bodies::{stokes_closed_form, stokes_quadrature, BodiesError, BodyShape};
use crate::kepler::{KeplerError, Orbit, OrbitState};
use crate::special::factorial;

/// Relative slack for identities between derived parameters.
const IDENTITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PotentialError {
    #[error("parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("inconsistent parameters: {0}")]
    Inconsistent(String),
    #[error("degree {0} needs Stokes coefficients beyond the closed forms; enable quadrature")]
    UnsupportedDegree(u32),
    #[error("maximum degree must be even (got {0})")]
    OddDegree(u32),
    #[error("separation r = {0} must be positive")]
    Separation(f64),
    #[error(transparent)]
    Kepler(#[from] KeplerError),
    #[error(transparent)]
    Bodies(#[from] BodiesError),
    #[error("invalid system descriptor: {0}")]
    Descriptor(String),
}

fn invalid(name: &'static str, value: f64, reason: &'static str) -> PotentialError {
    PotentialError::InvalidParameter {
        name,
        value,
        reason,
    }
}

/// The independent model parameters with every dependent quantity derived.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemParams {
    orbit: Orbit,
    c: [f64; 2],
    lambda: [f64; 2],
    dhat: [f64; 2],
    qhat: [f64; 2],
    big_lambda: [f64; 2],
    mu: Option<f64>,
    masses: Option<[f64; 2]>,
    bodies: Option<[BodyShape; 2]>,
    explicit_qhat2: bool,
}

/// The six independent parameters plus an optional explicit `q̂₂`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsDescriptor {
    pub e: f64,
    pub a: f64,
    #[serde(rename = "C1")]
    pub c1: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub dhat1: f64,
    pub qhat1: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qhat2: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BodiesDescriptor {
    orbit: Orbit,
    body1: BodyShape,
    body2: BodyShape,
}

fn check_nonneg(name: &'static str, v: f64) -> Result<(), PotentialError> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(invalid(name, v, "must be finite and non-negative"))
    }
}

impl SystemParams {
    /// Builds the parameters from `(e; 𝒞₁, λ₁, λ₂, d̂₁, q̂₁)` and the orbit size.
    /// `d̂₂` and `q̂₂` follow from `Λ₁d̂₂ = Λ₂d̂₁` and `Λ₁q̂₂ = Λ₂q̂₁`.
    pub fn new(
        e: f64,
        a: f64,
        c1: f64,
        lambda1: f64,
        lambda2: f64,
        dhat1: f64,
        qhat1: f64,
    ) -> Result<Self, PotentialError> {
        Self::from_descriptor(&ParamsDescriptor {
            e,
            a,
            c1,
            lambda1,
            lambda2,
            dhat1,
            qhat1,
            qhat2: None,
        })
    }

    pub fn from_descriptor(d: &ParamsDescriptor) -> Result<Self, PotentialError> {
        let orbit = Orbit::new(d.a, d.e)?;
        if !(d.c1.is_finite() && d.c1 > 0.0 && d.c1 < 1.0) {
            return Err(invalid("C1", d.c1, "must lie in (0, 1)"));
        }
        let c = [d.c1, 1.0 - d.c1];
        let lambda = [d.lambda1, d.lambda2];
        for (name, l) in [("lambda1", d.lambda1), ("lambda2", d.lambda2)] {
            check_nonneg(name, l)?;
            if l >= 3.0 {
                return Err(invalid(name, l, "Λ_j < 3𝒞_j requires λ_j < 3"));
            }
        }
        check_nonneg("dhat1", d.dhat1)?;
        check_nonneg("qhat1", d.qhat1)?;
        if d.qhat1 < d.dhat1 {
            return Err(PotentialError::Inconsistent(format!(
                "qhat1 = {} is smaller than dhat1 = {}",
                d.qhat1, d.dhat1
            )));
        }
        let big = [lambda[0] * c[0], lambda[1] * c[1]];
        let (dhat2, mut qhat2) = if big[0] > 0.0 {
            let ratio = big[1] / big[0];
            (ratio * d.dhat1, ratio * d.qhat1)
        } else {
            if d.dhat1 != 0.0 {
                return Err(PotentialError::Inconsistent(
                    "lambda1 = 0 forces dhat1 = 0".into(),
                ));
            }
            if big[1] > 0.0 && d.qhat1 != 0.0 && d.qhat2.is_none() {
                return Err(PotentialError::Inconsistent(
                    "lambda1 = 0 < lambda2 forces qhat1 = 0 unless qhat2 is given".into(),
                ));
            }
            (0.0, 0.0)
        };
        if let Some(q2) = d.qhat2 {
            check_nonneg("qhat2", q2)?;
            if q2 < dhat2 * (1.0 - IDENTITY_TOL) {
                return Err(PotentialError::Inconsistent(format!(
                    "qhat2 = {q2} is smaller than the derived dhat2 = {dhat2}"
                )));
            }
            qhat2 = q2;
        }
        // Λ₁ = 3d₁M₂ and d̂₁ = d₁/(M₁a²) give M₁M₂ = Λ₁/(3a²d̂₁).
        let mu = (d.dhat1 > 0.0).then(|| big[0] / (3.0 * d.a * d.a * d.dhat1));
        let masses = mu.and_then(|mu| masses_from_mu(mu, c[0]));
        Ok(SystemParams {
            orbit,
            c,
            lambda,
            dhat: [d.dhat1, dhat2],
            qhat: [d.qhat1, qhat2],
            big_lambda: big,
            mu,
            masses,
            bodies: None,
            explicit_qhat2: d.qhat2.is_some(),
        })
    }

    /// Builds the parameters from an orbit and two bodies in model units
    /// (`M₁ + M₂ = 1`, `𝒞₁ + 𝒞₂ = 1`).
    pub fn from_bodies(orbit: Orbit, b1: BodyShape, b2: BodyShape) -> Result<Self, PotentialError> {
        let (m1, m2) = (b1.mass(), b2.mass());
        if ((m1 + m2) - 1.0).abs() > IDENTITY_TOL {
            return Err(PotentialError::Inconsistent(format!(
                "masses must sum to 1 (got {m1} + {m2})"
            )));
        }
        let (c1, c2) = (b1.polar_moment(), b2.polar_moment());
        if ((c1 + c2) - 1.0).abs() > IDENTITY_TOL {
            return Err(PotentialError::Inconsistent(format!(
                "polar moments must sum to 1 (got {c1} + {c2})"
            )));
        }
        let a2 = orbit.semi_major_axis().powi(2);
        let big = [3.0 * b1.d() * m2, 3.0 * b2.d() * m1];
        let c = [c1, c2];
        let lambda = [big[0] / c1, big[1] / c2];
        for (name, l) in [("lambda1", lambda[0]), ("lambda2", lambda[1])] {
            if l >= 3.0 {
                return Err(invalid(name, l, "Λ_j < 3𝒞_j requires λ_j < 3"));
            }
        }
        Ok(SystemParams {
            orbit,
            c,
            lambda,
            dhat: [b1.d() / (m1 * a2), b2.d() / (m2 * a2)],
            qhat: [b1.q() / (m1 * a2), b2.q() / (m2 * a2)],
            big_lambda: big,
            mu: Some(m1 * m2),
            masses: Some([m1, m2]),
            bodies: Some([b1, b2]),
            explicit_qhat2: true,
        })
    }

    /// Same parameters on an orbit of different eccentricity.
    pub fn with_eccentricity(&self, e: f64) -> Result<Self, PotentialError> {
        let mut p = self.clone();
        p.orbit = Orbit::new(self.orbit.semi_major_axis(), e)?;
        Ok(p)
    }

    pub fn orbit(&self) -> &Orbit {
        &self.orbit
    }

    pub fn eccentricity(&self) -> f64 {
        self.orbit.eccentricity()
    }

    pub fn semi_major_axis(&self) -> f64 {
        self.orbit.semi_major_axis()
    }

    /// Polar moments `(𝒞₁, 𝒞₂)`.
    pub fn c(&self) -> [f64; 2] {
        self.c
    }

    /// `λ_j = Λ_j / 𝒞_j`.
    pub fn lambda(&self) -> [f64; 2] {
        self.lambda
    }

    /// `Λ_j = λ_j 𝒞_j`.
    pub fn big_lambda(&self) -> [f64; 2] {
        self.big_lambda
    }

    pub fn dhat(&self) -> [f64; 2] {
        self.dhat
    }

    pub fn qhat(&self) -> [f64; 2] {
        self.qhat
    }

    /// Reduced mass `M₁M₂`, known unless `d̂₁ = 0` in the six-parameter form.
    pub fn reduced_mass(&self) -> Option<f64> {
        self.mu
    }

    /// `(M₁, M₂)` when a real split of the reduced mass exists.
    pub fn masses(&self) -> Option<[f64; 2]> {
        self.masses
    }

    pub fn bodies(&self) -> Option<&[BodyShape; 2]> {
        self.bodies.as_ref()
    }

    pub fn descriptor(&self) -> ParamsDescriptor {
        ParamsDescriptor {
            e: self.eccentricity(),
            a: self.semi_major_axis(),
            c1: self.c[0],
            lambda1: self.lambda[0],
            lambda2: self.lambda[1],
            dhat1: self.dhat[0],
            qhat1: self.qhat[0],
            qhat2: self.explicit_qhat2.then_some(self.qhat[1]),
        }
    }

    pub fn lambda_set(&self) -> LambdaSet {
        build_lambda_set(self)
    }
}

/// Root of `M(1 − M) = μ` with `M₁ ≥ 1/2` exactly when `𝒞₁ ≥ 1/2`.
fn masses_from_mu(mu: f64, c1: f64) -> Option<[f64; 2]> {
    let disc = 1.0 - 4.0 * mu;
    if !(disc >= 0.0) {
        return None;
    }
    let big = 0.5 * (1.0 + disc.sqrt());
    let m1 = if c1 >= 0.5 { big } else { 1.0 - big };
    Some([m1, 1.0 - m1])
}

impl Serialize for SystemParams {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match &self.bodies {
            Some([b1, b2]) => BodiesDescriptor {
                orbit: self.orbit,
                body1: *b1,
                body2: *b2,
            }
            .serialize(s),
            None => self.descriptor().serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for SystemParams {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        SystemParams::try_from(v).map_err(serde::de::Error::custom)
    }
}

impl TryFrom<Value> for SystemParams {
    type Error = PotentialError;
    fn try_from(v: Value) -> Result<Self, Self::Error> {
        let is_bodies = v.get("orbit").is_some() || v.get("body1").is_some();
        if is_bodies {
            let b: BodiesDescriptor =
                serde_json::from_value(v).map_err(|e| PotentialError::Descriptor(e.to_string()))?;
            SystemParams::from_bodies(b.orbit, b.body1, b.body2)
        } else {
            let p: ParamsDescriptor =
                serde_json::from_value(v).map_err(|e| PotentialError::Descriptor(e.to_string()))?;
            SystemParams::from_descriptor(&p)
        }
    }
}

/// The Λ family of coupling coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaSet {
    /// Constant term `Λ₀` of `V₂`.
    pub lambda0: f64,
    /// `(Λ₁, Λ₂)`.
    pub lambda: [f64; 2],
    /// `Λ^{m₁}_{m₂}` for every `(m₁, m₂)` with `|m₁| + |m₂| ≤ 2`.
    pub coupling: Vec<Coupling>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coupling {
    pub m1: i32,
    pub m2: i32,
    pub value: f64,
}

/// The index set `Ξ` in a fixed order.
pub fn xi() -> impl Iterator<Item = (i32, i32)> {
    (-2..=2).flat_map(|m1: i32| {
        (-2..=2)
            .filter(move |m2: &i32| m1.abs() + m2.abs() <= 2)
            .map(move |m2| (m1, m2))
    })
}

impl LambdaSet {
    /// `Λ^{m₁}_{m₂}`, zero outside `Ξ`.
    pub fn get(&self, m1: i32, m2: i32) -> f64 {
        self.coupling
            .iter()
            .find(|c| c.m1 == m1 && c.m2 == m2)
            .map_or(0.0, |c| c.value)
    }

    /// Entries of `Ξ` other than `(0, 0)`.
    pub fn torque_terms(&self) -> impl Iterator<Item = &Coupling> {
        self.coupling.iter().filter(|c| c.m1 != 0 || c.m2 != 0)
    }
}

pub fn build_lambda_set(p: &SystemParams) -> LambdaSet {
    let [l1, l2] = p.big_lambda;
    let [d1, d2] = p.dhat;
    let [q1, q2] = p.qhat;
    let a2 = p.semi_major_axis().powi(2);
    let mu_a2 = p.mu.map_or(0.0, |mu| mu * a2);
    // Λ₀ = q₁M₂ + q₂M₁ and the μ-dependent part of Λ⁰₀, both with q_j = q̂_j M_j a².
    let lambda0 = mu_a2 * (q1 + q2);
    let l00 = mu_a2 * (2.25 * q1 * q2 + 90.0 / 112.0 * (q1 * q1 + q2 * q2))
        + 15.0 / 112.0 * (l1 * d1 + l2 * d2);
    let value = |m1: i32, m2: i32| -> f64 {
        match (m1.abs(), m2.abs(), m1 * m2) {
            (0, 0, _) => l00,
            (1, 0, _) => 5.0 / 56.0 * (7.0 * q2 + 5.0 * q1) * l1,
            (0, 1, _) => 5.0 / 56.0 * (7.0 * q1 + 5.0 * q2) * l2,
            (2, 0, _) => 25.0 / 32.0 * d1 * l1,
            (0, 2, _) => 25.0 / 32.0 * d2 * l2,
            (1, 1, 1) => 35.0 / 16.0 * d1 * l2,
            (1, 1, -1) => 3.0 / 16.0 * d1 * l2,
            _ => unreachable!("outside the index set"),
        }
    };
    LambdaSet {
        lambda0,
        lambda: [l1, l2],
        coupling: xi()
            .map(|(m1, m2)| Coupling {
                m1,
                m2,
                value: value(m1, m2),
            })
            .collect(),
    }
}

/// `V₀`, `V₂`, `V₄` and their sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialValue {
    pub v0: f64,
    pub v2: f64,
    pub v4: f64,
    pub total: f64,
}

/// Truncated potential at mean anomaly `t` and spin angles `θ₁, θ₂`.
pub fn eval_potential(
    p: &SystemParams,
    ls: &LambdaSet,
    t: f64,
    theta1: f64,
    theta2: f64,
) -> Result<PotentialValue, PotentialError> {
    let st = p.orbit.state(t)?;
    Ok(potential_at(p, ls, &st, theta1, theta2))
}

pub fn potential_at(
    p: &SystemParams,
    ls: &LambdaSet,
    st: &OrbitState,
    theta1: f64,
    theta2: f64,
) -> PotentialValue {
    let a = p.semi_major_axis();
    let k = a / st.r;
    let k3 = k * k * k;
    let k5 = k3 * k * k;
    let phi1 = theta1 - st.f;
    let phi2 = theta2 - st.f;
    let v0 = -a * a * p.mu.unwrap_or(0.0) * k;
    let v2 = -0.25
        * k3
        * (ls.lambda0 + ls.lambda[0] * (2.0 * phi1).cos() + ls.lambda[1] * (2.0 * phi2).cos());
    let sum: f64 = ls
        .coupling
        .iter()
        .map(|c| c.value * (2.0 * c.m1 as f64 * phi1 + 2.0 * c.m2 as f64 * phi2).cos())
        .sum();
    let v4 = -0.25 * k5 * sum;
    PotentialValue {
        v0,
        v2,
        v4,
        total: v0 + v2 + v4,
    }
}

/// Where Stokes coefficients of degree above four come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StokesSource {
    #[default]
    ClosedForm,
    Quadrature,
}

/// Coefficient `Γ^{l₁,m₁}_{l₂,m₂}` of the full expansion.
pub fn gamma_coefficient(l1: u32, m1: i32, l2: u32, m2: i32) -> f64 {
    let (l, m) = (l1 as i64 + l2 as i64, m1 as i64 + m2 as i64);
    let f = |n: i64| factorial(n as usize);
    let sign = if (l - m).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let (l1, m1, l2, m2) = (l1 as i64, m1 as i64, l2 as i64, m2 as i64);
    let root = (f(2 * l1 - 2 * m1) * f(2 * l1 + 2 * m1) * f(2 * l2 - 2 * m2) * f(2 * l2 + 2 * m2)).sqrt();
    sign / (4f64.powi(l as i32) * root) * f(2 * l - 2 * m) * f(2 * l + 2 * m) / (f(l - m) * f(l + m))
}

/// Full-series potential of two bodies, truncated at total degree `l_max`.
#[derive(Debug, Clone)]
pub struct FullExpansion {
    g: f64,
    masses: [f64; 2],
    radii: [f64; 2],
    /// `(l₁, m₁, l₂, m₂, Γ 𝒵¹ 𝒵²)` for every non-vanishing term.
    terms: Vec<(u32, i32, u32, i32, f64)>,
}

/// Value and spin-angle gradient of the full potential.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FullPotential {
    pub value: f64,
    pub d_theta: [f64; 2],
}

impl FullExpansion {
    pub fn new(
        g: f64,
        b1: &BodyShape,
        b2: &BodyShape,
        l_max: u32,
        source: StokesSource,
    ) -> Result<Self, PotentialError> {
        if !l_max.is_multiple_of(2) {
            return Err(PotentialError::OddDegree(l_max));
        }
        if l_max > 4 && source == StokesSource::ClosedForm {
            return Err(PotentialError::UnsupportedDegree(l_max));
        }
        let stokes = |b: &BodyShape, l: i64, m: i64| -> Result<f64, BodiesError> {
            if l <= 4 {
                stokes_closed_form(b, l, m).map(|z| z.value)
            } else {
                stokes_quadrature(b, l, m.abs()).map(|z| z.value)
            }
        };
        let top = l_max / 2;
        let mut terms = Vec::new();
        for l1 in 0..=top {
            for l2 in 0..=(top - l1) {
                for m1 in -(l1 as i32)..=(l1 as i32) {
                    let z1 = stokes(b1, 2 * l1 as i64, 2 * m1 as i64)?;
                    for m2 in -(l2 as i32)..=(l2 as i32) {
                        let z2 = stokes(b2, 2 * l2 as i64, 2 * m2 as i64)?;
                        let w = gamma_coefficient(l1, m1, l2, m2) * z1 * z2;
                        if w != 0.0 {
                            terms.push((l1, m1, l2, m2, w));
                        }
                    }
                }
            }
        }
        Ok(FullExpansion {
            g,
            masses: [b1.mass(), b2.mass()],
            radii: [b1.mean_radius(), b2.mean_radius()],
            terms,
        })
    }

    pub fn eval(&self, r: f64, f: f64, theta1: f64, theta2: f64) -> Result<FullPotential, PotentialError> {
        if !(r > 0.0) {
            return Err(PotentialError::Separation(r));
        }
        let pre = -self.g * self.masses[0] * self.masses[1] / r;
        let (x1, x2) = ((self.radii[0] / r).powi(2), (self.radii[1] / r).powi(2));
        let (phi1, phi2) = (theta1 - f, theta2 - f);
        let mut value = 0.0;
        let mut d = [0.0; 2];
        for &(l1, m1, l2, m2, w) in &self.terms {
            let scale = w * x1.powi(l1 as i32) * x2.powi(l2 as i32);
            let arg = 2.0 * m1 as f64 * phi1 + 2.0 * m2 as f64 * phi2;
            let (s, c) = arg.sin_cos();
            value += scale * c;
            d[0] -= scale * 2.0 * m1 as f64 * s;
            d[1] -= scale * 2.0 * m2 as f64 * s;
        }
        Ok(FullPotential {
            value: pre * value,
            d_theta: [pre * d[0], pre * d[1]],
        })
    }
}

/// Full-series potential at separation `r`, with `G = a³` from `orbit`.
#[allow(clippy::too_many_arguments)]
pub fn eval_potential_full(
    orbit: &Orbit,
    b1: &BodyShape,
    b2: &BodyShape,
    r: f64,
    f: f64,
    theta1: f64,
    theta2: f64,
    l_max: u32,
    source: StokesSource,
) -> Result<f64, PotentialError> {
    let exp = FullExpansion::new(orbit.gravitational_constant(), b1, b2, l_max, source)?;
    Ok(exp.eval(r, f, theta1, theta2)?.value)
}

/// Parameters quoted for two observed binaries.
pub mod presets {
    use super::*;

    /// Pluto–Charon, with the tabulated `q̂₂`.
    pub fn pluto_charon() -> SystemParams {
        SystemParams::from_descriptor(&ParamsDescriptor {
            e: 2.0e-4,
            a: 27.2,
            c1: 0.97,
            lambda1: 3.3e-5,
            lambda2: 2.4e-3,
            dhat1: 1.5e-7,
            qhat1: 1.2e-6,
            qhat2: Some(8.2e-7),
        })
        .expect("tabulated parameters are valid")
    }

    /// Patroclus–Menoetius at eccentricity `e`, with the tabulated `q̂₂`.
    pub fn patroclus_menoetius(e: f64) -> Result<SystemParams, PotentialError> {
        SystemParams::from_descriptor(&ParamsDescriptor {
            e,
            a: 18.2,
            c1: 0.60,
            lambda1: 0.11,
            lambda2: 0.14,
            dhat1: 2.6e-4,
            qhat1: 1.2e-3,
            qhat2: Some(9.9e-4),
        })
    }

    /// Two identical bodies with `λ_j = λ` and `d̂_j = q̂_j = q̂`.
    pub fn equal_bodies(e: f64, a: f64, lambda: f64, qhat: f64) -> Result<SystemParams, PotentialError> {
        SystemParams::new(e, a, 0.5, lambda, lambda, qhat, qhat)
    }

    /// Body 1 twice the size of body 2: `λ₁ = λ₂/8`, `d̂_j = q̂_j`, `q̂₂ = q̂₁/32`.
    /// Both identities then force `𝒞₁ = 256/257`.
    pub fn two_to_one(e: f64, a: f64, lambda2: f64, qhat1: f64) -> Result<SystemParams, PotentialError> {
        SystemParams::new(e, a, 256.0 / 257.0, lambda2 / 8.0, lambda2, qhat1, qhat1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn generic() -> SystemParams {
        SystemParams::new(0.3, 4.0, 0.6, 0.2, 0.15, 0.01, 0.03).unwrap()
    }

    fn random_pair(s: [f64; 6], m1: f64, c1: f64) -> (BodyShape, BodyShape) {
        let make = |m: f64, c: f64, x: f64, y: f64, z: f64| {
            let sa = 1.0 + x;
            let sb = sa / (1.0 + y);
            let sc = sb / (1.0 + z);
            let b = BodyShape::from_semi_axes(m, sa, sb, sc).unwrap();
            b.rescaled(1.0, c / b.polar_moment()).unwrap()
        };
        (make(m1, c1, s[0], s[1], s[2]), make(1.0 - m1, 1.0 - c1, s[3], s[4], s[5]))
    }

    #[test]
    fn index_set_has_thirteen_entries() {
        assert_eq!(xi().count(), 13);
        assert!(xi().any(|p| p == (0, 0)));
    }

    #[test]
    fn identities_hold_at_construction() {
        let p = generic();
        let [l1, l2] = p.big_lambda();
        assert!((l1 * p.dhat()[1] - l2 * p.dhat()[0]).abs() < 1e-14 * l1);
        assert!((l1 * p.qhat()[1] - l2 * p.qhat()[0]).abs() < 1e-14 * l1);
        assert!((p.c()[0] + p.c()[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn coupling_symmetry_and_bounds() {
        let ls = generic().lambda_set();
        for c in &ls.coupling {
            assert_eq!(c.value, ls.get(-c.m1, -c.m2));
            assert!(c.value >= 0.0);
            if c.m1 * c.m2 != 0 {
                assert!(c.value < ls.lambda[0] && c.value < ls.lambda[1]);
            }
        }
        let p = generic();
        let [d1, d2] = p.dhat();
        let [l1, l2] = p.big_lambda();
        assert!((35.0 / 16.0 * d1 * l2 - 35.0 / 16.0 * d2 * l1).abs() < 1e-14 * ls.get(1, 1));
    }

    #[test]
    fn pluto_charon_entries() {
        let p = presets::pluto_charon();
        let ls = p.lambda_set();
        assert!((ls.lambda[0] - 3.3e-5 * 0.97).abs() < 1e-18);
        let l2 = 2.4e-3 * 0.03;
        assert!((ls.get(1, 1) - 35.0 / 16.0 * 1.5e-7 * l2).abs() < 1e-22);
        assert!(p.masses().is_some());
    }

    #[test]
    fn decoupled_when_shapes_vanish() {
        let p = SystemParams::new(0.1, 10.0, 0.5, 0.1, 0.1, 0.0, 0.0).unwrap();
        let ls = p.lambda_set();
        assert!(ls.coupling.iter().all(|c| c.value == 0.0));
        assert_eq!(ls.lambda, [0.05, 0.05]);
        assert!(p.reduced_mass().is_none());
        let v = eval_potential(&p, &ls, 0.4, 1.0, 2.0).unwrap();
        assert_eq!(v.v4, 0.0);
    }

    #[test]
    fn circular_synchronous_potential_is_constant() {
        let p = generic().with_eccentricity(0.0).unwrap();
        let ls = p.lambda_set();
        for &t in &[0.0, 1.0, 2.5] {
            let v = eval_potential(&p, &ls, t, t, t).unwrap();
            let expect = -0.25 * (ls.lambda0 + ls.lambda[0] + ls.lambda[1]);
            assert!((v.v2 - expect).abs() < 1e-15);
            assert_eq!(v.total, v.v0 + v.v2 + v.v4);
        }
    }

    #[test]
    fn rejects_invalid_parameters() {
        assert!(SystemParams::new(0.1, 10.0, 1.0, 0.1, 0.1, 0.0, 0.0).is_err());
        assert!(SystemParams::new(0.1, 10.0, 0.5, 3.0, 0.1, 0.0, 0.0).is_err());
        assert!(SystemParams::new(0.1, 10.0, 0.5, 0.1, 0.1, 0.2, 0.1).is_err());
        assert!(SystemParams::new(1.0, 10.0, 0.5, 0.1, 0.1, 0.0, 0.0).is_err());
        assert!(matches!(
            SystemParams::new(0.1, 10.0, 0.5, 0.0, 0.1, 0.01, 0.01),
            Err(PotentialError::Inconsistent(_))
        ));
    }

    #[test]
    fn two_to_one_geometry() {
        let p = presets::two_to_one(0.1, 10.0, 0.2, 0.01).unwrap();
        assert!((p.lambda()[0] - 0.025).abs() < 1e-16);
        assert!((p.qhat()[1] - 0.01 / 32.0).abs() < 1e-16);
        assert!((p.dhat()[1] - 0.01 / 32.0).abs() < 1e-16);
    }

    #[test]
    fn masses_follow_inertia_ordering() {
        let p = presets::pluto_charon();
        let [m1, m2] = p.masses().unwrap();
        assert!(m1 > m2);
        assert!((m1 * m2 - p.reduced_mass().unwrap()).abs() < 1e-15);
        assert!(presets::patroclus_menoetius(0.02).unwrap().masses().is_none());
    }

    #[test]
    fn both_entry_paths_agree() {
        // Equal d/q ratios make the q̂ identity exact for physical bodies.
        let orbit = Orbit::new(6.0, 0.2).unwrap();
        let b1 = BodyShape::from_moments(0.7, 0.5, 0.52, 0.6).unwrap();
        let s = 0.4 / 0.6;
        let b2 = BodyShape::from_moments(0.3, 0.5 * s, 0.52 * s, 0.6 * s).unwrap();
        let from_bodies = SystemParams::from_bodies(orbit, b1, b2).unwrap();
        let d = from_bodies.descriptor();
        let six = SystemParams::new(d.e, d.a, d.c1, d.lambda1, d.lambda2, d.dhat1, d.qhat1).unwrap();
        let (x, y) = (from_bodies.lambda_set(), six.lambda_set());
        assert!((x.lambda0 - y.lambda0).abs() < 1e-14 * x.lambda0);
        for (cx, cy) in x.coupling.iter().zip(&y.coupling) {
            assert!((cx.value - cy.value).abs() <= 1e-14 * cx.value.abs().max(1e-300));
        }
    }

    #[test]
    fn descriptor_json_roundtrip() {
        let p: SystemParams = serde_json::from_str(
            r#"{"e":0.1,"a":10,"C1":0.5,"lambda1":0.1,"lambda2":0.1,"dhat1":0.001,"qhat1":0.002}"#,
        )
        .unwrap();
        let again: SystemParams = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
        assert_eq!(p, again);
        let orbit = Orbit::new(6.0, 0.2).unwrap();
        let (b1, b2) = random_pair([0.3, 0.2, 0.1, 0.2, 0.1, 0.3], 0.6, 0.7);
        let q = SystemParams::from_bodies(orbit, b1, b2).unwrap();
        let back: SystemParams = serde_json::from_str(&serde_json::to_string(&q).unwrap()).unwrap();
        assert!((back.lambda()[0] - q.lambda()[0]).abs() < 1e-14);
        assert!(serde_json::from_str::<SystemParams>(r#"{"e":0.1}"#).is_err());
    }

    #[test]
    fn spheres_give_point_mass_potential() {
        let orbit = Orbit::new(5.0, 0.1).unwrap();
        let b1 = BodyShape::sphere(0.6, 0.55).unwrap();
        let b2 = BodyShape::sphere(0.4, 0.45).unwrap();
        let v = eval_potential_full(&orbit, &b1, &b2, 4.7, 0.3, 1.0, -2.0, 4, StokesSource::ClosedForm).unwrap();
        assert_eq!(v, -125.0 * 0.6 * 0.4 / 4.7);
        assert_eq!(gamma_coefficient(0, 0, 0, 0), 1.0);
    }

    #[test]
    fn full_series_degree_checks() {
        let orbit = Orbit::new(5.0, 0.1).unwrap();
        let b = BodyShape::sphere(0.5, 0.5).unwrap();
        assert!(matches!(
            eval_potential_full(&orbit, &b, &b, 4.0, 0.0, 0.0, 0.0, 6, StokesSource::ClosedForm),
            Err(PotentialError::UnsupportedDegree(6))
        ));
        assert!(matches!(
            eval_potential_full(&orbit, &b, &b, 4.0, 0.0, 0.0, 0.0, 3, StokesSource::ClosedForm),
            Err(PotentialError::OddDegree(3))
        ));
        assert!(matches!(
            eval_potential_full(&orbit, &b, &b, 0.0, 0.0, 0.0, 0.0, 4, StokesSource::ClosedForm),
            Err(PotentialError::Separation(_))
        ));
    }

    proptest! {
        #[test]
        fn full_series_matches_truncated_model(
            s in prop::array::uniform6(0.0f64..0.4),
            m1 in 0.2f64..0.8,
            c1 in 0.2f64..0.8,
            a in 4.0f64..12.0,
            e in 0.0f64..0.6,
            t in -PI..PI,
            th1 in -PI..PI,
            th2 in -PI..PI,
        ) {
            let orbit = Orbit::new(a, e).unwrap();
            let (b1, b2) = random_pair(s, m1, c1);
            let p = SystemParams::from_bodies(orbit, b1, b2).unwrap();
            let ls = p.lambda_set();
            let st = orbit.state(t).unwrap();
            let trunc = potential_at(&p, &ls, &st, th1, th2);
            let full = eval_potential_full(&orbit, &b1, &b2, st.r, st.f, th1, th2, 4, StokesSource::ClosedForm).unwrap();
            prop_assert!((full - trunc.total).abs() < 1e-10 * trunc.total.abs());
        }

        #[test]
        fn half_turn_symmetry(t in -PI..PI, th1 in -PI..PI, th2 in -PI..PI) {
            let p = generic();
            let ls = p.lambda_set();
            let v = eval_potential(&p, &ls, t, th1, th2).unwrap().total;
            let v1 = eval_potential(&p, &ls, t, th1 + PI, th2).unwrap().total;
            let v2 = eval_potential(&p, &ls, t, th1, th2 + PI).unwrap().total;
            prop_assert!((v - v1).abs() < 1e-13 * v.abs().max(1.0));
            prop_assert!((v - v2).abs() < 1e-13 * v.abs().max(1.0));
        }
    }
}
