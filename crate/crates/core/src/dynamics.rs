//! Right-hand sides of the spin equations in both charts, their
//! linearisation, the Hamiltonian, and the full Lagrangian model.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bodies::BodyShape;
use crate::kepler::{Orbit, OrbitState};
use crate::potential::{LambdaSet, PotentialError, SystemParams};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("singular configuration: separation r = {0}")]
    Singular(f64),
    #[error("dissipation rates must be finite and non-negative (got {0:?})")]
    Dissipation([f64; 2]),
    #[error("bodies must be in model units: masses sum to {0}")]
    MassSum(f64),
    #[error(transparent)]
    Potential(#[from] PotentialError),
}

/// Spin angles and rates in the `Θ_j = 2(θ_j − f)` chart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinState {
    pub theta: [f64; 2],
    pub theta_dot: [f64; 2],
}

impl SpinState {
    pub const ZERO: SpinState = SpinState {
        theta: [0.0; 2],
        theta_dot: [0.0; 2],
    };

    /// From physical angles `θ_j` and rates at an orbit state.
    pub fn from_physical(st: &OrbitState, theta: [f64; 2], theta_dot: [f64; 2]) -> Self {
        SpinState {
            theta: theta.map(|th| 2.0 * (th - st.f)),
            theta_dot: theta_dot.map(|w| 2.0 * (w - st.f_dot)),
        }
    }

    /// Back to physical angles and rates `(θ, θ̇)`.
    pub fn to_physical(&self, st: &OrbitState) -> ([f64; 2], [f64; 2]) {
        (
            self.theta.map(|x| 0.5 * x + st.f),
            self.theta_dot.map(|x| 0.5 * x + st.f_dot),
        )
    }
}

/// MacDonald dissipation rates `δ_j`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct DissipationParams {
    delta: [f64; 2],
}

impl DissipationParams {
    pub const NONE: DissipationParams = DissipationParams { delta: [0.0; 2] };

    pub fn new(delta: [f64; 2]) -> Result<Self, DynamicsError> {
        if delta.iter().all(|d| d.is_finite() && *d >= 0.0) {
            Ok(DissipationParams { delta })
        } else {
            Err(DynamicsError::Dissipation(delta))
        }
    }

    pub fn delta(&self) -> [f64; 2] {
        self.delta
    }

    pub fn is_zero(&self) -> bool {
        self.delta == [0.0; 2]
    }

    pub fn scaled(&self, s: f64) -> Self {
        DissipationParams {
            delta: self.delta.map(|d| d * s),
        }
    }
}

impl TryFrom<[f64; 2]> for DissipationParams {
    type Error = DynamicsError;
    fn try_from(d: [f64; 2]) -> Result<Self, Self::Error> {
        DissipationParams::new(d)
    }
}

impl From<DissipationParams> for [f64; 2] {
    fn from(d: DissipationParams) -> Self {
        d.delta
    }
}

/// Symmetric 2×2 matrix stored row-major.
pub type Mat2 = [[f64; 2]; 2];

/// Precomputed spin-equation coefficients for one parameter set.
#[derive(Debug, Clone)]
pub struct SpinModel {
    orbit: Orbit,
    c: [f64; 2],
    big_lambda: [f64; 2],
    // Representatives of the ± pairs of Ξ, each already doubled.
    l10: f64,
    l01: f64,
    l20: f64,
    l02: f64,
    l11: f64,
    l1m1: f64,
}

/// Sines and cosines of the five phase combinations met in the series.
struct Phases {
    s1: f64,
    c1: f64,
    s2: f64,
    c2: f64,
    s11: f64,
    c11: f64,
    s22: f64,
    c22: f64,
    sp: f64,
    cp: f64,
    sm: f64,
    cm: f64,
}

impl Phases {
    fn new(th: [f64; 2]) -> Self {
        let (s1, c1) = th[0].sin_cos();
        let (s2, c2) = th[1].sin_cos();
        Phases {
            s1,
            c1,
            s2,
            c2,
            s11: 2.0 * s1 * c1,
            c11: c1 * c1 - s1 * s1,
            s22: 2.0 * s2 * c2,
            c22: c2 * c2 - s2 * s2,
            sp: s1 * c2 + c1 * s2,
            cp: c1 * c2 - s1 * s2,
            sm: s1 * c2 - c1 * s2,
            cm: c1 * c2 + s1 * s2,
        }
    }
}

impl SpinModel {
    pub fn new(p: &SystemParams, ls: &LambdaSet) -> Self {
        SpinModel {
            orbit: *p.orbit(),
            c: p.c(),
            big_lambda: ls.lambda,
            l10: 2.0 * ls.get(1, 0),
            l01: 2.0 * ls.get(0, 1),
            l20: 2.0 * ls.get(2, 0),
            l02: 2.0 * ls.get(0, 2),
            l11: 2.0 * ls.get(1, 1),
            l1m1: 2.0 * ls.get(1, -1),
        }
    }

    pub fn orbit(&self) -> &Orbit {
        &self.orbit
    }

    pub fn c(&self) -> [f64; 2] {
        self.c
    }

    /// Orbit state at `t`; non-finite `t` yields a NaN state.
    pub fn orbit_state(&self, t: f64) -> OrbitState {
        self.orbit.state(t).unwrap_or(OrbitState {
            t,
            u: f64::NAN,
            r: f64::NAN,
            f: f64::NAN,
            f_dot: f64::NAN,
            f_ddot: f64::NAN,
        })
    }

    /// The bounded forcing `F(t, Θ)` of `𝒞Θ̈ + F(t, Θ) = 0`.
    pub fn force(&self, st: &OrbitState, theta: [f64; 2]) -> [f64; 2] {
        let k = self.orbit.semi_major_axis() / st.r;
        let k3 = k * k * k;
        let k5 = k3 * k * k;
        let ph = Phases::new(theta);
        let cons = self.series(&ph, k3, k5);
        [
            cons[0] + 2.0 * st.f_ddot * self.c[0],
            cons[1] + 2.0 * st.f_ddot * self.c[1],
        ]
    }

    fn series(&self, ph: &Phases, k3: f64, k5: f64) -> [f64; 2] {
        let e1 = self.l10 * ph.s1 + 2.0 * self.l20 * ph.s11 + self.l11 * ph.sp + self.l1m1 * ph.sm;
        let e2 = self.l01 * ph.s2 + 2.0 * self.l02 * ph.s22 + self.l11 * ph.sp - self.l1m1 * ph.sm;
        [
            k3 * self.big_lambda[0] * ph.s1 + k5 * e1,
            k3 * self.big_lambda[1] * ph.s2 + k5 * e2,
        ]
    }

    /// `∂_Θ F(t, Θ)`, symmetric.
    pub fn force_jacobian(&self, st: &OrbitState, theta: [f64; 2]) -> Mat2 {
        let k = self.orbit.semi_major_axis() / st.r;
        let k3 = k * k * k;
        let k5 = k3 * k * k;
        let ph = Phases::new(theta);
        self.jac(&ph, k3, k5)
    }

    fn jac(&self, ph: &Phases, k3: f64, k5: f64) -> Mat2 {
        let mix = self.l11 * ph.cp + self.l1m1 * ph.cm;
        let j11 = k3 * self.big_lambda[0] * ph.c1
            + k5 * (self.l10 * ph.c1 + 4.0 * self.l20 * ph.c11 + mix);
        let j22 = k3 * self.big_lambda[1] * ph.c2
            + k5 * (self.l01 * ph.c2 + 4.0 * self.l02 * ph.c22 + mix);
        let j12 = k5 * (self.l11 * ph.cp - self.l1m1 * ph.cm);
        [[j11, j12], [j12, j22]]
    }

    /// `Θ̈ = −δ_j (a/r)⁶ Θ̇_j − F_j(t, Θ)/𝒞_j`.
    pub fn accel(&self, st: &OrbitState, diss: &DissipationParams, s: &SpinState) -> [f64; 2] {
        let f = self.force(st, s.theta);
        let d = damping(self.orbit.semi_major_axis() / st.r);
        [
            -diss.delta[0] * d * s.theta_dot[0] - f[0] / self.c[0],
            -diss.delta[1] * d * s.theta_dot[1] - f[1] / self.c[1],
        ]
    }

    /// Accelerations together with `𝒞⁻¹∂_Θ F` and the damping factor `(a/r)⁶`,
    /// in one pass for the variational systems.
    pub fn accel_with_jacobian(
        &self,
        st: &OrbitState,
        diss: &DissipationParams,
        s: &SpinState,
    ) -> ([f64; 2], Mat2, f64) {
        let k = self.orbit.semi_major_axis() / st.r;
        let k3 = k * k * k;
        let k5 = k3 * k * k;
        let ph = Phases::new(s.theta);
        let cons = self.series(&ph, k3, k5);
        let j = self.jac(&ph, k3, k5);
        let d = damping(k);
        let acc = [
            -diss.delta[0] * d * s.theta_dot[0] - cons[0] / self.c[0] - 2.0 * st.f_ddot,
            -diss.delta[1] * d * s.theta_dot[1] - cons[1] / self.c[1] - 2.0 * st.f_ddot,
        ];
        let cj = [
            [j[0][0] / self.c[0], j[0][1] / self.c[0]],
            [j[1][0] / self.c[1], j[1][1] / self.c[1]],
        ];
        (acc, cj, d)
    }

    /// `Ã = 𝒞^{−1/2} ∂_Θ F 𝒞^{−1/2}`.
    pub fn scaled_jacobian(&self, st: &OrbitState, theta: [f64; 2]) -> Mat2 {
        let j = self.force_jacobian(st, theta);
        let off = j[0][1] / (self.c[0] * self.c[1]).sqrt();
        [[j[0][0] / self.c[0], off], [off, j[1][1] / self.c[1]]]
    }

    /// Conservative torques `𝒯^C_j` in the physical chart.
    pub fn torque(&self, st: &OrbitState, theta: [f64; 2]) -> [f64; 2] {
        let big = [2.0 * (theta[0] - st.f), 2.0 * (theta[1] - st.f)];
        let k = self.orbit.semi_major_axis() / st.r;
        let k3 = k * k * k;
        let s = self.series(&Phases::new(big), k3, k3 * k * k);
        [-0.5 * s[0], -0.5 * s[1]]
    }

    /// `θ̈_j` from `𝒞_j θ̈_j = 𝒯^C_j − δ_j 𝒞_j (a/r)⁶ (θ̇_j − ḟ)`.
    pub fn physical_accel(
        &self,
        st: &OrbitState,
        diss: &DissipationParams,
        theta: [f64; 2],
        theta_dot: [f64; 2],
    ) -> [f64; 2] {
        let tq = self.torque(st, theta);
        let d = damping(self.orbit.semi_major_axis() / st.r);
        [0, 1].map(|j| tq[j] / self.c[j] - diss.delta[j] * d * (theta_dot[j] - st.f_dot))
    }
}

fn damping(k: f64) -> f64 {
    let k3 = k * k * k;
    k3 * k3
}

/// Conservative torques at mean anomaly `t`.
pub fn torque_conservative(
    p: &SystemParams,
    ls: &LambdaSet,
    t: f64,
    theta: [f64; 2],
) -> Result<[f64; 2], DynamicsError> {
    let st = p.orbit().state(t).map_err(PotentialError::from)?;
    Ok(SpinModel::new(p, ls).torque(&st, theta))
}

/// `θ̈` in the physical chart.
pub fn rhs_theta_chart(
    p: &SystemParams,
    ls: &LambdaSet,
    diss: &DissipationParams,
    t: f64,
    theta: [f64; 2],
    theta_dot: [f64; 2],
) -> Result<[f64; 2], DynamicsError> {
    let st = p.orbit().state(t).map_err(PotentialError::from)?;
    Ok(SpinModel::new(p, ls).physical_accel(&st, diss, theta, theta_dot))
}

/// `Θ̈` in the `Θ` chart.
#[allow(non_snake_case)]
pub fn rhs_Theta_chart(
    p: &SystemParams,
    ls: &LambdaSet,
    diss: &DissipationParams,
    t: f64,
    state: &SpinState,
) -> Result<[f64; 2], DynamicsError> {
    let st = p.orbit().state(t).map_err(PotentialError::from)?;
    Ok(SpinModel::new(p, ls).accel(&st, diss, state))
}

/// `Ã(t, Θ)`.
pub fn jacobian_a(p: &SystemParams, ls: &LambdaSet, t: f64, theta: [f64; 2]) -> Result<Mat2, DynamicsError> {
    let st = p.orbit().state(t).map_err(PotentialError::from)?;
    Ok(SpinModel::new(p, ls).scaled_jacobian(&st, theta))
}

/// The constant matrix `A` of the circular problem linearised at `Θ = 0`.
pub fn circular_matrix(p: &SystemParams, ls: &LambdaSet) -> Mat2 {
    let c = p.c();
    let mut a = [[p.lambda()[0], 0.0], [0.0, p.lambda()[1]]];
    for t in ls.torque_terms() {
        let (m1, m2) = (t.m1 as f64, t.m2 as f64);
        a[0][0] += m1 * m1 / c[0] * t.value;
        a[1][1] += m2 * m2 / c[1] * t.value;
        let off = m1 * m2 / (c[0] * c[1]).sqrt() * t.value;
        a[0][1] += off;
        a[1][0] += off;
    }
    a
}

/// Time-dependent spin Hamiltonian `H(θ, p_θ, t)`.
pub fn hamiltonian(
    p: &SystemParams,
    ls: &LambdaSet,
    t: f64,
    theta: [f64; 2],
    p_theta: [f64; 2],
) -> Result<f64, DynamicsError> {
    let st = p.orbit().state(t).map_err(PotentialError::from)?;
    Ok(hamiltonian_at(p, ls, &st, theta, p_theta))
}

pub fn hamiltonian_at(
    p: &SystemParams,
    ls: &LambdaSet,
    st: &OrbitState,
    theta: [f64; 2],
    p_theta: [f64; 2],
) -> f64 {
    let c = p.c();
    let kinetic = p_theta[0].powi(2) / (2.0 * c[0]) + p_theta[1].powi(2) / (2.0 * c[1]);
    kinetic + spin_potential(p, ls, st, theta)
}

/// `𝒱(t, θ₁, θ₂)`: the truncated potential without `V₀` and `Λ₀`.
pub fn spin_potential(p: &SystemParams, ls: &LambdaSet, st: &OrbitState, theta: [f64; 2]) -> f64 {
    let k = p.semi_major_axis() / st.r;
    let k3 = k * k * k;
    let (phi1, phi2) = (theta[0] - st.f, theta[1] - st.f);
    let v2 = ls.lambda[0] * (2.0 * phi1).cos() + ls.lambda[1] * (2.0 * phi2).cos();
    let v4: f64 = ls
        .coupling
        .iter()
        .map(|c| c.value * (2.0 * (c.m1 as f64 * phi1 + c.m2 as f64 * phi2)).cos())
        .sum();
    -0.25 * k3 * (v2 + k * k * v4)
}

/// Orbit and spins of the full non-Keplerian model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FullState {
    pub r: f64,
    pub r_dot: f64,
    pub f: f64,
    pub f_dot: f64,
    pub theta: [f64; 2],
    pub theta_dot: [f64; 2],
}

impl FullState {
    pub fn to_vec(&self) -> [f64; 8] {
        [
            self.r,
            self.f,
            self.theta[0],
            self.theta[1],
            self.r_dot,
            self.f_dot,
            self.theta_dot[0],
            self.theta_dot[1],
        ]
    }

    pub fn from_slice(y: &[f64]) -> Self {
        FullState {
            r: y[0],
            f: y[1],
            theta: [y[2], y[3]],
            r_dot: y[4],
            f_dot: y[5],
            theta_dot: [y[6], y[7]],
        }
    }
}

/// `(r̈, f̈, θ̈₁, θ̈₂)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FullAccel {
    pub r: f64,
    pub f: f64,
    pub theta: [f64; 2],
}

/// Which part of the potential drives the orbit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrbitalForcing {
    /// `V₀ + V₂ + V₄` in every equation; energy and angular momentum are conserved.
    #[default]
    Full,
    /// Only `V₀` in the orbital equations, which then reduce to Kepler's problem.
    PointMass,
}

/// Truncated potential `V₀ + V₂ + V₄` of two bodies, written in physical
/// parameters, with analytic partial derivatives.
#[derive(Debug, Clone)]
pub struct FullModel {
    g: f64,
    m: [f64; 2],
    c: [f64; 2],
    d: [f64; 2],
    q: [f64; 2],
    forcing: OrbitalForcing,
}

/// `V` and its partials `∂_r V, ∂_f V, ∂_{θ_j} V`, split by order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FullPotentialParts {
    pub v: f64,
    pub v0: f64,
    pub dr: f64,
    pub dr0: f64,
    pub df: f64,
    pub dtheta: [f64; 2],
}

impl FullModel {
    pub fn new(b1: &BodyShape, b2: &BodyShape, g: f64, forcing: OrbitalForcing) -> Result<Self, DynamicsError> {
        let sum = b1.mass() + b2.mass();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(DynamicsError::MassSum(sum));
        }
        Ok(FullModel {
            g,
            m: [b1.mass(), b2.mass()],
            c: [b1.polar_moment(), b2.polar_moment()],
            d: [b1.d(), b2.d()],
            q: [b1.q(), b2.q()],
            forcing,
        })
    }

    pub fn reduced_mass(&self) -> f64 {
        self.m[0] * self.m[1]
    }

    pub fn potential(&self, s: &FullState) -> Result<FullPotentialParts, DynamicsError> {
        if !(s.r > 0.0) {
            return Err(DynamicsError::Singular(s.r));
        }
        let g = self.g;
        let [m1, m2] = self.m;
        let [d1, d2] = self.d;
        let [q1, q2] = self.q;
        let r = s.r;
        let (p1, p2) = (s.theta[0] - s.f, s.theta[1] - s.f);
        let (s2a, c2a) = (2.0 * p1).sin_cos();
        let (s2b, c2b) = (2.0 * p2).sin_cos();
        let (s4a, c4a) = (4.0 * p1).sin_cos();
        let (s4b, c4b) = (4.0 * p2).sin_cos();
        let (sd, cd) = (2.0 * (s.theta[0] - s.theta[1])).sin_cos();
        let (ss, cs) = (2.0 * p1 + 2.0 * p2).sin_cos();

        let mu = m1 * m2;
        let s2 = m2 * q1 + m1 * q2 + 3.0 * m2 * d1 * c2a + 3.0 * m1 * d2 * c2b;
        let ds2 = [-6.0 * m2 * d1 * s2a, -6.0 * m1 * d2 * s2b];
        let k1 = d1 * m2 * (20.0 * q2 / m2 + 100.0 / 7.0 * q1 / m1);
        let k2 = d2 * m1 * (20.0 * q1 / m1 + 100.0 / 7.0 * q2 / m2);
        let h1 = 25.0 * d1 * d1 * m2 / m1;
        let h2 = 25.0 * d2 * d2 * m1 / m2;
        let w = 12.0 * q1 * q2
            + 15.0 / 7.0 * (m2 / m1 * (d1 * d1 + 2.0 * q1 * q1) + m1 / m2 * (d2 * d2 + 2.0 * q2 * q2))
            + k1 * c2a
            + h1 * c4a
            + k2 * c2b
            + h2 * c4b
            + 6.0 * d1 * d2 * cd
            + 70.0 * d1 * d2 * cs;
        let dw = [
            -2.0 * k1 * s2a - 4.0 * h1 * s4a - 12.0 * d1 * d2 * sd - 140.0 * d1 * d2 * ss,
            -2.0 * k2 * s2b - 4.0 * h2 * s4b + 12.0 * d1 * d2 * sd - 140.0 * d1 * d2 * ss,
        ];
        let r2 = r * r;
        let r3 = r2 * r;
        let r5 = r3 * r2;
        let v0 = -g * mu / r;
        let v = v0 - g / (4.0 * r3) * s2 - 3.0 * g / (64.0 * r5) * w;
        let dr0 = g * mu / r2;
        let dr = dr0 + 3.0 * g / (4.0 * r3 * r) * s2 + 15.0 * g / (64.0 * r5 * r) * w;
        let dtheta = [
            -g / (4.0 * r3) * ds2[0] - 3.0 * g / (64.0 * r5) * dw[0],
            -g / (4.0 * r3) * ds2[1] - 3.0 * g / (64.0 * r5) * dw[1],
        ];
        Ok(FullPotentialParts {
            v,
            v0,
            dr,
            dr0,
            df: -(dtheta[0] + dtheta[1]),
            dtheta,
        })
    }

    pub fn accel(&self, s: &FullState) -> Result<FullAccel, DynamicsError> {
        let pp = self.potential(s)?;
        let mu = self.reduced_mass();
        let (dr, df) = match self.forcing {
            OrbitalForcing::Full => (pp.dr, pp.df),
            OrbitalForcing::PointMass => (pp.dr0, 0.0),
        };
        Ok(FullAccel {
            r: s.r * s.f_dot * s.f_dot - dr / mu,
            f: -df / (mu * s.r * s.r) - 2.0 * s.r_dot * s.f_dot / s.r,
            theta: [-pp.dtheta[0] / self.c[0], -pp.dtheta[1] / self.c[1]],
        })
    }

    /// Total energy `T_orb + T_rot + V`.
    pub fn energy(&self, s: &FullState) -> Result<f64, DynamicsError> {
        let mu = self.reduced_mass();
        let t_orb = 0.5 * mu * (s.r_dot * s.r_dot + s.r * s.r * s.f_dot * s.f_dot);
        let t_rot = 0.5 * (self.c[0] * s.theta_dot[0].powi(2) + self.c[1] * s.theta_dot[1].powi(2));
        Ok(t_orb + t_rot + self.potential(s)?.v)
    }

    /// Total angular momentum `μr²ḟ + 𝒞₁θ̇₁ + 𝒞₂θ̇₂`.
    pub fn angular_momentum(&self, s: &FullState) -> f64 {
        self.reduced_mass() * s.r * s.r * s.f_dot + self.c[0] * s.theta_dot[0] + self.c[1] * s.theta_dot[1]
    }
}

/// `(r̈, f̈, θ̈₁, θ̈₂)` of the full Lagrangian model.
pub fn rhs_full_lagrangian(model: &FullModel, state: &FullState) -> Result<FullAccel, DynamicsError> {
    model.accel(state)
}
