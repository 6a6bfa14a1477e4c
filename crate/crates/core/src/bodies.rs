//! Homogeneous triaxial ellipsoids: moments of inertia, semi-axes, Stokes
//! coefficients, and conversion between physical and model units.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::special::{assoc_legendre, factorial, gauss_legendre};

/// Relative tolerance used when checking the ordering `A ≤ B ≤ C`.
const ORDER_SLACK: f64 = 1e-14;

const QUAD_START_NODES: usize = 24;
const QUAD_MAX_NODES: usize = 384;
const QUAD_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BodiesError {
    #[error("mass {0} must be positive and finite")]
    Mass(f64),
    #[error("moments of inertia ({0}, {1}, {2}) must be positive, finite and ordered A <= B <= C")]
    MomentOrder(f64, f64, f64),
    #[error("moments of inertia ({0}, {1}, {2}) violate A + B > C; no real ellipsoid exists")]
    Triangle(f64, f64, f64),
    #[error("semi-axes ({0}, {1}, {2}) must be positive, finite and ordered a >= b >= c")]
    SemiAxes(f64, f64, f64),
    #[error("Stokes coefficient ({l}, {m}) is outside the domain: {reason}")]
    Domain { l: i64, m: i64, reason: &'static str },
    #[error("closed-form Stokes coefficients stop at degree 4 (got {0}); use stokes_quadrature")]
    UnsupportedDegree(i64),
    #[error("quadrature did not converge: {coarse} with {coarse_nodes} nodes vs {fine} with {fine_nodes} nodes (gap {gap:e})")]
    QuadratureNoConvergence {
        coarse: f64,
        fine: f64,
        coarse_nodes: usize,
        fine_nodes: usize,
        gap: f64,
    },
    #[error("unit-system field {name} = {value} must be positive and finite")]
    UnitSystem { name: &'static str, value: f64 },
    #[error("unknown quantity tag {0:?}; expected time, mass, length or inertia")]
    UnknownQuantity(String),
    #[error("body descriptor must give exactly one of \"moments\" and \"semi_axes\"")]
    Descriptor,
}

/// A homogeneous ellipsoid with principal moments `A ≤ B ≤ C`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BodyDescriptor", into = "BodyDescriptor")]
pub struct BodyShape {
    mass: f64,
    moments: [f64; 3],
    semi_axes: [f64; 3],
}

/// JSON form of a body: the mass plus either the moments or the semi-axes.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BodyDescriptor {
    pub mass: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub moments: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub semi_axes: Option<[f64; 3]>,
}

impl TryFrom<BodyDescriptor> for BodyShape {
    type Error = BodiesError;
    fn try_from(d: BodyDescriptor) -> Result<Self, Self::Error> {
        match (d.moments, d.semi_axes) {
            (Some([a, b, c]), None) => BodyShape::from_moments(d.mass, a, b, c),
            (None, Some([a, b, c])) => BodyShape::from_semi_axes(d.mass, a, b, c),
            _ => Err(BodiesError::Descriptor),
        }
    }
}

impl From<BodyShape> for BodyDescriptor {
    fn from(b: BodyShape) -> Self {
        BodyDescriptor {
            mass: b.mass,
            moments: Some(b.moments),
            semi_axes: None,
        }
    }
}

fn check_mass(m: f64) -> Result<(), BodiesError> {
    if m.is_finite() && m > 0.0 {
        Ok(())
    } else {
        Err(BodiesError::Mass(m))
    }
}

impl BodyShape {
    pub fn from_moments(mass: f64, a: f64, b: f64, c: f64) -> Result<Self, BodiesError> {
        check_mass(mass)?;
        let finite = [a, b, c].iter().all(|x| x.is_finite() && *x > 0.0);
        let slack = ORDER_SLACK * c.abs();
        if !finite || a > b + slack || b > c + slack {
            return Err(BodiesError::MomentOrder(a, b, c));
        }
        if a + b <= c {
            return Err(BodiesError::Triangle(a, b, c));
        }
        let k = 5.0 / (2.0 * mass);
        let semi_axes = [
            (k * (-a + b + c)).sqrt(),
            (k * (a - b + c)).sqrt(),
            (k * (a + b - c)).sqrt(),
        ];
        Ok(BodyShape {
            mass,
            moments: [a, b, c],
            semi_axes,
        })
    }

    pub fn from_semi_axes(mass: f64, sa: f64, sb: f64, sc: f64) -> Result<Self, BodiesError> {
        check_mass(mass)?;
        let ok = [sa, sb, sc].iter().all(|x| x.is_finite() && *x > 0.0) && sa >= sb && sb >= sc;
        if !ok {
            return Err(BodiesError::SemiAxes(sa, sb, sc));
        }
        let moments = [
            mass * (sb * sb + sc * sc) / 5.0,
            mass * (sa * sa + sc * sc) / 5.0,
            mass * (sa * sa + sb * sb) / 5.0,
        ];
        Ok(BodyShape {
            mass,
            moments,
            semi_axes: [sa, sb, sc],
        })
    }

    /// A sphere of the given mass and moment of inertia.
    pub fn sphere(mass: f64, moment: f64) -> Result<Self, BodiesError> {
        Self::from_moments(mass, moment, moment, moment)
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// Principal moments `[A, B, C]`.
    pub fn moments(&self) -> [f64; 3] {
        self.moments
    }

    /// Polar moment `C`.
    pub fn polar_moment(&self) -> f64 {
        self.moments[2]
    }

    /// Principal semi-axes `[a, b, c]`, largest first.
    pub fn semi_axes(&self) -> [f64; 3] {
        self.semi_axes
    }

    /// Equatorial asymmetry `d = B − A`.
    pub fn d(&self) -> f64 {
        (self.moments[1] - self.moments[0]).max(0.0)
    }

    /// Flattening `q = 2C − A − B`.
    pub fn q(&self) -> f64 {
        (2.0 * self.moments[2] - self.moments[0] - self.moments[1]).max(0.0)
    }

    /// Mean radius `(abc)^{1/3}`.
    pub fn mean_radius(&self) -> f64 {
        let [a, b, c] = self.semi_axes;
        (a * b * c).cbrt()
    }

    /// Same shape with mass and moments rescaled by `mass_factor` and
    /// `moment_factor`.
    pub fn rescaled(&self, mass_factor: f64, moment_factor: f64) -> Result<Self, BodiesError> {
        let [a, b, c] = self.moments;
        Self::from_moments(
            self.mass * mass_factor,
            a * moment_factor,
            b * moment_factor,
            c * moment_factor,
        )
    }
}

/// One Stokes coefficient `𝒵_{l,m}` in the body frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StokesCoeff {
    pub l: i64,
    pub m: i64,
    pub value: f64,
}

fn check_even(l: i64, m: i64) -> Result<(), BodiesError> {
    if l < 0 {
        return Err(BodiesError::Domain { l, m, reason: "negative degree" });
    }
    if m.abs() > l {
        return Err(BodiesError::Domain { l, m, reason: "|m| exceeds l" });
    }
    if l % 2 != 0 || m % 2 != 0 {
        return Err(BodiesError::Domain { l, m, reason: "odd degree or order" });
    }
    Ok(())
}

/// Closed-form Stokes coefficients for degrees 0, 2 and 4.
pub fn stokes_closed_form(body: &BodyShape, l: i64, m: i64) -> Result<StokesCoeff, BodiesError> {
    if l > 4 {
        return Err(BodiesError::UnsupportedDegree(l));
    }
    check_even(l, m)?;
    let r = body.mean_radius();
    let s = 1.0 / (body.mass * r * r);
    let d = body.d() * s;
    let q = body.q() * s;
    let value = match (l, m.abs()) {
        (0, 0) => 1.0,
        (2, 0) => -0.5 * q,
        (2, 2) => (3.0f64 / 8.0).sqrt() * d,
        (4, 0) => 15.0 / 56.0 * (d * d + 2.0 * q * q),
        (4, 2) => -15.0 / 28.0 * (5.0f64 / 2.0).sqrt() * d * q,
        (4, 4) => 15.0 / 8.0 * (5.0f64 / 14.0).sqrt() * d * d,
        _ => unreachable!("degree and order already validated"),
    };
    Ok(StokesCoeff { l, m, value })
}

/// Unit-ball integral `3/(4π R^l) √((l−m)!/(l+m)!) ∫ ρ^l P_{l,m}(cos ϑ) e^{−imφ}`
/// over the body, with `(ρ, ϑ, φ)` spherical coordinates of the point
/// `(aX, bY, cZ)`, evaluated with an `n`-point rule per axis.
fn raw_integral(body: &BodyShape, l: usize, m: i64, n: usize) -> (f64, f64) {
    let [sa, sb, sc] = body.semi_axes;
    let (x, w) = gauss_legendre(n);
    let ma = m.unsigned_abs() as usize;
    let (mut re, mut im) = (0.0, 0.0);
    for (i, &xs) in x.iter().enumerate() {
        let s = 0.5 * (xs + 1.0);
        let ws = 0.5 * w[i] * s * s;
        for (j, &ct) in x.iter().enumerate() {
            let st = (1.0 - ct * ct).sqrt();
            for (k, &xp) in x.iter().enumerate() {
                let p = PI * (xp + 1.0);
                let wt = ws * w[j] * PI * w[k];
                let (sp, cp) = p.sin_cos();
                let (px, py, pz) = (sa * s * st * cp, sb * s * st * sp, sc * s * ct);
                let rho = (px * px + py * py + pz * pz).sqrt();
                let leg = rho.powi(l as i32) * assoc_legendre(l, ma, pz / rho);
                let phi = py.atan2(px);
                let (sm, cm) = (m as f64 * phi).sin_cos();
                re += wt * leg * cm;
                im -= wt * leg * sm;
            }
        }
    }
    let norm = 3.0 / (4.0 * PI * body.mean_radius().powi(l as i32))
        * (factorial(l - ma) / factorial(l + ma)).sqrt();
    (norm * re, norm * im)
}

fn converge<F>(mut eval: F) -> Result<(f64, f64), BodiesError>
where
    F: FnMut(usize) -> (f64, f64),
{
    let mut n = QUAD_START_NODES;
    let mut prev = eval(n);
    loop {
        let next_n = 2 * n;
        let next = eval(next_n);
        let gap = (next.0 - prev.0).hypot(next.1 - prev.1);
        if gap < QUAD_TOL {
            return Ok(next);
        }
        if next_n >= QUAD_MAX_NODES {
            return Err(BodiesError::QuadratureNoConvergence {
                coarse: prev.0,
                fine: next.0,
                coarse_nodes: n,
                fine_nodes: next_n,
                gap,
            });
        }
        n = next_n;
        prev = next;
    }
}

/// Stokes coefficient by tensor Gauss–Legendre quadrature over the unit ball.
/// Works for any even degree; the node count doubles from 24 until two
/// successive estimates agree to `1e-8`.
pub fn stokes_quadrature(body: &BodyShape, l: i64, m: i64) -> Result<StokesCoeff, BodiesError> {
    check_even(l, m)?;
    let (value, _) = converge(|n| raw_integral(body, l as usize, m, n))?;
    Ok(StokesCoeff { l, m, value })
}

/// The same integral for any `(l, m)` with `|m| ≤ l`, returned as
/// `(re, im)`. For a homogeneous ellipsoid both parts vanish unless `l` and
/// `m` are even.
pub fn stokes_raw_integral(body: &BodyShape, l: i64, m: i64) -> Result<(f64, f64), BodiesError> {
    if l < 0 || m.abs() > l {
        return Err(BodiesError::Domain { l, m, reason: "need 0 <= |m| <= l" });
    }
    converge(|n| raw_integral(body, l as usize, m, n))
}

/// Physical dimension of a value passed through [`UnitSystem`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Time,
    Mass,
    Length,
    #[serde(alias = "moment_of_inertia")]
    Inertia,
}

impl FromStr for Quantity {
    type Err = BodiesError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "time" => Ok(Quantity::Time),
            "mass" => Ok(Quantity::Mass),
            "length" => Ok(Quantity::Length),
            "inertia" | "moment_of_inertia" => Ok(Quantity::Inertia),
            _ => Err(BodiesError::UnknownQuantity(s.to_string())),
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Quantity::Time => "time",
            Quantity::Mass => "mass",
            Quantity::Length => "length",
            Quantity::Inertia => "inertia",
        })
    }
}

/// External units: orbital period, total mass and total polar moment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitSystem {
    pub period: f64,
    pub total_mass: f64,
    pub total_inertia: f64,
}

impl UnitSystem {
    pub fn new(period: f64, total_mass: f64, total_inertia: f64) -> Result<Self, BodiesError> {
        let u = UnitSystem {
            period,
            total_mass,
            total_inertia,
        };
        u.validate()?;
        Ok(u)
    }

    pub fn validate(&self) -> Result<(), BodiesError> {
        for (name, value) in [
            ("period", self.period),
            ("total_mass", self.total_mass),
            ("total_inertia", self.total_inertia),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(BodiesError::UnitSystem { name, value });
            }
        }
        Ok(())
    }

    /// Multiplier taking a physical value of `q` to model units.
    pub fn scale(&self, q: Quantity) -> f64 {
        match q {
            Quantity::Time => TAU / self.period,
            Quantity::Mass => 1.0 / self.total_mass,
            Quantity::Length => (self.total_mass / self.total_inertia).sqrt(),
            Quantity::Inertia => 1.0 / self.total_inertia,
        }
    }

    pub fn to_model_units(&self, q: Quantity, value: f64) -> f64 {
        value * self.scale(q)
    }

    pub fn from_model_units(&self, q: Quantity, value: f64) -> f64 {
        value / self.scale(q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn triaxial() -> BodyShape {
        BodyShape::from_semi_axes(0.3, 1.3, 1.0, 0.8).unwrap()
    }

    #[test]
    fn semi_axes_roundtrip() {
        let b = triaxial();
        let [a, bb, c] = b.moments();
        let again = BodyShape::from_moments(0.3, a, bb, c).unwrap();
        for (x, y) in again.semi_axes().iter().zip([1.3, 1.0, 0.8]) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn sphere_has_only_monopole() {
        let s = BodyShape::sphere(0.5, 0.2).unwrap();
        assert_eq!(stokes_closed_form(&s, 0, 0).unwrap().value, 1.0);
        for (l, m) in [(2, 0), (2, 2), (4, 2), (4, 4)] {
            assert_eq!(stokes_closed_form(&s, l, m).unwrap().value, 0.0);
        }
        assert!(stokes_quadrature(&s, 4, 4).unwrap().value.abs() < 1e-8);
    }

    #[test]
    fn closed_forms_from_normalised_shape() {
        // Semi-axes solving a² − b² = 0.5, a² + b² − 2c² = 1, abc = 1 (bisection
        // oracle), so that d/(MR²) = 0.1 and q/(MR²) = 0.2 with M = 1.
        let b = BodyShape::from_semi_axes(1.0, 1.208_948_568_812_567_8, 0.980_589_945_917_230_1, 0.843_538_168_688_267_7)
            .unwrap();
        let r2 = b.mean_radius().powi(2);
        assert!((r2 - 1.0).abs() < 1e-12);
        assert!((b.d() - 0.1).abs() < 1e-12);
        assert!((b.q() - 0.2).abs() < 1e-12);
        let z22 = stokes_closed_form(&b, 2, 2).unwrap().value;
        assert!((z22 - (3.0f64 / 8.0).sqrt() * 0.1).abs() < 1e-12);
        let z40 = stokes_closed_form(&b, 4, 0).unwrap().value;
        assert!((z40 - 15.0 / 56.0 * (0.01 + 0.08)).abs() < 1e-12);
    }

    #[test]
    fn degree_four_from_polynomial_moments() {
        // Uniform-ellipsoid moments ∫x⁴ = 3Ma⁴/35, ∫x²y² = Ma²b²/35 give the
        // solid-harmonic integrals directly.
        let b = triaxial();
        let [sa, sb, sc] = b.semi_axes();
        let (a2, b2, c2) = (sa * sa, sb * sb, sc * sc);
        let m = b.mass();
        let r4 = b.mean_radius().powi(4);
        let i42 = 7.5 * 3.0 * m / 35.0 * (a2 - b2) * (2.0 * c2 - a2 - b2);
        let z42 = i42 / (360.0f64.sqrt() * m * r4);
        let i44 = 105.0 * 3.0 * m / 35.0 * (a2 - b2).powi(2);
        let z44 = i44 / (40320.0f64.sqrt() * m * r4);
        assert!((stokes_closed_form(&b, 4, 2).unwrap().value - z42).abs() < 1e-13);
        assert!((stokes_closed_form(&b, 4, 4).unwrap().value - z44).abs() < 1e-13);
    }

    #[test]
    fn mirror_in_order() {
        let b = triaxial();
        for (l, m) in [(2, 2), (4, 2), (4, 4)] {
            let p = stokes_closed_form(&b, l, m).unwrap().value;
            let n = stokes_closed_form(&b, l, -m).unwrap().value;
            assert_eq!(p, n);
        }
    }

    #[test]
    fn quadrature_matches_closed_form() {
        let b = triaxial();
        let mono = stokes_quadrature(&b, 0, 0).unwrap().value;
        assert!((mono - 1.0).abs() < 1e-8);
        for (l, m) in [(2, 0), (2, 2), (4, 0), (4, 2), (4, 4)] {
            let q = stokes_quadrature(&b, l, m).unwrap().value;
            let c = stokes_closed_form(&b, l, m).unwrap().value;
            assert!((q - c).abs() < 1e-6, "({l},{m}): {q} vs {c}");
        }
    }

    #[test]
    fn odd_indices_vanish() {
        let b = triaxial();
        for (l, m) in [(1, 0), (1, 1), (2, 1), (3, 2), (3, 3), (4, 1), (4, 3)] {
            let (re, im) = stokes_raw_integral(&b, l, m).unwrap();
            assert!(re.abs() < 1e-10 && im.abs() < 1e-10, "({l},{m})");
        }
        // Imaginary parts of even entries vanish too.
        let (_, im) = stokes_raw_integral(&b, 4, 2).unwrap();
        assert!(im.abs() < 1e-10);
    }

    #[test]
    fn degree_six_by_quadrature() {
        let b = triaxial();
        assert!(matches!(
            stokes_closed_form(&b, 6, 0),
            Err(BodiesError::UnsupportedDegree(6))
        ));
        let z = stokes_quadrature(&b, 6, 2).unwrap().value;
        assert!(z.is_finite());
    }

    #[test]
    fn closed_form_domain_errors() {
        let b = triaxial();
        assert!(matches!(stokes_closed_form(&b, 3, 0), Err(BodiesError::Domain { .. })));
        assert!(matches!(stokes_closed_form(&b, 2, 1), Err(BodiesError::Domain { .. })));
        assert!(matches!(stokes_closed_form(&b, 2, 4), Err(BodiesError::Domain { .. })));
    }

    #[test]
    fn invalid_bodies() {
        assert!(matches!(
            BodyShape::from_moments(1.0, 0.5, 0.4, 0.6),
            Err(BodiesError::MomentOrder(..))
        ));
        assert!(matches!(
            BodyShape::from_moments(1.0, 0.1, 0.2, 0.4),
            Err(BodiesError::Triangle(..))
        ));
        assert!(matches!(BodyShape::from_moments(0.0, 1.0, 1.0, 1.0), Err(BodiesError::Mass(_))));
        assert!(BodyShape::from_semi_axes(1.0, 1.0, 2.0, 0.5).is_err());
    }

    #[test]
    fn descriptor_requires_exactly_one_shape() {
        let ok: BodyShape =
            serde_json::from_str(r#"{"mass":0.5,"semi_axes":[1.3,1.0,0.8]}"#).unwrap();
        assert!((ok.semi_axes()[0] - 1.3).abs() < 1e-12);
        let both = r#"{"mass":0.5,"semi_axes":[1,1,1],"moments":[1,1,1]}"#;
        assert!(serde_json::from_str::<BodyShape>(both).is_err());
        assert!(serde_json::from_str::<BodyShape>(r#"{"mass":0.5}"#).is_err());
        let back = serde_json::to_string(&ok).unwrap();
        let again: BodyShape = serde_json::from_str(&back).unwrap();
        assert_eq!(again.moments(), ok.moments());
    }

    #[test]
    fn unit_examples() {
        let u = UnitSystem::new(6.387, 1.6e22, 3.0e35).unwrap();
        assert!((u.to_model_units(Quantity::Time, 6.387) - TAU).abs() < 1e-14);
        assert!((u.to_model_units(Quantity::Inertia, 3.0e35) - 1.0).abs() < 1e-14);
        assert!((u.to_model_units(Quantity::Mass, 0.8e22) - 0.5).abs() < 1e-14);
        assert!(matches!("speed".parse::<Quantity>(), Err(BodiesError::UnknownQuantity(_))));
        assert!(UnitSystem::new(1.0, -1.0, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn unit_roundtrip(
            period in 1e-3f64..1e6,
            mass in 1e-3f64..1e30,
            inertia in 1e-3f64..1e40,
            value in -1e12f64..1e12,
            tag in 0usize..4,
        ) {
            let u = UnitSystem::new(period, mass, inertia).unwrap();
            let q = [Quantity::Time, Quantity::Mass, Quantity::Length, Quantity::Inertia][tag];
            let back = u.from_model_units(q, u.to_model_units(q, value));
            prop_assert!((back - value).abs() <= 1e-14 * value.abs().max(f64::MIN_POSITIVE));
        }

        #[test]
        fn inertia_from_semi_axes_roundtrip(
            mass in 0.01f64..10.0,
            c in 0.1f64..2.0,
            rb in 1.0f64..2.0,
            ra in 1.0f64..2.0,
        ) {
            let sb = c * rb;
            let sa = sb * ra;
            let body = BodyShape::from_semi_axes(mass, sa, sb, c).unwrap();
            let [a, b, cc] = body.moments();
            let again = BodyShape::from_moments(mass, a, b, cc).unwrap();
            let [a2, b2, c2] = BodyShape::from_semi_axes(mass, again.semi_axes()[0], again.semi_axes()[1], again.semi_axes()[2]).unwrap().moments();
            prop_assert!((a2 - a).abs() <= 1e-12 * a);
            prop_assert!((b2 - b).abs() <= 1e-12 * b);
            prop_assert!((c2 - cc).abs() <= 1e-12 * cc);
            prop_assert!(body.q() >= body.d());
        }
    }
}
