//! Ideal-gas thermodynamics in Lagrangian variables (specific volume, velocity, temperature).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ideal-gas constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GasParams {
    #[serde(rename = "R")]
    pub r: f64,
    pub gamma: f64,
    #[serde(rename = "A")]
    pub a: f64,
}

impl GasParams {
    pub fn new(r: f64, gamma: f64, a: f64) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::domain(format!("gas constant R must be positive, got {r}")));
        }
        if !(gamma > 1.0 && gamma.is_finite()) {
            return Err(Error::domain(format!("gamma must exceed 1, got {gamma}")));
        }
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::domain(format!("entropy constant A must be positive, got {a}")));
        }
        Ok(GasParams { r, gamma, a })
    }

    /// R = A = 1 with the given adiabatic exponent.
    pub fn fluid(gamma: f64) -> Result<Self> {
        Self::new(1.0, gamma, 1.0)
    }

    /// Monatomic gas with R = 2/3, so that the internal energy equals θ.
    pub fn kinetic() -> Self {
        GasParams { r: 2.0 / 3.0, gamma: 5.0 / 3.0, a: 1.0 }
    }

    #[inline]
    pub fn p(&self, v: f64, theta: f64) -> f64 {
        self.r * theta / v
    }

    /// p = A v^{-γ} exp((γ-1)s/R).
    #[inline]
    pub fn p_isentropic(&self, v: f64, s: f64) -> f64 {
        self.a * v.powf(-self.gamma) * ((self.gamma - 1.0) * s / self.r).exp()
    }

    #[inline]
    pub fn s(&self, v: f64, theta: f64) -> f64 {
        self.r / (self.gamma - 1.0) * (self.r * theta * v.powf(self.gamma - 1.0) / self.a).ln()
    }

    #[inline]
    pub fn e(&self, theta: f64) -> f64 {
        self.r * theta / (self.gamma - 1.0)
    }

    /// Lagrangian sound speed √(γp/v).
    #[inline]
    pub fn lagrangian_sound_speed(&self, v: f64, theta: f64) -> f64 {
        (self.gamma * self.p(v, theta) / v).sqrt()
    }

    /// Eulerian sound speed √(γpv) = √(γRθ).
    #[inline]
    pub fn sound_speed(&self, theta: f64) -> f64 {
        (self.gamma * self.r * theta).sqrt()
    }
}

/// A point value of specific volume, velocity and temperature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermoState {
    pub v: f64,
    pub u: f64,
    pub theta: f64,
}

impl ThermoState {
    pub fn new(v: f64, u: f64, theta: f64) -> Result<Self> {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::domain(format!("specific volume must be positive, got {v}")));
        }
        if !(theta > 0.0 && theta.is_finite()) {
            return Err(Error::domain(format!("temperature must be positive, got {theta}")));
        }
        if !u.is_finite() {
            return Err(Error::domain(format!("velocity must be finite, got {u}")));
        }
        Ok(ThermoState { v, u, theta })
    }

    pub fn pressure(&self, params: &GasParams) -> f64 {
        params.p(self.v, self.theta)
    }

    pub fn entropy(&self, params: &GasParams) -> f64 {
        params.s(self.v, self.theta)
    }

    /// Componentwise maximum absolute difference.
    pub fn max_diff(&self, other: &ThermoState) -> f64 {
        (self.v - other.v)
            .abs()
            .max((self.u - other.u).abs())
            .max((self.theta - other.theta).abs())
    }
}

/// Characteristic family of the Euler system that carries a rarefaction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    One,
    Three,
}

impl Family {
    pub fn from_index(i: u32) -> Result<Self> {
        match i {
            1 => Ok(Family::One),
            3 => Ok(Family::Three),
            _ => Err(Error::usage(format!("wave family must be 1 or 3, got {i}"))),
        }
    }

    /// -1 for the 1-family, +1 for the 3-family.
    #[inline]
    pub fn sign(self) -> f64 {
        match self {
            Family::One => -1.0,
            Family::Three => 1.0,
        }
    }
}

fn check_positive(v: f64, theta: f64) -> Result<()> {
    if !(v > 0.0) || !(theta > 0.0) {
        return Err(Error::domain(format!(
            "v and theta must be positive, got v = {v}, theta = {theta}"
        )));
    }
    Ok(())
}

pub fn pressure(v: f64, theta: f64, params: &GasParams) -> Result<f64> {
    check_positive(v, theta)?;
    Ok(params.p(v, theta))
}

pub fn entropy(v: f64, theta: f64, params: &GasParams) -> Result<f64> {
    check_positive(v, theta)?;
    Ok(params.s(v, theta))
}

pub fn pressure_isentropic(v: f64, s: f64, params: &GasParams) -> Result<f64> {
    if !(v > 0.0) {
        return Err(Error::domain(format!("specific volume must be positive, got {v}")));
    }
    Ok(params.p_isentropic(v, s))
}

pub fn internal_energy(theta: f64, params: &GasParams) -> f64 {
    params.e(theta)
}

/// λ₁ = -√(γp/v), λ₃ = +√(γp/v) on the isentrope s.
pub fn char_speed(v: f64, s: f64, family: Family, params: &GasParams) -> Result<f64> {
    let p = pressure_isentropic(v, s, params)?;
    Ok(family.sign() * (params.gamma * p / v).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn unit(gamma: f64) -> GasParams {
        GasParams::fluid(gamma).unwrap()
    }

    #[test]
    fn pressure_examples() {
        assert_eq!(pressure(1.0, 1.0, &unit(1.4)).unwrap(), 1.0);
        let k = GasParams::kinetic();
        assert!((pressure(1.0, 1.0, &k).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((pressure(2.0, 3.0, &k).unwrap() - 1.0).abs() < 1e-15);
        assert!(pressure(0.0, 1.0, &k).is_err());
        assert!(pressure(1.0, -1.0, &k).is_err());
    }

    #[test]
    fn entropy_examples() {
        let g = unit(5.0 / 3.0);
        assert_eq!(entropy(1.0, 1.0, &g).unwrap(), 0.0);
        let s = entropy(1.7, 0.9, &g).unwrap();
        let p = pressure_isentropic(1.7, s, &g).unwrap();
        assert!((p / (0.9 / 1.7) - 1.0).abs() < 1e-12);
        let s2 = entropy(2.0, 1.0, &unit(2.0)).unwrap();
        assert!((s2 - 2f64.ln()).abs() < 1e-14);
        assert!(entropy(-1.0, 1.0, &g).is_err());
    }

    #[test]
    fn char_speed_examples() {
        let g = unit(5.0 / 3.0);
        let s = entropy(1.0, 1.0, &g).unwrap();
        let l3 = char_speed(1.0, s, Family::Three, &g).unwrap();
        let l1 = char_speed(1.0, s, Family::One, &g).unwrap();
        assert!((l3 - (5.0f64 / 3.0).sqrt()).abs() < 1e-14);
        assert!((l1 + (5.0f64 / 3.0).sqrt()).abs() < 1e-14);

        let g = unit(1.4);
        let s = entropy(2.0, 1.0, &g).unwrap(); // p = 0.5
        let l = char_speed(2.0, s, Family::Three, &g).unwrap();
        assert!((l - 0.35f64.sqrt()).abs() < 1e-14);
        assert!(Family::from_index(2).is_err());
    }

    #[test]
    fn params_validated() {
        assert!(GasParams::new(0.0, 1.4, 1.0).is_err());
        assert!(GasParams::new(1.0, 1.0, 1.0).is_err());
        assert!(GasParams::new(1.0, 1.4, -1.0).is_err());
        assert!(ThermoState::new(1.0, 0.0, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn pressure_routes_agree(v in 0.05f64..20.0, theta in 0.05f64..20.0,
                                 gamma in 1.05f64..3.0, r in 0.1f64..5.0, a in 0.1f64..5.0) {
            let g = GasParams::new(r, gamma, a).unwrap();
            let s = g.s(v, theta);
            let p1 = g.p(v, theta);
            let p2 = g.p_isentropic(v, s);
            prop_assert!((p1 - p2).abs() <= 1e-12 * p1);
        }

        #[test]
        fn speeds_antisymmetric(v in 0.05f64..20.0, theta in 0.05f64..20.0, gamma in 1.05f64..3.0) {
            let g = unit(gamma);
            let s = g.s(v, theta);
            let l1 = char_speed(v, s, Family::One, &g).unwrap();
            let l3 = char_speed(v, s, Family::Three, &g).unwrap();
            prop_assert!(l1 < 0.0 && l3 > 0.0);
            prop_assert_eq!(l1, -l3);
        }

        #[test]
        fn lambda3_decreasing_on_isentrope(s in -3.0f64..3.0, gamma in 1.05f64..3.0) {
            let g = unit(gamma);
            let mut prev = f64::INFINITY;
            for k in 1..200 {
                let v = 0.02 * k as f64;
                let l = char_speed(v, s, Family::Three, &g).unwrap();
                prop_assert!(l < prev);
                prev = l;
            }
        }

        #[test]
        fn energy_linear(theta in 0.01f64..100.0, gamma in 1.05f64..3.0) {
            let g = unit(gamma);
            prop_assert!((internal_energy(2.0 * theta, &g) - 2.0 * internal_energy(theta, &g)).abs()
                <= 1e-14 * internal_energy(theta, &g));
        }
    }
}
