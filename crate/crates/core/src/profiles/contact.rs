//! Self-similar profile of the nonlinear diffusion equation behind the viscous contact wave.
//!
//! With η = x/√(ε(1+t)) both models reduce to `-(η/2)Θ' = (D(Θ)Θ')'`, where
//! `D(Θ) = a/Θ` in the Navier-Stokes form and `D(Θ) = c/√Θ` in the kinetic form.
//! The flux `J = DΘ'` never changes sign, so the shooting state is `(Θ, ln|J|)`.

use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{dopri5, OdeStatus};

static CLAMP_COUNT: AtomicU64 = AtomicU64::new(0);

/// Number of table lookups so far that fell outside the tabulated η range.
pub fn clamp_warnings() -> u64 {
    CLAMP_COUNT.load(Ordering::Relaxed)
}

/// Diffusivity of the self-similar equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Diffusivity {
    /// `Θ_t = a(Θ_x/Θ)_x`.
    Constant(f64),
    /// `Θ_t = (a(Θ)Θ_x)_x` with `a(Θ) = coeff/√Θ`.
    InverseSqrt(f64),
}

impl Diffusivity {
    /// Effective D(Θ) in the flux form and its derivative.
    #[inline]
    fn d(&self, theta: f64) -> (f64, f64) {
        match *self {
            Diffusivity::Constant(a) => (a / theta, -a / (theta * theta)),
            Diffusivity::InverseSqrt(c) => {
                let s = theta.sqrt();
                (c / s, -0.5 * c / (s * theta))
            }
        }
    }

    fn coefficient(&self) -> f64 {
        match *self {
            Diffusivity::Constant(a) | Diffusivity::InverseSqrt(a) => a,
        }
    }
}

/// Dense table of Θ̂(η) on a uniform grid over [-L, L].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ContactWaveTable {
    pub eta_min: f64,
    pub eta_step: f64,
    pub theta_hat: Vec<f64>,
    pub theta_hat_prime: Vec<f64>,
    pub theta_hat_second: Vec<f64>,
    pub delta_cd: f64,
    pub theta_left: f64,
    pub theta_right: f64,
    pub diffusivity: Diffusivity,
    /// Final boundary mismatch |Θ̂(L) - θ_+| of the shooting solve.
    pub mismatch: f64,
}

const TABLE_STEP: f64 = 0.0025;

impl ContactWaveTable {
    pub fn half_width(&self) -> f64 {
        -self.eta_min
    }

    pub fn eta_grid(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.theta_hat.len()).map(move |i| self.eta_min + i as f64 * self.eta_step)
    }

    /// (Θ̂, Θ̂') at η, cubic Hermite inside the table and the boundary constants outside.
    pub fn eval(&self, eta: f64) -> (f64, f64) {
        let n = self.theta_hat.len();
        if n < 2 || self.delta_cd == 0.0 {
            return (self.theta_left, 0.0);
        }
        let s = (eta - self.eta_min) / self.eta_step;
        if !(s >= 0.0) {
            CLAMP_COUNT.fetch_add(1, Ordering::Relaxed);
            return (self.theta_left, 0.0);
        }
        if s > (n - 1) as f64 {
            CLAMP_COUNT.fetch_add(1, Ordering::Relaxed);
            return (self.theta_right, 0.0);
        }
        let i = (s.floor() as usize).min(n - 2);
        let tau = s - i as f64;
        let h = self.eta_step;
        let (h00, h10, h01, h11) = hermite(tau);
        let th = &self.theta_hat;
        let tp = &self.theta_hat_prime;
        let tpp = &self.theta_hat_second;
        let val = h00 * th[i] + h10 * h * tp[i] + h01 * th[i + 1] + h11 * h * tp[i + 1];
        let der = h00 * tp[i] + h10 * h * tpp[i] + h01 * tp[i + 1] + h11 * h * tpp[i + 1];
        (val, der)
    }
}

#[inline]
fn hermite(t: f64) -> (f64, f64, f64, f64) {
    let t2 = t * t;
    let t3 = t2 * t;
    (2.0 * t3 - 3.0 * t2 + 1.0, t3 - 2.0 * t2 + t, -2.0 * t3 + 3.0 * t2, t3 - t2)
}

/// Default half-width: ten diffusion lengths of the largest D, at least 10.
pub fn default_half_width(theta_left: f64, theta_right: f64, diffusivity: Diffusivity) -> f64 {
    let lo = theta_left.min(theta_right);
    let hi = theta_left.max(theta_right);
    let dmax = diffusivity.d(lo).0.max(diffusivity.d(hi).0);
    10.0 * dmax.sqrt().max(1.0)
}

/// Integrates from -L with ψ = ln|J| = psi0, returning Θ(L) (or a sentinel on blow-up).
fn shoot(psi0: f64, sign: f64, theta_left: f64, cap: (f64, f64), diff: Diffusivity, l: f64) -> Result<f64> {
    let mut y = [theta_left, psi0];
    let mut h = 1e-3;
    let rhs = |eta: f64, y: &[f64; 2], dy: &mut [f64; 2]| {
        let theta = y[0];
        if !(theta > cap.0 && theta < cap.1) || !y[1].is_finite() || y[1] > 700.0 {
            return false;
        }
        let (d, _) = diff.d(theta);
        dy[0] = sign * y[1].exp() / d;
        dy[1] = -eta / (2.0 * d);
        true
    };
    match dopri5(rhs, -l, l, &mut y, &mut h, 1e-12, 1e-14)? {
        OdeStatus::Completed => Ok(y[0]),
        OdeStatus::Stopped => Ok(if sign > 0.0 { cap.1 } else { cap.0 }),
    }
}

/// Solves the self-similar two-point problem Θ̂(-L) = θ_-, Θ̂(L) = θ_+ by shooting on ln|J(-L)|.
pub fn solve_contact_selfsimilar(
    theta_left: f64,
    theta_right: f64,
    diffusivity: Diffusivity,
    half_width: f64,
) -> Result<ContactWaveTable> {
    if !(theta_left > 0.0 && theta_right > 0.0) {
        return Err(Error::domain(format!(
            "contact temperatures must be positive, got {theta_left}, {theta_right}"
        )));
    }
    if !(diffusivity.coefficient() > 0.0) {
        return Err(Error::domain("contact diffusivity must be positive"));
    }
    if !(half_width > 0.0) {
        return Err(Error::usage(format!("half-width must be positive, got {half_width}")));
    }
    let l = half_width;
    let n = (2.0 * l / TABLE_STEP).round() as usize;
    let step = 2.0 * l / n as f64;
    let delta = (theta_right - theta_left).abs();
    if delta == 0.0 {
        return Ok(ContactWaveTable {
            eta_min: -l,
            eta_step: step,
            theta_hat: vec![theta_left; n + 1],
            theta_hat_prime: vec![0.0; n + 1],
            theta_hat_second: vec![0.0; n + 1],
            delta_cd: 0.0,
            theta_left,
            theta_right,
            diffusivity,
            mismatch: 0.0,
        });
    }
    let sign = if theta_right > theta_left { 1.0 } else { -1.0 };
    let lo_t = theta_left.min(theta_right);
    let hi_t = theta_left.max(theta_right);
    let cap = (0.25 * lo_t, 4.0 * hi_t);

    // mismatch is increasing in psi0 (scaled by sign)
    let miss = |psi0: f64| -> Result<f64> { Ok(sign * (shoot(psi0, sign, theta_left, cap, diffusivity, l)? - theta_right)) };
    let mut a = -60.0;
    let mut b = 5.0;
    let mut fa = miss(a)?;
    let mut fb = miss(b)?;
    let mut widen = 0;
    while fa > 0.0 {
        a -= 100.0;
        fa = miss(a)?;
        widen += 1;
        if widen > 20 {
            return Err(Error::internal("contact shooting: lower bracket not found"));
        }
    }
    while fb < 0.0 {
        b += 10.0;
        fb = miss(b)?;
        widen += 1;
        if widen > 40 {
            return Err(Error::internal("contact shooting: upper bracket not found"));
        }
    }
    let mut psi = 0.5 * (a + b);
    let mut best = f64::INFINITY;
    let mut best_psi = psi;
    for _ in 0..200 {
        psi = 0.5 * (a + b);
        let f = miss(psi)?;
        if f.abs() < best {
            best = f.abs();
            best_psi = psi;
        }
        if f.abs() <= 1e-13 * hi_t || psi == a || psi == b {
            break;
        }
        if f > 0.0 {
            b = psi;
        } else {
            a = psi;
        }
    }
    if best > 1e-10 * hi_t {
        return Err(Error::internal(format!(
            "contact shooting did not converge: mismatch {best}"
        )));
    }

    // dense pass
    let mut theta = Vec::with_capacity(n + 1);
    let mut prime = Vec::with_capacity(n + 1);
    let mut second = Vec::with_capacity(n + 1);
    let mut y = [theta_left, best_psi];
    let mut h = step;
    let record = |eta: f64, y: &[f64; 2], theta: &mut Vec<f64>, prime: &mut Vec<f64>, second: &mut Vec<f64>| {
        let (d, dd) = diffusivity.d(y[0]);
        let tp = sign * y[1].exp() / d;
        theta.push(y[0]);
        prime.push(tp);
        second.push(-eta * tp / (2.0 * d) - dd * tp * tp / d);
    };
    record(-l, &y, &mut theta, &mut prime, &mut second);
    for i in 0..n {
        let e0 = -l + i as f64 * step;
        let e1 = if i + 1 == n { l } else { -l + (i + 1) as f64 * step };
        let st = dopri5(
            |eta: f64, y: &[f64; 2], dy: &mut [f64; 2]| {
                let (d, _) = diffusivity.d(y[0]);
                dy[0] = sign * y[1].exp() / d;
                dy[1] = -eta / (2.0 * d);
                y[0] > 0.0
            },
            e0,
            e1,
            &mut y,
            &mut h,
            1e-12,
            1e-14,
        )?;
        if st != OdeStatus::Completed {
            return Err(Error::internal("contact profile left the admissible range"));
        }
        record(e1, &y, &mut theta, &mut prime, &mut second);
    }
    let mismatch = (theta[n] - theta_right).abs();
    Ok(ContactWaveTable {
        eta_min: -l,
        eta_step: step,
        theta_hat: theta,
        theta_hat_prime: prime,
        theta_hat_second: second,
        delta_cd: delta,
        theta_left,
        theta_right,
        diffusivity,
        mismatch,
    })
}
