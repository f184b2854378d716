//! Inviscid Burgers rarefaction and its tanh-smoothed counterpart.

use crate::error::{Error, Result};

fn check_speeds(w_minus: f64, w_plus: f64) -> Result<()> {
    if !(w_minus < w_plus) {
        return Err(Error::usage(format!(
            "Burgers rarefaction needs w_minus < w_plus, got {w_minus} >= {w_plus}"
        )));
    }
    Ok(())
}

/// Centered rarefaction fan of Burgers' equation.
pub fn burgers_exact(t: f64, x: f64, w_minus: f64, w_plus: f64) -> Result<f64> {
    check_speeds(w_minus, w_plus)?;
    if !(t > 0.0) {
        return Err(Error::usage(format!("burgers_exact needs t > 0, got {t}")));
    }
    let xi = x / t;
    Ok(xi.clamp(w_minus, w_plus))
}

/// Value and first two x-derivatives of the smoothed rarefaction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BurgersSample {
    pub w: f64,
    pub w_x: f64,
    pub w_xx: f64,
}

/// Smoothed rarefaction with tanh initial data of width `sigma`.
pub fn burgers_smooth(t: f64, x: f64, sigma: f64, w_minus: f64, w_plus: f64) -> Result<f64> {
    Ok(burgers_smooth_sample(t, x, sigma, w_minus, w_plus)?.w)
}

pub fn burgers_smooth_sample(t: f64, x: f64, sigma: f64, w_minus: f64, w_plus: f64) -> Result<BurgersSample> {
    check_speeds(w_minus, w_plus)?;
    if !(sigma > 0.0) {
        return Err(Error::usage(format!("smoothing width must be positive, got {sigma}")));
    }
    if !(t >= 0.0) {
        return Err(Error::usage(format!("burgers_smooth needs t >= 0, got {t}")));
    }
    let mid = 0.5 * (w_plus + w_minus);
    let half = 0.5 * (w_plus - w_minus);
    // w_σ and its derivatives at a foot point
    let init = |x0: f64| {
        let th = (x0 / sigma).tanh();
        let sech2 = 1.0 - th * th;
        (
            mid + half * th,
            half / sigma * sech2,
            -2.0 * half / (sigma * sigma) * th * sech2,
        )
    };
    let x0 = if t == 0.0 {
        x
    } else {
        // x0 + w(x0)·t = x, with g' = 1 + w'·t ≥ 1
        let mut lo = x - w_plus * t;
        let mut hi = x - w_minus * t;
        let mut x0 = (x - mid * t).clamp(lo, hi);
        let tol = 1e-15 * (1.0 + x.abs() + t * w_plus.abs().max(w_minus.abs()));
        let mut converged = false;
        let mut g_prev = f64::INFINITY;
        for _ in 0..200 {
            let (w, wp, _) = init(x0);
            let g = x0 + w * t - x;
            if g > 0.0 {
                hi = x0;
            } else if g < 0.0 {
                lo = x0;
            } else {
                converged = true;
                break;
            }
            let mut next = x0 - g / (1.0 + wp * t);
            // bisect when Newton leaves the bracket or stalls (it can cycle across a steep front)
            if !(next > lo && next < hi) || g.abs() > 0.5 * g_prev {
                next = 0.5 * (lo + hi);
            }
            g_prev = g.abs();
            let step = (next - x0).abs();
            x0 = next;
            if step <= tol || hi - lo <= tol {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::internal(format!(
                "characteristic foot not found for t = {t}, x = {x}"
            )));
        }
        x0
    };
    let (w, wp, wpp) = init(x0);
    let jac = 1.0 + wp * t;
    Ok(BurgersSample {
        w,
        w_x: wp / jac,
        w_xx: wpp / (jac * jac * jac),
    })
}
