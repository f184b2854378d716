//! Macro-micro split f = M[f] + G and the weighted distance to a Maxwellian.
//!
//! The collision invariants are χ_j = M·p_j with p_j a polynomial in ξ₁ and
//! s = ξ₂² + ξ₃², written p_j = a_j(ξ₁) + b_j(ξ₁)·s. Then ⟨φ, χ_j⟩ in the 1/M inner
//! product is ∫ φ p_j dξ = Σ w (a_j g_φ + 2 b_j h_φ), exact for any reduced pair.
//! χ₂ and χ₃ are odd in the transverse velocity and vanish in reduced form.

use serde::{Deserialize, Serialize};

use super::{fill_maxwellian, primitive, reduced_moments, KineticField, VelocityGrid, KINETIC_R};
use crate::error::{Error, Result};
use crate::gas::ThermoState;

/// P₀ and P₁ for a fixed local Maxwellian.
#[derive(Debug, Clone)]
pub struct MacroProjector {
    w: Vec<f64>,
    /// (a_j, b_j) coefficients of j = 0, 1, 4.
    poly: [(Vec<f64>, Vec<f64>); 3],
    /// Reduced (g, h) of χ₀, χ₁, χ₄.
    chi: [(Vec<f64>, Vec<f64>); 3],
    /// Σ w g_M / ρ, the ⟨χ₂, χ₂⟩ = ⟨χ₃, χ₃⟩ entry.
    transverse_norm: f64,
}

impl MacroProjector {
    pub fn new(rho: f64, u: f64, theta: f64, vg: &VelocityGrid) -> Result<Self> {
        super::maxwellian(rho, u, theta, 0.0)?;
        let n = vg.len();
        let rt = KINETIC_R * theta;
        let mut gm = vec![0.0; n];
        let mut hm = vec![0.0; n];
        fill_maxwellian(rho, u, theta, &vg.nodes, &mut gm, &mut hm);
        let sr = rho.sqrt();
        let s6 = (6.0 * rho).sqrt();
        let coef = |f: &dyn Fn(f64) -> (f64, f64)| -> (Vec<f64>, Vec<f64>) { vg.nodes.iter().map(|&x| f(x)).unzip() };
        let poly = [
            coef(&|_| (1.0 / sr, 0.0)),
            coef(&|x| ((x - u) / (sr * rt.sqrt()), 0.0)),
            coef(&|x| (((x - u) * (x - u) / rt - 3.0) / s6, 1.0 / (rt * s6))),
        ];
        // transverse moments of M: E[s] = 2Rθ, E[s²] = 8(Rθ)²
        let chi = [0, 1, 2].map(|j| {
            let (a, b) = &poly[j];
            let g: Vec<f64> = (0..n).map(|k| gm[k] * (a[k] + 2.0 * rt * b[k])).collect();
            let h: Vec<f64> = (0..n).map(|k| gm[k] * (a[k] * rt + 4.0 * rt * rt * b[k])).collect();
            (g, h)
        });
        let transverse_norm = vg.weights.iter().zip(&gm).map(|(w, g)| w * g).sum::<f64>() / rho;
        Ok(MacroProjector { w: vg.weights.clone(), poly, chi, transverse_norm })
    }

    /// ⟨φ, χ_j⟩ for j = 0, 1, 4.
    fn coords(&self, g: &[f64], h: &[f64]) -> [f64; 3] {
        [0, 1, 2].map(|j| {
            let (a, b) = &self.poly[j];
            (0..self.w.len()).map(|k| self.w[k] * (a[k] * g[k] + 2.0 * b[k] * h[k])).sum()
        })
    }

    /// P₀φ = Σ ⟨φ, χ_j⟩ χ_j.
    pub fn p0(&self, g: &[f64], h: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let c = self.coords(g, h);
        let n = self.w.len();
        let mut og = vec![0.0; n];
        let mut oh = vec![0.0; n];
        for (j, cj) in c.iter().enumerate() {
            for k in 0..n {
                og[k] += cj * self.chi[j].0[k];
                oh[k] += cj * self.chi[j].1[k];
            }
        }
        (og, oh)
    }

    /// P₁φ = φ - P₀φ.
    pub fn p1(&self, g: &[f64], h: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let (pg, ph) = self.p0(g, h);
        (
            g.iter().zip(&pg).map(|(a, b)| a - b).collect(),
            h.iter().zip(&ph).map(|(a, b)| a - b).collect(),
        )
    }

    /// 5×5 Gram matrix of χ₀..χ₄ in the 1/M inner product, evaluated on the grid.
    pub fn gram(&self) -> [[f64; 5]; 5] {
        let mut out = [[0.0; 5]; 5];
        let full = [0usize, 1, 4];
        for (i, &fi) in full.iter().enumerate() {
            let (g, h) = &self.chi[i];
            let c = self.coords(g, h);
            for (j, &fj) in full.iter().enumerate() {
                out[fi][fj] = c[j];
            }
        }
        out[2][2] = self.transverse_norm;
        out[3][3] = self.transverse_norm;
        out
    }
}

/// Gram matrix of the collision-invariant basis at (ρ, u₁, θ).
pub fn chi_gram(rho: f64, u: f64, theta: f64, vg: &VelocityGrid) -> Result<[[f64; 5]; 5]> {
    Ok(MacroProjector::new(rho, u, theta, vg)?.gram())
}

fn local_projector(field: &KineticField, cell: usize) -> Result<(MacroProjector, Vec<f64>, Vec<f64>)> {
    let (g, h) = field.cell_vecs(cell);
    let m = reduced_moments(&field.velocity.weights, &field.velocity.nodes, &g, &h);
    let (rho, u, theta) = primitive(m)?;
    Ok((MacroProjector::new(rho, u, theta, &field.velocity)?, g, h))
}

/// P₀f at one cell, with the basis built from the cell's own Maxwellian.
pub fn project_macro(field: &KineticField, cell: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let (p, g, h) = local_projector(field, cell)?;
    Ok(p.p0(&g, &h))
}

/// Non-fluid part G = f - M[f] at one cell.
pub fn project_micro(field: &KineticField, cell: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let (g, h) = field.cell_vecs(cell);
    let m = reduced_moments(&field.velocity.weights, &field.velocity.nodes, &g, &h);
    let (rho, u, theta) = primitive(m)?;
    let n = g.len();
    let mut gm = vec![0.0; n];
    let mut hm = vec![0.0; n];
    fill_maxwellian(rho, u, theta, &field.velocity.nodes, &mut gm, &mut hm);
    Ok((
        g.iter().zip(&gm).map(|(a, b)| a - b).collect(),
        h.iter().zip(&hm).map(|(a, b)| a - b).collect(),
    ))
}

/// Reference Maxwellian M_⋆ of the weighted norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GlobalMaxwellian {
    pub v_star: f64,
    pub u_star: f64,
    pub theta_star: f64,
}

impl GlobalMaxwellian {
    /// Requires θ_max/2 < θ_⋆ < θ_min over the run's temperature range.
    pub fn new(v_star: f64, u_star: f64, theta_star: f64, theta_range: (f64, f64)) -> Result<Self> {
        let (lo, hi) = theta_range;
        if !(v_star > 0.0 && theta_star > 0.0) {
            return Err(Error::domain(format!("global Maxwellian needs v, theta > 0, got {v_star}, {theta_star}")));
        }
        if !(0.5 * hi < theta_star && theta_star < lo) {
            return Err(Error::domain(format!(
                "theta_star = {theta_star} outside ({}, {lo}) required by the run range [{lo}, {hi}]",
                0.5 * hi
            )));
        }
        Ok(GlobalMaxwellian { v_star, u_star, theta_star })
    }

    /// θ_⋆ = 0.9·min θ, with v_⋆ and u_⋆ the averages over `states`.
    pub fn for_states(states: &[ThermoState]) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::usage("global Maxwellian needs at least one state"));
        }
        let n = states.len() as f64;
        let v = states.iter().map(|s| s.v).sum::<f64>() / n;
        let u = states.iter().map(|s| s.u).sum::<f64>() / n;
        let lo = states.iter().map(|s| s.theta).fold(f64::INFINITY, f64::min);
        let hi = states.iter().map(|s| s.theta).fold(f64::NEG_INFINITY, f64::max);
        Self::new(v, u, 0.9 * lo, (lo, hi))
    }

    /// Domain averages of the cell moments of `field`.
    pub fn for_field(field: &KineticField) -> Result<Self> {
        let states = (0..field.grid.n).map(|i| field.state(i)).collect::<Result<Vec<_>>>()?;
        Self::for_states(&states)
    }

    fn g_marginal(&self, xi: f64) -> f64 {
        let c = KINETIC_R * self.theta_star;
        let d = xi - self.u_star;
        (1.0 / self.v_star) / (2.0 * std::f64::consts::PI * c).sqrt() * (-d * d / (2.0 * c)).exp()
    }
}

/// ∫ N_a N_b / N_c over ℝ² for centered isotropic Gaussians with per-component
/// variances a, b, c: c² / (c(a + b) - ab), infinite when the integral diverges.
#[inline]
fn transverse_fold(a: f64, b: f64, c: f64) -> f64 {
    let den = c * (a + b) - a * b;
    if den > 0.0 {
        c * c / den
    } else {
        f64::INFINITY
    }
}

/// (g-component, full) weighted L² distance ‖f - M_ref‖ with weight 1/M_⋆.
///
/// The g-component is √(Σ w (g - g_M)²/g_⋆). The full value assumes the transverse
/// profile of f at each ξ₁ is a centered Gaussian with per-component variance h/g,
/// which holds for Maxwellians and their BGK relaxations from Maxwellian data, and folds
/// the transverse integral with [`transverse_fold`].
pub fn weighted_distance_parts(
    field: &KineticField,
    cell: usize,
    reference: &ThermoState,
    m_star: &GlobalMaxwellian,
) -> Result<(f64, f64)> {
    let (g, h) = field.cell_vecs(cell);
    let vg = &field.velocity;
    let n = vg.len();
    let mut gm = vec![0.0; n];
    let mut hm = vec![0.0; n];
    super::maxwellian(1.0 / reference.v, reference.u, reference.theta, 0.0)?;
    fill_maxwellian(1.0 / reference.v, reference.u, reference.theta, &vg.nodes, &mut gm, &mut hm);
    let b = KINETIC_R * reference.theta;
    let c = KINETIC_R * m_star.theta_star;
    let i_bb = transverse_fold(b, b, c);
    let mut g_part = 0.0;
    let mut full = 0.0;
    for k in 0..n {
        let gs = m_star.g_marginal(vg.nodes[k]);
        let d = g[k] - gm[k];
        g_part += vg.weights[k] * d * d / gs;
        let a = if g[k] > 0.0 { h[k] / g[k] } else { b };
        let i_aa = transverse_fold(a, a, c);
        let i_ab = transverse_fold(a, b, c);
        let bracket = d * d * i_bb + g[k] * g[k] * (i_aa - i_bb) - 2.0 * g[k] * gm[k] * (i_ab - i_bb);
        full += vg.weights[k] * bracket / gs;
    }
    Ok((g_part.sqrt(), full.max(0.0).sqrt()))
}

/// Full weighted distance; see [`weighted_distance_parts`].
pub fn weighted_distance(
    field: &KineticField,
    cell: usize,
    reference: &ThermoState,
    m_star: &GlobalMaxwellian,
) -> Result<f64> {
    Ok(weighted_distance_parts(field, cell, reference, m_star)?.1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ns::Grid;

    fn vg() -> VelocityGrid {
        let s = [ThermoState::new(1.0, -0.5, 0.8).unwrap(), ThermoState::new(1.0, 0.5, 1.3).unwrap()];
        VelocityGrid::for_states(&s, 64).unwrap()
    }

    #[test]
    fn gram_is_identity() {
        let g = chi_gram(1.3, 0.2, 1.1, &vg()).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((g[i][j] - e).abs() < 1e-8, "{i}{j}: {}", g[i][j]);
            }
        }
    }

    #[test]
    fn projections_are_idempotent_and_complementary() {
        let v = vg();
        let p = MacroProjector::new(1.0, 0.1, 0.9, &v).unwrap();
        let g: Vec<f64> = v.nodes.iter().map(|x| (-(x - 0.3) * (x - 0.3)).exp() * (1.0 + 0.1 * x)).collect();
        let h: Vec<f64> = v.nodes.iter().map(|x| 0.7 * (-(x * x)).exp()).collect();
        let (g0, h0) = p.p0(&g, &h);
        let (g00, h00) = p.p0(&g0, &h0);
        let (g1, h1) = p.p1(&g, &h);
        let (g11, h11) = p.p1(&g1, &h1);
        let (g01, h01) = p.p0(&g1, &h1);
        for k in 0..v.len() {
            assert!((g00[k] - g0[k]).abs() < 1e-10 && (h00[k] - h0[k]).abs() < 1e-10);
            assert!((g11[k] - g1[k]).abs() < 1e-10 && (h11[k] - h1[k]).abs() < 1e-10);
            assert!(g01[k].abs() < 1e-10 && h01[k].abs() < 1e-10);
        }
    }

    #[test]
    fn maxwellian_has_no_micro_part() {
        let grid = Grid::new(0.0, 1.0, 16).unwrap();
        let f = KineticField::uniform(grid, vg(), 0.8, 0.3, 1.2).unwrap();
        let (g, h) = project_micro(&f, 3).unwrap();
        assert!(g.iter().chain(&h).all(|x| x.abs() < 1e-10));
        let (g0, _) = project_macro(&f, 3).unwrap();
        let (gf, _) = f.cell_vecs(3);
        assert!(g0.iter().zip(&gf).all(|(a, b)| (a - b).abs() < 1e-10));
    }

    #[test]
    fn global_maxwellian_window() {
        assert!(GlobalMaxwellian::new(1.0, 0.0, 0.9, (1.0, 1.2)).is_ok());
        assert!(GlobalMaxwellian::new(1.0, 0.0, 0.5, (1.0, 1.2)).is_err());
        assert!(GlobalMaxwellian::new(1.0, 0.0, 1.0, (1.0, 1.2)).is_err());
    }

    #[test]
    fn distance_to_itself_is_zero() {
        let grid = Grid::new(0.0, 1.0, 16).unwrap();
        let f = KineticField::uniform(grid, vg(), 0.8, 0.3, 1.2).unwrap();
        let ms = GlobalMaxwellian::new(1.0, 0.0, 1.0, (1.2, 1.2)).unwrap();
        let r = ThermoState::new(1.25, 0.3, 1.2).unwrap();
        let (a, b) = weighted_distance_parts(&f, 0, &r, &ms).unwrap();
        assert!(a < 1e-12 && b < 1e-12, "{a} {b}");
    }
}
