//! Real-space evaluation of states expanded in the radial basis, and the
//! density integrals built on it: half-space populations, the quartic
//! on-site integral and z-axis marginal densities.
//!
//! A coefficient vector c over the basis defines
//! ψ(r, θ) = Σ_k c_k Y_{l_k}⁰(θ) u_k(r)/r. Everything here first collapses
//! the coefficients into per-l radial profiles f_l(r) = Σ_{k∈l} c_k u_k(r),
//! then works on the (r, cosθ) product grid: Gauss-Legendre in cosθ (exact
//! for the polynomial angular content) and the basis grid radially.

use crate::error::{Error, Result};
use crate::radial::BasisSet;
use crate::special::{legendre_upto, Quadrature};
use num_complex::Complex64;

/// Gauss-Legendre angular grids with Y_l⁰(μ) tables, shared by the density
/// integrals. Order follows the quartic angular content (≥ 2·l_max + 8).
pub struct AngularTables {
    pub l_max: u32,
    /// nodes/weights on μ ∈ [−1, 1]
    pub full: Quadrature,
    /// nodes/weights on μ ∈ [0, 1] (right half space)
    pub half: Quadrature,
    /// y_full[j][l] = Y_l⁰(μ_j) on the full grid
    pub y_full: Vec<Vec<f64>>,
    /// y_half[j][l] = Y_l⁰(μ_j) on the half grid
    pub y_half: Vec<Vec<f64>>,
}

impl AngularTables {
    pub fn new(l_max: u32) -> Self {
        let order = 2 * l_max as usize + 8;
        let full = Quadrature::gauss_legendre(order);
        let half = Quadrature::gauss_legendre(order).mapped_to(0.0, 1.0);
        let norm: Vec<f64> = (0..=l_max)
            .map(|l| ((2 * l + 1) as f64 / (4.0 * std::f64::consts::PI)).sqrt())
            .collect();
        let spherical = |mu: f64| -> Vec<f64> {
            legendre_upto(l_max, mu)
                .into_iter()
                .zip(&norm)
                .map(|(p, n)| p * n)
                .collect()
        };
        let y_full = full.nodes.iter().map(|&mu| spherical(mu)).collect();
        let y_half = half.nodes.iter().map(|&mu| spherical(mu)).collect();
        AngularTables { l_max, full, half, y_full, y_half }
    }
}

/// Per-l radial profiles f_l(r) = Σ_{k∈l} c_k u_k(r) for real coefficients.
pub fn radial_profiles(basis: &BasisSet, coeffs: &[f64]) -> Result<Vec<(u32, Vec<f64>)>> {
    if coeffs.len() != basis.len() {
        return Err(Error::domain(format!(
            "coefficient vector length {} does not match basis size {}",
            coeffs.len(),
            basis.len()
        )));
    }
    let n = basis.grid.len();
    let mut out = Vec::new();
    for block in basis.channels() {
        let mut f = vec![0.0; n];
        for k in block.start..block.end {
            let c = coeffs[k];
            if c == 0.0 {
                continue;
            }
            for (fi, ui) in f.iter_mut().zip(&basis.states[k].u) {
                *fi += c * ui;
            }
        }
        out.push((block.l, f));
    }
    Ok(out)
}

fn complex_profiles(
    basis: &BasisSet,
    coeffs: &[Complex64],
) -> Result<(Vec<(u32, Vec<f64>)>, Vec<(u32, Vec<f64>)>)> {
    let re: Vec<f64> = coeffs.iter().map(|c| c.re).collect();
    let im: Vec<f64> = coeffs.iter().map(|c| c.im).collect();
    Ok((radial_profiles(basis, &re)?, radial_profiles(basis, &im)?))
}

/// ψ evaluated on the (r_i, μ_j) product grid, one row per radius.
fn on_grid(profiles: &[(u32, Vec<f64>)], y: &[Vec<f64>], n_r: usize, r: &[f64]) -> Vec<Vec<f64>> {
    let n_mu = y.len();
    let mut g = vec![vec![0.0; n_mu]; n_r];
    for (l, f) in profiles {
        let li = *l as usize;
        for i in 0..n_r {
            let fi = f[i];
            if fi == 0.0 {
                continue;
            }
            let fi_over_r = fi / r[i];
            let gi = &mut g[i];
            for (j, yj) in y.iter().enumerate() {
                gi[j] += fi_over_r * yj[li];
            }
        }
    }
    g
}

/// ∫ |ψ|⁴ d³r for a real coefficient vector (the on-site overlap integral).
pub fn quartic_integral(basis: &BasisSet, tables: &AngularTables, coeffs: &[f64]) -> Result<f64> {
    let profiles = radial_profiles(basis, coeffs)?;
    let g = on_grid(&profiles, &tables.y_full, basis.grid.len(), &basis.grid.r);
    let mut acc = 0.0;
    for (i, gi) in g.iter().enumerate() {
        let wr = basis.grid.w_dr[i] * basis.grid.r[i] * basis.grid.r[i];
        let mut inner = 0.0;
        for (j, &wj) in tables.full.weights.iter().enumerate() {
            let v = gi[j] * gi[j];
            inner += wj * v * v;
        }
        acc += wr * inner;
    }
    Ok(2.0 * std::f64::consts::PI * acc)
}

/// ∫ |ψ_a|² |ψ_b|² d³r (the neglected cross-well term, reported only).
pub fn cross_quartic_integral(
    basis: &BasisSet,
    tables: &AngularTables,
    a: &[f64],
    b: &[f64],
) -> Result<f64> {
    let pa = radial_profiles(basis, a)?;
    let pb = radial_profiles(basis, b)?;
    let ga = on_grid(&pa, &tables.y_full, basis.grid.len(), &basis.grid.r);
    let gb = on_grid(&pb, &tables.y_full, basis.grid.len(), &basis.grid.r);
    let mut acc = 0.0;
    for i in 0..ga.len() {
        let wr = basis.grid.w_dr[i] * basis.grid.r[i] * basis.grid.r[i];
        let mut inner = 0.0;
        for (j, &wj) in tables.full.weights.iter().enumerate() {
            inner += wj * ga[i][j] * ga[i][j] * gb[i][j] * gb[i][j];
        }
        acc += wr * inner;
    }
    Ok(2.0 * std::f64::consts::PI * acc)
}

/// Probability of the right half space z > 0 for a real coefficient vector.
pub fn right_half_probability(
    basis: &BasisSet,
    tables: &AngularTables,
    coeffs: &[f64],
) -> Result<f64> {
    let profiles = radial_profiles(basis, coeffs)?;
    let g = on_grid(&profiles, &tables.y_half, basis.grid.len(), &basis.grid.r);
    let mut acc = 0.0;
    for (i, gi) in g.iter().enumerate() {
        let wr = basis.grid.w_dr[i] * basis.grid.r[i] * basis.grid.r[i];
        let mut inner = 0.0;
        for (j, &wj) in tables.half.weights.iter().enumerate() {
            inner += wj * gi[j] * gi[j];
        }
        acc += wr * inner;
    }
    Ok(2.0 * std::f64::consts::PI * acc)
}

/// (P_L, P_R) half-space populations of a complex state, all inter-l cross
/// terms included.
pub fn well_populations(
    basis: &BasisSet,
    tables: &AngularTables,
    coeffs: &[Complex64],
) -> Result<(f64, f64)> {
    let (pre, pim) = complex_profiles(basis, coeffs)?;
    let gre = on_grid(&pre, &tables.y_half, basis.grid.len(), &basis.grid.r);
    let gim = on_grid(&pim, &tables.y_half, basis.grid.len(), &basis.grid.r);
    let mut p_r = 0.0;
    for i in 0..gre.len() {
        let wr = basis.grid.w_dr[i] * basis.grid.r[i] * basis.grid.r[i];
        let mut inner = 0.0;
        for (j, &wj) in tables.half.weights.iter().enumerate() {
            inner += wj * (gre[i][j] * gre[i][j] + gim[i][j] * gim[i][j]);
        }
        p_r += wr * inner;
    }
    p_r *= 2.0 * std::f64::consts::PI;
    let norm: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
    Ok((norm - p_r, p_r))
}

/// Marginal density P(z) = 2π ∫ |ψ(ρ, z)|² ρ dρ on the given z grid
/// (figure-reproduction output; radial profiles are interpolated in ln r).
pub fn z_marginal_density(
    basis: &BasisSet,
    coeffs: &[Complex64],
    z_grid: &[f64],
) -> Result<Vec<f64>> {
    let (pre, pim) = complex_profiles(basis, coeffs)?;
    let grid = &basis.grid;
    let x0 = grid.r_min.ln();
    let inv_h = 1.0 / grid.h;
    let n = grid.len();
    let l_max = basis.params.l_max;
    let eval = |profiles: &[(u32, Vec<f64>)], r: f64, mu: f64| -> f64 {
        if r < grid.r_min || r > grid.r_max {
            return 0.0;
        }
        let t = ((r.ln() - x0) * inv_h).max(0.0);
        let i = (t.floor() as usize).min(n - 2);
        let frac = t - i as f64;
        let p = legendre_upto(l_max, mu);
        let mut acc = 0.0;
        for (l, f) in profiles {
            let fl = f[i] * (1.0 - frac) + f[i + 1] * frac;
            let norm = ((2 * l + 1) as f64 / (4.0 * std::f64::consts::PI)).sqrt();
            acc += fl * norm * p[*l as usize];
        }
        acc / r
    };
    let n_rho = 600usize;
    let mut out = Vec::with_capacity(z_grid.len());
    for &z in z_grid {
        if z.abs() >= grid.r_max {
            out.push(0.0);
            continue;
        }
        let rho_max = (grid.r_max * grid.r_max - z * z).sqrt();
        let d_rho = rho_max / n_rho as f64;
        let mut acc = 0.0;
        for k in 0..=n_rho {
            let rho = k as f64 * d_rho;
            let r = (rho * rho + z * z).sqrt();
            if r < grid.r_min {
                continue;
            }
            let mu = z / r;
            let re = eval(&pre, r, mu);
            let im = eval(&pim, r, mu);
            let w = if k == 0 || k == n_rho { 0.5 } else { 1.0 };
            acc += w * (re * re + im * im) * rho;
        }
        out.push(2.0 * std::f64::consts::PI * acc * d_rho);
    }
    Ok(out)
}
