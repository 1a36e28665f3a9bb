//! Radial grid, uniform in the mapped coordinate x = ln r.
//!
//! The short-range solutions oscillate like sin(√(m_a/μ)/r + φ), so a grid
//! uniform in ln r keeps a roughly constant number of points per oscillation
//! near the inner edge while staying affordable in the harmonic region. The
//! Numerov recurrence runs on the transformed equation v''(x) = Q(x) v(x),
//! v = u/√r, Q = r²W + 1/4, which keeps the uniform-step requirement exact.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Grid construction controls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Maximum phase advance √|Q|·h per step in classically allowed regions.
    pub phase_step: f64,
    /// Step bound √Q·h in forbidden regions (exponentials tolerate more).
    pub forbidden_step: f64,
    /// Floor on how far (units E*) the harmonic wall exceeds the largest
    /// scanned energy; widened automatically until the WKB tail action at the
    /// window top reaches ~9.
    pub rmax_margin: f64,
    /// The ion term must dominate the energy window by this factor at r_min.
    pub rmin_safety: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            phase_step: 0.012,
            forbidden_step: 0.25,
            rmax_margin: 20.0,
            rmin_safety: 1e3,
        }
    }
}

/// Open-interval rectangle weights in x with the dr = r dx Jacobian. This is
/// the natural metric of the Numerov scheme: its eigenvectors are orthogonal
/// to machine precision under the interior sum, while the endpoint values are
/// boundary data rather than degrees of freedom. Every integrand of interest
/// vanishes at the outer (Dirichlet) edge and is r-suppressed at the inner
/// one, so the same weights serve the continuum integrals.
fn scheme_weights(h: f64, r: &[f64]) -> Vec<f64> {
    let n = r.len();
    let mut w = vec![0.0; n];
    for i in 1..n - 1 {
        w[i] = h * r[i];
    }
    w
}

/// Logarithmic radial grid with quadrature weights for ∫..dr.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    pub r_min: f64,
    pub r_max: f64,
    /// Uniform step in x = ln r.
    pub h: f64,
    /// Sample radii r_i = r_min·exp(i·h).
    pub r: Vec<f64>,
    /// Quadrature weights w_i with ∫f dr ≈ Σ w_i f(r_i).
    pub w_dr: Vec<f64>,
}

impl RadialGrid {
    /// Build a grid adequate for the potential α r² − ion/r⁴ (W-form, kinetic
    /// prefactor scaled out; `c2` = m_a/μ) over energies [e_min, e_max] (E*).
    pub fn build(alpha: f64, c2: f64, ion: bool, e_min: f64, e_max: f64, spec: &GridSpec) -> Result<Self> {
        if !(alpha > 0.0) {
            return Err(Error::domain(format!("alpha must be positive, got {alpha}")));
        }
        if !(e_max > e_min) {
            return Err(Error::domain(format!(
                "energy window must be nonempty, got [{e_min}, {e_max}]"
            )));
        }
        let e_abs = e_min.abs().max(e_max.abs()).max(1.0);
        let r_min = if ion {
            // 1/r_min⁴ ≥ safety · |E|; the analytic boundary form is exact
            // only where the −1/r⁴ term dominates.
            (spec.rmin_safety * e_abs).powf(-0.25)
        } else {
            // Regular power-law boundary; just needs to sit far below the
            // oscillator length α^(-1/4).
            1e-4 * alpha.powf(-0.25).min(1.0)
        };
        // The Dirichlet wall must sit deep enough in the forbidden zone that
        // even states at the window top are untouched: the WKB tail action
        // (c²/2√α) ∫₀^M √(s/(E+s)) ds at E = e_max must exceed ~9 (amplitude
        // suppression e^{-18}), with rmax_margin as a floor.
        let margin = {
            let e = e_max.max(0.0);
            let tail = |m: f64| -> f64 {
                let i = if e < 1e-9 {
                    m
                } else {
                    (m * (m + e)).sqrt() - e * ((m.sqrt() + (m + e).sqrt()) / e.sqrt()).ln()
                };
                c2 / (2.0 * alpha.sqrt()) * i
            };
            let target = 9.0;
            let mut m = spec.rmax_margin;
            while tail(m) < target && m < 1e6 {
                m *= 1.3;
            }
            m
        };
        let r_max = (c2 * (e_max.max(0.0) + margin) / alpha).sqrt();
        if r_max <= r_min * 1.5 {
            return Err(Error::domain(format!(
                "degenerate grid: r_min={r_min}, r_max={r_max}"
            )));
        }
        let x0 = r_min.ln();
        let x1 = r_max.ln();

        // Worst-case |Q| over the energy window at each radius decides the step.
        let bound = |x: f64| -> f64 {
            let r = x.exp();
            let r2 = r * r;
            let ion_term = if ion { c2 / r2 } else { 0.0 };
            let q_no_e = alpha * r2 * r2 - ion_term + 0.25;
            let q_lo = q_no_e - c2 * e_min * r2;
            let q_hi = q_no_e - c2 * e_max * r2;
            let q_osc = (-q_lo).max(-q_hi).max(0.0);
            let q_forb = q_lo.max(q_hi).max(0.0);
            let mut h = f64::INFINITY;
            if q_osc > 0.0 {
                h = h.min(spec.phase_step / q_osc.sqrt());
            }
            if q_forb > 0.0 {
                h = h.min(spec.forbidden_step / q_forb.sqrt());
            }
            h
        };
        let mut h = (x1 - x0) / 16.0;
        let probes = 1024;
        for i in 0..=probes {
            let x = x0 + (x1 - x0) * i as f64 / probes as f64;
            h = h.min(bound(x));
        }
        let mut n_steps = ((x1 - x0) / h).ceil() as usize;
        if n_steps % 2 == 1 {
            n_steps += 1;
        }
        let h = (x1 - x0) / n_steps as f64;
        let n = n_steps + 1;
        let r: Vec<f64> = (0..n).map(|i| (x0 + i as f64 * h).exp()).collect();
        Ok(RadialGrid { r_min, r_max, h, w_dr: scheme_weights(h, &r), r })
    }

    /// Same span with the step halved (for discretization-convergence checks).
    pub fn refined(&self) -> Self {
        let n_steps = 2 * (self.r.len() - 1);
        let h = self.h / 2.0;
        let x0 = self.r_min.ln();
        let n = n_steps + 1;
        let r: Vec<f64> = (0..n).map(|i| (x0 + i as f64 * h).exp()).collect();
        RadialGrid { r_min: self.r_min, r_max: self.r_max, h, w_dr: scheme_weights(h, &r), r }
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    /// ∫ f dr for samples on this grid.
    pub fn integrate(&self, f: &[f64]) -> f64 {
        debug_assert_eq!(f.len(), self.r.len());
        f.iter().zip(&self.w_dr).map(|(&fi, &wi)| fi * wi).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn integrates_smooth_functions() {
        let grid = RadialGrid::build(10.0, 1.5, true, -50.0, 50.0, &GridSpec::default()).unwrap();
        // r⁵e^{-3r²} is tiny at both grid edges, like every physical
        // integrand (wavefunction products carry r² and decay under the
        // outer wall).
        let a = 3.0;
        let f: Vec<f64> = grid.r.iter().map(|&r| r.powi(5) * (-a * r * r).exp()).collect();
        let anti = |r: f64| {
            let r2 = r * r;
            -(-a * r2).exp() * (r2 * r2 / (2.0 * a) + r2 / (a * a) + 1.0 / (a * a * a))
        };
        let exact = anti(grid.r_max) - anti(grid.r_min);
        assert_relative_eq!(grid.integrate(&f), exact, max_relative = 1e-8);
    }

    #[test]
    fn resolves_short_range_oscillations() {
        let grid = RadialGrid::build(10.0, 1.5, true, -100.0, 100.0, &GridSpec::default()).unwrap();
        let c = 1.5_f64.sqrt();
        // local de Broglie wavelength of sin(c/r): λ(r) = 2π r²/c; the spec
        // asks for ≥ 8 grid steps per wavelength everywhere.
        for i in 1..grid.len() {
            let r = grid.r[i];
            let dr = grid.r[i] - grid.r[i - 1];
            let lambda = 2.0 * std::f64::consts::PI * r * r / c;
            assert!(lambda / dr >= 8.0, "under-resolved at r={r}: {} steps/λ", lambda / dr);
        }
        // and the oscillatory integral of the boundary-condition form is
        // captured: ∫ sin²(c/r) (c/r²) dr over many periods ≈ half the phase span.
        let f: Vec<f64> = grid.r.iter().map(|&r| (c / r).sin().powi(2) * c / (r * r)).collect();
        // substitution θ = c/r: ∫ sin²θ dθ = [θ/2 − sin(2θ)/4]; the integrand
        // does not vanish at the edges, so only the open-rule accuracy
        // O(h·f(r_min)) is available here.
        let anti = |theta: f64| 0.5 * theta - 0.25 * (2.0 * theta).sin();
        let exact = anti(c / grid.r_min) - anti(c / grid.r_max);
        assert_relative_eq!(grid.integrate(&f), exact, max_relative = 1e-3);
    }

    #[test]
    fn rmin_respects_ion_dominance() {
        let spec = GridSpec::default();
        let grid = RadialGrid::build(10.0, 1.5, true, -2000.0, 200.0, &spec).unwrap();
        let rm = grid.r_min;
        assert!(1.0 / rm.powi(4) >= spec.rmin_safety * 2000.0 * 0.999);
        assert!(1.0 / rm.powi(4) >= spec.rmin_safety * 10.0 * (1.0 / 1.5) * rm * rm);
    }

    #[test]
    fn refined_grid_halves_step() {
        let grid = RadialGrid::build(10.0, 1.5, true, -50.0, 50.0, &GridSpec::default()).unwrap();
        let fine = grid.refined();
        assert_relative_eq!(fine.h, grid.h / 2.0, max_relative = 1e-15);
        assert_eq!(fine.len(), 2 * grid.len() - 1);
        assert_relative_eq!(fine.r[2], grid.r[1], max_relative = 1e-14);
    }

    #[test]
    fn rejects_bad_windows() {
        assert!(RadialGrid::build(0.0, 1.5, true, -1.0, 1.0, &GridSpec::default()).is_err());
        assert!(RadialGrid::build(1.0, 1.5, true, 5.0, -5.0, &GridSpec::default()).is_err());
    }
}
