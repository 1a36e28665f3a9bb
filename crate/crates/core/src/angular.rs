//! Angular matrix elements between m = 0 spherical harmonics.
//!
//! The double-well terms carry cos²θ and cos⁴θ; their angular factors follow
//! from the exact ladder ⟨l−1,0|cosθ|l,0⟩ = l/√((2l−1)(2l+1)) applied j
//! times. Half-space (z > 0) overlaps use Gauss-Legendre quadrature in cosθ,
//! which is exact for the polynomial integrands that arise.

use crate::error::{Error, Result};
use crate::special::{legendre_upto, Quadrature};

/// ⟨l−1,0|cosθ|l,0⟩.
fn ladder(l: u32) -> f64 {
    let lf = l as f64;
    lf / ((2.0 * lf - 1.0) * (2.0 * lf + 1.0)).sqrt()
}

/// Exact ∫ Y_l⁰ cos^j(θ) Y_{l'}⁰ dΩ for j ∈ {2, 4}; zero outside the
/// selection rules |l−l'| ≤ j, l−l' even.
pub fn angular_moment(l: u32, l_prime: u32, j: u32) -> Result<f64> {
    if j != 2 && j != 4 {
        return Err(Error::domain(format!("angular moment only supports j ∈ {{2,4}}, got {j}")));
    }
    // Apply cosθ to e_{l'} j times in the l-ladder and read off component l.
    let dim = (l.max(l_prime) + j + 2) as usize;
    let mut amp = vec![0.0_f64; dim];
    amp[l_prime as usize] = 1.0;
    for _ in 0..j {
        let mut next = vec![0.0_f64; dim];
        for (k, &a) in amp.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            let k = k as u32;
            // cosθ|k,0⟩ = ladder(k+1)|k+1,0⟩ + ladder(k)|k−1,0⟩
            next[(k + 1) as usize] += ladder(k + 1) * a;
            if k > 0 {
                next[(k - 1) as usize] += ladder(k) * a;
            }
        }
        amp = next;
    }
    Ok(amp[l as usize])
}

/// Half-space angular overlaps H_{ll'} = 2π ∫₀¹ Y_l⁰ Y_{l'}⁰ dμ as a dense
/// table for l, l' ≤ l_max. Same-parity off-diagonal entries vanish; the
/// diagonal is 1/2; opposite-parity entries carry the z-localization.
pub fn half_space_overlaps(l_max: u32) -> Vec<Vec<f64>> {
    let n = (l_max + 1) as usize;
    // exact for products of Legendre polynomials up to degree 2·l_max
    let quad = Quadrature::gauss_legendre((l_max as usize) + 8).mapped_to(0.0, 1.0);
    let mut p_at = Vec::with_capacity(quad.nodes.len());
    for &mu in &quad.nodes {
        p_at.push(legendre_upto(l_max, mu));
    }
    let norm = |l: u32| ((2 * l + 1) as f64 / (4.0 * std::f64::consts::PI)).sqrt();
    let mut out = vec![vec![0.0; n]; n];
    for l in 0..n {
        for lp in l..n {
            let mut acc = 0.0;
            for (k, &w) in quad.weights.iter().enumerate() {
                acc += w * p_at[k][l] * p_at[k][lp];
            }
            let val = 2.0 * std::f64::consts::PI * norm(l as u32) * norm(lp as u32) * acc;
            // clean up the structurally exact entries
            let val = if l == lp {
                0.5
            } else if (l + lp) % 2 == 0 {
                0.0
            } else {
                val
            };
            out[l][lp] = val;
            out[lp][l] = val;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::Quadrature;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    /// Quadrature oracle: ∫ Y_l⁰ cos^jθ Y_l'⁰ dΩ
    /// = ½ √((2l+1)(2l'+1)) ∫_{−1}^{1} P_l(μ) μ^j P_l'(μ) dμ.
    fn moment_by_quadrature(l: u32, lp: u32, j: u32) -> f64 {
        let quad = Quadrature::gauss_legendre(96);
        let integral = quad.integrate(|mu| {
            let p = legendre_upto(l.max(lp), mu);
            p[l as usize] * p[lp as usize] * mu.powi(j as i32)
        });
        0.5 * (((2 * l + 1) * (2 * lp + 1)) as f64).sqrt() * integral
    }

    #[test]
    fn closed_form_moments() {
        assert_relative_eq!(angular_moment(0, 0, 2).unwrap(), 1.0 / 3.0, max_relative = 1e-14);
        assert_relative_eq!(angular_moment(0, 0, 4).unwrap(), 1.0 / 5.0, max_relative = 1e-14);
    }

    #[test]
    fn moments_match_quadrature_oracle() {
        for (l, lp, j) in [(0u32, 2u32, 2u32), (1, 3, 2), (2, 2, 2), (0, 2, 4), (0, 4, 4), (3, 5, 4), (4, 4, 4)] {
            let got = angular_moment(l, lp, j).unwrap();
            let want = moment_by_quadrature(l, lp, j);
            assert_abs_diff_eq!(got, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn selection_rules_are_exact_zeros() {
        assert_eq!(angular_moment(0, 1, 2).unwrap(), 0.0);
        assert_eq!(angular_moment(0, 4, 2).unwrap(), 0.0);
        assert_eq!(angular_moment(1, 2, 4).unwrap(), 0.0);
        assert_eq!(angular_moment(0, 6, 4).unwrap(), 0.0);
        assert!(angular_moment(0, 0, 3).is_err());
    }

    #[test]
    fn moments_are_symmetric() {
        for j in [2u32, 4] {
            for l in 0..6u32 {
                for lp in 0..6u32 {
                    let a = angular_moment(l, lp, j).unwrap();
                    let b = angular_moment(lp, l, j).unwrap();
                    assert_abs_diff_eq!(a, b, epsilon = 1e-15);
                }
            }
        }
    }

    #[test]
    fn half_space_structure() {
        let h = half_space_overlaps(6);
        for l in 0..=6usize {
            assert_eq!(h[l][l], 0.5);
            for lp in 0..=6usize {
                if l != lp && (l + lp) % 2 == 0 {
                    assert_eq!(h[l][lp], 0.0);
                }
            }
        }
        // classic value: 2π ∫₀¹ Y0 Y1 dμ = √3/2 · ∫₀¹ μ dμ = √3/4
        assert_relative_eq!(h[0][1], 3.0_f64.sqrt() / 4.0, max_relative = 1e-13);
    }
}
