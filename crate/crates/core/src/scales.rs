//! Physical constants, characteristic scales of the atom-ion polarization
//! potential, and every unit conversion the rest of the crate needs.
//!
//! The −C₄/r⁴ interaction defines a length R* = √(2μC₄/ħ²) and an energy
//! E* = ħ²/(2μR*²). All downstream solvers work in these units (time in
//! ħ/E*); SI values appear only here.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Reduced Planck constant (J·s), CODATA 2018.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Atomic mass unit (kg), CODATA 2018.
pub const ATOMIC_MASS_KG: f64 = 1.660_539_066_60e-27;
/// Bohr radius (m), CODATA 2018.
pub const BOHR_RADIUS_M: f64 = 5.291_772_109_03e-11;
/// Hartree energy (J), CODATA 2018.
pub const HARTREE_J: f64 = 4.359_744_722_207_1e-18;

/// Atomic unit of the C₄ dispersion coefficient, E_h·a₀⁴ (J·m⁴).
pub const C4_ATOMIC_UNIT: f64 =
    HARTREE_J * BOHR_RADIUS_M * BOHR_RADIUS_M * BOHR_RADIUS_M * BOHR_RADIUS_M;

/// Default atom mass: ⁸⁷Rb (u).
pub const DEFAULT_ATOM_MASS_U: f64 = 87.0;
/// Default ion mass: ¹⁷¹Yb⁺ (u).
pub const DEFAULT_ION_MASS_U: f64 = 171.0;
/// Default C₄ in atomic units, e²α_p/2 with the Rb static polarizability
/// α_p = 318.8 a.u. Configurable; this default reproduces R* = 0.306 μm and
/// E*/ħ = 2π·935 Hz for Rb/Yb⁺.
pub const DEFAULT_C4_AU: f64 = 318.8 / 2.0;

/// Characteristic scales of the atom-ion system.
///
/// Immutable after construction; cheap to copy and share.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemScales {
    /// Atom mass (kg).
    pub m_a: f64,
    /// Ion mass (kg).
    pub m_i: f64,
    /// Dispersion coefficient (J·m⁴).
    pub c4: f64,
    /// Reduced mass μ = m_a·m_i/(m_a+m_i) (kg).
    pub mu: f64,
    /// Length scale R* = √(2μC₄/ħ²) (m).
    pub r_star: f64,
    /// Energy scale E* = ħ²/(2μR*²) (J).
    pub e_star: f64,
    /// μ/m_a; the kinetic prefactor of the dimensionless Schrödinger equation.
    pub mass_ratio: f64,
}

/// Derive all characteristic scales from the three physical inputs.
pub fn derive_scales(m_a_kg: f64, m_i_kg: f64, c4: f64) -> Result<SystemScales> {
    if !(m_a_kg > 0.0) || !m_a_kg.is_finite() {
        return Err(Error::domain(format!("atom mass must be positive, got {m_a_kg}")));
    }
    if !(m_i_kg > 0.0) || !m_i_kg.is_finite() {
        return Err(Error::domain(format!("ion mass must be positive, got {m_i_kg}")));
    }
    if !(c4 > 0.0) || !c4.is_finite() {
        return Err(Error::domain(format!("C4 must be positive, got {c4}")));
    }
    let mu = m_a_kg * m_i_kg / (m_a_kg + m_i_kg);
    let r_star = (2.0 * mu * c4 / (HBAR * HBAR)).sqrt();
    let e_star = HBAR * HBAR / (2.0 * mu * r_star * r_star);
    Ok(SystemScales {
        m_a: m_a_kg,
        m_i: m_i_kg,
        c4,
        mu,
        r_star,
        e_star,
        mass_ratio: mu / m_a_kg,
    })
}

impl SystemScales {
    /// Scales from masses in atomic mass units and C₄ in atomic units.
    pub fn from_au(m_a_u: f64, m_i_u: f64, c4_au: f64) -> Result<Self> {
        derive_scales(
            m_a_u * ATOMIC_MASS_KG,
            m_i_u * ATOMIC_MASS_KG,
            c4_au * C4_ATOMIC_UNIT,
        )
    }

    /// The paper's default system: ⁸⁷Rb atom, ¹⁷¹Yb⁺ ion, Rb polarizability.
    pub fn rb_yb() -> Self {
        Self::from_au(DEFAULT_ATOM_MASS_U, DEFAULT_ION_MASS_U, DEFAULT_C4_AU)
            .expect("default species constants are valid")
    }

    /// m_a/μ, the square of the short-range oscillation constant
    /// (ξ = √(m_a/μ)/r).
    pub fn ma_over_mu(&self) -> f64 {
        1.0 / self.mass_ratio
    }

    /// E*/ħ (rad/s).
    pub fn estar_over_hbar(&self) -> f64 {
        self.e_star / HBAR
    }

    /// E*/h (Hz): the "935 Hz" figure of merit. A dimensionless coupling J
    /// multiplied by this gives the ordinary frequency in the "2π·X Hz"
    /// notation.
    pub fn estar_hz(&self) -> f64 {
        self.e_star / HBAR / (2.0 * std::f64::consts::PI)
    }

    /// Angular frequency (rad/s) → dimensionless energy (units E*).
    pub fn angular_frequency_to_dimensionless(&self, omega: f64) -> f64 {
        HBAR * omega / self.e_star
    }

    /// Dimensionless energy (units E*) → angular frequency (rad/s).
    pub fn dimensionless_to_angular_frequency(&self, e: f64) -> f64 {
        e * self.e_star / HBAR
    }

    /// Ordinary frequency (Hz) → dimensionless energy (units E*).
    pub fn frequency_to_dimensionless(&self, f_hz: f64) -> f64 {
        self.angular_frequency_to_dimensionless(2.0 * std::f64::consts::PI * f_hz)
    }

    /// Dimensionless energy → ordinary frequency (Hz).
    pub fn dimensionless_to_frequency(&self, e: f64) -> f64 {
        self.dimensionless_to_angular_frequency(e) / (2.0 * std::f64::consts::PI)
    }

    /// Length (m) → units of R*.
    pub fn length_to_dimensionless(&self, x_m: f64) -> f64 {
        x_m / self.r_star
    }

    /// Length (units R*) → meters.
    pub fn dimensionless_to_length(&self, x: f64) -> f64 {
        x * self.r_star
    }

    /// Time (s) → units of ħ/E*.
    pub fn time_to_dimensionless(&self, t_s: f64) -> f64 {
        t_s * self.e_star / HBAR
    }

    /// Time (units ħ/E*) → seconds.
    pub fn dimensionless_to_time(&self, t: f64) -> f64 {
        t * HBAR / self.e_star
    }

    /// Scattering length in Bohr radii → units of R*.
    pub fn bohr_to_rstar(&self, a_bohr: f64) -> f64 {
        a_bohr * BOHR_RADIUS_M / self.r_star
    }
}

/// Short-range phase φ ∈ (−π/2, π/2] from the atom-ion s-wave scattering
/// length a_ia = −R*·cot(φ) (a_ia in units of R*). a_ia = 0 maps to φ = π/2.
pub fn phase_from_scattering_length(a_ia: f64) -> Result<f64> {
    if !a_ia.is_finite() {
        return Err(Error::domain(format!("scattering length must be finite, got {a_ia}")));
    }
    if a_ia == 0.0 {
        Ok(std::f64::consts::FRAC_PI_2)
    } else {
        Ok((-1.0 / a_ia).atan())
    }
}

/// Inverse of [`phase_from_scattering_length`]: a_ia = −cot(φ) in units of R*.
pub fn scattering_length_from_phase(phi: f64) -> f64 {
    -phi.cos() / phi.sin()
}

/// Trap geometry in dimensionless units.
///
/// The double well has minima at z = ±q with local frequency
/// ω_q = √(8b/(m_a q²)); the transverse confinement is ω_a and the model
/// fixes ω_q = ω_a. α = (R*/l₀)⁴ with l₀ = √(ħ/(m_a ω_a)).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrapGeometry {
    /// Trap-strength parameter α (dimensionless).
    pub alpha: f64,
    /// Transverse / local trap angular frequency (rad/s).
    pub omega_a: f64,
    /// Half well separation (units R*).
    pub q: f64,
    /// Barrier height b = α (μ/m_a) q²/4 (units E*).
    pub b: f64,
}

impl TrapGeometry {
    pub fn from_alpha(alpha: f64, q: f64, scales: &SystemScales) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::domain(format!("alpha must be positive, got {alpha}")));
        }
        if !(q > 0.0) || !q.is_finite() {
            return Err(Error::domain(format!("well separation q must be positive, got {q}")));
        }
        let omega_a = omega_a_from_alpha(alpha, scales);
        let b = alpha * scales.mass_ratio * q * q / 4.0;
        Ok(TrapGeometry { alpha, omega_a, q, b })
    }

    pub fn from_omega(omega_a: f64, q: f64, scales: &SystemScales) -> Result<Self> {
        if !(omega_a > 0.0) || !omega_a.is_finite() {
            return Err(Error::domain(format!("omega_a must be positive, got {omega_a}")));
        }
        Self::from_alpha(alpha_from_omega_a(omega_a, scales), q, scales)
    }
}

/// α = (R*/l₀)⁴ for a given transverse angular frequency.
pub fn alpha_from_omega_a(omega_a: f64, scales: &SystemScales) -> f64 {
    let l0_sq = HBAR / (scales.m_a * omega_a);
    let ratio_sq = scales.r_star * scales.r_star / l0_sq;
    ratio_sq * ratio_sq
}

/// Inverse of [`alpha_from_omega_a`].
pub fn omega_a_from_alpha(alpha: f64, scales: &SystemScales) -> f64 {
    // ħω_a = 2 (μ/m_a) √α E*
    2.0 * scales.mass_ratio * alpha.sqrt() * scales.e_star / HBAR
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn rb_yb_reproduces_printed_scales() {
        let s = SystemScales::rb_yb();
        // R* = 0.306 μm, E*/ħ = 2π·935 Hz
        assert_relative_eq!(s.r_star, 0.306e-6, max_relative = 0.02);
        assert_relative_eq!(s.estar_hz(), 935.0, max_relative = 0.02);
    }

    #[test]
    fn scale_invariants_hold() {
        let s = SystemScales::rb_yb();
        assert_relative_eq!(s.mu, s.m_a * s.m_i / (s.m_a + s.m_i), max_relative = 1e-15);
        // E*·R*²·2μ/ħ² = 1
        let one = s.e_star * s.r_star * s.r_star * 2.0 * s.mu / (HBAR * HBAR);
        assert_relative_eq!(one, 1.0, max_relative = 1e-12);
        assert!(s.m_a > 0.0 && s.m_i > 0.0 && s.mu > 0.0);
        assert!(s.r_star > 0.0 && s.e_star > 0.0 && s.mass_ratio > 0.0);
    }

    #[test]
    fn equal_masses_halve() {
        let m = 87.0 * ATOMIC_MASS_KG;
        let s = derive_scales(m, m, DEFAULT_C4_AU * C4_ATOMIC_UNIT).unwrap();
        assert_relative_eq!(s.mu, m / 2.0, max_relative = 1e-15);
    }

    #[test]
    fn doubling_c4_scales_rstar_and_estar() {
        let s1 = SystemScales::rb_yb();
        let s2 = SystemScales::from_au(DEFAULT_ATOM_MASS_U, DEFAULT_ION_MASS_U, 2.0 * DEFAULT_C4_AU)
            .unwrap();
        assert_relative_eq!(s2.r_star, s1.r_star * 2.0_f64.sqrt(), max_relative = 1e-12);
        assert_relative_eq!(s2.e_star, s1.e_star / 2.0, max_relative = 1e-12);
    }

    #[test]
    fn rejects_nonpositive_inputs() {
        assert!(derive_scales(-1.0, 1.0, 1.0).is_err());
        assert!(derive_scales(1.0, 0.0, 1.0).is_err());
        assert!(derive_scales(1.0, 1.0, f64::NAN).is_err());
    }

    #[test]
    fn phase_matches_paper_values() {
        // a_ia = +1 R* → φ = −π/4; a_ia = −1 R* → φ = +π/4; −1/√3 → π/3
        assert_abs_diff_eq!(phase_from_scattering_length(1.0).unwrap(), -PI / 4.0, epsilon = 1e-14);
        assert_abs_diff_eq!(phase_from_scattering_length(-1.0).unwrap(), PI / 4.0, epsilon = 1e-14);
        assert_abs_diff_eq!(
            phase_from_scattering_length(-1.0 / 3.0_f64.sqrt()).unwrap(),
            PI / 3.0,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(phase_from_scattering_length(0.0).unwrap(), PI / 2.0, epsilon = 1e-14);
    }

    #[test]
    fn frequency_conversion_examples() {
        let s = SystemScales::rb_yb();
        let estar_hz = s.estar_hz();
        assert_relative_eq!(s.frequency_to_dimensionless(estar_hz), 1.0, max_relative = 1e-12);
        // 2π·11.2 Hz against 2π·935 Hz
        assert_relative_eq!(11.2 / 935.0, s.frequency_to_dimensionless(11.2) / s.frequency_to_dimensionless(935.0), max_relative = 1e-12);
        assert_eq!(s.frequency_to_dimensionless(0.0), 0.0);
    }

    #[test]
    fn trap_geometry_matches_paper() {
        let s = SystemScales::rb_yb();
        // α = 10 corresponds to ω_q = 2π·3.9 kHz
        let g = TrapGeometry::from_alpha(10.0, 2.06, &s).unwrap();
        assert_relative_eq!(g.omega_a / (2.0 * PI), 3.9e3, max_relative = 0.02);
        assert_relative_eq!(g.b, 10.0 * s.mass_ratio * 2.06 * 2.06 / 4.0, max_relative = 1e-14);
        // α = 0.026 corresponds to ω_a = 2π·200 Hz
        let g2 = TrapGeometry::from_omega(2.0 * PI * 200.0, 6.39, &s).unwrap();
        assert_relative_eq!(g2.alpha, 0.026, max_relative = 0.02);
    }

    #[test]
    fn geometry_rejects_bad_inputs() {
        let s = SystemScales::rb_yb();
        assert!(TrapGeometry::from_alpha(0.0, 1.0, &s).is_err());
        assert!(TrapGeometry::from_alpha(1.0, -2.0, &s).is_err());
    }

    proptest! {
        #[test]
        fn roundtrips_are_identity(
            m_a in 1.0f64..400.0,
            m_i in 1.0f64..400.0,
            c4 in 1.0f64..2000.0,
            value in 1e-6f64..1e6,
        ) {
            let s = SystemScales::from_au(m_a, m_i, c4).unwrap();
            let rt = s.dimensionless_to_frequency(s.frequency_to_dimensionless(value));
            prop_assert!((rt - value).abs() <= 1e-12 * value);
            let rt = s.length_to_dimensionless(s.dimensionless_to_length(value));
            prop_assert!((rt - value).abs() <= 1e-12 * value);
            let rt = s.time_to_dimensionless(s.dimensionless_to_time(value));
            prop_assert!((rt - value).abs() <= 1e-12 * value);
            let rt = alpha_from_omega_a(omega_a_from_alpha(value, &s), &s);
            prop_assert!((rt - value).abs() <= 1e-12 * value);
        }

        #[test]
        fn derive_scales_is_homogeneous(
            m_a in 1.0f64..400.0,
            m_i in 1.0f64..400.0,
            c4 in 1.0f64..2000.0,
            factor in 0.1f64..10.0,
        ) {
            let s1 = SystemScales::from_au(m_a, m_i, c4).unwrap();
            let s2 = SystemScales::from_au(m_a, m_i, factor * c4).unwrap();
            prop_assert!((s2.r_star - s1.r_star * factor.sqrt()).abs() <= 1e-12 * s2.r_star);
            prop_assert!((s2.e_star - s1.e_star / factor).abs() <= 1e-12 * s2.e_star);
        }

        #[test]
        fn phase_scattering_length_bijection(a in -50.0f64..50.0) {
            let phi = phase_from_scattering_length(a).unwrap();
            prop_assert!(phi > -std::f64::consts::FRAC_PI_2 && phi <= std::f64::consts::FRAC_PI_2);
            let back = scattering_length_from_phase(phi);
            prop_assert!((back - a).abs() <= 1e-10 * (1.0 + a.abs()));
        }
    }
}
