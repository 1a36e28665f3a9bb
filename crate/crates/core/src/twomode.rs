//! Two-mode Bose-Hubbard dynamics in the fixed-N Fock basis.
//!
//! H_BH = ħJ(c_L†c_R + c_R†c_L) + ħU n̂², n̂ = (c_R†c_R − c_L†c_L)/2, on the
//! (N+1)-dimensional basis |n_L, n_R⟩ with n_L + n_R = N (ordered by n_R).
//! The matrix is small, so propagation is exact spectral decomposition. The
//! interaction parameter Λ = UN/2J separates Rabi oscillations from
//! macroscopic self-trapping (Λ > Λ_c = 2).

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Spin branch label for the ion-qubit-resolved parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub fn label(&self) -> &'static str {
        match self {
            Spin::Up => "up",
            Spin::Down => "down",
        }
    }
}

/// Parameters of one spin branch of the junction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoModeParams {
    /// Atom number.
    pub n_atoms: usize,
    /// Tunneling J (dimensionless E*/ħ, or any consistent frequency unit).
    pub tunneling: f64,
    /// On-site interaction U (same units as J).
    pub onsite: f64,
    pub spin: Spin,
}

impl TwoModeParams {
    pub fn new(n_atoms: usize, tunneling: f64, onsite: f64, spin: Spin) -> Result<Self> {
        if n_atoms < 1 {
            return Err(Error::domain("atom number must be at least 1".to_string()));
        }
        if !(tunneling > 0.0) || !tunneling.is_finite() {
            return Err(Error::domain(format!("tunneling must be positive, got {tunneling}")));
        }
        if !(onsite >= 0.0) || !onsite.is_finite() {
            return Err(Error::domain(format!("onsite interaction must be ≥ 0, got {onsite}")));
        }
        Ok(TwoModeParams { n_atoms, tunneling, onsite, spin })
    }

    /// Interaction parameter Λ = UN/(2J).
    pub fn interaction_parameter(&self) -> f64 {
        self.onsite * self.n_atoms as f64 / (2.0 * self.tunneling)
    }

    /// Rabi period t_Rabi = π/J (inverse units of J).
    pub fn rabi_period(&self) -> f64 {
        std::f64::consts::PI / self.tunneling
    }
}

/// Many-body state over |n_L, n_R⟩, n_R = 0..N.
#[derive(Debug, Clone)]
pub struct FockVector {
    pub amplitudes: Vec<Complex64>,
}

impl FockVector {
    /// All atoms in the left well: |n_L = N, n_R = 0⟩.
    pub fn all_left(n_atoms: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); n_atoms + 1];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        FockVector { amplitudes }
    }

    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::domain(format!("Fock vector norm² = {norm}, expected 1")));
        }
        Ok(FockVector { amplitudes })
    }

    pub fn n_atoms(&self) -> usize {
        self.amplitudes.len() - 1
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }
}

/// The (N+1)×(N+1) real symmetric tridiagonal Bose-Hubbard matrix: diagonal
/// U((n_R−n_L)/2)², off-diagonal J√(n_L(n_R+1)).
pub fn hamiltonian(params: &TwoModeParams) -> DMatrix<f64> {
    let n = params.n_atoms;
    let dim = n + 1;
    let mut h = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        let n_r = i as f64;
        let n_l = (n - i) as f64;
        let imbalance = 0.5 * (n_r - n_l);
        h[(i, i)] = params.onsite * imbalance * imbalance;
        if i + 1 < dim {
            let hop = params.tunneling * (n_l * (n_r + 1.0)).sqrt();
            h[(i, i + 1)] = hop;
            h[(i + 1, i)] = hop;
        }
    }
    h
}

/// One sample of the many-body trajectory.
#[derive(Debug, Clone, Copy)]
pub struct ImbalanceSample {
    /// Time in the inverse units of J.
    pub t: f64,
    /// Relative left population n_L/N.
    pub p_left: f64,
    /// Imbalance z = 2⟨n̂⟩/N = p_right − p_left.
    pub imbalance: f64,
    /// Energy expectation ⟨H⟩ (conserved).
    pub energy: f64,
    pub norm: f64,
}

/// Exact propagation by spectral decomposition; one sample per entry of
/// `t_grid`.
pub fn evolve(
    initial: &FockVector,
    params: &TwoModeParams,
    t_grid: &[f64],
) -> Result<Vec<ImbalanceSample>> {
    if initial.n_atoms() != params.n_atoms {
        return Err(Error::domain(format!(
            "state has {} atoms but params declare {}",
            initial.n_atoms(),
            params.n_atoms
        )));
    }
    let h = hamiltonian(params);
    let eig = h.clone().symmetric_eigen();
    let dim = params.n_atoms + 1;
    let re0 = DVector::from_iterator(dim, initial.amplitudes.iter().map(|a| a.re));
    let im0 = DVector::from_iterator(dim, initial.amplitudes.iter().map(|a| a.im));
    let c_re = eig.eigenvectors.transpose() * re0;
    let c_im = eig.eigenvectors.transpose() * im0;

    let n = params.n_atoms as f64;
    let mut out = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        // c_k e^{−i E_k t} in the eigenbasis, then back
        let mut a_re = DVector::zeros(dim);
        let mut a_im = DVector::zeros(dim);
        for k in 0..dim {
            let (s, c) = (-eig.eigenvalues[k] * t).sin_cos();
            a_re[k] = c_re[k] * c - c_im[k] * s;
            a_im[k] = c_re[k] * s + c_im[k] * c;
        }
        let psi_re = &eig.eigenvectors * a_re;
        let psi_im = &eig.eigenvectors * a_im;
        let mut norm = 0.0;
        let mut n_r_mean = 0.0;
        for i in 0..dim {
            let p = psi_re[i] * psi_re[i] + psi_im[i] * psi_im[i];
            norm += p;
            n_r_mean += p * i as f64;
        }
        let p_left = 1.0 - n_r_mean / n / norm;
        let energy = {
            let h_re = &h * &psi_re;
            let h_im = &h * &psi_im;
            (psi_re.dot(&h_re) + psi_im.dot(&h_im)) / norm
        };
        out.push(ImbalanceSample { t, p_left, imbalance: 1.0 - 2.0 * p_left, energy, norm });
    }
    Ok(out)
}

/// Dynamical regime by interaction strength. The Λ_c = 2 self-trapping
/// threshold is the established value; the Rabi/Josephson/Fock boundaries
/// (Λ < 1, 1 ≤ Λ ≤ N², Λ > N²) are conventions and configurable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Rabi,
    Josephson,
    Fock,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RegimeThresholds {
    /// Λ below which the junction is in the Rabi regime.
    pub rabi_max: f64,
    /// Multiple of N² above which it is in the Fock regime.
    pub fock_min_over_n2: f64,
}

impl Default for RegimeThresholds {
    fn default() -> Self {
        RegimeThresholds { rabi_max: 1.0, fock_min_over_n2: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Classification {
    pub lambda: f64,
    /// Λ > 2, strict.
    pub self_trapped: bool,
    pub regime: Regime,
}

pub fn classify(params: &TwoModeParams, thresholds: &RegimeThresholds) -> Result<Classification> {
    if !(params.tunneling > 0.0) {
        return Err(Error::domain("classification needs J > 0".to_string()));
    }
    let lambda = params.interaction_parameter();
    let n2 = (params.n_atoms * params.n_atoms) as f64;
    let regime = if lambda < thresholds.rabi_max {
        Regime::Rabi
    } else if lambda > thresholds.fock_min_over_n2 * n2 {
        Regime::Fock
    } else {
        Regime::Josephson
    };
    Ok(Classification { lambda, self_trapped: lambda > 2.0, regime })
}
