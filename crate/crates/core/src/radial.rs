//! Single-particle radial problem: isotropic harmonic trap plus the −1/r⁴
//! ion potential, closed by a quantum-defect boundary condition at small r.
//!
//! In units of R* and E* the reduced radial function obeys
//!
//! ```text
//! u''(r) = [ l(l+1)/r² + α r² − c²/r⁴ − c² E ] u(r),      c² = m_a/μ,
//! ```
//!
//! and near the origin the exact zero-energy solution is
//! ψ̃_l(r) = Ñ √r [J_{l+1/2}(ξ) + tan(δ) Y_{l+1/2}(ξ)] with ξ = √(m_a/μ)/r and
//! mixing angle δ = −φ − lπ/2. That solution supplies the inner boundary
//! condition; the eigenvalue problem is then solved with the renormalized
//! Numerov method on a grid uniform in x = ln r (the Liouville-transformed
//! equation v'' = Q v, v = u/√r, Q = r²W + 1/4 keeps the scheme exact on the
//! mapped grid). Eigenvalues are located by exact node counting of the
//! renormalized ratios, which cannot skip levels, and polished by bisection.

use crate::error::{Error, Result};
use crate::grid::{GridSpec, RadialGrid};
use crate::special::{spherical_j_upto, spherical_jy_deriv, spherical_y_upto};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::sync::Arc;

/// Short-range phase and the l-dependent mixing angle derived from it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantumDefect {
    pub phi: f64,
}

impl QuantumDefect {
    pub fn new(phi: f64) -> Self {
        QuantumDefect { phi }
    }

    /// δ = −φ − lπ/2.
    pub fn mixing_angle(&self, l: u32) -> f64 {
        -self.phi - l as f64 * std::f64::consts::FRAC_PI_2
    }
}

/// Zero-energy short-range reference solution ψ̃_l(r), evaluated in the
/// numerically bounded form cos(δ)·j_l(ξ) + sin(δ)·y_l(ξ), ξ = √(m_a/μ)/r.
/// This equals the J/Y mixture up to the overall normalization Ñ/cos δ, which
/// is immaterial for a boundary condition. Only valid (and only used) where
/// the −1/r⁴ term dominates trap and energy.
pub fn reference_solution(l: u32, phi: f64, ma_over_mu: f64, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::domain(format!("reference solution needs r > 0, got {r}")));
    }
    let xi = ma_over_mu.sqrt() / r;
    let delta = QuantumDefect::new(phi).mixing_angle(l);
    let j = spherical_j_upto(l, xi);
    let y = spherical_y_upto(l, xi);
    Ok(delta.cos() * j[l as usize] + delta.sin() * y[l as usize])
}

/// d/dr of [`reference_solution`] (same normalization).
pub fn reference_solution_deriv(l: u32, phi: f64, ma_over_mu: f64, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::domain(format!("reference solution needs r > 0, got {r}")));
    }
    let c = ma_over_mu.sqrt();
    let xi = c / r;
    let delta = QuantumDefect::new(phi).mixing_angle(l);
    let (jp, yp) = spherical_jy_deriv(l, xi);
    // dξ/dr = −c/r²
    Ok(-(c / (r * r)) * (delta.cos() * jp + delta.sin() * yp))
}

/// Which short-range physics closes the radial equation at r_min.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Interaction {
    /// −1/r⁴ ion potential with quantum-defect phase φ.
    Ion { phi: f64 },
    /// No ion: regular solution u ∝ r^{l+1} at the origin.
    None,
}

impl Interaction {
    pub fn is_ion(&self) -> bool {
        matches!(self, Interaction::Ion { .. })
    }

    pub fn phi(&self) -> f64 {
        match self {
            Interaction::Ion { phi } => *phi,
            Interaction::None => 0.0,
        }
    }
}

/// The isotropic single-particle problem defining the expansion basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialProblem {
    /// Trap-strength parameter α = (R*/l₀)⁴.
    pub alpha: f64,
    /// m_a/μ.
    pub ma_over_mu: f64,
    pub interaction: Interaction,
}

impl RadialProblem {
    pub fn new(alpha: f64, ma_over_mu: f64, interaction: Interaction) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::domain(format!("alpha must be positive, got {alpha}")));
        }
        if !(ma_over_mu > 0.0) || !ma_over_mu.is_finite() {
            return Err(Error::domain(format!("ma_over_mu must be positive, got {ma_over_mu}")));
        }
        Ok(RadialProblem { alpha, ma_over_mu, interaction })
    }

    /// Harmonic-limit eigenvalue (μ/m_a)√α(4n + 2l + 3); exact when the ion
    /// is absent.
    pub fn harmonic_energy(&self, n: u32, l: u32) -> f64 {
        self.alpha.sqrt() / self.ma_over_mu * (4 * n + 2 * l + 3) as f64
    }

    /// Channel solver for one partial wave on a given grid.
    pub fn channel<'g>(&self, l: u32, grid: &'g RadialGrid) -> Channel<'g> {
        let c2 = self.ma_over_mu;
        let ll1 = (l * (l + 1)) as f64;
        let n = grid.len();
        let mut q0 = Vec::with_capacity(n);
        let mut ce = Vec::with_capacity(n);
        for &r in &grid.r {
            let r2 = r * r;
            let ion_term = if self.interaction.is_ion() { c2 / r2 } else { 0.0 };
            q0.push(ll1 + 0.25 + self.alpha * r2 * r2 - ion_term);
            ce.push(c2 * r2);
        }
        // Boundary values of v = u/√r at the first two grid points.
        let (v0, v1) = match self.interaction {
            Interaction::Ion { phi } => {
                let u0 = reference_solution(l, phi, c2, grid.r[0]).expect("r_min > 0");
                let u1 = reference_solution(l, phi, c2, grid.r[1]).expect("r > 0");
                (u0 / grid.r[0].sqrt(), u1 / grid.r[1].sqrt())
            }
            Interaction::None => {
                // v ∝ r^{l+1/2}, evaluated relative to the first point.
                (1.0, ((l as f64 + 0.5) * grid.h).exp())
            }
        };
        Channel { grid, l, q0, ce, v0, v1 }
    }

    /// All channel eigenvalues inside `window`, in increasing order.
    ///
    /// Node counting on the renormalized ratios brackets every level exactly
    /// (a node-count discontinuity of more than one between bracket updates
    /// would mean a missed level and is reported as such).
    pub fn scan_channel(&self, l: u32, window: (f64, f64), grid: &RadialGrid) -> Result<Vec<f64>> {
        let ch = self.channel(l, grid);
        let states = ch.eigenvalues_in(window)?;
        Ok(states)
    }
}

/// Per-partial-wave renormalized Numerov solver.
pub struct Channel<'g> {
    grid: &'g RadialGrid,
    pub l: u32,
    /// Energy-independent part of Q(x).
    q0: Vec<f64>,
    /// Coefficient of −E in Q(x), i.e. c² r².
    ce: Vec<f64>,
    v0: f64,
    v1: f64,
}

impl Channel<'_> {
    #[inline]
    fn q(&self, i: usize, e: f64) -> f64 {
        self.q0[i] - e * self.ce[i]
    }

    #[inline]
    fn u_coef(&self, i: usize, e: f64, h2_12: f64) -> (f64, f64) {
        // Returns (1 − h²Q/12, U) for the renormalized recurrence.
        let t = h2_12 * self.q(i, e);
        let a = 1.0 - t;
        ((2.0 + 10.0 * t) / a, a)
    }

    /// Number of eigenvalues of the discrete boundary-value problem strictly
    /// below `e`: the count of sign changes of the outward solution.
    pub fn count_below(&self, e: f64) -> usize {
        let n = self.grid.len();
        let h2_12 = self.grid.h * self.grid.h / 12.0;
        let (_, a0) = self.u_coef(0, e, h2_12);
        let (_, a1) = self.u_coef(1, e, h2_12);
        let mut r = (a1 * self.v1) / (a0 * self.v0);
        let mut count = (r < 0.0) as usize;
        for i in 1..n - 1 {
            let (u, _) = self.u_coef(i, e, h2_12);
            r = u - 1.0 / r;
            count += (r < 0.0) as usize;
        }
        count
    }

    /// Outermost classically allowed index at energy `e` (matching point for
    /// wavefunction reconstruction).
    fn match_index(&self, e: f64) -> usize {
        let n = self.grid.len();
        let mut m = 0;
        let mut qmin = f64::INFINITY;
        let mut argmin = 1;
        for i in 1..n - 1 {
            let q = self.q(i, e);
            if q < 0.0 {
                m = i;
            }
            if q < qmin {
                qmin = q;
                argmin = i;
            }
        }
        if m == 0 {
            argmin
        } else {
            m.clamp(1, n - 2)
        }
    }

    /// Residual of the three-term recurrence at the matching index `m` for the
    /// outward/inward renormalized sweeps; zero exactly at the eigenvalues of
    /// the discrete boundary-value problem.
    fn match_defect(&self, e: f64, m: usize) -> f64 {
        let n = self.grid.len();
        let h2_12 = self.grid.h * self.grid.h / 12.0;
        let (_, a0) = self.u_coef(0, e, h2_12);
        let (_, a1) = self.u_coef(1, e, h2_12);
        let mut r = (a1 * self.v1) / (a0 * self.v0);
        for i in 1..m {
            let (u, _) = self.u_coef(i, e, h2_12);
            r = u - 1.0 / r;
        }
        let (u_last, _) = self.u_coef(n - 1, e, h2_12);
        let mut s = u_last;
        for i in (m + 1..n - 1).rev() {
            let (u, _) = self.u_coef(i, e, h2_12);
            s = u - 1.0 / s;
        }
        let (u_m, _) = self.u_coef(m, e, h2_12);
        u_m - 1.0 / r - 1.0 / s
    }

    /// All eigenvalues within (e_lo, e_hi): node-count bisection brackets each
    /// level (this cannot skip any), then a secant polish on the matching
    /// defect refines it to near machine precision.
    pub fn eigenvalues_in(&self, (e_lo, e_hi): (f64, f64)) -> Result<Vec<f64>> {
        if !(e_hi > e_lo) || !e_lo.is_finite() || !e_hi.is_finite() {
            return Err(Error::domain(format!("bad energy window [{e_lo}, {e_hi}]")));
        }
        let n_lo = self.count_below(e_lo);
        let n_hi = self.count_below(e_hi);
        let scale = e_lo.abs().max(e_hi.abs()).max(1.0);
        let coarse = 1e-5 * scale;
        let fine = 1e-14 * scale;
        let mut out = Vec::with_capacity(n_hi.saturating_sub(n_lo));
        let mut lower = e_lo;
        for j in n_lo..n_hi {
            // Bracket [a, b] with count(a) ≤ j < count(b).
            let (mut a, mut b) = (lower, e_hi);
            while b - a > coarse {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                if self.count_below(mid) <= j {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            let e = self.polish(a, b, fine, j);
            out.push(e);
            lower = b;
        }
        Ok(out)
    }

    /// Secant iteration on the matching defect inside an isolating bracket,
    /// falling back to node-count bisection when the secant step misbehaves.
    fn polish(&self, mut a: f64, mut b: f64, fine: f64, j: usize) -> f64 {
        let m = self.match_index(0.5 * (a + b));
        let mut x0 = a;
        let mut x1 = b;
        let mut f0 = self.match_defect(x0, m);
        let mut f1 = self.match_defect(x1, m);
        for _ in 0..60 {
            if !f0.is_finite() || !f1.is_finite() || f0 == f1 {
                break;
            }
            let x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
            if !(x2 > a && x2 < b) {
                break;
            }
            // keep the node-count bracket in sync so a failed secant still
            // leaves a valid interval
            if self.count_below(x2) <= j {
                a = x2;
            } else {
                b = x2;
            }
            x0 = x1;
            f0 = f1;
            x1 = x2;
            f1 = self.match_defect(x2, m);
            if (x1 - x0).abs() <= f64::EPSILON * 4.0 * x1.abs().max(1.0) {
                return x1;
            }
        }
        while b - a > fine {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            if self.count_below(mid) <= j {
                a = mid;
            } else {
                b = mid;
            }
        }
        0.5 * (a + b)
    }

    /// Reconstruct the normalized eigenfunction u(r) at energy `e`, checking
    /// that the node count matches `expected_nodes`.
    pub fn eigenfunction(&self, e: f64, expected_nodes: usize) -> Result<Vec<f64>> {
        let n = self.grid.len();
        let h2_12 = self.grid.h * self.grid.h / 12.0;
        let m = self.match_index(e);

        // Outward ratios R_i = F_{i+1}/F_i for i < m.
        let mut rout = vec![0.0; m];
        let (_, a0) = self.u_coef(0, e, h2_12);
        let (_, a1) = self.u_coef(1, e, h2_12);
        let mut r = (a1 * self.v1) / (a0 * self.v0);
        rout[0] = r;
        for i in 1..m {
            let (u, _) = self.u_coef(i, e, h2_12);
            r = u - 1.0 / r;
            rout[i] = r;
        }
        // Inward ratios Ŕ_i = F_{i-1}/F_i for i > m, with F_{N-1} treated as
        // the Dirichlet edge.
        let mut rin = vec![0.0; n];
        let (u_last, _) = self.u_coef(n - 1, e, h2_12);
        let mut s = u_last;
        rin[n - 1] = s;
        for i in (m + 1..n - 1).rev() {
            let (u, _) = self.u_coef(i, e, h2_12);
            s = u - 1.0 / s;
            rin[i] = s;
        }

        // Assemble F from the matching point, then undo the hat.
        let mut f = vec![0.0; n];
        f[m] = 1.0;
        for i in (0..m).rev() {
            let div = if rout[i] == 0.0 { f64::MIN_POSITIVE } else { rout[i] };
            f[i] = f[i + 1] / div;
        }
        for i in m + 1..n {
            let div = if rin[i] == 0.0 { f64::MIN_POSITIVE } else { rin[i] };
            f[i] = f[i - 1] / div;
        }
        let mut u = vec![0.0; n];
        for i in 0..n {
            let t = h2_12 * self.q(i, e);
            let v = f[i] / (1.0 - t);
            u[i] = v * self.grid.r[i].sqrt();
        }

        // Node count of the reconstructed solution must match the index.
        let mut nodes = 0;
        for i in 0..n - 1 {
            if u[i] != 0.0 && u[i + 1] != 0.0 && u[i] * u[i + 1] < 0.0 {
                nodes += 1;
            }
        }
        if nodes != expected_nodes {
            return Err(Error::MissedLevel {
                l: self.l,
                expected: expected_nodes,
                found: nodes,
                energy: e,
            });
        }

        // Normalize ∫u² dr = 1 and fix the overall sign at the largest lobe.
        let norm2: f64 = u
            .iter()
            .zip(&self.grid.w_dr)
            .map(|(&ui, &wi)| ui * ui * wi)
            .sum();
        if !(norm2 > 0.0) || !norm2.is_finite() {
            return Err(Error::numerical(format!(
                "non-normalizable eigenfunction at E={e}, l={}",
                self.l
            )));
        }
        let scale = 1.0 / norm2.sqrt();
        let imax = u
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).unwrap())
            .map(|(i, _)| i)
            .unwrap_or(0);
        let sign = if u[imax] < 0.0 { -1.0 } else { 1.0 };
        for ui in &mut u {
            *ui *= scale * sign;
        }
        Ok(u)
    }
}

/// One member of the expansion basis.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RadialEigenstate {
    /// Radial node count.
    pub n: u32,
    /// Orbital angular momentum (m = 0 throughout).
    pub l: u32,
    /// Energy (units E*).
    pub e0: f64,
    /// Reduced radial function on the grid, ∫u² dr = 1.
    pub u: Vec<f64>,
}

/// Inputs that define a basis (also the cache key content).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisParams {
    pub alpha: f64,
    pub ma_over_mu: f64,
    pub interaction: Interaction,
    /// Highest partial wave included.
    pub l_max: u32,
    /// Total number of states kept (lowest energies across all channels).
    pub size: usize,
    /// Bound-state floor: states below this energy are discarded.
    pub e_min: f64,
    pub grid_spec: GridSpec,
}

impl BasisParams {
    pub fn new(alpha: f64, ma_over_mu: f64, interaction: Interaction) -> Self {
        BasisParams {
            alpha,
            ma_over_mu,
            interaction,
            l_max: 48,
            size: 1250,
            e_min: -2000.0,
            grid_spec: GridSpec::default(),
        }
    }

    pub fn with_size(mut self, size: usize) -> Self {
        self.size = size;
        self
    }

    pub fn with_l_max(mut self, l_max: u32) -> Self {
        self.l_max = l_max;
        self
    }

    pub fn with_e_min(mut self, e_min: f64) -> Self {
        self.e_min = e_min;
        self
    }

    pub fn with_grid_spec(mut self, spec: GridSpec) -> Self {
        self.grid_spec = spec;
        self
    }

    /// Content hash over every input that affects the numerical result.
    pub fn content_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(b"ionwell-basis-v1");
        for v in [
            self.alpha,
            self.ma_over_mu,
            self.interaction.phi(),
            self.e_min,
            self.grid_spec.phase_step,
            self.grid_spec.forbidden_step,
            self.grid_spec.rmax_margin,
            self.grid_spec.rmin_safety,
        ] {
            h.update(v.to_le_bytes());
        }
        h.update([self.interaction.is_ion() as u8]);
        h.update((self.l_max as u64).to_le_bytes());
        h.update((self.size as u64).to_le_bytes());
        let digest = h.finalize();
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// A contiguous block of basis states sharing one partial wave.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelBlock {
    pub l: u32,
    pub start: usize,
    pub end: usize,
}

/// The spectral expansion basis {ψ⁰_k, E⁰_k}, sorted by (l, E⁰).
#[derive(Debug, Clone)]
pub struct BasisSet {
    pub params: BasisParams,
    pub grid: Arc<RadialGrid>,
    pub states: Vec<RadialEigenstate>,
    /// Enumeration ceiling actually used (reported in output metadata).
    pub e_cap: f64,
}

impl BasisSet {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Channel blocks in increasing l (states within a block are sorted by E⁰).
    pub fn channels(&self) -> Vec<ChannelBlock> {
        let mut blocks = Vec::new();
        let mut start = 0;
        for i in 1..=self.states.len() {
            if i == self.states.len() || self.states[i].l != self.states[start].l {
                blocks.push(ChannelBlock { l: self.states[start].l, start, end: i });
                start = i;
            }
        }
        blocks
    }

    /// Indices of states with even / odd l (the z-parity blocks).
    pub fn parity_partition(&self) -> (Vec<usize>, Vec<usize>) {
        let mut even = Vec::new();
        let mut odd = Vec::new();
        for (i, s) in self.states.iter().enumerate() {
            if s.l % 2 == 0 {
                even.push(i);
            } else {
                odd.push(i);
            }
        }
        (even, odd)
    }

    pub fn content_hash(&self) -> String {
        self.params.content_hash()
    }

    /// Largest deviation of the same-l Gram matrix from the identity.
    pub fn max_orthonormality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for block in self.channels() {
            for i in block.start..block.end {
                for j in i..block.end {
                    let mut acc = 0.0;
                    let ui = &self.states[i].u;
                    let uj = &self.states[j].u;
                    for ((a, b), w) in ui.iter().zip(uj).zip(&self.grid.w_dr) {
                        acc += a * b * w;
                    }
                    let target = if i == j { 1.0 } else { 0.0 };
                    worst = worst.max((acc - target).abs());
                }
            }
        }
        worst
    }
}

/// Build the expansion basis: enumerate every channel within
/// [e_min, E_cap], where E_cap is chosen so that at least `size` states
/// exist, then keep the `size` lowest-energy states overall.
pub fn build_basis(params: &BasisParams) -> Result<BasisSet> {
    if params.size == 0 {
        return Err(Error::domain("basis size must be at least 1".to_string()));
    }
    let problem = RadialProblem::new(params.alpha, params.ma_over_mu, params.interaction)?;

    // Harmonic estimate of the enumeration ceiling (with the ion the true
    // ceiling is lower because extra levels enter from below, so this always
    // errs on the roomy side for the grid build).
    let kappa_sqrt_alpha = params.alpha.sqrt() / params.ma_over_mu;
    let harmonic_total = |e: f64| -> usize {
        (0..=params.l_max)
            .map(|l| {
                let x = (e / kappa_sqrt_alpha - (2 * l + 3) as f64) / 4.0;
                if x < 0.0 {
                    0
                } else {
                    x.floor() as usize + 1
                }
            })
            .sum()
    };
    let mut e_cap_est = kappa_sqrt_alpha * 3.0;
    while harmonic_total(e_cap_est) < params.size {
        e_cap_est += kappa_sqrt_alpha;
    }

    let mut e_grid_max = 1.3 * e_cap_est + 10.0;
    for _attempt in 0..4 {
        let grid = Arc::new(RadialGrid::build(
            params.alpha,
            params.ma_over_mu,
            params.interaction.is_ion(),
            params.e_min,
            e_grid_max,
            &params.grid_spec,
        )?);

        let channels: Vec<Channel> = (0..=params.l_max)
            .map(|l| problem.channel(l, &grid))
            .collect();
        let base_counts: Vec<usize> = channels.par_iter().map(|c| c.count_below(params.e_min)).collect();
        let total_in_window = |e: f64| -> usize {
            channels
                .par_iter()
                .zip(&base_counts)
                .map(|(c, &b)| c.count_below(e).saturating_sub(b))
                .sum()
        };

        if total_in_window(e_grid_max) < params.size {
            e_grid_max *= 1.6;
            continue;
        }
        // Smallest ceiling holding at least `size` states.
        let (mut lo, mut hi) = (params.e_min, e_grid_max);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if total_in_window(mid) >= params.size {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let e_cap = hi;

        // Enumerate and reconstruct per channel.
        let per_channel: Result<Vec<Vec<RadialEigenstate>>> = channels
            .par_iter()
            .zip(&base_counts)
            .map(|(ch, &base)| {
                let evs = ch.eigenvalues_in((params.e_min, e_cap))?;
                evs.into_iter()
                    .enumerate()
                    .map(|(j, e)| {
                        let u = ch.eigenfunction(e, base + j)?;
                        Ok(RadialEigenstate { n: (base + j) as u32, l: ch.l, e0: e, u })
                    })
                    .collect()
            })
            .collect();
        let mut states: Vec<RadialEigenstate> = per_channel?.into_iter().flatten().collect();

        // Keep the `size` lowest overall, then restore (l, E) ordering.
        states.sort_by(|a, b| (a.e0, a.l).partial_cmp(&(b.e0, b.l)).unwrap());
        states.truncate(params.size);
        states.sort_by(|a, b| (a.l, a.e0).partial_cmp(&(b.l, b.e0)).unwrap());

        if states.len() < params.size {
            e_grid_max *= 1.6;
            continue;
        }
        return Ok(BasisSet { params: params.clone(), grid, states, e_cap });
    }
    Err(Error::numerical(format!(
        "could not accumulate {} basis states below the grid ceiling",
        params.size
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    const C2: f64 = 258.0 / 171.0; // m_a/μ for ⁸⁷Rb / ¹⁷¹Yb⁺

    fn grid_for(problem: &RadialProblem, e_min: f64, e_max: f64) -> RadialGrid {
        RadialGrid::build(
            problem.alpha,
            problem.ma_over_mu,
            problem.interaction.is_ion(),
            e_min,
            e_max,
            &GridSpec::default(),
        )
        .unwrap()
    }

    #[test]
    fn reference_solution_l0_cosine_branch() {
        // φ = π/2 (a_ia = 0) selects u ∝ r cos(√(m_a/μ)/r).
        let c = C2.sqrt();
        for &r in &[0.012, 0.02, 0.04] {
            let u = reference_solution(0, std::f64::consts::FRAC_PI_2, C2, r).unwrap();
            let expect = (c / r).cos() * r / c; // −y_0(ξ)·(+1) = cos(ξ)/ξ
            assert_relative_eq!(u, expect, max_relative = 1e-10, epsilon = 1e-14);
        }
    }

    #[test]
    fn reference_solution_satisfies_zero_energy_equation() {
        // Five-point finite-difference residual of u'' + (m_a/μ) u / r⁴ = 0
        // for l = 0, with the step tied to the local oscillation wavelength
        // so truncation and rounding both stay far below the tolerance.
        let phi = -std::f64::consts::FRAC_PI_4;
        let c = C2.sqrt();
        let mut worst: f64 = 0.0;
        for k in 0..60 {
            let r = 0.012 + 0.038 * k as f64 / 59.0;
            let h = 2.0 * std::f64::consts::PI * r * r / c / 1000.0;
            let f = |x: f64| reference_solution(0, phi, C2, x).unwrap();
            let d2 = (-f(r - 2.0 * h) + 16.0 * f(r - h) - 30.0 * f(r) + 16.0 * f(r + h)
                - f(r + 2.0 * h))
                / (12.0 * h * h);
            let residual = d2 + C2 * f(r) / r.powi(4);
            let scale = (C2 * f(r) / r.powi(4)).abs().max(d2.abs()).max(1e-300);
            worst = worst.max((residual / scale).abs());
        }
        assert!(worst < 1e-6, "residual {worst}");
    }

    #[test]
    fn reference_solution_phase_periodicity() {
        // φ and φ+π give identical log-derivatives.
        for l in [0u32, 1, 3] {
            for &r in &[0.015, 0.03] {
                let phi = 0.37;
                let a = reference_solution_deriv(l, phi, C2, r).unwrap()
                    / reference_solution(l, phi, C2, r).unwrap();
                let b = reference_solution_deriv(l, phi + std::f64::consts::PI, C2, r).unwrap()
                    / reference_solution(l, phi + std::f64::consts::PI, C2, r).unwrap();
                assert_relative_eq!(a, b, max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn reference_solution_rejects_nonpositive_r() {
        assert!(reference_solution(0, 0.3, C2, 0.0).is_err());
        assert!(reference_solution(0, 0.3, C2, -1.0).is_err());
    }

    #[test]
    fn harmonic_spectrum_without_ion() {
        // E⁰ = (μ/m_a)√α(4n + 2l + 3) when the ion is off.
        let problem = RadialProblem::new(10.0, C2, Interaction::None).unwrap();
        let grid = grid_for(&problem, 0.0, 80.0);
        for l in [0u32, 1, 2, 5] {
            let evs = problem.scan_channel(l, (0.0, 80.0), &grid).unwrap();
            assert!(evs.len() >= 3);
            for (n, &e) in evs.iter().enumerate() {
                let exact = problem.harmonic_energy(n as u32, l);
                assert_relative_eq!(e, exact, max_relative = 1e-6);
            }
            // low-lying states are far more accurate than the 1e-6 bound
            assert_relative_eq!(evs[0], problem.harmonic_energy(0, l), max_relative = 1e-8);
        }
    }

    #[test]
    fn counting_is_monotone_and_complete() {
        let problem = RadialProblem::new(
            10.0,
            C2,
            Interaction::Ion { phi: -std::f64::consts::FRAC_PI_4 },
        )
        .unwrap();
        let grid = grid_for(&problem, -60.0, 60.0);
        let ch = problem.channel(0, &grid);
        let mut prev = ch.count_below(-60.0);
        for k in 1..=24 {
            let e = -60.0 + 120.0 * k as f64 / 24.0;
            let c = ch.count_below(e);
            assert!(c >= prev, "count decreased: {prev} -> {c} at E={e}");
            prev = c;
        }
        // every eigenvalue reported lies in the window and splits the counts
        let evs = ch.eigenvalues_in((-60.0, 60.0)).unwrap();
        assert_eq!(evs.len(), ch.count_below(60.0) - ch.count_below(-60.0));
        for w in evs.windows(2) {
            assert!(w[1] > w[0]);
        }
    }

    #[test]
    fn eigenfunctions_match_boundary_log_derivative() {
        let phi = -std::f64::consts::FRAC_PI_4;
        let problem = RadialProblem::new(10.0, C2, Interaction::Ion { phi }).unwrap();
        let grid = grid_for(&problem, -40.0, 40.0);
        let ch = problem.channel(0, &grid);
        let evs = ch.eigenvalues_in((-40.0, 40.0)).unwrap();
        let base = ch.count_below(-40.0);
        // the boundary form is the zero-energy solution, so check the lowest
        // trap state, where the neglected E term is smallest
        let idx = evs.iter().position(|&e| e > 0.0).unwrap();
        let u = ch.eigenfunction(evs[idx], base + idx).unwrap();
        // fourth-order one-sided derivative in x at the inner edge
        let v: Vec<f64> = u.iter().zip(&grid.r).map(|(ui, ri)| ui / ri.sqrt()).collect();
        let dvdx = (-25.0 / 12.0 * v[0] + 4.0 * v[1] - 3.0 * v[2] + 4.0 / 3.0 * v[3]
            - 0.25 * v[4])
            / grid.h;
        let got = (dvdx / v[0] + 0.5) / grid.r[0];
        let want = reference_solution_deriv(0, phi, C2, grid.r[0]).unwrap()
            / reference_solution(0, phi, C2, grid.r[0]).unwrap();
        assert_relative_eq!(got, want, max_relative = 1e-6);
    }

    #[test]
    fn with_ion_matches_independent_shooting_oracle() {
        // Fine-grid RK4 shooting in r (different variable, different
        // integrator, different matching) as an independent check of the
        // lowest trap states at α=10, φ=−π/4.
        let phi = -std::f64::consts::FRAC_PI_4;
        let problem = RadialProblem::new(10.0, C2, Interaction::Ion { phi }).unwrap();
        let grid = grid_for(&problem, -40.0, 40.0);
        let evs = problem.scan_channel(0, (0.5, 20.0), &grid).unwrap();
        assert!(evs.len() >= 2, "expected at least two trap states, got {evs:?}");
        for &e in evs.iter().take(2) {
            let oracle = shooting_eigenvalue_near(&problem, 0, grid.r_min, e);
            assert_relative_eq!(e, oracle, max_relative = 1e-6);
        }
    }

    #[test]
    fn phase_shifted_by_pi_gives_identical_spectrum() {
        let phi = 0.4;
        let window = (-50.0, 50.0);
        let p1 = RadialProblem::new(8.0, C2, Interaction::Ion { phi }).unwrap();
        let p2 = RadialProblem::new(8.0, C2, Interaction::Ion { phi: phi + std::f64::consts::PI })
            .unwrap();
        let grid = grid_for(&p1, window.0, window.1);
        let e1 = p1.scan_channel(0, window, &grid).unwrap();
        let e2 = p2.scan_channel(0, window, &grid).unwrap();
        assert_eq!(e1.len(), e2.len());
        for (a, b) in e1.iter().zip(&e2) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-10);
        }
    }

    #[test]
    fn basis_build_selects_lowest_and_orders_by_l() {
        let phi = -std::f64::consts::FRAC_PI_4;
        let params = BasisParams::new(10.0, C2, Interaction::Ion { phi })
            .with_l_max(4)
            .with_size(60)
            .with_e_min(-80.0);
        let basis = build_basis(&params).unwrap();
        assert_eq!(basis.len(), 60);
        // sorted by (l, E)
        for w in basis.states.windows(2) {
            assert!(w[1].l > w[0].l || (w[1].l == w[0].l && w[1].e0 > w[0].e0));
        }
        // no duplicate (n, l)
        let mut seen = std::collections::HashSet::new();
        for s in &basis.states {
            assert!(seen.insert((s.n, s.l)), "duplicate state ({}, {})", s.n, s.l);
            assert!(s.e0 >= params.e_min);
        }
        // all kept energies lie below every discarded one: check the cap
        assert!(basis.states.iter().all(|s| s.e0 <= basis.e_cap));
        // orthonormality within channels
        assert!(basis.max_orthonormality_defect() < 1e-8);
    }

    #[test]
    fn basis_without_ion_recovers_harmonic_multiplets() {
        let params = BasisParams::new(6.0, C2, Interaction::None)
            .with_l_max(3)
            .with_size(30)
            .with_e_min(-10.0);
        let basis = build_basis(&params).unwrap();
        let problem = RadialProblem::new(6.0, C2, Interaction::None).unwrap();
        for s in &basis.states {
            let exact = problem.harmonic_energy(s.n, s.l);
            assert_relative_eq!(s.e0, exact, max_relative = 1e-8);
        }
    }

    #[test]
    fn missed_level_is_detected_for_wrong_node_count() {
        let problem = RadialProblem::new(10.0, C2, Interaction::None).unwrap();
        let grid = grid_for(&problem, 0.0, 40.0);
        let ch = problem.channel(0, &grid);
        let evs = ch.eigenvalues_in((0.0, 40.0)).unwrap();
        let err = ch.eigenfunction(evs[1], 0).unwrap_err();
        assert!(matches!(err, Error::MissedLevel { .. }));
    }

    /// Independent oracle: RK4 shooting on a fine uniform r-grid with
    /// Wronskian matching at the outer turning point, bisected on the sign
    /// of the log-derivative mismatch. Searches near `e_guess`.
    fn shooting_eigenvalue_near(problem: &RadialProblem, l: u32, r_min: f64, e_guess: f64) -> f64 {
        let mismatch = |e: f64| shooting_mismatch(problem, l, r_min, e);
        // bracket a sign change around the guess
        let mut a = e_guess - 0.2;
        let mut b = e_guess + 0.2;
        let (mut fa, mut fb) = (mismatch(a), mismatch(b));
        let mut tries = 0;
        while fa.signum() == fb.signum() && tries < 40 {
            a -= 0.1;
            b += 0.1;
            fa = mismatch(a);
            fb = mismatch(b);
            tries += 1;
        }
        assert!(fa.signum() != fb.signum(), "oracle failed to bracket near {e_guess}");
        for _ in 0..60 {
            let m = 0.5 * (a + b);
            let fm = mismatch(m);
            if fm.signum() == fa.signum() {
                a = m;
                fa = fm;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    }

    fn shooting_mismatch(problem: &RadialProblem, l: u32, r_min: f64, e: f64) -> f64 {
        let c2 = problem.ma_over_mu;
        let phi = problem.interaction.phi();
        let w = |r: f64| -> f64 {
            let ion = if problem.interaction.is_ion() { c2 / r.powi(4) } else { 0.0 };
            (l * (l + 1)) as f64 / (r * r) + problem.alpha * r * r - ion - c2 * e
        };
        let r_turn = (c2 * e / problem.alpha).sqrt().max(r_min * 4.0);
        let r_max = r_turn * 1.8 + 1.0;
        let n_steps = 400_000usize;
        // outward from the analytic short-range solution
        let rk4 = |r0: f64, r1: f64, mut u: f64, mut du: f64| -> (f64, f64) {
            let n = n_steps;
            let h = (r1 - r0) / n as f64;
            let mut r = r0;
            for _ in 0..n {
                let f1 = (du, w(r) * u);
                let f2 = (du + 0.5 * h * f1.1, w(r + 0.5 * h) * (u + 0.5 * h * f1.0));
                let f3 = (du + 0.5 * h * f2.1, w(r + 0.5 * h) * (u + 0.5 * h * f2.0));
                let f4 = (du + h * f3.1, w(r + h) * (u + h * f3.0));
                let nu = u + h / 6.0 * (f1.0 + 2.0 * f2.0 + 2.0 * f3.0 + f4.0);
                let ndu = du + h / 6.0 * (f1.1 + 2.0 * f2.1 + 2.0 * f3.1 + f4.1);
                u = nu;
                du = ndu;
                r += h;
                let scale = u.abs().max(du.abs());
                if scale > 1e250 {
                    u /= scale;
                    du /= scale;
                }
            }
            (u, du)
        };
        let (u0, du0) = (
            reference_solution(l, phi, c2, r_min).unwrap(),
            reference_solution_deriv(l, phi, c2, r_min).unwrap(),
        );
        let (uo, duo) = rk4(r_min, r_turn, u0, du0);
        // inward from a decaying start
        let kappa = w(r_max).max(0.0).sqrt();
        let (ui, dui) = rk4(r_max, r_turn, 1.0, -kappa);
        // normalized Wronskian: zero at eigenvalues and free of the poles a
        // log-derivative difference would have when a node sits at r_turn
        (duo * ui - dui * uo) / ((uo * uo + duo * duo).sqrt() * (ui * ui + dui * dui).sqrt())
    }
}
