//! Double-well Hamiltonian in the radial expansion basis.
//!
//! With the moment matrices M⁽ʲ⁾_{kk'} = ∫ ψ⁰*_{k'} cosʲθ rʲ ψ⁰_k d³r the
//! Hamiltonian at separation q is
//!
//! ```text
//! H_{kk'} = (E⁰_k + κ α q²/4) δ_{kk'} − (3κα/2) M⁽²⁾_{kk'} + (κα/4q²) M⁽⁴⁾_{kk'},
//! κ = μ/m_a,
//! ```
//!
//! and the moments do not depend on q, so q-sweeps reuse them. Because both
//! moments couple only even Δl, the matrix splits into even-l and odd-l
//! (z-parity) blocks; the ground doublet is the lowest trap-dominated level
//! of each block. The tunnel coupling is J = (E_e − E_g)/2 in units of E*/ħ.

use crate::angular::angular_moment;
use crate::density::{
    cross_quartic_integral, quartic_integral, right_half_probability, AngularTables,
};
use crate::error::{Error, Result};
use crate::radial::BasisSet;
use crate::scales::scattering_length_from_phase;
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

/// The q-independent moment matrices M⁽²⁾ and M⁽⁴⁾ over the basis.
pub struct MomentMatrices {
    pub m2: DMatrix<f64>,
    pub m4: DMatrix<f64>,
    /// Largest Richardson estimate of radial quadrature error, relative.
    pub quadrature_defect: f64,
}

/// Radial integrals ∫ u_a r^j u_b dr for one channel pair, fine and
/// half-density sums for the Richardson estimate.
fn radial_block(
    basis: &BasisSet,
    a: (usize, usize),
    b: (usize, usize),
    j: i32,
) -> (DMatrix<f64>, f64) {
    let grid = &basis.grid;
    let n = grid.len();
    let wj: Vec<f64> = (0..n).map(|i| grid.w_dr[i] * grid.r[i].powi(j)).collect();
    let rows = a.1 - a.0;
    let cols = b.1 - b.0;
    let mut out = DMatrix::zeros(rows, cols);
    let mut defect: f64 = 0.0;
    for (ia, ka) in (a.0..a.1).enumerate() {
        let ua = &basis.states[ka].u;
        for (ib, kb) in (b.0..b.1).enumerate() {
            let ub = &basis.states[kb].u;
            let mut fine = 0.0;
            let mut coarse = 0.0;
            for i in 1..n - 1 {
                let term = ua[i] * ub[i] * wj[i];
                fine += term;
                if i % 2 == 0 {
                    coarse += 2.0 * term;
                }
            }
            let est = (fine - coarse).abs() / 3.0;
            defect = defect.max(est / (1.0 + fine.abs()));
            out[(ia, ib)] = fine;
        }
    }
    (out, defect)
}

/// Assemble M⁽²⁾ and M⁽⁴⁾; errors if the Richardson quadrature estimate
/// exceeds 1e-8 anywhere.
pub fn moment_matrices(basis: &BasisSet) -> Result<MomentMatrices> {
    let k = basis.len();
    let channels = basis.channels();
    // all (channel, channel, j) tasks allowed by the selection rules
    let mut tasks = Vec::new();
    for (ia, ca) in channels.iter().enumerate() {
        for cb in channels.iter().skip(ia) {
            let dl = cb.l - ca.l;
            if dl > 4 || dl % 2 == 1 {
                continue;
            }
            if dl <= 2 {
                tasks.push((*ca, *cb, 2u32));
            }
            tasks.push((*ca, *cb, 4u32));
        }
    }
    let blocks: Vec<_> = tasks
        .par_iter()
        .map(|&(ca, cb, j)| {
            let ang = angular_moment(ca.l, cb.l, j).expect("j is 2 or 4");
            let (block, defect) = radial_block(basis, (ca.start, ca.end), (cb.start, cb.end), j as i32);
            (ca, cb, j, block * ang, defect)
        })
        .collect();

    let mut m2 = DMatrix::zeros(k, k);
    let mut m4 = DMatrix::zeros(k, k);
    let mut defect: f64 = 0.0;
    for (ca, cb, j, block, d) in blocks {
        defect = defect.max(d);
        let target = if j == 2 { &mut m2 } else { &mut m4 };
        for (ia, ka) in (ca.start..ca.end).enumerate() {
            for (ib, kb) in (cb.start..cb.end).enumerate() {
                target[(ka, kb)] = block[(ia, ib)];
                target[(kb, ka)] = block[(ia, ib)];
            }
        }
    }
    if defect > 1e-8 {
        return Err(Error::numerical(format!(
            "moment-matrix quadrature did not converge (Richardson estimate {defect:.2e})"
        )));
    }
    Ok(MomentMatrices { m2, m4, quadrature_defect: defect })
}

/// One low-lying level of the double well.
#[derive(Debug, Clone, Copy)]
pub struct Level {
    pub energy: f64,
    /// z-parity: +1 for even-l sector, −1 for odd.
    pub parity: i8,
    /// Weight on positive-energy (trap) basis states.
    pub trap_weight: f64,
}

/// Ground doublet, localized modes and diagnostics at one separation q.
#[derive(Debug, Clone)]
pub struct DoubleWellResult {
    pub q: f64,
    /// Ground (even) and excited (odd) doublet energies (E*).
    pub e_g: f64,
    pub e_e: f64,
    /// Tunnel coupling J = (E_e − E_g)/2, units E*/ħ.
    pub coupling: f64,
    /// Doublet coefficient vectors over the basis.
    pub phi_g: Vec<f64>,
    pub phi_e: Vec<f64>,
    /// Localized modes (Φ_g ∓ Φ_e)/√2, oriented so Φ_L sits at z < 0.
    pub phi_l: Vec<f64>,
    pub phi_r: Vec<f64>,
    /// Two-mode validity metric (E₂ − E_e)/(E_e − E_g).
    pub gap_ratio: f64,
    pub trap_weight_g: f64,
    pub trap_weight_e: f64,
    /// Doublet identification was ambiguous (molecular admixture close by).
    pub flagged: bool,
    /// Low-lying trap levels of both parities, sorted by energy.
    pub levels: Vec<Level>,
}

/// Spectral solver holding the basis and the precomputed moments.
pub struct DoubleWellSolver {
    basis: BasisSet,
    moments: MomentMatrices,
    tables: AngularTables,
    /// μ/m_a.
    kappa: f64,
    even: Vec<usize>,
    odd: Vec<usize>,
    /// Number of trap levels kept in [`DoubleWellResult::levels`].
    pub levels_kept: usize,
}

impl DoubleWellSolver {
    pub fn new(basis: BasisSet) -> Result<Self> {
        let moments = moment_matrices(&basis)?;
        let (even, odd) = basis.parity_partition();
        let kappa = 1.0 / basis.params.ma_over_mu;
        let tables = AngularTables::new(basis.params.l_max);
        Ok(DoubleWellSolver { basis, moments, tables, kappa, even, odd, levels_kept: 16 })
    }

    pub fn basis(&self) -> &BasisSet {
        &self.basis
    }

    pub fn moments(&self) -> &MomentMatrices {
        &self.moments
    }

    pub fn tables(&self) -> &AngularTables {
        &self.tables
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    fn coefficients(&self, q: f64) -> Result<(f64, f64, f64)> {
        if !(q > 0.0) || !q.is_finite() {
            return Err(Error::domain(format!("well separation q must be positive, got {q}")));
        }
        let ka = self.kappa * self.basis.params.alpha;
        // (diagonal shift, M2 coefficient, M4 coefficient)
        Ok((ka * q * q / 4.0, -1.5 * ka, ka / (4.0 * q * q)))
    }

    /// Full K×K Hamiltonian at separation q.
    pub fn assemble(&self, q: f64) -> Result<DMatrix<f64>> {
        let (shift, c2, c4) = self.coefficients(q)?;
        let k = self.basis.len();
        let mut h = DMatrix::zeros(k, k);
        for a in 0..k {
            for b in 0..k {
                h[(a, b)] = c2 * self.moments.m2[(a, b)] + c4 * self.moments.m4[(a, b)];
            }
            h[(a, a)] += self.basis.states[a].e0 + shift;
        }
        Ok(h)
    }

    fn assemble_block(&self, q: f64, idx: &[usize]) -> Result<DMatrix<f64>> {
        let (shift, c2, c4) = self.coefficients(q)?;
        let n = idx.len();
        let mut h = DMatrix::zeros(n, n);
        for (a, &ka) in idx.iter().enumerate() {
            for (b, &kb) in idx.iter().enumerate() {
                h[(a, b)] = c2 * self.moments.m2[(ka, kb)] + c4 * self.moments.m4[(ka, kb)];
            }
            h[(a, a)] += self.basis.states[ka].e0 + shift;
        }
        Ok(h)
    }

    /// Eigen-decompose one parity block; returns (energies ascending,
    /// eigenvector columns in block coordinates).
    fn eigen_block(&self, q: f64, idx: &[usize]) -> Result<(Vec<f64>, DMatrix<f64>)> {
        let h = self.assemble_block(q, idx)?;
        let eig = h.symmetric_eigen();
        let n = idx.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
        let mut energies = Vec::with_capacity(n);
        let mut vectors = DMatrix::zeros(n, n);
        for (col, &src) in order.iter().enumerate() {
            energies.push(eig.eigenvalues[src]);
            vectors.set_column(col, &eig.eigenvectors.column(src));
        }
        Ok((energies, vectors))
    }

    fn trap_weight(&self, idx: &[usize], col: &DVector<f64>) -> f64 {
        let mut w = 0.0;
        for (a, &k) in idx.iter().enumerate() {
            if self.basis.states[k].e0 > 0.0 {
                w += col[a] * col[a];
            }
        }
        w
    }

    fn embed(&self, idx: &[usize], col: &DVector<f64>) -> Vec<f64> {
        let mut full = vec![0.0; self.basis.len()];
        for (a, &k) in idx.iter().enumerate() {
            full[k] = col[a];
        }
        full
    }

    /// Diagonalize at separation q and extract the ground doublet, the
    /// localized modes and the low-lying trap spectrum.
    pub fn solve_at(&self, q: f64) -> Result<DoubleWellResult> {
        let (e_even, v_even) = self.eigen_block(q, &self.even)?;
        let (e_odd, v_odd) = self.eigen_block(q, &self.odd)?;

        // the doublet: lowest trap-dominated level in each parity sector
        let pick = |energies: &[f64], vectors: &DMatrix<f64>, idx: &[usize]| -> Option<(usize, f64)> {
            for col in 0..energies.len() {
                let w = self.trap_weight(idx, &vectors.column(col).into_owned());
                if w >= 0.5 {
                    return Some((col, w));
                }
            }
            None
        };
        let (ig, w_g) = pick(&e_even, &v_even, &self.even).ok_or_else(|| {
            Error::numerical(format!("no trap-dominated even level found at q={q}"))
        })?;
        let (ie, w_e) = pick(&e_odd, &v_odd, &self.odd).ok_or_else(|| {
            Error::numerical(format!("no trap-dominated odd level found at q={q}"))
        })?;
        let e_g = e_even[ig];
        let e_e = e_odd[ie];
        if e_e < e_g {
            return Err(Error::numerical(format!(
                "doublet ordering violated at q={q}: even {e_g} above odd {e_e}"
            )));
        }
        let coupling = 0.5 * (e_e - e_g);
        let flagged = w_g < 0.7 || w_e < 0.7;

        // deterministic overall signs
        let orient = |v: &mut Vec<f64>| {
            let imax = v
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).unwrap())
                .map(|(i, _)| i)
                .unwrap_or(0);
            if v[imax] < 0.0 {
                for x in v.iter_mut() {
                    *x = -*x;
                }
            }
        };
        let mut phi_g = self.embed(&self.even, &v_even.column(ig).into_owned());
        let mut phi_e = self.embed(&self.odd, &v_odd.column(ie).into_owned());
        orient(&mut phi_g);
        orient(&mut phi_e);

        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        let mut phi_l: Vec<f64> = phi_g.iter().zip(&phi_e).map(|(g, e)| (g - e) * inv_sqrt2).collect();
        let mut phi_r: Vec<f64> = phi_g.iter().zip(&phi_e).map(|(g, e)| (g + e) * inv_sqrt2).collect();
        // orient: Φ_L must live in the left half space
        let p_r = right_half_probability(&self.basis, &self.tables, &phi_l)?;
        if p_r > 0.5 {
            std::mem::swap(&mut phi_l, &mut phi_r);
        }

        // low-lying trap levels and the gap to the next state above the doublet
        let mut levels = Vec::new();
        for (energies, vectors, idx, parity) in [
            (&e_even, &v_even, &self.even, 1i8),
            (&e_odd, &v_odd, &self.odd, -1i8),
        ] {
            let mut kept = 0;
            for col in 0..energies.len() {
                let w = self.trap_weight(idx, &vectors.column(col).into_owned());
                if w >= 0.5 {
                    levels.push(Level { energy: energies[col], parity, trap_weight: w });
                    kept += 1;
                    if kept >= self.levels_kept {
                        break;
                    }
                }
            }
        }
        levels.sort_by(|a, b| a.energy.partial_cmp(&b.energy).unwrap());
        let e2 = levels
            .iter()
            .map(|l| l.energy)
            .find(|&e| e > e_e + 1e-12 * e_e.abs().max(1.0))
            .ok_or_else(|| Error::numerical(format!("no level above the doublet at q={q}")))?;
        let gap_ratio = (e2 - e_e) / (e_e - e_g).max(f64::MIN_POSITIVE);

        Ok(DoubleWellResult {
            q,
            e_g,
            e_e,
            coupling,
            phi_g,
            phi_e,
            phi_l,
            phi_r,
            gap_ratio,
            trap_weight_g: w_g,
            trap_weight_e: w_e,
            flagged,
            levels,
        })
    }

    /// q-sweep with doublet tracking: each point's doublet is compared with
    /// the previous one by overlap and flagged below 0.9 (avoided crossings
    /// with molecular states are reported, never silently resolved).
    pub fn sweep(&self, qs: &[f64]) -> Vec<Result<SweepPoint>> {
        let results: Vec<Result<DoubleWellResult>> =
            qs.par_iter().map(|&q| self.solve_at(q)).collect();
        let mut out = Vec::with_capacity(results.len());
        let mut prev: Option<(Vec<f64>, Vec<f64>)> = None;
        for res in results {
            match res {
                Ok(r) => {
                    let continuity = prev
                        .as_ref()
                        .map(|(g, e)| {
                            let dot = |a: &[f64], b: &[f64]| -> f64 {
                                a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>().abs()
                            };
                            dot(g, &r.phi_g).min(dot(e, &r.phi_e))
                        })
                        .unwrap_or(1.0);
                    prev = Some((r.phi_g.clone(), r.phi_e.clone()));
                    let flagged = r.flagged || continuity < 0.9;
                    out.push(Ok(SweepPoint { result: r, continuity, flagged }));
                }
                Err(e) => {
                    prev = None;
                    out.push(Err(e));
                }
            }
        }
        out
    }
}

/// One point of a q-sweep with doublet-tracking diagnostics.
pub struct SweepPoint {
    pub result: DoubleWellResult,
    /// min(|⟨Φ_g,prev|Φ_g⟩|, |⟨Φ_e,prev|Φ_e⟩|) against the previous point.
    pub continuity: f64,
    pub flagged: bool,
}

/// On-site interaction from a localized mode: U = 8π a_aa (μ/m_a) ∫|Φ_L|⁴,
/// in units of E*/ħ, with a_aa in units of R*.
#[derive(Debug, Clone, Copy)]
pub struct OnsiteInteraction {
    /// U (dimensionless, E*/ħ).
    pub u: f64,
    /// ∫|Φ_L|⁴ d³r.
    pub quartic: f64,
    /// The neglected cross term ∫|Φ_L|²|Φ_R|² d³r (reported, not in U).
    pub cross_quartic: f64,
}

pub fn onsite_interaction(
    basis: &BasisSet,
    tables: &AngularTables,
    phi_l: &[f64],
    phi_r: &[f64],
    a_aa_rstar: f64,
) -> Result<OnsiteInteraction> {
    if !(a_aa_rstar > 0.0) {
        return Err(Error::domain(format!(
            "atom-atom scattering length must be positive, got {a_aa_rstar}"
        )));
    }
    let quartic = quartic_integral(basis, tables, phi_l)?;
    let cross = cross_quartic_integral(basis, tables, phi_l, phi_r)?;
    let kappa = 1.0 / basis.params.ma_over_mu;
    let u = 8.0 * std::f64::consts::PI * a_aa_rstar * kappa * quartic;
    Ok(OnsiteInteraction { u, quartic, cross_quartic: cross })
}

/// Leakage ε = ∫_{z>0} |Φ_L|² d³r of a left-localized mode.
pub fn leakage(basis: &BasisSet, tables: &AngularTables, phi_l: &[f64]) -> Result<f64> {
    let eps = right_half_probability(basis, tables, phi_l)?;
    if !(-1e-9..=0.5 + 1e-9).contains(&eps) {
        return Err(Error::numerical(format!(
            "leakage {eps} outside [0, 1/2]; mode is not left-localized"
        )));
    }
    Ok(eps.clamp(0.0, 0.5))
}

/// One row of the coupling-vs-phase table (Fig. 3 of the study this
/// reproduces): everything the two-mode model needs at one short-range phase.
#[derive(Debug, Clone)]
pub struct CouplingPoint {
    pub phi: f64,
    pub a_ia: f64,
    /// J, dimensionless E*/ħ.
    pub coupling: f64,
    /// U, dimensionless E*/ħ (at the configured a_aa).
    pub onsite: f64,
    pub epsilon: f64,
    pub gap_ratio: f64,
    pub cross_quartic: f64,
    pub flagged: bool,
}

/// Solve the full pipeline at one (φ, q) point: basis → moments → doublet →
/// (J, U, ε). The basis is rebuilt per φ, as the boundary condition changes.
pub fn coupling_at(
    params: &crate::radial::BasisParams,
    q: f64,
    a_aa_rstar: f64,
) -> Result<(CouplingPoint, DoubleWellResult, DoubleWellSolver)> {
    let basis = crate::radial::build_basis(params)?;
    let solver = DoubleWellSolver::new(basis)?;
    let result = solver.solve_at(q)?;
    let onsite = onsite_interaction(
        solver.basis(),
        solver.tables(),
        &result.phi_l,
        &result.phi_r,
        a_aa_rstar,
    )?;
    let eps = leakage(solver.basis(), solver.tables(), &result.phi_l)?;
    let phi = params.interaction.phi();
    let point = CouplingPoint {
        phi,
        a_ia: scattering_length_from_phase(phi),
        coupling: result.coupling,
        onsite: onsite.u,
        epsilon: eps,
        gap_ratio: result.gap_ratio,
        cross_quartic: onsite.cross_quartic,
        flagged: result.flagged,
    };
    Ok((point, result, solver))
}

/// Per-ion-qubit-state couplings: Ĵ = J_↓|↓⟩⟨↓| + J_↑|↑⟩⟨↑| and likewise Û.
#[derive(Debug, Clone, Copy)]
pub struct SpinCoupling {
    pub j_up: f64,
    pub j_down: f64,
    pub u_up: f64,
    pub u_down: f64,
}

impl SpinCoupling {
    pub fn from_points(up: &CouplingPoint, down: &CouplingPoint) -> Result<Self> {
        let s = SpinCoupling {
            j_up: up.coupling,
            j_down: down.coupling,
            u_up: up.onsite,
            u_down: down.onsite,
        };
        for v in [s.j_up, s.j_down, s.u_up, s.u_down] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::numerical(format!("unphysical spin coupling {v}")));
            }
        }
        Ok(s)
    }
}
