//! Special functions: spherical Bessel functions, Legendre polynomials and
//! Gauss-Legendre quadrature rules.
//!
//! Spherical Bessel functions are evaluated by recurrence: upward for y_l
//! (always stable) and downward with Miller normalization for j_l (upward is
//! unstable once l exceeds the argument, which happens routinely here because
//! the quantum-defect boundary condition evaluates j_l(ξ) with ξ = √(m_a/μ)/r
//! near the inner grid edge for every partial wave).

/// j_0 .. j_lmax at `x` by downward recurrence with Miller normalization.
pub fn spherical_j_upto(l_max: u32, x: f64) -> Vec<f64> {
    let n = l_max as usize;
    if x == 0.0 {
        let mut out = vec![0.0; n + 1];
        out[0] = 1.0;
        return out;
    }
    if n == 0 {
        return vec![x.sin() / x];
    }
    // Start high enough above both l_max and |x| that the downward ratios
    // have converged to the minimal solution by the time they reach l_max.
    let start = n + 16 + (1.5 * x.abs()) as usize;
    let mut p_up = 0.0_f64;
    let mut p = 1e-280_f64;
    let mut vals = vec![0.0; n + 1];
    for k in (0..=start).rev() {
        let p_down = (2 * k + 3) as f64 / x * p - p_up;
        p_up = p;
        p = p_down;
        if k <= n {
            vals[k] = p;
        }
        if p.abs() > 1e260 {
            let scale = 1.0 / p.abs();
            p *= scale;
            p_up *= scale;
            for v in vals.iter_mut() {
                *v *= scale;
            }
        }
    }
    // Normalize against whichever closed form is safely away from a zero.
    let j0 = x.sin() / x;
    let j1 = x.sin() / (x * x) - x.cos() / x;
    let scale = if j0.abs() > j1.abs() {
        j0 / vals[0]
    } else {
        j1 / vals[1.min(n)]
    };
    for v in vals.iter_mut() {
        *v *= scale;
    }
    vals
}

/// y_0 .. y_lmax at `x > 0` by upward recurrence.
pub fn spherical_y_upto(l_max: u32, x: f64) -> Vec<f64> {
    let n = l_max as usize;
    let mut vals = vec![0.0; n + 1];
    let y0 = -x.cos() / x;
    vals[0] = y0;
    if n == 0 {
        return vals;
    }
    let y1 = -x.cos() / (x * x) - x.sin() / x;
    vals[1] = y1;
    for k in 1..n {
        vals[k + 1] = (2 * k + 1) as f64 / x * vals[k] - vals[k - 1];
    }
    vals
}

/// (j_l(x), y_l(x)).
pub fn spherical_jy(l: u32, x: f64) -> (f64, f64) {
    let j = spherical_j_upto(l, x);
    let y = spherical_y_upto(l, x);
    (j[l as usize], y[l as usize])
}

/// Derivatives (j_l'(x), y_l'(x)) from z_l' = z_{l-1} − (l+1)/x · z_l.
pub fn spherical_jy_deriv(l: u32, x: f64) -> (f64, f64) {
    let j = spherical_j_upto(l.max(1), x);
    let y = spherical_y_upto(l.max(1), x);
    if l == 0 {
        (-j[1], -y[1])
    } else {
        let li = l as usize;
        let f = (l + 1) as f64 / x;
        (j[li - 1] - f * j[li], y[li - 1] - f * y[li])
    }
}

/// P_0(x) .. P_lmax(x) by the three-term recurrence.
pub fn legendre_upto(l_max: u32, x: f64) -> Vec<f64> {
    let n = l_max as usize;
    let mut p = vec![0.0; n + 1];
    p[0] = 1.0;
    if n == 0 {
        return p;
    }
    p[1] = x;
    for k in 1..n {
        let kf = k as f64;
        p[k + 1] = ((2.0 * kf + 1.0) * x * p[k] - kf * p[k - 1]) / (kf + 1.0);
    }
    p
}

/// A 1-D quadrature rule: Σ w_i f(x_i).
#[derive(Debug, Clone)]
pub struct Quadrature {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Quadrature {
    /// Gauss-Legendre rule with `n` points on [−1, 1]; exact for polynomials
    /// of degree ≤ 2n − 1. Nodes by Newton iteration from the Chebyshev guess.
    pub fn gauss_legendre(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let p = legendre_upto(n as u32, x);
                let pn = p[n];
                let dpn = n as f64 * (x * p[n] - p[n - 1]) / (x * x - 1.0);
                let dx = pn / dpn;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            let p = legendre_upto(n as u32, x);
            let dpn = n as f64 * (x * p[n] - p[n - 1]) / (x * x - 1.0);
            let w = 2.0 / ((1.0 - x * x) * dpn * dpn);
            nodes[i] = -x;
            weights[i] = w;
            nodes[n - 1 - i] = x;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Quadrature { nodes, weights }
    }

    /// The same rule mapped affinely to [a, b].
    pub fn mapped_to(&self, a: f64, b: f64) -> Self {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        Quadrature {
            nodes: self.nodes.iter().map(|&x| mid + half * x).collect(),
            weights: self.weights.iter().map(|&w| w * half).collect(),
        }
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn low_order_spherical_bessel_closed_forms() {
        for &x in &[0.3, 1.7, 12.0, 47.0, 123.0] {
            let j = spherical_j_upto(2, x);
            let y = spherical_y_upto(2, x);
            assert_relative_eq!(j[0], x.sin() / x, max_relative = 1e-12);
            assert_relative_eq!(j[1], x.sin() / (x * x) - x.cos() / x, max_relative = 1e-10, epsilon = 1e-14);
            assert_relative_eq!(
                j[2],
                (3.0 / (x * x * x) - 1.0 / x) * x.sin() - 3.0 / (x * x) * x.cos(),
                max_relative = 1e-10,
                epsilon = 1e-14
            );
            assert_relative_eq!(y[0], -x.cos() / x, max_relative = 1e-12, epsilon = 1e-300);
            assert_relative_eq!(y[1], -x.cos() / (x * x) - x.sin() / x, max_relative = 1e-10, epsilon = 1e-14);
        }
    }

    #[test]
    fn bessel_wronskian_identity() {
        // j_l(x) y_l'(x) − j_l'(x) y_l(x) = 1/x²
        for l in [0u32, 1, 5, 20, 48] {
            for &x in &[5.0, 25.0, 46.0, 80.0] {
                let (j, y) = spherical_jy(l, x);
                let (jp, yp) = spherical_jy_deriv(l, x);
                let w = j * yp - jp * y;
                assert_relative_eq!(w, 1.0 / (x * x), max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn bessel_recurrence_consistency() {
        // z_{l-1} + z_{l+1} = (2l+1)/x z_l for both kinds.
        for &x in &[30.0, 55.5] {
            let j = spherical_j_upto(50, x);
            let y = spherical_y_upto(50, x);
            for l in 1..50usize {
                let lhs = j[l - 1] + j[l + 1];
                let rhs = (2 * l + 1) as f64 / x * j[l];
                assert_relative_eq!(lhs, rhs, max_relative = 1e-8, epsilon = 1e-18);
                let lhs = y[l - 1] + y[l + 1];
                let rhs = (2 * l + 1) as f64 / x * y[l];
                assert_relative_eq!(lhs, rhs, max_relative = 1e-8, epsilon = 1e-18);
            }
        }
    }

    #[test]
    fn legendre_known_values() {
        let p = legendre_upto(5, 0.3);
        assert_relative_eq!(p[2], 0.5 * (3.0 * 0.09 - 1.0), max_relative = 1e-14);
        assert_relative_eq!(p[3], 0.5 * (5.0 * 0.027 - 3.0 * 0.3), max_relative = 1e-13);
        // P_l(1) = 1
        let p1 = legendre_upto(60, 1.0);
        for v in p1 {
            assert_relative_eq!(v, 1.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        let q = Quadrature::gauss_legendre(8);
        // ∫_{-1}^{1} x^k dx
        for k in 0..=15u32 {
            let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
            let got = q.integrate(|x| x.powi(k as i32));
            assert_relative_eq!(got, exact, max_relative = 1e-13, epsilon = 1e-14);
        }
        // legendre orthogonality through the rule
        let q = Quadrature::gauss_legendre(64);
        let got = q.integrate(|x| {
            let p = legendre_upto(10, x);
            p[7] * p[7]
        });
        assert_relative_eq!(got, 2.0 / 15.0, max_relative = 1e-12);
        let got = q.integrate(|x| {
            let p = legendre_upto(10, x);
            p[7] * p[5]
        });
        assert!(got.abs() < 1e-14);
    }

    #[test]
    fn mapped_rule_integrates_on_interval() {
        let q = Quadrature::gauss_legendre(16).mapped_to(0.0, 1.0);
        assert_relative_eq!(q.integrate(|x| x * x), 1.0 / 3.0, max_relative = 1e-13);
        assert_relative_eq!(q.integrate(f64::exp), std::f64::consts::E - 1.0, max_relative = 1e-13);
    }
}
