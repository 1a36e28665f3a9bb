// Variants of the 1D no-ion splitting to identify the paper's convention.
fn main() {
    let kappa: f64 = 171.0 / 258.0;
    let alpha = 10.0;
    let estar = 933.996;

    let solve_pair = |q: f64, kin: f64, vscale: f64| -> f64 {
        // u'' = [ vscale*alpha*(z^2-q^2)^2/(4q^2) - E ] u / kin
        let w = move |z: f64, e: f64| (vscale * alpha * (z * z - q * q).powi(2) / (4.0 * q * q) - e) / kin;
        let shoot = |e: f64, even: bool| -> usize {
            let z_max = q + 4.0;
            let n = 60000usize;
            let h = z_max / n as f64;
            let h2 = h * h;
            let (mut um, mut u) = if even {
                (1.0, 1.0 + 0.5 * w(0.0, e) * h2)
            } else {
                (0.0, h + w(0.0, e) * h * h2 / 6.0)
            };
            let mut nodes = 0usize;
            for i in 1..n {
                let zm = (i - 1) as f64 * h;
                let z0 = i as f64 * h;
                let zp = (i + 1) as f64 * h;
                let up = (2.0 * (1.0 + 5.0 * h2 * w(z0, e) / 12.0) * u
                    - (1.0 - h2 * w(zm, e) / 12.0) * um)
                    / (1.0 - h2 * w(zp, e) / 12.0);
                if up != 0.0 && u != 0.0 && up * u < 0.0 { nodes += 1; }
                um = u; u = up;
                let s = u.abs().max(um.abs());
                if s > 1e200 { u /= s; um /= s; }
            }
            nodes
        };
        let solve = |even: bool| -> f64 {
            let (mut lo, mut hi) = (0.0, 40.0);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if shoot(mid, even) == 0 { lo = mid; } else { hi = mid; }
            }
            0.5 * (lo + hi)
        };
        (solve(false) - solve(true)) / 2.0
    };

    // ours: kin = kappa, V = kappa*alpha*(...)
    println!("A ours q=2.06:        J = {:.4} Hz", solve_pair(2.06, kappa, kappa) * estar);
    // atom-mass kinetic with same V (mass confusion)
    println!("B kin=1:              J = {:.4} Hz", solve_pair(2.06, 1.0, kappa) * estar);
    // both scaled without kappa (pure atomic units everywhere)
    println!("C no kappa anywhere:  J = {:.4} Hz", solve_pair(2.06, 1.0, 1.0) * estar);
    // q scan with ours
    for q in [2.06, 2.10, 2.14, 2.16, 2.20, 2.30] {
        println!("   q={:.2}: J = {:.4} Hz", q, solve_pair(q, kappa, kappa) * estar);
    }
    // alpha slightly different (omega_q = exactly 3.9 kHz -> alpha = ?)
    // alpha = (omega/ (2 kappa sqrt(alpha)) ...) -- just scan alpha at q=2.06
    for a in [9.0, 9.5, 10.0, 10.5, 11.0, 12.0] {
        let s = move |q: f64, kin: f64, vs: f64| -> f64 {
            let alpha = a;
            let w = move |z: f64, e: f64| (vs * alpha * (z * z - q * q).powi(2) / (4.0 * q * q) - e) / kin;
            let shoot = |e: f64, even: bool| -> usize {
                let z_max = q + 4.0; let n = 60000usize; let h = z_max / n as f64; let h2 = h * h;
                let (mut um, mut u) = if even { (1.0, 1.0 + 0.5 * w(0.0, e) * h2) } else { (0.0, h + w(0.0, e) * h * h2 / 6.0) };
                let mut nodes = 0usize;
                for i in 1..n {
                    let zm = (i - 1) as f64 * h; let z0 = i as f64 * h; let zp = (i + 1) as f64 * h;
                    let up = (2.0 * (1.0 + 5.0 * h2 * w(z0, e) / 12.0) * u - (1.0 - h2 * w(zm, e) / 12.0) * um) / (1.0 - h2 * w(zp, e) / 12.0);
                    if up != 0.0 && u != 0.0 && up * u < 0.0 { nodes += 1; }
                    um = u; u = up;
                    let sc = u.abs().max(um.abs()); if sc > 1e200 { u /= sc; um /= sc; }
                }
                nodes
            };
            let solve = |even: bool| -> f64 {
                let (mut lo, mut hi) = (0.0, 40.0);
                for _ in 0..80 { let mid = 0.5 * (lo + hi); if shoot(mid, even) == 0 { lo = mid; } else { hi = mid; } }
                0.5 * (lo + hi)
            };
            (solve(false) - solve(true)) / 2.0
        };
        println!("   alpha={:.1}: J = {:.4} Hz", a, s(2.06, kappa, kappa) * estar);
    }
}
