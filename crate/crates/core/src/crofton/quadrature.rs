use std::f64::consts::{FRAC_PI_2, PI};

const NODES: usize = 64;

/// Gauss–Legendre nodes and weights on `[a, b]`.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    let (mid, half) = ((a + b) / 2.0, (b - a) / 2.0);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 0 { 1.0 } else { p1 };
            let pm = if n == 0 { 0.0 } else { p0 };
            dp = n as f64 * (x * p - pm) / (x * x - 1.0);
            let step = p / dp;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((mid + half * x, half * w));
    }
    out
}

fn integrate(a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
    gauss_legendre(NODES, a, b).into_iter().map(|(x, w)| w * f(x)).sum()
}

/// Average of `|r|_1` over the unit sphere in `R^d` by deterministic
/// quadrature. Equals `2d / beta_d`.
pub fn sphere_l1_average(d: usize) -> f64 {
    match d {
        0 => f64::NAN,
        1 => 1.0,
        // quarter circle, by symmetry
        2 => integrate(0.0, FRAC_PI_2, |t| t.cos() + t.sin()) / FRAC_PI_2,
        // octant in polar angle phi and azimuth theta
        3 => {
            let inner = |phi: f64| {
                integrate(0.0, FRAC_PI_2, |theta| {
                    (phi.sin() * (theta.cos() + theta.sin()) + phi.cos()) * phi.sin()
                })
            };
            integrate(0.0, FRAC_PI_2, inner) / FRAC_PI_2
        }
        // d E|r_1|, with r_1 = sin(t) having density proportional to cos^{d-2}(t)
        _ => {
            let p = d as i32 - 2;
            let num = integrate(0.0, FRAC_PI_2, |t| t.sin() * t.cos().powi(p));
            let den = integrate(0.0, FRAC_PI_2, |t| t.cos().powi(p));
            d as f64 * num / den
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_rule_is_exact_on_polynomials() {
        let rule = gauss_legendre(8, -1.0, 1.0);
        let wsum: f64 = rule.iter().map(|(_, w)| w).sum();
        assert!((wsum - 2.0).abs() < 1e-14);
        let m14: f64 = rule.iter().map(|(x, w)| w * x.powi(14)).sum();
        assert!((m14 - 2.0 / 15.0).abs() < 1e-14);
        let shifted: f64 = gauss_legendre(5, 0.0, 3.0).iter().map(|(x, w)| w * x * x).sum();
        assert!((shifted - 9.0).abs() < 1e-12);
    }

    #[test]
    fn known_averages() {
        assert_eq!(sphere_l1_average(1), 1.0);
        assert!((sphere_l1_average(2) - 4.0 / PI).abs() < 1e-12);
        assert!((sphere_l1_average(3) - 1.5).abs() < 1e-12);
        // d E|r_1| = d Gamma(d/2) / (sqrt(pi) Gamma((d+1)/2)); d = 4 gives 16 / (3 pi)
        assert!((sphere_l1_average(4) - 16.0 / (3.0 * PI)).abs() < 1e-12);
    }
}
