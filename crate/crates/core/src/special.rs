//! Gauss–Legendre rules, associated Legendre functions and factorials.

use std::f64::consts::PI;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[−1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "quadrature needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi's initial guess, then Newton on P_n.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Associated Legendre function `P_{l,m}(x)` without the Condon–Shortley phase:
/// `P_{l,m}(x) = (1 − x²)^{m/2} dᵐ/dxᵐ P_l(x)`, for `0 ≤ m ≤ l`.
pub fn assoc_legendre(l: usize, m: usize, x: f64) -> f64 {
    if m > l {
        return 0.0;
    }
    let somx2 = ((1.0 - x) * (1.0 + x)).max(0.0).sqrt();
    // P_m^m = (2m − 1)!! (1 − x²)^{m/2}
    let mut pmm = 1.0;
    let mut fact = 1.0;
    for _ in 0..m {
        pmm *= fact * somx2;
        fact += 2.0;
    }
    if l == m {
        return pmm;
    }
    let mut pmmp1 = x * (2 * m + 1) as f64 * pmm;
    if l == m + 1 {
        return pmmp1;
    }
    let mut pll = 0.0;
    for ll in (m + 2)..=l {
        pll = ((2 * ll - 1) as f64 * x * pmmp1 - (ll + m - 1) as f64 * pmm) / (ll - m) as f64;
        pmm = pmmp1;
        pmmp1 = pll;
    }
    pll
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(6);
        // Exact up to degree 11.
        let integral: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(10)).sum();
        assert!((integral - 2.0 / 11.0).abs() < 1e-14);
        let total: f64 = w.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
    }

    #[test]
    fn low_degree_legendre_closed_forms() {
        for &x in &[-0.7, 0.0, 0.3, 0.95] {
            let s2 = 1.0 - x * x;
            assert!((assoc_legendre(2, 0, x) - 0.5 * (3.0 * x * x - 1.0)).abs() < 1e-15);
            assert!((assoc_legendre(2, 2, x) - 3.0 * s2).abs() < 1e-14);
            assert!((assoc_legendre(4, 4, x) - 105.0 * s2 * s2).abs() < 1e-12);
            assert!((assoc_legendre(4, 2, x) - 7.5 * (7.0 * x * x - 1.0) * s2).abs() < 1e-12);
        }
    }

    #[test]
    fn legendre_at_zero_matches_factorial_identity() {
        // P_{2l,2m}(0) = (−1)^{l−m} (2l+2m)! / (4^l (l−m)! (l+m)!)
        for l in 0..5usize {
            for m in 0..=l {
                let sign = if (l - m) % 2 == 0 { 1.0 } else { -1.0 };
                let expect = sign * factorial(2 * l + 2 * m)
                    / (4f64.powi(l as i32) * factorial(l - m) * factorial(l + m));
                let got = assoc_legendre(2 * l, 2 * m, 0.0);
                assert!((got - expect).abs() < 1e-9 * expect.abs().max(1.0));
            }
        }
    }
}
