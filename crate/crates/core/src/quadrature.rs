//! Gauss-Legendre rules and the radial integrator used against Laguerre
//! weights.

use num_complex::Complex64;

/// Nodes and weights of the `m`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(m > 0);
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for i in 0..(m + 1) / 2 {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(m, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(m, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[m - 1 - i] = x;
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(m: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=m {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let p = if m == 0 { 1.0 } else { p1 };
    let d = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p, d)
}

/// Composite Gauss-Legendre rule on `[a, b]` split into `panels` pieces.
#[derive(Clone, Debug)]
pub struct CompositeRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl CompositeRule {
    pub fn new(a: f64, b: f64, panels: usize, order: usize) -> Self {
        let (x, w) = gauss_legendre(order);
        let h = (b - a) / panels as f64;
        let mut nodes = Vec::with_capacity(panels * order);
        let mut weights = Vec::with_capacity(panels * order);
        for p in 0..panels {
            let lo = a + p as f64 * h;
            for (xi, wi) in x.iter().zip(&w) {
                nodes.push(lo + 0.5 * h * (xi + 1.0));
                weights.push(0.5 * h * wi);
            }
        }
        CompositeRule { nodes, weights }
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(*x)).sum()
    }
}

/// Radial integrals `int_0^inf g(r) r^{2 gamma - 1} dr` for Gaussian-decaying `g`.
///
/// Works in `u = r^2 / 2`, where the measure becomes `(2u)^{gamma-1} du`,
/// and truncates once the integrand stays below `1e-18` of its running peak.
#[derive(Clone, Debug)]
pub struct RadialRule {
    pub order: usize,
    pub panel_width: f64,
    pub max_u: f64,
}

impl Default for RadialRule {
    fn default() -> Self {
        RadialRule { order: 24, panel_width: 1.0, max_u: 4000.0 }
    }
}

impl RadialRule {
    pub fn integrate(&self, gamma: f64, g: impl Fn(f64) -> f64) -> f64 {
        self.integrate_c(gamma, |r| Complex64::new(g(r), 0.0)).re
    }

    pub fn integrate_c(&self, gamma: f64, g: impl Fn(f64) -> Complex64) -> Complex64 {
        let (x, w) = gauss_legendre(self.order);
        let h = self.panel_width;
        let mut total = Complex64::new(0.0, 0.0);
        let mut peak = 0.0f64;
        let mut quiet = 0;
        let mut lo = 0.0;
        while lo < self.max_u {
            let mut panel = Complex64::new(0.0, 0.0);
            let mut panel_max = 0.0f64;
            for (xi, wi) in x.iter().zip(&w) {
                let u = lo + 0.5 * h * (xi + 1.0);
                let r = (2.0 * u).sqrt();
                let v = g(r) * (2.0 * u).powf(gamma - 1.0);
                panel_max = panel_max.max(v.norm());
                panel += v * (0.5 * h * wi);
            }
            total += panel;
            peak = peak.max(panel_max);
            if panel_max <= 1e-18 * peak || (peak == 0.0 && lo > 64.0) {
                quiet += 1;
                if quiet >= 8 {
                    break;
                }
            } else {
                quiet = 0;
            }
            lo += h;
        }
        total
    }
}

/// Periodic trapezoid nodes `2 pi j / m` on the circle.
pub fn circle_nodes(m: usize) -> Vec<f64> {
    (0..m).map(|j| 2.0 * std::f64::consts::PI * j as f64 / m as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(10);
        let s: f64 = w.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
        // int x^18 = 2/19
        let v: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(18)).sum();
        assert!((v - 2.0 / 19.0).abs() < 1e-14);
    }

    #[test]
    fn radial_rule_gaussian_moments() {
        // int_0^inf e^{-r^2/2} r^{2g-1} dr = 2^{g-1} (g-1)!
        let rule = RadialRule::default();
        for g in 1..6 {
            let v = rule.integrate(g as f64, |r| (-r * r / 2.0).exp());
            let exact = 2f64.powi(g - 1) * (1..g).map(|i| i as f64).product::<f64>();
            assert!((v / exact - 1.0).abs() < 1e-13, "g={g}: {v} vs {exact}");
        }
    }
}
