use serde::{Deserialize, Serialize};

/// Gauss-Legendre nodes and weights on `[-1, 1]`, by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
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
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let n = n as f64;
    (p1, n * (x * p1 - p0) / (x * x - 1.0))
}

/// Composite Gauss-Legendre rule: `panels` equal sub-intervals with `order`
/// nodes each.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub panels: usize,
    pub order: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { panels: 4, order: 16 }
    }
}

impl QuadratureSpec {
    pub fn new(panels: usize, order: usize) -> Self {
        Self { panels, order }
    }

    pub fn len(&self) -> usize {
        self.panels * self.order
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Nodes and weights on `[lo, hi]`.
    pub fn rule(&self, lo: f64, hi: f64) -> Vec<(f64, f64)> {
        let (x, w) = gauss_legendre(self.order);
        let h = (hi - lo) / self.panels as f64;
        let mut out = Vec::with_capacity(self.len());
        for p in 0..self.panels {
            let a = lo + p as f64 * h;
            let mid = a + 0.5 * h;
            for (xi, wi) in x.iter().zip(&w) {
                out.push((mid + 0.5 * h * xi, 0.5 * h * wi));
            }
        }
        out
    }

    pub fn integrate(&self, lo: f64, hi: f64, f: impl Fn(f64) -> f64) -> f64 {
        self.rule(lo, hi).into_iter().map(|(x, w)| w * f(x)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_polynomials_up_to_degree_2n_minus_1() {
        for n in [1, 2, 5, 16] {
            let (x, w) = gauss_legendre(n);
            for deg in 0..(2 * n) {
                let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((got - exact).abs() < 1e-13, "n={n} deg={deg}: {got} vs {exact}");
            }
        }
    }

    #[test]
    fn composite_rule_integrates_smooth_function() {
        let q = QuadratureSpec::default();
        let got = q.integrate(0.0, std::f64::consts::PI, f64::sin);
        assert!((got - 2.0).abs() < 1e-14);
        assert_eq!(q.rule(0.0, 1.0).len(), 64);
    }
}
