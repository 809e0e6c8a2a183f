//! Composite Gauss-Legendre quadrature.
//!
//! All matrix entries and bifurcation integrals in this crate go through
//! [`integrate`] or [`integrate_split`]; accuracy is certified by panel
//! doubling rather than adaptive subdivision, so costs are deterministic
//! and outputs reproducible.

use std::f64::consts::PI;

/// Nodes and weights of the `p`-point Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadRule {
    order: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadRule {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Build the `p`-point rule, `1 <= p <= 64`. Nodes are Legendre roots found
/// by Newton iteration from Chebyshev-angle initial guesses; the rule is
/// mirrored about zero so symmetry is exact.
pub fn gauss_legendre(p: usize) -> QuadRule {
    assert!((1..=64).contains(&p), "rule order must be in 1..=64");
    let mut nodes = vec![0.0; p];
    let mut weights = vec![0.0; p];
    let half = p.div_ceil(2);
    for i in 1..=half {
        // i-th root counted from +1 downwards
        let mut z = (PI * (i as f64 - 0.25) / (p as f64 + 0.5)).cos();
        let mut converged = false;
        for _ in 0..100 {
            let (pv, dv) = legendre_with_deriv(p, z);
            let dz = pv / dv;
            z -= dz;
            if dz.abs() <= 1e-15 {
                converged = true;
                break;
            }
        }
        assert!(
            converged,
            "Legendre root failed to converge at p={p}, i={i}"
        );
        if p % 2 == 1 && i == half {
            z = 0.0;
        }
        let (_, dv) = legendre_with_deriv(p, z);
        let w = 2.0 / ((1.0 - z * z) * dv * dv);
        nodes[p - i] = z;
        nodes[i - 1] = -z;
        weights[p - i] = w;
        weights[i - 1] = w;
    }
    QuadRule {
        order: p,
        nodes,
        weights,
    }
}

// P_p(x) and P_p'(x) by the three-term recurrence.
fn legendre_with_deriv(p: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if p == 0 {
        return (1.0, 0.0);
    }
    for k in 1..p {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    // valid for |x| < 1, which holds at every interior root
    let dp = p as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// A composite rule: `panels` equal panels, each carrying `rule`.
#[derive(Debug, Clone, PartialEq)]
pub struct PanelScheme {
    pub panels: usize,
    pub rule: QuadRule,
}

impl PanelScheme {
    pub fn new(points: usize, panels: usize) -> Self {
        assert!(panels >= 1, "need at least one panel");
        PanelScheme {
            panels,
            rule: gauss_legendre(points),
        }
    }

    /// Default used by assembly and bifurcation integrals: 16 points per
    /// panel and `max(64, 2 * n_max * (t + 1))` panels, which oversamples
    /// the fastest sine oscillation present in the degree-`4t+2` products
    /// of `n_max`-mode synthesis by at least 8 points per period.
    pub fn default_for(n_max: usize, t: u32) -> Self {
        PanelScheme::new(16, (2 * n_max * (t as usize + 1)).max(64))
    }

    /// Same rule with twice the panels, for doubling diagnostics.
    pub fn doubled(&self) -> Self {
        PanelScheme {
            panels: self.panels * 2,
            rule: self.rule.clone(),
        }
    }

    /// Visit the composite nodes of `[a, b]` left to right as `(x, weight)`.
    pub fn for_each_node(&self, a: f64, b: f64, mut visit: impl FnMut(f64, f64)) {
        let h = (b - a) / self.panels as f64;
        for i in 0..self.panels {
            let mid = a + (i as f64 + 0.5) * h;
            for (x, w) in self.rule.nodes.iter().zip(&self.rule.weights) {
                visit(mid + 0.5 * h * x, 0.5 * h * w);
            }
        }
    }

    /// Materialised composite nodes, in evaluation order.
    pub fn nodes_weights(&self, a: f64, b: f64) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(self.panels * self.rule.order);
        self.for_each_node(a, b, |x, w| out.push((x, w)));
        out
    }
}

/// Composite Gauss-Legendre integral of `f` over `[a, b]`. Summation is
/// deterministic left to right.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, scheme: &PanelScheme) -> f64 {
    assert!(b > a, "integrate requires b > a");
    let mut total = 0.0;
    scheme.for_each_node(a, b, |x, w| total += w * f(x));
    total
}

/// As [`integrate`], but the scheme is applied separately on each
/// subinterval delimited by `breakpoints` (strictly inside `(a, b)`,
/// sorted ascending). Used where integrands have interior kinks.
pub fn integrate_split<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    scheme: &PanelScheme,
) -> f64 {
    assert!(b > a, "integrate_split requires b > a");
    let mut lo = a;
    let mut total = 0.0;
    for &cut in breakpoints {
        assert!(
            cut > lo && cut < b,
            "breakpoints must be sorted inside (a, b)"
        );
        total += integrate(&mut f, lo, cut, scheme);
        lo = cut;
    }
    total += integrate(&mut f, lo, b, scheme);
    total
}
