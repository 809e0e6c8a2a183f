//! The Fourier sine trial basis on `[a, b]` and the fractional norms built
//! on its spectrum.
//!
//! Basis functions are L2(dx)-orthonormal,
//! `qhat_k(x) = sqrt(2/(b-a)) sin(k pi (x-a)/(b-a))`, eigenfunctions of the
//! Dirichlet Laplacian with eigenvalues `mu_k = k^2 pi^2 / (b-a)^2`. The
//! `tau`-norm of a coefficient vector is
//! `sqrt(sum_k mu_k^(2 tau) c_k^2)`, the diagonal surrogate for the
//! fractional operator norms measured in this crate.

use crate::quadrature::PanelScheme;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SineBasis {
    a: f64,
    b: f64,
    k_max: usize,
}

impl SineBasis {
    pub fn new(a: f64, b: f64, k_max: usize) -> Self {
        assert!(b > a, "interval must satisfy b > a");
        assert!(k_max >= 1);
        SineBasis { a, b, k_max }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    /// `mu_k = k^2 pi^2 / (b-a)^2`, strictly increasing in `k`.
    pub fn mu(&self, k: usize) -> f64 {
        assert!(k >= 1);
        let len = self.b - self.a;
        (k as f64 * PI / len).powi(2)
    }

    /// `qhat_k`, `qhat_k'`, or `qhat_k''` at `x` (closed-form derivatives).
    pub fn eval(&self, k: usize, x: f64, derivative_order: usize) -> f64 {
        assert!(k >= 1);
        let len = self.b - self.a;
        let omega = k as f64 * PI / len;
        let arg = omega * (x - self.a);
        let scale = (2.0 / len).sqrt();
        match derivative_order {
            0 => scale * arg.sin(),
            1 => scale * omega * arg.cos(),
            2 => -scale * omega * omega * arg.sin(),
            d => panic!("derivative order {d} not supported"),
        }
    }
}

/// Coefficients `c_k`, `k = 1..=len`, in the orthonormal sine basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoeffVector(pub Vec<f64>);

impl CoeffVector {
    pub fn zeros(len: usize) -> Self {
        CoeffVector(vec![0.0; len])
    }

    /// Unit vector `e_k` (1-based mode index).
    pub fn unit(len: usize, k: usize) -> Self {
        assert!((1..=len).contains(&k));
        let mut c = vec![0.0; len];
        c[k - 1] = 1.0;
        CoeffVector(c)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Coefficient of mode `k` (1-based); zero beyond the stored length.
    pub fn get(&self, k: usize) -> f64 {
        assert!(k >= 1);
        self.0.get(k - 1).copied().unwrap_or(0.0)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Zero-pad (or truncate) to length `len`.
    pub fn resized(&self, len: usize) -> CoeffVector {
        let mut c = self.0.clone();
        c.resize(len, 0.0);
        CoeffVector(c)
    }

    /// Difference `self - other`, padded to the longer length.
    pub fn sub(&self, other: &CoeffVector) -> CoeffVector {
        let len = self.len().max(other.len());
        let mut out = vec![0.0; len];
        for (k, slot) in out.iter_mut().enumerate() {
            *slot = self.get(k + 1) - other.get(k + 1);
        }
        CoeffVector(out)
    }

    pub fn dot(&self, other: &CoeffVector) -> f64 {
        let len = self.len().min(other.len());
        (0..len).map(|i| self.0[i] * other.0[i]).sum()
    }
}

/// Sine coefficients of `f` by quadrature: `c_k = int_a^b f qhat_k dx` for
/// `k = 1..=basis.k_max()`. The integrand of mode `k` oscillates `k/2`
/// periods over the interval, so the scheme's panels must resolve
/// `basis.k_max()`.
pub fn sine_coeffs(f: impl Fn(f64) -> f64, basis: &SineBasis, scheme: &PanelScheme) -> CoeffVector {
    let nodes = scheme.nodes_weights(basis.a, basis.b);
    let fw: Vec<f64> = nodes.iter().map(|&(x, w)| w * f(x)).collect();
    let mut coeffs = Vec::with_capacity(basis.k_max);
    for k in 1..=basis.k_max {
        let mut acc = 0.0;
        for (&(x, _), &fwx) in nodes.iter().zip(&fw) {
            acc += fwx * basis.eval(k, x, 0);
        }
        coeffs.push(acc);
    }
    CoeffVector(coeffs)
}

/// Fractional norm `sqrt(sum_k mu_k^(2 tau) c_k^2)` for `tau` in
/// `[-1/2, 2]`. Powers go through exp/ln; `mu_k > 0` always.
pub fn m_norm(c: &CoeffVector, basis: &SineBasis, tau: f64) -> f64 {
    assert!(
        (-0.5..=2.0).contains(&tau),
        "tau = {tau} outside the supported range [-1/2, 2]"
    );
    let mut sum = 0.0;
    for (i, &ck) in c.0.iter().enumerate() {
        let mu = basis.mu(i + 1);
        sum += (2.0 * tau * mu.ln()).exp() * ck * ck;
    }
    sum.sqrt()
}

/// Pointwise synthesis `sum_k c_k qhat_k^(d)(x)` for `d` in `{0, 1}`.
pub fn synth(c: &CoeffVector, basis: &SineBasis, x: f64, derivative_order: usize) -> f64 {
    assert!(derivative_order <= 1, "synthesis supports orders 0 and 1");
    let mut acc = 0.0;
    for (i, &ck) in c.0.iter().enumerate() {
        if ck != 0.0 {
            acc += ck * basis.eval(i + 1, x, derivative_order);
        }
    }
    acc
}
