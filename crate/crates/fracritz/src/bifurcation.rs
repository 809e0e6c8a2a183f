//! Bifurcation coefficients of the rotating-string family
//! `-u'' = lambda rho(x) u (1 + eps (u')^(2t))^(1/(2t))`, expanded about an
//! eigenpair of the linearized problem:
//!
//! `u_eps = v0 + eps v1 + ...`, `lambda_eps = nu0 + eps nu1 + (eps^2/2) nu2 + ...`
//!
//! With `v0` the weighted-L2-normalized mode, solvability gives
//!
//! `nu1 = -(nu0 / 2t) <v0 (v0')^(2t), v0>`,
//!
//! negative for every admissible density, so the branch always bends
//! subcritically. `v1` is built from the spectral expansion in the
//! remaining Ritz vectors, and `nu2` follows from the next solvability
//! condition; `v2` itself is never needed for the coefficients computed
//! here.
//!
//! The module also carries the exact reference data of the Euler density
//! `rho = 1/x^2` on `[1, e]`: eigenvalues `k^2 pi^2 + 1/4`, eigenfunctions
//! `sqrt(2x) sin(k pi ln x)`, and closed forms for `nu1` at `t = 1, 2, 3`.

use crate::basis::{sine_coeffs, synth, CoeffVector, SineBasis};
use crate::expr::DensitySpec;
use crate::quadrature::{integrate, PanelScheme};
use crate::ritz::{Normalization, RitzSolution};
use std::f64::consts::{E, PI};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BifurcationSpec {
    /// Nonlinearity exponent `t >= 1`.
    pub t: u32,
    /// 1-based eigenpair index the branch emanates from.
    pub mode: usize,
    /// 1 computes `nu1`; 2 additionally computes `v1` and `nu2`.
    pub order: u8,
}

impl BifurcationSpec {
    pub fn new(t: u32, mode: usize, order: u8) -> Self {
        assert!(t >= 1, "nonlinearity exponent must be >= 1");
        assert!(mode >= 1);
        assert!(matches!(order, 1 | 2), "order must be 1 or 2");
        BifurcationSpec { t, mode, order }
    }
}

#[derive(Debug, Error)]
pub enum BifurcationError {
    #[error("solution must be H0-normalized before computing coefficients")]
    NotH0Normalized,
    #[error("second-order coefficients need the regular scheme's weighted-orthonormal modes")]
    NeedsRegularScheme,
    #[error("near-degenerate gap at mode {mode}: Lambda_{j} - Lambda_{mode} = {gap:.3e}")]
    DegenerateGap { mode: usize, j: usize, gap: f64 },
    #[error("mode {mode} out of range for dimension {n}")]
    ModeOutOfRange { mode: usize, n: usize },
}

/// Panel-doubling deltas of the coefficient quadratures. A delta above
/// `1e-8 |value|` marks the quadrature unconverged; recorded, never fatal.
#[derive(Debug, Clone, Copy)]
pub struct QuadDiag {
    pub nu1_delta: f64,
    pub nu2_delta: Option<f64>,
    pub converged: bool,
}

#[derive(Debug, Clone)]
pub struct BifurcationResult {
    /// `nu0`: the Ritz value of the selected mode.
    pub nu0: f64,
    pub nu1: f64,
    pub nu2: Option<f64>,
    /// Sine coefficients of the first eigenfunction correction `v1`.
    pub v1: CoeffVector,
    /// `<v1, v0>` in the weighted inner product; zero by construction.
    pub orth_check: f64,
    pub quad_diag: QuadDiag,
}

fn assert_h0(sol: &RitzSolution) -> Result<(), BifurcationError> {
    if sol.normalization != Normalization::H0 {
        return Err(BifurcationError::NotH0Normalized);
    }
    Ok(())
}

/// First-order coefficient
/// `nu1 = -(Lambda_mode / 2t) int rho u^2 (u')^(2t) dx`
/// with `u` the H0-normalized Ritz vector of the selected mode.
pub fn nu1(
    sol: &RitzSolution,
    density: &DensitySpec,
    spec: &BifurcationSpec,
    basis: &SineBasis,
    scheme: &PanelScheme,
) -> Result<f64, BifurcationError> {
    assert_h0(sol)?;
    if spec.mode > sol.n {
        return Err(BifurcationError::ModeOutOfRange {
            mode: spec.mode,
            n: sol.n,
        });
    }
    let c = sol.column(spec.mode - 1);
    Ok(nu1_from_coeffs(
        sol.values[spec.mode - 1],
        &c,
        density,
        spec.t,
        basis,
        scheme,
    ))
}

/// The same integral for an explicitly given H0-normalized mode; used with
/// exact eigenfunction coefficients in the reference checks.
pub fn nu1_from_coeffs(
    nu0: f64,
    mode_coeffs: &CoeffVector,
    density: &DensitySpec,
    t: u32,
    basis: &SineBasis,
    scheme: &PanelScheme,
) -> f64 {
    let power = 2 * t as i32;
    let integral = integrate(
        |x| {
            let u = synth(mode_coeffs, basis, x, 0);
            let du = synth(mode_coeffs, basis, x, 1);
            density.eval(x) * u * u * du.powi(power)
        },
        basis.a(),
        basis.b(),
        scheme,
    );
    -nu0 / (2.0 * t as f64) * integral
}

/// Sine coefficients of the first correction
/// `v1 = (Lambda_m / 2t) sum_{j != m} <u_m (u_m')^(2t), u_j> / (Lambda_j - Lambda_m) u_j`.
/// Requires the full regular-scheme solution (its H0-normalized columns are
/// weighted-orthonormal, which the expansion presumes) and a simple gap at
/// the selected mode.
pub fn v1_coeffs(
    sol: &RitzSolution,
    density: &DensitySpec,
    spec: &BifurcationSpec,
    basis: &SineBasis,
    scheme: &PanelScheme,
) -> Result<CoeffVector, BifurcationError> {
    assert_h0(sol)?;
    if sol.scheme != crate::ritz::TauScheme::Regular {
        return Err(BifurcationError::NeedsRegularScheme);
    }
    let n = sol.n;
    let m = spec.mode;
    if m > n || n < 2 {
        return Err(BifurcationError::ModeOutOfRange { mode: m, n });
    }
    let lambda_m = sol.values[m - 1];
    for (j, &lj) in sol.values.iter().enumerate() {
        if j + 1 != m {
            let gap = (lj - lambda_m).abs();
            if gap <= 1e-8 * lambda_m.abs() {
                return Err(BifurcationError::DegenerateGap {
                    mode: m,
                    j: j + 1,
                    gap,
                });
            }
        }
    }

    let cm = sol.column(m - 1);
    let nodes = scheme.nodes_weights(basis.a(), basis.b());
    let power = 2 * spec.t as i32;
    // w * rho * u_m (u_m')^(2t) at each node
    let fw: Vec<f64> = nodes
        .iter()
        .map(|&(x, w)| {
            let u = synth(&cm, basis, x, 0);
            let du = synth(&cm, basis, x, 1);
            w * density.eval(x) * u * du.powi(power)
        })
        .collect();

    let scale = lambda_m / (2.0 * spec.t as f64);
    let mut v1 = vec![0.0; n];
    for j in 0..n {
        if j + 1 == m {
            continue;
        }
        let cj = &sol.vectors[j];
        let mut proj = 0.0;
        for (q, &(x, _)) in nodes.iter().enumerate() {
            let uj = cj
                .iter()
                .enumerate()
                .map(|(i, &c)| c * basis.eval(i + 1, x, 0))
                .sum::<f64>();
            proj += fw[q] * uj;
        }
        let coef = scale * proj / (sol.values[j] - lambda_m);
        for (slot, &c) in v1.iter_mut().zip(cj) {
            *slot += coef * c;
        }
    }
    Ok(CoeffVector(v1))
}

/// Second-order coefficient from `v0`, `v1`, and `nu1` (all inner products
/// weighted by `rho`, derivatives by synthesis):
///
/// `nu2 = -2 nu1 <v1, v0> - (nu1/t) <v0 (v0')^(2t), v0>
///        - (nu0/t) <v1 (v0')^(2t), v0> - 2 nu0 <v0 v1' (v0')^(2t-1), v0>
///        - nu0 (1-2t)/(4t^2) <v0 (v0')^(4t), v0>`.
pub fn nu2(
    sol: &RitzSolution,
    v1: &CoeffVector,
    nu1_value: f64,
    density: &DensitySpec,
    spec: &BifurcationSpec,
    basis: &SineBasis,
    scheme: &PanelScheme,
) -> Result<f64, BifurcationError> {
    assert_h0(sol)?;
    if spec.mode > sol.n {
        return Err(BifurcationError::ModeOutOfRange {
            mode: spec.mode,
            n: sol.n,
        });
    }
    let v0 = sol.column(spec.mode - 1);
    Ok(nu2_from_parts(
        sol.values[spec.mode - 1],
        nu1_value,
        &v0,
        v1,
        density,
        spec.t,
        basis,
        scheme,
    ))
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn nu2_from_parts(
    nu0: f64,
    nu1_value: f64,
    v0: &CoeffVector,
    v1: &CoeffVector,
    density: &DensitySpec,
    t: u32,
    basis: &SineBasis,
    scheme: &PanelScheme,
) -> f64 {
    let tf = t as f64;
    let p2t = 2 * t as i32;
    let weighted = |f: &dyn Fn(f64) -> f64| {
        integrate(|x| density.eval(x) * f(x), basis.a(), basis.b(), scheme)
    };
    let term1 = -2.0 * nu1_value * weighted(&|x| synth(v1, basis, x, 0) * synth(v0, basis, x, 0));
    let term2 = -nu1_value / tf
        * weighted(&|x| {
            let u = synth(v0, basis, x, 0);
            u * synth(v0, basis, x, 1).powi(p2t) * u
        });
    let term3 = -nu0 / tf
        * weighted(&|x| {
            synth(v1, basis, x, 0) * synth(v0, basis, x, 1).powi(p2t) * synth(v0, basis, x, 0)
        });
    let term4 = -2.0
        * nu0
        * weighted(&|x| {
            let u = synth(v0, basis, x, 0);
            u * synth(v1, basis, x, 1) * synth(v0, basis, x, 1).powi(p2t - 1) * u
        });
    let term5 = -nu0 * (1.0 - 2.0 * tf) / (4.0 * tf * tf)
        * weighted(&|x| {
            let u = synth(v0, basis, x, 0);
            u * synth(v0, basis, x, 1).powi(2 * p2t) * u
        });
    term1 + term2 + term3 + term4 + term5
}

/// Run the whole pipeline on an H0-normalized solution: `nu1`, and for
/// `order == 2` also `v1` and `nu2`, with panel-doubling diagnostics.
pub fn bifurcate(
    sol: &RitzSolution,
    density: &DensitySpec,
    spec: &BifurcationSpec,
    basis: &SineBasis,
    scheme: &PanelScheme,
) -> Result<BifurcationResult, BifurcationError> {
    let nu0 = sol.values[spec.mode - 1];
    let nu1_value = nu1(sol, density, spec, basis, scheme)?;
    let doubled = scheme.doubled();
    let nu1_fine = nu1(sol, density, spec, basis, &doubled)?;
    let nu1_delta = (nu1_fine - nu1_value).abs();

    let (v1, nu2_value, nu2_delta, orth_check) = if spec.order == 2 {
        let v1 = v1_coeffs(sol, density, spec, basis, scheme)?;
        let nu2_value = nu2(sol, &v1, nu1_value, density, spec, basis, scheme)?;
        let nu2_fine = nu2(sol, &v1, nu1_value, density, spec, basis, &doubled)?;
        let v0 = sol.column(spec.mode - 1);
        let orth = integrate(
            |x| density.eval(x) * synth(&v1, basis, x, 0) * synth(&v0, basis, x, 0),
            basis.a(),
            basis.b(),
            scheme,
        );
        (
            v1,
            Some(nu2_value),
            Some((nu2_fine - nu2_value).abs()),
            orth,
        )
    } else {
        (CoeffVector::zeros(sol.n), None, None, 0.0)
    };

    let converged = nu1_delta <= 1e-8 * nu1_value.abs()
        && nu2_delta
            .map(|d| d <= 1e-8 * nu2_value.unwrap().abs().max(1.0))
            .unwrap_or(true);
    Ok(BifurcationResult {
        nu0,
        nu1: nu1_value,
        nu2: nu2_value,
        v1,
        orth_check,
        quad_diag: QuadDiag {
            nu1_delta,
            nu2_delta,
            converged,
        },
    })
}

/// Truncated series at `eps`: `lambda_eps = nu0 + eps nu1 (+ eps^2 nu2 / 2)`
/// and `u_eps(x) = v0(x) + eps v1(x)`. The second-order displacement term
/// `eps^2 v2 / 2` is not computed and therefore not included.
pub fn eval_series(
    result: &BifurcationResult,
    v0: &CoeffVector,
    basis: &SineBasis,
    eps: f64,
    x: f64,
) -> (f64, f64) {
    assert!(eps >= 0.0, "series parameter must be nonnegative");
    let mut lambda = result.nu0 + eps * result.nu1;
    if let Some(nu2_value) = result.nu2 {
        lambda += 0.5 * eps * eps * nu2_value;
    }
    let u = synth(v0, basis, x, 0) + eps * synth(&result.v1, basis, x, 0);
    (lambda, u)
}

/// Exact eigenvalue of the Euler problem: `lambda_k = k^2 pi^2 + 1/4`.
pub fn euler_lambda(k: usize) -> f64 {
    (k as f64 * PI).powi(2) + 0.25
}

/// Exact H0-normalized eigenfunction `u_k(x) = sqrt(2x) sin(k pi ln x)`
/// of `-u'' = lambda x^-2 u` on `[1, e]`.
pub fn euler_eigenfunction(k: usize, x: f64) -> f64 {
    (2.0 * x).sqrt() * (k as f64 * PI * x.ln()).sin()
}

/// Its derivative, `sqrt(2/x) (sin(k pi ln x)/2 + k pi cos(k pi ln x))`.
pub fn euler_eigenfunction_deriv(k: usize, x: f64) -> f64 {
    let arg = k as f64 * PI * x.ln();
    (2.0 / x).sqrt() * (0.5 * arg.sin() + k as f64 * PI * arg.cos())
}

/// Exact eigenpair data of the Euler density with sine coefficients
/// resolved through `k_ref` modes.
#[derive(Debug, Clone)]
pub struct EulerReference {
    pub basis: SineBasis,
    pub k_ref: usize,
}

impl EulerReference {
    /// `k_ref` controls both the coefficient length and the quadrature
    /// resolution used to compute the coefficients.
    pub fn new(k_ref: usize) -> Self {
        EulerReference {
            basis: SineBasis::new(1.0, E, k_ref),
            k_ref,
        }
    }

    pub fn lambda(&self, k: usize) -> f64 {
        euler_lambda(k)
    }

    /// `(lambda_k, coefficients of u_k)`; the quadrature resolves the
    /// fastest retained mode with at least 16 points per period.
    pub fn exact(&self, k: usize) -> (f64, CoeffVector) {
        let scheme = PanelScheme::new(16, self.k_ref.max(64));
        let coeffs = sine_coeffs(|x| euler_eigenfunction(k, x), &self.basis, &scheme);
        (euler_lambda(k), coeffs)
    }
}

/// Closed-form `nu1` of the Euler problem for `t` in `{1, 2, 3}`.
pub fn euler_nu1_exact(t: u32) -> f64 {
    let pi2 = PI * PI;
    let pi4 = pi2 * pi2;
    let pi6 = pi4 * pi2;
    let pi8 = pi4 * pi4;
    let lam1 = pi2 + 0.25;
    match t {
        1 => {
            -4.0 * (E - 1.0) * pi4 * lam1 * (7.0 + 4.0 * pi2)
                / (E * (1.0 + 20.0 * pi2 + 64.0 * pi4))
        }
        2 => {
            -(E * E - 1.0) * pi6 * lam1 * (437.0 + 824.0 * pi2 + 144.0 * pi4)
                / (64.0 * E * E * (1.0 + 14.0 * pi2 + 49.0 * pi4 + 36.0 * pi6))
        }
        3 => {
            let e3 = E * E * E;
            -16.0 * (e3 - 1.0) * pi8 * lam1 * (1709.0 + 5540.0 * pi2 + 3856.0 * pi4 + 320.0 * pi6)
                / (9.0
                    * e3
                    * (729.0 + 9720.0 * pi2 + 39312.0 * pi4 + 52480.0 * pi6 + 16384.0 * pi8))
        }
        other => panic!("closed-form nu1 is tabulated for t in 1..=3, got {other}"),
    }
}
