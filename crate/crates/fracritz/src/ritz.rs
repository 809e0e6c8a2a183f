//! The three fractional Rayleigh-quotient schemes and the machinery around
//! their solutions: normalization, sign alignment, fractional-norm
//! eigenvector errors, an a-posteriori eigenvalue bound, and the tail-ratio
//! quantity controlling rate transfer to higher norms.
//!
//! Scheme-to-pencil map (left matrix, right matrix):
//!
//! | scheme   | tau | pencil     |
//! |----------|-----|------------|
//! | Dual     | 0   | (S0, T0)   |
//! | Regular  | 1/2 | (S1, S0)   |
//! | Harmonic | 1   | (S2, S1)   |
//!
//! Every scheme reports values that estimate the eigenvalues directly and
//! bound them from above; for nested trial spaces the values decrease
//! monotonically in `n`.

use crate::assembly::GramSet;
use crate::basis::{m_norm, CoeffVector, SineBasis};
use crate::expr::DensitySpec;
use crate::linalg::{generalized_eigh, LinalgError, SymMatrix};
use crate::quadrature::{integrate, PanelScheme};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TauScheme {
    Dual,
    Regular,
    Harmonic,
}

impl TauScheme {
    pub fn tau(self) -> f64 {
        match self {
            TauScheme::Dual => 0.0,
            TauScheme::Regular => 0.5,
            TauScheme::Harmonic => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            TauScheme::Dual => "dual",
            TauScheme::Regular => "regular",
            TauScheme::Harmonic => "harmonic",
        }
    }

    pub const ALL: [TauScheme; 3] = [TauScheme::Dual, TauScheme::Regular, TauScheme::Harmonic];
}

impl fmt::Display for TauScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TauScheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dual" => Ok(TauScheme::Dual),
            "regular" => Ok(TauScheme::Regular),
            "harmonic" => Ok(TauScheme::Harmonic),
            other => Err(format!(
                "unknown scheme `{other}` (expected regular, harmonic, or dual)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    /// Columns orthonormal against the pencil's right-hand matrix.
    PencilB,
    /// Columns scaled to `c^T S0 c = 1` (unit norm in the weighted L2 space).
    H0,
}

#[derive(Debug, Clone)]
pub struct RitzSolution {
    pub scheme: TauScheme,
    pub n: usize,
    /// Ascending Ritz values.
    pub values: Vec<f64>,
    /// `vectors[j]`: coefficients of the j-th Ritz vector in the sine basis.
    pub vectors: Vec<Vec<f64>>,
    pub normalization: Normalization,
}

impl RitzSolution {
    pub fn column(&self, j: usize) -> CoeffVector {
        CoeffVector(self.vectors[j].clone())
    }
}

#[derive(Debug, Error)]
pub enum RitzError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("dual scheme requires T0; assemble with with_t0 = true")]
    MissingT0,
    #[error("requested dimension {n} exceeds assembled dimension {max}")]
    Dimension { n: usize, max: usize },
    #[error("spectral gap is not positive: delta = {0}")]
    DegenerateGap(f64),
    #[error("tail sums vanish beyond mode {0}; reference coefficients too short")]
    VanishingTail(usize),
}

/// Solve one scheme's pencil on the leading `n x n` blocks of `grams`.
/// Values ascend; vectors are orthonormal against the pencil's B matrix,
/// and all schemes report estimates of the eigenvalues themselves.
pub fn solve(grams: &GramSet, scheme: TauScheme, n: usize) -> Result<RitzSolution, RitzError> {
    if n > grams.n || n == 0 {
        return Err(RitzError::Dimension { n, max: grams.n });
    }
    let (lhs, rhs) = match scheme {
        TauScheme::Regular => (grams.s1.leading(n), grams.s0.leading(n)),
        TauScheme::Harmonic => (grams.s2.leading(n), grams.s1.leading(n)),
        TauScheme::Dual => {
            let t0 = grams.t0.as_ref().ok_or(RitzError::MissingT0)?;
            (grams.s0.leading(n), t0.leading(n))
        }
    };
    let eig = generalized_eigh(&lhs, &rhs)?;
    Ok(RitzSolution {
        scheme,
        n,
        values: eig.values,
        vectors: eig.vectors,
        normalization: Normalization::PencilB,
    })
}

/// Rescale every column to `c^T S0 c = 1`. Regular-scheme solutions are
/// already normalized this way and pass through unchanged (up to rounding).
pub fn normalize_h0(mut sol: RitzSolution, s0: &SymMatrix) -> RitzSolution {
    let s0 = if s0.n() == sol.n {
        s0.clone()
    } else {
        s0.leading(sol.n)
    };
    for col in &mut sol.vectors {
        let quad: f64 = (0..sol.n)
            .flat_map(|i| (0..sol.n).map(move |j| (i, j)))
            .map(|(i, j)| col[i] * s0.get(i, j) * col[j])
            .sum();
        assert!(quad > 0.0, "Ritz vector has vanishing weighted norm");
        let scale = 1.0 / quad.sqrt();
        for v in col.iter_mut() {
            *v *= scale;
        }
    }
    sol.normalization = Normalization::H0;
    sol
}

/// Flip each column whose Euclidean inner product with the (zero-padded)
/// reference is negative. Orthogonal columns are left untouched, so the
/// operation is idempotent.
pub fn align_sign(mut sol: RitzSolution, reference: &CoeffVector) -> RitzSolution {
    for col in &mut sol.vectors {
        let dot: f64 = col
            .iter()
            .enumerate()
            .map(|(i, &v)| v * reference.get(i + 1))
            .sum();
        if dot < 0.0 {
            for v in col.iter_mut() {
                *v = -*v;
            }
        }
    }
    sol
}

/// Fractional-norm eigenvector errors of one mode against a reference
/// coefficient vector (both sides H0-normalized and sign-aligned): for each
/// `tau`, the `tau`-norm of `pad(column) - exact`. `mode` is 1-based.
pub fn error_norms(
    sol: &RitzSolution,
    mode: usize,
    exact: &CoeffVector,
    basis: &SineBasis,
    taus: &[f64],
) -> Vec<f64> {
    assert!(mode >= 1 && mode <= sol.n, "mode out of range");
    let diff = sol.column(mode - 1).sub(exact);
    taus.iter().map(|&tau| m_norm(&diff, basis, tau)).collect()
}

/// Exact weighted-L2 error `sqrt(int rho (u_mode - u_exact)^2 dx)` by
/// quadrature, the non-surrogate companion of the `tau = 0` column.
pub fn h0_error(
    sol: &RitzSolution,
    mode: usize,
    exact: &CoeffVector,
    density: &DensitySpec,
    basis: &SineBasis,
    scheme: &PanelScheme,
) -> f64 {
    let diff = sol.column(mode - 1).sub(exact);
    integrate(
        |x| density.eval(x) * crate::basis::synth(&diff, basis, x, 0).powi(2),
        basis.a(),
        basis.b(),
        scheme,
    )
    .sqrt()
}

/// One evaluation of the a-posteriori eigenvalue bound
/// `lhs = Lambda_ell - lambda_ell` against
/// `rhs = Lambda_ell (p_{tau-1/2}^2 + 2 lambda_ell (sum_i 1/lambda_i) p_tau^2)`
/// where `p_s` is the `s`-norm of the reference coefficients truncated to
/// modes above `n` (the sine-truncation surrogate of the projection norm,
/// maximized over the first `ell` modes).
#[derive(Debug, Clone, Serialize)]
pub struct AposterioriReport {
    pub ell: usize,
    pub n: usize,
    pub lambda_ritz: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// Truncation-tail norm at exponent `tau`.
    pub proj_tau: f64,
    /// Truncation-tail norm at exponent `tau - 1/2`.
    pub proj_tau_half: f64,
    pub kappa: f64,
    /// Distance from `lambda_ell` to the rest of the spectrum.
    pub delta: f64,
}

pub fn aposteriori_check(
    sol: &RitzSolution,
    exacts: &[CoeffVector],
    lambdas_exact: &[f64],
    ell: usize,
    kappa: f64,
    basis: &SineBasis,
) -> Result<AposterioriReport, RitzError> {
    assert!(ell >= 1 && ell <= sol.n, "ell out of range");
    assert!(
        exacts.len() >= ell,
        "need reference coefficients for modes 1..=ell"
    );
    assert!(
        lambdas_exact.len() > ell,
        "need exact eigenvalues through mode ell+1 for the spectral gap"
    );
    assert!(kappa > 0.0 && kappa < 1.0, "kappa must lie in (0, 1)");

    let lambda_ell = lambdas_exact[ell - 1];
    let mut delta = lambdas_exact[ell] - lambda_ell;
    if ell >= 2 {
        delta = delta.min(lambda_ell - lambdas_exact[ell - 2]);
    }
    if delta <= 0.0 {
        return Err(RitzError::DegenerateGap(delta));
    }

    let tau = sol.scheme.tau();
    let n = sol.n;
    let tail_norm = |coeffs: &CoeffVector, s: f64| -> f64 {
        let mut tail = coeffs.clone();
        for v in tail.0.iter_mut().take(n) {
            *v = 0.0;
        }
        m_norm(&tail, basis, s)
    };
    let mut proj_tau = 0.0f64;
    let mut proj_tau_half = 0.0f64;
    for exact in exacts.iter().take(ell) {
        proj_tau = proj_tau.max(tail_norm(exact, tau));
        proj_tau_half = proj_tau_half.max(tail_norm(exact, tau - 0.5));
    }

    let lambda_ritz = sol.values[ell - 1];
    let inv_sum: f64 = lambdas_exact[..ell].iter().map(|l| 1.0 / l).sum();
    let lhs = lambda_ritz - lambda_ell;
    let rhs = lambda_ritz
        * (proj_tau_half * proj_tau_half + 2.0 * lambda_ell * inv_sum * proj_tau * proj_tau);
    Ok(AposterioriReport {
        ell,
        n,
        lambda_ritz,
        lhs,
        rhs,
        proj_tau,
        proj_tau_half,
        kappa,
        delta,
    })
}

/// Weighted tail-sum quotient
/// `sum_{k>n} mu_k^(4 tau - 1) c_k^2 / sum_{k>n} mu_k^(2 tau) c_k^2`.
/// Dividing by `mu_{n+1}^(2 tau - 1)` tests the boundedness condition under
/// which regular-scheme eigenvector rates transfer to stronger norms.
pub fn tail_ratio(
    exact: &CoeffVector,
    basis: &SineBasis,
    tau: f64,
    n: usize,
) -> Result<f64, RitzError> {
    assert!(tau >= 0.5, "tail ratio requires tau >= 1/2");
    assert!(n < exact.len(), "n must leave a nonempty tail");
    let mu_pow = |mu: f64, e: f64| (e * mu.ln()).exp();
    let mut num = 0.0;
    let mut den = 0.0;
    for k in (n + 1)..=exact.len() {
        let ck2 = exact.get(k) * exact.get(k);
        let mu = basis.mu(k);
        num += mu_pow(mu, 4.0 * tau - 1.0) * ck2;
        den += mu_pow(mu, 2.0 * tau) * ck2;
    }
    if den == 0.0 {
        return Err(RitzError::VanishingTail(n));
    }
    Ok(num / den)
}
