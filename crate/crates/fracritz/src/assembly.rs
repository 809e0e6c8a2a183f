//! Assembly of the pencil matrices over the sine basis:
//!
//! * `S0[i][j] = int rho qhat_i qhat_j dx` (weighted mass),
//! * `S1 = diag(mu_k)` (stiffness, closed form in this basis),
//! * `S2[i][j] = mu_i mu_j int qhat_i qhat_j / rho dx` (bi-Laplacian form),
//! * `T0[i][j] = int int rho(x) qhat_j(x) G(x,s) rho(s) qhat_i(s) ds dx`,
//!   the Green-kernel form of the inverse operator (optional; only the
//!   dual harmonic scheme needs it).
//!
//! The inner `T0` integral is split at `s = x` where the kernel has its
//! derivative kink; without the split, composite Gauss-Legendre degrades
//! to O(h^2) there.

use crate::basis::SineBasis;
use crate::expr::{DensitySpec, EvalError};
use crate::linalg::SymMatrix;
use crate::quadrature::PanelScheme;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AssemblyError {
    #[error(transparent)]
    Density(#[from] EvalError),
    #[error("requested dimension {n} exceeds basis modes {k_max}")]
    Dimension { n: usize, k_max: usize },
}

/// Green kernel of `-d^2/dx^2` with Dirichlet conditions on `[a, b]`:
/// `G(x, s) = (min(x,s) - a)(b - max(x,s)) / (b - a)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenKernel {
    pub a: f64,
    pub b: f64,
}

impl GreenKernel {
    pub fn new(a: f64, b: f64) -> Self {
        assert!(b > a);
        GreenKernel { a, b }
    }

    pub fn eval(&self, x: f64, s: f64) -> f64 {
        (x.min(s) - self.a) * (self.b - x.max(s)) / (self.b - self.a)
    }
}

/// The pencil matrices of one density over the leading `n` sine modes.
#[derive(Debug, Clone)]
pub struct GramSet {
    pub n: usize,
    pub s0: SymMatrix,
    pub s1: SymMatrix,
    pub s2: SymMatrix,
    pub t0: Option<SymMatrix>,
    pub density: DensitySpec,
    pub basis: SineBasis,
    pub scheme: PanelScheme,
}

/// Assemble the pencil matrices. `S1` is exact (diagonal in this basis);
/// the rest are composite Gauss-Legendre quadratures with the given scheme.
/// `with_t0` additionally builds the Green-kernel form, whose cost is
/// quadratic in the node count.
pub fn assemble(
    density: &DensitySpec,
    basis: &SineBasis,
    n: usize,
    scheme: &PanelScheme,
    with_t0: bool,
) -> Result<GramSet, AssemblyError> {
    if n > basis.k_max() {
        return Err(AssemblyError::Dimension {
            n,
            k_max: basis.k_max(),
        });
    }
    let (a, b) = (basis.a(), basis.b());
    let nodes = scheme.nodes_weights(a, b);
    let rho: Vec<f64> = nodes
        .iter()
        .map(|&(x, _)| density.try_eval(x))
        .collect::<Result<_, _>>()?;
    // qs[k-1][q] = qhat_k at node q
    let qs: Vec<Vec<f64>> = (1..=n)
        .map(|k| nodes.iter().map(|&(x, _)| basis.eval(k, x, 0)).collect())
        .collect();

    let s0 = SymMatrix::from_fn(n, |i, j| {
        let mut acc = 0.0;
        for (q, &(_, w)) in nodes.iter().enumerate() {
            acc += w * rho[q] * qs[i][q] * qs[j][q];
        }
        acc
    });

    let mus: Vec<f64> = (1..=n).map(|k| basis.mu(k)).collect();
    let s1 = SymMatrix::diag(&mus);

    let s2 = SymMatrix::from_fn(n, |i, j| {
        let mut acc = 0.0;
        for (q, &(_, w)) in nodes.iter().enumerate() {
            acc += w * qs[i][q] * qs[j][q] / rho[q];
        }
        mus[i] * mus[j] * acc
    });

    let t0 = if with_t0 {
        let raw = t0_unsymmetrized(density, basis, n, scheme, &nodes, &rho, &qs)?;
        Some(SymMatrix::symmetrized(n, |i, j| raw[i][j]))
    } else {
        None
    };

    Ok(GramSet {
        n,
        s0,
        s1,
        s2,
        t0,
        density: density.clone(),
        basis: *basis,
        scheme: scheme.clone(),
    })
}

// T0 before the final (M + M^T)/2; exposed to tests, which check that the
// double quadrature is already symmetric to ~1e-12.
pub(crate) fn t0_unsymmetrized(
    density: &DensitySpec,
    basis: &SineBasis,
    n: usize,
    scheme: &PanelScheme,
    outer: &[(f64, f64)],
    rho_outer: &[f64],
    qs_outer: &[Vec<f64>],
) -> Result<Vec<Vec<f64>>, AssemblyError> {
    let (a, b) = (basis.a(), basis.b());
    let kernel = GreenKernel::new(a, b);
    // g[q][i-1] = int_a^b G(x_q, s) rho(s) qhat_i(s) ds, split at s = x_q
    let mut g = vec![vec![0.0; n]; outer.len()];
    let segment = |x: f64, lo: f64, hi: f64, acc: &mut [f64]| -> Result<(), AssemblyError> {
        if hi - lo <= f64::EPSILON * (b - a) {
            return Ok(());
        }
        let mut err = None;
        scheme.for_each_node(lo, hi, |s, w| {
            let rho_s = match density.try_eval(s) {
                Ok(v) => v,
                Err(e) => {
                    err.get_or_insert(e);
                    return;
                }
            };
            let gw = w * kernel.eval(x, s) * rho_s;
            for (i, slot) in acc.iter_mut().enumerate() {
                *slot += gw * basis.eval(i + 1, s, 0);
            }
        });
        match err {
            Some(e) => Err(e.into()),
            None => Ok(()),
        }
    };
    for (q, &(x, _)) in outer.iter().enumerate() {
        segment(x, a, x, &mut g[q])?;
        segment(x, x, b, &mut g[q])?;
    }
    let mut raw = vec![vec![0.0; n]; n];
    for i in 0..n {
        for (j, row_j) in qs_outer.iter().enumerate().take(n) {
            let mut acc = 0.0;
            for (q, &(_, w)) in outer.iter().enumerate() {
                acc += w * rho_outer[q] * row_j[q] * g[q][i];
            }
            raw[i][j] = acc;
        }
    }
    Ok(raw)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{synth, CoeffVector};
    use crate::linalg::cholesky;
    use crate::quadrature::{integrate, integrate_split};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{E, PI};

    #[test]
    fn green_formula_and_symmetry() {
        let g = GreenKernel::new(0.0, 1.0);
        assert_abs_diff_eq!(g.eval(0.25, 0.75), 0.0625, epsilon = 1e-16);
        assert_eq!(g.eval(0.0, 0.4), 0.0);
        assert_eq!(g.eval(0.4, 1.0), 0.0);

        let mut state = 12u64;
        for _ in 0..100 {
            let x = 0.5 * (crate::linalg::splitmix64(&mut state) + 1.0);
            let s = 0.5 * (crate::linalg::splitmix64(&mut state) + 1.0);
            assert_eq!(g.eval(x, s), g.eval(s, x));
            assert!(g.eval(x, s) >= 0.0);
        }
    }

    #[test]
    fn green_inverts_the_laplacian() {
        // u(x) = int G(x,s) f(s) ds solves -u'' = f; check with f = sin(pi x)
        let g = GreenKernel::new(0.0, 1.0);
        let scheme = PanelScheme::new(32, 32);
        let f = |s: f64| (PI * s).sin();
        let potential = |x: f64| integrate_split(|s| g.eval(x, s) * f(s), 0.0, 1.0, &[x], &scheme);
        let h = 6e-3;
        for x in [0.2, 0.5, 0.77] {
            // fourth-order five-point second derivative
            let d2 = (-potential(x + 2.0 * h) + 16.0 * potential(x + h) - 30.0 * potential(x)
                + 16.0 * potential(x - h)
                - potential(x - 2.0 * h))
                / (12.0 * h * h);
            assert_abs_diff_eq!(-d2, f(x), epsilon = 1e-8);
        }
    }

    #[test]
    fn unit_density_diagonalizes_everything() {
        let density = DensitySpec::preset("unit").unwrap();
        let basis = SineBasis::new(0.0, PI, 8);
        let scheme = PanelScheme::new(16, 64);
        let grams = assemble(&density, &basis, 8, &scheme, true).unwrap();
        let t0 = grams.t0.as_ref().unwrap();
        for i in 0..8 {
            let k2 = ((i + 1) * (i + 1)) as f64;
            for j in 0..8 {
                let (s0e, s1e, s2e, t0e) = if i == j {
                    (1.0, k2, k2 * k2, 1.0 / k2)
                } else {
                    (0.0, 0.0, 0.0, 0.0)
                };
                assert_abs_diff_eq!(grams.s0.get(i, j), s0e, epsilon = 1e-10);
                assert_abs_diff_eq!(grams.s1.get(i, j), s1e, epsilon = 1e-10);
                assert_abs_diff_eq!(grams.s2.get(i, j), s2e, epsilon = 1e-10);
                assert_abs_diff_eq!(t0.get(i, j), t0e, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn euler_matrices_positive_definite() {
        let density = DensitySpec::preset("euler").unwrap();
        let basis = SineBasis::new(1.0, E, 12);
        let scheme = PanelScheme::new(16, 64);
        let grams = assemble(&density, &basis, 12, &scheme, true).unwrap();
        assert!(cholesky(&grams.s0).is_ok());
        assert!(cholesky(&grams.s1).is_ok());
        assert!(cholesky(&grams.s2).is_ok());
        assert!(cholesky(grams.t0.as_ref().unwrap()).is_ok());
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn t0_symmetric_before_symmetrization() {
        let density = DensitySpec::preset("euler").unwrap();
        let basis = SineBasis::new(1.0, E, 8);
        let scheme = PanelScheme::new(16, 32);
        let nodes = scheme.nodes_weights(1.0, E);
        let rho: Vec<f64> = nodes.iter().map(|&(x, _)| density.eval(x)).collect();
        let qs: Vec<Vec<f64>> = (1..=8)
            .map(|k| nodes.iter().map(|&(x, _)| basis.eval(k, x, 0)).collect())
            .collect();
        let raw = t0_unsymmetrized(&density, &basis, 8, &scheme, &nodes, &rho, &qs).unwrap();
        for i in 0..8 {
            for j in 0..8 {
                assert_abs_diff_eq!(raw[i][j], raw[j][i], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn kernel_route_matches_iterated_integrals() {
        // <T qhat_i, qhat_j> via the kernel vs solving -u'' = rho qhat_i by
        // two nested antiderivatives and testing against rho qhat_j.
        let density = DensitySpec::preset("euler").unwrap();
        let basis = SineBasis::new(1.0, E, 4);
        let scheme = PanelScheme::new(16, 48);
        let grams = assemble(&density, &basis, 4, &scheme, true).unwrap();
        let t0 = grams.t0.as_ref().unwrap();

        let inner = PanelScheme::new(24, 8);
        let outer = PanelScheme::new(16, 16);
        let outer_nodes = outer.nodes_weights(1.0, E);
        for i in 0..4usize {
            let f = |s: f64| density.eval(s) * basis.eval(i + 1, s, 0);
            // u(x) = -int_a^x int_a^t f + C (x - a), C fixed by u(b) = 0
            let ff = |t: f64| integrate(f, 1.0, t, &inner);
            let double = |x: f64| {
                if x <= 1.0 + 1e-14 {
                    0.0
                } else {
                    integrate(ff, 1.0, x, &inner)
                }
            };
            let c = double(E) / (E - 1.0);
            // u tabulated once per outer node, then reused for every j
            let u_vals: Vec<f64> = outer_nodes
                .iter()
                .map(|&(x, _)| -double(x) + c * (x - 1.0))
                .collect();
            for j in 0..4usize {
                let mut byquad = 0.0;
                for (q, &(x, w)) in outer_nodes.iter().enumerate() {
                    byquad += w * density.eval(x) * basis.eval(j + 1, x, 0) * u_vals[q];
                }
                assert_abs_diff_eq!(t0.get(i, j), byquad, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn rayleigh_quotient_consistency() {
        let density = DensitySpec::preset("euler").unwrap();
        let basis = SineBasis::new(1.0, E, 10);
        let scheme = PanelScheme::new(16, 80);
        let grams = assemble(&density, &basis, 10, &scheme, false).unwrap();
        let mut state = 8u64;
        let c = CoeffVector(
            (0..10)
                .map(|_| crate::linalg::splitmix64(&mut state))
                .collect(),
        );
        let cs = c.as_slice();
        let num_mat: f64 = (0..10)
            .flat_map(|i| (0..10).map(move |j| (i, j)))
            .map(|(i, j)| cs[i] * grams.s1.get(i, j) * cs[j])
            .sum();
        let den_mat: f64 = (0..10)
            .flat_map(|i| (0..10).map(move |j| (i, j)))
            .map(|(i, j)| cs[i] * grams.s0.get(i, j) * cs[j])
            .sum();
        let num_q = integrate(|x| synth(&c, &basis, x, 1).powi(2), 1.0, E, &scheme);
        let den_q = integrate(
            |x| density.eval(x) * synth(&c, &basis, x, 0).powi(2),
            1.0,
            E,
            &scheme,
        );
        assert_abs_diff_eq!(num_mat / den_mat, num_q / den_q, epsilon = 1e-10);
    }

    #[test]
    fn panel_doubling_stability() {
        let density = DensitySpec::preset("euler").unwrap();
        let basis = SineBasis::new(1.0, E, 12);
        let scheme = PanelScheme::new(16, 96);
        let g1 = assemble(&density, &basis, 12, &scheme, false).unwrap();
        let g2 = assemble(&density, &basis, 12, &scheme.doubled(), false).unwrap();
        for i in 0..12 {
            for j in 0..12 {
                // entry-relative: S2 entries grow like mu_i mu_j, so plain
                // rounding already moves them by ~1e-16 * entry
                let tol = |v: f64| 1e-11 * (1.0 + v.abs());
                assert_abs_diff_eq!(
                    g1.s0.get(i, j),
                    g2.s0.get(i, j),
                    epsilon = tol(g1.s0.get(i, j))
                );
                assert_abs_diff_eq!(
                    g1.s2.get(i, j),
                    g2.s2.get(i, j),
                    epsilon = tol(g1.s2.get(i, j))
                );
            }
        }
    }

    #[test]
    fn s1_closed_form_matches_quadrature() {
        let basis = SineBasis::new(1.0, E, 6);
        let scheme = PanelScheme::new(16, 64);
        for k in 1..=6usize {
            let byquad = integrate(|x| basis.eval(k, x, 1).powi(2), 1.0, E, &scheme);
            assert_abs_diff_eq!(byquad, basis.mu(k), epsilon = 1e-10 * basis.mu(k));
        }
    }
}
