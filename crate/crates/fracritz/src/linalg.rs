//! Dense symmetric linear algebra built from scratch: Cholesky, a
//! cyclic-by-row Jacobi eigensolver, and the symmetric-definite generalized
//! eigensolver behind every Ritz pencil. Dimensions here stay below ~64, so
//! Jacobi's O(n^3)-per-sweep cost is irrelevant and its accuracy is welcome.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix not positive definite: pivot {pivot:.6e} at index {index}")]
    NotPositiveDefinite { index: usize, pivot: f64 },
    #[error("Jacobi sweep limit ({0}) exceeded")]
    SweepLimit(usize),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

/// Dense symmetric matrix; construction keeps `a[i][j] == a[j][i]` exact.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>, // row-major
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1);
        SymMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    /// Fill from a generator evaluated once per unordered pair, mirroring
    /// the value so symmetry is exact by construction.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = SymMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                m.data[i * n + j] = v;
                m.data[j * n + i] = v;
            }
        }
        m
    }

    /// Symmetrize a possibly asymmetric generator as `(g(i,j) + g(j,i)) / 2`.
    pub fn symmetrized(n: usize, mut g: impl FnMut(usize, usize) -> f64) -> Self {
        SymMatrix::from_fn(n, |i, j| 0.5 * (g(i, j) + g(j, i)))
    }

    pub fn diag(d: &[f64]) -> Self {
        let mut m = SymMatrix::zeros(d.len());
        for (i, &v) in d.iter().enumerate() {
            m.data[i * d.len() + i] = v;
        }
        m
    }

    pub fn identity(n: usize) -> Self {
        SymMatrix::diag(&vec![1.0; n])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
        self.data[j * self.n + i] = v;
    }

    /// Leading `m x m` principal block.
    pub fn leading(&self, m: usize) -> SymMatrix {
        assert!(m >= 1 && m <= self.n);
        SymMatrix::from_fn(m, |i, j| self.get(i, j))
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * x[j]).sum())
            .collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_norm(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }
}

/// Lower-triangular Cholesky factor with strictly positive diagonal.
#[derive(Debug, Clone)]
pub struct CholeskyFactor {
    n: usize,
    l: Vec<f64>, // row-major, upper part zero
}

impl CholeskyFactor {
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.l[i * self.n + j]
    }
}

/// Factor `S = L L^T`. A pivot at or below `1e-14 * max|S|` signals a
/// degenerate Gram matrix (linearly dependent trial vectors).
pub fn cholesky(s: &SymMatrix) -> Result<CholeskyFactor, LinalgError> {
    let n = s.n;
    let tol = 1e-14 * s.max_norm();
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let mut diag = s.get(j, j);
        for k in 0..j {
            diag -= l[j * n + k] * l[j * n + k];
        }
        if diag <= tol {
            return Err(LinalgError::NotPositiveDefinite {
                index: j,
                pivot: diag,
            });
        }
        let ljj = diag.sqrt();
        l[j * n + j] = ljj;
        for i in (j + 1)..n {
            let mut v = s.get(i, j);
            for k in 0..j {
                v -= l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = v / ljj;
        }
    }
    Ok(CholeskyFactor { n, l })
}

/// Solve `L x = rhs` (forward) or `L^T x = rhs` (`transposed`, backward).
pub fn solve_triangular(l: &CholeskyFactor, rhs: &[f64], transposed: bool) -> Vec<f64> {
    let n = l.n;
    assert_eq!(rhs.len(), n, "right-hand side length mismatch");
    let mut x = rhs.to_vec();
    if !transposed {
        for i in 0..n {
            for k in 0..i {
                x[i] -= l.get(i, k) * x[k];
            }
            x[i] /= l.get(i, i);
        }
    } else {
        for i in (0..n).rev() {
            for k in (i + 1)..n {
                x[i] -= l.get(k, i) * x[k];
            }
            x[i] /= l.get(i, i);
        }
    }
    x
}

/// Eigen-decomposition of a pencil `(A, B)`: ascending values, columns
/// B-orthonormal. With `B = I` this is a plain symmetric decomposition.
#[derive(Debug, Clone)]
pub struct GeneralizedEig {
    pub values: Vec<f64>,
    /// `vectors[j]` is the eigenvector for `values[j]`.
    pub vectors: Vec<Vec<f64>>,
}

const JACOBI_SWEEP_LIMIT: usize = 50;

/// Cyclic-by-row Jacobi. Sweeps until the off-diagonal Frobenius norm drops
/// below `1e-13 * ||S||_F`; values are sorted ascending (stably, so ties
/// keep sweep output order) with vectors permuted alongside.
pub fn jacobi_eigh(s: &SymMatrix) -> Result<GeneralizedEig, LinalgError> {
    let n = s.n;
    let mut a = s.clone();
    let mut v = SymMatrix::identity(n); // used as a plain dense matrix here
    let tol = 1e-13 * s.frobenius_norm();

    let off = |a: &SymMatrix| -> f64 {
        let mut sum = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    sum += a.get(i, j) * a.get(i, j);
                }
            }
        }
        sum.sqrt()
    };

    let mut done = n == 1 || off(&a) <= tol;
    let mut sweeps = 0;
    while !done {
        if sweeps == JACOBI_SWEEP_LIMIT {
            return Err(LinalgError::SweepLimit(JACOBI_SWEEP_LIMIT));
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let theta = (a.get(q, q) - a.get(p, p)) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.data[k * n + p] = c * akp - sn * akq;
                    a.data[k * n + q] = sn * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.data[p * n + k] = c * apk - sn * aqk;
                    a.data[q * n + k] = sn * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.data[k * n + p] = c * vkp - sn * vkq;
                    v.data[k * n + q] = sn * vkp + c * vkq;
                }
            }
        }
        sweeps += 1;
        done = off(&a) <= tol;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.get(i, i).partial_cmp(&a.get(j, j)).unwrap());
    let values = order.iter().map(|&i| a.get(i, i)).collect();
    let vectors = order
        .iter()
        .map(|&j| (0..n).map(|i| v.get(i, j)).collect())
        .collect();
    Ok(GeneralizedEig { values, vectors })
}

/// Symmetric-definite pencil `A x = lambda B x`: factor `B = L L^T`, solve
/// the symmetrized `L^-1 A L^-T`, and back-transform `x = L^-T y`. Columns
/// come out B-orthonormal.
pub fn generalized_eigh(a: &SymMatrix, b: &SymMatrix) -> Result<GeneralizedEig, LinalgError> {
    let n = a.n;
    if b.n != n {
        return Err(LinalgError::Dimension(format!(
            "pencil blocks disagree: {} vs {}",
            n, b.n
        )));
    }
    let l = cholesky(b)?;
    // M = L^-1 A  (column by column), then C = (L^-1 M^T)^T = L^-1 A L^-T
    let mut m = vec![0.0; n * n];
    for j in 0..n {
        let col: Vec<f64> = (0..n).map(|i| a.get(i, j)).collect();
        let s = solve_triangular(&l, &col, false);
        for i in 0..n {
            m[i * n + j] = s[i];
        }
    }
    let mut c_raw = vec![0.0; n * n];
    for i in 0..n {
        let row: Vec<f64> = (0..n).map(|j| m[i * n + j]).collect();
        let s = solve_triangular(&l, &row, false);
        for j in 0..n {
            c_raw[i * n + j] = s[j];
        }
    }
    let c = SymMatrix::symmetrized(n, |i, j| c_raw[i * n + j]);
    let eig = jacobi_eigh(&c)?;
    let vectors = eig
        .vectors
        .iter()
        .map(|y| solve_triangular(&l, y, true))
        .collect();
    Ok(GeneralizedEig {
        values: eig.values,
        vectors,
    })
}

/// Deterministic RNG (SplitMix64), uniform in `[-1, 1)`. Used by the
/// randomized self-checks of the verification suite; fixed seeds keep
/// every run reproducible.
pub(crate) fn splitmix64(state: &mut u64) -> f64 {
    *state = state.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^= z >> 31;
    (z >> 11) as f64 / (1u64 << 52) as f64 - 1.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn cholesky_basics() {
        let id = SymMatrix::identity(3);
        let l = cholesky(&id).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(l.get(i, j), if i == j { 1.0 } else { 0.0 });
            }
        }

        let s = SymMatrix::from_fn(2, |i, j| [[4.0, 2.0], [2.0, 5.0]][i][j]);
        let l = cholesky(&s).unwrap();
        assert_abs_diff_eq!(l.get(0, 0), 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(l.get(1, 0), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(l.get(1, 1), 2.0, epsilon = 1e-15);

        let s = SymMatrix::from_fn(2, |i, j| [[1.0, 2.0], [2.0, 1.0]][i][j]);
        assert!(matches!(
            cholesky(&s),
            Err(LinalgError::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn cholesky_reconstructs() {
        let mut state = 7u64;
        for n in [3usize, 6, 10] {
            let r = SymMatrix::from_fn(n, |_, _| splitmix64(&mut state));
            // SPD via R R^T + n I
            let s = SymMatrix::from_fn(n, |i, j| {
                (0..n).map(|k| r.get(i, k) * r.get(j, k)).sum::<f64>()
                    + if i == j { n as f64 } else { 0.0 }
            });
            let l = cholesky(&s).unwrap();
            for i in 0..n {
                assert!(l.get(i, i) > 0.0);
                for j in 0..n {
                    let rec: f64 = (0..n).map(|k| l.get(i, k) * l.get(j, k)).sum();
                    assert_abs_diff_eq!(rec, s.get(i, j), epsilon = 1e-12 * s.max_norm());
                }
            }
        }
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn triangular_solves() {
        let id = cholesky(&SymMatrix::identity(2)).unwrap();
        assert_eq!(solve_triangular(&id, &[1.0, 2.0], false), vec![1.0, 2.0]);

        let s = SymMatrix::from_fn(2, |i, j| [[4.0, 2.0], [2.0, 5.0]][i][j]);
        let l = cholesky(&s).unwrap(); // L = [[2,0],[1,2]]
        let x = solve_triangular(&l, &[2.0, 3.0], false);
        assert_abs_diff_eq!(x[0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(x[1], 1.0, epsilon = 1e-15);

        // multiply-back on random instances, both orientations
        let mut state = 99u64;
        for _ in 0..20 {
            let n = 5;
            let r = SymMatrix::from_fn(n, |_, _| splitmix64(&mut state));
            let s = SymMatrix::from_fn(n, |i, j| {
                (0..n).map(|k| r.get(i, k) * r.get(j, k)).sum::<f64>()
                    + if i == j { 2.0 } else { 0.0 }
            });
            let l = cholesky(&s).unwrap();
            let rhs: Vec<f64> = (0..n).map(|_| splitmix64(&mut state)).collect();
            let x = solve_triangular(&l, &rhs, false);
            for i in 0..n {
                let back: f64 = (0..=i).map(|k| l.get(i, k) * x[k]).sum();
                assert_abs_diff_eq!(back, rhs[i], epsilon = 1e-12);
            }
            let y = solve_triangular(&l, &rhs, true);
            for i in 0..n {
                let back: f64 = (i..n).map(|k| l.get(k, i) * y[k]).sum();
                assert_abs_diff_eq!(back, rhs[i], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn jacobi_small_cases() {
        let eig = jacobi_eigh(&SymMatrix::diag(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(eig.values, vec![1.0, 2.0, 3.0]);

        let s = SymMatrix::from_fn(2, |i, j| if i == j { 0.0 } else { 1.0 });
        let eig = jacobi_eigh(&s).unwrap();
        assert_abs_diff_eq!(eig.values[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(eig.values[1], 1.0, epsilon = 1e-14);
        let inv_sqrt2 = 1.0 / 2.0f64.sqrt();
        for (j, expect) in [(0usize, -1.0), (1usize, 1.0)] {
            let v = &eig.vectors[j];
            // (1, -+1)/sqrt2 up to overall sign
            let ratio = v[1] / v[0];
            assert_abs_diff_eq!(ratio, expect, epsilon = 1e-12);
            assert_abs_diff_eq!(v[0].abs(), inv_sqrt2, epsilon = 1e-12);
        }
    }

    #[test]
    fn jacobi_reconstruction_oracle() {
        let mut state = 2024u64;
        let n = 8;
        let s = SymMatrix::from_fn(n, |_, _| splitmix64(&mut state));
        let eig = jacobi_eigh(&s).unwrap();
        for i in 0..n {
            for j in 0..n {
                let rec: f64 = (0..n)
                    .map(|k| eig.vectors[k][i] * eig.values[k] * eig.vectors[k][j])
                    .sum();
                assert_abs_diff_eq!(rec, s.get(i, j), epsilon = 1e-11);
            }
        }
    }

    #[test]
    fn jacobi_deterministic() {
        let mut state = 5u64;
        let s = SymMatrix::from_fn(6, |_, _| splitmix64(&mut state));
        let a = jacobi_eigh(&s).unwrap();
        let b = jacobi_eigh(&s).unwrap();
        assert_eq!(a.values, b.values);
        assert_eq!(a.vectors, b.vectors);
    }

    #[test]
    fn generalized_basics() {
        let eig = generalized_eigh(&SymMatrix::diag(&[2.0, 3.0]), &SymMatrix::identity(2)).unwrap();
        assert_abs_diff_eq!(eig.values[0], 2.0, epsilon = 1e-13);
        assert_abs_diff_eq!(eig.values[1], 3.0, epsilon = 1e-13);

        // A = B (any SPD) -> all values 1
        let mut state = 11u64;
        let r = SymMatrix::from_fn(4, |_, _| splitmix64(&mut state));
        let spd = SymMatrix::from_fn(4, |i, j| {
            (0..4).map(|k| r.get(i, k) * r.get(j, k)).sum::<f64>() + if i == j { 1.0 } else { 0.0 }
        });
        let eig = generalized_eigh(&spd, &spd).unwrap();
        for v in &eig.values {
            assert_abs_diff_eq!(*v, 1.0, epsilon = 1e-12);
        }
    }

    fn random_pencil(n: usize, state: &mut u64) -> (SymMatrix, SymMatrix) {
        let a = SymMatrix::from_fn(n, |_, _| splitmix64(state));
        let r = SymMatrix::from_fn(n, |_, _| splitmix64(state));
        let b = SymMatrix::from_fn(n, |i, j| {
            (0..n).map(|k| r.get(i, k) * r.get(j, k)).sum::<f64>() + if i == j { 0.5 } else { 0.0 }
        });
        (a, b)
    }

    #[test]
    fn generalized_residual_oracle() {
        let mut state = 314159u64;
        for trial in 0..100 {
            let n = 5;
            let (a, b) = random_pencil(n, &mut state);
            let eig = generalized_eigh(&a, &b).unwrap();
            let scale_a = a.frobenius_norm();
            let scale_b = b.frobenius_norm();
            for j in 0..n {
                let ax = a.mul_vec(&eig.vectors[j]);
                let bx = b.mul_vec(&eig.vectors[j]);
                let res: f64 = ax
                    .iter()
                    .zip(&bx)
                    .map(|(p, q)| (p - eig.values[j] * q).powi(2))
                    .sum::<f64>()
                    .sqrt();
                assert!(
                    res <= 1e-10 * (scale_a + eig.values[j].abs() * scale_b),
                    "trial {trial}: residual {res:.3e}"
                );
                for i in 0..n {
                    let dot: f64 = eig.vectors[i].iter().zip(&bx).map(|(p, q)| p * q).sum();
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert_abs_diff_eq!(dot, expect, epsilon = 1e-10);
                }
            }
        }
    }

    #[test]
    fn agrees_with_jacobi_when_b_is_identity() {
        let mut state = 777u64;
        let s = SymMatrix::from_fn(7, |_, _| splitmix64(&mut state));
        let ja = jacobi_eigh(&s).unwrap();
        let ge = generalized_eigh(&s, &SymMatrix::identity(7)).unwrap();
        for (x, y) in ja.values.iter().zip(&ge.values) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-11);
        }
    }

    #[test]
    fn pencil_shift_covariance() {
        let mut state = 4242u64;
        let (a, b) = random_pencil(6, &mut state);
        let base = generalized_eigh(&a, &b).unwrap();
        for sigma in [1.0, 10.0] {
            let shifted = SymMatrix::from_fn(6, |i, j| a.get(i, j) + sigma * b.get(i, j));
            let eig = generalized_eigh(&shifted, &b).unwrap();
            for (v, w) in eig.values.iter().zip(&base.values) {
                assert_abs_diff_eq!(*v, w + sigma, epsilon = 1e-10);
            }
        }
    }
}
