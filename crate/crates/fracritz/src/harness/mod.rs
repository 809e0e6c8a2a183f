//! Convergence sweeps, log-log slope fitting, file emission, and the
//! built-in verification suite.

pub mod emit;
pub mod verify;

use crate::assembly::{assemble, AssemblyError};
use crate::basis::{CoeffVector, SineBasis};
use crate::bifurcation::{euler_nu1_exact, nu1, BifurcationError, BifurcationSpec, EulerReference};
use crate::expr::{DensityError, DensitySpec};
use crate::quadrature::PanelScheme;
use crate::ritz::{align_sign, error_norms, normalize_h0, solve, RitzError, TauScheme};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid sweep configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Density(#[from] DensityError),
    #[error(transparent)]
    Assembly(#[from] AssemblyError),
    #[error(transparent)]
    Ritz(#[from] RitzError),
    #[error(transparent)]
    Bifurcation(#[from] BifurcationError),
    #[error("log-log fit needs at least 3 points with positive error, got {0}")]
    TooFewFitPoints(usize),
    #[error("sweep produced no successful rows")]
    EmptySweep,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReferenceMode {
    /// Exact Euler eigenpair data; valid only for the `1/x^2` on `[1, e]`
    /// density.
    ExactEuler,
    /// Self-reference against a higher-dimensional solve.
    HighN,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
#[clap(rename_all = "lowercase")]
pub enum EmitFormat {
    Csv,
    Json,
    Plotdata,
}

fn default_scheme() -> TauScheme {
    TauScheme::Regular
}

fn default_step() -> usize {
    1
}

fn default_taus() -> Vec<f64> {
    vec![0.0, 0.5, 0.75, 1.0]
}

fn default_ts() -> Vec<u32> {
    vec![1]
}

fn default_reference() -> ReferenceMode {
    ReferenceMode::ExactEuler
}

fn default_emit() -> Vec<EmitFormat> {
    vec![EmitFormat::Csv, EmitFormat::Json]
}

/// Configuration of one convergence sweep. Deserializable from the JSON
/// config file; CLI flags override individual fields.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Density expression or preset name (`euler`, `unit`).
    pub rho: String,
    #[serde(default)]
    pub a: Option<f64>,
    #[serde(default)]
    pub b: Option<f64>,
    #[serde(default = "default_scheme")]
    pub scheme: TauScheme,
    pub n_min: usize,
    pub n_max: usize,
    #[serde(default = "default_step")]
    pub n_step: usize,
    #[serde(default = "default_taus")]
    pub taus: Vec<f64>,
    #[serde(default = "default_ts")]
    pub ts: Vec<u32>,
    #[serde(default = "default_reference")]
    pub reference: ReferenceMode,
    #[serde(default)]
    pub fit_lo: Option<usize>,
    #[serde(default)]
    pub fit_hi: Option<usize>,
    #[serde(default)]
    pub quad_points: Option<usize>,
    #[serde(default)]
    pub quad_panels: Option<usize>,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    #[serde(default = "default_emit")]
    pub emit: Vec<EmitFormat>,
}

impl SweepConfig {
    /// The sweep reproduced by the verification suite: Euler preset,
    /// regular scheme, `n` from 8 to 24, fits over 8..=20.
    pub fn euler_default() -> Self {
        SweepConfig {
            rho: "euler".into(),
            a: None,
            b: None,
            scheme: TauScheme::Regular,
            n_min: 8,
            n_max: 24,
            n_step: 1,
            taus: default_taus(),
            ts: vec![1, 2, 3],
            reference: ReferenceMode::ExactEuler,
            fit_lo: Some(8),
            fit_hi: Some(20),
            quad_points: None,
            quad_panels: None,
            out_dir: None,
            emit: default_emit(),
        }
    }

    pub fn fit_range(&self) -> (usize, usize) {
        (
            self.fit_lo.unwrap_or(self.n_min.max(8)),
            self.fit_hi.unwrap_or(self.n_max.min(20).max(self.n_min)),
        )
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.n_min == 0 || self.n_max < self.n_min {
            return Err(HarnessError::Config(format!(
                "empty n range [{}, {}]",
                self.n_min, self.n_max
            )));
        }
        if self.n_step == 0 {
            return Err(HarnessError::Config("n_step must be positive".into()));
        }
        let (lo, hi) = self.fit_range();
        if lo < self.n_min || hi > self.n_max || hi < lo {
            return Err(HarnessError::Config(format!(
                "fit range [{lo}, {hi}] not contained in n range [{}, {}]",
                self.n_min, self.n_max
            )));
        }
        for &tau in &self.taus {
            if !(0.0..1.375).contains(&tau) {
                return Err(HarnessError::Config(format!(
                    "tau = {tau} outside [0, 1.375)"
                )));
            }
        }
        for &t in &self.ts {
            if t == 0 {
                return Err(HarnessError::Config("t values must be >= 1".into()));
            }
        }
        Ok(())
    }
}

/// Ordinary least squares on `(log10 n, log10 error)`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub rms_residual: f64,
    /// Points dropped because their error was zero or negative.
    pub excluded: usize,
}

/// Least-squares power-law fit of `(n, error)` pairs on log10 axes.
/// Non-positive errors are excluded (and counted); at least three positive
/// points are required.
pub fn fit_loglog(points: &[(f64, f64)]) -> Result<FitResult, HarnessError> {
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter(|&&(_, e)| e > 0.0 && e.is_finite())
        .map(|&(n, e)| (n.log10(), e.log10()))
        .collect();
    let excluded = points.len() - usable.len();
    if usable.len() < 3 {
        return Err(HarnessError::TooFewFitPoints(usable.len()));
    }
    let m = usable.len() as f64;
    let sx: f64 = usable.iter().map(|p| p.0).sum();
    let sy: f64 = usable.iter().map(|p| p.1).sum();
    let sxx: f64 = usable.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = usable.iter().map(|p| p.0 * p.1).sum();
    let denom = m * sxx - sx * sx;
    let slope = (m * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / m;
    let rms = (usable
        .iter()
        .map(|&(x, y)| (y - intercept - slope * x).powi(2))
        .sum::<f64>()
        / m)
        .sqrt();
    Ok(FitResult {
        slope,
        intercept,
        rms_residual: rms,
        excluded,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ReportRow {
    pub n: usize,
    pub lambda1: f64,
    pub err_lambda: f64,
    /// Aligned with the config's `taus`.
    pub err_tau: Vec<f64>,
    /// Aligned with the config's `ts`.
    pub nu1: Vec<f64>,
    pub err_nu1: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct FitEntry {
    pub quantity: String,
    pub fit: FitResult,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TheoryTarget {
    pub quantity: String,
    pub predicted_slope: f64,
    pub source: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ConvergenceReport {
    pub schema_version: String,
    /// Axis convention of every fit and plot-data file.
    pub axes: String,
    pub scheme: TauScheme,
    pub reference: ReferenceMode,
    pub taus: Vec<f64>,
    pub ts: Vec<u32>,
    pub fit_range: (usize, usize),
    pub rows: Vec<ReportRow>,
    pub fits: Vec<FitEntry>,
    pub targets: Vec<TheoryTarget>,
    /// `(n, diagnostic)` for rows that failed and were skipped.
    pub skipped: Vec<(usize, String)>,
}

pub const AXES_CONVENTION: &str = "x = log10(n), y = log10(|error|)";

/// Run a convergence sweep: for each `n`, assemble-and-solve the scheme's
/// pencil, normalize and sign-align the first mode, measure eigenvalue and
/// eigenvector errors against the reference, compute `nu1` per `t`, then
/// fit log-log slopes over the configured fit range.
pub fn run_sweep(config: &SweepConfig) -> Result<ConvergenceReport, HarnessError> {
    config.validate()?;
    let density = DensitySpec::from_cli(&config.rho, config.a, config.b)?;
    if config.reference == ReferenceMode::ExactEuler && !density.is_euler() {
        return Err(HarnessError::Config(
            "exact-euler reference requires the euler preset density".into(),
        ));
    }

    let t_max = config.ts.iter().copied().max().unwrap_or(1);
    let scheme = PanelScheme::new(
        config.quad_points.unwrap_or(16),
        config
            .quad_panels
            .unwrap_or((2 * config.n_max * (t_max as usize + 1)).max(64)),
    );
    let k_ref = (8 * config.n_max).max(512);
    let basis = SineBasis::new(density.a(), density.b(), k_ref);

    // one assembly at the largest dimension; leading blocks are reused so
    // the per-n problems are nested sections of the same pencil
    let n_ref = if config.reference == ReferenceMode::HighN {
        (config.n_max + 8).max(32)
    } else {
        config.n_max
    };
    let with_t0 = config.scheme == TauScheme::Dual;
    let grams = assemble(&density, &basis, n_ref, &scheme, with_t0)?;

    // reference eigen-data: exact coefficients or a high-n solve
    let (lambda_ref, coeffs_ref, nu1_ref): (f64, CoeffVector, Vec<f64>) = match config.reference {
        ReferenceMode::ExactEuler => {
            let reference = EulerReference::new(k_ref);
            let (lam, coeffs) = reference.exact(1);
            let nu1s = config
                .ts
                .iter()
                .map(|&t| {
                    if (1..=3).contains(&t) {
                        euler_nu1_exact(t)
                    } else {
                        // closed forms are tabulated for t <= 3 only
                        reference_nu1_high_n(&grams, &density, &basis, &scheme, n_ref, t, &coeffs)
                    }
                })
                .collect();
            (lam, coeffs, nu1s)
        }
        ReferenceMode::HighN => {
            let sol = normalize_h0(solve(&grams, config.scheme, n_ref)?, &grams.s0);
            let mut col = sol.column(0);
            // canonical orientation: first nonzero coefficient positive
            if col
                .as_slice()
                .iter()
                .find(|v| **v != 0.0)
                .copied()
                .unwrap_or(1.0)
                < 0.0
            {
                col = CoeffVector(col.as_slice().iter().map(|v| -v).collect());
            }
            let coeffs = col.resized(k_ref);
            let nu1s = config
                .ts
                .iter()
                .map(|&t| {
                    reference_nu1_high_n(&grams, &density, &basis, &scheme, n_ref, t, &coeffs)
                })
                .collect();
            (sol.values[0], coeffs, nu1s)
        }
    };

    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    let mut n = config.n_min;
    while n <= config.n_max {
        match sweep_row(
            config,
            &grams,
            &density,
            &basis,
            &scheme,
            n,
            lambda_ref,
            &coeffs_ref,
            &nu1_ref,
        ) {
            Ok(row) => rows.push(row),
            Err(e) => skipped.push((n, e.to_string())),
        }
        n += config.n_step;
    }
    if rows.is_empty() {
        return Err(HarnessError::EmptySweep);
    }

    let (fit_lo, fit_hi) = config.fit_range();
    let in_range = |row: &&ReportRow| -> bool { row.n >= fit_lo && row.n <= fit_hi };
    let mut fits = Vec::new();
    let lambda_points: Vec<(f64, f64)> = rows
        .iter()
        .filter(in_range)
        .map(|r| (r.n as f64, r.err_lambda))
        .collect();
    fits.push(FitEntry {
        quantity: "err_lambda".into(),
        fit: fit_loglog(&lambda_points)?,
    });
    for (i, &tau) in config.taus.iter().enumerate() {
        let pts: Vec<(f64, f64)> = rows
            .iter()
            .filter(in_range)
            .map(|r| (r.n as f64, r.err_tau[i]))
            .collect();
        fits.push(FitEntry {
            quantity: format!("err_tau_{}", tau),
            fit: fit_loglog(&pts)?,
        });
    }
    for (i, &t) in config.ts.iter().enumerate() {
        let pts: Vec<(f64, f64)> = rows
            .iter()
            .filter(in_range)
            .map(|r| (r.n as f64, r.err_nu1[i]))
            .collect();
        fits.push(FitEntry {
            quantity: format!("err_nu1_t{}", t),
            fit: fit_loglog(&pts)?,
        });
    }

    let mut targets = vec![TheoryTarget {
        quantity: "err_lambda".into(),
        predicted_slope: -7.0,
        source: "sine-coefficient tail of order k^-5 gives eigenvalue error n^-7".into(),
    }];
    for &tau in &config.taus {
        targets.push(TheoryTarget {
            quantity: format!("err_tau_{}", tau),
            predicted_slope: 2.0 * tau - 4.5,
            source: "projection-tail rate n^(2 tau - 9/2) for the regular scheme".into(),
        });
    }
    for &t in &config.ts {
        targets.push(TheoryTarget {
            quantity: format!("err_nu1_t{}", t),
            predicted_slope: -3.5,
            source: "energy-norm eigenvector rate; a guaranteed but conservative bound".into(),
        });
    }

    Ok(ConvergenceReport {
        schema_version: "1".into(),
        axes: AXES_CONVENTION.into(),
        scheme: config.scheme,
        reference: config.reference,
        taus: config.taus.clone(),
        ts: config.ts.clone(),
        fit_range: (fit_lo, fit_hi),
        rows,
        fits,
        targets,
        skipped,
    })
}

fn reference_nu1_high_n(
    grams: &crate::assembly::GramSet,
    density: &DensitySpec,
    basis: &SineBasis,
    scheme: &PanelScheme,
    n_ref: usize,
    t: u32,
    reference_coeffs: &CoeffVector,
) -> f64 {
    let sol = align_sign(
        normalize_h0(solve(grams, TauScheme::Regular, n_ref).unwrap(), &grams.s0),
        reference_coeffs,
    );
    let spec = BifurcationSpec::new(t, 1, 1);
    nu1(&sol, density, &spec, basis, scheme).unwrap()
}

#[allow(clippy::too_many_arguments)]
fn sweep_row(
    config: &SweepConfig,
    grams: &crate::assembly::GramSet,
    density: &DensitySpec,
    basis: &SineBasis,
    scheme: &PanelScheme,
    n: usize,
    lambda_ref: f64,
    coeffs_ref: &CoeffVector,
    nu1_ref: &[f64],
) -> Result<ReportRow, HarnessError> {
    let sol = align_sign(
        normalize_h0(solve(grams, config.scheme, n)?, &grams.s0),
        coeffs_ref,
    );
    let lambda1 = sol.values[0];
    let err_lambda = lambda1 - lambda_ref;
    let err_tau = error_norms(&sol, 1, coeffs_ref, basis, &config.taus);
    let mut nu1s = Vec::with_capacity(config.ts.len());
    let mut err_nu1 = Vec::with_capacity(config.ts.len());
    for (i, &t) in config.ts.iter().enumerate() {
        let spec = BifurcationSpec::new(t, 1, 1);
        let v = nu1(&sol, density, &spec, basis, scheme)?;
        nu1s.push(v);
        err_nu1.push((v - nu1_ref[i]).abs());
    }
    Ok(ReportRow {
        n,
        lambda1,
        err_lambda,
        err_tau,
        nu1: nu1s,
        err_nu1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn fit_recovers_exact_power_laws() {
        let pts: Vec<(f64, f64)> = (3..20).map(|n| (n as f64, (n as f64).powi(-7))).collect();
        let fit = fit_loglog(&pts).unwrap();
        assert_abs_diff_eq!(fit.slope, -7.0, epsilon = 1e-10);
        assert!(fit.rms_residual < 1e-12);

        let pts: Vec<(f64, f64)> = (3..20).map(|n| (n as f64, 3.0)).collect();
        assert_abs_diff_eq!(fit_loglog(&pts).unwrap().slope, 0.0, epsilon = 1e-12);

        let pts: Vec<(f64, f64)> = (3..20)
            .map(|n| (n as f64, 100.0 * (n as f64).powf(-4.5)))
            .collect();
        let fit = fit_loglog(&pts).unwrap();
        assert_abs_diff_eq!(fit.slope, -4.5, epsilon = 1e-10);
        assert_abs_diff_eq!(fit.intercept, 2.0, epsilon = 1e-10);
    }

    #[test]
    fn fit_excludes_nonpositive_errors() {
        let pts = vec![(8.0, 1e-3), (10.0, -1e-4), (12.0, 1e-4), (14.0, 1e-5)];
        let fit = fit_loglog(&pts).unwrap();
        assert_eq!(fit.excluded, 1);
        let too_few = vec![(8.0, 1e-3), (10.0, 0.0), (12.0, -1.0)];
        assert!(matches!(
            fit_loglog(&too_few),
            Err(HarnessError::TooFewFitPoints(1))
        ));
    }

    #[test]
    fn config_validation() {
        let mut c = SweepConfig::euler_default();
        assert!(c.validate().is_ok());
        c.fit_hi = Some(40);
        assert!(c.validate().is_err());

        let mut c = SweepConfig::euler_default();
        c.taus = vec![1.5];
        assert!(c.validate().is_err());

        let mut c = SweepConfig::euler_default();
        c.n_min = 10;
        c.n_max = 5;
        assert!(c.validate().is_err());
    }

    #[test]
    fn exact_euler_reference_requires_euler_density() {
        let mut c = SweepConfig::euler_default();
        c.rho = "unit".into();
        c.taus = vec![0.5];
        assert!(matches!(run_sweep(&c), Err(HarnessError::Config(_))));
    }

    #[test]
    fn small_sweep_runs_and_fits() {
        let mut c = SweepConfig::euler_default();
        c.n_min = 6;
        c.n_max = 14;
        c.fit_lo = Some(6);
        c.fit_hi = Some(14);
        c.taus = vec![0.5];
        c.ts = vec![1];
        let report = run_sweep(&c).unwrap();
        assert_eq!(report.rows.len(), 9);
        assert!(report.skipped.is_empty());
        assert_eq!(report.schema_version, "1");
        // eigenvalue error must shrink and stay positive (upper bounds)
        for w in report.rows.windows(2) {
            assert!(w[0].err_lambda > w[1].err_lambda);
            assert!(w[1].err_lambda > 0.0);
        }
        let lam_fit = &report.fits[0];
        assert_eq!(lam_fit.quantity, "err_lambda");
        assert!(lam_fit.fit.slope < -5.0, "slope {}", lam_fit.fit.slope);
    }
}
