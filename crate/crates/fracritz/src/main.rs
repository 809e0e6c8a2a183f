use clap::{Parser, Subcommand};
use fracritz::assembly::assemble;
use fracritz::basis::SineBasis;
use fracritz::bifurcation::{bifurcate, BifurcationSpec, EulerReference};
use fracritz::expr::DensitySpec;
use fracritz::harness::emit::{emit, fmt_f64};
use fracritz::harness::verify::{run_all, CriterionResult};
use fracritz::harness::{run_sweep, EmitFormat, ReferenceMode, SweepConfig};
use fracritz::quadrature::PanelScheme;
use fracritz::ritz::{align_sign, normalize_h0, solve, TauScheme};
use serde::Serialize;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "fracritz",
    about = "Rayleigh-Ritz eigenpairs and rotating-string bifurcation coefficients \
             for -u'' = lambda rho(x) u on [a, b]"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one pencil and write the Ritz values and vectors as JSON.
    Solve {
        /// Density expression in x, or a preset name (euler, unit).
        #[arg(long)]
        rho: String,
        #[arg(long)]
        a: Option<f64>,
        #[arg(long)]
        b: Option<f64>,
        /// Trial-space dimension.
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "regular")]
        scheme: TauScheme,
        /// Gauss-Legendre points per panel.
        #[arg(long)]
        quad_points: Option<usize>,
        /// Number of quadrature panels.
        #[arg(long)]
        quad_panels: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute bifurcation coefficients nu0, nu1 (and nu2 at order 2).
    Bifurcate {
        /// Nonlinearity exponent t >= 1.
        #[arg(long)]
        t: u32,
        /// 1 for nu1 only, 2 to add v1 and nu2.
        #[arg(long, default_value_t = 1)]
        order: u8,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "regular")]
        scheme: TauScheme,
        /// Density expression or preset; defaults to the euler preset.
        #[arg(long, default_value = "euler")]
        rho: String,
        #[arg(long)]
        a: Option<f64>,
        #[arg(long)]
        b: Option<f64>,
        #[arg(long)]
        quad_points: Option<usize>,
        #[arg(long)]
        quad_panels: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a convergence sweep and emit CSV/JSON/plot-data files.
    Sweep {
        /// JSON config file; inline flags override its fields.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        rho: Option<String>,
        #[arg(long)]
        a: Option<f64>,
        #[arg(long)]
        b: Option<f64>,
        #[arg(long)]
        scheme: Option<TauScheme>,
        #[arg(long)]
        n_min: Option<usize>,
        #[arg(long)]
        n_max: Option<usize>,
        #[arg(long)]
        n_step: Option<usize>,
        /// Fractional exponents for eigenvector error norms.
        #[arg(long, value_delimiter = ',')]
        taus: Option<Vec<f64>>,
        /// Nonlinearity exponents for nu1 error tracking.
        #[arg(long, value_delimiter = ',')]
        ts: Option<Vec<u32>>,
        #[arg(long)]
        fit_lo: Option<usize>,
        #[arg(long)]
        fit_hi: Option<usize>,
        #[arg(long, value_enum)]
        reference: Option<Reference>,
        #[arg(long, value_delimiter = ',')]
        emit: Option<Vec<EmitFormat>>,
        #[arg(long)]
        quad_points: Option<usize>,
        #[arg(long)]
        quad_panels: Option<usize>,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Run the verification suite; exit code 0 only if all criteria pass.
    Verify {
        /// Optional JSON report path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum Reference {
    #[value(name = "exact-euler")]
    ExactEuler,
    #[value(name = "high-n")]
    HighN,
}

impl From<Reference> for ReferenceMode {
    fn from(r: Reference) -> Self {
        match r {
            Reference::ExactEuler => ReferenceMode::ExactEuler,
            Reference::HighN => ReferenceMode::HighN,
        }
    }
}

#[derive(Serialize)]
struct SolveOutput {
    scheme: TauScheme,
    n: usize,
    a: f64,
    b: f64,
    rho: String,
    values: Vec<f64>,
    /// `vectors[j]` holds the sine coefficients of the j-th Ritz vector,
    /// normalized to unit weighted L2 norm.
    vectors: Vec<Vec<f64>>,
}

#[derive(Serialize)]
struct BifurcateOutput {
    scheme: TauScheme,
    n: usize,
    t: u32,
    order: u8,
    nu0: f64,
    nu1: f64,
    nu2: Option<f64>,
    v1: Vec<f64>,
    orth_check: f64,
    nu1_quad_delta: f64,
    quad_converged: bool,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, Box<dyn std::error::Error>> {
    match cli.command {
        Command::Solve {
            rho,
            a,
            b,
            n,
            scheme,
            quad_points,
            quad_panels,
            out,
        } => {
            let density = DensitySpec::from_cli(&rho, a, b)?;
            let quad = panel_scheme(quad_points, quad_panels, n, 1);
            let basis = SineBasis::new(density.a(), density.b(), n);
            let grams = assemble(&density, &basis, n, &quad, scheme == TauScheme::Dual)?;
            let sol = normalize_h0(solve(&grams, scheme, n)?, &grams.s0);
            let output = SolveOutput {
                scheme,
                n,
                a: density.a(),
                b: density.b(),
                rho: density.source().to_string(),
                values: sol.values.clone(),
                vectors: sol.vectors.clone(),
            };
            std::fs::write(&out, serde_json::to_string_pretty(&output)? + "\n")?;
            println!("scheme {scheme}, n = {n}");
            for (j, v) in sol.values.iter().enumerate().take(8) {
                println!("  Lambda_{} = {}", j + 1, fmt_f64(*v));
            }
            println!("wrote {}", out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Bifurcate {
            t,
            order,
            n,
            scheme,
            rho,
            a,
            b,
            quad_points,
            quad_panels,
            out,
        } => {
            let density = DensitySpec::from_cli(&rho, a, b)?;
            let quad = panel_scheme(quad_points, quad_panels, n, t);
            let basis = SineBasis::new(density.a(), density.b(), n);
            let grams = assemble(&density, &basis, n, &quad, scheme == TauScheme::Dual)?;
            let mut sol = normalize_h0(solve(&grams, scheme, n)?, &grams.s0);
            if density.is_euler() {
                let reference = EulerReference::new(n.max(64)).exact(1).1;
                sol = align_sign(sol, &reference);
            }
            let spec = BifurcationSpec::new(t, 1, order);
            let result = bifurcate(&sol, &density, &spec, &basis, &quad)?;
            let output = BifurcateOutput {
                scheme,
                n,
                t,
                order,
                nu0: result.nu0,
                nu1: result.nu1,
                nu2: result.nu2,
                v1: result.v1.as_slice().to_vec(),
                orth_check: result.orth_check,
                nu1_quad_delta: result.quad_diag.nu1_delta,
                quad_converged: result.quad_diag.converged,
            };
            std::fs::write(&out, serde_json::to_string_pretty(&output)? + "\n")?;
            println!("nu0 = {}", fmt_f64(result.nu0));
            println!("nu1 = {}", fmt_f64(result.nu1));
            if let Some(nu2) = result.nu2 {
                println!("nu2 = {}", fmt_f64(nu2));
            }
            println!("wrote {}", out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep {
            config,
            rho,
            a,
            b,
            scheme,
            n_min,
            n_max,
            n_step,
            taus,
            ts,
            fit_lo,
            fit_hi,
            reference,
            emit: emit_formats,
            quad_points,
            quad_panels,
            out_dir,
        } => {
            let mut cfg: SweepConfig = match config {
                Some(path) => serde_json::from_str(&std::fs::read_to_string(path)?)?,
                None => SweepConfig::euler_default(),
            };
            // flags win over the config file
            if let Some(v) = rho {
                cfg.rho = v;
            }
            if a.is_some() {
                cfg.a = a;
            }
            if b.is_some() {
                cfg.b = b;
            }
            if let Some(v) = scheme {
                cfg.scheme = v;
            }
            if let Some(v) = n_min {
                cfg.n_min = v;
            }
            if let Some(v) = n_max {
                cfg.n_max = v;
            }
            if let Some(v) = n_step {
                cfg.n_step = v;
            }
            if let Some(v) = taus {
                cfg.taus = v;
            }
            if let Some(v) = ts {
                cfg.ts = v;
            }
            if fit_lo.is_some() {
                cfg.fit_lo = fit_lo;
            }
            if fit_hi.is_some() {
                cfg.fit_hi = fit_hi;
            }
            if let Some(v) = reference {
                cfg.reference = v.into();
            }
            if let Some(v) = emit_formats {
                cfg.emit = v;
            }
            if quad_points.is_some() {
                cfg.quad_points = quad_points;
            }
            if quad_panels.is_some() {
                cfg.quad_panels = quad_panels;
            }
            if out_dir.is_some() {
                cfg.out_dir = out_dir;
            }

            let report = run_sweep(&cfg)?;
            for entry in &report.fits {
                println!(
                    "{:<14} slope {:+.4}  intercept {:+.4}  rms {:.2e}",
                    entry.quantity, entry.fit.slope, entry.fit.intercept, entry.fit.rms_residual
                );
            }
            let dir = cfg.out_dir.clone().unwrap_or_else(|| PathBuf::from("."));
            std::fs::create_dir_all(&dir)?;
            for format in &cfg.emit {
                let path = match format {
                    EmitFormat::Csv => dir.join("sweep.csv"),
                    EmitFormat::Json => dir.join("sweep.json"),
                    EmitFormat::Plotdata => dir.join("plotdata"),
                };
                emit(&report, *format, &path)?;
                println!("wrote {}", path.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { out } => {
            let results = run_all();
            for r in &results {
                println!("{}", r.line());
            }
            let passed = results.iter().filter(|r| r.pass).count();
            println!("{passed}/{} criteria passed", results.len());
            if let Some(path) = out {
                #[derive(Serialize)]
                struct VerifyOutput<'a> {
                    schema_version: &'a str,
                    criteria: &'a [CriterionResult],
                    all_passed: bool,
                }
                let payload = VerifyOutput {
                    schema_version: "1",
                    criteria: &results,
                    all_passed: passed == results.len(),
                };
                std::fs::write(&path, serde_json::to_string_pretty(&payload)? + "\n")?;
                println!("wrote {}", path.display());
            }
            Ok(if passed == results.len() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
    }
}

fn panel_scheme(points: Option<usize>, panels: Option<usize>, n: usize, t: u32) -> PanelScheme {
    PanelScheme::new(
        points.unwrap_or(16),
        panels.unwrap_or((2 * n * (t as usize + 1)).max(64)),
    )
}
