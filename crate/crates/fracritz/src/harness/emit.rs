//! Report emission: CSV, JSON, and per-quantity plot-data files.
//!
//! CSV columns are exactly
//! `n, lambda1, err_lambda, err_tau_<tau>.., nu1_t<t>, err_nu1_t<t>..`
//! with UTF-8, LF line endings, a mandatory header row, and `.` as the
//! decimal separator. Floats are printed with 17 significant digits so
//! outputs can be audited digit for digit. Plot-data files carry one
//! `(log10 n, log10 |error|)` pair per line, one file per quantity.

use super::{ConvergenceReport, HarnessError};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

/// 17 significant digits, scientific.
pub fn fmt_f64(x: f64) -> String {
    format!("{:.16e}", x)
}

fn fmt_tau(tau: f64) -> String {
    format!("{}", tau)
}

/// Render the CSV body (header plus one line per row).
pub fn csv_string(report: &ConvergenceReport) -> String {
    let mut header = String::from("n,lambda1,err_lambda");
    for &tau in &report.taus {
        let _ = write!(header, ",err_tau_{}", fmt_tau(tau));
    }
    for &t in &report.ts {
        let _ = write!(header, ",nu1_t{},err_nu1_t{}", t, t);
    }
    let mut out = header;
    out.push('\n');
    for row in &report.rows {
        let _ = write!(
            out,
            "{},{},{}",
            row.n,
            fmt_f64(row.lambda1),
            fmt_f64(row.err_lambda)
        );
        for v in &row.err_tau {
            let _ = write!(out, ",{}", fmt_f64(*v));
        }
        for (nu, err) in row.nu1.iter().zip(&row.err_nu1) {
            let _ = write!(out, ",{},{}", fmt_f64(*nu), fmt_f64(*err));
        }
        out.push('\n');
    }
    out
}

/// Render the JSON mirror of the report (lossless float round-trip).
pub fn json_string(report: &ConvergenceReport) -> Result<String, HarnessError> {
    let mut s = serde_json::to_string_pretty(report)?;
    s.push('\n');
    Ok(s)
}

/// One `(log10 n, log10 |error|)` file per fitted quantity, named
/// `<quantity>.dat` under `dir`. Rows with non-positive error are skipped,
/// mirroring the fit's exclusions.
pub fn plotdata_files(report: &ConvergenceReport) -> Vec<(String, String)> {
    let mut files = Vec::new();
    let mut push = |name: String, series: Vec<(usize, f64)>| {
        let mut body = format!("# axes: {}\n", report.axes);
        for (n, err) in series {
            if err > 0.0 && err.is_finite() {
                let _ = writeln!(
                    body,
                    "{} {}",
                    fmt_f64((n as f64).log10()),
                    fmt_f64(err.log10())
                );
            }
        }
        files.push((format!("{}.dat", name), body));
    };
    push(
        "err_lambda".into(),
        report.rows.iter().map(|r| (r.n, r.err_lambda)).collect(),
    );
    for (i, &tau) in report.taus.iter().enumerate() {
        push(
            format!("err_tau_{}", fmt_tau(tau)),
            report.rows.iter().map(|r| (r.n, r.err_tau[i])).collect(),
        );
    }
    for (i, &t) in report.ts.iter().enumerate() {
        push(
            format!("err_nu1_t{}", t),
            report.rows.iter().map(|r| (r.n, r.err_nu1[i])).collect(),
        );
    }
    files
}

/// Write a report in one format. For `Csv` and `Json` the path names the
/// output file; for `Plotdata` it names a directory receiving one `.dat`
/// file per quantity.
pub fn emit(
    report: &ConvergenceReport,
    format: super::EmitFormat,
    path: &Path,
) -> Result<(), HarnessError> {
    match format {
        super::EmitFormat::Csv => fs::write(path, csv_string(report))?,
        super::EmitFormat::Json => fs::write(path, json_string(report)?)?,
        super::EmitFormat::Plotdata => {
            fs::create_dir_all(path)?;
            for (name, body) in plotdata_files(report) {
                fs::write(path.join(name), body)?;
            }
        }
    }
    Ok(())
}
