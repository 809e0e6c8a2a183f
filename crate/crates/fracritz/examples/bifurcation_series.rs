//! Bifurcation coefficients of the rotating-string family for the
//! reference density: nu0, nu1, nu2, the first eigenfunction correction,
//! and a sample of the truncated series `lambda(eps)`.
//!
//! Run with: `cargo run --example bifurcation_series`

use fracritz::assembly::assemble;
use fracritz::basis::SineBasis;
use fracritz::bifurcation::{bifurcate, euler_nu1_exact, BifurcationSpec, EulerReference};
use fracritz::expr::DensitySpec;
use fracritz::quadrature::PanelScheme;
use fracritz::ritz::{align_sign, normalize_h0, solve, TauScheme};
use std::f64::consts::E;

fn main() {
    let n = 20;
    let t = 1;
    let density = DensitySpec::preset("euler").unwrap();
    let basis = SineBasis::new(1.0, E, n);
    let scheme = PanelScheme::default_for(n, t);
    let grams = assemble(&density, &basis, n, &scheme, false).unwrap();
    let reference = EulerReference::new(64).exact(1).1;
    let sol = align_sign(
        normalize_h0(solve(&grams, TauScheme::Regular, n).unwrap(), &grams.s0),
        &reference,
    );

    let spec = BifurcationSpec::new(t, 1, 2);
    let result = bifurcate(&sol, &density, &spec, &basis, &scheme).unwrap();

    println!("rotating-string branch from the lowest mode (t = {t}, n = {n})");
    println!("  nu0 = {:.15}", result.nu0);
    println!(
        "  nu1 = {:.15}   (closed form: {:.15})",
        result.nu1,
        euler_nu1_exact(t)
    );
    println!("  nu2 = {:.15}", result.nu2.unwrap());
    println!(
        "  <v1, v0> (should vanish)      = {:.2e}",
        result.orth_check
    );
    println!(
        "  panel-doubling delta for nu1  = {:.2e}",
        result.quad_diag.nu1_delta
    );
    println!();

    // nu1 < 0: the branch bends subcritically. Sample lambda(eps).
    println!("{:>10} {:>22}", "eps", "lambda(eps)");
    let v0 = sol.column(0);
    for k in 0..=5 {
        let eps = k as f64 * 2e-4;
        let (lambda, _) = fracritz::bifurcation::eval_series(&result, &v0, &basis, eps, 1.5);
        println!("{:>10.1e} {:>22.12}", eps, lambda);
    }
    println!();
    println!("largest v1 coefficients (sine modes):");
    let mut indexed: Vec<(usize, f64)> = result
        .v1
        .as_slice()
        .iter()
        .enumerate()
        .map(|(i, &c)| (i + 1, c))
        .collect();
    indexed.sort_by(|a, b| b.1.abs().partial_cmp(&a.1.abs()).unwrap());
    for (k, c) in indexed.iter().take(5) {
        println!("  c_{k:<3} = {c:+.6e}");
    }
}
