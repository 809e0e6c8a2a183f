//! The fractional-norm scale on sine coefficients: decay of the exact
//! eigenfunction's coefficients, norms across tau, and the tail-ratio
//! quantity that controls when eigenvector rates transfer to stronger
//! norms.
//!
//! Run with: `cargo run --example fractional_norms`

use fracritz::basis::m_norm;
use fracritz::bifurcation::EulerReference;
use fracritz::ritz::tail_ratio;

fn main() {
    let reference = EulerReference::new(512);
    let (lambda1, coeffs) = reference.exact(1);
    println!("exact lowest eigenpair of the reference density: lambda1 = {lambda1:.12}");
    println!();

    println!("coefficient decay (|c_k| ~ k^-5, banded two-sided):");
    println!("{:>5} {:>14} {:>12}", "k", "|c_k|", "|c_k| k^5");
    for k in [1usize, 2, 4, 8, 16, 32, 64, 128, 256] {
        let c = coeffs.get(k).abs();
        println!("{:>5} {:>14.3e} {:>12.4}", k, c, c * (k as f64).powi(5));
    }
    println!();

    println!("fractional norms of the eigenfunction (tau = 0 is plain L2):");
    for tau in [0.0, 0.25, 0.5, 0.75, 1.0, 1.25] {
        println!(
            "  ||u||_{tau:<5} = {:.8}",
            m_norm(&coeffs, &reference.basis, tau)
        );
    }
    println!();

    println!("tail ratio / mu_(n+1)^(2 tau - 1) (bounded -> rates transfer):");
    println!(
        "{:>4} {:>10} {:>10} {:>10}",
        "n", "tau=0.75", "tau=1.0", "tau=1.25"
    );
    for n in [4usize, 8, 16, 32, 64] {
        print!("{n:>4}");
        for tau in [0.75, 1.0, 1.25] {
            let ratio = tail_ratio(&coeffs, &reference.basis, tau, n).unwrap();
            let scaled = ratio / reference.basis.mu(n + 1).powf(2.0 * tau - 1.0);
            print!(" {scaled:>10.4}");
        }
        println!();
    }
}
