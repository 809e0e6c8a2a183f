//! Run the built-in verification suite and print one line per criterion.
//! Equivalent to `fracritz verify`, exposed as an example for convenience.
//!
//! Run with: `cargo run --example verify_suite`

use fracritz::harness::verify::run_all;

fn main() {
    let results = run_all();
    for r in &results {
        println!("{}", r.line());
    }
    let passed = results.iter().filter(|r| r.pass).count();
    println!("{passed}/{} criteria passed", results.len());
    if passed < results.len() {
        std::process::exit(1);
    }
}
