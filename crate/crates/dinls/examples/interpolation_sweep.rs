//! The two-norm interpolation inequality, probed numerically: the residual
//! D(u) = wn1 - η wn2 over a constant-mass concentration sweep stays bounded
//! under the stated hypotheses, and an exploratory counter-probe shows D
//! growing when they fail.
//!
//! Run with `cargo run --release --example interpolation_sweep`.

use dinls::grid::RadialGrid;
use dinls::params::{ProblemParams, Rational};
use dinls::verify::{check_interpolation, TestFunctionFamily};

fn main() {
    let grid = RadialGrid::new(3, 20.0, 4096).unwrap();
    let family = TestFunctionFamily::concentration_sweep(50, 0.05, 2.5, 2.0);

    // Hypothesis (i): p1 < p2 and (p1/p2) b2 <= b1 <= b2.
    let params = ProblemParams::new(
        3,
        1.0,
        -1.0,
        Rational::from(1),
        Rational::from(3),
        Rational::new(2, 5),
        Rational::new(1, 2),
    )
    .unwrap();
    let report = check_interpolation(&params, 1.0, &family, &grid, false).unwrap();
    println!(
        "hypothesis (i) holds: sup D = {:.4e}, final-decade increase = {:.2e}, bounded = {}",
        report.sup_residual, report.final_decade_increase, report.passed
    );
    for p in report.points.iter().step_by(10) {
        println!("  lambda={:8.3}  D={:+.4e}", p.parameter, p.residual);
    }

    // Counter-probe: p1 > p2 and b1 < (p1/p2) b2 fail both hypotheses; the
    // residual's concentration exponent Np1/2 + b1 then exceeds Np2/2 + b2
    // and D grows without bound. Reported, not asserted.
    let counter = ProblemParams::new(
        3,
        1.0,
        -1.0,
        Rational::new(5, 2),
        Rational::new(6, 5),
        Rational::new(1, 5),
        Rational::new(7, 5),
    )
    .unwrap();
    let report = check_interpolation(&counter, 1.0, &family, &grid, true).unwrap();
    println!(
        "\nexploratory counter-probe (both hypotheses fail): sup D = {:.4e}, bounded = {}",
        report.sup_residual, report.passed
    );
    for p in report.points.iter().step_by(10) {
        println!("  lambda={:8.3}  D={:+.4e}", p.parameter, p.residual);
    }
}
