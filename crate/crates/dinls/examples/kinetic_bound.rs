//! Kinetic-energy control in a mixed-sign regime: the focusing critical term
//! cannot pump ||∇u||² when the weight exponents interlock, and the pointwise
//! kinetic-energy identity holds up to conservation error.
//!
//! Run with `cargo run --release --example kinetic_bound`.

use dinls::grid::{Field, RadialGrid};
use dinls::params::{ProblemParams, Rational};
use dinls::solver::SolverConfig;
use dinls::verify::check_kinetic_bound;

fn main() {
    // (p1/p2) b2 = 1/3 <= b1 = 2/5 < b2 = 1/2 with lambda2 < 0.
    let params = ProblemParams::new(
        3,
        1.0,
        -1.0,
        Rational::from(2),
        Rational::from(3),
        Rational::new(2, 5),
        Rational::new(1, 2),
    )
    .unwrap();
    let grid = RadialGrid::new(3, 40.0, 2048).unwrap();
    let u0 = Field::chirped_gaussian(grid, 0.5, 1.0, 0.0);
    let config = SolverConfig {
        dt0: 1e-3,
        sample_stride: 50,
        ..SolverConfig::default()
    };
    let (report, out) = check_kinetic_bound(&params, &u0, 5.0, &config).unwrap();
    println!("regime: {:?}", report.regime);
    println!(
        "sup ||grad u||^2 = {:.4} ({}x initial)",
        report.sup_kinetic, report.sup_over_initial
    );
    println!(
        "kinetic-energy identity residual {:.3e} vs energy drift {:.3e} (within 2x: {})",
        report.max_identity_residual, report.energy_drift_abs, report.identity_within_drift
    );
    println!(
        "kinetic growth across the final half: {:.2e} of K0",
        report.final_half_growth_fraction
    );
    for s in out.diagnostics.iter().step_by(out.diagnostics.len() / 8) {
        println!("  t={:.2}  K={:.4}", s.t, s.kinetic);
    }
}
