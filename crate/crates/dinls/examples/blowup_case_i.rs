//! Finite-time collapse with a focusing energy-critical term: negative-energy
//! chirped Gaussian data, detection of the blow-up, and the virial bound
//! T* <= ||x u0||^2 / (c y0).
//!
//! Run with `cargo run --release --example blowup_case_i`.

use dinls::grid::{Field, RadialGrid};
use dinls::observables::{blowup_coefficient, variance, virial_y};
use dinls::params::{classify_blowup, ProblemParams, Rational};
use dinls::solver::{run_simulation, SolverConfig};
use dinls::verify::amplitude_for_energy;

fn main() {
    // lambda2 < 0 focuses the critical term; lambda1 > 0, p1 < p2, b1 < b2
    // with E(u0) < 0 and y(0) > 0 is the first blow-up case.
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
    let grid = RadialGrid::new(3, 10.0, 2048).unwrap();
    let chirp = 1.0;
    let amplitude = amplitude_for_energy(&params, &grid, 1.0, chirp, -0.5);
    let u0 = Field::chirped_gaussian(grid, amplitude, 1.0, chirp);

    let e0 = dinls::observables::energy(&u0, &params);
    let y0 = virial_y(&u0);
    let v0 = variance(&u0);
    println!("data: A={amplitude:.4}, w=1, c={chirp} -> E={e0:.4}, y0={y0:.3} (=2cV0={:.3}), V0={v0:.3}", 2.0 * chirp * v0);

    let verdict = classify_blowup(&params, e0, dinls::observables::mass(&u0), y0, 1.0).unwrap();
    let c = blowup_coefficient(&params, &verdict).unwrap();
    println!("regime: {:?}, coefficient c = {c} -> T* <= V0/(c y0) = {:.4}", verdict.kind, v0 / (c * y0));

    let config = SolverConfig {
        t_end: 0.5,
        dt0: 1e-3,
        sample_stride: 5,
        ..SolverConfig::default()
    };
    let out = run_simulation(&u0, &params, &config).unwrap();
    let report = out.blowup_report.expect("collapse detected");
    println!(
        "detected: {:?} via {:?} at t = {:.5} (bound {:.4}), max kinetic {:.1}",
        out.status,
        report.trigger,
        report.t_detect,
        report.t_bound_predicted.unwrap(),
        report.max_kinetic
    );
    println!("y(t) along the run (nondecreasing up to detection):");
    for s in out.diagnostics.iter().step_by(out.diagnostics.len() / 8) {
        println!("  t={:.5}  y={:.3}  max|u|={:.2}", s.t, s.y, s.max_amplitude);
    }
}
