//! The phase-limited adaptive step controller in action: the step size tracks
//! the largest phase-rotation rate, shrinking automatically as a collapsing
//! core amplifies the nonlinear potential.
//!
//! Run with `cargo run --release --example adaptive_stepping`.

use dinls::grid::{Field, RadialGrid};
use dinls::params::{ProblemParams, Rational};
use dinls::solver::{run_simulation, SolverConfig};
use dinls::verify::amplitude_for_energy;

fn main() {
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
    let amplitude = amplitude_for_energy(&params, &grid, 1.0, 1.0, -0.5);
    let u0 = Field::chirped_gaussian(grid, amplitude, 1.0, 1.0);
    let config = SolverConfig {
        t_end: 0.5,
        dt0: 1e-3,
        cfl_phase: 0.1,
        sample_stride: 10,
        ..SolverConfig::default()
    };
    let out = run_simulation(&u0, &params, &config).unwrap();
    println!("status: {:?} after {} steps", out.status, out.steps_taken);
    println!("      t        dt      max|u|");
    for s in out.diagnostics.iter().step_by(out.diagnostics.len() / 10) {
        println!("  {:.5}  {:.2e}  {:8.2}", s.t, s.dt_used, s.max_amplitude);
    }
    if let Some(r) = &out.blowup_report {
        println!(
            "blow-up detected at t={:.5}; the step had contracted from {:.0e} to {:.1e}",
            r.t_detect,
            config.dt0,
            out.diagnostics.last().unwrap().dt_used
        );
    }
}
