//! Virial identities along a simulated trajectory: central differences of the
//! sampled variance V(t) against the virial quantity y(t) and the analytic
//! V'' formula.
//!
//! Run with `cargo run --release --example virial_identity`.

use dinls::grid::{Field, RadialGrid};
use dinls::params::{ProblemParams, Rational};
use dinls::solver::{run_simulation, SolverConfig};

fn main() {
    let params = ProblemParams::new(
        3,
        1.0,
        1.0,
        Rational::from(1),
        Rational::from(3),
        Rational::new(1, 2),
        Rational::new(1, 2),
    )
    .unwrap();
    let grid = RadialGrid::new(3, 40.0, 2048).unwrap();
    let u0 = Field::chirped_gaussian(grid, 1.0, 1.0, 0.0);
    let config = SolverConfig {
        t_end: 2.0,
        dt0: 1e-3,
        sample_stride: 10,
        ..SolverConfig::default()
    };
    let out = run_simulation(&u0, &params, &config).unwrap();
    let s = &out.diagnostics;
    println!("      t     V'(fd)      -4y    |      V''(fd)   formula");
    for i in (10..s.len() - 10).step_by((s.len() - 20) / 8) {
        let dt = s[i + 1].t - s[i].t;
        let vp = (s[i + 1].variance - s[i - 1].variance) / (2.0 * dt);
        let vpp = (s[i + 1].variance - 2.0 * s[i].variance + s[i - 1].variance) / (dt * dt);
        println!(
            "  {:5.2}  {:9.4}  {:9.4} |  {:9.4}  {:9.4}",
            s[i].t,
            vp,
            -4.0 * s[i].y,
            vpp,
            s[i].vpp_formula
        );
    }
    println!("\nV' = -4y and V'' = 8K + 4λ1(Np1+2b1)/(p1+2) wn1 + 4λ2(Np2+2b2)/(p2+2) wn2");
}
