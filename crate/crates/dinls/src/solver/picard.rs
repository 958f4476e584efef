//! Duhamel–Picard fixed-point oracle.
//!
//! Solves the integral form of the flow on a short horizon by iterating
//!
//! ```text
//! u⁽⁰⁾ = 0,   u⁽¹⁾(t) = e^{itΔ} u₀,
//! u⁽ᵐ⁺¹⁾(t) = e^{itΔ} u₀ - i ∫₀ᵗ e^{i(t-τ)Δ} F(u⁽ᵐ⁾(τ)) dτ,
//! ```
//!
//! with the two-term nonlinearity `F` and Gauss–Legendre collocation in τ.
//! This route to `u(T)` shares only the linear propagator with the split-step
//! integrator — no operator splitting of the nonlinearity is involved — so
//! agreement between the two is a genuine cross-check. Successive iterate
//! distances at the horizon are recorded as the contraction witness.

use num_complex::Complex64;

use crate::grid::Field;
use crate::observables::{modulus_pow, NonlinearTerms};
use crate::params::ProblemParams;
use crate::solver::{SolverError, SplitStep};

#[derive(Debug)]
pub struct PicardOutcome {
    /// The final iterate evaluated at the horizon.
    pub field: Field,
    /// `‖u⁽ᵐ⁾(T) - u⁽ᵐ⁻¹⁾(T)‖_{L²}` for m = 1, 2, ...
    pub iterate_distances: Vec<f64>,
}

/// Nodes and weights of the n-point Gauss–Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi's initial guess, then Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre recurrence for P_n(x) and P_n'(x).
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Lagrange basis polynomial `ℓ_q` over `nodes`, evaluated at `s`.
fn lagrange(nodes: &[f64], q: usize, s: f64) -> f64 {
    let mut value = 1.0;
    for (r, &node) in nodes.iter().enumerate() {
        if r != q {
            value *= (s - node) / (nodes[q] - node);
        }
    }
    value
}

/// `∫₀^upper ℓ_q(s) ds` by an auxiliary Gauss rule exact for the degree.
fn lagrange_integral(nodes: &[f64], q: usize, upper: f64) -> f64 {
    let (aux_x, aux_w) = gauss_legendre(nodes.len() + 2);
    let half = upper / 2.0;
    aux_x
        .iter()
        .zip(&aux_w)
        .map(|(&x, &w)| w * half * lagrange(nodes, q, half * (x + 1.0)))
        .sum()
}

fn apply_nonlinearity(terms: &NonlinearTerms, rate1: &[f64], rate2: &[f64], u: &[Complex64]) -> Vec<Complex64> {
    u.iter()
        .zip(rate1)
        .zip(rate2)
        .map(|((v, &a1), &a2)| {
            let nsq = v.norm_sqr();
            let mut rate = 0.0;
            if a1 != 0.0 {
                rate += a1 * modulus_pow(nsq, terms.p1);
            }
            if a2 != 0.0 {
                rate += a2 * modulus_pow(nsq, terms.p2);
            }
            v * rate
        })
        .collect()
}

/// Runs the Picard iteration for the parameters' nonlinearity. `horizon`
/// must sit inside the contraction regime (T ≲ 0.05 for order-one data);
/// growing iterate distances abort with [`SolverError::NoContraction`].
pub fn picard_solve(
    u0: &Field,
    params: &ProblemParams,
    horizon: f64,
    iterations: usize,
    quad_nodes: usize,
) -> Result<PicardOutcome, SolverError> {
    picard_solve_with_terms(u0, NonlinearTerms::from_params(params), horizon, iterations, quad_nodes)
}

pub fn picard_solve_with_terms(
    u0: &Field,
    terms: NonlinearTerms,
    horizon: f64,
    iterations: usize,
    quad_nodes: usize,
) -> Result<PicardOutcome, SolverError> {
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(SolverError::BadConfig(format!(
            "picard horizon T = {horizon} must be positive"
        )));
    }
    if iterations < 2 {
        return Err(SolverError::BadConfig(
            "picard needs at least 2 iterations".into(),
        ));
    }
    if quad_nodes < 4 {
        return Err(SolverError::BadConfig(
            "picard needs at least 4 quadrature nodes".into(),
        ));
    }

    let grid = u0.grid().clone();
    let mut stepper = SplitStep::new(grid.clone(), terms);
    // Same smoothed weights as the propagator: both routes must describe the
    // same discrete model for the cross-check to be meaningful.
    let (rate1, rate2) = crate::solver::smoothed_weight_rates(&grid, &terms, stepper.inner_radius());

    let (gl_nodes, _) = gauss_legendre(quad_nodes);
    let taus: Vec<f64> = gl_nodes.iter().map(|&x| horizon * (x + 1.0) / 2.0).collect();
    // Integration matrix: row i (targets) integrates the interpolant of the
    // node values over [0, τ_i]; the last row targets the horizon itself.
    let mut targets = taus.clone();
    targets.push(horizon);
    let weights: Vec<Vec<f64>> = targets
        .iter()
        .map(|&upper| (0..quad_nodes).map(|q| lagrange_integral(&taus, q, upper)).collect())
        .collect();

    let free_flow_from = |stepper: &mut SplitStep, values: &[Complex64], dt: f64| {
        let mut f = Field::new(grid.clone(), values.to_vec(), 0.0).expect("finite state");
        stepper.free_flow(&mut f, dt);
        f.values().to_vec()
    };

    // First iterate: the free evolution at every node and at the horizon.
    let free_at_nodes: Vec<Vec<Complex64>> = taus
        .iter()
        .map(|&tau| free_flow_from(&mut stepper, u0.values(), tau))
        .collect();
    let free_at_horizon = free_flow_from(&mut stepper, u0.values(), horizon);

    let l2 = |a: &[Complex64], b: &[Complex64]| -> f64 {
        a.iter()
            .zip(b)
            .zip(grid.weights())
            .map(|((x, y), w)| (x - y).norm_sqr() * w)
            .sum::<f64>()
            .sqrt()
    };
    let zero = vec![Complex64::default(); grid.len()];

    let mut prev_nodes = free_at_nodes.clone();
    let mut prev_horizon = free_at_horizon.clone();
    let mut distances = vec![l2(&prev_horizon, &zero)];

    for _ in 2..=iterations {
        let forcings: Vec<Vec<Complex64>> = prev_nodes
            .iter()
            .map(|u| apply_nonlinearity(&terms, &rate1, &rate2, u))
            .collect();
        let mut next_nodes = Vec::with_capacity(quad_nodes);
        let mut next_horizon = Vec::new();
        for (i, &target) in targets.iter().enumerate() {
            let mut acc = if i < quad_nodes {
                free_at_nodes[i].clone()
            } else {
                free_at_horizon.clone()
            };
            for (q, forcing) in forcings.iter().enumerate() {
                let w = weights[i][q];
                if w == 0.0 {
                    continue;
                }
                let propagated = free_flow_from(&mut stepper, forcing, target - taus[q]);
                for (a, p) in acc.iter_mut().zip(&propagated) {
                    // -i ∫ e^{i(t-τ)Δ} F dτ
                    *a -= Complex64::new(0.0, w) * p;
                }
            }
            if i < quad_nodes {
                next_nodes.push(acc);
            } else {
                next_horizon = acc;
            }
        }
        let d = l2(&next_horizon, &prev_horizon);
        if d > *distances.last().expect("nonempty") {
            distances.push(d);
            return Err(SolverError::NoContraction(distances));
        }
        distances.push(d);
        prev_nodes = next_nodes;
        prev_horizon = next_horizon;
    }

    let field = Field::new(grid, prev_horizon, u0.time + horizon)?;
    Ok(PicardOutcome {
        field,
        iterate_distances: distances,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::RadialGrid;
    use crate::params::Rational;
    use crate::solver::SolverConfig;

    #[test]
    fn gauss_legendre_eight_point_rule() {
        let (x, w) = gauss_legendre(8);
        let known_x = [
            -0.960_289_856_497_536_2,
            -0.796_666_477_413_626_7,
            -0.525_532_409_916_329,
            -0.183_434_642_495_649_8,
            0.183_434_642_495_649_8,
            0.525_532_409_916_329,
            0.796_666_477_413_626_7,
            0.960_289_856_497_536_2,
        ];
        let known_w = [
            0.101_228_536_290_376_3,
            0.222_381_034_453_374_5,
            0.313_706_645_877_887_3,
            0.362_683_783_378_362,
            0.362_683_783_378_362,
            0.313_706_645_877_887_3,
            0.222_381_034_453_374_5,
            0.101_228_536_290_376_3,
        ];
        for i in 0..8 {
            assert!((x[i] - known_x[i]).abs() < 1e-14);
            assert!((w[i] - known_w[i]).abs() < 1e-14);
        }
        // The rule integrates x^14 over [-1,1] exactly: 2/15.
        let integral: f64 = x.iter().zip(&w).map(|(&x, &w)| w * x.powi(14)).sum();
        assert!((integral - 2.0 / 15.0).abs() < 1e-14);
    }

    #[test]
    fn zero_nonlinearity_reduces_to_free_flow() {
        let grid = RadialGrid::new(3, 15.0, 512).unwrap();
        let u0 = Field::chirped_gaussian(grid.clone(), 0.5, 1.0, 0.0);
        let out = picard_solve_with_terms(&u0, NonlinearTerms::linear(), 0.05, 3, 6).unwrap();
        let mut stepper = SplitStep::new(grid, NonlinearTerms::linear());
        let mut expect = u0.clone();
        stepper.free_flow(&mut expect, 0.05);
        let err = out.field.l2_distance(&expect);
        assert!(err < 1e-13, "err = {err}");
        // All correction iterates vanish.
        assert!(out.iterate_distances[1] < 1e-13);
    }

    #[test]
    fn picard_matches_split_step_on_small_data() {
        let grid = RadialGrid::new(3, 15.0, 512).unwrap();
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
        let u0 = Field::chirped_gaussian(grid, 0.2, 1.0, 0.0);
        let picard = picard_solve(&u0, &params, 0.02, 4, 8).unwrap();
        let config = SolverConfig {
            t_end: 0.02,
            dt0: 5e-4,
            sample_stride: 10,
            ..SolverConfig::default()
        };
        let run = crate::solver::run_simulation(&u0, &params, &config).unwrap();
        let rel = picard.field.l2_distance(&run.final_field) / run.final_field.l2_norm();
        assert!(rel < 1e-4, "rel = {rel}");
        // Contraction by at least 2x per sweep.
        let d = &picard.iterate_distances;
        for m in 1..d.len() {
            assert!(d[m] <= 0.5 * d[m - 1], "distances {d:?}");
        }
    }

    #[test]
    fn no_contraction_outside_the_local_ball() {
        let grid = RadialGrid::new(3, 15.0, 256).unwrap();
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
        let u0 = Field::chirped_gaussian(grid, 4.0, 1.0, 0.0);
        match picard_solve(&u0, &params, 1.0, 6, 6) {
            Err(SolverError::NoContraction(d)) => assert!(d.len() >= 2),
            other => panic!("expected NoContraction, got {other:?}"),
        }
    }

    #[test]
    fn input_validation() {
        let grid = RadialGrid::new(3, 10.0, 64).unwrap();
        let u0 = Field::chirped_gaussian(grid, 0.1, 1.0, 0.0);
        assert!(picard_solve_with_terms(&u0, NonlinearTerms::linear(), 0.0, 4, 8).is_err());
        assert!(picard_solve_with_terms(&u0, NonlinearTerms::linear(), 0.01, 1, 8).is_err());
        assert!(picard_solve_with_terms(&u0, NonlinearTerms::linear(), 0.01, 4, 2).is_err());
    }
}
