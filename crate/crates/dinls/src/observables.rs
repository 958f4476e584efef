//! Conserved and monitored quantities: mass, energy, weighted Lᵖ norms,
//! kinetic energy, variance V(t), the virial quantity y(t), and the virial
//! second-derivative formula.
//!
//! Sign conventions (pinned numerically by the free-Gaussian tests):
//! `V'(t) = -4 y(t)` with `y(t) = -Im ∫ ū (∇u·x) dx`, and
//! `V''(t) = 8‖∇u‖² + 4λ₁(Np₁+2b₁)/(p₁+2) ‖u‖^{p₁+2}_{L_{b₁}}
//!                  + 4λ₂(Np₂+2b₂)/(p₂+2) ‖u‖^{p₂+2}_{L_{b₂}}`.

use serde::Serialize;
use thiserror::Error;

use crate::grid::{radial_derivative, Field};
use crate::params::{ProblemParams, RegimeKind, RegimeVerdict};

#[derive(Debug, Error)]
pub enum ObservablesError {
    #[error("exponent constraint `{constraint}` violated: left = {left}, right = {right}")]
    ExponentOutOfRange {
        constraint: String,
        left: f64,
        right: f64,
    },
    #[error("verdict {0} is not a blow-up regime")]
    NotABlowupRegime(RegimeKind),
}

/// Margin constant used for the blow-up coefficient of case v, where the
/// argument only yields `y' ≥ ε‖∇u‖²` for small ε.
pub const DEFAULT_CASE_V_EPSILON: f64 = 0.05;

/// Floating-point view of the nonlinearity: everything the stepper and the
/// diagnostics need, decoupled from the exact-rational parameter record so
/// that coupling-free (purely linear) runs are expressible.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NonlinearTerms {
    pub lambda1: f64,
    pub lambda2: f64,
    pub p1: f64,
    pub p2: f64,
    pub b1: f64,
    pub b2: f64,
}

impl NonlinearTerms {
    pub fn from_params(params: &ProblemParams) -> Self {
        NonlinearTerms {
            lambda1: params.lambda1,
            lambda2: params.lambda2,
            p1: params.p1_f64(),
            p2: params.p2_f64(),
            b1: params.b1_f64(),
            b2: params.b2_f64(),
        }
    }

    /// Both couplings zeroed: the free Schrödinger flow.
    pub fn linear() -> Self {
        NonlinearTerms {
            lambda1: 0.0,
            lambda2: 0.0,
            p1: 1.0,
            p2: 1.0,
            b1: 0.0,
            b2: 0.0,
        }
    }

    pub fn is_linear(&self) -> bool {
        self.lambda1 == 0.0 && self.lambda2 == 0.0
    }
}

/// `n^{p/2}` for `n = |u|²`, i.e. `|u|^p`, with fast paths for the small
/// integer powers that dominate the stepping loop.
#[inline]
pub(crate) fn modulus_pow(norm_sqr: f64, p: f64) -> f64 {
    if p == 1.0 {
        norm_sqr.sqrt()
    } else if p == 2.0 {
        norm_sqr
    } else if p == 3.0 {
        norm_sqr * norm_sqr.sqrt()
    } else if p == 4.0 {
        norm_sqr * norm_sqr
    } else if p == 5.0 {
        norm_sqr * norm_sqr * norm_sqr.sqrt()
    } else {
        norm_sqr.powf(0.5 * p)
    }
}

/// `M = ∫ |u|² dx`.
pub fn mass(field: &Field) -> f64 {
    let samples: Vec<f64> = field.values().iter().map(|v| v.norm_sqr()).collect();
    field.grid().dot_weights(&samples)
}

/// `∫ |x|^{-b} |u|^p dx` — the weighted norm already raised to the p-th power.
/// Requires `0 ≤ b < N` (integrable weight on the cell-centered mesh) and
/// `p ≥ 1`.
pub fn weighted_norm(field: &Field, p: f64, b: f64) -> Result<f64, ObservablesError> {
    let n = field.grid().dimension() as f64;
    if !(0.0..n).contains(&b) {
        return Err(ObservablesError::ExponentOutOfRange {
            constraint: "0 <= b < N".into(),
            left: b,
            right: n,
        });
    }
    if p < 1.0 {
        return Err(ObservablesError::ExponentOutOfRange {
            constraint: "p >= 1".into(),
            left: p,
            right: 1.0,
        });
    }
    Ok(weighted_norm_unchecked(field, p, b))
}

fn weighted_norm_unchecked(field: &Field, p: f64, b: f64) -> f64 {
    let samples: Vec<f64> = field
        .values()
        .iter()
        .zip(field.grid().nodes())
        .map(|(v, &r)| {
            let w = if b == 0.0 { 1.0 } else { r.powf(-b) };
            w * modulus_pow(v.norm_sqr(), p)
        })
        .collect();
    field.grid().dot_weights(&samples)
}

/// `‖∇u‖²` via the fourth-order radial derivative.
pub fn kinetic(field: &Field) -> f64 {
    let deriv = radial_derivative(field);
    let samples: Vec<f64> = deriv.iter().map(|d| d.norm_sqr()).collect();
    field.grid().dot_weights(&samples)
}

/// Conserved energy
/// `E = ½‖∇u‖² + λ₁/(p₁+2) ‖u‖^{p₁+2}_{L_{b₁}} + λ₂/(p₂+2) ‖u‖^{p₂+2}_{L_{b₂}}`.
pub fn energy(field: &Field, params: &ProblemParams) -> f64 {
    energy_with_terms(field, &NonlinearTerms::from_params(params))
}

pub fn energy_with_terms(field: &Field, terms: &NonlinearTerms) -> f64 {
    let k = kinetic(field);
    let wn1 = if terms.lambda1 == 0.0 {
        0.0
    } else {
        weighted_norm_unchecked(field, terms.p1 + 2.0, terms.b1)
    };
    let wn2 = if terms.lambda2 == 0.0 {
        0.0
    } else {
        weighted_norm_unchecked(field, terms.p2 + 2.0, terms.b2)
    };
    energy_from_parts(k, wn1, wn2, terms)
}

/// The energy decomposition used everywhere a sample is assembled, so the
/// identity `E = K/2 + λ₁/(p₁+2)·wn1 + λ₂/(p₂+2)·wn2` holds by construction.
pub fn energy_from_parts(kinetic: f64, wn1: f64, wn2: f64, terms: &NonlinearTerms) -> f64 {
    kinetic / 2.0 + terms.lambda1 / (terms.p1 + 2.0) * wn1 + terms.lambda2 / (terms.p2 + 2.0) * wn2
}

/// Variance `V = ∫ |x|² |u|² dx`.
pub fn variance(field: &Field) -> f64 {
    let samples: Vec<f64> = field
        .values()
        .iter()
        .zip(field.grid().nodes())
        .map(|(v, &r)| r * r * v.norm_sqr())
        .collect();
    field.grid().dot_weights(&samples)
}

/// Virial quantity `y = -Im ∫ ū (∇u·x) dx`; satisfies `V' = -4y` along the
/// flow. Vanishes for real fields, equals `2c·V` for the chirp `e^{-i c r²}`.
pub fn virial_y(field: &Field) -> f64 {
    let deriv = radial_derivative(field);
    let samples: Vec<f64> = field
        .values()
        .iter()
        .zip(&deriv)
        .zip(field.grid().nodes())
        .map(|((u, du), &r)| -(u.conj() * du).im * r)
        .collect();
    field.grid().dot_weights(&samples)
}

/// Right-hand side of the virial identity for `V''(t)`; the analytic
/// prediction compared against second differences of the sampled V series.
pub fn virial_vpp(field: &Field, params: &ProblemParams) -> f64 {
    virial_vpp_with_terms(field, &NonlinearTerms::from_params(params))
}

pub fn virial_vpp_with_terms(field: &Field, terms: &NonlinearTerms) -> f64 {
    let k = kinetic(field);
    let wn1 = if terms.lambda1 == 0.0 {
        0.0
    } else {
        weighted_norm_unchecked(field, terms.p1 + 2.0, terms.b1)
    };
    let wn2 = if terms.lambda2 == 0.0 {
        0.0
    } else {
        weighted_norm_unchecked(field, terms.p2 + 2.0, terms.b2)
    };
    vpp_from_parts(k, wn1, wn2, field.grid().dimension(), terms)
}

pub(crate) fn vpp_from_parts(
    kinetic: f64,
    wn1: f64,
    wn2: f64,
    dimension: u32,
    terms: &NonlinearTerms,
) -> f64 {
    let n = dimension as f64;
    8.0 * kinetic
        + 4.0 * terms.lambda1 * (n * terms.p1 + 2.0 * terms.b1) / (terms.p1 + 2.0) * wn1
        + 4.0 * terms.lambda2 * (n * terms.p2 + 2.0 * terms.b2) / (terms.p2 + 2.0) * wn2
}

/// The constant `c` in `y'(t) ≥ c‖∇u‖²` from the blow-up argument:
/// `(Np₂-4+2b₂)/2` for cases i/ii, `(Np₁-4+2b₁)/2` for cases iii/iv, and the
/// configured margin ε for case v.
pub fn blowup_coefficient(
    params: &ProblemParams,
    verdict: &RegimeVerdict,
) -> Result<f64, ObservablesError> {
    blowup_coefficient_with_epsilon(params, verdict, DEFAULT_CASE_V_EPSILON)
}

pub fn blowup_coefficient_with_epsilon(
    params: &ProblemParams,
    verdict: &RegimeVerdict,
    case_v_epsilon: f64,
) -> Result<f64, ObservablesError> {
    let n = params.dimension as f64;
    match verdict.kind {
        RegimeKind::BlowupCaseI | RegimeKind::BlowupCaseII => {
            Ok((n * params.p2_f64() - 4.0 + 2.0 * params.b2_f64()) / 2.0)
        }
        RegimeKind::BlowupCaseIII | RegimeKind::BlowupCaseIV => {
            Ok((n * params.p1_f64() - 4.0 + 2.0 * params.b1_f64()) / 2.0)
        }
        RegimeKind::BlowupCaseV => Ok(case_v_epsilon),
        other => Err(ObservablesError::NotABlowupRegime(other)),
    }
}

/// Upper bound `T* ≤ ‖xu₀‖²/(c·y₀)` on the blow-up time from the virial ODE
/// argument (`‖xu₀‖² = V(0)`).
pub fn blowup_time_bound(coefficient: f64, y0: f64, variance0: f64) -> f64 {
    variance0 / (coefficient * y0)
}

/// One diagnostics row. The CSV column order is fixed:
/// `t, mass, energy, kinetic, wn1, wn2, V, y, vpp_formula, max_amp, dt`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiagnosticsSample {
    pub t: f64,
    pub mass: f64,
    pub energy: f64,
    pub kinetic: f64,
    pub weighted_norm_1: f64,
    pub weighted_norm_2: f64,
    pub variance: f64,
    pub y: f64,
    pub vpp_formula: f64,
    pub max_amplitude: f64,
    pub dt_used: f64,
    /// Outermost-cell mass fraction; not part of the CSV contract, used to
    /// delimit the window where the truncated domain still represents ℝᴺ.
    #[serde(skip)]
    pub tail_fraction: f64,
}

pub const DIAGNOSTICS_CSV_HEADER: &str = "t,mass,energy,kinetic,wn1,wn2,V,y,vpp_formula,max_amp,dt";

impl DiagnosticsSample {
    /// Assembles every monitored quantity from one field snapshot. A single
    /// derivative pass serves both `kinetic` and `y`.
    pub fn measure(field: &Field, terms: &NonlinearTerms, dt_used: f64) -> Self {
        let grid = field.grid();
        let deriv = radial_derivative(field);
        let mut mass = 0.0;
        let mut kin = 0.0;
        let mut wn1 = 0.0;
        let mut wn2 = 0.0;
        let mut var = 0.0;
        let mut y = 0.0;
        let mut max_nsq = 0.0f64;
        for (((u, du), &r), &w) in field
            .values()
            .iter()
            .zip(&deriv)
            .zip(grid.nodes())
            .zip(grid.weights())
        {
            let nsq = u.norm_sqr();
            max_nsq = max_nsq.max(nsq);
            mass += nsq * w;
            kin += du.norm_sqr() * w;
            var += r * r * nsq * w;
            y -= (u.conj() * du).im * r * w;
            if terms.lambda1 != 0.0 {
                wn1 += r.powf(-terms.b1) * modulus_pow(nsq, terms.p1 + 2.0) * w;
            }
            if terms.lambda2 != 0.0 {
                wn2 += r.powf(-terms.b2) * modulus_pow(nsq, terms.p2 + 2.0) * w;
            }
        }
        DiagnosticsSample {
            t: field.time,
            mass,
            energy: energy_from_parts(kin, wn1, wn2, terms),
            kinetic: kin,
            weighted_norm_1: wn1,
            weighted_norm_2: wn2,
            variance: var,
            y,
            vpp_formula: vpp_from_parts(kin, wn1, wn2, grid.dimension(), terms),
            max_amplitude: max_nsq.sqrt(),
            dt_used,
            tail_fraction: field.tail_fraction(),
        }
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.t,
            self.mass,
            self.energy,
            self.kinetic,
            self.weighted_norm_1,
            self.weighted_norm_2,
            self.variance,
            self.y,
            self.vpp_formula,
            self.max_amplitude,
            self.dt_used
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::RadialGrid;
    use crate::params::Rational;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn rel_err(got: f64, want: f64) -> f64 {
        (got - want).abs() / want.abs()
    }

    fn gaussian_field(amplitude: f64) -> Field {
        let grid = RadialGrid::new(3, 20.0, 4096).unwrap();
        Field::chirped_gaussian(grid, amplitude, 1.0, 0.0)
    }

    fn reference_params() -> ProblemParams {
        ProblemParams::new(
            3,
            1.0,
            1.0,
            Rational::from(1),
            Rational::from(3),
            Rational::new(1, 2),
            Rational::new(1, 2),
        )
        .unwrap()
    }

    #[test]
    fn mass_of_gaussian() {
        // ∫ e^{-2r²} dx = (π/2)^{3/2} ≈ 1.96870, and mass scales as A².
        let exact = (PI / 2.0).powf(1.5);
        assert!(rel_err(mass(&gaussian_field(1.0)), exact) < 1e-6);
        assert!(rel_err(mass(&gaussian_field(2.0)), 4.0 * exact) < 1e-6);

        let grid = RadialGrid::new(3, 20.0, 256).unwrap();
        let zero = Field::from_profile(grid, |_| Complex64::new(0.0, 0.0));
        assert_eq!(mass(&zero), 0.0);
    }

    #[test]
    fn weighted_norm_closed_form() {
        // ∫ r^{-1/2} e^{-3r²} dx = 4π Γ(5/4)/(2·3^{5/4}) for the cubic power
        // of the unit Gaussian.
        let f = gaussian_field(1.0);
        let gamma_5_4 = 0.906_402_477_055_477;
        let exact = 4.0 * PI * gamma_5_4 / (2.0 * 3.0f64.powf(1.25));
        assert!(rel_err(weighted_norm(&f, 3.0, 0.5).unwrap(), exact) < 1e-5);

        // b = 0 reduces to the plain Lᵖ integral.
        let plain = weighted_norm(&f, 2.0, 0.0).unwrap();
        assert!(rel_err(plain, mass(&f)) < 1e-14);

        assert!(weighted_norm(&f, 3.0, 3.0).is_err());
        assert!(weighted_norm(&f, 0.5, 0.1).is_err());
    }

    #[test]
    fn amplitude_scaling_of_norms() {
        let f1 = gaussian_field(1.0);
        let f3 = gaussian_field(3.0);
        let p = 3.0;
        let w1 = weighted_norm(&f1, p, 0.4).unwrap();
        let w3 = weighted_norm(&f3, p, 0.4).unwrap();
        assert!(rel_err(w3, 3.0f64.powf(p) * w1) < 1e-12);
    }

    #[test]
    fn kinetic_energy_closed_form() {
        // ‖∇ e^{-r²}‖² = ∫ 4r² e^{-2r²} dx = 3 (π/2)^{3/2}.
        let f = gaussian_field(1.0);
        let exact = 3.0 * (PI / 2.0).powf(1.5);
        assert!(rel_err(kinetic(&f), exact) < 1e-5);

        // Coupling-free energy is half the kinetic term.
        let e = energy_with_terms(&f, &NonlinearTerms::linear());
        assert!(rel_err(e, exact / 2.0) < 1e-5);
    }

    #[test]
    fn energy_turns_negative_at_large_amplitude() {
        // With a focusing critical term the quintic contribution wins for
        // large A, so E(A) has a single sign change on the growing branch.
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
        let energy_of = |a: f64| energy(&gaussian_field(a), &params);
        assert!(energy_of(0.5) > 0.0);
        assert!(energy_of(6.0) < 0.0);
        let (mut lo, mut hi) = (0.5, 6.0);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if energy_of(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!(energy_of(hi * 1.01) < 0.0);
        assert!(energy_of(lo * 0.99) > 0.0);
    }

    #[test]
    fn variance_of_gaussian() {
        // ∫ r² e^{-2r²} dx = (3/4)(π/2)^{3/2}.
        let exact = 0.75 * (PI / 2.0).powf(1.5);
        assert!(rel_err(variance(&gaussian_field(1.0)), exact) < 1e-6);
    }

    #[test]
    fn virial_y_vanishes_for_real_fields() {
        let y = virial_y(&gaussian_field(1.3));
        assert!(y.abs() < 1e-12);
    }

    #[test]
    fn virial_y_of_chirped_gaussian() {
        // u = e^{-r²} e^{-icr²} gives y = 2c ∫ r²|u|² dx = 2c V.
        let grid = RadialGrid::new(3, 20.0, 4096).unwrap();
        for c in [0.25, 1.0, 4.0] {
            let f = Field::chirped_gaussian(grid.clone(), 1.0, 1.0, c);
            let y = virial_y(&f);
            let v = variance(&f);
            assert!(rel_err(y, 2.0 * c * v) < 1e-3, "c = {c}: y = {y}, 2cV = {}", 2.0 * c * v);
        }
    }

    #[test]
    fn vpp_formula_matches_parts() {
        let params = reference_params();
        let f = gaussian_field(1.0);
        let k = kinetic(&f);
        let wn1 = weighted_norm(&f, 3.0, 0.5).unwrap();
        let wn2 = weighted_norm(&f, 5.0, 0.5).unwrap();
        // N=3, p1=1, b1=1/2: coefficient 4·(3+1)/3; p2=3, b2=1/2: 4·(9+1)/5.
        let expect = 8.0 * k + (16.0 / 3.0) * wn1 + 8.0 * wn2;
        assert!(rel_err(virial_vpp(&f, &params), expect) < 1e-12);

        let grid = RadialGrid::new(3, 20.0, 256).unwrap();
        let zero = Field::from_profile(grid, |_| Complex64::new(0.0, 0.0));
        assert_eq!(virial_vpp(&zero, &params), 0.0);
    }

    #[test]
    fn blowup_coefficients() {
        use crate::params::{classify_blowup, classify_global};
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
        let v = classify_blowup(&params, -0.1, 1.0, 0.3, 1.0).unwrap();
        // c = (N p2 - 4 + 2 b2)/2 = (9 - 4 + 1)/2 = 3 for case i.
        assert_eq!(blowup_coefficient(&params, &v).unwrap(), 3.0);
        assert_eq!(blowup_time_bound(3.0, 0.5, 1.5), 1.0);

        let params_iii = ProblemParams::new(
            3,
            -1.0,
            -1.0,
            Rational::from(2),
            Rational::from(3),
            Rational::new(2, 5),
            Rational::new(1, 2),
        )
        .unwrap();
        let v3 = classify_blowup(&params_iii, -1.0, 1.0, 0.3, 1.0).unwrap();
        // c = (N p1 - 4 + 2 b1)/2 = (6 - 4 + 0.8)/2 = 1.4 for case iii.
        assert!((blowup_coefficient(&params_iii, &v3).unwrap() - 1.4).abs() < 1e-15);

        let g = classify_global(&reference_params());
        assert!(blowup_coefficient(&reference_params(), &g).is_err());
    }

    #[test]
    fn sample_energy_identity_is_exact() {
        let params = reference_params();
        let terms = NonlinearTerms::from_params(&params);
        let f = gaussian_field(1.7);
        let s = DiagnosticsSample::measure(&f, &terms, 1e-3);
        let reconstructed =
            energy_from_parts(s.kinetic, s.weighted_norm_1, s.weighted_norm_2, &terms);
        assert_eq!(s.energy, reconstructed);
        assert!(s.mass >= 0.0 && s.kinetic >= 0.0 && s.variance >= 0.0);
        assert!(s.weighted_norm_1 >= 0.0 && s.weighted_norm_2 >= 0.0);
    }
}
