//! Parameter validation, Schrödinger-admissible exponent calculus, and the
//! regime classifiers.
//!
//! All exponent arithmetic is exact: powers and inhomogeneity exponents are
//! kept as arbitrary-precision rationals, so identities like
//! `2/γ + N/ρ = N/2` and the criticality constraint `p₂ = (4-2b₂)/(N-2)` are
//! decided without floating-point slack. Couplings λ₁, λ₂ enter the
//! classifiers only through their signs and stay `f64`.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Absolute tolerance accepted when snapping a floating-point input to the
/// exact rational it is meant to represent.
pub const FLOAT_INPUT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParamsError {
    #[error("dimension N = {0} out of range (supported: 3, 4, 5)")]
    DimensionOutOfRange(i64),
    #[error("coupling {name} must be a nonzero finite real, got {value}")]
    CouplingZero { name: &'static str, value: f64 },
    #[error("exponent constraint `{constraint}` violated: left = {left}, right = {right}")]
    ExponentOutOfRange {
        constraint: String,
        left: f64,
        right: f64,
    },
    #[error("mass must be positive, got {0}")]
    NonPositiveMass(f64),
    #[error("cannot express `{0}` as a rational number")]
    NotRational(String),
}

/// Arbitrary-precision rational scalar used for all exponent arithmetic.
///
/// Displays as a reduced fraction (`2/5`) or plain integer (`3`); parses
/// fractions, integers, and decimal literals exactly.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "rational with zero denominator");
        Rational(BigRational::new(numer.into(), denom.into()))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn recip(&self) -> Self {
        Rational(self.0.clone().recip())
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    /// Exact rational from a float. Prefers the small-denominator value the
    /// float was rounded from (e.g. `0.4 -> 2/5`) when it round-trips within
    /// [`FLOAT_INPUT_TOLERANCE`]; otherwise falls back to the exact binary
    /// expansion.
    pub fn from_f64(x: f64) -> Result<Self, ParamsError> {
        if !x.is_finite() {
            return Err(ParamsError::NotRational(format!("{x}")));
        }
        if x == x.trunc() && x.abs() < 9.0e15 {
            return Ok(Rational(BigRational::from_integer(BigInt::from(
                x as i64,
            ))));
        }
        if let Some(approx) = num_rational::Rational64::approximate_float(x) {
            let back = *approx.numer() as f64 / *approx.denom() as f64;
            if (back - x).abs() <= FLOAT_INPUT_TOLERANCE * x.abs().max(1.0) {
                return Ok(Rational(BigRational::new(
                    (*approx.numer()).into(),
                    (*approx.denom()).into(),
                )));
            }
        }
        BigRational::from_float(x)
            .map(Rational)
            .ok_or_else(|| ParamsError::NotRational(format!("{x}")))
    }
}

impl From<i64> for Rational {
    fn from(v: i64) -> Self {
        Rational(BigRational::from_integer(v.into()))
    }
}

macro_rules! rational_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((self.0).$method(rhs.0))
            }
        }
        impl $trait<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
    };
}

rational_binop!(Add, add);
rational_binop!(Sub, sub);
rational_binop!(Mul, mul);
rational_binop!(Div, div);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl FromStr for Rational {
    type Err = ParamsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || ParamsError::NotRational(s.to_string());
        if let Some((num, den)) = s.split_once('/') {
            let n = BigInt::from_str(num.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(den.trim()).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            return Ok(Rational(BigRational::new(n, d)));
        }
        if let Ok(n) = BigInt::from_str(s) {
            return Ok(Rational(BigRational::from_integer(n)));
        }
        // Decimal literal, possibly with exponent: parse digits exactly.
        let (mantissa, exp) = match s.split_once(['e', 'E']) {
            Some((m, e)) => (m, i64::from_str(e.trim()).map_err(|_| bad())?),
            None => (s, 0),
        };
        let (sign, digits) = match mantissa.strip_prefix('-') {
            Some(rest) => (-1, rest),
            None => (1, mantissa.strip_prefix('+').unwrap_or(mantissa)),
        };
        let (int_part, frac_part) = match digits.split_once('.') {
            Some((i, fr)) => (i, fr),
            None => (digits, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad());
        }
        let mut joined = String::with_capacity(int_part.len() + frac_part.len());
        joined.push_str(int_part);
        joined.push_str(frac_part);
        let joined = if joined.is_empty() { "0" } else { &joined };
        let value = BigInt::from_str(joined).map_err(|_| bad())?;
        let scale = frac_part.len() as i64 - exp;
        let ten = BigInt::from(10);
        let rational = if scale >= 0 {
            BigRational::new(value, ten.pow(scale as u32))
        } else {
            BigRational::from_integer(value * ten.pow((-scale) as u32))
        };
        Ok(Rational(BigRational::from_integer(sign.into()) * rational))
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct V;
        impl serde::de::Visitor<'_> for V {
            type Value = Rational;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a rational as a string (\"2/5\", \"0.4\"), integer, or float")
            }
            fn visit_str<E: serde::de::Error>(self, s: &str) -> Result<Rational, E> {
                Rational::from_str(s).map_err(E::custom)
            }
            fn visit_i64<E: serde::de::Error>(self, v: i64) -> Result<Rational, E> {
                Ok(Rational::from(v))
            }
            fn visit_u64<E: serde::de::Error>(self, v: u64) -> Result<Rational, E> {
                Ok(Rational(BigRational::from_integer(v.into())))
            }
            fn visit_f64<E: serde::de::Error>(self, v: f64) -> Result<Rational, E> {
                Rational::from_f64(v).map_err(E::custom)
            }
        }
        deserializer.deserialize_any(V)
    }
}

fn q(v: i64) -> Rational {
    Rational::from(v)
}

/// Upper bound `min{2, (6-N)/2}` for both inhomogeneity exponents.
pub fn inhomogeneity_sup(dimension: u32) -> Rational {
    q(2).min(Rational::new(6 - dimension as i64, 2))
}

/// The energy-critical power `(4 - 2b)/(N - 2)`.
pub fn critical_power(dimension: u32, b: &Rational) -> Rational {
    (q(4) - q(2) * b.clone()) / q(dimension as i64 - 2)
}

/// The model parameters `(N, λ₁, λ₂, p₁, p₂, b₁, b₂)`, validated so that the
/// second nonlinearity sits exactly at the energy-critical exponent and both
/// weights are admissible for the dimension.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProblemParams {
    pub dimension: u32,
    pub lambda1: f64,
    pub lambda2: f64,
    pub p1: Rational,
    pub p2: Rational,
    pub b1: Rational,
    pub b2: Rational,
}

impl ProblemParams {
    /// Validates every constraint; rational inputs are compared exactly.
    ///
    /// Constraints: `N ∈ {3,4,5}`, `λ₁ λ₂ ≠ 0`,
    /// `0 < b₁, b₂ < min{2, (6-N)/2}` (open interval),
    /// `0 < p₁ < (4-2b₁)/(N-2)` (open), and `p₂ = (4-2b₂)/(N-2)` exactly.
    pub fn new(
        dimension: u32,
        lambda1: f64,
        lambda2: f64,
        p1: Rational,
        p2: Rational,
        b1: Rational,
        b2: Rational,
    ) -> Result<Self, ParamsError> {
        if !(3..=5).contains(&dimension) {
            return Err(ParamsError::DimensionOutOfRange(dimension as i64));
        }
        for (name, value) in [("lambda1", lambda1), ("lambda2", lambda2)] {
            if value == 0.0 || !value.is_finite() {
                return Err(ParamsError::CouplingZero { name, value });
            }
        }
        let sup = inhomogeneity_sup(dimension);
        for (name, b) in [("b1", &b1), ("b2", &b2)] {
            if !b.is_positive() || *b >= sup {
                return Err(ParamsError::ExponentOutOfRange {
                    constraint: format!("0 < {name} < min(2, (6-N)/2) = {sup}"),
                    left: b.to_f64(),
                    right: sup.to_f64(),
                });
            }
        }
        let p1_sup = critical_power(dimension, &b1);
        if !p1.is_positive() || p1 >= p1_sup {
            return Err(ParamsError::ExponentOutOfRange {
                constraint: format!("0 < p1 < (4-2*b1)/(N-2) = {p1_sup}"),
                left: p1.to_f64(),
                right: p1_sup.to_f64(),
            });
        }
        let p2_crit = critical_power(dimension, &b2);
        if p2 != p2_crit {
            return Err(ParamsError::ExponentOutOfRange {
                constraint: format!("p2 = (4-2*b2)/(N-2) = {p2_crit} (energy criticality)"),
                left: p2.to_f64(),
                right: p2_crit.to_f64(),
            });
        }
        Ok(ProblemParams {
            dimension,
            lambda1,
            lambda2,
            p1,
            p2,
            b1,
            b2,
        })
    }

    /// Float entry point: each exponent is snapped to the nearest exact
    /// rational within `1e-12`; in particular a `p2` within `1e-12` of the
    /// critical power is accepted and stored as the exact critical value.
    pub fn from_f64(
        dimension: u32,
        lambda1: f64,
        lambda2: f64,
        p1: f64,
        p2: f64,
        b1: f64,
        b2: f64,
    ) -> Result<Self, ParamsError> {
        if !(3..=5).contains(&dimension) {
            return Err(ParamsError::DimensionOutOfRange(dimension as i64));
        }
        let b1 = Rational::from_f64(b1)?;
        let b2 = Rational::from_f64(b2)?;
        let p1 = Rational::from_f64(p1)?;
        let crit = critical_power(dimension, &b2);
        let p2 = if (p2 - crit.to_f64()).abs() <= FLOAT_INPUT_TOLERANCE * p2.abs().max(1.0) {
            crit
        } else {
            Rational::from_f64(p2)?
        };
        ProblemParams::new(dimension, lambda1, lambda2, p1, p2, b1, b2)
    }

    pub fn p1_f64(&self) -> f64 {
        self.p1.to_f64()
    }
    pub fn p2_f64(&self) -> f64 {
        self.p2.to_f64()
    }
    pub fn b1_f64(&self) -> f64 {
        self.b1.to_f64()
    }
    pub fn b2_f64(&self) -> f64 {
        self.b2.to_f64()
    }
}

/// An exponent pair `(γ, ρ)` with no admissibility guarantee (time exponent
/// first). Used for the Sobolev-shifted `Z` pair, which deliberately fails
/// the L²-admissibility identity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentPair {
    pub gamma: Rational,
    pub rho: Rational,
}

impl ExponentPair {
    /// Exact defect `2/γ + N/ρ - N/2` of the L²-admissibility identity.
    pub fn admissibility_defect(&self, dimension: u32) -> Rational {
        let n = q(dimension as i64);
        q(2) * self.gamma.recip() + n.clone() * self.rho.recip() - n / q(2)
    }
}

impl fmt::Display for ExponentPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.gamma, self.rho)
    }
}

/// A Schrödinger-admissible (L²-admissible) pair: `2/γ + N/ρ = N/2` exactly,
/// with `γ ≥ 2` and `2 ≤ ρ ≤ 2N/(N-2)`.
///
/// The range constraint is stated on the space exponent; together with the
/// identity it is equivalent to `γ ∈ [2, ∞]`, which is the form under which
/// the pairs `(γ_b, ρ_b)` and the `W⁰`/`V⁰` families are admissible.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdmissiblePair {
    pub gamma: Rational,
    pub rho: Rational,
}

impl AdmissiblePair {
    pub fn new(gamma: Rational, rho: Rational, dimension: u32) -> Result<Self, ParamsError> {
        let pair = ExponentPair {
            gamma: gamma.clone(),
            rho: rho.clone(),
        };
        let defect = pair.admissibility_defect(dimension);
        if defect != Rational::zero() {
            return Err(ParamsError::ExponentOutOfRange {
                constraint: format!("2/gamma + N/rho = N/2 for ({gamma}, {rho})"),
                left: q(dimension as i64).to_f64() / 2.0 + defect.to_f64(),
                right: dimension as f64 / 2.0,
            });
        }
        if gamma < q(2) {
            return Err(ParamsError::ExponentOutOfRange {
                constraint: format!("gamma >= 2 for ({gamma}, {rho})"),
                left: gamma.to_f64(),
                right: 2.0,
            });
        }
        let rho_sup = Rational::new(2 * dimension as i64, dimension as i64 - 2);
        if rho < q(2) || rho > rho_sup {
            return Err(ParamsError::ExponentOutOfRange {
                constraint: format!("2 <= rho <= 2N/(N-2) for ({gamma}, {rho})"),
                left: rho.to_f64(),
                right: rho_sup.to_f64(),
            });
        }
        Ok(AdmissiblePair { gamma, rho })
    }

    pub fn as_pair(&self) -> ExponentPair {
        ExponentPair {
            gamma: self.gamma.clone(),
            rho: self.rho.clone(),
        }
    }

    /// The compensated perturbation `(1/γ ∓ η/2, 1/ρ ± η/N)`: sign applies to
    /// the space exponent, the time exponent moves the opposite way, so the
    /// admissibility identity is preserved exactly.
    pub fn perturbed(
        &self,
        sign: i64,
        eta: &Rational,
        dimension: u32,
    ) -> Result<AdmissiblePair, ParamsError> {
        let s = q(sign.signum());
        let inv_gamma = self.gamma.recip() - s.clone() * eta.clone() / q(2);
        let inv_rho = self.rho.recip() + s * eta.clone() / q(dimension as i64);
        AdmissiblePair::new(inv_gamma.recip(), inv_rho.recip(), dimension)
    }
}

impl fmt::Display for AdmissiblePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.gamma, self.rho)
    }
}

/// The intercritical pair `(γ_b, ρ_b) = (4(p+2)/(p(N-2)+2b), N(p+2)/(N+p-b))`.
///
/// Requires `0 < p <= (4-2b)/(N-2)` (the critical power itself is admitted;
/// the pair stays admissible there) and `0 < b < min{2, N/2}`. The returned
/// pair satisfies the admissibility identity exactly.
pub fn intercritical_pair(
    p: &Rational,
    b: &Rational,
    dimension: u32,
) -> Result<AdmissiblePair, ParamsError> {
    if !(3..=5).contains(&dimension) {
        return Err(ParamsError::DimensionOutOfRange(dimension as i64));
    }
    let b_sup = q(2).min(Rational::new(dimension as i64, 2));
    if !b.is_positive() || *b >= b_sup {
        return Err(ParamsError::ExponentOutOfRange {
            constraint: format!("0 < b < min(2, N/2) = {b_sup}"),
            left: b.to_f64(),
            right: b_sup.to_f64(),
        });
    }
    let p_sup = critical_power(dimension, b);
    if !p.is_positive() || *p > p_sup {
        return Err(ParamsError::ExponentOutOfRange {
            constraint: format!("0 < p <= (4-2b)/(N-2) = {p_sup}"),
            left: p.to_f64(),
            right: p_sup.to_f64(),
        });
    }
    let n = q(dimension as i64);
    let p2 = p.clone() + q(2);
    let gamma = q(4) * p2.clone() / (p.clone() * (n.clone() - q(2)) + q(2) * b.clone());
    let rho = n.clone() * p2 / (n + p.clone() - b.clone());
    AdmissiblePair::new(gamma, rho, dimension)
}

/// Exponent pairs of the auxiliary Strichartz spaces for a given critical
/// weight `b₂`, plus the η-perturbed companions of `W⁰` and `V⁰`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WvzExponents {
    pub w0: AdmissiblePair,
    pub v0: AdmissiblePair,
    /// Sobolev-shifted pair: `2/γ + N/ρ = (N-2)/2`, not L²-admissible.
    pub z: ExponentPair,
    pub w_plus: AdmissiblePair,
    pub w_minus: AdmissiblePair,
    pub v_plus: AdmissiblePair,
    pub v_minus: AdmissiblePair,
    pub eta: Rational,
}

/// Default perturbation offset for the ± pairs.
pub fn default_eta() -> Rational {
    Rational::new(1, 1000)
}

/// Computes the `W⁰`, `V⁰`, `Z` exponent pairs
///
/// ```text
/// W⁰ = (2(N+2-2b₂)/(N-2),  2N(N+2-2b₂)/(N²+4-2b₂N))
/// V⁰ = (2(N+2-2b₂)/(N-b₂), 2N(N+2-2b₂)/(N²+2b₂-2b₂N))
/// Z  = (2(N+2-2b₂)/(N-2),  2N(N+2-2b₂)/((N-2b₂)(N-2)))
/// ```
///
/// together with the ± perturbations of `W⁰` and `V⁰` at offset `eta`
/// (`eta = 0` reproduces the unperturbed pairs).
pub fn wvz_exponents(
    dimension: u32,
    b2: &Rational,
    eta: &Rational,
) -> Result<WvzExponents, ParamsError> {
    if !(3..=5).contains(&dimension) {
        return Err(ParamsError::DimensionOutOfRange(dimension as i64));
    }
    let sup = inhomogeneity_sup(dimension);
    if !b2.is_positive() || *b2 >= sup {
        return Err(ParamsError::ExponentOutOfRange {
            constraint: format!("0 < b2 < min(2, (6-N)/2) = {sup}"),
            left: b2.to_f64(),
            right: sup.to_f64(),
        });
    }
    if eta.0.is_negative() {
        return Err(ParamsError::ExponentOutOfRange {
            constraint: "eta >= 0".into(),
            left: eta.to_f64(),
            right: 0.0,
        });
    }
    let n = q(dimension as i64);
    let common = n.clone() + q(2) - q(2) * b2.clone();
    let w0 = AdmissiblePair::new(
        q(2) * common.clone() / (n.clone() - q(2)),
        q(2) * n.clone() * common.clone()
            / (n.clone() * n.clone() + q(4) - q(2) * b2.clone() * n.clone()),
        dimension,
    )?;
    let v0 = AdmissiblePair::new(
        q(2) * common.clone() / (n.clone() - b2.clone()),
        q(2) * n.clone() * common.clone()
            / (n.clone() * n.clone() + q(2) * b2.clone() - q(2) * b2.clone() * n.clone()),
        dimension,
    )?;
    let z = ExponentPair {
        gamma: q(2) * common.clone() / (n.clone() - q(2)),
        rho: q(2) * n.clone() * common / ((n.clone() - q(2) * b2.clone()) * (n - q(2))),
    };
    Ok(WvzExponents {
        w_plus: w0.perturbed(1, eta, dimension)?,
        w_minus: w0.perturbed(-1, eta, dimension)?,
        v_plus: v0.perturbed(1, eta, dimension)?,
        v_minus: v0.perturbed(-1, eta, dimension)?,
        w0,
        v0,
        z,
        eta: eta.clone(),
    })
}

/// Which theorem case (if any) a parameter tuple falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegimeKind {
    GlobalCase1,
    GlobalCase2,
    GlobalCase3,
    BlowupCaseI,
    BlowupCaseII,
    BlowupCaseIII,
    BlowupCaseIV,
    BlowupCaseV,
    Unclassified,
}

impl RegimeKind {
    pub fn is_global(self) -> bool {
        matches!(
            self,
            RegimeKind::GlobalCase1 | RegimeKind::GlobalCase2 | RegimeKind::GlobalCase3
        )
    }

    pub fn is_blowup(self) -> bool {
        matches!(
            self,
            RegimeKind::BlowupCaseI
                | RegimeKind::BlowupCaseII
                | RegimeKind::BlowupCaseIII
                | RegimeKind::BlowupCaseIV
                | RegimeKind::BlowupCaseV
        )
    }
}

impl fmt::Display for RegimeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// One evaluated inequality: `left (op) right` with the recorded outcome.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Condition {
    pub name: String,
    pub holds: bool,
    pub left: f64,
    pub right: f64,
}

/// Classifier output: the first matching case in the stated order, plus every
/// inequality that was evaluated on the way (including later cases, so
/// overlaps remain visible).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimeVerdict {
    pub kind: RegimeKind,
    pub evaluated_conditions: Vec<Condition>,
}

struct CaseBuilder {
    conditions: Vec<Condition>,
}

impl CaseBuilder {
    fn new() -> Self {
        CaseBuilder {
            conditions: Vec::new(),
        }
    }

    fn cond(&mut self, name: &str, holds: bool, left: f64, right: f64) -> bool {
        self.conditions.push(Condition {
            name: name.to_string(),
            holds,
            left,
            right,
        });
        holds
    }

    fn lt(&mut self, name: &str, left: &Rational, right: &Rational) -> bool {
        self.cond(name, left < right, left.to_f64(), right.to_f64())
    }

    fn le(&mut self, name: &str, left: &Rational, right: &Rational) -> bool {
        self.cond(name, left <= right, left.to_f64(), right.to_f64())
    }
}

/// `N(p₂-p₁)/(p₂+2)`, the upper threshold for `b₁` in the mixed cases.
fn b1_mixed_threshold(params: &ProblemParams) -> Rational {
    let n = q(params.dimension as i64);
    n * (params.p2.clone() - params.p1.clone()) / (params.p2.clone() + q(2))
}

/// Classifies a parameter tuple against the three global-existence cases:
///
/// 1. `λ₁, λ₂ > 0`;
/// 2. `λ₁ > 0, λ₂ < 0, p₁ < p₂, (p₁/p₂) b₂ ≤ b₁ < b₂`;
/// 3. `λ₁ > 0, λ₂ < 0, b₂ < b₁ < N(p₂-p₁)/(p₂+2)`.
///
/// Returns the first match in that order, `Unclassified` otherwise. Pure:
/// identical inputs yield identical verdicts and condition lists.
pub fn classify_global(params: &ProblemParams) -> RegimeVerdict {
    let mut cb = CaseBuilder::new();
    let l1_pos = params.lambda1 > 0.0;
    let l2_pos = params.lambda2 > 0.0;
    let l2_neg = params.lambda2 < 0.0;

    let case1 = cb.cond("global1.lambda1_positive", l1_pos, params.lambda1, 0.0)
        & cb.cond("global1.lambda2_positive", l2_pos, params.lambda2, 0.0);

    let ratio_bound = params.p1.clone() / params.p2.clone() * params.b2.clone();
    let case2 = cb.cond("global2.lambda1_positive", l1_pos, params.lambda1, 0.0)
        & cb.cond("global2.lambda2_negative", l2_neg, params.lambda2, 0.0)
        & cb.lt("global2.p1_lt_p2", &params.p1, &params.p2)
        & cb.le("global2.p1_over_p2_b2_le_b1", &ratio_bound, &params.b1)
        & cb.lt("global2.b1_lt_b2", &params.b1, &params.b2);

    let threshold = b1_mixed_threshold(params);
    let case3 = cb.cond("global3.lambda1_positive", l1_pos, params.lambda1, 0.0)
        & cb.cond("global3.lambda2_negative", l2_neg, params.lambda2, 0.0)
        & cb.lt("global3.b2_lt_b1", &params.b2, &params.b1)
        & cb.lt("global3.b1_lt_N(p2-p1)/(p2+2)", &params.b1, &threshold);

    let kind = if case1 {
        RegimeKind::GlobalCase1
    } else if case2 {
        RegimeKind::GlobalCase2
    } else if case3 {
        RegimeKind::GlobalCase3
    } else {
        RegimeKind::Unclassified
    };
    RegimeVerdict {
        kind,
        evaluated_conditions: cb.conditions,
    }
}

/// Classifies initial data against the five finite-time blow-up cases. All
/// cases require `λ₂ < 0` and `y₀ > 0`; the energy/mass conditions use the
/// supplied `e0`, `m0`, and (for case v) the caller-chosen large constant.
///
/// Case list, first match wins:
///
/// - i:   `λ₁ > 0, p₁ < p₂, b₁ < b₂, E < 0`
/// - ii:  `λ₁ > 0, b₁ < N(p₂-p₁)/(p₂+2), E < 0`
/// - iii: `λ₁ < 0, (4-2b₁)/N < p₁ < p₂, b₁ < b₂, E < 0`
/// - iv:  `λ₁ < 0, (4-2b₁)/N < p₁, b₁ < N(p₂-p₁)/(p₂+2), E < 0`
/// - v:   `λ₁ < 0, p₁ < p₂, (p₁/p₂) b₂ ≤ b₁ ≤ b₂, E + C·M < 0`
pub fn classify_blowup(
    params: &ProblemParams,
    e0: f64,
    m0: f64,
    y0: f64,
    c_large: f64,
) -> Result<RegimeVerdict, ParamsError> {
    if m0 <= 0.0 || !m0.is_finite() {
        return Err(ParamsError::NonPositiveMass(m0));
    }
    let mut cb = CaseBuilder::new();
    let gate = cb.cond(
        "blowup.lambda2_negative",
        params.lambda2 < 0.0,
        params.lambda2,
        0.0,
    ) & cb.cond("blowup.y0_positive", y0 > 0.0, y0, 0.0);

    let l1_pos = params.lambda1 > 0.0;
    let l1_neg = params.lambda1 < 0.0;
    let e_neg = cb.cond("blowup.energy_negative", e0 < 0.0, e0, 0.0);
    let threshold = b1_mixed_threshold(params);
    let mass_sub = (q(4) - q(2) * params.b1.clone()) / q(params.dimension as i64);
    let ratio_bound = params.p1.clone() / params.p2.clone() * params.b2.clone();

    let case_i = cb.cond("blowup_i.lambda1_positive", l1_pos, params.lambda1, 0.0)
        & cb.lt("blowup_i.p1_lt_p2", &params.p1, &params.p2)
        & cb.lt("blowup_i.b1_lt_b2", &params.b1, &params.b2)
        & e_neg;
    let case_ii = cb.cond("blowup_ii.lambda1_positive", l1_pos, params.lambda1, 0.0)
        & cb.lt("blowup_ii.b1_lt_N(p2-p1)/(p2+2)", &params.b1, &threshold)
        & e_neg;
    let case_iii = cb.cond("blowup_iii.lambda1_negative", l1_neg, params.lambda1, 0.0)
        & cb.lt("blowup_iii.(4-2b1)/N_lt_p1", &mass_sub, &params.p1)
        & cb.lt("blowup_iii.p1_lt_p2", &params.p1, &params.p2)
        & cb.lt("blowup_iii.b1_lt_b2", &params.b1, &params.b2)
        & e_neg;
    let case_iv = cb.cond("blowup_iv.lambda1_negative", l1_neg, params.lambda1, 0.0)
        & cb.lt("blowup_iv.(4-2b1)/N_lt_p1", &mass_sub, &params.p1)
        & cb.lt("blowup_iv.b1_lt_N(p2-p1)/(p2+2)", &params.b1, &threshold)
        & e_neg;
    let case_v = cb.cond("blowup_v.lambda1_negative", l1_neg, params.lambda1, 0.0)
        & cb.lt("blowup_v.p1_lt_p2", &params.p1, &params.p2)
        & cb.le("blowup_v.p1_over_p2_b2_le_b1", &ratio_bound, &params.b1)
        & cb.le("blowup_v.b1_le_b2", &params.b1, &params.b2)
        & cb.cond(
            "blowup_v.energy_plus_C_mass_negative",
            e0 + c_large * m0 < 0.0,
            e0 + c_large * m0,
            0.0,
        );

    let kind = if !gate {
        RegimeKind::Unclassified
    } else if case_i {
        RegimeKind::BlowupCaseI
    } else if case_ii {
        RegimeKind::BlowupCaseII
    } else if case_iii {
        RegimeKind::BlowupCaseIII
    } else if case_iv {
        RegimeKind::BlowupCaseIV
    } else if case_v {
        RegimeKind::BlowupCaseV
    } else {
        RegimeKind::Unclassified
    };
    Ok(RegimeVerdict {
        kind,
        evaluated_conditions: cb.conditions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(s: &str) -> Rational {
        Rational::from_str(s).unwrap()
    }

    #[test]
    fn rational_parsing_and_display() {
        assert_eq!(r("2/5"), Rational::new(2, 5));
        assert_eq!(r("0.4"), Rational::new(2, 5));
        assert_eq!(r("-1.25e1"), Rational::new(-25, 2));
        assert_eq!(r("3").to_string(), "3");
        assert_eq!(r("6/4").to_string(), "3/2");
        assert!(Rational::from_str("1/0").is_err());
        assert_eq!(Rational::from_f64(0.4).unwrap(), Rational::new(2, 5));
        assert_eq!(Rational::from_f64(3.0).unwrap(), Rational::from(3));
    }

    #[test]
    fn validate_accepts_reference_tuple() {
        // (4 - 2*0.5)/(3 - 2) = 3 = p2.
        let p = ProblemParams::new(3, 1.0, 1.0, r("1"), r("3"), r("1/2"), r("1/2")).unwrap();
        assert_eq!(p.p2, r("3"));
    }

    #[test]
    fn validate_rejects_off_critical_p2() {
        let err =
            ProblemParams::new(3, 1.0, 1.0, r("1"), r("2.9"), r("1/2"), r("1/2")).unwrap_err();
        match err {
            ParamsError::ExponentOutOfRange { constraint, .. } => {
                assert!(constraint.contains("p2"), "got: {constraint}")
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn validate_rejects_bad_dimension_and_couplings() {
        assert!(matches!(
            ProblemParams::new(6, 1.0, 1.0, r("1"), r("1"), r("1/2"), r("1/2")),
            Err(ParamsError::DimensionOutOfRange(6))
        ));
        assert!(matches!(
            ProblemParams::new(3, 0.0, 1.0, r("1"), r("3"), r("1/2"), r("1/2")),
            Err(ParamsError::CouplingZero { .. })
        ));
    }

    #[test]
    fn constraint_region_is_open() {
        // b1 on the boundary min{2,(6-N)/2} = 3/2 for N = 3.
        assert!(ProblemParams::new(3, 1.0, 1.0, r("1"), r("3"), r("3/2"), r("1/2")).is_err());
        // p1 exactly critical for b1.
        assert!(ProblemParams::new(3, 1.0, 1.0, r("3"), r("3"), r("1/2"), r("1/2")).is_err());
        // b2 = 0.
        assert!(ProblemParams::new(3, 1.0, 1.0, r("1"), r("4"), r("1/2"), r("0")).is_err());
        // N = 5: bound is 1/2.
        assert!(ProblemParams::new(5, 1.0, 1.0, r("1/4"), r("1"), r("1/4"), r("1/2")).is_err());
    }

    #[test]
    fn intercritical_pair_reference_values() {
        let pair = intercritical_pair(&r("2"), &r("1/2"), 3).unwrap();
        assert_eq!(pair.gamma, r("16/3"));
        assert_eq!(pair.rho, r("8/3"));

        let pair = intercritical_pair(&r("3"), &r("1/2"), 3).unwrap();
        assert_eq!(pair.gamma, r("5"));
        assert_eq!(pair.rho, r("30/11"));

        // b = 0 is outside the stated range for this pair.
        assert!(intercritical_pair(&r("1"), &r("0"), 4).is_err());
        let pair = intercritical_pair(&r("1"), &r("1/1000"), 4).unwrap();
        assert_eq!(
            pair.as_pair().admissibility_defect(4),
            Rational::zero(),
            "identity must be exact"
        );
    }

    #[test]
    fn wvz_reference_values() {
        let e = wvz_exponents(3, &r("1/2"), &default_eta()).unwrap();
        // W0 = (2(N+2-2b)/(N-2), 2N(N+2-2b)/(N^2+4-2bN)) at N=3, b=1/2.
        assert_eq!(e.w0.gamma, r("8"));
        assert_eq!(e.w0.rho, r("12/5"));
        assert_eq!(e.z.gamma, r("8"));
        assert_eq!(e.z.rho, r("12"));
        // Z is the Sobolev-shifted pair: defect = (N-2)/2 - N/2 = -1.
        assert_eq!(e.z.admissibility_defect(3), r("-1"));

        let e4 = wvz_exponents(4, &r("1/2"), &default_eta()).unwrap();
        assert_eq!(e4.v0.gamma, r("20/7"));

        // eta = 0 reproduces the unperturbed pairs.
        let e0 = wvz_exponents(3, &r("1/2"), &Rational::zero()).unwrap();
        assert_eq!(e0.w_plus, e0.w0);
        assert_eq!(e0.w_minus, e0.w0);
        assert_eq!(e0.v_plus, e0.v0);
        assert_eq!(e0.v_minus, e0.v0);
    }

    #[test]
    fn classify_global_reference_verdicts() {
        let p = ProblemParams::new(3, 1.0, 1.0, r("1"), r("3"), r("1/2"), r("1/2")).unwrap();
        assert_eq!(classify_global(&p).kind, RegimeKind::GlobalCase1);

        // (p1/p2) b2 = (2/3)(1/2) = 1/3 <= 2/5 < 1/2.
        let p = ProblemParams::new(3, 1.0, -1.0, r("2"), r("3"), r("2/5"), r("1/2")).unwrap();
        assert_eq!(classify_global(&p).kind, RegimeKind::GlobalCase2);

        let p = ProblemParams::new(3, -1.0, -1.0, r("1"), r("3"), r("2/5"), r("1/2")).unwrap();
        assert_eq!(classify_global(&p).kind, RegimeKind::Unclassified);
    }

    #[test]
    fn classify_blowup_reference_verdicts() {
        let p = ProblemParams::new(3, 1.0, -1.0, r("1"), r("3"), r("2/5"), r("1/2")).unwrap();
        let v = classify_blowup(&p, -0.1, 1.0, 0.3, 1.0).unwrap();
        assert_eq!(v.kind, RegimeKind::BlowupCaseI);

        let v = classify_blowup(&p, 0.1, 1.0, 0.3, 1.0).unwrap();
        assert_eq!(v.kind, RegimeKind::Unclassified);

        // (4-2*b1)/N = (4-0.8)/3 = 16/15 < p1 = 2 < p2 = 3.
        let p = ProblemParams::new(3, -1.0, -1.0, r("2"), r("3"), r("2/5"), r("1/2")).unwrap();
        let v = classify_blowup(&p, -1.0, 1.0, 0.3, 1.0).unwrap();
        assert_eq!(v.kind, RegimeKind::BlowupCaseIII);

        assert!(matches!(
            classify_blowup(&p, -1.0, 0.0, 0.3, 1.0),
            Err(ParamsError::NonPositiveMass(_))
        ));
    }

    #[test]
    fn classifiers_are_pure() {
        let p = ProblemParams::new(3, 1.0, -1.0, r("2"), r("3"), r("2/5"), r("1/2")).unwrap();
        assert_eq!(classify_global(&p), classify_global(&p));
        assert_eq!(
            classify_blowup(&p, -0.3, 2.0, 0.1, 5.0).unwrap(),
            classify_blowup(&p, -0.3, 2.0, 0.1, 5.0).unwrap()
        );
    }

    #[test]
    fn global_case1_never_overlaps_blowup() {
        let p = ProblemParams::new(4, 2.0, 3.0, r("1/2"), r("3/2"), r("1/2"), r("1/2")).unwrap();
        let g = classify_global(&p);
        assert_eq!(g.kind, RegimeKind::GlobalCase1);
        // Case 1 forces lambda2 > 0, so the blow-up gate can never open.
        let b = classify_blowup(&p, -10.0, 1.0, 1.0, 100.0).unwrap();
        assert_eq!(b.kind, RegimeKind::Unclassified);
    }

    proptest! {
        #[test]
        fn intercritical_pair_is_admissible(
            num_b in 1i64..200,
            num_p in 1i64..200,
            dim in 3u32..=5,
        ) {
            // b uniform in (0, min(2, N/2)) and p in (0, (4-2b)/(N-2)), both
            // strictly interior via the num/201 fractions.
            let b_sup = q(2).min(Rational::new(dim as i64, 2));
            let b = Rational::new(num_b, 201) * b_sup;
            let p_sup = critical_power(dim, &b);
            let p = Rational::new(num_p, 201) * p_sup;
            let pair = intercritical_pair(&p, &b, dim).unwrap();
            prop_assert_eq!(pair.as_pair().admissibility_defect(dim), Rational::zero());
            prop_assert!(pair.gamma >= q(2));
            prop_assert!(pair.rho >= q(2));
            prop_assert!(pair.rho <= Rational::new(2 * dim as i64, dim as i64 - 2));
        }

        #[test]
        fn wvz_pairs_are_admissible(num_b in 1i64..100, dim in 3u32..=5) {
            let sup = inhomogeneity_sup(dim);
            let b2 = Rational::new(num_b, 101) * sup;
            let e = wvz_exponents(dim, &b2, &default_eta()).unwrap();
            for pair in [&e.w0, &e.v0, &e.w_plus, &e.w_minus, &e.v_plus, &e.v_minus] {
                prop_assert_eq!(pair.as_pair().admissibility_defect(dim), Rational::zero());
            }
        }
    }
}
