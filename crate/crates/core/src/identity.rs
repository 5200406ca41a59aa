//! The weighted functional
//!
//! ```text
//! I_f(λ, μ, a, b) = (λ - μ) f(2ab/(a+b)) + (1 - λ) f(a) + μ f(b)
//!                   - ab/(b - a) ∫_a^b f(u)/u² du
//! ```
//!
//! and its representation as a weighted integral of `f′` along the harmonic
//! path `u = ab/A_t`, `A_t = t b + (1 - t) a`.
//!
//! The harmonic-mean argument and the `ab/(b-a)` factor are what integrating
//! the right-hand side by parts produces; the frequently printed variant with
//! `f((a+b)/2)` and `2ab/(b-a)` is kept as [`paper_if_as_printed`] only to
//! demonstrate that it does not satisfy the identity.

use serde::{Deserialize, Serialize};

use crate::convexity::FunctionSpec;
use crate::quadrature::{integrate, QuadSettings};
use crate::{Error, Result};

/// Default tolerance for [`verify_lemma1`].
pub const IDENTITY_TOL: f64 = 1e-8;

/// One verification case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub a: f64,
    pub b: f64,
    pub s: f64,
    pub m: f64,
    pub q: f64,
    #[serde(rename = "lambda")]
    pub lambda_: f64,
    #[serde(rename = "mu")]
    pub mu_: f64,
    pub f: FunctionSpec,
}

impl Instance {
    /// Build an instance satisfying the bound hypotheses
    /// (`0 < a < b`, `s, m ∈ (0,1]`, `q ≥ 1`, `0 ≤ μ ≤ 1/2 ≤ λ ≤ 1`).
    #[allow(clippy::too_many_arguments)]
    pub fn new(a: f64, b: f64, s: f64, m: f64, q: f64, lambda_: f64, mu_: f64, f: FunctionSpec) -> Result<Self> {
        let inst = Self {
            a,
            b,
            s,
            m,
            q,
            lambda_,
            mu_,
            f,
        };
        inst.validate()?;
        Ok(inst)
    }

    /// An instance for the identity alone: only `a < b` and the domain matter,
    /// and λ, μ may be any reals. Class parameters default to `s = m = q = 1`.
    pub fn for_identity(a: f64, b: f64, lambda_: f64, mu_: f64, f: FunctionSpec) -> Result<Self> {
        let inst = Self {
            a,
            b,
            s: 1.0,
            m: 1.0,
            q: 1.0,
            lambda_,
            mu_,
            f,
        };
        inst.validate_interval()?;
        if !lambda_.is_finite() || !mu_.is_finite() {
            return Err(Error::Parameter("lambda and mu must be finite".into()));
        }
        Ok(inst)
    }

    pub fn validate_interval(&self) -> Result<()> {
        if !(self.a > 0.0 && self.a < self.b && self.b.is_finite()) {
            return Err(Error::Domain(format!(
                "need 0 < a < b, got a = {}, b = {}",
                self.a, self.b
            )));
        }
        if !(self.a > self.f.domain_lo) {
            return Err(Error::Domain(format!(
                "a = {} is outside the domain of f (> {})",
                self.a, self.f.domain_lo
            )));
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_interval()?;
        if !(self.s > 0.0 && self.s <= 1.0) {
            return Err(Error::Parameter(format!("s must lie in (0, 1], got {}", self.s)));
        }
        if !(self.m > 0.0 && self.m <= 1.0) {
            return Err(Error::Parameter(format!("m must lie in (0, 1], got {}", self.m)));
        }
        if !(self.q >= 1.0) || !self.q.is_finite() {
            return Err(Error::Parameter(format!("q must be at least 1, got {}", self.q)));
        }
        if !(0.0 <= self.mu_ && self.mu_ <= 0.5 && 0.5 <= self.lambda_ && self.lambda_ <= 1.0) {
            return Err(Error::Parameter(format!(
                "need 0 <= mu <= 1/2 <= lambda <= 1, got mu = {}, lambda = {}",
                self.mu_, self.lambda_
            )));
        }
        Ok(())
    }

    /// Same instance with different weights.
    pub fn with_weights(&self, lambda_: f64, mu_: f64) -> Self {
        Self {
            lambda_,
            mu_,
            ..self.clone()
        }
    }

    pub fn harmonic_mean(&self) -> f64 {
        2.0 * self.a * self.b / (self.a + self.b)
    }

    /// `A_t = t b + (1 - t) a`.
    pub fn a_t(&self, t: f64) -> f64 {
        t * self.b + (1.0 - t) * self.a
    }
}

/// The three classical weight choices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    /// λ = μ = 1/2
    Trapezoid,
    /// λ = 1, μ = 0
    Midpoint,
    /// λ = 5/6, μ = 1/6
    Simpson,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::Trapezoid, Preset::Midpoint, Preset::Simpson];

    /// `(λ, μ)`.
    pub fn weights(self) -> (f64, f64) {
        match self {
            Preset::Trapezoid => (0.5, 0.5),
            Preset::Midpoint => (1.0, 0.0),
            Preset::Simpson => (5.0 / 6.0, 1.0 / 6.0),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Preset::Trapezoid => "trapezoid",
            Preset::Midpoint => "midpoint",
            Preset::Simpson => "simpson",
        }
    }

    pub fn matches(self, inst: &Instance) -> bool {
        let (l, m) = self.weights();
        (inst.lambda_ - l).abs() <= 1e-15 && (inst.mu_ - m).abs() <= 1e-15
    }
}

impl std::str::FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "trapezoid" => Ok(Preset::Trapezoid),
            "midpoint" => Ok(Preset::Midpoint),
            "simpson" => Ok(Preset::Simpson),
            other => Err(Error::Parameter(format!("unknown preset `{other}`"))),
        }
    }
}

/// `∫_a^b f(u)/u² du`.
pub fn weighted_mean_integral(inst: &Instance, quad: &QuadSettings) -> Result<f64> {
    inst.validate_interval()?;
    integrate(|u| inst.f.value(u) / (u * u), inst.a, inst.b, quad)?.require_converged("∫ f(u)/u² du")
}

/// The functional with the harmonic-mean argument and factor `ab/(b-a)`.
pub fn corrected_if(inst: &Instance, quad: &QuadSettings) -> Result<f64> {
    let integral = weighted_mean_integral(inst, quad)?;
    let Instance { a, b, lambda_, mu_, .. } = *inst;
    let f = &inst.f;
    Ok((lambda_ - mu_) * f.value(inst.harmonic_mean()) + (1.0 - lambda_) * f.value(a) + mu_ * f.value(b)
        - a * b / (b - a) * integral)
}

/// The frequently printed form: arithmetic-mean argument and factor `2ab/(b-a)`.
pub fn paper_if_as_printed(inst: &Instance, quad: &QuadSettings) -> Result<f64> {
    let integral = weighted_mean_integral(inst, quad)?;
    let Instance { a, b, lambda_, mu_, .. } = *inst;
    let f = &inst.f;
    Ok((lambda_ - mu_) * f.value(0.5 * (a + b)) + (1.0 - lambda_) * f.value(a) + mu_ * f.value(b)
        - 2.0 * a * b / (b - a) * integral)
}


/// `ab(b-a) [∫₀^{1/2} (μ-t)/A_t² f′(ab/A_t) dt + ∫_{1/2}^1 (λ-t)/A_t² f′(ab/A_t) dt]`.
pub fn lemma1_rhs(inst: &Instance, quad: &QuadSettings) -> Result<f64> {
    inst.validate_interval()?;
    let Instance { a, b, lambda_, mu_, .. } = *inst;
    let ab = a * b;
    let kernel = |weight: f64, t: f64| {
        let at = inst.a_t(t);
        (weight - t) / (at * at) * inst.f.derivative(ab / at)
    };
    let left = integrate(|t| kernel(mu_, t), 0.0, 0.5, quad)?.require_converged("identity left half")?;
    let right = integrate(|t| kernel(lambda_, t), 0.5, 1.0, quad)?.require_converged("identity right half")?;
    Ok(ab * (b - a) * (left + right))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub abs_diff: f64,
    pub tol: f64,
    pub pass: bool,
}

impl IdentityCheck {
    fn new(lhs: f64, rhs: f64, tol: f64) -> Self {
        let abs_diff = (lhs - rhs).abs();
        Self {
            lhs,
            rhs,
            abs_diff,
            tol,
            pass: abs_diff <= tol,
        }
    }
}

/// Compare [`corrected_if`] with [`lemma1_rhs`].
pub fn verify_lemma1(inst: &Instance, quad: &QuadSettings, tol: f64) -> Result<IdentityCheck> {
    Ok(IdentityCheck::new(corrected_if(inst, quad)?, lemma1_rhs(inst, quad)?, tol))
}

/// Compare the printed form with [`lemma1_rhs`]; expected to fail.
pub fn verify_printed(inst: &Instance, quad: &QuadSettings, tol: f64) -> Result<IdentityCheck> {
    Ok(IdentityCheck::new(paper_if_as_printed(inst, quad)?, lemma1_rhs(inst, quad)?, tol))
}

/// The classical left-hand side of a preset, built directly from its
/// endpoint/midpoint rule rather than from the general functional.
pub fn preset_lhs(preset: Preset, inst: &Instance, quad: &QuadSettings) -> Result<f64> {
    let integral = weighted_mean_integral(inst, quad)?;
    let (a, b) = (inst.a, inst.b);
    let f = &inst.f;
    let mean_term = a * b / (b - a) * integral;
    let rule = match preset {
        Preset::Trapezoid => 0.5 * (f.value(a) + f.value(b)),
        Preset::Midpoint => f.value(inst.harmonic_mean()),
        Preset::Simpson => (0.5 * (f.value(a) + f.value(b)) + 2.0 * f.value(inst.harmonic_mean())) / 3.0,
    };
    Ok(rule - mean_term)
}
