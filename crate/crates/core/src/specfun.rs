//! Gamma, Beta and the Gauss hypergeometric function on the real parameter
//! region used by the bound coefficients.
//!
//! `hyp2f1` is evaluated twice, once from the Euler integral and once from the
//! Gauss series, and refuses to return a value when the two disagree.

use std::f64::consts::PI;

use crate::quadrature::{integrate, integrate_de, QuadSettings};
use crate::{Error, Result};

/// Accuracy target and work limit for [`hyp2f1`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccuracyBudget {
    pub rel_tol: f64,
    /// Cap on series terms and, separately, on integrand evaluations.
    pub max_work: usize,
}

impl Default for AccuracyBudget {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            max_work: 200_000,
        }
    }
}

impl AccuracyBudget {
    pub fn new(rel_tol: f64, max_work: usize) -> Result<Self> {
        if !(rel_tol > 0.0) || !rel_tol.is_finite() {
            return Err(Error::Parameter(format!("rel_tol must be positive, got {rel_tol}")));
        }
        if max_work < 1 {
            return Err(Error::Parameter("max_work must be at least 1".into()));
        }
        Ok(Self { rel_tol, max_work })
    }
}

/// Floor on the Euler-vs-series agreement tolerance.
pub const HYP2F1_AGREEMENT_FLOOR: f64 = 1e-10;

// Lanczos approximation, g = 7, n = 9.
const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

fn lanczos_sum(x: f64) -> f64 {
    // x is the shifted argument (original minus one).
    let mut acc = LANCZOS_COEF[0];
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    acc
}

fn check_positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} requires a positive finite argument, got {x}")))
    }
}

/// Γ(x) for x > 0.
pub fn gamma(x: f64) -> Result<f64> {
    check_positive("gamma", x)?;
    Ok(gamma_unchecked(x))
}

fn gamma_unchecked(x: f64) -> f64 {
    if x == x.floor() && x <= 23.0 {
        // Exact factorials while they fit in the mantissa.
        return (1..x as u64).fold(1.0, |acc, k| acc * k as f64);
    }
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma_unchecked(1.0 - x));
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * lanczos_sum(z)
}

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> Result<f64> {
    check_positive("ln_gamma", x)?;
    Ok(ln_gamma_unchecked(x))
}

fn ln_gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        return (PI / (PI * x).sin()).ln() - ln_gamma_unchecked(1.0 - x);
    }
    if x < 20.0 {
        return gamma_unchecked(x).ln();
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + lanczos_sum(z).ln()
}

/// B(α, β) = Γ(α)Γ(β)/Γ(α+β).
pub fn beta(alpha: f64, beta_: f64) -> Result<f64> {
    check_positive("beta", alpha)?;
    check_positive("beta", beta_)?;
    let sum = alpha + beta_;
    if sum < 150.0 {
        // Product first so swapping the arguments gives the identical result.
        let num = gamma_unchecked(alpha) * gamma_unchecked(beta_);
        Ok(num / gamma_unchecked(sum))
    } else {
        Ok((ln_gamma_unchecked(alpha) + ln_gamma_unchecked(beta_) - ln_gamma_unchecked(sum)).exp())
    }
}

fn check_hyp2f1_domain(alpha: f64, beta_: f64, gamma_: f64, z: f64) -> Result<()> {
    if !alpha.is_finite() || !beta_.is_finite() || !gamma_.is_finite() {
        return Err(Error::Domain("hyp2f1 parameters must be finite".into()));
    }
    if !(gamma_ > beta_ && beta_ > 0.0) {
        return Err(Error::Domain(format!(
            "hyp2f1 requires gamma > beta > 0, got beta = {beta_}, gamma = {gamma_}"
        )));
    }
    if !(0.0..1.0).contains(&z) {
        return Err(Error::Domain(format!("hyp2f1 requires 0 <= z < 1, got {z}")));
    }
    Ok(())
}

/// Gauss series Σ (α)_k (β)_k / (γ)_k · z^k / k!, summed until the tail bound
/// drops below `rel_tol` of the partial sum.
pub fn hyp2f1_series(alpha: f64, beta_: f64, gamma_: f64, z: f64, budget: &AccuracyBudget) -> Result<f64> {
    check_hyp2f1_domain(alpha, beta_, gamma_, z)?;
    let target = budget.rel_tol.min(1e-15);
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..budget.max_work {
        let kf = k as f64;
        let ratio = (alpha + kf) * (beta_ + kf) / ((gamma_ + kf) * (kf + 1.0)) * z;
        term *= ratio;
        sum += term;
        if term == 0.0 {
            return Ok(sum);
        }
        // The ratio tends to z; bound the remaining terms geometrically.
        let r = ratio.abs().max(z);
        if r < 1.0 {
            let tail = term.abs() * r / (1.0 - r);
            if tail <= target * sum.abs() {
                return Ok(sum);
            }
        }
    }
    Err(Error::Accuracy {
        what: format!("hyp2f1 series did not converge within {} terms", budget.max_work),
        primary: sum,
        check: term,
    })
}

/// Euler integral B(β, γ-β)⁻¹ ∫₀¹ t^{β-1}(1-t)^{γ-β-1}(1-zt)^{-α} dt.
///
/// The integral is split at 1/2 and the right half reflected, so both pieces
/// carry their endpoint singularity at zero where tanh-sinh resolves it.
pub fn hyp2f1_euler(alpha: f64, beta_: f64, gamma_: f64, z: f64, budget: &AccuracyBudget) -> Result<f64> {
    check_hyp2f1_domain(alpha, beta_, gamma_, z)?;
    let left_exp = beta_ - 1.0;
    let right_exp = gamma_ - beta_ - 1.0;
    let settings = QuadSettings {
        abs_tol: f64::MIN_POSITIVE,
        rel_tol: (budget.rel_tol * 1e-2).clamp(1e-14, 1e-12),
        max_subdivisions: 12,
    };

    let left = |t: f64| t.powf(left_exp) * (1.0 - t).powf(right_exp) * (1.0 - z * t).powf(-alpha);
    let right = |u: f64| u.powf(right_exp) * (1.0 - u).powf(left_exp) * (1.0 - z + z * u).powf(-alpha);

    let mut work = 0usize;
    let mut piece = |g: &dyn Fn(f64) -> f64| -> Result<f64> {
        let r = integrate_de(g, 0.0, 0.5, &settings)?;
        work += r.evaluations;
        if r.converged {
            return Ok(r.value);
        }
        // Adaptive Gauss-Kronrod copes with interior steepness that defeats
        // the fixed tanh-sinh grid.
        let gk = integrate(
            g,
            0.0,
            0.5,
            &QuadSettings {
                max_subdivisions: 4000,
                ..settings
            },
        )?;
        work += gk.evaluations;
        gk.require_converged("hyp2f1 Euler integral")
    };
    let total = piece(&left)? + piece(&right)?;
    if work > budget.max_work {
        return Err(Error::Accuracy {
            what: format!("hyp2f1 Euler integral used {work} evaluations, budget {}", budget.max_work),
            primary: total,
            check: f64::NAN,
        });
    }
    Ok(total / beta(beta_, gamma_ - beta_)?)
}

/// ₂F₁(α, β; γ; z) for γ > β > 0 and 0 ≤ z < 1.
///
/// Returns the Euler-integral value after confirming it against the series
/// to within `max(budget.rel_tol, 1e-10)` relative.
pub fn hyp2f1(alpha: f64, beta_: f64, gamma_: f64, z: f64, budget: &AccuracyBudget) -> Result<f64> {
    check_hyp2f1_domain(alpha, beta_, gamma_, z)?;
    if z == 0.0 {
        return Ok(1.0);
    }
    let euler = hyp2f1_euler(alpha, beta_, gamma_, z, budget)?;
    let series = hyp2f1_series(alpha, beta_, gamma_, z, budget)?;
    let tol = budget.rel_tol.max(HYP2F1_AGREEMENT_FLOOR);
    let rel = (euler - series).abs() / series.abs().max(f64::MIN_POSITIVE);
    if rel > tol {
        return Err(Error::Accuracy {
            what: format!("hyp2f1({alpha}, {beta_}; {gamma_}; {z}) Euler and series paths disagree (rel {rel:e})"),
            primary: euler,
            check: series,
        });
    }
    Ok(euler)
}
