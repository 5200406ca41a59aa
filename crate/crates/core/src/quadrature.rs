//! One-dimensional integration with error estimates.
//!
//! Two independent schemes share one contract:
//!
//! * [`integrate`]: globally adaptive 7-point Gauss / 15-point Kronrod pairs with
//!   bisection of the panel carrying the largest error estimate.
//! * [`integrate_de`]: tanh-sinh (double exponential) substitution followed by the
//!   trapezoid rule with step halving. Tolerates algebraic endpoint behaviour.
//!
//! Neither routine evaluates the integrand at the interval endpoints. When the
//! requested tolerance cannot be met within the work limit the result comes back
//! with `converged == false` rather than as an error.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Tolerances and work limit for a single integration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadSettings {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Panel limit for [`integrate`]; halving-level limit for [`integrate_de`].
    pub max_subdivisions: usize,
}

impl Default for QuadSettings {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_subdivisions: 2000,
        }
    }
}

impl QuadSettings {
    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize) -> Result<Self> {
        let settings = Self {
            abs_tol,
            rel_tol,
            max_subdivisions,
        };
        settings.validate()?;
        Ok(settings)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) || !self.abs_tol.is_finite() {
            return Err(Error::Parameter(format!(
                "abs_tol must be positive, got {}",
                self.abs_tol
            )));
        }
        if !(self.rel_tol >= 0.0) || !self.rel_tol.is_finite() {
            return Err(Error::Parameter(format!(
                "rel_tol must be non-negative, got {}",
                self.rel_tol
            )));
        }
        if self.max_subdivisions < 1 {
            return Err(Error::Parameter("max_subdivisions must be at least 1".into()));
        }
        Ok(())
    }

    /// Target error for an integral of magnitude `value`.
    #[inline]
    pub fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadResult {
    pub value: f64,
    pub err_estimate: f64,
    pub evaluations: usize,
    pub converged: bool,
}

impl QuadResult {
    /// The value, or an accuracy error if the routine did not converge.
    pub fn require_converged(self, what: &str) -> Result<f64> {
        if self.converged {
            Ok(self.value)
        } else {
            Err(Error::Accuracy {
                what: format!("quadrature did not converge for {what}"),
                primary: self.value,
                check: self.err_estimate,
            })
        }
    }
}

fn check_interval(lo: f64, hi: f64) -> Result<()> {
    if !lo.is_finite() || !hi.is_finite() || !(lo < hi) {
        return Err(Error::Domain(format!(
            "integration interval must satisfy lo < hi, got [{lo}, {hi}]"
        )));
    }
    Ok(())
}

#[inline]
fn eval_checked<F: Fn(f64) -> f64>(f: &F, x: f64) -> Result<f64> {
    let y = f(x);
    if y.is_finite() {
        Ok(y)
    } else {
        Err(Error::NonFiniteIntegrand {
            abscissa: x,
            value: y,
        })
    }
}

// Kronrod abscissae on [-1, 1] (positive half, descending). Odd indices are the
// 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    lo: f64,
    hi: f64,
    value: f64,
    err: f64,
}

/// One G7/K15 application on `[lo, hi]`, with the QUADPACK error rescaling.
fn gk15<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> Result<Panel> {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = eval_checked(f, center)?;

    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut res_abs = kronrod.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];

    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = eval_checked(f, center - dx)?;
        let f2 = eval_checked(f, center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = 0.5 * kronrod;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let value = kronrod * half;
    res_abs *= half.abs();
    res_asc *= half.abs();
    let mut err = ((kronrod - gauss) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok(Panel { lo, hi, value, err })
}

/// Adaptive Gauss-Kronrod integration of `f` over `[lo, hi]`.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    settings: &QuadSettings,
) -> Result<QuadResult> {
    settings.validate()?;
    check_interval(lo, hi)?;

    let mut panels = vec![gk15(&f, lo, hi)?];
    let mut evaluations = 15;

    loop {
        let value: f64 = panels.iter().map(|p| p.value).sum();
        let err: f64 = panels.iter().map(|p| p.err).sum();
        if err <= settings.target(value) {
            return Ok(QuadResult {
                value,
                err_estimate: err,
                evaluations,
                converged: true,
            });
        }
        if panels.len() >= settings.max_subdivisions {
            return Ok(QuadResult {
                value,
                err_estimate: err,
                evaluations,
                converged: false,
            });
        }

        let (worst, _) = panels
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |(bi, be), (i, p)| {
                if p.err > be {
                    (i, p.err)
                } else {
                    (bi, be)
                }
            });
        let panel = panels.swap_remove(worst);
        let mid = 0.5 * (panel.lo + panel.hi);
        // Panel too narrow to split further in floating point.
        if !(panel.lo < mid && mid < panel.hi) {
            panels.push(panel);
            let value: f64 = panels.iter().map(|p| p.value).sum();
            let err: f64 = panels.iter().map(|p| p.err).sum();
            return Ok(QuadResult {
                value,
                err_estimate: err,
                evaluations,
                converged: err <= settings.target(value),
            });
        }
        panels.push(gk15(&f, panel.lo, mid)?);
        panels.push(gk15(&f, mid, panel.hi)?);
        evaluations += 30;
    }
}

/// Largest |t| sampled by the tanh-sinh rule. Beyond it the abscissae sit closer
/// to the endpoints than any double can resolve for intervals of unit size.
const DE_T_MAX: f64 = 6.0;
const DE_MIN_LEVELS: usize = 3;
const DE_MAX_LEVELS: usize = 16;

/// Tanh-sinh integration of `f` over `[lo, hi]`.
///
/// Abscissae are formed as `lo + d` or `hi - d` with `d` computed without
/// cancellation, so a singularity at `lo = 0` is resolved down to subnormal
/// distances. Singularities at other endpoints are best moved to zero by the
/// caller (reflection) before integrating.
pub fn integrate_de<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    settings: &QuadSettings,
) -> Result<QuadResult> {
    settings.validate()?;
    check_interval(lo, hi)?;

    let half = 0.5 * (hi - lo);
    let max_levels = settings.max_subdivisions.clamp(DE_MIN_LEVELS, DE_MAX_LEVELS);
    let mut evaluations = 0usize;

    // Sum of w(t) f(x(t)) over the abscissae t = j h for the given j.
    let node_sum = |t: f64, evaluations: &mut usize| -> Result<f64> {
        let u = FRAC_PI_2 * t.sinh();
        let cosh_u = u.cosh();
        let weight = FRAC_PI_2 * t.cosh() / (cosh_u * cosh_u);
        if t == 0.0 {
            *evaluations += 1;
            return Ok(weight * eval_checked(&f, lo + half)?);
        }
        // Distance from the nearer endpoint: half * (1 - tanh|u|).
        let e = (-2.0 * u.abs()).exp();
        let d = half * 2.0 * e / (1.0 + e);
        let mut acc = 0.0;
        let left = lo + d;
        if d > 0.0 && left > lo && left < hi {
            *evaluations += 1;
            acc += weight * eval_checked(&f, left)?;
        }
        let right = hi - d;
        if d > 0.0 && right < hi && right > lo {
            *evaluations += 1;
            acc += weight * eval_checked(&f, right)?;
        }
        Ok(acc)
    };

    let mut h = 1.0;
    let mut sum = node_sum(0.0, &mut evaluations)?;
    let mut j = 1;
    while (j as f64) * h <= DE_T_MAX {
        sum += node_sum(j as f64 * h, &mut evaluations)?;
        j += 1;
    }
    let mut estimate = sum * h * half;
    let mut err = f64::INFINITY;

    for level in 1..=max_levels {
        h *= 0.5;
        let mut j = 1;
        while (j as f64) * h <= DE_T_MAX {
            sum += node_sum(j as f64 * h, &mut evaluations)?;
            j += 2;
        }
        let next = sum * h * half;
        err = (next - estimate).abs();
        estimate = next;
        if level >= DE_MIN_LEVELS && err <= settings.target(estimate) {
            return Ok(QuadResult {
                value: estimate,
                err_estimate: err,
                evaluations,
                converged: true,
            });
        }
    }

    Ok(QuadResult {
        value: estimate,
        err_estimate: err,
        evaluations,
        converged: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tight() -> QuadSettings {
        QuadSettings::new(1e-14, 1e-13, 2000).unwrap()
    }

    #[test]
    fn kronrod_weights_sum_to_interval_length() {
        let sum: f64 = 2.0 * WGK[..7].iter().sum::<f64>() + WGK[7];
        assert!((sum - 2.0).abs() < 1e-15);
        let gsum: f64 = 2.0 * WG[..3].iter().sum::<f64>() + WG[3];
        assert!((gsum - 2.0).abs() < 1e-15);
    }

    #[test]
    fn linear_is_exact() {
        let r = integrate(|t| t, 0.0, 1.0, &QuadSettings::default()).unwrap();
        assert!(r.converged);
        assert!((r.value - 0.5).abs() <= 1e-12);
        assert!(r.err_estimate <= 1e-12);
    }

    #[test]
    fn inverse_square() {
        let r = integrate(|u| 1.0 / (u * u), 1.0, 2.0, &QuadSettings::default()).unwrap();
        assert!((r.value - 0.5).abs() <= 1e-12);
    }

    #[test]
    fn rational_with_log_antiderivative() {
        // ln(1+t) + 1/(1+t) on [0, 1/2].
        let exact = 1.5f64.ln() - 1.0 / 3.0;
        let r = integrate(|t| t / ((1.0 + t) * (1.0 + t)), 0.0, 0.5, &tight()).unwrap();
        assert!((r.value - exact).abs() <= 1e-14);
        assert!((r.value - 0.0721317).abs() < 1e-7);
    }

    #[test]
    fn polynomials_up_to_degree_13_are_exact_on_one_panel() {
        for deg in 0..=13 {
            let exact = 1.0 / (deg as f64 + 1.0);
            let p = gk15(&|t: f64| t.powi(deg), 0.0, 1.0).unwrap();
            assert!((p.value - exact).abs() <= 1e-13, "degree {deg}");
        }
    }

    #[test]
    fn de_inverse_sqrt_singularity() {
        let r = integrate_de(|t| 1.0 / t.sqrt(), 0.0, 1.0, &tight()).unwrap();
        assert!(r.converged);
        assert!((r.value - 2.0).abs() < 1e-12, "{r:?}");
    }

    #[test]
    fn de_beta_three_halves() {
        let r = integrate_de(
            |t| (t * (1.0 - t)).sqrt(),
            0.0,
            1.0,
            &tight(),
        )
        .unwrap();
        assert!((r.value - std::f64::consts::PI / 8.0).abs() < 1e-12);
    }

    #[test]
    fn de_steep_power() {
        let exact = (0.1f64.powi(-3) - 1.0) / 2.7;
        let r = integrate_de(|t| (1.0 - 0.9 * t).powi(-4), 0.0, 1.0, &tight()).unwrap();
        assert!(r.converged);
        assert!(((r.value - exact) / exact).abs() < 1e-12, "{r:?}");
        assert!((r.value - 370.0).abs() < 1e-9);
    }

    #[test]
    fn non_finite_interior_value_reports_abscissa() {
        let err = integrate(|t| 1.0 / (t - 0.5), 0.0, 1.0, &QuadSettings::default()).unwrap_err();
        match err {
            Error::NonFiniteIntegrand { abscissa, .. } => assert_eq!(abscissa, 0.5),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn exhausted_budget_is_reported_not_hidden() {
        let s = QuadSettings::new(1e-15, 0.0, 3).unwrap();
        let r = integrate(|t: f64| t.sqrt().sin() / t.powf(0.9), 0.0, 1.0, &s).unwrap();
        assert!(!r.converged);
        assert!(r.require_converged("test").is_err());
    }

    #[test]
    fn invalid_settings_and_interval() {
        assert!(QuadSettings::new(0.0, 1e-10, 10).is_err());
        assert!(QuadSettings::new(1e-10, -1.0, 10).is_err());
        assert!(QuadSettings::new(1e-10, 1e-10, 0).is_err());
        assert!(integrate(|t| t, 1.0, 1.0, &QuadSettings::default()).is_err());
        assert!(integrate_de(|t| t, 2.0, 1.0, &QuadSettings::default()).is_err());
    }
}
