//! Harmonic (s,m)-convexity in the second sense, checked by dense sampling.
//!
//! A function `f` on a subset of `(0, ∞)` belongs to the class when
//!
//! ```text
//! f(m x y / (m t y + (1 - t) x)) <= t^s f(x) + m (1 - t)^s f(y)
//! ```
//!
//! for all `x, y` in the interval and `t ∈ [0, 1]`. The non-harmonic
//! counterpart, used by [`classify`], replaces the left argument by
//! `t x + m (1 - t) y`.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Tolerance on normalised defects when turning a grid scan into a verdict.
///
/// Defects are divided by `max(1, |f(h)| + |t^s f(x)| + m|(1-t)^s f(y)|)`,
/// so at unit magnitudes this is an absolute tolerance.
pub const DEFECT_TOL: f64 = 1e-9;

/// Samples used to decide monotonicity.
pub const MONOTONE_SAMPLES: usize = 401;
pub const MONOTONE_TOL: f64 = 1e-12;

/// Anything that can be sampled by the grid checks.
pub trait RealFunction: Sync {
    fn eval(&self, x: f64) -> f64;

    /// The function is defined on the open ray `(domain_lo, ∞)`.
    fn domain_lo(&self) -> f64 {
        0.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FunctionKind {
    /// f(x) = x
    Linear,
    /// f(x) = c x^p
    Power { c: f64, p: f64 },
    /// f(x) = b x^s + c
    SPower { b: f64, s: f64, c: f64 },
    Scale { factor: f64, inner: Box<FunctionSpec> },
    Sum { terms: Vec<FunctionSpec> },
    Max { terms: Vec<FunctionSpec> },
    /// outer(inner(x))
    Compose { outer: Box<FunctionSpec>, inner: Box<FunctionSpec> },
    /// Evaluates as `limit`; `members` is the approximating sequence.
    Sequence { members: Vec<FunctionSpec>, limit: Box<FunctionSpec> },
}

/// A closed-form test function with its derivative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionSpec {
    pub kind: FunctionKind,
    #[serde(default)]
    pub domain_lo: f64,
}

impl FunctionSpec {
    fn new(kind: FunctionKind) -> Self {
        Self { kind, domain_lo: 0.0 }
    }

    pub fn linear() -> Self {
        Self::new(FunctionKind::Linear)
    }

    pub fn power(c: f64, p: f64) -> Self {
        Self::new(FunctionKind::Power { c, p })
    }

    pub fn constant(c: f64) -> Self {
        Self::power(c, 0.0)
    }

    pub fn s_power(b: f64, s: f64, c: f64) -> Self {
        Self::new(FunctionKind::SPower { b, s, c })
    }

    pub fn value(&self, x: f64) -> f64 {
        match &self.kind {
            FunctionKind::Linear => x,
            FunctionKind::Power { c, p } => {
                if *p == 0.0 {
                    *c
                } else {
                    c * x.powf(*p)
                }
            }
            FunctionKind::SPower { b, s, c } => b * x.powf(*s) + c,
            FunctionKind::Scale { factor, inner } => factor * inner.value(x),
            FunctionKind::Sum { terms } => terms.iter().map(|f| f.value(x)).sum(),
            FunctionKind::Max { terms } => terms
                .iter()
                .map(|f| f.value(x))
                .fold(f64::NEG_INFINITY, f64::max),
            FunctionKind::Compose { outer, inner } => outer.value(inner.value(x)),
            FunctionKind::Sequence { limit, .. } => limit.value(x),
        }
    }

    /// f′(x). For `max`, the derivative of the first maximising term.
    pub fn derivative(&self, x: f64) -> f64 {
        match &self.kind {
            FunctionKind::Linear => 1.0,
            FunctionKind::Power { c, p } => {
                if *p == 0.0 {
                    0.0
                } else {
                    c * p * x.powf(p - 1.0)
                }
            }
            FunctionKind::SPower { b, s, .. } => b * s * x.powf(s - 1.0),
            FunctionKind::Scale { factor, inner } => factor * inner.derivative(x),
            FunctionKind::Sum { terms } => terms.iter().map(|f| f.derivative(x)).sum(),
            FunctionKind::Max { terms } => {
                let mut best = f64::NEG_INFINITY;
                let mut slope = f64::NAN;
                for f in terms {
                    let v = f.value(x);
                    if v > best {
                        best = v;
                        slope = f.derivative(x);
                    }
                }
                slope
            }
            FunctionKind::Compose { outer, inner } => outer.derivative(inner.value(x)) * inner.derivative(x),
            FunctionKind::Sequence { limit, .. } => limit.derivative(x),
        }
    }

    /// `x ↦ |f′(x)|^q`, the function the bound hypotheses constrain.
    pub fn abs_derivative_pow(&self, q: f64) -> AbsDerivativePow<'_> {
        AbsDerivativePow { f: self, q }
    }
}

impl RealFunction for FunctionSpec {
    fn eval(&self, x: f64) -> f64 {
        self.value(x)
    }

    fn domain_lo(&self) -> f64 {
        self.domain_lo
    }
}

#[derive(Debug, Clone, Copy)]
pub struct AbsDerivativePow<'a> {
    pub f: &'a FunctionSpec,
    pub q: f64,
}

impl RealFunction for AbsDerivativePow<'_> {
    fn eval(&self, x: f64) -> f64 {
        self.f.derivative(x).abs().powf(self.q)
    }

    fn domain_lo(&self) -> f64 {
        self.f.domain_lo
    }
}

fn fmt_num(x: f64) -> String {
    format!("{x}")
}

// Text syntax: `linear`, `power:c=<r>,p=<r>`, `spower:b=<r>,s=<r>,c=<r>`,
// `scale:<r>:<spec>`, `sum:<spec>+<spec>`, `max:<spec>|<spec>`.
impl fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            FunctionKind::Linear => write!(f, "linear"),
            FunctionKind::Power { c, p } => write!(f, "power:c={},p={}", fmt_num(*c), fmt_num(*p)),
            FunctionKind::SPower { b, s, c } => {
                write!(f, "spower:b={},s={},c={}", fmt_num(*b), fmt_num(*s), fmt_num(*c))
            }
            FunctionKind::Scale { factor, inner } => write!(f, "scale:{}:{inner}", fmt_num(*factor)),
            FunctionKind::Sum { terms } => write_joined(f, "sum:", '+', terms),
            FunctionKind::Max { terms } => write_joined(f, "max:", '|', terms),
            FunctionKind::Compose { outer, inner } => write!(f, "compose({outer};{inner})"),
            FunctionKind::Sequence { members, limit } => {
                write!(f, "seq[{}]({limit})", members.len())
            }
        }
    }
}

fn write_joined(f: &mut fmt::Formatter<'_>, head: &str, sep: char, terms: &[FunctionSpec]) -> fmt::Result {
    f.write_str(head)?;
    for (i, t) in terms.iter().enumerate() {
        if i > 0 {
            write!(f, "{sep}")?;
        }
        write!(f, "{t}")?;
    }
    Ok(())
}

impl FromStr for FunctionSpec {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        parse_spec(text.trim()).map_err(|reason| Error::Parse {
            text: text.to_string(),
            reason,
        })
    }
}

fn parse_spec(text: &str) -> std::result::Result<FunctionSpec, String> {
    let (head, rest) = match text.split_once(':') {
        Some((h, r)) => (h, r),
        None => (text, ""),
    };
    match head {
        "linear" if rest.is_empty() => Ok(FunctionSpec::linear()),
        "power" => {
            let kv = parse_params(rest, &["c", "p"])?;
            Ok(FunctionSpec::power(kv[0], kv[1]))
        }
        "spower" => {
            let kv = parse_params(rest, &["b", "s", "c"])?;
            Ok(FunctionSpec::s_power(kv[0], kv[1], kv[2]))
        }
        "scale" => {
            let (factor, inner) = rest
                .split_once(':')
                .ok_or_else(|| "scale needs `scale:<factor>:<spec>`".to_string())?;
            let factor = parse_number(factor)?;
            let inner = parse_spec(inner)?;
            Ok(FunctionSpec::new(FunctionKind::Scale {
                factor,
                inner: Box::new(inner),
            }))
        }
        "sum" => {
            let idx = find_separator(rest, '+').ok_or_else(|| "sum needs `<spec>+<spec>`".to_string())?;
            let terms = vec![parse_spec(&rest[..idx])?, parse_spec(&rest[idx + 1..])?];
            Ok(FunctionSpec::new(FunctionKind::Sum { terms }))
        }
        "max" => {
            let idx = find_separator(rest, '|').ok_or_else(|| "max needs `<spec>|<spec>`".to_string())?;
            let terms = vec![parse_spec(&rest[..idx])?, parse_spec(&rest[idx + 1..])?];
            Ok(FunctionSpec::new(FunctionKind::Max { terms }))
        }
        _ => Err(format!("unknown function family `{head}`")),
    }
}

/// First separator that is not the sign of a float exponent (`1e+3`).
fn find_separator(text: &str, sep: char) -> Option<usize> {
    let bytes = text.as_bytes();
    text.char_indices().find_map(|(i, ch)| {
        if ch != sep {
            return None;
        }
        if sep == '+' && i >= 2 {
            let prev = bytes[i - 1];
            let before = bytes[i - 2];
            if (prev == b'e' || prev == b'E') && (before.is_ascii_digit() || before == b'.') {
                return None;
            }
        }
        Some(i)
    })
}

fn parse_number(text: &str) -> std::result::Result<f64, String> {
    let v: f64 = text
        .trim()
        .parse()
        .map_err(|_| format!("`{text}` is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{text}` is not finite"))
    }
}

fn parse_params(text: &str, names: &[&str]) -> std::result::Result<Vec<f64>, String> {
    let mut out = vec![None; names.len()];
    for pair in text.split(',') {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| format!("expected `name=value`, got `{pair}`"))?;
        let slot = names
            .iter()
            .position(|n| *n == k.trim())
            .ok_or_else(|| format!("unknown parameter `{k}`"))?;
        if out[slot].is_some() {
            return Err(format!("parameter `{k}` given twice"));
        }
        out[slot] = Some(parse_number(v)?);
    }
    out.into_iter()
        .zip(names)
        .map(|(v, n)| v.ok_or_else(|| format!("missing parameter `{n}`")))
        .collect()
}

/// Sampling grid: `nx × ny` points over `[lo, hi]`, `nt` points over `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    pub nt: usize,
    pub lo: f64,
    pub hi: f64,
}

impl GridSpec {
    pub fn new(nx: usize, ny: usize, nt: usize, lo: f64, hi: f64) -> Result<Self> {
        let g = Self { nx, ny, nt, lo, hi };
        g.validate()?;
        Ok(g)
    }

    /// The default 41 × 41 × 21 grid.
    pub fn over(lo: f64, hi: f64) -> Result<Self> {
        Self::new(41, 41, 21, lo, hi)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx < 2 || self.ny < 2 || self.nt < 2 {
            return Err(Error::Parameter("grid counts must all be at least 2".into()));
        }
        if !(self.lo > 0.0 && self.lo < self.hi && self.hi.is_finite()) {
            return Err(Error::Parameter(format!(
                "grid interval must satisfy 0 < lo < hi, got [{}, {}]",
                self.lo, self.hi
            )));
        }
        Ok(())
    }

    /// Each axis refined to `2n - 1` samples, so the old nodes are kept.
    pub fn refined(&self) -> Self {
        Self {
            nx: 2 * self.nx - 1,
            ny: 2 * self.ny - 1,
            nt: 2 * self.nt - 1,
            ..*self
        }
    }

    fn x(&self, i: usize) -> f64 {
        sample(self.lo, self.hi, i, self.nx)
    }

    fn y(&self, j: usize) -> f64 {
        sample(self.lo, self.hi, j, self.ny)
    }

    fn t(&self, k: usize) -> f64 {
        sample(0.0, 1.0, k, self.nt)
    }

    pub fn points(&self) -> usize {
        self.nx * self.ny * self.nt
    }
}

fn sample(lo: f64, hi: f64, i: usize, n: usize) -> f64 {
    if i + 1 == n {
        hi
    } else {
        lo + (hi - lo) * (i as f64) / ((n - 1) as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvexityReport {
    pub holds: bool,
    /// Largest normalised defect found (see [`DEFECT_TOL`]).
    pub worst_defect: f64,
    /// `(x, y, t)` where the worst defect occurs.
    pub witness: (f64, f64, f64),
    pub checked: usize,
}

/// The harmonic combination `m x y / (m t y + (1 - t) x)`, exact at `t ∈ {0, 1}`.
pub fn harmonic_combination(x: f64, y: f64, t: f64, m: f64) -> f64 {
    if t == 1.0 {
        x
    } else if t == 0.0 {
        m * y
    } else {
        m * x * y / (m * t * y + (1.0 - t) * x)
    }
}

/// The arithmetic combination `t x + m (1 - t) y`.
pub fn arithmetic_combination(x: f64, y: f64, t: f64, m: f64) -> f64 {
    if t == 1.0 {
        x
    } else if t == 0.0 {
        m * y
    } else {
        t * x + m * (1.0 - t) * y
    }
}

fn check_class_params(s: f64, m: f64) -> Result<()> {
    if !(s > 0.0 && s <= 1.0) {
        return Err(Error::Parameter(format!("s must lie in (0, 1], got {s}")));
    }
    if !(m > 0.0 && m <= 1.0) {
        return Err(Error::Parameter(format!("m must lie in (0, 1], got {m}")));
    }
    Ok(())
}

struct Defect {
    raw: f64,
    scale: f64,
}

fn defect_at<F: RealFunction + ?Sized>(f: &F, point: f64, x: f64, y: f64, t: f64, s: f64, m: f64) -> Result<Defect> {
    let lo = f.domain_lo();
    if !(x > lo && y > lo) {
        return Err(Error::Domain(format!("x = {x}, y = {y} must exceed {lo}")));
    }
    if !(point > lo) || !point.is_finite() {
        return Err(Error::Domain(format!("combination {point} of ({x}, {y}, t = {t}) leaves the domain (> {lo})")));
    }
    let fp = f.eval(point);
    let left = t.powf(s) * f.eval(x);
    let right = m * (1.0 - t).powf(s) * f.eval(y);
    Ok(Defect {
        raw: fp - (left + right),
        scale: fp.abs() + left.abs() + right.abs(),
    })
}

/// `f(m x y/(m t y + (1-t) x)) - [t^s f(x) + m (1-t)^s f(y)]`; non-positive
/// where the defining inequality holds.
pub fn harmonic_sm_defect<F: RealFunction + ?Sized>(f: &F, x: f64, y: f64, t: f64, s: f64, m: f64) -> Result<f64> {
    check_class_params(s, m)?;
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Domain(format!("t must lie in [0, 1], got {t}")));
    }
    Ok(defect_at(f, harmonic_combination(x, y, t, m), x, y, t, s, m)?.raw)
}

/// `f(t x + m(1-t) y) - [t^s f(x) + m (1-t)^s f(y)]`.
pub fn sm_defect<F: RealFunction + ?Sized>(f: &F, x: f64, y: f64, t: f64, s: f64, m: f64) -> Result<f64> {
    check_class_params(s, m)?;
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Domain(format!("t must lie in [0, 1], got {t}")));
    }
    Ok(defect_at(f, arithmetic_combination(x, y, t, m), x, y, t, s, m)?.raw)
}

fn scan_grid<F, C>(f: &F, s: f64, m: f64, grid: &GridSpec, combine: C) -> Result<ConvexityReport>
where
    F: RealFunction + ?Sized,
    C: Fn(f64, f64, f64, f64) -> f64 + Sync,
{
    check_class_params(s, m)?;
    grid.validate()?;

    // Per-x rows in parallel; within a row the scan is lexicographic in (y, t)
    // and only a strictly larger defect replaces the incumbent, so the merge
    // below yields the smallest (x, y, t) among ties.
    let rows: Vec<(f64, (f64, f64, f64))> = (0..grid.nx)
        .into_par_iter()
        .map(|i| {
            let x = grid.x(i);
            let mut worst = f64::NEG_INFINITY;
            let mut witness = (x, grid.y(0), grid.t(0));
            for j in 0..grid.ny {
                let y = grid.y(j);
                for k in 0..grid.nt {
                    let t = grid.t(k);
                    let d = defect_at(f, combine(x, y, t, m), x, y, t, s, m)?;
                    let normalised = d.raw / d.scale.max(1.0);
                    if normalised > worst {
                        worst = normalised;
                        witness = (x, y, t);
                    }
                }
            }
            Ok((worst, witness))
        })
        .collect::<Result<_>>()?;

    let (worst_defect, witness) = rows
        .into_iter()
        .fold((f64::NEG_INFINITY, (grid.lo, grid.lo, 0.0)), |acc, row| {
            if row.0 > acc.0 {
                row
            } else {
                acc
            }
        });
    Ok(ConvexityReport {
        holds: worst_defect <= DEFECT_TOL,
        worst_defect,
        witness,
        checked: grid.points(),
    })
}

/// Scan the harmonic (s,m) defect over the whole grid.
pub fn check_harmonic_sm<F: RealFunction + ?Sized>(f: &F, s: f64, m: f64, grid: &GridSpec) -> Result<ConvexityReport> {
    scan_grid(f, s, m, grid, harmonic_combination)
}

/// Scan the (non-harmonic) (s,m) defect over the whole grid.
pub fn check_sm<F: RealFunction + ?Sized>(f: &F, s: f64, m: f64, grid: &GridSpec) -> Result<ConvexityReport> {
    scan_grid(f, s, m, grid, arithmetic_combination)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Monotonicity {
    Constant,
    Nondecreasing,
    Nonincreasing,
    Neither,
}

impl Monotonicity {
    pub fn nondecreasing(self) -> bool {
        matches!(self, Self::Constant | Self::Nondecreasing)
    }

    pub fn nonincreasing(self) -> bool {
        matches!(self, Self::Constant | Self::Nonincreasing)
    }
}

/// Monotonicity from adjacent differences over [`MONOTONE_SAMPLES`] points.
pub fn monotonicity<F: RealFunction + ?Sized>(f: &F, lo: f64, hi: f64) -> Monotonicity {
    let mut up = true;
    let mut down = true;
    let mut prev = f.eval(lo);
    for i in 1..MONOTONE_SAMPLES {
        let v = f.eval(sample(lo, hi, i, MONOTONE_SAMPLES));
        let tol = MONOTONE_TOL * v.abs().max(prev.abs()).max(1.0);
        let diff = v - prev;
        if diff < -tol {
            up = false;
        }
        if diff > tol {
            down = false;
        }
        prev = v;
    }
    match (up, down) {
        (true, true) => Monotonicity::Constant,
        (true, false) => Monotonicity::Nondecreasing,
        (false, true) => Monotonicity::Nonincreasing,
        (false, false) => Monotonicity::Neither,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub monotone: Monotonicity,
    pub sm_convex: bool,
    pub harmonic_sm_convex: bool,
}

impl Classification {
    /// Both monotone-transfer implications between the two classes hold.
    pub fn transfer_consistent(&self) -> bool {
        let forward = !(self.sm_convex && self.monotone.nondecreasing()) || self.harmonic_sm_convex;
        let backward = !(self.harmonic_sm_convex && self.monotone.nonincreasing()) || self.sm_convex;
        forward && backward
    }
}

/// Monotonicity plus both class memberships on the grid.
///
/// With `m < 1` the combinations reach down to `m·lo`, so monotonicity is
/// sampled over `[m·lo, hi]`.
pub fn classify<F: RealFunction + ?Sized>(f: &F, s: f64, m: f64, grid: &GridSpec) -> Result<Classification> {
    let harmonic = check_harmonic_sm(f, s, m, grid)?;
    let sm = check_sm(f, s, m, grid)?;
    Ok(Classification {
        monotone: monotonicity(f, m * grid.lo, grid.hi),
        sm_convex: sm.holds,
        harmonic_sm_convex: harmonic.holds,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prop2Witness {
    pub t: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// For `x ∈ [a, b]` written as `x = t a + (1-t) b`, compares
/// `f(ab/(a+b-x))` with `t^s[f(a)+f(b)] + m(1-t)^s[f(a/m)+f(b/m)] - f(ab/x)`.
pub fn prop2_witness(f: &FunctionSpec, a: f64, b: f64, s: f64, m: f64, x: f64) -> Result<Prop2Witness> {
    check_class_params(s, m)?;
    if !(a > 0.0 && a < b) {
        return Err(Error::Domain(format!("need 0 < a < b, got a = {a}, b = {b}")));
    }
    if !(a..=b).contains(&x) {
        return Err(Error::Domain(format!("x = {x} outside [{a}, {b}]")));
    }
    if !(a > f.domain_lo) {
        return Err(Error::Domain(format!("a = {a} outside the domain (> {})", f.domain_lo)));
    }
    let t = if x == a {
        1.0
    } else if x == b {
        0.0
    } else {
        (b - x) / (b - a)
    };
    let lhs_arg = if x == a { a } else if x == b { b } else { a * b / (a + b - x) };
    let rhs_arg = if x == a { b } else if x == b { a } else { a * b / x };
    let lhs = f.value(lhs_arg);
    let ts = t.powf(s);
    let mts = m * (1.0 - t).powf(s);
    let rhs_terms = [
        ts * f.value(a),
        ts * f.value(b),
        mts * f.value(a / m),
        mts * f.value(b / m),
        -f.value(rhs_arg),
    ];
    let rhs: f64 = rhs_terms.iter().sum();
    let scale = lhs.abs() + rhs_terms.iter().map(|v| v.abs()).sum::<f64>();
    Ok(Prop2Witness {
        t,
        lhs,
        rhs,
        holds: lhs - rhs <= DEFECT_TOL * scale.max(1.0),
    })
}

/// An `(s, m)` class claim.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmClass {
    pub s: f64,
    pub m: f64,
}

/// A function together with the class it is claimed to belong to.
#[derive(Debug, Clone, PartialEq)]
pub struct Classed {
    pub f: FunctionSpec,
    pub class: SmClass,
}

impl Classed {
    pub fn new(f: FunctionSpec, s: f64, m: f64) -> Self {
        Self { f, class: SmClass { s, m } }
    }

    pub fn verify(&self, grid: &GridSpec) -> Result<ConvexityReport> {
        check_harmonic_sm(&self.f, self.class.s, self.class.m, grid)
    }
}

/// Closure operations on the class.
#[derive(Debug, Clone, PartialEq)]
pub enum Combinator {
    /// Pointwise maximum of members of one class.
    Max,
    /// Sum of an (s₁,m) and an (s₂,m) member, claimed in class (min(s₁,s₂), m).
    /// The claim relies on the summands being non-negative.
    Sum,
    /// Positive multiple.
    Scale(f64),
    /// `outer ∘ f` for a harmonically m-convex `f` and a nondecreasing
    /// `(outer_s, m)`-convex `outer`; claimed in class (outer_s, m).
    Compose { outer: FunctionSpec, outer_s: f64 },
    /// Pointwise limit of a sequence in one class.
    SeqLimit { limit: FunctionSpec },
}

fn same_class(inputs: &[Classed]) -> Result<SmClass> {
    let first = inputs
        .first()
        .ok_or_else(|| Error::Parameter("combinator needs at least one input".into()))?
        .class;
    if inputs.iter().any(|c| c.class != first) {
        return Err(Error::Parameter("inputs must share one (s, m) class".into()));
    }
    Ok(first)
}

/// Build the combined function and its claimed class.
pub fn combine(op: &Combinator, inputs: &[Classed]) -> Result<Classed> {
    let domain_lo = inputs.iter().map(|c| c.f.domain_lo).fold(0.0, f64::max);
    let (kind, class) = match op {
        Combinator::Max => {
            let class = same_class(inputs)?;
            let terms = inputs.iter().map(|c| c.f.clone()).collect();
            (FunctionKind::Max { terms }, class)
        }
        Combinator::Sum => {
            let m = same_class_m(inputs)?;
            let s = inputs.iter().map(|c| c.class.s).fold(f64::INFINITY, f64::min);
            let terms = inputs.iter().map(|c| c.f.clone()).collect();
            (FunctionKind::Sum { terms }, SmClass { s, m })
        }
        Combinator::Scale(factor) => {
            if !(*factor > 0.0) || !factor.is_finite() {
                return Err(Error::Parameter(format!("scale factor must be positive, got {factor}")));
            }
            let [single] = inputs else {
                return Err(Error::Parameter("scale takes exactly one input".into()));
            };
            let kind = FunctionKind::Scale {
                factor: *factor,
                inner: Box::new(single.f.clone()),
            };
            (kind, single.class)
        }
        Combinator::Compose { outer, outer_s } => {
            let [single] = inputs else {
                return Err(Error::Parameter("compose takes exactly one inner function".into()));
            };
            if single.class.s != 1.0 {
                return Err(Error::Parameter("compose needs a harmonically m-convex inner function (s = 1)".into()));
            }
            check_class_params(*outer_s, single.class.m)?;
            let kind = FunctionKind::Compose {
                outer: Box::new(outer.clone()),
                inner: Box::new(single.f.clone()),
            };
            (kind, SmClass { s: *outer_s, m: single.class.m })
        }
        Combinator::SeqLimit { limit } => {
            let class = same_class(inputs)?;
            let kind = FunctionKind::Sequence {
                members: inputs.iter().map(|c| c.f.clone()).collect(),
                limit: Box::new(limit.clone()),
            };
            (kind, class)
        }
    };
    Ok(Classed {
        f: FunctionSpec { kind, domain_lo },
        class,
    })
}

fn same_class_m(inputs: &[Classed]) -> Result<f64> {
    let m = inputs
        .first()
        .ok_or_else(|| Error::Parameter("combinator needs at least one input".into()))?
        .class
        .m;
    if inputs.iter().any(|c| c.class.m != m) {
        return Err(Error::Parameter("sum inputs must share m".into()));
    }
    Ok(m)
}
