//! Oracles and corpora shared by the integration tests.
//!
//! The quadrature here is deliberately unrelated to the library's: fixed
//! Gauss-Legendre panels, geometrically graded toward both ends of every
//! piece so integrable endpoint singularities and weight kinks are resolved.

#![allow(dead_code)]

use std::sync::OnceLock;

use harmonia::convexity::{
    check_harmonic_sm, classify, combine, prop2_witness, Classed, Combinator, FunctionSpec, GridSpec,
};
use harmonia::identity::Instance;

const GL_ORDER: usize = 20;
const GRADING_LEVELS: i32 = 60;

fn gl_rule() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(GL_ORDER))
}

/// Nodes and weights on [-1, 1] by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let legendre = |x: f64| {
        let (mut p0, mut p1) = (1.0, x);
        for k in 2..=n {
            let kf = k as f64;
            let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
            p0 = p1;
            p1 = p2;
        }
        let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
        (p1, dp)
    };
    (1..=n)
        .map(|i| {
            let mut x = (std::f64::consts::PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre(x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre(x);
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

fn gl_panel<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> f64 {
    let (c, h) = (0.5 * (lo + hi), 0.5 * (hi - lo));
    h * gl_rule().iter().map(|&(x, w)| w * f(c + h * x)).sum::<f64>()
}

/// ∫ f over [lo, hi] with panels halving toward both ends.
pub fn graded<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> f64 {
    if hi <= lo {
        return 0.0;
    }
    let mid = 0.5 * (lo + hi);
    let half = mid - lo;
    let mut total = 0.0;
    for k in 0..GRADING_LEVELS {
        let outer = half * 2f64.powi(-k);
        let inner = half * 2f64.powi(-k - 1);
        total += gl_panel(&f, lo + inner, lo + outer);
        total += gl_panel(&f, hi - outer, hi - inner);
    }
    total
}

/// `graded` on each piece between consecutive break points inside (lo, hi).
pub fn graded_split<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, breaks: &[f64]) -> f64 {
    let mut pts = vec![lo];
    pts.extend(breaks.iter().copied().filter(|&b| b > lo && b < hi));
    pts.push(hi);
    pts.sort_by(f64::total_cmp);
    pts.windows(2).map(|w| graded(&f, w[0], w[1])).sum()
}

/// Plain Gauss series with a generous term cap.
pub fn series_2f1(a: f64, b: f64, c: f64, z: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..200_000 {
        let kf = k as f64;
        term *= (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0)) * z;
        sum += term;
        if term.abs() < 1e-18 * sum.abs() && kf > 10.0 {
            break;
        }
    }
    sum
}

pub fn rel(x: f64, y: f64) -> f64 {
    if y == 0.0 {
        (x - y).abs()
    } else {
        (x - y).abs() / y.abs()
    }
}

/// `B_index` straight from its defining integral.
pub fn b_integral(index: u8, inst: &Instance, p: f64) -> f64 {
    let Instance {
        a, b, s, q, lambda_, mu_, ..
    } = *inst;
    let at = |t: f64| t * b + (1.0 - t) * a;
    let left = |g: &dyn Fn(f64) -> f64| graded_split(g, 0.0, 0.5, &[mu_]);
    let right = |g: &dyn Fn(f64) -> f64| graded_split(g, 0.5, 1.0, &[lambda_]);
    let two_q = 2.0 * q;
    match index {
        1 => left(&|t| (mu_ - t).abs()),
        2 => left(&|t| (mu_ - t).abs() * t.powf(s) / at(t).powf(two_q)),
        3 => left(&|t| (mu_ - t).abs() * (1.0 - t).powf(s) / at(t).powf(two_q)),
        4 => right(&|t| (lambda_ - t).abs()),
        5 => right(&|t| (lambda_ - t).abs() * t.powf(s) / at(t).powf(two_q)),
        6 => right(&|t| (lambda_ - t).abs() * (1.0 - t).powf(s) / at(t).powf(two_q)),
        7 => left(&|t| (mu_ - t).abs().powf(p)),
        8 => left(&|t| t.powf(s) / at(t).powf(two_q)),
        9 => left(&|t| (1.0 - t).powf(s) / at(t).powf(two_q)),
        10 => right(&|t| (lambda_ - t).abs().powf(p)),
        11 => right(&|t| t.powf(s) / at(t).powf(two_q)),
        12 => right(&|t| (1.0 - t).powf(s) / at(t).powf(two_q)),
        _ => panic!("no coefficient {index}"),
    }
}

/// `∫_a^b f(u)/u² du` for `c x^p` in closed form.
pub fn power_over_square(c: f64, p: f64, a: f64, b: f64) -> f64 {
    if (p - 1.0).abs() < 1e-15 {
        c * (b / a).ln()
    } else {
        c * (b.powf(p - 1.0) - a.powf(p - 1.0)) / (p - 1.0)
    }
}

/// `I_f` for `c x^p` from antiderivatives.
pub fn if_power(c: f64, p: f64, a: f64, b: f64, lambda_: f64, mu_: f64) -> f64 {
    let f = |x: f64| c * x.powf(p);
    let h = 2.0 * a * b / (a + b);
    (lambda_ - mu_) * f(h) + (1.0 - lambda_) * f(a) + mu_ * f(b) - a * b / (b - a) * power_over_square(c, p, a, b)
}

/// Functions used by the proposition suites.
pub fn corpus() -> Vec<(&'static str, FunctionSpec)> {
    vec![
        ("x", FunctionSpec::linear()),
        ("x^2", FunctionSpec::power(1.0, 2.0)),
        ("x^3", FunctionSpec::power(1.0, 3.0)),
        ("sqrt", FunctionSpec::power(1.0, 0.5)),
        ("1/x", FunctionSpec::power(1.0, -1.0)),
        ("x^-2", FunctionSpec::power(1.0, -2.0)),
        ("const", FunctionSpec::constant(2.0)),
        ("neg_x", FunctionSpec::power(-1.0, 1.0)),
        ("spower_half", FunctionSpec::s_power(1.0, 0.5, 0.0)),
        ("spower_quarter", FunctionSpec::s_power(2.0, 0.25, 1.0)),
        ("x^1.5", FunctionSpec::power(0.5, 1.5)),
        ("neg_x^2", FunctionSpec::power(-1.0, 2.0)),
    ]
}

pub const CLASS_PAIRS: [(f64, f64); 6] = [(1.0, 1.0), (0.5, 1.0), (0.25, 0.5), (0.75, 0.75), (1.0, 0.5), (0.5, 0.25)];

pub const INTERVAL: (f64, f64) = (1.0, 3.0);

pub fn grid() -> GridSpec {
    GridSpec::over(INTERVAL.0, INTERVAL.1).unwrap()
}

/// Outcome of one proposition suite.
#[derive(Debug, Default)]
pub struct SuiteOutcome {
    /// Cases where the proposition's hypotheses held on the grid.
    pub exercised: usize,
    pub counterexamples: Vec<String>,
}

/// Monotone transfer between the two classes.
pub fn prop1_suite() -> SuiteOutcome {
    let mut out = SuiteOutcome::default();
    let g = grid();
    for (name, f) in corpus() {
        for (s, m) in CLASS_PAIRS {
            let c = classify(&f, s, m, &g).unwrap();
            let premise_a = c.sm_convex && c.monotone.nondecreasing();
            let premise_b = c.harmonic_sm_convex && c.monotone.nonincreasing();
            out.exercised += usize::from(premise_a || premise_b);
            if !c.transfer_consistent() {
                out.counterexamples.push(format!("{name} (s={s}, m={m}): {c:?}"));
            }
        }
    }
    out
}

/// Functions certified in class (s, m) on `[lo, hi]`.
pub fn certified(s: f64, m: f64, lo: f64, hi: f64) -> Vec<(&'static str, FunctionSpec)> {
    let g = GridSpec::over(lo, hi).unwrap();
    corpus()
        .into_iter()
        .filter(|(_, f)| check_harmonic_sm(f, s, m, &g).unwrap().holds)
        .collect()
}

/// Witness inequality at 101 points of `[a, b]` for certified functions.
pub fn prop2_suite() -> SuiteOutcome {
    let mut out = SuiteOutcome::default();
    let (a, b) = INTERVAL;
    for (s, m) in CLASS_PAIRS {
        for (name, f) in certified(s, m, a, b / m) {
            out.exercised += 1;
            for i in 0..=100 {
                let x = if i == 100 { b } else { a + (b - a) * i as f64 / 100.0 };
                let w = prop2_witness(&f, a, b, s, m, x).unwrap();
                if !w.holds {
                    out.counterexamples.push(format!("{name} (s={s}, m={m}) x={x}: {w:?}"));
                }
            }
        }
    }
    out
}

fn verify_claim(label: String, c: &Classed, out: &mut SuiteOutcome) {
    out.exercised += 1;
    let r = c.verify(&grid()).unwrap();
    if !r.holds {
        out.counterexamples.push(format!("{label}: worst {:e} at {:?}", r.worst_defect, r.witness));
    }
}

/// Maximum of two members of one class.
pub fn prop3_suite() -> SuiteOutcome {
    let mut out = SuiteOutcome::default();
    let (lo, hi) = INTERVAL;
    for (s, m) in CLASS_PAIRS {
        let members = certified(s, m, lo, hi);
        for (i, (n1, f1)) in members.iter().enumerate() {
            for (n2, f2) in &members[i..] {
                let c = combine(
                    &Combinator::Max,
                    &[Classed::new(f1.clone(), s, m), Classed::new(f2.clone(), s, m)],
                )
                .unwrap();
                verify_claim(format!("max({n1}, {n2}) s={s} m={m}"), &c, &mut out);
            }
        }
    }
    out
}

/// Limit of `(1 + 1/n) x` and of `(1 + 1/n) x^2`.
pub fn prop4_suite() -> SuiteOutcome {
    let mut out = SuiteOutcome::default();
    for (name, p) in [("x", 1.0), ("x^2", 2.0)] {
        let members: Vec<Classed> = (1..=20)
            .map(|n| Classed::new(FunctionSpec::power(1.0 + 1.0 / n as f64, p), 1.0, 1.0))
            .collect();
        for (n, member) in members.iter().enumerate() {
            if !member.verify(&grid()).unwrap().holds {
                out.counterexamples.push(format!("member {} of {name} sequence", n + 1));
            }
        }
        let limit = FunctionSpec::power(1.0, p);
        let c = combine(&Combinator::SeqLimit { limit }, &members).unwrap();
        verify_claim(format!("limit of (1+1/n){name}"), &c, &mut out);
    }
    out
}

/// Sums of non-negative members of two classes sharing m.
pub fn prop5_suite() -> SuiteOutcome {
    let mut out = SuiteOutcome::default();
    let (lo, hi) = INTERVAL;
    let nonneg = |f: &FunctionSpec| {
        (0..=100).all(|i| f.value(0.25 * lo + (hi - 0.25 * lo) * i as f64 / 100.0) >= 0.0)
    };
    for m in [1.0, 0.5] {
        for s1 in [0.25, 0.5, 1.0] {
            for s2 in [0.5, 1.0] {
                let a: Vec<_> = certified(s1, m, lo, hi).into_iter().filter(|(_, f)| nonneg(f)).collect();
                let b: Vec<_> = certified(s2, m, lo, hi).into_iter().filter(|(_, f)| nonneg(f)).collect();
                for (n1, f1) in &a {
                    for (n2, f2) in &b {
                        let c = combine(
                            &Combinator::Sum,
                            &[Classed::new(f1.clone(), s1, m), Classed::new(f2.clone(), s2, m)],
                        )
                        .unwrap();
                        assert_eq!(c.class.s, s1.min(s2));
                        verify_claim(format!("{n1} + {n2} s1={s1} s2={s2} m={m}"), &c, &mut out);
                    }
                }
            }
        }
    }
    out
}

/// Positive multiples.
pub fn prop6_suite() -> SuiteOutcome {
    let mut out = SuiteOutcome::default();
    let (lo, hi) = INTERVAL;
    for (s, m) in CLASS_PAIRS {
        for (name, f) in certified(s, m, lo, hi) {
            for factor in [0.1, 1.0, 2.0, 37.5] {
                let c = combine(&Combinator::Scale(factor), &[Classed::new(f.clone(), s, m)]).unwrap();
                verify_claim(format!("{factor}*{name} s={s} m={m}"), &c, &mut out);
            }
        }
    }
    out
}

/// `g(u) = u^2` after positive harmonically m-convex functions.
pub fn prop7_suite() -> SuiteOutcome {
    let mut out = SuiteOutcome::default();
    let (lo, hi) = INTERVAL;
    let outer = FunctionSpec::power(1.0, 2.0);
    for m in [1.0, 0.75, 0.5] {
        for (name, f) in certified(1.0, m, lo, hi) {
            // g is nondecreasing only on [0, ∞), so the inner function must stay positive.
            if (0..=100).any(|i| f.value(m * lo + (hi - m * lo) * i as f64 / 100.0) <= 0.0) {
                continue;
            }
            let c = combine(
                &Combinator::Compose {
                    outer: outer.clone(),
                    outer_s: 1.0,
                },
                &[Classed::new(f.clone(), 1.0, m)],
            )
            .unwrap();
            verify_claim(format!("({name})^2 m={m}"), &c, &mut out);
        }
    }
    out
}

pub fn all_suites() -> Vec<(&'static str, SuiteOutcome)> {
    vec![
        ("proposition 1", prop1_suite()),
        ("proposition 2", prop2_suite()),
        ("proposition 3", prop3_suite()),
        ("proposition 4", prop4_suite()),
        ("proposition 5", prop5_suite()),
        ("proposition 6", prop6_suite()),
        ("proposition 7", prop7_suite()),
    ]
}
