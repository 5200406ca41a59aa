//! Seeded instance generation, sweeps over the verification matrix and
//! report output.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{
    check_certified, certification_report, conjugate_exponent, crosscheck_b_with, is_expected_erratum,
    BoundTolerances, CertifiedInstance, TermCase, TermStatus, Theorem, Verdict, CROSSCHECK_TOL, MARGIN_TOL,
};
use crate::convexity::FunctionSpec;
use crate::identity::{verify_lemma1, verify_printed, Instance, Preset, IDENTITY_TOL};
use crate::quadrature::QuadSettings;
use crate::{Error, Result};

pub const SCHEMA: &str = "harmonia/v1";

/// A scalar parameter: a uniform range, a list to pick from, or a fixed value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Sampler {
    Range { lo: f64, hi: f64 },
    List(Vec<f64>),
    Fixed(f64),
}

impl Sampler {
    fn validate(&self, name: &str) -> Result<()> {
        let ok = match self {
            Sampler::Range { lo, hi } => lo.is_finite() && hi.is_finite() && lo <= hi,
            Sampler::List(v) => !v.is_empty() && v.iter().all(|x| x.is_finite()),
            Sampler::Fixed(x) => x.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid sampler for `{name}`: {self:?}")))
        }
    }

    fn bounds(&self) -> (f64, f64) {
        match self {
            Sampler::Range { lo, hi } => (*lo, *hi),
            Sampler::List(v) => v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &x| (l.min(x), h.max(x))),
            Sampler::Fixed(x) => (*x, *x),
        }
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            Sampler::Range { lo, hi } if lo == hi => *lo,
            Sampler::Range { lo, hi } => rng.gen_range(*lo..=*hi),
            Sampler::List(v) => v[rng.gen_range(0..v.len())],
            Sampler::Fixed(x) => *x,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum WeightMode {
    /// `μ ~ U[0, 1/2]`, `λ ~ U[1/2, 1]`
    Random,
    Fixed {
        lambda: f64,
        mu: f64,
    },
}

/// Function family to draw `f` from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FamilyTemplate {
    Linear,
    /// `c x^p`
    Power { c: Sampler, p: Sampler },
    /// `b x^s + c` with its own `s`
    SPower { b: Sampler, s: Sampler, c: Sampler },
    /// `x^{s+1}/(s+1)` with the instance's `s`, so `|f′|^q = x^{sq}`
    ShiftedPower,
    Fixed { spec: FunctionSpec },
}

impl FamilyTemplate {
    pub fn name(&self) -> &'static str {
        match self {
            FamilyTemplate::Linear => "linear",
            FamilyTemplate::Power { .. } => "power",
            FamilyTemplate::SPower { .. } => "s_power",
            FamilyTemplate::ShiftedPower => "shifted_power",
            FamilyTemplate::Fixed { .. } => "fixed",
        }
    }

    fn draw(&self, s: f64, rng: &mut ChaCha8Rng) -> FunctionSpec {
        match self {
            FamilyTemplate::Linear => FunctionSpec::linear(),
            FamilyTemplate::Power { c, p } => {
                let c = c.draw(rng);
                FunctionSpec::power(c, p.draw(rng))
            }
            FamilyTemplate::SPower { b, s, c } => {
                let b = b.draw(rng);
                let s = s.draw(rng);
                FunctionSpec::s_power(b, s, c.draw(rng))
            }
            FamilyTemplate::ShiftedPower => FunctionSpec::s_power(1.0 / (s + 1.0), s + 1.0, 0.0),
            FamilyTemplate::Fixed { spec } => spec.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    pub identity_tol: f64,
    pub crosscheck_tol: f64,
    pub margin_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            identity_tol: IDENTITY_TOL,
            crosscheck_tol: CROSSCHECK_TOL,
            margin_tol: MARGIN_TOL,
        }
    }
}

fn default_seed() -> u64 {
    42
}

fn default_samples() -> usize {
    200
}

fn default_quarters() -> Sampler {
    Sampler::List(vec![0.25, 0.5, 0.75, 1.0])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub a: Sampler,
    /// `b` is drawn as `a + (b - a)`.
    pub b_minus_a: Sampler,
    pub s: Sampler,
    pub m: Sampler,
    pub q: Sampler,
    pub weights: WeightMode,
    pub families: Vec<FamilyTemplate>,
    /// Number of certified instances to produce.
    pub samples: usize,
    pub rng_seed: u64,
    pub tolerances: Tolerances,
    pub quad: QuadSettings,
    /// Worker threads; `None` uses all cores.
    pub jobs: Option<usize>,
    /// Candidate draws allowed before giving up; `None` means `50 * samples`.
    pub max_attempts: Option<usize>,
    /// Also evaluate the printed `I_f` on `f(x) = x`, `[1, 2]`, `λ = μ = 1/2`,
    /// which is expected to fail the identity.
    pub include_printed_regression: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            a: Sampler::Range { lo: 0.5, hi: 2.0 },
            b_minus_a: Sampler::Range { lo: 0.1, hi: 2.0 },
            s: default_quarters(),
            m: default_quarters(),
            q: Sampler::List(vec![1.0, 1.5, 2.0, 3.0]),
            weights: WeightMode::Random,
            families: vec![
                FamilyTemplate::Linear,
                FamilyTemplate::Power {
                    c: Sampler::Fixed(1.0),
                    p: Sampler::Range { lo: 0.5, hi: 3.0 },
                },
                FamilyTemplate::ShiftedPower,
            ],
            samples: default_samples(),
            rng_seed: default_seed(),
            tolerances: Tolerances::default(),
            quad: QuadSettings::default(),
            jobs: None,
            max_attempts: None,
            include_printed_regression: false,
        }
    }
}

impl SweepConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::Config("samples must be at least 1".into()));
        }
        if self.families.is_empty() {
            return Err(Error::Config("at least one function family is required".into()));
        }
        if self.jobs == Some(0) {
            return Err(Error::Config("jobs must be at least 1".into()));
        }
        for (name, sampler) in [
            ("a", &self.a),
            ("b_minus_a", &self.b_minus_a),
            ("s", &self.s),
            ("m", &self.m),
            ("q", &self.q),
        ] {
            sampler.validate(name)?;
        }
        let check = |name: &str, (lo, hi): (f64, f64), ok: bool| {
            if ok {
                Ok(())
            } else {
                Err(Error::Config(format!("`{name}` range [{lo}, {hi}] violates the instance constraints")))
            }
        };
        let a = self.a.bounds();
        check("a", a, a.0 > 0.0)?;
        let d = self.b_minus_a.bounds();
        check("b_minus_a", d, d.0 > 0.0)?;
        let s = self.s.bounds();
        check("s", s, s.0 > 0.0 && s.1 <= 1.0)?;
        let m = self.m.bounds();
        check("m", m, m.0 > 0.0 && m.1 <= 1.0)?;
        let q = self.q.bounds();
        check("q", q, q.0 >= 1.0)?;
        if let WeightMode::Fixed { lambda, mu } = self.weights {
            if !((0.0..=0.5).contains(&mu) && (0.5..=1.0).contains(&lambda)) {
                return Err(Error::Config(format!(
                    "fixed weights need 0 <= mu <= 1/2 <= lambda <= 1, got lambda = {lambda}, mu = {mu}"
                )));
            }
        }
        let t = &self.tolerances;
        if ![t.identity_tol, t.crosscheck_tol, t.margin_tol]
            .iter()
            .all(|x| x.is_finite() && *x >= 0.0)
        {
            return Err(Error::Config("tolerances must be finite and non-negative".into()));
        }
        self.quad.validate().map_err(|e| Error::Config(e.to_string()))
    }

    fn bound_tolerances(&self) -> BoundTolerances {
        BoundTolerances {
            crosscheck_tol: self.tolerances.crosscheck_tol,
            margin_tol: self.tolerances.margin_tol,
        }
    }

    fn pool(&self) -> Result<rayon::ThreadPool> {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.jobs.unwrap_or(0))
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))
    }
}

/// A certified instance with its position and family label.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepInstance {
    pub id: usize,
    pub family: &'static str,
    pub cert: CertifiedInstance,
}

impl SweepInstance {
    pub fn instance(&self) -> &Instance {
        self.cert.instance()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Generated {
    pub instances: Vec<SweepInstance>,
    pub attempts: usize,
    pub discarded: usize,
}

fn draw_candidate(cfg: &SweepConfig, rng: &mut ChaCha8Rng) -> (&'static str, Result<Instance>) {
    let a = cfg.a.draw(rng);
    let b = a + cfg.b_minus_a.draw(rng);
    let s = cfg.s.draw(rng);
    let m = cfg.m.draw(rng);
    let q = cfg.q.draw(rng);
    let (lambda_, mu_) = match cfg.weights {
        WeightMode::Random => {
            let l = rng.gen_range(0.5..=1.0);
            (l, rng.gen_range(0.0..=0.5))
        }
        WeightMode::Fixed { lambda, mu } => (lambda, mu),
    };
    let family = &cfg.families[rng.gen_range(0..cfg.families.len())];
    let f = family.draw(s, rng);
    (family.name(), Instance::new(a, b, s, m, q, lambda_, mu_, f))
}

/// Draw candidates with the seeded generator and keep those whose `|f′|^q`
/// certifies on `[a, b/m]`. Candidates are drawn serially and certified in
/// parallel batches, so the result depends only on the seed.
pub fn generate_instances(cfg: &SweepConfig) -> Result<Generated> {
    cfg.validate()?;
    let pool = cfg.pool()?;
    pool.install(|| generate_in_pool(cfg))
}

fn generate_in_pool(cfg: &SweepConfig) -> Result<Generated> {
    let max_attempts = cfg.max_attempts.unwrap_or(50 * cfg.samples).max(cfg.samples);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let mut instances = Vec::with_capacity(cfg.samples);
    let mut attempts = 0;
    let mut discarded = 0;

    while instances.len() < cfg.samples && attempts < max_attempts {
        let batch = (cfg.samples - instances.len()).max(8).min(max_attempts - attempts);
        let candidates: Vec<_> = (0..batch).map(|_| draw_candidate(cfg, &mut rng)).collect();
        attempts += batch;
        let certified: Vec<Option<(&'static str, CertifiedInstance)>> = candidates
            .into_par_iter()
            .map(|(family, inst)| {
                let inst = inst.ok()?;
                let report = certification_report(&inst).ok()?;
                report.holds.then(|| (family, CertifiedInstance::from_report(inst, report)))
            })
            .collect();
        for c in certified {
            match c {
                Some((family, cert)) if instances.len() < cfg.samples => instances.push(SweepInstance {
                    id: instances.len(),
                    family,
                    cert,
                }),
                Some(_) => {}
                None => discarded += 1,
            }
        }
    }
    if instances.is_empty() {
        return Err(Error::Config(format!(
            "no candidate certified after {attempts} attempts; widen the ranges or change the families"
        )));
    }
    Ok(Generated {
        instances,
        attempts,
        discarded,
    })
}

/// One CSV row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRow {
    pub instance_id: usize,
    pub family: String,
    pub a: f64,
    pub b: f64,
    pub s: f64,
    pub m: f64,
    pub q: f64,
    pub lambda: f64,
    pub mu: f64,
    pub check: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub pass: bool,
}

impl CheckRow {
    fn new(case: &SweepInstance, check: String, inst: &Instance, lhs: f64, rhs: f64, margin: f64, pass: bool) -> Self {
        Self {
            instance_id: case.id,
            family: case.family.to_string(),
            a: inst.a,
            b: inst.b,
            s: inst.s,
            m: inst.m,
            q: inst.q,
            lambda: inst.lambda_,
            mu: inst.mu_,
            check,
            lhs,
            rhs,
            margin,
            pass,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErratumRow {
    pub instance_id: usize,
    pub index: u8,
    pub case: TermCase,
    pub closed_form: Option<f64>,
    pub oracle: f64,
    pub rel_diff: Option<f64>,
    pub expected: bool,
    pub instance: Instance,
}

/// Flag counts per `(index, case)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErratumSummary {
    pub index: u8,
    pub case: TermCase,
    pub flagged: usize,
    pub checked: usize,
    pub expected: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureRow {
    pub instance_id: usize,
    pub check: String,
    pub message: String,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct BoundCounts {
    pub checks: usize,
    pub pass: usize,
    /// Smallest `rhs - lhs` seen.
    pub worst_margin: Option<f64>,
}

impl BoundCounts {
    fn add(&mut self, v: &Verdict) {
        self.checks += 1;
        self.pass += usize::from(v.pass);
        self.worst_margin = Some(self.worst_margin.map_or(v.margin, |w| w.min(v.margin)));
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrintedRegression {
    pub lhs: f64,
    pub rhs: f64,
    pub abs_diff: f64,
    pub identity_holds: bool,
    /// The printed form is expected to fail here.
    pub as_expected: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema: String,
    pub generated_at: Option<String>,
    pub config: SweepConfig,
    pub instances: usize,
    pub attempts: usize,
    pub discarded: usize,
    pub identity_pass: usize,
    pub identity_fail: usize,
    pub theorem1: BoundCounts,
    pub theorem2: BoundCounts,
    pub terms_checked: usize,
    pub erratum_table: Vec<ErratumSummary>,
    pub errata: Vec<ErratumRow>,
    pub unexpected_errata: usize,
    pub printed_regression: Option<PrintedRegression>,
    pub failures: Vec<FailureRow>,
    pub wall_time_s: f64,
    pub rows: Vec<CheckRow>,
}

impl RunReport {
    pub fn empty(config: SweepConfig) -> Self {
        Self {
            schema: SCHEMA.to_string(),
            generated_at: None,
            config,
            instances: 0,
            attempts: 0,
            discarded: 0,
            identity_pass: 0,
            identity_fail: 0,
            theorem1: BoundCounts::default(),
            theorem2: BoundCounts::default(),
            terms_checked: 0,
            erratum_table: Vec::new(),
            errata: Vec::new(),
            unexpected_errata: 0,
            printed_regression: None,
            failures: Vec::new(),
            wall_time_s: 0.0,
            rows: Vec::new(),
        }
    }

    /// No identity or bound violation, no error, and no erratum outside the
    /// expected set.
    pub fn all_pass(&self) -> bool {
        self.identity_fail == 0
            && self.theorem1.pass == self.theorem1.checks
            && self.theorem2.pass == self.theorem2.checks
            && self.unexpected_errata == 0
            && self.failures.is_empty()
            && self.printed_regression.as_ref().map_or(true, |r| r.as_expected)
    }

    /// The set of flagged `(index, case)` pairs.
    pub fn flagged_pairs(&self) -> Vec<(u8, TermCase)> {
        self.erratum_table
            .iter()
            .filter(|e| e.flagged > 0)
            .map(|e| (e.index, e.case))
            .collect()
    }
}

#[derive(Debug, Default)]
struct InstanceOutcome {
    rows: Vec<CheckRow>,
    identity_pass: Option<bool>,
    verdicts: Vec<Verdict>,
    terms: Vec<(u8, TermCase, bool)>,
    errata: Vec<ErratumRow>,
    failures: Vec<FailureRow>,
}

fn preset_check_name(theorem: Theorem, preset: Option<Preset>) -> String {
    match preset {
        Some(p) => format!("theorem{}_{}", theorem.number(), p.name()),
        None => format!("theorem{}", theorem.number()),
    }
}

fn run_instance(case: &SweepInstance, cfg: &SweepConfig) -> InstanceOutcome {
    let mut out = InstanceOutcome::default();
    let inst = case.instance();
    let quad = &cfg.quad;
    let tol = cfg.bound_tolerances();
    let fail = |check: &str, e: Error| FailureRow {
        instance_id: case.id,
        check: check.to_string(),
        message: e.to_string(),
    };

    match verify_lemma1(inst, quad, cfg.tolerances.identity_tol) {
        Ok(c) => {
            out.identity_pass = Some(c.pass);
            out.rows
                .push(CheckRow::new(case, "lemma1".into(), inst, c.lhs, c.rhs, -c.abs_diff, c.pass));
        }
        Err(e) => out.failures.push(fail("lemma1", e)),
    }

    let mut theorems = vec![Theorem::One];
    if inst.q > 1.0 {
        theorems.push(Theorem::Two);
    }
    let triples = std::iter::once(None).chain(Preset::ALL.into_iter().map(Some));
    for preset in triples {
        let cert = match preset {
            None => Ok(case.cert.clone()),
            Some(p) => {
                let (l, m) = p.weights();
                case.cert.with_weights(l, m)
            }
        };
        let cert = match cert {
            Ok(c) => c,
            Err(e) => {
                out.failures.push(fail(&preset_check_name(Theorem::One, preset), e));
                continue;
            }
        };
        for &theorem in &theorems {
            let name = preset_check_name(theorem, preset);
            match check_certified(&cert, theorem, quad, &tol, false) {
                Ok(v) => {
                    out.rows
                        .push(CheckRow::new(case, name, cert.instance(), v.lhs, v.rhs, v.margin, v.pass));
                    out.verdicts.push(v);
                }
                Err(e) => out.failures.push(fail(&name, e)),
            }
        }
    }

    let (indices, p): (Vec<u8>, f64) = match conjugate_exponent(inst.q) {
        Ok(p) => ((1..=12).collect(), p),
        Err(_) => ((1..=6).collect(), f64::NAN),
    };
    for index in indices {
        match crosscheck_b_with(index, inst, p, quad, tol.crosscheck_tol) {
            Ok(t) => {
                let flagged = t.status == TermStatus::ErratumSuspected;
                out.terms.push((index, t.case, flagged));
                if flagged {
                    out.errata.push(ErratumRow {
                        instance_id: case.id,
                        index,
                        case: t.case,
                        closed_form: t.closed_form,
                        oracle: t.oracle,
                        rel_diff: t.rel_diff,
                        expected: is_expected_erratum(index, t.case),
                        instance: inst.clone(),
                    });
                }
            }
            Err(e) => out.failures.push(fail(&format!("crosscheck_b{index}"), e)),
        }
    }
    out
}

/// The fixed case on which the printed `I_f` is known to break the identity.
pub fn printed_regression_instance() -> Instance {
    Instance::for_identity(1.0, 2.0, 0.5, 0.5, FunctionSpec::linear()).expect("valid regression instance")
}

/// Run the full verification matrix on freshly generated instances.
pub fn run_sweep(cfg: &SweepConfig) -> Result<RunReport> {
    let started = Instant::now();
    cfg.validate()?;
    let pool = cfg.pool()?;
    let generated = pool.install(|| generate_in_pool(cfg))?;
    let outcomes: Vec<InstanceOutcome> =
        pool.install(|| generated.instances.par_iter().map(|c| run_instance(c, cfg)).collect());

    let mut report = RunReport::empty(cfg.clone());
    report.instances = generated.instances.len();
    report.attempts = generated.attempts;
    report.discarded = generated.discarded;

    let mut table: BTreeMap<(u8, TermCase), (usize, usize)> = BTreeMap::new();
    for o in outcomes {
        match o.identity_pass {
            Some(true) => report.identity_pass += 1,
            Some(false) | None => report.identity_fail += 1,
        }
        for v in &o.verdicts {
            match v.theorem {
                Theorem::One => report.theorem1.add(v),
                Theorem::Two => report.theorem2.add(v),
            }
        }
        for (index, case, flagged) in o.terms {
            report.terms_checked += 1;
            let entry = table.entry((index, case)).or_default();
            entry.0 += usize::from(flagged);
            entry.1 += 1;
        }
        report.errata.extend(o.errata);
        report.failures.extend(o.failures);
        report.rows.extend(o.rows);
    }
    report.erratum_table = table
        .into_iter()
        .map(|((index, case), (flagged, checked))| ErratumSummary {
            index,
            case,
            flagged,
            checked,
            expected: is_expected_erratum(index, case),
        })
        .collect();
    report.unexpected_errata = report.errata.iter().filter(|e| !e.expected).count();

    if cfg.include_printed_regression {
        let inst = printed_regression_instance();
        let c = verify_printed(&inst, &cfg.quad, cfg.tolerances.identity_tol)?;
        report.printed_regression = Some(PrintedRegression {
            lhs: c.lhs,
            rhs: c.rhs,
            abs_diff: c.abs_diff,
            identity_holds: c.pass,
            as_expected: !c.pass,
        });
        report.rows.push(CheckRow {
            instance_id: report.instances,
            family: "linear".into(),
            a: inst.a,
            b: inst.b,
            s: inst.s,
            m: inst.m,
            q: inst.q,
            lambda: inst.lambda_,
            mu: inst.mu_,
            check: "lemma1_printed".into(),
            lhs: c.lhs,
            rhs: c.rhs,
            margin: -c.abs_diff,
            pass: c.pass,
        });
    }

    report.generated_at = Some(chrono::Utc::now().to_rfc3339());
    report.wall_time_s = started.elapsed().as_secs_f64();
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    Json,
    Csv,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            _ => Err(Error::Parse {
                text: s.to_string(),
                reason: "expected json or csv".into(),
            }),
        }
    }
}

/// 17 significant digits.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub const CSV_HEADER: [&str; 14] = [
    "instance_id",
    "family",
    "a",
    "b",
    "s",
    "m",
    "q",
    "lambda",
    "mu",
    "check",
    "lhs",
    "rhs",
    "margin",
    "pass",
];

pub fn write_csv<W: Write>(report: &RunReport, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(CSV_HEADER)?;
    for r in &report.rows {
        out.write_record([
            r.instance_id.to_string(),
            r.family.clone(),
            num(r.a),
            num(r.b),
            num(r.s),
            num(r.m),
            num(r.q),
            num(r.lambda),
            num(r.mu),
            r.check.clone(),
            num(r.lhs),
            num(r.rhs),
            num(r.margin),
            r.pass.to_string(),
        ])?;
    }
    out.flush().map_err(|e| Error::Csv(e.into()))?;
    Ok(())
}

pub fn emit_report(report: &RunReport, format: ReportFormat, destination: &Path) -> Result<()> {
    let io_err = |source| Error::Io {
        path: destination.to_path_buf(),
        source,
    };
    let file = File::create(destination).map_err(io_err)?;
    let mut w = BufWriter::new(file);
    match format {
        ReportFormat::Json => {
            serde_json::to_writer_pretty(&mut w, report)?;
            w.write_all(b"\n").map_err(io_err)?;
        }
        ReportFormat::Csv => write_csv(report, &mut w)?,
    }
    w.flush().map_err(io_err)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(samples: usize) -> SweepConfig {
        SweepConfig {
            samples,
            ..SweepConfig::default()
        }
    }

    #[test]
    fn config_round_trip_and_defaults() {
        let cfg = SweepConfig::default();
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(SweepConfig::from_json(&text).unwrap(), cfg);
        assert_eq!(SweepConfig::from_json("{}").unwrap(), cfg);
        let cfg = SweepConfig::from_json(r#"{"a": {"lo": 1, "hi": 1.5}, "q": 2, "s": [0.5]}"#).unwrap();
        assert_eq!(cfg.q, Sampler::Fixed(2.0));
        assert!(SweepConfig::from_json(r#"{"samples": 0}"#).is_err());
        assert!(SweepConfig::from_json(r#"{"m": [0.5, 1.5]}"#).is_err());
        assert!(SweepConfig::from_json(r#"{"bogus": 1}"#).is_err());
    }

    #[test]
    fn generation_is_seeded() {
        let cfg = small(12);
        let g1 = generate_instances(&cfg).unwrap();
        let g2 = generate_instances(&cfg).unwrap();
        assert_eq!(g1, g2);
        assert_eq!(g1.instances.len(), 12);
        assert!(g1.instances.iter().enumerate().all(|(i, c)| c.id == i));
        let other = generate_instances(&SweepConfig { rng_seed: 7, ..cfg }).unwrap();
        assert_ne!(g1.instances, other.instances);
    }

    #[test]
    fn linear_with_unit_m_always_certifies() {
        let cfg = SweepConfig {
            samples: 10,
            m: Sampler::Fixed(1.0),
            families: vec![FamilyTemplate::Linear],
            ..SweepConfig::default()
        };
        let g = generate_instances(&cfg).unwrap();
        assert_eq!(g.discarded, 0);
        let report = run_sweep(&cfg).unwrap();
        assert_eq!(report.identity_pass, 10);
        assert!(report.theorem1.pass == report.theorem1.checks && report.theorem1.checks >= 40);
        assert_eq!(report.unexpected_errata, 0);
        assert!(report.all_pass(), "{:?}", report.failures);
    }

    #[test]
    fn nothing_certifies() {
        // |f′| ≡ 1 fails for m < 1.
        let cfg = SweepConfig {
            samples: 3,
            m: Sampler::Fixed(0.5),
            families: vec![FamilyTemplate::Linear],
            max_attempts: Some(20),
            ..SweepConfig::default()
        };
        assert!(matches!(generate_instances(&cfg), Err(Error::Config(_))));
    }

    #[test]
    fn printed_regression_is_one_expected_failure() {
        let cfg = SweepConfig {
            samples: 2,
            include_printed_regression: true,
            ..SweepConfig::default()
        };
        let report = run_sweep(&cfg).unwrap();
        let r = report.printed_regression.as_ref().unwrap();
        assert!(!r.identity_holds && r.as_expected);
        assert_eq!(report.rows.iter().filter(|r| r.check == "lemma1_printed" && !r.pass).count(), 1);
        assert!(report.all_pass());
    }

    #[test]
    fn reports_serialize() {
        let empty = RunReport::empty(SweepConfig::default());
        let text = serde_json::to_string(&empty).unwrap();
        let back: RunReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back.instances, 0);
        assert_eq!(back.schema, SCHEMA);

        let report = run_sweep(&small(1)).unwrap();
        let mut buf = Vec::new();
        write_csv(&report, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER.join(","));
        assert!(lines.count() >= 1);
        let back: RunReport = serde_json::from_str(&serde_json::to_string(&report).unwrap()).unwrap();
        assert_eq!(back.theorem1, report.theorem1);
        assert_eq!(back.identity_pass, report.identity_pass);
    }
}
