use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use harmonia::bounds::{
    certify, check_certified, crosscheck_b, endpoint_magnitudes, is_expected_erratum, theorem_rhs, BoundTolerances,
    EvalPath, TermStatus, Theorem,
};
use harmonia::convexity::{check_harmonic_sm, FunctionSpec, GridSpec};
use harmonia::harness::{emit_report, run_sweep, ReportFormat, SweepConfig};
use harmonia::identity::{verify_lemma1, verify_printed, Instance, Preset, IDENTITY_TOL};
use harmonia::quadrature::QuadSettings;
use harmonia::Error;

#[derive(Parser)]
#[command(name = "harmonia", version, about = "Harmonic (s,m)-convexity checks, identity and bound verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum PathArg {
    Oracle,
    Closed,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum PresetArg {
    Trapezoid,
    Midpoint,
    Simpson,
}

impl From<PresetArg> for Preset {
    fn from(p: PresetArg) -> Self {
        match p {
            PresetArg::Trapezoid => Preset::Trapezoid,
            PresetArg::Midpoint => Preset::Midpoint,
            PresetArg::Simpson => Preset::Simpson,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Grid check of harmonic (s,m)-convexity on [lo, hi].
    CheckConvexity {
        #[arg(long)]
        f: FunctionSpec,
        #[arg(long)]
        s: f64,
        #[arg(long)]
        m: f64,
        #[arg(long)]
        lo: f64,
        #[arg(long)]
        hi: f64,
        /// NX,NY,NT
        #[arg(long, value_parser = parse_grid)]
        grid: Option<(usize, usize, usize)>,
    },
    /// Compare I_f with its integral representation.
    VerifyIdentity {
        #[arg(long)]
        f: FunctionSpec,
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        #[arg(long, allow_hyphen_values = true)]
        lambda: f64,
        #[arg(long, allow_hyphen_values = true)]
        mu: f64,
        #[arg(long, default_value_t = IDENTITY_TOL)]
        tol: f64,
        /// Use the printed I_f (midpoint argument, 2ab/(b-a) factor).
        #[arg(long)]
        printed: bool,
    },
    /// Check |I_f| against the theorem bound.
    VerifyBounds {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        theorem: u8,
        #[arg(long)]
        f: FunctionSpec,
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        #[arg(long)]
        s: f64,
        #[arg(long)]
        m: f64,
        #[arg(long)]
        q: f64,
        #[arg(long, requires = "mu", conflicts_with = "preset")]
        lambda: Option<f64>,
        #[arg(long, requires = "lambda", conflicts_with = "preset")]
        mu: Option<f64>,
        #[arg(long, required_unless_present = "lambda")]
        preset: Option<PresetArg>,
        #[arg(long, value_enum, default_value = "oracle")]
        path: PathArg,
    },
    /// Closed form vs defining integral for the bound coefficients.
    Crosscheck {
        /// 1..12 or `all`
        #[arg(long, value_parser = parse_index)]
        index: IndexArg,
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        #[arg(long)]
        s: f64,
        #[arg(long)]
        m: f64,
        #[arg(long)]
        q: f64,
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        mu: f64,
    },
    /// Run a seeded verification sweep and write a report.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        format: FormatArg,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        jobs: Option<usize>,
    },
}

fn parse_grid(text: &str) -> Result<(usize, usize, usize), String> {
    let parts: Vec<_> = text.split(',').map(|p| p.trim().parse::<usize>()).collect();
    match parts.as_slice() {
        [Ok(x), Ok(y), Ok(t)] => Ok((*x, *y, *t)),
        _ => Err(format!("expected NX,NY,NT, got `{text}`")),
    }
}

#[derive(Clone, Copy)]
enum IndexArg {
    One(u8),
    All,
}

fn parse_index(text: &str) -> Result<IndexArg, String> {
    if text == "all" {
        return Ok(IndexArg::All);
    }
    match text.parse::<u8>() {
        Ok(i @ 1..=12) => Ok(IndexArg::One(i)),
        _ => Err(format!("expected 1..12 or `all`, got `{text}`")),
    }
}

fn yes_no(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "FAIL"
    }
}

fn exit_for(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn run(cli: Cli) -> harmonia::Result<ExitCode> {
    let quad = QuadSettings::default();
    match cli.command {
        Command::CheckConvexity { f, s, m, lo, hi, grid } => {
            let grid = match grid {
                Some((nx, ny, nt)) => GridSpec::new(nx, ny, nt, lo, hi)?,
                None => GridSpec::over(lo, hi)?,
            };
            let r = check_harmonic_sm(&f, s, m, &grid)?;
            let (x, y, t) = r.witness;
            println!("function      {f}");
            println!("class         harmonic (s,m) with s = {s}, m = {m} on [{lo}, {hi}]");
            println!("grid          {}x{}x{} ({} points)", grid.nx, grid.ny, grid.nt, r.checked);
            println!("worst defect  {:e} at x = {x}, y = {y}, t = {t}", r.worst_defect);
            println!("result        {}", yes_no(r.holds));
            Ok(exit_for(r.holds))
        }
        Command::VerifyIdentity {
            f,
            a,
            b,
            lambda,
            mu,
            tol,
            printed,
        } => {
            let inst = Instance::for_identity(a, b, lambda, mu, f)?;
            let c = if printed {
                verify_printed(&inst, &quad, tol)?
            } else {
                verify_lemma1(&inst, &quad, tol)?
            };
            let label = format!("I_f ({})", if printed { "printed" } else { "corrected" });
            println!("{label:<18}{:.16e}", c.lhs);
            println!("integral form     {:.16e}", c.rhs);
            println!("difference        {:e} (tol {:e})", c.abs_diff, c.tol);
            println!("result            {}", yes_no(c.pass));
            if printed {
                // The printed form failing is the known erratum.
                if !c.pass {
                    println!("note              printed I_f does not satisfy the identity (known erratum)");
                }
                return Ok(ExitCode::SUCCESS);
            }
            Ok(exit_for(c.pass))
        }
        Command::VerifyBounds {
            theorem,
            f,
            a,
            b,
            s,
            m,
            q,
            lambda,
            mu,
            preset,
            path,
        } => {
            let theorem = Theorem::from_number(theorem)?;
            let (l, u) = match (preset, lambda, mu) {
                (Some(p), _, _) => Preset::from(p).weights(),
                (None, Some(l), Some(u)) => (l, u),
                _ => return Err(Error::Parameter("give --lambda and --mu, or --preset".into())),
            };
            let inst = Instance::new(a, b, s, m, q, l, u, f)?;
            let cert = certify(&inst)?;
            let v = check_certified(&cert, theorem, &quad, &BoundTolerances::default(), true)?;
            println!("theorem       {}", theorem.number());
            println!("instance      a = {a}, b = {b}, s = {s}, m = {m}, q = {q}, lambda = {l}, mu = {u}, f = {}", inst.f);
            println!("|I_f|         {:.16e}", v.lhs);
            println!("rhs (oracle)  {:.16e}", v.rhs);
            match v.closed_rhs {
                Some(c) => println!("rhs (closed)  {c:.16e}"),
                None => println!("rhs (closed)  unavailable: a printed coefficient disagrees with its integral"),
            }
            let (rhs, unexpected) = match path {
                PathArg::Oracle => (v.rhs, 0),
                PathArg::Closed => {
                    let p = if theorem == Theorem::Two { q / (q - 1.0) } else { f64::NAN };
                    let mut unexpected = 0;
                    for index in theorem.indices() {
                        let t = crosscheck_b(index, &inst, p, &quad)?;
                        if t.status == TermStatus::ErratumSuspected {
                            let known = is_expected_erratum(index, t.case);
                            unexpected += usize::from(!known);
                            println!(
                                "erratum       B{index} ({}) rel diff {}{}",
                                t.case,
                                t.rel_diff.map_or("n/a".into(), |r| format!("{r:e}")),
                                if known { "" } else { " UNEXPECTED" }
                            );
                        }
                    }
                    let (fa_q, fbm_q) = endpoint_magnitudes(&inst);
                    (theorem_rhs(theorem, &inst, fa_q, fbm_q, EvalPath::ClosedForm, &quad)?, unexpected)
                }
            };
            let margin = rhs - v.lhs;
            let pass = margin >= -harmonia::bounds::MARGIN_TOL;
            println!("margin        {margin:.16e}");
            println!("result        {}", yes_no(pass));
            Ok(exit_for(pass && unexpected == 0))
        }
        Command::Crosscheck {
            index,
            a,
            b,
            s,
            m,
            q,
            lambda,
            mu,
        } => {
            let inst = Instance::new(a, b, s, m, q, lambda, mu, FunctionSpec::linear())?;
            let p = if q > 1.0 { q / (q - 1.0) } else { f64::NAN };
            let indices: Vec<u8> = match index {
                IndexArg::One(i) => vec![i],
                IndexArg::All if q > 1.0 => (1..=12).collect(),
                IndexArg::All => (1..=6).collect(),
            };
            let mut unexpected = 0;
            println!("{:<5} {:<16} {:>24} {:>24} {:>12}  status", "term", "case", "closed", "oracle", "rel diff");
            for i in indices {
                let t = crosscheck_b(i, &inst, p, &quad)?;
                let flagged = t.status == TermStatus::ErratumSuspected;
                let known = is_expected_erratum(i, t.case);
                unexpected += usize::from(flagged && !known);
                let status = match (t.status, known) {
                    (TermStatus::Ok, _) => "ok",
                    (TermStatus::OracleOnly, _) => "oracle_only",
                    (TermStatus::ErratumSuspected, true) => "erratum_suspected (expected)",
                    (TermStatus::ErratumSuspected, false) => "erratum_suspected (UNEXPECTED)",
                };
                println!(
                    "B{:<4} {:<16} {:>24} {:>24.16e} {:>12}  {status}",
                    i,
                    t.case.name(),
                    t.closed_form.map_or("-".into(), |c| format!("{c:.16e}")),
                    t.oracle,
                    t.rel_diff.map_or("-".into(), |r| format!("{r:.3e}")),
                );
            }
            Ok(exit_for(unexpected == 0))
        }
        Command::Sweep {
            config,
            out,
            format,
            seed,
            jobs,
        } => {
            let mut cfg = SweepConfig::load(&config)?;
            if let Some(seed) = seed {
                cfg.rng_seed = seed;
            }
            if jobs.is_some() {
                cfg.jobs = jobs;
            }
            cfg.validate()?;
            let report = run_sweep(&cfg)?;
            let format = match format {
                FormatArg::Json => ReportFormat::Json,
                FormatArg::Csv => ReportFormat::Csv,
            };
            emit_report(&report, format, &out)?;
            println!(
                "instances {} (discarded {}), identity {}/{}, theorem 1 {}/{}, theorem 2 {}/{}, errata {} ({} unexpected), failures {}, {:.2} s",
                report.instances,
                report.discarded,
                report.identity_pass,
                report.instances,
                report.theorem1.pass,
                report.theorem1.checks,
                report.theorem2.pass,
                report.theorem2.checks,
                report.errata.len(),
                report.unexpected_errata,
                report.failures.len(),
                report.wall_time_s
            );
            println!("report written to {}", out.display());
            Ok(exit_for(report.all_pass()))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e @ (Error::Accuracy { .. } | Error::NonFiniteIntegrand { .. })) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
