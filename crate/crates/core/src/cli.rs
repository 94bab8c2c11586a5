//! The `ramification` command line.
//!
//! Exit codes: 0 success, 2 invalid input or parameters, 3 two independent
//! computations disagreed, 4 sequence not stable in the requested range,
//! 5 a verification check failed.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;

use crate::document::Document;
use crate::error::Error;
use crate::exec::Execution;
use crate::filtration::{different_report, phi_of, psi_of};
use crate::propgroup::{
    abelian_check, abelian_negative_control, closed_subgroup_dimension, enumerate_group, gl2_generators, kernel_order,
    power_subgroup_check, shift_check, sl2_generators, ModMatrix, Precision, DEFAULT_BUDGET,
};
use crate::rational::{format_rational, parse_integer, parse_rational, Rat};
use crate::tower::{disc_from_different, fit_stability, reindex_constants, BracketTower, StabilityFit};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_DISAGREEMENT: i32 = 3;
pub const EXIT_NOT_STABLE: i32 = 4;
pub const EXIT_CHECK_FAILED: i32 = 5;

#[derive(Debug, Parser)]
#[command(name = "ramification", version, about = "Exact ramification data of local field extensions")]
pub struct Cli {
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Element budget for subgroup closure.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    budget: usize,
    /// Run batch work on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Valuation of the different of a lower_filtration document.
    Different { file: PathBuf },
    /// Herbrand function algebra on pl_function documents.
    #[command(subcommand)]
    Herbrand(HerbrandCommand),
    /// Level table (i, degree, different) for a sen_profile or general_tower.
    Tower {
        file: PathBuf,
        /// Inclusive level range `a..b`.
        #[arg(long)]
        levels: Option<String>,
        #[arg(long)]
        fit: bool,
    },
    /// Fit `C i p^{di} + A p^{di} + B` to `i:value` pairs.
    Fit {
        #[arg(required = true)]
        values: Vec<String>,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        d: u32,
    },
    /// Shift stability constants to the origin `K(k)`.
    Reindex {
        #[arg(long, allow_hyphen_values = true)]
        c: String,
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        #[arg(long, default_value_t = 0)]
        i_min: i64,
        #[arg(long, allow_hyphen_values = true)]
        k: i64,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        d: u32,
    },
    /// Discriminant exponent from the different.
    Disc {
        #[arg(long)]
        different: String,
        #[arg(long)]
        e_k: String,
        #[arg(long)]
        f_k: String,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        d: u32,
        #[arg(long)]
        levels: u64,
        #[arg(long)]
        e_i: String,
    },
    /// Congruence subgroups of GL_n(Z_p) at finite precision.
    #[command(subcommand)]
    Propgroup(PropgroupCommand),
}

#[derive(Debug, Subcommand)]
enum HerbrandCommand {
    /// Evaluate at a rational point.
    Eval {
        file: PathBuf,
        #[arg(allow_hyphen_values = true)]
        x: String,
    },
    /// `outer ∘ inner`.
    Compose { outer: PathBuf, inner: PathBuf },
    Invert { file: PathBuf },
    /// `phi` of a lower_filtration document.
    Phi { file: PathBuf },
    /// `psi` of an upper_filtration document.
    Psi { file: PathBuf },
}

#[derive(Debug, Args)]
struct Shape {
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long)]
    p: u64,
}

#[derive(Debug, Subcommand)]
enum PropgroupCommand {
    /// Order of the level-i congruence kernel mod p^m.
    Order {
        #[command(flatten)]
        shape: Shape,
        #[arg(long)]
        i: u32,
        #[arg(long)]
        m: u32,
        /// Also count by enumerating every matrix.
        #[arg(long)]
        enumerate: bool,
    },
    /// Shift map X -> X^p from level i to level i+1.
    Shift {
        #[command(flatten)]
        shape: Shape,
        #[arg(long, default_value_t = 1)]
        i: u32,
        /// Defaults to i + 2.
        #[arg(long)]
        m: Option<u32>,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
    /// Commutators of level-1 elements lie at level 2.
    Abelian {
        #[command(flatten)]
        shape: Shape,
        #[arg(long, default_value_t = 3)]
        m: u32,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
    /// Power subgroups H^{p^j} against congruence kernels.
    Powers {
        #[command(flatten)]
        shape: Shape,
        #[arg(long)]
        j: u32,
        #[arg(long)]
        m: u32,
    },
    /// Dimension of a closed subgroup from its congruence filtration.
    Dim {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        m: Option<u32>,
        /// Use the determinant-one subgroup instead of the whole group.
        #[arg(long)]
        sl: bool,
        /// generator_set document instead of the built-in generators.
        #[arg(long, conflicts_with = "sl")]
        generators: Option<PathBuf>,
    },
}

/// Captured result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Inconsistency(_) => EXIT_DISAGREEMENT,
        Error::NotStable { .. } => EXIT_NOT_STABLE,
        _ => EXIT_INVALID,
    }
}

struct Context {
    seed: u64,
    budget: usize,
    exec: Execution,
    out: String,
}

type Step = Result<i32, Error>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Outcome { stdout: text, stderr: String::new(), code }
            } else {
                Outcome { stdout: String::new(), stderr: text, code }
            };
        }
    };
    let exec = if cli.sequential { Execution::Sequential } else { Execution::default() };
    let mut ctx = Context { seed: cli.seed, budget: cli.budget, exec, out: String::new() };
    match dispatch(&mut ctx, cli.command) {
        Ok(code) => Outcome { stdout: ctx.out, stderr: String::new(), code },
        Err(e) => Outcome { stdout: ctx.out, stderr: format!("error: {e}\n"), code: exit_code(&e) },
    }
}

fn load(path: &PathBuf) -> Result<Document, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
        location: path.display().to_string(),
        message: e.to_string(),
    })?;
    Document::from_json(&text).map_err(|e| match e {
        Error::Parse { location, message } => {
            Error::Parse { location: format!("{}: {location}", path.display()), message }
        }
        other => other,
    })
}

fn wrong_kind(doc: &Document, expected: &str) -> Error {
    Error::InvalidParameters(format!("expected a {expected} document, got {}", doc.kind()))
}

fn rational_arg(s: &str, name: &str) -> Result<Rat, Error> {
    parse_rational(s).map_err(|message| Error::Parse { location: name.to_string(), message })
}

fn integer_arg(s: &str, name: &str) -> Result<BigInt, Error> {
    parse_integer(s).map_err(|message| Error::Parse { location: name.to_string(), message })
}

fn dispatch(ctx: &mut Context, command: Command) -> Step {
    match command {
        Command::Different { file } => {
            let lower = match load(&file)? {
                Document::LowerFiltration(l) => l,
                other => return Err(wrong_kind(&other, "lower_filtration")),
            };
            let r = different_report(&lower)?;
            writeln!(ctx.out, "lower sum\t{}", r.sum).unwrap();
            writeln!(ctx.out, "integral\t{}", format_rational(&r.integral)).unwrap();
            writeln!(ctx.out, "different\t{}", r.value).unwrap();
            Ok(EXIT_OK)
        }
        Command::Herbrand(cmd) => herbrand(ctx, cmd),
        Command::Tower { file, levels, fit } => tower(ctx, &file, levels.as_deref(), fit),
        Command::Fit { values, p, d } => {
            let mut points = Vec::with_capacity(values.len());
            for v in &values {
                let (i, x) = v
                    .split_once(':')
                    .ok_or_else(|| Error::InvalidParameters(format!("expected i:value, got {v:?}")))?;
                let i = i.trim().parse::<i64>().map_err(|_| Error::InvalidParameters(format!("bad level in {v:?}")))?;
                points.push((i, integer_arg(x, v)?));
            }
            let fit = fit_stability(&points, p, d)?;
            write_fit(ctx, &fit);
            Ok(EXIT_OK)
        }
        Command::Reindex { c, a, b, i_min, k, p, d } => {
            let fit = StabilityFit {
                c: rational_arg(&c, "--c")?,
                a: rational_arg(&a, "--a")?,
                b: rational_arg(&b, "--b")?,
                i_min,
            };
            write_fit(ctx, &reindex_constants(&fit, k, p, d));
            Ok(EXIT_OK)
        }
        Command::Disc { different, e_k, f_k, p, d, levels, e_i } => {
            let v = disc_from_different(
                &integer_arg(&different, "--different")?,
                &integer_arg(&e_k, "--e-k")?,
                &integer_arg(&f_k, "--f-k")?,
                p,
                d,
                levels,
                &integer_arg(&e_i, "--e-i")?,
            )?;
            writeln!(ctx.out, "discriminant\t{v}").unwrap();
            Ok(EXIT_OK)
        }
        Command::Propgroup(cmd) => propgroup(ctx, cmd),
    }
}

fn herbrand(ctx: &mut Context, cmd: HerbrandCommand) -> Step {
    let function = |path: &PathBuf| match load(path)? {
        Document::PlFunction(f) => Ok(f),
        other => Err(wrong_kind(&other, "pl_function")),
    };
    let result = match cmd {
        HerbrandCommand::Eval { file, x } => {
            let y = function(&file)?.eval(&rational_arg(&x, "x")?)?;
            writeln!(ctx.out, "{}", format_rational(&y)).unwrap();
            return Ok(EXIT_OK);
        }
        HerbrandCommand::Compose { outer, inner } => function(&outer)?.compose(&function(&inner)?),
        HerbrandCommand::Invert { file } => function(&file)?.invert(),
        HerbrandCommand::Phi { file } => match load(&file)? {
            Document::LowerFiltration(l) => phi_of(&l),
            other => return Err(wrong_kind(&other, "lower_filtration")),
        },
        HerbrandCommand::Psi { file } => match load(&file)? {
            Document::UpperFiltration(u) => psi_of(&u),
            other => return Err(wrong_kind(&other, "upper_filtration")),
        },
    };
    writeln!(ctx.out, "{}", Document::PlFunction(result).to_json()).unwrap();
    Ok(EXIT_OK)
}

fn parse_levels(spec: &str) -> Result<(u64, u64), Error> {
    let bad = || Error::InvalidParameters(format!("--levels expects a..b, got {spec:?}"));
    let (a, b) = spec.split_once("..").ok_or_else(bad)?;
    let a: u64 = a.trim().parse().map_err(|_| bad())?;
    let b: u64 = b.trim().parse().map_err(|_| bad())?;
    if a > b {
        return Err(bad());
    }
    Ok((a, b))
}

fn tower(ctx: &mut Context, file: &PathBuf, levels: Option<&str>, fit: bool) -> Step {
    let doc = load(file)?;
    let (default_start, p, d, e) = match &doc {
        Document::SenProfile(prof) => (0, prof.p(), prof.d(), prof.e()),
        Document::GeneralTower(t) => (t.i0(), t.profile().p(), t.profile().d(), t.profile().e()),
        other => return Err(wrong_kind(other, "sen_profile or general_tower")),
    };
    let (lo, hi) = match levels {
        Some(s) => parse_levels(s)?,
        None => (default_start, default_start + 5),
    };
    if fit && hi - lo < 2 {
        return Err(Error::InvalidParameters("--fit needs at least three levels".into()));
    }
    let levels: Vec<u64> = (lo..=hi).collect();
    let rows: Vec<Result<(BigInt, BigInt), Error>> = match &doc {
        Document::SenProfile(prof) => {
            let t = BracketTower::new(prof.clone());
            ctx.exec.map(&levels, |&i| Ok((t.degree(i), t.different_direct(i)?)))
        }
        Document::GeneralTower(t) => ctx.exec.map(&levels, |&i| {
            let r = t.different(i)?;
            Ok((r.degree, r.value))
        }),
        _ => unreachable!(),
    };
    writeln!(ctx.out, "i\tdegree\tdifferent").unwrap();
    let mut values = Vec::with_capacity(rows.len());
    for (i, row) in levels.iter().zip(rows) {
        let (degree, different) = row?;
        writeln!(ctx.out, "{i}\t{degree}\t{different}").unwrap();
        values.push((*i as i64, different));
    }
    if !fit {
        return Ok(EXIT_OK);
    }
    match fit_stability(&values, p, d) {
        Ok(f) => {
            write_fit(ctx, &f);
            let base = match &doc {
                Document::SenProfile(prof) => prof.base_index(),
                Document::GeneralTower(t) => t.degree(0),
                _ => unreachable!(),
            };
            let check = f.leading_check(e, &base);
            writeln!(ctx.out, "e*[K(0):K]\t{}\t{}", format_rational(&check.absolute), verdict(check.matches_absolute))
                .unwrap();
            writeln!(ctx.out, "[K(0):K]\t{}\t{}", format_rational(&check.relative), verdict(check.matches_relative))
                .unwrap();
            writeln!(ctx.out, "verdict\tstable").unwrap();
            Ok(EXIT_OK)
        }
        Err(Error::NotStable { residuals, offending }) => {
            for (i, r) in &residuals {
                writeln!(ctx.out, "residual\t{i}\t{}", format_rational(r)).unwrap();
            }
            writeln!(ctx.out, "verdict\tnot stable in range (first deviation at level {offending})").unwrap();
            Err(Error::NotStable { residuals, offending })
        }
        Err(e) => Err(e),
    }
}

fn verdict(matches: bool) -> &'static str {
    if matches {
        "= C"
    } else {
        "!= C"
    }
}

fn write_fit(ctx: &mut Context, fit: &StabilityFit) {
    writeln!(ctx.out, "C\t{}", format_rational(&fit.c)).unwrap();
    writeln!(ctx.out, "A\t{}", format_rational(&fit.a)).unwrap();
    writeln!(ctx.out, "B\t{}", format_rational(&fit.b)).unwrap();
    writeln!(ctx.out, "i_min\t{}", fit.i_min).unwrap();
}

fn report_checks(ctx: &mut Context, reports: &[crate::propgroup::CheckReport]) -> Step {
    for r in reports {
        writeln!(ctx.out, "{r}").unwrap();
    }
    Ok(if reports.iter().all(|r| r.passed()) { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn propgroup(ctx: &mut Context, cmd: PropgroupCommand) -> Step {
    match cmd {
        PropgroupCommand::Order { shape, i, m, enumerate } => {
            let order = kernel_order(shape.n, shape.p, i, m)?;
            writeln!(ctx.out, "kernel order\t{order}").unwrap();
            if enumerate {
                let e = enumerate_group(Precision::new(shape.n, shape.p, m)?, ctx.exec)?;
                let counted = e.kernel[i as usize];
                writeln!(ctx.out, "enumerated\t{counted}").unwrap();
                writeln!(ctx.out, "group order\t{}", e.group_order).unwrap();
                if counted != order {
                    return Ok(EXIT_CHECK_FAILED);
                }
            }
            Ok(EXIT_OK)
        }
        PropgroupCommand::Shift { shape, i, m, samples } => {
            let m = m.unwrap_or(i + 2);
            let r = shift_check(shape.n, shape.p, i, m, samples, ctx.seed, ctx.exec)?;
            report_checks(ctx, &[r])
        }
        PropgroupCommand::Abelian { shape, m, samples } => {
            let r = abelian_check(shape.n, shape.p, m, samples, ctx.seed, ctx.exec)?;
            let failing = abelian_negative_control(shape.n, shape.p, m, samples.min(100), ctx.seed)?;
            writeln!(ctx.out, "negative control: {failing} of {} random pairs fail", samples.min(100)).unwrap();
            report_checks(ctx, &[r])
        }
        PropgroupCommand::Powers { shape, j, m } => {
            let r = power_subgroup_check(shape.n, shape.p, j, m, ctx.exec)?;
            writeln!(ctx.out, "p^j-th powers of H\t{}", r.powers).unwrap();
            writeln!(ctx.out, "ker mod p^(j+1)\t{}\t{}", r.shifted_kernel, verdict_eq(r.matches_shifted)).unwrap();
            writeln!(ctx.out, "ker mod p^j\t{}\t{}", r.literal_kernel, verdict_eq(r.matches_literal)).unwrap();
            Ok(if r.matches_shifted { EXIT_OK } else { EXIT_CHECK_FAILED })
        }
        PropgroupCommand::Dim { n, p, m, sl, generators } => {
            let (prec, gens): (Precision, Vec<ModMatrix>) = match generators {
                Some(path) => match load(&path)? {
                    Document::GeneratorSet { precision, generators } => (precision, generators),
                    other => return Err(wrong_kind(&other, "generator_set")),
                },
                None => {
                    let p = p.ok_or_else(|| Error::InvalidParameters("--p is required".into()))?;
                    let m = m.ok_or_else(|| Error::InvalidParameters("--m is required".into()))?;
                    let prec = Precision::new(n, p, m)?;
                    let gens = if sl { sl2_generators(prec)? } else { gl2_generators(prec)? };
                    (prec, gens)
                }
            };
            let r = closed_subgroup_dimension(&gens, prec, ctx.budget, ctx.exec)?;
            writeln!(ctx.out, "order\t{}", r.order).unwrap();
            for (i, o) in r.level_orders.iter().enumerate().skip(1) {
                writeln!(ctx.out, "level {i}\t{o}").unwrap();
            }
            writeln!(ctx.out, "d = {}", r.dimension).unwrap();
            writeln!(ctx.out, "stabilization level\t{}", r.stabilization_level).unwrap();
            Ok(EXIT_OK)
        }
    }
}

fn verdict_eq(matches: bool) -> &'static str {
    if matches {
        "match"
    } else {
        "no match"
    }
}
