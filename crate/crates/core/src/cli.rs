//! `jetvar` subcommand dispatch.
//!
//! Results are JSON on standard output. Exit code 0 means success or pass,
//! 1 a mathematical negative (not variational, not null, check failed,
//! undecided), 2 an input error. Diagnostics and warnings go to standard
//! error as JSON objects, one per line.

use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use serde_json::{json, Value};

use crate::forms::{self, FormsError};
use crate::numeric::{self, QuadratureSpec, VariationProbe};
use crate::problem::{Payload, ProblemError, ProblemFile};
use crate::variational::{self as var, Lagrangian, SourceForm, Verdict};
use crate::Error;

pub const DEFAULT_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Euler-Lagrange expressions of a Lagrangian
    El,
    /// Generalized Helmholtz conditions for a source form
    Helmholtz,
    /// Tonti Lagrangian of a variational source form
    Tonti,
    /// Generalized Poincare-Cartan form of a Lagrangian
    Cartan,
    /// Decide whether a Lagrangian is null
    NullCheck,
    /// Null Lagrangian h(dη) of an (n-1)-form η
    NullFromEta,
    /// Naturality of the Poincare-Cartan and Euler-Lagrange maps under an isomorphism
    Naturality,
    /// Numeric first-variation or on-section residual check
    Numcheck,
}

#[derive(Debug, Parser)]
#[command(name = "jetvar", version, about = "Symbolic variational calculus on jet spaces")]
pub struct Args {
    pub command: Command,
    pub problem: PathBuf,
    /// Include zero residuals in reports
    #[arg(long)]
    pub verbose: bool,
    /// Let `tonti` reconstruct without checking the Helmholtz conditions first
    #[arg(long)]
    pub skip_variational_check: bool,
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Seed for numeric probing of transcendental residuals
    #[arg(long)]
    pub seed: Option<u64>,
}

impl Args {
    /// Parses `jetvar <command> <problem> [flags...]` without the program name.
    pub fn from_parts(command: &str, problem: &str, flags: &[String]) -> Result<Args, String> {
        let argv = ["jetvar", command, problem].into_iter().map(String::from).chain(flags.iter().cloned());
        Args::try_parse_from(argv).map_err(|e| e.to_string())
    }
}

/// Effective settings after merging file options with flags.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub verbose: bool,
    pub skip_variational_check: bool,
    pub tolerance: f64,
    pub seed: u64,
}

impl RunOptions {
    pub fn merge(args: &Args, file: &crate::problem::Options) -> Self {
        RunOptions {
            verbose: args.verbose || file.verbose.unwrap_or(false),
            skip_variational_check: args.skip_variational_check || file.skip_variational_check.unwrap_or(false),
            tolerance: args.tolerance.or(file.tolerance).unwrap_or(DEFAULT_TOLERANCE),
            seed: args.seed.or(file.seed).unwrap_or(var::DEFAULT_PROBE_SEED),
        }
    }
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            verbose: false,
            skip_variational_check: false,
            tolerance: DEFAULT_TOLERANCE,
            seed: var::DEFAULT_PROBE_SEED,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub exit_code: i32,
    pub output: Value,
}

impl Outcome {
    fn new(pass: bool, output: Value) -> Self {
        Outcome { exit_code: if pass { 0 } else { 1 }, output }
    }
}

fn missing(command: Command, what: &str) -> Error {
    Error::Problem(ProblemError::Invalid(format!("`{command:?}` needs {what}").to_lowercase()))
}

fn lagrangian(problem: &ProblemFile, command: Command) -> Result<&Lagrangian, Error> {
    match &problem.payload {
        Payload::Lagrangian(l) => Ok(l),
        _ => Err(missing(command, "a `lagrangian` payload")),
    }
}

fn source(problem: &ProblemFile, command: Command) -> Result<&SourceForm, Error> {
    match &problem.payload {
        Payload::Source(s) => Ok(s),
        _ => Err(missing(command, "a `source` payload")),
    }
}

fn render_all(problem: &ProblemFile, exprs: &[crate::Expr]) -> Vec<String> {
    exprs.iter().map(|e| problem.ctx.render(e)).collect()
}

fn helmholtz_json(problem: &ProblemFile, src: &SourceForm, opts: &RunOptions) -> Result<(Verdict, Value), Error> {
    let ctx = &problem.ctx;
    let report = match &problem.multiplier {
        Some(a) => var::multiplier_check(src, a)?,
        None => var::helmholtz_residuals_seeded(src, opts.seed)?,
    };
    let mut out = report.to_json(ctx, opts.verbose);
    if ctx.n() == 1 && src.order() <= 2 && problem.multiplier.is_none() {
        let classical = var::classical_helmholtz_ode_seeded(src, opts.seed)?;
        out["classical"] = classical.to_json(ctx, opts.verbose);
        out["agreement"] = json!(classical.verdict == report.verdict);
    }
    Ok((report.verdict, out))
}

/// Executes one subcommand on a loaded problem.
pub fn execute(command: Command, problem: &ProblemFile, opts: &RunOptions) -> Result<Outcome, Error> {
    let ctx = &problem.ctx;
    match command {
        Command::El => {
            let el = var::euler_lagrange(lagrangian(problem, command)?)?;
            Ok(Outcome::new(true, json!({ "order": el.order(), "components": render_all(problem, el.components()) })))
        }
        Command::Helmholtz => {
            let (verdict, out) = helmholtz_json(problem, source(problem, command)?, opts)?;
            Ok(Outcome::new(verdict == Verdict::Variational, out))
        }
        Command::Tonti => {
            let src = source(problem, command)?;
            if !opts.skip_variational_check {
                let (verdict, gate) = helmholtz_json(problem, src, opts)?;
                if verdict != Verdict::Variational {
                    return Ok(Outcome::new(false, json!({ "lagrangian": null, "verified": false, "gate": gate })));
                }
            }
            let l = var::tonti_lagrangian(src)?;
            let back = var::euler_lagrange(&l)?;
            let verified = back.components() == src.components();
            Ok(Outcome::new(
                verified,
                json!({ "lagrangian": ctx.render(l.density()), "order": l.order(), "verified": verified }),
            ))
        }
        Command::Cartan => {
            let l = lagrangian(problem, command)?;
            match forms::cartan_form_contact(l.density(), l.order(), ctx) {
                Ok(contact) => Ok(Outcome::new(
                    true,
                    json!({
                        "order": contact.order(),
                        "raw": contact.to_raw(ctx).render(ctx),
                        "contact": contact.render(ctx),
                    }),
                )),
                Err(FormsError::OrderZero) => {
                    let rendered = l.to_form().render(ctx);
                    Ok(Outcome::new(
                        true,
                        json!({
                            "order": 0,
                            "raw": rendered,
                            "contact": rendered,
                            "notice": "order-zero Lagrangian: the Poincare-Cartan form is the Lagrangian itself",
                        }),
                    ))
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::NullCheck => {
            let el = var::euler_lagrange(lagrangian(problem, command)?)?;
            let is_null = el.is_zero();
            Ok(Outcome::new(is_null, json!({ "null": is_null, "components": render_all(problem, el.components()) })))
        }
        Command::NullFromEta => {
            let Payload::Eta(eta) = &problem.payload else {
                return Err(missing(command, "an `eta` payload"));
            };
            let l = var::null_lagrangian_from_eta(eta, ctx)?;
            let is_null = var::is_null_lagrangian(&l)?;
            Ok(Outcome::new(
                is_null,
                json!({ "lagrangian": ctx.render(l.density()), "order": l.order(), "null": is_null }),
            ))
        }
        Command::Naturality => {
            let l = lagrangian(problem, command)?;
            let iso = problem.iso.as_ref().ok_or_else(|| missing(command, "an `[iso]` table"))?;
            let report = var::check_naturality(l, iso)?;
            let word = |b: bool| if b { "pass" } else { "fail" };
            Ok(Outcome::new(
                report.cartan && report.euler_lagrange,
                json!({ "theorem3": word(report.cartan), "theorem4": word(report.euler_lagrange) }),
            ))
        }
        Command::Numcheck => numcheck(problem, opts),
    }
}

fn numcheck(problem: &ProblemFile, opts: &RunOptions) -> Result<Outcome, Error> {
    let nodes = problem.options.nodes.unwrap_or(32);
    let step = problem.options.step.unwrap_or(1e-4);
    let q = QuadratureSpec::new(nodes, step)?;
    match (&problem.payload, &problem.probe, &problem.section) {
        (Payload::Lagrangian(l), Some((section, direction)), _) => {
            let probe = VariationProbe::new(section.clone(), direction.clone(), l.order())?;
            let fv = numeric::first_variation_check(l, &probe, &q, opts.tolerance)?;
            let scale = fv.lhs.abs().max(fv.rhs.abs()).max(1.0);
            let pass = fv.abs_diff <= opts.tolerance * scale;
            Ok(Outcome::new(
                pass,
                json!({
                    "lhs": fv.lhs,
                    "rhs": fv.rhs,
                    "abs_diff": fv.abs_diff,
                    "tolerance": opts.tolerance,
                    "pass": pass,
                    "richardson": fv.richardson,
                }),
            ))
        }
        (Payload::Source(src), _, Some(section)) => {
            let values = numeric::residual_on_section(src, section, &problem.points)?;
            Ok(Outcome::new(true, json!({ "points": problem.points, "values": values })))
        }
        _ => Err(missing(
            Command::Numcheck,
            "a `lagrangian` with a `[probe]` table, or a `source` with `section` and `points`",
        )),
    }
}

/// JSON diagnostic for an error.
pub fn diagnostic(err: &Error) -> Value {
    let mut out = json!({ "error": error_kind(err), "message": err.to_string() });
    let parse = match err {
        Error::Parse(p) => Some(p),
        Error::Problem(ProblemError::Parse { error, .. }) => Some(error),
        _ => None,
    };
    if let Some(p) = parse {
        out["span"] = json!([p.span.start, p.span.end]);
    }
    if let Error::Problem(ProblemError::Parse { field, .. }) = err {
        out["field"] = json!(field);
    }
    out
}

fn error_kind(err: &Error) -> &'static str {
    match err {
        Error::Parse(p) | Error::Problem(ProblemError::Parse { error: p, .. }) => p.kind_name(),
        Error::Problem(ProblemError::Format(_)) => "FormatError",
        Error::Problem(_) => "InvalidProblem",
        Error::Expr(_) => "ExprError",
        Error::Jet(_) => "JetError",
        Error::Forms(_) => "FormsError",
        Error::Variational(_) => "VariationalError",
        Error::Numeric(_) => "NumericError",
    }
}

/// Full command-line run: returns exit code, stdout and stderr text.
pub fn run(args: &Args, ceiling: Option<usize>) -> (i32, String, String) {
    let text = match std::fs::read_to_string(&args.problem) {
        Ok(t) => t,
        Err(e) => {
            let d = json!({ "error": "IoError", "message": format!("{}: {e}", args.problem.display()) });
            return (2, String::new(), format!("{d}\n"));
        }
    };
    run_text(args, &text, ceiling)
}

pub fn run_text(args: &Args, text: &str, ceiling: Option<usize>) -> (i32, String, String) {
    let problem = match ProblemFile::parse(text, ceiling) {
        Ok(p) => p,
        Err(e) => return (2, String::new(), format!("{}\n", diagnostic(&e.into()))),
    };
    let mut stderr = String::new();
    for w in &problem.warnings {
        stderr.push_str(&format!("{}\n", json!({ "warning": w })));
    }
    let opts = RunOptions::merge(args, &problem.options);
    match execute(args.command, &problem, &opts) {
        Ok(outcome) => {
            let body = serde_json::to_string_pretty(&outcome.output).expect("JSON values serialize");
            (outcome.exit_code, format!("{body}\n"), stderr)
        }
        Err(e) => {
            stderr.push_str(&format!("{}\n", diagnostic(&e)));
            (2, String::new(), stderr)
        }
    }
}

/// Reads `JETVAR_ORDER_CEILING`, if set to a valid integer.
pub fn ceiling_from_env() -> Option<usize> {
    std::env::var("JETVAR_ORDER_CEILING").ok()?.trim().parse().ok()
}
