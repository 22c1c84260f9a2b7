//! Command-line front end: evaluate divergences and related quantities,
//! emit value tables as CSV, run property-verification suites and evaluate
//! dispersion-model densities and entropies.
//!
//! Exit codes: 0 success, 1 failed property, 2 domain or usage error,
//! 3 quadrature non-convergence, 4 suite or route inapplicable.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // negated comparisons reject NaN

mod fmt;
mod suites;

use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use divkit::divergence::{
    alpha_divergence_with, beta_divergence_with, dual_cumulant_phi_with, EvalOptions, Method,
};
use divkit::error::Error;
use divkit::quadrature::integrate;
use divkit::stats::{entropy_via_divergence, MonteCarloSpec, Route};
use divkit::{DispersionModel64, PropertyReport64, VarianceFunction64};

use fmt::sig9;
use suites::Suite;

const DEFAULT_SEED: u64 = 0xBE7A;

#[derive(Parser)]
#[command(
    name = "divkit",
    version,
    about = "Divergences of dispersion models, driven by variance functions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one quantity at a point; prints value, method and error estimate.
    Eval(EvalArgs),
    /// Evaluate a quantity over an (x, mu) grid; writes CSV `x,mu,value,method,err`.
    Table(TableArgs),
    /// Run a property-verification suite; exit 0 iff every case passes.
    Verify(VerifyArgs),
    /// Evaluate a dispersion-model density through its beta-divergence form.
    Density(DensityArgs),
    /// Compute entropy through the expected-divergence route.
    Entropy(EntropyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    /// Beta divergence d_beta(x, mu)
    Beta,
    /// Alpha divergence d_alpha(x, mu)
    Alpha,
    /// Unit deviance, twice the beta divergence
    Deviance,
    /// Unit quasi-log-likelihood L(x | mu) from a base point
    Qll,
    /// Dual cumulant phi(mu) from a base point
    Phi,
    /// Canonical parameter theta(mu) from a base point
    Theta,
    /// Cumulant psi(theta(mu)) from a base point
    Psi,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct EvalArgs {
    /// Family token: tweedie:p=<real>, bernoulli, negbin, sech,
    /// expvf:gamma=<real> or custom:<expr>
    #[arg(long)]
    vf: String,
    #[arg(long, value_enum)]
    kind: Kind,
    /// Observation; required for beta, alpha, deviance and qll.
    #[arg(long)]
    x: Option<f64>,
    #[arg(long)]
    mu: f64,
    /// Base point for qll, phi, theta and psi; defaults to the family base.
    #[arg(long)]
    base: Option<f64>,
    /// Skip closed forms and integrate numerically.
    #[arg(long)]
    quadrature: bool,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct TableArgs {
    #[arg(long)]
    vf: String,
    #[arg(long, value_enum)]
    kind: Kind,
    #[arg(long)]
    x_min: f64,
    #[arg(long)]
    x_max: f64,
    #[arg(long)]
    x_steps: usize,
    #[arg(long)]
    mu_min: f64,
    #[arg(long)]
    mu_max: f64,
    #[arg(long)]
    mu_steps: usize,
    #[arg(long)]
    base: Option<f64>,
    #[arg(long)]
    quadrature: bool,
    /// Write to a file instead of stdout.
    #[arg(long)]
    output: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Table,
    Json,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    suite: Suite,
    #[arg(long)]
    vf: String,
    /// Seed for the sample points; DIVKIT_SEED overrides the default.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value = "table")]
    format: ReportFormat,
    #[arg(long)]
    output: Option<String>,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct DensityArgs {
    /// Model token: gaussian:sigma2=<real>, poisson or gamma:a=<real>[,b=<real>]
    #[arg(long)]
    model: String,
    /// Mean; defaults to a/b for gamma models specified with both parameters.
    #[arg(long)]
    mu: Option<f64>,
    /// Single evaluation point ...
    #[arg(long)]
    x: Option<f64>,
    /// ... or a range.
    #[arg(long)]
    x_min: Option<f64>,
    #[arg(long)]
    x_max: Option<f64>,
    #[arg(long)]
    x_steps: Option<usize>,
    #[arg(long)]
    output: Option<String>,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct EntropyArgs {
    #[arg(long)]
    model: String,
    #[arg(long)]
    mu: Option<f64>,
    /// Estimate by Monte Carlo instead of the closed expectations.
    #[arg(long)]
    mc: bool,
    #[arg(long, default_value_t = 1_000_000)]
    samples: usize,
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Eval(args) => cmd_eval(&args),
        Command::Table(args) => cmd_table(&args),
        Command::Verify(args) => cmd_verify(&args),
        Command::Density(args) => cmd_density(&args),
        Command::Entropy(args) => cmd_entropy(&args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(error_code(&e))
        }
    }
}

fn error_code(e: &Error) -> u8 {
    match e {
        Error::Domain(_)
        | Error::NonPositive { .. }
        | Error::Parse { .. }
        | Error::Infinite(_)
        | Error::NonFiniteEvaluation { .. } => 2,
        Error::NonConvergence { .. } | Error::Diagnostics(_) => 3,
        Error::NotDecomposable(_) | Error::Unsupported(_) => 4,
    }
}

fn seed_from(args_seed: Option<u64>) -> u64 {
    args_seed
        .or_else(|| {
            std::env::var("DIVKIT_SEED")
                .ok()
                .and_then(|s| s.parse().ok())
        })
        .unwrap_or(DEFAULT_SEED)
}

fn parse_vf(token: &str) -> Result<VarianceFunction64, Error> {
    let vf = VarianceFunction64::parse_token(token)?;
    if let Some(warning) = vf.edm_warning() {
        eprintln!("warning: {warning}");
    }
    Ok(vf)
}

struct Evaluated {
    value: f64,
    method: Method,
    error: f64,
}

fn method_token(method: Method) -> &'static str {
    match method {
        Method::ClosedForm => "closed_form",
        Method::Quadrature => "quadrature",
    }
}

/// One (kind, x, mu, base) evaluation with provenance and error estimate.
fn evaluate(
    vf: &VarianceFunction64,
    kind: Kind,
    x: Option<f64>,
    mu: f64,
    base: Option<f64>,
    force_quadrature: bool,
) -> Result<Evaluated, Error> {
    let opts = EvalOptions {
        force_quadrature,
        ..EvalOptions::default()
    };
    let base = base.unwrap_or_else(|| vf.default_base());
    let need_x = || x.ok_or_else(|| Error::Domain("--x is required for this kind".to_string()));
    match kind {
        Kind::Beta => {
            let r = beta_divergence_with(vf, need_x()?, mu, &opts)?;
            Ok(Evaluated {
                value: r.value,
                method: r.method,
                error: r.error_estimate,
            })
        }
        Kind::Alpha => {
            let r = alpha_divergence_with(vf, need_x()?, mu, &opts)?;
            Ok(Evaluated {
                value: r.value,
                method: r.method,
                error: r.error_estimate,
            })
        }
        Kind::Deviance => {
            let r = beta_divergence_with(vf, need_x()?, mu, &opts)?;
            Ok(Evaluated {
                value: 2.0 * r.value,
                method: r.method,
                error: 2.0 * r.error_estimate,
            })
        }
        Kind::Qll => {
            let x = need_x()?;
            vf.require_interior("x", x)?;
            vf.require_interior("mu", mu)?;
            vf.require_interior("base", base)?;
            let r = integrate(&opts.quad, base, mu, |t| Ok((x - t) / vf.eval(t)?))?
                .require_converged()?;
            Ok(Evaluated {
                value: r.value,
                method: Method::Quadrature,
                error: r.error_estimate,
            })
        }
        Kind::Phi => {
            let value = dual_cumulant_phi_with(vf, mu, base, &opts)?;
            let is_tweedie = matches!(vf.family(), divkit::varfun::Family::TweediePower(_));
            if is_tweedie && !force_quadrature {
                Ok(Evaluated {
                    value,
                    method: Method::ClosedForm,
                    error: 0.0,
                })
            } else {
                let r = integrate(&opts.quad, base, mu, |t| Ok((mu - t) / vf.eval(t)?))?
                    .require_converged()?;
                Ok(Evaluated {
                    value,
                    method: Method::Quadrature,
                    error: r.error_estimate,
                })
            }
        }
        Kind::Theta => {
            vf.require_interior("mu", mu)?;
            vf.require_interior("base", base)?;
            let r =
                integrate(&opts.quad, base, mu, |t| Ok(1.0 / vf.eval(t)?))?.require_converged()?;
            Ok(Evaluated {
                value: r.value,
                method: Method::Quadrature,
                error: r.error_estimate,
            })
        }
        Kind::Psi => {
            vf.require_interior("mu", mu)?;
            vf.require_interior("base", base)?;
            let r =
                integrate(&opts.quad, base, mu, |t| Ok(t / vf.eval(t)?))?.require_converged()?;
            Ok(Evaluated {
                value: r.value,
                method: Method::Quadrature,
                error: r.error_estimate,
            })
        }
    }
}

fn cmd_eval(args: &EvalArgs) -> Result<u8, Error> {
    let vf = parse_vf(&args.vf)?;
    let r = evaluate(&vf, args.kind, args.x, args.mu, args.base, args.quadrature)?;
    println!(
        "{} {} {}",
        sig9(r.value),
        method_token(r.method),
        sig9(r.error)
    );
    Ok(0)
}

fn grid(min: f64, max: f64, steps: usize) -> Result<Vec<f64>, Error> {
    if steps == 0 {
        return Err(Error::Domain("step count must be at least 1".into()));
    }
    if steps == 1 {
        return Ok(vec![min]);
    }
    if !(min <= max) {
        return Err(Error::Domain(format!("range [{min}, {max}] is empty")));
    }
    Ok((0..steps)
        .map(|i| min + (max - min) * (i as f64) / (steps - 1) as f64)
        .collect())
}

fn write_out(output: &Option<String>, contents: &str) -> Result<(), Error> {
    match output {
        Some(path) => fs::write(path, contents)
            .map_err(|e| Error::Domain(format!("cannot write {path}: {e}"))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(contents.as_bytes())
                .map_err(|e| Error::Domain(format!("cannot write stdout: {e}")))
        }
    }
}

fn cmd_table(args: &TableArgs) -> Result<u8, Error> {
    let vf = parse_vf(&args.vf)?;
    let xs = grid(args.x_min, args.x_max, args.x_steps)?;
    let mus = grid(args.mu_min, args.mu_max, args.mu_steps)?;
    let mut csv = String::from("x,mu,value,method,err\n");
    for &x in &xs {
        for &mu in &mus {
            match evaluate(&vf, args.kind, Some(x), mu, args.base, args.quadrature) {
                Ok(r) => {
                    csv.push_str(&format!(
                        "{},{},{},{},{}\n",
                        sig9(x),
                        sig9(mu),
                        sig9(r.value),
                        method_token(r.method),
                        sig9(r.error)
                    ));
                }
                Err(e) => {
                    let class = match e {
                        Error::NonConvergence { .. } => "convergence",
                        Error::Infinite(_) => "infinite",
                        _ => "domain",
                    };
                    csv.push_str(&format!("{},{},nan,none,{class}\n", sig9(x), sig9(mu)));
                }
            }
        }
    }
    write_out(&args.output, &csv)?;
    Ok(0)
}

#[derive(Serialize)]
struct JsonCase {
    name: String,
    lhs: f64,
    rhs: f64,
    abs_err: f64,
    rel_err: f64,
    pass: bool,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    suite: &'a str,
    cases: Vec<JsonCase>,
}

fn cmd_verify(args: &VerifyArgs) -> Result<u8, Error> {
    let vf = parse_vf(&args.vf)?;
    let seed = seed_from(args.seed);
    let cases: Vec<PropertyReport64> = suites::run_suite(args.suite, &vf, seed)?;
    let all_pass = cases.iter().all(|c| c.pass);

    let rendered = match args.format {
        ReportFormat::Json => {
            let report = JsonReport {
                suite: suite_name(args.suite),
                cases: cases
                    .iter()
                    .map(|c| JsonCase {
                        name: c.name.clone(),
                        lhs: c.lhs,
                        rhs: c.rhs,
                        abs_err: c.abs_err,
                        rel_err: c.rel_err,
                        pass: c.pass,
                    })
                    .collect(),
            };
            let mut s = serde_json::to_string_pretty(&report)
                .map_err(|e| Error::Domain(format!("json: {e}")))?;
            s.push('\n');
            s
        }
        ReportFormat::Table => {
            let mut s = String::new();
            for c in &cases {
                s.push_str(&format!(
                    "{:<42} lhs={} rhs={} abs={} rel={} {}\n",
                    c.name,
                    sig9(c.lhs),
                    sig9(c.rhs),
                    sig9(c.abs_err),
                    sig9(c.rel_err),
                    if c.pass { "pass" } else { "FAIL" }
                ));
            }
            s.push_str(&format!(
                "suite {}: {}/{} cases passed\n",
                suite_name(args.suite),
                cases.iter().filter(|c| c.pass).count(),
                cases.len()
            ));
            s
        }
    };
    write_out(&args.output, &rendered)?;
    Ok(if all_pass { 0 } else { 1 })
}

fn suite_name(suite: Suite) -> &'static str {
    match suite {
        Suite::Bregman => "bregman",
        Suite::Scaling => "scaling",
        Suite::Translation => "translation",
        Suite::Alphabeta => "alphabeta",
        Suite::Deviance => "deviance",
        Suite::Mu0 => "mu0",
        Suite::Symmetry => "symmetry",
    }
}

/// Parses a model token into the model plus the mean implied by its
/// parameters, when there is one (gamma with both a and b).
fn parse_model(token: &str) -> Result<(DispersionModel64, Option<f64>), Error> {
    let (head, rest) = match token.find(':') {
        Some(i) => (&token[..i], Some(&token[i + 1..])),
        None => (token, None),
    };
    let parse_kv = |body: &str| -> Result<Vec<(String, f64)>, Error> {
        body.split(',')
            .map(|pair| {
                let (k, v) = pair.split_once('=').ok_or_else(|| Error::Parse {
                    offset: 0,
                    message: format!("expected key=value, found `{pair}`"),
                })?;
                let value: f64 = v.parse().map_err(|_| Error::Parse {
                    offset: 0,
                    message: format!("invalid number `{v}`"),
                })?;
                Ok((k.to_string(), value))
            })
            .collect()
    };
    match head {
        "gaussian" => {
            let kv = parse_kv(rest.ok_or_else(|| Error::Parse {
                offset: token.len(),
                message: "`gaussian` needs `:sigma2=<real>`".into(),
            })?)?;
            let sigma2 = kv
                .iter()
                .find(|(k, _)| k == "sigma2")
                .map(|(_, v)| *v)
                .ok_or_else(|| Error::Parse {
                    offset: 0,
                    message: "missing sigma2".into(),
                })?;
            Ok((DispersionModel64::gaussian(sigma2)?, None))
        }
        "poisson" => Ok((DispersionModel64::poisson(), None)),
        "gamma" => {
            let kv = parse_kv(rest.ok_or_else(|| Error::Parse {
                offset: token.len(),
                message: "`gamma` needs `:a=<real>[,b=<real>]`".into(),
            })?)?;
            let a = kv
                .iter()
                .find(|(k, _)| k == "a")
                .map(|(_, v)| *v)
                .ok_or_else(|| Error::Parse {
                    offset: 0,
                    message: "missing a".into(),
                })?;
            let b = kv.iter().find(|(k, _)| k == "b").map(|(_, v)| *v);
            if let Some(b) = b {
                if !(b > 0.0) {
                    return Err(Error::Domain(format!(
                        "gamma rate b = {b} must be positive"
                    )));
                }
            }
            Ok((DispersionModel64::gamma(a)?, b.map(|b| a / b)))
        }
        other => Err(Error::Parse {
            offset: 0,
            message: format!("unknown model `{other}` (expected gaussian, poisson or gamma)"),
        }),
    }
}

fn cmd_density(args: &DensityArgs) -> Result<u8, Error> {
    let (model, implied_mu) = parse_model(&args.model)?;
    let mu = args.mu.or(implied_mu).ok_or_else(|| {
        Error::Domain("--mu is required (or give gamma:a=..,b=.. to imply it)".into())
    })?;
    match (args.x, args.x_min, args.x_max, args.x_steps) {
        (Some(x), None, None, None) => {
            println!("{}", sig9(model.density(x, mu)?));
            Ok(0)
        }
        (None, Some(lo), Some(hi), Some(steps)) => {
            let mut csv = String::from("x,mu,value,method,err\n");
            for x in grid(lo, hi, steps)? {
                match model.density(x, mu) {
                    Ok(v) => csv.push_str(&format!(
                        "{},{},{},closed_form,0\n",
                        sig9(x),
                        sig9(mu),
                        sig9(v)
                    )),
                    Err(_) => csv.push_str(&format!("{},{},nan,none,domain\n", sig9(x), sig9(mu))),
                }
            }
            write_out(&args.output, &csv)?;
            Ok(0)
        }
        _ => Err(Error::Domain(
            "give either --x or all of --x-min/--x-max/--x-steps".into(),
        )),
    }
}

fn cmd_entropy(args: &EntropyArgs) -> Result<u8, Error> {
    let (model, implied_mu) = parse_model(&args.model)?;
    let mu = args
        .mu
        .or(implied_mu)
        .unwrap_or_else(|| match model.kind() {
            divkit::density::ModelKind::Gaussian => 0.0,
            _ => 1.0,
        });
    let estimate = if args.mc {
        let spec = MonteCarloSpec::new(args.samples, seed_from(args.seed));
        entropy_via_divergence(&model, mu, Route::MonteCarlo(&spec))?
    } else {
        entropy_via_divergence(&model, mu, Route::Closed)?
    };
    if estimate.std_error > 0.0 {
        println!("{} se={}", sig9(estimate.value), sig9(estimate.std_error));
    } else {
        println!("{}", sig9(estimate.value));
    }
    Ok(0)
}
