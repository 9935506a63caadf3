//! gaplab: proximity-gap and correlated-agreement experiments on random
//! linear codes, exact parameter planning, and the deterministic
//! verification suites.
//!
//! Exit codes: 0 on success, 1 when a suite, audit, or certificate
//! fails, 2 when the configuration or budget is rejected.

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use gaplab_core::harness::{self, config::ObjectKind, records, ExperimentConfig, Mode};
use gaplab_core::planner;
use gaplab_core::{adversarial, witness};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

/// Environment variable that overrides the config file path.
const CONFIG_ENV: &str = "GAPLAB_CONFIG";

const EXIT_FAILURE: u8 = 1;
const EXIT_REJECTED: u8 = 2;

#[derive(Parser)]
#[command(
    name = "gaplab",
    version,
    about = "Exact experiments on proximity gaps and correlated agreement of random linear codes"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate an explicit parameter recipe
    Plan(PlanArgs),
    /// Run the exponent-sign and entropy audits; nonzero exit on any violation
    Audit {
        /// working precision in decimal digits
        #[arg(long, default_value_t = 50)]
        digits: usize,
        #[arg(long, value_enum, default_value_t = TextFormat::Text)]
        format: TextFormat,
    },
    /// Line proximity-gap experiment
    GapLine(ExperimentArgs),
    /// Affine-space proximity-gap experiment
    GapSpace(ExperimentArgs),
    /// Affine-space correlated-agreement experiment
    CaSpace(ExperimentArgs),
    /// Polynomial-curve correlated-agreement experiment
    CaCurve(ExperimentArgs),
    /// Build and certify an explicit zero-slack gap violation
    NoSlack(NoSlackArgs),
    /// Synthesize a witness matrix and reduce it to its base rank
    ReduceDemo(ReduceArgs),
    /// Run the deterministic verification suites
    Selftest {
        #[arg(long, value_enum, default_value_t = LevelArg::Quick)]
        level: LevelArg,
        #[arg(long, value_enum, default_value_t = TextFormat::Text)]
        format: TextFormat,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum TextFormat {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Quick,
    Full,
}

#[derive(Clone, Copy, ValueEnum)]
enum PlanKindArg {
    /// line gap, slack radius E+ = E + ceil(eps n)
    Line2,
    /// line gap at E+ = E
    Line1,
    /// m-space correlated agreement with slack
    Space2,
    /// dimension-1 correlated agreement at E+ = E
    Space1,
    /// curve correlated agreement with slack
    Curve2,
    /// curve correlated agreement at E+ = E
    Curve1,
}

#[derive(Args)]
struct PlanArgs {
    #[arg(long, value_enum)]
    kind: PlanKindArg,
    /// code rate R, as a decimal ("0.5") or fraction ("1/2")
    #[arg(long)]
    rate: String,
    /// radius slack eps
    #[arg(long)]
    eps: String,
    /// relative radius rho
    #[arg(long)]
    rho: String,
    #[arg(short = 'n', long)]
    n: u64,
    /// space dimension (space2)
    #[arg(long, default_value_t = 1)]
    m: u64,
    /// curve degree (curve1/curve2)
    #[arg(long, default_value_t = 1)]
    degree: u64,
    #[arg(long, default_value_t = 50)]
    digits: usize,
    #[arg(long, value_enum, default_value_t = TextFormat::Text)]
    format: TextFormat,
}

#[derive(Args, Default)]
struct ExperimentArgs {
    /// flat key=value config file; flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    q: Option<u64>,
    #[arg(short = 'n', long)]
    n: Option<usize>,
    #[arg(short = 'r', long)]
    r: Option<usize>,
    #[arg(long)]
    e: Option<usize>,
    #[arg(long)]
    eplus: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    degree: Option<usize>,
    #[arg(long)]
    trials: Option<u64>,
    /// "full" or "sampled:COUNT"
    #[arg(long)]
    enumeration: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    jobs: Option<usize>,
    /// abstract operation budget
    #[arg(long)]
    budget: Option<u64>,
    /// emit every record, not only candidate violations
    #[arg(long)]
    record_all: bool,
    /// planner count threshold K for verdicts
    #[arg(long)]
    planner_k: Option<u64>,
    /// fold the explicit zero-slack line into line-gap trials
    #[arg(long)]
    attach_no_slack: bool,
}

#[derive(Args)]
struct NoSlackArgs {
    #[arg(long, default_value_t = 8)]
    q: u64,
    #[arg(short = 'n', long, default_value_t = 14)]
    n: usize,
    #[arg(short = 'r', long, default_value_t = 10)]
    r: usize,
    #[arg(long, default_value_t = 1)]
    e: usize,
    /// number of exact-weight evaluation points (defaults to min(E+1, q−1))
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 200)]
    tries: u64,
    #[arg(long, default_value_t = 200_000_000)]
    budget: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReduceArgs {
    #[arg(long, default_value_t = 8)]
    q: u64,
    #[arg(short = 'n', long, default_value_t = 12)]
    n: usize,
    #[arg(short = 'r', long, default_value_t = 3)]
    r: usize,
    #[arg(long, default_value_t = 3)]
    e: usize,
    /// line, space, or curve
    #[arg(long, default_value = "line")]
    object: String,
    #[arg(long, default_value_t = 2)]
    m: usize,
    #[arg(long, default_value_t = 2)]
    degree: usize,
    #[arg(long, default_value_t = 4)]
    target_rank: usize,
    #[arg(long, default_value_t = 7)]
    points: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 200_000_000)]
    budget: u64,
    #[arg(long, value_enum, default_value_t = TextFormat::Text)]
    format: TextFormat,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            // configuration and budget problems exit 2, everything else 1
            let text = format!("{err:#}");
            if text.contains("budget") || text.contains("config") || text.contains("admissib") {
                ExitCode::from(EXIT_REJECTED)
            } else {
                ExitCode::from(EXIT_FAILURE)
            }
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    match cli.cmd {
        Cmd::Plan(args) => run_plan(args),
        Cmd::Audit { digits, format } => run_audit(digits, format),
        Cmd::GapLine(args) => run_experiment(Mode::LineGap, args),
        Cmd::GapSpace(args) => run_experiment(Mode::SpaceGap, args),
        Cmd::CaSpace(args) => run_experiment(Mode::SpaceCa, args),
        Cmd::CaCurve(args) => run_experiment(Mode::CurveCa, args),
        Cmd::NoSlack(args) => run_no_slack(args),
        Cmd::ReduceDemo(args) => run_reduce_demo(args),
        Cmd::Selftest { level, format } => run_selftest(level, format),
    }
}

/// "0.5" or "1/2" to an exact rational.
fn parse_rat(text: &str) -> Result<(u64, u64)> {
    if let Some((num, den)) = text.split_once('/') {
        let n: u64 = num.trim().parse().context("fraction numerator")?;
        let d: u64 = den.trim().parse().context("fraction denominator")?;
        if d == 0 {
            return Err(anyhow!("zero denominator in '{text}'"));
        }
        return Ok((n, d));
    }
    if let Some((whole, frac)) = text.split_once('.') {
        let digits = frac.len() as u32;
        if digits > 18 {
            return Err(anyhow!("too many decimal places in '{text}'"));
        }
        let scale = 10u64.pow(digits);
        let w: u64 = if whole.is_empty() {
            0
        } else {
            whole.parse().context("integer part")?
        };
        let f: u64 = if frac.is_empty() {
            0
        } else {
            frac.parse().context("fractional part")?
        };
        return Ok((w * scale + f, scale));
    }
    let w: u64 = text.parse().context("integer value")?;
    Ok((w, 1))
}

fn run_plan(args: PlanArgs) -> Result<ExitCode> {
    let kind = match args.kind {
        PlanKindArg::Line2 => planner::PlanKind::LineGapTwoRadius,
        PlanKindArg::Line1 => planner::PlanKind::LineGapOneRadius,
        PlanKindArg::Space2 => planner::PlanKind::SpaceCaTwoRadius { m: args.m },
        PlanKindArg::Space1 => planner::PlanKind::SpaceCaOneRadius,
        PlanKindArg::Curve2 => planner::PlanKind::CurveCaTwoRadius {
            degree: args.degree,
        },
        PlanKindArg::Curve1 => planner::PlanKind::CurveCaOneRadius {
            degree: args.degree,
        },
    };
    let req = planner::PlanRequest {
        kind,
        rate: parse_rat(&args.rate)?,
        eps: parse_rat(&args.eps)?,
        rho: parse_rat(&args.rho)?,
        n: args.n,
        digits: args.digits,
    };
    let plan = planner::plan(&req).map_err(|e| anyhow!("config rejected: {e}"))?;
    match args.format {
        TextFormat::Json => println!("{}", serde_json::to_string_pretty(&plan)?),
        TextFormat::Text => print_plan_text(&plan),
    }
    Ok(ExitCode::SUCCESS)
}

fn print_plan_text(plan: &planner::Plan) {
    println!("plan            {:?}", plan.kind);
    println!(
        "inputs          R={}/{} eps={}/{} rho={}/{} n={}",
        plan.rate.0, plan.rate.1, plan.eps.0, plan.eps.1, plan.rho.0, plan.rho.1, plan.n
    );
    println!("a_eps           {:.12}", plan.a_eps.approx);
    println!("b_eps           {:.12}", plan.b_eps.approx);
    println!("delta           {:.12}", plan.delta.approx);
    println!("iterations      {}", plan.iterations);
    let tname = match plan.threshold_kind {
        planner::ThresholdKind::CountK => "K",
        planner::ThresholdKind::CeilTau => "tau",
    };
    println!("{tname:<15} {}", plan.threshold);
    println!("E               {}", plan.e);
    println!("E+              {}", plan.eplus);
    println!("d_n             {}", plan.d_n);
    println!("q_min           {}", plan.q_min);
    println!("q_min (coarse)  {}", plan.q_min_simplified);
    println!(
        "exponent        {} = {:.6} ({}; {})",
        plan.exponent_audit.expression,
        plan.exponent_audit.value,
        plan.exponent_audit.required,
        if plan.exponent_audit.ok { "ok" } else { "VIOLATED" }
    );
    for r in &plan.roundings {
        let tag = if r.exact { "exact" } else { "float" };
        let flag = if r.flagged { " [boundary]" } else { "" };
        println!(
            "rounding        {:<18} {} (margin {:.3e}, {tag}){flag}",
            r.name, r.result, r.margin
        );
    }
}

fn run_audit(digits: usize, format: TextFormat) -> Result<ExitCode> {
    let exponents = planner::audit_exponents(digits);
    let entropy = planner::audit_entropy(digits);
    let pass = exponents.pass && entropy.pass;
    match format {
        TextFormat::Json => {
            let v = serde_json::json!({
                "exponents": exponents,
                "entropy": entropy,
                "pass": pass,
            });
            println!("{}", serde_json::to_string_pretty(&v)?);
        }
        TextFormat::Text => {
            println!(
                "exponent audit: {} entries, {}",
                exponents.entries.len(),
                if exponents.pass { "all negative as required" } else { "VIOLATIONS" }
            );
            for e in exponents.entries.iter().filter(|e| !e.ok).take(10) {
                println!("  VIOLATION {} {} = {}", e.name, e.params, e.value);
            }
            println!(
                "entropy audit: {} entries, {}",
                entropy.entries.len(),
                if entropy.pass { "all bounds hold" } else { "VIOLATIONS" }
            );
            for e in entropy.entries.iter().filter(|e| !e.ok).take(10) {
                println!("  VIOLATION {} {} = {}", e.name, e.params, e.value);
            }
        }
    }
    Ok(if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAILURE)
    })
}

fn build_config(mode: Mode, args: &ExperimentArgs) -> Result<ExperimentConfig> {
    // config file: the environment variable overrides the path only
    let path = std::env::var_os(CONFIG_ENV)
        .map(PathBuf::from)
        .or_else(|| args.config.clone());
    let mut cfg = match path {
        Some(p) => {
            let text = std::fs::read_to_string(&p)
                .with_context(|| format!("config rejected: cannot read {}", p.display()))?;
            ExperimentConfig::parse_file(&text).map_err(|e| anyhow!("config rejected: {e}"))?
        }
        None => ExperimentConfig::default(),
    };
    cfg.mode = mode;
    let mut set = |key: &str, value: Option<String>| -> Result<()> {
        if let Some(v) = value {
            cfg.apply(key, &v).map_err(|e| anyhow!("config rejected: {e}"))?;
        }
        Ok(())
    };
    set("seed", args.seed.map(|v| v.to_string()))?;
    set("q", args.q.map(|v| v.to_string()))?;
    set("n", args.n.map(|v| v.to_string()))?;
    set("r", args.r.map(|v| v.to_string()))?;
    set("e", args.e.map(|v| v.to_string()))?;
    set("eplus", args.eplus.map(|v| v.to_string()))?;
    set("m", args.m.map(|v| v.to_string()))?;
    set("degree", args.degree.map(|v| v.to_string()))?;
    set("trials", args.trials.map(|v| v.to_string()))?;
    set("enumeration", args.enumeration.clone())?;
    set("format", args.format.clone())?;
    set("jobs", args.jobs.map(|v| v.to_string()))?;
    set("budget", args.budget.map(|v| v.to_string()))?;
    set("planner_k", args.planner_k.map(|v| v.to_string()))?;
    if args.record_all {
        cfg.record_all = true;
    }
    if args.attach_no_slack {
        cfg.attach_no_slack = true;
    }
    if let Some(out) = &args.out {
        cfg.out = Some(out.clone());
    }
    Ok(cfg)
}

fn run_experiment(mode: Mode, args: ExperimentArgs) -> Result<ExitCode> {
    let cfg = build_config(mode, &args)?;
    let estimate = cfg
        .validate()
        .map_err(|e| anyhow!("config rejected: {e}"))?;
    eprintln!("estimated cost: {estimate} ops (budget {})", cfg.budget);
    let out = harness::run(&cfg).map_err(|e| anyhow!("{e}"))?;

    let mut buffer = Vec::new();
    match cfg.format {
        harness::OutputFormat::Csv => records::write_csv(&out.records, &mut buffer)?,
        harness::OutputFormat::Json => records::write_json(&out.records, &mut buffer)?,
    }
    match &cfg.out {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent)
                    .with_context(|| format!("creating {}", parent.display()))?;
            }
            std::fs::write(path, &buffer)
                .with_context(|| format!("writing {}", path.display()))?;
            println!("{}", serde_json::to_string_pretty(&out.summary)?);
        }
        None => {
            std::io::stdout().write_all(&buffer)?;
            eprintln!("{}", serde_json::to_string_pretty(&out.summary)?);
        }
    }
    if out.summary.counterexamples > 0 {
        eprintln!(
            "{} threshold counterexample(s): this falsifies the implementation",
            out.summary.counterexamples
        );
        return Ok(ExitCode::from(EXIT_FAILURE));
    }
    Ok(ExitCode::SUCCESS)
}

fn run_no_slack(args: NoSlackArgs) -> Result<ExitCode> {
    let field = Arc::new(
        gaplab_core::Field::new(args.q).map_err(|e| anyhow!("config rejected: {e}"))?,
    );
    let required = 2 * args.e + 2;
    let code = adversarial::find_code_with_distance(
        Arc::clone(&field),
        args.n,
        args.r,
        required,
        args.tries,
        args.seed,
        args.budget,
    )
    .map_err(|e| anyhow!("{e}"))?;
    let k = args
        .k
        .unwrap_or((args.e + 1).min(args.q as usize - 1))
        .clamp(1, (args.e + 1).min(args.q as usize - 1));
    let alphas: Vec<u32> = (0..k as u32).collect();
    let inst = adversarial::build_no_slack_pair(
        &field,
        args.n,
        args.e,
        &alphas,
        adversarial::CoordinatePolicy::Prefix,
    )
    .map_err(|e| anyhow!("config rejected: {e}"))?;
    let set = gaplab_core::ball::BallQuery::new(&code, args.e, gaplab_core::ball::Strategy::Auto)
        .map_err(|e| anyhow!("{e}"))?
        .enumerate(args.budget)
        .map_err(|e| anyhow!("{e}"))?;
    let cert = adversarial::certify_violation(&code, &inst, &set, args.budget)
        .map_err(|e| anyhow!("{e}"))?;
    cert.verify(&code, &set).map_err(|e| anyhow!("{e}"))?;
    let text = serde_json::to_string_pretty(&cert)?;
    match &args.out {
        Some(path) => std::fs::write(path, text)?,
        None => println!("{text}"),
    }
    eprintln!(
        "certified: {} members of H_{} on the line, excluded alpha={} (d = {})",
        cert.members.len(),
        args.e,
        cert.excluded_alpha,
        cert.distance
    );
    Ok(ExitCode::SUCCESS)
}

fn run_reduce_demo(args: ReduceArgs) -> Result<ExitCode> {
    let object: ObjectKind = args
        .object
        .parse()
        .map_err(|e| anyhow!("config rejected: {e}"))?;
    let kind = match object {
        ObjectKind::Line => witness::DesignKind::Line,
        ObjectKind::Space => witness::DesignKind::Space { m: args.m },
        ObjectKind::Curve => witness::DesignKind::Curve {
            degree: args.degree,
        },
    };
    let field = Arc::new(
        gaplab_core::Field::new(args.q).map_err(|e| anyhow!("config rejected: {e}"))?,
    );
    let code = gaplab_core::LinearCode::sample(field, args.n, args.r, args.seed);
    let w = witness::synth_witness(
        &code,
        kind,
        args.target_rank,
        args.points,
        args.e,
        args.seed,
        args.budget,
    )
    .map_err(|e| anyhow!("{e}"))?;
    let d_lower = code
        .min_distance(args.budget)
        .ok()
        .and_then(|d| d.finite())
        .unwrap_or(1);
    let out = witness::reduce_to_base(&code, &w, d_lower).map_err(|e| anyhow!("{e}"))?;
    match args.format {
        TextFormat::Json => {
            let v = serde_json::json!({
                "code": code.descriptor(),
                "witness": w,
                "extraction": out,
            });
            println!("{}", serde_json::to_string_pretty(&v)?);
        }
        TextFormat::Text => {
            println!(
                "witness: {:?}, K = {}, rank {} (base {})",
                kind,
                w.k(),
                w.rank(code.field()),
                w.target.h()
            );
            for (i, cert) in out.chain.iter().enumerate() {
                let supp = match &cert.eliminated {
                    witness::Elimination::Eliminated { support_size, .. } => *support_size,
                    witness::Elimination::RankAlreadyLower => 0,
                };
                println!(
                    "step {}: rank {} -> {}, kept {} columns (eliminated support {supp})",
                    i + 1,
                    cert.rank_before,
                    cert.rank_after,
                    cert.retained.len(),
                );
            }
            println!(
                "final: rank {}, {} surviving columns match the parametrization exactly",
                out.witness.rank(code.field()),
                out.retained.len()
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn run_selftest(level: LevelArg, format: TextFormat) -> Result<ExitCode> {
    let level = match level {
        LevelArg::Quick => harness::Level::Quick,
        LevelArg::Full => harness::Level::Full,
    };
    let report = harness::selftest(level);
    match format {
        TextFormat::Json => println!("{}", serde_json::to_string_pretty(&report)?),
        TextFormat::Text => {
            for suite in &report.suites {
                println!(
                    "{:<38} {} ({} checks, {} ms)",
                    suite.name,
                    if suite.pass { "PASS" } else { "FAIL" },
                    suite.checks,
                    suite.wall_ms
                );
                for f in &suite.failures {
                    println!("    {f}");
                }
            }
            println!("overall: {}", if report.pass { "PASS" } else { "FAIL" });
        }
    }
    Ok(if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAILURE)
    })
}
