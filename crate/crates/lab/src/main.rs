//! oracle-lab: command-line laboratory for quantum oracle interrogation.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use oracle_interrogation::combinatorics::{
    classical_success_probability, exact_error, gaussian_error_approx, interrogation_threshold,
    success_probability, threshold_for_error, Probability,
};
use oracle_interrogation::optimizer::optimize_profile;
use oracle_interrogation::profile::{
    classical_ratio, expected_correct_classical, expected_correct_quantum, quantum_ratio,
    AmplitudeProfile, InterrogationPlan,
};
use oracle_interrogation::statevector::{OracleString, DEFAULT_QUBIT_CAP};

mod report;
mod trials;

use report::{write_output, Cell, Format, Report, Table};

const TRIPWIRE_EXIT: u8 = 3;

/// Laboratory for quantum oracle interrogation: exact query-count
/// combinatorics, dense pipeline simulation, accuracy/budget tradeoffs and
/// amplitude-profile optimization.
#[derive(Parser)]
#[command(
    name = "oracle-lab",
    version,
    after_help = "Exit codes: 0 success; 1 runtime failure; 2 usage error; \
                  3 Monte Carlo statistics deviated more than four sigma from \
                  the analytic prediction."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact success probability and classical baseline for a budget
    Exact(ExactArgs),
    /// Query budget meeting an error target, exactly or via the Gaussian tail
    Threshold(ThresholdArgs),
    /// Monte Carlo interrogation trials on the dense simulator
    Simulate(SimulateArgs),
    /// Accuracy/budget tradeoff: asymptotic ratios and finite-n profiles
    Tradeoff(TradeoffArgs),
    /// Optimize the amplitude profile for a fixed query budget
    Optimize(OptimizeArgs),
}

#[derive(Args)]
struct OutputArgs {
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write output to a file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExactArgs {
    /// Register size (bits of the hidden string)
    #[arg(long)]
    n: u64,
    /// Query budget; defaults to floor(n/2 + sqrt(n))
    #[arg(long)]
    k: Option<u64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct ThresholdTarget {
    /// Error tolerance to meet with the smallest exact budget
    #[arg(long)]
    epsilon: Option<f64>,
    /// Budget margin in units of sqrt(n): evaluate the Gaussian tail estimate
    /// at k = ceil(n/2 + lambda sqrt(n))
    #[arg(long)]
    lambda: Option<f64>,
}

#[derive(Args)]
struct ThresholdArgs {
    /// Register size (bits of the hidden string)
    #[arg(long)]
    n: u64,
    #[command(flatten)]
    target: ThresholdTarget,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct SimulateArgs {
    /// Register size; dense simulation caps at 24 qubits
    #[arg(long)]
    n: usize,
    /// Amplitude profile: uniform, one-query, step, optimal, or file:PATH
    /// (one amplitude per line)
    #[arg(long, default_value = "uniform", value_parser = parse_profile_arg)]
    profile: ProfileArg,
    /// Query budget for uniform/step/optimal profiles; defaults to
    /// floor(n/2 + sqrt(n))
    #[arg(long)]
    k: Option<usize>,
    /// Hidden string as hex (most significant bit first); drawn fresh per
    /// trial when omitted
    #[arg(long)]
    omega: Option<String>,
    /// Number of independent trials
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    /// Master seed; per-trial seeds derive from it deterministically
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct TradeoffArgs {
    /// Comma-separated query fractions k/n, each in [0, 1]
    #[arg(long, value_delimiter = ',', required = true)]
    fractions: Vec<f64>,
    /// Also evaluate the finite-n profile family at this register size
    #[arg(long)]
    n: Option<u64>,
    /// Finite-n profile family
    #[arg(long, value_enum, default_value_t = ProfileFamily::Step)]
    profile: ProfileFamily,
    /// Draw an ASCII plot of the tradeoff to stderr
    #[arg(long)]
    plot: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct OptimizeArgs {
    /// Register size (bits of the hidden string)
    #[arg(long)]
    n: usize,
    /// Query budget (1 to n)
    #[arg(long)]
    k: usize,
    /// Eigen-residual tolerance for the power iteration
    #[arg(long, default_value_t = oracle_interrogation::optimizer::DEFAULT_TOLERANCE)]
    tolerance: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
enum ProfileFamily {
    Step,
    Optimal,
}

#[derive(Clone, Debug)]
enum ProfileArg {
    Uniform,
    OneQuery,
    Step,
    Optimal,
    File(PathBuf),
}

fn parse_profile_arg(s: &str) -> Result<ProfileArg, String> {
    match s {
        "uniform" => Ok(ProfileArg::Uniform),
        "one-query" => Ok(ProfileArg::OneQuery),
        "step" => Ok(ProfileArg::Step),
        "optimal" => Ok(ProfileArg::Optimal),
        _ => match s.strip_prefix("file:") {
            Some(path) if !path.is_empty() => Ok(ProfileArg::File(PathBuf::from(path))),
            _ => Err(format!(
                "expected uniform, one-query, step, optimal or file:PATH, got {s:?}"
            )),
        },
    }
}

impl ProfileArg {
    fn name(&self) -> String {
        match self {
            ProfileArg::Uniform => "uniform".into(),
            ProfileArg::OneQuery => "one-query".into(),
            ProfileArg::Step => "step".into(),
            ProfileArg::Optimal => "optimal".into(),
            ProfileArg::File(p) => format!("file:{}", p.display()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Exact(args) => cmd_exact(args),
        Command::Threshold(args) => cmd_threshold(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Tradeoff(args) => cmd_tradeoff(args),
        Command::Optimize(args) => cmd_optimize(args),
    }
}

fn cmd_exact(args: ExactArgs) -> anyhow::Result<ExitCode> {
    let n = args.n;
    if n == 0 {
        bail!("--n must be at least 1");
    }
    let k = args.k.unwrap_or_else(|| interrogation_threshold(n)).min(n);

    let success = success_probability(n, k);
    let error = success.complement();
    let classical = classical_success_probability(n, k);

    let mut r = Report::new("exact");
    r.meta("n", n);
    r.meta("k", k);
    r.push("n", Cell::Int(n));
    r.push("k", Cell::Int(k));
    r.push_probability("success_probability", &success);
    r.push_probability("exact_error", &error);
    r.push_probability("classical_success_probability", &classical);
    r.push(
        "expected_correct_classical",
        Cell::Float(expected_correct_classical(n, k)),
    );
    write_output(&args.output.out, &r.render(args.output.format))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_threshold(args: ThresholdArgs) -> anyhow::Result<ExitCode> {
    let n = args.n;
    if n == 0 {
        bail!("--n must be at least 1");
    }
    let mut r = Report::new("threshold");
    r.meta("n", n);
    r.push("n", Cell::Int(n));

    match (args.target.epsilon, args.target.lambda) {
        (Some(epsilon), None) => {
            let k = threshold_for_error(n, epsilon)?;
            let error = exact_error(n, k);
            let success = success_probability(n, k);
            let lambda = (k as f64 - n as f64 / 2.0) / (n as f64).sqrt();
            r.meta("epsilon", report::format_float(epsilon));
            r.push("epsilon", Cell::Float(epsilon));
            r.push("k", Cell::Int(k));
            r.push_probability("exact_error", &error);
            r.push_probability("success_probability", &success);
            r.push("lambda_equivalent", Cell::Float(lambda));
            r.push(
                "gaussian_error_estimate",
                Cell::Float(gaussian_error_approx(lambda)),
            );
        }
        (None, Some(lambda)) => {
            if !lambda.is_finite() || lambda < 0.0 {
                bail!("--lambda must be a nonnegative finite number");
            }
            let raw = n as f64 / 2.0 + lambda * (n as f64).sqrt();
            let k = (raw.ceil() as u64).min(n);
            r.meta("lambda", report::format_float(lambda));
            r.push("lambda", Cell::Float(lambda));
            r.push("k", Cell::Int(k));
            r.push(
                "gaussian_error_estimate",
                Cell::Float(gaussian_error_approx(lambda)),
            );
        }
        _ => unreachable!("clap enforces exactly one target"),
    }
    write_output(&args.output.out, &r.render(args.output.format))?;
    Ok(ExitCode::SUCCESS)
}

/// Builds the requested profile. Returns the profile, its analytic plan and
/// a warning line when the optimizer stopped at the iteration cap.
fn build_profile(
    n: usize,
    k: Option<usize>,
    arg: &ProfileArg,
) -> anyhow::Result<(InterrogationPlan, Option<String>)> {
    if n == 0 {
        bail!("--n must be at least 1");
    }
    let default_k = || (interrogation_threshold(n as u64) as usize).min(n);
    match arg {
        ProfileArg::Uniform => {
            let k = k.unwrap_or_else(default_k);
            Ok((InterrogationPlan::uniform(n, k)?, None))
        }
        ProfileArg::OneQuery => {
            if let Some(k) = k {
                if k != 1 {
                    bail!("the one-query profile has a fixed budget of 1; omit --k");
                }
            }
            let profile = AmplitudeProfile::one_query(n)?;
            Ok((InterrogationPlan::for_profile(profile), None))
        }
        ProfileArg::Step => {
            let k = k.unwrap_or_else(default_k);
            let profile = AmplitudeProfile::step(n, k)?;
            Ok((InterrogationPlan::for_profile(profile), None))
        }
        ProfileArg::Optimal => {
            let k = k.unwrap_or_else(default_k);
            let result =
                optimize_profile(n, k, oracle_interrogation::optimizer::DEFAULT_TOLERANCE)?;
            let warning = (!result.converged()).then(|| {
                format!(
                    "optimizer stopped at the iteration cap with residual {:e}",
                    result.residual
                )
            });
            Ok((InterrogationPlan::for_profile(result.profile), warning))
        }
        ProfileArg::File(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading profile from {}", path.display()))?;
            let mut alphas = Vec::new();
            for (num, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let a: f64 = line.parse().with_context(|| {
                    format!("{}:{}: invalid amplitude {line:?}", path.display(), num + 1)
                })?;
                alphas.push(a);
            }
            let profile = AmplitudeProfile::new(n, alphas)?;
            Ok((InterrogationPlan::for_profile(profile), None))
        }
    }
}

fn cmd_simulate(args: SimulateArgs) -> anyhow::Result<ExitCode> {
    if args.n > DEFAULT_QUBIT_CAP {
        bail!(
            "{} qubits exceeds the dense-simulation cap of {} qubits",
            args.n,
            DEFAULT_QUBIT_CAP
        );
    }
    let (plan, warning) = build_profile(args.n, args.k, &args.profile)?;
    if let Some(w) = warning {
        eprintln!("warning: {w}");
    }
    let omega = args
        .omega
        .as_deref()
        .map(|text| OracleString::from_hex(args.n, text))
        .transpose()?;

    let records = trials::run_trials(&plan.profile, omega.as_ref(), args.trials, args.seed)?;
    let null = trials::NullModel::for_profile(&plan.profile, plan.exact_match.value())?;
    let summary = trials::summarize(&records, &null);

    let mut table = Table::new(
        "simulate",
        "records",
        vec![
            "trial",
            "seed",
            "omega_hex",
            "guess_hex",
            "correct_bits",
            "exact_match",
        ],
    );
    table.meta("n", args.n);
    table.meta("profile", args.profile.name());
    table.meta("k", plan.query_cost);
    table.meta(
        "omega",
        omega
            .as_ref()
            .map_or_else(|| "random".to_string(), |w| w.to_hex()),
    );
    table.meta("trials", args.trials);
    table.meta("master_seed", args.seed);
    table.meta("rng", "chacha8");
    table.meta(
        "seed_rule",
        "splitmix64(master + (trial + 1) * 0x9e3779b97f4a7c15)",
    );
    for rec in &records {
        table.push_row(vec![
            Cell::Int(rec.trial),
            Cell::Int(rec.seed),
            Cell::Text(rec.omega.to_hex()),
            Cell::Text(rec.guess.to_hex()),
            Cell::Int(rec.correct_bits as u64),
            Cell::Bool(rec.exact_match),
        ]);
    }
    table.trailer = Some(("summary", summary_json(&summary, &plan.exact_match)));
    write_output(&args.output.out, &table.render(args.output.format))?;

    eprintln!(
        "{} trials: mean correct bits {:.4} (analytic {:.4}, {:.2} sigma), \
         exact-match rate {:.4} (analytic {:.4}, {:.2} sigma)",
        summary.trials,
        summary.mean_correct,
        summary.analytic_expected,
        summary.deviation_sigma_correct,
        summary.match_rate,
        summary.analytic_match,
        summary.deviation_sigma_match,
    );
    if summary.tripped {
        eprintln!(
            "error: empirical statistics deviate from the analytic prediction \
             by more than four sigma; the simulator and the closed forms disagree"
        );
        return Ok(ExitCode::from(TRIPWIRE_EXIT));
    }
    Ok(ExitCode::SUCCESS)
}

fn summary_json(s: &trials::Summary, analytic_match: &Probability) -> serde_json::Value {
    let mut obj = serde_json::Map::new();
    let mut put = |k: &str, v: serde_json::Value| {
        obj.insert(k.to_string(), v);
    };
    put("trials", s.trials.into());
    put("mean_correct_bits", Cell::Float(s.mean_correct).json());
    put("se_mean_correct_bits", Cell::Float(s.se_correct).json());
    put(
        "sigma_mean_correct_bits",
        Cell::Float(s.sigma_mean_correct).json(),
    );
    put(
        "analytic_expected_correct_bits",
        Cell::Float(s.analytic_expected).json(),
    );
    put("exact_match_rate", Cell::Float(s.match_rate).json());
    put(
        "analytic_exact_match_probability",
        Cell::Float(s.analytic_match).json(),
    );
    put(
        "analytic_exact_match_probability_exact",
        analytic_match
            .exact_string()
            .map(serde_json::Value::from)
            .unwrap_or(serde_json::Value::Null),
    );
    put("sigma_exact_match", Cell::Float(s.sigma_match).json());
    put(
        "deviation_sigma_correct",
        Cell::Float(s.deviation_sigma_correct).json(),
    );
    put(
        "deviation_sigma_match",
        Cell::Float(s.deviation_sigma_match).json(),
    );
    put("tripped", s.tripped.into());
    serde_json::Value::Object(obj)
}

fn cmd_tradeoff(args: TradeoffArgs) -> anyhow::Result<ExitCode> {
    for &f in &args.fractions {
        if !(0.0..=1.0).contains(&f) || !f.is_finite() {
            bail!("query fraction {f} lies outside [0, 1]");
        }
    }
    if args.n == Some(0) {
        bail!("--n must be at least 1");
    }

    let mut rows = Vec::new();
    for &f in &args.fractions {
        let finite = match args.n {
            None => None,
            Some(n) => Some(finite_ratio(n, f, args.profile)?),
        };
        rows.push((f, quantum_ratio(f), classical_ratio(f), finite, args.n));
    }

    let mut table = Table::new(
        "tradeoff",
        "rows",
        vec![
            "fraction",
            "quantum_ratio",
            "classical_ratio",
            "finite_n_ratio",
            "n",
        ],
    );
    table.meta(
        "fractions",
        args.fractions
            .iter()
            .map(|f| f.to_string())
            .collect::<Vec<_>>()
            .join(","),
    );
    if let Some(n) = args.n {
        table.meta("n", n);
        table.meta(
            "family",
            match args.profile {
                ProfileFamily::Step => "step",
                ProfileFamily::Optimal => "optimal",
            },
        );
    }
    for &(f, q, c, fin, n) in &rows {
        table.push_row(vec![
            Cell::Float(f),
            Cell::Float(q),
            Cell::Float(c),
            fin.map_or(Cell::Empty, Cell::Float),
            n.map_or(Cell::Empty, Cell::Int),
        ]);
    }
    write_output(&args.output.out, &table.render(args.output.format))?;

    if args.plot {
        eprint!("{}", ascii_plot(&rows));
    }
    Ok(ExitCode::SUCCESS)
}

/// Expected correct-bit ratio of the finite-n profile family at budget
/// fraction `f`. Budgets above n/2 reuse the half-budget profile: extra
/// queries cannot help once every shell up to n/2 is reachable.
fn finite_ratio(n: u64, f: f64, family: ProfileFamily) -> anyhow::Result<f64> {
    let n_us = usize::try_from(n).context("--n too large")?;
    let k = (f * n as f64).round() as u64;
    if k == 0 {
        return Ok(0.5);
    }
    let expected = match family {
        ProfileFamily::Step => {
            let k = k.min(n / 2).max(1) as usize;
            expected_correct_quantum(&AmplitudeProfile::step(n_us, k)?)
        }
        ProfileFamily::Optimal => {
            let k = k.min(n) as usize;
            let result =
                optimize_profile(n_us, k, oracle_interrogation::optimizer::DEFAULT_TOLERANCE)?;
            if !result.converged() {
                eprintln!(
                    "warning: optimizer stopped at the iteration cap with residual {:e}",
                    result.residual
                );
            }
            result.expected_correct
        }
    };
    Ok(expected / n as f64)
}

fn ascii_plot(rows: &[(f64, f64, f64, Option<f64>, Option<u64>)]) -> String {
    const W: usize = 64;
    const H: usize = 20;
    let x_max = rows.iter().map(|r| r.0).fold(0.5, f64::max).max(1e-9);

    let mut canvas = vec![vec![b' '; W]; H];
    let y_of = |ratio: f64| -> usize {
        // ratio 0.5 at the bottom row, 1.0 at the top.
        let t = ((ratio - 0.5) / 0.5).clamp(0.0, 1.0);
        ((1.0 - t) * (H - 1) as f64).round() as usize
    };
    for col in 0..W {
        let f = x_max * col as f64 / (W - 1) as f64;
        canvas[y_of(classical_ratio(f.min(1.0)))][col] = b'+';
        canvas[y_of(quantum_ratio(f.min(1.0)))][col] = b'*';
    }
    for &(f, _, _, finite, _) in rows {
        if let Some(r) = finite {
            let col = ((f / x_max) * (W - 1) as f64).round() as usize;
            canvas[y_of(r)][col.min(W - 1)] = b'o';
        }
    }

    let mut s = String::new();
    s.push_str("correct-bit ratio   * quantum   + classical   o finite-n\n");
    for (i, row) in canvas.iter().enumerate() {
        let label = match i {
            0 => "1.00 |",
            _ if i == H - 1 => "0.50 |",
            _ if i == (H - 1) / 2 => "0.75 |",
            _ => "     |",
        };
        s.push_str(label);
        s.push_str(std::str::from_utf8(row).unwrap());
        s.push('\n');
    }
    s.push_str("     +");
    s.push_str(&"-".repeat(W));
    s.push('\n');
    s.push_str(&format!(
        "      0{:>width$.2}  (query fraction k/n)\n",
        x_max,
        width = W - 1
    ));
    s
}

fn cmd_optimize(args: OptimizeArgs) -> anyhow::Result<ExitCode> {
    let result = optimize_profile(args.n, args.k, args.tolerance)?;
    if !result.converged() {
        eprintln!(
            "warning: optimizer stopped at the iteration cap with residual {:e}",
            result.residual
        );
    }

    let mut r = Report::new("optimize");
    r.meta("n", args.n);
    r.meta("k", args.k);
    r.meta("tolerance", report::format_float(args.tolerance));
    r.push("n", Cell::Int(args.n as u64));
    r.push("k", Cell::Int(args.k as u64));
    r.push("gain", Cell::Float(result.gain));
    r.push("expected_correct", Cell::Float(result.expected_correct));
    r.push(
        "correct_ratio",
        Cell::Float(result.expected_correct / args.n as f64),
    );
    r.push("iterations", Cell::Int(result.iterations));
    r.push("residual", Cell::Float(result.residual));
    r.push("tolerance", Cell::Float(result.tolerance));
    r.push("converged", Cell::Bool(result.converged()));

    let uniform = AmplitudeProfile::uniform(args.n, args.k)?;
    r.push(
        "expected_correct_uniform",
        Cell::Float(expected_correct_quantum(&uniform)),
    );
    let step_cell = if args.k >= 1 && 2 * args.k <= args.n {
        Cell::Float(expected_correct_quantum(&AmplitudeProfile::step(
            args.n, args.k,
        )?))
    } else {
        Cell::Empty
    };
    r.push("expected_correct_step", step_cell);
    r.push(
        "expected_correct_classical",
        Cell::Float(expected_correct_classical(args.n as u64, args.k as u64)),
    );
    for (j, a) in result.profile.alphas().iter().enumerate() {
        r.push(format!("alpha_{j}"), Cell::Float(*a));
    }
    write_output(&args.output.out, &r.render(args.output.format))?;
    Ok(ExitCode::SUCCESS)
}
