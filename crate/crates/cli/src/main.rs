use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rlsort::analysis::{analyze, monotonic_violations, AnalyzeParams};
use rlsort::experiment::DatasetKind;
use rlsort::harness::{
    bench_csv, parse_array, parse_trace_values, resilience_csv, run_bench, run_resilience,
    Algorithm, HarnessConfig, ParamsFile,
};
use rlsort::{rl_sort, FaultModel, RunOptions, StateVector};

/// Exit status 1: a requested check did not hold.
const EXIT_CHECK: u8 = 1;
/// Exit status 2: bad usage, unreadable input or unwritable output.
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(
    name = "rlsort",
    version,
    about = "Learn, run and evaluate the greedy sorting agent"
)]
struct Cli {
    /// Experiment configuration (JSON). Built-in defaults apply when absent.
    #[arg(long, global = true, env = "RLSORT_CONFIG")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Learn value weights and write them as JSON.
    Learn(LearnArgs),
    /// Sort one array with the agent.
    Sort(SortArgs),
    /// Benchmark all algorithms over datasets, sizes and fault rates.
    Bench(BenchArgs),
    /// Success rate and error over a grid of fault rates.
    Resilience(ResilienceArgs),
    /// Stability and resiliency report for one array.
    Analyze(AnalyzeArgs),
}

#[derive(Args)]
struct LearnArgs {
    /// Where to write the weight file.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    sample_dim: Option<usize>,
    #[arg(long)]
    gamma: Option<f64>,
}

#[derive(Args)]
struct InputArgs {
    /// The array inline, whitespace separated.
    #[arg(long, conflicts_with = "input", required_unless_present = "input")]
    array: Option<String>,
    /// File holding a whitespace-separated array.
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Args)]
struct SortArgs {
    /// Weight file written by `learn`.
    #[arg(long)]
    params: PathBuf,
    #[command(flatten)]
    input: InputArgs,
    /// Comparison fault rate.
    #[arg(long, default_value_t = 0.0)]
    p: f64,
    /// Seed of the fault stream.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Step cap; defaults to 10 d^2.
    #[arg(long)]
    step_cap: Option<usize>,
    /// Write the per-step trace CSV here.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Write one row per intermediate array here.
    #[arg(long)]
    heatmap: Option<PathBuf>,
    /// Exit with status 1 unless the result is exactly sorted.
    #[arg(long)]
    check: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    params: PathBuf,
    /// Where to write the CSV.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_delimiter = ',')]
    algorithms: Option<Vec<String>>,
    #[arg(long, value_delimiter = ',')]
    dims: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    fault_rates: Option<Vec<f64>>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Upper end of the uniform value range.
    #[arg(long)]
    scale: Option<f64>,
    #[arg(long)]
    step_cap_multiplier: Option<usize>,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    sweep: SweepArgs,
    #[arg(long, value_delimiter = ',')]
    datasets: Option<Vec<String>>,
    /// Gaussian displacement as a fraction of the value range.
    #[arg(long)]
    sigma: Option<f64>,
}

#[derive(Args)]
struct ResilienceArgs {
    #[command(flatten)]
    sweep: SweepArgs,
    #[arg(long)]
    dataset: Option<String>,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long)]
    params: PathBuf,
    #[command(flatten)]
    input: InputArgs,
    /// Trace CSV from `sort --trace`, checked for monotonic value.
    #[arg(long)]
    trace_csv: Option<PathBuf>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    p_v: Option<f64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Exit with status 1 if the trace has any monotonicity violation.
    #[arg(long, requires = "trace_csv")]
    check: bool,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Check(String),
}

impl From<rlsort::Error> for Failure {
    fn from(e: rlsort::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type CliResult<T = ()> = Result<T, Failure>;

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, contents: &str) -> CliResult {
    fs::write(path, contents)
        .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
}

fn load_config(path: Option<&Path>) -> CliResult<HarnessConfig> {
    match path {
        Some(p) => HarnessConfig::from_json(&read(p)?)
            .map_err(|e| Failure::Usage(format!("{}: {e}", p.display()))),
        None => Ok(HarnessConfig::default()),
    }
}

fn load_params(path: &Path) -> CliResult<ParamsFile> {
    ParamsFile::from_json(&read(path)?)
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_array(input: &InputArgs) -> CliResult<StateVector> {
    let text = match (&input.array, &input.input) {
        (Some(a), _) => a.clone(),
        (None, Some(p)) => read(p)?,
        (None, None) => {
            return Err(Failure::Usage(
                "either --array or --input is required".into(),
            ))
        }
    };
    Ok(parse_array(&text)?)
}

fn parse_list<T: std::str::FromStr<Err = rlsort::Error>>(items: &[String]) -> CliResult<Vec<T>> {
    Ok(items
        .iter()
        .map(|s| s.trim().parse())
        .collect::<Result<Vec<T>, _>>()?)
}

fn cmd_learn(cfg: HarnessConfig, args: LearnArgs) -> CliResult {
    let mut learn = cfg.learn;
    learn.seed = args.seed.unwrap_or(learn.seed);
    learn.iterations = args.iterations.unwrap_or(learn.iterations);
    learn.samples_per_iter = args.samples.unwrap_or(learn.samples_per_iter);
    learn.sample_dim = args.sample_dim.unwrap_or(learn.sample_dim);
    learn.gamma = args.gamma.unwrap_or(learn.gamma);
    let file = ParamsFile::learn(&learn)?;
    write(&args.out, &file.to_json()?)?;
    println!("theta = [{}, {}]", file.theta[0], file.theta[1]);
    if file.params().is_stabilizing() {
        println!("both weights negative: the greedy agent is monotone under reliable comparison");
        Ok(())
    } else {
        Err(Failure::Check(
            "learned weights are not both negative; monotone progress is not guaranteed".into(),
        ))
    }
}

fn cmd_sort(args: SortArgs) -> CliResult {
    let vp = load_params(&args.params)?.params();
    let x = load_array(&args.input)?;
    let mut cmp = FaultModel::new(args.p, args.seed)?;
    let opts = RunOptions {
        step_cap: args.step_cap,
        snapshots: args.heatmap.is_some(),
    };
    let (out, trace) = rl_sort(&x, &vp, &mut cmp, opts);
    println!("{out}");
    println!("moves: {}", trace.moves);
    println!("termination: {}", trace.termination.as_str());
    if let Some(path) = &args.trace {
        write(path, &trace.to_csv())?;
    }
    if let Some(path) = &args.heatmap {
        write(path, &trace.heatmap_csv()?)?;
    }
    if args.check && out != x.sorted() {
        return Err(Failure::Check("result is not sorted".into()));
    }
    Ok(())
}

fn cmd_bench(cfg: HarnessConfig, args: BenchArgs) -> CliResult {
    let vp = load_params(&args.sweep.params)?.params();
    let mut b = cfg.bench;
    let s = &args.sweep;
    if let Some(a) = &s.algorithms {
        b.algorithms = parse_list::<Algorithm>(a)?;
    }
    if let Some(d) = &args.datasets {
        b.datasets = parse_list::<DatasetKind>(d)?;
    }
    b.dims = s.dims.clone().unwrap_or(b.dims);
    b.fault_rates = s.fault_rates.clone().unwrap_or(b.fault_rates);
    b.trials = s.trials.unwrap_or(b.trials);
    b.seed = s.seed.unwrap_or(b.seed);
    b.data.scale = s.scale.unwrap_or(b.data.scale);
    b.data.sigma = args.sigma.unwrap_or(b.data.sigma);
    b.step_cap_multiplier = s.step_cap_multiplier.unwrap_or(b.step_cap_multiplier);
    let rows = run_bench(&b, &vp)?;
    write(&s.out, &bench_csv(&rows))?;
    println!("{} rows written to {}", rows.len(), s.out.display());
    Ok(())
}

fn cmd_resilience(cfg: HarnessConfig, args: ResilienceArgs) -> CliResult {
    let vp = load_params(&args.sweep.params)?.params();
    let mut r = cfg.resilience;
    let s = &args.sweep;
    if let Some(a) = &s.algorithms {
        r.algorithms = parse_list::<Algorithm>(a)?;
    }
    if let Some(d) = &args.dataset {
        r.dataset = d.parse()?;
    }
    r.dims = s.dims.clone().unwrap_or(r.dims);
    r.fault_rates = s.fault_rates.clone().unwrap_or(r.fault_rates);
    r.trials = s.trials.unwrap_or(r.trials);
    r.seed = s.seed.unwrap_or(r.seed);
    r.data.scale = s.scale.unwrap_or(r.data.scale);
    r.step_cap_multiplier = s.step_cap_multiplier.unwrap_or(r.step_cap_multiplier);
    let rows = run_resilience(&r, &vp)?;
    write(&s.out, &resilience_csv(&rows))?;
    println!("{} rows written to {}", rows.len(), s.out.display());
    Ok(())
}

fn cmd_analyze(cfg: HarnessConfig, args: AnalyzeArgs) -> CliResult {
    let vp = load_params(&args.params)?.params();
    let x = load_array(&args.input)?;
    let a = cfg.analyze;
    let params = AnalyzeParams {
        p: args.p.unwrap_or(a.p),
        p_v: args.p_v.unwrap_or(a.p_v),
        trials: args.trials.unwrap_or(a.trials),
        seed: args.seed.unwrap_or(a.seed),
    };
    let mut report = analyze(&x, &vp, &params, None)?;
    if let Some(path) = &args.trace_csv {
        report.monotonic_violations =
            Some(monotonic_violations(&parse_trace_values(&read(path)?)?));
    }
    let mut json =
        serde_json::to_string_pretty(&report).map_err(|e| Failure::Usage(e.to_string()))?;
    json.push('\n');
    match &args.out {
        Some(path) => write(path, &json)?,
        None => print!("{json}"),
    }
    match &report.monotonic_violations {
        Some(v) if args.check && !v.is_empty() => Err(Failure::Check(format!(
            "value failed to increase at {} step(s)",
            v.len()
        ))),
        _ => Ok(()),
    }
}

fn run(cli: Cli) -> CliResult {
    let cfg = load_config(cli.config.as_deref())?;
    match cli.command {
        Command::Learn(a) => cmd_learn(cfg, a),
        Command::Sort(a) => cmd_sort(a),
        Command::Bench(a) => cmd_bench(cfg, a),
        Command::Resilience(a) => cmd_resilience(cfg, a),
        Command::Analyze(a) => cmd_analyze(cfg, a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Check(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(EXIT_CHECK)
        }
    }
}
