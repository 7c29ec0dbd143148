use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use symgen::analysis::{Verdict, VerdictHistogram};
use symgen::error::{Error, Result};
use symgen::estimate::{
    default_order_growth_r, estimate_generation, estimate_word_identity,
    order_growth_experiment, run_event_chain_experiment, series_value, trace_event_chains,
    Estimate,
};
use symgen::exact::{exact_generation_probability, exact_unimodal_identity_probability};
use symgen::report::{
    chain_rows, chain_trace_lines, exact_generation_rows, exact_word_rows, generation_json,
    generation_rows, orders_rows, render_csv, word_rows, CsvRow,
};
use symgen::words::UnimodalWord;

/// Worker count read from the environment when --workers is absent.
const WORKERS_VAR: &str = "SYMGEN_WORKERS";

/// Chains traced to JSONL are capped so --trace stays usable next to
/// large trial counts; traced trials reuse the experiment's own seeds.
const TRACE_CAP: u64 = 1000;

#[derive(Parser)]
#[command(
    name = "symgen",
    version,
    about = "Experiments on random generation of symmetric groups",
    long_about = "Monte Carlo and exact experiments on pairs of random permutations: \
generation probability, word identity bounds, event chains in the lazy query \
model, and order growth. Human-readable summary on stdout; --output writes \
CSV or JSON. Reruns with the same seed and --workers 1 are byte-identical."
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl Format {
    fn name(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Estimate how often a uniform pair generates the alternating group
    /// or more, with the truncated series value for comparison.
    Generate {
        /// Degree: permutations act on n points.
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        /// Master seed; auto-generated (and echoed) when absent.
        #[arg(long)]
        seed: Option<u64>,
        /// Truncation order of the comparison series, at most 5.
        #[arg(long, default_value_t = 5)]
        series_order: usize,
        /// Worker threads; falls back to SYMGEN_WORKERS, then 1.
        #[arg(long)]
        workers: Option<usize>,
        /// File for the machine-readable report.
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Probability that u v^-1 evaluates to the identity, estimated or
    /// (with --exact, degree at most 5) enumerated, against the
    /// closed-form bound.
    Word {
        #[arg(long)]
        n: usize,
        /// First half: a nonempty positive word in x and y.
        #[arg(long)]
        u: String,
        /// Second half: a nonempty positive word, different from u.
        #[arg(long)]
        v: String,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long)]
        seed: Option<u64>,
        /// Enumerate all pairs exactly instead of sampling.
        #[arg(long)]
        exact: bool,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Event chains: k trajectories of the word from fresh start points,
    /// with per-step conditional hit rates against l/(n - il).
    Chain {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        u: String,
        #[arg(long)]
        v: String,
        /// Chain length; defaults to the full capacity floor(n / 2l).
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        /// Write a JSONL trajectory trace of the first chains (capped).
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Collision frequency among all positive words shorter than r,
    /// versus the union bound; collision-free trials certify order
    /// at least 2^r - 1.
    Orders {
        #[arg(long)]
        n: usize,
        /// Word length exponent; defaults to max(1, floor(0.5 sqrt(n ln n))).
        #[arg(long)]
        r: Option<usize>,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long)]
        seed: Option<u64>,
        /// Collision-free trials among the first this-many re-verified
        /// with an exact order computation.
        #[arg(long, default_value_t = 32)]
        certify: u64,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Exact generation probability by full enumeration of S_n x S_n,
    /// degrees 2 through 6 (7 with --allow-large: 25.4M classifications).
    Exact {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        allow_large: bool,
        #[arg(long, default_value_t = 5)]
        series_order: usize,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Evaluate the truncated series 1 - 1/n - 1/n^2 - 4/n^3 - 23/n^4 - 171/n^5.
    Series {
        #[arg(long)]
        n: usize,
        /// Truncation order, at most 5.
        #[arg(long, default_value_t = 5)]
        order: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::BoundViolation(_) | Error::InvariantViolation(_) => ExitCode::from(1),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(rand::random)
}

fn resolve_workers(flag: Option<usize>) -> Result<usize> {
    if let Some(w) = flag {
        return Ok(w.max(1));
    }
    match std::env::var(WORKERS_VAR) {
        Ok(s) => s.trim().parse::<usize>().map(|w| w.max(1)).map_err(|_| {
            Error::InvalidParameter(format!("{WORKERS_VAR} must be a positive integer, got {s:?}"))
        }),
        Err(_) => Ok(1),
    }
}

fn echo_line(cmd: &str, pairs: &[(&str, String)]) -> String {
    let body = pairs
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(" ");
    format!("symgen {cmd} {body}")
}

fn config_json(cmd: &str, pairs: &[(&str, String)]) -> serde_json::Value {
    let mut map = serde_json::Map::new();
    map.insert("subcommand".into(), cmd.into());
    for (k, v) in pairs {
        map.insert((*k).to_string(), v.clone().into());
    }
    serde_json::Value::Object(map)
}

// The output path is deliberately not echoed: the same run written to two
// different files must produce byte-identical contents.
fn config_pairs(
    named: &[(&'static str, String)],
    workers: usize,
    format: Format,
) -> Vec<(&'static str, String)> {
    let mut pairs = named.to_vec();
    pairs.push(("workers", workers.to_string()));
    pairs.push(("format", format.name().to_string()));
    pairs
}

fn write_output(
    output: &Option<PathBuf>,
    format: Format,
    echo: &str,
    config: serde_json::Value,
    rows: &[CsvRow],
    mut json_body: serde_json::Value,
) -> Result<()> {
    let Some(path) = output else {
        return Ok(());
    };
    let contents = match format {
        Format::Csv => format!("# {echo}\n{}", render_csv(rows)),
        Format::Json => {
            json_body["config"] = config;
            let text = serde_json::to_string_pretty(&json_body)
                .expect("reports hold only finite numbers and strings");
            format!("{text}\n")
        }
    };
    std::fs::write(path, contents)?;
    println!("  wrote {} to {}", format.name(), path.display());
    Ok(())
}

fn fmt_estimate(e: &Estimate) -> String {
    format!(
        "p_hat={} CI95=[{}, {}] ({}/{})",
        e.p_hat, e.ci_low, e.ci_high, e.successes, e.trials
    )
}

fn fmt_wall(wall: Option<f64>) -> String {
    match wall {
        Some(s) => format!("{s:.3} s"),
        None => "-".into(),
    }
}

fn histogram_line(h: &VerdictHistogram) -> String {
    Verdict::ALL
        .iter()
        .map(|v| format!("{}={}", v.as_str(), h.count(*v)))
        .collect::<Vec<_>>()
        .join(" ")
}

fn run(cmd: Cmd) -> Result<ExitCode> {
    match cmd {
        Cmd::Generate {
            n,
            trials,
            seed,
            series_order,
            workers,
            output,
            format,
        } => {
            let seed = resolve_seed(seed);
            let workers = resolve_workers(workers)?;
            let report = estimate_generation(n, trials, seed, workers)?;
            let pairs = config_pairs(
                &[
                    ("n", n.to_string()),
                    ("trials", trials.to_string()),
                    ("seed", seed.to_string()),
                    ("series_order", series_order.to_string()),
                ],
                workers,
                format,
            );
            let echo = echo_line("generate", &pairs);
            println!("{echo}");
            let e = &report.estimate;
            println!("  contains alternating: {}", fmt_estimate(e));
            println!("  verdicts: {}", histogram_line(&report.histogram));
            match series_value(n, series_order) {
                Ok(s) => println!(
                    "  series(order {series_order}) = {s}  deviation = {}",
                    e.p_hat - s
                ),
                Err(_) => println!("  series undefined at degree {n}"),
            }
            println!("  wall time: {}", fmt_wall(e.wall_time));
            write_output(
                &output,
                format,
                &echo,
                config_json("generate", &pairs),
                &generation_rows(&report, series_order),
                generation_json(&report, series_order),
            )?;
            Ok(ExitCode::SUCCESS)
        }

        Cmd::Word {
            n,
            u,
            v,
            trials,
            seed,
            exact,
            workers,
            output,
            format,
        } => {
            let word = UnimodalWord::parse(&u, &v)?;
            let workers = resolve_workers(workers)?;
            if exact {
                let start = Instant::now();
                let report = exact_unimodal_identity_probability(&word, n)?;
                let pairs = config_pairs(
                    &[
                        ("n", n.to_string()),
                        ("u", u.clone()),
                        ("v", v.clone()),
                        ("exact", "true".into()),
                    ],
                    workers,
                    format,
                );
                let echo = echo_line("word", &pairs);
                println!("{echo}");
                println!(
                    "  exact identity probability = {} = {}",
                    report.probability.fraction_string(),
                    report.probability.decimal_string()
                );
                println!("  bound (ell={}) = {}", report.ell, report.bound);
                println!("  wall time: {}", fmt_wall(Some(start.elapsed().as_secs_f64())));
                write_output(
                    &output,
                    format,
                    &echo,
                    config_json("word", &pairs),
                    &exact_word_rows(&report),
                    serde_json::json!({ "report": report }),
                )?;
                return Ok(ExitCode::SUCCESS);
            }
            let seed = resolve_seed(seed);
            let report = estimate_word_identity(&word, n, trials, seed, workers)?;
            let pairs = config_pairs(
                &[
                    ("n", n.to_string()),
                    ("u", u.clone()),
                    ("v", v.clone()),
                    ("trials", trials.to_string()),
                    ("seed", seed.to_string()),
                ],
                workers,
                format,
            );
            let echo = echo_line("word", &pairs);
            println!("{echo}");
            println!("  identity event: {}", fmt_estimate(&report.estimate));
            println!("  bound (ell={}) = {}", report.ell, report.bound);
            println!("  wall time: {}", fmt_wall(report.estimate.wall_time));
            write_output(
                &output,
                format,
                &echo,
                config_json("word", &pairs),
                &word_rows(&report),
                serde_json::json!({ "report": report }),
            )?;
            if report.violation {
                eprintln!(
                    "bound violated: Wilson lower bound {} exceeds {}",
                    report.estimate.ci_low, report.bound
                );
                return Ok(ExitCode::from(1));
            }
            Ok(ExitCode::SUCCESS)
        }

        Cmd::Chain {
            n,
            u,
            v,
            k,
            trials,
            seed,
            workers,
            output,
            format,
            trace,
        } => {
            let word = UnimodalWord::parse(&u, &v)?;
            let capacity = word.chain_capacity(n);
            if capacity == 0 {
                return Err(Error::InvalidParameter(format!(
                    "combined length {} needs degree at least {}, got {n}",
                    word.ell(),
                    2 * word.ell()
                )));
            }
            let k = k.unwrap_or(capacity);
            let seed = resolve_seed(seed);
            let workers = resolve_workers(workers)?;
            let report = run_event_chain_experiment(n, &word, k, trials, seed, workers)?;
            let pairs = config_pairs(
                &[
                    ("n", n.to_string()),
                    ("u", u.clone()),
                    ("v", v.clone()),
                    ("k", k.to_string()),
                    ("trials", trials.to_string()),
                    ("seed", seed.to_string()),
                ],
                workers,
                format,
            );
            let echo = echo_line("chain", &pairs);
            println!("{echo}");
            println!("  ell={} capacity={}", report.ell, capacity);
            println!(
                "  {:>4} {:>12} {:>10} {:>12} {:>12} {:>12} {:>12}",
                "step", "conditioning", "held", "p_hat", "ci_low", "ci_high", "bound"
            );
            for s in &report.steps {
                println!(
                    "  {:>4} {:>12} {:>10} {:>12.6} {:>12.6} {:>12.6} {:>12.6}",
                    s.index, s.conditioning_trials, s.held, s.p_hat, s.ci_low, s.ci_high, s.bound
                );
            }
            println!("  full chain: {}", fmt_estimate(&report.full_chain));
            println!("  product bound = {}", report.product_bound);
            if let Some(sat) = report.satisfaction {
                println!("  full-capacity bound = {sat}");
            }
            println!("  wall time: {}", fmt_wall(report.full_chain.wall_time));
            if let Some(trace_path) = &trace {
                let traced = trials.min(TRACE_CAP);
                let runs = trace_event_chains(n, &word, k, traced, seed)?;
                let mut lines = Vec::new();
                for (t, run) in runs.iter().enumerate() {
                    lines.extend(chain_trace_lines(t as u64, run));
                }
                std::fs::write(trace_path, lines.join("\n") + "\n")?;
                println!(
                    "  wrote trace of {traced} chains to {}",
                    trace_path.display()
                );
            }
            write_output(
                &output,
                format,
                &echo,
                config_json("chain", &pairs),
                &chain_rows(&report),
                serde_json::json!({ "report": report }),
            )?;
            let violations = report.violating_steps(100);
            let mut violated = !violations.is_empty();
            if violated {
                eprintln!("conditional bound exceeded at steps {violations:?}");
            }
            if report.full_chain.ci_low > report.product_bound {
                eprintln!(
                    "full-chain bound violated: Wilson lower bound {} exceeds {}",
                    report.full_chain.ci_low, report.product_bound
                );
                violated = true;
            }
            if violated {
                return Ok(ExitCode::from(1));
            }
            Ok(ExitCode::SUCCESS)
        }

        Cmd::Orders {
            n,
            r,
            trials,
            seed,
            certify,
            workers,
            output,
            format,
        } => {
            let r = r.unwrap_or_else(|| default_order_growth_r(n));
            let seed = resolve_seed(seed);
            let workers = resolve_workers(workers)?;
            let report = order_growth_experiment(n, r, trials, seed, workers, certify)?;
            let pairs = config_pairs(
                &[
                    ("n", n.to_string()),
                    ("r", r.to_string()),
                    ("trials", trials.to_string()),
                    ("seed", seed.to_string()),
                    ("certify", certify.to_string()),
                ],
                workers,
                format,
            );
            let echo = echo_line("orders", &pairs);
            println!("{echo}");
            println!(
                "  {} positive words shorter than r={}; collision means two evaluate equal",
                report.word_count, report.r
            );
            println!("  collisions: {}", fmt_estimate(&report.collision_estimate));
            println!("  union bound = {}", report.bound);
            println!(
                "  exact-order certification: {}/{} collision-free trials confirm order >= {}",
                report.certified_confirmed, report.certified_checked, report.word_count
            );
            println!(
                "  wall time: {}",
                fmt_wall(report.collision_estimate.wall_time)
            );
            write_output(
                &output,
                format,
                &echo,
                config_json("orders", &pairs),
                &orders_rows(&report),
                serde_json::json!({ "report": report }),
            )?;
            let e = &report.collision_estimate;
            if e.p_hat > report.bound + 3.0 * e.stderr() {
                eprintln!(
                    "collision bound violated: p_hat {} exceeds {} by more than 3 stderr",
                    e.p_hat, report.bound
                );
                return Ok(ExitCode::from(1));
            }
            if report.certified_confirmed < report.certified_checked {
                eprintln!(
                    "order certification failed on {} of {} checked trials",
                    report.certified_checked - report.certified_confirmed,
                    report.certified_checked
                );
                return Ok(ExitCode::from(1));
            }
            Ok(ExitCode::SUCCESS)
        }

        Cmd::Exact {
            n,
            allow_large,
            series_order,
            workers,
            output,
            format,
        } => {
            let workers = resolve_workers(workers)?;
            let start = Instant::now();
            let report = exact_generation_probability(n, allow_large, workers)?;
            let pairs = config_pairs(
                &[
                    ("n", n.to_string()),
                    ("allow_large", allow_large.to_string()),
                    ("series_order", series_order.to_string()),
                ],
                workers,
                format,
            );
            let echo = echo_line("exact", &pairs);
            println!("{echo}");
            println!(
                "  exact p(contains alternating) = {} = {}",
                report.probability.fraction_string(),
                report.probability.decimal_string()
            );
            println!("  verdicts: {}", histogram_line(&report.histogram));
            match series_value(n, series_order) {
                Ok(s) => println!(
                    "  series(order {series_order}) = {s}  deviation = {}",
                    report.probability.to_f64() - s
                ),
                Err(_) => println!("  series undefined at degree {n}"),
            }
            println!("  wall time: {}", fmt_wall(Some(start.elapsed().as_secs_f64())));
            let json_body = serde_json::json!({
                "report": report,
                "series": series_value(n, series_order).ok(),
                "series_order": series_order,
            });
            write_output(
                &output,
                format,
                &echo,
                config_json("exact", &pairs),
                &exact_generation_rows(&report, series_order),
                json_body,
            )?;
            Ok(ExitCode::SUCCESS)
        }

        Cmd::Series { n, order } => {
            let value = series_value(n, order)?;
            println!("symgen series n={n} order={order}");
            for j in 0..=order {
                println!("  order {j}: {}", series_value(n, j)?);
            }
            println!("series(n={n}, order={order}) = {value}");
            Ok(ExitCode::SUCCESS)
        }
    }
}
