use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use anyhow::Context;
use clap::Args;
use pareto_elicit::fixtures::Dataset;
use pareto_elicit::sim::{run_experiment, ExperimentConfig, ExperimentRow, RowFailure, TruthModel};
use pareto_elicit::Strategy;

use crate::{parse_strategy, AggregationArgs, DataArgs, Failure};

#[derive(Args)]
pub struct SimulateArgs {
    /// Object counts; one grid cell per n and criteria count.
    #[arg(long, value_delimiter = ',', default_value = "100")]
    n: Vec<usize>,
    /// Criteria counts.
    #[arg(long, value_delimiter = ',', default_value = "4")]
    criteria: Vec<usize>,
    /// Strategies to compare: bruteforce, frq, randomp, randomq, +cq-mo,
    /// -cq+mo, -cq-mo.
    #[arg(long, value_delimiter = ',', default_value = "frq,randomp,randomq", value_parser = parse_strategy)]
    strategies: Vec<Strategy>,
    /// Replicates per cell.
    #[arg(long, default_value_t = 30)]
    seeds: u64,
    /// First replicate seed.
    #[arg(long, default_value_t = 0)]
    base_seed: u64,
    /// Use this ground truth for every replicate instead of synthetic ones;
    /// `--n` and `--criteria` are then ignored.
    #[arg(long)]
    fixture: Option<String>,
    /// Probability that a simulated respondent answers at random.
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    /// Simulated respondents per question when noise is on.
    #[arg(long, default_value_t = 10)]
    votes: u32,
    #[command(flatten)]
    aggregation: AggregationArgs,
    /// Record wall-clock time per run in the CSV. Makes the output differ
    /// between runs.
    #[arg(long)]
    timing: bool,
    /// Write one CSV row per run here; `-` for standard output, in which case
    /// the summary goes to standard error.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    data: DataArgs,
}

#[derive(Default)]
struct Summary {
    runs: usize,
    asked_sum: u64,
    min: usize,
    max: usize,
    bound_sum: u64,
}

impl Summary {
    fn add(&mut self, row: &ExperimentRow) {
        if self.runs == 0 {
            self.min = row.questions_asked;
        }
        self.runs += 1;
        self.asked_sum += row.questions_asked as u64;
        self.min = self.min.min(row.questions_asked);
        self.max = self.max.max(row.questions_asked);
        self.bound_sum += row.lower_bound;
    }
}

fn brute_force_count(n: usize, criteria: usize) -> u64 {
    (criteria * n * n.saturating_sub(1) / 2) as u64
}

fn write_summary(out: &mut dyn Write, summaries: &BTreeMap<(usize, usize, usize), (String, Summary)>) -> io::Result<()> {
    writeln!(
        out,
        "{:>6} {:>3}  {:<12} {:>12} {:>9} {:>9} {:>8} {:>8}",
        "n", "|C|", "strategy", "mean asked", "min", "max", "/bound", "/brute"
    )?;
    for (&(n, c, _), (name, s)) in summaries {
        let mean = s.asked_sum as f64 / s.runs as f64;
        let bound = s.asked_sum as f64 / s.bound_sum.max(1) as f64;
        let brute = mean / brute_force_count(n, c).max(1) as f64;
        writeln!(
            out,
            "{n:>6} {c:>3}  {name:<12} {mean:>12.1} {:>9} {:>9} {bound:>8.3} {brute:>8.4}",
            s.min, s.max
        )?;
    }
    Ok(())
}

pub fn run(args: SimulateArgs) -> Result<(), Failure> {
    let aggregation = args.aggregation.config()?;
    if !(0.0..=1.0).contains(&args.noise) {
        return Err(Failure::Usage(format!("noise must be in [0, 1], got {}", args.noise)));
    }
    let truth = match &args.fixture {
        None => TruthModel::NormalScores,
        Some(name) => match args.data.load(name)? {
            Dataset::Truth(t) => TruthModel::Fixed(t),
            Dataset::Votes(..) => {
                return Err(Failure::Usage(format!(
                    "{name} holds votes, not a ground truth; use replay for vote datasets"
                )))
            }
        },
    };
    let grid = args
        .n
        .iter()
        .flat_map(|&n| args.criteria.iter().map(move |&c| (n, c)))
        .collect();
    let cfg = ExperimentConfig {
        grid,
        strategies: args.strategies.clone(),
        seeds: args.seeds,
        base_seed: args.base_seed,
        noise: args.noise,
        votes: args.votes,
        aggregation,
        timing: args.timing,
        truth,
    };

    let to_stdout = args.out.as_deref().is_some_and(|p| p.as_os_str() == "-");
    let mut csv = match &args.out {
        None => None,
        Some(_) if to_stdout => Some(csv::Writer::from_writer(Box::new(io::stdout()) as Box<dyn Write>)),
        Some(p) => {
            let f = File::create(p).with_context(|| format!("creating {}", p.display()))?;
            Some(csv::Writer::from_writer(Box::new(f) as Box<dyn Write>))
        }
    };

    let mut summaries: BTreeMap<(usize, usize, usize), (String, Summary)> = BTreeMap::new();
    let mut failures = Vec::new();
    let mut csv_error = None;
    run_experiment(&cfg, |result| {
        let row = match result {
            Ok(row) => row,
            Err(f) => {
                failures.push(f.to_string());
                match f {
                    RowFailure::OracleMismatch { row, .. } | RowFailure::BelowLowerBound { row } => row,
                    RowFailure::Run { .. } => return,
                }
            }
        };
        if let Some(w) = csv.as_mut() {
            if let Err(e) = w.serialize(row) {
                csv_error.get_or_insert(e);
            }
        }
        let rank = args.strategies.iter().position(|s| s.name() == row.strategy).unwrap_or(usize::MAX);
        summaries
            .entry((row.n, row.criteria, rank))
            .or_insert_with(|| (row.strategy.clone(), Summary::default()))
            .1
            .add(row);
    });
    if let Some(e) = csv_error {
        return Err(anyhow::Error::from(e).context("writing CSV").into());
    }
    if let Some(mut w) = csv {
        w.flush().context("writing CSV")?;
    }

    let summary = if to_stdout {
        write_summary(&mut io::stderr(), &summaries)
    } else {
        write_summary(&mut io::stdout(), &summaries)
    };
    summary.context("writing summary")?;

    if !failures.is_empty() {
        for f in &failures {
            eprintln!("{f}");
        }
        return Err(Failure::Failed(format!("{} of the runs failed verification", failures.len())));
    }
    Ok(())
}
