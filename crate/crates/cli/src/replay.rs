use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use anyhow::Context;
use clap::Args;
use pareto_elicit::dot::dominance_dot;
use pareto_elicit::fixtures::Dataset;
use pareto_elicit::selection::{run_framework, EntrySource, RunOptions, Transcript};
use pareto_elicit::sim::{TruthAnswers, VoteTableAnswers};
use pareto_elicit::{compute_partition, KnowledgeBase, ObjectId, Outcome, Strategy, Universe};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::{parse_strategy, AggregationArgs, DataArgs, Failure};

#[derive(Args)]
pub struct ReplayArgs {
    /// Dataset file, name in the data directory, or bundled fixture
    /// (movie-full, movie-story, fig3).
    dataset: String,
    #[arg(long, default_value = "frq", value_parser = parse_strategy)]
    strategy: Strategy,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Used to decide questions from vote datasets.
    #[command(flatten)]
    aggregation: AggregationArgs,
    /// Write the final dominance graph in Graphviz format here.
    #[arg(long)]
    dot: Option<PathBuf>,
    /// Write one JSON object per asked question here.
    #[arg(long)]
    transcript: Option<PathBuf>,
    #[command(flatten)]
    data: DataArgs,
}

#[derive(Serialize)]
struct TranscriptLine<'a> {
    i: usize,
    x: &'a str,
    y: &'a str,
    criterion: &'a str,
    outcome: Outcome,
    source: EntrySource,
    derived: Vec<String>,
    confirmed: usize,
    undetermined: usize,
    dominated: usize,
}

struct Row {
    outcome: String,
    source: EntrySource,
    derived: Vec<String>,
    sets: [Vec<ObjectId>; 3],
}

fn set(u: &Universe, ids: &[ObjectId]) -> String {
    let labels: Vec<&str> = ids.iter().map(|&o| u.object_label(o)).collect();
    format!("{{{}}}", labels.join(", "))
}

/// Groups derived entries under the asked question they follow from and
/// recomputes the partition after each asked question.
fn rows(u: &Universe, t: &Transcript) -> Vec<Row> {
    let mut kb = KnowledgeBase::new(t.objects, t.criteria);
    let mut out: Vec<Row> = Vec::new();
    for e in &t.entries {
        if e.source == EntrySource::Derived {
            if let Some(last) = out.last_mut() {
                last.derived.push(u.describe_outcome(e.question, e.outcome));
            }
            continue;
        }
        if e.source != EntrySource::Redundant {
            kb.record_outcome(e.question, e.outcome).expect("transcript replays");
        }
        let p = compute_partition(&kb);
        let mut outcome = u.describe_outcome(e.question, e.outcome);
        match e.source {
            EntrySource::Resolved => outcome.push_str(" (resolved)"),
            EntrySource::Redundant => outcome.push_str(" (known)"),
            _ => {}
        }
        out.push(Row {
            outcome,
            source: e.source,
            derived: Vec::new(),
            sets: [p.confirmed, p.unknown, p.dominated],
        });
    }
    out
}

pub fn run(args: ReplayArgs) -> Result<(), Failure> {
    let cfg = args.aggregation.config()?;
    let dataset = args.data.load(&args.dataset)?;
    let u = dataset.universe().clone();
    let (n, c) = (u.object_count(), u.criterion_count());
    let rng = ChaCha8Rng::seed_from_u64(args.seed);
    let opts = RunOptions {
        record_derived: true,
        ..RunOptions::default()
    };
    let transcript = match &dataset {
        Dataset::Truth(truth) => run_framework(n, c, args.strategy, &mut TruthAnswers::noiseless(truth), rng, opts)
            .map_err(|e| anyhow::anyhow!(e.to_string())),
        Dataset::Votes(u, table) => {
            run_framework(n, c, args.strategy, &mut VoteTableAnswers::new(u, table, cfg), rng, opts)
                .map_err(|e| anyhow::anyhow!(e.to_string()))
        }
    }
    .with_context(|| format!("{} on {}", args.strategy, args.dataset))?;

    let rows = rows(&u, &transcript);
    let mut table: Vec<[String; 6]> = vec![["i", "outcome", "derived", "O✓", "O?", "O×"].map(String::from)];
    for (i, r) in rows.iter().enumerate() {
        let derived = if r.derived.is_empty() { "-".to_string() } else { r.derived.join(", ") };
        table.push([
            (i + 1).to_string(),
            r.outcome.clone(),
            derived,
            set(&u, &r.sets[0]),
            set(&u, &r.sets[1]),
            set(&u, &r.sets[2]),
        ]);
    }
    let mut widths = [0usize; 6];
    for line in &table {
        for (w, cell) in widths.iter_mut().zip(line) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = std::io::stdout().lock();
    let mut print = || -> std::io::Result<()> {
        for line in &table {
            let mut text = format!("{:>w$}", line[0], w = widths[0]);
            for (cell, &w) in line.iter().zip(&widths).skip(1) {
                let pad = w - cell.chars().count();
                text.push_str("  ");
                text.push_str(cell);
                text.extend(std::iter::repeat_n(' ', pad));
            }
            writeln!(out, "{}", text.trim_end())?;
        }
        writeln!(out, "{} questions asked, {} facts derived", transcript.asked, transcript.derived)?;
        writeln!(out, "pareto-optimal: {}", set(&u, &transcript.partition.confirmed))
    };
    print().context("writing table")?;

    if let Some(path) = &args.dot {
        let kb = transcript.replay().context("replaying transcript")?;
        std::fs::write(path, dominance_dot(&u, &kb)).with_context(|| format!("writing {}", path.display()))?;
    }
    if let Some(path) = &args.transcript {
        let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
        let mut w = BufWriter::new(f);
        for (i, (e, r)) in transcript
            .entries
            .iter()
            .filter(|e| e.source != EntrySource::Derived)
            .zip(&rows)
            .enumerate()
        {
            let line = TranscriptLine {
                i: i + 1,
                x: u.object_label(e.question.x),
                y: u.object_label(e.question.y),
                criterion: u.criterion_label(e.question.c),
                outcome: e.outcome,
                source: r.source,
                derived: r.derived.clone(),
                confirmed: r.sets[0].len(),
                undetermined: r.sets[1].len(),
                dominated: r.sets[2].len(),
            };
            serde_json::to_writer(&mut w, &line).context("writing transcript")?;
            writeln!(w).context("writing transcript")?;
        }
        w.flush().context("writing transcript")?;
    }
    Ok(())
}
