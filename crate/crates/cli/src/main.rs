mod replay;
mod simulate;

use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use pareto_elicit::aggregation::AggregationConfig;
use pareto_elicit::fixtures::Dataset;
use pareto_elicit::sim::lower_bound;
use pareto_elicit::Strategy;
use pareto_elicit_service::{router, SessionStore};

#[derive(Parser)]
#[command(name = "pareto-elicit", version, about = "Find Pareto-optimal objects from pairwise questions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run strategies against synthetic or fixed ground truths and compare
    /// how many questions they ask.
    Simulate(simulate::SimulateArgs),
    /// Run one strategy on a dataset and print every question it asks.
    Replay(replay::ReplayArgs),
    /// Print the lower bound on questions for n objects, c criteria and k
    /// Pareto-optimal objects.
    Bound {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        c: u64,
        #[arg(long)]
        k: u64,
    },
    /// Serve the session API and, optionally, a directory of static files.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: SocketAddr,
        /// Files served for every path outside the API, e.g. a built UI.
        #[arg(long)]
        static_dir: Option<PathBuf>,
        /// Save sessions here and reload them on start.
        #[arg(long)]
        state_dir: Option<PathBuf>,
    },
}

/// Where datasets named on the command line are looked up.
#[derive(Args, Clone)]
struct DataArgs {
    /// Directory searched for `<name>.json` when a dataset is not a path.
    #[arg(long, env = "PARETO_ELICIT_DATA")]
    data_dir: Option<PathBuf>,
}

impl DataArgs {
    /// A dataset by path, by `<name>.json` in the data directory, or by
    /// bundled fixture name, in that order.
    fn load(&self, name: &str) -> Result<Dataset, Failure> {
        let direct = Path::new(name);
        let path = if direct.is_file() {
            Some(direct.to_path_buf())
        } else {
            self.data_dir
                .as_ref()
                .map(|d| d.join(format!("{name}.json")))
                .filter(|p| p.is_file())
        };
        match path {
            Some(p) => {
                let text = std::fs::read_to_string(&p).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?;
                Dataset::parse(&text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))
            }
            None => Dataset::fixture(name).map_err(|e| Failure::Usage(e.to_string())),
        }
    }
}

#[derive(Args, Clone, Copy)]
struct AggregationArgs {
    /// Responses needed before a question is decided.
    #[arg(long, default_value_t = AggregationConfig::DEFAULT.k_min)]
    k_min: u32,
    /// Share of responses a preference needs to win.
    #[arg(long, default_value_t = AggregationConfig::DEFAULT.theta)]
    theta: f64,
}

impl AggregationArgs {
    fn config(self) -> Result<AggregationConfig, Failure> {
        AggregationConfig::new(self.k_min, self.theta).map_err(|e| Failure::Usage(e.to_string()))
    }
}

fn parse_strategy(s: &str) -> Result<Strategy, String> {
    s.parse::<Strategy>().map_err(|e| e.to_string())
}

/// Exit status 1 for failed runs and checks, 2 for bad input.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Failed(String),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Failed(format!("{e:#}"))
    }
}

fn serve(addr: SocketAddr, static_dir: Option<PathBuf>, state_dir: Option<PathBuf>) -> anyhow::Result<()> {
    use anyhow::Context;
    let store = match state_dir {
        Some(dir) => SessionStore::persistent(dir)?,
        None => SessionStore::in_memory(),
    };
    let loaded = store.len();
    let app = router(Arc::new(store), static_dir);
    let rt = tokio::runtime::Runtime::new()?;
    rt.block_on(async {
        let listener = tokio::net::TcpListener::bind(addr)
            .await
            .with_context(|| format!("cannot listen on {addr}"))?;
        eprintln!("listening on http://{} ({loaded} saved sessions)", listener.local_addr()?);
        axum::serve(listener, app).await?;
        Ok(())
    })
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Simulate(args) => simulate::run(args),
        Command::Replay(args) => replay::run(args),
        Command::Bound { n, c, k } => {
            if k > n {
                return Err(Failure::Usage(format!("k = {k} exceeds n = {n}")));
            }
            println!("{}", lower_bound(n, c, k));
            Ok(())
        }
        Command::Serve {
            addr,
            static_dir,
            state_dir,
        } => Ok(serve(addr, static_dir, state_dir)?),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Failed(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
