use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process;

use clap::{Parser, Subcommand, ValueEnum};
use jlbound::embedding::BoundKind;
use jlbound::mc::{PointSet, DEFAULT_CHUNK_SIZE};
use jlbound_cli::commands::{
    self, CommandError, CommandResult, Figure, Output, SweepOverrides, EXIT_USAGE,
};

#[derive(Parser)]
#[command(
    name = "jlbound",
    version,
    about = "No-failure probability bounds for Gaussian random projections"
)]
struct Cli {
    /// Worker threads for parallel sweeps and simulations.
    #[arg(long, global = true, env = "JLBOUND_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Every bound for one (n, k, epsilon).
    Bounds {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        eps: f64,
        /// Print a CSV row instead of the labelled listing.
        #[arg(long)]
        csv: bool,
    },
    /// Tabulate one figure's data as CSV.
    Sweep {
        #[arg(value_enum)]
        figure: FigureArg,
        /// Grid for n: a comma list, linspace:a:b:count or logspace:a:b:count.
        #[arg(long)]
        n: Option<String>,
        #[arg(long)]
        k: Option<String>,
        #[arg(long)]
        eps: Option<String>,
        #[arg(long)]
        rho_sq: Option<String>,
        /// Write to this file instead of stdout.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Smallest k for which the chosen bound is positive.
    MinDim {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        eps: f64,
        #[arg(long, value_enum, default_value_t = BoundArg::Bivariate)]
        bound: BoundArg,
    },
    /// Project a point set and compare the no-failure frequency with the bounds.
    Simulate {
        /// Whitespace-separated coordinates, one point per line.
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_CHUNK_SIZE)]
        chunk_size: u64,
    },
    /// Probe the three-success inequality on random correlation structures.
    Conjecture {
        #[arg(long)]
        k: u64,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 50)]
        draws: usize,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FigureArg {
    SuccessProb,
    JointProb,
    EmbeddingDim,
    BoundDelta,
}

impl From<FigureArg> for Figure {
    fn from(f: FigureArg) -> Self {
        match f {
            FigureArg::SuccessProb => Figure::SuccessProb,
            FigureArg::JointProb => Figure::JointProb,
            FigureArg::EmbeddingDim => Figure::EmbeddingDim,
            FigureArg::BoundDelta => Figure::BoundDelta,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundArg {
    Marginal,
    Bivariate,
}

impl From<BoundArg> for BoundKind {
    fn from(b: BoundArg) -> Self {
        match b {
            BoundArg::Marginal => BoundKind::Marginal,
            BoundArg::Bivariate => BoundKind::Bivariate,
        }
    }
}

fn run(command: Command) -> CommandResult<Output> {
    match command {
        Command::Bounds { n, k, eps, csv } => commands::cmd_bounds(n, k, eps, csv),
        Command::Sweep {
            figure,
            n,
            k,
            eps,
            rho_sq,
            output,
        } => {
            let table = commands::cmd_sweep(figure.into(), &SweepOverrides { n, k, eps, rho_sq })?;
            let text = table.to_csv_string();
            match output {
                Some(path) => {
                    fs::write(&path, &text).map_err(|e| {
                        CommandError::Usage(format!("cannot write {}: {e}", path.display()))
                    })?;
                    Ok(Output {
                        text: format!("wrote {} rows to {}\n", table.rows.len(), path.display()),
                        exit_code: 0,
                    })
                }
                None => Ok(Output { text, exit_code: 0 }),
            }
        }
        Command::MinDim { n, eps, bound } => commands::cmd_min_dim(n, eps, bound.into()),
        Command::Simulate {
            dataset,
            k,
            eps,
            samples,
            seed,
            chunk_size,
        } => {
            let text = fs::read_to_string(&dataset).map_err(|e| {
                CommandError::Usage(format!("cannot read {}: {e}", dataset.display()))
            })?;
            let points = PointSet::parse(&text)?;
            commands::cmd_simulate(&points, k, eps, samples, seed, chunk_size)
        }
        Command::Conjecture {
            k,
            eps,
            draws,
            samples,
            seed,
        } => commands::cmd_conjecture(k, eps, draws, samples, seed),
    }
}

fn main() {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: cannot configure {threads} threads: {e}");
            process::exit(EXIT_USAGE);
        }
    }
    match run(cli.command) {
        Ok(out) => {
            let _ = io::stdout().write_all(out.text.as_bytes());
            process::exit(out.exit_code);
        }
        Err(e) => {
            eprintln!("error: {e}");
            process::exit(e.exit_code());
        }
    }
}
