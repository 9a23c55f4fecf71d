use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use outlierfreq_cli::commands::{self, IngestOptions};
use outlierfreq_cli::config::{parse_grid, SweepSettings};
use outlierfreq_cli::manifest::RunManifest;
use outlierfreq_cli::{CliError, Result};
use outlierfreq_core::{CrossoverSearch, DistributionSpec, OutlierQuery, SConvention};

#[derive(Parser)]
#[command(
    name = "outlierfreq",
    version,
    about = "Monte Carlo outlier frequencies for heavy-tailed samples"
)]
struct Cli {
    /// Worker threads (defaults to all cores). Results do not depend on it.
    #[arg(long, global = true, env = "OUTLIERFREQ_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// n = 3 outlier probabilities over alpha in {1, 1.25, 1.5, 1.75, 2}.
    Tables {
        #[arg(short, long, default_value_t = 3.0)]
        k: f64,
        #[arg(short = 'M', long, default_value_t = 1_000_000)]
        replications: usize,
        #[arg(long)]
        seed: u64,
        /// Allow any k; no reference values are shown.
        #[arg(long)]
        free: bool,
        #[arg(long)]
        json: bool,
    },
    /// Outlier probability curves over a grid of sample sizes.
    Sweep(SweepArgs),
    /// Limit moments of the self-normalized sum against their closed forms.
    Moments {
        /// Stability indices in (1, 2], comma separated.
        #[arg(long, value_delimiter = ',', default_value = "1.25,1.5,1.75,2")]
        alpha: Vec<f64>,
        #[arg(short, long, default_value_t = 10_000)]
        n: usize,
        #[arg(short = 'M', long, default_value_t = 10_000)]
        replications: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Outlier statistics of a return series file.
    Ingest {
        path: PathBuf,
        #[arg(short, long, default_value_t = 3.0)]
        k: f64,
        #[arg(long)]
        centered: bool,
        #[arg(long, default_value_t = SConvention::SqrtBiased)]
        convention: SConvention,
        /// Also report the randomly paired differences of the series.
        #[arg(long)]
        symmetrize: bool,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        json: bool,
    },
    /// Smallest n where law A's outlier probability drops below law B's.
    Crossover {
        #[arg(long)]
        a: DistributionSpec,
        #[arg(long)]
        b: DistributionSpec,
        #[arg(short, long, default_value_t = 3.0)]
        k: f64,
        #[arg(long)]
        n_lo: usize,
        #[arg(long)]
        n_hi: usize,
        #[arg(long, default_value_t = 100)]
        step: usize,
        #[arg(short = 'M', long, default_value_t = 100_000)]
        replications: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Writes one simulated sample as a single-column file.
    Sample {
        #[arg(long)]
        dist: DistributionSpec,
        #[arg(short, long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        /// Defaults to n, matching the sweep stream of that sample size.
        #[arg(long)]
        cell: Option<u64>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Reruns a manifest and checks every row matches.
    Replay { manifest: PathBuf },
}

#[derive(Args)]
struct SweepArgs {
    /// Experiment file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    dist: Option<DistributionSpec>,
    #[arg(long)]
    compare: Option<DistributionSpec>,
    /// Comma separated sample sizes.
    #[arg(long)]
    n_grid: Option<String>,
    #[arg(long)]
    n_start: Option<usize>,
    #[arg(long)]
    n_stop: Option<usize>,
    #[arg(long)]
    n_step: Option<usize>,
    #[arg(short, long)]
    k: Option<f64>,
    #[arg(short = 'M', long)]
    replications: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    centered: bool,
    #[arg(long)]
    convention: Option<SConvention>,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    json: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
    #[arg(long)]
    manifest: Option<PathBuf>,
}

impl SweepArgs {
    fn settings(self) -> Result<SweepSettings> {
        let base = match &self.config {
            Some(p) => SweepSettings::from_file(p)?,
            None => SweepSettings::default(),
        };
        Ok(base.overlay(SweepSettings {
            dist: self.dist,
            compare: self.compare,
            n_grid: self
                .n_grid
                .map(|g| parse_grid(&g).map_err(|e| CliError::Config(format!("--n-grid: {e}"))))
                .transpose()?,
            n_start: self.n_start,
            n_stop: self.n_stop,
            n_step: self.n_step,
            k: self.k,
            replications: self.replications,
            seed: self.seed,
            centered: self.centered.then_some(true),
            convention: self.convention,
            csv: self.csv,
            json: self.json,
            svg: self.svg,
            manifest: self.manifest,
        }))
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("report serializes")
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Tables {
            k,
            replications,
            seed,
            free,
            json,
        } => {
            let report = commands::cmd_tables(k, replications, seed, free)?;
            if json {
                println!("{}", to_json(&report));
            } else {
                print!("{}", report.render());
            }
        }
        Command::Sweep(args) => {
            let settings = args.settings()?;
            let out = commands::cmd_sweep(&settings)?;
            if let Some(csv) = commands::write_sweep_outputs(&out, &settings)? {
                print!("{csv}");
            }
        }
        Command::Moments {
            alpha,
            n,
            replications,
            seed,
            json,
        } => {
            let reports = commands::cmd_moments(&alpha, n, replications, seed)?;
            if json {
                println!("{}", to_json(&reports));
            } else {
                print!("{}", commands::render_moments(&reports));
            }
        }
        Command::Ingest {
            path,
            k,
            centered,
            convention,
            symmetrize,
            seed,
            json,
        } => {
            let opts = IngestOptions {
                query: OutlierQuery::new(k)
                    .centered(centered)
                    .with_convention(convention),
                symmetrize,
                seed,
            };
            let report = commands::cmd_ingest(&path, &opts)?;
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            if json {
                println!("{}", to_json(&report));
            } else {
                print!("{}", commands::render_ingest(&report));
            }
        }
        Command::Crossover {
            a,
            b,
            k,
            n_lo,
            n_hi,
            step,
            replications,
            seed,
        } => {
            let search =
                CrossoverSearch::new(a, b, k, n_lo, n_hi, replications, seed).with_step(step);
            println!("{}", to_json(&commands::cmd_crossover(&search)?));
        }
        Command::Sample {
            dist,
            n,
            seed,
            cell,
            output,
        } => {
            let text = commands::cmd_sample(&dist, n, seed, cell.unwrap_or(n as u64))?;
            match output {
                Some(p) => std::fs::write(&p, text).map_err(|e| CliError::io(&p, e))?,
                None => print!("{text}"),
            }
        }
        Command::Replay { manifest } => {
            let rows = RunManifest::read(&manifest)?.verify()?;
            println!("{rows} rows reproduced exactly");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: cannot configure {threads} threads: {e}");
            return ExitCode::from(outlierfreq_cli::exit::CONFIG as u8);
        }
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
