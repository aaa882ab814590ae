use std::io;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use subrepair::eval::metrics_table;
use subrepair::pipeline::{cmd_bench, cmd_detect, cmd_repair, summary_line, write_bench_csv, BenchConfig};
use subrepair::{Algorithm, Error, PipelineOptions, RunConfig, Strategy};

#[derive(Parser)]
#[command(name = "subrepair", version, about = "Constraint-driven subset repair")]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true, env = "SUBREPAIR_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the conflict graph and report detection statistics.
    Detect(InputArgs),
    /// Compute a removal set, optionally scoring it against labels.
    Repair {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        tuning: TuningArgs,
        #[arg(long, default_value = "ppis")]
        algorithm: Algorithm,
    },
    /// Time both algorithms on generated data with injected errors.
    Bench {
        /// Comma-separated row counts.
        #[arg(long, value_delimiter = ',', default_value = "500,1000,2000")]
        rows: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "6")]
        cols: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "0.05")]
        rates: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "ppis,mico")]
        algorithm: Vec<Algorithm>,
        /// Distinct key values per column; 0 means rows / 10.
        #[arg(long, default_value_t = 0)]
        domain: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        tuning: TuningArgs,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct InputArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    rules: Option<PathBuf>,
    /// `row_id,label` file.
    #[arg(long)]
    labels: Option<PathBuf>,
    /// Label column inside the data file.
    #[arg(long)]
    label_col: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_delimiter = ',')]
    exclude_cols: Vec<String>,
    #[arg(long, default_value = "")]
    missing_token: String,
}

#[derive(Args)]
struct TuningArgs {
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    #[arg(long, default_value_t = 1e-6)]
    epsilon: f64,
    #[arg(long, default_value_t = 10_000)]
    time_limit_ms: u64,
}

impl TuningArgs {
    fn options(&self, algorithm: Algorithm) -> PipelineOptions {
        PipelineOptions {
            algorithm,
            k: self.k,
            alpha: self.alpha,
            epsilon: self.epsilon,
            time_limit: Duration::from_millis(self.time_limit_ms),
            parallel: true,
        }
    }
}

impl InputArgs {
    fn config(self, options: PipelineOptions) -> RunConfig {
        RunConfig {
            data_path: self.data,
            rules_path: self.rules,
            labels_path: self.labels,
            label_col: self.label_col,
            options,
            output_dir: self.out,
            seed: self.seed,
            exclude_cols: self.exclude_cols,
            missing_token: self.missing_token,
        }
    }
}

fn run(command: Command) -> subrepair::Result<()> {
    match command {
        Command::Detect(input) => {
            let config = input.config(PipelineOptions::default());
            let run = cmd_detect(&config)?;
            let r = &run.report;
            println!(
                "rows {}  edges {}  conflicting {}  components {} ({} cliques)  pairs checked {}  {:.1} ms",
                r.stats.rows,
                r.stats.edges,
                r.stats.conflicting_rows,
                r.decomposition.components,
                r.decomposition.cliques,
                r.stats.pairs_checked,
                r.runtime_ms
            );
        }
        Command::Repair {
            input,
            tuning,
            algorithm,
        } => {
            let config = input.config(tuning.options(algorithm));
            config.options.validate()?;
            let run = cmd_repair(&config)?;
            for t in &run.repaired.plan.per_component {
                if t.strategy == Strategy::MicoFallback {
                    eprintln!(
                        "component {} ({} rows) fell back to PPIS",
                        t.component_id, t.size
                    );
                }
            }
            println!("{}", summary_line(&run.repaired));
            if let Some(m) = &run.metrics {
                print!("{}", metrics_table([(algorithm.to_string().as_str(), m)]));
            }
        }
        Command::Bench {
            rows,
            cols,
            rates,
            algorithm,
            domain,
            seed,
            tuning,
            out,
        } => {
            let options = tuning.options(Algorithm::Ppis);
            options.validate()?;
            let config = BenchConfig {
                rows,
                cols,
                rates,
                algorithms: algorithm,
                domain,
                seed,
                options,
            };
            let results = cmd_bench(&config)?;
            match out {
                Some(path) => {
                    let file = std::fs::File::create(&path).map_err(|e| Error::Io {
                        path: path.clone(),
                        source: e,
                    })?;
                    write_bench_csv(&results, file)?;
                }
                None => write_bench_csv(&results, io::stdout().lock())?,
            }
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
            eprintln!("error: cannot size thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_input_error() { 2 } else { 3 })
        }
    }
}
