use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use replaykit::config::ExperimentConfig;
use replaykit::detector::{detect_offline, DetectorParams};
use replaykit::harness::{analyze_run, read_signal, run_experiment, run_matrix};
use replaykit::Result;

#[derive(Parser)]
#[command(name = "replaykit", version, about = "Replay buffers for continual RL experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one config over consecutive seeds starting at its own seed.
    Matrix {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seeds: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the boundary detector over a signal file and print boundary indices.
    Detect {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        mf: f64,
        #[arg(long, default_value_t = 1e-6)]
        delta: f64,
    },
    /// Print the final composition, boundaries and returns of a run.
    Analyze {
        #[arg(long)]
        run: PathBuf,
    },
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Run { config, seed, out } => {
            let mut cfg = ExperimentConfig::from_file(&config)?;
            if let Some(seed) = seed {
                cfg.harness.seed = seed;
            }
            let dir = cfg.resolve_output_dir(out.as_deref());
            let summary = run_experiment(&cfg, &dir)?;
            println!("wrote {}", dir.display());
            println!("boundaries: {}", summary.boundaries.len());
            for (label, mean, std) in summary.final_returns {
                println!("task {label}: {mean:.2} ± {std:.2}");
            }
        }
        Command::Matrix { config, seeds, out } => {
            let cfg = ExperimentConfig::from_file(&config)?;
            let name = config
                .file_stem()
                .map_or_else(|| "config".to_string(), |s| s.to_string_lossy().into_owned());
            let dir = cfg.resolve_output_dir(out.as_deref());
            let seed_list: Vec<u64> = (0..seeds).map(|i| cfg.harness.seed.wrapping_add(i)).collect();
            let report = run_matrix(&[(name, cfg)], &seed_list, &dir)?;
            for row in &report.aggregates {
                println!("{} {} {:.4} ± {:.4} (n={})", row.config, row.metric, row.mean, row.std, row.runs);
            }
            for f in &report.failures {
                eprintln!("run {} seed {} failed: {}", f.config, f.seed, f.error);
            }
        }
        Command::Detect { input, n, k, mf, delta } => {
            let signal = read_signal(&input)?;
            let params = DetectorParams { n, k, m_f: mf, delta };
            for index in detect_offline(&signal, params)? {
                println!("{index}");
            }
        }
        Command::Analyze { run } => {
            print!("{}", analyze_run(&run)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
