//! Batch front-end for the wRO-PUF simulator.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use wropuf::report::{render_report, ReportFormat};
use wropuf::scenario::{emit_fig4, ingest_corpus, run_scenario, run_sweep};
use wropuf::{Error, Scenario};

#[derive(Parser)]
#[command(name = "wropuf", version, about = "waveform RO-PUF simulator and evaluator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ScenarioArgs {
    /// Scenario config file (TOML).
    config: PathBuf,
    /// Override the scenario seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; defaults to wropuf-out/<scenario-name>.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a scenario and write report, histograms, and corpus.
    Simulate {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Report format.
        #[arg(long, default_value = "kv", value_parser = parse_format)]
        format: ReportFormat,
    },
    /// Compute metrics from a measured response corpus.
    Ingest {
        /// Corpus file in the response-corpus text format.
        corpus: PathBuf,
        /// Report format.
        #[arg(long, default_value = "kv", value_parser = parse_format)]
        format: ReportFormat,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Run the temperature sweep of a sweep scenario.
    Sweep {
        #[command(flatten)]
        scenario: ScenarioArgs,
    },
    /// Emit ideal beat patterns for a list of period ratios.
    Fig4 {
        /// Comma-separated period ratios t1/t2, e.g. 1.2,1.1.
        #[arg(long, value_delimiter = ',', required = true)]
        ratios: Vec<f64>,
        /// Pattern length in bits.
        #[arg(long, default_value_t = 32)]
        len: usize,
        /// Write fig4.csv here instead of stdout.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

fn parse_format(s: &str) -> Result<ReportFormat, String> {
    ReportFormat::parse(s).ok_or_else(|| format!("unknown format {s:?}, expected csv or kv"))
}

fn load_scenario(args: &ScenarioArgs) -> Result<(Scenario, PathBuf), Error> {
    let mut scenario = Scenario::from_path(&args.config)?;
    if let Some(seed) = args.seed {
        scenario.seed = seed;
    }
    let out_dir = args
        .out_dir
        .clone()
        .unwrap_or_else(|| PathBuf::from("wropuf-out").join(&scenario.name));
    Ok((scenario, out_dir))
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Simulate { scenario, format } => {
            let (scenario, out_dir) = load_scenario(&scenario)?;
            let (_, files) = run_scenario(&scenario, &out_dir, format)?;
            for f in files {
                println!("wrote {}", f.display());
            }
            Ok(())
        }
        Command::Ingest { corpus, format, out_dir } => {
            let (report, warnings) = ingest_corpus(&corpus)?;
            for w in warnings {
                eprintln!("warning: {w}");
            }
            let name = corpus
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "corpus".into());
            let text = render_report(&name, &report, format);
            match out_dir {
                Some(dir) => {
                    std::fs::create_dir_all(&dir)?;
                    let path = dir.join(format.file_name());
                    std::fs::write(&path, text)?;
                    println!("wrote {}", path.display());
                }
                None => print!("{text}"),
            }
            Ok(())
        }
        Command::Sweep { scenario } => {
            let (scenario, out_dir) = load_scenario(&scenario)?;
            let files = run_sweep(&scenario, &out_dir)?;
            for f in files {
                println!("wrote {}", f.display());
            }
            Ok(())
        }
        Command::Fig4 { ratios, len, out_dir } => {
            let csv = emit_fig4(&ratios, len)?;
            match out_dir {
                Some(dir) => {
                    std::fs::create_dir_all(&dir)?;
                    let path = dir.join("fig4.csv");
                    std::fs::write(&path, csv)?;
                    println!("wrote {}", path.display());
                }
                None => print!("{csv}"),
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
