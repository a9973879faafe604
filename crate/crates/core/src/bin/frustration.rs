use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use frustration::config::{OutputFormat, PartialConfig, ReturnsMode, RunConfig, SectorSource};
use frustration::demo::{emit_table1_demo, table1_matrix};
use frustration::pipeline::{ingest_check, run_pipeline, summarize_run};
use frustration::Result;

#[derive(Parser)]
#[command(name = "frustration", version, about = "Hierarchy of frustration over windowed sector correlations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load, align and window the inputs, then print a summary.
    IngestCheck(RunArgs),
    /// Run the full analysis and write all artifacts.
    Analyze(RunArgs),
    /// Worked example on the bundled 1987 correlation table.
    DemoTable1 {
        /// Half of 1987 (1 or 2).
        #[arg(long, default_value_t = 2)]
        half: u8,
        #[arg(long)]
        json: bool,
    },
    /// Summarize an output directory written by `analyze`.
    Report {
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Input series as ID=path, one per sector.
    #[arg(long, num_args = 1.., value_name = "ID=PATH")]
    sectors: Vec<SectorSource>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    min_obs: Option<usize>,
    #[arg(long)]
    zero_tol: Option<f64>,
    #[arg(long)]
    eps_frac: Option<f64>,
    #[arg(long)]
    pick_frac: Option<f64>,
    #[arg(long, value_name = "levels|log")]
    returns: Option<ReturnsMode>,
    /// Fill gaps of up to 5 days from the previous observation.
    #[arg(long)]
    forward_fill: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_name = "csv|json|both")]
    format: Option<OutputFormat>,
}

impl RunArgs {
    fn resolve(self) -> Result<RunConfig> {
        let base = match &self.config {
            Some(path) => PartialConfig::load(path)?,
            None => PartialConfig::default(),
        };
        let cli = PartialConfig {
            sectors: self.sectors,
            min_obs: self.min_obs,
            zero_tol: self.zero_tol,
            eps_frac: self.eps_frac,
            pick_frac: self.pick_frac,
            returns: self.returns,
            forward_fill: self.forward_fill.then_some(true),
            out_dir: self.out,
            format: self.format,
        };
        base.merge(cli).finish()
    }
}

fn report_skipped(skipped: &[frustration::ingest::SkippedWindow]) {
    for s in skipped {
        eprintln!("{}", serde_json::to_string(s).expect("serializable"));
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::IngestCheck(args) => {
            let cfg = args.resolve()?;
            let summary = ingest_check(&cfg)?;
            report_skipped(&summary.skipped_windows);
            println!("sectors: {}", summary.sectors.join(","));
            println!("rows: {} ({} .. {})", summary.rows, summary.first_date, summary.last_date);
            for (w, n) in &summary.windows {
                println!("window {w}: {n} rows");
            }
        }
        Command::Analyze(args) => {
            let cfg = args.resolve()?;
            let manifest = run_pipeline(&cfg)?;
            report_skipped(&manifest.skipped_windows);
            for note in &manifest.notes {
                eprintln!("note: {note}");
            }
            for (stage, d) in &manifest.timings {
                eprintln!("timing {stage}: {:.3}s", d.as_secs_f64());
            }
            println!(
                "wrote {} artifacts for {} windows to {}",
                manifest.artifacts.len(),
                manifest.windows.len(),
                cfg.out_dir.display()
            );
        }
        Command::DemoTable1 { half, json } => {
            let demo = emit_table1_demo(&table1_matrix(half)?)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&demo).expect("serializable"));
            } else {
                print!("{}", demo.render());
            }
        }
        Command::Report { out } => print!("{}", summarize_run(&out)?),
    }
    Ok(())
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

