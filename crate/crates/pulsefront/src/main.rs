use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use pulsefront::{experiments, report_passes, validate_media, ExperimentConfig, ExperimentKind};

#[derive(Parser)]
#[command(name = "pulsefront", version, about = "Pulsating fronts in slowly oscillating periodic media")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment of a config; exits 0 iff every row and check passes
    Run {
        config: PathBuf,
        /// Override the config's experiment
        #[arg(long)]
        experiment: Option<ExperimentKind>,
        /// Output directory (default: the config's output.dir)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Validate the media of a config without running anything
    Validate { config: PathBuf },
}

fn run(cli: Cli) -> Result<bool, pulsefront::Error> {
    match cli.command {
        Command::Run { config, experiment, out, jobs } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(e) = experiment {
                cfg.experiment = e;
            }
            if let Some(j) = jobs {
                cfg.jobs = j.max(1);
            }
            let dir = out.unwrap_or_else(|| cfg.output.dir.clone());
            let table = experiments::run(&cfg)?;
            for (i, r) in table.rows.iter().enumerate() {
                let tag = if r.pass { "PASS" } else { "FAIL" };
                let cells: Vec<String> =
                    table.columns.iter().zip(&r.cells).map(|(c, v)| format!("{c}={}", v.as_text())).collect();
                println!("{tag} row {i}: {}", cells.join(" "));
                if let Some(e) = &r.error {
                    println!("     error: {e}");
                }
            }
            for c in &table.checks {
                println!("{} check {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            for p in table.write(&dir)? {
                eprintln!("wrote {}", p.display());
            }
            Ok(table.passed())
        }
        Command::Validate { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            let mut ok = true;
            for (name, r) in validate_media(&cfg)? {
                let pass = report_passes(&r);
                ok &= pass;
                println!(
                    "{} {name}: A1={} A2={} A3={} A4={} gamma0={:.6} delta0={:.6} mean_reaction=[{:.6}, {:.6}]",
                    if pass { "PASS" } else { "FAIL" },
                    r.passed_a1,
                    r.passed_a2,
                    r.passed_a3,
                    r.passed_a4,
                    r.estimated_gamma0,
                    r.estimated_delta0,
                    r.mean_reaction_range.0,
                    r.mean_reaction_range.1,
                );
            }
            Ok(ok)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
