use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nsf_core::expansion::expand;
use nsf_lab::scenarios;
use nsf_lab::{ScenarioConfig, ScenarioKind};

#[derive(Parser)]
#[command(
    name = "nsf-lab",
    version,
    about = "Forced Navier-Stokes scenario runner"
)]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, env = "NSF_LAB_THREADS", global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario config.
    Run {
        config: PathBuf,
        /// Output directory; overrides `output_dir` in the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the known scenarios.
    ListScenarios,
    /// Parse and validate a config without running it.
    Validate { config: PathBuf },
    /// Print the H/W/Z term lists of the order-N expansion.
    DumpTerms {
        #[arg(long = "N", short = 'N')]
        n: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
        {
            eprintln!("error: cannot set up thread pool: {e}");
            return ExitCode::from(1);
        }
    }
    match cli.command {
        Command::ListScenarios => {
            for k in ScenarioKind::ALL {
                println!("{:<24} {}", k.name(), k.description());
            }
            ExitCode::SUCCESS
        }
        Command::Validate { config } => match ScenarioConfig::load(&config) {
            Ok((cfg, _)) => {
                println!("{}: ok ({})", config.display(), cfg.scenario.name());
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(1)
            }
        },
        Command::DumpTerms { n } => match expand(n) {
            Ok(d) => {
                print!("{}", d.dump());
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(1)
            }
        },
        Command::Run { config, out } => {
            let (cfg, bytes) = match ScenarioConfig::load(&config) {
                Ok(x) => x,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(1);
                }
            };
            let dir = out.unwrap_or_else(|| cfg.output_dir.clone());
            match scenarios::run(&cfg, &bytes, &dir) {
                Ok(r) => {
                    println!(
                        "{}: {:?} in {:.1}s -> {}",
                        cfg.scenario.name(),
                        r.manifest.status,
                        r.manifest.wall_time_s,
                        dir.display()
                    );
                    ExitCode::from(r.manifest.status.exit_code() as u8)
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                }
            }
        }
    }
}
