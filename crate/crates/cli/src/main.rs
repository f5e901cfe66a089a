use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use matdil::{
    builtin_fixtures, fixture, parse_config, run_all, summary, CliError, Report, RunOptions,
    Scenario,
};

#[derive(Parser)]
#[command(
    name = "matdil",
    version,
    about = "Verify matrix N-dilations of unital quantum channels"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenarios in a JSON config file.
    Run {
        config: PathBuf,
        #[command(flatten)]
        opts: RunArgs,
        /// Run independent scenarios concurrently.
        #[arg(long)]
        parallel: bool,
    },
    /// List or run the built-in fixtures.
    Fixtures {
        #[arg(long, conflicts_with = "run")]
        list: bool,
        #[arg(long, value_name = "NAME")]
        run: Option<String>,
        #[command(flatten)]
        opts: RunArgs,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, default_value_t = matdil::DEFAULT_SEED)]
    seed: u64,
    /// Override every residual tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Write the JSON report here.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn options(&self) -> Result<RunOptions, CliError> {
        if let Some(t) = self.tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err(CliError::config("--tol", "must be positive"));
            }
        }
        Ok(RunOptions {
            seed: self.seed,
            tolerance: self.tol,
        })
    }
}

fn execute(scenarios: &[Scenario], args: &RunArgs, parallel: bool) -> Result<bool, CliError> {
    let reports = run_all(scenarios, &args.options()?, parallel)?;
    for r in &reports {
        print!("{}", summary(r));
    }
    if let Some(path) = &args.out {
        write_reports(path, &reports)?;
    }
    Ok(reports.iter().all(|r| r.pass))
}

fn write_reports(path: &PathBuf, reports: &[Report]) -> Result<(), CliError> {
    let json = if reports.len() == 1 {
        serde_json::to_string_pretty(&reports[0])
    } else {
        serde_json::to_string_pretty(reports)
    }
    .expect("reports serialize");
    fs::write(path, json).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            config,
            opts,
            parallel,
        } => {
            let path = config.display().to_string();
            fs::read_to_string(&config)
                .map_err(|source| CliError::Io {
                    path: path.clone(),
                    source,
                })
                .and_then(|text| parse_config(&text, &path))
                .and_then(|scenarios| execute(&scenarios, &opts, parallel))
        }
        Command::Fixtures {
            list: _, run: None, ..
        } => {
            for s in builtin_fixtures() {
                println!("{:<22} N={}", s.name, s.steps);
            }
            return ExitCode::SUCCESS;
        }
        Command::Fixtures {
            run: Some(name),
            opts,
            ..
        } => match fixture(&name) {
            Some(s) => execute(&[s], &opts, false),
            None => Err(CliError::config(
                "--run",
                format!("unknown fixture `{name}`"),
            )),
        },
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
