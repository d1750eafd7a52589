use clap::{Args, Parser, Subcommand};
use eprsim_cli::{run, CliError, Experiment, Format, RunConfig};
use std::path::PathBuf;
use std::process::ExitCode;

/// Simulator for entangled-atom-pair experiments.
#[derive(Parser)]
#[command(name = "eprsim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Debug, Default)]
struct Overrides {
    /// JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Shots per setting; 0 evaluates analytically.
    #[arg(long)]
    shots: Option<u64>,
    /// Worker threads. Never affects results.
    #[arg(long, env = "EPRSIM_WORKERS")]
    workers: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment named in a config file.
    Run {
        /// Same as --config.
        path: Option<PathBuf>,
        #[command(flatten)]
        o: Overrides,
    },
    /// CHSH parameter S.
    Chsh(Overrides),
    /// Wigner inequality at three analysis angles.
    Wigner(Overrides),
    /// Two-interferometer path fringes and their visibility.
    Fringes(Overrides),
    /// Position-momentum EPR product from imaging.
    Epr(Overrides),
    /// GHZ correlators of the hyperentangled state.
    Ghz(Overrides),
    /// Distances of the composite gate unitaries from their ideals.
    GatesVerify(Overrides),
    /// Lower a .seq program to a schedule.
    Compile {
        file: Option<PathBuf>,
        #[command(flatten)]
        o: Overrides,
    },
    /// Check a .seq program against the echo rules.
    Lint {
        file: Option<PathBuf>,
        #[command(flatten)]
        o: Overrides,
    },
}

fn resolve(
    experiment: Option<Experiment>,
    o: &Overrides,
    seq: Option<PathBuf>,
) -> Result<RunConfig, CliError> {
    let mut cfg = match (&o.config, experiment) {
        (Some(path), want) => {
            let cfg = RunConfig::load(path)?;
            if let Some(want) = want {
                if cfg.experiment != want {
                    return Err(CliError::Config(format!(
                        "{} configures `{}`, not `{}`",
                        path.display(),
                        cfg.experiment.name(),
                        want.name()
                    )));
                }
            }
            cfg
        }
        (None, Some(e)) => RunConfig::new(e),
        (None, None) => return Err(CliError::Config("no config file given".into())),
    };
    if let Some(seed) = o.seed {
        cfg.seed = Some(seed);
    }
    if let Some(shots) = o.shots {
        cfg.shots = shots;
    }
    if let Some(dir) = &o.out {
        cfg.output.dir = dir.clone();
    }
    if let Some(format) = o.format {
        cfg.output.format = format;
    }
    if let Some(path) = seq {
        let mut params = match cfg.params.take() {
            serde_json::Value::Object(m) => m,
            _ => serde_json::Map::new(),
        };
        params.insert("source".into(), serde_json::json!(path));
        cfg.params = serde_json::Value::Object(params);
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (experiment, mut o, seq) = match cli.command {
        Command::Run { path, mut o } => {
            if path.is_some() && o.config.is_some() {
                eprintln!("error: give the config either as an argument or with --config");
                return ExitCode::from(2);
            }
            o.config = o.config.or(path);
            (None, o, None)
        }
        Command::Chsh(o) => (Some(Experiment::Chsh), o, None),
        Command::Wigner(o) => (Some(Experiment::Wigner), o, None),
        Command::Fringes(o) => (Some(Experiment::Fringes), o, None),
        Command::Epr(o) => (Some(Experiment::Epr), o, None),
        Command::Ghz(o) => (Some(Experiment::Ghz), o, None),
        Command::GatesVerify(o) => (Some(Experiment::GatesVerify), o, None),
        Command::Compile { file, o } => (Some(Experiment::Compile), o, file),
        Command::Lint { file, o } => (Some(Experiment::Lint), o, file),
    };
    let workers = o
        .workers
        .take()
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let result = resolve(experiment, &o, seq).and_then(|cfg| run(&cfg, workers));
    match result {
        Ok((report, written)) => {
            if let Some(listing) = &report.listing {
                println!("{listing}");
            }
            println!("{}", report.summary);
            for path in written {
                eprintln!("wrote {}", path.display());
            }
            match report.failure {
                Some(why) => {
                    eprintln!("error: {}", CliError::Physics(why));
                    ExitCode::from(3)
                }
                None => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
