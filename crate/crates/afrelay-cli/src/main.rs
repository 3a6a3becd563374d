use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use afrelay::montecarlo::run_sweep;
use afrelay_cli::config::{parse_config, ConfigError, Experiment, SnrGrid};
use afrelay_cli::validate::Fault;
use afrelay_cli::{bussgang, figures, report, validate};
use clap::{Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "afrelay", version, about = "Dual-hop AF relaying with nonlinear amplifiers: sweeps, figure data, validation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Analytic and Monte Carlo metrics over the config's SNR grid.
    Sweep {
        config: PathBuf,
        /// Write CSV here instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Worker threads; overrides the config, never changes the numbers.
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Curves of one published figure from the shipped defaults table.
    Figure {
        /// Figure number, 3 to 10.
        id: u32,
        /// Override a shared parameter, e.g. `--set samples=1000000`.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Cross-engine checks; exit status 3 if any fails.
    Validate {
        config: PathBuf,
        #[arg(long)]
        workers: Option<usize>,
        /// Corrupt the model on purpose to exercise the failure path.
        #[arg(long, value_enum, hide = true)]
        inject_fault: Option<Fault>,
    },
    /// δ, σ_τ², ζ and the capacity ceiling against input back-off.
    Bussgang {
        /// Config naming a nonlinear `hpa`; its `ibo_db` is swept.
        config: PathBuf,
        /// Back-off grid in dB, list syntax `a,b,c` or `start:step:stop`.
        #[arg(long, default_value = "0:1:20")]
        ibo: String,
        /// SNR at which ζ is evaluated; defaults to the config's first point.
        #[arg(long)]
        snr_db: Option<f64>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

enum Failure {
    Config(String),
    Numeric(String),
    Validation,
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.to_string())
    }
}

impl From<afrelay::Error> for Failure {
    fn from(e: afrelay::Error) -> Self {
        Failure::Numeric(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Config(format!("output: {e}"))
    }
}

fn sink(path: &Option<PathBuf>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Failure::Config(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn load(path: &PathBuf, workers: Option<usize>) -> Result<Experiment, Failure> {
    let mut exp = parse_config(path)?;
    if let Some(w) = workers {
        if w == 0 {
            return Err(Failure::Config("--workers must be at least 1".into()));
        }
        exp.mc.workers = w;
    }
    Ok(exp)
}

fn ibo_grid(s: &str) -> Result<Vec<f64>, Failure> {
    let grid = if s.contains(':') {
        SnrGrid::Range(s.to_string())
    } else {
        let v = s
            .split(',')
            .map(|x| x.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| Failure::Config(format!("--ibo: cannot read {s:?}")))?;
        SnrGrid::List(v)
    };
    grid.points()
        .map_err(|e| Failure::Config(format!("--ibo: {}", e.to_string().replace("snr_db", "ibo"))))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Sweep { config, output, workers } => {
            let exp = load(&config, workers)?;
            let pts = run_sweep(&exp.link, &exp.mc, &exp.snr_db, exp.gamma_th)?;
            report::write_sweep(sink(&output)?, &exp.config.echo(), exp.mc.seed, &pts)?;
        }
        Command::Figure { id, overrides, output, workers } => {
            let overrides = overrides
                .iter()
                .map(|s| figures::parse_override(s))
                .collect::<Result<Vec<_>, _>>()?;
            let (version, spec, mut curves) = figures::curves(id, &overrides)?;
            if let Some(w) = workers {
                if w == 0 {
                    return Err(Failure::Config("--workers must be at least 1".into()));
                }
                for (_, e) in &mut curves {
                    e.mc.workers = w;
                }
            }
            let results = figures::run(&curves)?;
            figures::write_figure(sink(&output)?, version, &spec, &curves, &results)?;
        }
        Command::Validate { config, workers, inject_fault } => {
            let exp = load(&config, workers)?;
            let checks = validate::run(&exp, inject_fault)?;
            let mut out = io::stdout().lock();
            if !validate::write_report(&mut out, &checks)? {
                return Err(Failure::Validation);
            }
        }
        Command::Bussgang { config, ibo, snr_db, output } => {
            let exp = load(&config, None)?;
            if exp.link.hpa.a_sat().is_none() {
                return Err(Failure::Config("bussgang needs a nonlinear `hpa` in the config".into()));
            }
            let grid = ibo_grid(&ibo)?;
            let snr = snr_db.unwrap_or(exp.snr_db[0]);
            let rows = bussgang::rows(&exp, &grid, snr)?;
            bussgang::write_table(sink(&output)?, &exp, snr, &rows)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Numeric(m)) => {
            eprintln!("numerical failure: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Validation) => {
            eprintln!("validation failed");
            ExitCode::from(3)
        }
    }
}
