use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use weakboost::datasets::{gen_henon, load_laser, make_supervised, normalize_minmax, Benchmark, HENON_NOISE_STD};
use weakboost::harness::report::{plot_curves, render_svg, summarize, write_plotdata, write_summary};
use weakboost::harness::{
    read_records, run_experiment_detailed, sweep, write_records, ExperimentConfig, Settings, SweepGrid,
};
use weakboost::numerics::Rng;
use weakboost::{Error, Result};

#[derive(Parser)]
#[command(name = "weakboost", version, about = "L2-Boost over weak echo state networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a benchmark as a supervised CSV (t, x_1.., y_1..).
    Generate {
        benchmark: Benchmark,
        /// Number of rows.
        #[arg(long)]
        length: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Scale every column to [0, 1].
        #[arg(long)]
        normalize: bool,
        #[arg(long, default_value_t = HENON_NOISE_STD)]
        noise_std: f64,
        /// Laser data file; the bundled Santa Fe set otherwise.
        #[arg(long)]
        laser_file: Option<PathBuf>,
    },
    /// Run one experiment and print its result row.
    Run {
        #[arg(long)]
        config: Option<PathBuf>,
        /// key=value, applied after the config file.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        /// Write the CSV row here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the trained model as JSON.
        #[arg(long)]
        dump_model: Option<PathBuf>,
    },
    /// Run a grid of experiments.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        #[arg(long)]
        out: PathBuf,
        /// Run cells one after another.
        #[arg(long)]
        serial: bool,
    },
    /// Summarize a results CSV or emit plot series.
    Report {
        results: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Summary)]
        mode: Mode,
        /// Summary file (stdout otherwise) or plotdata directory
        /// (`<results stem>_plotdata` otherwise).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Summary,
    Plotdata,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("weakboost: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Generate {
            benchmark,
            length,
            seed,
            out,
            normalize,
            noise_std,
            laser_file,
        } => generate(
            benchmark,
            length,
            seed,
            &out,
            normalize,
            noise_std,
            laser_file.as_deref(),
        ),
        Command::Run {
            config,
            set,
            out,
            dump_model,
        } => run(config.as_deref(), &set, out.as_deref(), dump_model.as_deref()),
        Command::Sweep {
            config,
            set,
            out,
            serial,
        } => run_sweep(&config, &set, &out, serial),
        Command::Report {
            results,
            mode,
            out,
            svg,
        } => report(&results, mode, out.as_deref(), svg.as_deref()),
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn generate(
    benchmark: Benchmark,
    rows: usize,
    seed: u64,
    out: &Path,
    normalize: bool,
    noise_std: f64,
    laser_file: Option<&Path>,
) -> Result<()> {
    let length = benchmark.series_length(rows);
    let raw = match (benchmark, laser_file) {
        (Benchmark::Laser, Some(path)) => load_laser(path)?,
        (Benchmark::Henon, _) => gen_henon(length, Rng::new(seed), noise_std)?,
        _ => benchmark.generate(length, Rng::new(seed))?,
    };
    if raw.len() < length {
        return Err(Error::Data(format!(
            "{benchmark} provides {} samples, {rows} rows need {length}",
            raw.len()
        )));
    }
    let raw = raw.prefix(length);
    let series = if normalize {
        normalize_minmax(&raw, None)?.0
    } else {
        raw
    };
    let dataset = make_supervised(&series, benchmark, 0)?;
    dataset.write_csv(create(out)?)
}

fn load_settings(config: Option<&Path>, overrides: &[String]) -> Result<Settings> {
    let mut settings = match config {
        Some(path) => Settings::from_toml_file(path)?,
        None => Settings::new(),
    };
    settings.apply_overrides(overrides)?;
    Ok(settings)
}

fn run(config: Option<&Path>, overrides: &[String], out: Option<&Path>, dump: Option<&Path>) -> Result<()> {
    let cfg = ExperimentConfig::from_settings(&load_settings(config, overrides)?)?;
    let outcome = run_experiment_detailed(&cfg).inspect_err(|_| eprintln!("config: {cfg:?}"))?;
    match out {
        Some(path) => write_records(std::slice::from_ref(&outcome.record), create(path)?)?,
        None => write_records(std::slice::from_ref(&outcome.record), std::io::stdout().lock())?,
    }
    if let Some(path) = dump {
        let json = outcome.model.dump()?.to_json()?;
        std::fs::write(path, json).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
    }
    Ok(())
}

fn run_sweep(config: &Path, overrides: &[String], out: &Path, serial: bool) -> Result<()> {
    let mut grid = SweepGrid::from_settings(&load_settings(Some(config), overrides)?)?;
    if serial {
        grid.parallel = false;
    }
    let output = sweep(&grid)?;
    for (run_id, err) in &output.failures {
        eprintln!("weakboost: {run_id} diverged: {err}");
    }
    write_records(&output.records, create(out)?)?;
    eprintln!(
        "{} rows written to {} ({} diverged)",
        output.records.len(),
        out.display(),
        output.failures.len()
    );
    Ok(())
}

fn report(results: &Path, mode: Mode, out: Option<&Path>, svg: Option<&Path>) -> Result<()> {
    let file = File::open(results).map_err(|source| Error::Io {
        path: results.to_path_buf(),
        source,
    })?;
    let records = read_records(file)?;
    let curves = plot_curves(&records);
    match mode {
        Mode::Summary => {
            let rows = summarize(&records);
            match out {
                Some(path) => write_summary(&rows, create(path)?)?,
                None => write_summary(&rows, std::io::stdout().lock())?,
            }
        }
        Mode::Plotdata => {
            let dir = match out {
                Some(dir) => dir.to_path_buf(),
                None => {
                    let stem = results.file_stem().and_then(|s| s.to_str()).unwrap_or("results");
                    results.with_file_name(format!("{stem}_plotdata"))
                }
            };
            for path in write_plotdata(&curves, &dir)? {
                println!("{}", path.display());
            }
        }
    }
    if let Some(path) = svg {
        let title = results.file_stem().and_then(|s| s.to_str()).unwrap_or("results");
        let mut w = create(path)?;
        w.write_all(render_svg(&curves, title).as_bytes())
            .and_then(|()| w.flush())
            .map_err(|source| Error::Io {
                path: path.to_path_buf(),
                source,
            })?;
    }
    Ok(())
}
