use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use subnyq::sampling::MwcConfig;
use subnyq_harness::config::{BoundsModel, BoundsSampler, HarmonicModel, QuadratureRule, RdSampler};
use subnyq_harness::experiment::write_report;
use subnyq_harness::methods::{write_density_csv, write_mismatch_csv};
use subnyq_harness::{bounds_report, density_convergence, mismatch_sweep, run_experiment, ExperimentConfig, HarnessError, Scenario};

const TRIAL_COLUMNS: &str = "\
Output files (written to --out DIR, or the config's output.dir):
  trials.csv    one row per trial
  timings.csv   trial,stage,seconds (wall time, informational)
  summary.json  success rate, median/max NMSE, failure histogram by stage

trials.csv columns, all scenarios:
  trial            trial index
  seed             per-trial seed, split_seed(seed, trial)
  success          support exact and error within the recovery tolerance
  support_exact    recovered support equals the true one
  support_jaccard  |S ∩ Ŝ| / |S ∪ Ŝ|
  nmse             ‖x̂ − x‖² / ‖x‖²
  ...              scenario columns, see below
  failure_stage    stage tag of the first failure, empty on success
  failure_message  error text (commas replaced by ';')

scenario columns:
  mwc  true_slices, detected_slices   slice counts (2L+1 grid)
  pns  phase                          second-channel delay φ in seconds
  rd   residual_norm                  final OMP residual ‖y − A â‖
  fri  delay_error, amplitude_error   max |t̂ − t|/τ, max |â − a|/|a|

Reals are printed with 17 significant digits.";

#[derive(Parser)]
#[command(name = "subnyq", version, about = "Sub-Nyquist sampling experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScenarioArg {
    Mwc,
    Pns,
    Rd,
    Fri,
}

impl ScenarioArg {
    fn name(self) -> &'static str {
        match self {
            ScenarioArg::Mwc => "mwc",
            ScenarioArg::Pns => "pns",
            ScenarioArg::Rd => "rd",
            ScenarioArg::Fri => "fri",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum RuleArg {
    GaussLegendre,
    Midpoint,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo run of one recovery pipeline.
    #[command(after_long_help = TRIAL_COLUMNS)]
    Simulate {
        scenario: ScenarioArg,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Landau, blind and Nyquist rates next to the configured sampler rate (JSON).
    ///
    /// Accepts a `bounds` config, or an `mwc` config (sampler rate m·f_p).
    Bounds {
        #[arg(long)]
        config: PathBuf,
    },
    /// Quadrature error of the sign-waveform Fourier coefficients versus
    /// nodes per chip. CSV columns: density,max_error.
    Density {
        /// A `density` config; its model overrides the flags below.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        pattern_seed: u64,
        #[arg(long, default_value_t = 9)]
        chips: usize,
        #[arg(long, value_delimiter = ',', default_value = "1,2,5,10,50,100")]
        densities: Vec<usize>,
        #[arg(long, value_enum, default_value = "gauss-legendre")]
        rule: RuleArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// RD reconstruction error with tones off the integer grid by δ.
    /// CSV columns: delta,trials,support_exact_rate,median_nmse,max_nmse.
    Mismatch {
        #[arg(long, value_delimiter = ',', default_value = "0,0.1,0.25,0.5")]
        deltas: Vec<f64>,
        #[arg(long, default_value_t = 512)]
        tone_grid_size: usize,
        #[arg(long, default_value_t = 128)]
        rate: usize,
        #[arg(long, default_value_t = 5)]
        tones: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn io_error(path: &Path) -> impl FnOnce(io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Runs `f` against the file at `out`, or stdout when absent.
fn emit(out: Option<&Path>, f: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<(), HarnessError> {
    match out {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).map_err(io_error(dir))?;
            }
            let file = File::create(path).map_err(io_error(path))?;
            let mut w = BufWriter::new(file);
            f(&mut w).and_then(|_| w.flush()).map_err(io_error(path))
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            f(&mut lock).map_err(io_error(Path::new("<stdout>")))
        }
    }
}

fn simulate(
    scenario: ScenarioArg,
    config: &Path,
    trials: Option<usize>,
    seed: Option<u64>,
    out: Option<PathBuf>,
) -> Result<bool, HarnessError> {
    let mut cfg = ExperimentConfig::load(config)?;
    if cfg.scenario.name() != scenario.name() {
        return Err(HarnessError::Config {
            path: "scenario".into(),
            message: format!("config holds `{}`, command asked for `{}`", cfg.scenario.name(), scenario.name()),
        });
    }
    if let Some(t) = trials {
        cfg.trials = t;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    cfg.validate()?;
    let report = run_experiment(&cfg)?;
    if let Some(dir) = out.or_else(|| cfg.output.dir.clone()) {
        write_report(&report, &dir)?;
    }
    let summary = serde_json::to_string_pretty(&report.summary).expect("summary serialises");
    emit(None, |w| writeln!(w, "{summary}"))?;
    Ok(report.summary.successes == report.summary.trials)
}

fn bounds(config: &Path) -> Result<(), HarnessError> {
    let cfg = ExperimentConfig::load(config)?;
    let report = match &cfg.scenario {
        Scenario::Bounds { model, sampler } => bounds_report(model, sampler)?,
        Scenario::Mwc { model, sampler, .. } => {
            let f_p = model.f_nyq / sampler.chips as f64;
            bounds_report(
                &BoundsModel {
                    f_nyq: model.f_nyq,
                    bands: model.bands,
                    band_width: model.band_width,
                },
                &BoundsSampler {
                    channels: sampler.channels,
                    f_s: f_p,
                },
            )?
        }
        other => {
            return Err(HarnessError::Config {
                path: "scenario".into(),
                message: format!("`{}` carries no multiband model", other.name()),
            })
        }
    };
    let text = serde_json::to_string_pretty(&report).expect("report serialises");
    emit(None, |w| writeln!(w, "{text}"))
}

fn run(cli: Cli) -> Result<bool, HarnessError> {
    match cli.command {
        Command::Simulate {
            scenario,
            config,
            trials,
            seed,
            out,
        } => simulate(scenario, &config, trials, seed, out),
        Command::Bounds { config } => bounds(&config).map(|_| true),
        Command::Density {
            config,
            pattern_seed,
            chips,
            densities,
            rule,
            out,
        } => {
            let rule = match rule {
                RuleArg::GaussLegendre => QuadratureRule::GaussLegendre,
                RuleArg::Midpoint => QuadratureRule::Midpoint,
            };
            let (pattern_seed, chips, densities, rule) = match config {
                Some(path) => {
                    let cfg = ExperimentConfig::load(&path)?;
                    cfg.validate()?;
                    match cfg.scenario {
                        Scenario::Density { model } => (model.pattern_seed, model.chips, model.densities, model.rule),
                        other => {
                            return Err(HarnessError::Config {
                                path: "scenario".into(),
                                message: format!("expected `density`, found `{}`", other.name()),
                            })
                        }
                    }
                }
                None => (pattern_seed, chips, densities, rule),
            };
            let cfg = MwcConfig::<f64>::random(1, chips, 1.0, pattern_seed)?;
            let rows = density_convergence(&cfg.patterns[0], &densities, rule)?;
            emit(out.as_deref(), |w| write_density_csv(&rows, w)).map(|_| true)
        }
        Command::Mismatch {
            deltas,
            tone_grid_size,
            rate,
            tones,
            trials,
            seed,
            out,
        } => {
            if let Some(d) = deltas.iter().find(|d| !(0.0..=0.5).contains(*d)) {
                return Err(HarnessError::Config {
                    path: "deltas".into(),
                    message: format!("{d} outside [0, 0.5]"),
                });
            }
            let model = HarmonicModel {
                tone_grid_size,
                tones,
                mismatch: 0.0,
            };
            let sampler = RdSampler { rate, chip_seed: None };
            let rows = mismatch_sweep(&model, &sampler, &deltas, trials, seed)?;
            emit(out.as_deref(), |w| write_mismatch_csv(&rows, w)).map(|_| true)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // bad arguments count as configuration errors
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        // some trials failed: reported as a recovery error
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
