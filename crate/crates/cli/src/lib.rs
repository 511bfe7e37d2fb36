//! Command-line front end: every analysis as a subcommand, driven by a TOML
//! configuration, writing CSV.

pub mod config;
pub mod oracle;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use qrepeater_core::chain::{resource_count, simulate_chain};
use qrepeater_core::format::{fid12, sig12};
use qrepeater_core::rate::{
    curve_from_rates, direct_curve, scaling_fit, sweep, threshold_distance, write_curves_csv, RateCurve, RateMetric,
    Regime, Threshold,
};
use qrepeater_core::werner::{purification_fixed_points, purify_noisy, purify_noisy_success_probability, swap_chain_fidelity};
use qrepeater_core::{Error, Fidelity, MemoryModel};

use config::RunConfig;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(String),
    #[error("{0}")]
    Analysis(String),
    #[error("io: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Config(_) => 2,
            CliError::Analysis(_) | CliError::Io(_) => 1,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Analysis(e.to_string())
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "qrepeater", version, about = "Fidelity, resource and rate analysis of nested quantum repeater chains")]
pub struct Cli {
    /// TOML configuration; built-in defaults when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file for tabular results; overrides `[output] path`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fidelity range in which purification helps.
    FixedPoints,
    /// Repeated noisy purification of one input fidelity.
    Purify {
        #[arg(long)]
        fidelity: f64,
        #[arg(long, default_value_t = 1)]
        rounds: u32,
    },
    /// Noisy swap across a chain of equal links.
    Swap {
        #[arg(long)]
        fidelity: f64,
        #[arg(long, default_value_t = 2)]
        links: u32,
    },
    /// Stage-by-stage fidelity of the configured chain.
    Trace,
    /// Rate curves for direct transmission and both repeater regimes.
    RateSweep,
    /// Distance beyond which stored pairs fall below f_min.
    Threshold,
    /// Closed-form maps against the density-matrix circuits.
    OracleCheck {
        /// Fidelities in the grid over [0.3, 1].
        #[arg(long, default_value_t = 50)]
        points: usize,
    },
}

fn open_output(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", path.display())))
}

/// Runs one command, writing the report to `stdout`.
pub fn run<W: Write>(cli: &Cli, stdout: &mut W) -> Result<(), CliError> {
    let cfg = RunConfig::load(cli.config.as_deref())?;
    let out = cli.out.clone().or_else(|| cfg.output.clone());
    let required_out = || {
        out.clone()
            .ok_or_else(|| CliError::Usage("an output path is required (--out or [output] path)".into()))
    };
    match &cli.command {
        Command::FixedPoints => fixed_points(&cfg, stdout),
        Command::Purify { fidelity, rounds } => {
            let f = Fidelity::new(*fidelity).map_err(|e| CliError::Usage(e.to_string()))?;
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["round", "fidelity", "success_probability"]).map_err(csv_io)?;
            w.write_record(["0", &fid12(f.value()), ""]).map_err(csv_io)?;
            let mut current = f;
            for r in 1..=*rounds {
                let p = purify_noisy_success_probability(current, &cfg.gates);
                current = purify_noisy(current, &cfg.gates);
                w.write_record([r.to_string(), fid12(current.value()), sig12(p)]).map_err(csv_io)?;
            }
            emit_table(w, out.as_deref(), stdout)
        }
        Command::Swap { fidelity, links } => {
            let f = Fidelity::new(*fidelity).map_err(|e| CliError::Usage(e.to_string()))?;
            if *links == 0 {
                return Err(CliError::Usage("--links must be at least 1".into()));
            }
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["links", "fidelity"]).map_err(csv_io)?;
            for l in 1..=*links {
                w.write_record([l.to_string(), fid12(swap_chain_fidelity(f, l, &cfg.gates).value())])
                    .map_err(csv_io)?;
            }
            emit_table(w, out.as_deref(), stdout)
        }
        Command::Trace => trace(&cfg, &required_out()?, stdout),
        Command::RateSweep => rate_sweep(&cfg, &required_out()?, stdout),
        Command::Threshold => {
            let t = threshold_distance(&cfg.chain, cfg.threshold_max_depth, &cfg.gates, &cfg.memory)?;
            match t {
                Threshold::Finite { distance_km, level } => {
                    writeln!(stdout, "d_th_km={} level={level}", sig12(distance_km))?
                }
                Threshold::Infinite => writeln!(stdout, "d_th=Infinite")?,
            }
            Ok(())
        }
        Command::OracleCheck { points } => {
            if *points < 2 {
                return Err(CliError::Usage("--points must be at least 2".into()));
            }
            let report = oracle::oracle_check(&oracle::ClosedForms::default(), &oracle::grid(*points, &cfg.gates));
            report.write(stdout)?;
            report.verdict()
        }
    }
}

fn csv_io(e: csv::Error) -> CliError {
    CliError::Io(e.to_string())
}

fn emit_table<W: Write>(w: csv::Writer<Vec<u8>>, out: Option<&Path>, stdout: &mut W) -> Result<(), CliError> {
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    match out {
        Some(path) => {
            let mut f = open_output(path)?;
            f.write_all(&bytes)?;
            f.flush()?;
        }
        None => stdout.write_all(&bytes)?,
    }
    Ok(())
}

fn fixed_points<W: Write>(cfg: &RunConfig, stdout: &mut W) -> Result<(), CliError> {
    match purification_fixed_points(&cfg.gates) {
        Ok(fp) => {
            write!(stdout, "f_min={} f_max={}", fid12(fp.f_min.value()), fid12(fp.f_max.value()))?;
            if fp.marginal {
                write!(stdout, " marginal=true")?;
            }
            writeln!(stdout)?;
            Ok(())
        }
        Err(Error::NoValidRange) => {
            writeln!(stdout, "f_min=none f_max=none")?;
            Err(CliError::Analysis(format!(
                "no valid range: purification lowers every fidelity at p1={}, p2={}, eta={}",
                cfg.gates.p1(),
                cfg.gates.p2(),
                cfg.gates.eta()
            )))
        }
        Err(e) => Err(e.into()),
    }
}

fn trace<W: Write>(cfg: &RunConfig, out: &Path, stdout: &mut W) -> Result<(), CliError> {
    let t = simulate_chain(&cfg.chain, &cfg.gates, &cfg.memory);
    let mut f = open_output(out)?;
    t.write_csv(&mut f)?;
    f.flush()?;
    let resources = resource_count(&cfg.chain)?;
    match t.degenerate {
        None => writeln!(
            stdout,
            "final_fidelity={} total_time_s={} resources={resources} distance_km={}",
            fid12(t.final_fidelity()?.value()),
            sig12(t.total_time()),
            sig12(cfg.chain.distance_km())
        )?,
        Some(d) => writeln!(
            stdout,
            "degenerate level={} stage={} fidelity={} total_time_s={} resources={resources} distance_km={}",
            d.level,
            d.stage,
            fid12(d.fidelity),
            sig12(t.total_time()),
            sig12(cfg.chain.distance_km())
        )?,
    }
    Ok(())
}

struct FitLine<'a> {
    curve: &'a RateCurve,
    window: (f64, f64),
}

fn rate_sweep<W: Write>(cfg: &RunConfig, out: &Path, stdout: &mut W) -> Result<(), CliError> {
    let configs = cfg.sweep_configs()?;
    if configs.len() < qrepeater_core::rate::MIN_FIT_POINTS {
        return Err(Error::InsufficientPoints {
            found: configs.len(),
            required: qrepeater_core::rate::MIN_FIT_POINTS,
        }
        .into());
    }
    let mut distances: Vec<f64> = configs.iter().map(|c| c.distance_km()).collect();
    distances.sort_by(f64::total_cmp);
    distances.dedup();

    let ideal_memory = sweep(&configs, &cfg.gates, &MemoryModel::None, cfg.usefulness)?;
    let noisy_memory = sweep(&configs, &cfg.gates, &cfg.memory, cfg.usefulness)?;
    let curves = vec![
        direct_curve(&distances, &cfg.chain.link)?,
        curve_from_rates(&ideal_memory, Regime::RepeaterNoMemoryNoise, RateMetric::ResourceNormalized)?,
        curve_from_rates(&ideal_memory, Regime::RepeaterNoMemoryNoise, RateMetric::TimeNormalized)?,
        curve_from_rates(&noisy_memory, Regime::RepeaterMemoryNoise, RateMetric::ResourceNormalized)?,
        curve_from_rates(&noisy_memory, Regime::RepeaterMemoryNoise, RateMetric::TimeNormalized)?,
    ];
    let mut f = open_output(out)?;
    write_curves_csv(&curves, &mut f)?;
    f.flush()?;

    let threshold = threshold_distance(&cfg.chain, cfg.threshold_max_depth, &cfg.gates, &cfg.memory)?;
    match threshold {
        Threshold::Finite { distance_km, level } => writeln!(stdout, "d_th_km={} level={level}", sig12(distance_km))?,
        Threshold::Infinite => writeln!(stdout, "d_th=Infinite")?,
    }
    let (lo, hi) = cfg.fit_window_km;
    let fits: Vec<FitLine> = curves
        .iter()
        .map(|curve| {
            // The memory-noise curve is classified beyond the threshold only.
            let lower = match threshold {
                Threshold::Finite { distance_km, .. } if curve.regime() == Regime::RepeaterMemoryNoise => {
                    lo.max(distance_km)
                }
                _ => lo,
            };
            FitLine {
                curve,
                window: (lower, hi),
            }
        })
        .collect();

    let mut block = String::new();
    for line in &fits {
        let (regime, metric) = (line.curve.regime(), line.curve.metric());
        let prefix = format!("fit.{regime}.{metric}");
        block.push_str(&format!("{prefix}.window_min_km={}\n", sig12(line.window.0)));
        block.push_str(&format!("{prefix}.window_max_km={}\n", sig12(line.window.1)));
        match scaling_fit(line.curve, line.window.0, line.window.1) {
            Ok(fit) => {
                writeln!(
                    stdout,
                    "{regime} {metric}: {} parameter={} r2={} points={}",
                    fit.kind,
                    sig12(fit.parameter),
                    sig12(fit.goodness),
                    fit.points
                )?;
                block.push_str(&format!("{prefix}.kind={}\n", fit.kind));
                block.push_str(&format!("{prefix}.parameter={}\n", sig12(fit.parameter)));
                block.push_str(&format!("{prefix}.goodness={}\n", sig12(fit.goodness)));
                block.push_str(&format!("{prefix}.polynomial_r2={}\n", sig12(fit.polynomial.r_squared)));
                block.push_str(&format!("{prefix}.exponential_r2={}\n", sig12(fit.exponential.r_squared)));
                block.push_str(&format!("{prefix}.points={}\n", fit.points));
            }
            Err(Error::InsufficientPoints { found, .. }) => {
                writeln!(stdout, "{regime} {metric}: insufficient points ({found} in window)")?;
                block.push_str(&format!("{prefix}.kind=insufficient_points\n"));
                block.push_str(&format!("{prefix}.points={found}\n"));
            }
            Err(e) => return Err(e.into()),
        }
    }
    writeln!(stdout)?;
    stdout.write_all(block.as_bytes())?;
    Ok(())
}
