//! Run configuration: a TOML file with one section per model, every key
//! optional, unknown keys rejected.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use qrepeater_core::chain::{ChainConfig, RoundTiming};
use qrepeater_core::rate::Usefulness;
use qrepeater_core::{Fidelity, GateNoiseParams, LinkModel, MemoryModel};

use crate::CliError;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RawConfig {
    pub gate: GateSection,
    pub link: LinkSection,
    pub memory: MemorySection,
    pub chain: ChainSection,
    pub rate: RateSection,
    pub sweep: SweepSection,
    pub threshold: ThresholdSection,
    pub output: OutputSection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GateSection {
    pub p1: f64,
    pub p2: f64,
    pub eta: f64,
}

impl Default for GateSection {
    fn default() -> Self {
        GateSection {
            p1: 0.999,
            p2: 0.99,
            eta: 0.995,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LinkSection {
    pub spacing_km: f64,
    pub f0: f64,
    pub alpha_db_per_km: f64,
    pub signal_speed_km_s: f64,
}

impl Default for LinkSection {
    fn default() -> Self {
        LinkSection {
            spacing_km: LinkModel::DEFAULT_SPACING_KM,
            f0: LinkModel::DEFAULT_F0,
            alpha_db_per_km: LinkModel::DEFAULT_ALPHA,
            signal_speed_km_s: LinkModel::DEFAULT_SIGNAL_SPEED,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MemoryKind {
    None,
    Exponential,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MemorySection {
    pub model: MemoryKind,
    pub tau_s: f64,
}

impl Default for MemorySection {
    fn default() -> Self {
        MemorySection {
            model: MemoryKind::Exponential,
            tau_s: 0.005,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChainSection {
    pub swap_arity: u32,
    pub depth: u32,
    pub pairs_per_purification: u32,
    pub epp_rounds_per_level: u32,
    pub c_es: f64,
    pub c_epp: f64,
    pub include_generation_time: bool,
}

impl Default for ChainSection {
    fn default() -> Self {
        let timing = RoundTiming::default();
        ChainSection {
            swap_arity: 2,
            depth: 4,
            pairs_per_purification: 2,
            epp_rounds_per_level: 1,
            c_es: timing.c_es,
            c_epp: timing.c_epp,
            include_generation_time: timing.include_generation_time,
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RateSection {
    /// Fidelity at which delivered pairs count fully; defaults to f_min.
    pub f_useful: Option<f64>,
    pub fit_min_km: Option<f64>,
    pub fit_max_km: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    Depth,
    SpacingKm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepScale {
    Linear,
    Log,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub parameter: SweepParameter,
    pub start: f64,
    pub stop: f64,
    pub count: Option<usize>,
    /// Additive for linear scale, multiplicative for log scale; 1 when
    /// neither `count` nor `step` is given.
    pub step: Option<f64>,
    pub scale: SweepScale,
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection {
            parameter: SweepParameter::Depth,
            start: 1.0,
            stop: 10.0,
            count: None,
            step: None,
            scale: SweepScale::Linear,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ThresholdSection {
    pub max_depth: u32,
}

impl Default for ThresholdSection {
    fn default() -> Self {
        ThresholdSection { max_depth: 16 }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub path: Option<PathBuf>,
}

/// Validated configuration built from [`RawConfig`].
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub gates: GateNoiseParams,
    pub memory: MemoryModel,
    pub chain: ChainConfig,
    pub usefulness: Usefulness,
    pub fit_window_km: (f64, f64),
    pub sweep: SweepSection,
    pub threshold_max_depth: u32,
    pub output: Option<PathBuf>,
}

fn config_error(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let raw = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Config(format!("cannot read {}: {e}", p.display())))?;
                Self::parse_raw(&text)?
            }
            None => RawConfig::default(),
        };
        Self::from_raw(raw)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        Self::from_raw(Self::parse_raw(text)?)
    }

    fn parse_raw(text: &str) -> Result<RawConfig, CliError> {
        toml::from_str(text).map_err(config_error)
    }

    pub fn from_raw(raw: RawConfig) -> Result<Self, CliError> {
        let gates = GateNoiseParams::new(raw.gate.p1, raw.gate.p2, raw.gate.eta).map_err(config_error)?;
        let link = LinkModel::new(
            raw.link.spacing_km,
            Fidelity::new(raw.link.f0).map_err(config_error)?,
            raw.link.alpha_db_per_km,
            raw.link.signal_speed_km_s,
        )
        .map_err(config_error)?;
        let memory = match raw.memory.model {
            MemoryKind::None => MemoryModel::None,
            MemoryKind::Exponential => MemoryModel::exponential(raw.memory.tau_s).map_err(config_error)?,
        };
        let c = &raw.chain;
        for (name, v) in [("chain.c_es", c.c_es), ("chain.c_epp", c.c_epp)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(CliError::Config(format!("{name} = {v} must be a finite non-negative number")));
            }
        }
        let chain = ChainConfig::new(c.swap_arity, c.depth, c.pairs_per_purification, link, c.epp_rounds_per_level)
            .map_err(config_error)?
            .with_timing(RoundTiming {
                c_es: c.c_es,
                c_epp: c.c_epp,
                include_generation_time: c.include_generation_time,
            });
        let usefulness = match raw.rate.f_useful {
            Some(f) => Usefulness::Threshold(Fidelity::new(f).map_err(config_error)?),
            None => Usefulness::PurificationFloor,
        };
        let fit_window_km = (
            raw.rate.fit_min_km.unwrap_or(0.0),
            raw.rate.fit_max_km.unwrap_or(f64::INFINITY),
        );
        if fit_window_km.0 >= fit_window_km.1 {
            return Err(CliError::Config("rate.fit_min_km must be below rate.fit_max_km".into()));
        }
        let rc = RunConfig {
            gates,
            memory,
            chain,
            usefulness,
            fit_window_km,
            sweep: raw.sweep,
            threshold_max_depth: raw.threshold.max_depth,
            output: raw.output.path,
        };
        rc.sweep_values()?;
        Ok(rc)
    }

    /// Sweep points in order; depth values must be whole numbers.
    pub fn sweep_values(&self) -> Result<Vec<f64>, CliError> {
        let s = &self.sweep;
        let bad = |msg: &str| Err(CliError::Config(format!("sweep: {msg}")));
        if !(s.start.is_finite() && s.stop.is_finite()) || s.start > s.stop {
            return bad("start and stop must be finite with start <= stop");
        }
        if s.scale == SweepScale::Log && s.start <= 0.0 {
            return bad("log scale needs a positive start");
        }
        let step = match (s.count, s.step) {
            (None, None) => Some(1.0),
            (_, step) => step,
        };
        let values: Vec<f64> = match (s.count, step) {
            (Some(_), Some(_)) => return bad("give only one of count or step"),
            (None, None) => unreachable!("a default step is filled in above"),
            (Some(0), None) => return bad("count must be positive"),
            (Some(1), None) => vec![s.start],
            (Some(n), None) => (0..n)
                .map(|i| {
                    let t = i as f64 / (n - 1) as f64;
                    match s.scale {
                        SweepScale::Linear => s.start + (s.stop - s.start) * t,
                        SweepScale::Log => s.start * (s.stop / s.start).powf(t),
                    }
                })
                .collect(),
            (None, Some(step)) => {
                let valid = match s.scale {
                    SweepScale::Linear => step > 0.0,
                    SweepScale::Log => step > 1.0,
                };
                if !valid || !step.is_finite() {
                    return bad("step must be > 0 (linear) or > 1 (log)");
                }
                let tol = 1e-9 * s.stop.abs().max(1.0);
                let mut out = Vec::new();
                let mut i = 0;
                loop {
                    let v = match s.scale {
                        SweepScale::Linear => s.start + step * i as f64,
                        SweepScale::Log => s.start * step.powi(i),
                    };
                    if v > s.stop + tol {
                        break;
                    }
                    out.push(v);
                    i += 1;
                }
                out
            }
        };
        match s.parameter {
            SweepParameter::Depth => {
                if values.iter().any(|v| (v - v.round()).abs() > 1e-9 || *v < 0.0) {
                    return bad("depth values must be non-negative integers");
                }
            }
            SweepParameter::SpacingKm => {
                if values.iter().any(|v| *v <= 0.0) {
                    return bad("spacing values must be positive");
                }
            }
        }
        Ok(values)
    }

    /// Chain configurations of the sweep, in sweep order.
    pub fn sweep_configs(&self) -> Result<Vec<ChainConfig>, CliError> {
        self.sweep_values()?
            .into_iter()
            .map(|v| match self.sweep.parameter {
                SweepParameter::Depth => self.chain.with_depth(v.round() as u32),
                SweepParameter::SpacingKm => self.chain.link.with_spacing(v).map(|l| self.chain.with_link(l)),
            })
            .collect::<Result<_, _>>()
            .map_err(config_error)
    }
}
