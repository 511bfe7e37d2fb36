//! The nested swap/purify schedule, executed on cohort fidelities.
//!
//! Every pair at a given level is statistically identical, so one
//! representative fidelity is carried through the levels: swap `L` pairs,
//! wait in memory while the round's classical messages travel, then run the
//! configured number of purification rounds.

use std::fmt;
use std::io;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::format::sig12;
use crate::noise::{classical_comm_time, link_success_probability, memory_decay, LinkModel, MemoryModel};
use crate::werner::{purify_noisy, purify_noisy_success_probability, swap_chain_fidelity, Fidelity, GateNoiseParams};

/// A pair at or below this fidelity carries no usable entanglement.
pub const DEGENERATE_FIDELITY: f64 = 0.25 + 1e-12;

/// Latency multipliers for one level, in units of the one-way signalling
/// time over the level's span.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundTiming {
    /// Swap corrections: one one-way message.
    pub c_es: f64,
    /// Per purification round: outcome comparison, one round trip.
    pub c_epp: f64,
    /// Count one segment's latency for distributing elementary pairs.
    pub include_generation_time: bool,
}

impl Default for RoundTiming {
    fn default() -> Self {
        RoundTiming {
            c_es: 1.0,
            c_epp: 2.0,
            include_generation_time: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainConfig {
    /// L, pairs joined per swap.
    pub swap_arity: u32,
    /// n, recursion depth.
    pub depth: u32,
    /// M, pairs consumed by one level's purification.
    pub pairs_per_purification: u32,
    pub link: LinkModel,
    /// k, purification rounds per level.
    pub epp_rounds_per_level: u32,
    pub timing: RoundTiming,
}

impl ChainConfig {
    pub fn new(
        swap_arity: u32,
        depth: u32,
        pairs_per_purification: u32,
        link: LinkModel,
        epp_rounds_per_level: u32,
    ) -> Result<Self> {
        if swap_arity < 2 {
            return Err(Error::InvalidParameter {
                name: "swap_arity",
                value: swap_arity as f64,
                reason: "must be at least 2",
            });
        }
        if pairs_per_purification < 2 {
            return Err(Error::InvalidParameter {
                name: "pairs_per_purification",
                value: pairs_per_purification as f64,
                reason: "must be at least 2",
            });
        }
        let cfg = ChainConfig {
            swap_arity,
            depth,
            pairs_per_purification,
            link,
            epp_rounds_per_level,
            timing: RoundTiming::default(),
        };
        cfg.checkpoints()?;
        Ok(cfg)
    }

    pub fn with_depth(&self, depth: u32) -> Result<Self> {
        ChainConfig::new(
            self.swap_arity,
            depth,
            self.pairs_per_purification,
            self.link,
            self.epp_rounds_per_level,
        )
        .map(|c| c.with_timing(self.timing))
    }

    pub fn with_link(&self, link: LinkModel) -> Self {
        ChainConfig { link, ..*self }
    }

    pub fn with_timing(&self, timing: RoundTiming) -> Self {
        ChainConfig { timing, ..*self }
    }

    /// N = L^n.
    pub fn checkpoints(&self) -> Result<u64> {
        (self.swap_arity as u64)
            .checked_pow(self.depth)
            .ok_or(Error::Overflow)
    }

    /// D = N·d in km.
    pub fn distance_km(&self) -> f64 {
        (self.swap_arity as f64).powi(self.depth as i32) * self.link.spacing_km
    }

    /// Pair length at level x, in km.
    pub fn span_km(&self, level: u32) -> f64 {
        (self.swap_arity as f64).powi(level as i32) * self.link.spacing_km
    }

    /// M as it enters the resource count: no purification consumes nothing.
    pub fn effective_pairs_per_purification(&self) -> u64 {
        if self.epp_rounds_per_level == 0 {
            1
        } else {
            self.pairs_per_purification as u64
        }
    }
}

/// Checkpoints acting in one round of the schedule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScheduleRound {
    pub level: u32,
    /// C_{k·L^(x−1)} that are not multiples of L^x.
    pub swapping: Vec<u64>,
    /// Interior multiples of L^x.
    pub purifying: Vec<u64>,
}

/// Lists, per level, which checkpoints swap and which purify.
pub fn build_schedule(cfg: &ChainConfig) -> Result<Vec<ScheduleRound>> {
    let n_total = cfg.checkpoints()?;
    let l = cfg.swap_arity as u64;
    Ok((1..=cfg.depth)
        .map(|x| {
            let below = l.pow(x - 1);
            let here = below * l;
            let swapping = (below..n_total)
                .step_by(below as usize)
                .filter(|c| c % here != 0)
                .collect();
            let purifying = (here..n_total).step_by(here as usize).collect();
            ScheduleRound {
                level: x,
                swapping,
                purifying,
            }
        })
        .collect())
}

/// Classical-communication latency of level `x`: (c_es + c_epp·k) one-way
/// trips over the pair length L^x·d.
pub fn round_time(level: u32, cfg: &ChainConfig) -> f64 {
    let multiplier = cfg.timing.c_es + cfg.timing.c_epp * cfg.epp_rounds_per_level as f64;
    multiplier * classical_comm_time(cfg.span_km(level), &cfg.link)
}

/// R = (L·M)^n elementary pairs for one end-to-end pair.
pub fn resource_count(cfg: &ChainConfig) -> Result<u64> {
    (cfg.swap_arity as u64)
        .checked_mul(cfg.effective_pairs_per_purification())
        .and_then(|lm| lm.checked_pow(cfg.depth))
        .ok_or(Error::Overflow)
}

/// The same count through N^(log_L M + 1), in floating point.
pub fn resource_count_closed_form(cfg: &ChainConfig) -> f64 {
    let l = cfg.swap_arity as f64;
    let m = cfg.effective_pairs_per_purification() as f64;
    let n = l.powi(cfg.depth as i32);
    n.powf(m.ln() / l.ln() + 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Init,
    AfterEs,
    AfterMemory,
    AfterEpp,
}

impl Stage {
    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Init => "init",
            Stage::AfterEs => "after_es",
            Stage::AfterMemory => "after_memory",
            Stage::AfterEpp => "after_epp",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Stage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "init" => Ok(Stage::Init),
            "after_es" => Ok(Stage::AfterEs),
            "after_memory" => Ok(Stage::AfterMemory),
            "after_epp" => Ok(Stage::AfterEpp),
            other => Err(Error::Csv(format!("unknown stage `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceStep {
    pub level: u32,
    pub stage: Stage,
    pub fidelity: Fidelity,
    pub elapsed_s: f64,
    pub pairs_consumed: u64,
}

/// Fidelity of one level at each stage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelSummary {
    pub level: u32,
    pub start: f64,
    pub after_es: f64,
    pub after_memory: f64,
    pub end: f64,
}

impl LevelSummary {
    pub fn swap_loss(&self) -> f64 {
        self.start - self.after_es
    }

    pub fn memory_loss(&self) -> f64 {
        self.after_es - self.after_memory
    }

    pub fn purification_loss(&self) -> f64 {
        self.after_memory - self.end
    }

    pub fn total_loss(&self) -> f64 {
        self.start - self.end
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Degeneracy {
    pub level: u32,
    pub stage: Stage,
    pub fidelity: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FidelityTrace {
    pub steps: Vec<TraceStep>,
    /// Set when the run stopped early because the pair became maximally mixed.
    pub degenerate: Option<Degeneracy>,
}

pub const TRACE_HEADER: [&str; 5] = ["level", "stage", "fidelity", "elapsed_seconds", "pairs_consumed"];

impl FidelityTrace {
    pub fn last(&self) -> Option<&TraceStep> {
        self.steps.last()
    }

    /// End-to-end fidelity, or the degeneracy that cut the run short.
    pub fn final_fidelity(&self) -> Result<Fidelity> {
        match self.degenerate {
            Some(d) => Err(Error::DegenerateFidelity {
                level: d.level,
                fidelity: d.fidelity,
            }),
            None => Ok(self.steps.last().expect("a trace has an init row").fidelity),
        }
    }

    pub fn total_time(&self) -> f64 {
        self.steps.last().map_or(0.0, |s| s.elapsed_s)
    }

    pub fn pairs_consumed(&self) -> u64 {
        self.steps.last().map_or(0, |s| s.pairs_consumed)
    }

    fn stage_value(&self, level: u32, stage: Stage) -> Option<f64> {
        self.steps
            .iter()
            .rev()
            .find(|s| s.level == level && s.stage == stage)
            .map(|s| s.fidelity.value())
    }

    /// Per-level stage fidelities for every level that ran to completion.
    pub fn level_summaries(&self) -> Vec<LevelSummary> {
        let max_level = self.steps.iter().map(|s| s.level).max().unwrap_or(0);
        let mut start = match self.stage_value(0, Stage::Init) {
            Some(f) => f,
            None => return Vec::new(),
        };
        let mut out = Vec::new();
        for level in 1..=max_level {
            let (Some(after_es), Some(after_memory)) =
                (self.stage_value(level, Stage::AfterEs), self.stage_value(level, Stage::AfterMemory))
            else {
                break;
            };
            let end = self.stage_value(level, Stage::AfterEpp).unwrap_or(after_memory);
            let truncated = self.degenerate.is_some_and(|d| d.level == level);
            if truncated {
                break;
            }
            out.push(LevelSummary {
                level,
                start,
                after_es,
                after_memory,
                end,
            });
            start = end;
        }
        out
    }

    pub fn write_csv<W: io::Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(TRACE_HEADER)?;
        for s in &self.steps {
            w.write_record([
                s.level.to_string(),
                s.stage.to_string(),
                sig12(s.fidelity.value()),
                sig12(s.elapsed_s),
                s.pairs_consumed.to_string(),
            ])?;
        }
        w.flush().map_err(|e| Error::Csv(e.to_string()))?;
        Ok(())
    }

    /// Parses a trace written by [`FidelityTrace::write_csv`]. The degeneracy
    /// flag is not part of the file and comes back unset.
    pub fn read_csv<R: io::Read>(reader: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
        if header != TRACE_HEADER {
            return Err(Error::Csv(format!("unexpected trace header {header:?}")));
        }
        let parse_f = |s: &str| s.parse::<f64>().map_err(|e| Error::Csv(format!("`{s}`: {e}")));
        let parse_u = |s: &str| s.parse::<u64>().map_err(|e| Error::Csv(format!("`{s}`: {e}")));
        let mut steps = Vec::new();
        for record in r.records() {
            let rec = record?;
            if rec.len() != 5 {
                return Err(Error::Csv(format!("expected 5 fields, got {}", rec.len())));
            }
            steps.push(TraceStep {
                level: parse_u(&rec[0])? as u32,
                stage: rec[1].parse()?,
                fidelity: Fidelity::new(parse_f(&rec[2])?)?,
                elapsed_s: parse_f(&rec[3])?,
                pairs_consumed: parse_u(&rec[4])?,
            });
        }
        Ok(FidelityTrace {
            steps,
            degenerate: None,
        })
    }
}

/// Runs the schedule from elementary pairs at `link.f0` up to level n.
pub fn simulate_chain(cfg: &ChainConfig, g: &GateNoiseParams, mem: &MemoryModel) -> FidelityTrace {
    let l = cfg.swap_arity as u64;
    let lm = l * cfg.effective_pairs_per_purification();
    let mut trace = FidelityTrace::default();
    let mut f = cfg.link.f0;
    let mut elapsed = if cfg.timing.include_generation_time {
        classical_comm_time(cfg.link.spacing_km, &cfg.link)
    } else {
        0.0
    };
    let mut pairs: u64 = 1;

    let record = |trace: &mut FidelityTrace, level, stage, f: Fidelity, elapsed, pairs| {
        trace.steps.push(TraceStep {
            level,
            stage,
            fidelity: f,
            elapsed_s: elapsed,
            pairs_consumed: pairs,
        });
        if f.value() <= DEGENERATE_FIDELITY {
            trace.degenerate = Some(Degeneracy {
                level,
                stage,
                fidelity: f.value(),
            });
            false
        } else {
            true
        }
    };

    if !record(&mut trace, 0, Stage::Init, f, elapsed, pairs) {
        return trace;
    }
    for x in 1..=cfg.depth {
        let swapped_pairs = pairs.saturating_mul(l);
        f = swap_chain_fidelity(f, cfg.swap_arity, g);
        if !record(&mut trace, x, Stage::AfterEs, f, elapsed, swapped_pairs) {
            return trace;
        }
        let wait = round_time(x, cfg);
        f = memory_decay(f, wait, mem);
        elapsed += wait;
        if !record(&mut trace, x, Stage::AfterMemory, f, elapsed, swapped_pairs) {
            return trace;
        }
        pairs = pairs.saturating_mul(lm);
        for _ in 0..cfg.epp_rounds_per_level {
            f = purify_noisy(f, g);
            if !record(&mut trace, x, Stage::AfterEpp, f, elapsed, pairs) {
                return trace;
            }
        }
    }
    trace
}

/// Elementary-pair attempts per end-to-end pair when the purification keep
/// probability and the link success probability are charged.
pub fn expected_attempts(cfg: &ChainConfig, g: &GateNoiseParams, mem: &MemoryModel) -> Result<f64> {
    let trace = simulate_chain(cfg, g, mem);
    trace.final_fidelity()?;
    let mut cost = 1.0 / link_success_probability(&cfg.link);
    let m = cfg.effective_pairs_per_purification() as f64;
    for x in 1..=cfg.depth {
        cost *= cfg.swap_arity as f64 * m;
        let before_epp: Vec<Fidelity> = trace
            .steps
            .iter()
            .filter(|s| s.level == x && matches!(s.stage, Stage::AfterMemory | Stage::AfterEpp))
            .map(|s| s.fidelity)
            .collect();
        // Each purification round is entered by every step but the last.
        for f in before_epp.iter().take(cfg.epp_rounds_per_level as usize) {
            cost /= purify_noisy_success_probability(*f, g);
        }
    }
    Ok(cost)
}
