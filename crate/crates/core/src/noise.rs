//! Channel, memory and link-timing models.

use crate::error::{Error, Result};
use crate::werner::Fidelity;

/// One elementary segment of the chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkModel {
    /// Checkpoint spacing in km.
    pub spacing_km: f64,
    /// Fidelity of an elementary pair after crossing one segment.
    pub f0: Fidelity,
    /// Fiber attenuation in dB/km.
    pub alpha_db_per_km: f64,
    /// Signal speed in km/s.
    pub signal_speed_km_s: f64,
}

impl LinkModel {
    pub const DEFAULT_SPACING_KM: f64 = 25.0;
    pub const DEFAULT_F0: f64 = 0.96;
    pub const DEFAULT_ALPHA: f64 = 0.2;
    pub const DEFAULT_SIGNAL_SPEED: f64 = 2.0e5;

    pub fn new(spacing_km: f64, f0: Fidelity, alpha_db_per_km: f64, signal_speed_km_s: f64) -> Result<Self> {
        if !(spacing_km > 0.0 && spacing_km.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "spacing_km",
                value: spacing_km,
                reason: "must be positive",
            });
        }
        if !(alpha_db_per_km >= 0.0 && alpha_db_per_km.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "alpha_db_per_km",
                value: alpha_db_per_km,
                reason: "must be non-negative",
            });
        }
        if !(signal_speed_km_s > 0.0 && signal_speed_km_s.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "signal_speed_km_s",
                value: signal_speed_km_s,
                reason: "must be positive",
            });
        }
        if f0.value() <= 0.25 {
            return Err(Error::InvalidParameter {
                name: "f0",
                value: f0.value(),
                reason: "must lie in (1/4, 1]",
            });
        }
        Ok(LinkModel {
            spacing_km,
            f0,
            alpha_db_per_km,
            signal_speed_km_s,
        })
    }

    /// Same link with a different spacing.
    pub fn with_spacing(&self, spacing_km: f64) -> Result<Self> {
        LinkModel::new(spacing_km, self.f0, self.alpha_db_per_km, self.signal_speed_km_s)
    }
}

impl Default for LinkModel {
    fn default() -> Self {
        LinkModel {
            spacing_km: Self::DEFAULT_SPACING_KM,
            f0: Fidelity::new(Self::DEFAULT_F0).expect("default f0 is a valid fidelity"),
            alpha_db_per_km: Self::DEFAULT_ALPHA,
            signal_speed_km_s: Self::DEFAULT_SIGNAL_SPEED,
        }
    }
}

/// Decoherence of pairs stored in repeater memory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MemoryModel {
    None,
    /// The Werner weight decays as exp(−t/τ).
    Exponential { tau_s: f64 },
}

impl MemoryModel {
    /// τ = 0 is accepted and means instantaneous decay to the mixed state.
    pub fn exponential(tau_s: f64) -> Result<Self> {
        if tau_s.is_nan() || tau_s < 0.0 {
            return Err(Error::InvalidParameter {
                name: "tau_s",
                value: tau_s,
                reason: "must be non-negative",
            });
        }
        Ok(MemoryModel::Exponential { tau_s })
    }

    pub fn is_none(&self) -> bool {
        matches!(self, MemoryModel::None)
    }
}

/// Fidelity after waiting `t_s` seconds in memory: F(t) = 1/4 + (F − 1/4)·e^{−t/τ}.
pub fn memory_decay(f: Fidelity, t_s: f64, m: &MemoryModel) -> Fidelity {
    debug_assert!(t_s >= 0.0, "negative storage time {t_s}");
    match *m {
        MemoryModel::None => f,
        MemoryModel::Exponential { tau_s } => {
            let factor = if t_s == 0.0 {
                1.0
            } else if tau_s == 0.0 {
                0.0
            } else {
                (-t_s / tau_s).exp()
            };
            Fidelity::from_formula(0.25 + (f.value() - 0.25) * factor)
        }
    }
}

/// Probability that a photon survives `span_km` of fiber.
pub fn transmission_probability(span_km: f64, alpha_db_per_km: f64) -> f64 {
    10f64.powf(-alpha_db_per_km * span_km / 10.0)
}

/// Success probability of one elementary-pair attempt over a segment.
pub fn link_success_probability(link: &LinkModel) -> f64 {
    transmission_probability(link.spacing_km, link.alpha_db_per_km)
}

/// One-way signalling latency over `span_km`.
pub fn classical_comm_time(span_km: f64, link: &LinkModel) -> f64 {
    debug_assert!(span_km >= 0.0, "negative span {span_km}");
    span_km / link.signal_speed_km_s
}
